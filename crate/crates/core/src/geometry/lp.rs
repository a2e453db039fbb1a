//! Dense two-phase simplex over free variables.
//!
//! Problems here are tiny (tens of rows, a handful of variables), so the
//! tableau is stored densely and pivoting follows Bland's rule, which rules
//! out cycling on the degenerate systems that equality pairs produce.
//!
//! Every free variable `x_k` is split as `x_k = p_k - q_k` with `p, q >= 0`,
//! and every row `a·x <= b` gets a slack. Rows are scaled to unit normal
//! before solving so a single feasibility tolerance applies uniformly.

use super::{HalfSpace, EPS_FEAS};
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const ZERO_NORMAL: f64 = 1e-14;
const MAX_PIVOTS: usize = 50_000;

/// Result of a maximization.
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    /// Feasible, but the objective grows without bound. `point` is feasible.
    Unbounded { point: Vec<f64> },
    Optimal { value: f64, point: Vec<f64> },
}

/// Maximizes `objective · x` subject to `normal · x <= offset` for all rows.
pub fn maximize(dim: usize, rows: &[HalfSpace], objective: &[f64]) -> Result<LpOutcome> {
    if objective.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: objective.len(),
        });
    }
    let Some(mut tableau) = Tableau::build(dim, rows)? else {
        return Ok(LpOutcome::Infeasible);
    };
    if !tableau.phase_one()? {
        return Ok(LpOutcome::Infeasible);
    }
    let bounded = tableau.phase_two(objective)?;
    let point = tableau.point();
    if bounded {
        let value = objective.iter().zip(&point).map(|(c, x)| c * x).sum();
        Ok(LpOutcome::Optimal { value, point })
    } else {
        Ok(LpOutcome::Unbounded { point })
    }
}

/// Returns a point satisfying every row (up to [`EPS_FEAS`]), or `None` if
/// the system is infeasible.
pub fn feasible_point(dim: usize, rows: &[HalfSpace]) -> Result<Option<Vec<f64>>> {
    let Some(mut tableau) = Tableau::build(dim, rows)? else {
        return Ok(None);
    };
    if tableau.phase_one()? {
        Ok(Some(tableau.point()))
    } else {
        Ok(None)
    }
}

struct Tableau {
    /// `(rows + 1) x (cols + 1)`, row-major; the last row is the objective
    /// and the last column is the right-hand side.
    cells: Vec<f64>,
    rows: usize,
    cols: usize,
    dim: usize,
    /// First artificial column; columns at or past it never re-enter.
    art_start: usize,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    /// Builds the phase-one tableau, or `None` when a zero-normal row is
    /// already contradictory.
    fn build(dim: usize, rows: &[HalfSpace]) -> Result<Option<Self>> {
        let mut scaled: Vec<(Vec<f64>, f64)> = Vec::with_capacity(rows.len());
        for row in rows {
            if row.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.normal.len(),
                });
            }
            if row.normal.iter().any(|v| !v.is_finite()) || row.offset.is_nan() {
                return Err(Error::Lp("non-finite constraint coefficient".into()));
            }
            let norm = row.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < ZERO_NORMAL {
                if row.offset < -EPS_FEAS {
                    return Ok(None);
                }
                continue;
            }
            if row.offset == f64::INFINITY {
                continue;
            }
            if row.offset == f64::NEG_INFINITY {
                return Ok(None);
            }
            scaled.push((row.normal.iter().map(|v| v / norm).collect(), row.offset / norm));
        }

        let m = scaled.len();
        let n_art = scaled.iter().filter(|(_, b)| *b < 0.0).count();
        let art_start = 2 * dim + m;
        let cols = art_start + n_art;
        let width = cols + 1;
        let mut cells = vec![0.0; (m + 1) * width];
        let mut basis = Vec::with_capacity(m);
        let mut next_art = art_start;
        for (i, (a, b)) in scaled.iter().enumerate() {
            let row = &mut cells[i * width..(i + 1) * width];
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            for k in 0..dim {
                row[k] = sign * a[k];
                row[dim + k] = -sign * a[k];
            }
            row[2 * dim + i] = sign;
            row[cols] = sign * b;
            if *b < 0.0 {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(2 * dim + i);
            }
        }
        Ok(Some(Self {
            cells,
            rows: m,
            cols,
            dim,
            art_start,
            basis,
            pivots: 0,
        }))
    }

    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width() + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn objective_row_mut(&mut self) -> &mut [f64] {
        let w = self.width();
        let start = self.rows * w;
        &mut self.cells[start..start + w]
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::Lp("pivot limit exceeded".into()));
        }
        let w = self.width();
        let p = self.at(r, c);
        if !p.is_finite() || p.abs() < f64::MIN_POSITIVE {
            return Err(Error::Lp("degenerate pivot element".into()));
        }
        for v in &mut self.cells[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let factor = self.cells[i * w + c];
            if factor == 0.0 {
                continue;
            }
            for (v, pv) in self.cells[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.cells[i * w + c] = 0.0;
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Runs primal simplex on the current objective row. Returns `false` when
    /// an improving column has no bounding row (unbounded).
    fn optimize(&mut self, col_limit: usize) -> Result<bool> {
        loop {
            let obj = self.rows;
            let entering = (0..col_limit).find(|&j| self.at(obj, j) < -COST_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio - 1e-12
                            || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[best])
                        {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, c)?,
                None => return Ok(false),
            }
            if self.cells.iter().any(|v| v.is_nan()) {
                return Err(Error::Lp("NaN in tableau".into()));
            }
        }
    }

    /// Minimizes the sum of artificials. Returns whether the system is
    /// feasible; on success no artificial column remains in the basis at a
    /// nonzero level.
    fn phase_one(&mut self) -> Result<bool> {
        let w = self.width();
        if self.art_start == self.cols {
            return Ok(true);
        }
        {
            let art_start = self.art_start;
            let cols = self.cols;
            let obj = self.objective_row_mut();
            obj.iter_mut().for_each(|v| *v = 0.0);
            obj[art_start..cols].iter_mut().for_each(|v| *v = 1.0);
        }
        for i in 0..self.rows {
            if self.basis[i] >= self.art_start {
                for j in 0..w {
                    let v = self.cells[i * w + j];
                    self.cells[self.rows * w + j] -= v;
                }
            }
        }
        // Artificials may leave but never re-enter.
        self.optimize(self.art_start)?;
        let infeasibility = -self.rhs(self.rows);
        if infeasibility > EPS_FEAS {
            return Ok(false);
        }
        for i in 0..self.rows {
            if self.basis[i] < self.art_start {
                continue;
            }
            let swap = (0..self.art_start).find(|&j| self.at(i, j).abs() > 1e-9);
            if let Some(j) = swap {
                self.pivot(i, j)?;
            }
            // Otherwise the row is linearly dependent on the others; it keeps
            // a zero artificial in the basis and never blocks a ratio test.
        }
        Ok(true)
    }

    /// Installs `objective` (maximize) and optimizes. Returns boundedness.
    fn phase_two(&mut self, objective: &[f64]) -> Result<bool> {
        let w = self.width();
        let dim = self.dim;
        let mut cost = vec![0.0; self.cols];
        for k in 0..dim {
            cost[k] = objective[k];
            cost[dim + k] = -objective[k];
        }
        {
            let obj = self.objective_row_mut();
            obj.iter_mut().for_each(|v| *v = 0.0);
            for (o, c) in obj.iter_mut().zip(&cost) {
                *o = -c;
            }
        }
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                let v = self.cells[i * w + j];
                self.cells[self.rows * w + j] += cb * v;
            }
        }
        self.optimize(self.art_start)
    }

    fn point(&self) -> Vec<f64> {
        let mut values = vec![0.0; 2 * self.dim];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < 2 * self.dim {
                values[b] = self.rhs(i);
            }
        }
        (0..self.dim)
            .map(|k| values[k] - values[self.dim + k])
            .collect()
    }
}
