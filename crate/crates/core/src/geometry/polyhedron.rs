use std::fmt;

use super::lp::{self, LpOutcome};
use super::{Hyperbox, EPS_FEAS};
use crate::error::{check_dim, Error, Result};

/// Closed half-space `{x : normal · x <= offset}`.
///
/// A zero normal is allowed: it is the universe when `offset >= 0` and the
/// empty set otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `normal · x`
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.eval(x) <= self.offset + tol
    }

    pub fn is_trivial(&self) -> bool {
        self.normal.iter().all(|v| *v == 0.0)
    }

    fn norm(&self) -> f64 {
        self.normal.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Intersection of finitely many closed half-spaces in `R^dim`. An empty
/// constraint list is the whole space.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    dim: usize,
    constraints: Vec<HalfSpace>,
}

impl Polyhedron {
    /// Builds a polyhedron, checking that every normal has length `dim`.
    pub fn new(dim: usize, constraints: Vec<HalfSpace>) -> Result<Self> {
        for c in &constraints {
            check_dim(dim, c.dim())?;
        }
        Ok(Self { dim, constraints })
    }

    /// `{x : C x <= d}` from row-major `C`.
    pub fn from_rows(dim: usize, c: &[Vec<f64>], d: &[f64]) -> Result<Self> {
        check_dim(c.len(), d.len())?;
        let constraints = c
            .iter()
            .zip(d)
            .map(|(row, &off)| HalfSpace::new(row.clone(), off))
            .collect();
        Self::new(dim, constraints)
    }

    pub fn universe(dim: usize) -> Self {
        Self {
            dim,
            constraints: Vec::new(),
        }
    }

    /// A syntactically empty polyhedron (`0 · x <= -1`).
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            constraints: vec![HalfSpace::new(vec![0.0; dim], -1.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[HalfSpace] {
        &self.constraints
    }

    pub fn into_constraints(self) -> Vec<HalfSpace> {
        self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_universe(&self) -> bool {
        self.constraints.is_empty()
    }

    pub(crate) fn push(&mut self, h: HalfSpace) {
        debug_assert_eq!(h.dim(), self.dim);
        self.constraints.push(h);
    }

    /// `P ∩ Q`, by concatenating constraint lists.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        check_dim(self.dim, other.dim)?;
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        Ok(Polyhedron {
            dim: self.dim,
            constraints,
        })
    }

    /// Membership with slack `tol` on every constraint.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.constraints.iter().all(|c| c.contains(x, tol))
    }

    /// A point of `P` (within [`EPS_FEAS`]), or `None` if `P` is empty.
    pub fn feasible_point(&self) -> Result<Option<Vec<f64>>> {
        lp::feasible_point(self.dim, &self.constraints)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.feasible_point()?.is_none())
    }

    /// `sup { direction · x : x ∈ P }`, `+inf` when unbounded.
    pub fn support(&self, direction: &[f64]) -> Result<f64> {
        check_dim(self.dim, direction.len())?;
        match lp::maximize(self.dim, &self.constraints, direction)? {
            LpOutcome::Infeasible => Err(Error::EmptySet),
            LpOutcome::Unbounded { .. } => Ok(f64::INFINITY),
            LpOutcome::Optimal { value, .. } => Ok(value),
        }
    }

    /// Smallest box containing `P`; the canonical empty box when `P` is empty.
    pub fn box_hull(&self) -> Result<Hyperbox> {
        if self.is_empty()? {
            return Ok(Hyperbox::empty(self.dim));
        }
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        let mut dir = vec![0.0; self.dim];
        for i in 0..self.dim {
            dir[i] = 1.0;
            hi.push(self.support(&dir)?);
            dir[i] = -1.0;
            lo.push(-self.support(&dir)?);
            dir[i] = 0.0;
        }
        Ok(Hyperbox::from_raw(lo, hi))
    }

    pub fn is_bounded(&self) -> Result<bool> {
        let hull = self.box_hull()?;
        Ok(hull.lo.iter().chain(&hull.hi).all(|v| v.is_finite() || hull.is_empty()))
    }

    /// Drops constraints implied by the others. A constraint is redundant iff
    /// the maximum of its normal over the remaining constraints does not
    /// exceed its offset by more than [`EPS_FEAS`] (in unit-normal scale).
    /// Trivially satisfied zero rows are always dropped.
    pub fn remove_redundant(&self) -> Result<Polyhedron> {
        let mut kept: Vec<HalfSpace> = self
            .constraints
            .iter()
            .filter(|c| !(c.is_trivial() && c.offset >= 0.0))
            .cloned()
            .collect();
        let mut i = 0;
        while i < kept.len() {
            let candidate = kept.remove(i);
            let redundant = match lp::maximize(self.dim, &kept, &candidate.normal)? {
                LpOutcome::Infeasible => {
                    // The others alone are empty: any constraint is implied.
                    true
                }
                LpOutcome::Unbounded { .. } => false,
                LpOutcome::Optimal { value, .. } => {
                    value <= candidate.offset + EPS_FEAS * candidate.norm().max(1.0)
                }
            };
            if !redundant {
                kept.insert(i, candidate);
                i += 1;
            }
        }
        Ok(Polyhedron {
            dim: self.dim,
            constraints: kept,
        })
    }

    /// Checks zero-normal rows syntactically: returns `None` if one is
    /// violated, otherwise the polyhedron without them.
    pub(crate) fn drop_trivial_rows(mut self) -> Option<Polyhedron> {
        let mut contradictory = false;
        self.constraints.retain(|c| {
            if c.normal.iter().all(|v| v.abs() < 1e-14) {
                if c.offset < -EPS_FEAS {
                    contradictory = true;
                }
                false
            } else {
                true
            }
        });
        (!contradictory).then_some(self)
    }

    /// Exact projection onto the coordinates `keep` (in that order), by
    /// Fourier–Motzkin elimination with redundancy removal after each step.
    pub fn project(&self, keep: &[usize]) -> Result<Polyhedron> {
        super::projection::fm_project(self, keep)
    }

    /// Vertices of a bounded, nonempty 2-D polyhedron in counterclockwise
    /// order. Degenerate inputs yield one (point) or two (segment) vertices.
    pub fn vertices_2d(&self) -> Result<Vec<[f64; 2]>> {
        super::polygon::vertices_2d(self)
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constraints.is_empty() {
            return write!(f, "R^{}", self.dim);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{:?}·x <= {}", c.normal, c.offset)?;
        }
        Ok(())
    }
}
