use super::{HalfSpace, Polyhedron};
use crate::error::{check_dim, Error, Result};

/// Closed interval with extended-real endpoints; empty iff `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.partial_cmp(&self.hi).is_none_or(|o| o.is_gt())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let r = Interval::new(self.lo.max(other.lo), self.hi.min(other.hi));
        if r.is_empty() {
            Interval::EMPTY
        } else {
            r
        }
    }

    /// Whether `self ⊆ other` (the empty interval is a subset of anything).
    pub fn is_subset(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }
}

/// Axis-aligned box `[lo_1, hi_1] × … × [lo_n, hi_n]` with extended-real
/// endpoints. Empty iff some `lo_i > hi_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperbox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Hyperbox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.iter().chain(&hi).any(|v| v.is_nan()) {
            return Err(Error::InvalidSet("NaN box endpoint".into()));
        }
        Ok(Self { lo, hi })
    }

    pub(crate) fn from_raw(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn from_intervals(intervals: &[Interval]) -> Self {
        Self {
            lo: intervals.iter().map(|i| i.lo).collect(),
            hi: intervals.iter().map(|i| i.hi).collect(),
        }
    }

    /// The canonical empty box: every coordinate is `[+inf, -inf]`.
    pub fn empty(dim: usize) -> Self {
        Self {
            lo: vec![f64::INFINITY; dim],
            hi: vec![f64::NEG_INFINITY; dim],
        }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn interval(&self, i: usize) -> Interval {
        Interval::new(self.lo[i], self.hi[i])
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.dim()).map(|i| self.interval(i))
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l.partial_cmp(h).is_none_or(|o| o.is_gt()))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *l - tol <= *v && *v <= *h + tol)
    }

    /// Componentwise intersection; canonicalized to [`Hyperbox::empty`] if
    /// any coordinate empties.
    pub fn intersect(&self, other: &Hyperbox) -> Result<Hyperbox> {
        check_dim(self.dim(), other.dim())?;
        let r = Hyperbox::from_raw(
            self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        );
        Ok(if r.is_empty() { Hyperbox::empty(r.dim()) } else { r })
    }

    pub fn is_subset(&self, other: &Hyperbox) -> bool {
        self.is_empty()
            || (self.dim() == other.dim()
                && self
                    .intervals()
                    .zip(other.intervals())
                    .all(|(a, b)| a.is_subset(&b)))
    }

    /// H-representation with one constraint per finite endpoint.
    pub fn to_polyhedron(&self) -> Polyhedron {
        let n = self.dim();
        if self.is_empty() {
            return Polyhedron::empty(n);
        }
        let mut p = Polyhedron::universe(n);
        for i in 0..n {
            if self.hi[i].is_finite() {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                p.push(HalfSpace::new(e, self.hi[i]));
            }
            if self.lo[i].is_finite() {
                let mut e = vec![0.0; n];
                e[i] = -1.0;
                p.push(HalfSpace::new(e, -self.lo[i]));
            }
        }
        p
    }

    /// Endpoint-wise comparison; equal infinities match.
    pub fn approx_eq(&self, other: &Hyperbox, tol: f64) -> bool {
        if self.is_empty() || other.is_empty() {
            return self.is_empty() && other.is_empty();
        }
        self.dim() == other.dim()
            && self
                .lo
                .iter()
                .chain(&self.hi)
                .zip(other.lo.iter().chain(&other.hi))
                .all(|(a, b)| a == b || (a - b).abs() <= tol)
    }

    /// Largest endpoint movement between two boxes of equal dimension;
    /// equal infinities count as no movement.
    pub fn max_shift(&self, other: &Hyperbox) -> f64 {
        self.lo
            .iter()
            .chain(&self.hi)
            .zip(other.lo.iter().chain(&other.hi))
            .map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() })
            .fold(0.0, f64::max)
    }
}
