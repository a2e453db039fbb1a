use super::{Hyperbox, Polyhedron};
use crate::error::{check_dim, Result};

/// Finite union of polyhedra of one dimension. Parts may overlap; no parts
/// means the empty set.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyUnion {
    dim: usize,
    parts: Vec<Polyhedron>,
}

impl PolyUnion {
    pub fn new(dim: usize, parts: Vec<Polyhedron>) -> Result<Self> {
        for p in &parts {
            check_dim(dim, p.dim())?;
        }
        Ok(Self { dim, parts })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            parts: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[Polyhedron] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Polyhedron> {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// True when there are no parts. Parts themselves may still be empty
    /// as sets; see [`PolyUnion::canonicalize`].
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x, tol))
    }

    /// `self ∪ other`, concatenating parts.
    pub fn union(&self, other: &PolyUnion) -> Result<PolyUnion> {
        check_dim(self.dim, other.dim)?;
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Ok(PolyUnion {
            dim: self.dim,
            parts,
        })
    }

    /// Intersects every part with `q`, dropping empty results.
    pub fn intersect_each(&self, q: &Polyhedron) -> Result<PolyUnion> {
        let mut parts = Vec::new();
        for p in &self.parts {
            let r = p.intersect(q)?;
            if !r.is_empty()? {
                parts.push(r);
            }
        }
        Ok(PolyUnion {
            dim: self.dim,
            parts,
        })
    }

    /// Drops parts that are empty as sets.
    pub fn canonicalize(self) -> Result<PolyUnion> {
        let mut parts = Vec::with_capacity(self.parts.len());
        for p in self.parts {
            if !p.is_empty()? {
                parts.push(p);
            }
        }
        Ok(PolyUnion {
            dim: self.dim,
            parts,
        })
    }

    /// Box hull of the whole union.
    pub fn box_hull(&self) -> Result<Hyperbox> {
        let mut acc = Hyperbox::empty(self.dim);
        for p in &self.parts {
            let h = p.box_hull()?;
            if h.is_empty() {
                continue;
            }
            if acc.is_empty() {
                acc = h;
            } else {
                for i in 0..self.dim {
                    acc.lo[i] = acc.lo[i].min(h.lo[i]);
                    acc.hi[i] = acc.hi[i].max(h.hi[i]);
                }
            }
        }
        Ok(acc)
    }
}

impl From<Polyhedron> for PolyUnion {
    fn from(p: Polyhedron) -> Self {
        Self {
            dim: p.dim(),
            parts: vec![p],
        }
    }
}
