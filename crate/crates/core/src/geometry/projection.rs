//! Fourier–Motzkin elimination.

use super::{HalfSpace, Polyhedron};
use crate::error::{Error, Result};

const COEFF_ZERO: f64 = 1e-14;

/// Projects `p` onto the coordinates in `keep` (result coordinate `j` is
/// input coordinate `keep[j]`). Every eliminated variable is followed by a
/// redundancy sweep, which keeps the pairwise blowup in check.
pub(crate) fn fm_project(p: &Polyhedron, keep: &[usize]) -> Result<Polyhedron> {
    let n = p.dim();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("projection onto zero coordinates".into()));
    }
    let mut kept_mask = vec![false; n];
    for &k in keep {
        if k >= n || kept_mask[k] {
            return Err(Error::InvalidArgument(format!(
                "invalid or repeated projection coordinate {k} for dimension {n}"
            )));
        }
        kept_mask[k] = true;
    }
    if p.is_empty()? {
        return Ok(Polyhedron::empty(keep.len()));
    }

    let mut current = p.remove_redundant()?;
    for e in (0..n).filter(|&i| !kept_mask[i]) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = Vec::new();
        for c in current.into_constraints() {
            let a = c.normal[e];
            if a > COEFF_ZERO {
                pos.push(c);
            } else if a < -COEFF_ZERO {
                neg.push(c);
            } else {
                let mut c = c;
                c.normal[e] = 0.0;
                next.push(c);
            }
        }
        for up in &pos {
            for down in &neg {
                // up_e > 0 > down_e: |down_e|·up + up_e·down cancels x_e.
                let (wu, wd) = (-down.normal[e], up.normal[e]);
                let mut normal: Vec<f64> = up
                    .normal
                    .iter()
                    .zip(&down.normal)
                    .map(|(u, d)| wu * u + wd * d)
                    .collect();
                normal[e] = 0.0;
                let mut offset = wu * up.offset + wd * down.offset;
                let scale = normal.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if scale > 0.0 {
                    normal.iter_mut().for_each(|v| *v /= scale);
                    offset /= scale;
                }
                next.push(HalfSpace::new(normal, offset));
            }
        }
        current = Polyhedron::new(n, next)?;
        current = match current.drop_trivial_rows() {
            Some(q) => q.remove_redundant()?,
            None => return Ok(Polyhedron::empty(keep.len())),
        };
    }

    let constraints = current
        .into_constraints()
        .into_iter()
        .map(|c| HalfSpace::new(keep.iter().map(|&k| c.normal[k]).collect(), c.offset))
        .collect();
    Polyhedron::new(keep.len(), constraints)
}
