//! Vertex enumeration for bounded 2-D polyhedra (plot data).

use super::{Polyhedron, EPS_FEAS};
use crate::error::{Error, Result};

const MEMBER_TOL: f64 = 1e-7;

pub(crate) fn vertices_2d(p: &Polyhedron) -> Result<Vec<[f64; 2]>> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.dim(),
        });
    }
    let hull = p.box_hull()?;
    if hull.is_empty() {
        return Err(Error::EmptySet);
    }
    if hull.lo.iter().chain(&hull.hi).any(|v| !v.is_finite()) {
        return Err(Error::Unbounded);
    }
    let scale = hull
        .lo
        .iter()
        .chain(&hull.hi)
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    let merge_tol = EPS_FEAS.max(1e-9 * scale) * 10.0;

    // Candidate vertices: pairwise intersections of constraint lines that
    // lie in P.
    let cs = p.constraints();
    let mut points: Vec<[f64; 2]> = Vec::new();
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            let (a, b) = (&cs[i], &cs[j]);
            let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
            let na = a.normal[0].hypot(a.normal[1]);
            let nb = b.normal[0].hypot(b.normal[1]);
            if na == 0.0 || nb == 0.0 || det.abs() <= 1e-12 * na * nb {
                continue;
            }
            let x = (a.offset * b.normal[1] - b.offset * a.normal[1]) / det;
            let y = (a.normal[0] * b.offset - b.normal[0] * a.offset) / det;
            let v = [x, y];
            let ok = cs.iter().all(|c| {
                let n = c.normal[0].hypot(c.normal[1]).max(f64::MIN_POSITIVE);
                (c.eval(&v) - c.offset) / n <= MEMBER_TOL * scale
            });
            if ok {
                points.push(v);
            }
        }
    }
    if points.is_empty() {
        // Feasible but no two constraints meet inside: a single point
        // described by fewer than two independent lines cannot be bounded,
        // so this only happens for numerically degenerate input.
        if let Some(w) = p.feasible_point()? {
            return Ok(vec![[w[0], w[1]]]);
        }
        return Err(Error::EmptySet);
    }

    let cx = points.iter().map(|v| v[0]).sum::<f64>() / points.len() as f64;
    let cy = points.iter().map(|v| v[1]).sum::<f64>() / points.len() as f64;
    points.sort_by(|u, v| {
        let au = (u[1] - cy).atan2(u[0] - cx);
        let av = (v[1] - cy).atan2(v[0] - cx);
        au.total_cmp(&av)
    });

    // Merge near-duplicates anywhere in the list (several lines can pass
    // through one vertex).
    let mut merged: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for v in points {
        let dup = merged
            .iter()
            .any(|u| (u[0] - v[0]).abs() <= merge_tol && (u[1] - v[1]).abs() <= merge_tol);
        if !dup {
            merged.push(v);
        }
    }
    if merged.len() <= 2 {
        return Ok(merged);
    }

    // Re-sort around the centroid of the distinct vertices, start at the
    // lowest-then-leftmost vertex, and drop collinear middles.
    let cx = merged.iter().map(|v| v[0]).sum::<f64>() / merged.len() as f64;
    let cy = merged.iter().map(|v| v[1]).sum::<f64>() / merged.len() as f64;
    merged.sort_by(|u, v| {
        let au = (u[1] - cy).atan2(u[0] - cx);
        let av = (v[1] - cy).atan2(v[0] - cx);
        au.total_cmp(&av)
    });
    let start = (0..merged.len())
        .min_by(|&i, &j| {
            let (u, v) = (merged[i], merged[j]);
            u[1].total_cmp(&v[1]).then(u[0].total_cmp(&v[0]))
        })
        .unwrap_or(0);
    merged.rotate_left(start);

    let n = merged.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let prev = merged[(i + n - 1) % n];
        let cur = merged[i];
        let next = merged[(i + 1) % n];
        let cross = (cur[0] - prev[0]) * (next[1] - cur[1]) - (cur[1] - prev[1]) * (next[0] - cur[0]);
        if cross.abs() > merge_tol * scale {
            out.push(cur);
        }
    }
    if out.len() < 2 {
        // Everything collinear: keep the two extreme points.
        let (a, b) = extreme_pair(&merged);
        return Ok(vec![a, b]);
    }
    Ok(out)
}

fn extreme_pair(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut best = (points[0], points[0], -1.0);
    for (i, u) in points.iter().enumerate() {
        for v in &points[i + 1..] {
            let d = (u[0] - v[0]).hypot(u[1] - v[1]);
            if d > best.2 {
                best = (*u, *v, d);
            }
        }
    }
    (best.0, best.1)
}
