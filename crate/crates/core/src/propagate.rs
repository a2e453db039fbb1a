//! Exact forward images of polyhedra through affine maps, piecewise-affine
//! activations, and whole networks.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{HalfSpace, PolyUnion, Polyhedron};
use crate::network::{Activation, AffineMap, Network};

/// LU pivots below this magnitude send `affine_image` down the projection path.
const PIVOT_MIN: f64 = 1e-10;

/// One affine piece of a componentwise activation: on `region` the
/// activation equals `map`, whose weight matrix is diagonal and whose bias
/// is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PwaPiece {
    pub region: Polyhedron,
    pub map: AffineMap,
}

/// Slopes of the two pieces of a ReLU-family activation, positive side first.
pub(crate) fn piece_slopes(act: &Activation) -> Result<Vec<f64>> {
    match act {
        Activation::Identity => Ok(vec![1.0]),
        Activation::Sigmoid => Err(Error::NotPiecewiseAffine(act.to_string())),
        _ => Ok(vec![1.0, act.negative_slope().unwrap_or(0.0)]),
    }
}

/// Sign constraint selecting piece `k` (0 = nonnegative side) of neuron `i`.
pub(crate) fn sign_constraint(n: usize, i: usize, k: usize) -> HalfSpace {
    let mut normal = vec![0.0; n];
    normal[i] = if k == 0 { -1.0 } else { 1.0 };
    HalfSpace::new(normal, 0.0)
}

/// All affine pieces of `α` on `R^n`, in lexicographic sign-pattern order
/// with neuron 0 outermost and the nonnegative side first. Regions are
/// closed; neighbouring maps agree on shared boundaries.
pub fn pwa_partitioning(act: &Activation, n: usize) -> Result<Vec<PwaPiece>> {
    if n == 0 {
        return Err(Error::InvalidArgument("partition of R^0".into()));
    }
    let slopes = piece_slopes(act)?;
    if slopes.len() == 1 {
        return Ok(vec![PwaPiece {
            region: Polyhedron::universe(n),
            map: AffineMap::identity(n),
        }]);
    }
    if n >= 32 {
        return Err(Error::InvalidArgument(format!(
            "refusing to enumerate 2^{n} pieces"
        )));
    }
    let mut pieces = Vec::with_capacity(1 << n);
    for pattern in 0..(1usize << n) {
        let mut region = Polyhedron::universe(n);
        let mut diag = vec![0.0; n];
        for (i, d) in diag.iter_mut().enumerate() {
            let k = (pattern >> (n - 1 - i)) & 1;
            region.push(sign_constraint(n, i, k));
            *d = slopes[k];
        }
        pieces.push(PwaPiece {
            region,
            map: AffineMap::diagonal(&diag),
        });
    }
    Ok(pieces)
}

/// Exact image `f(X)`.
///
/// Square maps with a well-conditioned LU factorization substitute
/// `x = W⁻¹(y - b)` into the constraints. Diagonal maps project out their
/// zero coordinates and pin the matching outputs to the bias. Everything
/// else projects the graph `{(x, y) : x ∈ X, y = W x + b}` onto `y`.
pub fn affine_image(x: &Polyhedron, f: &AffineMap) -> Result<Polyhedron> {
    check_dim(f.n_in(), x.dim())?;
    let m = f.n_out();
    if x.is_empty()? {
        return Ok(Polyhedron::empty(m));
    }
    if let Some(inv) = stable_inverse(&f.weights) {
        return Ok(substitute(x, &inv, f));
    }
    if f.is_diagonal() {
        return diagonal_image(x, f);
    }
    graph_image(x, f)
}

fn stable_inverse(w: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !w.is_square() {
        return None;
    }
    let lu = w.clone().full_piv_lu();
    let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_pivot <= PIVOT_MIN {
        return None;
    }
    lu.try_inverse()
}

// C x <= d with x = W⁻¹(y - b) becomes (C W⁻¹) y <= d + C W⁻¹ b.
fn substitute(x: &Polyhedron, inv: &DMatrix<f64>, f: &AffineMap) -> Polyhedron {
    let n = f.n_out();
    let shift = inv * &f.bias;
    let rows = x
        .constraints()
        .iter()
        .map(|c| {
            let normal: Vec<f64> = (0..n)
                .map(|j| c.normal.iter().enumerate().map(|(i, a)| a * inv[(i, j)]).sum())
                .collect();
            let offset = c.offset + c.normal.iter().zip(shift.iter()).map(|(a, s)| a * s).sum::<f64>();
            HalfSpace::new(normal, offset)
        })
        .collect();
    Polyhedron::new(n, rows).expect("dimensions agree")
}

fn diagonal_image(x: &Polyhedron, f: &AffineMap) -> Result<Polyhedron> {
    let n = f.n_in();
    let d: Vec<f64> = (0..n).map(|i| f.weights[(i, i)]).collect();
    let b = &f.bias;
    let live: Vec<usize> = (0..n).filter(|&i| d[i] != 0.0).collect();
    let mut rows = Vec::new();
    if !live.is_empty() {
        let shadow = if live.len() == n { x.clone() } else { x.project(&live)? };
        for c in shadow.constraints() {
            let mut normal = vec![0.0; n];
            let mut offset = c.offset;
            for (k, &i) in live.iter().enumerate() {
                normal[i] = c.normal[k] / d[i];
                offset += c.normal[k] * b[i] / d[i];
            }
            rows.push(HalfSpace::new(normal, offset));
        }
    }
    for i in (0..n).filter(|&i| d[i] == 0.0) {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push(HalfSpace::new(e.clone(), b[i]));
        e[i] = -1.0;
        rows.push(HalfSpace::new(e, -b[i]));
    }
    Polyhedron::new(n, rows)
}

fn graph_image(x: &Polyhedron, f: &AffineMap) -> Result<Polyhedron> {
    let (n, m) = (f.n_in(), f.n_out());
    let mut rows = Vec::with_capacity(x.num_constraints() + 2 * m);
    for c in x.constraints() {
        let mut normal = c.normal.clone();
        normal.resize(n + m, 0.0);
        rows.push(HalfSpace::new(normal, c.offset));
    }
    for r in 0..m {
        // W_r x - y_r <= -b_r and -W_r x + y_r <= b_r
        let mut up: Vec<f64> = f.weights.row(r).iter().copied().collect();
        up.resize(n + m, 0.0);
        up[n + r] = -1.0;
        let down: Vec<f64> = up.iter().map(|v| -v).collect();
        rows.push(HalfSpace::new(up, -f.bias[r]));
        rows.push(HalfSpace::new(down, f.bias[r]));
    }
    let graph = Polyhedron::new(n + m, rows)?;
    let keep: Vec<usize> = (n..n + m).collect();
    graph.project(&keep)
}

/// `α(X) = ⋃_j α_j(P_j ∩ X)`. Pieces are refined one neuron at a time and
/// empty branches are dropped as soon as they appear, so only the orthants
/// that actually meet `X` are ever imaged.
pub fn activation_image(x: &Polyhedron, act: &Activation) -> Result<PolyUnion> {
    let n = x.dim();
    let slopes = piece_slopes(act)?;
    if x.is_empty()? {
        return Ok(PolyUnion::empty(n));
    }
    if slopes.len() == 1 {
        return Ok(PolyUnion::from(x.clone()));
    }
    let mut branches: Vec<(Polyhedron, Vec<f64>)> = vec![(x.clone(), Vec::with_capacity(n))];
    for i in 0..n {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for (region, diag) in &branches {
            for (k, &s) in slopes.iter().enumerate() {
                let mut r = region.clone();
                r.push(sign_constraint(n, i, k));
                if !r.is_empty()? {
                    let mut d = diag.clone();
                    d.push(s);
                    next.push((r, d));
                }
            }
        }
        branches = next;
    }
    let parts = branches
        .iter()
        .map(|(r, d)| affine_image(r, &AffineMap::diagonal(d)))
        .collect::<Result<Vec<_>>>()?;
    PolyUnion::new(n, parts)
}

/// Exact image `N(X)` as a union of nonempty polyhedra.
pub fn network_image(net: &Network, x: &Polyhedron) -> Result<PolyUnion> {
    network_image_union(net, &PolyUnion::from(x.clone()))
}

/// Exact image of a union, distributing over its parts. Output parts keep
/// the order of the input parts and, within each, the sign-pattern order
/// of the branches that produced them.
pub fn network_image_union(net: &Network, x: &PolyUnion) -> Result<PolyUnion> {
    check_dim(net.input_dim(), x.dim())?;
    net.require_piecewise_affine()?;
    let mut parts: Vec<Polyhedron> = x.parts().to_vec();
    for layer in net.layers() {
        let images: Vec<Result<Vec<Polyhedron>>> = parts
            .par_iter()
            .map(|p| {
                if p.is_empty()? {
                    return Ok(Vec::new());
                }
                let y = affine_image(p, &layer.affine)?;
                Ok(activation_image(&y, &layer.activation)?.into_parts())
            })
            .collect();
        parts = images.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    }
    let parts = parts
        .par_iter()
        .map(|p| p.remove_redundant())
        .collect::<Result<Vec<_>>>()?;
    PolyUnion::new(net.output_dim(), parts)
}
