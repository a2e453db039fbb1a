//! Exact preimages through piecewise-affine networks, and a single-branch
//! under-approximation.
//!
//! Both walk the same branch tree. Going backwards through the network,
//! every ReLU-family layer splits the current polyhedron neuron by neuron
//! into its nonnegative and nonpositive pieces, and every affine layer pulls
//! the constraints back through `W`. A branch dies as soon as its
//! polyhedron becomes empty. Siblings are ordered nonnegative-first, so the
//! leaves come out in lexicographic sign-pattern order.

use std::collections::VecDeque;

use log::debug;
use rayon::prelude::*;

use crate::error::{check_dim, Result};
use crate::geometry::{HalfSpace, PolyUnion, Polyhedron};
use crate::network::{Activation, AffineMap, Network};
use crate::propagate::{piece_slopes, sign_constraint};

/// `f⁻¹(Y) = {x : C W x <= d - C b}` for `Y = {y : C y <= d}`. The result is
/// returned as is: no emptiness or redundancy processing.
pub fn preimage_affine(y: &Polyhedron, f: &AffineMap) -> Result<Polyhedron> {
    check_dim(f.n_out(), y.dim())?;
    let n = f.n_in();
    let rows = y
        .constraints()
        .iter()
        .map(|c| {
            let normal = (0..n)
                .map(|j| c.normal.iter().enumerate().map(|(i, a)| a * f.weights[(i, j)]).sum())
                .collect();
            let offset = c.offset - c.normal.iter().zip(f.bias.iter()).map(|(a, b)| a * b).sum::<f64>();
            HalfSpace::new(normal, offset)
        })
        .collect();
    Polyhedron::new(n, rows)
}

/// `α⁻¹(Z) = ⋃_j P_j ∩ α_j⁻¹(Z)`, part by part, empty pieces dropped.
pub fn preimage_activation(z: &PolyUnion, act: &Activation) -> Result<PolyUnion> {
    let steps = activation_steps(act, z.dim())?;
    let parts = explore_all(z, &steps)?;
    PolyUnion::new(z.dim(), parts)
}

/// Exact `N⁻¹(Z)` as a union of nonempty polyhedra with redundant
/// constraints removed. Branches are processed in parallel; the output
/// order does not depend on the thread count.
pub fn preimage_network(z: &PolyUnion, net: &Network) -> Result<PolyUnion> {
    let steps = network_steps(net, z.dim())?;
    let leaves = explore_all(z, &steps)?;
    let parts = leaves
        .par_iter()
        .map(|p| p.remove_redundant())
        .collect::<Result<Vec<_>>>()?;
    debug!("preimage: {} parts", parts.len());
    PolyUnion::new(net.input_dim(), parts)
}

/// Order in which [`preimage_underapprox`] visits the branch tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    #[default]
    DepthFirst,
    BreadthFirst,
}

/// One nonempty polyhedron contained in `N⁻¹(Z)`, found by following one
/// activation piece at a time and backtracking when a branch empties.
/// `None` exactly when the preimage is empty.
///
/// All leaves sit at the same depth, so both orders return the first
/// surviving leaf in sign-pattern order; they differ in how much of the
/// tree is held in memory and in how soon dead subtrees are abandoned.
pub fn preimage_underapprox(
    z: &PolyUnion,
    net: &Network,
    order: SearchOrder,
) -> Result<Option<Polyhedron>> {
    let steps = network_steps(net, z.dim())?;
    let roots = roots(z)?;
    let found = match order {
        SearchOrder::DepthFirst => {
            let mut stack: Vec<(Polyhedron, usize)> = roots.into_iter().rev().map(|p| (p, 0)).collect();
            let mut hit = None;
            while let Some((p, depth)) = stack.pop() {
                if depth == steps.len() {
                    hit = Some(p);
                    break;
                }
                for c in steps[depth].children(&p)?.into_iter().rev() {
                    stack.push((c, depth + 1));
                }
            }
            hit
        }
        SearchOrder::BreadthFirst => {
            let mut queue: VecDeque<(Polyhedron, usize)> = roots.into_iter().map(|p| (p, 0)).collect();
            let mut hit = None;
            while let Some((p, depth)) = queue.pop_front() {
                if depth == steps.len() {
                    hit = Some(p);
                    break;
                }
                for c in steps[depth].children(&p)? {
                    queue.push_back((c, depth + 1));
                }
            }
            hit
        }
    };
    found.map(|p| p.remove_redundant()).transpose()
}

/// `∏ (pieces per activation)^(layer width)`: the most parts
/// [`preimage_network`] or [`crate::network_image`] can return per input
/// part. Saturates instead of overflowing.
pub fn branch_count_bound(net: &Network) -> Result<u128> {
    net.require_piecewise_affine()?;
    let mut bound: u128 = 1;
    for layer in net.layers() {
        let b = layer.activation.piece_count().unwrap_or(1) as u128;
        for _ in 0..layer.width() {
            bound = bound.saturating_mul(b);
        }
    }
    Ok(bound)
}

/// One level of the branch tree.
enum Step<'a> {
    /// Split neuron `neuron` into its pieces with the given slopes.
    Split { neuron: usize, slopes: Vec<f64> },
    Affine(&'a AffineMap),
}

impl Step<'_> {
    fn children(&self, p: &Polyhedron) -> Result<Vec<Polyhedron>> {
        match self {
            Step::Split { neuron, slopes } => {
                let n = p.dim();
                let mut out = Vec::with_capacity(slopes.len());
                for (k, &s) in slopes.iter().enumerate() {
                    // Substituting y_i = s·x_i scales column i. A zero slope
                    // turns rows depending only on this neuron into constant
                    // checks, settled syntactically below.
                    let rows = p
                        .constraints()
                        .iter()
                        .map(|c| {
                            let mut c = c.clone();
                            c.normal[*neuron] *= s;
                            c
                        })
                        .chain(std::iter::once(sign_constraint(n, *neuron, k)))
                        .collect();
                    if let Some(q) = settle(Polyhedron::new(n, rows)?)? {
                        out.push(q);
                    }
                }
                Ok(out)
            }
            Step::Affine(f) => Ok(settle(preimage_affine(p, f)?)?.into_iter().collect()),
        }
    }
}

/// Drops satisfied constant rows, kills the branch on a violated one, and
/// otherwise decides emptiness with the LP.
fn settle(p: Polyhedron) -> Result<Option<Polyhedron>> {
    match p.drop_trivial_rows() {
        None => Ok(None),
        Some(q) if q.is_empty()? => Ok(None),
        Some(q) => Ok(Some(q)),
    }
}

fn activation_steps<'a>(act: &Activation, n: usize) -> Result<Vec<Step<'a>>> {
    let slopes = piece_slopes(act)?;
    if slopes.len() == 1 {
        return Ok(Vec::new());
    }
    Ok((0..n)
        .map(|neuron| Step::Split {
            neuron,
            slopes: slopes.clone(),
        })
        .collect())
}

fn network_steps(net: &Network, out_dim: usize) -> Result<Vec<Step<'_>>> {
    check_dim(net.output_dim(), out_dim)?;
    net.require_piecewise_affine()?;
    let mut steps = Vec::new();
    for layer in net.layers().iter().rev() {
        steps.extend(activation_steps(&layer.activation, layer.width())?);
        steps.push(Step::Affine(&layer.affine));
    }
    Ok(steps)
}

fn roots(z: &PolyUnion) -> Result<Vec<Polyhedron>> {
    let mut out = Vec::with_capacity(z.len());
    for p in z.parts() {
        if let Some(q) = settle(p.clone())? {
            out.push(q);
        }
    }
    Ok(out)
}

/// Level-by-level expansion of the whole tree. Each level is mapped in
/// parallel and collected in order, which keeps the leaves sorted.
fn explore_all(z: &PolyUnion, steps: &[Step<'_>]) -> Result<Vec<Polyhedron>> {
    let mut frontier = roots(z)?;
    for (depth, step) in steps.iter().enumerate() {
        let next: Vec<Vec<Polyhedron>> = frontier
            .par_iter()
            .map(|p| step.children(p))
            .collect::<Result<_>>()?;
        frontier = next.into_iter().flatten().collect();
        debug!("preimage: depth {} keeps {} branches", depth + 1, frontier.len());
        if frontier.is_empty() {
            break;
        }
    }
    Ok(frontier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Hyperbox;
    use crate::network::Layer;

    fn interval(lo: f64, hi: f64) -> Polyhedron {
        Hyperbox::new(vec![lo], vec![hi]).unwrap().to_polyhedron()
    }

    fn example_band() -> (AffineMap, Polyhedron) {
        let f = AffineMap::from_rows(&[vec![-0.46, 0.32]], &[2.0]).unwrap();
        (f, interval(2.0, 3.0))
    }

    #[test]
    fn inverse_affine_band() {
        let (f, y) = example_band();
        let band = preimage_affine(&y, &f).unwrap();
        assert!(band.contains(&[0.0, 1.0], 0.0));
        assert!(band.contains(&[100.0, 100.0 * 0.46 / 0.32], 1e-9));
        assert!(!band.contains(&[0.0, 4.0], 1e-9));
        assert!(!band.contains(&[1.0, 0.0], 1e-9));
    }

    #[test]
    fn inverse_identity_and_constant_maps() {
        let y = interval(-1.0, 4.0);
        assert_eq!(preimage_affine(&y, &AffineMap::identity(1)).unwrap(), y);
        let konst = AffineMap::from_rows(&[vec![0.0]], &[5.0]).unwrap();
        let p = preimage_affine(&interval(0.0, 1.0), &konst).unwrap();
        assert!(p.constraints().iter().all(|c| c.is_trivial()));
        assert!(p.is_empty().unwrap());
    }

    #[test]
    fn relu_preimage_of_band() {
        // Pieces in order (+,+), (+,-), (-,+), (-,-). The open-region piece
        // x1 > 0, x2 <= 0 has an empty preimage; with closed regions only
        // its face x1 = 0 survives, and that face lies in the last piece.
        let (f, y) = example_band();
        let band = preimage_affine(&y, &f).unwrap();
        let pre = preimage_activation(&PolyUnion::from(band), &Activation::Relu).unwrap();
        assert_eq!(pre.len(), 4);
        let face = pre.parts()[1].box_hull().unwrap();
        assert!(face.lo[0].abs() < 1e-9 && face.hi[0].abs() < 1e-9, "{face:?}");
        let x2 = pre.parts()[2].box_hull().unwrap();
        assert!(x2.hi[0].abs() < 1e-9 && x2.lo[0] == f64::NEG_INFINITY);
        assert!(x2.lo[1].abs() < 1e-9 && (x2.hi[1] - 3.125).abs() < 1e-9, "{x2:?}");
        for x in [[1.0, 2.0], [-3.0, 1.0], [-1.0, -1.0], [0.0, -5.0]] {
            assert!(pre.contains(&x, 1e-9), "{x:?}");
        }
        assert!(!pre.contains(&[1.0, -1.0], 1e-9));
        assert!(!pre.contains(&[-1.0, 3.2], 1e-9));
    }

    #[test]
    fn relu_preimages_in_one_dimension() {
        let neg = PolyUnion::from(interval(-2.0, -1.0));
        assert!(preimage_activation(&neg, &Activation::Relu).unwrap().is_empty());
        let unit = PolyUnion::from(interval(0.0, 1.0));
        let pre = preimage_activation(&unit, &Activation::Relu).unwrap();
        assert_eq!(pre.len(), 2);
        for x in [-100.0, -1.0, 0.0, 0.5, 1.0] {
            assert!(pre.contains(&[x], 1e-12), "{x}");
        }
        assert!(!pre.contains(&[1.5], 1e-9));
        assert!(preimage_activation(&unit, &Activation::Sigmoid).is_err());
    }

    #[test]
    fn identity_network_underapprox_is_affine_preimage() {
        let f = AffineMap::from_rows(&[vec![2.0]], &[1.0]).unwrap();
        let net = Network::new(vec![Layer::new(f, Activation::Identity)]).unwrap();
        let z = PolyUnion::from(interval(1.0, 3.0));
        for order in [SearchOrder::DepthFirst, SearchOrder::BreadthFirst] {
            let p = preimage_underapprox(&z, &net, order).unwrap().unwrap();
            let h = p.box_hull().unwrap();
            assert!(h.approx_eq(&Hyperbox::new(vec![0.0], vec![1.0]).unwrap(), 1e-12));
        }
    }

    #[test]
    fn branch_bounds() {
        let classifier = Network::from_json(include_str!("../../../fixtures/classifier.json")).unwrap();
        assert_eq!(branch_count_bound(&classifier).unwrap(), 16);
        let parabola = Network::from_json(include_str!("../../../fixtures/parabola.json")).unwrap();
        assert_eq!(branch_count_bound(&parabola).unwrap(), 64);
        let id = Network::new(vec![Layer::new(AffineMap::identity(3), Activation::Identity)]).unwrap();
        assert_eq!(branch_count_bound(&id).unwrap(), 1);
    }

    #[test]
    fn empty_target_has_empty_preimage() {
        let net = Network::from_json(include_str!("../../../fixtures/classifier.json")).unwrap();
        let z = PolyUnion::from(Polyhedron::empty(2));
        assert!(preimage_network(&z, &net).unwrap().is_empty());
        assert!(preimage_underapprox(&z, &net, SearchOrder::DepthFirst).unwrap().is_none());
        assert!(preimage_network(&PolyUnion::empty(3), &net).is_err());
    }
}
