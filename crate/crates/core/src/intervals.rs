//! Box arithmetic through networks: forward interval propagation, inverses
//! of monotone activations, box over-approximations of preimages, and the
//! forward-backward contractor.

use crate::error::{check_dim, Error, Result};
use crate::geometry::{json, Hyperbox, Interval, PolyUnion, Polyhedron};
use crate::network::{Activation, AffineMap, Network};
use crate::preimage::preimage_affine;

/// Endpoint movement below which the contractor counts as converged.
pub const FIXPOINT_TOL: f64 = 1e-9;

/// Iteration cap used by the CLI when none is given.
pub const DEFAULT_MAX_ITER: usize = 20;

/// Interval-arithmetic image of `B` under `f`. Zero weights are skipped so
/// that unbounded inputs do not produce `0·inf`.
pub fn interval_affine(b: &Hyperbox, f: &AffineMap) -> Result<Hyperbox> {
    check_dim(f.n_in(), b.dim())?;
    if b.is_empty() {
        return Ok(Hyperbox::empty(f.n_out()));
    }
    let mut lo = f.bias.iter().copied().collect::<Vec<_>>();
    let mut hi = lo.clone();
    for i in 0..f.n_out() {
        for j in 0..f.n_in() {
            let w = f.weights[(i, j)];
            if w > 0.0 {
                lo[i] += w * b.lo[j];
                hi[i] += w * b.hi[j];
            } else if w < 0.0 {
                lo[i] += w * b.hi[j];
                hi[i] += w * b.lo[j];
            }
        }
    }
    Hyperbox::new(lo, hi)
}

/// `[α(lo), α(hi)]` per coordinate; exact because every supported
/// activation is nondecreasing.
pub fn interval_activation(b: &Hyperbox, act: &Activation) -> Hyperbox {
    if b.is_empty() {
        return Hyperbox::empty(b.dim());
    }
    Hyperbox::from_intervals(
        &b.intervals()
            .map(|i| Interval::new(act.apply(i.lo), act.apply(i.hi)))
            .collect::<Vec<_>>(),
    )
}

/// Exact preimage `α⁻¹(I)` of an interval.
pub fn activation_inverse_interval(act: &Activation, i: Interval) -> Interval {
    if i.is_empty() {
        return Interval::EMPTY;
    }
    let r = match *act {
        Activation::Identity => i,
        Activation::Sigmoid => {
            if i.hi <= 0.0 || i.lo >= 1.0 {
                return Interval::EMPTY;
            }
            // Above 0.5 the spacing of doubles is 2^-53 and `1 - y` loses
            // digits, so a rounded sigmoid value could invert to a point
            // strictly inside the true preimage. Such endpoints move outward
            // by one spacing first.
            let logit = |y: f64| y.ln() - (-y).ln_1p();
            let half_ulp = f64::EPSILON / 2.0;
            let lo = if i.lo > 0.5 { i.lo - half_ulp } else { i.lo };
            let hi = if i.hi > 0.5 { i.hi + half_ulp } else { i.hi };
            Interval::new(
                if lo <= 0.0 { f64::NEG_INFINITY } else { logit(lo) },
                if hi >= 1.0 { f64::INFINITY } else { logit(hi) },
            )
        }
        Activation::LeakyRelu(a) if a > 0.0 => {
            let inv = |y: f64| if y > 0.0 { y } else { y / a };
            Interval::new(inv(i.lo), inv(i.hi))
        }
        Activation::Relu | Activation::LeakyRelu(_) => {
            if i.hi < 0.0 {
                return Interval::EMPTY;
            }
            if i.lo > 0.0 {
                i
            } else {
                Interval::new(f64::NEG_INFINITY, i.hi)
            }
        }
    };
    if r.is_empty() {
        Interval::EMPTY
    } else {
        r
    }
}

fn activation_inverse_box(act: &Activation, b: &Hyperbox) -> Hyperbox {
    let r = Hyperbox::from_intervals(
        &b.intervals()
            .map(|i| activation_inverse_interval(act, i))
            .collect::<Vec<_>>(),
    );
    if r.is_empty() {
        Hyperbox::empty(r.dim())
    } else {
        r
    }
}

/// Box hull of `{x ∈ X : W x + b ∈ Y}`, by support LPs. Always within `X`.
pub fn affine_preimage_box(y: &Hyperbox, f: &AffineMap, x: &Hyperbox) -> Result<Hyperbox> {
    check_dim(f.n_out(), y.dim())?;
    check_dim(f.n_in(), x.dim())?;
    if x.is_empty() || y.is_empty() {
        return Ok(Hyperbox::empty(x.dim()));
    }
    let p = preimage_affine(&y.to_polyhedron(), f)?.intersect(&x.to_polyhedron())?;
    p.box_hull()?.intersect(x)
}

/// Over-approximates `N⁻¹(Z)` by the exact backward loop with every
/// activation preimage replaced by the inverse of its box hull. Needs
/// injective activations; the result contains the exact preimage and may
/// have unbounded parts.
pub fn preimage_overapprox_box(z: &PolyUnion, net: &Network) -> Result<PolyUnion> {
    check_dim(net.output_dim(), z.dim())?;
    if let Some(l) = net.layers().iter().find(|l| !l.activation.is_injective()) {
        return Err(Error::NotInjective(l.activation.to_string()));
    }
    let mut parts: Vec<Polyhedron> = z.parts().to_vec();
    for layer in net.layers().iter().rev() {
        let mut next = Vec::with_capacity(parts.len());
        for p in &parts {
            let pre_act = if layer.activation == Activation::Identity {
                p.clone()
            } else {
                let hull = p.box_hull()?;
                if hull.is_empty() {
                    continue;
                }
                let inv = activation_inverse_box(&layer.activation, &hull);
                if inv.is_empty() {
                    continue;
                }
                inv.to_polyhedron()
            };
            let q = preimage_affine(&pre_act, &layer.affine)?;
            if let Some(q) = q.drop_trivial_rows() {
                if !q.is_empty()? {
                    next.push(q);
                }
            }
        }
        parts = next;
    }
    let parts = parts
        .iter()
        .map(|p| p.remove_redundant())
        .collect::<Result<Vec<_>>>()?;
    PolyUnion::new(net.input_dim(), parts)
}

/// Per-iteration neuron boxes. Each iteration holds one box per neuron
/// group: the inputs, the post-activation values of every hidden layer, and
/// the outputs. Iteration 0 is the starting configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronTrace {
    pub iterations: Vec<Vec<Hyperbox>>,
}

impl NeuronTrace {
    pub fn last(&self) -> &[Hyperbox] {
        self.iterations.last().map_or(&[], Vec::as_slice)
    }

    /// `[[{"lo": [...], "hi": [...]}, ...], ...]`, one iteration per line.
    pub fn to_json(&self) -> String {
        let mut s = String::from("[");
        for (t, groups) in self.iterations.iter().enumerate() {
            s.push_str(if t == 0 { "\n  [" } else { ",\n  [" });
            for (g, b) in groups.iter().enumerate() {
                if g > 0 {
                    s.push_str(", ");
                }
                s.push_str(&format!(
                    "{{\"lo\": {}, \"hi\": {}}}",
                    json::vector(&b.lo),
                    json::vector(&b.hi)
                ));
            }
            s.push(']');
        }
        s.push_str("\n]\n");
        s
    }
}

/// Result of [`forward_backward_contract`].
#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub input: Hyperbox,
    pub output: Hyperbox,
    pub trace: NeuronTrace,
    /// Sweeps performed (forward plus backward counts as one).
    pub iterations: usize,
    /// Whether a fixpoint was reached before the iteration cap. An emptied
    /// configuration is a fixpoint.
    pub converged: bool,
}

impl Contraction {
    /// True when the contractor proved that no input in `X` maps into `Y`.
    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }
}

/// Shrinks the input box `X`, the output box `Y` and every hidden box
/// without losing any `x ∈ X` with `N(x) ∈ Y`.
///
/// Each iteration runs a forward sweep (interval images, intersected into
/// the stored boxes) and then a backward sweep (activation inverses and
/// LP box hulls of the affine preimages), and stops once no endpoint moves
/// by more than [`FIXPOINT_TOL`]. If any box empties, all of them do.
pub fn forward_backward_contract(
    net: &Network,
    x: &Hyperbox,
    y: &Hyperbox,
    max_iter: usize,
) -> Result<Contraction> {
    if max_iter < 1 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    check_dim(net.input_dim(), x.dim())?;
    check_dim(net.output_dim(), y.dim())?;
    let layers = net.layers();

    let mut groups = Vec::with_capacity(layers.len() + 1);
    groups.push(x.clone());
    for layer in layers {
        let (lo, hi) = layer.activation.codomain();
        groups.push(Hyperbox::from_intervals(&vec![Interval::new(lo, hi); layer.width()]));
    }
    let k = layers.len();
    groups[k] = groups[k].intersect(y)?;
    if groups.iter().any(Hyperbox::is_empty) {
        empty_all(&mut groups);
    }

    let mut trace = vec![groups.clone()];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter && !converged {
        iterations += 1;
        let before = groups.clone();
        if sweep(net, &mut groups)?.is_none() {
            empty_all(&mut groups);
        }
        converged = groups[0].is_empty()
            || before
                .iter()
                .zip(&groups)
                .all(|(a, b)| a.max_shift(b) <= FIXPOINT_TOL);
        trace.push(groups.clone());
    }

    Ok(Contraction {
        input: groups[0].clone(),
        output: groups[k].clone(),
        trace: NeuronTrace { iterations: trace },
        iterations,
        converged,
    })
}

/// One forward and one backward sweep; `None` as soon as a box empties.
fn sweep(net: &Network, groups: &mut [Hyperbox]) -> Result<Option<()>> {
    let layers = net.layers();
    for (l, layer) in layers.iter().enumerate() {
        let pre = interval_affine(&groups[l], &layer.affine)?;
        let post = interval_activation(&pre, &layer.activation);
        groups[l + 1] = groups[l + 1].intersect(&post)?;
        if groups[l + 1].is_empty() {
            return Ok(None);
        }
    }
    for (l, layer) in layers.iter().enumerate().rev() {
        let pre = activation_inverse_box(&layer.activation, &groups[l + 1]);
        groups[l] = affine_preimage_box(&pre, &layer.affine, &groups[l])?;
        if groups[l].is_empty() {
            return Ok(None);
        }
    }
    Ok(Some(()))
}

fn empty_all(groups: &mut [Hyperbox]) {
    for g in groups.iter_mut() {
        *g = Hyperbox::empty(g.dim());
    }
}
