//! Reference oracles for the integration tests. Nothing here calls into the
//! library's algorithms: networks are evaluated from raw weights, and
//! polytope questions are answered by brute-force vertex enumeration.

#![allow(dead_code)]

use rand::Rng;
use serde_json::Value;

pub const CLASSIFIER: &str = include_str!("../../../../fixtures/classifier.json");
pub const CLASSIFIER_LEAKY: &str = include_str!("../../../../fixtures/classifier_leaky.json");
pub const PARABOLA: &str = include_str!("../../../../fixtures/parabola.json");
pub const XOR: &str = include_str!("../../../../fixtures/xor.json");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Act {
    Identity,
    Relu,
    Leaky(f64),
    Sigmoid,
}

impl Act {
    fn apply(self, x: f64) -> f64 {
        match self {
            Act::Identity => x,
            Act::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Act::Leaky(a) => {
                if x > 0.0 {
                    x
                } else {
                    a * x
                }
            }
            Act::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    fn has_kink(self) -> bool {
        matches!(self, Act::Relu | Act::Leaky(_))
    }

    fn json(self) -> String {
        match self {
            Act::Identity => "\"identity\"".into(),
            Act::Relu => "\"relu\"".into(),
            Act::Leaky(a) => format!("{{\"leaky_relu\": {a:?}}}"),
            Act::Sigmoid => "\"sigmoid\"".into(),
        }
    }
}

/// A network as raw weight arrays.
#[derive(Clone, Debug)]
pub struct RefNet {
    pub layers: Vec<(Vec<Vec<f64>>, Vec<f64>, Act)>,
}

impl RefNet {
    pub fn parse(text: &str) -> RefNet {
        let v: Value = serde_json::from_str(text).unwrap();
        let layers = v["layers"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| {
                let w = l["W"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
                    .collect();
                let b = l["b"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
                let act = match &l["activation"] {
                    Value::String(s) if s == "identity" => Act::Identity,
                    Value::String(s) if s == "relu" => Act::Relu,
                    Value::String(s) if s == "sigmoid" => Act::Sigmoid,
                    Value::Object(o) => Act::Leaky(o["leaky_relu"].as_f64().unwrap()),
                    other => panic!("unknown activation {other}"),
                };
                (w, b, act)
            })
            .collect();
        RefNet { layers }
    }

    pub fn to_json(&self) -> String {
        let layers: Vec<String> = self
            .layers
            .iter()
            .map(|(w, b, a)| {
                format!(
                    "{{\"W\": {:?}, \"b\": {:?}, \"activation\": {}}}",
                    w,
                    b,
                    a.json()
                )
            })
            .collect();
        format!("{{\"layers\": [{}]}}", layers.join(", "))
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].0[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().1.len()
    }

    /// Output and the smallest |pre-activation| over all kinked neurons.
    pub fn eval_with_margin(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let mut v = x.to_vec();
        let mut margin = f64::INFINITY;
        for (w, b, act) in &self.layers {
            let z: Vec<f64> = w
                .iter()
                .zip(b)
                .map(|(row, bi)| row.iter().zip(&v).map(|(a, c)| a * c).sum::<f64>() + bi)
                .collect();
            if act.has_kink() {
                margin = z.iter().fold(margin, |m, t| m.min(t.abs()));
            }
            v = z.into_iter().map(|t| act.apply(t)).collect();
        }
        (v, margin)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.eval_with_margin(x).0
    }

    /// Random network with the given widths (input first), weights and
    /// biases in [-1, 1], and a random piecewise-affine activation per layer.
    pub fn random(rng: &mut impl Rng, widths: &[usize]) -> RefNet {
        let layers = widths
            .windows(2)
            .map(|p| {
                let w = (0..p[1])
                    .map(|_| (0..p[0]).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .collect();
                let b = (0..p[1]).map(|_| rng.random_range(-1.0..1.0)).collect();
                let act = match rng.random_range(0..4) {
                    0 => Act::Identity,
                    1 | 2 => Act::Relu,
                    _ => Act::Leaky(rng.random_range(0.01..0.5)),
                };
                (w, b, act)
            })
            .collect();
        RefNet { layers }
    }
}

/// `{x : A x <= b}` as plain rows.
#[derive(Clone, Debug)]
pub struct Rows {
    pub dim: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Rows {
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.a
            .iter()
            .zip(&self.b)
            .all(|(r, bi)| r.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() <= bi + tol)
    }

    /// Random polytope: a box in [-2, 2]^dim cut by `extra` random
    /// half-spaces through points near the box center. May be empty.
    pub fn random(rng: &mut impl Rng, dim: usize, extra: usize) -> Rows {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..dim {
            let lo = rng.random_range(-2.0..0.0);
            let hi = rng.random_range(0.0..2.0);
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            a.push(e.clone());
            b.push(hi);
            e[i] = -1.0;
            a.push(e);
            b.push(-lo);
        }
        for _ in 0..extra {
            let n: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            a.push(n);
            b.push(rng.random_range(-0.6..1.0));
        }
        Rows { dim, a, b }
    }

    /// Every vertex, by solving each `dim`-subset of rows as equalities.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let m = self.a.len();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut idx: Vec<usize> = (0..self.dim).collect();
        if m < self.dim {
            return out;
        }
        loop {
            let sys: Vec<Vec<f64>> = idx.iter().map(|&i| self.a[i].clone()).collect();
            let rhs: Vec<f64> = idx.iter().map(|&i| self.b[i]).collect();
            if let Some(x) = solve(sys, rhs) {
                if self.contains(&x, 1e-9) && !out.iter().any(|v| dist(v, &x) < 1e-9) {
                    out.push(x);
                }
            }
            // next combination
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < m - self.dim + k {
                    idx[k] += 1;
                    for j in k + 1..self.dim {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

pub fn dist(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *x -= f * y;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub fn uniform(rng: &mut impl Rng, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(l, h)| if l == h { *l } else { rng.random_range(*l..*h) })
        .collect()
}
