//! Feed-forward networks `N = ℓ_k ∘ … ∘ ℓ_1` with `ℓ_i(x) = α_i(W_i x + b_i)`.
//!
//! On disk a network is JSON:
//!
//! ```text
//! {"layers": [{"W": [[...], ...], "b": [...], "activation": "relu"}, ...]}
//! ```
//!
//! where `activation` is `"identity"`, `"relu"`, `{"leaky_relu": a}`, or
//! `"sigmoid"`. Weights are row-major (`W` has one row per output neuron).

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Scalar activation, applied componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    /// `x` for `x > 0`, `a·x` otherwise; `a >= 0`. `LeakyRelu(0)` is ReLU.
    LeakyRelu(f64),
    Sigmoid,
}

impl Activation {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu(a) => {
                if x > 0.0 {
                    x
                } else if a == 0.0 {
                    0.0
                } else {
                    a * x
                }
            }
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    pub fn is_piecewise_affine(&self) -> bool {
        !matches!(self, Activation::Sigmoid)
    }

    pub fn is_injective(&self) -> bool {
        match *self {
            Activation::Identity | Activation::Sigmoid => true,
            Activation::Relu => false,
            Activation::LeakyRelu(a) => a > 0.0,
        }
    }

    /// Number of affine pieces of the scalar function, `None` for sigmoid.
    pub fn piece_count(&self) -> Option<usize> {
        match self {
            Activation::Identity => Some(1),
            Activation::Relu | Activation::LeakyRelu(_) => Some(2),
            Activation::Sigmoid => None,
        }
    }

    /// Slope on the non-positive side for the ReLU family.
    pub(crate) fn negative_slope(&self) -> Option<f64> {
        match *self {
            Activation::Relu => Some(0.0),
            Activation::LeakyRelu(a) => Some(a),
            _ => None,
        }
    }

    /// Closed range of the scalar function.
    pub fn codomain(&self) -> (f64, f64) {
        match *self {
            Activation::Relu | Activation::LeakyRelu(0.0) => (0.0, f64::INFINITY),
            Activation::Sigmoid => (0.0, 1.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Activation::LeakyRelu(a) if !(a >= 0.0 && a.is_finite()) => Err(
                Error::InvalidNetwork(format!("leaky ReLU slope must be finite and >= 0, got {a}")),
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Identity => write!(f, "identity"),
            Activation::Relu => write!(f, "relu"),
            Activation::LeakyRelu(a) => write!(f, "leaky_relu({a})"),
            Activation::Sigmoid => write!(f, "sigmoid"),
        }
    }
}

/// `x ↦ W x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
}

impl AffineMap {
    pub fn new(weights: DMatrix<f64>, bias: DVector<f64>) -> Result<Self> {
        check_dim(weights.nrows(), bias.len())?;
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidNetwork("non-finite weight or bias".into()));
        }
        Ok(Self { weights, bias })
    }

    /// From row-major nested rows.
    pub fn from_rows(rows: &[Vec<f64>], bias: &[f64]) -> Result<Self> {
        let n_out = rows.len();
        let n_in = rows.first().map_or(0, Vec::len);
        if n_out == 0 || n_in == 0 {
            return Err(Error::InvalidNetwork("weight matrix must be nonempty".into()));
        }
        if rows.iter().any(|r| r.len() != n_in) {
            return Err(Error::InvalidNetwork("ragged weight matrix".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(
            DMatrix::from_row_slice(n_out, n_in, &flat),
            DVector::from_column_slice(bias),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self {
            weights: DMatrix::identity(n, n),
            bias: DVector::zeros(n),
        }
    }

    /// Diagonal map `x ↦ diag(d) x`.
    pub fn diagonal(d: &[f64]) -> Self {
        Self {
            weights: DMatrix::from_diagonal(&DVector::from_column_slice(d)),
            bias: DVector::zeros(d.len()),
        }
    }

    pub fn n_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.weights.nrows()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n_in(), x.len())?;
        let y = &self.weights * DVector::from_column_slice(x) + &self.bias;
        Ok(y.iter().copied().collect())
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        check_dim(self.n_in(), inner.n_out())?;
        Ok(AffineMap {
            weights: &self.weights * &inner.weights,
            bias: &self.weights * &inner.bias + &self.bias,
        })
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_out())
            .map(|i| self.weights.row(i).iter().copied().collect())
            .collect()
    }

    /// Whether `W` is diagonal (square, all off-diagonal entries zero).
    pub fn is_diagonal(&self) -> bool {
        let w = &self.weights;
        w.is_square()
            && (0..w.nrows()).all(|i| (0..w.ncols()).all(|j| i == j || w[(i, j)] == 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub affine: AffineMap,
    pub activation: Activation,
}

impl Layer {
    pub fn new(affine: AffineMap, activation: Activation) -> Self {
        Self { affine, activation }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.affine.apply(x)?;
        y.iter_mut().for_each(|v| *v = self.activation.apply(*v));
        Ok(y)
    }

    pub fn width(&self) -> usize {
        self.affine.n_out()
    }
}

/// A nonempty sequence of layers with chaining dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidNetwork("a network needs at least one layer".into()));
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].affine.n_out() != pair[1].affine.n_in() {
                return Err(Error::InvalidNetwork(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    i,
                    pair[0].affine.n_out(),
                    i + 1,
                    pair[1].affine.n_in()
                )));
            }
        }
        for l in &layers {
            l.activation.validate()?;
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].affine.n_in()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].affine.n_out()
    }

    pub fn is_piecewise_affine(&self) -> bool {
        self.layers.iter().all(|l| l.activation.is_piecewise_affine())
    }

    pub(crate) fn require_piecewise_affine(&self) -> Result<()> {
        match self.layers.iter().find(|l| !l.activation.is_piecewise_affine()) {
            Some(l) => Err(Error::NotPiecewiseAffine(l.activation.to_string())),
            None => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len())?;
        let mut v = x.to_vec();
        for l in &self.layers {
            v = l.apply(&v)?;
        }
        Ok(v)
    }

    /// Index of the largest output, ties to the lowest index.
    pub fn classify(&self, x: &[f64]) -> Result<usize> {
        if self.output_dim() < 2 {
            return Err(Error::InvalidArgument(
                "classification needs at least two outputs".into(),
            ));
        }
        let y = self.eval(x)?;
        let mut best = 0;
        for (i, v) in y.iter().enumerate() {
            if *v > y[best] {
                best = i;
            }
        }
        Ok(best)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text)?;
        let layers = file
            .layers
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                AffineMap::from_rows(&l.weights, &l.bias)
                    .map(|a| Layer::new(a, l.activation))
                    .map_err(|e| Error::InvalidNetwork(format!("layer {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn to_json(&self) -> String {
        let file = NetworkFile {
            layers: self
                .layers
                .iter()
                .map(|l| LayerFile {
                    weights: l.affine.rows(),
                    bias: l.affine.bias.iter().copied().collect(),
                    activation: l.activation,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("network serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    #[serde(rename = "W")]
    weights: Vec<Vec<f64>>,
    #[serde(rename = "b")]
    bias: Vec<f64>,
    activation: Activation,
}
