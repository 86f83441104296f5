//! Random enhancement layer: a frozen affine map plus elementwise
//! nonlinearity whose output is concatenated with the raw inputs (the direct
//! link), producing the enhanced layer output matrix.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Activation functions applied to enhancement node pre-activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Sigmoid,
    Sine,
    Hardlim,
    Tribas,
    Radbas,
}

impl Activation {
    pub const ALL: [Activation; 5] = [
        Activation::Sigmoid,
        Activation::Sine,
        Activation::Hardlim,
        Activation::Tribas,
        Activation::Radbas,
    ];

    /// Evaluates the activation at `t`. Hardlim is closed at zero: `t = 0`
    /// maps to 1.
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-t).exp()),
            Activation::Sine => t.sin(),
            Activation::Hardlim => {
                if t >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tribas => (1.0 - t.abs()).max(0.0),
            Activation::Radbas => (-(t * t)).exp(),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Sine => "sine",
            Activation::Hardlim => "hardlim",
            Activation::Tribas => "tribas",
            Activation::Radbas => "radbas",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(Activation::Sigmoid),
            "sine" | "sin" => Ok(Activation::Sine),
            "hardlim" => Ok(Activation::Hardlim),
            "tribas" => Ok(Activation::Tribas),
            "radbas" => Ok(Activation::Radbas),
            other => Err(Error::InvalidParameter(format!(
                "unknown activation {other:?} (expected sigmoid, sine, hardlim, tribas, radbas)"
            ))),
        }
    }
}

/// A frozen random enhancement layer. Weights are drawn uniformly from
/// `[-u, u]`, biases from `[0, u]`; the layer is immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancementLayer {
    weights: DMatrix<f64>,
    biases: DVector<f64>,
    activation: Activation,
    scale: f64,
    seed: u64,
}

impl EnhancementLayer {
    /// Draws a fresh layer for `input_dim` features and `nodes` enhancement
    /// nodes, deterministically from `seed`.
    pub fn init(
        input_dim: usize,
        nodes: usize,
        activation: Activation,
        scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidParameter(
                "input dimension must be >= 1".into(),
            ));
        }
        if nodes == 0 {
            return Err(Error::InvalidParameter("node count must be >= 1".into()));
        }
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "initialization half-range must be positive and finite, got {scale}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Column-major fill; the draw order is part of the determinism contract.
        let weights = DMatrix::from_fn(input_dim, nodes, |_, _| rng.random_range(-scale..=scale));
        let biases = DVector::from_fn(nodes, |_, _| rng.random_range(0.0..=scale));
        Ok(Self {
            weights,
            biases,
            activation,
            scale,
            seed,
        })
    }

    /// Rebuilds a layer from stored parts (deserialization helper and the
    /// entry point for hand-specified layers in tests).
    pub fn from_parts(
        weights: DMatrix<f64>,
        biases: DVector<f64>,
        activation: Activation,
        scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if weights.ncols() != biases.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weight columns but {} biases",
                weights.ncols(),
                biases.len()
            )));
        }
        if weights.ncols() == 0 || weights.nrows() == 0 {
            return Err(Error::InvalidParameter("layer must be non-empty".into()));
        }
        Ok(Self {
            weights,
            biases,
            activation,
            scale,
            seed,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn nodes(&self) -> usize {
        self.weights.ncols()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn biases(&self) -> &DVector<f64> {
        &self.biases
    }

    /// Maps `x` (N x n) to the enhanced output `[x | G(x*A + 1*b')]` of
    /// shape N x (n + P). The first n columns are the direct link and equal
    /// the input bit for bit.
    pub fn apply(&self, x: &DMatrix<f64>) -> Result<EnhancedOutput> {
        let n = self.input_dim();
        if x.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "layer expects {n} input features, got {}",
                x.ncols()
            )));
        }
        let rows = x.nrows();
        let p = self.nodes();
        let mut pre = x * &self.weights;
        for i in 0..rows {
            for j in 0..p {
                pre[(i, j)] = self.activation.eval(pre[(i, j)] + self.biases[j]);
            }
        }
        let mut h = DMatrix::zeros(rows, n + p);
        h.view_mut((0, 0), (rows, n)).copy_from(x);
        h.view_mut((0, n), (rows, p)).copy_from(&pre);
        Ok(EnhancedOutput::new(h, n))
    }
}

/// The enhanced layer output matrix `H = [H1 H2]`: raw features alongside
/// enhancement node outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancedOutput {
    h: DMatrix<f64>,
    input_dim: usize,
}

impl EnhancedOutput {
    pub(crate) fn new(h: DMatrix<f64>, input_dim: usize) -> Self {
        Self { h, input_dim }
    }

    /// Wraps an arbitrary feature matrix as an enhanced output. This is the
    /// escape hatch for custom (e.g. explicit polynomial) feature maps;
    /// `input_dim` marks how many leading columns are the direct link.
    pub fn from_matrix(h: DMatrix<f64>, input_dim: usize) -> Result<Self> {
        if input_dim > h.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "direct-link width {input_dim} exceeds {} columns",
                h.ncols()
            )));
        }
        Ok(Self { h, input_dim })
    }

    /// Builds `[x | features]` from a direct-link block and an explicit
    /// feature block with matching row counts.
    pub fn from_blocks(x: &DMatrix<f64>, features: &DMatrix<f64>) -> Result<Self> {
        if x.nrows() != features.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} direct-link rows vs {} feature rows",
                x.nrows(),
                features.nrows()
            )));
        }
        let mut h = DMatrix::zeros(x.nrows(), x.ncols() + features.ncols());
        h.view_mut((0, 0), (x.nrows(), x.ncols())).copy_from(x);
        h.view_mut((0, x.ncols()), (x.nrows(), features.ncols()))
            .copy_from(features);
        Ok(Self {
            h,
            input_dim: x.ncols(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.h
    }

    pub fn n_rows(&self) -> usize {
        self.h.nrows()
    }

    pub fn width(&self) -> usize {
        self.h.ncols()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}
