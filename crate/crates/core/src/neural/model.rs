//! Wavelet-network and multilayer-perceptron classifiers.
//!
//! Both models share the `Classifier` surface used by the trainer, the
//! gradient checker and the evaluator: a flattened parameter vector, a
//! forward probability, and an accumulate-style cross-entropy gradient.

use crate::error::{CadError, Result};
use crate::neural::wavelet::{mother_wavelet, mother_wavelet_deriv, WaveletKind};
use crate::rng::SplitMix64;

/// Floor applied to dilations during updates.
pub const MIN_DILATION: f64 = 1e-3;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Cross-entropy with clamped probability so the loss stays finite.
pub fn cross_entropy(p: f64, y: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Per-feature z-score normalization fitted on the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalizer {
    pub fn fit(rows: &[Vec<f64>]) -> Normalizer {
        let dim = rows.first().map_or(0, |r| r.len());
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut std = vec![0.0; dim];
        for row in rows {
            for ((s, &v), &m) in std.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut std {
            *s = (*s / n).sqrt().max(1e-9);
        }
        Normalizer { mean, std }
    }

    pub fn identity(dim: usize) -> Normalizer {
        Normalizer { mean: vec![0.0; dim], std: vec![1.0; dim] }
    }

    pub fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(x.iter().zip(&self.mean).zip(&self.std).map(|((&v, &m), &s)| (v - m) / s));
    }
}

/// Shared classifier surface.
pub trait Classifier {
    fn input_dim(&self) -> usize;
    fn forward(&self, x: &[f64]) -> f64;
    fn param_len(&self) -> usize;
    fn get_params(&self, out: &mut Vec<f64>);
    fn set_params(&mut self, p: &[f64]);
    /// Add the cross-entropy gradient at (x, y) into `grad` and return the
    /// sample loss. `grad` must have `param_len` entries.
    fn accumulate_grad(&self, x: &[f64], y: f64, grad: &mut [f64]) -> f64;
    /// True for entries that participate in L2 regularization (input and
    /// output weights; dilations, translations and biases do not).
    fn l2_mask(&self) -> Vec<bool>;
    /// Clamp parameters to their valid domain after an update.
    fn project_params(&mut self);
    fn normalizer(&self) -> &Normalizer;
    fn set_normalizer(&mut self, norm: Normalizer);
}

/// One hidden unit of the wavelet network: psi((w.x - b) / a).
#[derive(Debug, Clone, PartialEq)]
pub struct Wavelon {
    pub weights: Vec<f64>,
    pub dilation: f64,
    pub translation: f64,
}

/// Three-layer wavelet neural network with a logistic output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct WnnModel {
    pub kind: WaveletKind,
    input_dim: usize,
    pub wavelons: Vec<Wavelon>,
    pub out_weights: Vec<f64>,
    pub out_bias: f64,
    norm: Normalizer,
}

impl WnnModel {
    pub fn new(kind: WaveletKind, input_dim: usize, hidden: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || hidden == 0 {
            return Err(CadError::invalid("wnn needs nonzero dimensions"));
        }
        let mut r = SplitMix64::new(seed);
        let scale = 1.0 / (input_dim as f64).sqrt();
        let wavelons = (0..hidden)
            .map(|_| Wavelon {
                weights: (0..input_dim).map(|_| r.uniform(-scale, scale)).collect(),
                dilation: 1.0 + r.uniform(0.0, 0.5),
                translation: r.uniform(-1.0, 1.0),
            })
            .collect();
        let out_weights = (0..hidden).map(|_| r.uniform(-0.5, 0.5)).collect();
        Ok(Self {
            kind,
            input_dim,
            wavelons,
            out_weights,
            out_bias: 0.0,
            norm: Normalizer::identity(input_dim),
        })
    }

    pub fn hidden_units(&self) -> usize {
        self.wavelons.len()
    }

    fn forward_normalized(&self, xn: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let mut activations = Vec::with_capacity(self.wavelons.len());
        let mut pre = Vec::with_capacity(self.wavelons.len());
        let mut net = self.out_bias;
        for (unit, &v) in self.wavelons.iter().zip(&self.out_weights) {
            let u: f64 =
                unit.weights.iter().zip(xn).map(|(&w, &x)| w * x).sum::<f64>() - unit.translation;
            let z = u / unit.dilation;
            let h = mother_wavelet(self.kind, z);
            pre.push(u);
            activations.push(h);
            net += v * h;
        }
        (sigmoid(net), activations, pre)
    }
}

impl Classifier for WnnModel {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn forward(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.input_dim, "feature dimension mismatch");
        let mut xn = Vec::new();
        self.norm.apply(x, &mut xn);
        self.forward_normalized(&xn).0
    }

    fn param_len(&self) -> usize {
        self.wavelons.len() * (self.input_dim + 2) + self.out_weights.len() + 1
    }

    fn get_params(&self, out: &mut Vec<f64>) {
        out.clear();
        for unit in &self.wavelons {
            out.extend(&unit.weights);
            out.push(unit.dilation);
            out.push(unit.translation);
        }
        out.extend(&self.out_weights);
        out.push(self.out_bias);
    }

    fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.param_len());
        let mut it = p.iter().copied();
        for unit in &mut self.wavelons {
            for w in &mut unit.weights {
                *w = it.next().unwrap();
            }
            unit.dilation = it.next().unwrap();
            unit.translation = it.next().unwrap();
        }
        for w in &mut self.out_weights {
            *w = it.next().unwrap();
        }
        self.out_bias = it.next().unwrap();
    }

    fn accumulate_grad(&self, x: &[f64], y: f64, grad: &mut [f64]) -> f64 {
        let mut xn = Vec::new();
        self.norm.apply(x, &mut xn);
        let (p, activations, pre) = self.forward_normalized(&xn);
        let g = p - y; // d loss / d net for cross-entropy on a logistic unit
        let dim = self.input_dim;
        let stride = dim + 2;
        let out_base = self.wavelons.len() * stride;
        for (j, unit) in self.wavelons.iter().enumerate() {
            let dh = g * self.out_weights[j];
            let z = pre[j] / unit.dilation;
            let dz = dh * mother_wavelet_deriv(self.kind, z);
            let du = dz / unit.dilation;
            let base = j * stride;
            for (i, &xv) in xn.iter().enumerate() {
                grad[base + i] += du * xv;
            }
            grad[base + dim] += dz * (-pre[j] / (unit.dilation * unit.dilation));
            grad[base + dim + 1] += -du;
            grad[out_base + j] += g * activations[j];
        }
        grad[out_base + self.out_weights.len()] += g;
        cross_entropy(p, y)
    }

    fn l2_mask(&self) -> Vec<bool> {
        let dim = self.input_dim;
        let mut mask = Vec::with_capacity(self.param_len());
        for _ in &self.wavelons {
            mask.extend(std::iter::repeat_n(true, dim));
            mask.push(false); // dilation
            mask.push(false); // translation
        }
        mask.extend(std::iter::repeat_n(true, self.out_weights.len()));
        mask.push(false); // bias
        mask
    }

    fn project_params(&mut self) {
        for unit in &mut self.wavelons {
            if unit.dilation.abs() < MIN_DILATION {
                unit.dilation = if unit.dilation < 0.0 { -MIN_DILATION } else { MIN_DILATION };
            }
        }
    }

    fn normalizer(&self) -> &Normalizer {
        &self.norm
    }

    fn set_normalizer(&mut self, norm: Normalizer) {
        assert_eq!(norm.mean.len(), self.input_dim);
        self.norm = norm;
    }

}

/// One-hidden-layer perceptron with logistic activations throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    input_dim: usize,
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub out_weights: Vec<f64>,
    pub out_bias: f64,
    norm: Normalizer,
}

impl MlpModel {
    pub fn new(input_dim: usize, hidden: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || hidden == 0 {
            return Err(CadError::invalid("mlp needs nonzero dimensions"));
        }
        let mut r = SplitMix64::new(seed);
        let scale = (6.0 / (input_dim + hidden) as f64).sqrt();
        let hidden_weights = (0..hidden)
            .map(|_| (0..input_dim).map(|_| r.uniform(-scale, scale)).collect())
            .collect();
        let hidden_bias = vec![0.0; hidden];
        let out_scale = (6.0 / (hidden + 1) as f64).sqrt();
        let out_weights = (0..hidden).map(|_| r.uniform(-out_scale, out_scale)).collect();
        Ok(Self {
            input_dim,
            hidden_weights,
            hidden_bias,
            out_weights,
            out_bias: 0.0,
            norm: Normalizer::identity(input_dim),
        })
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_bias.len()
    }

    fn forward_normalized(&self, xn: &[f64]) -> (f64, Vec<f64>) {
        let mut hidden = Vec::with_capacity(self.hidden_bias.len());
        let mut net = self.out_bias;
        for ((weights, &bias), &v) in
            self.hidden_weights.iter().zip(&self.hidden_bias).zip(&self.out_weights)
        {
            let z: f64 = weights.iter().zip(xn).map(|(&w, &x)| w * x).sum::<f64>() + bias;
            let h = sigmoid(z);
            hidden.push(h);
            net += v * h;
        }
        (sigmoid(net), hidden)
    }
}

impl Classifier for MlpModel {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn forward(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.input_dim, "feature dimension mismatch");
        let mut xn = Vec::new();
        self.norm.apply(x, &mut xn);
        self.forward_normalized(&xn).0
    }

    fn param_len(&self) -> usize {
        let h = self.hidden_bias.len();
        h * (self.input_dim + 1) + h + 1
    }

    fn get_params(&self, out: &mut Vec<f64>) {
        out.clear();
        for (weights, &bias) in self.hidden_weights.iter().zip(&self.hidden_bias) {
            out.extend(weights);
            out.push(bias);
        }
        out.extend(&self.out_weights);
        out.push(self.out_bias);
    }

    fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.param_len());
        let mut it = p.iter().copied();
        for (weights, bias) in self.hidden_weights.iter_mut().zip(&mut self.hidden_bias) {
            for w in weights.iter_mut() {
                *w = it.next().unwrap();
            }
            *bias = it.next().unwrap();
        }
        for w in &mut self.out_weights {
            *w = it.next().unwrap();
        }
        self.out_bias = it.next().unwrap();
    }

    fn accumulate_grad(&self, x: &[f64], y: f64, grad: &mut [f64]) -> f64 {
        let mut xn = Vec::new();
        self.norm.apply(x, &mut xn);
        let (p, hidden) = self.forward_normalized(&xn);
        let g = p - y;
        let dim = self.input_dim;
        let stride = dim + 1;
        let out_base = self.hidden_bias.len() * stride;
        for (j, &h) in hidden.iter().enumerate() {
            let dh = g * self.out_weights[j];
            let dz = dh * h * (1.0 - h);
            let base = j * stride;
            for (i, &xv) in xn.iter().enumerate() {
                grad[base + i] += dz * xv;
            }
            grad[base + dim] += dz;
            grad[out_base + j] += g * h;
        }
        grad[out_base + self.hidden_bias.len()] += g;
        cross_entropy(p, y)
    }

    fn l2_mask(&self) -> Vec<bool> {
        let dim = self.input_dim;
        let mut mask = Vec::with_capacity(self.param_len());
        for _ in &self.hidden_bias {
            mask.extend(std::iter::repeat_n(true, dim));
            mask.push(false);
        }
        mask.extend(std::iter::repeat_n(true, self.out_weights.len()));
        mask.push(false);
        mask
    }

    fn project_params(&mut self) {}

    fn normalizer(&self) -> &Normalizer {
        &self.norm
    }

    fn set_normalizer(&mut self, norm: Normalizer) {
        assert_eq!(norm.mean.len(), self.input_dim);
        self.norm = norm;
    }
}
