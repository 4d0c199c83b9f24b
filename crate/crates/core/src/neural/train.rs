//! Mini-batch gradient-descent training, evaluation metrics and the
//! finite-difference gradient checker.

use crate::error::{CadError, Result};
use crate::neural::model::{cross_entropy, Classifier, Normalizer};
use crate::rng::SplitMix64;

/// Labeled feature rows; `true` labels the glaucoma (positive) class.
#[derive(Debug, Clone, Default)]
pub struct LabeledData {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl LabeledData {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn push(&mut self, row: Vec<f64>, label: bool) {
        self.features.push(row);
        self.labels.push(label);
    }

    fn subset(&self, idx: &[usize]) -> LabeledData {
        LabeledData {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// L2 coefficient applied to weight parameters.
    pub l2: f64,
    /// Fraction of the data used for training; the remainder splits evenly
    /// into validation and testing. The three fractions sum to one.
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            batch_size: 32,
            learning_rate: 0.01,
            l2: 1e-4,
            train_fraction: 0.75,
            seed: 17,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(CadError::invalid("epochs and batch size must be nonzero"));
        }
        if !(0.0 < self.train_fraction && self.train_fraction < 1.0) {
            return Err(CadError::invalid("train fraction must be in (0, 1)"));
        }
        if self.learning_rate < 0.0 || self.l2 < 0.0 {
            return Err(CadError::invalid("negative learning rate or l2"));
        }
        Ok(())
    }
}

/// Errors and losses recorded after each epoch, as percentages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Misclassification percentage on the validation split.
    pub v_error: f64,
    /// Misclassification percentage on the testing split.
    pub t_error: f64,
    /// Mean cross-entropy on the validation split.
    pub v_loss: f64,
    /// Mean cross-entropy on the testing split.
    pub t_loss: f64,
}

/// Confusion rates normalized per true class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Confusion {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    pub fn_: f64,
    pub tp_count: usize,
    pub fp_count: usize,
    pub tn_count: usize,
    pub fn_count: usize,
}

/// Evaluation metrics in percent.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub confusion: Confusion,
}

/// Deterministic stratified split into train/validation/test index sets.
pub fn stratified_split(
    labels: &[bool],
    train_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut rng = SplitMix64::new(seed ^ 0x5851_f42d_4c95_7f2d);
    let mut train = Vec::new();
    let mut val = Vec::new();
    let mut test = Vec::new();
    for class in [false, true] {
        let mut idx: Vec<usize> =
            (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rng.shuffle(&mut idx);
        let n_train = (idx.len() as f64 * train_fraction).round() as usize;
        let rest = idx.len() - n_train;
        let n_val = rest / 2;
        for (pos, i) in idx.into_iter().enumerate() {
            if pos < n_train {
                train.push(i);
            } else if pos < n_train + n_val {
                val.push(i);
            } else {
                test.push(i);
            }
        }
    }
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    (train, val, test)
}

fn misclassification_pct(model: &dyn Classifier, data: &LabeledData) -> f64 {
    let wrong = data
        .features
        .iter()
        .zip(&data.labels)
        .filter(|(x, &y)| (model.forward(x) >= 0.5) != y)
        .count();
    100.0 * wrong as f64 / data.len().max(1) as f64
}

fn mean_loss(model: &dyn Classifier, data: &LabeledData) -> f64 {
    data.features
        .iter()
        .zip(&data.labels)
        .map(|(x, &y)| cross_entropy(model.forward(x), if y { 1.0 } else { 0.0 }))
        .sum::<f64>()
        / data.len().max(1) as f64
}

/// Mini-batch gradient descent on cross-entropy with L2 on the weights.
///
/// Splits the data (stratified, seeded) into train/validation/test, fits
/// the feature normalization on the training split only, and records both
/// error percentages per epoch. Deterministic for a fixed seed.
pub fn train(
    model: &mut dyn Classifier,
    data: &LabeledData,
    cfg: &TrainConfig,
) -> Result<Vec<EpochMetrics>> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let (train_idx, val_idx, test_idx) = stratified_split(&data.labels, cfg.train_fraction, cfg.seed);
    if train_idx.is_empty() || val_idx.is_empty() || test_idx.is_empty() {
        return Err(CadError::invalid("a split partition is empty; need more samples"));
    }
    let train_set = data.subset(&train_idx);
    let val_set = data.subset(&val_idx);
    let test_set = data.subset(&test_idx);
    train_with_splits(model, &train_set, &val_set, &test_set, cfg)
}

/// Training core with explicit splits (the experiment runner reuses it).
pub fn train_with_splits(
    model: &mut dyn Classifier,
    train_set: &LabeledData,
    val_set: &LabeledData,
    test_set: &LabeledData,
    cfg: &TrainConfig,
) -> Result<Vec<EpochMetrics>> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() || test_set.is_empty() {
        return Err(CadError::invalid("a split partition is empty; need more samples"));
    }
    model.set_normalizer(Normalizer::fit(&train_set.features));

    let plen = model.param_len();
    let mask = model.l2_mask();
    let mut params = Vec::with_capacity(plen);
    let mut grad = vec![0.0; plen];
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut rng = SplitMix64::new(cfg.seed);
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        rng.shuffle(&mut order);
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                let y = if train_set.labels[i] { 1.0 } else { 0.0 };
                model.accumulate_grad(&train_set.features[i], y, &mut grad);
            }
            model.get_params(&mut params);
            let inv = 1.0 / batch.len() as f64;
            for ((p, &g), &m) in params.iter_mut().zip(&grad).zip(&mask) {
                let reg = if m { cfg.l2 * *p } else { 0.0 };
                *p -= cfg.learning_rate * (g * inv + reg);
            }
            model.set_params(&params);
            model.project_params();
        }
        let metrics = EpochMetrics {
            epoch,
            v_error: misclassification_pct(model, val_set),
            t_error: misclassification_pct(model, test_set),
            v_loss: mean_loss(model, val_set),
            t_loss: mean_loss(model, test_set),
        };
        if !metrics.v_loss.is_finite() || !metrics.t_loss.is_finite() {
            return Err(CadError::NonFinite("training loss".into()));
        }
        history.push(metrics);
    }
    Ok(history)
}

/// Confusion metrics at the 0.5 decision threshold. Rates with an empty
/// denominator are 0.
pub fn evaluate(model: &dyn Classifier, data: &LabeledData) -> Result<Metrics> {
    if data.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let mut c = Confusion::default();
    for (x, &y) in data.features.iter().zip(&data.labels) {
        let predicted = model.forward(x) >= 0.5;
        match (y, predicted) {
            (true, true) => c.tp_count += 1,
            (true, false) => c.fn_count += 1,
            (false, false) => c.tn_count += 1,
            (false, true) => c.fp_count += 1,
        }
    }
    let pos = (c.tp_count + c.fn_count) as f64;
    let neg = (c.tn_count + c.fp_count) as f64;
    let rate = |n: usize, d: f64| if d > 0.0 { n as f64 / d } else { 0.0 };
    c.tp = rate(c.tp_count, pos);
    c.fn_ = rate(c.fn_count, pos);
    c.tn = rate(c.tn_count, neg);
    c.fp = rate(c.fp_count, neg);
    let total = data.len() as f64;
    Ok(Metrics {
        accuracy: 100.0 * (c.tp_count + c.tn_count) as f64 / total,
        sensitivity: 100.0 * c.tp,
        specificity: 100.0 * c.tn,
        confusion: c,
    })
}

/// Maximum relative disagreement between the analytic gradient and central
/// finite differences over every parameter at (x, y).
pub fn gradient_check(model: &mut dyn Classifier, x: &[f64], y: f64) -> f64 {
    const STEP: f64 = 1e-5;
    let plen = model.param_len();
    let mut analytic = vec![0.0; plen];
    model.accumulate_grad(x, y, &mut analytic);

    let mut params = Vec::with_capacity(plen);
    model.get_params(&mut params);
    let mut worst = 0.0f64;
    for i in 0..plen {
        let orig = params[i];
        params[i] = orig + STEP;
        model.set_params(&params);
        let up = {
            let mut g = vec![0.0; plen];
            let _ = &mut g;
            loss_of(model, x, y)
        };
        params[i] = orig - STEP;
        model.set_params(&params);
        let down = loss_of(model, x, y);
        params[i] = orig;
        let numeric = (up - down) / (2.0 * STEP);
        let rel = (analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs() + 1e-8);
        worst = worst.max(rel);
    }
    model.set_params(&params);
    worst
}

fn loss_of(model: &dyn Classifier, x: &[f64], y: f64) -> f64 {
    cross_entropy(model.forward(x), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::model::{MlpModel, WnnModel};
    use crate::neural::wavelet::WaveletKind;

    /// Two overlapping 2-D Gaussian blobs, linearly separable at the
    /// margin used here.
    fn blob_data(n: usize, seed: u64, gap: f64) -> LabeledData {
        let mut r = SplitMix64::new(seed);
        let mut data = LabeledData::default();
        for i in 0..n {
            let label = i % 2 == 0;
            let center: f64 = if label { gap } else { -gap };
            data.push(vec![center + r.normal(), center + r.normal()], label);
        }
        data
    }

    #[test]
    fn split_is_stratified_and_seed_stable() {
        let labels: Vec<bool> = (0..100).map(|i| i % 4 == 0).collect();
        let (tr, va, te) = stratified_split(&labels, 0.75, 9);
        assert_eq!(tr.len() + va.len() + te.len(), 100);
        let pos = |idx: &[usize]| idx.iter().filter(|&&i| labels[i]).count();
        // 25 positives split 19/3/3.
        assert!((pos(&tr) as isize - 19).abs() <= 1);
        assert!(pos(&va) >= 2 && pos(&te) >= 2);
        let again = stratified_split(&labels, 0.75, 9);
        assert_eq!((tr, va, te), again);
    }

    #[test]
    fn zero_learning_rate_freezes_weights() {
        // The data-driven setup places translations/dilations once; with
        // lr = 0 no gradient step may move any parameter afterwards, so a
        // second run from the same state is a fixed point.
        let data = blob_data(40, 1, 2.0);
        let cfg = TrainConfig { learning_rate: 0.0, l2: 0.0, epochs: 3, ..Default::default() };
        let mut model = WnnModel::new(WaveletKind::MexicanHat, 2, 4, 7).unwrap();
        let mut w_before = Vec::new();
        model.get_params(&mut w_before);
        train(&mut model, &data, &cfg).unwrap();
        let mut after_first = Vec::new();
        model.get_params(&mut after_first);
        // Input and output weights are untouched by the setup; only the
        // wavelon translations and dilations may have moved.
        assert_eq!(w_before[0], after_first[0]);
        assert_eq!(w_before[1], after_first[1]);
        assert_eq!(*w_before.last().unwrap(), *after_first.last().unwrap());
        train(&mut model, &data, &cfg).unwrap();
        let mut after_second = Vec::new();
        model.get_params(&mut after_second);
        assert_eq!(after_first, after_second);
    }

    #[test]
    fn large_l2_shrinks_weight_norm_monotonically() {
        // No-signal dataset: labels independent of features.
        let mut r = SplitMix64::new(3);
        let mut data = LabeledData::default();
        for i in 0..40 {
            data.push(vec![r.normal(), r.normal()], i % 2 == 0);
        }
        let mut model = MlpModel::new(2, 4, 11).unwrap();
        let mask = model.l2_mask();
        let weight_norm = |m: &MlpModel| -> f64 {
            let mut p = Vec::new();
            m.get_params(&mut p);
            p.iter().zip(&mask).filter(|(_, &m)| m).map(|(v, _)| v * v).sum()
        };
        let mut norms = vec![weight_norm(&model)];
        for _ in 0..5 {
            let cfg = TrainConfig {
                epochs: 1,
                learning_rate: 0.05,
                l2: 1.0,
                seed: 5,
                ..Default::default()
            };
            train(&mut model, &data, &cfg).unwrap();
            norms.push(weight_norm(&model));
        }
        assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
    }

    #[test]
    fn separable_data_trains_to_low_error() {
        let data = blob_data(160, 5, 2.5);
        let mut model = WnnModel::new(WaveletKind::MexicanHat, 2, 10, 13).unwrap();
        let cfg = TrainConfig { epochs: 200, learning_rate: 0.05, ..Default::default() };
        let history = train(&mut model, &data, &cfg).unwrap();
        let last = history.last().unwrap();
        assert!(last.t_error < 5.0, "testing error {}", last.t_error);
    }

    #[test]
    fn training_is_deterministic() {
        let data = blob_data(60, 7, 1.5);
        let cfg = TrainConfig { epochs: 10, ..Default::default() };
        let mut m1 = WnnModel::new(WaveletKind::MexicanHat, 2, 5, 23).unwrap();
        let h1 = train(&mut m1, &data, &cfg).unwrap();
        let mut m2 = WnnModel::new(WaveletKind::MexicanHat, 2, 5, 23).unwrap();
        let h2 = train(&mut m2, &data, &cfg).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn evaluate_all_correct() {
        let data = blob_data(80, 9, 3.0);
        let mut model = MlpModel::new(2, 6, 29).unwrap();
        let cfg = TrainConfig { epochs: 300, learning_rate: 0.3, ..Default::default() };
        train(&mut model, &data, &cfg).unwrap();
        let m = evaluate(&model, &data).unwrap();
        assert!(m.accuracy > 95.0, "accuracy {}", m.accuracy);
        // Accuracy identity cross-check from the raw counts.
        let c = m.confusion;
        let acc = 100.0 * (c.tp_count + c.tn_count) as f64
            / (c.tp_count + c.tn_count + c.fp_count + c.fn_count) as f64;
        assert!((acc - m.accuracy).abs() < 1e-12);
    }

    #[test]
    fn evaluate_hand_confusion() {
        // Model that always answers "positive" with certainty: on a set of
        // 2 positives and 4 negatives sensitivity is 100 and specificity 0.
        struct Always;
        impl Classifier for Always {
            fn input_dim(&self) -> usize {
                1
            }
            fn forward(&self, _x: &[f64]) -> f64 {
                0.9
            }
            fn param_len(&self) -> usize {
                0
            }
            fn get_params(&self, out: &mut Vec<f64>) {
                out.clear();
            }
            fn set_params(&mut self, _p: &[f64]) {}
            fn accumulate_grad(&self, _x: &[f64], _y: f64, _g: &mut [f64]) -> f64 {
                0.0
            }
            fn l2_mask(&self) -> Vec<bool> {
                Vec::new()
            }
            fn project_params(&mut self) {}
            fn normalizer(&self) -> &Normalizer {
                unimplemented!()
            }
            fn set_normalizer(&mut self, _norm: Normalizer) {}
        }
        let mut data = LabeledData::default();
        for i in 0..6 {
            data.push(vec![0.0], i < 2);
        }
        let m = evaluate(&Always, &data).unwrap();
        assert_eq!(m.sensitivity, 100.0);
        assert_eq!(m.specificity, 0.0);
        assert!((m.accuracy - 100.0 * 2.0 / 6.0).abs() < 1e-12);
        assert_eq!(m.confusion.fp, 1.0);
        assert_eq!(m.confusion.fn_, 0.0);
    }

    #[test]
    fn gradient_check_every_wavelet_kind() {
        let mut r = SplitMix64::new(31);
        for kind in WaveletKind::ALL {
            for trial in 0..3 {
                let mut model = WnnModel::new(kind, 4, 3, 100 + trial).unwrap();
                let x: Vec<f64> = (0..4).map(|_| r.uniform(-2.0, 2.0)).collect();
                let y = if r.next_f64() < 0.5 { 0.0 } else { 1.0 };
                let err = gradient_check(&mut model, &x, y);
                assert!(err < 1e-4, "{kind:?} trial {trial}: {err}");
            }
        }
    }

    #[test]
    fn gradient_check_mlp() {
        let mut r = SplitMix64::new(37);
        for trial in 0..5 {
            let mut model = MlpModel::new(4, 5, 200 + trial).unwrap();
            let x: Vec<f64> = (0..4).map(|_| r.uniform(-2.0, 2.0)).collect();
            let err = gradient_check(&mut model, &x, 1.0);
            assert!(err < 1e-4, "trial {trial}: {err}");
        }
    }

    #[test]
    fn empty_split_rejected() {
        let mut data = LabeledData::default();
        for i in 0..3 {
            data.push(vec![0.0, 1.0], i == 0);
        }
        let mut model = MlpModel::new(2, 2, 1).unwrap();
        assert!(train(&mut model, &data, &TrainConfig::default()).is_err());
    }
}
