//! Wavelet neural network and multilayer perceptron classifiers with
//! batch training, per-epoch error tracking and diagnostic metrics.

pub mod io;
pub mod model;
pub mod train;
pub mod wavelet;

pub use io::{read_model, write_model, AnyModel};
pub use model::{Classifier, MlpModel, Normalizer, WnnModel};
pub use train::{
    evaluate, gradient_check, stratified_split, train, train_with_splits, Confusion, EpochMetrics,
    LabeledData, Metrics, TrainConfig,
};
pub use wavelet::{mother_wavelet, mother_wavelet_deriv, WaveletKind};
