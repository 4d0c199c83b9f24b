//! Retinal image CAD pipeline: two-phase image quality improvement
//! (quantile histogram preprocessing + dual-tree wavelet / morphological
//! enhancement), statistical and graph-based texture features, and
//! wavelet-neural-network / MLP classification.

pub mod enhance;
pub mod error;
pub mod graphfeat;
pub mod histogram;
#[cfg(feature = "io")]
pub mod io;
pub mod morph;
pub mod neural;
pub mod phantom;
#[cfg(feature = "io")]
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod rng;
pub mod statfeat;
pub mod stats;
pub mod xforms;

pub use error::{CadError, Result};
pub use raster::{GrayImage, RealImage};
