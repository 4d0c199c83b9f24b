//! Wavelet machinery: level-2 biorthogonal DWT, the dual-tree complex
//! wavelet transform, and contourlet-style high-pass denoising.

pub mod fft;
pub mod denoise;
pub mod dtcwt;
pub mod dwt;
pub mod fir;

pub use denoise::{denoise_highpass, ContourletBands, DenoiseConfig};
pub use dtcwt::{dtcwt_forward, dtcwt_inverse, ComplexImage, DtcwtPyramid};
pub use dwt::{dwt2_bior68, idwt2, DwtCoeffs, DwtSubbands};
pub use fir::{bior68, legall, qshift_a, FilterBank, Fir};
