//! Higher-order-spectra features from the bispectrum of the row-mean
//! signal.
//!
//! The direct estimator: the demeaned signal is cut into 64-point segments
//! (hop 32, zero-padded when shorter), each segment's DFT X contributes
//! X(f1) X(f2) conj(X(f1+f2)) over the principal domain
//! 0 <= f2 <= f1, f1 + f2 <= N/2, and segments are averaged. Features are
//! the phase entropy, the mean magnitude, and the Shannon entropies of the
//! normalized magnitude raised to powers one to three.

use num_complex::Complex64;

use crate::raster::RealImage;
use crate::stats::entropy_bits;
use crate::xforms::fft::fft;

const SEGMENT: usize = 64;
const HOP: usize = 32;
const PHASE_BINS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HosFeatures {
    /// Shannon entropy (bits) of the bispectral phase histogram.
    pub entropy_phase: f64,
    /// Mean bispectrum magnitude over the principal domain.
    pub mean_magnitude: f64,
    /// Entropy of |B| / sum |B|.
    pub entropy_deg1: f64,
    /// Entropy of |B|^2 / sum |B|^2.
    pub entropy_deg2: f64,
    /// Entropy of |B|^3 / sum |B|^3.
    pub entropy_deg3: f64,
}

/// Direct bispectrum estimate of a 1-D signal over the principal domain.
/// Returns (values, domain indices (f1, f2)).
pub fn bispectrum(signal: &[f64]) -> (Vec<Complex64>, Vec<(usize, usize)>) {
    let mut domain = Vec::new();
    for f1 in 0..=SEGMENT / 2 {
        for f2 in 0..=f1 {
            if f1 + f2 <= SEGMENT / 2 {
                domain.push((f1, f2));
            }
        }
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); domain.len()];
    if signal.is_empty() {
        return (acc, domain);
    }
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let centered: Vec<f64> = signal.iter().map(|&v| v - mean).collect();

    let mut segments = 0usize;
    let mut start = 0usize;
    loop {
        let mut seg = [Complex64::new(0.0, 0.0); SEGMENT];
        for (i, s) in seg.iter_mut().enumerate() {
            if start + i < centered.len() {
                *s = Complex64::new(centered[start + i], 0.0);
            }
        }
        let mut spec = seg.to_vec();
        fft(&mut spec);
        for (a, &(f1, f2)) in acc.iter_mut().zip(&domain) {
            *a += spec[f1] * spec[f2] * spec[f1 + f2].conj();
        }
        segments += 1;
        start += HOP;
        if start >= centered.len() {
            break;
        }
    }
    for a in &mut acc {
        *a /= segments as f64;
    }
    (acc, domain)
}

/// HOS features of a coefficient raster via its row-mean signal.
pub fn hos_features(cf: &RealImage) -> HosFeatures {
    let rows: Vec<f64> = (0..cf.height())
        .map(|y| {
            (0..cf.width()).map(|x| cf.get(x, y)).sum::<f64>() / cf.width().max(1) as f64
        })
        .collect();
    hos_features_of_signal(&rows)
}

pub fn hos_features_of_signal(signal: &[f64]) -> HosFeatures {
    let (b, _) = bispectrum(signal);
    let mags: Vec<f64> = b.iter().map(|c| c.norm()).collect();
    let total: f64 = mags.iter().sum();
    if total == 0.0 {
        return HosFeatures::default();
    }

    // Phase histogram entropy over [-pi, pi].
    let mut phase_counts = [0u64; PHASE_BINS];
    for c in &b {
        let ang = c.im.atan2(c.re); // in [-pi, pi]
        let idx = (((ang + std::f64::consts::PI) / std::f64::consts::TAU * PHASE_BINS as f64)
            as usize)
            .min(PHASE_BINS - 1);
        phase_counts[idx] += 1;
    }
    let n = b.len() as f64;
    let phase_ps: Vec<f64> = phase_counts.iter().map(|&c| c as f64 / n).collect();

    let norm_entropy = |power: i32| -> f64 {
        let ws: Vec<f64> = mags.iter().map(|&m| m.powi(power)).collect();
        let s: f64 = ws.iter().sum();
        if s == 0.0 {
            return 0.0;
        }
        entropy_bits(&ws.iter().map(|&w| w / s).collect::<Vec<_>>())
    };

    HosFeatures {
        entropy_phase: entropy_bits(&phase_ps),
        mean_magnitude: total / mags.len() as f64,
        entropy_deg1: norm_entropy(1),
        entropy_deg2: norm_entropy(2),
        entropy_deg3: norm_entropy(3),
    }
}
