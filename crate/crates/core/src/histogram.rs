//! Intensity histograms, normalized CDFs and quantile boundaries.

use crate::error::{CadError, Result};
use crate::raster::{GrayImage, I_MAX};

/// 256-bin intensity histogram with integer counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: [u64; I_MAX],
}

impl Histogram {
    pub fn zero() -> Self {
        Self { bins: [0; I_MAX] }
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Smallest occupied intensity, if any.
    pub fn min_occupied(&self) -> Option<u8> {
        self.bins.iter().position(|&c| c > 0).map(|i| i as u8)
    }

    /// Largest occupied intensity, if any.
    pub fn max_occupied(&self) -> Option<u8> {
        self.bins.iter().rposition(|&c| c > 0).map(|i| i as u8)
    }

    pub fn to_real(&self) -> RealHistogram {
        let mut bins = [0.0; I_MAX];
        for (dst, &src) in bins.iter_mut().zip(&self.bins) {
            *dst = src as f64;
        }
        RealHistogram { bins }
    }
}

/// Real-valued histogram, e.g. the convex blend of a source histogram with
/// the uniform one.
#[derive(Debug, Clone, PartialEq)]
pub struct RealHistogram {
    pub bins: [f64; I_MAX],
}

impl RealHistogram {
    pub fn total(&self) -> f64 {
        self.bins.iter().sum()
    }
}

/// Cumulative distribution over the 256 intensity levels.
/// `values[i]` is the probability mass at intensities <= i; non-decreasing
/// with `values[255] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    pub values: [f64; I_MAX],
}

impl CdfTable {
    #[inline]
    pub fn at(&self, intensity: u8) -> f64 {
        self.values[intensity as usize]
    }

    /// Monotone and terminating at 1 within 1e-12.
    pub fn is_valid(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - 1e-12)
            && (self.values[I_MAX - 1] - 1.0).abs() <= 1e-12
    }
}

/// Count pixels per intensity level.
pub fn compute_histogram(img: &GrayImage) -> Result<Histogram> {
    if img.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let mut h = Histogram::zero();
    for &p in img.pixels() {
        h.bins[p as usize] += 1;
    }
    Ok(h)
}

/// Normalized cumulative distribution of a (real-valued) histogram.
pub fn normalized_cdf(h: &RealHistogram) -> Result<CdfTable> {
    let total = h.total();
    if !(total > 0.0) {
        return Err(CadError::invalid("histogram total must be positive"));
    }
    let mut values = [0.0; I_MAX];
    let mut acc = 0.0;
    for (v, &b) in values.iter_mut().zip(&h.bins) {
        acc += b / total;
        *v = acc;
    }
    // Guard the terminal value against accumulation drift.
    values[I_MAX - 1] = 1.0;
    Ok(CdfTable { values })
}

/// Convenience wrapper for integer histograms.
pub fn normalized_cdf_counts(h: &Histogram) -> Result<CdfTable> {
    normalized_cdf(&h.to_real())
}

/// The t+1 quantile boundaries `[i_0 .. i_t]` of an occupied histogram.
///
/// `i_0` is the smallest occupied intensity, `i_t` the largest, and the
/// interior boundary `i_k` is the smallest intensity whose CDF reaches
/// `k/t` (ties broken by the smallest qualifying intensity).
pub fn quantile_boundaries(h: &Histogram, t: usize) -> Result<Vec<u8>> {
    if t < 1 {
        return Err(CadError::invalid("quantile count must be >= 1"));
    }
    let total = h.total();
    if total == 0 {
        return Err(CadError::EmptyInput);
    }
    let lo = h.min_occupied().unwrap();
    let hi = h.max_occupied().unwrap();
    let mut bounds = Vec::with_capacity(t + 1);
    bounds.push(lo);
    let mut acc = 0u64;
    let mut k = 1usize;
    for i in 0..I_MAX {
        acc += h.bins[i];
        while k < t && acc as f64 / total as f64 >= k as f64 / t as f64 {
            bounds.push((i as u8).clamp(lo, hi));
            k += 1;
        }
        if k >= t {
            break;
        }
    }
    while bounds.len() < t {
        bounds.push(hi);
    }
    bounds.push(hi);
    Ok(bounds)
}
