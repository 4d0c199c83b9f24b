//! Brightness and contrast preprocessing.
//!
//! The stage chain: blend the source histogram towards uniform, build its
//! CDF, reshape it with a quadratic rank transmutation map, apply adaptive
//! gamma correction driven by the reshaped CDF, blend back against the
//! original, then equalize each quantile sub-histogram within its own
//! intensity sub-range.

use crate::error::{CadError, Result};
use crate::histogram::{
    compute_histogram, normalized_cdf, quantile_boundaries, CdfTable, Histogram, RealHistogram,
};
use crate::raster::{GrayImage, I_MAX};

/// How the histogram blend weight is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// Grid search over {0.1, .., 1.0} minimizing the absolute
    /// mean-brightness error between the stage output and the input.
    Auto,
    /// Fixed weight in [0, 1].
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessConfig {
    pub alpha: AlphaMode,
    /// Transmutation parameter, in [-1, 1].
    pub delta: f64,
    /// Restoration weight towards the gamma-corrected image, in [0, 1].
    pub theta: f64,
    /// Quantile count for sub-histogram equalization, >= 1.
    pub quantiles: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { alpha: AlphaMode::Auto, delta: 0.5, theta: 0.7, quantiles: 4 }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if let AlphaMode::Fixed(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(CadError::invalid(format!("alpha {a} outside [0,1]")));
            }
        }
        if !(-1.0..=1.0).contains(&self.delta) {
            return Err(CadError::invalid("invalid transmutation parameter"));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(CadError::invalid(format!("theta {} outside [0,1]", self.theta)));
        }
        if self.quantiles < 1 {
            return Err(CadError::invalid("quantile count must be >= 1"));
        }
        Ok(())
    }
}

/// Convex combination of the source histogram with the uniform histogram of
/// equal total mass.
pub fn blend_histogram(h: &Histogram, alpha: f64) -> Result<RealHistogram> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CadError::invalid(format!("alpha {alpha} outside [0,1]")));
    }
    let uniform = h.total() as f64 / I_MAX as f64;
    let mut bins = [0.0; I_MAX];
    for (dst, &src) in bins.iter_mut().zip(&h.bins) {
        *dst = alpha * src as f64 + (1.0 - alpha) * uniform;
    }
    Ok(RealHistogram { bins })
}

/// Quadratic rank transmutation of a CDF: `(1 + d) F - d F^2`.
///
/// For d in [-1, 1] the map preserves monotonicity and the endpoints, so the
/// output is again a valid CDF.
pub fn qrtm_transform(cdf: &CdfTable, delta: f64) -> Result<CdfTable> {
    if !(-1.0..=1.0).contains(&delta) {
        return Err(CadError::invalid("invalid transmutation parameter"));
    }
    let mut values = [0.0; I_MAX];
    for (out, &f) in values.iter_mut().zip(&cdf.values) {
        *out = (1.0 + delta) * f - delta * f * f;
    }
    Ok(CdfTable { values })
}

/// Adaptive gamma correction: intensity I maps to
/// `(I_MAX - 1) * (I / I_MAX)^(1 - CDF_T(I))`, rounded.
///
/// Input 0 always maps to 0, including the degenerate exponent-0 case.
pub fn adaptive_gamma(img: &GrayImage, cdf_t: &CdfTable) -> GrayImage {
    let mut lut = [0u8; I_MAX];
    for (i, slot) in lut.iter_mut().enumerate().skip(1) {
        let base = i as f64 / I_MAX as f64;
        let exponent = 1.0 - cdf_t.values[i];
        *slot = ((I_MAX - 1) as f64 * base.powf(exponent)).round().clamp(0.0, 255.0) as u8;
    }
    let mut out = img.clone();
    for p in out.pixels_mut() {
        *p = lut[*p as usize];
    }
    out
}

/// Per-pixel convex blend `theta * agc + (1 - theta) * orig`, rounded.
pub fn color_restore(agc: &GrayImage, orig: &GrayImage, theta: f64) -> Result<GrayImage> {
    if agc.width() != orig.width() || agc.height() != orig.height() {
        return Err(CadError::DimensionMismatch(
            agc.width(),
            agc.height(),
            orig.width(),
            orig.height(),
        ));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(CadError::invalid(format!("theta {theta} outside [0,1]")));
    }
    let mut out = agc.clone();
    for (p, &q) in out.pixels_mut().iter_mut().zip(orig.pixels()) {
        let v = theta * *p as f64 + (1.0 - theta) * q as f64;
        *p = v.round().clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}

/// Quantile sub-histogram equalization.
///
/// The histogram is split at the t-quantile boundaries `[i_0 .. i_t]`;
/// each sub-histogram's normalized CDF remaps its intensities into its own
/// sub-range `[i_{k-1}, i_k]`, so no pixel leaves its source sub-range.
/// With t = 1 this is plain histogram equalization onto the occupied range.
pub fn quantile_equalize(img: &GrayImage, t: usize) -> Result<GrayImage> {
    if t < 1 {
        return Err(CadError::invalid("quantile count must be >= 1"));
    }
    let hist = compute_histogram(img)?;
    let bounds = quantile_boundaries(&hist, t)?;

    // Assign each intensity level to the first sub-range that covers it.
    let mut range_of = [0usize; I_MAX];
    for level in bounds[0] as usize..=bounds[t] as usize {
        let mut k = 1;
        while k < t && level as u8 > bounds[k] {
            k += 1;
        }
        range_of[level] = k;
    }

    // Per sub-range mass, then the in-range cumulative mapping.
    let mut range_mass = vec![0u64; t + 1];
    for level in bounds[0] as usize..=bounds[t] as usize {
        range_mass[range_of[level]] += hist.bins[level];
    }
    let mut lut = [0u8; I_MAX];
    let mut acc = vec![0u64; t + 1];
    for level in bounds[0] as usize..=bounds[t] as usize {
        let k = range_of[level];
        acc[k] += hist.bins[level];
        let lo = bounds[k - 1] as f64;
        let hi = bounds[k] as f64;
        let cdf = if range_mass[k] == 0 { 0.0 } else { acc[k] as f64 / range_mass[k] as f64 };
        lut[level] = (lo + (hi - lo) * cdf).round().clamp(0.0, 255.0) as u8;
    }

    let mut out = img.clone();
    for p in out.pixels_mut() {
        *p = lut[*p as usize];
    }
    Ok(out)
}

/// Reference classic histogram equalization used as a comparison baseline:
/// intensities remap onto the full range via `round(255 * CDF(I))`. Unlike
/// `quantile_equalize(img, 1)`, which stays within the occupied intensity
/// range, this stretches aggressively and over-enhances narrow histograms.
pub fn histogram_equalize(img: &GrayImage) -> Result<GrayImage> {
    let hist = compute_histogram(img)?;
    let cdf = normalized_cdf(&hist.to_real())?;
    let mut lut = [0u8; I_MAX];
    for (slot, &c) in lut.iter_mut().zip(&cdf.values) {
        *slot = ((I_MAX - 1) as f64 * c).round().clamp(0.0, 255.0) as u8;
    }
    let mut out = img.clone();
    for p in out.pixels_mut() {
        *p = lut[*p as usize];
    }
    Ok(out)
}

/// Full preprocessing chain in stage order.
pub fn preprocess(img: &GrayImage, cfg: &PreprocessConfig) -> Result<GrayImage> {
    cfg.validate()?;
    if img.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let alpha = match cfg.alpha {
        AlphaMode::Fixed(a) => a,
        AlphaMode::Auto => auto_alpha(img, cfg)?,
    };
    preprocess_with_alpha(img, cfg, alpha)
}

fn preprocess_with_alpha(img: &GrayImage, cfg: &PreprocessConfig, alpha: f64) -> Result<GrayImage> {
    let hist = compute_histogram(img)?;
    let blended = blend_histogram(&hist, alpha)?;
    let cdf = normalized_cdf(&blended)?;
    let cdf_t = qrtm_transform(&cdf, cfg.delta)?;
    let agc = adaptive_gamma(img, &cdf_t);
    let restored = color_restore(&agc, img, cfg.theta)?;
    quantile_equalize(&restored, cfg.quantiles)
}

/// Grid search for the blend weight that best preserves mean brightness
/// through the whole chain. First minimizer in ascending alpha order wins.
fn auto_alpha(img: &GrayImage, cfg: &PreprocessConfig) -> Result<f64> {
    let target = img.mean();
    let mut best = (f64::INFINITY, 0.1);
    for step in 1..=10 {
        let alpha = step as f64 / 10.0;
        let out = preprocess_with_alpha(img, cfg, alpha)?;
        let err = (out.mean() - target).abs();
        if err < best.0 {
            best = (err, alpha);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut r = SplitMix64::new(seed);
        GrayImage::from_vec(w, h, (0..w * h).map(|_| (r.next_u64() & 0xff) as u8).collect())
            .unwrap()
    }

    #[test]
    fn blend_endpoints() {
        let h = compute_histogram(&random_image(8, 8, 1)).unwrap();
        let same = blend_histogram(&h, 1.0).unwrap();
        for i in 0..I_MAX {
            assert_eq!(same.bins[i], h.bins[i] as f64);
        }
        let uni = blend_histogram(&h, 0.0).unwrap();
        let expect = h.total() as f64 / 256.0;
        assert!(uni.bins.iter().all(|&b| (b - expect).abs() < 1e-12));
    }

    #[test]
    fn blend_is_convex_combination() {
        // Direct oracle: every bin must equal a*src + (1-a)*total/256.
        let h = compute_histogram(&random_image(8, 8, 2)).unwrap();
        let alpha = 0.5;
        let out = blend_histogram(&h, alpha).unwrap();
        let uniform = h.total() as f64 / 256.0;
        for i in 0..I_MAX {
            let expect = alpha * h.bins[i] as f64 + (1.0 - alpha) * uniform;
            assert!((out.bins[i] - expect).abs() < 1e-12);
        }
        // Total mass is conserved by the blend.
        assert!((out.total() - h.total() as f64).abs() < 1e-9);
    }

    #[test]
    fn blend_rejects_bad_alpha() {
        let h = compute_histogram(&random_image(4, 4, 3)).unwrap();
        assert!(blend_histogram(&h, -0.1).is_err());
        assert!(blend_histogram(&h, 1.1).is_err());
    }

    #[test]
    fn qrtm_identity_at_zero_delta() {
        let h = compute_histogram(&random_image(8, 8, 4)).unwrap();
        let cdf = crate::histogram::normalized_cdf_counts(&h).unwrap();
        let out = qrtm_transform(&cdf, 0.0).unwrap();
        assert_eq!(out.values, cdf.values);
    }

    #[test]
    fn qrtm_direct_evaluation() {
        // (1+d)F - dF^2 at F=0.5, d=1 -> 2*0.5 - 1*0.25 = 0.75.
        let mut values = [1.0; I_MAX];
        values[0] = 0.5;
        let out = qrtm_transform(&CdfTable { values }, 1.0).unwrap();
        assert!((out.values[0] - 0.75).abs() < 1e-12);
        // Endpoint F=1 is fixed for any delta.
        assert!((out.values[255] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qrtm_rejects_out_of_range_delta() {
        let cdf = CdfTable { values: [1.0; I_MAX] };
        assert!(qrtm_transform(&cdf, 1.5).is_err());
        assert!(qrtm_transform(&cdf, -1.01).is_err());
    }

    #[test]
    fn qrtm_preserves_monotonicity() {
        let mut r = SplitMix64::new(5);
        for _ in 0..200 {
            let h = compute_histogram(&random_image(8, 8, r.next_u64())).unwrap();
            let cdf = crate::histogram::normalized_cdf_counts(&h).unwrap();
            let delta = r.uniform(-1.0, 1.0);
            let out = qrtm_transform(&cdf, delta).unwrap();
            assert!(out.is_valid(), "delta={delta}");
        }
    }

    #[test]
    fn gamma_midpoint() {
        // CDF_T(128) = 0 -> exponent 1 -> round(255 * 128/256) = 128.
        let cdf = CdfTable { values: [0.0; I_MAX] };
        let img = GrayImage::from_vec(1, 1, vec![128]).unwrap();
        assert_eq!(adaptive_gamma(&img, &cdf).pixels()[0], 128);
    }

    #[test]
    fn gamma_black_stays_black() {
        let cdf = CdfTable { values: [1.0; I_MAX] };
        let img = GrayImage::from_vec(1, 2, vec![0, 1]).unwrap();
        let out = adaptive_gamma(&img, &cdf);
        assert_eq!(out.pixels()[0], 0);
        // Exponent 0 saturates every nonzero intensity.
        assert_eq!(out.pixels()[1], 255);
    }

    #[test]
    fn gamma_monotone_for_monotone_cdf() {
        let mut r = SplitMix64::new(6);
        for _ in 0..50 {
            let h = compute_histogram(&random_image(8, 8, r.next_u64())).unwrap();
            let cdf = crate::histogram::normalized_cdf_counts(&h).unwrap();
            let ramp: Vec<u8> = (0..=255).collect();
            let img = GrayImage::from_vec(256, 1, ramp).unwrap();
            let out = adaptive_gamma(&img, &cdf);
            assert!(out.pixels().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn restore_endpoints_and_blend() {
        let a = GrayImage::from_vec(1, 1, vec![200]).unwrap();
        let b = GrayImage::from_vec(1, 1, vec![100]).unwrap();
        assert_eq!(color_restore(&a, &b, 1.0).unwrap().pixels()[0], 200);
        assert_eq!(color_restore(&a, &b, 0.0).unwrap().pixels()[0], 100);
        assert_eq!(color_restore(&a, &b, 0.5).unwrap().pixels()[0], 150);
    }

    #[test]
    fn restore_dimension_mismatch() {
        let a = GrayImage::new(2, 2, 0);
        let b = GrayImage::new(2, 3, 0);
        assert!(color_restore(&a, &b, 0.5).is_err());
    }

    #[test]
    fn equalize_constant_image_unchanged() {
        let img = GrayImage::new(8, 8, 77);
        for t in [1, 2, 4] {
            assert_eq!(quantile_equalize(&img, t).unwrap(), img);
        }
    }

    #[test]
    fn equalize_two_level_fixed_points() {
        let mut px = vec![0u8; 10];
        px.extend(vec![255u8; 10]);
        let img = GrayImage::from_vec(4, 5, px).unwrap();
        let out = quantile_equalize(&img, 2).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn equalize_never_crosses_sub_ranges() {
        let mut r = SplitMix64::new(7);
        for _ in 0..100 {
            let img = random_image(8, 8, r.next_u64());
            let t = 1 + r.below(5);
            let hist = compute_histogram(&img).unwrap();
            let bounds = quantile_boundaries(&hist, t).unwrap();
            let out = quantile_equalize(&img, t).unwrap();
            for (&p, &q) in img.pixels().iter().zip(out.pixels()) {
                // Locate the source sub-range of p and check q stays inside.
                let mut k = 1;
                while k < t && p > bounds[k] {
                    k += 1;
                }
                assert!(
                    q >= bounds[k - 1] && q <= bounds[k],
                    "pixel {p} mapped to {q} outside [{}, {}]",
                    bounds[k - 1],
                    bounds[k]
                );
            }
        }
    }

    #[test]
    fn reference_he_stretches_to_full_range() {
        // Narrow mid-range histogram gets stretched across [0, 255].
        let mut px = vec![100u8; 32];
        px.extend(vec![110u8; 32]);
        let img = GrayImage::from_vec(8, 8, px).unwrap();
        let he = histogram_equalize(&img).unwrap();
        assert_eq!(he.pixels()[0], 128); // round(255 * 0.5)
        assert_eq!(he.pixels()[63], 255);
    }

    #[test]
    fn preprocess_identity_composition_is_plain_he() {
        let img = random_image(16, 16, 8);
        let cfg = PreprocessConfig {
            alpha: AlphaMode::Fixed(1.0),
            delta: 0.0,
            theta: 0.0,
            quantiles: 1,
        };
        let out = preprocess(&img, &cfg).unwrap();
        assert_eq!(out, quantile_equalize(&img, 1).unwrap());
    }

    #[test]
    fn preprocess_constant_stays_constant() {
        let img = GrayImage::new(8, 8, 90);
        let out = preprocess(&img, &PreprocessConfig::default()).unwrap();
        let first = out.pixels()[0];
        assert!(out.pixels().iter().all(|&p| p == first));
    }

    #[test]
    fn preprocess_brightens_low_contrast() {
        // Mid-dark, low-contrast blob: mean brightness must strictly rise.
        let mut img = GrayImage::new(32, 32, 0);
        for y in 0..32usize {
            for x in 0..32usize {
                let dx = x as f64 - 16.0;
                let dy = y as f64 - 16.0;
                let v = 60.0 + 30.0 * (-(dx * dx + dy * dy) / 200.0).exp();
                img.set(x, y, v as u8);
            }
        }
        let out = preprocess(&img, &PreprocessConfig::default()).unwrap();
        assert!(out.mean() > img.mean(), "{} vs {}", out.mean(), img.mean());
    }

    #[test]
    fn preprocess_deterministic() {
        let img = random_image(16, 16, 9);
        let cfg = PreprocessConfig::default();
        assert_eq!(preprocess(&img, &cfg).unwrap(), preprocess(&img, &cfg).unwrap());
    }
}
