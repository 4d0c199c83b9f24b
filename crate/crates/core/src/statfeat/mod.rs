//! Statistical features of the level-2 Bior 6.8 DWT coefficients:
//! first-order statistics, GLCM second-order features, higher-order
//! cumulants in five directions, and higher-order-spectra features.
//!
//! Every group is computed per retained sub-band (the three level-1 detail
//! bands plus all four level-2 bands) and averaged across the bands, one
//! value per feature name.

pub mod glcm;
pub mod hoc;
pub mod hos;

pub use glcm::{glcm_features, GlcmConfig, GlcmFeatures};
pub use hoc::{hoc_features, HocConfig};
pub use hos::{hos_features, HosFeatures};

use crate::error::{CadError, Result};
use crate::raster::{GrayImage, RealImage};
use crate::stats;
use crate::xforms::dwt::dwt2_bior68;

/// First-order statistics of one coefficient raster.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FirstOrderStats {
    pub mean: f64,
    pub sd: f64,
    /// Shannon entropy (bits) of the 256-bin value histogram.
    pub entropy: f64,
    pub rms: f64,
    pub variance: f64,
    /// 1 - 1/(1 + variance).
    pub smoothness: f64,
    /// Raw m4/m2^2; 0 for zero-variance rasters.
    pub kurtosis: f64,
    pub skewness: f64,
}

pub fn first_order_stats(cf: &RealImage) -> Result<FirstOrderStats> {
    if cf.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let xs = cf.values();
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // A value range at the rounding-dust level counts as a single bin, so
    // effectively constant rasters report zero entropy.
    let entropy = if hi - lo <= 1e-9 * lo.abs().max(hi.abs()).max(1.0) {
        0.0
    } else {
        stats::histogram_entropy_bits(xs, lo, hi, 256)
    };
    let variance = stats::variance(xs);
    Ok(FirstOrderStats {
        mean: stats::mean(xs),
        sd: variance.sqrt(),
        entropy,
        rms: stats::rms(xs),
        variance,
        smoothness: 1.0 - 1.0 / (1.0 + variance),
        kurtosis: stats::kurtosis(xs),
        skewness: stats::skewness(xs),
    })
}

/// All statistical features of one image, averaged over the DWT sub-bands.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatFeatures {
    pub fos: FirstOrderStats,
    pub glcm: GlcmFeatures,
    pub hoc: [f64; 5],
    pub hos: HosFeatures,
}

pub fn stat_features(
    img: &GrayImage,
    glcm_cfg: &GlcmConfig,
    hoc_cfg: &HocConfig,
) -> Result<StatFeatures> {
    let coeffs = dwt2_bior68(&img.to_real())?;
    let bands = coeffs.feature_bands();
    if bands.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let mut acc = StatFeatures::default();
    for band in &bands {
        let fos = first_order_stats(band)?;
        let g = glcm_features(band, glcm_cfg)?;
        let hc = hoc_features(band, hoc_cfg)?;
        let hs = hos_features(band);
        acc.fos.mean += fos.mean;
        acc.fos.sd += fos.sd;
        acc.fos.entropy += fos.entropy;
        acc.fos.rms += fos.rms;
        acc.fos.variance += fos.variance;
        acc.fos.smoothness += fos.smoothness;
        acc.fos.kurtosis += fos.kurtosis;
        acc.fos.skewness += fos.skewness;
        acc.glcm.idm += g.idm;
        acc.glcm.contrast += g.contrast;
        acc.glcm.energy += g.energy;
        acc.glcm.homogeneity += g.homogeneity;
        for (a, v) in acc.hoc.iter_mut().zip(hc) {
            *a += v;
        }
        acc.hos.entropy_phase += hs.entropy_phase;
        acc.hos.mean_magnitude += hs.mean_magnitude;
        acc.hos.entropy_deg1 += hs.entropy_deg1;
        acc.hos.entropy_deg2 += hs.entropy_deg2;
        acc.hos.entropy_deg3 += hs.entropy_deg3;
    }
    let n = bands.len() as f64;
    acc.fos.mean /= n;
    acc.fos.sd /= n;
    acc.fos.entropy /= n;
    acc.fos.rms /= n;
    acc.fos.variance /= n;
    acc.fos.smoothness /= n;
    acc.fos.kurtosis /= n;
    acc.fos.skewness /= n;
    acc.glcm.idm /= n;
    acc.glcm.contrast /= n;
    acc.glcm.energy /= n;
    acc.glcm.homogeneity /= n;
    for a in acc.hoc.iter_mut() {
        *a /= n;
    }
    acc.hos.entropy_phase /= n;
    acc.hos.mean_magnitude /= n;
    acc.hos.entropy_deg1 /= n;
    acc.hos.entropy_deg2 /= n;
    acc.hos.entropy_deg3 /= n;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn constant_raster_first_order() {
        let img = RealImage::new(8, 8, 4.0);
        let f = first_order_stats(&img).unwrap();
        assert_eq!(f.mean, 4.0);
        assert_eq!(f.sd, 0.0);
        assert_eq!(f.entropy, 0.0);
        assert_eq!(f.rms, 4.0);
        assert_eq!(f.variance, 0.0);
        assert_eq!(f.smoothness, 0.0);
        assert_eq!(f.kurtosis, 0.0);
        assert_eq!(f.skewness, 0.0);
    }

    #[test]
    fn balanced_two_value_raster() {
        let data: Vec<f64> = (0..64).map(|i| (i % 2) as f64).collect();
        let img = RealImage::from_vec(8, 8, data).unwrap();
        let f = first_order_stats(&img).unwrap();
        assert!((f.mean - 0.5).abs() < 1e-12);
        assert!((f.variance - 0.25).abs() < 1e-12);
        assert!((f.entropy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_raster_kurtosis_near_three() {
        let mut r = SplitMix64::new(23);
        let data: Vec<f64> = (0..40_000).map(|_| r.normal()).collect();
        let img = RealImage::from_vec(200, 200, data).unwrap();
        let f = first_order_stats(&img).unwrap();
        assert!((f.kurtosis - 3.0).abs() < 0.12, "kurtosis {}", f.kurtosis);
    }

    #[test]
    fn aggregated_features_finite_on_random_images() {
        let mut r = SplitMix64::new(29);
        let px: Vec<u8> = (0..64 * 64).map(|_| (r.next_u64() & 0xff) as u8).collect();
        let img = GrayImage::from_vec(64, 64, px).unwrap();
        let f = stat_features(&img, &GlcmConfig::default(), &HocConfig::default()).unwrap();
        let all = [
            f.fos.mean,
            f.fos.sd,
            f.fos.entropy,
            f.fos.rms,
            f.fos.variance,
            f.fos.smoothness,
            f.fos.kurtosis,
            f.fos.skewness,
            f.glcm.idm,
            f.glcm.contrast,
            f.glcm.energy,
            f.glcm.homogeneity,
            f.hoc[0],
            f.hoc[4],
            f.hos.entropy_phase,
            f.hos.mean_magnitude,
            f.hos.entropy_deg3,
        ];
        assert!(all.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn aggregated_features_finite_on_constant_image() {
        let img = GrayImage::new(64, 64, 40);
        let f = stat_features(&img, &GlcmConfig::default(), &HocConfig::default()).unwrap();
        assert!(f.fos.variance >= 0.0);
        assert!(f.hoc.iter().all(|v| v.is_finite()));
        assert!(f.hos.mean_magnitude.is_finite());
    }
}
