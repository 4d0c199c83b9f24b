//! Structural enhancement of the dual-tree low-pass bands.
//!
//! For each low-pass band a per-image schedule of growing structuring
//! elements is built: the element keeps growing while the edge content of
//! the s-curve-transformed trial enhancement stays close to the band's own
//! edge content, and stops on the first violation (hard cap guarantees
//! termination). The final enhancement adds the maximal bright detail and
//! subtracts the maximal dark detail across the scheduled scales, scaled by
//! the gain k. High-pass bands are denoised independently and the image is
//! rebuilt with the inverse dual-tree transform.

use crate::error::Result;
use crate::morph::{dilate_chain, tophat_black, tophat_white, SeShape, StructuringElement};
use crate::raster::{GrayImage, RealImage};
use crate::xforms::denoise::{denoise_highpass, DenoiseConfig};
use crate::xforms::dtcwt::{dtcwt_forward, dtcwt_inverse};

/// Parameters of the logistic gray-level remap `C + R / (1 + exp((x - d1)/d2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SCurveParams {
    /// Offset (local minimum).
    pub c: f64,
    /// Range (local max - min), >= 0.
    pub r: f64,
    /// Inflection center (local mean).
    pub delta1: f64,
    /// Slope; negative so the curve increases. Never zero.
    pub delta2: f64,
}

impl SCurveParams {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.c + self.r / (1.0 + ((x - self.delta1) / self.delta2).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhanceConfig {
    /// Enhancement gain; 0 leaves the low-pass bands untouched.
    pub k: f64,
    /// Edge-content tolerance as a fraction of the reference edge content.
    pub diff_max: f64,
    /// Initial structuring element shape.
    pub se0: SeShape,
    /// Hard cap on the dilation count (termination guarantee).
    pub t_cap: usize,
    /// Square window side for the local s-curve statistics.
    pub window: usize,
    /// Dual-tree decomposition depth.
    pub levels: usize,
    /// High-pass shrinkage parameters.
    pub denoise: DenoiseConfig,
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        Self {
            k: 1.0,
            diff_max: 0.05,
            se0: SeShape::Square3,
            t_cap: 10,
            window: 15,
            levels: 3,
            denoise: DenoiseConfig::default(),
        }
    }
}

/// Ordered schedule of growing structuring elements for one band.
#[derive(Debug, Clone)]
pub struct DseSchedule {
    pub elements: Vec<StructuringElement>,
    /// Dilation count chosen by the stopping rule.
    pub t_final: usize,
}

/// Per-pixel logistic remap with window-local parameters: delta1 = mean,
/// delta2 = -max(std, eps), C = min, R = range. A constant window collapses
/// the curve to C.
pub fn scurve_transform(img: &RealImage, window: usize) -> RealImage {
    let r = (window / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let mut out = RealImage::new(w, h, 0.0);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut n = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let v = img.get_clamped(x + dx, y + dy);
                    sum += v;
                    sum2 += v * v;
                    lo = lo.min(v);
                    hi = hi.max(v);
                    n += 1.0;
                }
            }
            let mean = sum / n;
            let var = (sum2 / n - mean * mean).max(0.0);
            let params = SCurveParams {
                c: lo,
                r: hi - lo,
                delta1: mean,
                delta2: -var.sqrt().max(1e-6),
            };
            out.set(x as usize, y as usize, params.apply(img.get(x as usize, y as usize)));
        }
    }
    out
}

/// Mean gradient magnitude (central differences, periodic wrap), the
/// stopping statistic for element growth.
pub fn edge_content(img: &RealImage) -> f64 {
    if img.is_empty() {
        return 0.0;
    }
    let (w, h) = (img.width(), img.height());
    let mut acc = 0.0;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = 0.5 * (img.get_wrapped(x + 1, y) - img.get_wrapped(x - 1, y));
            let gy = 0.5 * (img.get_wrapped(x, y + 1) - img.get_wrapped(x, y - 1));
            acc += (gx * gx + gy * gy).sqrt();
        }
    }
    acc / (w * h) as f64
}

/// Build the per-band dynamic structuring element schedule.
///
/// Iterates t = 1, 2, ..: grows the element, forms the trial enhancement
/// `LS + TH_W - TH_B`, s-curve transforms it and measures edge content;
/// keeps growing while the distance to the band's own edge content stays
/// within the tolerance and returns the schedule ending at the first
/// violating element. Also stops when the element no longer fits the band
/// or the cap is reached.
pub fn construct_dse(ls: &RealImage, cfg: &EnhanceConfig) -> DseSchedule {
    let se0 = StructuringElement::shaped(cfg.se0);
    let ed_ref = edge_content(ls);
    let tol = cfg.diff_max * ed_ref;
    let mut elements = Vec::new();
    for t in 1..=cfg.t_cap.max(1) {
        let se = match dilate_chain(&se0, t) {
            Ok(se) => se,
            Err(_) => break,
        };
        if !se.fits_in(ls) {
            break;
        }
        let tw = tophat_white(ls, &se).expect("element fits");
        let tb = tophat_black(ls, &se).expect("element fits");
        let mut trial = ls.clone();
        for i in 0..trial.len() {
            trial.values_mut()[i] += tw.values()[i] - tb.values()[i];
        }
        let g = scurve_transform(&trial, cfg.window);
        let ed = edge_content(&g);
        elements.push(se);
        if (ed_ref - ed).abs() > tol {
            break;
        }
    }
    let t_final = elements.len();
    DseSchedule { elements, t_final }
}

/// Multi-scale top-hat reconstruction:
/// `LS + k * (max_i TH_W_i + max_i DTH_W_i - max_i TH_B_i - max_i DTH_B_i)`
/// where DTH are the between-scale top-hat differences.
pub fn enhance_lowpass(ls: &RealImage, schedule: &DseSchedule, k: f64) -> RealImage {
    if schedule.elements.is_empty() || k == 0.0 {
        return ls.clone();
    }
    let whites: Vec<RealImage> =
        schedule.elements.iter().map(|se| tophat_white(ls, se).expect("element fits")).collect();
    let blacks: Vec<RealImage> =
        schedule.elements.iter().map(|se| tophat_black(ls, se).expect("element fits")).collect();

    let n = ls.len();
    let maximum = |imgs: &[RealImage]| -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; n];
        for img in imgs {
            for (o, &v) in out.iter_mut().zip(img.values()) {
                *o = o.max(v);
            }
        }
        out
    };
    let diff = |a: &RealImage, b: &RealImage| -> RealImage {
        let mut out = a.clone();
        for (o, &v) in out.values_mut().iter_mut().zip(b.values()) {
            *o -= v;
        }
        out
    };

    let max_w = maximum(&whites);
    let max_b = maximum(&blacks);
    let dw: Vec<RealImage> = whites.windows(2).map(|p| diff(&p[1], &p[0])).collect();
    let db: Vec<RealImage> = blacks.windows(2).map(|p| diff(&p[1], &p[0])).collect();
    let max_dw = if dw.is_empty() { vec![0.0; n] } else { maximum(&dw) };
    let max_db = if db.is_empty() { vec![0.0; n] } else { maximum(&db) };

    let mut out = ls.clone();
    for i in 0..n {
        out.values_mut()[i] += k * (max_w[i] + max_dw[i] - max_b[i] - max_db[i]);
    }
    out
}

/// Result of enhancing one image: the raster plus the per-band dilation
/// counts chosen by the stopping rule.
#[derive(Debug, Clone)]
pub struct EnhanceOutcome {
    pub image: GrayImage,
    pub t_finals: Vec<usize>,
}

/// Full enhancement: dual-tree split, per-band dynamic-element top-hat
/// enhancement of the low-pass set, contourlet shrinkage of the high-pass
/// set, inverse transform, clamp to the displayable range.
pub fn enhance_image(img_pre: &GrayImage, cfg: &EnhanceConfig) -> Result<EnhanceOutcome> {
    let real = img_pre.to_real();
    let mut pyr = dtcwt_forward(&real, cfg.levels)?;

    let mut t_finals = Vec::with_capacity(pyr.lowpass.len());
    for band in &mut pyr.lowpass {
        let schedule = construct_dse(band, cfg);
        t_finals.push(schedule.t_final);
        *band = enhance_lowpass(band, &schedule, cfg.k);
    }
    for level in &mut pyr.highpass {
        for band in &mut level.bands {
            *band = denoise_highpass(band, &cfg.denoise);
        }
    }
    let rec = dtcwt_inverse(&pyr)?;
    Ok(EnhanceOutcome { image: rec.to_gray(), t_finals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{disc_phantom, ridge_phantom, vessel_phantom};

    #[test]
    fn scurve_midpoint_and_asymptote() {
        let p = SCurveParams { c: 10.0, r: 20.0, delta1: 5.0, delta2: -2.0 };
        assert!((p.apply(5.0) - 20.0).abs() < 1e-12); // C + R/2
        assert!((p.apply(1e6) - 30.0).abs() < 1e-9); // C + R
        assert!((p.apply(-1e6) - 10.0).abs() < 1e-9); // C
    }

    #[test]
    fn scurve_constant_window_collapses_to_c() {
        let img = RealImage::new(9, 9, 7.0);
        let out = scurve_transform(&img, 5);
        assert!(out.values().iter().all(|&v| (v - 7.0).abs() < 1e-9));
    }

    #[test]
    fn edge_content_constant_is_zero() {
        assert_eq!(edge_content(&RealImage::new(6, 6, 3.0)), 0.0);
    }

    #[test]
    fn edge_content_step_edge_hand_value() {
        // 4x4, columns 0,1 at 0 and 2,3 at 255, periodic wrap: every pixel
        // sees |gx| = 127.5 and gy = 0, so the mean gradient is 127.5.
        let mut img = RealImage::new(4, 4, 0.0);
        for y in 0..4 {
            for x in 2..4 {
                img.set(x, y, 255.0);
            }
        }
        assert!((edge_content(&img) - 127.5).abs() < 1e-12);
    }

    #[test]
    fn edge_content_shift_invariant() {
        let base = vessel_phantom(16, 1).to_real();
        let e0 = edge_content(&base);
        for shift in [1usize, 3, 7] {
            let mut shifted = RealImage::new(16, 16, 0.0);
            for y in 0..16 {
                for x in 0..16 {
                    shifted.set(x, y, base.get((x + shift) % 16, (y + shift) % 16));
                }
            }
            assert!((edge_content(&shifted) - e0).abs() < 1e-9);
        }
    }

    #[test]
    fn dse_constant_band_runs_to_cap() {
        let ls = RealImage::new(40, 40, 5.0);
        let cfg = EnhanceConfig::default();
        let s = construct_dse(&ls, &cfg);
        assert_eq!(s.t_final, cfg.t_cap);
        assert_eq!(s.elements.len(), cfg.t_cap);
    }

    #[test]
    fn dse_tiny_tolerance_stops_immediately() {
        let ls = disc_phantom(32, 8.0, 200.0, 40.0);
        let cfg = EnhanceConfig { diff_max: 1e-9, ..Default::default() };
        let s = construct_dse(&ls, &cfg);
        assert_eq!(s.t_final, 1);
    }

    #[test]
    fn dse_depends_on_feature_scale() {
        // Two phantoms with different feature scales stop at different t:
        // the s-curve inflates a small structure's edge content immediately
        // while the large disc tolerates several growth steps. The
        // tolerance sits between the two trajectories.
        let fine = disc_phantom(48, 2.0, 220.0, 30.0);
        let coarse = disc_phantom(48, 14.0, 220.0, 30.0);
        let cfg = EnhanceConfig { diff_max: 2.3, ..Default::default() };
        let a = construct_dse(&fine, &cfg).t_final;
        let b = construct_dse(&coarse, &cfg).t_final;
        assert!(a < b, "fine {a} not below coarse {b}");
    }

    #[test]
    fn dse_schedule_grows_monotonically() {
        let ls = disc_phantom(40, 6.0, 180.0, 60.0);
        let s = construct_dse(&ls, &EnhanceConfig::default());
        for pair in s.elements.windows(2) {
            assert!(pair[1].contains(&pair[0]));
        }
    }

    #[test]
    fn enhance_lowpass_identity_cases() {
        let ls = disc_phantom(24, 5.0, 150.0, 50.0);
        let s = construct_dse(&ls, &EnhanceConfig::default());
        assert_eq!(enhance_lowpass(&ls, &s, 0.0), ls);
        let flat = RealImage::new(24, 24, 9.0);
        let s2 = construct_dse(&flat, &EnhanceConfig::default());
        assert_eq!(enhance_lowpass(&flat, &s2, 1.5), flat);
    }

    #[test]
    fn enhance_lowpass_boosts_spot_contrast() {
        let mut ls = RealImage::new(24, 24, 50.0);
        ls.set(12, 12, 80.0);
        ls.set(12, 13, 80.0);
        let s = construct_dse(&ls, &EnhanceConfig::default());
        let out = enhance_lowpass(&ls, &s, 1.0);
        let before = ls.get(12, 12) - 50.0;
        let after = out.get(12, 12) - out.get(2, 2);
        assert!(after > before, "contrast {after} not above {before}");
    }

    #[test]
    fn enhancement_magnitude_monotone_in_k() {
        let ls = disc_phantom(24, 5.0, 150.0, 50.0);
        let s = construct_dse(&ls, &EnhanceConfig::default());
        let l1 = |k: f64| -> f64 {
            enhance_lowpass(&ls, &s, k)
                .values()
                .iter()
                .zip(ls.values())
                .map(|(a, b)| (a - b).abs())
                .sum()
        };
        let (d0, d1, d2) = (l1(0.0), l1(0.5), l1(1.0));
        assert_eq!(d0, 0.0);
        assert!(d0 <= d1 && d1 <= d2);
    }

    #[test]
    fn enhance_image_identity_config() {
        let img = vessel_phantom(48, 2);
        let cfg = EnhanceConfig {
            k: 0.0,
            denoise: DenoiseConfig { noise_scale: 0.0, ..Default::default() },
            ..Default::default()
        };
        let out = enhance_image(&img, &cfg).unwrap();
        assert_eq!(out.image, img);
    }

    #[test]
    fn enhance_image_constant_stays_constant() {
        let img = GrayImage::new(32, 32, 77);
        let out = enhance_image(&img, &EnhanceConfig::default()).unwrap();
        let first = out.image.pixels()[0];
        assert!(out.image.pixels().iter().all(|&p| p == first));
    }

    #[test]
    fn enhance_image_raises_edge_content_on_ridges() {
        let img = ridge_phantom(64, 3);
        let out = enhance_image(&img, &EnhanceConfig::default()).unwrap();
        let before = edge_content(&img.to_real());
        let after = edge_content(&out.image.to_real());
        assert!(after > before, "edge content {after} not above {before}");
    }

    #[test]
    fn enhance_image_deterministic() {
        let img = vessel_phantom(32, 4);
        let cfg = EnhanceConfig::default();
        let a = enhance_image(&img, &cfg).unwrap();
        let b = enhance_image(&img, &cfg).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.t_finals, b.t_finals);
    }
}
