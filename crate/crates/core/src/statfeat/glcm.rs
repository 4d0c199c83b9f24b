//! Gray-level co-occurrence matrix features.

use crate::error::{CadError, Result};
use crate::raster::RealImage;

#[derive(Debug, Clone, PartialEq)]
pub struct GlcmConfig {
    /// Gray quantization level count, >= 2.
    pub levels: usize,
    /// Displacements (dx, dy).
    pub offsets: Vec<(isize, isize)>,
    pub symmetric: bool,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        Self { levels: 8, offsets: vec![(1, 0), (0, 1), (1, 1), (1, -1)], symmetric: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GlcmFeatures {
    /// Inverse difference moment: sum p / (1 + (i-j)^2).
    pub idm: f64,
    /// sum p (i-j)^2.
    pub contrast: f64,
    /// sum p^2.
    pub energy: f64,
    /// sum p / (1 + |i-j|).
    pub homogeneity: f64,
}

/// Min-max quantization of a real raster into `levels` gray levels.
fn quantize(cf: &RealImage, levels: usize) -> Vec<usize> {
    let lo = cf.values().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cf.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0; cf.len()];
    }
    let scale = levels as f64 / (hi - lo);
    cf.values()
        .iter()
        .map(|&v| (((v - lo) * scale) as usize).min(levels - 1))
        .collect()
}

/// Haralick features of the normalized co-occurrence matrix averaged over
/// the configured offsets.
pub fn glcm_features(cf: &RealImage, cfg: &GlcmConfig) -> Result<GlcmFeatures> {
    if cfg.levels < 2 {
        return Err(CadError::invalid("glcm needs at least 2 levels"));
    }
    if cfg.offsets.is_empty() {
        return Err(CadError::invalid("glcm needs at least one offset"));
    }
    let (w, h) = (cf.width() as isize, cf.height() as isize);
    let q = quantize(cf, cfg.levels);
    let l = cfg.levels;
    let mut matrix = vec![0.0f64; l * l];
    let mut total = 0.0f64;
    for &(dx, dy) in &cfg.offsets {
        if dx.abs() >= w || dy.abs() >= h {
            return Err(CadError::TooSmall(format!("offset ({dx},{dy}) exceeds raster")));
        }
        for y in 0..h {
            for x in 0..w {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || nx >= w || ny < 0 || ny >= h {
                    continue;
                }
                let a = q[(y * w + x) as usize];
                let b = q[(ny * w + nx) as usize];
                matrix[a * l + b] += 1.0;
                total += 1.0;
                if cfg.symmetric {
                    matrix[b * l + a] += 1.0;
                    total += 1.0;
                }
            }
        }
    }
    if total == 0.0 {
        return Err(CadError::TooSmall("no co-occurring pairs".into()));
    }
    let mut f = GlcmFeatures::default();
    for i in 0..l {
        for j in 0..l {
            let p = matrix[i * l + j] / total;
            if p == 0.0 {
                continue;
            }
            let d = i as f64 - j as f64;
            f.idm += p / (1.0 + d * d);
            f.contrast += p * d * d;
            f.energy += p * p;
            f.homogeneity += p / (1.0 + d.abs());
        }
    }
    Ok(f)
}
