//! Symmetric local graph structure transform.
//!
//! Every pixel anchors two six-edge traversals over its symmetric
//! neighborhood (borders replicate). Each directed edge emits bit 1 when
//! the target intensity is greater than or equal to the source (moving
//! strictly higher-to-lower emits 0); bits are weighted 2^p in traversal
//! order. The left/right pattern and the top/bottom pattern combine by the
//! Euclidean rule `NRP = sqrt(LR^2 + TB^2)`.
//!
//! Edge order (offsets relative to the anchor pixel (x, y)):
//!
//! left/right pattern, p = 0..5:
//!   p0: (x,   y  ) -> (x-1, y  )    p3: (x,   y  ) -> (x+1, y  )
//!   p1: (x-1, y  ) -> (x-2, y-1)    p4: (x+1, y  ) -> (x+2, y-1)
//!   p2: (x-2, y-1) -> (x-2, y+1)    p5: (x+2, y-1) -> (x+2, y+1)
//!
//! top/bottom pattern, p = 0..5 (the transpose of the above):
//!   p0: (x,   y  ) -> (x,   y-1)    p3: (x,   y  ) -> (x,   y+1)
//!   p1: (x,   y-1) -> (x-1, y-2)    p4: (x,   y+1) -> (x-1, y+2)
//!   p2: (x-1, y-2) -> (x+1, y-2)    p5: (x-1, y+2) -> (x+1, y+2)

use crate::error::{CadError, Result};
use crate::raster::{GrayImage, RealImage};
use crate::stats;

/// Bits per pattern.
pub const LGS_PATTERN_BITS: usize = 6;

/// Largest reachable pattern value, 2^P - 1.
pub const LGS_PATTERN_MAX: f64 = ((1u32 << LGS_PATTERN_BITS) - 1) as f64;

const LR_EDGES: [((isize, isize), (isize, isize)); 6] = [
    ((0, 0), (-1, 0)),
    ((-1, 0), (-2, -1)),
    ((-2, -1), (-2, 1)),
    ((0, 0), (1, 0)),
    ((1, 0), (2, -1)),
    ((2, -1), (2, 1)),
];

const TB_EDGES: [((isize, isize), (isize, isize)); 6] = [
    ((0, 0), (0, -1)),
    ((0, -1), (-1, -2)),
    ((-1, -2), (1, -2)),
    ((0, 0), (0, 1)),
    ((0, 1), (-1, 2)),
    ((-1, 2), (1, 2)),
];

fn pattern(img: &GrayImage, x: isize, y: isize, edges: &[((isize, isize), (isize, isize)); 6]) -> u32 {
    let mut bits = 0u32;
    for (p, &((sx, sy), (tx, ty))) in edges.iter().enumerate() {
        let src = img.get_clamped(x + sx, y + sy);
        let dst = img.get_clamped(x + tx, y + ty);
        if dst >= src {
            bits |= 1 << p;
        }
    }
    bits
}

/// Combine the two pattern magnitudes.
#[inline]
pub fn combine_patterns(lr: u32, tb: u32) -> f64 {
    ((lr * lr + tb * tb) as f64).sqrt()
}

/// Per-pixel NRP_Final raster.
pub fn lgs_transform(img: &GrayImage) -> Result<RealImage> {
    if img.width() < 5 || img.height() < 5 {
        return Err(CadError::TooSmall("lgs needs at least a 5x5 image".into()));
    }
    let mut out = RealImage::new(img.width(), img.height(), 0.0);
    for y in 0..img.height() as isize {
        for x in 0..img.width() as isize {
            let lr = pattern(img, x, y, &LR_EDGES);
            let tb = pattern(img, x, y, &TB_EDGES);
            out.set(x as usize, y as usize, combine_patterns(lr, tb));
        }
    }
    Ok(out)
}

/// Six statistics of the NRP_Final raster. Energy is the mean square of
/// the raster normalized by its reachable maximum; entropy is over the
/// 256-bin histogram of the normalized values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LgsFeatures {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub energy: f64,
    pub entropy: f64,
}

pub fn lgs_features(lgs: &RealImage) -> LgsFeatures {
    let xs = lgs.values();
    let max = std::f64::consts::SQRT_2 * LGS_PATTERN_MAX;
    let normalized: Vec<f64> = xs.iter().map(|&v| v / max).collect();
    LgsFeatures {
        mean: stats::mean(xs),
        variance: stats::variance(xs),
        skewness: stats::skewness(xs),
        kurtosis: stats::kurtosis(xs),
        energy: normalized.iter().map(|&v| v * v).sum::<f64>() / normalized.len().max(1) as f64,
        entropy: stats::histogram_entropy_bits(&normalized, 0.0, 1.0, 256),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn constant_image_saturates_patterns() {
        // Equal intensities emit bit 1 on every edge, so both patterns are
        // 2^P - 1 and NRP_Final = sqrt(2) * 63 everywhere.
        let img = GrayImage::new(8, 8, 40);
        let out = lgs_transform(&img).unwrap();
        let expect = std::f64::consts::SQRT_2 * LGS_PATTERN_MAX;
        assert!(out.values().iter().all(|&v| (v - expect).abs() < 1e-12));
    }

    #[test]
    fn pythagorean_combination() {
        assert_eq!(combine_patterns(3, 4), 5.0);
        assert_eq!(combine_patterns(0, 0), 0.0);
    }

    #[test]
    fn matches_brute_force_bit_for_bit() {
        // Independent re-implementation walking the documented edge order.
        let lr_edges = [
            ((0, 0), (-1, 0)),
            ((-1, 0), (-2, -1)),
            ((-2, -1), (-2, 1)),
            ((0, 0), (1, 0)),
            ((1, 0), (2, -1)),
            ((2, -1), (2, 1)),
        ];
        let tb_edges = [
            ((0, 0), (0, -1)),
            ((0, -1), (-1, -2)),
            ((-1, -2), (1, -2)),
            ((0, 0), (0, 1)),
            ((0, 1), (-1, 2)),
            ((-1, 2), (1, 2)),
        ];
        let clamp_get = |img: &GrayImage, x: isize, y: isize| -> u8 {
            let xc = x.clamp(0, img.width() as isize - 1) as usize;
            let yc = y.clamp(0, img.height() as isize - 1) as usize;
            img.get(xc, yc)
        };
        let mut r = SplitMix64::new(47);
        for _ in 0..20 {
            let px: Vec<u8> = (0..64).map(|_| (r.next_u64() & 0xff) as u8).collect();
            let img = GrayImage::from_vec(8, 8, px).unwrap();
            let got = lgs_transform(&img).unwrap();
            for y in 0..8isize {
                for x in 0..8isize {
                    let mut lr = 0u32;
                    for (p, &((sx, sy), (tx, ty))) in lr_edges.iter().enumerate() {
                        if clamp_get(&img, x + tx, y + ty) >= clamp_get(&img, x + sx, y + sy) {
                            lr |= 1 << p;
                        }
                    }
                    let mut tb = 0u32;
                    for (p, &((sx, sy), (tx, ty))) in tb_edges.iter().enumerate() {
                        if clamp_get(&img, x + tx, y + ty) >= clamp_get(&img, x + sx, y + sy) {
                            tb |= 1 << p;
                        }
                    }
                    let expect = ((lr * lr + tb * tb) as f64).sqrt();
                    assert_eq!(got.get(x as usize, y as usize), expect);
                }
            }
        }
    }

    #[test]
    fn invariant_under_constant_intensity_shift() {
        let mut r = SplitMix64::new(53);
        for _ in 0..10 {
            let px: Vec<u8> = (0..64).map(|_| (r.next_u64() % 200) as u8).collect();
            let img = GrayImage::from_vec(8, 8, px.clone()).unwrap();
            let shifted =
                GrayImage::from_vec(8, 8, px.iter().map(|&p| p + 55).collect()).unwrap();
            assert_eq!(
                lgs_transform(&img).unwrap(),
                lgs_transform(&shifted).unwrap()
            );
        }
    }

    #[test]
    fn rejects_small_images() {
        assert!(lgs_transform(&GrayImage::new(4, 4, 0)).is_err());
    }

    #[test]
    fn feature_degenerate_cases() {
        let constant = RealImage::new(8, 8, 5.0);
        let f = lgs_features(&constant);
        assert_eq!(f.variance, 0.0);
        assert_eq!(f.entropy, 0.0);
        assert_eq!(f.skewness, 0.0);

        // Balanced two-value raster: entropy one bit.
        let data: Vec<f64> = (0..64).map(|i| (i % 2) as f64 * LGS_PATTERN_MAX).collect();
        let two = RealImage::from_vec(8, 8, data).unwrap();
        let f2 = lgs_features(&two);
        assert!((f2.entropy - 1.0).abs() < 1e-12);
        assert_eq!(f2.skewness, 0.0);
    }
}
