//! Dual-tree complex wavelet transform.
//!
//! Four separable real wavelet trees (row tree x column tree, each `a` or
//! `b`) are run in parallel over a reflection-padded image. Level 1 uses the
//! LeGall biorthogonal bank in both trees with tree b delayed by one sample;
//! deeper levels use the 14-tap Q-shift bank, with tree b holding the
//! time-reversed taps so the two trees differ by half a sample of group
//! delay. Combining the four real detail bands per scale and subband type
//! yields six oriented complex sub-bands per level.
//!
//! Each tree is a perfect-reconstruction transform on its own (periodic
//! convolution), so the inverse (average of the four tree reconstructions)
//! is exact to machine precision.

use num_complex::Complex64;

use crate::error::{CadError, Result};
use crate::raster::RealImage;
use crate::xforms::fir::{legall, per_analyze, per_synthesize_into, qshift_a, FilterBank, Fir};

/// Complex-valued raster for high-pass sub-bands.
#[derive(Debug, Clone)]
pub struct ComplexImage {
    width: usize,
    height: usize,
    data: Vec<Complex64>,
}

impl ComplexImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![Complex64::new(0.0, 0.0); width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Complex64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: Complex64) {
        self.data[y * self.width + x] = v;
    }

    /// Sum of coefficient magnitudes.
    pub fn total_magnitude(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).sum()
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Six oriented complex sub-bands of one scale, ordered
/// `[lh+, lh-, hl+, hl-, hh+, hh-]`.
#[derive(Debug, Clone)]
pub struct LevelBands {
    pub bands: Vec<ComplexImage>,
}

/// Dual-tree pyramid: four real low-pass residuals (`ls_set`, one per tree
/// combination `[aa, ab, ba, bb]`) and six complex high-pass sub-bands per
/// level (`hs_set`).
#[derive(Debug, Clone)]
pub struct DtcwtPyramid {
    pub levels: usize,
    orig_w: usize,
    orig_h: usize,
    pad_w: usize,
    pad_h: usize,
    pub lowpass: Vec<RealImage>,
    pub highpass: Vec<LevelBands>,
}

impl DtcwtPyramid {
    pub fn original_dims(&self) -> (usize, usize) {
        (self.orig_w, self.orig_h)
    }
}

const MAX_LEVELS: usize = 6;

struct TreeFilters {
    level1: FilterBank,
    deep: [FilterBank; 2], // [tree a, tree b]
}

fn tree_filters() -> TreeFilters {
    // Q-shift taps with support [0, 13]; tree b reverses the taps in place
    // so the group delays straddle the half-sample point.
    let qa = qshift_a();
    let a = Fir::new(qa.taps.clone(), 0);
    let b = Fir::new(qa.taps.iter().rev().copied().collect(), 0);
    TreeFilters {
        level1: legall(),
        deep: [FilterBank::orthonormal(a), FilterBank::orthonormal(b)],
    }
}

/// Reflection-pad an image on the right/bottom to multiples of `m`.
fn pad_to_multiple(img: &RealImage, m: usize) -> RealImage {
    let w = img.width().div_ceil(m) * m;
    let h = img.height().div_ceil(m) * m;
    if w == img.width() && h == img.height() {
        return img.clone();
    }
    let mut out = RealImage::new(w, h, 0.0);
    for y in 0..h {
        let sy = crate::xforms::fir::reflect(y as isize, img.height() as isize);
        for x in 0..w {
            let sx = crate::xforms::fir::reflect(x as isize, img.width() as isize);
            out.set(x, y, img.get(sx, sy));
        }
    }
    out
}

/// One separable analysis step: returns [ll, lh, hl, hh] at half size.
/// First band letter is the horizontal channel, second the vertical one.
fn analyze2(
    img: &RealImage,
    row_bank: &FilterBank,
    col_bank: &FilterBank,
    row_phase: usize,
    col_phase: usize,
) -> [RealImage; 4] {
    let (w, h) = (img.width(), img.height());
    let (hw, hh) = (w / 2, h / 2);
    let mut low = RealImage::new(hw, h, 0.0);
    let mut high = RealImage::new(hw, h, 0.0);
    let mut row = vec![0.0; w];
    for y in 0..h {
        for x in 0..w {
            row[x] = img.get(x, y);
        }
        let lo = per_analyze(&row, &row_bank.h0, row_phase);
        let hi = per_analyze(&row, &row_bank.h1, row_phase);
        for x in 0..hw {
            low.set(x, y, lo[x]);
            high.set(x, y, hi[x]);
        }
    }
    let mut out = [
        RealImage::new(hw, hh, 0.0),
        RealImage::new(hw, hh, 0.0),
        RealImage::new(hw, hh, 0.0),
        RealImage::new(hw, hh, 0.0),
    ];
    let mut col = vec![0.0; h];
    for (i, src) in [&low, &high].into_iter().enumerate() {
        for x in 0..hw {
            for y in 0..h {
                col[y] = src.get(x, y);
            }
            let lo = per_analyze(&col, &col_bank.h0, col_phase);
            let hi = per_analyze(&col, &col_bank.h1, col_phase);
            for y in 0..hh {
                out[i * 2].set(x, y, lo[y]);
                out[i * 2 + 1].set(x, y, hi[y]);
            }
        }
    }
    out
}

/// Inverse of `analyze2`.
fn synthesize2(
    bands: &[RealImage; 4],
    row_bank: &FilterBank,
    col_bank: &FilterBank,
    row_phase: usize,
    col_phase: usize,
) -> RealImage {
    let (hw, hh) = (bands[0].width(), bands[0].height());
    let (w, h) = (hw * 2, hh * 2);
    let mut low = RealImage::new(hw, h, 0.0);
    let mut high = RealImage::new(hw, h, 0.0);
    let mut lo_col = vec![0.0; hh];
    let mut hi_col = vec![0.0; hh];
    for (i, dst) in [&mut low, &mut high].into_iter().enumerate() {
        for x in 0..hw {
            for y in 0..hh {
                lo_col[y] = bands[i * 2].get(x, y);
                hi_col[y] = bands[i * 2 + 1].get(x, y);
            }
            let mut rec = vec![0.0; h];
            per_synthesize_into(&mut rec, &lo_col, &col_bank.g0, col_phase);
            per_synthesize_into(&mut rec, &hi_col, &col_bank.g1, col_phase);
            for (y, &v) in rec.iter().enumerate() {
                dst.set(x, y, v);
            }
        }
    }
    let mut out = RealImage::new(w, h, 0.0);
    let mut lo_row = vec![0.0; hw];
    let mut hi_row = vec![0.0; hw];
    for y in 0..h {
        for x in 0..hw {
            lo_row[x] = low.get(x, y);
            hi_row[x] = high.get(x, y);
        }
        let mut rec = vec![0.0; w];
        per_synthesize_into(&mut rec, &lo_row, &row_bank.g0, row_phase);
        per_synthesize_into(&mut rec, &hi_row, &row_bank.g1, row_phase);
        for (x, &v) in rec.iter().enumerate() {
            out.set(x, y, v);
        }
    }
    out
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Combine the four tree detail bands of one subband type into the two
/// oriented complex bands. Tree order: [aa, ab, ba, bb] where the first
/// letter is the row (horizontal) tree.
fn quads_to_complex(q: [&RealImage; 4]) -> (ComplexImage, ComplexImage) {
    let (w, h) = (q[0].width(), q[0].height());
    let mut plus = ComplexImage::new(w, h);
    let mut minus = ComplexImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let u = q[0].get(x, y); // row a, col a
            let c = q[1].get(x, y); // row a, col b  (odd vertical phase)
            let b = q[2].get(x, y); // row b, col a  (odd horizontal phase)
            let d = q[3].get(x, y); // row b, col b
            plus.set(x, y, Complex64::new((u - d) * SQRT_HALF, (b + c) * SQRT_HALF));
            minus.set(x, y, Complex64::new((u + d) * SQRT_HALF, (b - c) * SQRT_HALF));
        }
    }
    (plus, minus)
}

/// Inverse of `quads_to_complex`.
fn complex_to_quads(plus: &ComplexImage, minus: &ComplexImage) -> [RealImage; 4] {
    let (w, h) = (plus.width(), plus.height());
    let mut q = [
        RealImage::new(w, h, 0.0),
        RealImage::new(w, h, 0.0),
        RealImage::new(w, h, 0.0),
        RealImage::new(w, h, 0.0),
    ];
    for y in 0..h {
        for x in 0..w {
            let zp = plus.get(x, y);
            let zm = minus.get(x, y);
            let u = (zp.re + zm.re) * SQRT_HALF;
            let d = (zm.re - zp.re) * SQRT_HALF;
            let b = (zp.im + zm.im) * SQRT_HALF;
            let c = (zp.im - zm.im) * SQRT_HALF;
            q[0].set(x, y, u);
            q[1].set(x, y, c);
            q[2].set(x, y, b);
            q[3].set(x, y, d);
        }
    }
    q
}

/// Forward dual-tree transform.
pub fn dtcwt_forward(img: &RealImage, levels: usize) -> Result<DtcwtPyramid> {
    if levels == 0 || levels > MAX_LEVELS {
        return Err(CadError::invalid(format!(
            "unsupported level count {levels} (expected 1..={MAX_LEVELS})"
        )));
    }
    if img.width() < 2 || img.height() < 2 {
        return Err(CadError::TooSmall("dual-tree transform needs at least 2x2".into()));
    }
    let filters = tree_filters();
    let padded = pad_to_multiple(img, 1usize << levels);
    let (pad_w, pad_h) = (padded.width(), padded.height());

    // Per-tree running lowpass, indexed by (row_tree, col_tree).
    let mut ll: Vec<RealImage> = vec![padded.clone(), padded.clone(), padded.clone(), padded];
    // Per tree, per level, [lh, hl, hh].
    let mut details: Vec<Vec<[RealImage; 3]>> = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];

    for level in 0..levels {
        for tree in 0..4 {
            let (rt, ct) = (tree / 2, tree % 2);
            let (row_bank, col_bank, row_phase, col_phase) = if level == 0 {
                (&filters.level1, &filters.level1, rt, ct)
            } else {
                (&filters.deep[rt], &filters.deep[ct], 0, 0)
            };
            let [l, lh, hl, hh] = analyze2(&ll[tree], row_bank, col_bank, row_phase, col_phase);
            ll[tree] = l;
            details[tree].push([lh, hl, hh]);
        }
    }

    let mut highpass = Vec::with_capacity(levels);
    for level in 0..levels {
        let mut bands = Vec::with_capacity(6);
        for sub in 0..3 {
            let quads = [
                &details[0][level][sub],
                &details[1][level][sub],
                &details[2][level][sub],
                &details[3][level][sub],
            ];
            let (p, m) = quads_to_complex(quads);
            bands.push(p);
            bands.push(m);
        }
        highpass.push(LevelBands { bands });
    }

    Ok(DtcwtPyramid {
        levels,
        orig_w: img.width(),
        orig_h: img.height(),
        pad_w,
        pad_h,
        lowpass: ll,
        highpass,
    })
}

/// Inverse dual-tree transform: reconstruct each tree and average.
pub fn dtcwt_inverse(pyr: &DtcwtPyramid) -> Result<RealImage> {
    if pyr.lowpass.len() != 4 || pyr.highpass.len() != pyr.levels {
        return Err(CadError::invalid("malformed pyramid"));
    }
    let filters = tree_filters();
    let mut ll: Vec<RealImage> = pyr.lowpass.clone();
    for level in (0..pyr.levels).rev() {
        // Recover the per-tree detail quads of this level.
        let lb = &pyr.highpass[level];
        let mut quads: Vec<[RealImage; 4]> = Vec::with_capacity(3);
        for sub in 0..3 {
            quads.push(complex_to_quads(&lb.bands[sub * 2], &lb.bands[sub * 2 + 1]));
        }
        for tree in 0..4 {
            let (rt, ct) = (tree / 2, tree % 2);
            let (row_bank, col_bank, row_phase, col_phase) = if level == 0 {
                (&filters.level1, &filters.level1, rt, ct)
            } else {
                (&filters.deep[rt], &filters.deep[ct], 0, 0)
            };
            let bands = [
                ll[tree].clone(),
                quads[0][tree].clone(),
                quads[1][tree].clone(),
                quads[2][tree].clone(),
            ];
            ll[tree] = synthesize2(&bands, row_bank, col_bank, row_phase, col_phase);
        }
    }
    // Average the four tree reconstructions and crop the padding.
    let mut out = RealImage::new(pyr.orig_w, pyr.orig_h, 0.0);
    for y in 0..pyr.orig_h {
        for x in 0..pyr.orig_w {
            let s: f64 = ll.iter().map(|t| t.get(x, y)).sum();
            out.set(x, y, 0.25 * s);
        }
    }
    let _ = (pyr.pad_w, pyr.pad_h);
    Ok(out)
}

/// Total high-pass magnitude across all levels; the statistic used by the
/// shift-invariance checks.
pub fn total_highpass_magnitude(pyr: &DtcwtPyramid) -> f64 {
    pyr.highpass.iter().flat_map(|l| l.bands.iter()).map(|b| b.total_magnitude()).sum()
}
