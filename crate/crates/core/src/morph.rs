//! Flat grayscale morphology: structuring elements, erosion/dilation,
//! opening/closing and the white/black top-hats.
//!
//! Borders replicate the nearest pixel, which keeps the usual ordering
//! relations (opening <= image <= closing) intact everywhere.

use crate::error::{CadError, Result};
use crate::raster::RealImage;

/// Binary structuring element with an explicit origin. The origin pixel is
/// always part of the mask so that repeated self-dilation grows the
/// support monotonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
    origin: (usize, usize),
    mask: Vec<bool>,
}

/// Initial element shapes exposed in the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeShape {
    Square3,
    Cross3,
    Disc5,
}

impl StructuringElement {
    pub fn from_mask(
        width: usize,
        height: usize,
        origin: (usize, usize),
        mask: Vec<bool>,
    ) -> Result<Self> {
        if mask.len() != width * height || !mask.iter().any(|&m| m) {
            return Err(CadError::invalid("structuring element mask empty or mis-sized"));
        }
        if origin.0 >= width || origin.1 >= height {
            return Err(CadError::invalid("structuring element origin outside mask"));
        }
        if !mask[origin.1 * width + origin.0] {
            return Err(CadError::invalid("structuring element origin not set in mask"));
        }
        Ok(Self { width, height, origin, mask })
    }

    pub fn shaped(shape: SeShape) -> Self {
        match shape {
            SeShape::Square3 => Self::square(3),
            SeShape::Cross3 => Self::cross(3),
            SeShape::Disc5 => Self::disc(2),
        }
    }

    /// n x n all-ones square, origin at the center. `n` must be odd.
    pub fn square(n: usize) -> Self {
        assert!(n % 2 == 1 && n > 0);
        Self { width: n, height: n, origin: (n / 2, n / 2), mask: vec![true; n * n] }
    }

    /// n x n plus-shaped cross, origin at the center. `n` must be odd.
    pub fn cross(n: usize) -> Self {
        assert!(n % 2 == 1 && n > 0);
        let c = n / 2;
        let mask = (0..n * n).map(|i| i % n == c || i / n == c).collect();
        Self { width: n, height: n, origin: (c, c), mask }
    }

    /// Euclidean disc of the given radius, origin at the center.
    pub fn disc(radius: usize) -> Self {
        let n = 2 * radius + 1;
        let c = radius as isize;
        let mask = (0..n * n)
            .map(|i| {
                let dx = (i % n) as isize - c;
                let dy = (i / n) as isize - c;
                dx * dx + dy * dy <= (radius * radius) as isize
            })
            .collect();
        Self { width: n, height: n, origin: (radius, radius), mask }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Offsets of set pixels relative to the origin.
    pub fn offsets(&self) -> Vec<(isize, isize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.mask[y * self.width + x] {
                    out.push((x as isize - self.origin.0 as isize, y as isize - self.origin.1 as isize));
                }
            }
        }
        out
    }

    pub fn support_len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// True when every set offset of `other` is also set here.
    pub fn contains(&self, other: &StructuringElement) -> bool {
        let mine: std::collections::BTreeSet<_> = self.offsets().into_iter().collect();
        other.offsets().iter().all(|o| mine.contains(o))
    }

    pub fn fits_in(&self, img: &RealImage) -> bool {
        self.width <= img.width() && self.height <= img.height()
    }
}

/// Minkowski sum of two structuring elements (binary dilation); offsets add
/// and so do the origins.
pub fn dilate_se(a: &StructuringElement, b: &StructuringElement) -> StructuringElement {
    let width = a.width + b.width - 1;
    let height = a.height + b.height - 1;
    let origin = (a.origin.0 + b.origin.0, a.origin.1 + b.origin.1);
    let mut mask = vec![false; width * height];
    for ya in 0..a.height {
        for xa in 0..a.width {
            if !a.mask[ya * a.width + xa] {
                continue;
            }
            for yb in 0..b.height {
                for xb in 0..b.width {
                    if b.mask[yb * b.width + xb] {
                        mask[(ya + yb) * width + (xa + xb)] = true;
                    }
                }
            }
        }
    }
    StructuringElement { width, height, origin, mask }
}

/// `t`-fold self-dilation of the initial element: t = 1 returns the element
/// itself, each further step dilates by the element once more.
pub fn dilate_chain(se0: &StructuringElement, t: usize) -> Result<StructuringElement> {
    if t < 1 {
        return Err(CadError::invalid("dilation count must be >= 1"));
    }
    let mut out = se0.clone();
    for _ in 1..t {
        out = dilate_se(&out, se0);
    }
    Ok(out)
}

/// Erosion: minimum over the element support, replicate borders.
pub fn erode(img: &RealImage, se: &StructuringElement) -> RealImage {
    let offsets = se.offsets();
    let mut out = RealImage::new(img.width(), img.height(), 0.0);
    for y in 0..img.height() as isize {
        for x in 0..img.width() as isize {
            let mut m = f64::INFINITY;
            for &(dx, dy) in &offsets {
                m = m.min(img.get_clamped(x + dx, y + dy));
            }
            out.set(x as usize, y as usize, m);
        }
    }
    out
}

/// Dilation: maximum over the reflected element support, replicate borders.
pub fn dilate(img: &RealImage, se: &StructuringElement) -> RealImage {
    let offsets = se.offsets();
    let mut out = RealImage::new(img.width(), img.height(), 0.0);
    for y in 0..img.height() as isize {
        for x in 0..img.width() as isize {
            let mut m = f64::NEG_INFINITY;
            for &(dx, dy) in &offsets {
                m = m.max(img.get_clamped(x - dx, y - dy));
            }
            out.set(x as usize, y as usize, m);
        }
    }
    out
}

pub fn open(img: &RealImage, se: &StructuringElement) -> RealImage {
    dilate(&erode(img, se), se)
}

pub fn close(img: &RealImage, se: &StructuringElement) -> RealImage {
    erode(&dilate(img, se), se)
}

/// White top-hat: image minus its opening; non-negative everywhere.
pub fn tophat_white(img: &RealImage, se: &StructuringElement) -> Result<RealImage> {
    if !se.fits_in(img) {
        return Err(CadError::TooSmall("structuring element larger than image".into()));
    }
    let opened = open(img, se);
    let mut out = img.clone();
    for (o, &v) in out.values_mut().iter_mut().zip(opened.values()) {
        *o -= v;
    }
    Ok(out)
}

/// Black top-hat: closing minus the image; non-negative everywhere.
pub fn tophat_black(img: &RealImage, se: &StructuringElement) -> Result<RealImage> {
    if !se.fits_in(img) {
        return Err(CadError::TooSmall("structuring element larger than image".into()));
    }
    let closed = close(img, se);
    let mut out = closed;
    for (o, &v) in out.values_mut().iter_mut().zip(img.values()) {
        *o -= v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    /// Brute-force Minkowski sum over explicit offset sets.
    fn brute_dilate_offsets(
        a: &[(isize, isize)],
        b: &[(isize, isize)],
    ) -> std::collections::BTreeSet<(isize, isize)> {
        let mut out = std::collections::BTreeSet::new();
        for &(ax, ay) in a {
            for &(bx, by) in b {
                out.insert((ax + bx, ay + by));
            }
        }
        out
    }

    #[test]
    fn chain_t1_is_identity() {
        let se = StructuringElement::square(3);
        assert_eq!(dilate_chain(&se, 1).unwrap(), se);
        assert!(dilate_chain(&se, 0).is_err());
    }

    #[test]
    fn square_grows_to_5x5() {
        let se = dilate_chain(&StructuringElement::square(3), 2).unwrap();
        assert_eq!((se.width(), se.height()), (5, 5));
        assert_eq!(se.support_len(), 25);
        // Brute-force oracle over offset sets.
        let base = StructuringElement::square(3).offsets();
        let expect = brute_dilate_offsets(&base, &base);
        let got: std::collections::BTreeSet<_> = se.offsets().into_iter().collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn cross_grows_to_diamond() {
        let se = dilate_chain(&StructuringElement::cross(3), 2).unwrap();
        assert_eq!((se.width(), se.height()), (5, 5));
        // Manhattan ball of radius 2: 13 pixels.
        assert_eq!(se.support_len(), 13);
        let base = StructuringElement::cross(3).offsets();
        let expect = brute_dilate_offsets(&base, &base);
        let got: std::collections::BTreeSet<_> = se.offsets().into_iter().collect();
        assert_eq!(got, expect);
        assert!(got.iter().all(|&(x, y)| x.abs() + y.abs() <= 2));
    }

    #[test]
    fn chain_support_grows_monotonically() {
        for shape in [SeShape::Square3, SeShape::Cross3, SeShape::Disc5] {
            let se0 = StructuringElement::shaped(shape);
            let mut prev = dilate_chain(&se0, 1).unwrap();
            for t in 2..=5 {
                let next = dilate_chain(&se0, t).unwrap();
                assert!(next.contains(&prev), "{shape:?} t={t}");
                prev = next;
            }
        }
    }

    #[test]
    fn tophats_on_constant_are_zero() {
        let img = RealImage::new(8, 8, 42.0);
        let se = StructuringElement::square(3);
        assert!(tophat_white(&img, &se).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(tophat_black(&img, &se).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bright_pixel_white_tophat() {
        let mut img = RealImage::new(8, 8, 0.0);
        img.set(4, 4, 9.0);
        let se = StructuringElement::square(3);
        let tw = tophat_white(&img, &se).unwrap();
        assert_eq!(tw.values(), img.values());
        let tb = tophat_black(&img, &se).unwrap();
        assert!(tb.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dark_pixel_black_tophat() {
        let mut img = RealImage::new(8, 8, 9.0);
        img.set(3, 3, 0.0);
        let se = StructuringElement::square(3);
        let tb = tophat_black(&img, &se).unwrap();
        assert_eq!(tb.get(3, 3), 9.0);
        assert_eq!(tb.values().iter().filter(|&&v| v != 0.0).count(), 1);
        let tw = tophat_white(&img, &se).unwrap();
        assert!(tw.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tophats_nonnegative_on_random_images() {
        let mut r = SplitMix64::new(11);
        for shape in [SeShape::Square3, SeShape::Cross3, SeShape::Disc5] {
            let se = StructuringElement::shaped(shape);
            for _ in 0..20 {
                let img = RealImage::from_vec(
                    16,
                    16,
                    (0..256).map(|_| r.uniform(-50.0, 300.0)).collect(),
                )
                .unwrap();
                let tw = tophat_white(&img, &se).unwrap();
                let tb = tophat_black(&img, &se).unwrap();
                assert!(tw.values().iter().all(|&v| v >= 0.0));
                assert!(tb.values().iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn oversized_element_rejected() {
        let img = RealImage::new(4, 4, 0.0);
        let se = StructuringElement::square(5);
        assert!(tophat_white(&img, &se).is_err());
        assert!(tophat_black(&img, &se).is_err());
    }

    /// Independent brute-force open/close on random images must match
    /// exactly (pure min/max arithmetic, no rounding involved). The brute
    /// force recomputes each morphological stage as its own full scan with
    /// replicate borders.
    #[test]
    fn matches_brute_force_open_close() {
        let mut r = SplitMix64::new(13);
        let se = StructuringElement::cross(3);
        let offs = se.offsets();
        let brute_erode = |img: &RealImage| -> RealImage {
            let mut out = RealImage::new(img.width(), img.height(), 0.0);
            for y in 0..img.height() as isize {
                for x in 0..img.width() as isize {
                    let mut m = f64::INFINITY;
                    for &(px, py) in &offs {
                        m = m.min(img.get_clamped(x + px, y + py));
                    }
                    out.set(x as usize, y as usize, m);
                }
            }
            out
        };
        let brute_dilate = |img: &RealImage| -> RealImage {
            let mut out = RealImage::new(img.width(), img.height(), 0.0);
            for y in 0..img.height() as isize {
                for x in 0..img.width() as isize {
                    let mut m = f64::NEG_INFINITY;
                    for &(px, py) in &offs {
                        m = m.max(img.get_clamped(x - px, y - py));
                    }
                    out.set(x as usize, y as usize, m);
                }
            }
            out
        };
        for _ in 0..10 {
            let img =
                RealImage::from_vec(16, 16, (0..256).map(|_| r.uniform(0.0, 255.0)).collect())
                    .unwrap();
            assert_eq!(open(&img, &se), brute_dilate(&brute_erode(&img)));
            assert_eq!(close(&img, &se), brute_erode(&brute_dilate(&img)));
        }
    }
}
