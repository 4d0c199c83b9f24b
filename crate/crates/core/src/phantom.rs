//! Synthetic retinal phantoms for tests, experiments and the demo.
//!
//! None of these aim for photographic realism; they reproduce the gross
//! structure the pipeline cares about: a bright disc, dark curvilinear
//! vessels, a low-contrast vignette, and class-dependent micro-texture.

use crate::raster::{GrayImage, RealImage};
use crate::rng::SplitMix64;

/// Flat disc on a flat background.
pub fn disc_phantom(n: usize, radius: f64, inside: f64, outside: f64) -> RealImage {
    let mut img = RealImage::new(n, n, outside);
    let c = n as f64 / 2.0;
    for y in 0..n {
        for x in 0..n {
            let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
            if d <= radius {
                img.set(x, y, inside);
            }
        }
    }
    img
}

/// Fundus-like phantom: bright optic-disc blob, dark sinuous vessels,
/// gentle vignette. Deterministic for a given seed.
pub fn vessel_phantom(n: usize, seed: u64) -> GrayImage {
    let mut r = SplitMix64::new(seed);
    let c = n as f64 / 2.0;
    let disc_x = c + r.uniform(-0.15, 0.15) * n as f64;
    let disc_y = c + r.uniform(-0.15, 0.15) * n as f64;
    let disc_r = n as f64 / r.uniform(4.5, 6.0);
    let vessels: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                r.uniform(0.10, 0.30),          // frequency
                r.uniform(0.0, std::f64::consts::TAU),           // phase
                r.uniform(2.0, 4.0),            // half width
                c + r.uniform(-0.3, 0.3) * n as f64, // base row
            )
        })
        .collect();

    let mut img = GrayImage::new(n, n, 0);
    for y in 0..n {
        for x in 0..n {
            let dx = x as f64 - disc_x;
            let dy = y as f64 - disc_y;
            let d2 = dx * dx + dy * dy;
            let mut v = 70.0 + 55.0 * (-d2 / (2.0 * disc_r * disc_r)).exp();
            // Vignette towards the corners.
            let vr = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt() / (c * 1.5);
            v *= 1.0 - 0.25 * vr * vr;
            for &(f, ph, w, base) in &vessels {
                let cy = base + (x as f64 * f + ph).sin() * (n as f64 / 4.0);
                let dist = (y as f64 - cy).abs();
                if dist < w {
                    v -= 32.0 * (1.0 - dist / w);
                }
            }
            img.set(x, y, v.round().clamp(0.0, 255.0) as u8);
        }
    }
    img
}

/// Sparse vessel-like ridges on a flat background: the high-pass bands
/// stay sparse, so enhancement strictly raises the edge content.
pub fn ridge_phantom(n: usize, seed: u64) -> GrayImage {
    let mut r = SplitMix64::new(seed);
    let mut img = GrayImage::new(n, n, 90);
    let ridges: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                r.uniform(0.08, 0.25),
                r.uniform(0.0, std::f64::consts::TAU),
                r.uniform(1.2, 2.2),
                n as f64 * r.uniform(0.15, 0.85),
            )
        })
        .collect();
    for y in 0..n {
        for x in 0..n {
            let mut v = 90.0;
            for &(f, ph, w, base) in &ridges {
                let cy = base + (x as f64 * f + ph).sin() * (n as f64 / 5.0);
                let dist = (y as f64 - cy).abs();
                if dist < w {
                    v -= 45.0 * (1.0 - dist / w);
                }
            }
            img.set(x, y, v.round().clamp(0.0, 255.0) as u8);
        }
    }
    img
}

/// Mid-dark narrow-histogram phantom for the brightness and MSE-ordering
/// experiments.
pub fn low_contrast_phantom(n: usize, seed: u64) -> GrayImage {
    let mut r = SplitMix64::new(seed);
    let base = vessel_phantom(n, r.next_u64());
    let mut img = GrayImage::new(n, n, 0);
    let gain = r.uniform(0.18, 0.30);
    let offset = r.uniform(55.0, 80.0);
    for (dst, &src) in img.pixels_mut().iter_mut().zip(base.pixels()) {
        let v = offset + gain * src as f64 + r.uniform(-1.5, 1.5);
        *dst = v.round().clamp(0.0, 255.0) as u8;
    }
    img
}

/// Class label of a synthetic phantom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomClass {
    Normal,
    Glaucoma,
}

/// Two-class texture phantom set entry.
///
/// The classes share the fundus layout and the (non-discriminative)
/// micro-texture and differ in morphology the way the clinical analogs do:
/// the glaucoma class carries a larger pale cup inside the disc and
/// thinner vessels. Every image is then hidden behind a low-contrast veil
/// and pixel noise, so raw-image features see the structure poorly while
/// preprocessing and enhancement recover it.
pub fn class_phantom(n: usize, class: PhantomClass, seed: u64) -> GrayImage {
    let mut r = SplitMix64::new(seed ^ 0x9e3779b97f4a7c15);
    let c = n as f64 / 2.0;
    let disc_x = c + r.uniform(-0.10, 0.10) * n as f64;
    let disc_y = c + r.uniform(-0.10, 0.10) * n as f64;
    let disc_r = n as f64 / r.uniform(4.5, 5.5);

    // Classes differ in spatial scale at matched first-order mass: the
    // glaucoma analog has more but thinner vessels and a wider but fainter
    // pale cup, so histograms look alike and the signal lives in geometry.
    let (vessel_count, vessel_w, cup_ratio) = match class {
        PhantomClass::Normal => (3, r.uniform(3.2, 4.4), r.uniform(0.22, 0.40)),
        PhantomClass::Glaucoma => (6, r.uniform(1.5, 2.2), r.uniform(0.60, 0.88)),
    };
    let cup_pale = r.uniform(1.8, 2.6) / (cup_ratio * cup_ratio);
    let vessels: Vec<(f64, f64, f64)> = (0..vessel_count)
        .map(|_| (r.uniform(0.10, 0.30), r.uniform(0.0, std::f64::consts::TAU), c + r.uniform(-0.3, 0.3) * n as f64))
        .collect();

    // Shared two-scale tissue texture; identical parameter ranges for
    // both classes. Coherent structure survives the denoiser, unlike the
    // pixel noise below.
    let amp = r.uniform(5.0, 9.0);
    let freq = r.uniform(0.5, 0.9);
    let amp2 = r.uniform(3.0, 6.0);
    let freq2 = r.uniform(0.15, 0.3);
    let theta = r.uniform(0.0, std::f64::consts::PI);
    let (ct, st) = (theta.cos(), theta.sin());

    // Quality veil shared by both classes; the wide per-image spread in
    // gain, offset, acquisition gamma and noise mimics acquisition
    // variability, which is exactly what the preprocessing and
    // enhancement stages normalize away.
    let gain = r.uniform(0.30, 0.55);
    let offset = r.uniform(30.0, 95.0);
    let gamma = r.uniform(0.45, 1.15);
    let blur = r.uniform(0.2, 1.4);
    let noise = r.uniform(5.0, 10.0);

    let cup_r = disc_r * cup_ratio;
    let mut clean = crate::raster::RealImage::new(n, n, 0.0);
    for y in 0..n {
        for x in 0..n {
            let dx = x as f64 - disc_x;
            let dy = y as f64 - disc_y;
            let d2 = dx * dx + dy * dy;
            let mut v = 70.0 + 55.0 * (-d2 / (2.0 * disc_r * disc_r)).exp();
            let vr = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt() / (c * 1.5);
            v *= 1.0 - 0.25 * vr * vr;
            // Pale cup inside the disc.
            if d2.sqrt() < cup_r {
                v += cup_pale * (1.0 - d2.sqrt() / cup_r);
            }
            for &(f, ph, base) in &vessels {
                let cyv = base + (x as f64 * f + ph).sin() * (n as f64 / 4.0);
                let dist = (y as f64 - cyv).abs();
                if dist < vessel_w {
                    v -= 32.0 * (1.0 - dist / vessel_w);
                }
            }
            let u = ct * x as f64 + st * y as f64;
            let w = -st * x as f64 + ct * y as f64;
            v += amp * (freq * u).sin() * (0.5 * freq * w).cos();
            v += amp2 * (freq2 * u + 1.3).cos() * (freq2 * w).sin();
            clean.set(x, y, v);
        }
    }
    // Per-image defocus, then sensor veil, noise and acquisition gamma.
    let blurred = gaussian_blur(&clean, blur);
    let mut img = GrayImage::new(n, n, 0);
    for y in 0..n {
        for x in 0..n {
            let mut v = offset + gain * blurred.get(x, y) + noise * r.uniform(-1.0, 1.0);
            v = 255.0 * (v.clamp(0.0, 255.0) / 255.0).powf(gamma);
            img.set(x, y, v.round().clamp(0.0, 255.0) as u8);
        }
    }
    img
}

/// Small separable Gaussian blur with clamped borders; sigma 0 is the
/// identity.
fn gaussian_blur(img: &crate::raster::RealImage, sigma: f64) -> crate::raster::RealImage {
    if sigma <= 1e-9 {
        return img.clone();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-0.5 * (i as f64 / sigma).powi(2)).exp())
        .collect();
    let norm: f64 = taps.iter().sum();
    let (w, h) = (img.width(), img.height());
    let mut tmp = crate::raster::RealImage::new(w, h, 0.0);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for (i, &t) in taps.iter().enumerate() {
                acc += t * img.get_clamped(x + i as isize - radius, y);
            }
            tmp.set(x as usize, y as usize, acc / norm);
        }
    }
    let mut out = crate::raster::RealImage::new(w, h, 0.0);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for (i, &t) in taps.iter().enumerate() {
                acc += t * tmp.get_clamped(x, y + i as isize - radius);
            }
            out.set(x as usize, y as usize, acc / norm);
        }
    }
    out
}
