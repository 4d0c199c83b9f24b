//! Scalar statistics shared by the feature extractors.
//!
//! Degenerate inputs follow one crate-wide rule: moment ratios
//! (skewness, kurtosis) of a zero-variance sample are 0, and the entropy
//! of a single-bin histogram is 0, so every feature stays finite.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

pub fn rms(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (xs.iter().map(|&x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}

fn central_moment(xs: &[f64], k: u32) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m).powi(k as i32)).sum::<f64>() / xs.len() as f64
}

/// m3 / m2^1.5; zero-variance samples give 0.
pub fn skewness(xs: &[f64]) -> f64 {
    let m2 = central_moment(xs, 2);
    if m2 <= 0.0 {
        return 0.0;
    }
    central_moment(xs, 3) / m2.powf(1.5)
}

/// Raw m4 / m2^2 (a normal sample tends to 3); zero-variance samples give 0.
pub fn kurtosis(xs: &[f64]) -> f64 {
    let m2 = central_moment(xs, 2);
    if m2 <= 0.0 {
        return 0.0;
    }
    central_moment(xs, 4) / (m2 * m2)
}

/// Shannon entropy in bits of the histogram of `xs` over [lo, hi] with the
/// given bin count. Values outside the range clamp into the edge bins.
pub fn histogram_entropy_bits(xs: &[f64], lo: f64, hi: f64, bins: usize) -> f64 {
    if xs.is_empty() || bins == 0 || !(hi > lo) {
        return 0.0;
    }
    let mut counts = vec![0u64; bins];
    let scale = bins as f64 / (hi - lo);
    for &x in xs {
        let idx = (((x - lo) * scale) as isize).clamp(0, bins as isize - 1) as usize;
        counts[idx] += 1;
    }
    let n = xs.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Shannon entropy in bits of an already-normalized probability vector.
/// Zero entries contribute nothing.
pub fn entropy_bits(ps: &[f64]) -> f64 {
    ps.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Linear-interpolation quantile (the numpy default) of an unsorted slice;
/// q in [0, 1], q = 1 is the maximum.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}
