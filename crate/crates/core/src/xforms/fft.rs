//! Complex FFT used by the directional filter bank and the bispectrum
//! estimator. Radix-2 for power-of-two lengths, Bluestein's chirp-z
//! otherwise.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Forward DFT, in place: `X[k] = sum_n x[n] exp(-2 pi i k n / N)`.
pub fn fft(data: &mut [Complex64]) {
    transform(data, false);
}

/// Inverse DFT, in place, scaled by 1/N.
pub fn ifft(data: &mut [Complex64]) {
    transform(data, true);
    let n = data.len() as f64;
    for v in data.iter_mut() {
        *v /= n;
    }
}

fn transform(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_pow2(data, inverse);
    } else {
        bluestein(data, inverse);
    }
}

fn fft_pow2(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for i in 0..len / 2 {
                let u = data[start + i];
                let v = data[start + i + len / 2] * w;
                data[start + i] = u + v;
                data[start + i + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

/// Arbitrary-length DFT via the chirp-z trick: x[n] -> a[n] = x[n] w^(n^2/2)
/// convolved with the conjugate chirp, evaluated with a power-of-two FFT.
fn bluestein(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = if inverse { 1.0 } else { -1.0 };

    // chirp[k] = exp(sign * pi i k^2 / n); use k^2 mod 2n to keep the
    // angle argument small and exact.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let sq = (k as u64 * k as u64) % (2 * n as u64);
            let ang = sign * PI * sq as f64 / n as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = data[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        let c = chirp[k].conj();
        b[k] = c;
        b[m - k] = c;
    }

    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    fft_pow2(&mut a, true);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * chirp[k] * scale;
    }
}

/// 2-D forward DFT of a row-major buffer, in place.
pub fn fft2(data: &mut [Complex64], width: usize, height: usize) {
    transform2(data, width, height, false);
}

/// 2-D inverse DFT, in place, scaled by 1/(W*H).
pub fn ifft2(data: &mut [Complex64], width: usize, height: usize) {
    transform2(data, width, height, true);
}

fn transform2(data: &mut [Complex64], width: usize, height: usize, inverse: bool) {
    assert_eq!(data.len(), width * height);
    for row in data.chunks_mut(width) {
        if inverse {
            ifft(row);
        } else {
            fft(row);
        }
    }
    let mut col = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            col[y] = data[y * width + x];
        }
        if inverse {
            ifft(&mut col);
        } else {
            fft(&mut col);
        }
        for y in 0..height {
            data[y * width + x] = col[y];
        }
    }
}
