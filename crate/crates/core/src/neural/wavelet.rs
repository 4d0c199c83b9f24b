//! Mother wavelet activations and their derivatives.
//!
//! Functional forms:
//!   Mexican hat  (1 - x^2) exp(-x^2/2)
//!   Morlet       cos(5x) exp(-x^2/2)
//!   Gaussian     -x exp(-x^2/2)          (first derivative of the bell)
//!   GGW          x^3 exp(-x^4/4)         (derivative of a generalized
//!                                         Gaussian bell with shape 4)
//!   Shannon      sinc(x/2) cos(3 pi x / 2), sinc(t) = sin(pi t)/(pi t)
//!   Haar         1 on [0, 1/2), -1 on [1/2, 1), 0 elsewhere
//!   Meyer        evaluated from its band-limited spectrum by fixed
//!                Gauss-Legendre quadrature (smooth to machine precision,
//!                so analytic and numeric derivatives agree)

use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletKind {
    MexicanHat,
    Morlet,
    Gaussian,
    Meyer,
    Ggw,
    Shannon,
    Haar,
}

impl WaveletKind {
    pub const ALL: [WaveletKind; 7] = [
        WaveletKind::MexicanHat,
        WaveletKind::Morlet,
        WaveletKind::Gaussian,
        WaveletKind::Meyer,
        WaveletKind::Ggw,
        WaveletKind::Shannon,
        WaveletKind::Haar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            WaveletKind::MexicanHat => "mexican_hat",
            WaveletKind::Morlet => "morlet",
            WaveletKind::Gaussian => "gaussian",
            WaveletKind::Meyer => "meyer",
            WaveletKind::Ggw => "ggw",
            WaveletKind::Shannon => "shannon",
            WaveletKind::Haar => "haar",
        }
    }

    pub fn parse(s: &str) -> Option<WaveletKind> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }
}

/// Evaluate the mother wavelet at x.
pub fn mother_wavelet(kind: WaveletKind, x: f64) -> f64 {
    match kind {
        WaveletKind::MexicanHat => (1.0 - x * x) * (-0.5 * x * x).exp(),
        WaveletKind::Morlet => (5.0 * x).cos() * (-0.5 * x * x).exp(),
        WaveletKind::Gaussian => -x * (-0.5 * x * x).exp(),
        WaveletKind::Ggw => x * x * x * (-0.25 * x.powi(4)).exp(),
        WaveletKind::Shannon => sinc(0.5 * x) * (1.5 * PI * x).cos(),
        WaveletKind::Haar => {
            if (0.0..0.5).contains(&x) {
                1.0
            } else if (0.5..1.0).contains(&x) {
                -1.0
            } else {
                0.0
            }
        }
        WaveletKind::Meyer => meyer(x).0,
    }
}

/// d/dx of the mother wavelet.
pub fn mother_wavelet_deriv(kind: WaveletKind, x: f64) -> f64 {
    match kind {
        WaveletKind::MexicanHat => (x * x * x - 3.0 * x) * (-0.5 * x * x).exp(),
        WaveletKind::Morlet => {
            (-5.0 * (5.0 * x).sin() - x * (5.0 * x).cos()) * (-0.5 * x * x).exp()
        }
        WaveletKind::Gaussian => (x * x - 1.0) * (-0.5 * x * x).exp(),
        WaveletKind::Ggw => (3.0 * x * x - x.powi(6)) * (-0.25 * x.powi(4)).exp(),
        WaveletKind::Shannon => {
            0.5 * dsinc(0.5 * x) * (1.5 * PI * x).cos()
                - sinc(0.5 * x) * 1.5 * PI * (1.5 * PI * x).sin()
        }
        WaveletKind::Haar => 0.0,
        WaveletKind::Meyer => meyer(x).1,
    }
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let pt = PI * t;
        1.0 - pt * pt / 6.0 + pt.powi(4) / 120.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

fn dsinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let p2 = PI * PI;
        -p2 * t / 3.0 + p2 * p2 * t * t * t / 30.0
    } else {
        ((PI * t).cos() - sinc(t)) / t
    }
}

// --- Meyer ------------------------------------------------------------

/// Smooth transition polynomial nu(x) = x^4 (35 - 84x + 70x^2 - 20x^3).
fn nu(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x.powi(4) * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
    }
}

const GL_NODES: usize = 96;

/// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n = GL_NODES;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let pk =
                        ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    })
}

/// Frequency-domain spectrum samples of the two Meyer bands, cached as
/// (omega, weight * amplitude) pairs.
fn meyer_bands() -> &'static Vec<(f64, f64)> {
    static CACHE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let (nodes, weights) = gauss_legendre();
        let mut out = Vec::with_capacity(2 * GL_NODES);
        let band = |a: f64, b: f64, amp: &dyn Fn(f64) -> f64, out: &mut Vec<(f64, f64)>| {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (&x, &w) in nodes.iter().zip(weights) {
                let omega = mid + half * x;
                out.push((omega, half * w * amp(omega)));
            }
        };
        band(
            2.0 * PI / 3.0,
            4.0 * PI / 3.0,
            &|w| (0.5 * PI * nu(3.0 * w / (2.0 * PI) - 1.0)).sin(),
            &mut out,
        );
        band(
            4.0 * PI / 3.0,
            8.0 * PI / 3.0,
            &|w| (0.5 * PI * nu(3.0 * w / (4.0 * PI) - 1.0)).cos(),
            &mut out,
        );
        out
    })
}

/// (psi, psi') of the Meyer wavelet, symmetric about t = 1/2.
fn meyer(t: f64) -> (f64, f64) {
    let u = t - 0.5;
    // The wavelet decays polynomially; beyond the quadrature's reliable
    // oscillation range both the value and slope are negligible.
    if u.abs() > 60.0 {
        return (0.0, 0.0);
    }
    let mut value = 0.0;
    let mut deriv = 0.0;
    for &(omega, wa) in meyer_bands() {
        let (s, c) = (omega * u).sin_cos();
        value += wa * c;
        deriv -= wa * omega * s;
    }
    (value / PI, deriv / PI)
}
