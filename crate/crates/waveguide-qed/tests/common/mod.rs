//! Helpers shared by the integration test binaries.
#![allow(dead_code)]

use waveguide_qed::pulse::{PulseEnvelope, PulseShape};

/// Least-squares line fit; returns `(slope, intercept)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Least-squares quadratic fit; returns `(c0, c1, c2)` for
/// `y = c0 + c1 x + c2 x^2`, solved from the normal equations.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 3);
    let mut s = [0.0f64; 5];
    let mut b = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut p = 1.0;
        for (k, slot) in s.iter_mut().enumerate() {
            *slot += p;
            if k < 3 {
                b[k] += p * y;
            }
            p *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    assert!(d.abs() > 1e-300, "singular quadratic fit");
    let mut coeffs = [0.0f64; 3];
    for (k, coeff) in coeffs.iter_mut().enumerate() {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = b[row];
        }
        *coeff = det(&mk) / d;
    }
    (coeffs[0], coeffs[1], coeffs[2])
}

/// Unit-norm Gaussian envelope resolved against `gamma` at the default
/// grid density.
pub fn gaussian_env(tau: f64, gamma: f64) -> PulseEnvelope {
    PulseEnvelope::from_shape(&PulseShape::gaussian(0.0, tau), gamma)
        .unwrap()
        .normalized()
        .unwrap()
}

/// Like [`gaussian_env`] with an explicit grid density.
pub fn gaussian_env_resolved(tau: f64, gamma: f64, points_per_scale: usize) -> PulseEnvelope {
    PulseEnvelope::from_shape_resolved(&PulseShape::gaussian(0.0, tau), gamma, points_per_scale)
        .unwrap()
        .normalized()
        .unwrap()
}

/// Gaussian time scale that realizes a target bandwidth over decay
/// rate ratio: the bandwidth of a Gaussian is `1 / (sqrt(2) tau)`.
pub fn tau_for_bandwidth_ratio(ratio: f64, gamma: f64) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * ratio * gamma)
}
