//! Small numerical kernels shared by the curve, spectral and projection code.
//!
//! Everything here works on uniform periodic grids over `[0, 2π)`, where the
//! composite trapezoid rule is spectrally accurate and where Fourier
//! differentiation is exact for band-limited data.

use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Uniform grid `2πj/n`, `j = 0..n`.
pub fn periodic_grid(n: usize) -> Vec<f64> {
    let h = TAU / n as f64;
    (0..n).map(|j| j as f64 * h).collect()
}

/// Trapezoid rule for a periodic integrand sampled on [`periodic_grid`].
pub fn periodic_trapezoid(samples: &[f64]) -> f64 {
    let h = TAU / samples.len() as f64;
    h * samples.iter().sum::<f64>()
}

/// Trapezoid rule for the product of two periodic sample vectors.
pub fn periodic_inner(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let h = TAU / a.len() as f64;
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Bisection on a bracket with a sign change. Runs until the bracket is below
/// `tol` or stops shrinking in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change roots of a `2π`-periodic function on `[0, 2π)`.
///
/// The function is scanned on an `n`-point uniform grid; every sign change is
/// polished by bisection. Grid samples whose magnitude is at most
/// `zero_tol · max|f|` are treated as zeros. Roots are returned sorted.
pub fn periodic_sign_roots<F: Fn(f64) -> f64>(f: F, n: usize, zero_tol: f64) -> Vec<f64> {
    let grid = periodic_grid(n);
    let h = TAU / n as f64;
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let tol = zero_tol * scale;
    let is_zero = |v: f64| v.abs() <= tol;
    let mut roots = Vec::new();
    for j in 0..n {
        let a = values[j];
        let b = values[(j + 1) % n];
        let t = grid[j];
        if is_zero(a) {
            let prev = values[(j + n - 1) % n];
            if !is_zero(prev) && !is_zero(b) && prev * b < 0.0 {
                roots.push(bisect(&f, t - h, t + h, 1e-15));
            } else {
                roots.push(t);
            }
        } else if !is_zero(b) && a * b < 0.0 {
            roots.push(bisect(&f, t, t + h, 1e-15));
        }
    }
    let mut wrapped: Vec<f64> = roots.into_iter().map(|r| r.rem_euclid(TAU)).collect();
    wrapped.sort_by(f64::total_cmp);
    wrapped.dedup_by(|a, b| (*a - *b).abs() < 1e-11);
    if wrapped.len() > 1 && (wrapped[0] + TAU - wrapped[wrapped.len() - 1]) < 1e-11 {
        wrapped.pop();
    }
    wrapped
}

/// Real Fourier coefficients of periodic samples.
///
/// `samples[j] ≈ a[0] + Σ_{k≥1} (a[k] cos k s_j + b[k] sin k s_j)`, with
/// `k < n/2` (the Nyquist mode is dropped).
#[derive(Debug, Clone)]
pub struct TrigSeries {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let spectrum = forward_fft(samples);
        let kmax = (n - 1) / 2;
        let inv = 1.0 / n as f64;
        let mut cos = Vec::with_capacity(kmax + 1);
        let mut sin = Vec::with_capacity(kmax + 1);
        cos.push(spectrum[0].re * inv);
        sin.push(0.0);
        for z in spectrum.iter().take(kmax + 1).skip(1) {
            cos.push(2.0 * z.re * inv);
            sin.push(-2.0 * z.im * inv);
        }
        Self { cos, sin }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mut acc = self.cos[0];
        for k in 1..self.cos.len() {
            let (sk, ck) = (k as f64 * s).sin_cos();
            acc += self.cos[k] * ck + self.sin[k] * sk;
        }
        acc
    }
}

fn forward_fft(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    buf
}

/// Spectral derivative of periodic samples on [`periodic_grid`].
pub fn spectral_derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut spectrum = forward_fft(samples);
    for (k, z) in spectrum.iter_mut().enumerate() {
        let wave = if 2 * k < n {
            k as f64
        } else if 2 * k > n {
            k as f64 - n as f64
        } else {
            0.0
        };
        *z = Complex64::new(-wave * z.im, wave * z.re);
    }
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    ifft.process(&mut spectrum);
    let inv = 1.0 / n as f64;
    spectrum.iter().map(|z| z.re * inv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_low_harmonics() {
        let grid = periodic_grid(64);
        let s: Vec<f64> = grid.iter().map(|t| (3.0 * t).cos().powi(2)).collect();
        assert!((periodic_trapezoid(&s) - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn derivative_of_sinusoid() {
        let grid = periodic_grid(128);
        let s: Vec<f64> = grid.iter().map(|t| (5.0 * t).sin() + 0.3 * (2.0 * t).cos()).collect();
        let d = spectral_derivative(&s);
        for (t, v) in grid.iter().zip(&d) {
            let exact = 5.0 * (5.0 * t).cos() - 0.6 * (2.0 * t).sin();
            assert!((v - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn trig_series_reproduces_samples() {
        let grid = periodic_grid(33);
        let s: Vec<f64> = grid.iter().map(|t| 1.5 + t.sin() - 0.25 * (4.0 * t).cos()).collect();
        let series = TrigSeries::from_samples(&s);
        assert!((series.cos[0] - 1.5).abs() < 1e-14);
        assert!((series.sin[1] - 1.0).abs() < 1e-14);
        assert!((series.cos[4] + 0.25).abs() < 1e-14);
        assert!((series.eval(0.123) - (1.5 + 0.123f64.sin() - 0.25 * 0.492f64.cos())).abs() < 1e-13);
    }

    #[test]
    fn roots_on_and_off_grid() {
        // zeros of sin 3t sit at kπ/3; only some land on a 512 grid
        let roots = periodic_sign_roots(|t| (3.0 * t).sin(), 512, 1e-13);
        assert_eq!(roots.len(), 6);
        for (k, r) in roots.iter().enumerate() {
            assert!((r - k as f64 * std::f64::consts::PI / 3.0).abs() < 1e-12, "{k} {r}");
        }
    }
}
