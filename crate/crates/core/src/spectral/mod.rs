//! Ground state of `H = −d²/ds² + κ²(s)` on `[0, 2π)` with periodic boundary
//! conditions.
//!
//! The operator is discretized by Galerkin projection onto the real
//! trigonometric basis `{1, √2 cos ks, √2 sin ks : 1 ≤ k ≤ M}`, orthonormal
//! for the mean inner product `⟨u, v⟩ = (1/2π)∫uv`. The potential enters
//! through its Fourier coefficients, so the matrix has the usual
//! Toeplitz-plus-Hankel structure of a multiplication operator.

pub mod reference;

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::curve::{CurveError, SampledCurve};
use crate::numeric::{periodic_inner, periodic_trapezoid, spectral_derivative, TrigSeries};

pub const DEFAULT_MODES: usize = 256;
pub const DEFAULT_RTOL: f64 = 1e-9;
/// Basis size of the dense solve that seeds inverse iteration.
const BASE_MODES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("n_modes = {n_modes} is below the required {required} (4 × highest harmonic)")]
    InsufficientModes { n_modes: usize, required: usize },
    #[error("eigenvalue not converged: λ({coarse_modes}) = {coarse}, λ({fine_modes}) = {fine}")]
    ConvergenceFailure {
        coarse_modes: usize,
        fine_modes: usize,
        coarse: f64,
        fine: f64,
    },
    #[error("test function vanishes identically")]
    ZeroFunction,
    #[error("expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("ground state changes sign (min ψ = {min_psi:e})")]
    SignIndefinite { min_psi: f64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Lowest eigenpair of `H_Γ`.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub lambda: f64,
    /// `ψ` on the curve's arc-length grid, normalized to `∫ψ² ds = 1`,
    /// with `mean(ψ) > 0`.
    pub psi: Vec<f64>,
    pub n_modes: usize,
    /// `‖Hψ − λψ‖ / ‖ψ‖` on the quadrature grid.
    pub residual: f64,
    /// `λ` from the doubled basis used for the convergence check.
    pub lambda_refined: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl SpectralSolution {
    /// Evaluates the Galerkin expansion of `ψ` at an arbitrary `s`.
    pub fn psi_at(&self, s: f64) -> f64 {
        let mut acc = self.cos[0];
        for k in 1..self.cos.len() {
            let (sk, ck) = (k as f64 * s).sin_cos();
            acc += self.cos[k] * ck + self.sin[k] * sk;
        }
        acc
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub n_modes: usize,
    pub rtol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            n_modes: DEFAULT_MODES,
            rtol: DEFAULT_RTOL,
        }
    }
}

pub fn ground_state(curve: &SampledCurve, n_modes: usize) -> Result<SpectralSolution, SpectralError> {
    ground_state_with(
        curve,
        SpectralOptions {
            n_modes,
            ..SpectralOptions::default()
        },
    )
}

pub fn ground_state_with(
    curve: &SampledCurve,
    opts: SpectralOptions,
) -> Result<SpectralSolution, SpectralError> {
    let m = opts.n_modes;
    let required = 4 * curve.source().max_index();
    if m < required {
        return Err(SpectralError::InsufficientModes {
            n_modes: m,
            required,
        });
    }
    let fine = potential_series(curve, 2 * m)?;

    // a small dense solve seeds inverse iteration on the full basis
    let base = m.min(BASE_MODES);
    let (mut lambda, mut vector) = lowest_eigenpair(&galerkin_matrix(&fine, base));
    if base < m {
        (lambda, vector) = inverse_iteration(&galerkin_matrix(&fine, m), lambda, &vector);
    }
    let lambda_refined = inverse_iteration(&galerkin_matrix(&fine, 2 * m), lambda, &vector).0;
    if (lambda - lambda_refined).abs() > opts.rtol * lambda.abs().max(1.0) {
        return Err(SpectralError::ConvergenceFailure {
            coarse_modes: m,
            fine_modes: 2 * m,
            coarse: lambda,
            fine: lambda_refined,
        });
    }

    // basis vector [e0, c1, s1, ...] → cosine/sine amplitudes
    let sign = if vector[0] < 0.0 { -1.0 } else { 1.0 };
    let norm = (TAU * vector.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let mut cos = vec![sign * vector[0] / norm];
    let mut sin = vec![0.0];
    for k in 1..=m {
        cos.push(sign * std::f64::consts::SQRT_2 * vector[2 * k - 1] / norm);
        sin.push(sign * std::f64::consts::SQRT_2 * vector[2 * k] / norm);
    }

    let psi: Vec<f64> = curve.s_grid.iter().map(|&s| eval(&cos, &sin, s)).collect();
    let min_psi = psi.iter().copied().fold(f64::INFINITY, f64::min);
    if min_psi <= 0.0 {
        return Err(SpectralError::SignIndefinite { min_psi });
    }
    let residual = residual(curve, &cos, &sin, lambda);
    Ok(SpectralSolution {
        lambda,
        psi,
        n_modes: m,
        residual,
        lambda_refined,
        cos,
        sin,
    })
}

fn eval(cos: &[f64], sin: &[f64], s: f64) -> f64 {
    let mut acc = cos[0];
    for k in 1..cos.len() {
        let (sk, ck) = (k as f64 * s).sin_cos();
        acc += cos[k] * ck + sin[k] * sk;
    }
    acc
}

/// Fourier coefficients of `κ²` up to index `2·max_modes`, resampling the
/// curve when its grid is too coarse to resolve them without aliasing.
fn potential_series(curve: &SampledCurve, max_modes: usize) -> Result<TrigSeries, SpectralError> {
    let needed = (8 * max_modes).next_power_of_two();
    let series = if curve.n_points >= needed {
        TrigSeries::from_samples(&curve.potential())
    } else {
        TrigSeries::from_samples(&curve.source().invert_phi(needed)?.potential())
    };
    Ok(series)
}

/// Real symmetric Galerkin matrix of `H` on `2m + 1` trigonometric modes.
fn galerkin_matrix(v: &TrigSeries, m: usize) -> DMatrix<f64> {
    // mean(V cos js) and mean(V sin js), extended to negative j
    let a = |j: i64| -> f64 {
        let j = j.unsigned_abs() as usize;
        if j == 0 {
            v.cos[0]
        } else {
            0.5 * v.cos.get(j).copied().unwrap_or(0.0)
        }
    };
    let b = |j: i64| -> f64 {
        let s = j.signum() as f64;
        let j = j.unsigned_abs() as usize;
        if j == 0 {
            0.0
        } else {
            0.5 * s * v.sin.get(j).copied().unwrap_or(0.0)
        }
    };
    let size = 2 * m + 1;
    let r2 = std::f64::consts::SQRT_2;
    let mut h = DMatrix::<f64>::zeros(size, size);
    h[(0, 0)] = a(0);
    for l in 1..=m as i64 {
        let (cl, sl) = (2 * l as usize - 1, 2 * l as usize);
        h[(0, cl)] = r2 * a(l);
        h[(cl, 0)] = h[(0, cl)];
        h[(0, sl)] = r2 * b(l);
        h[(sl, 0)] = h[(0, sl)];
    }
    for k in 1..=m as i64 {
        let (ck, sk) = (2 * k as usize - 1, 2 * k as usize);
        for l in k..=m as i64 {
            let (cl, sl) = (2 * l as usize - 1, 2 * l as usize);
            let cc = a(k - l) + a(k + l);
            let ss = a(k - l) - a(k + l);
            let cs = b(l + k) + b(l - k);
            let sc = b(k + l) + b(k - l);
            h[(ck, cl)] = cc;
            h[(cl, ck)] = cc;
            h[(sk, sl)] = ss;
            h[(sl, sk)] = ss;
            h[(ck, sl)] = cs;
            h[(sl, ck)] = cs;
            h[(sk, cl)] = sc;
            h[(cl, sk)] = sc;
        }
        let kin = (k * k) as f64;
        h[(ck, ck)] += kin;
        h[(sk, sk)] += kin;
    }
    h
}

fn lowest_eigenpair(h: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty spectrum");
    (lambda, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Lowest eigenpair of `h` by shifted inverse iteration, given an upper
/// bound `upper ≥ λ₀` and a start vector padded with zeros. The Cholesky
/// factorization succeeding certifies that the shift lies below the whole
/// spectrum, so the iteration cannot lock onto a higher eigenvalue.
fn inverse_iteration(h: &DMatrix<f64>, upper: f64, start: &[f64]) -> (f64, Vec<f64>) {
    let n = h.nrows();
    let shift = upper - 1e-3 * upper.abs().max(1.0);
    let mut shifted = h.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let Some(chol) = shifted.cholesky() else {
        return lowest_eigenpair(h);
    };
    let mut x = DVector::from_iterator(n, start.iter().copied().chain(std::iter::repeat(0.0)).take(n));
    x.normalize_mut();
    for _ in 0..100 {
        let mut next = chol.solve(&x);
        next.normalize_mut();
        let step = (&next - &x).amax();
        x = next;
        if step <= 1e-14 {
            break;
        }
    }
    (x.dot(&(h * &x)), x.iter().copied().collect())
}

fn residual(curve: &SampledCurve, cos: &[f64], sin: &[f64], lambda: f64) -> f64 {
    let n = (8 * cos.len()).next_power_of_two().max(curve.n_points);
    let sampled;
    let fine = if n == curve.n_points {
        curve
    } else {
        match curve.source().invert_phi(n) {
            Ok(c) => {
                sampled = c;
                &sampled
            }
            Err(_) => return f64::NAN,
        }
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, &s) in fine.s_grid.iter().enumerate() {
        let mut psi = cos[0];
        let mut minus_psi2 = 0.0;
        for k in 1..cos.len() {
            let kf = k as f64;
            let (sk, ck) = (kf * s).sin_cos();
            let term = cos[k] * ck + sin[k] * sk;
            psi += term;
            minus_psi2 += kf * kf * term;
        }
        let k2 = fine.kappa[j] * fine.kappa[j];
        let r = minus_psi2 + k2 * psi - lambda * psi;
        num += r * r;
        den += psi * psi;
    }
    (num / den).sqrt()
}

/// `(∫ψ'² + κ²ψ² ds) / ∫ψ² ds` with spectral differentiation of `ψ`.
pub fn rayleigh_quotient(curve: &SampledCurve, psi: &[f64]) -> Result<f64, SpectralError> {
    if psi.len() != curve.n_points {
        return Err(SpectralError::LengthMismatch {
            expected: curve.n_points,
            actual: psi.len(),
        });
    }
    let mass = periodic_inner(psi, psi);
    if !(mass > 0.0) {
        return Err(SpectralError::ZeroFunction);
    }
    let dpsi = spectral_derivative(psi);
    let integrand: Vec<f64> = dpsi
        .iter()
        .zip(psi.iter().zip(&curve.kappa))
        .map(|(d, (p, k))| d * d + k * k * p * p)
        .collect();
    Ok(periodic_trapezoid(&integrand) / mass)
}
