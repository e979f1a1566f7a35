//! Closed strictly convex curves of length `2π`, described through the Fourier
//! series of the derivative of the inverse tangent angle,
//!
//! ```text
//! (φ⁻¹)'(t) = 1 + Σ_{n≥2} n·a_n·cos(nt) − n·b_n·sin(nt)
//! φ⁻¹(t)    = C + t + Σ_{n≥2} a_n·sin(nt) + b_n·cos(nt)
//! ```
//!
//! The constant term is pinned to 1 (length `2π`, winding once) and the first
//! harmonic is absent, which is exactly the closure condition. `C` is chosen
//! so that `φ(0) = 0`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{periodic_grid, periodic_sign_roots, periodic_trapezoid};

/// Default convexity margin for `(φ⁻¹)'`.
pub const DEFAULT_EPS_CONVEX: f64 = 1e-3;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("coefficient index {index} is not allowed (indices must satisfy 2 <= n <= {max_index})")]
    InvalidIndex { index: usize, max_index: usize },
    #[error("coefficient for index {index} is not finite")]
    NonFinite { index: usize },
    #[error("curve rejected: min (φ⁻¹)' = {min_value:.6e} at t = {argmin_t:.6} is below the convexity margin")]
    RejectedCurve { min_value: f64, argmin_t: f64 },
    #[error("(φ⁻¹)' = {value:.3e} <= 0 at t = {t:.6} during inversion")]
    NonMonotone { t: f64, value: f64 },
    #[error("inversion did not reach tolerance {tol:e} within {iters} iterations")]
    NoConvergence { tol: f64, iters: usize },
    #[error("the anti-periodic profile f vanishes identically; every angle is critical")]
    DegenerateProfile,
    #[error("no valid curve after {0} random draws")]
    ExhaustedRejection(usize),
    #[error("invalid curve file: {0}")]
    Parse(String),
}

/// Curve described by its Fourier coefficients. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    max_index: usize,
    a: BTreeMap<usize, f64>,
    b: BTreeMap<usize, f64>,
    c_offset: f64,
}

impl FourierCurve {
    pub fn circle() -> Self {
        Self {
            max_index: 2,
            a: BTreeMap::new(),
            b: BTreeMap::new(),
            c_offset: 0.0,
        }
    }

    /// Builds a curve from sine (`a`) and cosine (`b`) coefficient maps.
    pub fn new(
        max_index: usize,
        a: BTreeMap<usize, f64>,
        b: BTreeMap<usize, f64>,
    ) -> Result<Self, CurveError> {
        let max_index = max_index.max(2);
        for (&n, &v) in a.iter().chain(b.iter()) {
            if n < 2 || n > max_index {
                return Err(CurveError::InvalidIndex { index: n, max_index });
            }
            if !v.is_finite() {
                return Err(CurveError::NonFinite { index: n });
            }
        }
        // φ⁻¹(0) = C + Σ b_n must vanish for φ(0) = 0
        let c_offset = -b.values().sum::<f64>();
        Ok(Self {
            max_index,
            a,
            b,
            c_offset,
        })
    }

    /// Convenience constructor; `max_index` is the largest index present.
    pub fn from_coefficients(a: &[(usize, f64)], b: &[(usize, f64)]) -> Result<Self, CurveError> {
        let max_index = a.iter().chain(b).map(|&(n, _)| n).max().unwrap_or(2);
        Self::new(max_index, a.iter().copied().collect(), b.iter().copied().collect())
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn a(&self) -> &BTreeMap<usize, f64> {
        &self.a
    }

    pub fn b(&self) -> &BTreeMap<usize, f64> {
        &self.b
    }

    pub fn c_offset(&self) -> f64 {
        self.c_offset
    }

    pub fn coefficient(&self, n: usize) -> (f64, f64) {
        (
            self.a.get(&n).copied().unwrap_or(0.0),
            self.b.get(&n).copied().unwrap_or(0.0),
        )
    }

    /// `(n, a_n, b_n)` for every index carrying a coefficient.
    pub fn harmonics(&self) -> Vec<(usize, f64, f64)> {
        let mut idx: Vec<usize> = self.a.keys().chain(self.b.keys()).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter()
            .map(|n| {
                let (a, b) = self.coefficient(n);
                (n, a, b)
            })
            .collect()
    }

    /// `φ⁻¹(t)`.
    pub fn phi_inverse(&self, t: f64) -> f64 {
        let mut acc = self.c_offset + t;
        for (n, a, b) in self.harmonics() {
            let (s, c) = (n as f64 * t).sin_cos();
            acc += a * s + b * c;
        }
        acc
    }

    /// `(φ⁻¹)'(t)`, i.e. the radius of curvature at tangent angle `t`.
    pub fn phi_inverse_derivative(&self, t: f64) -> f64 {
        let mut acc = 1.0;
        for (n, a, b) in self.harmonics() {
            let nf = n as f64;
            let (s, c) = (nf * t).sin_cos();
            acc += nf * (a * c - b * s);
        }
        acc
    }

    /// Dense scan size used for validation and zero finding.
    pub fn scan_points(&self) -> usize {
        (16 * self.max_index).max(512)
    }

    /// Checks strict convexity `(φ⁻¹)' >= eps_convex` on a dense grid.
    pub fn validate(&self, eps_convex: f64) -> Result<ValidationReport, CurveError> {
        let n = self.scan_points();
        let grid = periodic_grid(n);
        let h = TAU / n as f64;
        let (mut jmin, mut vmin) = (0, f64::INFINITY);
        for (j, &t) in grid.iter().enumerate() {
            let v = self.phi_inverse_derivative(t);
            if v < vmin {
                vmin = v;
                jmin = j;
            }
        }
        // golden-section polish inside the neighbouring cells
        let (t_min, v_min) = golden_min(
            |t| self.phi_inverse_derivative(t),
            grid[jmin] - h,
            grid[jmin] + h,
        );
        let (argmin_t, min_value) = if v_min < vmin {
            (t_min.rem_euclid(TAU), v_min)
        } else {
            (grid[jmin], vmin)
        };
        if min_value < eps_convex {
            return Err(CurveError::RejectedCurve { min_value, argmin_t });
        }
        Ok(ValidationReport {
            min_derivative: min_value,
            argmin_t,
            grid_points: n,
            eps_convex,
        })
    }

    /// Splits `φ⁻¹ − t − C` into its odd-index part `f` and even-index part `g`.
    pub fn decompose(&self) -> ProfileDecomposition {
        let mut f_coeffs = BTreeMap::new();
        let mut g_coeffs = BTreeMap::new();
        for (n, a, b) in self.harmonics() {
            if n % 2 == 1 {
                f_coeffs.insert(n, (a, b));
            } else {
                g_coeffs.insert(n, (a, b));
            }
        }
        let grid = periodic_grid(self.scan_points());
        let mut out = ProfileDecomposition {
            max_index: self.max_index,
            f_coeffs,
            g_coeffs,
            grid,
            f_samples: Vec::new(),
            g_samples: Vec::new(),
        };
        out.f_samples = out.grid.iter().map(|&t| out.f(t)).collect();
        out.g_samples = out.grid.iter().map(|&t| out.g(t)).collect();
        out
    }

    /// Samples `φ(s)` and `κ(s)` on a uniform arc-length grid by inverting the
    /// monotone map `t ↦ φ⁻¹(t)` with safeguarded Newton steps.
    pub fn invert_phi(&self, n_points: usize) -> Result<SampledCurve, CurveError> {
        let s_grid = periodic_grid(n_points);
        let mut phi = Vec::with_capacity(n_points);
        let mut kappa = Vec::with_capacity(n_points);
        let mut guess = 0.0;
        for &s in &s_grid {
            let t = self.solve_phi_inverse(s, guess)?;
            let d = self.phi_inverse_derivative(t);
            if d <= 0.0 {
                return Err(CurveError::NonMonotone { t, value: d });
            }
            phi.push(t);
            kappa.push(1.0 / d);
            guess = t + (TAU / n_points as f64) / d;
        }
        Ok(SampledCurve {
            n_points,
            s_grid,
            phi,
            kappa,
            source: self.clone(),
        })
    }

    /// `φ(s)` for a single arc-length value `s ∈ [0, 2π]`.
    pub fn phi_at(&self, s: f64) -> Result<f64, CurveError> {
        self.solve_phi_inverse(s, s)
    }

    fn solve_phi_inverse(&self, s: f64, guess: f64) -> Result<f64, CurveError> {
        // φ⁻¹ maps [0, 2π] monotonically onto [0, 2π]
        let (mut lo, mut hi) = (0.0, TAU);
        let mut t = guess.clamp(lo, hi);
        for _ in 0..NEWTON_MAX_ITERS {
            let r = self.phi_inverse(t) - s;
            if r == 0.0 {
                return Ok(t);
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.phi_inverse_derivative(t);
            if d <= 0.0 {
                return Err(CurveError::NonMonotone { t, value: d });
            }
            let mut next = t - r / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - t).abs();
            t = next;
            if step < NEWTON_TOL || hi - lo < NEWTON_TOL {
                return Ok(t);
            }
        }
        Err(CurveError::NoConvergence {
            tol: NEWTON_TOL,
            iters: NEWTON_MAX_ITERS,
        })
    }

    pub fn to_file(&self) -> CurveFile {
        CurveFile {
            max_index: Some(self.max_index),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        let file: CurveFile =
            serde_json::from_str(text).map_err(|e| CurveError::Parse(e.to_string()))?;
        file.into_curve()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("curve serializes")
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

/// On-disk curve description. Absent keys mean zero.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_index: Option<usize>,
    #[serde(default)]
    pub a: BTreeMap<usize, f64>,
    #[serde(default)]
    pub b: BTreeMap<usize, f64>,
}

impl CurveFile {
    pub fn into_curve(self) -> Result<FourierCurve, CurveError> {
        let present = self.a.keys().chain(self.b.keys()).copied().max().unwrap_or(2);
        let max_index = self.max_index.unwrap_or(present);
        FourierCurve::new(max_index, self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub min_derivative: f64,
    pub argmin_t: f64,
    pub grid_points: usize,
    pub eps_convex: f64,
}

/// The anti-periodic part `f` (odd indices) and π-periodic part `g` (even
/// indices) of `φ⁻¹(t) − t − C`.
#[derive(Debug, Clone)]
pub struct ProfileDecomposition {
    pub max_index: usize,
    pub f_coeffs: BTreeMap<usize, (f64, f64)>,
    pub g_coeffs: BTreeMap<usize, (f64, f64)>,
    pub grid: Vec<f64>,
    pub f_samples: Vec<f64>,
    pub g_samples: Vec<f64>,
}

fn series(coeffs: &BTreeMap<usize, (f64, f64)>, t: f64, derivative: bool) -> f64 {
    coeffs
        .iter()
        .map(|(&n, &(a, b))| {
            let nf = n as f64;
            let (s, c) = (nf * t).sin_cos();
            if derivative {
                nf * (a * c - b * s)
            } else {
                a * s + b * c
            }
        })
        .sum()
}

impl ProfileDecomposition {
    pub fn f(&self, t: f64) -> f64 {
        series(&self.f_coeffs, t, false)
    }

    pub fn g(&self, t: f64) -> f64 {
        series(&self.g_coeffs, t, false)
    }

    pub fn f_prime(&self, t: f64) -> f64 {
        series(&self.f_coeffs, t, true)
    }

    pub fn g_prime(&self, t: f64) -> f64 {
        series(&self.g_coeffs, t, true)
    }

    pub fn f_is_zero(&self) -> bool {
        self.f_coeffs.values().all(|&(a, b)| a == 0.0 && b == 0.0)
    }

    /// Total variation `∫|f'|` over one period.
    ///
    /// The extrema of `f` are located as sign changes of `f'`; the variation is
    /// then the sum of absolute differences of `f` between consecutive extrema.
    pub fn total_variation(&self) -> f64 {
        if self.f_is_zero() {
            return 0.0;
        }
        let n = 2 * self.grid.len();
        let extrema = periodic_sign_roots(|t| self.f_prime(t), n, 1e-13);
        if extrema.len() < 2 {
            return 0.0;
        }
        let values: Vec<f64> = extrema.iter().map(|&t| self.f(t)).collect();
        (0..values.len())
            .map(|i| (values[(i + 1) % values.len()] - values[i]).abs())
            .sum()
    }

    /// Zeros of `f` in `[0, 2π)` (the critical angles), sorted.
    pub fn critical_angles(&self) -> Result<Vec<f64>, CurveError> {
        let scale = self.f_samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if self.f_is_zero() || scale < 1e-14 {
            return Err(CurveError::DegenerateProfile);
        }
        Ok(periodic_sign_roots(|t| self.f(t), self.grid.len(), 1e-13))
    }
}

/// `φ` and `κ` on a uniform arc-length grid.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub n_points: usize,
    pub s_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub kappa: Vec<f64>,
    source: FourierCurve,
}

impl SampledCurve {
    pub fn source(&self) -> &FourierCurve {
        &self.source
    }

    pub fn step(&self) -> f64 {
        TAU / self.n_points as f64
    }

    /// `∫κ ds`, equal to `2π` for a curve winding once.
    pub fn winding(&self) -> f64 {
        periodic_trapezoid(&self.kappa)
    }

    /// `(∫cos φ ds, ∫sin φ ds)`, both zero for a closed curve.
    pub fn closure_residuals(&self) -> (f64, f64) {
        let c: Vec<f64> = self.phi.iter().map(|p| p.cos()).collect();
        let s: Vec<f64> = self.phi.iter().map(|p| p.sin()).collect();
        (periodic_trapezoid(&c), periodic_trapezoid(&s))
    }

    pub fn potential(&self) -> Vec<f64> {
        self.kappa.iter().map(|k| k * k).collect()
    }
}

/// Which harmonics a random curve may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Any,
    /// Even indices only, so `f ≡ 0` and the curvature is π-periodic.
    EvenOnly,
}

/// Parameters of the random-curve generator: `a_n, b_n ~ U[−ρ/n², ρ/n²]`,
/// rejection-sampled on [`FourierCurve::validate`].
#[derive(Debug, Clone, Copy)]
pub struct RandomCurveSpec {
    pub max_index: usize,
    pub rho: f64,
    pub eps_convex: f64,
    pub parity: Parity,
    pub max_tries: usize,
}

impl Default for RandomCurveSpec {
    fn default() -> Self {
        Self {
            max_index: 7,
            rho: 0.5,
            eps_convex: DEFAULT_EPS_CONVEX,
            parity: Parity::Any,
            max_tries: 10_000,
        }
    }
}

pub fn random_curve<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &RandomCurveSpec,
) -> Result<FourierCurve, CurveError> {
    for _ in 0..spec.max_tries {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for n in 2..=spec.max_index {
            if spec.parity == Parity::EvenOnly && n % 2 == 1 {
                continue;
            }
            let r = spec.rho / (n * n) as f64;
            a.insert(n, rng.random_range(-r..=r));
            b.insert(n, rng.random_range(-r..=r));
        }
        let curve = FourierCurve::new(spec.max_index, a, b)?;
        if curve.validate(spec.eps_convex).is_ok() {
            return Ok(curve);
        }
    }
    Err(CurveError::ExhaustedRejection(spec.max_tries))
}

/// Half-open window `[t, t + π)` helper used by the critical-angle checks.
pub fn count_in_half_period(angles: &[f64], start: f64) -> usize {
    angles
        .iter()
        .filter(|&&a| {
            let d = (a - start).rem_euclid(TAU);
            d < PI
        })
        .count()
}
