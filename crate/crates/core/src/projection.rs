//! The `x/y` view of a curve weighted by a positive test function `ψ`.
//!
//! With `x = ψ cos φ` and `y = ψ sin φ`, the projection onto the direction
//! orthogonal to angle `t` is `h_t = x sin t − y cos t`, and its Rayleigh
//! quotient `I(t) = ∫h_t'² / ∫h_t²` is a ratio of two quadratic forms in
//! `(sin t, cos t)`:
//!
//! ```text
//! X  = (∫x²,  −2∫xy,   ∫y²)      V_t = (sin²t, sin t cos t, cos²t)
//! X̂  = (∫x'², −2∫x'y', ∫y'²)     N   = (1, 0, 1)
//! I(t) = V_t·X̂ / V_t·X           E   = N·X̂ / N·X
//! ```
//!
//! `E` is the Rayleigh quotient of `ψ` itself.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;
use thiserror::Error;

use crate::curve::SampledCurve;
use crate::numeric::{bisect, periodic_grid, periodic_sign_roots, periodic_trapezoid, spectral_derivative};

pub const DEFAULT_ANGLES: usize = 1440;
/// Minimal `|sin(θᵢ − θⱼ)|` accepted by [`three_angle_weights`].
pub const ANGLE_MARGIN: f64 = 1e-6;
const CONSTANT_SPAN: f64 = 1e-9;
const LAMBDA_POINT_TOL: f64 = 1e-6;
const MIN_CLASSIFY_ANGLES: usize = 720;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("projection at t = {t:.6} has ∫h_t² = {norm:e}")]
    DegenerateProjection { t: f64, norm: f64 },
    #[error("ψ must be positive, found {value:e} at sample {index}")]
    NonPositivePsi { index: usize, value: f64 },
    #[error("expected {expected} samples of ψ, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("angles {first:.6} and {second:.6} are congruent modulo π within {margin:e}")]
    DegenerateAngles { first: f64, second: f64, margin: f64 },
    #[error("three-angle denominator {value:e} is numerically zero")]
    SingularDenominator { value: f64 },
    #[error("I(t) has {maxima} maxima and {minima} minima per half period")]
    AmbiguousExtrema { maxima: usize, minima: usize },
    #[error("at least {required} angles are needed, got {actual}")]
    TooFewAngles { required: usize, actual: usize },
    #[error("I(t) − I(t + π/2) has no sign change on [0, π/2]")]
    NotFound,
    #[error("I(t_λ) = {value} differs from E = {energy} by more than {tol:e}")]
    InconsistentEnergy { value: f64, energy: f64, tol: f64 },
}

pub fn v_t(t: f64) -> [f64; 3] {
    let (s, c) = t.sin_cos();
    [s * s, s * c, c * c]
}

pub const N: [f64; 3] = [1.0, 0.0, 1.0];

fn dot(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_vec: [f64; 3],
    pub x_hat: [f64; 3],
    /// Uniform angles `2πj/n_angles`.
    pub t_grid: Vec<f64>,
    pub i_samples: Vec<f64>,
}

impl ProjectionData {
    /// `I(t)` from the closed form; agrees with `i_samples` on the grid.
    pub fn i_at(&self, t: f64) -> f64 {
        let v = v_t(t);
        dot(&v, &self.x_hat) / dot(&v, &self.x_vec)
    }

    /// `∫h_t² ds = V_t·X`.
    pub fn projection_mass(&self, t: f64) -> f64 {
        dot(&v_t(t), &self.x_vec)
    }

    /// `E = N·X̂ / N·X`.
    pub fn energy(&self) -> f64 {
        dot(&N, &self.x_hat) / dot(&N, &self.x_vec)
    }

    pub fn n_angles(&self) -> usize {
        self.t_grid.len()
    }
}

/// Assembles `x`, `y`, `X`, `X̂` and samples `I(t)` on `n_angles` angles.
pub fn build_projection(
    curve: &SampledCurve,
    psi: &[f64],
    n_angles: usize,
) -> Result<ProjectionData, ProjectionError> {
    if psi.len() != curve.n_points {
        return Err(ProjectionError::LengthMismatch {
            expected: curve.n_points,
            actual: psi.len(),
        });
    }
    if let Some((index, &value)) = psi.iter().enumerate().find(|(_, &p)| !(p > 0.0)) {
        return Err(ProjectionError::NonPositivePsi { index, value });
    }
    let dpsi = spectral_derivative(psi);
    let n = curve.n_points;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut xp = Vec::with_capacity(n);
    let mut yp = Vec::with_capacity(n);
    for j in 0..n {
        let (s, c) = curve.phi[j].sin_cos();
        let (p, dp, k) = (psi[j], dpsi[j], curve.kappa[j]);
        x.push(p * c);
        y.push(p * s);
        xp.push(dp * c - p * k * s);
        yp.push(dp * s + p * k * c);
    }
    let moments = |u: &[f64], v: &[f64]| -> [f64; 3] {
        let uu: Vec<f64> = u.iter().map(|a| a * a).collect();
        let uv: Vec<f64> = u.iter().zip(v).map(|(a, b)| -2.0 * a * b).collect();
        let vv: Vec<f64> = v.iter().map(|b| b * b).collect();
        [
            periodic_trapezoid(&uu),
            periodic_trapezoid(&uv),
            periodic_trapezoid(&vv),
        ]
    };
    let x_vec = moments(&x, &y);
    let x_hat = moments(&xp, &yp);

    let t_grid = periodic_grid(n_angles);
    let mut i_samples = Vec::with_capacity(n_angles);
    for &t in &t_grid {
        let v = v_t(t);
        let norm = dot(&v, &x_vec);
        if !(norm >= 1e-14) {
            return Err(ProjectionError::DegenerateProjection { t, norm });
        }
        i_samples.push(dot(&v, &x_hat) / norm);
    }
    Ok(ProjectionData {
        x,
        y,
        x_vec,
        x_hat,
        t_grid,
        i_samples,
    })
}

/// `h_t(s) = x(s) sin t − y(s) cos t` from `ψ(s)` and `φ(s)`.
pub fn h_t(psi_s: f64, phi_s: f64, t: f64) -> f64 {
    psi_s * (phi_s.cos() * t.sin() - phi_s.sin() * t.cos())
}

/// `(1 + 2|f(t)|/π)⁻²`, the Dirichlet lower bound for `I(t)`.
pub fn projection_lower_bound(f_t: f64) -> f64 {
    (1.0 + 2.0 * f_t.abs() / PI).powi(-2)
}

/// Weights with `a·V_α + b·V_β + c·V_γ = N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AngleWeights {
    /// `a·V_α + b·V_β + c·V_γ`, which should reproduce `N`.
    pub fn reconstruct(&self) -> [f64; 3] {
        let (va, vb, vc) = (v_t(self.alpha), v_t(self.beta), v_t(self.gamma));
        [0, 1, 2].map(|i| self.a * va[i] + self.b * vb[i] + self.c * vc[i])
    }
}

pub fn three_angle_weights(alpha: f64, beta: f64, gamma: f64) -> Result<AngleWeights, ProjectionError> {
    for (first, second) in [(alpha, beta), (alpha, gamma), (beta, gamma)] {
        if (first - second).sin().abs() < ANGLE_MARGIN {
            return Err(ProjectionError::DegenerateAngles {
                first,
                second,
                margin: ANGLE_MARGIN,
            });
        }
    }
    Ok(AngleWeights {
        alpha,
        beta,
        gamma,
        a: (beta - gamma).cos() / ((alpha - beta).sin() * (alpha - gamma).sin()),
        b: (alpha - gamma).cos() / ((beta - alpha).sin() * (beta - gamma).sin()),
        c: (alpha - beta).cos() / ((gamma - alpha).sin() * (gamma - beta).sin()),
    })
}

/// The weighted quotient `Σ w·I(θ)·X·V_θ / Σ w·X·V_θ` over the three angles.
pub fn three_angle_energy(data: &ProjectionData, w: &AngleWeights) -> Result<f64, ProjectionError> {
    let terms = [(w.a, w.alpha), (w.b, w.beta), (w.c, w.gamma)];
    let mut num = 0.0;
    let mut den = 0.0;
    for (weight, angle) in terms {
        let mass = data.projection_mass(angle);
        num += weight * data.i_at(angle) * mass;
        den += weight * mass;
    }
    if den.abs() < 1e-12 * dot(&N, &data.x_vec) {
        return Err(ProjectionError::SingularDenominator { value: den });
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum IShape {
    Constant {
        value: f64,
    },
    /// One maximizer and one minimizer in `[0, π)`; their antipodes are the
    /// other pair.
    TwoExtremaPairs {
        t_max: f64,
        t_min: f64,
        i_max: f64,
        i_min: f64,
    },
}

/// Locates the extrema of `I` on `[0, π)` with three-point parabolic
/// refinement.
pub fn classify_i(data: &ProjectionData) -> Result<IShape, ProjectionError> {
    let n = data.n_angles();
    if n < MIN_CLASSIFY_ANGLES {
        return Err(ProjectionError::TooFewAngles {
            required: MIN_CLASSIFY_ANGLES,
            actual: n,
        });
    }
    let (lo, hi) = data
        .i_samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo <= CONSTANT_SPAN {
        return Ok(IShape::Constant {
            value: 0.5 * (lo + hi),
        });
    }
    // I is π-periodic, so a half period of the closed form suffices
    let m = n / 2;
    let h = PI / m as f64;
    let vals: Vec<f64> = (0..m).map(|j| data.i_at(j as f64 * h)).collect();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for j in 0..m {
        let (prev, cur, next) = (vals[(j + m - 1) % m], vals[j], vals[(j + 1) % m]);
        if cur > prev && cur >= next {
            maxima.push(j);
        } else if cur < prev && cur <= next {
            minima.push(j);
        }
    }
    if maxima.len() != 1 || minima.len() != 1 {
        return Err(ProjectionError::AmbiguousExtrema {
            maxima: maxima.len(),
            minima: minima.len(),
        });
    }
    let refine = |j: usize| -> f64 {
        let (fm, f0, fp) = (vals[(j + m - 1) % m], vals[j], vals[(j + 1) % m]);
        let curv = fm - 2.0 * f0 + fp;
        let offset = if curv != 0.0 { 0.5 * h * (fm - fp) / curv } else { 0.0 };
        (j as f64 * h + offset).rem_euclid(PI)
    };
    let t_max = refine(maxima[0]);
    let t_min = refine(minima[0]);
    Ok(IShape::TwoExtremaPairs {
        t_max,
        t_min,
        i_max: data.i_at(t_max),
        i_min: data.i_at(t_min),
    })
}

/// All `t ∈ [0, 2π)` with `I(t) = level`, sorted.
pub fn level_crossings(data: &ProjectionData, level: f64) -> Vec<f64> {
    periodic_sign_roots(|t| data.i_at(t) - level, data.n_angles(), 1e-14)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaPoint {
    pub t: f64,
    pub value: f64,
    pub energy: f64,
    /// `I` is constant, so every angle qualifies and `t` is reported as 0.
    pub constant: bool,
}

/// The angle `t_λ ∈ [0, π/2)` with `I(t_λ) = I(t_λ + π/2)`, where `I(t_λ)`
/// coincides with `E`.
pub fn lambda_equal_point(data: &ProjectionData) -> Result<LambdaPoint, ProjectionError> {
    let energy = data.energy();
    if let Ok(IShape::Constant { value }) = classify_i(data) {
        return Ok(LambdaPoint {
            t: 0.0,
            value,
            energy,
            constant: true,
        });
    }
    let d = |t: f64| data.i_at(t) - data.i_at(t + FRAC_PI_2);
    let steps = (data.n_angles() / 4).max(1);
    let h = FRAC_PI_2 / steps as f64;
    let mut root = None;
    let mut prev = d(0.0);
    if prev == 0.0 {
        root = Some(0.0);
    }
    for j in 1..=steps {
        if root.is_some() {
            break;
        }
        let t = j as f64 * h;
        let cur = d(t);
        if cur == 0.0 {
            root = Some(t);
        } else if prev * cur < 0.0 {
            root = Some(bisect(d, t - h, t, 1e-15));
        }
        prev = cur;
    }
    let t = root.ok_or(ProjectionError::NotFound)?;
    let t = if t >= FRAC_PI_2 { t - FRAC_PI_2 } else { t };
    let value = data.i_at(t);
    if (value - energy).abs() >= LAMBDA_POINT_TOL {
        return Err(ProjectionError::InconsistentEnergy {
            value,
            energy,
            tol: LAMBDA_POINT_TOL,
        });
    }
    Ok(LambdaPoint {
        t,
        value,
        energy,
        constant: false,
    })
}

/// `(t, I(t))` rows for export.
pub fn i_rows(data: &ProjectionData) -> Vec<[f64; 2]> {
    data.t_grid
        .iter()
        .zip(&data.i_samples)
        .map(|(&t, &i)| [t, i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::FourierCurve;
    use crate::spectral::ground_state;

    fn ground_projection(curve: &FourierCurve) -> (ProjectionData, f64) {
        let sc = curve.invert_phi(512).unwrap();
        let sol = ground_state(&sc, 64).unwrap();
        (build_projection(&sc, &sol.psi, DEFAULT_ANGLES).unwrap(), sol.lambda)
    }

    #[test]
    fn circle_projection_is_flat() {
        let sc = FourierCurve::circle().invert_phi(128).unwrap();
        let data = build_projection(&sc, &vec![0.4; 128], 720).unwrap();
        assert!(data.i_samples.iter().all(|i| (i - 1.0).abs() < 1e-12));
        assert!(matches!(classify_i(&data).unwrap(), IShape::Constant { .. }));
        let w = three_angle_weights(0.1, 0.9, 2.0).unwrap();
        assert!((three_angle_energy(&data, &w).unwrap() - 1.0).abs() < 1e-12);
        assert!(lambda_equal_point(&data).unwrap().constant);
    }

    #[test]
    fn zero_angle_projection_is_y() {
        let c = FourierCurve::from_coefficients(&[(2, 0.1)], &[(3, 0.05)]).unwrap();
        let sc = c.invert_phi(256).unwrap();
        let psi: Vec<f64> = sc.s_grid.iter().map(|s| 1.0 + 0.2 * s.sin()).collect();
        let data = build_projection(&sc, &psi, 720).unwrap();
        let yy: Vec<f64> = data.y.iter().map(|v| v * v).collect();
        assert!((dot(&v_t(0.0), &data.x_vec) - periodic_trapezoid(&yy)).abs() < 1e-14);
        assert!((data.i_samples[0] - data.x_hat[2] / data.x_vec[2]).abs() < 1e-14);
    }

    #[test]
    fn right_angle_pair_weights() {
        let w = three_angle_weights(0.3, 0.3 + FRAC_PI_2, 1.1).unwrap();
        assert!((w.a - 1.0).abs() < 1e-12 && (w.b - 1.0).abs() < 1e-12 && w.c.abs() < 1e-12);
        let w = three_angle_weights(0.0, PI / 3.0, 2.0 * PI / 3.0).unwrap();
        let r = w.reconstruct();
        for i in 0..3 {
            assert!((r[i] - N[i]).abs() < 1e-12);
        }
        assert!(matches!(
            three_angle_weights(0.2, 0.2 + PI, 1.0),
            Err(ProjectionError::DegenerateAngles { .. })
        ));
    }

    #[test]
    fn threefold_symmetry_gives_constant_projection() {
        // the second-moment tensor of a 3-fold symmetric curve is isotropic
        let c = FourierCurve::from_coefficients(&[], &[(3, 0.1)]).unwrap();
        let (data, lambda) = ground_projection(&c);
        match classify_i(&data).unwrap() {
            IShape::Constant { value } => assert!((value - lambda).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ground_state_projection_structure() {
        let c = FourierCurve::from_coefficients(&[(2, 0.08)], &[(3, 0.05)]).unwrap();
        let (data, lambda) = ground_projection(&c);
        assert!((data.energy() - lambda).abs() < 1e-9);
        let profile = c.decompose();
        for t in profile.critical_angles().unwrap() {
            assert!(data.i_at(t) >= 1.0 - 1e-8);
        }
        match classify_i(&data).unwrap() {
            IShape::TwoExtremaPairs { i_max, i_min, .. } => {
                assert!(i_min < lambda && lambda < i_max);
                assert_eq!(level_crossings(&data, lambda).len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = lambda_equal_point(&data).unwrap();
        assert!((p.value - lambda).abs() < 1e-6);
    }

    #[test]
    fn symmetric_curve_balances_at_quarter_turn() {
        let c = FourierCurve::from_coefficients(&[(2, 0.08), (3, 0.05)], &[]).unwrap();
        let (data, _) = ground_projection(&c);
        let p = lambda_equal_point(&data).unwrap();
        // dense scan of |I(t) − I(t + π/2)| as the reference
        let best = (0..100_000)
            .map(|j| j as f64 * FRAC_PI_2 / 100_000.0)
            .min_by(|a, b| {
                let da = (data.i_at(*a) - data.i_at(a + FRAC_PI_2)).abs();
                let db = (data.i_at(*b) - data.i_at(b + FRAC_PI_2)).abs();
                da.total_cmp(&db)
            })
            .unwrap();
        assert!((p.t - best).abs() < 1e-4);
        assert!((p.t - PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn nonpositive_psi_is_refused() {
        let sc = FourierCurve::circle().invert_phi(16).unwrap();
        let mut psi = vec![1.0; 16];
        psi[3] = 0.0;
        assert_eq!(
            build_projection(&sc, &psi, 720).unwrap_err(),
            ProjectionError::NonPositivePsi { index: 3, value: 0.0 }
        );
    }
}
