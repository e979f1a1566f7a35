//! The closed-form route to `λ > 0.81`.
//!
//! On the level set `B1 = 0.81`, i.e. `ν̃ = 1/(18G(Δ))`, the second bound
//! reduces to a function of `Δ` alone. Replacing its three nonlinear pieces
//! by tangent or chord estimates leaves a minorant whose only critical point
//! is the real root of the depressed cubic `D³ + 81D + q = 0`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2};

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{self, DomainError};

/// Target value of the theorem.
pub const TARGET: f64 = 0.81;
/// Slack tolerance, relative to the size of the compared quantities.
pub const SLACK_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{name}: inequality violated at Δ = {location} with slack {margin:e}")]
    InequalityViolated {
        name: &'static str,
        location: f64,
        margin: f64,
    },
    #[error("cubic discriminant {value:e} is not negative")]
    DiscriminantSign { value: f64 },
    #[error("{name} = {value} falls outside [{lo}, {hi})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("minorant value {value} does not exceed {target}")]
    BoundNotExceeded { value: f64, target: f64 },
    #[error("grid needs at least {required} points, got {actual}")]
    GridTooSmall { required: usize, actual: usize },
}

/// `k = (π/2)(√2 + 1)`.
pub fn k() -> f64 {
    FRAC_PI_2 * (SQRT_2 + 1.0)
}

/// `Δ_min = 4·atan(1/(3√2 − 1))`, where `G(Δ_min) = 1/18`.
pub fn compute_delta_min() -> f64 {
    4.0 * (1.0 / (3.0 * SQRT_2 - 1.0)).atan()
}

fn check_level_domain(delta: f64) -> Result<(), DomainError> {
    let lo = compute_delta_min();
    if delta >= lo && delta <= FRAC_PI_2 {
        Ok(())
    } else {
        Err(DomainError {
            name: "Δ",
            value: delta,
            range: "[Δ_min, π/2]",
        })
    }
}

/// `ν̃(Δ) = 1/(18G(Δ))`, the level set `B1 = 0.81`.
pub fn level_set_nu(delta: f64) -> Result<f64, DomainError> {
    check_level_domain(delta)?;
    // at Δ_min itself the quotient may round a hair above 1
    Ok((1.0 / (18.0 * bounds::g(delta)?)).min(1.0))
}

/// `B2` restricted to the level set.
pub fn b2_on_l(delta: f64) -> Result<f64, DomainError> {
    bounds::b2(level_set_nu(delta)?, delta)
}

/// The same restriction written as `1 − F(Δ)·(1 − (19/9 − G⁻¹/18)⁻²)`.
pub fn b2_on_l_explicit(delta: f64) -> Result<f64, DomainError> {
    check_level_domain(delta)?;
    let g_inv = 1.0 / bounds::g(delta)?;
    Ok(1.0 - secant_term(delta) * (1.0 - (19.0 / 9.0 - g_inv / 18.0).powi(-2)))
}

/// `F(Δ) = 2 − sec²(Δ/2)`.
pub fn secant_term(delta: f64) -> f64 {
    bounds::estimate_two_constant(delta)
}

/// Tangent of `F` at `π/3`: `−(4√3/9)(Δ − π/3) + 2/3`.
pub fn secant_tangent(delta: f64) -> f64 {
    -(4.0 * 3f64.sqrt() / 9.0) * (delta - FRAC_PI_3) + 2.0 / 3.0
}

/// Lower estimate `(1 + k/Δ)²` of `G(Δ)⁻¹`.
pub fn g_inverse_lower(delta: f64) -> f64 {
    (1.0 + k() / delta).powi(2)
}

/// `H(Δ) = 37/2 − k/Δ − k²/(2Δ²)`.
pub fn h(delta: f64) -> f64 {
    let r = k() / delta;
    18.5 - r - 0.5 * r * r
}

/// Tangent of `H` at `k/3`: `(36/k)Δ − 1`.
pub fn h_tangent(delta: f64) -> f64 {
    36.0 / k() * delta - 1.0
}

/// `B2` on the level set after the `F` and `G` estimates.
pub fn b2_on_l_linearized(delta: f64) -> f64 {
    1.0 - secant_tangent(delta) * (1.0 - 81.0 / h(delta).powi(2))
}

/// The final minorant after the `H` estimate.
pub fn minorant(delta: f64) -> f64 {
    1.0 - secant_tangent(delta) * (1.0 - 81.0 / h_tangent(delta).powi(2))
}

/// The minorant in the variable `D = (36/k)Δ − 1`.
pub fn minorant_in_d(d: f64) -> f64 {
    let s3k = 3f64.sqrt() * k() / 81.0;
    let slope = s3k * d + s3k - 4.0 * 3f64.sqrt() * PI / 27.0 - 2.0 / 3.0;
    1.0 + slope * (1.0 - 81.0 / (d * d))
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentCheck {
    pub name: &'static str,
    pub n_points: usize,
    pub interval: (f64, f64),
    /// Smallest relative slack over the grid (nonnegative when the
    /// inequality holds).
    pub min_slack: f64,
    pub argmin: f64,
    pub tangency: Option<f64>,
    pub tangency_slack: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentReport {
    pub checks: Vec<TangentCheck>,
}

impl TangentReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| {
            c.min_slack >= -SLACK_TOL && c.tangency_slack.is_none_or(|s| s.abs() <= SLACK_TOL)
        })
    }
}

/// `(upper − lower) / max(1, |upper|, |lower|)`.
fn relative_slack(upper: f64, lower: f64) -> f64 {
    (upper - lower) / 1f64.max(upper.abs()).max(lower.abs())
}

fn run_check(
    name: &'static str,
    grid: Vec<f64>,
    interval: (f64, f64),
    tangency: Option<f64>,
    slack: impl Fn(f64) -> f64,
) -> Result<TangentCheck, AnalyticError> {
    let mut min_slack = f64::INFINITY;
    let mut argmin = f64::NAN;
    for &d in &grid {
        let s = slack(d);
        if s < min_slack {
            min_slack = s;
            argmin = d;
        }
    }
    let tangency_slack = tangency.map(&slack);
    if min_slack < -SLACK_TOL {
        return Err(AnalyticError::InequalityViolated {
            name,
            location: argmin,
            margin: min_slack,
        });
    }
    if let (Some(t), Some(s)) = (tangency, tangency_slack) {
        if s.abs() > SLACK_TOL {
            return Err(AnalyticError::InequalityViolated {
                name,
                location: t,
                margin: s,
            });
        }
    }
    Ok(TangentCheck {
        name,
        n_points: grid.len(),
        interval,
        min_slack,
        argmin,
        tangency,
        tangency_slack,
    })
}

/// Verifies the three linear estimates on dense grids, tangency points
/// included.
pub fn tangent_majorant_checks(n_grid: usize) -> Result<TangentReport, AnalyticError> {
    if n_grid < 1000 {
        return Err(AnalyticError::GridTooSmall {
            required: 1000,
            actual: n_grid,
        });
    }
    // open interval (0, π/2)
    let open: Vec<f64> = (1..=n_grid)
        .map(|j| FRAC_PI_2 * j as f64 / (n_grid + 1) as f64)
        .collect();
    let d_min = compute_delta_min();
    // half-open interval [Δ_min, π/2)
    let half_open: Vec<f64> = (0..n_grid)
        .map(|j| d_min + (FRAC_PI_2 - d_min) * j as f64 / n_grid as f64)
        .collect();
    let with = |mut grid: Vec<f64>, extra: f64| {
        grid.push(extra);
        grid
    };

    let f_check = run_check(
        "secant_tangent",
        with(open.clone(), FRAC_PI_3),
        (0.0, FRAC_PI_2),
        Some(FRAC_PI_3),
        |d| relative_slack(secant_tangent(d), secant_term(d)),
    )?;
    let g_check = run_check(
        "g_inverse_chord",
        open,
        (0.0, FRAC_PI_2),
        None,
        |d| relative_slack(1.0 / bounds::g(d).unwrap_or(f64::NAN), g_inverse_lower(d)),
    )?;
    let h_check = run_check(
        "h_tangent",
        with(half_open, k() / 3.0),
        (d_min, FRAC_PI_2),
        Some(k() / 3.0),
        |d| relative_slack(h_tangent(d), h(d)),
    )?;
    Ok(TangentReport {
        checks: vec![f_check, g_check, h_check],
    })
}

/// Every quantity of the Cardano step.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticPipeline {
    pub k: f64,
    pub delta_min: f64,
    pub p: f64,
    pub q: f64,
    pub discriminant: f64,
    pub u1: f64,
    pub u2: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    pub cubic_residual: f64,
    pub delta0: f64,
    pub final_value: f64,
    pub exceeds_target: bool,
}

pub fn cardano_min() -> Result<AnalyticPipeline, AnalyticError> {
    let k = k();
    let delta_min = compute_delta_min();
    let p = 81.0;
    let q = 162.0 - 162.0 * (36.0 / k) * (FRAC_PI_3 + 3f64.sqrt() / 2.0);
    let discriminant = -4.0 * p * p * p - 27.0 * q * q;
    if !(discriminant < 0.0) {
        return Err(AnalyticError::DiscriminantSign {
            value: discriminant,
        });
    }
    let root = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u1 = -q / 2.0 + root;
    let u2 = -q / 2.0 - root;
    let d0 = u1.cbrt() + u2.cbrt();
    let cubic_residual = d0 * d0 * d0 + p * d0 + q;
    let delta0 = k / 36.0 * (d0 + 1.0);
    if !(delta0 >= delta_min && delta0 < FRAC_PI_2) {
        return Err(AnalyticError::OutOfRange {
            name: "Δ₀",
            value: delta0,
            lo: delta_min,
            hi: FRAC_PI_2,
        });
    }
    let final_value = minorant(delta0);
    if !(final_value > TARGET) {
        return Err(AnalyticError::BoundNotExceeded {
            value: final_value,
            target: TARGET,
        });
    }
    Ok(AnalyticPipeline {
        k,
        delta_min,
        p,
        q,
        discriminant,
        u1,
        u2,
        d0,
        cubic_residual,
        delta0,
        final_value,
        exceeds_target: true,
    })
}

/// Dense-grid minimum `(Δ, value)` of the minorant over `[Δ_min, π/2)`.
pub fn brute_minorant_min(n_grid: usize) -> (f64, f64) {
    let lo = compute_delta_min();
    let step = (FRAC_PI_2 - lo) / n_grid as f64;
    (0..n_grid)
        .map(|j| {
            let d = lo + j as f64 * step;
            (d, minorant(d))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid")
}
