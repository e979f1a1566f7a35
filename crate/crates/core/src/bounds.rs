//! The two bound surfaces on the `(ν̃, Δ)` rectangle and their inf-max.
//!
//! ```text
//! G(Δ)     = (1 + cot(Δ/4))⁻²
//! B1(ν̃, Δ) = (1 + 2ν̃G)⁻²
//! B2(ν̃, Δ) = 1 − (2 − sec²(Δ/2))·(1 − (2 + 2ν̃G − ν̃)⁻²)
//! ```
//!
//! For every curve some admissible `(ν̃, Δ)` exists with `λ ≥ max(B1, B2)`,
//! so the infimum over the rectangle of that maximum is a lower bound.
//! All formulas stay finite at `Δ = π/2`; they are evaluated there as the
//! continuous extension from the left.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Interior margin used when the optimizer samples `Δ ∈ (0, π/2)`.
pub const DELTA_MARGIN: f64 = 1e-9;
pub const DEFAULT_COARSE: usize = 256;
pub const DEFAULT_LEVELS: usize = 6;
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;
/// Half-width, in points, of each local refinement grid.
const LOCAL_HALF_WIDTH: i64 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{name} = {value} is outside {range}")]
pub struct DomainError {
    pub name: &'static str,
    pub value: f64,
    pub range: &'static str,
}

fn check_delta(delta: f64) -> Result<(), DomainError> {
    if delta > 0.0 && delta <= FRAC_PI_2 {
        Ok(())
    } else {
        Err(DomainError {
            name: "Δ",
            value: delta,
            range: "(0, π/2]",
        })
    }
}

fn check_nu_tilde(nu: f64) -> Result<(), DomainError> {
    if (0.0..=1.0).contains(&nu) {
        Ok(())
    } else {
        Err(DomainError {
            name: "ν̃",
            value: nu,
            range: "[0, 1]",
        })
    }
}

pub fn g(delta: f64) -> Result<f64, DomainError> {
    check_delta(delta)?;
    Ok(g_unchecked(delta))
}

fn g_unchecked(delta: f64) -> f64 {
    (1.0 + 1.0 / (0.25 * delta).tan()).powi(-2)
}

pub fn b1(nu: f64, delta: f64) -> Result<f64, DomainError> {
    check_nu_tilde(nu)?;
    check_delta(delta)?;
    Ok(b1_unchecked(nu, delta))
}

fn b1_unchecked(nu: f64, delta: f64) -> f64 {
    (1.0 + 2.0 * nu * g_unchecked(delta)).powi(-2)
}

pub fn b2(nu: f64, delta: f64) -> Result<f64, DomainError> {
    check_nu_tilde(nu)?;
    check_delta(delta)?;
    Ok(b2_unchecked(nu, delta))
}

fn b2_unchecked(nu: f64, delta: f64) -> f64 {
    let sec = 1.0 / (0.5 * delta).cos();
    let g = g_unchecked(delta);
    1.0 - (2.0 - sec * sec) * (1.0 - (2.0 + 2.0 * nu * g - nu).powi(-2))
}

/// `B2` written as `1 − (cos Δ / cos²(Δ/2))·(1 − (2 + ν̃(2G − 1))⁻²)`.
pub fn b2_grouped(nu: f64, delta: f64) -> Result<f64, DomainError> {
    check_nu_tilde(nu)?;
    check_delta(delta)?;
    let half = (0.5 * delta).cos();
    let g = g_unchecked(delta);
    Ok(1.0 - delta.cos() / (half * half) * (1.0 - (2.0 + nu * (2.0 * g - 1.0)).powi(-2)))
}

/// `B1(1, π/2)`, the bound obtained from `B1` alone.
pub fn crude_bound() -> f64 {
    b1_unchecked(1.0, FRAC_PI_2)
}

/// `(3 + 2√2)/8`, the closed form of [`crude_bound`].
pub fn crude_bound_closed_form() -> f64 {
    (3.0 + 2.0 * SQRT_2) / 8.0
}

/// Upper bound `(π − 2ν)·G(Δ)` on the plateau height `δ`.
pub fn dual_use_delta_bound(nu: f64, delta: f64) -> Result<f64, DomainError> {
    if !(0.0..=FRAC_PI_2).contains(&nu) {
        return Err(DomainError {
            name: "ν",
            value: nu,
            range: "[0, π/2]",
        });
    }
    Ok((PI - 2.0 * nu) * g(delta)?)
}

/// `ν̃ = 1 − 2ν/π`.
pub fn nu_tilde_from_nu(nu: f64) -> f64 {
    1.0 - 2.0 * nu / PI
}

/// `2 − sec²(Δ/2)`, the weight attached to the second estimate.
pub fn estimate_two_constant(delta: f64) -> f64 {
    let sec = 1.0 / (0.5 * delta).cos();
    2.0 - sec * sec
}

/// `cos(ι₁ − ι₂) / (sin(γ − ι₁)·sin(γ − ι₂))` with `γ` midway between the
/// two angles shifted by `π/2`.
pub fn estimate_two_weight(iota1: f64, iota2: f64) -> f64 {
    let gamma = 0.5 * (iota1 + iota2) + FRAC_PI_2;
    (iota1 - iota2).cos() / ((gamma - iota1).sin() * (gamma - iota2).sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub nu_tilde: f64,
    pub delta: f64,
    pub b1: f64,
    pub b2: f64,
    pub bmax: f64,
}

pub fn surface_point(nu: f64, delta: f64) -> SurfacePoint {
    let b1 = b1_unchecked(nu, delta);
    let b2 = b2_unchecked(nu, delta);
    SurfacePoint {
        nu_tilde: nu,
        delta,
        b1,
        b2,
        bmax: b1.max(b2),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InfMaxOptions {
    pub n_coarse: usize,
    pub levels: usize,
    pub refine_tol: f64,
}

impl Default for InfMaxOptions {
    fn default() -> Self {
        Self {
            n_coarse: DEFAULT_COARSE,
            levels: DEFAULT_LEVELS,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

/// Coarse grid of `max(B1, B2)` plus the refined minimizer.
#[derive(Debug, Clone, Serialize)]
pub struct BoundSurface {
    pub nu_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// Row-major over `(nu_grid, delta_grid)`.
    pub points: Vec<SurfacePoint>,
    /// Minimum over the coarse grid alone.
    pub coarse_min: SurfacePoint,
    /// Refined minimizer; also the minimum over every evaluated point.
    pub argmin: SurfacePoint,
    pub value: f64,
    pub levels_run: usize,
    /// Movement of the incumbent at the last refinement level.
    pub last_move: (f64, f64),
    pub evaluations: usize,
}

impl BoundSurface {
    /// Rows `(ν̃, Δ, B1, B2, max)` of the coarse grid.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 5]> + '_ {
        self.points
            .iter()
            .map(|p| [p.nu_tilde, p.delta, p.b1, p.b2, p.bmax])
    }
}

pub fn optimize_infmax(n_coarse: usize, refine_tol: f64) -> Result<BoundSurface, DomainError> {
    optimize_infmax_with(InfMaxOptions {
        n_coarse,
        refine_tol,
        ..InfMaxOptions::default()
    })
}

pub fn optimize_infmax_with(opts: InfMaxOptions) -> Result<BoundSurface, DomainError> {
    let n = opts.n_coarse;
    if n < 64 {
        return Err(DomainError {
            name: "n_coarse",
            value: n as f64,
            range: "[64, ∞)",
        });
    }
    let (d_lo, d_hi) = (DELTA_MARGIN, FRAC_PI_2 - DELTA_MARGIN);
    let h_nu = 1.0 / (n - 1) as f64;
    let h_delta = (d_hi - d_lo) / (n - 1) as f64;
    let nu_grid: Vec<f64> = (0..n).map(|i| i as f64 * h_nu).collect();
    let delta_grid: Vec<f64> = (0..n).map(|j| d_lo + j as f64 * h_delta).collect();

    let points: Vec<SurfacePoint> = nu_grid
        .par_iter()
        .flat_map_iter(|&nu| delta_grid.iter().map(move |&d| surface_point(nu, d)))
        .collect();
    let coarse_min = *points
        .iter()
        .min_by(|a, b| a.bmax.total_cmp(&b.bmax))
        .expect("non-empty grid");

    let mut best = coarse_min;
    let (mut hn, mut hd) = (h_nu, h_delta);
    let mut evaluations = points.len();
    let mut levels_run = 0;
    let mut last_move = (f64::INFINITY, f64::INFINITY);
    for _ in 0..opts.levels {
        hn /= 4.0;
        hd /= 4.0;
        let centre = best;
        for i in -LOCAL_HALF_WIDTH..=LOCAL_HALF_WIDTH {
            let nu = centre.nu_tilde + i as f64 * hn;
            if !(0.0..=1.0).contains(&nu) {
                continue;
            }
            for j in -LOCAL_HALF_WIDTH..=LOCAL_HALF_WIDTH {
                let d = centre.delta + j as f64 * hd;
                if !(d_lo..=d_hi).contains(&d) {
                    continue;
                }
                let p = surface_point(nu, d);
                evaluations += 1;
                if p.bmax < best.bmax {
                    best = p;
                }
            }
        }
        levels_run += 1;
        last_move = (
            (best.nu_tilde - centre.nu_tilde).abs(),
            (best.delta - centre.delta).abs(),
        );
        let resolved = hn.max(hd) < opts.refine_tol;
        if resolved && last_move.0 < opts.refine_tol && last_move.1 < opts.refine_tol {
            break;
        }
    }

    Ok(BoundSurface {
        nu_grid,
        delta_grid,
        points,
        coarse_min,
        argmin: best,
        value: best.bmax,
        levels_run,
        last_move,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_closed_forms() {
        assert!(g(1e-12).unwrap() < 1e-24);
        assert!((g(FRAC_PI_2).unwrap() - (2.0 + SQRT_2).powi(-2)).abs() < 1e-15);
        assert!((g(FRAC_PI_2).unwrap() - 0.0857864).abs() < 1e-7);
        assert!(g(0.0).is_err());
        assert!(g(1.6).is_err());
        assert!(b1(1.1, 1.0).is_err());
    }

    #[test]
    fn b1_special_values() {
        for d in [0.1, 0.7, 1.5] {
            assert_eq!(b1(0.0, d).unwrap(), 1.0);
        }
        assert!((crude_bound() - crude_bound_closed_form()).abs() < 1e-15);
        assert!((crude_bound() - 0.7285).abs() < 1e-4);
    }

    #[test]
    fn b2_forms_agree() {
        let d = PI / 3.0;
        assert!((b2(1.0, d).unwrap() - b2_grouped(1.0, d).unwrap()).abs() < 1e-14);
        assert!((b2(0.0, 1e-9).unwrap() - 0.25).abs() < 1e-12);
        let sec2 = 1.0 / (0.5f64).cos().powi(2);
        assert!((b2(0.0, 1.0).unwrap() - (1.0 - (2.0 - sec2) * 0.75)).abs() < 1e-15);
    }

    #[test]
    fn dual_use_closed_forms() {
        assert_eq!(dual_use_delta_bound(FRAC_PI_2, 1.0).unwrap(), 0.0);
        let v = dual_use_delta_bound(0.0, FRAC_PI_2).unwrap();
        assert!((v - PI * (2.0 + SQRT_2).powi(-2)).abs() < 1e-15);
        assert!(dual_use_delta_bound(2.0, 1.0).is_err());
    }

    #[test]
    fn estimate_two_weight_is_the_secant_form() {
        for (i1, i2) in [(0.1, 0.9), (-0.3, 1.0), (0.5, 0.51)] {
            let c = estimate_two_constant(i2 - i1);
            assert!((estimate_two_weight(i1, i2) - c).abs() < 1e-12);
        }
    }

    #[test]
    fn infmax_on_small_grid() {
        let s = optimize_infmax(64, 1e-6).unwrap();
        assert_eq!(s.points.len(), 64 * 64);
        assert!(s.value > 0.82 && s.value < 0.83);
        assert!(s.value <= s.coarse_min.bmax);
        assert!((s.argmin.b1 - s.argmin.b2).abs() < 1e-3);
        assert!(optimize_infmax(32, 1e-6).is_err());
    }
}
