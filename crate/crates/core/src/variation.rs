//! Lower bounds on the total variation of balanced anti-periodic profiles.
//!
//! The extremal profiles are step functions on `(0, π]`
//!
//! ```text
//! φ(t) = β on (τ₁, m],  −γ on [m, τ₂),  δ on [π/2, π],  δ + ν at t = π/2,
//! ```
//!
//! extended by `φ(t + π) = −φ(t)`, with `β, γ` chosen so that the first
//! Fourier coefficients vanish. Their variation `4(δ + ν + β + γ)` is
//! minimal when `m` is the midpoint of `(τ₁, τ₂)`.
//!
//! [`sample_admissible`] draws piecewise-linear profiles satisfying the same
//! sign pattern and balance conditions, for empirical comparison with the
//! closed-form minimum.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::DomainError;

const DET_FLOOR: f64 = 1e-14;
/// Knot values this close to zero count as zero crossings.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("balance system is singular (determinant {det:e})")]
    SingularSystem { det: f64 },
    #[error("balance weights must be positive, got β = {beta}, γ = {gamma}")]
    NegativeWeight { beta: f64, gamma: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("no admissible sample after {0} draws")]
    ExhaustedRejection(usize),
}

fn domain(name: &'static str, value: f64, range: &'static str) -> VariationError {
    VariationError::Domain(DomainError { name, value, range })
}

fn check_taus(tau1: f64, tau2: f64) -> Result<(), VariationError> {
    if !(tau1 > 0.0 && tau1 < tau2 && tau2 < FRAC_PI_2) {
        return Err(domain("τ₂ − τ₁", tau2 - tau1, "0 < τ₁ < τ₂ < π/2"));
    }
    Ok(())
}

fn check_m(tau1: f64, tau2: f64, m: f64, delta: f64) -> Result<(), VariationError> {
    if !(tau1 < m && m < tau2) {
        return Err(domain("m", m, "(τ₁, τ₂)"));
    }
    if !(delta > 0.0) {
        return Err(domain("δ", delta, "(0, ∞)"));
    }
    Ok(())
}

/// Solves the two balance equations
///
/// ```text
/// β(cos τ₁ − cos m) + γ(cos τ₂ − cos m) + δ = 0
/// β(sin m − sin τ₁) − γ(sin τ₂ − sin m) − δ = 0
/// ```
pub fn solve_balance(tau1: f64, tau2: f64, m: f64, delta: f64) -> Result<(f64, f64), VariationError> {
    check_m(tau1, tau2, m, delta)?;
    let (c1, c2) = (tau1.cos() - m.cos(), tau2.cos() - m.cos());
    let (s1, s2) = (m.sin() - tau1.sin(), tau2.sin() - m.sin());
    // [c1  c2] [β]   [−δ]
    // [s1 −s2] [γ] = [ δ]
    let det = -c1 * s2 - c2 * s1;
    if det.abs() < DET_FLOOR {
        return Err(VariationError::SingularSystem { det });
    }
    let beta = (delta * s2 - c2 * delta) / det;
    let gamma = (c1 * delta + s1 * delta) / det;
    if !(beta > 0.0 && gamma > 0.0) {
        return Err(VariationError::NegativeWeight { beta, gamma });
    }
    Ok((beta, gamma))
}

/// Residuals of the two balance equations.
pub fn balance_residuals(tau1: f64, tau2: f64, m: f64, delta: f64, beta: f64, gamma: f64) -> (f64, f64) {
    (
        beta * (tau1.cos() - m.cos()) + gamma * (tau2.cos() - m.cos()) + delta,
        beta * (m.sin() - tau1.sin()) - gamma * (tau2.sin() - m.sin()) - delta,
    )
}

/// `S(m) = β + γ` in closed form.
pub fn s_of_m(tau1: f64, tau2: f64, m: f64, delta: f64) -> Result<f64, VariationError> {
    check_m(tau1, tau2, m, delta)?;
    // sin a + sin b − sin(a + b) in product form, free of cancellation
    let (a, b) = (tau2 - m, m - tau1);
    let den = 4.0 * (0.5 * a).sin() * (0.5 * b).sin() * (0.5 * (a + b)).sin();
    if !(den > 0.0) {
        return Err(domain("S(m) denominator", den, "(0, ∞)"));
    }
    Ok(delta * (tau2.sin() - tau1.sin() + tau1.cos() - tau2.cos()) / den)
}

/// `min_m S(m) = √2·δ·sin((τ₁+τ₂)/2 + π/4) / (2 sin²((τ₂−τ₁)/4))`.
pub fn s_min_closed_form(tau1: f64, tau2: f64, delta: f64) -> f64 {
    SQRT_2 * delta * (0.5 * (tau1 + tau2) + FRAC_PI_4).sin()
        / (2.0 * (0.25 * (tau2 - tau1)).sin().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationBound {
    /// `4(δ + ν) + 2√2·δ·sin((τ₁+τ₂)/2 + π/4) / sin²((τ₂−τ₁)/4)`.
    pub exact: f64,
    /// The same with `(τ₂−τ₁)/2` in place of `(τ₁+τ₂)/2`.
    pub relaxed: f64,
}

pub fn min_total_variation(tau1: f64, tau2: f64, delta: f64, nu: f64) -> Result<VariationBound, VariationError> {
    check_taus(tau1, tau2)?;
    if !(delta > 0.0) {
        return Err(domain("δ", delta, "(0, ∞)"));
    }
    if !(nu >= 0.0) {
        return Err(domain("ν", nu, "[0, ∞)"));
    }
    let den = (0.25 * (tau2 - tau1)).sin().powi(2);
    let base = 4.0 * (delta + nu);
    let exact = base + 2.0 * SQRT_2 * delta * (0.5 * (tau1 + tau2) + FRAC_PI_4).sin() / den;
    let relaxed = base + 2.0 * SQRT_2 * delta * (0.5 * (tau2 - tau1) + FRAC_PI_4).sin() / den;
    Ok(VariationBound { exact, relaxed })
}

/// `sin((τ₁+τ₂)/2 + π/4) − sin((τ₂−τ₁)/2 + π/4)` in product form,
/// `2 cos(τ₂/2 + π/4)·sin(τ₁/2)`.
pub fn relaxation_gap(tau1: f64, tau2: f64) -> f64 {
    2.0 * (0.5 * tau2 + FRAC_PI_4).cos() * (0.5 * tau1).sin()
}

/// A balanced member of the step-function class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepFunction {
    pub tau1: f64,
    pub tau2: f64,
    pub m: f64,
    pub delta: f64,
    pub nu: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StepFunction {
    pub fn new(tau1: f64, tau2: f64, m: f64, delta: f64, nu: f64) -> Result<Self, VariationError> {
        check_taus(tau1, tau2)?;
        if !(nu >= 0.0) {
            return Err(domain("ν", nu, "[0, ∞)"));
        }
        let (beta, gamma) = solve_balance(tau1, tau2, m, delta)?;
        Ok(Self {
            tau1,
            tau2,
            m,
            delta,
            nu,
            beta,
            gamma,
        })
    }

    /// The balanced profile with `m` at the midpoint of `(τ₁, τ₂)`.
    pub fn minimizer(tau1: f64, tau2: f64, delta: f64, nu: f64) -> Result<Self, VariationError> {
        Self::new(tau1, tau2, 0.5 * (tau1 + tau2), delta, nu)
    }

    /// Value on `(0, π]`.
    fn half_value(&self, t: f64) -> f64 {
        let mut v = 0.0;
        if self.tau1 < t && t <= self.m {
            v += self.beta;
        }
        if self.m <= t && t < self.tau2 {
            v -= self.gamma;
        }
        if t == FRAC_PI_2 {
            v += self.delta + self.nu;
        } else if (FRAC_PI_2..=PI).contains(&t) {
            v += self.delta;
        }
        v
    }

    /// Value at any `t`, using `φ(t + π) = −φ(t)`.
    pub fn value(&self, t: f64) -> f64 {
        let mut t = t.rem_euclid(TAU);
        if t == 0.0 {
            t = TAU;
        }
        if t <= PI {
            self.half_value(t)
        } else {
            -self.half_value(t - PI)
        }
    }

    /// Constant pieces `(a, b, value)` covering `(0, π]` up to points.
    fn pieces(&self) -> [(f64, f64, f64); 4] {
        [
            (self.tau1, self.m, self.beta),
            (self.m, self.tau2, -self.gamma),
            (self.tau2, FRAC_PI_2, 0.0),
            (FRAC_PI_2, PI, self.delta),
        ]
    }

    /// `(∫φ sin t, ∫φ cos t)` over `[0, 2π)`, integrated exactly piece by
    /// piece.
    pub fn fourier_residuals(&self) -> (f64, f64) {
        let (mut s, mut c) = (0.0, 0.0);
        for (a, b, v) in self.pieces() {
            s += v * (a.cos() - b.cos());
            c += v * (b.sin() - a.sin());
        }
        // the second half contributes the same by anti-periodicity
        (2.0 * s, 2.0 * c)
    }

    /// Total variation as the sum of all jumps over one period, point values
    /// included.
    pub fn variation_by_steps(&self) -> f64 {
        let half = [self.tau1, self.m, self.tau2, FRAC_PI_2, PI];
        let mut breaks: Vec<f64> = half.iter().flat_map(|&b| [b, b + PI]).collect();
        breaks.sort_by(f64::total_cmp);
        let n = breaks.len();
        let mut total = 0.0;
        for i in 0..n {
            let x = breaks[i];
            let prev = if i == 0 { breaks[n - 1] - TAU } else { breaks[i - 1] };
            let next = if i + 1 == n { breaks[0] + TAU } else { breaks[i + 1] };
            let left = self.value(0.5 * (prev + x));
            let right = self.value(0.5 * (x + next));
            let at = self.value(x);
            total += (at - left).abs() + (right - at).abs();
        }
        total
    }

    /// `4(δ + ν + β + γ)`.
    pub fn variation_closed_form(&self) -> f64 {
        4.0 * (self.delta + self.nu + self.beta + self.gamma)
    }
}

/// Sampler settings for [`sample_admissible_with`].
#[derive(Debug, Clone, Copy)]
pub struct SamplerSpec {
    /// Knots on `[0, π]`, endpoints included.
    pub knot_count: usize,
    pub max_tries: usize,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            knot_count: 12,
            max_tries: 10_000,
        }
    }
}

/// Piecewise-linear anti-periodic profile meeting the sign pattern and the
/// balance conditions, scaled so that its variation is at most `2π`.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleSample {
    /// Knot positions on `[0, π]`, including both endpoints and `π/2`.
    pub knots: Vec<f64>,
    /// Values at the knots; the last equals minus the first.
    pub values: Vec<f64>,
    pub tau1: f64,
    pub tau2: f64,
    /// `min` over `[π/2, π]`.
    pub delta: f64,
    /// `max` over `[π/2, π]` minus `delta`.
    pub nu: f64,
    pub tries: usize,
}

impl AdmissibleSample {
    /// Exact variation over one period: twice the sum of `|slope|·width` on
    /// `[0, π]`.
    pub fn variation(&self) -> f64 {
        2.0 * self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
    }

    /// Exact `(∫f sin t, ∫f cos t)` over `[0, 2π)`.
    pub fn fourier_residuals(&self) -> (f64, f64) {
        pl_moments(&self.knots, &self.values)
    }

    pub fn value(&self, t: f64) -> f64 {
        let t = t.rem_euclid(TAU);
        let (t, sign) = if t > PI { (t - PI, -1.0) } else { (t, 1.0) };
        let i = self.knots.partition_point(|&k| k <= t).clamp(1, self.knots.len() - 1);
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        let (va, vb) = (self.values[i - 1], self.values[i]);
        sign * (va + (vb - va) * (t - a) / (b - a))
    }

    /// Checks the sign pattern knot by knot: negative on `[0, τ₁)`, positive
    /// on `(τ₂, π/2)`, at least `δ > 0` on `[π/2, π]`.
    pub fn sign_pattern_holds(&self) -> bool {
        self.delta > 0.0
            && self.knots.iter().zip(&self.values).all(|(&k, &v)| {
                if k < self.tau1 {
                    v < 0.0
                } else if k > self.tau2 && k < FRAC_PI_2 {
                    v > 0.0
                } else if k >= FRAC_PI_2 {
                    v >= self.delta
                } else {
                    true
                }
            })
    }
}

/// `(∫f sin, ∫f cos)` over a full period of the anti-periodic extension of a
/// piecewise-linear `f` on `[0, π]`.
fn pl_moments(knots: &[f64], values: &[f64]) -> (f64, f64) {
    let (mut s, mut c) = (0.0, 0.0);
    for i in 0..knots.len() - 1 {
        let (a, b) = (knots[i], knots[i + 1]);
        let (va, vb) = (values[i], values[i + 1]);
        let q = (vb - va) / (b - a);
        // antiderivatives −f cos t + f' sin t and f sin t + f' cos t
        s += (-vb * b.cos() + q * b.sin()) - (-va * a.cos() + q * a.sin());
        c += (vb * b.sin() + q * b.cos()) - (va * a.sin() + q * a.cos());
    }
    (2.0 * s, 2.0 * c)
}

pub fn sample_admissible(seed: u64, knot_count: usize) -> Result<AdmissibleSample, VariationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_admissible_with(
        &mut rng,
        &SamplerSpec {
            knot_count,
            ..SamplerSpec::default()
        },
    )
}

pub fn sample_admissible_with<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &SamplerSpec,
) -> Result<AdmissibleSample, VariationError> {
    if spec.knot_count < 8 {
        return Err(domain("knot_count", spec.knot_count as f64, "[8, ∞)"));
    }
    for tries in 1..=spec.max_tries {
        if let Some(mut sample) = draw_candidate(rng, spec.knot_count) {
            sample.tries = tries;
            return Ok(sample);
        }
    }
    Err(VariationError::ExhaustedRejection(spec.max_tries))
}

#[derive(Clone, Copy, PartialEq)]
enum Zone {
    Negative,
    Free,
    Positive,
    Plateau,
}

fn draw_candidate<R: Rng + ?Sized>(rng: &mut R, knot_count: usize) -> Option<AdmissibleSample> {
    let (mut tau1, mut tau2) = (rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..FRAC_PI_2));
    if tau1 > tau2 {
        std::mem::swap(&mut tau1, &mut tau2);
    }
    if tau1 < 0.01 || tau2 - tau1 < 0.02 || tau2 > FRAC_PI_2 - 0.01 {
        return None;
    }

    // fixed knots 0, τ₁, τ₂, π/2, π plus two adjustable knots in (τ₁, τ₂)
    let zones = [
        (0.0, tau1, Zone::Negative),
        (tau1, tau2, Zone::Free),
        (tau2, FRAC_PI_2, Zone::Positive),
        (FRAC_PI_2, PI, Zone::Plateau),
    ];
    let mut interior: Vec<(f64, Zone, bool)> = Vec::new();
    for _ in 0..2 {
        interior.push((rng.random_range(tau1..tau2), Zone::Free, true));
    }
    for _ in 0..knot_count - 7 {
        let (a, b, zone) = zones[rng.random_range(0..zones.len())];
        interior.push((rng.random_range(a..b), zone, false));
    }
    let mut pts: Vec<(f64, Zone, bool)> = vec![
        (0.0, Zone::Negative, false),
        (tau1, Zone::Free, false),
        (tau2, Zone::Free, false),
        (FRAC_PI_2, Zone::Plateau, false),
    ];
    pts.extend(interior);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[1].0 - w[0].0 < 1e-6) || PI - pts[pts.len() - 1].0 < 1e-6 {
        return None;
    }

    let mut knots: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut values: Vec<f64> = Vec::with_capacity(knots.len() + 1);
    let mut adjust = Vec::new();
    for (i, &(t, zone, adjustable)) in pts.iter().enumerate() {
        let v = if t == tau1 || t == tau2 {
            0.0
        } else if adjustable {
            adjust.push(i);
            0.0
        } else {
            match zone {
                Zone::Negative => -rng.random_range(0.05..1.0),
                Zone::Free => rng.random_range(-1.0..1.0),
                Zone::Positive | Zone::Plateau => rng.random_range(0.05..1.0),
            }
        };
        values.push(v);
    }
    knots.push(PI);
    values.push(-values[0]);

    // the moments are linear in the values: r + A·x = 0 for the two
    // adjustable knots
    let r = pl_moments(&knots, &values);
    let hat = |i: usize| {
        let mut e = vec![0.0; knots.len()];
        e[i] = 1.0;
        pl_moments(&knots, &e)
    };
    let (c0, c1) = (hat(adjust[0]), hat(adjust[1]));
    let det = c0.0 * c1.1 - c1.0 * c0.1;
    if det.abs() < 1e-8 {
        return None;
    }
    values[adjust[0]] = (-r.0 * c1.1 + c1.0 * r.1) / det;
    values[adjust[1]] = (-c0.0 * r.1 + r.0 * c0.1) / det;

    let variation = 2.0 * values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    let scale = rng.random_range(0.1..1.0) * TAU / variation;
    values.iter_mut().for_each(|v| *v *= scale);

    let (tau1, tau2) = measure_taus(&knots, &values)?;
    let plateau: Vec<f64> = knots
        .iter()
        .zip(&values)
        .filter(|(&k, _)| k >= FRAC_PI_2)
        .map(|(_, &v)| v)
        .collect();
    let delta = plateau.iter().copied().fold(f64::INFINITY, f64::min);
    let nu = plateau.iter().copied().fold(f64::NEG_INFINITY, f64::max) - delta;
    let sample = AdmissibleSample {
        knots,
        values,
        tau1,
        tau2,
        delta,
        nu,
        tries: 0,
    };
    let (fs, fc) = sample.fourier_residuals();
    if fs.abs() >= 1e-10 || fc.abs() >= 1e-10 || !sample.sign_pattern_holds() {
        return None;
    }
    Some(sample)
}

/// First and last zero of the profile on `[0, π/2)`.
fn measure_taus(knots: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let mut zeros = Vec::new();
    for i in 0..knots.len() - 1 {
        let (a, b) = (knots[i], knots[i + 1]);
        if a >= FRAC_PI_2 {
            break;
        }
        let (va, vb) = (values[i], values[i + 1]);
        if va.abs() <= ZERO_TOL {
            zeros.push(a);
        } else if vb.abs() > ZERO_TOL && va * vb < 0.0 {
            zeros.push(a + (b - a) * va / (va - vb));
        }
    }
    match (zeros.first(), zeros.last()) {
        (Some(&lo), Some(&hi)) if lo < hi && lo > 0.0 => Some((lo, hi)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balance_example() {
        let (beta, gamma) = solve_balance(0.4, 1.0, 0.7, 0.05).unwrap();
        let (r1, r2) = balance_residuals(0.4, 1.0, 0.7, 0.05, beta, gamma);
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
        let s = s_of_m(0.4, 1.0, 0.7, 0.05).unwrap();
        assert!((s - (beta + gamma)).abs() < 1e-11);
        assert!((s - s_min_closed_form(0.4, 1.0, 0.05)).abs() < 1e-12);
    }

    #[test]
    fn pivot_vanishes_at_tau1() {
        let m = 0.4 + 1e-15;
        assert!(matches!(
            solve_balance(0.4, 1.0, m, 0.05),
            Err(VariationError::SingularSystem { .. })
        ));
        assert!(solve_balance(0.4, 1.0, 1.2, 0.05).is_err());
    }

    #[test]
    fn step_function_matches_closed_forms() {
        let f = StepFunction::minimizer(0.3, 0.9, 0.07, 0.02).unwrap();
        let (s, c) = f.fourier_residuals();
        assert!(s.abs() < 1e-12 && c.abs() < 1e-12);
        assert!((f.variation_by_steps() - f.variation_closed_form()).abs() < 1e-12);
        let bound = min_total_variation(0.3, 0.9, 0.07, 0.02).unwrap();
        assert!((f.variation_closed_form() - bound.exact).abs() < 1e-10);
        assert!(bound.relaxed <= bound.exact);
        for t in [0.1, 0.5, 0.8, 1.2, 2.0, 3.0] {
            assert_eq!(f.value(t + PI), -f.value(t));
        }
    }

    #[test]
    fn symmetric_taus_closed_form() {
        let (t1, t2, d) = (0.2, FRAC_PI_2 - 0.2, 0.05);
        let bound = min_total_variation(t1, t2, d, 0.0).unwrap();
        let expected = 4.0 * d + 2.0 * SQRT_2 * d / (0.25 * (t2 - t1)).sin().powi(2);
        assert!((bound.exact - expected).abs() < 1e-12);
    }

    #[test]
    fn gap_identity() {
        for (t1, t2) in [(0.1, 0.5), (0.3, 1.4), (1.0, 1.5)] {
            let direct = (0.5 * (t1 + t2) + FRAC_PI_4).sin() - (0.5 * (t2 - t1) + FRAC_PI_4).sin();
            assert!((relaxation_gap(t1, t2) - direct).abs() < 1e-15);
            assert!(relaxation_gap(t1, t2) >= 0.0);
        }
    }

    #[test]
    fn samples_are_admissible() {
        for seed in 0..50 {
            let s = sample_admissible(seed, 8 + (seed as usize % 6)).unwrap();
            let (fs, fc) = s.fourier_residuals();
            assert!(fs.abs() < 1e-10 && fc.abs() < 1e-10);
            assert!(s.sign_pattern_holds());
            assert!(s.variation() <= TAU + 1e-12);
            let bound = min_total_variation(s.tau1, s.tau2, s.delta, s.nu).unwrap();
            assert!(s.variation() > bound.exact, "seed {seed}");
            assert!((s.value(1.0) + s.value(1.0 + PI)).abs() < 1e-12);
        }
        assert!(sample_admissible(0, 7).is_err());
    }
}
