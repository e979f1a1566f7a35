//! Property suites behind `ovalbound verify`.
//!
//! Each suite draws from its own ChaCha stream, selected by hashing the suite
//! label, so adding or reordering suites never changes another suite's
//! inputs. Every check reports its worst-case margin over all draws.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::Check;
use crate::analytic;
use crate::bounds;
use crate::curve::{random_curve, FourierCurve, Parity, RandomCurveSpec, SampledCurve};
use crate::error::Error;
use crate::numeric::{periodic_grid, periodic_inner, periodic_trapezoid};
use crate::projection::{self, IShape};
use crate::spectral::{self, reference, SpectralError, SpectralSolution};
use crate::variation::{self, SamplerSpec, StepFunction};

/// Convexity margin for curves fed to the spectral solvers. It keeps `κ ≤ 4`
/// so that modest bases resolve `κ²` to full precision.
pub const SPECTRAL_EPS_CONVEX: f64 = 0.25;
pub const SPECTRAL_MODES: usize = 64;
pub const SPECTRAL_MAX_MODES: usize = 384;
pub const SPECTRAL_RESIDUAL: f64 = 1e-8;
pub const SPECTRAL_POINTS: usize = 1024;
pub const FD_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub n_curves: usize,
    pub n_samples: usize,
}

pub struct SuiteOutcome {
    pub label: &'static str,
    pub result: Result<Vec<Check>, Error>,
}

type Suite = fn(&mut ChaCha8Rng, &VerifyConfig) -> Result<Vec<Check>, Error>;

/// Suites in report order.
const SUITES: &[(&str, Suite)] = &[
    ("analytic.chain", analytic_chain),
    ("analytic.pipeline", analytic_pipeline),
    ("bounds.estimates", bounds_estimates),
    ("bounds.infmax", bounds_infmax),
    ("bounds.monotonicity", bounds_monotonicity),
    ("curve.decomposition", curve_decomposition),
    ("curve.inversion", curve_inversion),
    ("projection.critical_hypothesis", projection_critical_hypothesis),
    ("projection.lemmas", projection_lemmas),
    ("projection.three_angles", projection_three_angles),
    ("spectral.fd_oracle", spectral_fd_oracle),
    ("spectral.ground_state", spectral_ground_state),
    ("spectral.pi_periodic", spectral_pi_periodic),
    ("variation.class_f", variation_class_f),
    ("variation.lemma1", variation_lemma1),
    ("variation.lemma2", variation_lemma2),
    ("variation.midpoint", variation_midpoint),
];

pub fn tolerances() -> Vec<(&'static str, f64)> {
    vec![
        ("antiperiodicity", 1e-12),
        ("fourier_condition", 1e-10),
        ("winding_closure", 1e-8),
        ("spectral_residual", SPECTRAL_RESIDUAL),
        ("rayleigh_consistency", 1e-9),
        ("fd_agreement", 1e-7),
        ("pi_periodic_floor", 1e-8),
        ("three_angle_identity", 1e-10),
        ("three_angle_energy", 1e-8),
        ("lambda_point", 1e-6),
        ("projection_zero", 1e-9),
        ("energy_identity", 1e-10),
        ("estimate_one", 1e-14),
        ("estimate_two", 1e-12),
        ("balance_residual", 1e-12),
        ("variation_closed_form", 1e-10),
        ("lemma1_slack", 1e-9),
        ("spectral_eps_convex", SPECTRAL_EPS_CONVEX),
    ]
}

/// 64-bit FNV-1a hash of a suite label.
pub fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn suite_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label));
    rng
}

pub fn run_all(config: &VerifyConfig) -> Vec<SuiteOutcome> {
    SUITES
        .par_iter()
        .map(|&(label, suite)| {
            let mut rng = suite_rng(config.seed, label);
            SuiteOutcome {
                label,
                result: suite(&mut rng, config),
            }
        })
        .collect()
}

/// Running minimum of a margin across draws.
struct Worst {
    name: &'static str,
    margin: f64,
}

impl Worst {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            margin: f64::INFINITY,
        }
    }

    fn margin(&mut self, m: f64) {
        // NaN must fail, so it replaces any finite margin
        if m.is_nan() || m < self.margin {
            self.margin = if m.is_nan() { f64::NEG_INFINITY } else { m };
        }
    }

    fn within(&mut self, error: f64, tol: f64) {
        self.margin(tol - error);
    }

    fn holds(&mut self, ok: bool) {
        self.margin(if ok { 1.0 } else { -1.0 });
    }

    fn finish(self) -> Check {
        // an empty suite has nothing to report; treat it as a failure
        let margin = if self.margin.is_finite() { self.margin } else { -1.0 };
        Check::from_margin(self.name, margin)
    }
}

pub fn spectral_curve_spec(parity: Parity) -> RandomCurveSpec {
    RandomCurveSpec {
        eps_convex: SPECTRAL_EPS_CONVEX,
        parity,
        ..RandomCurveSpec::default()
    }
}

/// Ground state with the basis grown by half from [`SPECTRAL_MODES`] until
/// the eigenvalue has converged and the residual meets [`SPECTRAL_RESIDUAL`],
/// or [`SPECTRAL_MAX_MODES`] is reached.
pub fn solve(curve: &FourierCurve) -> Result<(SampledCurve, SpectralSolution), Error> {
    let sampled = curve.invert_phi(SPECTRAL_POINTS)?;
    let mut modes = SPECTRAL_MODES;
    loop {
        let last = modes >= SPECTRAL_MAX_MODES;
        match spectral::ground_state(&sampled, modes) {
            Ok(solution) if solution.residual < SPECTRAL_RESIDUAL || last => {
                return Ok((sampled, solution));
            }
            Err(e) if last || !matches!(e, SpectralError::ConvergenceFailure { .. }) => {
                return Err(e.into());
            }
            _ => modes = (modes + modes / 2).min(SPECTRAL_MAX_MODES),
        }
    }
}

fn analytic_chain(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let pipeline = analytic::cardano_min()?;
    let d_min = analytic::compute_delta_min();
    let n = 10_000;
    let mut chain = Worst::new("b2_on_l_dominates_chain");
    let mut above = Worst::new("b2_on_l_exceeds_0.81");
    let mut decreasing = Worst::new("level_set_strictly_decreasing");
    let mut prev_nu = f64::INFINITY;
    for j in 0..n {
        let d = d_min + (FRAC_PI_2 - d_min) * j as f64 / n as f64;
        let on_l = analytic::b2_on_l(d)?;
        let lin = analytic::b2_on_l_linearized(d);
        let minor = analytic::minorant(d);
        let scale = 1e-14;
        chain.margin((on_l - lin + scale).min(lin - minor + scale).min(minor - pipeline.final_value + scale));
        above.margin(on_l - analytic::TARGET);
        let nu = analytic::level_set_nu(d)?;
        decreasing.margin(prev_nu - nu);
        prev_nu = nu;
    }
    let mut theorem = Worst::new("max_b1_b2_exceeds_0.81");
    for _ in 0..cfg.n_samples {
        let nu = rng.random_range(0.0..=1.0);
        let d = rng.random_range(bounds::DELTA_MARGIN..FRAC_PI_2);
        let p = bounds::surface_point(nu, d);
        theorem.margin(p.bmax - analytic::TARGET);
    }
    Ok(vec![chain.finish(), above.finish(), decreasing.finish(), theorem.finish()])
}

fn analytic_pipeline(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let p = analytic::cardano_min()?;
    let tangents = analytic::tangent_majorant_checks(10_000)?;
    let (brute_at, brute_min) = analytic::brute_minorant_min(1_000_000);
    let mut checks = vec![
        Check::within("cubic_residual", p.cubic_residual.abs(), 1e-9),
        Check::within("delta0_matches_brute_force", (brute_at - p.delta0).abs(), 1e-5),
        Check::from_margin("brute_force_not_below_cardano", brute_min - p.final_value + 1e-15),
        Check::from_margin("final_value_exceeds_0.81", p.final_value - analytic::TARGET),
        Check::flag("tangent_majorants_hold", tangents.all_hold()),
    ];
    for d in [1.2, 1.3, 1.4, 1.5] {
        let e = (analytic::b2_on_l(d)? - analytic::b2_on_l_explicit(d)?).abs();
        checks.push(Check::within(format!("b2_on_l_forms_at_{d}"), e, 1e-13));
    }
    Ok(checks)
}

fn bounds_estimates(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let mut est1 = Worst::new("estimate_one_is_b1");
    let mut est2 = Worst::new("estimate_two_constant");
    let mut grouped = Worst::new("b2_grouping");
    for _ in 0..cfg.n_samples {
        let nu = rng.random_range(0.0..FRAC_PI_2);
        let d = rng.random_range(1e-3..FRAC_PI_2);
        let nt = bounds::nu_tilde_from_nu(nu);
        let chain = (1.0 + 2.0 * (1.0 - 2.0 * nu / PI) * bounds::g(d)?).powi(-2);
        est1.within((chain - bounds::b1(nt, d)?).abs(), 1e-14);
        grouped.within((bounds::b2(nt, d)? - bounds::b2_grouped(nt, d)?).abs(), 1e-14);
        let i1 = rng.random_range(-PI..PI);
        let i2 = i1 + rng.random_range(1e-3..FRAC_PI_2);
        est2.within(
            (bounds::estimate_two_weight(i1, i2) - bounds::estimate_two_constant(i2 - i1)).abs(),
            1e-12,
        );
    }
    Ok(vec![est1.finish(), est2.finish(), grouped.finish()])
}

fn bounds_infmax(_: &mut ChaCha8Rng, _: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let s = bounds::optimize_infmax(bounds::DEFAULT_COARSE, bounds::DEFAULT_REFINE_TOL)?;
    let mut cert = Worst::new("grid_certificate");
    for p in &s.points {
        cert.margin(p.bmax - (s.value - bounds::DEFAULT_REFINE_TOL));
    }
    let mut zero_line = Worst::new("zero_nu_line_is_one");
    for &d in &s.delta_grid {
        zero_line.within((bounds::surface_point(0.0, d).bmax - 1.0).abs(), 1e-15);
    }
    Ok(vec![
        Check::within("value_near_0.8246", (s.value - 0.8246).abs(), 5e-4),
        Check::within("argmin_on_crossing", (s.argmin.b1 - s.argmin.b2).abs(), 1e-3),
        cert.finish(),
        zero_line.finish(),
        Check::within(
            "crude_bound_closed_form",
            (bounds::crude_bound() - bounds::crude_bound_closed_form()).abs(),
            1e-12,
        ),
    ])
}

fn bounds_monotonicity(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let mut b1_nu = Worst::new("b1_decreasing_in_nu");
    let mut b2_nu = Worst::new("b2_increasing_in_nu");
    let mut b1_delta = Worst::new("b1_decreasing_in_delta");
    let mut g_inc = Worst::new("g_increasing");
    let draws = 10 * cfg.n_samples;
    for _ in 0..draws {
        let (mut n1, mut n2) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let (mut d1, mut d2) = (
            rng.random_range(bounds::DELTA_MARGIN..FRAC_PI_2 - bounds::DELTA_MARGIN),
            rng.random_range(bounds::DELTA_MARGIN..FRAC_PI_2 - bounds::DELTA_MARGIN),
        );
        if n1 > n2 {
            std::mem::swap(&mut n1, &mut n2);
        }
        if d1 > d2 {
            std::mem::swap(&mut d1, &mut d2);
        }
        if n1 == n2 || d1 == d2 || n1 == 0.0 {
            continue;
        }
        b1_nu.margin(bounds::b1(n1, d1)? - bounds::b1(n2, d1)?);
        b2_nu.margin(bounds::b2(n2, d1)? - bounds::b2(n1, d1)?);
        b1_delta.margin(bounds::b1(n1, d1)? - bounds::b1(n1, d2)?);
        g_inc.margin(bounds::g(d2)? - bounds::g(d1)?);
    }
    Ok(vec![b1_nu.finish(), b2_nu.finish(), b1_delta.finish(), g_inc.finish()])
}

fn curve_decomposition(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = RandomCurveSpec::default();
    let mut anti = Worst::new("f_antiperiodic_g_periodic");
    let mut recon = Worst::new("reconstructs_phi_inverse");
    let mut fourier = Worst::new("f_fourier_condition");
    let mut slope = Worst::new("f_slope_bounded_by_one_plus_g_slope");
    let mut count = Worst::new("at_least_six_critical_angles");
    let mut antipodal = Worst::new("critical_angles_antipodal");
    let mut half = Worst::new("three_critical_angles_per_half_period");
    for _ in 0..cfg.n_curves {
        let curve = random_curve(rng, &spec)?;
        let p = curve.decompose();
        let mut s_moment = Vec::with_capacity(p.grid.len());
        let mut c_moment = Vec::with_capacity(p.grid.len());
        for (j, &t) in p.grid.iter().enumerate() {
            anti.within((p.f(t) + p.f(t + PI)).abs().max((p.g(t) - p.g(t + PI)).abs()), 1e-12);
            let r = p.f_samples[j] + p.g_samples[j] + t + curve.c_offset() - curve.phi_inverse(t);
            recon.within(r.abs(), 1e-12);
            slope.margin(1.0 + p.g_prime(t) - p.f_prime(t).abs() + 1e-12);
            s_moment.push(p.f_samples[j] * t.sin());
            c_moment.push(p.f_samples[j] * t.cos());
        }
        let fs = periodic_trapezoid(&s_moment).abs().max(periodic_trapezoid(&c_moment).abs());
        fourier.within(fs, 1e-10);
        let zeros = p.critical_angles()?;
        count.margin(zeros.len() as f64 - 5.5);
        let near = |x: f64| {
            zeros.iter().any(|&z| {
                let d = (z - x).rem_euclid(TAU);
                d.min(TAU - d) < 1e-9
            })
        };
        antipodal.holds(zeros.iter().all(|&z| near(z + PI)));
        let mut starts: Vec<f64> = zeros.clone();
        starts.extend((0..8).map(|_| rng.random_range(0.0..TAU)));
        for s in starts {
            half.margin(crate::curve::count_in_half_period(&zeros, s) as f64 - 2.5);
        }
    }
    Ok(vec![
        anti.finish(),
        recon.finish(),
        fourier.finish(),
        slope.finish(),
        count.finish(),
        antipodal.finish(),
        half.finish(),
    ])
}

fn curve_inversion(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = spectral_curve_spec(Parity::Any);
    let mut winding = Worst::new("winding_is_two_pi");
    let mut closure = Worst::new("closure_residuals");
    let mut positive = Worst::new("curvature_positive");
    for _ in 0..cfg.n_curves {
        let sc = random_curve(rng, &spec)?.invert_phi(2048)?;
        winding.within((sc.winding() - TAU).abs(), 1e-8);
        let (cx, cy) = sc.closure_residuals();
        closure.within(cx.abs().max(cy.abs()), 1e-8);
        positive.margin(sc.kappa.iter().copied().fold(f64::INFINITY, f64::min));
    }
    Ok(vec![winding.finish(), closure.finish(), positive.finish()])
}

fn projection_critical_hypothesis(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    // a dominant fifth harmonic puts a critical angle in every quarter turn
    let mut energy = Worst::new("energy_at_least_one");
    let mut used = 0usize;
    for _ in 0..cfg.n_curves.min(20) {
        let amp = rng.random_range(0.01..0.03);
        let phase = rng.random_range(0.0..TAU);
        let mut a = vec![(5, amp * phase.cos())];
        let mut b = vec![(5, amp * phase.sin())];
        for n in [2, 3, 4, 6, 7] {
            let r = 0.002 / (n * n) as f64;
            a.push((n, rng.random_range(-r..=r)));
            b.push((n, rng.random_range(-r..=r)));
        }
        let curve = FourierCurve::from_coefficients(&a, &b)?;
        curve.validate(SPECTRAL_EPS_CONVEX)?;
        let zeros = curve.decompose().critical_angles()?;
        let gaps_ok = (0..zeros.len()).all(|i| {
            let next = if i + 1 == zeros.len() { zeros[0] + TAU } else { zeros[i + 1] };
            next - zeros[i] < FRAC_PI_2
        });
        if !gaps_ok {
            continue;
        }
        used += 1;
        let (sc, sol) = solve(&curve)?;
        let data = projection::build_projection(&sc, &sol.psi, projection::DEFAULT_ANGLES)?;
        energy.margin(data.energy() - (1.0 - 1e-6));
    }
    Ok(vec![energy.finish(), Check::from_margin("hypothesis_curves_found", used as f64)])
}

fn projection_lemmas(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = spectral_curve_spec(Parity::Any);
    let mut lower = Worst::new("i_above_dirichlet_bound");
    let mut periodic = Worst::new("i_pi_periodic");
    let mut energy_rq = Worst::new("energy_is_rayleigh_quotient");
    let mut bracket = Worst::new("energy_between_extrema_of_i");
    let mut pair = Worst::new("energy_above_right_angle_pair_min");
    let mut extrema = Worst::new("one_extrema_pair");
    let mut crossings = Worst::new("four_level_crossings");
    let mut t_lambda = Worst::new("lambda_point_matches_lambda");
    let mut zeros = Worst::new("h_t_vanishes_at_tangent_points");
    for _ in 0..cfg.n_curves {
        let curve = random_curve(rng, &spec)?;
        let (sc, sol) = solve(&curve)?;
        let data = projection::build_projection(&sc, &sol.psi, projection::DEFAULT_ANGLES)?;
        let profile = curve.decompose();
        let n = data.n_angles();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let energy = data.energy();
        for (j, (&t, &i)) in data.t_grid.iter().zip(&data.i_samples).enumerate() {
            lower.margin(i - projection::projection_lower_bound(profile.f(t)) + 1e-12);
            periodic.within((i - data.i_samples[(j + n / 2) % n]).abs(), 1e-10);
            pair.margin(energy - i.min(data.i_at(t + FRAC_PI_2)) + 1e-12);
            lo = lo.min(i);
            hi = hi.max(i);
        }
        bracket.margin((energy - lo).min(hi - energy) + 1e-12);
        energy_rq.within((energy - spectral::rayleigh_quotient(&sc, &sol.psi)?).abs(), 1e-10);
        match projection::classify_i(&data) {
            Ok(IShape::TwoExtremaPairs { i_min, i_max, .. }) => {
                extrema.holds(true);
                for level in [1.0, sol.lambda] {
                    if i_min < level && level < i_max {
                        crossings.holds(projection::level_crossings(&data, level).len() == 4);
                    }
                }
            }
            Ok(IShape::Constant { .. }) => extrema.holds(true),
            Err(_) => extrema.holds(false),
        }
        match projection::lambda_equal_point(&data) {
            Ok(p) => t_lambda.within((p.value - sol.lambda).abs(), 1e-6),
            Err(_) => t_lambda.holds(false),
        }
        for _ in 0..4 {
            let t = rng.random_range(0.0..TAU);
            for angle in [t, t + PI] {
                let s = curve.phi_inverse(angle).rem_euclid(TAU);
                let phi = curve.phi_at(s)?;
                zeros.within(projection::h_t(sol.psi_at(s), phi, t).abs(), 1e-9);
            }
        }
    }
    if crossings.margin == f64::INFINITY {
        crossings.holds(true);
    }
    Ok(vec![
        lower.finish(),
        periodic.finish(),
        energy_rq.finish(),
        bracket.finish(),
        pair.finish(),
        extrema.finish(),
        crossings.finish(),
        t_lambda.finish(),
        zeros.finish(),
    ])
}

/// Three angles with pairwise `|sin(θᵢ − θⱼ)| ≥ 0.1`, so the weights stay
/// of moderate size and an absolute tolerance is meaningful.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    loop {
        let (a, b, c) = (
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        );
        if [(a, b), (a, c), (b, c)].iter().all(|(x, y)| (x - y).sin().abs() >= 0.1) {
            return (a, b, c);
        }
    }
}

fn projection_three_angles(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let mut identity = Worst::new("weights_reconstruct_n");
    for _ in 0..cfg.n_samples {
        let (a, b, c) = random_triple(rng);
        let w = projection::three_angle_weights(a, b, c)?;
        let r = w.reconstruct();
        let err = (0..3).map(|i| (r[i] - projection::N[i]).abs()).fold(0.0, f64::max);
        identity.within(err, 1e-10);
    }
    let spec = spectral_curve_spec(Parity::Any);
    let mut energy = Worst::new("three_angle_energy_is_e");
    for _ in 0..cfg.n_curves.min(20) {
        let curve = random_curve(rng, &spec)?;
        let (sc, sol) = solve(&curve)?;
        let data = projection::build_projection(&sc, &sol.psi, projection::DEFAULT_ANGLES)?;
        let (a, b, c) = random_triple(rng);
        let w = projection::three_angle_weights(a, b, c)?;
        energy.within((projection::three_angle_energy(&data, &w)? - data.energy()).abs(), 1e-8);
    }
    Ok(vec![identity.finish(), energy.finish()])
}

fn spectral_fd_oracle(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = spectral_curve_spec(Parity::Any);
    let mut agree = Worst::new("galerkin_matches_fd");
    for _ in 0..cfg.n_curves.min(50) {
        let curve = random_curve(rng, &spec)?;
        let (_, sol) = solve(&curve)?;
        let fd = reference::fd_ground_energy_extrapolated(&curve, FD_POINTS)?;
        agree.within((sol.lambda - fd).abs(), 1e-7);
    }
    Ok(vec![agree.finish()])
}

fn spectral_ground_state(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = spectral_curve_spec(Parity::Any);
    let mut residual = Worst::new("residual");
    let mut positive = Worst::new("psi_positive");
    let mut mass = Worst::new("psi_normalized");
    let mut rq = Worst::new("rayleigh_quotient_of_psi");
    let mut variational = Worst::new("perturbations_not_below_lambda");
    let mut convergence = Worst::new("mode_refinement_converges");
    for i in 0..cfg.n_curves {
        let curve = random_curve(rng, &spec)?;
        let (sc, sol) = solve(&curve)?;
        residual.within(sol.residual, SPECTRAL_RESIDUAL);
        positive.margin(sol.psi.iter().copied().fold(f64::INFINITY, f64::min));
        mass.within((periodic_inner(&sol.psi, &sol.psi) - 1.0).abs(), 1e-10);
        rq.within((spectral::rayleigh_quotient(&sc, &sol.psi)? - sol.lambda).abs(), 1e-9);
        for _ in 0..10 {
            let k = rng.random_range(0..8) as f64;
            let amp = rng.random_range(-0.1..0.1);
            let shift = rng.random_range(0.0..TAU);
            let eta: Vec<f64> = sol
                .psi
                .iter()
                .zip(periodic_grid(sc.n_points))
                .map(|(p, s)| p + amp * (k * s + shift).cos())
                .collect();
            variational.margin(spectral::rayleigh_quotient(&sc, &eta)? - sol.lambda + 1e-9);
        }
        if i < 5 {
            // successive differences shrink until they reach round-off
            let lambdas: Vec<f64> = [28, 32, 40, 48, 64]
                .iter()
                .map(|&m| spectral::ground_state_with(&sc, spectral::SpectralOptions { n_modes: m, rtol: 1.0 }).map(|s| s.lambda))
                .collect::<Result<_, _>>()?;
            let diffs: Vec<f64> = lambdas.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
            for w in diffs.windows(2) {
                convergence.holds(w[1] <= w[0] || w[1] < 1e-12);
            }
        }
    }
    Ok(vec![
        residual.finish(),
        positive.finish(),
        mass.finish(),
        rq.finish(),
        variational.finish(),
        convergence.finish(),
    ])
}

fn spectral_pi_periodic(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = spectral_curve_spec(Parity::EvenOnly);
    let mut floor = Worst::new("lambda_at_least_one");
    for _ in 0..cfg.n_curves {
        let (_, sol) = solve(&random_curve(rng, &spec)?)?;
        floor.margin(sol.lambda - (1.0 - 1e-8));
    }
    Ok(vec![floor.finish()])
}

fn random_taus<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let (a, b) = (rng.random_range(0.0..FRAC_PI_2), rng.random_range(0.0..FRAC_PI_2));
        let (t1, t2) = if a < b { (a, b) } else { (b, a) };
        if t1 > 1e-3 && t2 - t1 > 1e-2 && t2 < FRAC_PI_2 - 1e-3 {
            return (t1, t2);
        }
    }
}

fn variation_class_f(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let mut balance = Worst::new("balance_equations");
    let mut fourier = Worst::new("fourier_residuals");
    let mut steps = Worst::new("step_sum_matches_closed_form");
    let mut minimum = Worst::new("minimizer_variation_matches_bound");
    let mut relaxed = Worst::new("relaxed_not_above_exact");
    let mut gap = Worst::new("relaxation_gap_identity");
    let mut anti = Worst::new("antiperiodic");
    for _ in 0..cfg.n_samples {
        let (t1, t2) = random_taus(rng);
        let delta = rng.random_range(0.01..0.2);
        let nu = rng.random_range(0.0..0.2);
        let m = rng.random_range(t1 + 0.1 * (t2 - t1)..t2 - 0.1 * (t2 - t1));
        let f = StepFunction::new(t1, t2, m, delta, nu)?;
        let (r1, r2) = variation::balance_residuals(t1, t2, m, delta, f.beta, f.gamma);
        balance.within(r1.abs().max(r2.abs()), 1e-12);
        let (fs, fc) = f.fourier_residuals();
        fourier.within(fs.abs().max(fc.abs()), 1e-10);
        steps.within((f.variation_by_steps() - f.variation_closed_form()).abs(), 1e-10);
        let t = rng.random_range(0.0..PI);
        anti.within((f.value(t) + f.value(t + PI)).abs(), 0.0 + 1e-15);

        let best = StepFunction::minimizer(t1, t2, delta, nu)?;
        let bound = variation::min_total_variation(t1, t2, delta, nu)?;
        minimum.within((best.variation_by_steps() - bound.exact).abs(), 1e-10 * bound.exact.max(1.0));
        relaxed.margin(bound.exact - bound.relaxed + 1e-12);
        let direct = (0.5 * (t1 + t2) + std::f64::consts::FRAC_PI_4).sin()
            - (0.5 * (t2 - t1) + std::f64::consts::FRAC_PI_4).sin();
        gap.within((variation::relaxation_gap(t1, t2) - direct).abs(), 1e-14);
    }
    Ok(vec![
        balance.finish(),
        fourier.finish(),
        steps.finish(),
        minimum.finish(),
        relaxed.finish(),
        gap.finish(),
        anti.finish(),
    ])
}

fn variation_lemma1(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let spec = RandomCurveSpec::default();
    let mut bound = Worst::new("variation_at_most_two_pi");
    for _ in 0..cfg.n_curves {
        let v = random_curve(rng, &spec)?.decompose().total_variation();
        bound.margin(TAU + 1e-9 - v);
    }
    Ok(vec![bound.finish()])
}

fn variation_lemma2(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let mut lemma = Worst::new("sample_variation_exceeds_bound");
    let mut residual = Worst::new("sample_fourier_residuals");
    let mut pattern = Worst::new("sample_sign_pattern");
    let mut dual = Worst::new("dual_use_bound");
    for i in 0..cfg.n_samples {
        let spec = SamplerSpec {
            knot_count: 8 + i % 9,
            ..SamplerSpec::default()
        };
        let s = variation::sample_admissible_with(rng, &spec)?;
        let (fs, fc) = s.fourier_residuals();
        residual.within(fs.abs().max(fc.abs()), 1e-10);
        pattern.holds(s.sign_pattern_holds());
        let b = variation::min_total_variation(s.tau1, s.tau2, s.delta, s.nu)?;
        lemma.margin(s.variation() - b.exact);
        for k in 0..=8 {
            let d = (s.tau2 - s.tau1) + (FRAC_PI_2 - (s.tau2 - s.tau1)) * k as f64 / 8.0;
            dual.margin(bounds::dual_use_delta_bound(s.nu, d)? - s.delta);
        }
    }
    Ok(vec![lemma.finish(), residual.finish(), pattern.finish(), dual.finish()])
}

/// Largest distance from the midpoint to the grid argmin of `S(m)`, in grid
/// steps, and the relative mismatch against the closed-form minimum.
pub fn midpoint_argmin(t1: f64, t2: f64, delta: f64, grid: usize) -> Result<(f64, f64), Error> {
    // odd point count, so the midpoint is itself a grid point
    let n = grid | 1;
    let h = (t2 - t1) / (n + 1) as f64;
    let mut best = (f64::NAN, f64::INFINITY);
    for j in 1..=n {
        let m = t1 + j as f64 * h;
        let s = variation::s_of_m(t1, t2, m, delta)?;
        if s < best.1 {
            best = (m, s);
        }
    }
    let steps = (best.0 - 0.5 * (t1 + t2)).abs() / h;
    let exact = variation::s_min_closed_form(t1, t2, delta);
    let mismatch = (best.1 - exact).abs() / exact;
    Ok((steps, mismatch))
}

fn variation_midpoint(rng: &mut ChaCha8Rng, cfg: &VerifyConfig) -> Result<Vec<Check>, Error> {
    let mut location = Worst::new("argmin_at_midpoint");
    let mut value = Worst::new("closed_form_minimum");
    for _ in 0..cfg.n_samples.min(1000) {
        let (t1, t2) = random_taus(rng);
        let delta = rng.random_range(0.01..0.5);
        let (steps, mismatch) = midpoint_argmin(t1, t2, delta, 10_001)?;
        location.margin(1.0 - steps);
        value.within(mismatch, 1e-9);
    }
    Ok(vec![location.finish(), value.finish()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_by_label() {
        let a: u64 = suite_rng(1, "a").random();
        let b: u64 = suite_rng(1, "b").random();
        let a2: u64 = suite_rng(1, "a").random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
    }

    #[test]
    fn suites_are_sorted_by_label() {
        let labels: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        assert_eq!(labels, sorted);
    }
}
