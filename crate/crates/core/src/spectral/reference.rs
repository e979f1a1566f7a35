//! Finite-difference reference for the ground-state energy.
//!
//! Second-order central differences with periodic wrap-around, solved by
//! inverse iteration with a cyclic tridiagonal solver, then Richardson
//! extrapolated over two grid sizes. It shares nothing with the Galerkin
//! path except the curve inversion.

use std::f64::consts::TAU;

use crate::curve::{CurveError, FourierCurve};

/// Lowest eigenvalue of the periodic FD Hamiltonian on `n` points.
pub fn fd_ground_energy(curve: &FourierCurve, n: usize) -> Result<f64, CurveError> {
    let sampled = curve.invert_phi(n)?;
    let h = TAU / n as f64;
    let off = -1.0 / (h * h);
    let diag: Vec<f64> = sampled
        .kappa
        .iter()
        .map(|k| 2.0 / (h * h) + k * k)
        .collect();

    // xᵀHx in difference form avoids cancellation against the 2/h² diagonal
    let rq = |x: &[f64]| -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let d = (x[(j + 1) % n] - x[j]) / h;
            num += d * d + sampled.kappa[j] * sampled.kappa[j] * x[j] * x[j];
            den += x[j] * x[j];
        }
        num / den
    };

    let mut x = vec![1.0; n];
    let mut lambda = rq(&x);
    for _ in 0..5000 {
        let mut y = solve_cyclic(&diag, off, &x);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let next = rq(&y);
        x = y;
        if (next - lambda).abs() <= 1e-14 * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}

/// Richardson extrapolation `(4λ(2n) − λ(n)) / 3` of the O(h²) FD energy.
pub fn fd_ground_energy_extrapolated(curve: &FourierCurve, n: usize) -> Result<f64, CurveError> {
    let coarse = fd_ground_energy(curve, n)?;
    let fine = fd_ground_energy(curve, 2 * n)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Solves `A x = rhs` for the symmetric cyclic tridiagonal matrix with
/// diagonal `diag` and constant off-diagonal `off` (Sherman–Morrison).
fn solve_cyclic(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= off * off / gamma;
    let x = solve_tridiagonal(&b, off, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = off;
    let z = solve_tridiagonal(&b, off, &u);
    let fact = (x[0] + off * x[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiagonal(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = off / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off * c[i - 1];
        c[i] = off / m;
        d[i] = (rhs[i] - off * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_solver_inverts_operator() {
        let n = 17;
        let diag: Vec<f64> = (0..n).map(|j| 3.0 + 0.1 * j as f64).collect();
        let off = -1.0;
        let rhs: Vec<f64> = (0..n).map(|j| (j as f64).sin()).collect();
        let x = solve_cyclic(&diag, off, &rhs);
        for j in 0..n {
            let ax = diag[j] * x[j] + off * (x[(j + n - 1) % n] + x[(j + 1) % n]);
            assert!((ax - rhs[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_energy_is_one() {
        let e = fd_ground_energy(&FourierCurve::circle(), 256).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }
}
