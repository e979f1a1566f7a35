//! Numerical machinery for lower bounds on the ground-state energy of
//! `−d²/ds² + κ²(s)` on closed convex curves of length `2π`.
//!
//! * [`curve`]: Fourier-parameterized curves, validation, inversion, `f`/`g` split
//! * [`spectral`]: Galerkin ground state and a finite-difference reference
//! * [`projection`]: energy projections `I(t)` and the three-angle decomposition
//! * [`bounds`]: the `B1`/`B2` surfaces and their inf-max
//! * [`analytic`]: the closed-form `0.81` pipeline
//! * [`variation`]: total-variation minimizers and admissible-profile sampling
//! * [`cli`]: reports and subcommands behind the `ovalbound` binary

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bounds;
pub mod cli;
pub mod curve;
pub mod error;
pub mod numeric;
pub mod projection;
pub mod spectral;
pub mod variation;

pub use curve::{FourierCurve, ProfileDecomposition, SampledCurve};
pub use error::Error;
pub use spectral::SpectralSolution;
