use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::bounds::DomainError;
use crate::curve::CurveError;
use crate::projection::ProjectionError;
use crate::spectral::SpectralError;
use crate::variation::VariationError;

/// Any failure surfaced by the library or the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Variation(#[from] VariationError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{failed} of {total} checks failed")]
    CheckFailed { failed: usize, total: usize },
}
