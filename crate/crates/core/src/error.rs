use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("random regular graph generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("matrix is not unitary: max |σσ* - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("numerical failure at k = {k}: {reason}")]
    Numerical { k: f64, reason: String },

    #[error("path enumeration exceeded the cap of {cap} paths")]
    PathCapExceeded { cap: usize },

    #[error("quadrature did not converge (estimated error {error:e})")]
    Quadrature { error: f64 },

    #[error("k = {k} is within {distance:e} of a tangent pole on edge {edge}")]
    PoleProximity { k: f64, edge: usize, distance: f64 },

    #[error("found {found} roots, {needed} required")]
    InsufficientRoots { found: usize, needed: usize },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(k: f64, reason: impl Into<String>) -> Self {
        Error::Numerical { k, reason: reason.into() }
    }
}
