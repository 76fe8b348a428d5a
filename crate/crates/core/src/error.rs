use thiserror::Error;

use crate::fock::ModeLabel;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis dimension {dim} exceeds the limit of {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("block of dimension {dim} exceeds the dense limit of {max}")]
    BlockTooLarge { dim: usize, max: usize },

    #[error("invalid mode list: {0}")]
    InvalidModes(String),

    #[error("mode sets overlap on {0}")]
    OverlappingModes(ModeLabel),

    #[error("mode {0} is not part of the basis")]
    UnknownMode(ModeLabel),

    #[error("operands live on different bases")]
    BasisMismatch,

    #[error("block label is not conserved (offending entry magnitude {magnitude:e})")]
    LabelNotConserved { magnitude: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("|alpha|^2 = {alpha_sq} is too large for cutoff {cutoff} (needs |alpha|^2 <= cutoff/2)")]
    TailGuard { alpha_sq: f64, cutoff: usize },

    #[error("the requested superposition is the zero vector")]
    ZeroVector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypergeometric series did not converge after {terms} terms")]
    Hyp2F1NonConvergence { terms: usize },

    #[error("hypergeometric parameter c = {c} is a non-positive integer")]
    Hyp2F1Pole { c: f64 },

    #[error("traces differ by {difference:e}, more than the allowed 1e-6")]
    TraceMismatch { difference: f64 },

    #[error("clipped negative eigenvalue mass {mass:e} exceeds 1e-6")]
    ClippedMass { mass: f64 },

    #[error("filter accepted nothing (P_filt = {p_filt:e})")]
    FilteredToNothing { p_filt: f64 },

    #[error("operator container: {0}")]
    Container(String),
}

pub type Result<T> = std::result::Result<T, Error>;
