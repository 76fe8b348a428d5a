//! Fock-space simulation of amplified macroscopic quantum superpositions
//! under photon loss.

pub mod amplifiers;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod loss;
pub mod metrics;
pub mod ofilter;
pub mod special;

pub use error::{Error, Result};
