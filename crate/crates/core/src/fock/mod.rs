//! Truncated multi-mode Fock spaces, kets and block-sparse density operators.

mod basis;
mod container;
mod label;
pub mod mode;
mod operator;
mod state;

pub use container::{OperatorContainer, BINARY_MAGIC, CONTAINER_FORMAT, CONTAINER_VERSION};
pub use basis::{enumerate_basis, MultiModeBasis, DEFAULT_MAX_DIMENSION, MAX_MODES};
pub use label::{BlockKey, BlockLabel, Functional};
pub use mode::{ModeLabel, Polarization, Spatial};
pub use operator::{Block, DensityOperator, InvariantReport, HERMITIAN_TOL, LABEL_TOL, MAX_BLOCK_DIM};
pub use state::PureState;
