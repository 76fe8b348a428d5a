//! Beam-splitter loss: the Kraus map, the Gauss hypergeometric series, and
//! the closed-form lossy amplifier states.

mod closed;
mod hyp2f1;
pub mod kraus;
mod spec;

pub use closed::{
    lossy_seeded, lossy_spontaneous, lossy_universal, lossy_universal_factors, reduced_k1_lossy, reduced_k1_weight,
};
pub use hyp2f1::{hyp2f1, hyp2f1_abcz, Hyp2F1Params};
pub use kraus::{apply_loss_kraus, apply_loss_spec};
pub use spec::LossSpec;
