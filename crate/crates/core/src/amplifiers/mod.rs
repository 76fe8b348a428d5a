//! Generators for the coherent, phase-covariant and universal state families.

mod coherent;
pub mod cutoff;
mod direction;
mod gain;
mod pc;
mod rotation;
mod universal;

pub use coherent::{cat_state, coherent_state, CatSign};
pub use cutoff::{analytic_deficit, default_cutoff, StateFamily, DEFICIT_TARGET};
pub use direction::{ModeUnitary, QubitDirection};
pub use gain::{Gain, MeanPhotonFamily};
pub use pc::{pc_amplified_state, pc_equatorial, pc_mqs, pc_pair, PcPair};
pub(crate) use pc::squeezed_amplitudes;
pub use rotation::{apply_mode_unitary, basis_rotate};
pub use universal::{
    tms_seeded, tms_vacuum, universal_amplified_state, universal_factors, universal_state_for_seed,
    universal_total_mean_photon, Seed, Subsystem,
};
