//! Lossy states obtained by pushing the pure amplifier outputs through the
//! Kraus sum. The input is built at a larger cutoff and projected down after
//! each loss, so the result approximates the untruncated channel output
//! restricted to the requested cutoff.

use super::LossSpec;
use crate::amplifiers::cutoff::cutoff_for_deficit;
use crate::amplifiers::{tms_seeded, tms_vacuum, universal_state_for_seed, Gain, Seed, StateFamily, Subsystem};
use crate::fock::mode::{SUBSYSTEM_A, SUBSYSTEM_A_PRIME, UNIVERSAL_MODES};
use crate::fock::{BlockLabel, DensityOperator, ModeLabel, MultiModeBasis, PureState, DEFAULT_MAX_DIMENSION};
use crate::Result;

/// Input deficit the oracle constructions aim for.
pub const ORACLE_INPUT_DEFICIT: f64 = 1e-13;

/// `ℒ_T` on one mode.
pub fn apply_loss_kraus(rho: &DensityOperator, mode: ModeLabel, t: f64) -> Result<DensityOperator> {
    rho.apply_loss(mode, t)
}

/// Applies the per-spatial-mode loss to every mode of `rho`.
pub fn apply_loss_spec(rho: &DensityOperator, loss: LossSpec) -> Result<DensityOperator> {
    let mut out = rho.clone();
    for &m in rho.basis().modes() {
        out = out.apply_loss(m, loss.transmissivity(m.spatial))?;
    }
    Ok(out)
}

/// Input cutoff for an oracle run: at least `cutoff`, and large enough that
/// the dropped input tail is below [`ORACLE_INPUT_DEFICIT`].
pub fn oracle_input_cutoff(gain: Gain, family: StateFamily, cutoff: usize) -> Result<usize> {
    Ok(cutoff_for_deficit(gain, family, ORACLE_INPUT_DEFICIT)?.max(cutoff))
}

/// Loss on every mode of a pure state, each mode projected to `≤ cutoff`
/// photons right after its own loss, then re-expressed at `cutoff`.
pub fn lossy_from_pure(state: &PureState, label: BlockLabel, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    lossy_from_pure_in_order(state, label, loss, cutoff, state.basis().modes())
}

/// The per-mode maps commute; the order only changes how large the
/// intermediate blocks get.
fn lossy_from_pure_in_order(
    state: &PureState,
    label: BlockLabel,
    loss: LossSpec,
    cutoff: usize,
    order: &[ModeLabel],
) -> Result<DensityOperator> {
    let mut rho = DensityOperator::from_pure(state, label)?;
    for &m in order {
        rho = rho.apply_loss_capped(m, loss.transmissivity(m.spatial), cutoff)?;
    }
    let deficit = rho.trace_deficit();
    let out = rho.restrict_cutoff(cutoff.min(state.basis().cutoff()))?;
    // the projections above already accounted for the removed trace
    Ok(out.with_trace_deficit(deficit))
}

fn pair_label(modes: [ModeLabel; 2], basis: &MultiModeBasis) -> Result<BlockLabel> {
    BlockLabel::difference(basis, &[modes[0]], &[modes[1]])
}

pub fn kraus_spontaneous(gain: Gain, subsystem: Subsystem, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    let input = oracle_input_cutoff(gain, StateFamily::TwoModeVacuum, cutoff)?;
    let psi = tms_vacuum(gain, subsystem, input)?;
    let label = pair_label(subsystem.modes(), psi.basis())?;
    lossy_from_pure(&psi, label, loss, cutoff)
}

pub fn kraus_seeded(gain: Gain, subsystem: Subsystem, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    let input = oracle_input_cutoff(gain, StateFamily::Seeded, cutoff)?;
    let psi = tms_seeded(gain, subsystem, input)?;
    let label = pair_label(subsystem.modes(), psi.basis())?;
    lossy_from_pure(&psi, label, loss, cutoff)
}

/// Four single-mode Kraus maps applied to the pure four-mode output. The
/// input cutoff is capped by the four-mode dimension guard.
pub fn kraus_universal(gain: Gain, seed: Seed, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    let max_input = (DEFAULT_MAX_DIMENSION as f64).powf(0.25).floor() as usize - 1;
    let input = oracle_input_cutoff(gain, StateFamily::Universal, cutoff)?.min(max_input.max(cutoff));
    let psi = universal_state_for_seed(gain, seed, input)?;
    let basis = psi.basis();
    let label = BlockLabel::difference(basis, &[SUBSYSTEM_A[0]], &[SUBSYSTEM_A[1]])?
        .and(BlockLabel::difference(basis, &[SUBSYSTEM_A_PRIME[0]], &[SUBSYSTEM_A_PRIME[1]])?);
    debug_assert_eq!(basis.modes(), &UNIVERSAL_MODES);
    let order = [SUBSYSTEM_A[0], SUBSYSTEM_A[1], SUBSYSTEM_A_PRIME[0], SUBSYSTEM_A_PRIME[1]];
    lossy_from_pure_in_order(&psi, label, loss, cutoff, &order)
}

/// Cloning-mode reduced state: the lossless k1 marginal at a large cutoff,
/// then loss `η` on both k1 polarizations.
pub fn kraus_reduced_k1(gain: Gain, seed: Seed, eta: f64, cutoff: usize) -> Result<DensityOperator> {
    let input = oracle_input_cutoff(gain, StateFamily::Universal, cutoff)?;
    let (a, a_prime) = crate::amplifiers::universal_factors(gain, seed, input)?;
    let marginal = |s: &PureState, keep: ModeLabel| -> Result<DensityOperator> {
        let modes = s.basis().modes();
        let label = pair_label([modes[0], modes[1]], s.basis())?;
        DensityOperator::from_pure(s, label)?.partial_trace(&[keep])
    };
    let k1_psi = marginal(&a, ModeLabel::K1_PSI)?;
    let k1_perp = marginal(&a_prime, ModeLabel::K1_PERP)?;
    let mut rho = k1_psi.tensor(&k1_perp)?;
    let loss = LossSpec::new(eta, 1.0)?;
    for m in [ModeLabel::K1_PSI, ModeLabel::K1_PERP] {
        rho = rho.apply_loss_capped(m, loss.t1(), cutoff)?;
    }
    let deficit = rho.trace_deficit();
    Ok(rho.restrict_cutoff(cutoff)?.with_trace_deficit(deficit))
}
