//! Distances between the lossy images of the state pairs studied here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fidelity::{fidelity, DistanceResult, Method};
use crate::amplifiers::cutoff::poisson_tail;
use crate::amplifiers::{
    basis_rotate, cat_state, coherent_state, pc_pair, squeezed_amplitudes, universal_state_for_seed, CatSign, Gain,
    PcPair, QubitDirection, Seed, Subsystem,
};
use crate::fock::mode::CLONING_MODES;
use crate::fock::{BlockLabel, DensityOperator, ModeLabel, MultiModeBasis, PureState};
use crate::loss::kraus::{kraus_seeded, kraus_spontaneous, lossy_from_pure};
use crate::loss::{lossy_seeded, lossy_spontaneous, LossSpec};
use crate::{Error, Result};

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

/// `√(1 − √(1 − e^{−4R|α|²}))`, the large-|α| form of the cat distance.
pub fn coherent_mqs_distance_closed(r: f64, alpha_sq: f64) -> f64 {
    let f = 1.0 - (-4.0 * r * alpha_sq).exp();
    (1.0 - f.max(0.0).sqrt()).max(0.0).sqrt()
}

/// Cat distance including the finite-|α| normalization of both cats:
/// `ℱ = (1 − e^{−4R|α|²}) / (1 − e^{−4|α|²})`.
pub fn coherent_mqs_distance_exact(r: f64, alpha_sq: f64) -> f64 {
    if alpha_sq == 0.0 {
        return 0.0;
    }
    let f = -(-4.0 * r * alpha_sq).exp_m1() / -(-4.0 * alpha_sq).exp_m1();
    (1.0 - f.clamp(0.0, 1.0).sqrt()).max(0.0).sqrt()
}

/// Bures distance of `|√T α⟩` and `|−√T α⟩`: `√(1 − e^{−2T|α|²})`.
pub fn component_distance_coherent(r: f64, alpha_sq: f64) -> f64 {
    let t = 1.0 - r;
    (-(-2.0 * t * alpha_sq).exp_m1()).max(0.0).sqrt()
}

/// Smallest cutoff that satisfies the coherent tail guard and leaves less
/// than `1e-13` of Poisson weight above it.
pub fn coherent_cutoff(alpha_sq: f64) -> usize {
    let mut c = ((2.0 * alpha_sq).ceil() as usize).max(1);
    while poisson_tail(alpha_sq, c, None) > 1e-13 {
        c += 1;
    }
    c
}

fn single_mode_loss(state: &PureState, label: BlockLabel, t: f64) -> Result<DensityOperator> {
    lossy_from_pure(state, label, LossSpec::new(t, 1.0)?, state.basis().cutoff())
}

/// Numerical cat distance: both cats built on `0..=cutoff`, sent through the
/// Kraus loss and compared block by block in parity.
pub fn coherent_mqs_distance(r: f64, alpha_sq: f64, cutoff: usize) -> Result<DistanceResult> {
    check_rate("R", r)?;
    let alpha = Complex64::new(alpha_sq.sqrt(), 0.0);
    let plus = cat_state(alpha, CatSign::Plus, cutoff)?;
    let minus = cat_state(alpha, CatSign::Minus, cutoff)?;
    let label = BlockLabel::parity(plus.basis(), &[ModeLabel::K1_PSI])?;
    let a = single_mode_loss(&plus, label.clone(), 1.0 - r)?;
    let b = single_mode_loss(&minus, label, 1.0 - r)?;
    fidelity(&a, &b)
}

/// Numerical distance of the lossy components `|α⟩`, `|−α⟩`.
pub fn component_distance_numeric(r: f64, alpha_sq: f64, cutoff: usize) -> Result<DistanceResult> {
    check_rate("R", r)?;
    let alpha = Complex64::new(alpha_sq.sqrt(), 0.0);
    let a = coherent_state(alpha, cutoff)?;
    let b = coherent_state(-alpha, cutoff)?;
    let dense = BlockLabel::dense();
    fidelity(&single_mode_loss(&a, dense.clone(), 1.0 - r)?, &single_mode_loss(&b, dense, 1.0 - r)?)
}

/// How the universal-cloning distance is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniversalRoute {
    /// Closed-form lossy factors, one subsystem-sized fidelity per factor.
    ClosedForm,
    /// Same factorization with Kraus-built factors.
    Kraus,
    /// Full four-mode states rotated into the requested basis.
    Frame,
}

/// `𝒟(ρ^{1ψ}, ρ^{1ψ⊥})` for the universal cloner. The seed's own frame is
/// used when `basis` is horizontal; otherwise the four-mode states are
/// rotated, which is only feasible at small cutoffs.
pub fn universal_distance(gain: Gain, loss: LossSpec, basis: QubitDirection, cutoff: usize) -> Result<DistanceResult> {
    let route = if basis == QubitDirection::H { UniversalRoute::ClosedForm } else { UniversalRoute::Frame };
    universal_distance_via(gain, loss, basis, route, cutoff)
}

/// [`universal_distance`] with an explicit route. The factorized routes
/// ignore `basis`.
pub fn universal_distance_via(
    gain: Gain,
    loss: LossSpec,
    basis: QubitDirection,
    route: UniversalRoute,
    cutoff: usize,
) -> Result<DistanceResult> {
    // ρ^{1ψ} = S_𝒜 ⊗ V_𝒜′ and ρ^{1ψ⊥} = V_𝒜 ⊗ S_𝒜′
    let factor = |sub: Subsystem| -> Result<DistanceResult> {
        let (s, v) = match route {
            UniversalRoute::ClosedForm => {
                (lossy_seeded(gain, sub, loss, cutoff)?, lossy_spontaneous(gain, sub, loss, cutoff)?)
            }
            _ => (kraus_seeded(gain, sub, loss, cutoff)?, kraus_spontaneous(gain, sub, loss, cutoff)?),
        };
        fidelity(&s, &v)
    };
    match route {
        UniversalRoute::ClosedForm | UniversalRoute::Kraus => {
            let parts = [factor(Subsystem::A)?, factor(Subsystem::APrime)?];
            DistanceResult::product(&parts, Method::Blockwise)
        }
        UniversalRoute::Frame => universal_distance_frame(gain, loss, basis, cutoff),
    }
}

fn universal_distance_frame(gain: Gain, loss: LossSpec, basis: QubitDirection, cutoff: usize) -> Result<DistanceResult> {
    let own = universal_state_for_seed(gain, Seed::Psi, cutoff)?;
    let psi = basis_rotate(&own, QubitDirection::H, basis)?;
    let perp = basis_rotate(&own, QubitDirection::H, basis.antipode())?;
    let k1 = [ModeLabel::K1_PSI, ModeLabel::K1_PERP];
    let k2 = [ModeLabel::K2_PSI, ModeLabel::K2_PERP];
    let label = BlockLabel::difference(own.basis(), &k1, &k2)?;
    let a = lossy_from_pure(&psi, label.clone(), loss, cutoff)?;
    let b = lossy_from_pure(&perp, label, loss, cutoff)?;
    fidelity(&a, &b)
}

/// `𝒟` between the lossy images of a phase-covariant pair, computed on the
/// two polarization modes of k₁ with every component kept to `≤ cutoff`
/// photons in total.
pub fn pc_distance(gain: Gain, t: f64, pair: PcPair, cutoff: usize) -> Result<DistanceResult> {
    check_rate("T", t)?;
    let (a, b) = pc_pair(gain, pair, cutoff)?;
    let label = BlockLabel::parity(a.basis(), &CLONING_MODES)?;
    let loss = LossSpec::new(t, 1.0)?;
    let ra = lossy_from_pure(&a, label.clone(), loss, cutoff)?;
    let rb = lossy_from_pure(&b, label, loss, cutoff)?;
    fidelity(&ra, &rb)
}

/// Single-mode cutoff at which both squeezed factors of `Φ^±` leave less
/// than `target` of their norm outside.
pub fn pc_factor_cutoff(gain: Gain, target: f64) -> usize {
    let mut c = 1;
    loop {
        let tail = |odd| 1.0 - squeezed_amplitudes(gain, odd, 1.0, c).iter().map(|a| a.norm_sqr()).sum::<f64>();
        if tail(true) < target && tail(false) < target {
            return c;
        }
        c += 1;
    }
}

fn squeezed_factor(gain: Gain, odd: bool, sign: f64, cutoff: usize) -> Result<PureState> {
    let basis = MultiModeBasis::new(&[ModeLabel::K1_PSI], cutoff)?;
    let amps = squeezed_amplitudes(gain, odd, sign, cutoff);
    let deficit = (1.0 - amps.iter().map(|a| a.norm_sqr()).sum::<f64>()).max(0.0);
    PureState::new(basis, amps, deficit)
}

/// `𝒟(Φ^+, Φ^-)` under equal loss through the factorization
/// `Φ^+ = o₊ ⊗ e₋`, `Φ^- = e₊ ⊗ o₋` in the diagonal polarization basis,
/// where `o`, `e` are the squeezed single photon and squeezed vacuum.
/// `cutoff` applies per mode.
pub fn pc_distance_factorized(gain: Gain, t: f64, cutoff: usize) -> Result<DistanceResult> {
    check_rate("T", t)?;
    let build = |odd, sign| -> Result<DensityOperator> {
        let s = squeezed_factor(gain, odd, sign, cutoff)?;
        let label = BlockLabel::parity(s.basis(), &[ModeLabel::K1_PSI])?;
        single_mode_loss(&s, label, t)
    };
    let plus_mode = fidelity(&build(true, 1.0)?, &build(false, 1.0)?)?;
    let minus_mode = fidelity(&build(false, -1.0)?, &build(true, -1.0)?)?;
    DistanceResult::product(&[plus_mode, minus_mode], Method::Blockwise)
}
