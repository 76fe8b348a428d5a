//! Universal cloner output, built from its two independent two-mode squeezers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::{analytic_deficit, StateFamily};
use super::Gain;
use crate::fock::mode::{SUBSYSTEM_A, SUBSYSTEM_A_PRIME, UNIVERSAL_MODES};
use crate::fock::{ModeLabel, MultiModeBasis, PureState};
use crate::Result;

/// One of the two decoupled mode pairs of the universal amplifier.
/// 𝒜 = {(k1,ψ), (k2,ψ⊥)} sees gain `Γ`, 𝒜′ = {(k1,ψ⊥), (k2,ψ)} sees `−Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    APrime,
}

impl Subsystem {
    pub fn modes(self) -> [ModeLabel; 2] {
        match self {
            Subsystem::A => SUBSYSTEM_A,
            Subsystem::APrime => SUBSYSTEM_A_PRIME,
        }
    }

    /// Sign multiplying `Γ`.
    pub fn gamma_sign(self) -> f64 {
        match self {
            Subsystem::A => 1.0,
            Subsystem::APrime => -1.0,
        }
    }
}

/// Which polarization carries the injected photon, in the frame (ψ, ψ⊥).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seed {
    Psi,
    Perp,
}

fn signed_power(gamma: f64, sign: f64, n: usize) -> f64 {
    let v = crate::special::powi(gamma, n);
    if sign < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `(1/C) Σ (±Γ)ⁿ |n, n⟩` on the subsystem's modes.
pub fn tms_vacuum(gain: Gain, subsystem: Subsystem, cutoff: usize) -> Result<PureState> {
    let basis = MultiModeBasis::new(&subsystem.modes(), cutoff)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for n in 0..=cutoff {
        let a = signed_power(gain.gamma(), subsystem.gamma_sign(), n) / gain.c();
        amps[basis.index_of(&[n, n]).expect("in range")] = Complex64::new(a, 0.0);
    }
    PureState::new(basis, amps, analytic_deficit(StateFamily::TwoModeVacuum, gain, cutoff))
}

/// `(1/C²) Σ (±Γ)ⁿ √(n+1) |n+1, n⟩`: one photon injected into the first mode.
pub fn tms_seeded(gain: Gain, subsystem: Subsystem, cutoff: usize) -> Result<PureState> {
    let basis = MultiModeBasis::new(&subsystem.modes(), cutoff)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let c2 = gain.c() * gain.c();
    for n in 0..cutoff {
        let a = signed_power(gain.gamma(), subsystem.gamma_sign(), n) * ((n + 1) as f64).sqrt() / c2;
        amps[basis.index_of(&[n + 1, n]).expect("in range")] = Complex64::new(a, 0.0);
    }
    PureState::new(basis, amps, analytic_deficit(StateFamily::Seeded, gain, cutoff))
}

/// The 𝒜 and 𝒜′ factors of the output for the given seed, in the frame
/// whose reference polarization is ψ. For the ψ⊥ seed the photon sits in
/// 𝒜′ (frame (ψ⊥, −ψ) rewritten on the ψ modes).
pub fn universal_factors(gain: Gain, seed: Seed, cutoff: usize) -> Result<(PureState, PureState)> {
    match seed {
        Seed::Psi => Ok((tms_seeded(gain, Subsystem::A, cutoff)?, tms_vacuum(gain, Subsystem::APrime, cutoff)?)),
        Seed::Perp => Ok((tms_vacuum(gain, Subsystem::A, cutoff)?, tms_seeded(gain, Subsystem::APrime, cutoff)?)),
    }
}

/// `(1/C³) Σ Γ^{n+m} (−1)^m √(n+1) |(n+1)ψ, mψ⊥⟩₁ |mψ, nψ⊥⟩₂` on the four
/// modes in canonical order, assembled from its factors.
pub fn universal_amplified_state(gain: Gain, cutoff: usize) -> Result<PureState> {
    universal_state_for_seed(gain, Seed::Psi, cutoff)
}

pub fn universal_state_for_seed(gain: Gain, seed: Seed, cutoff: usize) -> Result<PureState> {
    MultiModeBasis::new(&UNIVERSAL_MODES, cutoff)?;
    let (a, a_prime) = universal_factors(gain, seed, cutoff)?;
    a.tensor(&a_prime)?.permute_modes(&UNIVERSAL_MODES)
}

/// Mean photon number summed over all four modes, evaluated on the factors
/// so that cutoffs beyond the four-mode dimension guard remain usable.
pub fn universal_total_mean_photon(gain: Gain, cutoff: usize) -> Result<(f64, f64)> {
    let (a, a_prime) = universal_factors(gain, Seed::Psi, cutoff)?;
    let mut total = 0.0;
    for f in [&a, &a_prime] {
        for &m in f.basis().modes() {
            total += f.mean_photon(m)?;
        }
    }
    let (da, db) = (a.truncation_deficit(), a_prime.truncation_deficit());
    Ok((total, da + db - da * db))
}
