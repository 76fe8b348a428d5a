//! Phase-covariant cloner output for an injected equatorial qubit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::{analytic_deficit, StateFamily};
use super::rotation::basis_rotate;
use super::{CatSign, Gain, QubitDirection};
use crate::fock::mode::CLONING_MODES;
use crate::fock::{MultiModeBasis, PureState};
use crate::special::ln_factorial;
use crate::{Error, Result};

/// The state pairs compared in the phase-covariant analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcPair {
    /// `Φ^+` and `Φ^-`, seeded with `(H ± V)/√2`.
    Macrostates,
    /// `Ψ^±`, the superpositions of `Φ^+` and `Φ^-`.
    Superpositions,
    /// `Φ^R` and `Φ^L`, seeded with circular polarizations.
    Circular,
}

/// Amplitudes `γ_ij` on `|2i+1, 2j⟩` in the frame of the seed, keeping
/// `2i + 2j + 1 ≤ cutoff` photons in total.
fn own_frame_state(gain: Gain, phi: f64, cutoff: usize) -> Result<PureState> {
    let basis = MultiModeBasis::new(&CLONING_MODES, cutoff)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let half = gain.gamma() / 2.0;
    let ln_c = gain.c().ln();
    for i in 0..=cutoff / 2 {
        for j in 0..=cutoff / 2 {
            if 2 * i + 2 * j + 1 > cutoff {
                break;
            }
            let power = i + j;
            let mag = if half == 0.0 {
                if power == 0 { 1.0 } else { 0.0 }
            } else {
                (-2.0 * ln_c + power as f64 * half.ln() + 0.5 * ln_factorial(2 * i + 1) + 0.5 * ln_factorial(2 * j)
                    - ln_factorial(i)
                    - ln_factorial(j))
                .exp()
            };
            if mag == 0.0 {
                continue;
            }
            // (e^{-iφ})^i (−e^{iφ})^j
            let phase = Complex64::from_polar(1.0, phi * (j as f64 - i as f64) + PI * (j % 2) as f64);
            let idx = basis.index_of(&[2 * i + 1, 2 * j]).expect("within cutoff");
            amps[idx] = phase * mag;
        }
    }
    let deficit = analytic_deficit(StateFamily::PhaseCovariant, gain, cutoff);
    PureState::new(basis, amps, deficit)
}

/// `U_PC |1_φ⟩` on the (k1,ψ), (k1,ψ⊥) modes, expressed in the H/V basis
/// (ψ ≡ H). The cutoff bounds the total photon number, which is what keeps
/// the representation exact under polarization rotations.
pub fn pc_amplified_state(gain: Gain, seed: QubitDirection, cutoff: usize) -> Result<PureState> {
    if !seed.is_equatorial() {
        return Err(Error::InvalidParameter(format!(
            "phase-covariant amplification needs an equatorial seed, got θ = {}",
            seed.theta()
        )));
    }
    let own = own_frame_state(gain, seed.phi(), cutoff)?;
    basis_rotate(&own, QubitDirection::H, seed)
}

/// `Φ^φ` for the equatorial seed `(H + e^{iφ}V)/√2`.
pub fn pc_equatorial(gain: Gain, phi: f64, cutoff: usize) -> Result<PureState> {
    pc_amplified_state(gain, QubitDirection::equatorial(phi)?, cutoff)
}

/// `Ψ^± = (N±/√2)(Φ^+ ± iΦ^-)` with the phase `N± = e^{∓iπ/4}`, which makes
/// `Ψ^+ = Φ^{-π/2}` and `Ψ^- = Φ^{+π/2}` entrywise.
pub fn pc_mqs(gain: Gain, sign: CatSign, cutoff: usize) -> Result<PureState> {
    let plus = pc_equatorial(gain, 0.0, cutoff)?;
    let minus = pc_equatorial(gain, PI, cutoff)?;
    let s = sign.value();
    let n = Complex64::from_polar(FRAC_1_SQRT_2, -s * FRAC_PI_4);
    let i = Complex64::new(0.0, s);
    let amps = plus.amplitudes().iter().zip(minus.amplitudes()).map(|(a, b)| n * (a + i * b)).collect();
    let deficit = 0.5 * (plus.truncation_deficit() + minus.truncation_deficit());
    PureState::new(plus.basis().clone(), amps, deficit)
}

/// Both members of a pair, in the order (+, −) / (R, L).
pub fn pc_pair(gain: Gain, pair: PcPair, cutoff: usize) -> Result<(PureState, PureState)> {
    match pair {
        PcPair::Macrostates => Ok((pc_equatorial(gain, 0.0, cutoff)?, pc_equatorial(gain, PI, cutoff)?)),
        PcPair::Superpositions => Ok((pc_mqs(gain, CatSign::Plus, cutoff)?, pc_mqs(gain, CatSign::Minus, cutoff)?)),
        PcPair::Circular => Ok((pc_equatorial(gain, FRAC_PI_2, cutoff)?, pc_equatorial(gain, -FRAC_PI_2, cutoff)?)),
    }
}

/// Squeezed single photon (`odd = true`) or squeezed vacuum on one mode, as
/// amplitudes over `0..=cutoff`: `(sΓ/2)^i √((2i+1)!)/i! / C^{3/2}` on `|2i+1⟩`
/// or `(sΓ/2)^j √((2j)!)/j! / C^{1/2}` on `|2j⟩`. `Φ^±` are products of these.
pub(crate) fn squeezed_amplitudes(gain: Gain, odd: bool, sign: f64, cutoff: usize) -> Vec<Complex64> {
    let half = gain.gamma() / 2.0;
    let ln_norm = if odd { -1.5 } else { -0.5 } * gain.c().ln();
    let offset = usize::from(odd);
    let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    for i in 0.. {
        let n = 2 * i + offset;
        if n > cutoff {
            break;
        }
        let mag = if half == 0.0 {
            if i == 0 { 1.0 } else { 0.0 }
        } else {
            (ln_norm + i as f64 * half.ln() + 0.5 * ln_factorial(n) - ln_factorial(i)).exp()
        };
        let s = if sign < 0.0 && i % 2 == 1 { -1.0 } else { 1.0 };
        amps[n] = Complex64::new(s * mag, 0.0);
    }
    amps
}
