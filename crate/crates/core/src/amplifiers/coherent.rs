use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::poisson_tail;
use crate::fock::{ModeLabel, MultiModeBasis, PureState};
use crate::special::ln_factorial;
use crate::{Error, Result};

/// Relative sign of a two-component superposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CatSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl CatSign {
    pub fn value(self) -> f64 {
        match self {
            CatSign::Plus => 1.0,
            CatSign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            CatSign::Plus => CatSign::Minus,
            CatSign::Minus => CatSign::Plus,
        }
    }
}

fn check_tail_guard(alpha: Complex64, cutoff: usize) -> Result<()> {
    let alpha_sq = alpha.norm_sqr();
    if alpha_sq > cutoff as f64 / 2.0 {
        return Err(Error::TailGuard { alpha_sq, cutoff });
    }
    Ok(())
}

/// `e^{-|α|²/2} αⁿ/√n!` for `n ≤ cutoff`.
fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let r = alpha.norm();
    let theta = alpha.arg();
    (0..=cutoff)
        .map(|n| {
            if r == 0.0 {
                return Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0);
            }
            let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_factorial(n);
            Complex64::from_polar(ln_mag.exp(), n as f64 * theta)
        })
        .collect()
}

/// Glauber state `|α⟩` on the single mode (k1, ψ).
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<PureState> {
    check_tail_guard(alpha, cutoff)?;
    let basis = MultiModeBasis::new(&[ModeLabel::K1_PSI], cutoff)?;
    let deficit = poisson_tail(alpha.norm_sqr(), cutoff, None);
    PureState::new(basis, coherent_amplitudes(alpha, cutoff), deficit)
}

/// Normalized `|α⟩ ± |−α⟩`, with normalization `2(1 ± e^{-2|α|²})`.
pub fn cat_state(alpha: Complex64, sign: CatSign, cutoff: usize) -> Result<PureState> {
    check_tail_guard(alpha, cutoff)?;
    let alpha_sq = alpha.norm_sqr();
    let norm = 2.0 * (1.0 + sign.value() * (-2.0 * alpha_sq).exp());
    if norm <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let parity = match sign {
        CatSign::Plus => 0,
        CatSign::Minus => 1,
    };
    let scale = 2.0 / norm.sqrt();
    let amplitudes = coherent_amplitudes(alpha, cutoff)
        .into_iter()
        .enumerate()
        .map(|(n, a)| if n % 2 == parity { a * scale } else { Complex64::new(0.0, 0.0) })
        .collect();
    let deficit = 4.0 / norm * poisson_tail(alpha_sq, cutoff, Some(parity));
    let basis = MultiModeBasis::new(&[ModeLabel::K1_PSI], cutoff)?;
    PureState::new(basis, amplitudes, deficit)
}
