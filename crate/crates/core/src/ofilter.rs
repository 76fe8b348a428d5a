//! Orthogonality filter: keeps the events whose polarization photon numbers
//! differ by at least κ on the cloning mode.

use serde::{Deserialize, Serialize};

use crate::amplifiers::cutoff::cutoff_for_deficit;
use crate::amplifiers::{Gain, Seed, StateFamily, DEFICIT_TARGET};
use crate::fock::DensityOperator;
use crate::loss::reduced_k1_lossy;
use crate::metrics::{fidelity, DistanceResult};
use crate::{Error, Result};

/// Success probabilities below this are treated as an empty outcome.
pub const MIN_P_FILT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub kappa: u32,
}

impl FilterSpec {
    pub fn new(kappa: u32) -> Self {
        Self { kappa }
    }

    pub fn accepts(&self, m: usize, n: usize) -> bool {
        m.abs_diff(n) >= self.kappa as usize
    }
}

/// Which state the success probability is quoted for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PfiltOn {
    #[default]
    Lossless,
    Lossy,
}

/// `(Π_κ ρ Π_κ / P, P)` with `P = tr(Π_κ ρ) / tr ρ`, so that κ = 0 gives
/// exactly one. κ = 0 returns the input untouched.
pub fn apply_ofilter(rho: &DensityOperator, spec: FilterSpec) -> Result<(DensityOperator, f64)> {
    if rho.basis().num_modes() != 2 {
        return Err(Error::InvalidModes("the filter acts on a two-mode operator".into()));
    }
    if spec.kappa == 0 {
        return Ok((rho.clone(), 1.0));
    }
    let total = rho.trace();
    let kept = rho.project(|b, idx| spec.accepts(b.occupation(idx, 0), b.occupation(idx, 1)));
    let p_filt = if total > 0.0 { kept.trace() / total } else { 0.0 };
    if !(p_filt >= MIN_P_FILT) {
        return Err(Error::FilteredToNothing { p_filt });
    }
    let (out, _) = kept.normalized()?;
    Ok((out, p_filt))
}

/// Cutoff for the filtered cloning-mode states: the unfiltered rule plus κ,
/// so the accepted band is resolved as far as the unfiltered state is.
pub fn ofilter_cutoff(gain: Gain, kappa: u32) -> Result<usize> {
    Ok(cutoff_for_deficit(gain, StateFamily::UniversalSpatialTotal, DEFICIT_TARGET)? + kappa as usize)
}

/// `P_filt` for the ψ-seeded cloning-mode state, before (`Lossless`) or after
/// (`Lossy`) the channel of transmissivity `eta`.
pub fn p_filt(gain: Gain, eta: f64, spec: FilterSpec, on: PfiltOn, cutoff: usize) -> Result<f64> {
    let eta = match on {
        PfiltOn::Lossless => 1.0,
        PfiltOn::Lossy => eta,
    };
    let rho = reduced_k1_lossy(gain, Seed::Psi, eta, cutoff)?;
    Ok(apply_ofilter(&rho, spec)?.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilteredDistance {
    pub distance: DistanceResult,
    /// Acceptance probability of the lossy state actually being filtered.
    pub p_filt_lossy: f64,
}

/// Bures distance of the ψ and ψ⊥ cloning-mode states after loss `eta`
/// followed by the filter.
pub fn filtered_distance(gain: Gain, eta: f64, spec: FilterSpec, cutoff: usize) -> Result<FilteredDistance> {
    let psi = reduced_k1_lossy(gain, Seed::Psi, eta, cutoff)?;
    let perp = reduced_k1_lossy(gain, Seed::Perp, eta, cutoff)?;
    let (a, p_filt_lossy) = apply_ofilter(&psi, spec)?;
    let (b, _) = apply_ofilter(&perp, spec)?;
    let mut distance = fidelity(&a, &b)?;
    // the filtered states are renormalized; report the deficit they came from
    distance.trace_deficit = psi.trace_deficit().max(perp.trace_deficit());
    Ok(FilteredDistance { distance, p_filt_lossy })
}
