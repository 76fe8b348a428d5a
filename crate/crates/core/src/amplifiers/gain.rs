use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Amplifier strength `g` with `C = cosh g` and `Γ = tanh g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Gain {
    g: f64,
    c: f64,
    gamma: f64,
}

impl Gain {
    pub fn new(g: f64) -> Result<Self> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::InvalidParameter(format!("gain {g} must be finite and non-negative")));
        }
        Ok(Self { g, c: g.cosh(), gamma: g.tanh() })
    }

    /// Solves `family.mean_photon(g) = target` by bisection to 1e-10 in ⟨n⟩.
    pub fn from_mean_photon(target: f64, family: MeanPhotonFamily) -> Result<Self> {
        let floor = family.mean_photon_at(0.0);
        if !target.is_finite() || target < floor {
            return Err(Error::InvalidParameter(format!(
                "mean photon target {target} below the unamplified value {floor}"
            )));
        }
        let mut hi = 1.0;
        while family.mean_photon_at(hi) < target {
            hi *= 2.0;
            if hi > 64.0 {
                return Err(Error::InvalidParameter(format!("mean photon target {target} out of range")));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let value = family.mean_photon_at(mid);
            if (value - target).abs() <= 1e-10 {
                return Self::new(mid);
            }
            if value < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::new(0.5 * (lo + hi))
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// `cosh g`
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `tanh g`
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl TryFrom<f64> for Gain {
    type Error = Error;
    fn try_from(g: f64) -> Result<Self> {
        Self::new(g)
    }
}

impl From<Gain> for f64 {
    fn from(g: Gain) -> f64 {
        g.g
    }
}

/// Whose mean photon number a target refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanPhotonFamily {
    /// Both polarizations of the phase-covariant output.
    PhaseCovariant,
    /// All four modes of the universal output.
    Universal,
    /// The two cloning-mode polarizations of the universal output.
    UniversalCloningMode,
}

impl MeanPhotonFamily {
    pub fn mean_photon_at(self, g: f64) -> f64 {
        let ch = (2.0 * g).cosh();
        match self {
            Self::PhaseCovariant => 2.0 * ch - 1.0,
            Self::Universal => 3.0 * ch - 2.0,
            Self::UniversalCloningMode => (3.0 * ch - 1.0) / 2.0,
        }
    }

    pub fn mean_photon(self, gain: Gain) -> f64 {
        self.mean_photon_at(gain.g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_holds() {
        for g in [0.0, 0.3, 1.2, 2.5, 5.0] {
            let k = Gain::new(g).unwrap();
            assert!((k.c() * k.c() * (1.0 - k.gamma() * k.gamma()) - 1.0).abs() < 1e-12);
            assert!(k.c() >= 1.0 && (0.0..1.0).contains(&k.gamma()));
        }
        assert!(Gain::new(-0.1).is_err());
        assert!(Gain::new(f64::NAN).is_err());
    }

    #[test]
    fn inversion() {
        for fam in [MeanPhotonFamily::PhaseCovariant, MeanPhotonFamily::Universal, MeanPhotonFamily::UniversalCloningMode] {
            let k = Gain::from_mean_photon(12.5, fam).unwrap();
            assert!((fam.mean_photon(k) - 12.5).abs() <= 1e-10);
        }
        let k = Gain::from_mean_photon(12.5, MeanPhotonFamily::PhaseCovariant).unwrap();
        assert!(((2.0 * k.g()).cosh() - 6.75).abs() < 1e-10);
        assert!(Gain::from_mean_photon(0.5, MeanPhotonFamily::PhaseCovariant).is_err());
    }
}
