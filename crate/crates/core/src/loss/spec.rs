use serde::{Deserialize, Serialize};

use crate::fock::Spatial;
use crate::{Error, Result};

/// Transmissivities of the two spatial modes, shared by both polarizations.
/// Reflectivities are kept as given so grids in `R` stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    t1: f64,
    t2: f64,
    r1: f64,
    r2: f64,
}

impl LossSpec {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        for t in [t1, t2] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!("transmissivity {t} outside [0, 1]")));
            }
        }
        Ok(Self { t1, t2, r1: 1.0 - t1, r2: 1.0 - t2 })
    }

    pub fn from_reflectivities(r1: f64, r2: f64) -> Result<Self> {
        for r in [r1, r2] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("reflectivity {r} outside [0, 1]")));
            }
        }
        Ok(Self { t1: 1.0 - r1, t2: 1.0 - r2, r1, r2 })
    }

    pub fn lossless() -> Self {
        Self { t1: 1.0, t2: 1.0, r1: 0.0, r2: 0.0 }
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn transmissivity(&self, spatial: Spatial) -> f64 {
        match spatial {
            Spatial::K1 => self.t1,
            Spatial::K2 => self.t2,
        }
    }
}
