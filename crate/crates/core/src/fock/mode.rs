use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spatial {
    K1,
    K2,
}

/// Polarization relative to the chosen frame: `Psi` is the frame's first
/// polarization, `Perp` its orthogonal partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    Psi,
    Perp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    pub spatial: Spatial,
    pub polarization: Polarization,
}

impl ModeLabel {
    pub const K1_PSI: ModeLabel = ModeLabel::new(Spatial::K1, Polarization::Psi);
    pub const K1_PERP: ModeLabel = ModeLabel::new(Spatial::K1, Polarization::Perp);
    pub const K2_PSI: ModeLabel = ModeLabel::new(Spatial::K2, Polarization::Psi);
    pub const K2_PERP: ModeLabel = ModeLabel::new(Spatial::K2, Polarization::Perp);

    pub const fn new(spatial: Spatial, polarization: Polarization) -> Self {
        Self { spatial, polarization }
    }

    /// The same spatial mode with the other polarization.
    pub fn partner(self) -> Self {
        let polarization = match self.polarization {
            Polarization::Psi => Polarization::Perp,
            Polarization::Perp => Polarization::Psi,
        };
        Self { polarization, ..self }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.spatial {
            Spatial::K1 => "k1",
            Spatial::K2 => "k2",
        };
        let p = match self.polarization {
            Polarization::Psi => "psi",
            Polarization::Perp => "perp",
        };
        write!(f, "({k},{p})")
    }
}

/// Modes coupled by the seeded half of the universal amplifier.
pub const SUBSYSTEM_A: [ModeLabel; 2] = [ModeLabel::K1_PSI, ModeLabel::K2_PERP];
/// Modes coupled by the other half; carries spontaneous emission for a psi seed.
pub const SUBSYSTEM_A_PRIME: [ModeLabel; 2] = [ModeLabel::K1_PERP, ModeLabel::K2_PSI];
/// Canonical ordering of the four universal-amplifier modes.
pub const UNIVERSAL_MODES: [ModeLabel; 4] =
    [ModeLabel::K1_PSI, ModeLabel::K1_PERP, ModeLabel::K2_PSI, ModeLabel::K2_PERP];
/// The two polarization modes of the cloning spatial mode.
pub const CLONING_MODES: [ModeLabel; 2] = [ModeLabel::K1_PSI, ModeLabel::K1_PERP];
