use super::ModeLabel;
use crate::{Error, Result};

/// Default ceiling on the number of basis states.
pub const DEFAULT_MAX_DIMENSION: usize = 4_000_000;
pub const MAX_MODES: usize = 4;

/// Truncated Fock basis over up to four modes, each holding `0..=cutoff`
/// photons. Flat indices are lexicographic in the occupation tuple with the
/// first mode most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiModeBasis {
    modes: Vec<ModeLabel>,
    cutoff: usize,
    strides: Vec<usize>,
    dim: usize,
}

pub fn enumerate_basis(modes: &[ModeLabel], cutoff: usize) -> Result<MultiModeBasis> {
    MultiModeBasis::with_limit(modes, cutoff, DEFAULT_MAX_DIMENSION)
}

impl MultiModeBasis {
    pub fn new(modes: &[ModeLabel], cutoff: usize) -> Result<Self> {
        enumerate_basis(modes, cutoff)
    }

    pub fn with_limit(modes: &[ModeLabel], cutoff: usize, max_dim: usize) -> Result<Self> {
        if modes.is_empty() || modes.len() > MAX_MODES {
            return Err(Error::InvalidModes(format!("expected 1 to {MAX_MODES} modes, got {}", modes.len())));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::InvalidModes(format!("mode {m} appears twice")));
            }
        }
        let levels = cutoff + 1;
        let dim = (0..modes.len())
            .try_fold(1usize, |acc, _| acc.checked_mul(levels))
            .filter(|&d| d <= max_dim)
            .ok_or(Error::DimensionOverflow {
                dim: levels.saturating_pow(modes.len() as u32),
                max: max_dim,
            })?;
        let mut strides = vec![1; modes.len()];
        for i in (0..modes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * levels;
        }
        Ok(Self { modes: modes.to_vec(), cutoff, strides, dim })
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn position(&self, mode: ModeLabel) -> Result<usize> {
        self.modes.iter().position(|&m| m == mode).ok_or(Error::UnknownMode(mode))
    }

    /// Occupation of mode position `pos` in basis state `index`.
    #[inline]
    pub fn occupation(&self, index: usize, pos: usize) -> usize {
        (index / self.strides[pos]) % (self.cutoff + 1)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes.len()).map(|p| self.occupation(index, p)).collect()
    }

    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.modes.len() || occupations.iter().any(|&n| n > self.cutoff) {
            return None;
        }
        Some(occupations.iter().zip(&self.strides).map(|(n, s)| n * s).sum())
    }

    /// Total photons in `index`.
    pub fn total_photons(&self, index: usize) -> usize {
        (0..self.modes.len()).map(|p| self.occupation(index, p)).sum()
    }

    /// Same modes with a different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        Self::new(&self.modes, cutoff)
    }

    pub fn same_space(&self, other: &Self) -> bool {
        self.modes == other.modes && self.cutoff == other.cutoff
    }
}
