//! Conserved occupation functionals used to key operator blocks.

use serde::{Deserialize, Serialize};

use super::{ModeLabel, MultiModeBasis};
use crate::Result;

/// `Σ wᵢ nᵢ`, optionally reduced modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional {
    pub weights: Vec<i64>,
    pub modulus: Option<i64>,
}

impl Functional {
    pub fn eval(&self, basis: &MultiModeBasis, index: usize) -> i64 {
        let v: i64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(pos, w)| w * basis.occupation(index, pos) as i64)
            .sum();
        match self.modulus {
            Some(m) => v.rem_euclid(m),
            None => v,
        }
    }

    fn is_trivial(&self) -> bool {
        self.weights.iter().all(|&w| w == 0) || self.modulus == Some(1)
    }
}

pub type BlockKey = Vec<i64>;

/// A set of occupation functionals whose values are equal between the bra
/// and ket of every nonzero operator entry. The empty label stores the
/// operator as one dense block.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLabel {
    functionals: Vec<Functional>,
}

impl BlockLabel {
    pub fn dense() -> Self {
        Self::default()
    }

    pub fn from_functionals(functionals: Vec<Functional>) -> Self {
        Self { functionals: functionals.into_iter().filter(|f| !f.is_trivial()).collect() }
    }

    /// `Σ_{plus} n − Σ_{minus} n`.
    pub fn difference(basis: &MultiModeBasis, plus: &[ModeLabel], minus: &[ModeLabel]) -> Result<Self> {
        let mut weights = vec![0; basis.num_modes()];
        for &m in plus {
            weights[basis.position(m)?] += 1;
        }
        for &m in minus {
            weights[basis.position(m)?] -= 1;
        }
        Ok(Self::from_functionals(vec![Functional { weights, modulus: None }]))
    }

    /// Occupation of a single mode.
    pub fn occupation(basis: &MultiModeBasis, mode: ModeLabel) -> Result<Self> {
        Self::difference(basis, &[mode], &[])
    }

    /// Parity of the total photon number in `modes`.
    pub fn parity(basis: &MultiModeBasis, modes: &[ModeLabel]) -> Result<Self> {
        let mut weights = vec![0; basis.num_modes()];
        for &m in modes {
            weights[basis.position(m)?] = 1;
        }
        Ok(Self::from_functionals(vec![Functional { weights, modulus: Some(2) }]))
    }

    /// Every functional of `self` followed by every functional of `other`.
    pub fn and(mut self, other: BlockLabel) -> Self {
        self.functionals.extend(other.functionals);
        self
    }

    pub fn functionals(&self) -> &[Functional] {
        &self.functionals
    }

    pub fn is_dense(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn key(&self, basis: &MultiModeBasis, index: usize) -> BlockKey {
        self.functionals.iter().map(|f| f.eval(basis, index)).collect()
    }

    /// Label on the concatenated mode list `self ⊗ other`.
    pub(crate) fn tensor(&self, other: &BlockLabel, left_modes: usize, right_modes: usize) -> BlockLabel {
        let mut functionals = Vec::with_capacity(self.functionals.len() + other.functionals.len());
        for f in &self.functionals {
            let mut weights = f.weights.clone();
            weights.resize(left_modes + right_modes, 0);
            functionals.push(Functional { weights, modulus: f.modulus });
        }
        for f in &other.functionals {
            let mut weights = vec![0; left_modes];
            weights.extend_from_slice(&f.weights);
            functionals.push(Functional { weights, modulus: f.modulus });
        }
        BlockLabel { functionals }
    }

    /// Label restricted to the kept mode positions (in the given order).
    pub(crate) fn restrict(&self, kept_positions: &[usize]) -> BlockLabel {
        BlockLabel::from_functionals(
            self.functionals
                .iter()
                .map(|f| Functional {
                    weights: kept_positions.iter().map(|&p| f.weights[p]).collect(),
                    modulus: f.modulus,
                })
                .collect(),
        )
    }
}
