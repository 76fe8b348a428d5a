use num_complex::Complex64;

use super::{ModeLabel, MultiModeBasis};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A ket on a truncated basis. `truncation_deficit` is the squared norm that
/// fell outside the basis when the state was built.
#[derive(Clone, Debug)]
pub struct PureState {
    basis: MultiModeBasis,
    amplitudes: Vec<Complex64>,
    truncation_deficit: f64,
}

impl PureState {
    pub fn new(basis: MultiModeBasis, amplitudes: Vec<Complex64>, truncation_deficit: f64) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if norm + truncation_deficit > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "norm {norm} plus deficit {truncation_deficit} exceeds one"
            )));
        }
        Ok(Self { basis, amplitudes, truncation_deficit: truncation_deficit.max(0.0) })
    }

    /// Builds a state from amplitudes that have not been normalized; the
    /// result is scaled to unit norm and carries no deficit.
    pub fn normalized_from(basis: MultiModeBasis, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { basis, amplitudes, truncation_deficit: 0.0 })
    }

    pub fn vacuum(basis: MultiModeBasis) -> Self {
        let mut amplitudes = vec![ZERO; basis.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { basis, amplitudes, truncation_deficit: 0.0 }
    }

    pub fn fock(basis: MultiModeBasis, occupations: &[usize]) -> Result<Self> {
        let idx = basis
            .index_of(occupations)
            .ok_or_else(|| Error::InvalidParameter(format!("occupations {occupations:?} outside the basis")))?;
        let mut amplitudes = vec![ZERO; basis.dim()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes, truncation_deficit: 0.0 })
    }

    pub fn basis(&self) -> &MultiModeBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Complex64 {
        self.basis.index_of(occupations).map_or(ZERO, |i| self.amplitudes[i])
    }

    /// Nonzero amplitudes with their basis index.
    pub fn support(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amplitudes.iter().copied().enumerate().filter(|(_, a)| *a != ZERO)
    }

    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        for m in other.basis.modes() {
            if self.basis.modes().contains(m) {
                return Err(Error::OverlappingModes(*m));
            }
        }
        if self.basis.cutoff() != other.basis.cutoff() {
            return Err(Error::InvalidParameter("tensor factors must share a cutoff".into()));
        }
        let modes: Vec<ModeLabel> = self.basis.modes().iter().chain(other.basis.modes()).copied().collect();
        let basis = MultiModeBasis::new(&modes, self.basis.cutoff())?;
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        let (da, db) = (self.truncation_deficit, other.truncation_deficit);
        Ok(PureState { basis, amplitudes, truncation_deficit: da + db - da * db })
    }

    pub fn permute_modes(&self, order: &[ModeLabel]) -> Result<PureState> {
        let perm: Vec<usize> = order.iter().map(|&m| self.basis.position(m)).collect::<Result<_>>()?;
        if perm.len() != self.basis.num_modes() {
            return Err(Error::InvalidModes("permutation must list every mode once".into()));
        }
        let basis = MultiModeBasis::new(order, self.basis.cutoff())?;
        let mut amplitudes = vec![ZERO; basis.dim()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let new: usize = perm.iter().zip(basis.strides()).map(|(&p, s)| self.basis.occupation(idx, p) * s).sum();
            amplitudes[new] = *a;
        }
        Ok(PureState { basis, amplitudes, truncation_deficit: self.truncation_deficit })
    }

    /// Zeroes amplitudes whose photon count over `modes` exceeds `max`; the
    /// removed weight joins the deficit.
    pub fn restrict_total_photons(&self, modes: &[ModeLabel], max: usize) -> Result<PureState> {
        let pos: Vec<usize> = modes.iter().map(|&m| self.basis.position(m)).collect::<Result<_>>()?;
        let mut out = self.clone();
        for (idx, a) in out.amplitudes.iter_mut().enumerate() {
            let n: usize = pos.iter().map(|&p| self.basis.occupation(idx, p)).sum();
            if n > max {
                out.truncation_deficit += a.norm_sqr();
                *a = ZERO;
            }
        }
        Ok(out)
    }

    pub fn mean_photon(&self, mode: ModeLabel) -> Result<f64> {
        let pos = self.basis.position(mode)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * self.basis.occupation(idx, pos) as f64)
            .sum())
    }
}
