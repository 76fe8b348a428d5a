//! Hermitian operators on a truncated Fock basis, stored as a direct sum of
//! dense blocks keyed by a conserved [`BlockLabel`].
//!
//! Each block only holds the basis states that carry weight (its support), so
//! a four-mode operator whose population is confined to a few thousand states
//! never materializes the full `(cutoff+1)^4` square.

use std::collections::{BTreeMap, HashMap};

use faer::Mat;
use num_complex::Complex64;

use super::label::{BlockKey, BlockLabel};
use super::{ModeLabel, MultiModeBasis, PureState};
use crate::linalg::{self, CMat};
use crate::special::ln_binomial;
use crate::{Error, Result};

/// Largest dense block we are willing to allocate.
pub const MAX_BLOCK_DIM: usize = 4096;
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Cross-block entries up to this magnitude are treated as zero when re-blocking.
pub const LABEL_TOL: f64 = 1e-10;
/// Amplitudes at or below this magnitude may sit outside the projector's block.
const AMPLITUDE_TOL: f64 = 1e-13;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct Block {
    indices: Vec<usize>,
    matrix: CMat,
}

impl Block {
    /// Sorted basis indices spanned by this block.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    fn local(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == ZERO))
    }
}

/// Two-pass block assembly: rows are registered per key first, then the
/// blocks are allocated and filled.
#[derive(Default)]
struct BlockBuilder {
    rows: BTreeMap<BlockKey, Vec<usize>>,
}

impl BlockBuilder {
    fn register(&mut self, key: &BlockKey, index: usize) {
        match self.rows.get_mut(key) {
            Some(v) => v.push(index),
            None => {
                self.rows.insert(key.clone(), vec![index]);
            }
        }
    }

    fn finish(self) -> Result<BTreeMap<BlockKey, Block>> {
        let mut blocks = BTreeMap::new();
        for (key, mut indices) in self.rows {
            indices.sort_unstable();
            indices.dedup();
            let n = indices.len();
            if n > MAX_BLOCK_DIM {
                return Err(Error::BlockTooLarge { dim: n, max: MAX_BLOCK_DIM });
            }
            blocks.insert(key, Block { indices, matrix: Mat::zeros(n, n) });
        }
        Ok(blocks)
    }
}

fn local_positions(target: &Block, rows: &[Option<usize>]) -> Vec<Option<usize>> {
    rows.iter().map(|r| r.and_then(|idx| target.local(idx))).collect()
}

#[derive(Clone, Debug)]
pub struct DensityOperator {
    basis: MultiModeBasis,
    label: BlockLabel,
    blocks: BTreeMap<BlockKey, Block>,
    trace_deficit: f64,
}

/// Numerical health of an operator.
#[derive(Clone, Copy, Debug)]
pub struct InvariantReport {
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub trace_deficit: f64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.hermiticity_error <= HERMITIAN_TOL
            && self.min_eigenvalue >= -1e-9
            && (self.trace + self.trace_deficit - 1.0).abs() <= 1e-9
    }
}

impl DensityOperator {
    fn assemble(basis: MultiModeBasis, label: BlockLabel, blocks: BTreeMap<BlockKey, Block>, trace_deficit: f64) -> Self {
        let blocks = blocks.into_iter().filter(|(_, b)| b.dim() > 0).collect();
        Self { basis, label, blocks, trace_deficit: trace_deficit.max(0.0) }
    }

    pub(crate) fn from_blocks(
        basis: MultiModeBasis,
        label: BlockLabel,
        blocks: Vec<(Vec<usize>, CMat)>,
        trace_deficit: f64,
    ) -> Result<Self> {
        let mut map: BTreeMap<BlockKey, Block> = BTreeMap::new();
        for (indices, matrix) in blocks {
            if indices.is_empty() {
                continue;
            }
            if indices.len() > MAX_BLOCK_DIM {
                return Err(Error::BlockTooLarge { dim: indices.len(), max: MAX_BLOCK_DIM });
            }
            debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
            let key = label.key(&basis, indices[0]);
            debug_assert!(indices.iter().all(|&i| label.key(&basis, i) == key));
            if map.insert(key, Block { indices, matrix }).is_some() {
                return Err(Error::InvalidParameter("two blocks share a key".into()));
            }
        }
        Ok(Self::assemble(basis, label, map, trace_deficit))
    }

    /// Wraps a full dense Hermitian matrix.
    pub fn from_dense(basis: MultiModeBasis, matrix: CMat, trace_deficit: f64) -> Result<Self> {
        let n = basis.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::BasisMismatch);
        }
        if n > MAX_BLOCK_DIM {
            return Err(Error::BlockTooLarge { dim: n, max: MAX_BLOCK_DIM });
        }
        let deviation = linalg::hermiticity_error(matrix.as_ref());
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let mut matrix = matrix;
        linalg::symmetrize(&mut matrix);
        Self::from_blocks(basis, BlockLabel::dense(), vec![((0..n).collect(), matrix)], trace_deficit)
    }

    /// Diagonal operator; any label is conserved by a diagonal matrix.
    pub fn from_diagonal(
        basis: MultiModeBasis,
        label: BlockLabel,
        weights: impl IntoIterator<Item = (usize, f64)>,
        trace_deficit: f64,
    ) -> Result<Self> {
        let mut grouped: BTreeMap<BlockKey, Vec<(usize, f64)>> = BTreeMap::new();
        for (idx, w) in weights {
            if idx >= basis.dim() {
                return Err(Error::BasisMismatch);
            }
            if w != 0.0 {
                grouped.entry(label.key(&basis, idx)).or_default().push((idx, w));
            }
        }
        let mut blocks = BTreeMap::new();
        for (key, mut entries) in grouped {
            entries.sort_by_key(|e| e.0);
            entries.dedup_by_key(|e| e.0);
            let n = entries.len();
            if n > MAX_BLOCK_DIM {
                return Err(Error::BlockTooLarge { dim: n, max: MAX_BLOCK_DIM });
            }
            let mut matrix = Mat::zeros(n, n);
            for (i, &(_, w)) in entries.iter().enumerate() {
                matrix[(i, i)] = Complex64::new(w, 0.0);
            }
            blocks.insert(key, Block { indices: entries.into_iter().map(|e| e.0).collect(), matrix });
        }
        Ok(Self::assemble(basis, label, blocks, trace_deficit))
    }

    /// `|ψ⟩⟨ψ|` stored under `label`. Fails unless every non-negligible
    /// amplitude carries the same key.
    pub fn from_pure(state: &PureState, label: BlockLabel) -> Result<Self> {
        let basis = state.basis().clone();
        let mut main_key: Option<BlockKey> = None;
        let mut worst_outside = 0.0f64;
        for (idx, a) in state.support() {
            if a.norm() <= AMPLITUDE_TOL {
                continue;
            }
            let key = label.key(&basis, idx);
            match &main_key {
                None => main_key = Some(key),
                Some(k) if *k != key => worst_outside = worst_outside.max(a.norm()),
                _ => {}
            }
        }
        if worst_outside > 0.0 {
            return Err(Error::LabelNotConserved { magnitude: worst_outside });
        }
        let Some(key) = main_key else {
            return Ok(Self::assemble(basis, label, BTreeMap::new(), state.truncation_deficit() + state.norm_sqr()));
        };
        let mut dropped = 0.0;
        let mut indices = Vec::new();
        let mut amps = Vec::new();
        for (idx, a) in state.support() {
            if label.key(&basis, idx) == key {
                indices.push(idx);
                amps.push(a);
            } else {
                dropped += a.norm_sqr();
            }
        }
        let n = indices.len();
        if n > MAX_BLOCK_DIM {
            return Err(Error::BlockTooLarge { dim: n, max: MAX_BLOCK_DIM });
        }
        let matrix = Mat::from_fn(n, n, |i, j| amps[i] * amps[j].conj());
        let mut blocks = BTreeMap::new();
        blocks.insert(key, Block { indices, matrix });
        Ok(Self::assemble(basis, label, blocks, state.truncation_deficit() + dropped))
    }

    pub fn basis(&self) -> &MultiModeBasis {
        &self.basis
    }

    pub fn label(&self) -> &BlockLabel {
        &self.label
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&BlockKey, &Block)> {
        self.blocks.iter()
    }

    pub fn block(&self, key: &BlockKey) -> Option<&Block> {
        self.blocks.get(key)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn largest_block(&self) -> usize {
        self.blocks.values().map(Block::dim).max().unwrap_or(0)
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn with_trace_deficit(mut self, deficit: f64) -> Self {
        self.trace_deficit = deficit.max(0.0);
        self
    }

    pub fn trace(&self) -> f64 {
        self.blocks.values().map(Block::trace).sum()
    }

    pub fn purity(&self) -> f64 {
        self.blocks
            .values()
            .map(|b| {
                let n = b.dim();
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| b.matrix[(i, j)].norm_sqr()).sum::<f64>()
            })
            .sum()
    }

    /// True when every stored block is diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.blocks.values().all(Block::is_diagonal)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let key = self.label.key(&self.basis, row);
        if self.label.key(&self.basis, col) != key {
            return ZERO;
        }
        let Some(block) = self.blocks.get(&key) else {
            return ZERO;
        };
        match (block.local(row), block.local(col)) {
            (Some(i), Some(j)) => block.matrix[(i, j)],
            _ => ZERO,
        }
    }

    /// Element by occupation tuples.
    pub fn element(&self, ket: &[usize], bra: &[usize]) -> Complex64 {
        match (self.basis.index_of(ket), self.basis.index_of(bra)) {
            (Some(r), Some(c)) => self.get(r, c),
            _ => ZERO,
        }
    }

    /// All stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.blocks.values().flat_map(|b| {
            let n = b.dim();
            (0..n).flat_map(move |i| (0..n).map(move |j| (b.indices[i], b.indices[j], b.matrix[(i, j)])))
        })
    }

    /// Diagonal weights `(index, ⟨i|ρ|i⟩)` of the stored support.
    pub fn diagonal(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.blocks
            .values()
            .flat_map(|b| b.indices.iter().enumerate().map(move |(i, &idx)| (idx, b.matrix[(i, i)].re)))
    }

    pub fn to_dense(&self) -> Result<CMat> {
        let n = self.basis.dim();
        if n > MAX_BLOCK_DIM {
            return Err(Error::BlockTooLarge { dim: n, max: MAX_BLOCK_DIM });
        }
        let mut m = Mat::zeros(n, n);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        Ok(m)
    }

    /// Largest entrywise difference; both operators must share a basis.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> Result<f64> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::BasisMismatch);
        }
        let a = self.entries().map(|(r, c, v)| (v - other.get(r, c)).norm()).fold(0.0, f64::max);
        let b = other.entries().map(|(r, c, v)| (v - self.get(r, c)).norm()).fold(0.0, f64::max);
        Ok(a.max(b))
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.blocks.values().map(|b| linalg::hermiticity_error(b.matrix.as_ref())).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue, counting the unstored complement as zeros.
    pub fn min_eigenvalue(&self) -> f64 {
        let stored: usize = self.blocks.values().map(Block::dim).sum();
        let floor = if stored < self.basis.dim() { 0.0 } else { f64::INFINITY };
        self.blocks
            .values()
            .filter_map(|b| linalg::hermitian_eigenvalues(b.matrix.as_ref()).first().copied())
            .fold(floor, f64::min)
    }

    pub fn check_invariants(&self) -> InvariantReport {
        InvariantReport {
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.min_eigenvalue(),
            trace: self.trace(),
            trace_deficit: self.trace_deficit,
        }
    }

    /// `ρ / tr ρ`. The result carries no deficit; the trace it had is returned.
    pub fn normalized(&self) -> Result<(DensityOperator, f64)> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            b.matrix = &b.matrix * faer::Scale(Complex64::new(1.0 / tr, 0.0));
        }
        out.trace_deficit = 0.0;
        Ok((out, tr))
    }

    pub fn mean_photon(&self, mode: ModeLabel) -> Result<f64> {
        let pos = self.basis.position(mode)?;
        Ok(self.diagonal().map(|(idx, w)| w * self.basis.occupation(idx, pos) as f64).sum())
    }

    /// Stored entries `ρ_rc` multiplied by `exp(i·angle·(n_r − n_c))` for `mode`.
    pub fn apply_occupation_phase(&self, mode: ModeLabel, angle: f64) -> Result<DensityOperator> {
        let pos = self.basis.position(mode)?;
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            let occ: Vec<f64> = b.indices.iter().map(|&i| self.basis.occupation(i, pos) as f64).collect();
            let n = b.dim();
            for i in 0..n {
                for j in 0..n {
                    if occ[i] != occ[j] {
                        b.matrix[(i, j)] *= Complex64::from_polar(1.0, angle * (occ[i] - occ[j]));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Re-blocks under `label`; fails if an entry above [`LABEL_TOL`] couples
    /// different keys.
    pub fn block_decompose(&self, label: BlockLabel) -> Result<DensityOperator> {
        let mut worst = 0.0f64;
        let mut builder = BlockBuilder::default();
        for b in self.blocks.values() {
            let keys: Vec<BlockKey> = b.indices.iter().map(|&i| label.key(&self.basis, i)).collect();
            let n = b.dim();
            for i in 0..n {
                builder.register(&keys[i], b.indices[i]);
                for j in 0..n {
                    if keys[i] != keys[j] {
                        worst = worst.max(b.matrix[(i, j)].norm());
                    }
                }
            }
        }
        if worst > LABEL_TOL {
            return Err(Error::LabelNotConserved { magnitude: worst });
        }
        let mut blocks = builder.finish()?;
        for b in self.blocks.values() {
            for (key, target) in blocks.iter_mut() {
                let pos: Vec<Option<usize>> = b
                    .indices
                    .iter()
                    .map(|&i| if label.key(&self.basis, i) == *key { target.local(i) } else { None })
                    .collect();
                if pos.iter().all(Option::is_none) {
                    continue;
                }
                for (i, pi) in pos.iter().enumerate() {
                    let Some(pi) = *pi else { continue };
                    for (j, pj) in pos.iter().enumerate() {
                        if let Some(pj) = *pj {
                            target.matrix[(pi, pj)] += b.matrix[(i, j)];
                        }
                    }
                }
            }
        }
        Ok(Self::assemble(self.basis.clone(), label, blocks, self.trace_deficit))
    }

    /// `self ⊗ other` on the concatenated mode list.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
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
        let label = self.label.tensor(&other.label, self.basis.num_modes(), other.basis.num_modes());
        let right_dim = other.basis.dim();
        let mut blocks = BTreeMap::new();
        for (ka, a) in &self.blocks {
            for (kb, b) in &other.blocks {
                let n = a.dim() * b.dim();
                if n > MAX_BLOCK_DIM {
                    return Err(Error::BlockTooLarge { dim: n, max: MAX_BLOCK_DIM });
                }
                let indices: Vec<usize> =
                    a.indices.iter().flat_map(|&i| b.indices.iter().map(move |&j| i * right_dim + j)).collect();
                let nb = b.dim();
                let matrix = Mat::from_fn(n, n, |r, c| a.matrix[(r / nb, c / nb)] * b.matrix[(r % nb, c % nb)]);
                let key: BlockKey = ka.iter().chain(kb).copied().collect();
                blocks.insert(key, Block { indices, matrix });
            }
        }
        let deficit = 1.0 - (1.0 - self.trace_deficit) * (1.0 - other.trace_deficit);
        Ok(Self::assemble(basis, label, blocks, deficit))
    }

    /// Traces out every mode not in `keep`; the result's modes follow the
    /// order of `keep`.
    pub fn partial_trace(&self, keep: &[ModeLabel]) -> Result<DensityOperator> {
        let kept: Vec<usize> = keep.iter().map(|&m| self.basis.position(m)).collect::<Result<_>>()?;
        let traced: Vec<usize> = (0..self.basis.num_modes()).filter(|p| !kept.contains(p)).collect();
        if traced.is_empty() && kept.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let basis = MultiModeBasis::new(keep, self.basis.cutoff())?;
        let label = self.label.restrict(&kept);
        let levels = self.basis.cutoff() + 1;
        let split = |idx: usize| -> (usize, usize) {
            let k = kept.iter().fold(0, |acc, &p| acc * levels + self.basis.occupation(idx, p));
            let t = traced.iter().fold(0, |acc, &p| acc * levels + self.basis.occupation(idx, p));
            (k, t)
        };
        let mut builder = BlockBuilder::default();
        for b in self.blocks.values() {
            for &idx in &b.indices {
                let (k, _) = split(idx);
                builder.register(&label.key(&basis, k), k);
            }
        }
        let mut blocks = builder.finish()?;
        for b in self.blocks.values() {
            let mut groups: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
            for (i, &idx) in b.indices.iter().enumerate() {
                let (k, t) = split(idx);
                groups.entry(t).or_default().push((i, k));
            }
            for rows in groups.values() {
                let key = label.key(&basis, rows[0].1);
                let target = blocks.get_mut(&key).expect("registered");
                let pos: Vec<usize> = rows.iter().map(|&(_, k)| target.local(k).expect("registered")).collect();
                for (a, &(i, _)) in rows.iter().enumerate() {
                    for (c, &(j, _)) in rows.iter().enumerate() {
                        target.matrix[(pos[a], pos[c])] += b.matrix[(i, j)];
                    }
                }
            }
        }
        Ok(Self::assemble(basis, label, blocks, self.trace_deficit))
    }

    /// Same operator with its modes listed in `order` (a permutation).
    pub fn permute_modes(&self, order: &[ModeLabel]) -> Result<DensityOperator> {
        let perm: Vec<usize> = order.iter().map(|&m| self.basis.position(m)).collect::<Result<_>>()?;
        if perm.len() != self.basis.num_modes() {
            return Err(Error::InvalidModes("permutation must list every mode once".into()));
        }
        let basis = MultiModeBasis::new(order, self.basis.cutoff())?;
        let label = self.label.restrict(&perm);
        let remap = |idx: usize| -> usize {
            perm.iter().zip(basis.strides()).map(|(&p, s)| self.basis.occupation(idx, p) * s).sum()
        };
        let mut blocks = BTreeMap::new();
        for b in self.blocks.values() {
            let mut order_local: Vec<(usize, usize)> = b.indices.iter().enumerate().map(|(i, &idx)| (remap(idx), i)).collect();
            order_local.sort_unstable();
            let n = b.dim();
            let matrix = Mat::from_fn(n, n, |r, c| b.matrix[(order_local[r].1, order_local[c].1)]);
            let indices: Vec<usize> = order_local.iter().map(|e| e.0).collect();
            blocks.insert(label.key(&basis, indices[0]), Block { indices, matrix });
        }
        Ok(Self::assemble(basis, label, blocks, self.trace_deficit))
    }

    /// `P ρ P` where `P` projects onto basis states satisfying `keep`; the
    /// removed trace is added to the deficit.
    pub fn project(&self, keep: impl Fn(&MultiModeBasis, usize) -> bool) -> DensityOperator {
        let mut blocks = BTreeMap::new();
        let mut removed = 0.0;
        for (key, b) in &self.blocks {
            let sel: Vec<usize> = (0..b.dim()).filter(|&i| keep(&self.basis, b.indices[i])).collect();
            if sel.len() == b.dim() {
                blocks.insert(key.clone(), b.clone());
                continue;
            }
            removed += b.trace();
            if sel.is_empty() {
                continue;
            }
            let matrix = Mat::from_fn(sel.len(), sel.len(), |r, c| b.matrix[(sel[r], sel[c])]);
            let indices: Vec<usize> = sel.iter().map(|&i| b.indices[i]).collect();
            let blk = Block { indices, matrix };
            removed -= blk.trace();
            blocks.insert(key.clone(), blk);
        }
        Self::assemble(self.basis.clone(), self.label.clone(), blocks, self.trace_deficit + removed)
    }

    /// Projects each mode onto `0..=cutoff` photons and re-expresses the
    /// result on the smaller basis.
    pub fn restrict_cutoff(&self, cutoff: usize) -> Result<DensityOperator> {
        if cutoff >= self.basis.cutoff() {
            if cutoff == self.basis.cutoff() {
                return Ok(self.clone());
            }
            return Err(Error::InvalidParameter("restrict_cutoff cannot enlarge the basis".into()));
        }
        let projected = self.project(|b, idx| (0..b.num_modes()).all(|p| b.occupation(idx, p) <= cutoff));
        let basis = self.basis.with_cutoff(cutoff)?;
        let mut blocks = BTreeMap::new();
        for (key, b) in projected.blocks {
            let indices = b.indices.iter().map(|&i| basis.index_of(&self.basis.occupations(i)).expect("in range")).collect();
            blocks.insert(key, Block { indices, matrix: b.matrix });
        }
        Ok(Self::assemble(basis, projected.label, blocks, projected.trace_deficit))
    }

    /// Single-mode beam-splitter loss with transmissivity `t`, as the Kraus
    /// sum `Σ_p K_p ρ K_p†` with `K_p = R^{p/2} T^{n/2} a^p / √p!`.
    /// Exactly trace preserving on the truncated space.
    pub fn apply_loss(&self, mode: ModeLabel, t: f64) -> Result<DensityOperator> {
        self.apply_loss_capped(mode, t, self.basis.cutoff())
    }

    /// [`apply_loss`](Self::apply_loss) followed by the projection of `mode`
    /// onto `≤ max_out` photons, without building the discarded rows. The
    /// discarded weight joins the deficit.
    pub fn apply_loss_capped(&self, mode: ModeLabel, t: f64, max_out: usize) -> Result<DensityOperator> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("transmissivity {t} outside [0, 1]")));
        }
        let pos = self.basis.position(mode)?;
        let stride = self.basis.strides()[pos];
        let cutoff = self.basis.cutoff();
        let kraus = KrausTable::new(cutoff, t);
        let mut removed = 0.0;
        if max_out < cutoff {
            for b in self.blocks.values() {
                for (i, &idx) in b.indices.iter().enumerate() {
                    let n = self.basis.occupation(idx, pos);
                    let lost: f64 = (0..n.saturating_sub(max_out)).map(|p| kraus.amp(n, p).powi(2)).sum();
                    removed += lost * b.matrix[(i, i)].re;
                }
            }
        }

        // rows surviving p lost photons, mapped to their target index
        let targets = |b: &Block, p: usize| -> Vec<Option<usize>> {
            b.indices
                .iter()
                .map(|&idx| {
                    let n = self.basis.occupation(idx, pos);
                    (n >= p && n - p <= max_out && kraus.amp(n, p) != 0.0).then(|| idx - p * stride)
                })
                .collect()
        };

        let mut builder = BlockBuilder::default();
        for b in self.blocks.values() {
            for p in 0..=cutoff {
                let rows = targets(b, p);
                let Some(first) = rows.iter().flatten().next() else { continue };
                let key = self.label.key(&self.basis, *first);
                for idx in rows.iter().flatten() {
                    builder.register(&key, *idx);
                }
            }
        }
        let mut blocks = builder.finish()?;
        for b in self.blocks.values() {
            let occ: Vec<usize> = b.indices.iter().map(|&i| self.basis.occupation(i, pos)).collect();
            for p in 0..=cutoff {
                let rows = targets(b, p);
                let Some(first) = rows.iter().flatten().next() else { continue };
                let key = self.label.key(&self.basis, *first);
                let target = blocks.get_mut(&key).expect("registered");
                let local = local_positions(target, &rows);
                let live: Vec<(usize, usize, f64)> = local
                    .iter()
                    .enumerate()
                    .filter_map(|(i, l)| l.map(|l| (i, l, kraus.amp(occ[i], p))))
                    .collect();
                for &(j, lj, cj) in &live {
                    let src = b.matrix.col(j).try_as_col_major().expect("owned matrices are contiguous").as_slice();
                    let dst = target.matrix.col_mut(lj).try_as_col_major_mut().expect("contiguous").as_slice_mut();
                    for &(i, li, ci) in &live {
                        dst[li] += src[i] * (ci * cj);
                    }
                }
            }
        }
        Ok(Self::assemble(self.basis.clone(), self.label.clone(), blocks, self.trace_deficit + removed))
    }
}

/// `√(C(n,p) T^{n−p} R^p)` for `0 ≤ p ≤ n ≤ cutoff`.
struct KrausTable {
    levels: usize,
    amps: Vec<f64>,
}

impl KrausTable {
    fn new(cutoff: usize, t: f64) -> Self {
        let levels = cutoff + 1;
        let r = 1.0 - t;
        let mut amps = vec![0.0; levels * levels];
        for n in 0..levels {
            for p in 0..=n {
                let w = if t == 1.0 {
                    if p == 0 { 1.0 } else { 0.0 }
                } else if r == 1.0 {
                    if p == n { 1.0 } else { 0.0 }
                } else {
                    (ln_binomial(n, p) + (n - p) as f64 * t.ln() + p as f64 * r.ln()).exp()
                };
                amps[n * levels + p] = w.sqrt();
            }
        }
        Self { levels, amps }
    }

    #[inline]
    fn amp(&self, n: usize, p: usize) -> f64 {
        self.amps[n * self.levels + p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::CLONING_MODES;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell(cutoff: usize) -> PureState {
        let basis = MultiModeBasis::new(&CLONING_MODES, cutoff).unwrap();
        let mut amps = vec![ZERO; basis.dim()];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        amps[basis.index_of(&[0, 0]).unwrap()] = c(s);
        amps[basis.index_of(&[1, 1]).unwrap()] = c(s);
        PureState::new(basis, amps, 0.0).unwrap()
    }

    #[test]
    fn maximally_entangled_reduction() {
        let psi = bell(1);
        let label = BlockLabel::difference(psi.basis(), &[ModeLabel::K1_PSI], &[ModeLabel::K1_PERP]).unwrap();
        let rho = DensityOperator::from_pure(&psi, label).unwrap();
        let red = rho.partial_trace(&[ModeLabel::K1_PSI]).unwrap();
        let m = red.to_dense().unwrap();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-15);
        assert_eq!(m[(0, 1)], ZERO);
        // the reduced operator inherits the conserved occupation label
        assert!(!red.label().is_dense());
    }

    #[test]
    fn partial_trace_over_nothing_is_identity() {
        let rho = DensityOperator::from_pure(&bell(2), BlockLabel::dense()).unwrap();
        let same = rho.partial_trace(&CLONING_MODES).unwrap();
        assert_eq!(rho.max_abs_diff(&same).unwrap(), 0.0);
    }

    #[test]
    fn tensor_with_maximally_mixed_divides_purity() {
        let rho = DensityOperator::from_pure(&bell(1), BlockLabel::dense()).unwrap();
        let other = MultiModeBasis::new(&[ModeLabel::K2_PSI], 1).unwrap();
        let mixed = DensityOperator::from_diagonal(other, BlockLabel::dense(), [(0, 0.5), (1, 0.5)], 0.0).unwrap();
        let t = rho.tensor(&mixed).unwrap();
        assert!((t.purity() - rho.purity() / 2.0).abs() < 1e-15);
        assert!((t.trace() - 1.0).abs() < 1e-15);
        assert!(rho.tensor(&rho).is_err());
    }

    #[test]
    fn tensor_of_vacua_is_vacuum() {
        let a = MultiModeBasis::new(&[ModeLabel::K1_PSI], 3).unwrap();
        let b = MultiModeBasis::new(&[ModeLabel::K2_PERP], 3).unwrap();
        let va = DensityOperator::from_diagonal(a, BlockLabel::dense(), [(0, 1.0)], 0.0).unwrap();
        let vb = DensityOperator::from_diagonal(b, BlockLabel::dense(), [(0, 1.0)], 0.0).unwrap();
        let v = va.tensor(&vb).unwrap();
        assert_eq!(v.basis().modes(), &[ModeLabel::K1_PSI, ModeLabel::K2_PERP]);
        assert_eq!(v.element(&[0, 0], &[0, 0]), c(1.0));
        assert_eq!(v.entries().count(), 1);
    }

    #[test]
    fn block_decompose_rejects_unconserved_label() {
        let basis = MultiModeBasis::new(&CLONING_MODES, 1).unwrap();
        let m = Mat::from_fn(4, 4, |i, j| if i == j { c(0.25) } else { c(0.01) });
        let rho = DensityOperator::from_dense(basis.clone(), m, 0.0).unwrap();
        let label = BlockLabel::occupation(&basis, ModeLabel::K1_PSI).unwrap();
        assert!(matches!(rho.block_decompose(label), Err(Error::LabelNotConserved { .. })));
    }

    #[test]
    fn diagonal_operator_splits_into_unit_blocks() {
        let basis = MultiModeBasis::new(&[ModeLabel::K1_PSI], 4).unwrap();
        let w: Vec<(usize, f64)> = (0..5).map(|i| (i, 0.2)).collect();
        let rho = DensityOperator::from_diagonal(basis.clone(), BlockLabel::dense(), w, 0.0).unwrap();
        let split = rho.block_decompose(BlockLabel::occupation(&basis, ModeLabel::K1_PSI).unwrap()).unwrap();
        assert_eq!(split.num_blocks(), 5);
        assert_eq!(split.largest_block(), 1);
        assert_eq!(split.max_abs_diff(&rho).unwrap(), 0.0);
    }

    #[test]
    fn loss_extremes() {
        let rho = DensityOperator::from_pure(&bell(3), BlockLabel::dense()).unwrap();
        let same = rho.apply_loss(ModeLabel::K1_PSI, 1.0).unwrap();
        assert_eq!(same.max_abs_diff(&rho).unwrap(), 0.0);
        let gone = rho.apply_loss(ModeLabel::K1_PSI, 0.0).unwrap();
        assert!((gone.element(&[0, 0], &[0, 0]).re - 0.5).abs() < 1e-15);
        assert!((gone.element(&[0, 1], &[0, 1]).re - 0.5).abs() < 1e-15);
        let before = rho.partial_trace(&[ModeLabel::K1_PERP]).unwrap();
        let after = gone.partial_trace(&[ModeLabel::K1_PERP]).unwrap();
        assert!(before.max_abs_diff(&after).unwrap() < 1e-15);
        assert!(rho.apply_loss(ModeLabel::K1_PSI, 1.5).is_err());
        assert!(rho.apply_loss(ModeLabel::K2_PSI, 0.5).is_err());
    }

    #[test]
    fn restrict_cutoff_records_lost_trace() {
        let basis = MultiModeBasis::new(&[ModeLabel::K1_PSI], 3).unwrap();
        let rho = DensityOperator::from_diagonal(basis, BlockLabel::dense(), [(0, 0.5), (2, 0.3), (3, 0.2)], 0.0).unwrap();
        let small = rho.restrict_cutoff(1).unwrap();
        assert_eq!(small.basis().dim(), 2);
        assert!((small.trace() - 0.5).abs() < 1e-15);
        assert!((small.trace_deficit() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn permutation_round_trip() {
        let basis = MultiModeBasis::new(&CLONING_MODES, 2).unwrap();
        let mut amps = vec![ZERO; basis.dim()];
        amps[basis.index_of(&[2, 0]).unwrap()] = c(0.6);
        amps[basis.index_of(&[0, 1]).unwrap()] = Complex64::new(0.0, 0.8);
        let psi = PureState::new(basis, amps, 0.0).unwrap();
        let rho = DensityOperator::from_pure(&psi, BlockLabel::dense()).unwrap();
        let swapped = rho.permute_modes(&[ModeLabel::K1_PERP, ModeLabel::K1_PSI]).unwrap();
        assert_eq!(swapped.element(&[1, 0], &[0, 2]), rho.element(&[0, 1], &[2, 0]));
        let back = swapped.permute_modes(&CLONING_MODES).unwrap();
        assert_eq!(back.max_abs_diff(&rho).unwrap(), 0.0);
    }
}
