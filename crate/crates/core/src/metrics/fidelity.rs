use std::collections::BTreeSet;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::fock::{BlockKey, DensityOperator, PureState};
use crate::linalg::{self, CMat};
use crate::{Error, Result};

/// Operators whose traces differ by more than this are not compared.
pub const TRACE_TOLERANCE: f64 = 1e-6;
/// Total clipped negative eigenvalue mass above which inputs are rejected.
pub const CLIPPED_MASS_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PureOverlap,
    CommutingDiagonal,
    HermitianEig,
    Blockwise,
}

/// Uhlmann fidelity with the derived Bures distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub fidelity: f64,
    pub bures: f64,
    pub method: Method,
    /// Magnitude of negative eigenvalues clipped to zero along the way.
    pub clipped_mass: f64,
    /// Largest truncation deficit among the compared operators.
    pub trace_deficit: f64,
}

impl DistanceResult {
    pub fn from_fidelity(fidelity: f64, method: Method, clipped_mass: f64) -> Result<Self> {
        if clipped_mass > CLIPPED_MASS_LIMIT {
            return Err(Error::ClippedMass { mass: clipped_mass });
        }
        let fidelity = fidelity.clamp(0.0, 1.0);
        let bures = (1.0 - fidelity.sqrt()).max(0.0).sqrt();
        Ok(Self { fidelity, bures, method, clipped_mass, trace_deficit: 0.0 })
    }

    fn with_deficit(mut self, deficit: f64) -> Self {
        self.trace_deficit = deficit;
        self
    }

    /// Fidelity of a tensor product from the fidelities of its factors.
    pub fn product(results: &[DistanceResult], method: Method) -> Result<Self> {
        let f = results.iter().map(|r| r.fidelity).product();
        let clipped = results.iter().map(|r| r.clipped_mass).sum();
        let deficit = results.iter().map(|r| r.trace_deficit).fold(0.0, f64::max);
        Ok(Self::from_fidelity(f, method, clipped)?.with_deficit(deficit))
    }
}

/// `|⟨φ|ψ⟩|²`.
pub fn fidelity_pure(a: &PureState, b: &PureState) -> Result<DistanceResult> {
    let overlap = a.inner(b)?;
    let deficit = a.truncation_deficit().max(b.truncation_deficit());
    Ok(DistanceResult::from_fidelity(overlap.norm_sqr(), Method::PureOverlap, 0.0)?.with_deficit(deficit))
}

/// `tr √(√A B √A)` as the nuclear norm of `X†Y` with `A = XX†`, `B = YY†`,
/// which keeps eigenvalue noise from entering through a square root.
fn root_fidelity_dense(a: &CMat, b: &CMat) -> (f64, f64) {
    let (x, clipped_a) = linalg::psd_factor(a.as_ref());
    let (y, clipped_b) = linalg::psd_factor(b.as_ref());
    let m = x.adjoint() * &y;
    (linalg::nuclear_norm(m.as_ref()), clipped_a + clipped_b)
}

/// Dense matrix of `rho` restricted to `support` (sorted basis indices).
fn embed(rho: &DensityOperator, key: Option<&BlockKey>, support: &[usize]) -> CMat {
    let n = support.len();
    let mut m = Mat::zeros(n, n);
    let blocks: Vec<_> = match key {
        Some(k) => rho.block(k).into_iter().collect(),
        None => rho.blocks().map(|(_, b)| b).collect(),
    };
    for b in blocks {
        let pos: Vec<usize> = b.indices().iter().map(|i| support.binary_search(i).expect("in support")).collect();
        for (i, &pi) in pos.iter().enumerate() {
            for (j, &pj) in pos.iter().enumerate() {
                m[(pi, pj)] = b.matrix()[(i, j)];
            }
        }
    }
    m
}

fn union_support<'a>(parts: impl Iterator<Item = &'a [usize]>) -> Vec<usize> {
    parts.flat_map(|p| p.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect()
}

fn commuting_diagonal(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    let mut clipped = 0.0;
    let mut q = std::collections::HashMap::new();
    for (idx, v) in sigma.diagonal() {
        clipped += (-v).max(0.0);
        q.insert(idx, v.max(0.0));
    }
    let mut root = 0.0;
    for (idx, p) in rho.diagonal() {
        clipped += (-p).max(0.0);
        if let Some(qv) = q.get(&idx) {
            root += (p.max(0.0) * qv).sqrt();
        }
    }
    DistanceResult::from_fidelity(root * root, Method::CommutingDiagonal, clipped)
}

fn blockwise(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    let mut root = 0.0;
    let mut clipped = 0.0;
    for (key, a) in rho.blocks() {
        let Some(b) = sigma.block(key) else { continue };
        let support = union_support([a.indices(), b.indices()].into_iter());
        let ma = embed(rho, Some(key), &support);
        let mb = embed(sigma, Some(key), &support);
        let (s, c) = root_fidelity_dense(&ma, &mb);
        root += s;
        clipped += c;
    }
    DistanceResult::from_fidelity(root * root, Method::Blockwise, clipped)
}

fn dense(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    let support = union_support(rho.blocks().chain(sigma.blocks()).map(|(_, b)| b.indices()));
    if support.len() > crate::fock::MAX_BLOCK_DIM {
        return Err(Error::BlockTooLarge { dim: support.len(), max: crate::fock::MAX_BLOCK_DIM });
    }
    let (s, c) = root_fidelity_dense(&embed(rho, None, &support), &embed(sigma, None, &support));
    DistanceResult::from_fidelity(s * s, Method::HermitianEig, c)
}

/// Uhlmann fidelity `[tr √(√ρ σ √ρ)]²` of two operators on the same basis.
///
/// Diagonal pairs take the classical formula; operators sharing a conserved
/// label are compared block by block; anything else falls back to one dense
/// eigenproblem on the union of the supports.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    let deficit = rho.trace_deficit().max(sigma.trace_deficit());
    Ok(fidelity_inner(rho, sigma)?.with_deficit(deficit))
}

fn fidelity_inner(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    if !rho.basis().same_space(sigma.basis()) {
        return Err(Error::BasisMismatch);
    }
    // a fixed operand order makes the result exactly symmetric
    let (rho, sigma) = if entry_order(rho, sigma).is_gt() { (sigma, rho) } else { (rho, sigma) };
    let difference = (rho.trace() - sigma.trace()).abs();
    if difference > TRACE_TOLERANCE {
        return Err(Error::TraceMismatch { difference });
    }
    if rho.is_diagonal() && sigma.is_diagonal() {
        return commuting_diagonal(rho, sigma);
    }
    if rho.label() == sigma.label() && !rho.label().is_dense() {
        return blockwise(rho, sigma);
    }
    if !rho.label().is_dense() {
        if let Ok(s) = sigma.block_decompose(rho.label().clone()) {
            return blockwise(rho, &s);
        }
    }
    if !sigma.label().is_dense() {
        if let Ok(r) = rho.block_decompose(sigma.label().clone()) {
            return blockwise(&r, sigma);
        }
    }
    dense(rho, sigma)
}

fn entry_order(a: &DensityOperator, b: &DensityOperator) -> std::cmp::Ordering {
    let key = |(r, c, v): (usize, usize, num_complex::Complex64)| (r, c, v.re.to_bits(), v.im.to_bits());
    a.entries().map(key).cmp(b.entries().map(key))
}

/// Same as [`fidelity`] but always through one dense eigenproblem.
pub fn fidelity_dense(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    if !rho.basis().same_space(sigma.basis()) {
        return Err(Error::BasisMismatch);
    }
    Ok(dense(rho, sigma)?.with_deficit(rho.trace_deficit().max(sigma.trace_deficit())))
}

/// `𝒟 = √(1 − √ℱ)`; identical to [`fidelity`], named for call sites that
/// only want the distance.
pub fn bures(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DistanceResult> {
    fidelity(rho, sigma)
}
