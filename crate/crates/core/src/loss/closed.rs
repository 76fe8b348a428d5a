//! Closed-form lossy density matrices of the amplifier outputs.
//!
//! On a mode pair (m₁, m₂) with transmissivities (T₁, T₂) every nonzero entry
//! couples `|i, j⟩` to `⟨k, j+k−i|`, so `n₁ − n₂` labels the blocks. The sum
//! over lost photons collapses to a Gauss series in `z = Γ² R₁ R₂`.

use faer::Mat;
use num_complex::Complex64;

use super::hyp2f1::hyp2f1_abcz;
use super::LossSpec;
use crate::amplifiers::{Gain, Seed, Subsystem};
use crate::fock::mode::UNIVERSAL_MODES;
use crate::fock::{BlockLabel, DensityOperator, ModeLabel, MultiModeBasis};
use crate::linalg::CMat;
use crate::special::{ln_factorial, powi};
use crate::Result;

/// `(sΓ)^n`
fn gamma_power(gamma: f64, sign: f64, n: usize) -> f64 {
    let v = powi(gamma, n);
    if sign < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

fn sqrt_fact(n: usize) -> f64 {
    0.5 * ln_factorial(n)
}

struct PairContext {
    gamma: f64,
    sign: f64,
    c: f64,
    loss: LossSpec,
    z: f64,
}

impl PairContext {
    fn new(gain: Gain, subsystem: Subsystem, loss: LossSpec) -> Self {
        let gamma = gain.gamma();
        Self { gamma, sign: subsystem.gamma_sign(), c: gain.c(), loss, z: gamma * gamma * loss.r1() * loss.r2() }
    }

    /// `T₁^{(i+k)/2} T₂^{(j+l)/2}`
    fn transmission(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.loss.t1().powf((i + k) as f64 / 2.0) * self.loss.t2().powf((j + l) as f64 / 2.0)
    }

    /// Entry `⟨i, j| ρ₀ |k, l⟩` of the lossy two-mode squeezed vacuum.
    fn spontaneous(&self, i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
        let head = self.transmission(i, j, k, l) / (self.c * self.c);
        if head == 0.0 {
            return Ok(0.0);
        }
        let v = if i >= j {
            let d = i - j;
            let r = powi(self.loss.r2(), d);
            if r == 0.0 {
                return Ok(0.0);
            }
            let ln = sqrt_fact(i) + sqrt_fact(k) - ln_factorial(d) - sqrt_fact(j) - sqrt_fact(l);
            gamma_power(self.gamma, self.sign, i + k)
                * r
                * ln.exp()
                * hyp2f1_abcz((1 + i) as f64, (1 + k) as f64, (1 + d) as f64, self.z)?
        } else {
            let d = j - i;
            let r = powi(self.loss.r1(), d);
            if r == 0.0 {
                return Ok(0.0);
            }
            let ln = sqrt_fact(j) + sqrt_fact(l) - ln_factorial(d) - sqrt_fact(i) - sqrt_fact(k);
            gamma_power(self.gamma, self.sign, j + l)
                * r
                * ln.exp()
                * hyp2f1_abcz((1 + j) as f64, (1 + l) as f64, (1 + d) as f64, self.z)?
        };
        Ok(head * v)
    }

    /// Entry `⟨i, j| ρ₁ |k, l⟩` of the lossy seeded squeezer (photon injected
    /// into the first mode). The prefactor is `1/C⁴` in both branches and the
    /// `i ≤ j` branch carries `Γ^{j+l}`; with these the entries agree with
    /// the Kraus sum to rounding.
    fn seeded(&self, i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
        let head = self.transmission(i, j, k, l) / self.c.powi(4);
        if head == 0.0 {
            return Ok(0.0);
        }
        let v = if i > j {
            let d = i - j - 1;
            let r = powi(self.loss.r2(), d);
            if r == 0.0 {
                return Ok(0.0);
            }
            let ln = sqrt_fact(i) + sqrt_fact(k) - ln_factorial(d) - sqrt_fact(j) - sqrt_fact(l);
            gamma_power(self.gamma, self.sign, i + k - 2)
                * r
                * ln.exp()
                * hyp2f1_abcz((1 + i) as f64, (1 + k) as f64, (i - j) as f64, self.z)?
        } else {
            let d = j - i + 1;
            let r = powi(self.loss.r1(), d);
            if r == 0.0 {
                return Ok(0.0);
            }
            let ln = sqrt_fact(j) + sqrt_fact(l) - ln_factorial(d) - sqrt_fact(i) - sqrt_fact(k);
            gamma_power(self.gamma, self.sign, j + l)
                * ((j + 1) * (l + 1)) as f64
                * r
                * ln.exp()
                * hyp2f1_abcz((2 + j) as f64, (2 + l) as f64, (1 + d) as f64, self.z)?
        };
        Ok(head * v)
    }
}

/// Assembles the `n₁ − n₂` blocks on the pair basis from an entry function.
fn assemble(
    modes: [ModeLabel; 2],
    cutoff: usize,
    entry: impl Fn(usize, usize, usize, usize) -> Result<f64>,
) -> Result<DensityOperator> {
    let basis = MultiModeBasis::new(&modes, cutoff)?;
    let label = BlockLabel::difference(&basis, &[modes[0]], &[modes[1]])?;
    let c = cutoff as i64;
    let mut blocks: Vec<(Vec<usize>, CMat)> = Vec::new();
    for d in -c..=c {
        let rows: Vec<(usize, usize)> =
            (d.max(0)..=c.min(c + d)).map(|i| (i as usize, (i - d) as usize)).collect();
        let n = rows.len();
        let mut m: CMat = Mat::zeros(n, n);
        let mut nonzero = false;
        for (a, &(i, j)) in rows.iter().enumerate() {
            for (b, &(k, l)) in rows.iter().enumerate().skip(a) {
                let v = entry(i, j, k, l)?;
                if v != 0.0 {
                    nonzero = true;
                    m[(a, b)] = Complex64::new(v, 0.0);
                    m[(b, a)] = Complex64::new(v, 0.0);
                }
            }
        }
        if nonzero {
            let indices = rows.iter().map(|&(i, j)| basis.index_of(&[i, j]).expect("in range")).collect();
            blocks.push((indices, m));
        }
    }
    let rho = DensityOperator::from_blocks(basis, label, blocks, 0.0)?;
    let deficit = (1.0 - rho.trace()).max(0.0);
    Ok(rho.with_trace_deficit(deficit))
}

/// Lossy two-mode squeezed vacuum on the subsystem's modes; the first mode
/// sits in k1 (transmissivity T₁), the second in k2 (T₂).
pub fn lossy_spontaneous(gain: Gain, subsystem: Subsystem, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    let ctx = PairContext::new(gain, subsystem, loss);
    assemble(subsystem.modes(), cutoff, |i, j, k, l| ctx.spontaneous(i, j, k, l))
}

/// Lossy seeded squeezer with the photon injected into the subsystem's k1 mode.
pub fn lossy_seeded(gain: Gain, subsystem: Subsystem, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    let ctx = PairContext::new(gain, subsystem, loss);
    assemble(subsystem.modes(), cutoff, |i, j, k, l| ctx.seeded(i, j, k, l))
}

/// The 𝒜 and 𝒜′ factors of the lossy universal output for `seed`.
pub fn lossy_universal_factors(
    gain: Gain,
    seed: Seed,
    loss: LossSpec,
    cutoff: usize,
) -> Result<(DensityOperator, DensityOperator)> {
    match seed {
        Seed::Psi => Ok((
            lossy_seeded(gain, Subsystem::A, loss, cutoff)?,
            lossy_spontaneous(gain, Subsystem::APrime, loss, cutoff)?,
        )),
        Seed::Perp => Ok((
            lossy_spontaneous(gain, Subsystem::A, loss, cutoff)?,
            lossy_seeded(gain, Subsystem::APrime, loss, cutoff)?,
        )),
    }
}

/// Four-mode lossy universal output in canonical mode order.
pub fn lossy_universal(gain: Gain, seed: Seed, loss: LossSpec, cutoff: usize) -> Result<DensityOperator> {
    MultiModeBasis::new(&UNIVERSAL_MODES, cutoff)?;
    let (a, a_prime) = lossy_universal_factors(gain, seed, loss, cutoff)?;
    a.tensor(&a_prime)?.permute_modes(&UNIVERSAL_MODES)
}

/// Diagonal weight of `|i ψ, j ψ⊥⟩` in the cloning-mode state after loss `η`
/// for the ψ seed.
pub fn reduced_k1_weight(gain: Gain, eta: f64, i: usize, j: usize) -> f64 {
    let g2 = gain.gamma() * gain.gamma();
    let lost = g2 * (1.0 - eta);
    let tail = (1.0 - lost).powf(-3.0 - (i + j) as f64);
    let eta_pow = eta.powf((i + j) as f64);
    // Γ^{2i+2j−2} (i + Γ²(1−η)), with the Γ^{-2} absorbed when i = 0
    let lead = if i == 0 { powi(g2, j) * (1.0 - eta) } else { powi(g2, i + j - 1) * (i as f64 + lost) };
    lead * eta_pow * tail / gain.c().powi(6)
}

/// Cloning-mode (k1) reduced state after loss `η` on k1, on the modes
/// (k1,ψ), (k1,ψ⊥). Diagonal; each basis state is its own block.
pub fn reduced_k1_lossy(gain: Gain, seed: Seed, eta: f64, cutoff: usize) -> Result<DensityOperator> {
    LossSpec::new(eta, 1.0)?;
    let modes = [ModeLabel::K1_PSI, ModeLabel::K1_PERP];
    let basis = MultiModeBasis::new(&modes, cutoff)?;
    let label = BlockLabel::occupation(&basis, modes[0])?.and(BlockLabel::occupation(&basis, modes[1])?);
    let mut weights = Vec::with_capacity(basis.dim());
    for i in 0..=cutoff {
        for j in 0..=cutoff {
            let w = match seed {
                Seed::Psi => reduced_k1_weight(gain, eta, i, j),
                Seed::Perp => reduced_k1_weight(gain, eta, j, i),
            };
            weights.push((basis.index_of(&[i, j]).expect("in range"), w));
        }
    }
    let rho = DensityOperator::from_diagonal(basis, label, weights, 0.0)?;
    let deficit = (1.0 - rho.trace()).max(0.0);
    Ok(rho.with_trace_deficit(deficit))
}
