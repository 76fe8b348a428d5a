//! Passive polarization rotations applied to every spatial mode at once.

use num_complex::Complex64;

use super::direction::{adjoint, mul, ModeUnitary, QubitDirection};
use crate::fock::{MultiModeBasis, Polarization, PureState, Spatial};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Images of `|n, N−n⟩` under the two-mode unitary, for every sector `N`.
/// `maps[N][n][p]` is the amplitude on `|p, N−p⟩`.
///
/// Built by repeatedly applying the transformed creation operators rather
/// than from the explicit binomial sum, which cancels badly at high photon
/// numbers.
fn sector_maps(u: &ModeUnitary, max_total: usize) -> Vec<Vec<Vec<Complex64>>> {
    let create = |v: &[Complex64], col: usize| -> Vec<Complex64> {
        // (u[0][col] a₁† + u[1][col] a₂†) applied to a sector-(len-1) vector
        let total = v.len() - 1;
        let mut w = vec![ZERO; v.len() + 1];
        for (p, &a) in v.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            w[p + 1] += u[0][col] * a * ((p + 1) as f64).sqrt();
            w[p] += u[1][col] * a * ((total - p + 1) as f64).sqrt();
        }
        w
    };
    let mut maps = vec![vec![vec![Complex64::new(1.0, 0.0)]]];
    for total in 1..=max_total {
        let prev = &maps[total - 1];
        let sector: Vec<Vec<Complex64>> = (0..=total)
            .map(|n| {
                // raise whichever occupation is larger, which keeps the
                // per-step error amplification near one
                let m = total - n;
                let (src, col, k) = if n >= m { (&prev[n - 1], 0, n) } else { (&prev[n], 1, m) };
                let scale = 1.0 / (k as f64).sqrt();
                create(src, col).into_iter().map(|a| a * scale).collect()
            })
            .collect();
        maps.push(sector);
    }
    maps
}

/// Polarization position pairs `(ψ, ψ⊥)` per spatial mode present in `basis`.
fn polarization_pairs(basis: &MultiModeBasis) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for spatial in [Spatial::K1, Spatial::K2] {
        let find = |pol| basis.modes().iter().position(|m| m.spatial == spatial && m.polarization == pol);
        match (find(Polarization::Psi), find(Polarization::Perp)) {
            (Some(a), Some(b)) => pairs.push((a, b)),
            (None, None) => {}
            _ => {
                return Err(Error::InvalidModes(format!(
                    "rotating {spatial:?} needs both of its polarization modes"
                )))
            }
        }
    }
    Ok(pairs)
}

/// Applies `u` to the polarization pair at positions `(a, b)`. Components
/// whose pair photon count exceeds the cutoff cannot be represented after
/// the rotation and are moved to the deficit.
fn rotate_pair(state: &PureState, a: usize, b: usize, u: &ModeUnitary) -> Result<PureState> {
    let basis = state.basis();
    let cutoff = basis.cutoff();
    let (sa, sb) = (basis.strides()[a], basis.strides()[b]);
    let maps = sector_maps(u, cutoff);
    let mut out = vec![ZERO; basis.dim()];
    let mut dropped = 0.0;
    for (idx, amp) in state.support() {
        let (na, nb) = (basis.occupation(idx, a), basis.occupation(idx, b));
        let total = na + nb;
        if total > cutoff {
            dropped += amp.norm_sqr();
            continue;
        }
        let rest = idx - na * sa - nb * sb;
        for (p, &coef) in maps[total][na].iter().enumerate() {
            out[rest + p * sa + (total - p) * sb] += amp * coef;
        }
    }
    PureState::new(basis.clone(), out, state.truncation_deficit() + dropped)
}

/// Re-expresses a state built with `from` as its reference polarization in
/// terms of `to`: the mode unitary `U(to) U(from)†` is applied to the
/// polarization pair of every spatial mode.
pub fn basis_rotate(state: &PureState, from: QubitDirection, to: QubitDirection) -> Result<PureState> {
    let w = mul(&to.unitary(), &adjoint(&from.unitary()));
    apply_mode_unitary(state, &w)
}

pub fn apply_mode_unitary(state: &PureState, u: &ModeUnitary) -> Result<PureState> {
    let mut current = state.clone();
    for (a, b) in polarization_pairs(state.basis())? {
        current = rotate_pair(&current, a, b, u)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::{CLONING_MODES, UNIVERSAL_MODES};
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_photon_is_rotated_into_the_qubit() {
        let basis = MultiModeBasis::new(&CLONING_MODES, 3).unwrap();
        let h = PureState::fock(basis, &[1, 0]).unwrap();
        let dir = QubitDirection::new(0.9, 2.3).unwrap();
        let r = basis_rotate(&h, QubitDirection::H, dir).unwrap();
        let (s, c) = (0.45f64).sin_cos();
        assert!((r.amplitude(&[1, 0]) - c).norm() < 1e-15);
        assert!((r.amplitude(&[0, 1]) - Complex64::from_polar(s, 2.3)).norm() < 1e-15);
        let same = basis_rotate(&h, dir, dir).unwrap();
        assert!((same.inner(&h).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn sector_maps_are_unitary_at_high_photon_number() {
        let dir = QubitDirection::new(1.3, 0.8).unwrap();
        let maps = sector_maps(&dir.unitary(), 80);
        for (total, tol) in [(40, 1e-13), (80, 1e-12)] {
            let sector = &maps[total];
            for i in [0, 17, total / 2, total] {
                for j in [0, 17, total / 2, total] {
                    let ip: Complex64 = sector[i].iter().zip(&sector[j]).map(|(x, y)| x.conj() * y).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - expected).norm() < tol, "{total}: {i} {j} {ip}");
                }
            }
        }
    }

    #[test]
    fn random_rotations_preserve_norm_and_compose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let basis = MultiModeBasis::new(&UNIVERSAL_MODES, 4).unwrap();
        let amps: Vec<Complex64> = (0..basis.dim())
            .map(|i| {
                let occ = basis.occupations(i);
                if occ[0] + occ[1] <= 4 && occ[2] + occ[3] <= 4 {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    ZERO
                }
            })
            .collect();
        let psi = PureState::normalized_from(basis, amps).unwrap();
        for _ in 0..5 {
            let a = QubitDirection::new(rng.random_range(0.0..std::f64::consts::PI), rng.random_range(0.0..std::f64::consts::TAU)).unwrap();
            let b = QubitDirection::new(rng.random_range(0.0..std::f64::consts::PI), rng.random_range(0.0..std::f64::consts::TAU)).unwrap();
            let r = basis_rotate(&psi, a, b).unwrap();
            assert!((r.norm_sqr() - 1.0).abs() < 1e-12);
            let back = basis_rotate(&r, b, a).unwrap();
            assert!((back.inner(&psi).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn lone_polarization_is_rejected() {
        let basis = MultiModeBasis::new(&[crate::fock::ModeLabel::K1_PSI], 2).unwrap();
        let v = PureState::vacuum(basis);
        assert!(basis_rotate(&v, QubitDirection::H, QubitDirection::V).is_err());
    }
}
