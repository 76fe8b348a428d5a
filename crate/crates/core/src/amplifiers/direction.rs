use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A qubit direction `cos(θ/2)|H⟩ + e^{iφ} sin(θ/2)|V⟩` on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitDirection {
    theta: f64,
    phi: f64,
}

/// 2×2 unitary acting on the (ψ, ψ⊥) creation operators.
pub type ModeUnitary = [[Complex64; 2]; 2];

impl QubitDirection {
    pub const H: QubitDirection = QubitDirection { theta: 0.0, phi: 0.0 };
    pub const V: QubitDirection = QubitDirection { theta: PI, phi: 0.0 };

    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("direction θ={theta}, φ={phi}")));
        }
        Ok(Self { theta, phi: phi.rem_euclid(2.0 * PI) })
    }

    /// `(H + e^{iφ} V)/√2`.
    pub fn equatorial(phi: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn is_equatorial(&self) -> bool {
        (self.theta - FRAC_PI_2).abs() < 1e-12
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// The orthogonal direction ψ⊥.
    pub fn antipode(&self) -> Self {
        Self { theta: PI - self.theta, phi: (self.phi + PI).rem_euclid(2.0 * PI) }
    }

    /// Special unitary sending H to ψ and V to ψ⊥ (up to phase).
    pub fn unitary(&self) -> ModeUnitary {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [[Complex64::new(c, 0.0), -e.conj() * s], [e * s, Complex64::new(c, 0.0)]]
    }
}

pub(crate) fn mul(a: &ModeUnitary, b: &ModeUnitary) -> ModeUnitary {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn adjoint(a: &ModeUnitary) -> ModeUnitary {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipode_is_orthogonal() {
        let d = QubitDirection::new(1.1, 4.0).unwrap();
        let (u, w) = (d.unitary(), d.antipode().unitary());
        let overlap = u[0][0].conj() * w[0][0] + u[1][0].conj() * w[1][0];
        assert!(overlap.norm() < 1e-15);
        let (a, b) = (d.bloch_vector(), d.antipode().bloch_vector());
        for i in 0..3 {
            assert!((a[i] + b[i]).abs() < 1e-15);
        }
        let p = mul(&u, &adjoint(&u));
        assert!((p[0][0] - 1.0).norm() < 1e-15 && p[0][1].norm() < 1e-15);
    }
}
