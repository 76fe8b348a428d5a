use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_TERMS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

/// Gauss series `Σ (a)_k (b)_k / (c)_k · z^k / k!` for `|z| < 1`, summed with
/// the term ratio until a term drops below `1e-16` of the partial sum.
pub fn hyp2f1(p: Hyp2F1Params) -> Result<f64> {
    let Hyp2F1Params { a, b, c, z } = p;
    if !(z.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("₂F₁ series needs |z| < 1, got {z}")));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Hyp2F1Pole { c });
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Hyp2F1NonConvergence { terms: MAX_TERMS })
}

/// Shorthand for [`hyp2f1`].
pub fn hyp2f1_abcz(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1(Hyp2F1Params { a, b, c, z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_arguments() {
        assert_eq!(hyp2f1_abcz(3.0, 4.0, 5.0, 0.0).unwrap(), 1.0);
        assert_eq!(hyp2f1_abcz(0.0, 4.0, 5.0, 0.7).unwrap(), 1.0);
        assert!(matches!(hyp2f1_abcz(1.0, 1.0, -2.0, 0.5), Err(Error::Hyp2F1Pole { .. })));
        assert!(hyp2f1_abcz(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn logarithm_identity() {
        for z in [0.5, 0.1, 0.9, -0.6] {
            let expected = -(1.0f64 - z).ln() / z;
            assert!((hyp2f1_abcz(1.0, 1.0, 2.0, z).unwrap() - expected).abs() < 1e-14 * expected);
        }
        assert!((hyp2f1_abcz(1.0, 1.0, 2.0, 0.5).unwrap() - 1.386_294_361_119_890_6).abs() < 1e-15);
    }

    #[test]
    fn binomial_identity_at_large_parameters() {
        // ₂F₁(a, b; b; z) = (1 − z)^{−a}
        let z: f64 = 0.69;
        let v = hyp2f1_abcz(57.0, 41.0, 41.0, z).unwrap();
        let expected = (1.0 - z).powf(-57.0);
        assert!((v / expected - 1.0).abs() < 1e-13, "{v} {expected}");
    }

    #[test]
    fn negative_integer_numerator_terminates() {
        // ₂F₁(−2, b; c; z) = 1 − 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (3.0, 4.0, 0.3);
        let expected = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!((hyp2f1_abcz(-2.0, b, c, z).unwrap() - expected).abs() < 1e-15);
    }
}
