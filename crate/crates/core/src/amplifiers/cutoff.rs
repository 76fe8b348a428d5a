//! Default cutoffs from the analytically known truncation tails.

use serde::{Deserialize, Serialize};

use super::Gain;
use crate::{Error, Result};

/// Largest truncation deficit the default cutoff rule accepts.
pub const DEFICIT_TARGET: f64 = 1e-8;

const MAX_CUTOFF: usize = 20_000;

/// State families with a closed-form photon-number tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    /// `(1/C) Σ Γⁿ |n, n⟩`, per-mode cutoff.
    TwoModeVacuum,
    /// `(1/C²) Σ Γⁿ √(n+1) |n+1, n⟩`, per-mode cutoff.
    Seeded,
    /// Four-mode universal output, per-mode cutoff.
    Universal,
    /// Four-mode universal output, cutoff on the photon total of each spatial mode.
    UniversalSpatialTotal,
    /// Phase-covariant output, cutoff on the total photon number.
    PhaseCovariant,
}

/// `Σ_{n ≥ start} term(n)` for a positive, eventually decreasing series.
fn tail_sum(start: usize, term: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut prev = f64::INFINITY;
    let mut n = start;
    loop {
        let t = term(n);
        acc += t;
        // two consecutive negligible terms, so series with zero entries at
        // alternate n do not stop early
        let small = |v: f64| v <= 1e-18 * acc.max(1e-300);
        if small(t) && small(prev) || n > start + 1_000_000 {
            return acc;
        }
        prev = t;
        n += 1;
    }
}

/// Probability mass above `cutoff` for the given family.
pub fn analytic_deficit(family: StateFamily, gain: Gain, cutoff: usize) -> f64 {
    let x = gain.gamma() * gain.gamma();
    let seeded = |c: usize| {
        if c == 0 {
            1.0
        } else {
            x.powi(c as i32) * (1.0 + c as f64 * (1.0 - x))
        }
    };
    let vacuum = |c: usize| x.powi(c as i32 + 1);
    let d = match family {
        StateFamily::TwoModeVacuum => vacuum(cutoff),
        StateFamily::Seeded => seeded(cutoff),
        StateFamily::Universal => {
            let (a, b) = (seeded(cutoff), vacuum(cutoff));
            a + b - a * b
        }
        StateFamily::UniversalSpatialTotal => {
            // n + m + 1 photons in the cloning mode; P(n+m = s) = x^s (1-x)^3 (s+1)(s+2)/2
            if x == 0.0 {
                if cutoff == 0 { 1.0 } else { 0.0 }
            } else if cutoff == 0 {
                1.0
            } else {
                let w = (1.0 - x).powi(3);
                tail_sum(cutoff, |s| x.powi(s as i32) * w * ((s + 1) * (s + 2)) as f64 / 2.0)
            }
        }
        StateFamily::PhaseCovariant => {
            // 2s + 1 photons with P(s) = (s+1) x^s (1-x)^2
            if cutoff == 0 {
                1.0
            } else {
                seeded((cutoff - 1) / 2 + 1)
            }
        }
    };
    d.clamp(0.0, 1.0)
}

/// Smallest cutoff whose analytic deficit is below [`DEFICIT_TARGET`].
pub fn default_cutoff(gain: Gain, family: StateFamily) -> Result<usize> {
    cutoff_for_deficit(gain, family, DEFICIT_TARGET)
}

pub fn cutoff_for_deficit(gain: Gain, family: StateFamily, target: f64) -> Result<usize> {
    (0..=MAX_CUTOFF)
        .find(|&c| analytic_deficit(family, gain, c) < target)
        .ok_or_else(|| Error::InvalidParameter(format!("no cutoff below {MAX_CUTOFF} reaches deficit {target}")))
}

/// Poisson mass `Σ_{n > cutoff} e^{-λ} λⁿ/n!`, optionally restricted to one parity.
pub(crate) fn poisson_tail(lambda: f64, cutoff: usize, parity: Option<usize>) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let term = |n: usize| {
        if parity.is_some_and(|p| n % 2 != p) {
            return 0.0;
        }
        (-lambda + n as f64 * lambda.ln() - crate::special::ln_factorial(n)).exp()
    };
    // terms rise until n ≈ λ, so sum from the larger of the two
    let peak = lambda.ceil() as usize;
    if cutoff + 1 >= peak {
        tail_sum(cutoff + 1, term)
    } else {
        (cutoff + 1..peak).map(term).sum::<f64>() + tail_sum(peak, term)
    }
}
