//! Factorials and binomials in log space.

/// `ln(n!)`, exact table up to 170 and Stirling series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    const TABLE_LEN: usize = 171;
    thread_local! {
        static TABLE: [f64; TABLE_LEN] = {
            let mut t = [0.0; TABLE_LEN];
            let mut acc = 0.0f64;
            let mut k = 1;
            while k < TABLE_LEN {
                acc += (k as f64).ln();
                t[k] = acc;
                k += 1;
            }
            t
        };
    }
    if n < TABLE_LEN {
        return TABLE.with(|t| t[n]);
    }
    let x = n as f64 + 1.0;
    // Stirling series for ln Γ(x); accurate to machine precision for x > 170.
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `x^n` with the convention `0^0 = 1`.
pub fn powi(x: f64, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        x.powi(n as i32)
    }
}

/// `n! / (k!(n-k)!) · x^k y^(n-k)` evaluated without overflow.
pub fn binomial_weight(n: usize, k: usize, x: f64, y: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let xk = powi(x, k);
    let ynk = powi(y, n - k);
    if xk == 0.0 || ynk == 0.0 {
        return xk * ynk;
    }
    (ln_binomial(n, k) + xk.ln() + ynk.ln()).exp()
}
