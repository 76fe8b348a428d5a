//! Hermitian eigendecomposition helpers backed by faer.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

pub type CMat = Mat<Complex64>;

/// Eigenvalues below this are considered numerical noise and clipped to zero.
pub const CLIP_THRESHOLD: f64 = -1e-9;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: MatRef<'_, Complex64>) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    if n == 1 {
        return (vec![m[(0, 0)].re], Mat::from_fn(1, 1, |_, _| Complex64::new(1.0, 0.0)));
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .expect("self-adjoint eigendecomposition does not fail on finite input");
    let s = evd.S().column_vector();
    let values = (0..n).map(|i| s[i].re).collect();
    (values, evd.U().to_owned())
}

pub fn hermitian_eigenvalues(m: MatRef<'_, Complex64>) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        _ => m
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("self-adjoint eigendecomposition does not fail on finite input"),
    }
}

/// Square root of a positive semidefinite matrix. Negative eigenvalues are
/// clipped to zero and their total magnitude is returned alongside.
pub fn psd_sqrt(m: MatRef<'_, Complex64>) -> (CMat, f64) {
    let n = m.nrows();
    let (values, vectors) = hermitian_eigen(m);
    let mut clipped = 0.0;
    // V · diag(sqrt λ) · V†, skipping the null space.
    let mut scaled = Mat::<Complex64>::zeros(n, n);
    for (j, &lambda) in values.iter().enumerate() {
        if lambda <= 0.0 {
            clipped += -lambda;
            continue;
        }
        let r = lambda.sqrt();
        for i in 0..n {
            scaled[(i, j)] = vectors[(i, j)] * r;
        }
    }
    (&scaled * vectors.adjoint(), clipped)
}

/// `tr sqrt(M)` for a positive semidefinite `M`, with the clipped negative mass.
pub fn trace_sqrt_psd(m: MatRef<'_, Complex64>) -> (f64, f64) {
    let mut clipped = 0.0;
    let mut acc = 0.0;
    for lambda in hermitian_eigenvalues(m) {
        if lambda > 0.0 {
            acc += lambda.sqrt();
        } else {
            clipped += -lambda;
        }
    }
    (acc, clipped)
}

/// Factor `m = X X†` with `X = V √Λ`, keeping eigenvalues above the
/// solver noise floor `n ε λ_max`. Returns `X` and the clipped negative mass.
pub fn psd_factor(m: MatRef<'_, Complex64>) -> (CMat, f64) {
    let n = m.nrows();
    let (values, vectors) = hermitian_eigen(m);
    let top = values.iter().copied().fold(0.0f64, f64::max);
    let floor = top * n as f64 * f64::EPSILON;
    let clipped = values.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    let kept: Vec<usize> = (0..n).filter(|&j| values[j] > floor).collect();
    let x = Mat::from_fn(n, kept.len(), |i, k| vectors[(i, kept[k])] * values[kept[k]].sqrt());
    (x, clipped)
}

/// Sum of singular values.
pub fn nuclear_norm(m: MatRef<'_, Complex64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.norm_l2();
    }
    m.singular_values().expect("SVD does not fail on finite input").iter().sum()
}

pub fn hermiticity_error(m: MatRef<'_, Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Replace `m` by `(m + m†)/2`.
pub fn symmetrize(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in 0..i {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Mat::from_fn(3, 3, |i, j| c((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2));
        let m = &a * a.adjoint();
        let (s, clipped) = psd_sqrt(m.as_ref());
        assert!(clipped < 1e-12);
        let back = &s * &s;
        for i in 0..3 {
            for j in 0..3 {
                assert!((back[(i, j)] - m[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_eigenvalues_are_reported() {
        let m = Mat::from_fn(2, 2, |i, j| if i == j { c(if i == 0 { 1.0 } else { -1e-7 }, 0.0) } else { c(0.0, 0.0) });
        let (tr, clipped) = trace_sqrt_psd(m.as_ref());
        assert!((tr - 1.0).abs() < 1e-15);
        assert!((clipped - 1e-7).abs() < 1e-15);
    }
}
