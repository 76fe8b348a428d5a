use mqs_core::amplifiers::{coherent_state, tms_seeded, tms_vacuum, Gain, Seed, Subsystem};
use mqs_core::fock::{BlockLabel, DensityOperator, ModeLabel};
use mqs_core::loss::kraus::{kraus_reduced_k1, kraus_seeded, kraus_spontaneous, kraus_universal};
use mqs_core::loss::{
    apply_loss_kraus, lossy_seeded, lossy_spontaneous, lossy_universal, reduced_k1_lossy, LossSpec,
};
use num_complex::Complex64;

const GRID_G: [f64; 2] = [0.4, 0.8];
const GRID_T: [f64; 3] = [0.2, 0.5, 0.9];

fn grid() -> impl Iterator<Item = (Gain, LossSpec)> {
    GRID_G.into_iter().flat_map(|g| {
        GRID_T.into_iter().flat_map(move |t1| {
            GRID_T.into_iter().map(move |t2| (Gain::new(g).unwrap(), LossSpec::new(t1, t2).unwrap()))
        })
    })
}

#[test]
fn spontaneous_matches_kraus_sum() {
    for (gain, loss) in grid() {
        for sub in [Subsystem::A, Subsystem::APrime] {
            let closed = lossy_spontaneous(gain, sub, loss, 10).unwrap();
            let oracle = kraus_spontaneous(gain, sub, loss, 10).unwrap();
            let diff = closed.max_abs_diff(&oracle).unwrap();
            assert!(diff <= 1e-9, "g={} {loss:?} {sub:?}: {diff}", gain.g());
        }
    }
}

#[test]
fn seeded_matches_kraus_sum() {
    for (gain, loss) in grid() {
        for sub in [Subsystem::A, Subsystem::APrime] {
            let closed = lossy_seeded(gain, sub, loss, 10).unwrap();
            let oracle = kraus_seeded(gain, sub, loss, 10).unwrap();
            let diff = closed.max_abs_diff(&oracle).unwrap();
            assert!(diff <= 1e-9, "g={} {loss:?} {sub:?}: {diff}", gain.g());
        }
    }
}

#[test]
fn universal_matches_four_kraus_maps() {
    let gain = Gain::new(0.6).unwrap();
    let loss = LossSpec::new(0.5, 0.8).unwrap();
    for seed in [Seed::Psi, Seed::Perp] {
        let closed = lossy_universal(gain, seed, loss, 8).unwrap();
        let oracle = kraus_universal(gain, seed, loss, 8).unwrap();
        let diff = closed.max_abs_diff(&oracle).unwrap();
        assert!(diff <= 1e-9, "{seed:?}: {diff}");
    }
}

#[test]
fn reduced_cloning_mode_matches_partial_trace() {
    let gain = Gain::new(1.2).unwrap();
    for seed in [Seed::Psi, Seed::Perp] {
        let closed = reduced_k1_lossy(gain, seed, 0.75, 40).unwrap();
        let oracle = kraus_reduced_k1(gain, seed, 0.75, 40).unwrap();
        let diff = closed.max_abs_diff(&oracle).unwrap();
        assert!(diff <= 1e-9, "{seed:?}: {diff}");
    }
}

#[test]
fn reduced_cloning_mode_swaps_under_seed_exchange() {
    let gain = Gain::new(0.9).unwrap();
    let a = reduced_k1_lossy(gain, Seed::Psi, 0.6, 20).unwrap();
    let b = reduced_k1_lossy(gain, Seed::Perp, 0.6, 20).unwrap();
    for i in 0..=20 {
        for j in 0..=20 {
            assert!((a.element(&[i, j], &[i, j]) - b.element(&[j, i], &[j, i])).norm() <= 1e-12);
        }
    }
}

#[test]
fn reduced_cloning_mode_limits() {
    let gain = Gain::new(1.1).unwrap();
    let lossless = reduced_k1_lossy(gain, Seed::Psi, 1.0, 30).unwrap();
    let (g2, c6) = (gain.gamma().powi(2), gain.c().powi(6));
    for n in 0..29 {
        for m in 0..30 {
            let w = lossless.element(&[n + 1, m], &[n + 1, m]).re;
            assert!((w - g2.powi((n + m) as i32) * (n + 1) as f64 / c6).abs() < 1e-14);
        }
    }
    let unamplified = reduced_k1_lossy(Gain::new(0.0).unwrap(), Seed::Psi, 0.3, 4).unwrap();
    assert!((unamplified.element(&[1, 0], &[1, 0]).re - 0.3).abs() < 1e-15);
    assert!((unamplified.element(&[0, 0], &[0, 0]).re - 0.7).abs() < 1e-15);
    assert!((unamplified.trace() - 1.0).abs() < 1e-15);
}

#[test]
fn lossless_limits_are_the_pure_projectors() {
    let gain = Gain::new(0.7).unwrap();
    let pure_label = |s: &mqs_core::fock::PureState| {
        let m = s.basis().modes();
        BlockLabel::difference(s.basis(), &[m[0]], &[m[1]]).unwrap()
    };
    let v = tms_vacuum(gain, Subsystem::A, 12).unwrap();
    let pv = DensityOperator::from_pure(&v, pure_label(&v)).unwrap();
    let cv = lossy_spontaneous(gain, Subsystem::A, LossSpec::lossless(), 12).unwrap();
    assert!(cv.max_abs_diff(&pv).unwrap() < 1e-15);
    let s = tms_seeded(gain, Subsystem::A, 12).unwrap();
    let ps = DensityOperator::from_pure(&s, pure_label(&s)).unwrap();
    let cs = lossy_seeded(gain, Subsystem::A, LossSpec::lossless(), 12).unwrap();
    assert!(cs.max_abs_diff(&ps).unwrap() < 1e-15);

    let dark = lossy_seeded(gain, Subsystem::A, LossSpec::new(0.0, 0.0).unwrap(), 6).unwrap();
    assert!((dark.element(&[0, 0], &[0, 0]).re - 1.0).abs() < 1e-12);
    assert!((dark.trace() - 1.0).abs() < 1e-12);
    let zero_gain = lossy_spontaneous(Gain::new(0.0).unwrap(), Subsystem::A, LossSpec::new(0.3, 0.6).unwrap(), 5).unwrap();
    assert_eq!(zero_gain.element(&[0, 0], &[0, 0]), Complex64::new(1.0, 0.0));
    assert_eq!(zero_gain.entries().filter(|e| e.2 != Complex64::new(0.0, 0.0)).count(), 1);
}

#[test]
fn oracle_output_blocks_by_photon_difference() {
    let gain = Gain::new(0.8).unwrap();
    let loss = LossSpec::new(0.7, 0.3).unwrap();
    let oracle = kraus_seeded(gain, Subsystem::A, loss, 10).unwrap();
    let keys: Vec<i64> = oracle.blocks().map(|(k, _)| k[0]).collect();
    assert_eq!(*keys.first().unwrap(), -10);
    assert_eq!(*keys.last().unwrap(), 10);
    // re-blocking under the same label is exact
    let again = oracle.block_decompose(oracle.label().clone()).unwrap();
    assert_eq!(again.max_abs_diff(&oracle).unwrap(), 0.0);
}

#[test]
fn loss_is_trace_preserving_and_local() {
    let gain = Gain::new(0.6).unwrap();
    let loss = LossSpec::new(0.5, 0.8).unwrap();
    let s = mqs_core::amplifiers::universal_amplified_state(gain, 7).unwrap();
    let label = BlockLabel::difference(s.basis(), &[ModeLabel::K1_PSI, ModeLabel::K1_PERP], &[ModeLabel::K2_PSI, ModeLabel::K2_PERP])
        .unwrap();
    let rho = DensityOperator::from_pure(&s, label).unwrap();
    let forward = mqs_core::fock::mode::UNIVERSAL_MODES;
    let mut a = rho.clone();
    for m in forward {
        let before = a.trace();
        a = apply_loss_kraus(&a, m, loss.transmissivity(m.spatial)).unwrap();
        assert!((a.trace() - before).abs() <= 1e-12);
    }
    let mut b = rho.clone();
    for m in forward.into_iter().rev() {
        b = apply_loss_kraus(&b, m, loss.transmissivity(m.spatial)).unwrap();
    }
    assert!(a.max_abs_diff(&b).unwrap() <= 1e-12);
    assert!(a.min_eigenvalue() >= -1e-9);
}

#[test]
fn coherent_state_is_attenuated() {
    let alpha = Complex64::new(1.7, -0.9);
    let t: f64 = 0.64;
    let cutoff = 50;
    let rho = DensityOperator::from_pure(&coherent_state(alpha, cutoff).unwrap(), BlockLabel::dense()).unwrap();
    let out = apply_loss_kraus(&rho, ModeLabel::K1_PSI, t).unwrap();
    let beta = coherent_state(alpha * t.sqrt(), cutoff).unwrap();
    // ⟨β|ρ|β⟩ is the fidelity with the attenuated coherent state
    let mut f = Complex64::new(0.0, 0.0);
    for (r, c, v) in out.entries() {
        f += beta.amplitudes()[r].conj() * v * beta.amplitudes()[c];
    }
    assert!((f.re - 1.0).abs() < 1e-10, "{f}");
}

#[test]
fn capped_loss_equals_loss_then_projection() {
    let gain = Gain::new(0.7).unwrap();
    let psi = tms_seeded(gain, Subsystem::A, 14).unwrap();
    let modes = psi.basis().modes().to_vec();
    let label = BlockLabel::difference(psi.basis(), &modes[..1], &modes[1..]).unwrap();
    let rho = DensityOperator::from_pure(&psi, label).unwrap();
    for max_out in [0, 5, 14] {
        let capped = rho.apply_loss_capped(modes[0], 0.6, max_out).unwrap();
        let reference = rho.apply_loss(modes[0], 0.6).unwrap().project(|b, idx| b.occupation(idx, 0) <= max_out);
        assert!(capped.max_abs_diff(&reference).unwrap() < 1e-15);
        assert!((capped.trace_deficit() - reference.trace_deficit()).abs() < 1e-14);
        assert!((capped.trace() + capped.trace_deficit() - rho.trace() - rho.trace_deficit()).abs() < 1e-14);
    }
}
