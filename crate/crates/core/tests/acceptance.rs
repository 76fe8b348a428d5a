//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! `cargo test -p mqs-core --test acceptance`, optionally followed by
//! `-- 1 4` to run selected criteria.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_density;
use mqs_core::amplifiers::{
    cat_state, default_cutoff, pc_equatorial, tms_seeded, tms_vacuum, universal_total_mean_photon, CatSign, Gain,
    MeanPhotonFamily, PcPair, QubitDirection, Seed, StateFamily, Subsystem,
};
use mqs_core::loss::kraus::{kraus_reduced_k1, kraus_seeded, kraus_spontaneous, kraus_universal};
use mqs_core::loss::{
    apply_loss_kraus, lossy_seeded, lossy_spontaneous, lossy_universal, reduced_k1_lossy, LossSpec,
};
use mqs_core::fock::{DensityOperator, ModeLabel};
use mqs_core::metrics::{
    coherent_cutoff, coherent_mqs_distance, coherent_mqs_distance_closed, fidelity, pc_distance, universal_distance,
};
use mqs_core::ofilter::{apply_ofilter, filtered_distance, ofilter_cutoff, p_filt, FilterSpec, PfiltOn};
use mqs_core::Result;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { pass, detail: detail.into() })
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn criterion_1() -> Result<Verdict> {
    let start = Instant::now();
    let nbar = 12.5;
    let cutoff = coherent_cutoff(nbar).max(60);
    let closed = coherent_mqs_distance_closed(1.0 / nbar, nbar);
    let numeric = coherent_mqs_distance(1.0 / nbar, nbar, cutoff)?.bures;
    let mut worst = 0.0f64;
    for i in 0..=30 {
        let x = 0.1 * f64::from(i);
        let r = x / nbar;
        worst = worst.max((coherent_mqs_distance_closed(r, nbar) - coherent_mqs_distance(r, nbar, cutoff)?.bures).abs());
    }
    let elapsed = start.elapsed();
    let anchor = |d: f64| (d - 0.095).abs() <= 0.002;
    verdict(
        anchor(closed) && anchor(numeric) && worst <= 1e-6 && elapsed < Duration::from_secs(30),
        format!(
            "D(x=1) closed {closed:.6} numeric {numeric:.6} (target 0.095 ± 0.002), max |closed − numeric| on x ∈ [0, 3] {worst:.1e}, cutoff {cutoff}, {}",
            secs(elapsed)
        ),
    )
}

fn criterion_2() -> Result<Verdict> {
    let start = Instant::now();
    let cutoff = 10;
    let mut worst = [0.0f64; 4];
    let mut spent = [Duration::ZERO; 4];
    for g in [0.4, 0.8] {
        let gain = Gain::new(g)?;
        for t1 in [0.2, 0.5, 0.9] {
            for t2 in [0.2, 0.5, 0.9] {
                let loss = LossSpec::new(t1, t2)?;
                for sub in [Subsystem::A, Subsystem::APrime] {
                    let t = Instant::now();
                    let d = lossy_spontaneous(gain, sub, loss, cutoff)?
                        .max_abs_diff(&kraus_spontaneous(gain, sub, loss, cutoff)?)?;
                    worst[0] = worst[0].max(d);
                    spent[0] += t.elapsed();
                    let t = Instant::now();
                    let d = lossy_seeded(gain, sub, loss, cutoff)?.max_abs_diff(&kraus_seeded(gain, sub, loss, cutoff)?)?;
                    worst[1] = worst[1].max(d);
                    spent[1] += t.elapsed();
                }
                for seed in [Seed::Psi, Seed::Perp] {
                    let t = Instant::now();
                    let d = lossy_universal(gain, seed, loss, cutoff)?
                        .max_abs_diff(&kraus_universal(gain, seed, loss, cutoff)?)?;
                    worst[2] = worst[2].max(d);
                    spent[2] += t.elapsed();
                }
            }
            for seed in [Seed::Psi, Seed::Perp] {
                let t = Instant::now();
                let d = reduced_k1_lossy(gain, seed, t1, cutoff)?.max_abs_diff(&kraus_reduced_k1(gain, seed, t1, cutoff)?)?;
                worst[3] = worst[3].max(d);
                spent[3] += t.elapsed();
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst.iter().all(|&d| d <= 1e-9) && elapsed < Duration::from_secs(120),
        format!(
            "max entrywise error spontaneous {:.1e}, seeded {:.1e}, universal {:.1e}, reduced k1 {:.1e} (limit 1e-9), {} ({} / {} / {} / {})",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            secs(elapsed),
            secs(spent[0]),
            secs(spent[1]),
            secs(spent[2]),
            secs(spent[3])
        ),
    )
}

fn criterion_3() -> Result<Verdict> {
    let gain = Gain::new(0.8)?;
    let loss = LossSpec::new(0.7, 0.7)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ds = Vec::new();
    for _ in 0..5 {
        let basis = QubitDirection::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))?;
        ds.push(universal_distance(gain, loss, basis, 10)?.bures);
    }
    let lo = ds.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    verdict(hi - lo <= 1e-9, format!("D = {lo:.12}, spread over 5 random bases {:.1e} (limit 1e-9)", hi - lo))
}

fn criterion_4() -> Result<Verdict> {
    let gain = Gain::new(1.0)?;
    let mut worst = 0.0f64;
    let mut values = Vec::new();
    for t in [1.0, 0.9, 0.7] {
        let d: Vec<f64> = [PcPair::Macrostates, PcPair::Superpositions, PcPair::Circular]
            .into_iter()
            .map(|p| pc_distance(gain, t, p, 40).map(|r| r.bures))
            .collect::<Result<_>>()?;
        worst = worst.max((d[0] - d[1]).abs()).max((d[0] - d[2]).abs()).max((d[1] - d[2]).abs());
        values.push(format!("T={t}: {:.9}", d[0]));
    }
    verdict(worst <= 1e-9, format!("{}, max pairwise difference {worst:.1e} (limit 1e-9)", values.join(", ")))
}

fn criterion_5() -> Result<Verdict> {
    let gain = Gain::new(1.2)?;
    let cutoff = default_cutoff(gain, StateFamily::Universal)?;
    let (n, deficit) = universal_total_mean_photon(gain, cutoff)?;
    let analytic = MeanPhotonFamily::Universal.mean_photon(gain);
    verdict(
        (n - 15.0).abs() <= 0.05 * 15.0,
        format!("⟨n⟩ = {n:.4} (closed form {analytic:.4}), cutoff {cutoff}, deficit {deficit:.1e}, target 15 ± 5%"),
    )
}

fn criterion_6() -> Result<Verdict> {
    let gain = Gain::new(1.2)?;
    let cutoff = default_cutoff(gain, StateFamily::Seeded)?;
    let rs: Vec<f64> = (0..11).map(|i| f64::from(i) / 10.0).collect();
    let mut d = vec![vec![0.0; 11]; 11];
    for (i, &r1) in rs.iter().enumerate() {
        for (j, &r2) in rs.iter().enumerate() {
            d[i][j] = universal_distance(gain, LossSpec::from_reflectivities(r1, r2)?, QubitDirection::H, cutoff)?.bures;
        }
    }
    let mut violations = 0;
    for a in 0..11 {
        for b in 0..10 {
            // along R2 at fixed R1, then along R1 at fixed R2
            violations += usize::from(d[a][b + 1] > d[a][b]);
            violations += usize::from(d[b + 1][a] > d[b][a]);
        }
    }
    let asym: Vec<(f64, f64)> = [2, 5].iter().map(|&k| (d[k][0], d[0][k])).collect();
    let asym_ok = asym.iter().all(|(k1, k2)| k1 < k2);
    verdict(
        violations == 0 && asym_ok,
        format!(
            "{violations} monotonicity violations on 11×11 (cutoff {cutoff}); D(0.2,0) {:.6} < D(0,0.2) {:.6}; D(0.5,0) {:.6} < D(0,0.5) {:.6}",
            asym[0].0, asym[0].1, asym[1].0, asym[1].1
        ),
    )
}

const CAPTION_P: [f64; 4] = [1.7e-1, 1.5e-2, 1.1e-3, 8.2e-5];

fn within_factor(p: f64, target: f64, factor: f64) -> bool {
    p >= target / factor && p <= target * factor
}

fn criterion_7() -> Result<Verdict> {
    let gain = Gain::new(1.2)?;
    let nbar = MeanPhotonFamily::UniversalCloningMode.mean_photon(gain);
    let kappas = [16, 32, 48, 64];
    let cutoff = ofilter_cutoff(gain, 64)?;
    let eta_lossy = 1.0 - 1.0 / nbar;
    let mut lines = Vec::new();
    let mut p_ok = false;
    for (on, eta) in [(PfiltOn::Lossless, 1.0), (PfiltOn::Lossy, eta_lossy)] {
        let ps: Vec<f64> =
            kappas.iter().map(|&k| p_filt(gain, eta, FilterSpec::new(k), on, cutoff)).collect::<Result<_>>()?;
        let ok = ps.iter().zip(CAPTION_P).all(|(&p, t)| within_factor(p, t, 1.5));
        p_ok |= ok;
        let shown: Vec<String> = ps.iter().map(|p| format!("{p:.2e}")).collect();
        lines.push(format!("{on:?} P_filt(κ=16,32,48,64) = [{}]", shown.join(", ")));
    }
    let mut monotone = true;
    let mut failures = Vec::new();
    for x in [0.5, 1.0, 2.0] {
        let mut last = f64::NEG_INFINITY;
        for k in [0, 16, 32, 48, 64] {
            match filtered_distance(gain, 1.0 - x / nbar, FilterSpec::new(k), cutoff) {
                Ok(fd) => {
                    monotone &= fd.distance.bures > last;
                    last = fd.distance.bures;
                }
                Err(e) => {
                    monotone = false;
                    failures.push(format!("x={x} κ={k}: {e}"));
                }
            }
        }
    }
    let mut detail = format!(
        "{}; targets [1.7e-1, 1.5e-2, 1.1e-3, 8.2e-5] within ×1.5; D_filtered strictly increasing over κ at x ∈ {{0.5, 1, 2}}: {monotone}",
        lines.join("; ")
    );
    if !failures.is_empty() {
        detail.push_str(&format!(" ({})", failures.join("; ")));
    }
    detail.push_str(&format!("; ⟨n⟩_k1 = {nbar:.3}, cutoff {cutoff}"));
    verdict(p_ok && monotone, detail)
}

/// Thresholds {8, 16, 24, 32} against the same caption values; reported
/// but not graded.
fn criterion_7_alternative() -> Result<String> {
    let gain = Gain::new(1.2)?;
    let cutoff = ofilter_cutoff(gain, 32)?;
    let ps: Vec<f64> = [8, 16, 24, 32]
        .iter()
        .map(|&k| p_filt(gain, 1.0, FilterSpec::new(k), PfiltOn::Lossless, cutoff))
        .collect::<Result<_>>()?;
    let ok = ps.iter().zip(CAPTION_P).all(|(&p, t)| within_factor(p, t, 1.5));
    let shown: Vec<String> = ps.iter().map(|p| format!("{p:.2e}")).collect();
    Ok(format!("Lossless P_filt(κ=8,16,24,32) = [{}], within ×1.5 of the targets: {ok}", shown.join(", ")))
}

fn criterion_8() -> Result<Verdict> {
    let mut failed: Vec<&str> = Vec::new();
    let mut check = |name: &'static str, ok: bool| {
        if !ok {
            failed.push(name);
        }
    };
    let d = |a: &DensityOperator, b: &DensityOperator| fidelity(a, b).map(|r| r.bures);

    let ops: Vec<DensityOperator> = (0..100).map(random_density).collect();
    let mut axioms = true;
    for i in 0..100 {
        let (a, b, c) = (&ops[i], &ops[(i + 1) % 100], &ops[(i + 37) % 100]);
        let ab = d(a, b)?;
        axioms &= ab == d(b, a)?;
        axioms &= (0.0..=1.0).contains(&ab);
        axioms &= d(a, c)? <= ab + d(b, c)? + 1e-9;
        axioms &= d(a, a)? < 1e-7;
    }
    check("metric axioms", axioms);

    let mut mult = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let gain = Gain::new(rng.random_range(0.1..1.0))?;
        let loss = LossSpec::new(rng.random_range(0.05..1.0), rng.random_range(0.05..1.0))?;
        let norm = |r: DensityOperator| r.normalized().map(|n| n.0);
        let sa = norm(lossy_seeded(gain, Subsystem::A, loss, 4)?)?;
        let va = norm(lossy_spontaneous(gain, Subsystem::A, loss, 4)?)?;
        let sp = norm(lossy_seeded(gain, Subsystem::APrime, loss, 4)?)?;
        let vp = norm(lossy_spontaneous(gain, Subsystem::APrime, loss, 4)?)?;
        let product = fidelity(&sa, &va)?.fidelity * fidelity(&vp, &sp)?.fidelity;
        let joint = fidelity(&sa.tensor(&vp)?, &va.tensor(&sp)?)?.fidelity;
        mult = mult.max((joint - product).abs());
    }
    check("fidelity multiplicativity", mult <= 1e-10);

    let (mut trace, mut cascade) = (0.0f64, 0.0f64);
    for (i, rho) in ops.iter().take(30).enumerate() {
        let t1 = rng.random_range(0.0..1.0);
        let t2 = rng.random_range(0.0..1.0);
        let mode = if i % 2 == 0 { ModeLabel::K1_PSI } else { ModeLabel::K1_PERP };
        let once = apply_loss_kraus(rho, mode, t1)?;
        trace = trace.max((once.trace() + once.trace_deficit() - 1.0).abs());
        let twice = apply_loss_kraus(&once, mode, t2)?;
        cascade = cascade.max(twice.max_abs_diff(&apply_loss_kraus(rho, mode, t1 * t2)?)?);
    }
    check("trace preservation", trace <= 1e-12);
    check("beam-splitter cascade", cascade <= 1e-10);

    let mut idem = true;
    for (g, eta, kappa) in [(0.6, 0.9, 2), (1.0, 0.5, 6), (1.2, 1.0, 12), (0.3, 0.2, 0)] {
        let rho = reduced_k1_lossy(Gain::new(g)?, Seed::Perp, eta, 30)?;
        let (once, _) = apply_ofilter(&rho, FilterSpec::new(kappa))?;
        let (twice, p) = apply_ofilter(&once, FilterSpec::new(kappa))?;
        idem &= (p - 1.0).abs() < 1e-12 && twice.max_abs_diff(&once)? <= 1e-12;
    }
    check("projector idempotence", idem);

    let mut parity = true;
    for (sign, odd) in [(CatSign::Plus, 1), (CatSign::Minus, 0)] {
        let cat = cat_state(Complex64::new(1.7, 0.3), sign, 20)?;
        parity &= cat.amplitudes().iter().skip(odd).step_by(2).all(|a| *a == Complex64::ZERO);
    }
    let pc = pc_equatorial(Gain::new(0.9)?, 1.1, 15)?;
    parity &= pc
        .amplitudes()
        .iter()
        .enumerate()
        .all(|(idx, a)| pc.basis().total_photons(idx) % 2 == 1 || *a == Complex64::ZERO);
    check("parity zeros", parity);

    let mut gamma = 0.0f64;
    for g in [0.2, 0.7, 1.3] {
        let gain = Gain::new(g)?;
        for (a, p) in [
            (tms_vacuum(gain, Subsystem::A, 12)?, tms_vacuum(gain, Subsystem::APrime, 12)?),
            (tms_seeded(gain, Subsystem::A, 12)?, tms_seeded(gain, Subsystem::APrime, 12)?),
        ] {
            for (idx, amp) in a.amplitudes().iter().enumerate() {
                let sign = if a.basis().occupation(idx, 1) % 2 == 0 { 1.0 } else { -1.0 };
                gamma = gamma.max((p.amplitudes()[idx] - amp * sign).norm());
            }
        }
    }
    check("Γ-sign rule", gamma <= 1e-12);

    let detail = format!(
        "multiplicativity {mult:.1e}, trace {trace:.1e}, cascade {cascade:.1e}, Γ-sign {gamma:.1e}; failed: {}",
        if failed.is_empty() { "none".to_string() } else { failed.join(", ") }
    );
    let pass = failed.is_empty();
    verdict(pass, format!("{detail} (randomized versions: tests/properties.rs)"))
}

type Criterion = (&'static str, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("coherent-cat anchor", criterion_1),
        ("Kraus oracle equivalence", criterion_2),
        ("universality across bases", criterion_3),
        ("phase-covariant pair agreement", criterion_4),
        ("mean photon number", criterion_5),
        ("loss-surface shape", criterion_6),
        ("O-filter probabilities", criterion_7),
        ("property suites", criterion_8),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let v = run().unwrap_or_else(|e| Verdict { pass: false, detail: format!("error: {e}") });
        failures += usize::from(!v.pass);
        println!("criterion {} {}: {} | {}", i + 1, name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if i == 6 {
            match criterion_7_alternative() {
                Ok(s) => println!("  info: {s}"),
                Err(e) => println!("  info: error: {e}"),
            }
        }
    }
    println!("acceptance: {} of {ran} criteria pass", ran - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
