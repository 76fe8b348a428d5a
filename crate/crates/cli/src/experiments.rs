//! The six experiments. Each returns tables and plots; writing them out is
//! left to the caller.

use mqs_core::amplifiers::{
    default_cutoff, pc_equatorial, universal_factors, Gain, MeanPhotonFamily, PcPair, Seed, StateFamily, Subsystem,
};
use mqs_core::fock::{BlockLabel, DensityOperator, ModeLabel, PureState};
use mqs_core::loss::{lossy_seeded, lossy_spontaneous, reduced_k1_lossy, LossSpec};
use mqs_core::metrics::{
    coherent_cutoff, coherent_mqs_distance, coherent_mqs_distance_closed, component_distance_coherent, fidelity,
    pc_distance, pc_distance_factorized, pc_factor_cutoff, DistanceResult, Method, UniversalRoute,
};
use mqs_core::ofilter::{apply_ofilter, filtered_distance, ofilter_cutoff, FilterSpec, PfiltOn};
use rayon::prelude::*;

use crate::cache::OperatorCache;
use crate::config::{Config, Experiment, Grid};
use crate::svg;
use crate::table::Table;
use crate::RunError;

/// Default threshold list for the filter curves.
pub const DEFAULT_KAPPAS: [u32; 5] = [0, 8, 16, 24, 32];
/// Section values of the loss surface.
pub const SURFACE_SECTIONS: [f64; 5] = [0.9, 0.75, 0.5, 0.2, 0.05];
/// Cutoff of the lab-frame phase-covariant pairs behind the equality residuals.
pub const PC_DIAGNOSTIC_CUTOFF: usize = 30;
const CURVE_POINTS: usize = 50;

pub struct Output {
    pub tables: Vec<Table>,
    pub plots: Vec<(String, String)>,
    pub cutoff: usize,
    pub max_trace_deficit: f64,
}

struct Ctx<'a> {
    cfg: &'a Config,
    pool: rayon::ThreadPool,
    cache: OperatorCache,
}

impl Ctx<'_> {
    fn par_map<T: Sync, R: Send>(
        &self,
        items: &[T],
        f: impl Fn(&T) -> Result<R, RunError> + Sync + Send,
    ) -> Result<Vec<R>, RunError> {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }

    fn grid_or(&self, default: Grid) -> Vec<f64> {
        self.cfg.grid.clone().unwrap_or(default).points()
    }
}

pub fn run(cfg: &Config) -> Result<Output, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    let ctx = Ctx { cfg, pool, cache: OperatorCache::new(cfg.cache_dir.clone())? };
    match cfg.experiment {
        Experiment::CoherentCurves => coherent_curves(&ctx),
        Experiment::PcCurve => pc_curve(&ctx),
        Experiment::UniversalCurve => universal_curve(&ctx),
        Experiment::UniversalDistributions => universal_distributions(&ctx),
        Experiment::LossSurface => loss_surface(&ctx),
        Experiment::OfilterCurves => ofilter_curves(&ctx),
    }
}

fn curve_grid(nbar: f64, x_max: f64) -> Grid {
    Grid::Linspace { start: 0.0, stop: (x_max / nbar).min(1.0), num: CURVE_POINTS }
}

fn line_svg(t: &Table, title: &str, x: &str, ys: &[&str]) -> (String, String) {
    let xs = t.column(x).expect("known column");
    let series: Vec<(String, Vec<(f64, f64)>)> = ys
        .iter()
        .map(|y| (y.to_string(), xs.iter().copied().zip(t.column(y).expect("known column")).collect()))
        .collect();
    (t.name.clone(), svg::line_plot(title, x, "D", &series))
}

fn coherent_curves(ctx: &Ctx) -> Result<Output, RunError> {
    let alpha_sq = ctx.cfg.nbar.expect("validated");
    let cutoff = ctx.cfg.cutoff.unwrap_or_else(|| coherent_cutoff(alpha_sq).max(60));
    let rs = ctx.grid_or(curve_grid(alpha_sq, 3.0));
    let rows = ctx.par_map(&rs, |&r| {
        let numeric = coherent_mqs_distance(r, alpha_sq, cutoff)?;
        Ok((r, numeric))
    })?;
    let mut t = Table::new("coherent-curves", &["x", "D_cat_closed", "D_cat_numeric", "D_components"]);
    let mut deficit = 0.0f64;
    for (r, n) in rows {
        deficit = deficit.max(n.trace_deficit);
        t.push(vec![
            r * alpha_sq,
            coherent_mqs_distance_closed(r, alpha_sq),
            n.bures,
            component_distance_coherent(r, alpha_sq),
        ]);
    }
    t.meta.push(("alpha_sq".into(), alpha_sq.to_string()));
    let plot = line_svg(&t, "coherent-state superpositions", "x", &["D_cat_closed", "D_cat_numeric", "D_components"]);
    Ok(Output { tables: vec![t], plots: vec![plot], cutoff, max_trace_deficit: deficit })
}

fn pc_curve(ctx: &Ctx) -> Result<Output, RunError> {
    let gain = ctx.cfg.gain()?;
    let nbar = MeanPhotonFamily::PhaseCovariant.mean_photon(gain);
    let cutoff = ctx.cfg.cutoff.unwrap_or_else(|| pc_factor_cutoff(gain, 1e-12));
    let diag_cutoff = ctx.cfg.cutoff.map_or(PC_DIAGNOSTIC_CUTOFF, |c| c.min(PC_DIAGNOSTIC_CUTOFF));
    let rs = ctx.grid_or(curve_grid(nbar, 3.0));
    let rows = ctx.par_map(&rs, |&r| {
        let t = 1.0 - r;
        let d = pc_distance_factorized(gain, t, cutoff)?;
        let lab = |pair| pc_distance(gain, t, pair, diag_cutoff);
        let (m, s, c) = (lab(PcPair::Macrostates)?, lab(PcPair::Superpositions)?, lab(PcPair::Circular)?);
        Ok((r, d, m, s, c))
    })?;
    let mut t = Table::new(
        "pc-curve",
        &["x", "D_PC", "D_PC_lab", "residual_superpositions", "residual_circular"],
    );
    let (mut deficit, mut diag_deficit) = (0.0f64, 0.0f64);
    for (r, d, m, s, c) in rows {
        deficit = deficit.max(d.trace_deficit);
        diag_deficit = diag_deficit.max(m.trace_deficit).max(s.trace_deficit).max(c.trace_deficit);
        t.push(vec![r * nbar, d.bures, m.bures, (m.bures - s.bures).abs(), (m.bures - c.bures).abs()]);
    }
    t.meta.push(("g".into(), gain.g().to_string()));
    t.meta.push(("nbar".into(), nbar.to_string()));
    t.meta.push(("diagnostic_cutoff".into(), diag_cutoff.to_string()));
    t.meta.push(("diagnostic_max_trace_deficit".into(), format!("{diag_deficit:e}")));
    let plot = line_svg(&t, "phase-covariant macrostates", "x", &["D_PC"]);
    Ok(Output { tables: vec![t], plots: vec![plot], cutoff, max_trace_deficit: deficit })
}

fn factor_key(kind: &str, gain: Gain, sub: Subsystem, loss: LossSpec, cutoff: usize) -> String {
    format!("{kind}:{sub:?}:g={:?}:t1={:?}:t2={:?}:c={cutoff}", gain.g(), loss.t1(), loss.t2())
}

/// Universal distance through the factorization. Kraus-route factors go
/// through the cache.
fn cached_universal(
    ctx: &Ctx,
    gain: Gain,
    loss: LossSpec,
    route: UniversalRoute,
    cutoff: usize,
) -> Result<DistanceResult, RunError> {
    let factor = |sub: Subsystem| -> Result<DistanceResult, RunError> {
        let (s, v) = match route {
            UniversalRoute::Kraus => (
                ctx.cache.get_or_compute(&factor_key("kraus-seeded", gain, sub, loss, cutoff), || {
                    mqs_core::loss::kraus::kraus_seeded(gain, sub, loss, cutoff)
                })?,
                ctx.cache.get_or_compute(&factor_key("kraus-spontaneous", gain, sub, loss, cutoff), || {
                    mqs_core::loss::kraus::kraus_spontaneous(gain, sub, loss, cutoff)
                })?,
            ),
            // Closed-form factors rebuild faster than they load.
            _ => (lossy_seeded(gain, sub, loss, cutoff)?, lossy_spontaneous(gain, sub, loss, cutoff)?),
        };
        Ok(fidelity(&s, &v)?)
    };
    Ok(DistanceResult::product(&[factor(Subsystem::A)?, factor(Subsystem::APrime)?], Method::Blockwise)?)
}

fn loss(r1: f64, r2: f64) -> Result<LossSpec, RunError> {
    LossSpec::from_reflectivities(r1, r2).map_err(|e| RunError::Config(e.to_string()))
}

fn universal_curve(ctx: &Ctx) -> Result<Output, RunError> {
    let gain = ctx.cfg.gain()?;
    let nbar = MeanPhotonFamily::Universal.mean_photon(gain);
    let cutoff = ctx.cfg.cutoff.map_or_else(|| default_cutoff(gain, StateFamily::Seeded), Ok)?;
    let rs = ctx.grid_or(curve_grid(nbar, 3.0));
    let rows = ctx.par_map(&rs, |&r| {
        let both = cached_universal(ctx, gain, loss(r, r)?, UniversalRoute::ClosedForm, cutoff)?;
        let k1 = cached_universal(ctx, gain, loss(r, 0.0)?, UniversalRoute::ClosedForm, cutoff)?;
        Ok((r, both, k1))
    })?;
    let mut t = Table::new("universal-curve", &["x", "D_equal_loss", "D_k1_loss"]);
    let mut deficit = 0.0f64;
    for (r, both, k1) in rows {
        deficit = deficit.max(both.trace_deficit).max(k1.trace_deficit);
        t.push(vec![r * nbar, both.bures, k1.bures]);
    }
    t.meta.push(("g".into(), gain.g().to_string()));
    t.meta.push(("nbar_total".into(), nbar.to_string()));
    let plot = line_svg(&t, "universal cloning macrostates", "x", &["D_equal_loss", "D_k1_loss"]);
    Ok(Output { tables: vec![t], plots: vec![plot], cutoff, max_trace_deficit: deficit })
}

fn loss_surface(ctx: &Ctx) -> Result<Output, RunError> {
    let gain = ctx.cfg.gain()?;
    let cutoff = ctx.cfg.cutoff.map_or_else(|| default_cutoff(gain, StateFamily::Seeded), Ok)?;
    let rs = ctx.grid_or(Grid::Linspace { start: 0.0, stop: 1.0, num: 11 });
    let points: Vec<(f64, f64)> = rs.iter().flat_map(|&r1| rs.iter().map(move |&r2| (r1, r2))).collect();
    let rows = ctx.par_map(&points, |&(r1, r2)| {
        let l = loss(r1, r2)?;
        let closed = cached_universal(ctx, gain, l, UniversalRoute::ClosedForm, cutoff)?;
        let kraus = cached_universal(ctx, gain, l, UniversalRoute::Kraus, cutoff)?;
        Ok((closed, kraus))
    })?;
    let mut t = Table::new("loss-surface", &["R1", "R2", "D", "D_kraus"]);
    let mut deficit = 0.0f64;
    for (&(r1, r2), (closed, kraus)) in points.iter().zip(&rows) {
        deficit = deficit.max(closed.trace_deficit).max(kraus.trace_deficit);
        t.push(vec![r1, r2, closed.bures, kraus.bures]);
    }
    let section_points: Vec<(f64, f64)> = SURFACE_SECTIONS
        .iter()
        .flat_map(|&fixed| rs.iter().flat_map(move |&r| [(r, fixed), (fixed, r)]))
        .collect();
    let sections = ctx.par_map(&section_points, |&(r1, r2)| {
        cached_universal(ctx, gain, loss(r1, r2)?, UniversalRoute::ClosedForm, cutoff)
    })?;
    let mut fixed_r2 = Table::new("loss-surface.fixed-r2", &["R2", "R1", "D"]);
    let mut fixed_r1 = Table::new("loss-surface.fixed-r1", &["R1", "R2", "D"]);
    for (k, &(r1, r2)) in section_points.iter().enumerate() {
        let d = &sections[k];
        deficit = deficit.max(d.trace_deficit);
        if k % 2 == 0 {
            fixed_r2.push(vec![r2, r1, d.bures]);
        } else {
            fixed_r1.push(vec![r1, r2, d.bures]);
        }
    }
    for table in [&mut t, &mut fixed_r1, &mut fixed_r2] {
        table.meta.push(("g".into(), gain.g().to_string()));
    }
    let n = rs.len();
    let values: Vec<Vec<f64>> = (0..n).map(|i2| (0..n).map(|i1| t.rows[i1 * n + i2][2]).collect()).collect();
    let (lo, hi) = (rs[0], rs[n - 1]);
    let heat = svg::heatmap("D(R1, R2)", "R1", "R2", (lo, hi), (lo, hi), &values);
    let mut plots = vec![("loss-surface".to_string(), heat)];
    for (table, fixed, var) in [(&fixed_r2, "R2", "R1"), (&fixed_r1, "R1", "R2")] {
        let series = SURFACE_SECTIONS
            .iter()
            .map(|&f| {
                let pts = table.rows.iter().filter(|row| row[0] == f).map(|row| (row[1], row[2])).collect();
                (format!("{fixed} = {f}"), pts)
            })
            .collect::<Vec<_>>();
        plots.push((table.name.clone(), svg::line_plot(&format!("sections at fixed {fixed}"), var, "D", &series)));
    }
    Ok(Output { tables: vec![t, fixed_r2, fixed_r1], plots, cutoff, max_trace_deficit: deficit })
}

struct ReducedGrid {
    name: &'static str,
    seed: Seed,
    spatial: u8,
    rho: DensityOperator,
}

/// Diagonal of the two-mode reduced state on one spatial mode as a
/// `[n_psi][n_perp]` grid.
fn grid_of(rho: &DensityOperator) -> Vec<Vec<f64>> {
    let b = rho.basis();
    let n = b.cutoff() + 1;
    let mut g = vec![vec![0.0; n]; n];
    for (idx, p) in rho.diagonal() {
        g[b.occupation(idx, 0)][b.occupation(idx, 1)] = p;
    }
    g
}

fn reduced_states(gain: Gain, seed: Seed, cutoff: usize) -> Result<(DensityOperator, DensityOperator), RunError> {
    let (a, a_prime) = universal_factors(gain, seed, cutoff)?;
    let rho = |s: &PureState, modes: [ModeLabel; 2]| -> Result<DensityOperator, RunError> {
        let label = BlockLabel::difference(s.basis(), &modes[..1], &modes[1..])?;
        Ok(DensityOperator::from_pure(s, label)?)
    };
    let ra = rho(&a, Subsystem::A.modes())?;
    let rp = rho(&a_prime, Subsystem::APrime.modes())?;
    let k1 = ra.partial_trace(&[ModeLabel::K1_PSI])?.tensor(&rp.partial_trace(&[ModeLabel::K1_PERP])?)?;
    let k2 = rp.partial_trace(&[ModeLabel::K2_PSI])?.tensor(&ra.partial_trace(&[ModeLabel::K2_PERP])?)?;
    Ok((k1, k2))
}

fn argmax(g: &[Vec<f64>]) -> (usize, usize) {
    let mut best = (0, 0);
    for (i, row) in g.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > g[best.0][best.1] {
                best = (i, j);
            }
        }
    }
    best
}

/// Number of zero entries of the total-photon distribution over `1..=n_max`.
fn total_photon_zeros(probs: impl Iterator<Item = (usize, f64)>, n_max: usize) -> usize {
    let mut dist = vec![0.0; n_max + 1];
    for (n, p) in probs {
        if n <= n_max {
            dist[n] += p;
        }
    }
    dist[1..].iter().filter(|&&p| p == 0.0).count()
}

fn universal_distributions(ctx: &Ctx) -> Result<Output, RunError> {
    let gain = ctx.cfg.gain()?;
    let cutoff = ctx.cfg.cutoff.map_or_else(|| default_cutoff(gain, StateFamily::Seeded), Ok)?;
    let seeds = [Seed::Psi, Seed::Perp];
    let states = ctx.par_map(&seeds, |&s| reduced_states(gain, s, cutoff))?;
    let mut grids = Vec::new();
    for (&seed, (k1, k2)) in seeds.iter().zip(states) {
        let tag = matches!(seed, Seed::Psi);
        grids.push(ReducedGrid { name: if tag { "k1-psi" } else { "k1-perp" }, seed, spatial: 1, rho: k1 });
        grids.push(ReducedGrid { name: if tag { "k2-psi" } else { "k2-perp" }, seed, spatial: 2, rho: k2 });
    }
    let mut tables = Vec::new();
    let mut plots = Vec::new();
    let mut summary = Table::new(
        "universal-distributions.summary",
        &["seed_perp", "spatial", "argmax_n_psi", "argmax_n_perp", "mean_n_psi", "mean_n_perp", "axis_check"],
    );
    let mut deficit = 0.0f64;
    let shown = cutoff.min(30);
    for r in &grids {
        deficit = deficit.max(r.rho.trace_deficit());
        let g = grid_of(&r.rho);
        let mut t = Table::new(format!("universal-distributions.{}", r.name), &["n_psi", "n_perp", "p"]);
        for (i, row) in g.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                t.push(vec![i as f64, j as f64, p]);
            }
        }
        let (ai, aj) = argmax(&g);
        let seed_perp = matches!(r.seed, Seed::Perp);
        // cloning mode follows the seed, anticloning mode its orthogonal
        let along_psi = seed_perp == (r.spatial == 2);
        let pass = if along_psi { ai > aj } else { aj > ai };
        summary.push(vec![
            f64::from(u8::from(seed_perp)),
            f64::from(r.spatial),
            ai as f64,
            aj as f64,
            r.rho.mean_photon(r.rho.basis().modes()[0])?,
            r.rho.mean_photon(r.rho.basis().modes()[1])?,
            f64::from(u8::from(pass)),
        ]);
        let view: Vec<Vec<f64>> = (0..=shown).map(|j| (0..=shown).map(|i| g[i][j]).collect()).collect();
        let range = (0.0, shown as f64);
        plots.push((t.name.clone(), svg::heatmap(&t.name, "n_psi", "n_perp", range, range, &view)));
        tables.push(t);
    }
    // comb structure: the universal k1 state fills every total photon number,
    // the phase-covariant one only the odd ones
    let n_max = cutoff.min(40);
    let k1 = &grids[0].rho;
    let univ_zeros = total_photon_zeros(k1.diagonal().map(|(i, p)| (k1.basis().total_photons(i), p)), n_max);
    let pc = pc_equatorial(gain, 0.0, n_max)?;
    let pc_zeros = total_photon_zeros(
        pc.amplitudes().iter().enumerate().map(|(i, a)| (pc.basis().total_photons(i), a.norm_sqr())),
        n_max,
    );
    summary.meta.push(("g".into(), gain.g().to_string()));
    summary.meta.push(("comb_range".into(), format!("1..={n_max}")));
    summary.meta.push(("universal_k1_zero_count".into(), univ_zeros.to_string()));
    summary.meta.push(("pc_k1_zero_count".into(), pc_zeros.to_string()));
    tables.push(summary);
    Ok(Output { tables, plots, cutoff, max_trace_deficit: deficit })
}

fn ofilter_curves(ctx: &Ctx) -> Result<Output, RunError> {
    let gain = ctx.cfg.gain()?;
    let nbar = MeanPhotonFamily::UniversalCloningMode.mean_photon(gain);
    let kappas = ctx.cfg.kappa.clone().unwrap_or_else(|| DEFAULT_KAPPAS.to_vec());
    let k_max = kappas.iter().copied().max().unwrap_or(0);
    let cutoff = ctx.cfg.cutoff.map_or_else(|| ofilter_cutoff(gain, k_max), Ok)?;
    let rs = ctx.grid_or(curve_grid(nbar, 4.0));
    let lossless = (ctx.cfg.pfilt_on == PfiltOn::Lossless)
        .then(|| reduced_k1_lossy(gain, Seed::Psi, 1.0, cutoff))
        .transpose()?;
    let points: Vec<(f64, u32)> = rs.iter().flat_map(|&r| kappas.iter().map(move |&k| (r, k))).collect();
    let rows = ctx.par_map(&points, |&(r, k)| {
        let spec = FilterSpec::new(k);
        let fd = filtered_distance(gain, 1.0 - r, spec, cutoff)?;
        let p = match &lossless {
            Some(rho) => apply_ofilter(rho, spec)?.1,
            None => fd.p_filt_lossy,
        };
        Ok((fd.distance, p))
    })?;
    let mut t = Table::new("ofilter-curves", &["x", "kappa", "D_filtered", "P_filt"]);
    let mut deficit = 0.0f64;
    for (&(r, k), (d, p)) in points.iter().zip(&rows) {
        deficit = deficit.max(d.trace_deficit);
        t.push(vec![r * nbar, f64::from(k), d.bures, *p]);
    }
    t.meta.push(("g".into(), gain.g().to_string()));
    t.meta.push(("nbar_k1".into(), nbar.to_string()));
    t.meta.push(("pfilt_on".into(), format!("{:?}", ctx.cfg.pfilt_on).to_lowercase()));
    let series = kappas
        .iter()
        .map(|&k| {
            let pts = t.rows.iter().filter(|row| row[1] == f64::from(k)).map(|row| (row[0], row[2])).collect();
            (format!("kappa = {k}"), pts)
        })
        .collect::<Vec<_>>();
    let plot = svg::line_plot("filtered cloning-mode states", "x", "D", &series);
    Ok(Output { tables: vec![t], plots: vec![("ofilter-curves".into(), plot)], cutoff, max_trace_deficit: deficit })
}
