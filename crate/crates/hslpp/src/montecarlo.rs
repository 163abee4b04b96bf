//! Monte Carlo experiments and kernel convergence studies.
//!
//! Replica `r` at size `N` always draws from [`replica_stream`]`(seed, N, r)`
//! and results are collected in replica order, so output does not depend on
//! the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use hslpp_core::kernels::{
    kbm, kernel_bulk_n, kernel_edge_n, limit_bulk_k12, Kernel2x2, ThetaR,
};
use hslpp_core::lpp::{lambda_family_truncated, sample_weights_with, GeomParams, LineEnsembleDiscrete};
use hslpp_core::pfaffian::{first_intensity_tails, TAIL_HARD_CAP};
use hslpp_core::rng::{stream, StreamRng};
use hslpp_core::scaling::{h_bot, h_top, rescale_bottom, rescale_top, BulkScaling, EdgeScaling};

use crate::cache::theta_r;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::io::SCHEMA_VERSION;
use crate::stats::{correlation, covariance, ks_statistic, ks_two_sample, mean, normal_cdf, std_error, variance, variance_se};

/// One statistic with its target and verdict (`|estimate - target| <= tol`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stat {
    pub stat: String,
    pub estimate: f64,
    pub se: f64,
    pub target: Option<f64>,
    pub tol: Option<f64>,
    pub pass: bool,
}

impl Stat {
    pub fn check(stat: impl Into<String>, estimate: f64, se: f64, target: f64, tol: f64) -> Self {
        let pass = (estimate - target).abs() <= tol;
        Stat { stat: stat.into(), estimate, se, target: Some(target), tol: Some(tol), pass }
    }

    /// Passes when `estimate < bound` strictly.
    pub fn below(stat: impl Into<String>, estimate: f64, bound: f64) -> Self {
        Stat { stat: stat.into(), estimate, se: 0.0, target: Some(0.0), tol: Some(bound), pass: estimate < bound }
    }

    /// Reported without a target.
    pub fn info(stat: impl Into<String>, estimate: f64, se: f64) -> Self {
        Stat { stat: stat.into(), estimate, se, target: None, tol: None, pass: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub schema_version: u32,
    pub experiment: String,
    pub stats: Vec<Stat>,
}

impl SummaryStats {
    fn new(experiment: &str, stats: Vec<Stat>) -> Self {
        SummaryStats { schema_version: SCHEMA_VERSION, experiment: experiment.into(), stats }
    }

    pub fn passed(&self) -> bool {
        self.stats.iter().all(|s| s.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Stat> {
        self.stats.iter().find(|s| s.stat == name)
    }
}

/// Generator of replica `r` at size `n`.
pub fn replica_stream(seed: u64, n: usize, r: usize) -> StreamRng {
    stream(seed, ((n as u64) << 32) | r as u64)
}

/// Top `depth` curves of one replica.
pub fn sample_ensemble(params: GeomParams, n: usize, depth: usize, seed: u64, r: usize) -> Result<LineEnsembleDiscrete> {
    let mut rng = replica_stream(seed, n, r);
    let w = sample_weights_with(params, n, &mut rng)?;
    Ok(lambda_family_truncated(&w, depth))
}

fn replicas<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..count).into_par_iter().map(f).collect()
}

/// Runs `f` on a pool of `threads` workers (rayon default when `None`).
pub fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    let pool = b.build().map_err(|e| Error::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

fn params(cfg: &ExperimentConfig) -> Result<GeomParams> {
    cfg.validate()?;
    Ok(GeomParams::new(cfg.q, cfg.c)?)
}

fn first_n(cfg: &ExperimentConfig) -> usize {
    cfg.n[0]
}

/// A row of the concentration profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub schema_version: u32,
    pub replica: usize,
    pub m: usize,
    pub kappa: f64,
    pub i: usize,
    pub scaled: f64,
    pub h_bot: f64,
    pub h_top: Option<f64>,
}

pub struct ProfileResult {
    pub n: usize,
    pub q: f64,
    pub c: f64,
    pub ensembles: Vec<LineEnsembleDiscrete>,
    pub summary: SummaryStats,
}

/// Curves kept by the profile.
pub const PROFILE_DEPTH: usize = 5;

impl ProfileResult {
    /// `λ_i(m, N) / N` against `m / N` for `i <= 5` with the reference curves.
    pub fn rows(&self) -> impl Iterator<Item = ProfileRow> + '_ {
        let nf = self.n as f64;
        let top = self.c > 1.0;
        self.ensembles.iter().enumerate().flat_map(move |(r, e)| {
            (0..=self.n).flat_map(move |m| {
                let k = m as f64 / nf;
                (1..=e.depth()).map(move |i| ProfileRow {
                    schema_version: SCHEMA_VERSION,
                    replica: r,
                    m,
                    kappa: k,
                    i,
                    scaled: e.lambda(i, m) as f64 / nf,
                    h_bot: h_bot(self.q, k),
                    h_top: top.then(|| h_top(self.q, self.c, k)),
                })
            })
        })
    }
}

/// Replicas of the top five curves and the profile check at `probe = m/N`.
pub fn run_profile(cfg: &ExperimentConfig, probe: f64) -> Result<ProfileResult> {
    let g = params(cfg)?;
    let n = first_n(cfg);
    let ensembles = replicas(cfg.replicas, |r| sample_ensemble(g, n, PROFILE_DEPTH, cfg.seed, r))?;
    let m = (probe * n as f64).round() as usize;
    let k = m as f64 / n as f64;
    let col = |i: usize| -> Vec<f64> {
        ensembles.iter().map(|e| if i <= e.depth() { e.lambda(i, m) as f64 / n as f64 } else { 0.0 }).collect()
    };
    let (l1, l2) = (col(1), col(2));
    let tol = cfg.tol.profile;
    let mut stats = Vec::new();
    if cfg.c > 1.0 {
        stats.push(Stat::check("lambda1_over_n_vs_h_top", mean(&l1), std_error(&l1), h_top(cfg.q, cfg.c, k), tol));
        stats.push(Stat::check("lambda2_over_n_vs_h_bot", mean(&l2), std_error(&l2), h_bot(cfg.q, k), tol));
    } else {
        stats.push(Stat::check("lambda1_over_n_vs_h_bot", mean(&l1), std_error(&l1), h_bot(cfg.q, k), tol));
        stats.push(Stat::info("lambda2_over_n", mean(&l2), std_error(&l2)));
    }
    Ok(ProfileResult { n, q: cfg.q, c: cfg.c, ensembles, summary: SummaryStats::new("profile", stats) })
}

/// Values of `U_1^top` per replica (rows) and time (columns).
pub struct TopResult {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub summary: SummaryStats,
}

/// Distance above `κ0` of the extra time used by the near-`κ0` variance check.
pub const NEAR_KAPPA0: f64 = 0.02;

/// Replicas of the rescaled top curve at `cfg.times` and at `κ0 + 0.02`.
pub fn run_top_experiment(cfg: &ExperimentConfig) -> Result<TopResult> {
    let g = params(cfg)?;
    let e = EdgeScaling::new(cfg.q, cfg.c)?;
    let k0 = e.kappa0;
    for &t in &cfg.times {
        e.check_time(t)?;
    }
    let n = first_n(cfg);
    let mut times = cfg.times.clone();
    times.push(k0 + NEAR_KAPPA0);
    let values = replicas(cfg.replicas, |r| {
        let ens = sample_ensemble(g, n, 1, cfg.seed, r)?;
        let curve = ens.curve(1);
        let u = rescale_top(&curve, n, e)?;
        Ok(times.iter().map(|&t| u.eval(t)).collect::<Vec<f64>>())
    })?;
    let col = |j: usize| -> Vec<f64> { values.iter().map(|v| v[j]).collect() };
    let tol = cfg.tol;
    let mut stats = Vec::new();
    let nt = cfg.times.len();
    for (j, &t) in cfg.times.iter().enumerate() {
        let u = col(j);
        let se = std_error(&u);
        stats.push(Stat::check(format!("mean_u({t})"), mean(&u), se, 0.0, tol.n_se * se));
        let v = variance(&u);
        stats.push(Stat::check(format!("var_u({t})"), v, variance_se(&u), t - k0, tol.var_rel * (t - k0)));
        stats.push(Stat::below(format!("ks_u({t})"), ks_statistic(&u, normal_cdf(t - k0)), tol.ks));
    }
    for a in 0..nt {
        for b in a + 1..nt {
            let (s, t) = (cfg.times[a], cfg.times[b]);
            let (cv, se) = covariance(&col(a), &col(b));
            stats.push(Stat::check(format!("cov_u({s},{t})"), cv, se, s.min(t) - k0, tol.n_se * se));
        }
    }
    if nt >= 4 {
        let d1: Vec<f64> = values.iter().map(|v| v[1] - v[0]).collect();
        let d2: Vec<f64> = values.iter().map(|v| v[nt - 1] - v[nt - 2]).collect();
        let se = 1.0 / (cfg.replicas as f64).sqrt();
        let name = format!(
            "corr_increments({}-{},{}-{})",
            cfg.times[1],
            cfg.times[0],
            cfg.times[nt - 1],
            cfg.times[nt - 2]
        );
        stats.push(Stat::check(name, correlation(&d1, &d2), se, 0.0, tol.n_se * se));
    }
    let near = col(nt);
    stats.push(Stat::check(format!("var_u({})", k0 + NEAR_KAPPA0), variance(&near), variance_se(&near), 0.0, 0.1));
    Ok(TopResult { times, values, summary: SummaryStats::new("top-bm", stats) })
}

/// Per-replica bottom-curve statistics at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottomReplica {
    /// `U_1(t), U_2(t)` for each time.
    pub u: Vec<[f64; 2]>,
    /// Minimum over the window of the top-to-second gap, in `U^bot` units.
    pub separation: f64,
}

#[derive(Debug)]
pub struct BottomResult {
    pub sizes: Vec<usize>,
    pub replicas: Vec<Vec<BottomReplica>>,
    pub summary: SummaryStats,
}

/// Half-width, in scaled time, of the window of the separation statistic.
pub const SEPARATION_WINDOW: f64 = 1.0;

fn bottom_replica(g: GeomParams, b: BulkScaling, n: usize, times: &[f64], seed: u64, r: usize) -> Result<BottomReplica> {
    let ens = sample_ensemble(g, n, 3, seed, r)?;
    let curves: Vec<Vec<u64>> = (1..=ens.depth()).map(|i| ens.curve(i)).collect();
    let u = rescale_bottom(&curves, n, b)?;
    let vals = times.iter().map(|&t| Ok([u.eval(1, t)?, u.eval(2, t)?])).collect::<Result<Vec<_>>>()?;
    let n23 = (n as f64).powf(2.0 / 3.0);
    let lo = (b.kappa * n as f64).floor();
    let mut sep = f64::INFINITY;
    let steps = (2.0 * SEPARATION_WINDOW * n23).ceil() as usize;
    for j in 0..=steps {
        let s = (lo - SEPARATION_WINDOW * n23).ceil() + j as f64;
        let t = (s - lo) / n23;
        if t.abs() <= SEPARATION_WINDOW && (0.0..=n as f64).contains(&s) {
            sep = sep.min(u.gap(1, 2, t)?);
        }
    }
    Ok(BottomReplica { u: vals, separation: sep })
}

/// Replicas of `U_1^bot, U_2^bot` at every size of `cfg.n`, with the KS
/// self-consistency between the first and last size, the ordering check and
/// the paired separation statistic.
pub fn run_bottom_experiment(cfg: &ExperimentConfig) -> Result<BottomResult> {
    let g = params(cfg)?;
    let kappa = cfg.kappa.ok_or_else(|| Error::invalid("kappa", "required by the bottom experiment"))?;
    let b = BulkScaling::new(cfg.q, cfg.c, kappa)?;
    let times = if cfg.times.is_empty() { vec![0.0] } else { cfg.times.clone() };
    let mut all = Vec::new();
    for &n in &cfg.n {
        all.push(replicas(cfg.replicas, |r| bottom_replica(g, b, n, &times, cfg.seed, r))?);
    }
    let mut stats = Vec::new();
    for (k, &n) in cfg.n.iter().enumerate() {
        for (j, &t) in times.iter().enumerate() {
            let u1: Vec<f64> = all[k].iter().map(|r| r.u[j][0]).collect();
            stats.push(Stat::info(format!("mean_u1(N={n},t={t})"), mean(&u1), std_error(&u1)));
            stats.push(Stat::info(format!("var_u1(N={n},t={t})"), variance(&u1), variance_se(&u1)));
        }
        let ordered = all[k].iter().filter(|r| r.u.iter().all(|v| v[0] >= v[1])).count() as f64 / cfg.replicas as f64;
        stats.push(Stat::check(format!("ordering_u1_ge_u2(N={n})"), ordered, 0.0, 1.0, 0.0));
        let seps: Vec<f64> = all[k].iter().map(|r| r.separation).collect();
        stats.push(Stat::info(format!("separation(N={n})"), mean(&seps), std_error(&seps)));
    }
    if cfg.n.len() >= 2 {
        let (a, z) = (0, cfg.n.len() - 1);
        let j0 = times.iter().position(|&t| t == 0.0).unwrap_or(0);
        let ua: Vec<f64> = all[a].iter().map(|r| r.u[j0][0]).collect();
        let uz: Vec<f64> = all[z].iter().map(|r| r.u[j0][0]).collect();
        let name = format!("ks_u1(t={},N={} vs N={})", times[j0], cfg.n[a], cfg.n[z]);
        stats.push(Stat::below(name, ks_two_sample(&ua, &uz), cfg.tol.ks));
        let grew = all[a].iter().zip(&all[z]).filter(|(x, y)| y.separation > x.separation).count() as f64
            / cfg.replicas as f64;
        let name = format!("separation_grows(N={} to N={})", cfg.n[a], cfg.n[z]);
        let p = cfg.tol.separation;
        let se = (grew * (1.0 - grew) / cfg.replicas as f64).sqrt();
        stats.push(Stat { stat: name, estimate: grew, se, target: Some(1.0), tol: Some(1.0 - p), pass: grew >= p });
    }
    Ok(BottomResult { sizes: cfg.n.clone(), replicas: all, summary: SummaryStats::new("bottom-airy", stats) })
}

/// Scaled frame of a kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Frame {
    /// Airy frame at location `kappa`.
    Bulk { kappa: f64 },
    /// Brownian frame.
    Edge,
}

/// `(θ0, R0)` for a frame: searched at `κ` in the bulk and at the time `s`
/// at the edge.
pub fn frame_contours(q: f64, c: f64, frame: Frame, s: f64) -> hslpp_core::Result<ThetaR> {
    match frame {
        Frame::Bulk { kappa } => theta_r(q, c, kappa),
        Frame::Edge => theta_r(q, c, s),
    }
}

/// Prelimit kernel in `frame` at the given scaled arguments.
pub fn frame_kernel(q: f64, c: f64, frame: Frame, n: usize, s: f64, x: f64, t: f64, y: f64) -> hslpp_core::Result<Kernel2x2> {
    let tr = frame_contours(q, c, frame, s)?;
    match frame {
        Frame::Bulk { kappa } => kernel_bulk_n(&BulkScaling::new(q, c, kappa)?, n, s, x, t, y, tr),
        Frame::Edge => kernel_edge_n(&EdgeScaling::new(q, c)?, n, s, x, t, y, tr),
    }
}

/// Limit of `K12` in `frame`.
pub fn frame_limit(q: f64, c: f64, frame: Frame, s: f64, x: f64, t: f64, y: f64) -> hslpp_core::Result<f64> {
    Ok(match frame {
        Frame::Bulk { kappa } => limit_bulk_k12(s, x, t, y, BulkScaling::new(q, c, kappa)?.f1)?,
        Frame::Edge => {
            let k0 = EdgeScaling::new(q, c)?.kappa0;
            kbm(s - k0, x, t - k0, y)?
        }
    })
}

/// First-intensity comparison: Monte Carlo mean of `#{i : X_i >= a}` against
/// the tail sum of the prelimit `K12` diagonal, at scaled time `time`.
pub fn run_intensity_experiment(cfg: &ExperimentConfig, frame: Frame, time: f64, thresholds: &[f64]) -> Result<SummaryStats> {
    let g = params(cfg)?;
    let n = first_n(cfg);
    let (row, lattice): (usize, _) = match frame {
        Frame::Bulk { kappa } => {
            let b = BulkScaling::new(cfg.q, cfg.c, kappa)?;
            (b.row(n, time) as usize, b.lattice(n, time))
        }
        Frame::Edge => {
            let e = EdgeScaling::new(cfg.q, cfg.c)?;
            e.check_time(time)?;
            ((time * n as f64).floor() as usize, e.lattice(n, time))
        }
    };
    if row == 0 || row > n {
        return Err(Error::invalid("t", format!("row {row} outside 1..=N")));
    }
    let scaled = |lambda: u64, i: usize| -> Result<f64> {
        Ok(match frame {
            Frame::Bulk { kappa } => BulkScaling::new(cfg.q, cfg.c, kappa)?.scaled_particle(n, time, lambda, i),
            Frame::Edge => EdgeScaling::new(cfg.q, cfg.c)?.scaled_particle(n, time, lambda, i),
        })
    };
    let lowest = thresholds.iter().copied().fold(f64::INFINITY, f64::min);
    let depth = row.min(n);
    let counts = replicas(cfg.replicas, |r| {
        let ens = sample_ensemble(g, n, depth, cfg.seed, r)?;
        let xs = (1..=depth).map(|i| scaled(ens.lambda(i, row), i)).collect::<Result<Vec<f64>>>()?;
        if scaled(0, depth + 1)? >= lowest {
            return Err(Error::invalid("thresholds", "particles beyond the row reach the lowest threshold"));
        }
        Ok(thresholds.iter().map(|&a| xs.iter().filter(|&&x| x >= a).count() as f64).collect::<Vec<f64>>())
    })?;
    let tails = first_intensity_tails(
        |x| frame_kernel(cfg.q, cfg.c, frame, n, time, x, time, x).map(|k| k.k12.re),
        lattice,
        thresholds,
        TAIL_HARD_CAP,
    )?;
    let label = match frame {
        Frame::Bulk { .. } => "bulk",
        Frame::Edge => "edge",
    };
    let stats = thresholds
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let c: Vec<f64> = counts.iter().map(|v| v[j]).collect();
            let se = std_error(&c);
            Stat::check(format!("{label}_count_ge({a})"), mean(&c), se, tails[j].value, cfg.tol.n_se * se)
        })
        .collect();
    Ok(SummaryStats::new("first-intensity", stats))
}

/// A point of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvPoint {
    pub frame: Frame,
    pub s: f64,
    pub x: f64,
    pub t: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvRow {
    pub schema_version: u32,
    pub frame: String,
    pub point: usize,
    pub n: usize,
    /// Arguments snapped to the lattices.
    pub x: f64,
    pub y: f64,
    pub k12_re: Option<f64>,
    pub k12_im: Option<f64>,
    pub limit: Option<f64>,
    pub err12: Option<f64>,
    pub abs_k11: Option<f64>,
    pub abs_k22: Option<f64>,
    pub quad_err: Option<f64>,
    pub status: String,
}

pub struct ConvResult {
    pub rows: Vec<ConvRow>,
    pub summary: SummaryStats,
}

fn frame_name(f: Frame) -> String {
    match f {
        Frame::Bulk { kappa } => format!("bulk(kappa={kappa})"),
        Frame::Edge => "edge".into(),
    }
}

fn snap(q: f64, c: f64, frame: Frame, n: usize, s: f64, x: f64) -> hslpp_core::Result<f64> {
    let l = match frame {
        Frame::Bulk { kappa } => BulkScaling::new(q, c, kappa)?.lattice(n, s),
        Frame::Edge => EdgeScaling::new(q, c)?.lattice(n, s),
    };
    Ok(l.point(l.nearest(x)))
}

/// `|K12^N - limit|`, `|K11^N|`, `|K22^N|` along `cfg.n` for every point.
/// Arguments are snapped to the nearest lattice points, and the limit is
/// taken at the snapped arguments. Failures are recorded per cell.
pub fn run_convergence_study(cfg: &ExperimentConfig, points: &[ConvPoint]) -> Result<ConvResult> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| cfg.n.iter().map(move |&n| (p, n))).collect();
    let rows: Vec<ConvRow> = cells
        .par_iter()
        .map(|&(pi, n)| {
            let p = points[pi];
            let mut row = ConvRow {
                schema_version: SCHEMA_VERSION,
                frame: frame_name(p.frame),
                point: pi,
                n,
                x: p.x,
                y: p.y,
                k12_re: None,
                k12_im: None,
                limit: None,
                err12: None,
                abs_k11: None,
                abs_k22: None,
                quad_err: None,
                status: "ok".into(),
            };
            let run = |row: &mut ConvRow| -> Result<()> {
                row.x = snap(cfg.q, cfg.c, p.frame, n, p.s, p.x)?;
                row.y = snap(cfg.q, cfg.c, p.frame, n, p.t, p.y)?;
                let lim = frame_limit(cfg.q, cfg.c, p.frame, p.s, row.x, p.t, row.y)?;
                row.limit = Some(lim);
                let k = frame_kernel(cfg.q, cfg.c, p.frame, n, p.s, row.x, p.t, row.y)?;
                row.k12_re = Some(k.k12.re);
                row.k12_im = Some(k.k12.im);
                row.err12 = Some((k.k12 - lim).norm());
                row.abs_k11 = Some(k.k11.norm());
                row.abs_k22 = Some(k.k22.norm());
                row.quad_err = Some(k.err);
                Ok(())
            };
            if let Err(e) = run(&mut row) {
                row.status = e.to_string();
            }
            row
        })
        .collect();
    let mut stats = Vec::new();
    let tol = cfg.tol.kernel;
    for (pi, p) in points.iter().enumerate() {
        let mine: Vec<&ConvRow> = rows.iter().filter(|r| r.point == pi).collect();
        let tag = format!("{}[{},{};{},{}]", frame_name(p.frame), p.s, p.x, p.t, p.y);
        let errs: Option<Vec<f64>> = mine.iter().map(|r| r.err12).collect();
        let Some(errs) = errs else {
            stats.push(Stat { stat: format!("{tag}:evaluation"), estimate: f64::NAN, se: 0.0, target: None, tol: None, pass: false });
            continue;
        };
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        stats.push(Stat {
            stat: format!("{tag}:err12_decreasing"),
            estimate: if decreasing { 1.0 } else { 0.0 },
            se: 0.0,
            target: Some(1.0),
            tol: Some(0.0),
            pass: decreasing,
        });
        let last = mine.last().expect("nonempty N list");
        stats.push(Stat::check(format!("{tag}:err12_final"), errs[errs.len() - 1], last.quad_err.unwrap_or(0.0), 0.0, tol));
        stats.push(Stat::check(format!("{tag}:abs_k11_final"), last.abs_k11.unwrap_or(f64::NAN), 0.0, 0.0, tol));
        stats.push(Stat::check(format!("{tag}:abs_k22_final"), last.abs_k22.unwrap_or(f64::NAN), 0.0, 0.0, tol));
    }
    Ok(ConvResult { rows, summary: SummaryStats::new("converge", stats) })
}
