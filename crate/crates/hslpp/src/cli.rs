//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hslpp_core::contour::build_contour_c;
use hslpp_core::gibbs::gibbs_property_test;
use hslpp_core::kernels::{
    airy_kernel_ext, descent_report, kbm, kernel_geo, limit_bulk_k12, DescentOptions, DescentViolation, Kernel2x2,
    ThetaR,
};
use hslpp_core::lpp::{ensemble_rows, lambda_family_truncated, sample_weights, GeomParams};
use hslpp_core::phase::PhaseSpec;
use hslpp_core::scaling::{BulkScaling, EdgeScaling};

use crate::config::{layered, layered_list, layered_opt, load_config, thread_count, ExperimentConfig, FileConfig, Tolerances};
use crate::error::{Error, Result};
use crate::io::{sink, write_csv, write_json, Format, SCHEMA_VERSION};
use crate::montecarlo::{
    frame_contours, frame_kernel, run_bottom_experiment, run_convergence_study, run_intensity_experiment,
    run_profile, run_top_experiment, with_pool, ConvPoint, Frame, SummaryStats,
};

#[derive(Debug, Parser)]
#[command(name = "hslpp", version, about = "Half-space geometric LPP: sampling, kernels and experiments")]
pub struct Cli {
    /// Worker threads (falls back to HSLPP_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a weight array and write the curves λ_i(m, N) as CSV.
    Sample(SampleArgs),
    /// Concentration profile of the top five curves.
    Profile(ProfileArgs),
    /// Brownian statistics of the rescaled top curve.
    TopBm(Common),
    /// Airy-frame statistics of the lower curves.
    BottomAiry(BottomArgs),
    /// Evaluate a correlation kernel.
    Kernel(KernelArgs),
    /// Kernel convergence study along a list of N.
    Converge(ConvergeArgs),
    /// Empirical interlacing Gibbs property on a small system.
    GibbsCheck(GibbsArgs),
    /// Sign checks of the steepest-descent contours.
    DescentReport(DescentArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat `key = value` configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Sizes, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scaled times, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
    /// Alias for a single entry of `--times`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub tol_var: Option<f64>,
    #[arg(long)]
    pub tol_ks: Option<f64>,
    #[arg(long)]
    pub tol_se: Option<f64>,
    #[arg(long)]
    pub tol_profile: Option<f64>,
    #[arg(long)]
    pub tol_sep: Option<f64>,
    #[arg(long)]
    pub tol_kernel: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of curves written (all by default).
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub common: Common,
    /// Location `m/N` of the concentration check.
    #[arg(long)]
    pub probe: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BottomArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also compare first intensities at these thresholds.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thresholds: Option<Vec<f64>>,
    /// Size of the first-intensity comparison.
    #[arg(long, default_value_t = 100)]
    pub intensity_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Geo,
    Bulk,
    Edge,
    Airy,
    Bm,
    Limit12,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// First time; the row `M_s` for `--which geo`.
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Bulk,
    Edge,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub frame: FrameArg,
    /// Points `s,x,t,y` separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: String,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Window `a,b` of lattice times.
    #[arg(long, value_delimiter = ',')]
    pub window: Option<Vec<usize>>,
    #[arg(long)]
    pub k_top: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DescentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, value_enum, default_value = "bulk")]
    pub frame: FrameArg,
    /// Wedge angle in radians; searched when absent.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn file_of(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(FileConfig::default()),
    }
}

/// Merges flags over the file over `base`.
pub fn experiment_config(a: &Common, base: ExperimentConfig) -> Result<(ExperimentConfig, FileConfig)> {
    let f = file_of(&a.config)?;
    let d = base.tol;
    let mut times = layered_list(a.times.clone(), &f, "times", base.times.clone())?;
    if let Some(t) = a.t {
        times = vec![t];
    }
    let cfg = ExperimentConfig {
        q: layered(a.q, &f, "q", base.q)?,
        c: layered(a.c, &f, "c", base.c)?,
        kappa: layered_opt(a.kappa, &f, "kappa")?.or(base.kappa),
        n: layered_list(a.n.clone(), &f, "n", base.n.clone())?,
        replicas: layered(a.replicas, &f, "replicas", base.replicas)?,
        seed: layered(a.seed, &f, "seed", base.seed)?,
        times,
        tol: Tolerances {
            var_rel: layered(a.tol_var, &f, "tol_var", d.var_rel)?,
            ks: layered(a.tol_ks, &f, "tol_ks", d.ks)?,
            n_se: layered(a.tol_se, &f, "tol_se", d.n_se)?,
            profile: layered(a.tol_profile, &f, "tol_profile", d.profile)?,
            separation: layered(a.tol_sep, &f, "tol_sep", d.separation)?,
            kernel: layered(a.tol_kernel, &f, "tol_kernel", d.kernel)?,
        },
    };
    cfg.validate()?;
    Ok((cfg, f))
}

fn format_of(a: &Common, f: &FileConfig, default: Format) -> Result<Format> {
    Ok(match (a.format, f.raw("format")) {
        (Some(v), _) => v,
        (None, Some(v)) => Format::from_str(v, true).map_err(|_| Error::invalid("format", format!("unknown `{v}`")))?,
        (None, None) => default,
    })
}

fn output_of(flag: &Option<PathBuf>, f: &FileConfig) -> Option<PathBuf> {
    flag.clone().or_else(|| f.raw("output").map(PathBuf::from))
}

fn emit_summary(s: &SummaryStats, out: Option<PathBuf>) -> Result<bool> {
    write_json(&mut *sink(out.as_deref())?, s)?;
    Ok(s.passed())
}

#[derive(Serialize)]
struct SampleRow {
    schema_version: u32,
    m: usize,
    i: usize,
    lambda: u64,
}

#[derive(Serialize)]
struct KernelOut {
    schema_version: u32,
    which: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    k11: Option<[f64; 2]>,
    k12: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    k21: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k22: Option<[f64; 2]>,
    err_estimate: f64,
}

fn pair(z: hslpp_core::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn kernel_out(which: &str, k: Kernel2x2) -> KernelOut {
    KernelOut {
        schema_version: SCHEMA_VERSION,
        which: which.into(),
        k11: Some(pair(k.k11)),
        k12: pair(k.k12),
        k21: Some(pair(k.k21)),
        k22: Some(pair(k.k22)),
        err_estimate: k.err,
    }
}

fn scalar_out(which: &str, v: f64) -> KernelOut {
    KernelOut { schema_version: SCHEMA_VERSION, which: which.into(), k11: None, k12: [v, 0.0], k21: None, k22: None, err_estimate: 0.0 }
}

fn integral(key: &str, v: f64) -> Result<i64> {
    if v.fract() != 0.0 || !v.is_finite() {
        return Err(Error::invalid(key, format!("{v} must be an integer for --which geo")));
    }
    Ok(v as i64)
}

fn run_kernel(a: &KernelArgs) -> Result<bool> {
    let f = file_of(&a.config)?;
    let q = layered(a.q, &f, "q", 0.5)?;
    let c = layered(a.c, &f, "c", 1.4)?;
    let kappa = layered(a.kappa, &f, "kappa", 0.36)?;
    let n = layered(a.n, &f, "n", 100)?;
    let (s, x, t, y) = (a.s, a.x, a.t, a.y);
    let out = match a.which {
        Which::Bm => scalar_out("bm", kbm(s, x, t, y)?),
        Which::Airy => scalar_out("airy", airy_kernel_ext(s, x, t, y)?),
        Which::Limit12 => scalar_out("limit12", limit_bulk_k12(s, x, t, y, BulkScaling::new(q, c, kappa)?.f1)?),
        Which::Geo => {
            let (ms, mt) = (integral("s", s)?, integral("t", t)?);
            if ms < 1 || mt < 1 {
                return Err(Error::invalid("s", "rows must be positive"));
            }
            let k = kernel_geo(GeomParams::new(q, c)?, n, ms as usize, mt as usize, integral("x", x)?, integral("y", y)?)?;
            kernel_out("geo", k)
        }
        Which::Bulk => kernel_out("bulk", frame_kernel(q, c, Frame::Bulk { kappa }, n, s, x, t, y)?),
        Which::Edge => kernel_out("edge", frame_kernel(q, c, Frame::Edge, n, s, x, t, y)?),
    };
    write_json(&mut *sink(output_of(&a.output, &f).as_deref())?, &out)?;
    Ok(true)
}

fn parse_points(frame: Frame, spec: &str) -> Result<Vec<ConvPoint>> {
    spec.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let v: Vec<f64> = p
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Error::invalid("points", format!("cannot parse `{x}`"))))
                .collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(Error::invalid("points", format!("`{p}` needs four numbers s,x,t,y")));
            }
            Ok(ConvPoint { frame, s: v[0], x: v[1], t: v[2], y: v[3] })
        })
        .collect()
}

fn violation_json(v: &DescentViolation) -> serde_json::Value {
    match *v {
        DescentViolation::Global { z, value } => json!({"kind": "global", "z": [z.re, z.im], "value": value}),
        DescentViolation::CritDecay { r, value } => json!({"kind": "crit_decay", "r": r, "value": value}),
        DescentViolation::CritGrow { r, value } => json!({"kind": "crit_grow", "r": r, "value": value}),
        DescentViolation::CritDecayG { r, value } => json!({"kind": "crit_decay_g", "r": r, "value": value}),
        DescentViolation::SmallCircleS { radius, theta, derivative } => {
            json!({"kind": "small_circle_s", "radius": radius, "theta": theta, "derivative": derivative})
        }
        DescentViolation::SmallCircleG { radius, theta, derivative } => {
            json!({"kind": "small_circle_g", "radius": radius, "theta": theta, "derivative": derivative})
        }
        DescentViolation::DiffS { value } => json!({"kind": "diff_s", "value": value}),
        DescentViolation::DiffS2 { value } => json!({"kind": "diff_s2", "value": value}),
    }
}

fn run_descent(a: &DescentArgs) -> Result<bool> {
    let f = file_of(&a.config)?;
    let q = layered(a.q, &f, "q", 0.5)?;
    let c = layered(a.c, &f, "c", 1.4)?;
    let kappa = layered(a.kappa, &f, "kappa", 0.36)?;
    let grid = layered(a.grid, &f, "grid", 2000)?;
    let b = BulkScaling::new(q, c, kappa)?;
    let tr = match (layered_opt(a.theta, &f, "theta")?, layered_opt(a.r, &f, "r")?) {
        (Some(theta), Some(r)) => ThetaR { theta, r },
        (None, None) => frame_contours(q, c, Frame::Bulk { kappa }, kappa)?,
        _ => return Err(Error::invalid("theta", "give both --theta and --r or neither")),
    };
    let (spec, anchor) = match a.frame {
        FrameArg::Bulk => (PhaseSpec::bulk(&b), b.zc),
        FrameArg::Edge => (PhaseSpec::edge(&EdgeScaling::new(q, c)?, kappa), c),
    };
    let contour = build_contour_c(anchor, tr.theta, tr.r, 0.0)?;
    let rep = descent_report(&spec, &contour, &DescentOptions::new(c, tr.theta, grid));
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "q": q, "c": c, "kappa": kappa,
        "frame": match a.frame { FrameArg::Bulk => "bulk", FrameArg::Edge => "edge" },
        "theta": tr.theta, "r": tr.r,
        "samples": rep.samples,
        "max_re_s": rep.max_re_s, "min_re_s": rep.min_re_s,
        "max_re_g": rep.max_re_g, "min_re_g": rep.min_re_g,
        "diff_s": rep.diff_s, "diff_s2": rep.diff_s2,
        "global_violations": rep.global_violations(),
        "violations": rep.violations.iter().map(violation_json).collect::<Vec<_>>(),
        "ok": rep.ok(),
    });
    write_json(&mut *sink(output_of(&a.output, &f).as_deref())?, &out)?;
    Ok(rep.ok())
}

fn run_gibbs(a: &GibbsArgs) -> Result<bool> {
    let f = file_of(&a.config)?;
    let q = layered(a.q, &f, "q", 0.5)?;
    let c = layered(a.c, &f, "c", 1.4)?;
    let n = layered(a.n, &f, "n", 2)?;
    let w = layered_list(a.window.clone(), &f, "window", vec![0, n])?;
    if w.len() != 2 {
        return Err(Error::invalid("window", "expected `a,b`"));
    }
    let k_top = layered(a.k_top, &f, "k_top", 1)?;
    let samples = layered(a.samples, &f, "samples", 100_000)?;
    let seed = layered(a.seed, &f, "seed", 7)?;
    let r = gibbs_property_test(GeomParams::new(q, c)?, n, (w[0], w[1]), k_top, samples, seed)?;
    let out = json!({
        "schema_version": SCHEMA_VERSION,
        "tv": r.tv, "tv_se": r.tv_se, "n": r.n, "accept_rate": r.accept_rate,
        "classes": r.classes, "skipped_mass": r.skipped_mass,
    });
    write_json(&mut *sink(output_of(&a.output, &f).as_deref())?, &out)?;
    Ok(true)
}

/// Runs a parsed command; `Ok(false)` means a statistical check failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    let threads = thread_count(cli.threads)?;
    with_pool(threads, || dispatch(&cli.command))?
}

fn dispatch(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Sample(a) => {
            let (cfg, f) = experiment_config(&a.common, ExperimentConfig::default())?;
            let n = cfg.n[0];
            let depth = layered(a.depth, &f, "depth", n)?;
            let w = sample_weights(GeomParams::new(cfg.q, cfg.c)?, n, cfg.seed)?;
            let e = lambda_family_truncated(&w, depth);
            let rows = ensemble_rows(&e).into_iter().map(|(m, i, lambda)| SampleRow { schema_version: SCHEMA_VERSION, m, i, lambda });
            write_csv(&mut *sink(output_of(&a.common.output, &f).as_deref())?, rows)?;
            Ok(true)
        }
        Command::Profile(a) => {
            let base = ExperimentConfig { replicas: 10, ..ExperimentConfig::default() };
            let (cfg, f) = experiment_config(&a.common, base)?;
            let probe = layered(a.probe, &f, "probe", 0.8)?;
            let r = run_profile(&cfg, probe)?;
            let mut out = sink(output_of(&a.common.output, &f).as_deref())?;
            match format_of(&a.common, &f, Format::Csv)? {
                Format::Csv => write_csv(&mut *out, r.rows())?,
                Format::Json => write_json(&mut *out, &r.summary)?,
            }
            Ok(r.summary.passed())
        }
        Command::TopBm(a) => {
            let (cfg, f) = experiment_config(a, ExperimentConfig::default())?;
            let r = run_top_experiment(&cfg)?;
            let mut out = sink(output_of(&a.output, &f).as_deref())?;
            match format_of(a, &f, Format::Json)? {
                Format::Json => write_json(&mut *out, &r.summary)?,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        schema_version: u32,
                        replica: usize,
                        t: f64,
                        u: f64,
                    }
                    let rows = r.values.iter().enumerate().flat_map(|(i, v)| {
                        r.times.iter().zip(v).map(move |(&t, &u)| Row { schema_version: SCHEMA_VERSION, replica: i, t, u })
                    });
                    write_csv(&mut *out, rows)?
                }
            }
            Ok(r.summary.passed())
        }
        Command::BottomAiry(a) => {
            let base = ExperimentConfig {
                kappa: Some(0.8),
                n: vec![200, 800],
                replicas: 3000,
                times: vec![0.0, 0.5],
                ..ExperimentConfig::default()
            };
            let (cfg, f) = experiment_config(&a.common, base)?;
            let thresholds = layered_list(a.thresholds.clone(), &f, "thresholds", vec![])?;
            let mut r = run_bottom_experiment(&cfg)?;
            if !thresholds.is_empty() {
                let icfg = ExperimentConfig { n: vec![a.intensity_n], ..cfg.clone() };
                let kappa = cfg.kappa.expect("set by default");
                let s = run_intensity_experiment(&icfg, Frame::Bulk { kappa }, 0.0, &thresholds)?;
                r.summary.stats.extend(s.stats);
            }
            emit_summary(&r.summary, output_of(&a.common.output, &f))
        }
        Command::Kernel(a) => run_kernel(a),
        Command::Converge(a) => {
            let base = ExperimentConfig { n: vec![100, 400, 800], kappa: Some(0.36), ..ExperimentConfig::default() };
            let (cfg, f) = experiment_config(&a.common, base)?;
            let frame = match a.frame {
                FrameArg::Bulk => Frame::Bulk { kappa: cfg.kappa.expect("set by default") },
                FrameArg::Edge => Frame::Edge,
            };
            let pts = parse_points(frame, &a.points)?;
            let r = run_convergence_study(&cfg, &pts)?;
            let mut out = sink(output_of(&a.common.output, &f).as_deref())?;
            match format_of(&a.common, &f, Format::Csv)? {
                Format::Csv => write_csv(&mut *out, r.rows.iter())?,
                Format::Json => write_json(&mut *out, &json!({"schema_version": SCHEMA_VERSION, "rows": r.rows, "summary": r.summary}))?,
            }
            Ok(r.summary.passed())
        }
        Command::GibbsCheck(a) => run_gibbs(a),
        Command::DescentReport(a) => run_descent(a),
    }
}

/// Entry point: parses `argv`, runs, and returns the process exit code
/// (`0` success, `1` validation error or failed check, `2` numerical failure).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
