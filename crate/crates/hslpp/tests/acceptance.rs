//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The binary exits nonzero only when a criterion cannot be evaluated at all;
//! a measured failure is reported as FAIL and left red.

#[allow(dead_code)]
#[path = "../../core/tests/support/airy.rs"]
mod airy;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use hslpp::config::ExperimentConfig;
use hslpp::montecarlo::{
    run_bottom_experiment, run_convergence_study, run_intensity_experiment, run_top_experiment, sample_ensemble,
    ConvPoint, Frame, SummaryStats,
};
use hslpp_core::contour::build_contour_c;
use hslpp_core::gibbs::{enumerate_bridges, gibbs_property_test, sample_bridge, BridgeSpec};
use hslpp_core::kernels::{
    airy_kernel_ext, descent_report, kbm, kbm_matrix, kernel_bulk_n, kernel_bulk_n_via_geo, kernel_edge_n,
    kernel_edge_n_via_geo, search_theta_r, DescentOptions, Kernel2x2, ThetaR,
};
use hslpp_core::lpp::{brute_force_gk, greene_shape, lambda_family, sample_weights_with, GeomParams, Partition, WeightArray, BRUTE_FORCE_CAP};
use hslpp_core::phase::{phase_eval, PhaseSpec, Which};
use hslpp_core::pfaffian::bm_determinantal_check;
use hslpp_core::rng::{stream, uniform_below};
use hslpp_core::scaling::{h_bot, kappa0, BulkScaling, EdgeScaling};
use hslpp_core::schur::{enumerate_exact, SchurSequence, MAX_TAIL};
use hslpp_core::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<(bool, String), String>;

const Q: f64 = 0.5;
const C: f64 = 1.4;
const KAPPA: f64 = 0.36;

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn crit1() -> Outcome {
    let mut rng = stream(101, 0);
    let mut checks = 0usize;
    let mut bad = 0usize;
    for _ in 0..500 {
        let n = 1 + uniform_below(&mut rng, 4) as usize;
        let mut rows = vec![vec![0u64; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = uniform_below(&mut rng, 4);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let w = WeightArray::from_rows(&rows).map_err(e)?;
        for m in 1..=n {
            for nn in 1..=n {
                let s = greene_shape(&w, m, nn).map_err(e)?;
                let mut acc = 0;
                for k in 1..=m.min(nn) {
                    acc += s.part(k);
                    checks += 1;
                    if acc != brute_force_gk(&w, m, nn, k, BRUTE_FORCE_CAP).map_err(e)? {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{bad} mismatches in {checks} (array, m, n, k) checks")))
}

fn crit2() -> Outcome {
    let g = GeomParams::new(Q, C).map_err(e)?;
    let mut v = 0;
    for r in 0..100 {
        v += sample_ensemble(g, 50, 50, 202, r).map_err(e)?.interlacing_violations();
    }
    Ok((v == 0, format!("{v} violations over 100 ensembles at N=50")))
}

fn crit3() -> Outcome {
    let g = GeomParams::new(Q, C).map_err(e)?;
    let exact = enumerate_exact(g, 2, 64).map_err(e)?;
    exact.certify(MAX_TAIL).map_err(e)?;
    let samples = 100_000;
    let mut rng = stream(303, 0);
    let mut emp: [BTreeMap<Partition, f64>; 2] = Default::default();
    for _ in 0..samples {
        let f = lambda_family(&sample_weights_with(g, 2, &mut rng).map_err(e)?);
        let seq = SchurSequence { partitions: vec![f.partition(2), f.partition(1)] };
        for r in 0..2 {
            *emp[r].entry(seq.get(r + 1)).or_insert(0.0) += 1.0 / samples as f64;
        }
    }
    let mut tvs = [0.0; 2];
    for r in 0..2 {
        let mut ex: BTreeMap<Partition, f64> = BTreeMap::new();
        for (seq, p) in &exact.entries {
            *ex.entry(seq.get(r + 1)).or_insert(0.0) += p;
        }
        let mut tv = exact.tail;
        for (k, p) in &ex {
            tv += (emp[r].remove(k).unwrap_or(0.0) - p).abs();
        }
        tv += emp[r].values().sum::<f64>();
        tvs[r] = 0.5 * tv;
    }
    let pass = tvs.iter().all(|&t| t < 0.02);
    Ok((pass, format!("marginal TV lambda^1 {:.4}, lambda^2 {:.4} (< 0.02) at 1e5 samples", tvs[0], tvs[1])))
}

fn grid3() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for i in 0..20 {
        let q = 0.05 + 0.9 * i as f64 / 19.0;
        for j in 0..20 {
            let c = 1.0 + (1.0 / q - 1.0) * (j as f64 + 0.5) / 20.0;
            let k0 = kappa0(q, c);
            for k in 0..20 {
                out.push((q, c, k0 + (1.0 - k0) * (k as f64 + 0.5) / 20.0));
            }
        }
    }
    out
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn crit4() -> Outcome {
    let mut worst = [0.0f64; 3];
    for (q, c, kappa) in grid3() {
        let b = BulkScaling::new(q, c, kappa).map_err(e)?;
        let s = EdgeScaling::new(q, c).map_err(e)?;
        worst[0] = worst[0].max(rel(s.sigma2 * s.sigma2, s.p2 * (1.0 + s.p2)));
        worst[1] = worst[1].max(rel(b.sigma1 * b.zc / (b.p1 * (1.0 + b.p1)).sqrt(), (2.0 * b.f1).powf(-0.5)));
        let h = 1e-5 * kappa.min(1.0 - kappa);
        let fd = (h_bot(q, kappa + h) - h_bot(q, kappa - h)) / (2.0 * h);
        worst[2] = worst[2].max(rel(fd, b.p1));
    }
    let pass = worst.iter().all(|&w| w <= 1e-7);
    Ok((pass, format!("max rel err sigma2 {:.1e}, sigma1 {:.1e}, p1 {:.1e} (<= 1e-7) on 8000 points", worst[0], worst[1], worst[2])))
}

fn triples() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for q in [0.2, 0.35, 0.5, 0.65, 0.8] {
        for cf in [0.3, 0.7] {
            let c = 1.0 + (1.0 / q - 1.0) * cf;
            let k0 = kappa0(q, c);
            for kf in [0.1, 0.3, 0.5, 0.7, 0.9] {
                out.push((q, c, k0 + (1.0 - k0) * kf));
            }
        }
    }
    out
}

fn re(spec: &PhaseSpec, which: Which, x: f64) -> f64 {
    phase_eval(spec, Complex64::new(x, 0.0), which, 0).map(|v| v.re).unwrap_or(f64::NAN)
}

fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    (16.0 * d(0.5 * h) - d(h)) / 15.0
}

fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    richardson(|h| (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h), h)
}

fn d3(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    richardson(
        |h| {
            (-f(x + 3.0 * h) + 8.0 * f(x + 2.0 * h) - 13.0 * f(x + h) + 13.0 * f(x - h) - 8.0 * f(x - 2.0 * h)
                + f(x - 3.0 * h))
                / (8.0 * h * h * h)
        },
        h,
    )
}

fn crit5() -> Outcome {
    let mut crit = 0.0f64;
    let mut fd = 0.0f64;
    let mut signs = 0usize;
    let ts = triples();
    for &(q, c, kappa) in &ts {
        let b = BulkScaling::new(q, c, kappa).map_err(e)?;
        let s = EdgeScaling::new(q, c).map_err(e)?;
        let (s1, s2) = (PhaseSpec::bulk(&b), PhaseSpec::edge(&s, kappa));
        let (zc, cc) = (Complex64::new(b.zc, 0.0), Complex64::new(c, 0.0));
        for (sp, z, which, k) in [
            (&s1, zc, Which::S, 1),
            (&s1, zc, Which::S, 2),
            (&s1, zc, Which::G, 1),
            (&s2, cc, Which::S, 1),
            (&s2, cc, Which::G, 1),
        ] {
            crit = crit.max(phase_eval(sp, z, which, k).map_err(e)?.norm());
        }
        let h = 0.05 * (b.zc - q).min(1.0 / q - b.zc);
        fd = fd.max(rel(d3(|x| re(&s1, Which::S, x), b.zc, h), 2.0 * b.sigma1.powi(3)));
        fd = fd.max(rel(d2(|x| re(&s1, Which::G, x), b.zc, h), 2.0 * b.f1 * b.sigma1 * b.sigma1));
        let h = 0.05 * (c - q).min(1.0 / q - c);
        let g2 = s.sigma2 * s.sigma2 / (c * c);
        fd = fd.max(rel(d2(|x| re(&s2, Which::S, x), c, h), g2 * (kappa - s.kappa0)));
        fd = fd.max(rel(d2(|x| re(&s2, Which::G, x), c, h), g2));
        if re(&s1, Which::S, b.zc) - re(&s1, Which::S, c) < 0.0 && re(&s2, Which::S, b.zc) - re(&s2, Which::S, c) > 0.0 {
            signs += 1;
        }
    }
    let pass = crit <= 1e-9 && fd <= 1e-6 && signs == ts.len();
    Ok((
        pass,
        format!(
            "max |critical derivative| {crit:.1e}, max FD rel err {fd:.1e} (<= 1e-6), signs hold at {signs}/{} triples",
            ts.len()
        ),
    ))
}

fn crit6() -> Outcome {
    let tr = search_theta_r(Q, C, KAPPA, 2000).map_err(e)?;
    let b = BulkScaling::new(Q, C, KAPPA).map_err(e)?;
    let contour = build_contour_c(b.zc, tr.theta, tr.r, 0.0).map_err(e)?;
    let r = descent_report(&PhaseSpec::bulk(&b), &contour, &DescentOptions::new(C, tr.theta, 2000));
    Ok((
        r.ok() && r.samples >= 2000,
        format!(
            "theta0 = {:.4}pi, R0 = {}, {} samples, {} violations",
            tr.theta / std::f64::consts::PI,
            tr.r,
            r.samples,
            r.violations.len()
        ),
    ))
}

fn entry_gaps(a: &Kernel2x2, b: &Kernel2x2) -> [f64; 4] {
    [(a.k11 - b.k11).norm(), (a.k12 - b.k12).norm(), (a.k21 - b.k21).norm(), (a.k22 - b.k22).norm()]
}

fn skew_gap(a: &Kernel2x2, b: &Kernel2x2) -> f64 {
    [(a.k11 + b.k11).norm(), (a.k22 + b.k22).norm(), (a.k12 + b.k21).norm(), (a.k21 + b.k12).norm()]
        .into_iter()
        .fold(0.0, f64::max)
}

fn max4(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]), a[3].max(b[3])]
}

fn crit7() -> Outcome {
    let n = 50;
    let b = BulkScaling::new(Q, C, KAPPA).map_err(e)?;
    let s = EdgeScaling::new(Q, C).map_err(e)?;
    let tr = search_theta_r(Q, C, KAPPA, 2000).map_err(e)?;
    let bulk_pts = [(0.0, 0.0, 0.0, 0.0), (0.0, 0.5, 0.5, -0.5), (-0.5, 1.0, 0.5, 0.0), (0.3, -0.3, -0.3, 0.6), (0.5, 0.0, 0.0, 1.0)];
    let edge_pts = [(0.4, 0.0, 0.6, 0.5), (0.6, 0.0, 0.6, 0.0), (0.5, -0.5, 0.7, 0.3), (0.7, 0.2, 0.4, -0.2), (0.3, 0.0, 0.8, 1.0)];
    let (mut deform, mut skew) = (0.0f64, 0.0f64);
    let (mut conj_b, mut conj_e) = ([0.0f64; 4], [0.0f64; 4]);
    for &(t1, x, t2, y) in &bulk_pts {
        let (l1, l2) = (b.lattice(n, t1), b.lattice(n, t2));
        let (x, y) = (l1.point(l1.nearest(x)), l2.point(l2.nearest(y)));
        let k = kernel_bulk_n(&b, n, t1, x, t2, y, tr).map_err(e)?;
        for alt in [ThetaR { theta: tr.theta, r: tr.r + 0.5 }, ThetaR { theta: 0.4 * std::f64::consts::PI, r: tr.r }] {
            let m = kernel_bulk_n(&b, n, t1, x, t2, y, alt).map_err(e)?;
            deform = deform.max(entry_gaps(&k, &m).into_iter().fold(0.0, f64::max));
        }
        skew = skew.max(skew_gap(&k, &kernel_bulk_n(&b, n, t2, y, t1, x, tr).map_err(e)?));
        conj_b = max4(conj_b, entry_gaps(&k, &kernel_bulk_n_via_geo(&b, n, t1, x, t2, y).map_err(e)?));
    }
    for &(t1, x, t2, y) in &edge_pts {
        let (l1, l2) = (s.lattice(n, t1), s.lattice(n, t2));
        let (x, y) = (l1.point(l1.nearest(x)), l2.point(l2.nearest(y)));
        let tr = search_theta_r(Q, C, t1, 2000).map_err(e)?;
        let k = kernel_edge_n(&s, n, t1, x, t2, y, tr).map_err(e)?;
        let m = kernel_edge_n(&s, n, t1, x, t2, y, ThetaR { theta: tr.theta, r: tr.r + 0.5 }).map_err(e)?;
        deform = deform.max(entry_gaps(&k, &m).into_iter().fold(0.0, f64::max));
        skew = skew.max(skew_gap(&k, &kernel_edge_n(&s, n, t2, y, t1, x, tr).map_err(e)?));
        conj_e = max4(conj_e, entry_gaps(&k, &kernel_edge_n_via_geo(&s, n, t1, x, t2, y).map_err(e)?));
    }
    let conj = conj_b.into_iter().chain(conj_e).fold(0.0, f64::max);
    let pass = deform <= 1e-6 && skew <= 1e-9 && conj <= 1e-8;
    Ok((
        pass,
        format!(
            "deformation {deform:.1e} (<= 1e-6), skew {skew:.1e} (<= 1e-9), conjugation bulk [{:.1e} {:.1e} {:.1e} {:.1e}] edge [{:.1e} {:.1e} {:.1e} {:.1e}] (<= 1e-8)",
            conj_b[0], conj_b[1], conj_b[2], conj_b[3], conj_e[0], conj_e[1], conj_e[2], conj_e[3]
        ),
    ))
}

fn failed(s: &SummaryStats) -> Vec<String> {
    s.stats.iter().filter(|x| !x.pass).map(|x| format!("{}={:.4}", x.stat, x.estimate)).collect()
}

fn crit8() -> Outcome {
    let bulk = Frame::Bulk { kappa: KAPPA };
    let pts = [
        ConvPoint { frame: bulk, s: 0.0, x: 0.0, t: 0.0, y: 0.5 },
        ConvPoint { frame: bulk, s: 0.0, x: 0.0, t: 0.0, y: 0.0 },
        ConvPoint { frame: bulk, s: 0.5, x: 0.0, t: -0.5, y: 1.0 },
        ConvPoint { frame: Frame::Edge, s: 0.4, x: 0.0, t: 0.6, y: 0.5 },
        ConvPoint { frame: Frame::Edge, s: 0.6, x: 0.0, t: 0.6, y: 0.0 },
        ConvPoint { frame: Frame::Edge, s: 0.5, x: -0.5, t: 0.7, y: 0.3 },
    ];
    let cfg = ExperimentConfig { n: vec![100, 400, 800], ..ExperimentConfig::default() };
    let r = run_convergence_study(&cfg, &pts).map_err(e)?;
    let finals: Vec<String> = (0..pts.len())
        .map(|p| {
            let row = r.rows.iter().filter(|x| x.point == p).last();
            match row.and_then(|x| x.err12) {
                Some(v) => format!("{v:.3}"),
                None => "err".into(),
            }
        })
        .collect();
    let bad = failed(&r.summary);
    Ok((
        r.summary.passed(),
        format!("final |K12 - limit| per point [{}] (< 0.05, decreasing); failing: {}", finals.join(" "), if bad.is_empty() { "none".into() } else { bad.join(", ") }),
    ))
}

fn phi(v: f64, x: f64) -> f64 {
    (-x * x / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
}

fn crit9() -> Outcome {
    let (mut one, mut two) = (0.0f64, 0.0f64);
    for i in 1..=8 {
        let s = 0.25 * i as f64;
        for j in -6..=6 {
            let x = 0.5 * j as f64;
            one = one.max((kbm(s, x, s, x).map_err(e)? - phi(s, x)).abs());
            for (dt, y) in [(0.3, x + 0.4), (1.1, -x), (2.0, 0.7)] {
                let m = kbm_matrix(s, x, s + dt, y).map_err(e)?;
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                two = two.max((det - phi(s, x) * phi(dt, y - x)).abs());
            }
        }
    }
    let r = bm_determinantal_check(&[0.5, 1.0], 100_000, &mut stream(909, 0)).map_err(e)?;
    let pass = one <= 1e-12 && two <= 1e-12 && r.max_z_one_point <= 3.0 && r.max_z_two_point <= 3.0;
    Ok((
        pass,
        format!(
            "1-point {one:.1e}, 2-point det {two:.1e} (<= 1e-12), Monte Carlo max |z| one-point {:.2}, two-point {:.2} (<= 3) at 1e5 paths",
            r.max_z_one_point, r.max_z_two_point
        ),
    ))
}

fn crit10() -> Outcome {
    let mut worst = 0.0f64;
    for (x, y) in [(0.0, 1.0), (-1.0, 2.0), (0.5, 0.5)] {
        let v = airy_kernel_ext(0.0, x, 0.0, y).map_err(e)?;
        worst = worst.max((v - airy::airy_integral(0.0, x, y)).abs());
    }
    let d = airy_kernel_ext(0.0, 0.0, 0.0, 0.0).map_err(e)?;
    let pass = worst <= 1e-6 && (d - 0.066_987_2).abs() <= 1e-5;
    Ok((pass, format!("equal-time max err {worst:.1e} (<= 1e-6), K(0,0;0,0) = {d:.7} (0.0669872 +- 1e-5)")))
}

fn crit11() -> Outcome {
    let cfg = ExperimentConfig { n: vec![100], replicas: 5000, seed: 1111, ..ExperimentConfig::default() };
    let th = [-1.0, 0.0, 1.0];
    let b = run_intensity_experiment(&cfg, Frame::Bulk { kappa: KAPPA }, 0.0, &th).map_err(e)?;
    let s = run_intensity_experiment(&cfg, Frame::Edge, 0.6, &th).map_err(e)?;
    let show = |r: &SummaryStats| -> String {
        r.stats
            .iter()
            .map(|x| format!("{:.3}/{:.3}", x.estimate, x.target.unwrap_or(f64::NAN)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok((
        b.passed() && s.passed(),
        format!("count/tail at a = -1,0,1: bulk {} ; edge {} (within 3 SE)", show(&b), show(&s)),
    ))
}

fn crit12() -> Outcome {
    let cfg = ExperimentConfig { n: vec![500], replicas: 2000, seed: 1212, times: vec![0.4, 0.6, 0.8], ..ExperimentConfig::default() };
    let r = run_top_experiment(&cfg).map_err(e)?;
    let s = &r.summary;
    let get = |k: &str| s.get(k).ok_or_else(|| format!("missing statistic {k}"));
    let var = get("var_u(0.6)")?;
    let ks = get("ks_u(0.6)")?;
    let covs: Vec<_> = s.stats.iter().filter(|x| x.stat.starts_with("cov_u")).collect();
    let pass = var.pass && ks.pass && covs.iter().all(|c| c.pass);
    let cv = covs.iter().map(|c| format!("{}={:.3}/{:.3}", c.stat, c.estimate, c.target.unwrap_or(f64::NAN))).collect::<Vec<_>>();
    Ok((
        pass,
        format!("Var U(0.6) = {:.4} (0.4889 +- 15%), KS {:.4} (< 0.08), {}", var.estimate, ks.estimate, cv.join(" ")),
    ))
}

fn crit13() -> Outcome {
    let cfg = ExperimentConfig { kappa: Some(0.8), n: vec![200, 800], replicas: 3000, seed: 1313, times: vec![0.0], ..ExperimentConfig::default() };
    let r = run_bottom_experiment(&cfg).map_err(e)?;
    let s = &r.summary;
    let ks = s.stats.iter().find(|x| x.stat.starts_with("ks_u1")).ok_or("missing KS statistic")?;
    let sep = s.stats.iter().find(|x| x.stat.starts_with("separation_grows")).ok_or("missing separation statistic")?;
    Ok((
        ks.pass && sep.pass,
        format!("KS U1(0) N=200 vs 800 = {:.4} (< 0.08), separation grows in {:.3} of pairs (>= 0.95)", ks.estimate, sep.estimate),
    ))
}

fn crit14() -> Outcome {
    let g = GeomParams::new(Q, C).map_err(e)?;
    let r = gibbs_property_test(g, 2, (0, 2), 1, 100_000, 1414).map_err(e)?;
    let spec = BridgeSpec::new(0, 5, 0, 4).map_err(e)?;
    let support = enumerate_bridges(spec, 10_000).map_err(e)?;
    let mut counts: BTreeMap<Vec<i64>, usize> = support.iter().cloned().map(|p| (p, 0)).collect();
    let mut rng = stream(1415, 0);
    let draws = 100_000;
    for _ in 0..draws {
        *counts.get_mut(&sample_bridge(spec, &mut rng)).ok_or("bridge outside its support")? += 1;
    }
    let expect = draws as f64 / support.len() as f64;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    let p = 1.0 - ChiSquared::new((support.len() - 1) as f64).map_err(e)?.cdf(stat);
    Ok((
        r.tv < 0.05 && p > 0.001,
        format!("Gibbs TV {:.4} (< 0.05) over {} classes, bridge chi2 p = {p:.3} (> 0.001) on {} paths", r.tv, r.classes, support.len()),
    ))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 14] = [
        (1, "greene shape equals brute-force G_k", Duration::from_secs(60), crit1),
        (2, "interlacing of sampled ensembles", Duration::from_secs(10), crit2),
        (3, "LPP shapes follow the Schur process at N=2", Duration::from_secs(60), crit3),
        (4, "scaling identities", Duration::from_secs(5), crit4),
        (5, "phase-function calculus", Duration::from_secs(10), crit5),
        (6, "descent certification", Duration::from_secs(30), crit6),
        (7, "kernel internal consistency", Duration::from_secs(120), crit7),
        (8, "kernel convergence", Duration::from_secs(600), crit8),
        (9, "Brownian kernel", Duration::from_secs(60), crit9),
        (10, "extended Airy kernel", Duration::from_secs(60), crit10),
        (11, "first-intensity match", Duration::from_secs(600), crit11),
        (12, "top curve is Brownian", Duration::from_secs(900), crit12),
        (13, "bottom curve self-consistency", Duration::from_secs(1200), crit13),
        (14, "Gibbs property", Duration::from_secs(120), crit14),
    ];
    let filter: Vec<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut passed = 0;
    let mut ran = 0;
    let mut broken = false;
    for (id, name, budget, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let out = f();
        let dt = t0.elapsed();
        let (ok, detail) = match out {
            Ok((ok, d)) => (ok && dt < budget, d),
            Err(msg) => {
                broken = true;
                (false, format!("error: {msg}"))
            }
        };
        if ok {
            passed += 1;
        }
        println!(
            "criterion {id:>2} {} {name}: {detail} [{:.1} s, budget {} s]",
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    if broken {
        std::process::exit(1);
    }
}
