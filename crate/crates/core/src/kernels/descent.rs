use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::sqrt;
use num_complex::Complex64 as C;

use crate::contour::{build_contour_c, Contour};
use crate::error::{Error, Result};
use crate::phase::PhaseSpec;
use crate::scaling::{BulkScaling, EdgeScaling};

/// Candidate wedge angles, as multiples of π, in search order.
pub const THETA_GRID: [f64; 20] = [
    0.45, 0.44, 0.43, 0.42, 0.41, 0.40, 0.39, 0.38, 0.37, 0.36, 0.35, 0.34, 0.33, 0.32, 0.31, 0.30, 0.29, 0.28,
    0.27, 0.26,
];

/// Wedge angle and outer radius of the large contours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaR {
    pub theta: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    /// Boundary parameter, needed by the two comparisons of `S1` and `S2`.
    pub c: f64,
    /// Wedge angle at the anchor.
    pub theta: f64,
    /// Sample count along the contour.
    pub grid: usize,
    /// Radius of the neighbourhood in which the local checks run.
    pub local_radius: f64,
    /// Points closer than this to the anchor are left to the local checks.
    pub exclusion: f64,
}

impl DescentOptions {
    pub fn new(c: f64, theta: f64, grid: usize) -> Self {
        DescentOptions { c, theta, grid, local_radius: 0.05, exclusion: 1e-3 }
    }
}

/// A sampled inequality that failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DescentViolation {
    /// `Re S̄ >= 0` away from the anchor on the contour.
    Global { z: C, value: f64 },
    /// `Re S̄ >= 0` on the wedge rays near the anchor.
    CritDecay { r: f64, value: f64 },
    /// `Re S̄1 <= 0` on the rays at angle `2π/3` near `z_c`.
    CritGrow { r: f64, value: f64 },
    /// `Re Ḡ >= 0` on the vertical rays near the anchor.
    CritDecayG { r: f64, value: f64 },
    /// `d/dθ Re S(R e^{iθ}) <= 0` on a circle `R <= z_c`.
    SmallCircleS { radius: f64, theta: f64, derivative: f64 },
    /// `d/dθ Re G(R e^{iθ}) >= 0`.
    SmallCircleG { radius: f64, theta: f64, derivative: f64 },
    /// `S1(z_c) - S1(c) >= 0`.
    DiffS { value: f64 },
    /// `S2(z_c) - S2(c) <= 0`.
    DiffS2 { value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentReport {
    pub samples: usize,
    pub max_re_s: f64,
    pub min_re_s: f64,
    pub max_re_g: f64,
    pub min_re_g: f64,
    /// `S1(z_c) - S1(c)`.
    pub diff_s: f64,
    /// `S2(z_c) - S2(c)`.
    pub diff_s2: f64,
    pub violations: Vec<DescentViolation>,
}

impl DescentReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Number of failures of the global descent along the contour.
    pub fn global_violations(&self) -> usize {
        self.violations.iter().filter(|v| matches!(v, DescentViolation::Global { .. })).count()
    }
}

fn zc_of(q: f64, kappa: f64) -> f64 {
    let b = sqrt(kappa);
    (1.0 + q * b) / (q + b)
}

/// Samples `Re S̄`, `Re Ḡ` along `contour` and checks the local and global
/// sign conditions of the steepest-descent analysis for `spec`.
pub fn descent_report(spec: &PhaseSpec, contour: &Contour, opts: &DescentOptions) -> DescentReport {
    let mut v = Vec::new();
    let pc = C::new(spec.pc, 0.0);
    let (s0, g0) = (spec.s_critical(), spec.g_critical());
    let re_s = |z: C| spec.s(z).re - s0;
    let re_g = |z: C| spec.g(z).re - g0;
    let pts = contour.sample(opts.grid);
    let (mut smax, mut smin, mut gmax, mut gmin) = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for &z in &pts {
        let (a, b) = (re_s(z), re_g(z));
        smax = smax.max(a);
        smin = smin.min(a);
        gmax = gmax.max(b);
        gmin = gmin.min(b);
        if (z - pc).norm() >= opts.exclusion && !(a < 0.0) {
            v.push(DescentViolation::Global { z, value: a });
        }
    }
    let zc = zc_of(spec.q, spec.kappa);
    let at_zc = (spec.pc - zc).abs() < 1e-9;
    let steps = 64;
    for j in 1..=steps {
        let r = opts.local_radius * j as f64 / steps as f64;
        for sgn in [1.0, -1.0] {
            let a = re_s(pc + C::from_polar(r, sgn * opts.theta));
            if !(a < 0.0) {
                v.push(DescentViolation::CritDecay { r, value: a });
            }
            if at_zc {
                let g = re_s(pc + C::from_polar(r, sgn * 2.0 * PI / 3.0));
                if !(g > 0.0) {
                    v.push(DescentViolation::CritGrow { r, value: g });
                }
            }
            let d = re_g(pc + C::from_polar(r, sgn * PI / 2.0));
            if !(d < 0.0) {
                v.push(DescentViolation::CritDecayG { r, value: d });
            }
        }
    }
    let i = C::new(0.0, 1.0);
    let nth = 96;
    for k in 1..=24 {
        let radius = zc * k as f64 / 24.0;
        if (radius - spec.q).abs() < 1e-9 {
            continue;
        }
        for j in 1..nth {
            let th = PI * j as f64 / nth as f64;
            let z = C::from_polar(radius, th);
            let d = (spec.s_derivative(z, 1) * i * z).re;
            if !(d > 0.0) {
                v.push(DescentViolation::SmallCircleS { radius, theta: th, derivative: d });
            }
        }
    }
    for k in 0..32 {
        let radius = 0.05 * libm::pow(80.0 / spec.q, k as f64 / 31.0);
        if (radius * spec.q - 1.0).abs() < 1e-9 {
            continue;
        }
        for j in 1..nth {
            let th = PI * j as f64 / nth as f64;
            let z = C::from_polar(radius, th);
            let d = (spec.g_derivative(z, 1) * i * z).re;
            if !(d < 0.0) {
                v.push(DescentViolation::SmallCircleG { radius, theta: th, derivative: d });
            }
        }
    }
    let (diff_s, diff_s2) = match (BulkScaling::new(spec.q, opts.c, spec.kappa), EdgeScaling::new(spec.q, opts.c)) {
        (Ok(b), Ok(e)) => {
            let s1 = PhaseSpec::bulk(&b);
            let s2 = PhaseSpec::edge(&e, spec.kappa);
            let (z, c) = (C::new(b.zc, 0.0), C::new(opts.c, 0.0));
            (s1.s(z).re - s1.s(c).re, s2.s(z).re - s2.s(c).re)
        }
        _ => (f64::NAN, f64::NAN),
    };
    if !(diff_s < 0.0) {
        v.push(DescentViolation::DiffS { value: diff_s });
    }
    if !(diff_s2 > 0.0) {
        v.push(DescentViolation::DiffS2 { value: diff_s2 });
    }
    DescentReport {
        samples: pts.len(),
        max_re_s: smax,
        min_re_s: smin,
        max_re_g: gmax,
        min_re_g: gmin,
        diff_s,
        diff_s2,
        violations: v,
    }
}

/// Searches `θ0` over [`THETA_GRID`] and `R0` upward from `1/q + 0.5` until
/// both `S̄1` on `C(z_c, θ0, R0, 0)` and `S̄2` on `C(c, θ0, R0, 0)` pass
/// [`descent_report`] with `grid` samples.
pub fn search_theta_r(q: f64, c: f64, kappa: f64, grid: usize) -> Result<ThetaR> {
    let b = BulkScaling::new(q, c, kappa)?;
    let e = EdgeScaling::new(q, c)?;
    let s1 = PhaseSpec::bulk(&b);
    let s2 = PhaseSpec::edge(&e, kappa);
    for k in 0..20 {
        let r = 1.0 / q + 0.5 * (k + 1) as f64;
        for &tf in &THETA_GRID {
            let theta = tf * PI;
            let opts = DescentOptions::new(c, theta, grid);
            let (Ok(c1), Ok(c2)) = (build_contour_c(b.zc, theta, r, 0.0), build_contour_c(c, theta, r, 0.0)) else {
                continue;
            };
            if descent_report(&s1, &c1, &opts).ok() && descent_report(&s2, &c2, &opts).ok() {
                return Ok(ThetaR { theta, r });
            }
        }
    }
    Err(Error::Admissibility(format!("no (θ0, R0) passes the descent checks at (q, κ, c) = ({q}, {kappa}, {c})")))
}
