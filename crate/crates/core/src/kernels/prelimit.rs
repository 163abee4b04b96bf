use alloc::format;
use libm::{cos, floor, log, pow, round, sqrt};
use num_complex::Complex64 as C;

use super::descent::ThetaR;
use super::geo::kernel_geo_entries;
use super::{Kernel2x2, INV_TWO_PI_I, INV_TWO_PI_I_SQ};
use crate::contour::{build_contour_c, Contour};
use crate::error::{Error, Result};
use crate::lpp::GeomParams;
use crate::phase::PhaseSpec;
use crate::quad::{adapt, double_integral};
use crate::scaling::{BulkScaling, EdgeScaling};

const PRELIMIT_TOL: f64 = 1e-11;
const SHIFT_SAMPLES: usize = 400;

/// A scaled point in Schur coordinates: row `M`, lattice value `x̃`, and the
/// log of its conjugation factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub m: i64,
    pub xt: f64,
    pub ell: f64,
}

/// `Γ` (for `z`), `γ` (for `w`) and `γ̃` (residue contour).
#[derive(Debug, Clone, PartialEq)]
pub struct PrelimitContours {
    pub big_gamma: Contour,
    pub gamma: Contour,
    pub gamma_tilde: Contour,
}

fn fail(what: &str) -> Error {
    Error::Admissibility(format!("contour nesting violated: {what}"))
}

fn wind_is(c: &Contour, a: f64, k: f64) -> bool {
    (c.winding_number(C::new(a, 0.0)) - k).abs() < 1e-6
}

fn check_nesting(q: f64, c: f64, pc: &PrelimitContours, gammas: &[&Contour]) -> Result<()> {
    let g = &pc.big_gamma;
    if !(wind_is(g, 0.0, 1.0) && wind_is(g, 1.0, 1.0) && wind_is(g, -1.0, 1.0)) {
        return Err(fail("Γ must enclose 0 and ±1"));
    }
    if !wind_is(g, 1.0 / q, 0.0) {
        return Err(fail("Γ must not enclose 1/q"));
    }
    let t = &pc.gamma_tilde;
    if !(wind_is(t, 0.0, 1.0) && wind_is(t, 1.0 / q, 0.0)) {
        return Err(fail("γ̃ must enclose 0 and exclude 1/q"));
    }
    let zmin = g.min_abs(SHIFT_SAMPLES * 10);
    for w in gammas {
        if !(wind_is(w, 0.0, 1.0) && wind_is(w, q, 1.0) && wind_is(w, c, 0.0)) {
            return Err(fail("γ must enclose 0 and q but not c"));
        }
        let wmin = w.min_abs(SHIFT_SAMPLES * 10);
        if !(wmin > 1.0) {
            return Err(fail(&format!("min |w| on γ is {wmin}, not > 1")));
        }
        let wmax = w.max_abs(SHIFT_SAMPLES * 10);
        if !(wmax < zmin) {
            return Err(fail(&format!("max |w| on γ is {wmax}, not < min |z| on Γ = {zmin}")));
        }
    }
    Ok(())
}

fn check_big_r(q: f64, tr: ThetaR) -> Result<()> {
    if !(tr.r > 1.0 / q) {
        return Err(Error::Domain(format!("R0 = {} must exceed 1/q", tr.r)));
    }
    if !(tr.theta > core::f64::consts::FRAC_PI_4 && tr.theta < core::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("θ0 = {} must lie in (π/4, π/2)", tr.theta)));
    }
    Ok(())
}

fn adm<T>(r: Result<T>, what: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Domain(m) => Error::Admissibility(format!("{what}: {m}")),
        other => other,
    })
}

/// Bulk contours `Γ_N = C(z_c, θ0, R0, sec θ0 N^{-1/3})`,
/// `γ_N = C(z_c, 2π/3, ρ, 0)` with `ρ² = z_c² + N^{-1/6} - z_c N^{-1/12}`,
/// and `γ̃_N = C(z_c, π/2, √(z_c² + N^{-1/6}), 0)`.
pub fn build_bulk_contours(b: &BulkScaling, n: usize, tr: ThetaR) -> Result<PrelimitContours> {
    check_big_r(b.q, tr)?;
    let nf = n as f64;
    let zc = b.zc;
    let big_gamma = adm(build_contour_c(zc, tr.theta, tr.r, pow(nf, -1.0 / 3.0) / cos(tr.theta)), "Γ_N")?;
    let rho = sqrt(zc * zc + pow(nf, -1.0 / 6.0) - zc * pow(nf, -1.0 / 12.0));
    let gamma = adm(build_contour_c(zc, 2.0 * core::f64::consts::FRAC_PI_3, rho, 0.0), "γ_N")?;
    let gamma_tilde = adm(
        build_contour_c(zc, core::f64::consts::FRAC_PI_2, sqrt(zc * zc + pow(nf, -1.0 / 6.0)), 0.0),
        "γ̃_N",
    )?;
    let pc = PrelimitContours { big_gamma, gamma, gamma_tilde };
    check_nesting(b.q, b.c, &pc, &[&pc.gamma])?;
    Ok(pc)
}

/// Edge contours `Γ_{s,N} = C(c, θ0, R0, sec θ0 N^{-1/2})`, `γ_s` the circle
/// of radius `z_c(s)`, and `γ̃_N = C(c, π/2, √(c² + N^{-1/6}), 0)`.
pub fn build_edge_contours(e: &EdgeScaling, n: usize, s: f64, tr: ThetaR) -> Result<PrelimitContours> {
    check_big_r(e.q, tr)?;
    e.check_time(s)?;
    let nf = n as f64;
    let c = e.c;
    let big_gamma = adm(build_contour_c(c, tr.theta, tr.r, pow(nf, -0.5) / cos(tr.theta)), "Γ_{s,N}")?;
    let gamma = Contour::circle(C::new(0.0, 0.0), BulkScaling::new(e.q, c, s)?.zc);
    let gamma_tilde =
        adm(build_contour_c(c, core::f64::consts::FRAC_PI_2, sqrt(c * c + pow(nf, -1.0 / 6.0)), 0.0), "γ̃_N")?;
    let pc = PrelimitContours { big_gamma, gamma, gamma_tilde };
    check_nesting(e.q, c, &pc, &[&pc.gamma])?;
    Ok(pc)
}

fn check_row(m: i64, n: usize) -> Result<()> {
    if m < 1 || m > n as i64 {
        return Err(Error::Domain(format!("row M = {m} outside [1, {n}]")));
    }
    Ok(())
}

/// Bulk frame: `M = ⌊κN⌋ + T_t`, `x̃ = h1 N + p1 T_t + P x`,
/// `ℓ = P x ln z_c - T_t G1(z_c) - N S1(z_c)`, `P = σ1 z_c N^{1/3}`.
fn bulk_point(b: &BulkScaling, n: usize, t: f64, x: f64) -> Result<FramePoint> {
    let nf = n as f64;
    let tt = b.time_shift(n, t) as f64;
    let m = b.row(n, t);
    check_row(m, n)?;
    let p = b.sigma1 * b.zc * pow(nf, 1.0 / 3.0);
    let ph = PhaseSpec::bulk(b);
    let ell = p * x * log(b.zc) - tt * ph.g_critical() - nf * ph.s_critical();
    Ok(FramePoint { m, xt: b.h1 * nf + b.p1 * tt + p * x, ell })
}

/// Edge frame: `M = ⌊sN⌋`, `x̃ = h2(s) N + Q x`,
/// `ℓ = Q x ln c - N S2(s, c) - ε ln(1 - qc)`, `ε = sN - ⌊sN⌋`, `Q = σ2 √N`.
fn edge_point(e: &EdgeScaling, n: usize, s: f64, x: f64) -> Result<FramePoint> {
    let nf = n as f64;
    let m = floor(s * nf) as i64;
    check_row(m, n)?;
    let eps = s * nf - m as f64;
    let qq = e.sigma2 * sqrt(nf);
    let ph = PhaseSpec::edge(e, s);
    let ell = qq * x * log(e.c) - nf * ph.s_critical() - eps * log(1.0 - e.q * e.c);
    Ok(FramePoint { m, xt: e.h2(s) * nf + qq * x, ell })
}

struct Frame {
    q: f64,
    c: f64,
    n: f64,
    pref: f64,
}

impl Frame {
    fn phi(&self, p: &FramePoint, z: C) -> C {
        let one = C::new(1.0, 0.0);
        (one - self.q / z).ln() * self.n - (one - self.q * z).ln() * p.m as f64 - z.ln() * p.xt + p.ell
    }

    fn phi_diff(&self, ps: &FramePoint, pt: &FramePoint, z: C) -> C {
        let one = C::new(1.0, 0.0);
        (one - self.q * z).ln() * (pt.m - ps.m) as f64 + z.ln() * (pt.xt - ps.xt) + (ps.ell - pt.ell)
    }
}

fn shift_of<F: Fn(C) -> C>(c: &Contour, f: &F) -> f64 {
    let m = c.sample(SHIFT_SAMPLES).into_iter().map(|z| f(z).re).fold(f64::NEG_INFINITY, f64::max);
    if m.is_finite() {
        m
    } else {
        0.0
    }
}

fn double<A, B, K>(cz: &Contour, cw: &Contour, la: A, lb: B, k: K) -> Result<(C, f64)>
where
    A: Fn(C) -> C,
    B: Fn(C) -> C,
    K: Fn(C, C) -> C,
{
    let (sa, sb) = (shift_of(cz, &la), shift_of(cw, &lb));
    let r = double_integral(cz, cw, |z| (la(z) - sa).exp(), |w| (lb(w) - sb).exp(), k, PRELIMIT_TOL)?;
    let f = libm::exp(sa + sb) * INV_TWO_PI_I_SQ;
    Ok((r.value * f, r.err * f.abs()))
}

fn single<F: Fn(C) -> C>(c: &Contour, lf: F) -> Result<(C, f64)> {
    let s = shift_of(c, &lf);
    let g = |z: C| (lf(z) - s).exp();
    let (_, r) = adapt(c, &g, PRELIMIT_TOL, 8)?;
    let f = libm::exp(s);
    Ok((r.value * f * INV_TWO_PI_I, r.err * f))
}

/// `I12 + R12` for the ordered pair `(s, t)`, with `z` on `Γ_s`, `w` on `γ_t`.
fn k12_pair(fr: &Frame, ps: &FramePoint, pt: &FramePoint, gs: &Contour, wt: &Contour, tilde: &Contour) -> Result<(C, f64)> {
    let one = C::new(1.0, 0.0);
    let c = fr.c;
    let (i12, e1) = double(
        gs,
        wt,
        |z| fr.phi(ps, z) + (z - c).ln() - z.ln() - (z * z - one).ln(),
        |w| -fr.phi(pt, w) - (w - c).ln(),
        |z, w| (z * w - one) / (z - w),
    )?;
    let phi_tc = fr.phi(pt, C::new(c, 0.0));
    let (rb, e2) = single(gs, |z| fr.phi(ps, z) - phi_tc + (z * c - one).ln() - z.ln() - (z * z - one).ln())?;
    let mut total = i12 + rb;
    let mut err = e1 + e2;
    if ps.m > pt.m {
        let (ra, e3) = single(tilde, |z| fr.phi_diff(ps, pt, z) - z.ln())?;
        total -= ra;
        err += e3;
    }
    Ok((total * fr.pref, err * fr.pref))
}

fn assemble(
    fr: &Frame,
    ps: &FramePoint,
    pt: &FramePoint,
    cs: &PrelimitContours,
    ct: &PrelimitContours,
) -> Result<Kernel2x2> {
    let one = C::new(1.0, 0.0);
    let c = fr.c;
    let cc = C::new(c, 0.0);
    let (i11, e11) = double(
        &cs.big_gamma,
        &ct.big_gamma,
        |z| fr.phi(ps, z) + (one - c / z).ln() - (z * z - one).ln(),
        |w| fr.phi(pt, w) + (one - c / w).ln() - (w * w - one).ln(),
        |z, w| (z - w) / (z * w - one),
    )?;
    let (k12, e12) = k12_pair(fr, ps, pt, &cs.big_gamma, &ct.gamma, &cs.gamma_tilde)?;
    let (k12t, e21) = k12_pair(fr, pt, ps, &ct.big_gamma, &cs.gamma, &cs.gamma_tilde)?;
    let (i22, e22) = double(
        &cs.gamma,
        &ct.gamma,
        |z| -fr.phi(ps, z) - (z - c).ln(),
        |w| -fr.phi(pt, w) - (w - c).ln(),
        |z, w| (z - w) / (z * w - one),
    )?;
    let phi_sc = fr.phi(ps, cc);
    let phi_tc = fr.phi(pt, cc);
    let (ra, ea) = single(&cs.gamma, |z| -fr.phi(ps, z) - phi_tc - (cc * z - one).ln())?;
    let (rb, eb) = single(&ct.gamma, |w| -phi_sc - fr.phi(pt, w) - (cc * w - one).ln())?;
    Ok(Kernel2x2 {
        k11: i11 * fr.pref,
        k12,
        k21: -k12t,
        k22: (i22 + ra - rb) * fr.pref,
        err: (e11 * fr.pref).max(e12).max(e21).max((e22 + ea + eb) * fr.pref),
    })
}

/// Prelimit kernel of the bulk frame at `(s, x; t, y)`.
///
/// Arguments on the scaled lattice give the exact kernel of the rescaled
/// point process; elsewhere `z^{-x̃}` is taken on the principal branch.
pub fn kernel_bulk_n(b: &BulkScaling, n: usize, s: f64, x: f64, t: f64, y: f64, tr: ThetaR) -> Result<Kernel2x2> {
    let ps = bulk_point(b, n, s, x)?;
    let pt = bulk_point(b, n, t, y)?;
    let cs = build_bulk_contours(b, n, tr)?;
    let fr = Frame { q: b.q, c: b.c, n: n as f64, pref: b.sigma1 * b.zc * pow(n as f64, 1.0 / 3.0) };
    assemble(&fr, &ps, &pt, &cs, &cs)
}

/// Prelimit kernel of the edge frame at `(s, x; t, y)`.
pub fn kernel_edge_n(e: &EdgeScaling, n: usize, s: f64, x: f64, t: f64, y: f64, tr: ThetaR) -> Result<Kernel2x2> {
    let ps = edge_point(e, n, s, x)?;
    let pt = edge_point(e, n, t, y)?;
    let cs = build_edge_contours(e, n, s, tr)?;
    let ct = build_edge_contours(e, n, t, tr)?;
    let fr = Frame { q: e.q, c: e.c, n: n as f64, pref: e.sigma2 * sqrt(n as f64) };
    assemble(&fr, &ps, &pt, &cs, &ct)
}

fn conjugate(q: f64, c: f64, n: usize, pref: f64, ps: FramePoint, pt: FramePoint) -> Result<Kernel2x2> {
    let lattice = |p: &FramePoint| -> Result<i64> {
        let k = round(p.xt);
        if (p.xt - k).abs() > 1e-6 {
            return Err(Error::Domain(format!("x̃ = {} is not on the lattice", p.xt)));
        }
        Ok(k as i64)
    };
    let (x, y) = (lattice(&ps)?, lattice(&pt)?);
    let (g, ge) = kernel_geo_entries(GeomParams::new(q, c)?, n, ps.m as usize, pt.m as usize, x, y)?;
    let e = libm::exp;
    let (a, b) = (ps.ell, pt.ell);
    let f = [e(a + b), e(a - b), e(b - a), e(-a - b)];
    let err = (0..4).map(|i| ge[i] * pref * f[i]).fold(0.0f64, f64::max);
    Ok(Kernel2x2 { k11: g[0] * pref * f[0], k12: g[1] * pref * f[1], k21: g[2] * pref * f[2], k22: g[3] * pref * f[3], err })
}

/// Bulk prelimit kernel obtained by conjugating `K^geo`; lattice points only.
pub fn kernel_bulk_n_via_geo(b: &BulkScaling, n: usize, s: f64, x: f64, t: f64, y: f64) -> Result<Kernel2x2> {
    let ps = bulk_point(b, n, s, x)?;
    let pt = bulk_point(b, n, t, y)?;
    conjugate(b.q, b.c, n, b.sigma1 * b.zc * pow(n as f64, 1.0 / 3.0), ps, pt)
}

/// Edge prelimit kernel obtained by conjugating `K^geo`; lattice points only.
pub fn kernel_edge_n_via_geo(e: &EdgeScaling, n: usize, s: f64, x: f64, t: f64, y: f64) -> Result<Kernel2x2> {
    e.check_time(s)?;
    e.check_time(t)?;
    let ps = edge_point(e, n, s, x)?;
    let pt = edge_point(e, n, t, y)?;
    conjugate(e.q, e.c, n, e.sigma2 * sqrt(n as f64), ps, pt)
}

