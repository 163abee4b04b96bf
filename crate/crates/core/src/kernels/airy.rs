use alloc::format;
use core::f64::consts::PI;
use libm::{exp, sqrt};
use num_complex::Complex64 as C;

use super::INV_TWO_PI_I_SQ;
use crate::contour::{wedge_rays, wedge_rays_chord, Contour};
use crate::error::{Error, Result};
use crate::quad::double_integral;

const AIRY_TOL: f64 = 1e-11;
/// `ln(1e-16)` below the running peak.
const RAY_DROP: f64 = 36.85;

/// Real anchors of the `z` and `w` wedges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryAnchors {
    pub alpha: f64,
    pub beta: f64,
}

impl AiryAnchors {
    pub fn default_for(t1: f64, t2: f64) -> Self {
        let alpha = 0.5f64.max(0.5 * (t2 - t1) + 0.5);
        AiryAnchors { alpha, beta: -alpha }
    }
}

/// Distance along `a + ρ e^{iφ}` past which `lf` stays `RAY_DROP` below its peak.
fn ray_length<F: Fn(C) -> f64>(a: C, phi: f64, lf: &F) -> f64 {
    let dir = C::from_polar(1.0, phi);
    let mut top = lf(a).max(lf(a + dir.conj() * 1e-3));
    let mut rho = 0.0;
    while rho < 80.0 {
        rho += 0.125;
        let v = lf(a + dir * rho).max(lf(a + dir.conj() * rho));
        top = top.max(v);
        if v < top - RAY_DROP && rho > 1.0 {
            return rho;
        }
    }
    rho
}

fn heat(dt: f64, dx: f64) -> f64 {
    exp(-dx * dx / (4.0 * dt)) / sqrt(4.0 * PI * dt)
}

/// Extended Airy kernel with explicit anchors (`α + t1 > β + t2`).
pub fn airy_kernel_ext_with(t1: f64, x1: f64, t2: f64, x2: f64, an: AiryAnchors) -> Result<f64> {
    if !(an.alpha + t1 > an.beta + t2) {
        return Err(Error::Domain(format!("anchors need α + t1 > β + t2 (α={}, β={})", an.alpha, an.beta)));
    }
    let la = |z: C| z * z * z / 3.0 - x1 * z;
    let lb = |w: C| -w * w * w / 3.0 + x2 * w;
    let za = C::new(an.alpha, 0.0);
    let wb = C::new(an.beta, 0.0);
    let lz = ray_length(za, PI / 3.0, &|z| la(z).re);
    let lw = ray_length(wb, 2.0 * PI / 3.0, &|w| lb(w).re);
    let cz = wedge_rays(za, PI / 3.0, lz);
    let cw = wedge_rays(wb, 2.0 * PI / 3.0, lw);
    let d = t1 - t2;
    let r = double_integral(&cz, &cw, |z| la(z).exp(), |w| lb(w).exp(), |z, w| (z - w + d).inv(), AIRY_TOL)?;
    let mut v = r.value.re * INV_TWO_PI_I_SQ;
    if t2 > t1 {
        let dt = t2 - t1;
        v -= exp(-(x2 - x1) * (x2 - x1) / (4.0 * dt) - dt * (x2 + x1) / 2.0 + dt * dt * dt / 12.0)
            / sqrt(4.0 * PI * dt);
    }
    Ok(v)
}

/// Extended Airy kernel `K^Airy(t1, x1; t2, x2)`.
pub fn airy_kernel_ext(t1: f64, x1: f64, t2: f64, x2: f64) -> Result<f64> {
    airy_kernel_ext_with(t1, x1, t2, x2, AiryAnchors::default_for(t1, t2))
}

/// Brownian kernel `K^BM(s, x; t, y)`.
pub fn kbm(s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("K^BM needs s, t > 0 (s={s}, t={t})")));
    }
    let mut v = exp(-x * x / (2.0 * s)) / sqrt(2.0 * PI * s);
    if s > t {
        let d = s - t;
        v -= exp(-(x - y) * (x - y) / (2.0 * d)) / sqrt(2.0 * PI * d);
    }
    Ok(v)
}

/// The 2×2 matrix `[K^BM(p_i; p_j)]` at two points.
pub fn kbm_matrix(s: f64, x: f64, t: f64, y: f64) -> Result<[[f64; 2]; 2]> {
    Ok([[kbm(s, x, s, x)?, kbm(s, x, t, y)?], [kbm(t, y, s, x)?, kbm(t, y, t, y)?]])
}

/// Limit of the bulk `K12`, expressed through the extended Airy kernel.
pub fn limit_bulk_k12(s: f64, x: f64, t: f64, y: f64, f1: f64) -> Result<f64> {
    if !(f1 > 0.0) {
        return Err(Error::Domain(format!("f1 = {f1} must be positive")));
    }
    let f3 = f1 * f1 * f1;
    let a = exp(2.0 * f3 * s * s * s / 3.0 - 2.0 * f3 * t * t * t / 3.0 + f1 * s * x - f1 * t * y);
    Ok(a * airy_kernel_ext(-f1 * s, x + f1 * f1 * s * s, -f1 * t, y + f1 * f1 * t * t)?)
}

/// Limit of the bulk `K12` as a heat term plus a double integral over
/// `C_0^{θ0}[chord]` and `C_0^{2π/3}`, without passing through `K^Airy`.
pub fn limit_bulk_k12_alt(s: f64, x: f64, t: f64, y: f64, f1: f64, theta0: f64, chord: f64) -> Result<f64> {
    if !(f1 > 0.0 && chord > 0.0 && theta0 > PI / 4.0 && theta0 < PI / 2.0) {
        return Err(Error::Domain("need f1 > 0, chord > 0, θ0 in (π/4, π/2)".into()));
    }
    let la = |z: C| z * z * z / 3.0 + s * f1 * z * z - x * z;
    let lb = |w: C| -w * w * w / 3.0 - t * f1 * w * w + y * w;
    let o = C::new(0.0, 0.0);
    let up = C::from_polar(chord, theta0);
    let lz = ray_length(up, theta0, &|z| la(z).re) + chord;
    let lw = ray_length(o, 2.0 * PI / 3.0, &|w| lb(w).re);
    let cz: Contour = wedge_rays_chord(o, theta0, chord, lz);
    let cw = wedge_rays(o, 2.0 * PI / 3.0, lw);
    let r = double_integral(&cz, &cw, |z| la(z).exp(), |w| lb(w).exp(), |z, w| (z - w).inv(), AIRY_TOL)?;
    let mut v = r.value.re * INV_TWO_PI_I_SQ;
    if s > t {
        v -= heat(f1 * (s - t), y - x);
    }
    Ok(v)
}
