use alloc::format;
use alloc::vec::Vec;
use libm::exp;
use num_complex::Complex64 as C;

use super::{Kernel2x2, INV_TWO_PI_I_SQ};
use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::lpp::GeomParams;
use crate::quad::double_integral;

const GEO_TOL: f64 = 1e-11;
const PEAK_SAMPLES: usize = 96;
const GRID: usize = 40;

/// Circle radii `(z, w)` for each of the three integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoRadii {
    pub r11: (f64, f64),
    pub r12: (f64, f64),
    pub r22: (f64, f64),
}

struct Setup {
    q: f64,
    c: f64,
    n: f64,
}

impl Setup {
    fn log_n(&self, z: C) -> C {
        (C::new(1.0, 0.0) - self.q / z).ln() * self.n
    }

    fn log_m(&self, z: C, m: f64) -> C {
        (C::new(1.0, 0.0) - self.q * z).ln() * m
    }

    /// Log of the `z` factor of `K11`.
    fn a11(&self, z: C, x: i64, m: f64) -> C {
        let one = C::new(1.0, 0.0);
        (one - self.c / z).ln() - z.ln() * x as f64 + self.log_n(z) - self.log_m(z, m) - (z * z - one).ln()
    }

    /// Log of the `z` factor of `K12`.
    fn a12(&self, z: C, x: i64, m: f64) -> C {
        let one = C::new(1.0, 0.0);
        (z - self.c).ln() - z.ln() * (x + 1) as f64 + self.log_n(z) - self.log_m(z, m) - (z * z - one).ln()
    }

    /// Log of the `w` factor of `K12`.
    fn b12(&self, w: C, y: i64, m: f64) -> C {
        w.ln() * y as f64 - self.log_n(w) + self.log_m(w, m) - (w - self.c).ln()
    }

    /// Log of either factor of `K22`.
    fn a22(&self, z: C, x: i64, m: f64) -> C {
        z.ln() * x as f64 - self.log_n(z) + self.log_m(z, m) - (z - self.c).ln()
    }
}

fn peak<F: Fn(C) -> C>(r: f64, f: &F) -> f64 {
    (0..PEAK_SAMPLES)
        .map(|j| {
            let th = core::f64::consts::PI * (2.0 * j as f64 + 1.0) / PEAK_SAMPLES as f64 - core::f64::consts::PI;
            f(C::from_polar(r, th)).re
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn grid(lo: f64, hi: f64) -> Vec<f64> {
    let m = 0.04 * (hi - lo);
    (0..GRID).map(|j| lo + m + (hi - lo - 2.0 * m) * j as f64 / (GRID - 1) as f64).collect()
}

fn best<F: Fn(C) -> C>(lo: f64, hi: f64, f: &F) -> f64 {
    grid(lo, hi)
        .into_iter()
        .map(|r| (r, peak(r, f)))
        .fold((lo, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
        .0
}

fn check_args(params: &GeomParams, n: usize, mu: usize, mv: usize) -> Result<()> {
    if n == 0 || mu == 0 || mv == 0 || mu > n || mv > n {
        return Err(Error::Domain(format!("need 1 <= M_u, M_v <= N (N={n}, M_u={mu}, M_v={mv})")));
    }
    if !(params.c > 0.0) {
        return Err(Error::Domain("kernel needs c > 0".into()));
    }
    Ok(())
}

fn auto_radii(params: &GeomParams, n: usize, mu: usize, mv: usize, x: i64, y: i64) -> GeoRadii {
    let s = Setup { q: params.q, c: params.c, n: n as f64 };
    let (q, c) = (params.q, params.c);
    let (fu, fv) = (mu as f64, mv as f64);
    let iq = 1.0 / q;
    let r11 = (best(1.0, iq, &|z| s.a11(z, x, fu)), best(1.0, iq, &|z| s.a11(z, y, fv)));
    let lo2 = c.max(q).max(1.0);
    let r22 = (best(lo2, 3.0 * iq, &|z| s.a22(z, x, fu)), best(lo2, 3.0 * iq, &|z| s.a22(z, y, fv)));
    let lw = c.max(q);
    let (zlo, zhi) = (1.0f64.max(if mu <= mv { lw } else { 0.0 }), iq);
    let zs: Vec<(f64, f64)> = grid(zlo, zhi).into_iter().map(|r| (r, peak(r, &|z| s.a12(z, x, fu)))).collect();
    let (wlo, whi) = if mu <= mv { (lw, iq) } else { (lw.max(1.0), 3.0 * iq) };
    let ws: Vec<(f64, f64)> = grid(wlo, whi).into_iter().map(|r| (r, peak(r, &|w| s.b12(w, y, fv)))).collect();
    let mut r12 = (0.5 * (zlo + zhi), 0.5 * (wlo + zlo));
    let mut obj = f64::INFINITY;
    for &(rz, pz) in &zs {
        for &(rw, pw) in &ws {
            let gap = if mu <= mv { rz - rw } else { rw - rz };
            if gap <= 0.0 {
                continue;
            }
            let o = pz + pw - libm::log(gap);
            if o < obj {
                obj = o;
                r12 = (rz, rw);
            }
        }
    }
    GeoRadii { r11, r12, r22 }
}

fn check_radii(params: &GeomParams, mu: usize, mv: usize, r: &GeoRadii) -> Result<()> {
    let (q, c) = (params.q, params.c);
    let iq = 1.0 / q;
    let bad = |what: &str| Err(Error::Admissibility(format!("radius window violated: {what}")));
    for &v in &[r.r11.0, r.r11.1] {
        if !(v > 1.0 && v < iq) {
            return bad("r1 must lie in (1, 1/q)");
        }
    }
    let (rz, rw) = r.r12;
    if !(rz > 1.0 && rz < iq) {
        return bad("r12^z must lie in (1, 1/q)");
    }
    if !(rw > c.max(q)) {
        return bad("r12^w must exceed max(c, q)");
    }
    if mu <= mv && !(rw < rz) {
        return bad("r12^w < r12^z is required when M_u <= M_v");
    }
    if mu > mv && !(rz < rw) {
        return bad("r12^z < r12^w is required when M_u > M_v");
    }
    for &v in &[r.r22.0, r.r22.1] {
        if !(v > c.max(q).max(1.0)) {
            return bad("r2 must exceed max(c, q, 1)");
        }
    }
    Ok(())
}

/// Envelope peaks are shifted out before integrating and restored after.
fn shifted_double<A, B, K>(rz: f64, rw: f64, la: A, lb: B, k: K) -> Result<(C, f64)>
where
    A: Fn(C) -> C,
    B: Fn(C) -> C,
    K: Fn(C, C) -> C,
{
    let (sa, sb) = (peak(rz, &la), peak(rw, &lb));
    let cz = Contour::circle(C::new(0.0, 0.0), rz);
    let cw = Contour::circle(C::new(0.0, 0.0), rw);
    let res = double_integral(&cz, &cw, |z| (la(z) - sa).exp(), |w| (lb(w) - sb).exp(), k, GEO_TOL).map_err(|e| match e {
        Error::Quadrature { msg, estimate, err } => Error::Quadrature { msg: format!("{msg} (radii {rz}, {rw})"), estimate, err },
        o => o,
    })?;
    let f = exp(sa + sb) * INV_TWO_PI_I_SQ;
    Ok((res.value * f, res.err * f.abs()))
}

fn k12_entry(s: &Setup, r: (f64, f64), mu: usize, mv: usize, x: i64, y: i64) -> Result<(C, f64)> {
    let one = C::new(1.0, 0.0);
    shifted_double(
        r.0,
        r.1,
        |z| s.a12(z, x, mu as f64),
        |w| s.b12(w, y, mv as f64),
        |z, w| (z * w - one) / (z - w),
    )
}

/// Entries `[k11, k12, k21, k22]` with their individual error estimates.
pub(crate) fn geo_entries(
    params: GeomParams,
    n: usize,
    mu: usize,
    mv: usize,
    x: i64,
    y: i64,
    radii: GeoRadii,
) -> Result<([C; 4], [f64; 4])> {
    let s = Setup { q: params.q, c: params.c, n: n as f64 };
    let one = C::new(1.0, 0.0);
    let (k11, e11) = shifted_double(
        radii.r11.0,
        radii.r11.1,
        |z| s.a11(z, x, mu as f64),
        |w| s.a11(w, y, mv as f64),
        |z, w| (z - w) / (z * w - one),
    )?;
    let (k12, e12) = k12_entry(&s, radii.r12, mu, mv, x, y)?;
    let swapped = auto_radii(&params, n, mv, mu, y, x).r12;
    let (k12s, e21) = k12_entry(&s, swapped, mv, mu, y, x)?;
    let (k22, e22) = shifted_double(
        radii.r22.0,
        radii.r22.1,
        |z| s.a22(z, x, mu as f64),
        |w| s.a22(w, y, mv as f64),
        |z, w| (z - w) / (z * w - one),
    )?;
    Ok(([k11, k12, -k12s, k22], [e11, e12, e21, e22]))
}

/// `K^geo` at `(M_u, x; M_v, y)` with explicitly chosen circle radii.
pub fn kernel_geo_with_radii(
    params: GeomParams,
    n: usize,
    mu: usize,
    mv: usize,
    x: i64,
    y: i64,
    radii: GeoRadii,
) -> Result<Kernel2x2> {
    check_args(&params, n, mu, mv)?;
    check_radii(&params, mu, mv, &radii)?;
    let (k, e) = geo_entries(params, n, mu, mv, x, y, radii)?;
    Ok(Kernel2x2 { k11: k[0], k12: k[1], k21: k[2], k22: k[3], err: e.iter().fold(0.0, |m, &v| m.max(v)) })
}

pub(crate) fn kernel_geo_entries(
    params: GeomParams,
    n: usize,
    mu: usize,
    mv: usize,
    x: i64,
    y: i64,
) -> Result<([C; 4], [f64; 4])> {
    check_args(&params, n, mu, mv)?;
    geo_entries(params, n, mu, mv, x, y, auto_radii(&params, n, mu, mv, x, y))
}

/// `K^geo` with radii chosen to minimise the peak of the integrand on each
/// circle within the admissible windows.
pub fn kernel_geo(params: GeomParams, n: usize, mu: usize, mv: usize, x: i64, y: i64) -> Result<Kernel2x2> {
    check_args(&params, n, mu, mv)?;
    let radii = auto_radii(&params, n, mu, mv, x, y);
    kernel_geo_with_radii(params, n, mu, mv, x, y, radii)
}
