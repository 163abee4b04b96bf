//! Pfaffians and correlation functions of Pfaffian point processes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;
use num_complex::Complex64 as C;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::kernels::{kbm, Kernel2x2};
use crate::rng::normal;
use crate::scaling::LatticeSpec;

const SKEW_TOL: f64 = 1e-12;
const ASSEMBLY_TOL: f64 = 1e-8;
const COFACTOR_BELOW: usize = 10;

/// Dense skew-symmetric matrix of even dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    data: Vec<C>,
}

impl SkewMatrix {
    /// Checks even dimension and `A = -Aᵀ` to `1e-12` (relative to the largest entry).
    pub fn new(dim: usize, data: Vec<C>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Structure(format!("{} entries for a {dim}×{dim} matrix", data.len())));
        }
        if dim % 2 == 1 {
            return Err(Error::Structure(format!("odd dimension {dim}")));
        }
        let scale = data.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        for i in 0..dim {
            for j in i..dim {
                let d = (data[i * dim + j] + data[j * dim + i]).norm();
                if d > SKEW_TOL * scale {
                    return Err(Error::Structure(format!("not skew at ({i}, {j}): defect {d:e}")));
                }
            }
        }
        Ok(SkewMatrix { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.dim + j]
    }
}

fn pf_cofactor(a: &[C], idx: &[usize], dim: usize) -> C {
    match idx.len() {
        0 => C::new(1.0, 0.0),
        2 => a[idx[0] * dim + idx[1]],
        _ => {
            let first = idx[0];
            let mut total = C::new(0.0, 0.0);
            let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
            for (jj, &j) in idx.iter().enumerate().skip(1) {
                let v = a[first * dim + j];
                if v == C::new(0.0, 0.0) {
                    continue;
                }
                rest.clear();
                rest.extend(idx[1..].iter().copied().filter(|&k| k != j));
                let sign = if jj % 2 == 1 { 1.0 } else { -1.0 };
                total += v * pf_cofactor(a, &rest, dim) * sign;
            }
            total
        }
    }
}

fn pf_parlett_reid(mut a: Vec<C>, n: usize) -> C {
    let mut pf = C::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[k * n + k + 1].norm();
        for i in k + 2..n {
            let v = a[k * n + i].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for j in 0..n {
                a.swap((k + 1) * n + j, kp * n + j);
            }
            for i in 0..n {
                a.swap(i * n + k + 1, i * n + kp);
            }
            pf = -pf;
        }
        let piv = a[k * n + k + 1];
        if piv == C::new(0.0, 0.0) {
            return C::new(0.0, 0.0);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<C> = (k + 2..n).map(|i| a[k * n + i] / piv).collect();
            let row: Vec<C> = (k + 2..n).map(|i| a[(k + 1) * n + i]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[i * n + j] += tau[jj] * row[ii] - tau[ii] * row[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// `Pf(A)`: cofactor expansion below dimension 10, pivoted skew elimination
/// (Parlett–Reid) from 10 on.
pub fn pfaffian(a: &SkewMatrix) -> C {
    let n = a.dim;
    if n < COFACTOR_BELOW {
        let idx: Vec<usize> = (0..n).collect();
        pf_cofactor(&a.data, &idx, n)
    } else {
        pf_parlett_reid(a.data.clone(), n)
    }
}

/// Forces the elimination path regardless of size.
pub fn pfaffian_elimination(a: &SkewMatrix) -> C {
    pf_parlett_reid(a.data.clone(), a.dim)
}

/// A space-time point `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: f64,
}

/// Points of a configuration; repeated points count with multiplicity.
pub type PointConfig = Vec<Point>;

/// `ρ_k(p_1, …, p_k)`: Pfaffian of the `2k × 2k` matrix of blocks `K(p_i, p_j)`.
///
/// Each off-diagonal pair is evaluated in both orders and compared against
/// the antisymmetry `K(p_j, p_i) = -K(p_i, p_j)ᵀ`; diagonal blocks are
/// checked for skewness.
pub fn correlation_fn<F>(kernel: F, points: &[Point]) -> Result<(f64, f64)>
where
    F: Fn(Point, Point) -> Result<Kernel2x2>,
{
    let k = points.len();
    let dim = 2 * k;
    let mut m = vec![C::new(0.0, 0.0); dim * dim];
    let mut err = 0.0f64;
    let bad = |what: &str, d: f64| Err(Error::Structure(format!("kernel consistency: {what} off by {d:e}")));
    for i in 0..k {
        let d = kernel(points[i], points[i])?;
        err = err.max(d.err);
        let defect = d.k11.norm().max(d.k22.norm()).max((d.k21 + d.k12).norm());
        if defect > ASSEMBLY_TOL {
            return bad("diagonal block skewness", defect);
        }
        m[(2 * i) * dim + 2 * i + 1] = d.k12;
        m[(2 * i + 1) * dim + 2 * i] = -d.k12;
        for j in i + 1..k {
            let a = kernel(points[i], points[j])?;
            let b = kernel(points[j], points[i])?;
            err = err.max(a.err).max(b.err);
            let defect = (b.k11 + a.k11)
                .norm()
                .max((b.k12 + a.k21).norm())
                .max((b.k21 + a.k12).norm())
                .max((b.k22 + a.k22).norm());
            if defect > ASSEMBLY_TOL {
                return bad("antisymmetry K(q, p) = -K(p, q)ᵀ", defect);
            }
            for r in 0..2 {
                for c in 0..2 {
                    let v = a.entry(r + 1, c + 1);
                    m[(2 * i + r) * dim + 2 * j + c] = v;
                    m[(2 * j + c) * dim + 2 * i + r] = -v;
                }
            }
        }
    }
    let pf = pfaffian(&SkewMatrix { dim, data: m });
    if pf.im.abs() > ASSEMBLY_TOL * pf.norm().max(1.0) {
        return Err(Error::Structure(format!("correlation function has imaginary part {:e}", pf.im)));
    }
    Ok((pf.re, err))
}

/// Wraps a scalar determinantal kernel `K` as the Pfaffian kernel
/// `[[0, K(p, q)], [-K(q, p), 0]]`.
pub fn determinantal_block<F>(k: F) -> impl Fn(Point, Point) -> Result<Kernel2x2>
where
    F: Fn(Point, Point) -> Result<f64>,
{
    move |p, q| {
        let z = C::new(0.0, 0.0);
        Ok(Kernel2x2 { k11: z, k12: C::new(k(p, q)?, 0.0), k21: C::new(-k(q, p)?, 0.0), k22: z, err: 0.0 })
    }
}

/// Truncated lattice sum with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub terms: usize,
    pub truncation_bound: f64,
}

/// Stopping rule: 20 consecutive terms below `1e-14` of the running total.
pub const TAIL_RUN: usize = 20;
pub const TAIL_REL: f64 = 1e-14;
pub const TAIL_HARD_CAP: usize = 1_000_000;

/// `spacing × Σ_{x ∈ lattice, x ≥ a} k12(x, x)`, summed upward until
/// [`TAIL_RUN`] consecutive terms fall below [`TAIL_REL`] of the total or
/// `cap` terms are used.
pub fn first_intensity_tail<F>(k12_diag: F, lattice: LatticeSpec, a: f64, cap: usize) -> Result<TailSum>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(first_intensity_tails(k12_diag, lattice, &[a], cap)?[0])
}

/// [`first_intensity_tail`] at several thresholds from a single pass over
/// the lattice, starting at the lowest threshold.
pub fn first_intensity_tails<F>(k12_diag: F, lattice: LatticeSpec, thresholds: &[f64], cap: usize) -> Result<Vec<TailSum>>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lattice.spacing > 0.0) {
        return Err(Error::Domain(format!("lattice spacing {} must be positive", lattice.spacing)));
    }
    if thresholds.is_empty() || thresholds.iter().any(|a| !a.is_finite()) {
        return Err(Error::Domain("need at least one finite threshold".into()));
    }
    let cap = cap.min(TAIL_HARD_CAP);
    let lo = thresholds.iter().copied().fold(f64::INFINITY, f64::min);
    let k0 = lattice.first_at_or_above(lo);
    let mut vals: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut run = 0;
    let mut bound = f64::NAN;
    for j in 0..cap {
        let v = k12_diag(lattice.point(k0 + j as i64))?;
        total += v;
        vals.push(v);
        if v.abs() <= TAIL_REL * total.abs() || (v == 0.0 && total == 0.0) {
            run += 1;
        } else {
            run = 0;
        }
        if run >= TAIL_RUN {
            let (p, l) = (vals[j - 1].abs(), v.abs());
            let r = if p > 0.0 { l / p } else { 0.0 };
            bound = if r < 0.9 { l * r / (1.0 - r) } else { TAIL_RUN as f64 * TAIL_REL * total.abs() };
            break;
        }
    }
    if bound.is_nan() {
        return Err(Error::Truncation(format!("lattice sum from {lo} did not decay within {cap} terms (total {total})")));
    }
    let mut suffix = vec![0.0; vals.len() + 1];
    for j in (0..vals.len()).rev() {
        suffix[j] = suffix[j + 1] + vals[j];
    }
    Ok(thresholds
        .iter()
        .map(|&a| {
            let off = ((lattice.first_at_or_above(a) - k0) as usize).min(vals.len());
            TailSum {
                value: suffix[off] * lattice.spacing,
                terms: vals.len() - off,
                truncation_bound: bound * lattice.spacing,
            }
        })
        .collect())
}

/// Outcome of the Brownian determinantal check.
#[derive(Debug, Clone, PartialEq)]
pub struct BmCheckReport {
    pub n_samples: usize,
    /// Largest `|empirical - predicted| / SE` over one-point bins.
    pub max_z_one_point: f64,
    /// Largest `|empirical - predicted| / SE` over two-point bins.
    pub max_z_two_point: f64,
    /// `∫ ρ_1(t_1, x) dx` by quadrature.
    pub one_point_mass: f64,
}

fn bins(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| (lo + h * i as f64, lo + h * (i + 1) as f64)).collect()
}

fn gl_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (xs, ws) = ([-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6], [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9]);
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (0..4).map(|k| ws[k] * f(m + h * xs[k])).sum::<f64>() * h
}

fn gl_2d<F: Fn(f64, f64) -> f64>(f: F, (a, b): (f64, f64), (c, d): (f64, f64)) -> f64 {
    gl_integral(|x| gl_integral(|y| f(x, y), c, d), a, b)
}

/// Simulates standard Brownian motion at `times` and compares binned
/// one-point and two-point counts against the determinantal predictions of
/// `K^BM`.
pub fn bm_determinantal_check<R: RngCore>(times: &[f64], n_samples: usize, rng: &mut R) -> Result<BmCheckReport> {
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("times must satisfy 0 < t_1 < … < t_m".into()));
    }
    let m = times.len();
    let mut paths = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut b = 0.0;
        let mut prev = 0.0;
        let mut row = Vec::with_capacity(m);
        for &t in times {
            b += sqrt(t - prev) * normal(rng);
            prev = t;
            row.push(b);
        }
        paths.push(row);
    }
    let nf = n_samples as f64;
    let z_of = |count: f64, p: f64| {
        let se = sqrt((p * (1.0 - p) / nf).max(1e-300));
        ((count / nf) - p).abs() / se
    };
    let mut z1 = 0.0f64;
    for (i, &t) in times.iter().enumerate() {
        let sd = sqrt(t);
        for (lo, hi) in bins(-3.0 * sd, 3.0 * sd, 24) {
            let count = paths.iter().filter(|r| r[i] >= lo && r[i] < hi).count() as f64;
            let p = gl_integral(|x| kbm(t, x, t, x).unwrap_or(0.0), lo, hi);
            z1 = z1.max(z_of(count, p));
        }
    }
    let mut z2 = 0.0f64;
    for i in 0..m {
        for j in i + 1..m {
            let (s, t) = (times[i], times[j]);
            let rho2 = |x: f64, y: f64| {
                let a = kbm(s, x, s, x).unwrap_or(0.0);
                let b = kbm(s, x, t, y).unwrap_or(0.0);
                let c = kbm(t, y, s, x).unwrap_or(0.0);
                let d = kbm(t, y, t, y).unwrap_or(0.0);
                a * d - b * c
            };
            let (ss, st) = (sqrt(s), sqrt(t));
            for bx in bins(-2.5 * ss, 2.5 * ss, 6) {
                for by in bins(-2.5 * st, 2.5 * st, 6) {
                    let count = paths
                        .iter()
                        .filter(|r| r[i] >= bx.0 && r[i] < bx.1 && r[j] >= by.0 && r[j] < by.1)
                        .count() as f64;
                    let p = gl_2d(|x, y| rho2(x, y), bx, by);
                    z2 = z2.max(z_of(count, p));
                }
            }
        }
    }
    let t0 = times[0];
    let sd = sqrt(t0);
    let one_point_mass = bins(-12.0 * sd, 12.0 * sd, 96)
        .into_iter()
        .map(|(a, b)| gl_integral(|x| kbm(t0, x, t0, x).unwrap_or(0.0), a, b))
        .sum();
    Ok(BmCheckReport { n_samples, max_z_one_point: z1, max_z_two_point: z2, one_point_mass })
}
