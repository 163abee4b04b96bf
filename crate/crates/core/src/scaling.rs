//! Scaling constants and the maps to the Brownian and Airy frames.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use libm::{floor, pow, sqrt};

/// `κ0 = ((1 - qc) / (c - q))^2`.
pub fn kappa0(q: f64, c: f64) -> f64 {
    let r = (1.0 - q * c) / (c - q);
    r * r
}

/// Concentration curve of the lower curves, `h^bot(κ)`.
pub fn h_bot(q: f64, kappa: f64) -> f64 {
    q * (q + 2.0 * sqrt(kappa) + q * kappa) / (1.0 - q * q)
}

/// Concentration curve of the top curve, `h^top(κ) = κ p2 + q / (c - q)`.
pub fn h_top(q: f64, c: f64, kappa: f64) -> f64 {
    kappa * (q * c / (1.0 - q * c)) + q / (c - q)
}

fn check_supercritical(q: f64, c: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
    }
    if !(c > 1.0 && c < 1.0 / q) {
        return Err(Error::Domain(format!("c = {c} must lie in (1, 1/q)")));
    }
    Ok(())
}

/// Constants of the bulk (Airy) frame at location κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkScaling {
    pub q: f64,
    pub c: f64,
    pub kappa: f64,
    pub kappa0: f64,
    pub sigma1: f64,
    pub f1: f64,
    pub zc: f64,
    pub p1: f64,
    pub h1: f64,
}

impl BulkScaling {
    pub fn new(q: f64, c: f64, kappa: f64) -> Result<Self> {
        check_supercritical(q, c)?;
        let k0 = kappa0(q, c);
        if !(kappa > k0 && kappa < 1.0) {
            return Err(Error::Domain(format!("κ = {kappa} must lie in (κ0, 1) = ({k0}, 1)")));
        }
        let b = sqrt(kappa);
        let sigma1 = pow(q, 1.0 / 3.0) * pow(q + b, 5.0 / 3.0)
            / (pow(kappa, 1.0 / 6.0) * (1.0 - q * q) * pow(1.0 + q * b, 1.0 / 3.0));
        let f1 = pow(q, 1.0 / 3.0) / (2.0 * pow(kappa, 2.0 / 3.0) * pow(q + b, 1.0 / 3.0) * pow(1.0 + q * b, 1.0 / 3.0));
        let zc = (1.0 + q * b) / (q + b);
        let p1 = q * (1.0 + q * b) / ((1.0 - q * q) * b);
        let h1 = h_bot(q, kappa);
        Ok(BulkScaling { q, c, kappa, kappa0: k0, sigma1, f1, zc, p1, h1 })
    }

    /// Lattice of the scaled particles `X_i`.
    pub fn lattice(&self, n: usize, t: f64) -> LatticeSpec {
        let nf = n as f64;
        let spacing = 1.0 / (self.sigma1 * self.zc * pow(nf, 1.0 / 3.0));
        let tt = self.time_shift(n, t) as f64;
        LatticeSpec { spacing, offset: -(self.h1 * nf + self.p1 * tt) * spacing }
    }

    /// `T_t = ⌊t N^{2/3}⌋`.
    pub fn time_shift(&self, n: usize, t: f64) -> i64 {
        floor(t * pow(n as f64, 2.0 / 3.0)) as i64
    }

    /// Row index `⌊κN⌋ + T_t` of the scaled time `t`.
    pub fn row(&self, n: usize, t: f64) -> i64 {
        floor(self.kappa * n as f64) as i64 + self.time_shift(n, t)
    }

    /// `X_i` from `λ_i` at scaled time `t`, particle label `i` (1-based).
    pub fn scaled_particle(&self, n: usize, t: f64, lambda_i: u64, i: usize) -> f64 {
        let nf = n as f64;
        let tt = self.time_shift(n, t) as f64;
        (lambda_i as f64 - self.h1 * nf - self.p1 * tt - i as f64)
            / (self.sigma1 * self.zc * pow(nf, 1.0 / 3.0))
    }
}

/// Constants of the edge (Brownian) frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeScaling {
    pub q: f64,
    pub c: f64,
    pub kappa0: f64,
    pub p2: f64,
    pub sigma2: f64,
}

impl EdgeScaling {
    pub fn new(q: f64, c: f64) -> Result<Self> {
        check_supercritical(q, c)?;
        let p2 = q * c / (1.0 - q * c);
        Ok(EdgeScaling { q, c, kappa0: kappa0(q, c), p2, sigma2: sqrt(p2 * (1.0 + p2)) })
    }

    pub fn h2(&self, kappa: f64) -> f64 {
        kappa * self.p2 + self.q / (self.c - self.q)
    }

    pub fn check_time(&self, s: f64) -> Result<()> {
        if !(s > self.kappa0 && s < 1.0) {
            return Err(Error::Domain(format!(
                "time {s} must lie in (κ0, 1) = ({}, 1)",
                self.kappa0
            )));
        }
        Ok(())
    }

    /// Lattice of the scaled particles `Y_i` at time `s`.
    pub fn lattice(&self, n: usize, s: f64) -> LatticeSpec {
        let nf = n as f64;
        let spacing = 1.0 / (self.sigma2 * sqrt(nf));
        LatticeSpec { spacing, offset: -self.h2(s) * nf * spacing }
    }

    /// `Y_i` from `λ_i(⌊sN⌋, N)`.
    pub fn scaled_particle(&self, n: usize, s: f64, lambda_i: u64, i: usize) -> f64 {
        let nf = n as f64;
        (lambda_i as f64 - self.h2(s) * nf - i as f64) / (self.sigma2 * sqrt(nf))
    }

    /// `C^top_N = ⌊qN / (c - q)⌋`.
    pub fn c_top(&self, n: usize) -> f64 {
        floor(self.q * n as f64 / (self.c - self.q))
    }
}

/// The lattice `a Z + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub spacing: f64,
    pub offset: f64,
}

impl LatticeSpec {
    /// Lattice point with integer label `k`.
    pub fn point(&self, k: i64) -> f64 {
        self.spacing * k as f64 + self.offset
    }

    /// Smallest label whose point is `>= a`.
    pub fn first_at_or_above(&self, a: f64) -> i64 {
        let k = libm::ceil((a - self.offset) / self.spacing) as i64;
        if self.point(k - 1) >= a {
            k - 1
        } else {
            k
        }
    }

    /// Label of the lattice point nearest `x`.
    pub fn nearest(&self, x: f64) -> i64 {
        libm::round((x - self.offset) / self.spacing) as i64
    }
}

/// Curve value with the extension `0` for `s <= 0`, `L(N)` beyond `N`, and
/// linear interpolation between integer times.
pub fn extended_curve(curve: &[u64], s: f64) -> f64 {
    let n = curve.len() - 1;
    if s <= 0.0 {
        return 0.0;
    }
    if s >= n as f64 {
        return curve[n] as f64;
    }
    let lo = floor(s) as usize;
    let frac = s - lo as f64;
    curve[lo] as f64 * (1.0 - frac) + curve[lo + 1] as f64 * frac
}

/// A rescaled curve sampled at explicit times, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let j = self.times.partition_point(|&x| x <= t);
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (t - t0) / (t1 - t0);
        self.values[j - 1] * (1.0 - w) + self.values[j] * w
    }
}

/// Rescaled top curve in the Brownian frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TopRescaled<'a> {
    curve: &'a [u64],
    n: usize,
    p: EdgeScaling,
    c_top: f64,
}

impl<'a> TopRescaled<'a> {
    /// `U(t) = σ2^{-1} N^{-1/2} (L1(tN) - C^top_N - p2 tN)`.
    pub fn eval(&self, t: f64) -> f64 {
        let nf = self.n as f64;
        let s = t * nf;
        (extended_curve(self.curve, s) - self.c_top - self.p.p2 * s) / (self.p.sigma2 * sqrt(nf))
    }

    /// Samples at the lattice times `m / N` inside `(κ0, 1]`.
    pub fn sampled(&self) -> SampledFunction {
        let nf = self.n as f64;
        let (times, values) = (0..=self.n)
            .map(|m| m as f64 / nf)
            .filter(|&t| t > self.p.kappa0)
            .map(|t| (t, self.eval(t)))
            .unzip();
        SampledFunction { times, values }
    }
}

/// Rescale the top curve `L1` given on `0..=N`.
pub fn rescale_top(curve: &[u64], n: usize, p: EdgeScaling) -> Result<TopRescaled<'_>> {
    if curve.len() != n + 1 {
        return Err(Error::Domain(format!("curve has {} samples, expected N + 1 = {}", curve.len(), n + 1)));
    }
    Ok(TopRescaled { curve, n, p, c_top: p.c_top(n) })
}

/// Rescaled lower curves in the Airy frame; index `i` reads curve `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BottomRescaled<'a> {
    curves: &'a [Vec<u64>],
    n: usize,
    p: BulkScaling,
    c_bot: f64,
    scale: f64,
}

impl<'a> BottomRescaled<'a> {
    /// Number of available rescaled curves.
    pub fn count(&self) -> usize {
        self.curves.len().saturating_sub(1)
    }

    fn position(&self, t: f64) -> f64 {
        floor(self.p.kappa * self.n as f64) + t * pow(self.n as f64, 2.0 / 3.0)
    }

    pub fn check_window(&self, t: f64) -> Result<()> {
        let s = self.position(t);
        if s < 0.0 || s > self.n as f64 {
            return Err(Error::Domain(format!(
                "scaled time {t} maps to {s}, outside [0, {}]",
                self.n
            )));
        }
        Ok(())
    }

    /// `U_i(t)` for `i >= 1`.
    pub fn eval(&self, i: usize, t: f64) -> Result<f64> {
        self.check_window(t)?;
        if i == 0 || i >= self.curves.len() {
            return Err(Error::Index(format!("curve {i} not available")));
        }
        let s = self.position(t);
        let tn = t * pow(self.n as f64, 2.0 / 3.0);
        Ok((extended_curve(&self.curves[i], s) - self.c_bot - self.p.p1 * tn) * self.scale)
    }

    /// Scaled difference `L_a - L_b` at position `t`, in the same units.
    pub fn gap(&self, a: usize, b: usize, t: f64) -> Result<f64> {
        self.check_window(t)?;
        let s = self.position(t);
        Ok((extended_curve(&self.curves[a - 1], s) - extended_curve(&self.curves[b - 1], s)) * self.scale)
    }
}

/// Rescale curves `L_1, L_2, ...` (given as `curves[0], curves[1], ...`).
pub fn rescale_bottom(curves: &[Vec<u64>], n: usize, p: BulkScaling) -> Result<BottomRescaled<'_>> {
    if curves.iter().any(|c| c.len() != n + 1) {
        return Err(Error::Domain("every curve needs N + 1 samples".into()));
    }
    let scale = 1.0 / (sqrt(p.p1 * (1.0 + p.p1)) * pow(n as f64, 1.0 / 3.0));
    Ok(BottomRescaled { curves, n, p, c_bot: floor(p.h1 * n as f64), scale })
}
