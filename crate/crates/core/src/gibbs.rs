//! Uniform geometric bridges, interlacing-conditioned ensembles and an
//! empirical check of the interlacing Gibbs property.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::lpp::{lambda_family_truncated, sample_weights_with, GeomParams};
use crate::rng::{stream, uniform_below};

/// Increasing paths from `(t1, z1)` to `(t2, z2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BridgeSpec {
    pub t1: i64,
    pub t2: i64,
    pub z1: i64,
    pub z2: i64,
}

impl BridgeSpec {
    pub fn new(t1: i64, t2: i64, z1: i64, z2: i64) -> Result<Self> {
        if t1 >= t2 || z1 > z2 {
            return Err(Error::Domain(format!("bridge needs t1 < t2 and z1 <= z2, got ({t1}, {t2}, {z1}, {z2})")));
        }
        Ok(BridgeSpec { t1, t2, z1, z2 })
    }

    fn steps(&self) -> u64 {
        (self.t2 - self.t1) as u64
    }

    fn rise(&self) -> u64 {
        (self.z2 - self.z1) as u64
    }
}

/// `C(n, k)` in `u128`, or an overflow error.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc
            .checked_mul(n as u128 - i)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k}) overflows u128")))?
            / (i + 1);
    }
    Ok(acc)
}

/// `|Ω(t1, t2, z1, z2)| = C(Δz + Δt - 1, Δt - 1)`.
pub fn count_paths(spec: BridgeSpec) -> Result<u128> {
    binomial(spec.rise() + spec.steps() - 1, spec.steps() - 1)
}

/// Uniform increasing path over `t1..=t2` via a uniform set of bar positions.
pub fn sample_bridge<R: RngCore + ?Sized>(spec: BridgeSpec, rng: &mut R) -> Vec<i64> {
    let bars = spec.steps() - 1;
    let slots = spec.rise() + bars;
    let mut chosen = BTreeSet::new();
    for j in slots - bars..slots {
        let t = uniform_below(rng, j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut path = Vec::with_capacity(spec.steps() as usize + 1);
    let mut z = spec.z1;
    path.push(z);
    let mut prev: i64 = -1;
    for &b in &chosen {
        z += b as i64 - prev - 1;
        path.push(z);
        prev = b as i64;
    }
    path.push(spec.z2);
    path
}

/// Every path of `Ω(t1, t2, z1, z2)`, in lexicographic order.
pub fn enumerate_bridges(spec: BridgeSpec, cap: usize) -> Result<Vec<Vec<i64>>> {
    if count_paths(spec)? > cap as u128 {
        return Err(Error::SizeLimit(format!("more than {cap} bridges")));
    }
    let n = spec.steps() as usize;
    let mut out = Vec::new();
    let mut cur = vec![spec.z1];
    fn rec(cur: &mut Vec<i64>, n: usize, z2: i64, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            let mut p = cur.clone();
            p.push(z2);
            out.push(p);
            return;
        }
        for z in *cur.last().unwrap()..=z2 {
            cur.push(z);
            rec(cur, n, z2, out);
            cur.pop();
        }
    }
    rec(&mut cur, n, spec.z2, &mut out);
    Ok(out)
}

/// `k` curves on `t0..=t1` with entrance `x`, exit `y`, ceiling `f` and
/// floor `g`; `None` stands for `+∞` and `-∞` respectively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterlacedSpec {
    pub t0: i64,
    pub t1: i64,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub f: Option<Vec<i64>>,
    pub g: Option<Vec<i64>>,
}

impl InterlacedSpec {
    pub fn k(&self) -> usize {
        self.x.len()
    }

    fn width(&self) -> usize {
        (self.t1 - self.t0) as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(m.into()));
        if self.t0 >= self.t1 {
            return bad("need T0 < T1");
        }
        if self.x.is_empty() || self.x.len() != self.y.len() {
            return bad("entrance and exit data need the same positive length");
        }
        if self.x.windows(2).any(|w| w[0] < w[1]) || self.y.windows(2).any(|w| w[0] < w[1]) {
            return bad("entrance and exit data must be weakly decreasing");
        }
        if self.x.iter().zip(&self.y).any(|(a, b)| b < a) {
            return bad("need y_i >= x_i");
        }
        for b in [&self.f, &self.g].into_iter().flatten() {
            if b.len() != self.width() || b.windows(2).any(|w| w[0] > w[1]) {
                return bad("boundary paths must be increasing on T0..=T1");
            }
        }
        Ok(())
    }

    fn bridge(&self, i: usize) -> BridgeSpec {
        BridgeSpec { t1: self.t0, t2: self.t1, z1: self.x[i], z2: self.y[i] }
    }

    /// Whether `paths` (one per curve, indexed from `T0`) satisfies every
    /// interlacing constraint, including the boundary curves.
    pub fn accepts(&self, paths: &[Vec<i64>]) -> bool {
        let k = self.k();
        for r in 1..self.width() {
            for i in 0..=k {
                let upper = if i == 0 { self.f.as_ref().map(|f| f[r - 1]) } else { Some(paths[i - 1][r - 1]) };
                let lower = if i == k { self.g.as_ref().map(|g| g[r]) } else { Some(paths[i][r]) };
                if let (Some(u), Some(l)) = (upper, lower) {
                    if u < l {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Pointwise-minimal configuration of the lower-bound system, if it
    /// respects all upper bounds.
    pub fn minimal_configuration(&self) -> Result<Vec<Vec<i64>>> {
        self.validate()?;
        let (k, w) = (self.k(), self.width());
        let mut b: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let mut p = vec![self.x[i]; w];
                p[w - 1] = self.y[i];
                p
            })
            .collect();
        loop {
            let mut changed = false;
            for i in (0..k).rev() {
                for r in 0..w {
                    let mut v = b[i][r];
                    if r > 0 {
                        v = v.max(b[i][r - 1]);
                    }
                    if r + 1 < w {
                        if i + 1 < k {
                            v = v.max(b[i + 1][r + 1]);
                        } else if let Some(g) = &self.g {
                            v = v.max(g[r + 1]);
                        }
                    }
                    if v != b[i][r] {
                        b[i][r] = v;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let infeasible = (0..k).any(|i| b[i][0] != self.x[i] || b[i][w - 1] != self.y[i])
            || self.f.as_ref().is_some_and(|f| (1..w).any(|r| b[0][r] > f[r - 1]));
        if infeasible {
            return Err(Error::Feasibility("no interlacing configuration matches the boundary data".into()));
        }
        Ok(b)
    }
}

/// An accepted interlaced sample with the number of proposals it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterlacedDraw {
    pub paths: Vec<Vec<i64>>,
    pub attempts: u64,
}

/// Uniform draw from `Ω_Inter` by rejection from independent bridges.
pub fn sample_interlaced<R: RngCore + ?Sized>(
    spec: &InterlacedSpec,
    rng: &mut R,
    max_attempts: u64,
) -> Result<InterlacedDraw> {
    if max_attempts == 0 {
        return Err(Error::Domain("max_attempts must be at least 1".into()));
    }
    spec.minimal_configuration()?;
    for attempt in 1..=max_attempts {
        let paths: Vec<Vec<i64>> = (0..spec.k()).map(|i| sample_bridge(spec.bridge(i), rng)).collect();
        if spec.accepts(&paths) {
            return Ok(InterlacedDraw { paths, attempts: attempt });
        }
    }
    Err(Error::Rejection { attempts: max_attempts, accept_rate: 0.0 })
}

/// Every configuration of `Ω_Inter`.
pub fn enumerate_interlaced(spec: &InterlacedSpec, cap: usize) -> Result<Vec<Vec<Vec<i64>>>> {
    spec.validate()?;
    let per: Vec<Vec<Vec<i64>>> = (0..spec.k()).map(|i| enumerate_bridges(spec.bridge(i), cap)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut cur: Vec<Vec<i64>> = Vec::new();
    fn rec(
        spec: &InterlacedSpec,
        per: &[Vec<Vec<i64>>],
        cur: &mut Vec<Vec<i64>>,
        out: &mut Vec<Vec<Vec<i64>>>,
        cap: usize,
    ) -> Result<()> {
        let i = cur.len();
        if i == per.len() {
            if spec.accepts(cur) {
                if out.len() >= cap {
                    return Err(Error::SizeLimit(format!("more than {cap} interlaced configurations")));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        for p in &per[i] {
            let ok = (1..p.len()).all(|r| {
                let upper = if i == 0 { spec.f.as_ref().map(|f| f[r - 1]) } else { Some(cur[i - 1][r - 1]) };
                upper.is_none_or(|u| u >= p[r])
            });
            if ok {
                cur.push(p.clone());
                rec(spec, per, cur, out, cap)?;
                cur.pop();
            }
        }
        Ok(())
    }
    rec(spec, &per, &mut cur, &mut out, cap)?;
    Ok(out)
}

/// Outcome of [`gibbs_property_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsReport {
    /// Mass-weighted total variation between the empirical conditional law
    /// of the interior and the uniform law on `Ω_Inter`.
    pub tv: f64,
    /// Standard error of `tv` from independent batches.
    pub tv_se: f64,
    pub n: usize,
    /// Probability that independent bridges with the observed boundary data
    /// interlace, averaged over the observed data.
    pub accept_rate: f64,
    /// Number of distinct boundary data kept.
    pub classes: usize,
    /// Fraction of samples whose boundary class had too few samples.
    pub skipped_mass: f64,
}

/// Classes with fewer samples than this are left out of the TV estimate.
pub const MIN_CLASS: usize = 50;
const ENUM_CAP: usize = 200_000;
const BATCHES: usize = 10;

type Interior = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct BoundaryKey {
    x: Vec<i64>,
    y: Vec<i64>,
    g: Vec<i64>,
}

struct Class {
    spec: InterlacedSpec,
    counts: Vec<BTreeMap<Interior, usize>>,
}

fn interior(paths: &[Vec<i64>]) -> Interior {
    paths.iter().flat_map(|p| p[1..p.len() - 1].iter().copied()).collect()
}

fn class_tv(support: &[Interior], counts: &BTreeMap<Interior, usize>, n: usize) -> Result<f64> {
    let u = 1.0 / support.len() as f64;
    let mut tv = 0.0;
    let mut seen = 0;
    for s in support {
        let c = counts.get(s).copied().unwrap_or(0);
        seen += c;
        tv += (c as f64 / n as f64 - u).abs();
    }
    if seen != n {
        return Err(Error::Structure("sampled interior lies outside the interlacing support".into()));
    }
    Ok(0.5 * tv)
}

/// Samples the Schur line ensemble `L_i(s)`, `s = 0..=N`, through the LPP
/// shapes, groups samples by the boundary data of curves `1..=k_top` on
/// `window`, and compares each conditional law of the interior with the
/// uniform law on `Ω_Inter` (`f = +∞`, `g = L_{k_top + 1}`).
pub fn gibbs_property_test(
    params: GeomParams,
    n: usize,
    window: (usize, usize),
    k_top: usize,
    n_samples: usize,
    seed: u64,
) -> Result<GibbsReport> {
    let (a, b) = window;
    if !(a < b && b <= n) || k_top == 0 || n_samples < BATCHES {
        return Err(Error::Domain(format!(
            "need 0 <= a < b <= N, k_top >= 1 and at least {BATCHES} samples (a={a}, b={b}, N={n}, k_top={k_top})"
        )));
    }
    let depth = (k_top + 1).min(n);
    let mut classes: BTreeMap<BoundaryKey, Class> = BTreeMap::new();
    let mut rng = stream(seed, 0);
    for j in 0..n_samples {
        let w = sample_weights_with(params, n, &mut rng)?;
        let e = lambda_family_truncated(&w, depth);
        let curve = |i: usize, s: usize| if i <= e.depth() { e.lambda(i, s) as i64 } else { 0 };
        let paths: Vec<Vec<i64>> = (1..=k_top).map(|i| (a..=b).map(|s| curve(i, s)).collect()).collect();
        let key = BoundaryKey {
            x: paths.iter().map(|p| p[0]).collect(),
            y: paths.iter().map(|p| p[b - a]).collect(),
            g: (a..=b).map(|s| curve(k_top + 1, s)).collect(),
        };
        let cls = classes.entry(key.clone()).or_insert_with(|| Class {
            spec: InterlacedSpec { t0: a as i64, t1: b as i64, x: key.x.clone(), y: key.y.clone(), f: None, g: Some(key.g.clone()) },
            counts: vec![BTreeMap::new(); BATCHES],
        });
        *cls.counts[j % BATCHES].entry(interior(&paths)).or_insert(0) += 1;
    }
    let mut kept = 0usize;
    let mut tv = 0.0;
    let mut batch_tv = [0.0f64; BATCHES];
    let mut batch_mass = [0usize; BATCHES];
    let mut accept = 0.0;
    let mut n_kept_classes = 0;
    for cls in classes.values() {
        let per_batch: Vec<usize> = cls.counts.iter().map(|m| m.values().sum()).collect();
        let total: usize = per_batch.iter().sum();
        if total < MIN_CLASS {
            continue;
        }
        let support: Vec<Interior> = enumerate_interlaced(&cls.spec, ENUM_CAP)?.iter().map(|p| interior(p)).collect();
        let mut all: BTreeMap<Interior, usize> = BTreeMap::new();
        for m in &cls.counts {
            for (k, v) in m {
                *all.entry(k.clone()).or_insert(0) += v;
            }
        }
        tv += total as f64 * class_tv(&support, &all, total)?;
        for (bi, m) in cls.counts.iter().enumerate() {
            if per_batch[bi] > 0 {
                batch_tv[bi] += per_batch[bi] as f64 * class_tv(&support, m, per_batch[bi])?;
                batch_mass[bi] += per_batch[bi];
            }
        }
        let free: f64 = (0..cls.spec.k()).map(|i| count_paths(cls.spec.bridge(i)).map(|c| c as f64)).product::<Result<f64>>()?;
        accept += total as f64 * support.len() as f64 / free;
        kept += total;
        n_kept_classes += 1;
    }
    if kept == 0 {
        return Err(Error::Domain(format!("no boundary class reached {MIN_CLASS} samples")));
    }
    let tvs: Vec<f64> = (0..BATCHES).filter(|&i| batch_mass[i] > 0).map(|i| batch_tv[i] / batch_mass[i] as f64).collect();
    let mean = tvs.iter().sum::<f64>() / tvs.len() as f64;
    let var = tvs.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (tvs.len().max(2) - 1) as f64;
    Ok(GibbsReport {
        tv: tv / kept as f64,
        tv_se: sqrt(var / tvs.len() as f64),
        n: n_samples,
        accept_rate: accept / kept as f64,
        classes: n_kept_classes,
        skipped_mass: 1.0 - kept as f64 / n_samples as f64,
    })
}
