//! Half-space geometric last passage percolation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::rng;

/// Phase of the boundary parameter `c` relative to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Parameters `(q, c)` of the symmetric geometric weight field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomParams {
    pub q: f64,
    pub c: f64,
}

impl GeomParams {
    pub fn new(q: f64, c: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("q = {q} must lie in (0, 1)")));
        }
        if !(c >= 0.0 && c * q < 1.0) {
            return Err(Error::Domain(format!("c = {c} must lie in [0, 1/q)")));
        }
        Ok(GeomParams { q, c })
    }

    pub fn regime(&self) -> Regime {
        if self.c < 1.0 {
            Regime::Subcritical
        } else if self.c == 1.0 {
            Regime::Critical
        } else {
            Regime::Supercritical
        }
    }
}

/// Symmetric `n x n` array of nonnegative integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightArray {
    n: usize,
    w: Vec<u64>,
}

impl WeightArray {
    /// Build from rows; the array must be square and symmetric.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Domain("weight array must be nonempty".into()));
        }
        let mut w = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Domain("weight array must be square".into()));
            }
            w.extend_from_slice(r);
        }
        for i in 0..n {
            for j in 0..i {
                if w[i * n + j] != w[j * n + i] {
                    return Err(Error::Domain(format!(
                        "weight array is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(WeightArray { n, w })
    }

    pub fn zeros(n: usize) -> Self {
        WeightArray {
            n,
            w: vec![0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight `w_{i,j}` with 1-based indices.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.w[(i - 1) * self.n + (j - 1)]
    }

    fn check(&self, m: usize, n: usize) -> Result<()> {
        if m == 0 || n == 0 || m > self.n || n > self.n {
            return Err(Error::Index(format!(
                "(m, n) = ({m}, {n}) outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// Sum of `w_{i,j}` over `i <= m, j <= n`.
    pub fn rectangle_sum(&self, m: usize, n: usize) -> Result<u64> {
        self.check(m, n)?;
        let mut s: u64 = 0;
        for i in 1..=m {
            for j in 1..=n {
                s = s
                    .checked_add(self.get(i, j))
                    .ok_or_else(|| Error::Overflow("rectangle sum".into()))?;
            }
        }
        Ok(s)
    }
}

/// Sample the symmetric field: `Geom(q^2)` off the diagonal, `Geom(cq)` on it.
pub fn sample_weights(params: GeomParams, n: usize, seed: u64) -> Result<WeightArray> {
    let mut r = rng::stream(seed, 0);
    sample_weights_with(params, n, &mut r)
}

/// As [`sample_weights`] but drawing from a caller-supplied generator.
pub fn sample_weights_with<R: RngCore + ?Sized>(
    params: GeomParams,
    n: usize,
    r: &mut R,
) -> Result<WeightArray> {
    let params = GeomParams::new(params.q, params.c)?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let ln_off = libm::log(params.q * params.q);
    let ln_diag = if params.c == 0.0 {
        f64::NEG_INFINITY
    } else {
        libm::log(params.c * params.q)
    };
    let mut w = vec![0u64; n * n];
    for i in 0..n {
        w[i * n + i] = rng::geometric_with_log(r, ln_diag);
        for j in (i + 1)..n {
            let x = rng::geometric_with_log(r, ln_off);
            w[i * n + j] = x;
            w[j * n + i] = x;
        }
    }
    Ok(WeightArray { n, w })
}

/// `G_1(m, n)` by the dynamic program over the rectangle.
pub fn last_passage_g1(w: &WeightArray, m: usize, n: usize) -> Result<u64> {
    w.check(m, n)?;
    let mut row = vec![0u64; n + 1];
    for i in 1..=m {
        for j in 1..=n {
            row[j] = w.get(i, j) + row[j].max(row[j - 1]);
        }
    }
    Ok(row[n])
}

/// Weakly decreasing list of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Build from parts, trimming trailing zeros; errors if not weakly decreasing.
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::Domain("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub(crate) fn from_trusted(mut parts: Vec<u64>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part `i` (1-based), zero beyond the length.
    #[inline]
    pub fn part(&self, i: usize) -> u64 {
        if i == 0 {
            return u64::MAX;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// `self ⪯ other`: `other_1 >= self_1 >= other_2 >= self_2 >= ...`.
    pub fn interlaces_below(&self, other: &Partition) -> bool {
        let k = self.len().max(other.len());
        (1..=k).all(|i| other.part(i) >= self.part(i) && self.part(i) >= other.part(i + 1))
    }
}

/// One step of the max-plus growth rule.
///
/// `mu = λ(m-1, n-1)`, `a = λ(m-1, n)`, `b = λ(m, n-1)`, all with `k` slots.
#[inline]
fn grow(mu: &[u64], a: &[u64], b: &[u64], w: u64, out: &mut [u64], k: usize) {
    if k == 0 {
        return;
    }
    out[0] = a[0].max(b[0]) + w;
    for j in 1..k {
        out[j] = a[j].max(b[j]) + a[j - 1].min(b[j - 1]) - mu[j - 1];
    }
}

/// Shape `λ(m, n)` whose partial sums are the passage times `G_k(m, n)`.
pub fn greene_shape(w: &WeightArray, m: usize, n: usize) -> Result<Partition> {
    w.check(m, n)?;
    let k = m.min(n);
    let mut prev = vec![0u64; (m + 1) * k];
    let mut cur = vec![0u64; (m + 1) * k];
    for j in 1..=n {
        cur[..k].fill(0);
        for i in 1..=m {
            let (lo, hi) = cur.split_at_mut(i * k);
            grow(
                &prev[(i - 1) * k..i * k],
                &lo[(i - 1) * k..i * k],
                &prev[i * k..(i + 1) * k],
                w.get(i, j),
                &mut hi[..k],
                k,
            );
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    let shape = Partition::from_trusted(prev[m * k..(m + 1) * k].to_vec());
    if shape.parts.iter().try_fold(0u64, |s, &p| s.checked_add(p)) != Some(w.rectangle_sum(m, n)?) {
        return Err(Error::Overflow("shape weight differs from rectangle sum".into()));
    }
    Ok(shape)
}

/// Default cap on the number of path tuples explored by [`brute_force_gk`].
pub const BRUTE_FORCE_CAP: u64 = 10_000_000;

fn paths_between(m: usize, n0: usize, n1: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut cur = vec![(1usize, n0)];
    fn rec(
        cur: &mut Vec<(usize, usize)>,
        m: usize,
        n1: usize,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let (x, y) = *cur.last().unwrap();
        if x == m && y == n1 {
            out.push(cur.clone());
            return;
        }
        if x < m {
            cur.push((x + 1, y));
            rec(cur, m, n1, out);
            cur.pop();
        }
        if y < n1 {
            cur.push((x, y + 1));
            rec(cur, m, n1, out);
            cur.pop();
        }
    }
    rec(&mut cur, m, n1, &mut out);
    out
}

/// `G_k(m, n)` by exhaustive search over vertex-disjoint up-right path tuples.
///
/// Path `i` runs from `(1, i)` to `(m, n - k + i)`. For `k >= min(m, n)` the
/// full rectangle sum is returned.
pub fn brute_force_gk(w: &WeightArray, m: usize, n: usize, k: usize, cap: u64) -> Result<u64> {
    w.check(m, n)?;
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if k >= m.min(n) {
        return w.rectangle_sum(m, n);
    }
    if m * n > 128 {
        return Err(Error::SizeLimit(format!("{m} x {n} grid too large")));
    }
    let families: Vec<Vec<(u128, u64)>> = (1..=k)
        .map(|i| {
            paths_between(m, i, n - k + i)
                .into_iter()
                .map(|p| {
                    let mut mask = 0u128;
                    let mut s = 0u64;
                    for &(x, y) in &p {
                        mask |= 1u128 << ((x - 1) * n + (y - 1));
                        s += w.get(x, y);
                    }
                    (mask, s)
                })
                .collect()
        })
        .collect();
    let total = families
        .iter()
        .try_fold(1u64, |acc, f| acc.checked_mul(f.len() as u64))
        .unwrap_or(u64::MAX);
    if total > cap {
        return Err(Error::SizeLimit(format!(
            "{total} path tuples exceed the cap {cap}"
        )));
    }
    fn rec(families: &[Vec<(u128, u64)>], used: u128, acc: u64, best: &mut u64) {
        match families.split_first() {
            None => *best = (*best).max(acc),
            Some((first, rest)) => {
                for &(mask, s) in first {
                    if mask & used == 0 {
                        rec(rest, used | mask, acc + s, best);
                    }
                }
            }
        }
    }
    let mut best = 0u64;
    rec(&families, 0, 0, &mut best);
    Ok(best)
}

/// The curves `λ_i(m, N)` for `m = 0..=N`, possibly truncated to the top parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineEnsembleDiscrete {
    n: usize,
    k: usize,
    data: Vec<u64>,
}

impl LineEnsembleDiscrete {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored curves.
    pub fn depth(&self) -> usize {
        self.k
    }

    /// `λ_i(m, N)` for `i` in `1..=depth`, `m` in `0..=N`.
    #[inline]
    pub fn lambda(&self, i: usize, m: usize) -> u64 {
        self.data[m * self.k + (i - 1)]
    }

    /// Curve `i` as a vector over `m = 0..=N`.
    pub fn curve(&self, i: usize) -> Vec<u64> {
        (0..=self.n).map(|m| self.lambda(i, m)).collect()
    }

    pub fn partition(&self, m: usize) -> Partition {
        Partition::from_trusted(self.data[m * self.k..(m + 1) * self.k].to_vec())
    }

    /// Number of violations of `λ_i(m) >= λ_i(m-1) >= λ_{i+1}(m)`.
    pub fn interlacing_violations(&self) -> usize {
        let mut bad = 0;
        for m in 1..=self.n {
            for i in 1..=self.k {
                if self.lambda(i, m) < self.lambda(i, m - 1) {
                    bad += 1;
                }
                if i < self.k && self.lambda(i, m - 1) < self.lambda(i + 1, m) {
                    bad += 1;
                }
            }
        }
        bad
    }
}

/// The full family `λ(m, N)`, `m = 0..=N`, computed incrementally.
pub fn lambda_family(w: &WeightArray) -> LineEnsembleDiscrete {
    lambda_family_truncated(w, w.n())
}

/// Top `k` curves of the family; exact because part `j` of the growth rule
/// only reads parts `<= j` of its neighbours.
pub fn lambda_family_truncated(w: &WeightArray, k: usize) -> LineEnsembleDiscrete {
    lambda_corners(w, k, &[w.n()]).pop().unwrap()
}

/// Top `k` curves of the families of the leading `r x r` corners, `r` in `sizes`.
pub fn lambda_corners(w: &WeightArray, k: usize, sizes: &[usize]) -> Vec<LineEnsembleDiscrete> {
    let n_max = sizes.iter().copied().max().unwrap_or(0).min(w.n());
    let k = k.max(1).min(w.n());
    let mut prev = vec![0u64; (n_max + 1) * k];
    let mut cur = vec![0u64; (n_max + 1) * k];
    let mut out: Vec<Option<LineEnsembleDiscrete>> = sizes.iter().map(|_| None).collect();
    for nn in 1..=n_max {
        cur[..k].fill(0);
        for m in 1..=nn {
            let kk = k.min(m);
            let (lo, hi) = cur.split_at_mut(m * k);
            let a = &lo[(m - 1) * k..m * k];
            let mu = &prev[(m - 1) * k..m * k];
            let target = &mut hi[..k];
            if m < nn {
                grow(mu, a, &prev[m * k..(m + 1) * k], w.get(m, nn), target, kk);
            } else {
                grow(mu, a, a, w.get(m, nn), target, kk);
            }
            target[kk..].fill(0);
        }
        for (slot, &r) in out.iter_mut().zip(sizes) {
            if r == nn {
                *slot = Some(LineEnsembleDiscrete {
                    n: nn,
                    k,
                    data: cur[..(nn + 1) * k].to_vec(),
                });
            }
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    out.into_iter()
        .map(|o| o.expect("corner size must lie in 1..=N"))
        .collect()
}

/// Rows `(m, i, λ_i(m, N))` of an ensemble, curves truncated at their last nonzero entry.
pub fn ensemble_rows(e: &LineEnsembleDiscrete) -> Vec<(usize, usize, u64)> {
    let mut rows = Vec::new();
    for i in 1..=e.depth() {
        for m in 0..=e.n() {
            rows.push((m, i, e.lambda(i, m)));
        }
    }
    rows
}
