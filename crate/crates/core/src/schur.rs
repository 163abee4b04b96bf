//! Exact Pfaffian Schur process on tiny systems.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::lpp::{GeomParams, Partition};
use crate::rng;

/// Default bound on parts during enumeration.
pub const DEFAULT_CAP: u64 = 40;
/// Largest admissible truncated tail mass.
pub const MAX_TAIL: f64 = 1e-6;
/// Largest number of sequences materialized by [`enumerate_exact`].
pub const MAX_SEQUENCES: usize = 4_000_000;

/// `1{μ ⪯ λ} x^{|λ| - |μ|}`.
pub fn skew_schur_weight(lambda: &Partition, mu: &Partition, x: f64) -> f64 {
    if !mu.interlaces_below(lambda) {
        return 0.0;
    }
    let d = lambda.weight() - mu.weight();
    pow_u(x, d)
}

fn pow_u(x: f64, e: u64) -> f64 {
    if e == 0 {
        1.0
    } else {
        libm::pow(x, e as f64)
    }
}

/// `c^{λ_1 - λ_2 + λ_3 - ...}`.
pub fn boundary_monomial(lambda: &Partition, c: f64) -> f64 {
    let mut e: i64 = 0;
    for (i, &p) in lambda.parts().iter().enumerate() {
        if i % 2 == 0 {
            e += p as i64;
        } else {
            e -= p as i64;
        }
    }
    pow_u(c, e as u64)
}

/// Partition sequence `λ^1, ..., λ^N`, with `λ^{N+1} = ∅` implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchurSequence {
    pub partitions: Vec<Partition>,
}

impl SchurSequence {
    pub fn n(&self) -> usize {
        self.partitions.len()
    }

    /// `λ^r` for `r` in `1..=N+1`.
    pub fn get(&self, r: usize) -> Partition {
        if r > self.partitions.len() {
            Partition::empty()
        } else {
            self.partitions[r - 1].clone()
        }
    }

    pub fn is_interlacing(&self) -> bool {
        (1..=self.n()).all(|r| self.get(r + 1).interlaces_below(&self.get(r)))
    }
}

/// `τ_{λ^1}(c) Π_r s_{λ^r / λ^{r+1}}(q)`.
pub fn unnormalized_weight(seq: &SchurSequence, params: GeomParams) -> f64 {
    let mut w = boundary_monomial(&seq.get(1), params.c);
    for r in 1..=seq.n() {
        w *= skew_schur_weight(&seq.get(r), &seq.get(r + 1), params.q);
        if w == 0.0 {
            return 0.0;
        }
    }
    w
}

/// `(1 - cq)^{-N} (1 - q^2)^{-N(N-1)/2}`.
pub fn partition_function(params: GeomParams, n: usize) -> Result<f64> {
    let (q, c) = (params.q, params.c);
    if c * q >= 1.0 || q * q >= 1.0 {
        return Err(Error::Divergence(format!("cq = {} and q^2 = {} must be < 1", c * q, q * q)));
    }
    let nf = n as f64;
    Ok(libm::pow(1.0 - c * q, -nf) * libm::pow(1.0 - q * q, -nf * (nf - 1.0) / 2.0))
}

/// Exact probabilities of every sequence with parts `<= cap`.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub n: usize,
    pub cap: u64,
    pub entries: Vec<(SchurSequence, f64)>,
    /// `1 - Σ p` over the enumerated support.
    pub tail: f64,
}

impl ExactDistribution {
    /// Fail unless the truncated tail mass is below `max_tail`.
    pub fn certify(&self, max_tail: f64) -> Result<()> {
        if self.tail > max_tail {
            return Err(Error::Truncation(format!(
                "tail mass {:e} above {:e} at cap {}; raise the cap",
                self.tail, max_tail, self.cap
            )));
        }
        Ok(())
    }

    /// Inverse-CDF draw; returns `None` when the draw falls in the tail.
    pub fn sample<R: RngCore + ?Sized>(&self, cdf: &[f64], r: &mut R) -> Option<&SchurSequence> {
        let u = rng::uniform_open(r);
        let idx = cdf.partition_point(|&c| c < u);
        self.entries.get(idx).map(|e| &e.0)
    }

    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.entries
            .iter()
            .map(|e| {
                acc += e.1;
                acc
            })
            .collect()
    }
}

fn extensions(mu: &Partition, cap: u64, out: &mut Vec<Partition>) {
    let len = mu.len() + 1;
    let mut parts = vec![0u64; len];
    fn rec(i: usize, mu: &Partition, cap: u64, parts: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if i > parts.len() {
            out.push(Partition::from_trusted(parts.clone()));
            return;
        }
        let lo = mu.part(i);
        let hi = if i == 1 { cap } else { mu.part(i - 1) };
        for v in lo..=hi {
            parts[i - 1] = v;
            rec(i + 1, mu, cap, parts, out);
        }
    }
    rec(1, mu, cap, &mut parts, out);
}

/// Enumerate the Schur process for `N <= 3` with all parts `<= cap`.
pub fn enumerate_exact(params: GeomParams, n: usize, cap: u64) -> Result<ExactDistribution> {
    let params = GeomParams::new(params.q, params.c)?;
    if n > 3 {
        return Err(Error::SizeLimit(format!("N = {n} exceeds the enumeration limit 3")));
    }
    let z = partition_function(params, n)?;
    let mut entries = Vec::new();
    if n == 0 {
        entries.push((SchurSequence { partitions: Vec::new() }, 1.0));
        return Ok(ExactDistribution { n, cap, entries, tail: 0.0 });
    }
    let mut stack: Vec<Vec<Partition>> = vec![Vec::new()];
    let mut ext = Vec::new();
    while let Some(tail_seq) = stack.pop() {
        let below = tail_seq.first().cloned().unwrap_or_else(Partition::empty);
        ext.clear();
        extensions(&below, cap, &mut ext);
        for p in ext.drain(..) {
            let mut next = Vec::with_capacity(tail_seq.len() + 1);
            next.push(p);
            next.extend(tail_seq.iter().cloned());
            if next.len() == n {
                let seq = SchurSequence { partitions: next };
                let p = unnormalized_weight(&seq, params) / z;
                entries.push((seq, p));
                if entries.len() > MAX_SEQUENCES {
                    return Err(Error::SizeLimit(format!(
                        "more than {MAX_SEQUENCES} sequences at cap {cap}"
                    )));
                }
            } else {
                stack.push(next);
            }
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let total: f64 = entries.iter().map(|e| e.1).sum();
    Ok(ExactDistribution { n, cap, entries, tail: 1.0 - total })
}

/// Curves `L_i(s) = λ^{N-s+1}_i`, `s = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GibbsLineEnsemble {
    pub n: usize,
    /// `curves[i - 1][s]`.
    pub curves: Vec<Vec<u64>>,
}

impl GibbsLineEnsemble {
    pub fn value(&self, i: usize, s: usize) -> u64 {
        self.curves.get(i - 1).map(|c| c[s]).unwrap_or(0)
    }

    pub fn depth(&self) -> usize {
        self.curves.len()
    }

    /// Monotonicity in `s` and `L_i(j-1) >= L_{i+1}(j)`.
    pub fn satisfies_interlacing(&self) -> bool {
        let k = self.depth();
        for s in 1..=self.n {
            for i in 1..=k {
                if self.value(i, s) < self.value(i, s - 1) {
                    return false;
                }
                if self.value(i, s - 1) < self.value(i + 1, s) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn to_line_ensemble(seq: &SchurSequence) -> GibbsLineEnsemble {
    let n = seq.n();
    let depth = seq.partitions.iter().map(|p| p.len()).max().unwrap_or(0);
    let curves = (1..=depth)
        .map(|i| (0..=n).map(|s| seq.get(n - s + 1).part(i)).collect())
        .collect();
    GibbsLineEnsemble { n, curves }
}
