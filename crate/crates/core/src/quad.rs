//! Composite Gauss–Legendre quadrature on piecewise contours.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64 as C;

use crate::contour::Contour;
use crate::error::{Error, Result};

const GL_X: [f64; 16] = [
    -0.9894009349916499326, -0.94457502307323257608, -0.86563120238783174388, -0.7554044083550030339,
    -0.61787624440264374845, -0.45801677765722738634, -0.28160355077925891323, -0.095012509837637440185,
    0.095012509837637440185, 0.28160355077925891323, 0.45801677765722738634, 0.61787624440264374845,
    0.7554044083550030339, 0.86563120238783174388, 0.94457502307323257608, 0.9894009349916499326,
];
const GL_W: [f64; 16] = [
    0.027152459411754094852, 0.062253523938647892863, 0.09515851168249278481, 0.12462897125553387205,
    0.14959598881657673208, 0.16915651939500253819, 0.18260341504492358887, 0.18945061045506849629,
    0.18945061045506849629, 0.18260341504492358887, 0.16915651939500253819, 0.14959598881657673208,
    0.12462897125553387205, 0.09515851168249278481, 0.062253523938647892863, 0.027152459411754094852,
];

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 20_000;
/// Panel discrepancies below this fraction of the panel's absolute mass are roundoff.
const ROUNDOFF: f64 = 1e-12;

/// Estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C,
    pub err: f64,
}

/// Parameter panels `[t0, t1]` per contour piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Panels {
    pub per_piece: Vec<Vec<(f64, f64)>>,
}

impl Panels {
    pub fn uniform(contour: &Contour, k: usize) -> Self {
        Panels {
            per_piece: contour
                .pieces
                .iter()
                .map(|_| (0..k).map(|j| (j as f64 / k as f64, (j + 1) as f64 / k as f64)).collect())
                .collect(),
        }
    }

    /// Split every panel in two.
    pub fn refined(&self) -> Self {
        Panels {
            per_piece: self
                .per_piece
                .iter()
                .map(|v| {
                    v.iter()
                        .flat_map(|&(a, b)| {
                            let m = 0.5 * (a + b);
                            [(a, m), (m, b)]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.per_piece.iter().map(|v| v.len()).sum()
    }
}

/// Nodes and complex weights (`w_k dz/dt` times the panel half-width).
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<C>,
    pub weights: Vec<C>,
}

impl Rule {
    pub fn new(contour: &Contour, panels: &Panels) -> Self {
        let mut nodes = Vec::with_capacity(panels.count() * 16);
        let mut weights = Vec::with_capacity(panels.count() * 16);
        for (piece, list) in contour.pieces.iter().zip(&panels.per_piece) {
            for &(a, b) in list {
                let h = 0.5 * (b - a);
                let m = 0.5 * (a + b);
                for k in 0..16 {
                    let t = m + h * GL_X[k];
                    nodes.push(piece.point(t));
                    weights.push(piece.tangent(t) * (h * GL_W[k]));
                }
            }
        }
        Rule { nodes, weights }
    }

    pub fn integrate<F: Fn(C) -> C>(&self, f: F) -> C {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| f(z) * w).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[inline]
fn panel_sum<F: Fn(C) -> C>(piece: &crate::contour::Piece, a: f64, b: f64, f: &F) -> (C, f64) {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let mut s = C::new(0.0, 0.0);
    let mut s_abs = 0.0;
    for k in 0..16 {
        let t = m + h * GL_X[k];
        let v = f(piece.point(t)) * piece.tangent(t) * (h * GL_W[k]);
        s += v;
        s_abs += v.norm();
    }
    (s, s_abs)
}

/// Adaptive bisection of each piece until the panel-versus-halves
/// discrepancy is below `tol` (distributed by parameter length).
pub fn adapt<F: Fn(C) -> C>(contour: &Contour, f: &F, tol: f64, initial: usize) -> Result<(Panels, QuadResult)> {
    let npieces = contour.pieces.len() as f64;
    let mut per_piece = Vec::with_capacity(contour.pieces.len());
    let mut total = C::new(0.0, 0.0);
    let mut err = 0.0;
    let mut count = 0usize;
    let mut failed = false;
    for piece in &contour.pieces {
        let mut done = Vec::new();
        let mut stack: Vec<(f64, f64, u32)> = (0..initial)
            .rev()
            .map(|j| (j as f64 / initial as f64, (j + 1) as f64 / initial as f64, 0))
            .collect();
        while let Some((a, b, depth)) = stack.pop() {
            let m = 0.5 * (a + b);
            let (whole, mass) = panel_sum(piece, a, b, f);
            let (l, _) = panel_sum(piece, a, m, f);
            let (r, _) = panel_sum(piece, m, b, f);
            let diff = (whole - (l + r)).norm();
            let local_tol = (tol * (b - a) / npieces).max(ROUNDOFF * mass);
            if diff <= local_tol || depth >= MAX_DEPTH || count > MAX_PANELS {
                if diff > local_tol {
                    failed = true;
                }
                done.push((a, m));
                done.push((m, b));
                total += l + r;
                err += diff;
                count += 2;
            } else {
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        done.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        per_piece.push(done);
    }
    let res = QuadResult { value: total, err };
    if failed || !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::Quadrature {
            msg: format!("no convergence after {count} panels"),
            estimate: total,
            err,
        });
    }
    Ok((Panels { per_piece }, res))
}

/// Adaptive contour integral with absolute error estimate at most `tol`.
pub fn quad_contour<F: Fn(C) -> C>(f: F, contour: &Contour, tol: f64) -> Result<QuadResult> {
    adapt(contour, &f, tol, 4).map(|x| x.1)
}

/// Panels adapted to the envelope of `f`, with tolerance relative to its mass.
pub fn envelope_panels<F: Fn(C) -> C>(contour: &Contour, f: &F, rel: f64) -> Result<Panels> {
    let coarse = Rule::new(contour, &Panels::uniform(contour, 16));
    let mass: f64 = coarse.nodes.iter().zip(&coarse.weights).map(|(&z, &w)| (f(z) * w).norm()).sum();
    if !mass.is_finite() {
        return Err(Error::Quadrature {
            msg: "integrand not finite on the contour".into(),
            estimate: C::new(f64::NAN, f64::NAN),
            err: f64::INFINITY,
        });
    }
    let tol = (rel * mass).max(1e-300);
    adapt(contour, f, tol, 4).map(|x| x.0)
}

/// Separable double integral `∮∮ a(z) b(w) k(z, w) dz dw`.
///
/// Panels follow the envelopes of `a` and `b`; both rules are then refined
/// dyadically until two successive tensor sums agree to `tol` (absolute, or
/// relative once the value exceeds one).
pub fn double_integral<A, B, K>(
    cz: &Contour,
    cw: &Contour,
    a: A,
    b: B,
    k: K,
    tol: f64,
) -> Result<QuadResult>
where
    A: Fn(C) -> C,
    B: Fn(C) -> C,
    K: Fn(C, C) -> C,
{
    let rel = (1e-3 * tol).max(1e-13);
    let mut pz = envelope_panels(cz, &a, rel)?;
    let mut pw = envelope_panels(cw, &b, rel)?;
    let eval = |pz: &Panels, pw: &Panels| -> C {
        let rz = Rule::new(cz, pz);
        let rw = Rule::new(cw, pw);
        let az: Vec<C> = rz.nodes.iter().zip(&rz.weights).map(|(&z, &w)| a(z) * w).collect();
        let bw: Vec<C> = rw.nodes.iter().zip(&rw.weights).map(|(&z, &w)| b(z) * w).collect();
        let mut s = C::new(0.0, 0.0);
        for (j, &z) in rz.nodes.iter().enumerate() {
            if az[j] == C::new(0.0, 0.0) {
                continue;
            }
            let mut inner = C::new(0.0, 0.0);
            for (l, &w) in rw.nodes.iter().enumerate() {
                inner += bw[l] * k(z, w);
            }
            s += az[j] * inner;
        }
        s
    };
    let mut prev = eval(&pz, &pw);
    let mut last_err = f64::INFINITY;
    for _ in 0..4 {
        pz = pz.refined();
        pw = pw.refined();
        let cur = eval(&pz, &pw);
        let err = (cur - prev).norm();
        if err <= tol * cur.norm().max(1.0) {
            return Ok(QuadResult { value: cur, err });
        }
        last_err = err;
        prev = cur;
    }
    Err(Error::Quadrature { msg: "double integral refinement did not settle".into(), estimate: prev, err: last_err })
}
