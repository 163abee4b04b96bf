//! Phase functions `S` and `G` of the steepest-descent analysis.

use alloc::format;
use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::scaling::{BulkScaling, EdgeScaling};
use libm::sqrt;

/// `S(z) = log(1 - q/z) - κ log(1 - qz) - h log z`, `G(z) = -log(1 - qz) - p log z`,
/// both centred at the real anchor `pc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpec {
    pub q: f64,
    pub kappa: f64,
    pub pc: f64,
    pub h: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    S,
    G,
    SCentered,
    GCentered,
}

impl PhaseSpec {
    /// `S1`, `G1` anchored at `z_c`.
    pub fn bulk(b: &BulkScaling) -> Self {
        PhaseSpec { q: b.q, kappa: b.kappa, pc: b.zc, h: b.h1, p: b.p1 }
    }

    /// `S2(κ, ·)`, `G2` anchored at `c`.
    pub fn edge(e: &EdgeScaling, kappa: f64) -> Self {
        PhaseSpec { q: e.q, kappa, pc: e.c, h: e.h2(kappa), p: e.p2 }
    }

    /// Interpolating family anchored at any `pc` in `[z_c, c]`.
    pub fn interpolating(q: f64, c: f64, kappa: f64, pc: f64) -> Result<Self> {
        let b = BulkScaling::new(q, c, kappa)?;
        if !(pc >= b.zc - 1e-12 && pc <= c + 1e-12) {
            return Err(Error::Domain(format!("anchor {pc} outside [z_c, c] = [{}, {c}]", b.zc)));
        }
        let bb = sqrt(kappa);
        let h = (q * bb * bb * pc * pc - (q * q * bb * bb + q * q) * pc + q) / ((pc - q) * (1.0 - q * pc));
        Ok(PhaseSpec { q, kappa, pc, h, p: q * pc / (1.0 - q * pc) })
    }

    fn check(&self, z: C) -> Result<()> {
        let d = [z.norm(), (z - self.q).norm(), (z - 1.0 / self.q).norm()];
        if d.iter().any(|&x| x < 1e-300) {
            return Err(Error::Singular(format!("phase function at z = {z}")));
        }
        Ok(())
    }

    /// `S(z)` with principal logarithms.
    pub fn s(&self, z: C) -> C {
        let one = C::new(1.0, 0.0);
        (one - self.q / z).ln() - self.kappa * (one - self.q * z).ln() - self.h * z.ln()
    }

    /// `G(z)` with principal logarithms.
    pub fn g(&self, z: C) -> C {
        let one = C::new(1.0, 0.0);
        -(one - self.q * z).ln() - self.p * z.ln()
    }

    pub fn s_critical(&self) -> f64 {
        self.s(C::new(self.pc, 0.0)).re
    }

    pub fn g_critical(&self) -> f64 {
        self.g(C::new(self.pc, 0.0)).re
    }

    /// Derivative of `S` of order 1..=3 from the partial-fraction form.
    pub fn s_derivative(&self, z: C, order: u8) -> C {
        let a = z - self.q;
        let b = z - 1.0 / self.q;
        let k = 1.0 + self.h;
        match order {
            1 => a.inv() - k / z - self.kappa / b,
            2 => -(a * a).inv() + k / (z * z) + self.kappa / (b * b),
            _ => 2.0 * (a * a * a).inv() - 2.0 * k / (z * z * z) - 2.0 * self.kappa / (b * b * b),
        }
    }

    /// Derivative of `G` of order 1..=3.
    pub fn g_derivative(&self, z: C, order: u8) -> C {
        let b = z - 1.0 / self.q;
        match order {
            1 => -b.inv() - self.p / z,
            2 => (b * b).inv() + self.p / (z * z),
            _ => -2.0 * (b * b * b).inv() - 2.0 * self.p / (z * z * z),
        }
    }
}

/// Value (order 0) or analytic derivative (orders 1..=3) of the selected function.
pub fn phase_eval(spec: &PhaseSpec, z: C, which: Which, order: u8) -> Result<C> {
    spec.check(z)?;
    if order > 3 {
        return Err(Error::Domain(format!("derivative order {order} > 3")));
    }
    Ok(match (which, order) {
        (Which::S, 0) => spec.s(z),
        (Which::SCentered, 0) => spec.s(z) - spec.s_critical(),
        (Which::G, 0) => spec.g(z),
        (Which::GCentered, 0) => spec.g(z) - spec.g_critical(),
        (Which::S | Which::SCentered, k) => spec.s_derivative(z, k),
        (Which::G | Which::GCentered, k) => spec.g_derivative(z, k),
    })
}
