//! Correlation kernels: `K^geo`, the prelimit kernels of both frames, and
//! the limiting extended Airy and Brownian kernels.

use num_complex::Complex64 as C;

mod airy;
mod descent;
mod geo;
mod prelimit;

pub use airy::{
    airy_kernel_ext, airy_kernel_ext_with, kbm, kbm_matrix, limit_bulk_k12, limit_bulk_k12_alt, AiryAnchors,
};
pub use descent::{
    descent_report, search_theta_r, DescentOptions, DescentReport, DescentViolation, ThetaR, THETA_GRID,
};
pub use geo::{kernel_geo, kernel_geo_with_radii, GeoRadii};
pub use prelimit::{
    build_bulk_contours, build_edge_contours, kernel_bulk_n, kernel_bulk_n_via_geo, kernel_edge_n,
    kernel_edge_n_via_geo, FramePoint, PrelimitContours,
};

/// A 2×2 matrix kernel value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel2x2 {
    pub k11: C,
    pub k12: C,
    pub k21: C,
    pub k22: C,
    pub err: f64,
}

impl Kernel2x2 {
    pub fn entry(&self, a: usize, b: usize) -> C {
        match (a, b) {
            (1, 1) => self.k11,
            (1, 2) => self.k12,
            (2, 1) => self.k21,
            _ => self.k22,
        }
    }

    /// Entrywise real parts.
    pub fn re(&self) -> [[f64; 2]; 2] {
        [[self.k11.re, self.k12.re], [self.k21.re, self.k22.re]]
    }
}

pub(crate) const INV_TWO_PI_I: C = C::new(0.0, -0.159_154_943_091_895_35);

/// `(2πi)^{-2} = -1/(4π²)`.
pub(crate) const INV_TWO_PI_I_SQ: f64 = -0.025_330_295_910_584_444;
