//! Numerical core for half-space geometric last passage percolation, its
//! Pfaffian Schur process, and the correlation kernels of the two scaling
//! regimes (Brownian top curve, Airy lower curves).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod contour;
pub mod gibbs;
pub mod kernels;
pub mod lpp;
pub mod pfaffian;
pub mod phase;
pub mod quad;
pub mod rng;
pub mod scaling;
pub mod schur;

pub use error::{Error, Result};
pub use num_complex::Complex64;
