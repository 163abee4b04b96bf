//! Piecewise contours made of oriented segments and circular arcs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment { a: C, b: C },
    /// Arc `center + radius e^{iθ}` traversed from `theta0` to `theta1`.
    Arc { center: C, radius: f64, theta0: f64, theta1: f64 },
}

impl Piece {
    /// Point at parameter `t` in `[0, 1]`.
    #[inline]
    pub fn point(&self, t: f64) -> C {
        match *self {
            Piece::Segment { a, b } => a + (b - a) * t,
            Piece::Arc { center, radius, theta0, theta1 } => {
                center + C::from_polar(radius, theta0 + t * (theta1 - theta0))
            }
        }
    }

    /// `dz/dt` at parameter `t`.
    #[inline]
    pub fn tangent(&self, t: f64) -> C {
        match *self {
            Piece::Segment { a, b } => b - a,
            Piece::Arc { radius, theta0, theta1, .. } => {
                let th = theta0 + t * (theta1 - theta0);
                C::new(0.0, 1.0) * C::from_polar(radius * (theta1 - theta0), th)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => (b - a).norm(),
            Piece::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    pub fn start(&self) -> C {
        self.point(0.0)
    }

    pub fn end(&self) -> C {
        self.point(1.0)
    }
}

/// Oriented piecewise path.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub pieces: Vec<Piece>,
    pub closed: bool,
}

impl Contour {
    /// Assemble pieces, checking that consecutive pieces join within 1e-12.
    pub fn new(pieces: Vec<Piece>, closed: bool) -> Result<Self> {
        for w in pieces.windows(2) {
            if (w[0].end() - w[1].start()).norm() > 1e-12 * (1.0 + w[1].start().norm()) {
                return Err(Error::Structure(format!(
                    "pieces do not join: {} vs {}",
                    w[0].end(),
                    w[1].start()
                )));
            }
        }
        if closed {
            let (f, l) = (pieces[0].start(), pieces[pieces.len() - 1].end());
            if (f - l).norm() > 1e-12 * (1.0 + f.norm()) {
                return Err(Error::Structure("closed contour does not close".into()));
            }
        }
        Ok(Contour { pieces, closed })
    }

    /// Counterclockwise circle.
    pub fn circle(center: C, radius: f64) -> Self {
        Contour {
            pieces: vec![Piece::Arc { center, radius, theta0: -PI, theta1: PI }],
            closed: true,
        }
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length()).sum()
    }

    /// `n` points spread over the pieces in proportion to their lengths.
    pub fn sample(&self, n: usize) -> Vec<C> {
        let total = self.length();
        let mut out = Vec::with_capacity(n + self.pieces.len());
        for p in &self.pieces {
            let k = libm::ceil((p.length() / total) * n as f64).max(1.0) as usize;
            for j in 0..k {
                out.push(p.point((j as f64 + 0.5) / k as f64));
            }
        }
        out
    }

    pub fn min_abs(&self, n: usize) -> f64 {
        self.sample(n).iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self, n: usize) -> f64 {
        self.sample(n).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Winding number about `a` from the accumulated argument increments.
    pub fn winding_number(&self, a: C) -> f64 {
        let mut total = 0.0;
        for p in &self.pieces {
            let steps = 4096;
            let mut prev = p.point(0.0) - a;
            for j in 1..=steps {
                let cur = p.point(j as f64 / steps as f64) - a;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        total / (2.0 * PI)
    }
}

fn ray_hit(x: f64, dir: C, r: f64, big_r: f64) -> Option<f64> {
    let b = x * dir.re;
    let disc = big_r * big_r - x * x + b * b;
    if disc < 0.0 {
        return None;
    }
    let s = libm::sqrt(disc);
    [-b - s, -b + s].into_iter().filter(|&rho| rho >= r - 1e-14).fold(None, |acc: Option<f64>, v| {
        Some(acc.map_or(v, |a| a.min(v)))
    })
}

/// The wedge contour `C(x, θ, R, r)`: segments `ζ⁻ → z⁻ → z⁺ → ζ⁺` with
/// `z± = x + r e^{±iθ}`, closed by the counterclockwise arc of `|z| = R` from
/// `ζ⁺` to `ζ⁻`. For `r = 0` the middle segment is dropped.
pub fn build_contour_c(x: f64, theta: f64, big_r: f64, r: f64) -> Result<Contour> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(format!("angle {theta} must lie in (0, π)")));
    }
    if !(r >= 0.0) || !(big_r > 0.0) || !(x > 0.0) {
        return Err(Error::Domain(format!("need x > 0, R > 0, r >= 0 (x={x}, R={big_r}, r={r})")));
    }
    let up = C::from_polar(1.0, theta);
    let down = up.conj();
    let zp = C::new(x, 0.0) + up * r;
    let zm = C::new(x, 0.0) + down * r;
    let rho = ray_hit(x, up, r, big_r)
        .ok_or_else(|| Error::Domain(format!("ray from {zp} never meets |z| = {big_r}")))?;
    if rho <= r + 1e-14 {
        return Err(Error::Domain(format!("circle |z| = {big_r} does not reach beyond the chord")));
    }
    let zeta_p = C::new(x, 0.0) + up * rho;
    let zeta_m = zeta_p.conj();
    let phi = zeta_p.arg();
    let mut pieces = vec![Piece::Segment { a: zeta_m, b: zm }];
    if r > 0.0 {
        pieces.push(Piece::Segment { a: zm, b: zp });
    }
    pieces.push(Piece::Segment { a: zp, b: zeta_p });
    pieces.push(Piece::Arc { center: C::new(0.0, 0.0), radius: big_r, theta0: phi, theta1: 2.0 * PI - phi });
    Contour::new(pieces, true)
}

/// Open contour `C_a^φ` from `a + L e^{-iφ}` through `a` to `a + L e^{iφ}`.
pub fn wedge_rays(a: C, phi: f64, len: f64) -> Contour {
    let up = C::from_polar(len, phi);
    Contour {
        pieces: vec![
            Piece::Segment { a: a + up.conj(), b: a },
            Piece::Segment { a, b: a + up },
        ],
        closed: false,
    }
}

/// Open contour `C_a^φ[r]`: the rays of `C_a^φ` outside `|z - a| = r`,
/// joined by the vertical chord inside.
pub fn wedge_rays_chord(a: C, phi: f64, r: f64, len: f64) -> Contour {
    let up = C::from_polar(1.0, phi);
    let (zp, zm) = (a + up * r, a + up.conj() * r);
    Contour {
        pieces: vec![
            Piece::Segment { a: a + up.conj() * len, b: zm },
            Piece::Segment { a: zm, b: zp },
            Piece::Segment { a: zp, b: a + up * len },
        ],
        closed: false,
    }
}
