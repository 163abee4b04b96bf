//! Airy function oracle: Maclaurin series on `|x| <= 5`, asymptotic
//! expansion for `x > 5`.

use std::f64::consts::PI;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

fn series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut fp) = (0.0, 0.0);
    let (mut g, mut gp) = (0.0, 0.0);
    let mut a = 1.0;
    let mut p = x * x / 6.0;
    let mut v = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        f += a;
        g += v * x;
        gp += (3.0 * kf + 1.0) * v;
        if k >= 1 {
            fp += 3.0 * kf * p;
            p *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        }
        a *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        v *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        if a.abs() + v.abs() < 1e-18 * (f.abs() + g.abs()) && k > 3 {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

fn asymptotic(x: f64) -> (f64, f64) {
    let z = 2.0 / 3.0 * x.powf(1.5);
    let (mut s, mut sp) = (0.0, 0.0);
    let mut u = 1.0;
    let mut term: f64 = 1.0;
    for k in 0..30 {
        let kf = k as f64;
        if k > 0 {
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (216.0 * kf * (2.0 * kf - 1.0));
            let next = u / z.powi(k);
            if next.abs() > term.abs() || next.abs() < 1e-17 {
                break;
            }
            term = next;
        }
        let v = if k == 0 { 1.0 } else { -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * term;
        sp += sign * v / z.powi(k);
    }
    let e = (-z).exp() / (2.0 * PI.sqrt());
    (e * s / x.powf(0.25), -e * x.powf(0.25) * sp)
}

/// `(Ai(x), Ai'(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    if x > 5.0 {
        asymptotic(x)
    } else {
        assert!(x >= -5.0, "oracle covers x >= -5");
        series(x)
    }
}

/// Equal-time Airy kernel in closed form.
pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, dx) = airy(x);
    if (x - y).abs() < 1e-9 {
        return dx * dx - x * ax * ax;
    }
    let (ay, dy) = airy(y);
    (ax * dy - dx * ay) / (x - y)
}

/// `∫_0^L e^{-λ d} Ai(x + λ) Ai(y + λ) dλ` by composite Simpson.
pub fn airy_integral(d: f64, x: f64, y: f64) -> f64 {
    let (len, n) = (30.0, 6000);
    let h = len / n as f64;
    let f = |l: f64| (-l * d).exp() * airy(x + l).0 * airy(y + l).0;
    let mut s = f(0.0) + f(len);
    for j in 1..n {
        s += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
