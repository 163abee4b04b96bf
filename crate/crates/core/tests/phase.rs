use approx::assert_relative_eq;
use hslpp_core::contour::build_contour_c;
use hslpp_core::kernels::{descent_report, search_theta_r, DescentOptions};
use hslpp_core::phase::{phase_eval, PhaseSpec, Which};
use hslpp_core::scaling::{kappa0, BulkScaling, EdgeScaling};
use hslpp_core::Complex64 as C;

fn re(spec: &PhaseSpec, which: Which, x: f64) -> f64 {
    phase_eval(spec, C::new(x, 0.0), which, 0).unwrap().re
}

/// Fourth-order central differences.
fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    richardson(|h| d2_raw(&f, x, h), h)
}

fn d3(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    richardson(|h| d3_raw(&f, x, h), h)
}

fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    (16.0 * d(0.5 * h) - d(h)) / 15.0
}

fn d2_raw(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h)
}

fn d3_raw(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 3.0 * h) + 8.0 * f(x + 2.0 * h) - 13.0 * f(x + h) + 13.0 * f(x - h) - 8.0 * f(x - 2.0 * h) + f(x - 3.0 * h))
        / (8.0 * h * h * h)
}

fn triples() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for q in [0.2, 0.35, 0.5, 0.65, 0.8] {
        for cf in [0.3, 0.7] {
            let c = 1.0 + (1.0 / q - 1.0) * cf;
            let k0 = kappa0(q, c);
            for kf in [0.1, 0.3, 0.5, 0.7, 0.9] {
                out.push((q, c, k0 + (1.0 - k0) * kf));
            }
        }
    }
    out
}

#[test]
fn centred_values_vanish_at_the_anchor() {
    let b = BulkScaling::new(0.5, 1.4, 0.36).unwrap();
    let s1 = PhaseSpec::bulk(&b);
    let z = C::new(b.zc, 0.0);
    assert!(phase_eval(&s1, z, Which::SCentered, 0).unwrap().norm() < 1e-15);
    assert!(phase_eval(&s1, z, Which::GCentered, 0).unwrap().norm() < 1e-15);
    assert!(phase_eval(&s1, C::new(0.0, 0.0), Which::S, 0).is_err());
    assert!(phase_eval(&s1, C::new(0.5, 0.0), Which::S, 0).is_err());
    assert!(phase_eval(&s1, z, Which::S, 4).is_err());
}

#[test]
fn critical_point_and_taylor_coefficients() {
    for (q, c, kappa) in triples() {
        let b = BulkScaling::new(q, c, kappa).unwrap();
        let e = EdgeScaling::new(q, c).unwrap();
        let s1 = PhaseSpec::bulk(&b);
        let s2 = PhaseSpec::edge(&e, kappa);
        let zc = C::new(b.zc, 0.0);
        let cc = C::new(c, 0.0);
        for (which, k) in [(Which::S, 1), (Which::S, 2), (Which::G, 1)] {
            assert!(phase_eval(&s1, zc, which, k).unwrap().norm() < 1e-9, "{q} {c} {kappa} {which:?} {k}");
        }
        for (which, k) in [(Which::S, 1), (Which::G, 1)] {
            assert!(phase_eval(&s2, cc, which, k).unwrap().norm() < 1e-9);
        }
        let h = 0.05 * (b.zc - q).min(1.0 / q - b.zc);
        let s3 = 2.0 * b.sigma1.powi(3);
        assert_relative_eq!(phase_eval(&s1, zc, Which::S, 3).unwrap().re, s3, max_relative = 1e-9);
        assert_relative_eq!(d3(|x| re(&s1, Which::S, x), b.zc, h), s3, max_relative = 1e-6);
        let g2 = 2.0 * b.f1 * b.sigma1 * b.sigma1;
        assert_relative_eq!(phase_eval(&s1, zc, Which::G, 2).unwrap().re, g2, max_relative = 1e-9);
        assert_relative_eq!(d2(|x| re(&s1, Which::G, x), b.zc, h), g2, max_relative = 1e-6);
        let h = 0.05 * (c - q).min(1.0 / q - c);
        let s22 = e.sigma2 * e.sigma2 * (kappa - e.kappa0) / (c * c);
        assert_relative_eq!(phase_eval(&s2, cc, Which::S, 2).unwrap().re, s22, max_relative = 1e-9);
        assert_relative_eq!(d2(|x| re(&s2, Which::S, x), c, h), s22, max_relative = 1e-6);
        let g22 = e.sigma2 * e.sigma2 / (c * c);
        assert_relative_eq!(phase_eval(&s2, cc, Which::G, 2).unwrap().re, g22, max_relative = 1e-9);
        assert_relative_eq!(d2(|x| re(&s2, Which::G, x), c, h), g22, max_relative = 1e-6);
    }
}

#[test]
fn analytic_derivatives_match_complex_differences() {
    let b = BulkScaling::new(0.5, 1.4, 0.6).unwrap();
    let s = PhaseSpec::interpolating(0.5, 1.4, 0.6, 0.5 * (b.zc + 1.4)).unwrap();
    let z = C::new(0.9, 0.7);
    let h = 1e-5;
    for which in [Which::S, Which::G] {
        for k in 1..=3u8 {
            let f = |w: C| phase_eval(&s, w, which, k - 1).unwrap();
            let fd = (f(z + h) - f(z - h)) / (2.0 * h);
            let an = phase_eval(&s, z, which, k).unwrap();
            assert!((fd - an).norm() < 1e-7 * (1.0 + an.norm()), "{which:?} {k}");
        }
    }
}

#[test]
fn interpolating_family_endpoints() {
    let b = BulkScaling::new(0.5, 1.4, 0.36).unwrap();
    let e = EdgeScaling::new(0.5, 1.4).unwrap();
    let lo = PhaseSpec::interpolating(0.5, 1.4, 0.36, b.zc).unwrap();
    let hi = PhaseSpec::interpolating(0.5, 1.4, 0.36, 1.4).unwrap();
    let (s1, s2) = (PhaseSpec::bulk(&b), PhaseSpec::edge(&e, 0.36));
    assert_relative_eq!(lo.h, s1.h, max_relative = 1e-12);
    assert_relative_eq!(lo.p, s1.p, max_relative = 1e-12);
    assert_relative_eq!(hi.h, s2.h, max_relative = 1e-12);
    assert_relative_eq!(hi.p, s2.p, max_relative = 1e-12);
    assert!(PhaseSpec::interpolating(0.5, 1.4, 0.36, 1.5).is_err());
}

#[test]
fn anchor_differences_have_fixed_signs() {
    for (q, c, kappa) in triples() {
        let b = BulkScaling::new(q, c, kappa).unwrap();
        let e = EdgeScaling::new(q, c).unwrap();
        let (s1, s2) = (PhaseSpec::bulk(&b), PhaseSpec::edge(&e, kappa));
        let at = |s: &PhaseSpec, x: f64| re(s, Which::S, x);
        assert!(at(&s1, b.zc) - at(&s1, c) < 0.0, "DiffS at {q} {c} {kappa}");
        assert!(at(&s2, b.zc) - at(&s2, c) > 0.0, "DiffS2 at {q} {c} {kappa}");
    }
}

#[test]
fn searched_contours_pass_descent_checks() {
    let (q, c, kappa) = (0.5, 1.4, 0.36);
    let tr = search_theta_r(q, c, kappa, 2000).unwrap();
    assert!((tr.theta - 0.45 * std::f64::consts::PI).abs() < 1e-12);
    let b = BulkScaling::new(q, c, kappa).unwrap();
    let e = EdgeScaling::new(q, c).unwrap();
    let opts = DescentOptions::new(c, tr.theta, 2000);
    let r1 = descent_report(&PhaseSpec::bulk(&b), &build_contour_c(b.zc, tr.theta, tr.r, 0.0).unwrap(), &opts);
    assert!(r1.ok(), "{:?}", r1.violations);
    assert!(r1.samples >= 2000);
    assert!(r1.max_re_s <= 0.0);
    assert!(r1.diff_s < 0.0 && r1.diff_s2 > 0.0);
    let r2 = descent_report(&PhaseSpec::edge(&e, kappa), &build_contour_c(c, tr.theta, tr.r, 0.0).unwrap(), &opts);
    assert!(r2.ok(), "{:?}", r2.violations);
}

#[test]
fn descent_fails_on_a_bad_contour() {
    let b = BulkScaling::new(0.5, 1.4, 0.36).unwrap();
    let opts = DescentOptions::new(1.4, 0.3, 500);
    let r = descent_report(&PhaseSpec::bulk(&b), &build_contour_c(b.zc, 0.3, 2.1, 0.0).unwrap(), &opts);
    assert!(!r.ok());
}
