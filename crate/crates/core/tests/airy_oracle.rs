mod support;

use support::airy::{airy, airy_integral, airy_kernel};

#[test]
fn reference_values() {
    let cases = [
        (0.0, 0.355_028_053_887_817, -0.258_819_403_792_807),
        (1.0, 0.135_292_416_312_881, -0.159_147_441_296_793),
        (-2.0, 0.227_407_428_201_686, 0.618_259_020_741_691),
        (2.0, 0.034_924_130_423_274_4, -0.053_090_384_433_653_6),
        (-4.0, -0.070_265_532_949_289_5, -0.790_628_575_368_581),
        (5.0, 0.000_108_344_428_136_074, -0.000_247_413_890_868_462),
        (6.0, 9.947_694_360_252_89e-6, -2.476_520_039_703_5e-5),
    ];
    for (x, a, d) in cases {
        let (ai, aip) = airy(x);
        assert!((ai - a).abs() < 1e-12 * (1.0 + a.abs()), "Ai({x}) = {ai}");
        assert!((aip - d).abs() < 1e-11 * (1.0 + d.abs()), "Ai'({x}) = {aip}");
    }
}

#[test]
fn branches_agree_at_the_switch() {
    let (a, b) = (airy(5.0 - 1e-12), airy(5.0 + 1e-12));
    assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10, "{a:?} {b:?}");
}

#[test]
fn kernel_forms_agree() {
    for (x, y) in [(0.0, 0.0), (0.0, 1.0), (-1.0, 2.0), (0.5, 0.5)] {
        assert!((airy_kernel(x, y) - airy_integral(0.0, x, y)).abs() < 1e-10, "{x} {y}");
    }
}
