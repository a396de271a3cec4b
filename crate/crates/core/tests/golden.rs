//! Reference values computed independently at 40 significant digits and
//! rounded to double precision.

use expfun::bgamma::{complex_gamma, eval_w, gamma_phi};
use expfun::series::{moment, neg_int_moment, SeriesOptions};
use expfun::symmetric::{cp_half_neg_moment, half_pos_moment, n_minus_half_moment, ConvolutionGrid, CpVariant};
use expfun::{Bernstein, C64};

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm()
}

#[test]
fn gamma_function() {
    let g = complex_gamma(C64::new(-2.5, 0.5)).unwrap();
    assert!(close(g, C64::new(-0.333_875_203_522_432_34, -0.206_457_307_963_608_41), 1e-13), "{g}");
    let g = complex_gamma(C64::new(2.5, 0.0)).unwrap();
    assert!(close(g, C64::new(1.329_340_388_179_137, 0.0), 1e-14));
    let l = expfun::bgamma::ln_gamma(C64::new(3.0, -40.0)).unwrap();
    assert!(close(l, C64::new(-52.689_155_060_822_637, -111.405_132_415_459_97), 1e-13), "{l}");
}

#[test]
fn gamma_phi_values() {
    let cases = [
        (Bernstein::linear(1.0).unwrap(), 0.577_215_664_901_532_9),
        (Bernstein::log1p(), 0.794_678_645_452_899_4),
        (Bernstein::loglog(), 1.746_486_113_422_722_8),
    ];
    for (spec, v) in cases {
        let g = gamma_phi(&spec).unwrap();
        assert!((g - v).abs() < 1e-12, "{}: {g}", spec.family().name());
    }
}

#[test]
fn bernstein_gamma_values() {
    let log1p = Bernstein::log1p();
    let loglog = Bernstein::loglog();
    let cases = [
        (&log1p, C64::new(2.5, 0.0), C64::new(0.699_846_605_546_015_3, 0.0)),
        (&log1p, C64::new(1.5, 0.0), C64::new(0.763_782_259_495_923_2, 0.0)),
        (&log1p, C64::new(0.5, 1.0), C64::new(0.359_576_725_087_890_5, -0.587_207_139_884_163_6)),
        (&loglog, C64::new(2.5, 0.0), C64::new(0.173_807_022_644_339_53, 0.0)),
        (&loglog, C64::new(1.5, 0.0), C64::new(0.477_169_678_686_836_96, 0.0)),
        (&loglog, C64::new(0.5, 1.0), C64::new(-0.433_870_035_292_658, -0.977_122_357_056_101_4)),
        (&loglog, C64::new(3.0, 0.0), C64::new(0.119_684_436_543_865_57, 0.0)),
    ];
    for (spec, z, v) in cases {
        let w = eval_w(spec, z).unwrap();
        assert!(close(w, v, 1e-12), "{} at {z}: {w} vs {v}", spec.family().name());
    }
}

#[test]
fn negative_integer_sums() {
    let opts = SeriesOptions::default();
    let cases = [
        (Bernstein::log1p(), -1, 1.0, 1.644_934_066_848_226_4),
        (Bernstein::loglog(), -1, 1.0, 1.215_919_358_050_707_7),
        (Bernstein::loglog(), -2, 1.0, 1.736_297_106_562_112_7),
        (Bernstein::truncated_gamma(), -1, 0.5, 2.353_942_185_769_977_8),
        (Bernstein::truncated_gamma(), -2, 1.0, 2.060_465_036_135_889),
    ];
    for (spec, l, t, v) in cases {
        let r = neg_int_moment(&spec, l, t, &opts).unwrap();
        assert!((r.value.re - v).abs() < 1e-12 * v, "{} l={l}: {}", spec.family().name(), r.value.re);
        assert!(r.converged);
    }
}

#[test]
fn first_moment_of_log1p() {
    // E[I(1)] = (1 - e^{-ln 2}) / ln 2
    let r = moment(&Bernstein::log1p(), C64::new(1.0, 0.0), 1.0, &SeriesOptions::default()).unwrap();
    assert!((r.value.re - 0.721_347_520_444_481_7).abs() < 1e-14);
}

#[test]
fn symmetric_values() {
    let v = half_pos_moment(0.125, 1.0).unwrap();
    assert!((v - 1.087_653_038_904_301_4f64).abs() < 1e-13);
    let v = cp_half_neg_moment(1.0, 1.0, CpVariant::Paper).unwrap();
    assert!((v - 3.814_884_376_483_510_5f64).abs() < 1e-13);
    let v = n_minus_half_moment(&[0.125, 1.125], 1.0, ConvolutionGrid::for_horizon(1.0)).unwrap();
    assert!((v - 1.713_184_126_171_955_4f64).abs() < 1e-9, "{v}");
}
