use expfun::bgamma::eval_w;
use expfun::convolution::{convolve_singular, TabulatedFunction};
use expfun::montecarlo::{exp_functional, sample_path, JumpLaw, LevyKind, LevySpec, SimControl};
use expfun::series::{moment, SeriesOptions};
use expfun::symmetric::{half_pos_moment, n_minus_half_moment, ConvolutionGrid};
use expfun::{Bernstein, C64};
use proptest::prelude::*;

fn opts() -> SeriesOptions<f64> {
    SeriesOptions::default()
}

fn catalog() -> impl Strategy<Value = Bernstein> {
    prop_oneof![
        Just(Bernstein::log1p()),
        (0.2f64..0.9).prop_map(|a| Bernstein::power(a).unwrap()),
        (0.2f64..0.9).prop_map(|a| Bernstein::shifted_power(a).unwrap()),
        Just(Bernstein::loglog()),
        Just(Bernstein::truncated_gamma()),
        (0.2f64..5.0).prop_map(|d| Bernstein::linear(d).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_symmetry(re in -0.8f64..3.0, im in 0.1f64..4.0, t in 1.0f64..4.0, a in 0.3f64..0.8) {
        let spec = Bernstein::power(a).unwrap();
        let z = C64::new(re, im);
        let up = moment(&spec, z, t, &opts()).unwrap().value;
        let down = moment(&spec, z.conj(), t, &opts()).unwrap().value;
        prop_assert!((up - down.conj()).norm() <= 1e-12 * up.norm().max(1.0));
    }

    #[test]
    fn drift_scaling(re in -0.8f64..3.0, im in -2.0f64..2.0, t in 0.2f64..3.0, d in 0.3f64..3.0) {
        // I_d(t) = I_1(d t) / d
        let z = C64::new(re, im);
        let lhs = moment(&Bernstein::linear(d).unwrap(), z, t, &opts()).unwrap().value;
        let rhs = moment(&Bernstein::linear(1.0).unwrap(), z, d * t, &opts()).unwrap().value * C64::new(d, 0.0).powc(-z);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm());
    }

    #[test]
    fn moments_follow_the_horizon(z in prop_oneof![-0.9f64..-0.05, 0.05f64..3.0], t in 1.0f64..3.0) {
        // I(t) increases with t, so E[I^z(t)] moves with the sign of z
        let spec = Bernstein::log1p();
        let a = moment(&spec, C64::new(z, 0.0), t, &opts()).unwrap().value.re;
        let b = moment(&spec, C64::new(z, 0.0), t * 1.25, &opts()).unwrap().value.re;
        prop_assert!(if z > 0.0 { b > a } else { b < a }, "z={z} t={t}: {a} {b}");
    }

    #[test]
    fn log_convexity_in_z(z in -0.8f64..2.5, t in 1.0f64..3.0) {
        // Cauchy-Schwarz: E[I^z]^2 <= E[I^{z-h}] E[I^{z+h}]
        let spec = Bernstein::power(0.5).unwrap();
        let m = |x: f64| moment(&spec, C64::new(x, 0.0), t, &opts()).unwrap().value.re;
        let h = 0.1;
        prop_assert!(m(z).powi(2) <= m(z - h) * m(z + h) * (1.0 + 1e-12));
    }

    #[test]
    fn recurrence_on_catalog(spec in catalog(), re in 0.05f64..8.0, im in -6.0f64..6.0) {
        let z = C64::new(re, im);
        let w1 = eval_w(&spec, z + 1.0).unwrap();
        let w = eval_w(&spec, z).unwrap();
        prop_assert!((w1 - spec.eval(z).unwrap() * w).norm() <= 1e-10 * w1.norm());
    }

    #[test]
    fn convolution_is_symmetric(a in -1.0f64..1.0, b in 0.1f64..2.0, t in 0.2f64..2.0, n in 64usize..600) {
        let f = TabulatedFunction::from_fn(|s: f64| C64::new(s.powf(-0.5) * (a * s).exp(), 0.0), 2.0, n, -0.5).unwrap();
        let g = TabulatedFunction::from_fn(|s: f64| C64::new(1.0 + b * s, -s), 2.0, 257, 0.0).unwrap();
        let fg = convolve_singular(&f, &g, t).unwrap();
        let gf = convolve_singular(&g, &f, t).unwrap();
        prop_assert!((fg - gf).norm() <= 1e-12 * fg.norm());
    }

    #[test]
    fn half_pos_brownian_scaling(sigma2 in 0.1f64..3.0, t in 0.1f64..3.0, c in 0.2f64..4.0) {
        // B(c s) = sqrt(c) B(s): I(c t) = c I_{c sigma^2}(t)
        let psi = |s2: f64| s2 / 8.0;
        let lhs = half_pos_moment(psi(sigma2), c * t).unwrap();
        let rhs = c.sqrt() * half_pos_moment(psi(c * sigma2), t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn n_minus_half_is_increasing_in_t(s2 in 0.2f64..2.0, t in 0.3f64..2.0) {
        let psi: Vec<f64> = (1..=2).map(|k| 0.5 * s2 * (k as f64 - 0.5).powi(2)).collect();
        let grid = |t: f64| ConvolutionGrid { span: t, cells: 512 };
        let a = n_minus_half_moment(&psi, t, grid(t)).unwrap();
        let b = n_minus_half_moment(&psi, 1.2 * t, grid(1.2 * t)).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn subordinator_paths_are_bounded(seed in any::<u64>(), t in 0.1f64..3.0, which in 0usize..3) {
        let kind = match which {
            0 => LevyKind::GammaSubordinator,
            1 => LevyKind::CompoundPoissonSubordinator { rate: 3.0, jumps: JumpLaw::Exponential { rate: 2.0 }, drift: 0.5 },
            _ => LevyKind::TruncatedCustomSubordinator { spec: Bernstein::power(0.5).unwrap(), eps: 1e-3 },
        };
        let spec = LevySpec::new(kind, 0.0).unwrap();
        let ctrl = SimControl { step: 1.0 / 64.0, ..SimControl::for_kind(&spec.kind, seed) };
        let path = sample_path(&spec, t, &ctrl, 0).unwrap();
        let levels_rise = path.levels.windows(2).all(|w| w[1] >= w[0]);
        prop_assert!(levels_rise && path.slopes.iter().all(|&m| m >= 0.0));
        let half = exp_functional(&path, 0.5 * t);
        let full = exp_functional(&path, t);
        prop_assert!(half > 0.0 && half <= full && full <= t);
    }
}
