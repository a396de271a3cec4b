//! Acceptance suite: one PASS/FAIL line per criterion. Criterion 10 is a
//! report and never fails.
//!
//! Runs without the libtest harness so the lines always reach stdout.

use std::time::{Duration, Instant};

use expfun::bgamma::{complex_gamma, eval_w};
use expfun::convolution::{cp_identity_rhs, verify_identity, TabulatedFunction};
use expfun::montecarlo::{mc_moment, mc_moments, JumpLaw, LevyKind, LevySpec, SimControl};
use expfun::series::{
    first_moment_closed_form, h_term, minus_two_moment_via_ode, moment, neg_int_moment, tail_bound, SeriesOptions,
};
use expfun::symmetric::{cp_half_neg_moment, CpVariant};
use expfun::{Bernstein, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(budget: Duration, elapsed: Duration) -> (bool, String) {
    (elapsed <= budget, format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), budget.as_secs_f64()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_zeta() -> Outcome {
    let pi = std::f64::consts::PI;
    let cases = [(1.0, pi * pi / 6.0), (2.0, 1.202_056_903_159_594_3), (3.0, pi.powi(4) / 90.0)];
    let opts = SeriesOptions::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (t, exact) in cases {
        let start = Instant::now();
        let v = neg_int_moment(&Bernstein::log1p(), -1, t, &opts).map(|r| r.value.re);
        let (in_time, time) = timed(Duration::from_secs(1), start.elapsed());
        match v {
            Ok(v) => {
                let e = rel(v, exact);
                pass &= e <= 1e-8 && in_time;
                parts.push(format!("t={t}: rel {e:.1e} in {time}"));
            }
            Err(err) => {
                pass = false;
                parts.push(format!("t={t}: {err}"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn c2_drift_only() -> Outcome {
    let spec = Bernstein::linear(1.0).unwrap();
    let opts = SeriesOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..30 {
        let z = C64::new(rng.random_range(-0.9..4.0), rng.random_range(-5.0..=5.0));
        let t: f64 = rng.random_range(0.1..=5.0);
        let exact = C64::new(-(-t).exp_m1(), 0.0).powc(z);
        match moment(&spec, z, t, &opts) {
            Ok(r) => worst = worst.max((r.value - exact).norm() / exact.norm()),
            Err(_) => errors += 1,
        }
    }
    let (in_time, time) = timed(Duration::from_secs(10), start.elapsed());
    outcome(worst <= 1e-10 && errors == 0 && in_time, format!("30 draws, max rel {worst:.1e}, {errors} errors, {time}"))
}

fn c3_integer_termination() -> Outcome {
    let specs =
        [("log1p", Bernstein::log1p()), ("power:0.5", Bernstein::power(0.5).unwrap()), ("loglog", Bernstein::loglog())];
    let opts = SeriesOptions::default();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (name, spec) in &specs {
        for n in 0..=3u32 {
            for t in [0.5, 1.0, 2.0] {
                let r = match moment(spec, C64::new(n as f64, 0.0), t, &opts) {
                    Ok(r) => r,
                    Err(e) => {
                        pass = false;
                        bad.push(format!("{name} z={n} t={t}: {e}"));
                        continue;
                    }
                };
                if r.nonzero_terms != n as usize + 1 {
                    pass = false;
                    bad.push(format!("{name} z={n}: {} terms", r.nonzero_terms));
                }
                if n == 1 {
                    let exact = first_moment_closed_form(spec, t).unwrap();
                    worst = worst.max(rel(r.value.re, exact));
                }
            }
        }
    }
    pass &= worst <= 1e-10;
    let mut detail = format!("term counts checked on 3 families x 3 horizons, z=1 max rel {worst:.1e}");
    if !bad.is_empty() {
        detail.push_str(&format!(" [{}]", bad.join(", ")));
    }
    outcome(pass, detail)
}

fn c4_recurrence() -> Outcome {
    let families = [
        ("log1p", Bernstein::log1p()),
        ("power", Bernstein::power(0.5).unwrap()),
        ("shifted_power", Bernstein::shifted_power(0.5).unwrap()),
        ("loglog", Bernstein::loglog()),
        ("truncated_gamma", Bernstein::truncated_gamma()),
        ("linear", Bernstein::linear(1.0).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, spec) in &families {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let z = C64::new(rng.random_range(0.05..10.0), rng.random_range(-10.0..=10.0));
            let res = (|| {
                let w1 = eval_w(spec, z + 1.0)?;
                let w = eval_w(spec, z)?;
                Ok::<f64, expfun::Error>((w1 - spec.eval(z)? * w).norm() / w1.norm())
            })();
            match res {
                Ok(r) => worst = worst.max(r),
                Err(_) => worst = f64::INFINITY,
            }
        }
        pass &= worst <= 1e-10;
        parts.push(format!("{name} {worst:.1e}"));
    }
    let linear = Bernstein::linear(1.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut drawn = 0;
    while drawn < 200 {
        let z = C64::new(rng.random_range(-20.0..=20.0), rng.random_range(-20.0..=20.0));
        // stay clear of the poles of Gamma
        if z.norm() > 20.0 || (z.re <= 0.5 && (z - z.re.round()).norm() < 0.05) {
            continue;
        }
        drawn += 1;
        let g = complex_gamma(z).unwrap();
        worst = match eval_w(&linear, z) {
            Ok(w) => worst.max((w - g).norm() / g.norm()),
            Err(_) => f64::INFINITY,
        };
    }
    pass &= worst <= 1e-10;
    parts.push(format!("linear W vs Gamma on |z| <= 20: {worst:.1e}"));
    outcome(pass, format!("max residual per family: {}", parts.join(", ")))
}

fn c5_brownian_half() -> Outcome {
    let spec = LevySpec::new(LevyKind::Brownian { sigma2: 1.0 }, 0.0).unwrap();
    let h = 1.0 / 4096.0;
    let ctrl = SimControl { step: h, ..SimControl::for_kind(&spec.kind, 5) };
    let start = Instant::now();
    let e = mc_moment(&spec, C64::new(-0.5, 0.0), 1.0, 1_000_000, &ctrl).unwrap();
    let (in_time, time) = timed(Duration::from_secs(120), start.elapsed());
    let allowance = 3.0 * e.stderr + h.sqrt();
    let gap = (e.mean.re - 1.0).abs();
    outcome(
        gap <= allowance && in_time,
        format!(
            "mean {:.5} (stderr {:.1e}), |gap| {gap:.2e} vs allowance {allowance:.2e}, {time}",
            e.mean.re, e.stderr
        ),
    )
}

fn c6_gamma_mc() -> Outcome {
    let spec = LevySpec::new(LevyKind::GammaSubordinator, 0.0).unwrap();
    let zs = [-1.0, -0.5, 0.5, 2.0].map(|z| C64::new(z, 0.0));
    let ts = [0.5, 1.0, 2.0];
    let start = Instant::now();
    let est = mc_moments(&spec, &zs, &ts, 1_000_000, &SimControl::for_kind(&spec.kind, 6)).unwrap();
    let opts = SeriesOptions { tol: 1e-7, ..SeriesOptions::default() };
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (zi, &z) in zs.iter().enumerate() {
        for (ti, &t) in ts.iter().enumerate() {
            let e = &est[zi][ti];
            let exact = match moment(&Bernstein::log1p(), z, t, &opts) {
                Ok(r) => r.value.re,
                Err(_) => {
                    pass = false;
                    continue;
                }
            };
            let score = (e.mean.re - exact).abs() / e.stderr;
            worst = worst.max(score);
            pass &= score <= 3.0;
        }
    }
    let (in_time, time) = timed(Duration::from_secs(300), start.elapsed());
    outcome(pass && in_time, format!("12 cases, worst {worst:.2} stderr, {}, {time}", est[0][0].scheme))
}

fn c7_convolution() -> Outcome {
    let curve = TabulatedFunction::from_fn(|t: f64| C64::new(t.powf(-0.5), 0.0), 1.0, 4096, -0.5).unwrap();
    let z = C64::new(0.5, 0.0);
    let r = verify_identity(&curve, &curve, z, 1.0, None).unwrap();
    // frozen high-precision values of the compound Poisson right side
    let cp = [
        (1.0, 1.0, 0.5, 3.320_551_816_031_799),
        (0.5, 2.0, 0.5, 7.471_241_586_071_548),
        (3.0, 0.25, 0.3, 1.196_781_656_013_618),
        (1e-3, 1.0, 0.5, 1.572_890_590_631_281_8),
        (2.0, 1e-3, 0.7, 1.745_121_748_124_799e-5),
    ];
    let cp_worst =
        cp.iter().map(|&(l, t, z, v)| rel(cp_identity_rhs(C64::new(z, 0.0), l, t).re, v)).fold(0.0, f64::max);
    outcome(
        r.abs_residual <= 1e-4 && cp_worst <= 1e-10,
        format!("residual vs pi {:.1e}, compound Poisson rhs max rel {cp_worst:.1e}", r.abs_residual),
    )
}

/// `|sum_{k > l} H(z, k) e^{-phi(k) t}|` for each `l`, from the full moment.
fn remainders(spec: &Bernstein, z: C64, ls: &[usize], t: f64) -> (Vec<f64>, f64) {
    let opts = SeriesOptions { k_max: 4096, allow_unconverged: true, ..Default::default() };
    let full = moment(spec, z, t, &opts).unwrap();
    let mut partial = expfun::bgamma::mellin_infinity(spec, z).unwrap();
    let mut out = Vec::new();
    let mut k = 1;
    for &l in ls {
        while k <= l {
            partial += h_term(spec, z, k).unwrap() * (-spec.eval_real(k as f64).unwrap() * t).exp();
            k += 1;
        }
        out.push((full.value - partial).norm());
    }
    (out, full.tail_certificate + 1e-13 * full.value.norm())
}

fn c8_tail_bound() -> Outcome {
    let cases = [
        ("linear", Bernstein::linear(1.0).unwrap(), [(-0.5, 0.0), (0.5, 0.0), (2.5, 0.0), (1.0, 2.0)]),
        ("log1p", Bernstein::log1p(), [(-1.0, 0.0), (-0.5, 0.0), (0.5, 0.0), (0.3, 1.0)]),
    ];
    let consts = SeriesOptions::<f64>::default().tail;
    let ls: Vec<usize> = (10..=200).step_by(10).collect();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (_, spec, zs) in &cases {
        for (re, im) in zs {
            let z = C64::new(*re, *im);
            for t in [0.5, 1.0, 2.0] {
                let (truth, noise) = remainders(spec, z, &ls, t);
                for (&l, r) in ls.iter().zip(truth) {
                    let bound = tail_bound(spec, z, l, t, consts).unwrap();
                    checked += 1;
                    if r > bound + noise {
                        violations += 1;
                    }
                    if r > noise {
                        worst = worst.max(r / bound);
                    }
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{checked} (z, t, l) cases, {violations} violations, max remainder/bound {worst:.3}"),
    )
}

fn c9_ode() -> Outcome {
    let spec = Bernstein::truncated_gamma();
    let opts = SeriesOptions::default();
    let dt = 1e-3;
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [0.5, 1.0] {
        let direct = neg_int_moment(&spec, -2, t, &opts).unwrap().value.re;
        let ode = minus_two_moment_via_ode(&spec, t, dt, &opts).unwrap();
        let e = rel(ode, direct);
        pass &= e <= 10.0 * dt * dt;
        parts.push(format!("t={t}: rel {e:.1e}"));
    }
    outcome(pass, format!("{} (limit {:.0e})", parts.join("; "), 10.0 * dt * dt))
}

fn c10_cp_report() -> String {
    let spec = LevySpec::new(LevyKind::SymmetricCompoundPoisson { rate: 1.0, jumps: JumpLaw::Normal { sd: 1.0 } }, 0.0)
        .unwrap();
    let e = mc_moment(&spec, C64::new(-0.5, 0.0), 1.0, 1_000_000, &SimControl::for_kind(&spec.kind, 10)).unwrap();
    let mut lines = vec![format!("MC mean {:.5} (stderr {:.1e})", e.mean.re, e.stderr)];
    let candidates = [
        ("paper", cp_half_neg_moment(1.0, 1.0, CpVariant::Paper).unwrap()),
        ("laplace_derived", cp_half_neg_moment(1.0, 1.0, CpVariant::LaplaceDerived).unwrap()),
        ("t^-1/2", 1.0),
    ];
    for (name, value) in candidates {
        let score = (e.mean.re - value).abs() / e.stderr;
        let verdict = if score <= 3.0 { "within" } else { "outside" };
        lines.push(format!("{name} {value:.5}: {score:.1} stderr, {verdict} 3 stderr"));
    }
    lines.join("; ")
}

fn main() {
    // `cargo test -- --list` and filters are not supported; run everything.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let gates: [(u8, &str, Check); 9] = [
        (1, "zeta identity", c1_zeta),
        (2, "drift-only closed form", c2_drift_only),
        (3, "integer termination", c3_integer_termination),
        (4, "Bernstein-gamma recurrence", c4_recurrence),
        (5, "Brownian half moment (MC)", c5_brownian_half),
        (6, "gamma subordinator MC vs series", c6_gamma_mc),
        (7, "convolution identity", c7_convolution),
        (8, "tail certificate soundness", c8_tail_bound),
        (9, "-2 moment ODE identity", c9_ode),
    ];
    let mut failed = Vec::new();
    for (n, name, check) in gates {
        let o = check();
        println!("criterion {n:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    }
    println!("criterion 10 REPORT: symmetric compound Poisson half moment: {}", c10_cp_report());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
