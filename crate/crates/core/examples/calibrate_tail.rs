//! Ratio of `tail_bound` (with unit scale) to the true series remainder on
//! cases whose remainder is computable, and the scale needed to cover them.
//!
//! cargo run --release -p expfun --example calibrate_tail

use expfun::series::{h_term, moment, tail_bound, SeriesOptions, TailConstants};
use expfun::{Bernstein, C64};

/// `|sum_{k > l} H(z, k) e^{-phi(k) t}|` for every `l` in `ls`, as the gap
/// between the full moment and the partial sums.
fn remainders(spec: &Bernstein, z: C64, ls: &[usize], t: f64) -> Vec<f64> {
    let opts = SeriesOptions { k_max: 4096, allow_unconverged: true, ..Default::default() };
    let full = moment(spec, z, t, &opts).unwrap().value;
    let mut partial = expfun::bgamma::mellin_infinity(spec, z).unwrap();
    let mut out = Vec::new();
    let mut k = 1;
    for &l in ls {
        while k <= l {
            partial += h_term(spec, z, k).unwrap() * (-spec.eval_real(k as f64).unwrap() * t).exp();
            k += 1;
        }
        out.push((full - partial).norm());
    }
    out
}

fn main() {
    let unit = TailConstants { k_scale: 1.0, c: 1.0 };
    let cases = [
        (
            "linear",
            Bernstein::linear(1.0).unwrap(),
            vec![C64::new(-0.5, 0.0), C64::new(0.5, 0.0), C64::new(2.5, 0.0), C64::new(1.0, 2.0)],
        ),
        (
            "log1p",
            Bernstein::log1p(),
            vec![C64::new(-1.0, 0.0), C64::new(-0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.3, 1.0)],
        ),
    ];
    let mut need: f64 = 0.0;
    for (name, spec, zs) in &cases {
        for &z in zs {
            for t in [0.5, 1.0, 2.0] {
                let ls: Vec<usize> = (10..=200).step_by(10).collect();
                let mut worst: f64 = 0.0;
                for (&l, truth) in ls.iter().zip(remainders(spec, z, &ls, t)) {
                    let bound = tail_bound(spec, z, l, t, unit).unwrap();
                    if truth > 1e-13 {
                        worst = worst.max(truth / bound);
                    }
                }
                println!("{name:7} z={z:<8} t={t:<4} max remainder/bound = {worst:.3e}");
                need = need.max(worst);
            }
        }
    }
    println!("scale needed: {need:.3}; default k_scale = {}", TailConstants::<f64>::default().k_scale);
}
