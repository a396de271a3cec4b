//! Path simulation of Lévy processes and Monte-Carlo estimates of
//! `E[I^z(t)]`, `I(t) = \int_0^{min(t, e_q)} e^{-xi_s} ds`.
//!
//! Paths are generated in batches of [`BATCH`] with a ChaCha8 stream per
//! batch, so an estimate depends only on the seed, never on the thread count.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinSpec;
use crate::error::{Error, Result};
use crate::quad::{integrate_real, QuadOptions};
use crate::special::EULER_GAMMA;

/// Paths per independent random stream.
pub const BATCH: usize = 1024;

/// Jump-size distribution of a compound Poisson process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum JumpLaw {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    Fixed { size: f64 },
    Normal { sd: f64 },
    Laplace { scale: f64 },
    Uniform { half_width: f64 },
}

impl JumpLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            JumpLaw::Exponential { rate } => rate > 0.0,
            JumpLaw::Gamma { shape, rate } => shape > 0.0 && rate > 0.0,
            JumpLaw::Fixed { size } => size.is_finite(),
            JumpLaw::Normal { sd } => sd > 0.0,
            JumpLaw::Laplace { scale } => scale > 0.0,
            JumpLaw::Uniform { half_width } => half_width > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid jump law {self:?}")))
        }
    }

    fn positive(&self) -> bool {
        match *self {
            JumpLaw::Exponential { .. } | JumpLaw::Gamma { .. } => true,
            JumpLaw::Fixed { size } => size > 0.0,
            _ => false,
        }
    }

    fn symmetric(&self) -> bool {
        matches!(self, JumpLaw::Normal { .. } | JumpLaw::Laplace { .. } | JumpLaw::Uniform { .. })
    }

    fn sampler(&self) -> JumpSampler {
        match *self {
            JumpLaw::Exponential { rate } => JumpSampler::Exp(Exp::new(rate).unwrap()),
            JumpLaw::Gamma { shape, rate } => JumpSampler::Gamma(Gamma::new(shape, 1.0 / rate).unwrap()),
            JumpLaw::Fixed { size } => JumpSampler::Fixed(size),
            JumpLaw::Normal { sd } => JumpSampler::Normal(Normal::new(0.0, sd).unwrap()),
            JumpLaw::Laplace { scale } => JumpSampler::Laplace(Exp::new(1.0 / scale).unwrap()),
            JumpLaw::Uniform { half_width } => JumpSampler::Uniform(half_width),
        }
    }
}

enum JumpSampler {
    Exp(Exp<f64>),
    Gamma(Gamma<f64>),
    Fixed(f64),
    Normal(Normal<f64>),
    Laplace(Exp<f64>),
    Uniform(f64),
    Table(JumpTable),
}

impl JumpSampler {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            JumpSampler::Exp(d) => d.sample(rng),
            JumpSampler::Gamma(d) => d.sample(rng),
            JumpSampler::Fixed(v) => *v,
            JumpSampler::Normal(d) => d.sample(rng),
            JumpSampler::Laplace(d) => {
                let v = d.sample(rng);
                if rng.random::<bool>() {
                    v
                } else {
                    -v
                }
            }
            JumpSampler::Uniform(a) => (2.0 * rng.random::<f64>() - 1.0) * a,
            JumpSampler::Table(t) => t.sample(rng),
        }
    }
}

/// Jumps of size `>= eps` drawn from a Lévy density: masses on a log grid,
/// power-law interpolation inside each cell and a Pareto cell at the top.
struct JumpTable {
    edges: Vec<f64>,
    cumulative: Vec<f64>,
    slopes: Vec<f64>,
    total: f64,
}

impl JumpTable {
    const CELLS_PER_DECADE: usize = 64;

    fn build(density: &dyn Fn(f64) -> f64, eps: f64) -> Result<Self> {
        // upper end: where y mu(y) is negligible or, for heavy tails, 1e12
        let mut hi = eps.max(1.0);
        while hi < 1e12 && density(hi) * hi > 1e-18 {
            hi *= 2.0;
        }
        let decades = (hi / eps).log10().max(1.0);
        let n = (decades * Self::CELLS_PER_DECADE as f64).ceil() as usize;
        let ratio = (hi / eps).powf(1.0 / n as f64);
        let edges: Vec<f64> = (0..=n).map(|i| eps * ratio.powi(i as i32)).collect();
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_pieces: 200 };
        let mut cumulative = vec![0.0];
        let mut slopes = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mass = integrate_real(|s: f64| density(a * s.exp()) * a * s.exp(), 0.0, (b / a).ln(), opts)?;
            let (da, db) = (density(a), density(b));
            let slope = if da > 0.0 && db > 0.0 { (db / da).ln() / (b / a).ln() } else { -1.0 };
            slopes.push(slope);
            acc += mass;
            cumulative.push(acc);
        }
        // heavy tail above hi, continued with the last slope
        let last = *slopes.last().unwrap_or(&-2.0);
        if density(hi) > 0.0 && last < -1.0 {
            let tail = density(hi) * hi / (-1.0 - last);
            acc += tail;
            cumulative.push(acc);
            slopes.push(last);
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(Error::InvalidSpec(format!("jump mass above {eps} is {acc}")));
        }
        Ok(Self { edges, cumulative, slopes, total: acc })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>() * self.total;
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => i.min(self.slopes.len() - 1),
            Err(i) => (i - 1).min(self.slopes.len() - 1),
        };
        let v: f64 = rng.random();
        let a = self.edges[i];
        let p = self.slopes[i] + 1.0;
        if i + 1 >= self.edges.len() {
            // Pareto tail: density ~ y^{p-1}, p < 0
            return a * (1.0 - v).powf(1.0 / p);
        }
        let b = self.edges[i + 1];
        if p.abs() < 1e-9 {
            a * (b / a).powf(v)
        } else {
            let (ap, bp) = (a.powf(p), b.powf(p));
            (ap + v * (bp - ap)).powf(1.0 / p)
        }
    }
}

/// Process whose exponential functional is simulated.
#[derive(Clone, Debug, PartialEq)]
pub enum LevyKind {
    DriftOnly {
        d: f64,
    },
    /// `phi(u) = ln(1 + u)`: `xi_s ~ Gamma(s, 1)`.
    GammaSubordinator,
    CompoundPoissonSubordinator {
        rate: f64,
        jumps: JumpLaw,
        drift: f64,
    },
    /// Jumps below `eps` replaced by their mean drift `\int_0^eps y mu(dy)`.
    TruncatedCustomSubordinator {
        spec: BernsteinSpec<f64>,
        eps: f64,
    },
    Brownian {
        sigma2: f64,
    },
    SymmetricCompoundPoisson {
        rate: f64,
        jumps: JumpLaw,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevySpec {
    pub kind: LevyKind,
    pub killing_q: f64,
}

impl LevySpec {
    pub fn new(kind: LevyKind, killing_q: f64) -> Result<Self> {
        if !(killing_q >= 0.0) || !killing_q.is_finite() {
            return Err(Error::InvalidSpec("killing rate must be finite and >= 0".into()));
        }
        match &kind {
            LevyKind::DriftOnly { d } if !(*d >= 0.0) => return Err(Error::InvalidSpec("drift must be >= 0".into())),
            LevyKind::CompoundPoissonSubordinator { rate, jumps, drift } => {
                jumps.validate()?;
                if !(*rate > 0.0) || !(*drift >= 0.0) || !jumps.positive() {
                    return Err(Error::InvalidSpec(
                        "subordinator needs rate > 0, drift >= 0 and positive jumps".into(),
                    ));
                }
            }
            LevyKind::TruncatedCustomSubordinator { spec, eps } => {
                if !(*eps > 0.0) {
                    return Err(Error::InvalidSpec("small-jump cutoff must be > 0".into()));
                }
                if spec.levy_density(1.0).is_none() {
                    return Err(Error::InvalidSpec(format!("no Lévy density available for {spec}")));
                }
                if spec.killing() > 0.0 {
                    return Err(Error::InvalidSpec("put the killing rate on the LevySpec".into()));
                }
            }
            LevyKind::Brownian { sigma2 } if !(*sigma2 > 0.0) => {
                return Err(Error::InvalidSpec("sigma^2 must be > 0".into()))
            }
            LevyKind::SymmetricCompoundPoisson { rate, jumps } => {
                jumps.validate()?;
                if !(*rate > 0.0) || !jumps.symmetric() {
                    return Err(Error::InvalidSpec("needs rate > 0 and a symmetric jump law".into()));
                }
            }
            _ => {}
        }
        Ok(Self { kind, killing_q })
    }

    pub fn subordinator(&self) -> bool {
        !matches!(self.kind, LevyKind::Brownian { .. } | LevyKind::SymmetricCompoundPoisson { .. })
    }

    fn deterministic(&self) -> bool {
        matches!(self.kind, LevyKind::DriftOnly { .. }) && self.killing_q == 0.0
    }
}

/// How a gamma subordinator is integrated between grid points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaScheme {
    /// The whole cell increment is a jump at the right end of the cell.
    GridJumps,
    /// Conditional mean of the cell integral given its increment (gamma
    /// bridge), accurate to `O(h^3)` per cell.
    #[default]
    Bridge,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimControl {
    /// Grid step for the gridded kinds (gamma, Brownian).
    pub step: f64,
    pub seed: u64,
    pub gamma_scheme: GammaScheme,
}

impl SimControl {
    /// Defaults with the grid step suited to `kind`: `2^-8` for the gamma
    /// bridge, `2^-12` otherwise.
    pub fn for_kind(kind: &LevyKind, seed: u64) -> Self {
        let step = match kind {
            LevyKind::GammaSubordinator => 1.0 / 256.0,
            _ => 1.0 / 4096.0,
        };
        Self { step, seed, gamma_scheme: GammaScheme::Bridge }
    }
}

impl Default for SimControl {
    fn default() -> Self {
        Self { step: 1.0 / 4096.0, seed: 0x5eed, gamma_scheme: GammaScheme::Bridge }
    }
}

/// Piecewise-linear path: on `[breakpoints[i], breakpoints[i+1])` the level
/// is `levels[i] + slopes[i] (s - breakpoints[i])`; the final segment ends at
/// the horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    pub slopes: Vec<f64>,
    pub killed_at: Option<f64>,
}

/// `\int_a^{a+len} e^{-(v + m (s-a))} ds`.
#[inline]
fn segment_integral(len: f64, v: f64, m: f64) -> f64 {
    let x = m * len;
    let factor = if x.abs() < 1e-5 { 1.0 - x * 0.5 + x * x / 6.0 } else { -(-x).exp_m1() / x };
    len * (-v).exp() * factor
}

/// Exact `\int_0^{min(t, killed_at)} e^{-xi_s} ds` of a piecewise-linear path.
pub fn exp_functional(path: &Path, t: f64) -> f64 {
    let end = path.killed_at.map_or(t, |k| k.min(t));
    let n = path.breakpoints.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = path.breakpoints[i];
        if a >= end {
            break;
        }
        let b = if i + 1 < n { path.breakpoints[i + 1].min(end) } else { end };
        total += segment_integral(b - a, path.levels[i], path.slopes[i]);
    }
    total
}

/// `e^{-D} Ein(-D) + Ein(D)`, the second-order term of the gamma-bridge cell weight.
fn bridge_correction(d: f64) -> f64 {
    if d > 30.0 {
        // e^{-D} Ein(-D) ~ -(1/D)(1 + 1/D + 2/D^2 + 6/D^3); Ein(D) = ln D + gamma + E1(D)
        let r = 1.0 / d;
        return d.ln() + EULER_GAMMA - r * (1.0 + r * (1.0 + r * (2.0 + 6.0 * r)));
    }
    let (mut alt, mut pos) = (0.0, 0.0);
    let mut term = 1.0; // D^k / k!
    for k in 1..200 {
        term *= d / k as f64;
        let v = term / k as f64;
        alt += if k % 2 == 1 { v } else { -v };
        pos += v;
        if v < 1e-17 * pos.max(1e-300) {
            break;
        }
    }
    alt - (-d).exp() * pos
}

/// Conditional mean of `\int_cell e^{-(xi - xi_left)}` given the cell increment `d`.
#[inline]
fn bridge_weight(h: f64, d: f64) -> f64 {
    h * (1.0 + (-d).exp()) * 0.5 - h * h / 6.0 * bridge_correction(d)
}

/// Pre-built simulation state for one [`LevySpec`].
struct Simulator {
    spec: LevySpec,
    ctrl: SimControl,
    jumps: Option<JumpSampler>,
    rate: f64,
    drift: f64,
}

impl Simulator {
    fn new(spec: &LevySpec, ctrl: SimControl) -> Result<Self> {
        if !(ctrl.step > 0.0) {
            return Err(Error::InvalidSpec("grid step must be > 0".into()));
        }
        let (jumps, rate, drift) = match &spec.kind {
            LevyKind::DriftOnly { d } => (None, 0.0, *d),
            LevyKind::CompoundPoissonSubordinator { rate, jumps, drift } => (Some(jumps.sampler()), *rate, *drift),
            LevyKind::SymmetricCompoundPoisson { rate, jumps } => (Some(jumps.sampler()), *rate, 0.0),
            LevyKind::TruncatedCustomSubordinator { spec: b, eps } => {
                let density = |y: f64| b.levy_density(y).unwrap_or(0.0);
                let table = JumpTable::build(&density, *eps)?;
                let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_pieces: 2000 };
                // \int_0^eps y mu(dy) with y = eps e^{-s}, stopping where the density overflows
                let integrand = |s: f64| {
                    let y = eps * (-s).exp();
                    y * y * density(y)
                };
                let mut s_max = 700.0;
                while s_max > 1.0 && !integrand(s_max).is_finite() {
                    s_max *= 0.9;
                }
                let small = integrate_real(integrand, 0.0, s_max, opts)?;
                let rate = table.total;
                (Some(JumpSampler::Table(table)), rate, b.drift() + small)
            }
            _ => (None, 0.0, 0.0),
        };
        Ok(Self { spec: spec.clone(), ctrl, jumps, rate, drift })
    }

    fn scheme_name(&self) -> String {
        match &self.spec.kind {
            LevyKind::DriftOnly { .. } => "drift-exact".into(),
            LevyKind::GammaSubordinator => match self.ctrl.gamma_scheme {
                GammaScheme::GridJumps => format!("gamma-grid-jumps(h={})", self.ctrl.step),
                GammaScheme::Bridge => format!("gamma-bridge(h={})", self.ctrl.step),
            },
            LevyKind::Brownian { .. } => format!("brownian-linear(h={})", self.ctrl.step),
            LevyKind::TruncatedCustomSubordinator { eps, .. } => format!("truncated-jumps(eps={eps})"),
            _ => "compound-poisson-exact".into(),
        }
    }

    /// Writes `I(t)` for each sorted horizon in `obs` into `out`.
    fn functionals<R: Rng>(&self, obs: &[f64], rng: &mut R, out: &mut [f64]) {
        let kill =
            if self.spec.killing_q > 0.0 { Exp::new(self.spec.killing_q).unwrap().sample(rng) } else { f64::INFINITY };
        match &self.spec.kind {
            LevyKind::GammaSubordinator | LevyKind::Brownian { .. } => self.gridded(obs, kill, rng, out),
            _ => {
                // event driven: drift between jumps
                let mut s = 0.0;
                let mut level = 0.0;
                let mut acc = 0.0;
                let mut next_jump = self.next_jump(0.0, rng);
                let mut i = 0;
                while i < obs.len() {
                    let stop = obs[i].min(kill).min(next_jump);
                    if stop > s {
                        acc += segment_integral(stop - s, level, self.drift);
                        level += self.drift * (stop - s);
                        s = stop;
                    }
                    if s >= kill {
                        for o in out[i..].iter_mut() {
                            *o = acc;
                        }
                        return;
                    }
                    if s >= obs[i] {
                        out[i] = acc;
                        i += 1;
                        continue;
                    }
                    level += self.jumps.as_ref().unwrap().sample(rng);
                    next_jump = self.next_jump(s, rng);
                }
            }
        }
    }

    fn next_jump<R: Rng>(&self, s: f64, rng: &mut R) -> f64 {
        if self.rate > 0.0 {
            s + Exp::new(self.rate).unwrap().sample(rng)
        } else {
            f64::INFINITY
        }
    }

    fn gridded<R: Rng>(&self, obs: &[f64], kill: f64, rng: &mut R, out: &mut [f64]) {
        let h = self.ctrl.step;
        let mut s = 0.0;
        let mut e = 1.0; // e^{-xi_s}
        let mut acc = 0.0;
        let mut i = 0;
        let mut cell = 0u64;
        let full_gamma = Gamma::new(h, 1.0).unwrap();
        let sigma = match self.spec.kind {
            LevyKind::Brownian { sigma2 } => sigma2.sqrt(),
            _ => 0.0,
        };
        let sh = sigma * h.sqrt();
        while i < obs.len() {
            // whole cells before the next observation or killing time
            if s == cell as f64 * h {
                let last_cell = (obs[i].min(kill) / h).floor() as u64;
                if last_cell > cell {
                    match self.spec.kind {
                        LevyKind::GammaSubordinator => {
                            for _ in cell..last_cell {
                                let d = full_gamma.sample(rng);
                                let w = match self.ctrl.gamma_scheme {
                                    GammaScheme::GridJumps => h,
                                    GammaScheme::Bridge => bridge_weight(h, d),
                                };
                                acc += e * w;
                                e *= (-d).exp();
                            }
                        }
                        _ => {
                            for _ in cell..last_cell {
                                let z: f64 = rng.sample(StandardNormal);
                                let m = sh * z;
                                let em = (-m).exp();
                                let factor = if m.abs() < 1e-5 { 1.0 - m * 0.5 + m * m / 6.0 } else { (1.0 - em) / m };
                                acc += e * h * factor;
                                e *= em;
                            }
                        }
                    }
                    cell = last_cell;
                    s = cell as f64 * h;
                }
            }
            let grid_next = (cell + 1) as f64 * h;
            let stop = grid_next.min(obs[i]).min(kill);
            let len = stop - s;
            if len > 0.0 {
                match self.spec.kind {
                    LevyKind::GammaSubordinator => {
                        let d = if (len - h).abs() <= 1e-12 * h {
                            full_gamma.sample(rng)
                        } else {
                            Gamma::new(len, 1.0).unwrap().sample(rng)
                        };
                        let w = match self.ctrl.gamma_scheme {
                            GammaScheme::GridJumps => len,
                            GammaScheme::Bridge => bridge_weight(len, d),
                        };
                        acc += e * w;
                        e *= (-d).exp();
                    }
                    _ => {
                        let z: f64 = rng.sample(StandardNormal);
                        let m = sigma * len.sqrt() * z;
                        // e^{-v} \int_0^len e^{-m s/len} ds
                        let x = m;
                        let factor = if x.abs() < 1e-5 { 1.0 - x * 0.5 + x * x / 6.0 } else { -(-x).exp_m1() / x };
                        acc += e * len * factor;
                        e *= (-m).exp();
                    }
                }
            }
            s = stop;
            if s >= grid_next {
                cell += 1;
            }
            if s >= kill {
                for o in out[i..].iter_mut() {
                    *o = acc;
                }
                return;
            }
            while i < obs.len() && s >= obs[i] {
                out[i] = acc;
                i += 1;
            }
        }
    }

    fn path<R: Rng>(&self, t: f64, rng: &mut R) -> Path {
        let kill =
            if self.spec.killing_q > 0.0 { Some(Exp::new(self.spec.killing_q).unwrap().sample(rng)) } else { None };
        let mut p = Path { breakpoints: vec![0.0], levels: vec![0.0], slopes: vec![], killed_at: kill };
        let end = kill.map_or(t, |k| k.min(t));
        match &self.spec.kind {
            LevyKind::GammaSubordinator | LevyKind::Brownian { .. } => {
                let h = self.ctrl.step;
                let n = (end / h).ceil() as usize;
                let mut level = 0.0;
                for c in 0..n {
                    let a = c as f64 * h;
                    let len = ((c + 1) as f64 * h).min(end) - a;
                    match self.spec.kind {
                        LevyKind::GammaSubordinator => {
                            p.slopes.push(0.0);
                            level += Gamma::new(len, 1.0).unwrap().sample(rng);
                        }
                        LevyKind::Brownian { sigma2 } => {
                            let z: f64 = rng.sample(StandardNormal);
                            let m = (sigma2 * len).sqrt() * z;
                            p.slopes.push(m / len);
                            level += m;
                        }
                        _ => unreachable!(),
                    }
                    if c + 1 < n {
                        p.breakpoints.push(a + len);
                        p.levels.push(level);
                    }
                }
                if p.slopes.is_empty() {
                    p.slopes.push(0.0);
                }
            }
            _ => {
                let mut s = 0.0;
                let mut level = 0.0;
                loop {
                    let next = self.next_jump(s, rng);
                    p.slopes.push(self.drift);
                    if next >= end {
                        break;
                    }
                    level += self.drift * (next - s) + self.jumps.as_ref().unwrap().sample(rng);
                    s = next;
                    p.breakpoints.push(s);
                    p.levels.push(level);
                }
            }
        }
        p
    }
}

/// One path on `[0, t]`, using the random stream `stream` of `ctrl.seed`.
/// Gamma paths are returned in grid-jump form whatever the scheme.
pub fn sample_path(spec: &LevySpec, t: f64, ctrl: &SimControl, stream: u64) -> Result<Path> {
    if !(t > 0.0) {
        return Err(Error::Domain("horizon must be > 0".into()));
    }
    let sim = Simulator::new(spec, *ctrl)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctrl.seed);
    rng.set_stream(stream);
    Ok(sim.path(t, &mut rng))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: Complex<f64>,
    /// `sqrt(var(Re) + var(Im)) / sqrt(n)`.
    pub stderr: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub scheme: String,
    pub warnings: Vec<String>,
}

/// Running mean and centred second moments (Chan et al. merge).
#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: Complex<f64>,
    m2_re: f64,
    m2_im: f64,
}

impl Moments {
    fn push(&mut self, x: Complex<f64>) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        let d2 = x - self.mean;
        self.m2_re += d.re * d2.re;
        self.m2_im += d.im * d2.im;
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * (o.n / n);
        self.m2_re += o.m2_re + d.re * d.re * self.n * o.n / n;
        self.m2_im += o.m2_im + d.im * d.im * self.n * o.n / n;
        self.n = n;
    }

    fn stderr(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (((self.m2_re + self.m2_im) / (self.n - 1.0)) / self.n).sqrt()
    }
}

/// Estimates `E[I^z(t)]` for every `z` in `zs` and `t` in `ts` from one set
/// of `n_paths` paths. Result is indexed `[z][t]`.
pub fn mc_moments(
    spec: &LevySpec,
    zs: &[Complex<f64>],
    ts: &[f64],
    n_paths: usize,
    ctrl: &SimControl,
) -> Result<Vec<Vec<MCEstimate>>> {
    if n_paths < 2 {
        return Err(Error::Domain("need at least two paths".into()));
    }
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain("horizons must be finite and > 0".into()));
    }
    let sim = Simulator::new(spec, *ctrl)?;
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| ts[a].partial_cmp(&ts[b]).unwrap());
    let obs: Vec<f64> = order.iter().map(|&i| ts[i]).collect();
    let n_batches = n_paths.div_ceil(BATCH);
    let cells = zs.len() * ts.len();
    let batches: Vec<Vec<Moments>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(ctrl.seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(n_paths - b * BATCH);
            let mut acc = vec![Moments::default(); cells];
            let mut vals = vec![0.0; obs.len()];
            for _ in 0..count {
                sim.functionals(&obs, &mut rng, &mut vals);
                for (oi, &ti) in order.iter().enumerate() {
                    let ln_i = vals[oi].ln();
                    for (zi, z) in zs.iter().enumerate() {
                        let v = if z.im == 0.0 { Complex::new((z.re * ln_i).exp(), 0.0) } else { (z * ln_i).exp() };
                        acc[zi * ts.len() + ti].push(v);
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); cells];
    for b in &batches {
        for (t, m) in total.iter_mut().zip(b) {
            t.merge(m);
        }
    }
    let scheme = sim.scheme_name();
    Ok((0..zs.len())
        .map(|zi| {
            (0..ts.len())
                .map(|ti| {
                    let m = &total[zi * ts.len() + ti];
                    let mut warnings = Vec::new();
                    if zs[zi].re < 0.0 && ts[ti] < 0.1 {
                        warnings.push("negative moment at small t: heavy relative variance".to_string());
                    }
                    if !m.mean.re.is_finite() || !m.mean.im.is_finite() {
                        warnings.push("non-finite sample mean".to_string());
                    }
                    MCEstimate {
                        mean: m.mean,
                        stderr: if sim.spec.deterministic() { 0.0 } else { m.stderr() },
                        n_paths,
                        seed: ctrl.seed,
                        scheme: scheme.clone(),
                        warnings,
                    }
                })
                .collect()
        })
        .collect())
}

/// Estimate of `E[I^z(t)]`.
pub fn mc_moment(spec: &LevySpec, z: Complex<f64>, t: f64, n_paths: usize, ctrl: &SimControl) -> Result<MCEstimate> {
    Ok(mc_moments(spec, &[z], &[t], n_paths, ctrl)?.remove(0).remove(0))
}
