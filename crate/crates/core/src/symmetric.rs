//! Moments of exponential functionals of symmetric Lévy processes of order
//! `-1/2`, `1/2` and `n - 1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{JumpLaw, LevyKind, LevySpec};
use crate::quad::{integrate_real, GaussLegendre, QuadOptions};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Largest `Psi t` accepted before `e^{Psi t}` is reported as overflow.
const GROWTH_CAP: f64 = 700.0;

/// Symmetric Lévy process described through its Lévy-Khintchine exponent on the reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetricLevySpec {
    Brownian {
        sigma2: f64,
    },
    CompoundPoisson {
        rate: f64,
        jumps: JumpLaw,
    },
    /// `(u, Psi(u))` pairs for `u >= 0`, interpolated linearly; not compound Poisson.
    Tabulated {
        u: Vec<f64>,
        psi: Vec<f64>,
    },
}

impl SymmetricLevySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SymmetricLevySpec::Brownian { sigma2 } if !(*sigma2 > 0.0) => {
                Err(Error::InvalidSpec("sigma^2 must be > 0".into()))
            }
            SymmetricLevySpec::CompoundPoisson { rate, jumps } => {
                LevySpec::new(LevyKind::SymmetricCompoundPoisson { rate: *rate, jumps: jumps.clone() }, 0.0)?;
                Ok(())
            }
            SymmetricLevySpec::Tabulated { u, psi } => {
                if u.len() < 2 || u.len() != psi.len() {
                    return Err(Error::InvalidSpec("need at least two (u, Psi(u)) pairs".into()));
                }
                if u[0] < 0.0 || u.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidSpec("u must be increasing and >= 0".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_compound_poisson(&self) -> bool {
        matches!(self, SymmetricLevySpec::CompoundPoisson { .. })
    }

    /// `Psi(u) = ln E[e^{u xi_1}]`; [`Error::Range`] where it is infinite.
    pub fn psi(&self, u: f64) -> Result<f64> {
        let u = u.abs();
        let v = match self {
            SymmetricLevySpec::Brownian { sigma2 } => 0.5 * sigma2 * u * u,
            SymmetricLevySpec::CompoundPoisson { rate, jumps } => {
                let mgf = match *jumps {
                    JumpLaw::Normal { sd } => (0.5 * sd * sd * u * u).exp(),
                    JumpLaw::Laplace { scale } => {
                        if scale * u >= 1.0 {
                            f64::INFINITY
                        } else {
                            1.0 / (1.0 - scale * scale * u * u)
                        }
                    }
                    JumpLaw::Uniform { half_width } => {
                        let x = half_width * u;
                        if x < 1e-4 {
                            1.0 + x * x / 6.0
                        } else {
                            x.sinh() / x
                        }
                    }
                    _ => return Err(Error::InvalidSpec("jump law is not symmetric".into())),
                };
                rate * (mgf - 1.0)
            }
            SymmetricLevySpec::Tabulated { u: us, psi } => {
                let n = us.len();
                if u < us[0] || u > us[n - 1] {
                    return Err(Error::Range(format!("u = {u} outside the tabulated range")));
                }
                let i = us.partition_point(|&x| x <= u).clamp(1, n - 1);
                let w = (u - us[i - 1]) / (us[i] - us[i - 1]);
                psi[i - 1] + w * (psi[i] - psi[i - 1])
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range(format!("Psi({u}) is infinite")))
        }
    }

    /// The matching process for [`crate::montecarlo`].
    pub fn levy_spec(&self) -> Result<LevySpec> {
        match self {
            SymmetricLevySpec::Brownian { sigma2 } => LevySpec::new(LevyKind::Brownian { sigma2: *sigma2 }, 0.0),
            SymmetricLevySpec::CompoundPoisson { rate, jumps } => {
                LevySpec::new(LevyKind::SymmetricCompoundPoisson { rate: *rate, jumps: jumps.clone() }, 0.0)
            }
            SymmetricLevySpec::Tabulated { .. } => {
                Err(Error::InvalidSpec("tabulated exponents cannot be simulated".into()))
            }
        }
    }

    /// `E[I^{-1/2}(t)]`; compound Poisson processes use `variant`.
    pub fn half_neg_moment(&self, t: f64, variant: CpVariant) -> Result<f64> {
        match self {
            SymmetricLevySpec::CompoundPoisson { rate, .. } => cp_half_neg_moment(*rate, t, variant),
            _ => half_neg_moment(t),
        }
    }

    /// `E[I^{1/2}(t)]`.
    pub fn half_pos_moment(&self, t: f64) -> Result<f64> {
        self.non_cp()?;
        half_pos_moment(self.psi(0.5)?, t)
    }

    /// `E[I^{n-1/2}(t)]`.
    pub fn n_minus_half_moment(&self, n: usize, t: f64, grid: ConvolutionGrid) -> Result<f64> {
        self.non_cp()?;
        let psi: Vec<f64> = (1..=n).map(|k| self.psi(k as f64 - 0.5)).collect::<Result<_>>()?;
        n_minus_half_moment(&psi, t, grid)
    }

    fn non_cp(&self) -> Result<()> {
        if self.is_compound_poisson() {
            Err(Error::Domain("formula holds for processes that are not compound Poisson".into()))
        } else {
            Ok(())
        }
    }
}

/// Reading of the compound Poisson `-1/2` moment formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpVariant {
    /// `(lambda + 1) sqrt(pi) e^{-lambda t} \int_0^t e^{lambda s} s^{-1/2} ds`.
    Paper,
    /// The same expression without the `sqrt(pi)` factor.
    LaplaceDerived,
}

impl std::str::FromStr for CpVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(CpVariant::Paper),
            "laplace_derived" | "laplace-derived" => Ok(CpVariant::LaplaceDerived),
            _ => Err(Error::InvalidSpec(format!("unknown variant {s:?}"))),
        }
    }
}

fn positive_horizon<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("horizon must be finite and > 0, got {}", to_f64(t))))
    }
}

/// `E[I^{-1/2}(t)] = t^{-1/2}` for symmetric processes that are not compound Poisson.
pub fn half_neg_moment<T: Real>(t: T) -> Result<T> {
    positive_horizon(t)?;
    Ok(T::one() / t.sqrt())
}

/// `E[I^{-1/2}(t)]` for a symmetric compound Poisson process with intensity `lambda`.
pub fn cp_half_neg_moment<T: Real>(lambda: T, t: T, variant: CpVariant) -> Result<T> {
    positive_horizon(t)?;
    if !(lambda > T::zero()) {
        return Err(Error::Domain("jump intensity must be > 0".into()));
    }
    let v = (lambda + T::one()) * decayed_root_weight(lambda, t)?;
    Ok(match variant {
        CpVariant::Paper => v * T::PI().sqrt(),
        CpVariant::LaplaceDerived => v,
    })
}

/// `e^{-lambda t} \int_0^t e^{lambda s} s^{-1/2} ds`, evaluated without forming `e^{lambda t}`.
fn decayed_root_weight<T: Real>(lambda: T, t: T) -> Result<T> {
    let opts =
        QuadOptions { abs_tol: lit(1e-300), rel_tol: lit::<T>(1e-13).max(T::epsilon() * lit(64.0)), max_pieces: 500 };
    Ok(lit::<T>(2.0) * integrate_real(|u: T| (lambda * (u * u - t)).exp(), T::zero(), t.sqrt(), opts)?)
}

/// `E[I^{1/2}(t)] = e^{Psi(1/2) t} / 2 \int_0^t e^{-Psi(1/2) s} s^{-1/2} ds`.
pub fn half_pos_moment<T: Real>(psi_half: T, t: T) -> Result<T> {
    positive_horizon(t)?;
    if psi_half * t > lit(GROWTH_CAP) {
        return Err(Error::Overflow { log_modulus: to_f64(psi_half * t), cap: GROWTH_CAP });
    }
    // = \int_0^{sqrt t} e^{Psi (t - u^2)} du
    let opts =
        QuadOptions { abs_tol: lit(1e-300), rel_tol: lit::<T>(1e-13).max(T::epsilon() * lit(64.0)), max_pieces: 500 };
    integrate_real(|u: T| (psi_half * (t - u * u)).exp(), T::zero(), t.sqrt(), opts)
}

/// Uniform grid for the iterated convolutions: `cells` steps over `[0, span]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionGrid<T = f64> {
    pub span: T,
    pub cells: usize,
}

impl<T: Real> ConvolutionGrid<T> {
    pub const DEFAULT_CELLS: usize = 4096;

    pub fn for_horizon(t: T) -> Self {
        Self { span: t, cells: Self::DEFAULT_CELLS }
    }

    /// Nodes `i t / m`, `m = ceil(t / h)`, covering `[0, t]`.
    fn cells_to(&self, t: T) -> Result<usize> {
        if !(self.span > T::zero()) || self.cells == 0 {
            return Err(Error::Grid("grid needs span > 0 and at least one cell".into()));
        }
        if t > self.span * (T::one() + lit(1e-12)) {
            return Err(Error::Grid(format!("t = {} exceeds grid span {}", to_f64(t), to_f64(self.span))));
        }
        let h = self.span / from_usize(self.cells);
        Ok(((t / h) * (T::one() - lit(1e-12))).ceil().to_usize().unwrap_or(1).max(1))
    }
}

/// `E[I^{n-1/2}(t)]` as the convolution of `t^{-1/2}` with
/// `nu_k(ds) = (k - 1/2) e^{Psi(k - 1/2) s} ds`, `k = 1..n`.
///
/// `psi_values[k-1] = Psi(k - 1/2)`. The first factor is integrated against
/// the singularity exactly; for the others the previous level is written as
/// `s^{k-3/2}` times a regular part, which is interpolated linearly.
pub fn n_minus_half_moment<T: Real>(psi_values: &[T], t: T, grid: ConvolutionGrid<T>) -> Result<T> {
    positive_horizon(t)?;
    if psi_values.is_empty() {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let m = grid.cells_to(t)?;
    let h = t / from_usize(m);
    let gl = GaussLegendre::<T>::new(16);
    let half = lit::<T>(0.5);

    // level 1: F(t_i) = (1/2) \int_0^{t_i} e^{a (t_i - s)} s^{-1/2} ds, by cells in u = sqrt(s)
    let a = psi_values[0];
    if a * t > lit(GROWTH_CAP) {
        return Err(Error::Overflow { log_modulus: to_f64(a * t), cap: GROWTH_CAP });
    }
    let step = (a * h).exp();
    let mut f = vec![T::zero(); m + 1];
    for i in 0..m {
        let (ti, tj) = (from_usize::<T>(i) * h, from_usize::<T>(i + 1) * h);
        let cell = gl.interval(ti.sqrt(), tj.sqrt(), 1, |u| (a * (tj - u * u)).exp());
        f[i + 1] = step * f[i] + cell;
    }

    let gl4 = GaussLegendre::<T>::new(4);
    for (idx, &a) in psi_values.iter().enumerate().skip(1) {
        let k = idx + 1;
        if a * t > lit(GROWTH_CAP) {
            return Err(Error::Overflow { log_modulus: to_f64(a * t), cap: GROWTH_CAP });
        }
        let weight = from_usize::<T>(k) - half;
        // the previous level behaves like s^p at the origin; F / s^p is interpolated linearly
        let p = from_usize::<T>(k) - lit(1.5);
        let node = |i: usize| from_usize::<T>(i) * h;
        let reg: Vec<T> = (1..=m).map(|i| f[i] / node(i).powf(p)).collect();
        let r = |s: T, i: usize| -> T {
            // linear through the regular values at the ends of cell i (cell 0 uses cells 1, 2)
            let (lo, hi) = if i == 0 { (1, 2.min(m)) } else { (i, i + 1) };
            if lo == hi {
                return reg[lo - 1];
            }
            reg[lo - 1] + (reg[hi - 1] - reg[lo - 1]) * (s - node(lo)) / h
        };
        let step = (a * h).exp();
        let mut g = vec![T::zero(); m + 1];
        // first cell, s = h w^2
        g[1] = gl.interval(T::zero(), T::one(), 1, |w| {
            let s = h * w * w;
            lit::<T>(2.0) * h * w * s.powf(p) * r(s, 0) * (a * (h - s)).exp()
        });
        for i in 1..m {
            let (lo, hi) = (node(i), node(i + 1));
            let cell = gl4.interval(lo, hi, 1, |s| (a * (hi - s)).exp() * s.powf(p) * r(s, i));
            g[i + 1] = step * g[i] + cell;
        }
        for v in g.iter_mut() {
            *v *= weight;
        }
        f = g;
    }
    Ok(f[m])
}
