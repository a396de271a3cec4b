//! Bernstein functions `phi(z) = phi(0) + d z + \int (1 - e^{-zy}) mu(dy)`.
//!
//! A [`BernsteinSpec`] is a catalog family (or a tabulated Lévy density) plus
//! a killing rate. Shifted functions `phi_(k)(z) = phi(k + z) - phi(k)` are
//! represented by the same type with a non-zero base point, and every family
//! evaluates its shift in a cancellation-free form.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::{creal, expm1_c, from_usize, is_finite_c, lit, ln1p_c, to_f64, tol_floor, Real};
use crate::special::ein_diff;

/// Tabulated Lévy density with log-log linear interpolation.
///
/// Below the first abscissa the first segment's power law is continued down
/// to zero; above the last abscissa the density vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomLevy<T> {
    drift: T,
    ys: Vec<T>,
    log_y: Vec<T>,
    log_m: Vec<T>,
    analytic_bound: T,
}

impl<T: Real> CustomLevy<T> {
    pub fn new(drift: T, points: &[(T, T)], analytic_bound: Option<T>) -> Result<Self> {
        if !(drift >= T::zero()) {
            return Err(Error::InvalidSpec("drift must be non-negative".into()));
        }
        if points.len() < 2 {
            return Err(Error::InvalidSpec("custom density needs at least two points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidSpec("density abscissae must be strictly increasing".into()));
            }
        }
        if points.iter().any(|&(y, m)| !(y > T::zero()) || !(m > T::zero()) || !m.is_finite()) {
            return Err(Error::InvalidSpec("density points must be positive and finite".into()));
        }
        let bound = analytic_bound.unwrap_or_else(T::zero);
        if bound > T::zero() {
            return Err(Error::InvalidSpec("analytic bound must be <= 0".into()));
        }
        let levy = Self {
            drift,
            ys: points.iter().map(|p| p.0).collect(),
            log_y: points.iter().map(|p| p.0.ln()).collect(),
            log_m: points.iter().map(|p| p.1.ln()).collect(),
            analytic_bound: bound,
        };
        if !(levy.small_jump_exponent() > lit(-2.0)) {
            return Err(Error::InvalidSpec("density violates \\int min(y,1) mu(dy) < infinity near zero".into()));
        }
        Ok(levy)
    }

    pub fn drift(&self) -> T {
        self.drift
    }

    pub fn points(&self) -> Vec<(T, T)> {
        self.ys.iter().zip(&self.log_m).map(|(&y, &lm)| (y, lm.exp())).collect()
    }

    /// Power-law exponent `p` with `mu(y) ~ y^p` as `y -> 0`.
    pub fn small_jump_exponent(&self) -> T {
        (self.log_m[1] - self.log_m[0]) / (self.log_y[1] - self.log_y[0])
    }

    /// True when the Lévy measure has infinite mass.
    pub fn infinite_activity(&self) -> bool {
        self.small_jump_exponent() <= -T::one()
    }

    pub fn density(&self, y: T) -> T {
        let n = self.ys.len();
        if !(y > T::zero()) || y > self.ys[n - 1] {
            return T::zero();
        }
        let ly = y.ln();
        let i = if y <= self.ys[0] {
            0
        } else {
            match self.ys.binary_search_by(|v| v.partial_cmp(&y).unwrap()) {
                Ok(i) => i.min(n - 2),
                Err(i) => (i - 1).min(n - 2),
            }
        };
        let slope = (self.log_m[i + 1] - self.log_m[i]) / (self.log_y[i + 1] - self.log_y[i]);
        (self.log_m[i] + slope * (ly - self.log_y[i])).exp()
    }

    /// `\int_0^\infty kernel(y) mu(dy)`, split at the table abscissae and at
    /// `y = 1`; the range above one is mapped through `y = 1 + u / (1 - u)`.
    fn integrate_kernel<F>(&self, kernel: F, decay: T) -> Result<Complex<T>>
    where
        F: Fn(T) -> Complex<T>,
    {
        let opts = QuadOptions { abs_tol: lit(1e-15), rel_tol: lit(1e-12), max_pieces: 2000 };
        let y0 = self.ys[0];
        let m0 = self.log_m[0].exp();
        let p0 = self.small_jump_exponent();
        // (0, y0]: y = y0 e^{-s}; the integrand decays like e^{-(p0 + decay) s}
        let rate = p0 + decay;
        let s_max = (lit::<T>(80.0) / rate).min(lit(4000.0));
        let mut total = integrate(
            |s: T| {
                let y = y0 * (-s).exp();
                kernel(y) * (m0 * (-(p0) * s).exp() * y)
            },
            T::zero(),
            s_max,
            opts,
        )?;
        let mut cuts: Vec<T> = self.ys.clone();
        let last = *cuts.last().unwrap();
        if y0 < T::one() && last > T::one() {
            cuts.push(T::one());
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.dedup();
        }
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= T::one() {
                total += integrate(|y| kernel(y) * self.density(y), a, b, opts)?;
            } else {
                let ua = (a - T::one()) / a;
                let ub = (b - T::one()) / b;
                total += integrate(
                    |u: T| {
                        let om = T::one() - u;
                        let y = T::one() + u / om;
                        kernel(y) * (self.density(y) / (om * om))
                    },
                    ua,
                    ub,
                    opts,
                )?;
            }
        }
        Ok(total)
    }
}

/// Family tag of a Bernstein function.
#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    /// `ln(1 + x)`: the gamma subordinator.
    Log1p,
    /// `x^alpha`, `alpha in (0, 1)`.
    Power {
        alpha: T,
    },
    /// `(1 + x)^alpha - 1`.
    ShiftedPower {
        alpha: T,
    },
    /// `ln ln(x + e)`.
    LogLog,
    /// Lévy measure `y^{-1} e^{-y} 1{y < 1} dy`, i.e. `ln(1 + x) - A(x)`.
    TruncatedGamma,
    /// Pure drift `d x`.
    Linear {
        d: T,
    },
    Custom(CustomLevy<T>),
}

impl<T: Real> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Log1p => "log1p",
            Family::Power { .. } => "power",
            Family::ShiftedPower { .. } => "shifted_power",
            Family::LogLog => "loglog",
            Family::TruncatedGamma => "truncated_gamma",
            Family::Linear { .. } => "linear",
            Family::Custom(_) => "custom",
        }
    }

    fn base_bound(&self) -> T {
        match self {
            Family::Log1p => -T::one(),
            Family::Power { .. } => T::zero(),
            Family::ShiftedPower { .. } => -T::one(),
            Family::LogLog => T::one() - T::E(),
            Family::TruncatedGamma | Family::Linear { .. } => T::neg_infinity(),
            Family::Custom(c) => c.analytic_bound,
        }
    }
}

/// Half-plane of analyticity `Re z > a_phi`, with the zero locus metadata
/// carried for catalog families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticBound<T> {
    pub a_phi: T,
    /// Left-most real zero of `phi` on `[a_phi, 0]` (0 when there is none).
    pub u_phi: Option<T>,
    /// `max(a_phi, u_phi)`.
    pub a_bar_phi: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    Value,
    First,
    Second,
}

/// A Bernstein function: family, killing rate and (optional) shift point.
#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinSpec<T> {
    family: Family<T>,
    killing: T,
    base: u64,
}

impl<T: Real> BernsteinSpec<T> {
    pub fn new(family: Family<T>, killing: T) -> Result<Self> {
        if !(killing >= T::zero()) || !killing.is_finite() {
            return Err(Error::InvalidSpec("killing rate must be finite and >= 0".into()));
        }
        match &family {
            Family::Power { alpha } | Family::ShiftedPower { alpha } => {
                if !(*alpha > T::zero() && *alpha < T::one()) {
                    return Err(Error::InvalidSpec("alpha must lie in (0, 1)".into()));
                }
            }
            Family::Linear { d } if (!(*d >= T::zero()) || !d.is_finite()) => {
                return Err(Error::InvalidSpec("drift must be finite and >= 0".into()));
            }
            _ => {}
        }
        Ok(Self { family, killing, base: 0 })
    }

    pub fn log1p() -> Self {
        Self { family: Family::Log1p, killing: T::zero(), base: 0 }
    }

    pub fn power(alpha: T) -> Result<Self> {
        Self::new(Family::Power { alpha }, T::zero())
    }

    pub fn shifted_power(alpha: T) -> Result<Self> {
        Self::new(Family::ShiftedPower { alpha }, T::zero())
    }

    pub fn loglog() -> Self {
        Self { family: Family::LogLog, killing: T::zero(), base: 0 }
    }

    pub fn truncated_gamma() -> Self {
        Self { family: Family::TruncatedGamma, killing: T::zero(), base: 0 }
    }

    pub fn linear(d: T) -> Result<Self> {
        Self::new(Family::Linear { d }, T::zero())
    }

    pub fn custom(levy: CustomLevy<T>) -> Self {
        Self { family: Family::Custom(levy), killing: T::zero(), base: 0 }
    }

    pub fn with_killing(mut self, q: T) -> Result<Self> {
        if !(q >= T::zero()) || !q.is_finite() {
            return Err(Error::InvalidSpec("killing rate must be finite and >= 0".into()));
        }
        if self.base != 0 && q > T::zero() {
            return Err(Error::InvalidSpec("a shifted Bernstein function carries no killing".into()));
        }
        self.killing = q;
        Ok(self)
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn killing(&self) -> T {
        self.killing
    }

    /// Shift point `k` of `phi_(k)`; zero for an unshifted function.
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn analytic_bound(&self) -> AnalyticBound<T> {
        let a_phi = self.a_phi();
        match self.family {
            Family::Custom(_) => AnalyticBound { a_phi, u_phi: None, a_bar_phi: None },
            _ => {
                let u = self.zero_locus(a_phi);
                AnalyticBound { a_phi, u_phi: Some(u), a_bar_phi: Some(a_phi.max(u)) }
            }
        }
    }

    /// Left boundary of the half-plane of analyticity.
    pub fn a_phi(&self) -> T {
        self.family.base_bound() - from_usize::<T>(self.base as usize)
    }

    fn zero_locus(&self, a_phi: T) -> T {
        // phi is increasing on (a_phi, 0]; phi(0) = q >= 0
        if self.killing == T::zero() {
            return T::zero();
        }
        let lo_limit = a_phi.max(lit(-60.0));
        let mut lo = lo_limit + (T::zero() - lo_limit) * lit(1e-12);
        let val = |x: T| self.eval_real(x).unwrap_or(T::neg_infinity());
        if val(lo) > T::zero() {
            return T::zero();
        }
        let mut hi = T::zero();
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if val(mid) > T::zero() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) * lit(0.5)
    }

    /// `phi(0)`, i.e. the killing rate for an unshifted function and zero
    /// for a shifted one.
    pub fn phi_at_zero(&self) -> T {
        if self.base == 0 {
            self.killing
        } else {
            T::zero()
        }
    }

    /// Drift coefficient `d`.
    pub fn drift(&self) -> T {
        match &self.family {
            Family::Linear { d } => *d,
            Family::Custom(c) => c.drift,
            _ => T::zero(),
        }
    }

    /// Density of the Lévy measure at `y > 0` (including the factor
    /// `e^{-k y}` of a shift), or `None` for families without a closed form.
    pub fn levy_density(&self, y: T) -> Option<T> {
        if !(y > T::zero()) {
            return Some(T::zero());
        }
        let k = from_usize::<T>(self.base as usize);
        let stable_law = |alpha: T| {
            let g = crate::bgamma::ln_gamma(creal(T::one() - alpha)).ok()?.re.exp();
            Some(alpha / g * y.powf(-T::one() - alpha))
        };
        let m = match &self.family {
            Family::Log1p => (-y).exp() / y,
            Family::Power { alpha } => stable_law(*alpha)?,
            Family::ShiftedPower { alpha } => stable_law(*alpha)? * (-y).exp(),
            Family::TruncatedGamma => {
                if y < T::one() {
                    (-y).exp() / y
                } else {
                    T::zero()
                }
            }
            Family::Linear { .. } => T::zero(),
            Family::LogLog => return None,
            Family::Custom(c) => c.density(y),
        };
        Some(m * (-k * y).exp())
    }

    /// True when `phi` is constant (no drift and no Lévy measure).
    pub fn is_constant(&self) -> bool {
        matches!(self.family, Family::Linear { d } if d == T::zero())
    }

    /// True when `phi(x) -> infinity` as `x -> infinity`.
    pub fn unbounded(&self) -> bool {
        match &self.family {
            Family::Linear { d } => *d > T::zero(),
            Family::Custom(c) => c.drift > T::zero() || c.infinite_activity(),
            _ => true,
        }
    }

    fn check_domain(&self, z: Complex<T>) -> Result<()> {
        let a = self.a_phi();
        let bad = match self.family {
            Family::Custom(_) => !(z.re > a || z.re >= T::zero()),
            _ => z.im == T::zero() && z.re < a,
        };
        if bad || !is_finite_c(z) {
            return Err(Error::Domain(format!(
                "{} (shift {}) is not analytic at z = {}{:+}i (a_phi = {})",
                self.family.name(),
                self.base,
                to_f64(z.re),
                to_f64(z.im),
                to_f64(a)
            )));
        }
        Ok(())
    }

    fn evaluate(&self, z: Complex<T>, kernel: Kernel) -> Result<Complex<T>> {
        self.check_domain(z)?;
        let k = from_usize::<T>(self.base as usize);
        let one = T::one();
        let v = match (&self.family, kernel) {
            (Family::Log1p, Kernel::Value) => ln1p_c(z / (k + one)),
            (Family::Log1p, Kernel::First) => (z + k + one).inv(),
            (Family::Log1p, Kernel::Second) => -((z + k + one) * (z + k + one)).inv(),
            (Family::Power { alpha }, kern) => power_like(*alpha, k, z, kern),
            (Family::ShiftedPower { alpha }, kern) => power_like(*alpha, k + one, z, kern),
            (Family::LogLog, kern) => {
                let c = k + T::E();
                match kern {
                    Kernel::Value => ln1p_c(ln1p_c(z / c) / c.ln()),
                    Kernel::First => {
                        let w = z + c;
                        (w * w.ln()).inv()
                    }
                    Kernel::Second => {
                        let w = z + c;
                        let l = w.ln();
                        -(l + one) / (w * w * l * l)
                    }
                }
            }
            (Family::TruncatedGamma, kern) => {
                let c = k + one;
                match kern {
                    Kernel::Value => ein_diff(c, z),
                    Kernel::First => {
                        let w = z + c;
                        -expm1_c(-w) / w
                    }
                    Kernel::Second => {
                        let w = z + c;
                        (-w).exp() / w + expm1_c(-w) / (w * w)
                    }
                }
            }
            (Family::Linear { d }, Kernel::Value) => z * *d,
            (Family::Linear { d }, Kernel::First) => creal(*d),
            (Family::Linear { .. }, Kernel::Second) => creal(T::zero()),
            (Family::Custom(levy), kern) => {
                let integral = match kern {
                    Kernel::Value => levy.integrate_kernel(|y| -expm1_c(-z * y) * (-k * y).exp(), lit(2.0))?,
                    Kernel::First => levy.integrate_kernel(|y| (-(z + k) * y).exp() * y, lit(2.0))?,
                    Kernel::Second => -levy.integrate_kernel(|y| (-(z + k) * y).exp() * (y * y), lit(3.0))?,
                };
                match kern {
                    Kernel::Value => integral + z * levy.drift,
                    Kernel::First => integral + levy.drift,
                    Kernel::Second => integral,
                }
            }
        };
        let v = if kernel == Kernel::Value && self.base == 0 { v + self.killing } else { v };
        if !is_finite_c(v) {
            return Err(Error::Domain(format!(
                "{} is singular at z = {}{:+}i",
                self.family.name(),
                to_f64(z.re),
                to_f64(z.im)
            )));
        }
        Ok(v)
    }

    /// `phi(z)`.
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.evaluate(z, Kernel::Value)
    }

    pub fn eval_real(&self, x: T) -> Result<T> {
        self.evaluate(creal(x), Kernel::Value).map(|v| v.re)
    }

    /// `phi'(z)` (`order = 1`) or `phi''(z)` (`order = 2`).
    pub fn deriv(&self, z: Complex<T>, order: u8) -> Result<Complex<T>> {
        match order {
            1 => self.evaluate(z, Kernel::First),
            2 => self.evaluate(z, Kernel::Second),
            _ => Err(Error::InvalidSpec(format!("derivative order {order} not supported"))),
        }
    }

    pub fn deriv_real(&self, x: T, order: u8) -> Result<T> {
        self.deriv(creal(x), order).map(|v| v.re)
    }

    /// The shifted Bernstein function `phi_(k)(z) = phi(k + z) - phi(k)`.
    pub fn shift(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("shift index must be >= 1".into()));
        }
        Ok(Self { family: self.family.clone(), killing: T::zero(), base: self.base + k })
    }

    /// `phi(k + u) - phi(k)` without building the shifted spec.
    pub fn eval_shifted(&self, k: u64, u: Complex<T>) -> Result<Complex<T>> {
        let shifted = BernsteinSpec {
            family: match &self.family {
                // the custom table is only borrowed for the evaluation
                Family::Custom(_) => return self.shift(k)?.eval(u),
                f => f.clone(),
            },
            killing: T::zero(),
            base: self.base + k,
        };
        shifted.eval(u)
    }

    /// Inverse function on `(phi(0), phi(infinity))`: bracketing bisection
    /// refined by safeguarded Newton steps.
    pub fn inverse(&self, y: T) -> Result<T> {
        let f0 = self.phi_at_zero();
        if !(y > f0) || !y.is_finite() {
            return Err(Error::Range(format!("{} is not above phi(0) = {}", to_f64(y), to_f64(f0))));
        }
        let tol = tol_floor::<T>(lit(1e-12)) * y.abs().max(T::one());
        let mut lo = T::zero();
        let mut hi = T::one();
        let cap = T::max_value().sqrt();
        while self.eval_real(hi)? < y {
            lo = hi;
            hi *= lit(2.0);
            if hi > cap {
                return Err(Error::Range(format!("{} is not below phi(infinity)", to_f64(y))));
            }
        }
        let mut x = (lo + hi) * lit(0.5);
        for _ in 0..300 {
            let fx = self.eval_real(x)? - y;
            if fx.abs() <= tol {
                return Ok(x);
            }
            if fx > T::zero() {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.deriv_real(x, 1)?;
            let newton = x - fx / d;
            x = if d > T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) * lit(0.5) };
            if hi - lo <= T::epsilon() * hi {
                break;
            }
        }
        let fx = self.eval_real(x)? - y;
        if fx.abs() <= tol * lit(16.0) {
            Ok(x)
        } else {
            Err(Error::Root(format!("inverse did not converge at y = {}", to_f64(y))))
        }
    }

    pub fn check_hypotheses(&self, x_max: T, n_probes: usize) -> HypothesisReport<T> {
        self.check_hypotheses_with(x_max, n_probes, HypothesisOptions::default())
    }

    /// Finite-x evidence for the three growth conditions of the moment
    /// series: bounded `phi'(x)/phi'(2x)`, growing `x^2 phi'(x)` and
    /// unbounded `phi`.
    pub fn check_hypotheses_with(&self, x_max: T, n_probes: usize, opts: HypothesisOptions<T>) -> HypothesisReport<T> {
        let n = n_probes.max(8);
        let x_max = x_max.max(lit(2.0));
        let probes: Vec<T> = (0..n).map(|i| x_max.powf(from_usize::<T>(i) / from_usize::<T>(n - 1))).collect();
        let d1 = |x: T| self.deriv_real(x, 1).unwrap_or_else(|_| T::nan());
        let ratios: Vec<T> = probes.iter().map(|&x| d1(x) / d1(x + x)).collect();
        let growth: Vec<T> = probes.iter().map(|&x| x * x * d1(x)).collect();

        let max_ratio = ratios.iter().fold(T::neg_infinity(), |m, &r| if r.is_nan() { T::nan() } else { m.max(r) });
        let ratio_bounded = max_ratio.is_finite() && max_ratio <= opts.ratio_cap;

        let tail = &growth[n - n / 4 - 1..];
        let x2_growth = tail.iter().all(|g| g.is_finite()) && tail.windows(2).all(|w| w[1] > w[0]);

        let phi_max = self.eval_real(x_max).unwrap_or_else(|_| T::nan());
        let phi_mid = self.eval_real(x_max / lit(16.0)).unwrap_or_else(|_| T::nan());
        let growth_ratio = (phi_max - phi_mid) / phi_max.abs().max(T::min_positive_value());
        let unbounded = growth_ratio.is_finite() && growth_ratio > opts.growth_floor;

        HypothesisReport {
            x_max,
            n_probes: n,
            max_ratio,
            ratio_at_largest: ratios[n - 1],
            x2_dphi_at_largest: growth[n - 1],
            phi_at_x_max: phi_max,
            growth_ratio,
            ratio_bounded,
            x2_dphi_growing: x2_growth,
            phi_unbounded: unbounded,
            note: "heuristic: evidence from finite probes only, not a proof of the asymptotic conditions",
        }
    }
}

fn power_like<T: Real>(alpha: T, c: T, z: Complex<T>, kernel: Kernel) -> Complex<T> {
    let one = T::one();
    match kernel {
        Kernel::Value => {
            if c == T::zero() {
                if z.norm() == T::zero() {
                    creal(T::zero())
                } else {
                    (z.ln() * alpha).exp()
                }
            } else {
                expm1_c(ln1p_c(z / c) * alpha) * c.powf(alpha)
            }
        }
        Kernel::First => ((z + c).ln() * (alpha - one)).exp() * alpha,
        Kernel::Second => ((z + c).ln() * (alpha - one - one)).exp() * (alpha * (alpha - one)),
    }
}

impl<T: Real> fmt::Display for BernsteinSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Power { alpha } | Family::ShiftedPower { alpha } => {
                write!(f, "{}(alpha={})", self.family.name(), alpha)?
            }
            Family::Linear { d } => write!(f, "linear(d={d})")?,
            fam => write!(f, "{}", fam.name())?,
        }
        if self.killing > T::zero() {
            write!(f, "+q={}", self.killing)?;
        }
        if self.base > 0 {
            write!(f, "[shift {}]", self.base)?;
        }
        Ok(())
    }
}

/// Thresholds used by [`BernsteinSpec::check_hypotheses_with`].
#[derive(Clone, Copy, Debug)]
pub struct HypothesisOptions<T> {
    /// Largest admissible `phi'(x)/phi'(2x)` on the probe grid.
    pub ratio_cap: T,
    /// Minimal relative increase `(phi(x_max) - phi(x_max/16)) / phi(x_max)`.
    pub growth_floor: T,
}

impl<T: Real> Default for HypothesisOptions<T> {
    fn default() -> Self {
        Self { ratio_cap: lit(64.0), growth_floor: lit(1e-3) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport<T> {
    pub x_max: T,
    pub n_probes: usize,
    pub max_ratio: T,
    pub ratio_at_largest: T,
    pub x2_dphi_at_largest: T,
    pub phi_at_x_max: T,
    pub growth_ratio: T,
    pub ratio_bounded: bool,
    pub x2_dphi_growing: bool,
    pub phi_unbounded: bool,
    pub note: &'static str,
}

impl<T> HypothesisReport<T> {
    pub fn all_pass(&self) -> bool {
        self.ratio_bounded && self.x2_dphi_growing && self.phi_unbounded
    }
}

/// JSON form of a [`BernsteinSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_density: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<u64>,
}

impl TryFrom<SpecDocument> for BernsteinSpec<f64> {
    type Error = Error;

    fn try_from(doc: SpecDocument) -> Result<Self> {
        let need_alpha = || doc.alpha.ok_or_else(|| Error::InvalidSpec(format!("family {} needs alpha", doc.family)));
        let spec = match doc.family.as_str() {
            "log1p" => BernsteinSpec::log1p(),
            "power" => BernsteinSpec::power(need_alpha()?)?,
            "shifted_power" => BernsteinSpec::shifted_power(need_alpha()?)?,
            "loglog" => BernsteinSpec::loglog(),
            "truncated_gamma" => BernsteinSpec::truncated_gamma(),
            "linear" => BernsteinSpec::linear(doc.d.unwrap_or(1.0))?,
            "custom" => {
                if let Some(rule) = &doc.interpolation {
                    if rule != "loglog-linear" {
                        return Err(Error::InvalidSpec(format!("unknown interpolation rule {rule}")));
                    }
                }
                let pts = doc
                    .custom_density
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("custom family needs custom_density".into()))?;
                BernsteinSpec::custom(CustomLevy::new(doc.d.unwrap_or(0.0), pts, doc.analytic_bound)?)
            }
            other => return Err(Error::InvalidSpec(format!("unknown family {other}"))),
        };
        let spec = spec.with_killing(doc.q.unwrap_or(0.0))?;
        match doc.shift {
            Some(k) if k > 0 => spec.shift(k),
            _ => Ok(spec),
        }
    }
}

impl From<&BernsteinSpec<f64>> for SpecDocument {
    fn from(spec: &BernsteinSpec<f64>) -> Self {
        let mut doc = SpecDocument {
            family: spec.family.name().to_string(),
            alpha: None,
            d: None,
            q: (spec.killing > 0.0).then_some(spec.killing),
            custom_density: None,
            interpolation: None,
            analytic_bound: None,
            shift: (spec.base > 0).then_some(spec.base),
        };
        match &spec.family {
            Family::Power { alpha } | Family::ShiftedPower { alpha } => doc.alpha = Some(*alpha),
            Family::Linear { d } => doc.d = Some(*d),
            Family::Custom(c) => {
                doc.d = Some(c.drift);
                doc.custom_density = Some(c.points());
                doc.interpolation = Some("loglog-linear".into());
                doc.analytic_bound = Some(c.analytic_bound);
            }
            _ => {}
        }
        doc
    }
}

impl FromStr for BernsteinSpec<f64> {
    type Err = Error;

    /// Accepts a JSON document or a shorthand such as `log1p`, `power:0.5`,
    /// `linear:2`, optionally followed by `+q=0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let doc: SpecDocument =
                serde_json::from_str(s).map_err(|e| Error::InvalidSpec(format!("bad spec JSON: {e}")))?;
            return BernsteinSpec::try_from(doc);
        }
        let (body, q) = match s.split_once("+q=") {
            Some((b, q)) => (b, q.parse::<f64>().map_err(|_| Error::InvalidSpec(format!("bad killing rate {q}")))?),
            None => (s, 0.0),
        };
        let (name, param) = match body.split_once(':') {
            Some((n, p)) => (n, Some(p.parse::<f64>().map_err(|_| Error::InvalidSpec(format!("bad parameter {p}")))?)),
            None => (body, None),
        };
        let doc = SpecDocument {
            family: name.to_string(),
            alpha: param,
            d: param,
            q: Some(q),
            custom_density: None,
            interpolation: None,
            analytic_bound: None,
            shift: None,
        };
        BernsteinSpec::try_from(doc)
    }
}
