//! Convolutions of tabulated moment curves with integrable power
//! singularities at the origin, and the residual check of the moment
//! convolution identity.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{creal, from_usize, lit, to_f64, Real};

/// Samples of a function behaving like `t^e` at the origin.
///
/// Evaluation interpolates `value / t^e` with a monotone cubic (Fritsch-Carlson)
/// so that noisy curves are not given spurious oscillations.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedFunction<T = f64> {
    t_grid: Vec<T>,
    values: Vec<Complex<T>>,
    exponent: T,
    // regularised samples and their knot slopes, restricted to t > 0 when e < 0
    knots: Vec<T>,
    reg: Vec<Complex<T>>,
    slopes: Vec<Complex<T>>,
}

impl<T: Real> TabulatedFunction<T> {
    pub fn new(t_grid: Vec<T>, values: Vec<Complex<T>>, singularity_exponent: T) -> Result<Self> {
        if !(singularity_exponent > -T::one()) {
            return Err(Error::Singularity(to_f64(singularity_exponent)));
        }
        if singularity_exponent > T::zero() {
            return Err(Error::Domain("singularity exponent must lie in (-1, 0]".into()));
        }
        if t_grid.len() != values.len() {
            return Err(Error::Grid("grid and values differ in length".into()));
        }
        if t_grid.first().is_some_and(|&t| t < T::zero()) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("grid must be non-negative and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
            && !(t_grid[0] == T::zero()
                && singularity_exponent < T::zero()
                && values[1..].iter().all(|v| v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::Grid("values must be finite".into()));
        }
        let mut knots = Vec::with_capacity(t_grid.len());
        let mut reg = Vec::with_capacity(t_grid.len());
        for (&t, &v) in t_grid.iter().zip(&values) {
            if t == T::zero() && singularity_exponent < T::zero() {
                continue;
            }
            knots.push(t);
            reg.push(if singularity_exponent == T::zero() { v } else { v / t.powf(singularity_exponent) });
        }
        if knots.len() < 2 {
            return Err(Error::Grid("need at least two usable grid points".into()));
        }
        let slopes = monotone_slopes(&knots, &reg);
        Ok(Self { t_grid, values, exponent: singularity_exponent, knots, reg, slopes })
    }

    pub fn real(t_grid: Vec<T>, values: Vec<T>, singularity_exponent: T) -> Result<Self> {
        Self::new(t_grid, values.into_iter().map(creal).collect(), singularity_exponent)
    }

    /// Tabulates `f` on `n + 1` uniform points of `[0, span]`; the origin is
    /// skipped when the exponent is negative.
    pub fn from_fn<F: Fn(T) -> Complex<T>>(f: F, span: T, n: usize, singularity_exponent: T) -> Result<Self> {
        let h = span / from_usize(n.max(1));
        let start = usize::from(singularity_exponent < T::zero());
        let grid: Vec<T> = (start..=n).map(|i| from_usize::<T>(i) * h).collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values, singularity_exponent)
    }

    pub fn t_grid(&self) -> &[T] {
        &self.t_grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn singularity_exponent(&self) -> T {
        self.exponent
    }

    pub fn span(&self) -> T {
        *self.t_grid.last().unwrap()
    }

    /// `value / t^e` at `s` (linear extrapolation below the first knot).
    pub fn regular_part(&self, s: T) -> Result<Complex<T>> {
        let n = self.knots.len();
        let last = self.knots[n - 1];
        if s > last * (T::one() + lit(1e-12)) {
            return Err(Error::Grid(format!("t = {} beyond tabulated span {}", to_f64(s), to_f64(last))));
        }
        if s <= self.knots[0] {
            let (t0, t1) = (self.knots[0], self.knots[1]);
            let w = (s - t0) / (t1 - t0);
            return Ok(self.reg[0] + (self.reg[1] - self.reg[0]) * w);
        }
        let i = self.knots.partition_point(|&x| x < s).clamp(1, n - 1);
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        let h = b - a;
        let x = (s - a) / h;
        let x2 = x * x;
        let x3 = x2 * x;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * x3 - three * x2 + T::one();
        let h10 = x3 - two * x2 + x;
        let h01 = three * x2 - two * x3;
        let h11 = x3 - x2;
        Ok(self.reg[i - 1] * h00 + self.slopes[i - 1] * (h10 * h) + self.reg[i] * h01 + self.slopes[i] * (h11 * h))
    }

    pub fn eval(&self, s: T) -> Result<Complex<T>> {
        let r = self.regular_part(s)?;
        Ok(if self.exponent == T::zero() { r } else { r * s.powf(self.exponent) })
    }
}

/// Fritsch-Carlson slopes, applied to real and imaginary parts separately.
fn monotone_slopes<T: Real>(x: &[T], y: &[Complex<T>]) -> Vec<Complex<T>> {
    let re: Vec<T> = y.iter().map(|v| v.re).collect();
    let im: Vec<T> = y.iter().map(|v| v.im).collect();
    let sr = pchip_slopes(x, &re);
    let si = pchip_slopes(x, &im);
    sr.into_iter().zip(si).map(|(a, b)| Complex::new(a, b)).collect()
}

fn pchip_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let d: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    if n == 2 {
        return vec![d[0], d[0]];
    }
    let mut m = vec![T::zero(); n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] > T::zero() {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let w1 = lit::<T>(2.0) * h1 + h0;
            let w2 = h1 + lit::<T>(2.0) * h0;
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    let end = |h0: T, h1: T, d0: T, d1: T| -> T {
        let s = ((lit::<T>(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= T::zero() {
            T::zero()
        } else if d0 * d1 < T::zero() && s.abs() > lit::<T>(3.0) * d0.abs() {
            lit::<T>(3.0) * d0
        } else {
            s
        }
    };
    m[0] = end(x[1] - x[0], x[2] - x[1], d[0], d[1]);
    m[n - 1] = end(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
    m
}

/// `\int_0^{t/2} a(s) b(t - s) ds` where `a ~ s^e`: the regular part of the
/// integrand is linear on each cell and integrated exactly against `s^e`.
fn half_product<T: Real>(a: &TabulatedFunction<T>, b: &TabulatedFunction<T>, t: T, cells: usize) -> Result<Complex<T>> {
    let e = a.exponent;
    let h = t * lit(0.5) / from_usize(cells);
    let nodes: Vec<Complex<T>> = (0..=cells)
        .into_par_iter()
        .map(|j| {
            let s = from_usize::<T>(j) * h;
            Ok(a.regular_part(s)? * b.eval(t - s)?)
        })
        .collect::<Result<_>>()?;
    let e1 = e + T::one();
    let e2 = e + lit(2.0);
    let mut total = creal(T::zero());
    for j in 0..cells {
        let (lo, hi) = (from_usize::<T>(j) * h, from_usize::<T>(j + 1) * h);
        // \int s^e and \int s^e (s - lo) over the cell
        let (m0, m1) = if e == T::zero() {
            (h, h * h * lit(0.5))
        } else {
            let m0 = (hi.powf(e1) - lo.powf(e1)) / e1;
            (m0, (hi.powf(e2) - lo.powf(e2)) / e2 - lo * m0)
        };
        let slope = (nodes[j + 1] - nodes[j]) / h;
        total = total + nodes[j] * m0 + slope * m1;
    }
    Ok(total)
}

/// `\int_0^t f(t - s) g(s) ds` by product integration, with the cell count
/// following the finer of the two grids.
pub fn convolve_singular<T: Real>(f: &TabulatedFunction<T>, g: &TabulatedFunction<T>, t: T) -> Result<Complex<T>> {
    if !(t > T::zero()) {
        return Err(Error::Domain("t must be > 0".into()));
    }
    for c in [f, g] {
        if t > c.span() * (T::one() + lit(1e-12)) {
            return Err(Error::Grid(format!("t = {} exceeds grid span {}", to_f64(t), to_f64(c.span()))));
        }
    }
    let density = |c: &TabulatedFunction<T>| {
        let n = c.t_grid.len();
        (to_f64(t / c.span()) * n as f64).ceil() as usize
    };
    let cells = (density(f).max(density(g)) / 2).max(64);
    Ok(half_product(g, f, t, cells)? + half_product(f, g, t, cells)?)
}

/// Right side of the convolution identity: `Gamma(1 - z) Gamma(z) = pi / sin(pi z)`.
pub fn identity_rhs<T: Real>(z: Complex<T>) -> Complex<T> {
    creal::<T>(T::PI()) / (z * T::PI()).sin()
}

/// Compound Poisson right side:
/// `pi / sin(pi z) (lambda+1)^2 / lambda^2 (1 - e^{-lambda t} - lambda t e^{-lambda t})`.
pub fn cp_identity_rhs<T: Real>(z: Complex<T>, lambda: T, t: T) -> Complex<T> {
    let lt = lambda * t;
    // 1 - e^{-x} - x e^{-x}, accurate for small x
    let shape = if lt < lit(1e-2) {
        lt * lt * (lit::<T>(0.5) - lt / lit(3.0) + lt * lt / lit(8.0) - lt * lt * lt / lit(30.0))
    } else {
        -(-lt).exp_m1() - lt * (-lt).exp()
    };
    let k = (lambda + T::one()) * (lambda + T::one()) / (lambda * lambda);
    identity_rhs(z) * (k * shape)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport<T = f64> {
    pub lhs: Complex<T>,
    pub rhs: Complex<T>,
    pub abs_residual: T,
    pub rel_residual: T,
}

/// Compares `\int_0^t f(t-s) g(s) ds` with the identity's right side, where
/// `f(t) = E[I^{-z}(t)]` and `g(t) = E[\hat I^{z-1}(t)]`.
pub fn verify_identity<T: Real>(
    f: &TabulatedFunction<T>,
    g: &TabulatedFunction<T>,
    z: Complex<T>,
    t: T,
    cp_lambda: Option<T>,
) -> Result<IdentityReport<T>> {
    if !(z.re > T::zero() && z.re < T::one()) {
        return Err(Error::Domain("Re z must lie in (0, 1)".into()));
    }
    let rhs = match cp_lambda {
        Some(l) if l > T::zero() => cp_identity_rhs(z, l, t),
        Some(_) => return Err(Error::Domain("jump intensity must be > 0".into())),
        None => identity_rhs(z),
    };
    let lhs = convolve_singular(f, g, t)?;
    let abs_residual = (lhs - rhs).norm();
    Ok(IdentityReport { lhs, rhs, abs_residual, rel_residual: abs_residual / rhs.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(span: f64, n: usize) -> TabulatedFunction<f64> {
        TabulatedFunction::from_fn(|t: f64| creal(t.powf(-0.5)), span, n, -0.5).unwrap()
    }

    #[test]
    fn beta_half_half() {
        let f = power(4.0, 4096);
        for t in [0.5, 1.0, 3.7] {
            let v = convolve_singular(&f, &f, t).unwrap();
            assert!((v.re - std::f64::consts::PI).abs() < 1e-5, "{t}: {v}");
        }
    }

    #[test]
    fn smooth_examples() {
        let one = TabulatedFunction::from_fn(|_| creal(1.0f64), 2.0, 100, 0.0).unwrap();
        assert!((convolve_singular(&one, &one, 2.0).unwrap().re - 2.0).abs() < 1e-13);
        let ex = TabulatedFunction::from_fn(|t: f64| creal((-t).exp()), 1.0, 1024, 0.0).unwrap();
        let v = convolve_singular(&ex, &ex, 1.0).unwrap().re;
        assert!((v - (-1.0f64).exp()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn swap_symmetry() {
        let f = power(2.0, 512);
        let g = TabulatedFunction::from_fn(|t: f64| creal((0.3 * t).exp()), 2.0, 300, 0.0).unwrap();
        let a = convolve_singular(&f, &g, 1.5).unwrap();
        let b = convolve_singular(&g, &f, 1.5).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn rhs_values() {
        let z = Complex::new(0.3f64, 0.0);
        assert!((identity_rhs(z).re - 3.883_222_077_450_933).abs() < 1e-12);
        let cp = cp_identity_rhs(Complex::new(0.5, 0.0), 1.0, 2.0).re;
        let direct = std::f64::consts::PI * 4.0 * (1.0 - 3.0 * (-2.0f64).exp());
        assert!((cp - direct).abs() < 1e-13);
        // t^2 behaviour at the origin
        let small = cp_identity_rhs(Complex::new(0.5, 0.0), 1.0, 1e-4).re;
        assert!((small / (std::f64::consts::PI * 4.0 * 0.5e-8) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn validation() {
        assert!(matches!(TabulatedFunction::real(vec![0.1, 0.2], vec![1.0, 1.0], -1.0), Err(Error::Singularity(_))));
        assert!(TabulatedFunction::real(vec![0.2, 0.1], vec![1.0, 1.0], 0.0).is_err());
        let f = power(1.0, 64);
        assert!(matches!(convolve_singular(&f, &f, 2.0), Err(Error::Grid(_))));
        assert!(verify_identity(&f, &f, Complex::new(1.5, 0.0), 1.0, None).is_err());
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let t: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let v = vec![0.0, 0.0, 1.0, 1.0, 1.0, 5.0];
        let f = TabulatedFunction::real(t, v, 0.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=500 {
            let x = f.eval(i as f64 / 100.0).unwrap().re;
            assert!(x >= prev - 1e-15);
            prev = x;
        }
    }
}
