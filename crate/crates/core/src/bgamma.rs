//! Complex gamma function and Bernstein-gamma functions `W_phi`.
//!
//! `W_phi` is the log-convex solution of `W(z + 1) = phi(z) W(z)`, `W(1) = 1`.
//! For `Re w > 0` it is evaluated from the Gauss-type limit
//!
//! ```text
//! ln W(w) = -ln phi(w) + sum_{m >= 1} [ln phi(m) - ln phi(m + w)]   (regularised)
//! ```
//!
//! with the tail `m >= N` replaced by its Euler-Maclaurin expansion. Other
//! arguments are reached through the recurrence.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::bernstein::BernsteinSpec;
use crate::error::{Error, Result};
use crate::quad::{odd_derivatives, GaussLegendre, EM_WEIGHTS};
use crate::scalar::{creal, from_usize, is_finite_c, lit, to_f64, Real};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// A logarithm of `Gamma(z)` (not necessarily the principal branch once the
/// reflection formula is involved).
pub fn ln_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !is_finite_c(z) {
        return Err(Error::Domain("Gamma of a non-finite argument".into()));
    }
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round() {
        return Err(Error::Pole(to_f64(z.re)));
    }
    if z.re < lit(0.5) {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let pi = T::PI();
        let rest = ln_gamma(creal::<T>(T::one()) - z)?;
        return Ok(creal(pi.ln()) - ln_sin_pi(z) - rest);
    }
    let x = z - T::one();
    let mut acc = creal::<T>(lit(LANCZOS[0]));
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += (x + from_usize::<T>(i)).inv() * lit::<T>(c);
    }
    let t = x + lit::<T>(LANCZOS_G + 0.5);
    let half_ln_2pi = lit::<T>(0.918_938_533_204_672_8);
    Ok(creal(half_ln_2pi) + (x + lit::<T>(0.5)) * t.ln() - t + acc.ln())
}

/// `ln sin(pi z)`, evaluated without overflow for large `|Im z|`.
fn ln_sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let w = z * T::PI();
    if w.im.abs() < lit(20.0) {
        return w.sin().ln();
    }
    let i = Complex::new(T::zero(), T::one());
    let half = lit::<T>(0.5);
    if w.im > T::zero() {
        // sin w = (i/2) e^{-iw} (1 - e^{2iw})
        (i * half).ln() - i * w + (creal::<T>(T::one()) - (i * w * lit::<T>(2.0)).exp()).ln()
    } else {
        (-i * half).ln() + i * w + (creal::<T>(T::one()) - (-i * w * lit::<T>(2.0)).exp()).ln()
    }
}

/// `Gamma(z)` by the Lanczos approximation with reflection for `Re z < 1/2`.
pub fn complex_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() && z.re > T::zero() && z.re <= lit(170.0) {
        // keep real arguments real
        let v = ln_gamma(z)?;
        return Ok(creal(v.re.exp()));
    }
    Ok(ln_gamma(z)?.exp())
}

fn ln_phi<T: Real>(spec: &BernsteinSpec<T>, z: Complex<T>) -> Result<Complex<T>> {
    let v = spec.eval(z)?;
    if v.norm() == T::zero() {
        return Err(Error::Pole(to_f64(z.re)));
    }
    Ok(v.ln())
}

fn em_cutoff<T: Real>(w: Complex<T>) -> usize {
    let n = (lit::<T>(4.0) * w.norm()).ceil().to_usize().unwrap_or(usize::MAX / 2);
    n.saturating_add(16).max(32)
}

/// `ln W_phi(w)` for `Re w > 0`.
fn ln_w_right<T: Real>(spec: &BernsteinSpec<T>, w: Complex<T>) -> Result<Complex<T>> {
    let n = em_cutoff(w);
    if n > 1 << 22 {
        return Err(Error::Domain(format!("|w| = {} too large for W", to_f64(w.norm()))));
    }
    let h = |x: Complex<T>| -> Result<Complex<T>> { Ok(ln_phi(spec, x)? - ln_phi(spec, x + w)?) };
    let mut sum = -ln_phi(spec, w)?;
    for m in 1..n {
        sum += h(creal(from_usize(m)))?;
    }
    let nf = from_usize::<T>(n);
    sum += h(creal(nf))? * lit::<T>(0.5);
    let d = odd_derivatives(nf, nf * lit(0.5), h)?;
    for j in 0..3 {
        sum -= d[j] * lit::<T>(EM_WEIGHTS[j]);
    }
    let panels = (w.norm() / lit(2.0)).ceil().to_usize().unwrap_or(1) + 1;
    let gl = GaussLegendre::<T>::new(16);
    let mut err = None;
    let integral = gl.segment(creal(nf), creal::<T>(nf) + w, panels, |x| match ln_phi(spec, x) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            creal(T::zero())
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(sum + integral)
}

/// `ln W_phi(w)`; arguments with `Re w <= 0` are reached through
/// `W(w) = W(w + 1) / phi(w)`.
pub fn ln_w<T: Real>(spec: &BernsteinSpec<T>, w: Complex<T>) -> Result<Complex<T>> {
    if !is_finite_c(w) {
        return Err(Error::Domain("W of a non-finite argument".into()));
    }
    if spec.is_constant() && spec.killing() == T::zero() {
        return Err(Error::Domain("W is undefined for phi identically zero".into()));
    }
    // W(n) = phi(1) ... phi(n-1) exactly
    if w.im == T::zero() && w.re >= T::one() && w.re <= lit(64.0) && w.re.fract() == T::zero() {
        let n = w.re.to_usize().unwrap_or(1);
        let mut acc = creal(T::zero());
        for j in 1..n {
            acc += ln_phi(spec, creal(from_usize::<T>(j)))?;
        }
        return Ok(acc);
    }
    if w.re > T::zero() {
        return ln_w_right(spec, w);
    }
    let steps = (T::one() - w.re).floor().to_usize().unwrap_or(0).max(1);
    let mut acc = ln_w_right(spec, w + from_usize::<T>(steps))?;
    for i in 0..steps {
        acc -= ln_phi(spec, w + from_usize::<T>(i))?;
    }
    Ok(acc)
}

/// `W_phi(z)`.
pub fn eval_w<T: Real>(spec: &BernsteinSpec<T>, z: Complex<T>) -> Result<Complex<T>> {
    let v = ln_w(spec, z)?;
    if v.re > lit(700.0) {
        return Err(Error::Overflow { log_modulus: to_f64(v.re), cap: 700.0 });
    }
    let out = v.exp();
    Ok(if z.im == T::zero() { creal(out.re) } else { out })
}

/// `ln [Gamma(w) / W_phi(w)]`, continued to `Re w <= 0` through
/// `R(w) = R(w + 1) phi(w) / w`. At `w = 0` with `phi(0) = 0` the quotient
/// `phi(w)/w` is replaced by `phi'(0)`.
pub fn ln_ratio<T: Real>(spec: &BernsteinSpec<T>, w: Complex<T>) -> Result<Complex<T>> {
    if w.im == T::zero() && w.re >= T::one() && w.re <= lit(64.0) && w.re.fract() == T::zero() {
        // (n-1)! / (phi(1) ... phi(n-1))
        let n = w.re.to_usize().unwrap_or(1);
        let mut acc = creal(T::zero());
        for j in 1..n {
            acc = acc + creal(from_usize::<T>(j).ln()) - ln_phi(spec, creal(from_usize::<T>(j)))?;
        }
        return Ok(acc);
    }
    if w.re > T::zero() {
        return Ok(ln_gamma(w)? - ln_w_right(spec, w)?);
    }
    let steps = (T::one() - w.re).floor().to_usize().unwrap_or(0).max(1);
    let mut acc = ln_gamma(w + from_usize::<T>(steps))? - ln_w_right(spec, w + from_usize::<T>(steps))?;
    let small = lit::<T>(1e-8);
    for i in 0..steps {
        let u = w + from_usize::<T>(i);
        let quotient = if u.norm() < small {
            if spec.phi_at_zero() != T::zero() {
                return Err(Error::Pole(to_f64(u.re)));
            }
            spec.deriv(u * lit::<T>(0.5), 1)?
        } else {
            spec.eval(u)? / u
        };
        acc += quotient.ln();
    }
    Ok(acc)
}

/// Left edge of the strip on which `E[I_phi^z(infinity)]` and the moment
/// series are defined: `Re z > -1 + a_phi 1{phi(0) = 0}`.
pub fn moment_strip<T: Real>(spec: &BernsteinSpec<T>) -> T {
    if spec.phi_at_zero() == T::zero() {
        -T::one() + spec.a_phi()
    } else {
        -T::one()
    }
}

/// `E[I_phi^z(infinity)] = Gamma(z + 1) / W_phi(z + 1)`.
pub fn mellin_infinity<T: Real>(spec: &BernsteinSpec<T>, z: Complex<T>) -> Result<Complex<T>> {
    let edge = moment_strip(spec);
    if !(z.re > edge) {
        return Err(Error::Domain(format!("Re z = {} outside the strip Re z > {}", to_f64(z.re), to_f64(edge))));
    }
    if spec.is_constant() && spec.killing() == T::zero() {
        return Err(Error::Domain("I(infinity) is infinite for phi = 0".into()));
    }
    let v = ln_ratio(spec, z + T::one())?;
    let out = v.exp();
    Ok(if z.im == T::zero() { creal(out.re) } else { out })
}

/// `gamma_phi = lim (sum_{k <= n} phi'(k)/phi(k) - ln phi(n))`, with the tail
/// `k >= N` summed by Euler-Maclaurin.
pub fn gamma_phi<T: Real>(spec: &BernsteinSpec<T>) -> Result<T> {
    if spec.is_constant() {
        return Err(Error::Domain("gamma_phi needs a non-constant phi".into()));
    }
    if !(spec.eval_real(T::one())? > T::zero()) {
        return Err(Error::Domain("gamma_phi needs phi(1) > 0".into()));
    }
    let g = |x: Complex<T>| -> Result<Complex<T>> { Ok(spec.deriv(x, 1)? / spec.eval(x)?) };
    let estimate = |n: usize| -> Result<T> {
        let mut sum = T::zero();
        for k in 1..n {
            sum += g(creal(from_usize(k)))?.re;
        }
        let nf = from_usize::<T>(n);
        sum = sum - spec.eval_real(nf)?.ln() + g(creal(nf))?.re * lit(0.5);
        let d = odd_derivatives(nf, nf * lit(0.5), g)?;
        for j in 0..3 {
            sum -= d[j].re * lit(EM_WEIGHTS[j]);
        }
        Ok(sum)
    };
    let a = estimate(64)?;
    let b = estimate(128)?;
    let tol = lit::<T>(1e-11).max(T::epsilon() * lit(256.0));
    if !a.is_finite() || (a - b).abs() > tol * b.abs().max(T::one()) {
        return Err(Error::Convergence(format!("gamma_phi estimates disagree: {} vs {}", to_f64(a), to_f64(b))));
    }
    Ok(b)
}

/// `gamma_phi` together with `(phi(k), phi'(k))` for `k = 1..=K0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassCache<T> {
    pub gamma_phi: T,
    pub terms: Vec<(T, T)>,
}

impl<T: Real> WeierstrassCache<T> {
    pub const DEFAULT_TERMS: usize = 256;

    pub fn build(spec: &BernsteinSpec<T>, k0: usize) -> Result<Self> {
        let k0 = k0.max(64);
        let gamma_phi = gamma_phi(spec)?;
        let terms = (1..=k0)
            .map(|k| {
                let x = from_usize::<T>(k);
                Ok((spec.eval_real(x)?, spec.deriv_real(x, 1)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gamma_phi, terms })
    }

    pub fn k0(&self) -> usize {
        self.terms.len()
    }
}

/// A Bernstein function bundled with its lazily built Weierstrass data.
#[derive(Debug)]
pub struct BernsteinGamma<T> {
    spec: BernsteinSpec<T>,
    cache: OnceLock<std::result::Result<WeierstrassCache<T>, Error>>,
}

impl<T: Real> BernsteinGamma<T> {
    pub fn new(spec: BernsteinSpec<T>) -> Self {
        Self { spec, cache: OnceLock::new() }
    }

    pub fn spec(&self) -> &BernsteinSpec<T> {
        &self.spec
    }

    pub fn cache(&self) -> Result<&WeierstrassCache<T>> {
        self.cache
            .get_or_init(|| WeierstrassCache::build(&self.spec, WeierstrassCache::<T>::DEFAULT_TERMS))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn gamma_phi(&self) -> Result<T> {
        Ok(self.cache()?.gamma_phi)
    }

    pub fn w(&self, z: Complex<T>) -> Result<Complex<T>> {
        eval_w(&self.spec, z)
    }

    pub fn ln_w(&self, z: Complex<T>) -> Result<Complex<T>> {
        ln_w(&self.spec, z)
    }

    pub fn mellin_infinity(&self, z: Complex<T>) -> Result<Complex<T>> {
        mellin_infinity(&self.spec, z)
    }

    /// `ln W_phi(z)` from the Weierstrass product
    /// `e^{-gamma_phi z} / phi(z) prod_k phi(k)/phi(k+z) e^{phi'(k) z / phi(k)}`,
    /// the factors beyond the cached ones summed by Euler-Maclaurin.
    /// Independent of [`ln_w`] apart from `phi` itself; `Re z > 0`.
    pub fn ln_w_weierstrass(&self, z: Complex<T>) -> Result<Complex<T>> {
        if !(z.re > T::zero()) {
            return Err(Error::Domain("the product form needs Re z > 0".into()));
        }
        let cache = self.cache()?;
        let spec = &self.spec;
        let mut sum = -z * cache.gamma_phi - ln_phi(spec, z)?;
        let k0 = cache.k0();
        let n = em_cutoff(z).max(k0 + 1);
        let factor = |x: Complex<T>| -> Result<Complex<T>> {
            Ok(ln_phi(spec, x)? - ln_phi(spec, x + z)? + z * spec.deriv(x, 1)? / spec.eval(x)?)
        };
        for (k, &(p, dp)) in cache.terms.iter().enumerate() {
            let kf = from_usize::<T>(k + 1);
            sum = sum + creal::<T>(p.ln()) - ln_phi(spec, z + kf)? + z * (dp / p);
        }
        for k in k0 + 1..n {
            sum += factor(creal(from_usize(k)))?;
        }
        let nf = from_usize::<T>(n);
        sum += factor(creal(nf))? * lit::<T>(0.5);
        let d = odd_derivatives(nf, nf * lit(0.5), factor)?;
        for j in 0..3 {
            sum -= d[j] * lit::<T>(EM_WEIGHTS[j]);
        }
        // int_n^inf f = int_n^{n+z} ln phi - z ln phi(n)
        let panels = (z.norm() / lit(2.0)).ceil().to_usize().unwrap_or(1) + 1;
        let gl = GaussLegendre::<T>::new(16);
        let mut err = None;
        let integral = gl.segment(creal(nf), creal::<T>(nf) + z, panels, |x| match ln_phi(spec, x) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                creal(T::zero())
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(sum + integral - z * ln_phi(spec, creal(nf))?)
    }
}
