//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the numerics are written against (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in target scalar")
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("integer representable in target scalar")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Working tolerance floor for `T`: `max(requested, 64 eps)`.
pub fn tol_floor<T: Real>(requested: T) -> T {
    requested.max(T::epsilon() * lit(64.0))
}

/// `ln(1 + w)` without losing relative accuracy for small `|w|`.
pub fn ln1p_c<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.norm() < lit(0.5) {
        // |1+w|^2 = 1 + (2 Re w + |w|^2)
        let s = lit::<T>(2.0) * w.re + w.norm_sqr();
        let re = lit::<T>(0.5) * s.ln_1p();
        let im = w.im.atan2(T::one() + w.re);
        Complex::new(re, im)
    } else {
        (creal(T::one()) + w).ln()
    }
}

/// `exp(u) - 1` without cancellation for small `|u|`.
pub fn expm1_c<T: Real>(u: Complex<T>) -> Complex<T> {
    if u.norm() < lit(0.5) {
        let half = (u.im * lit(0.5)).sin();
        let re = u.re.exp_m1() * u.im.cos() - lit::<T>(2.0) * half * half;
        let im = u.re.exp() * u.im.sin();
        Complex::new(re, im)
    } else {
        u.exp() - T::one()
    }
}

/// Nearest integer to `z` when `z` is (numerically) real and within `eps` of it.
pub fn near_integer<T: Real>(z: Complex<T>, eps: T) -> Option<i64> {
    if z.im.abs() > eps {
        return None;
    }
    let n = z.re.round();
    if (z.re - n).abs() <= eps {
        n.to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln1p_small_argument_keeps_digits() {
        let w = Complex::new(1e-12_f64, 2e-12);
        let v = ln1p_c(w);
        let expect = w - w * w / 2.0;
        assert!((v - expect).norm() < 1e-27);
    }

    #[test]
    fn expm1_matches_exp_away_from_zero() {
        let u = Complex::new(0.3_f64, -0.2);
        let a = expm1_c(u);
        let b = u.exp() - 1.0;
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn near_integer_detection() {
        assert_eq!(near_integer(Complex::new(2.0_f64, 0.0), 1e-12), Some(2));
        assert_eq!(near_integer(Complex::new(2.1_f64, 0.0), 1e-12), None);
        assert_eq!(near_integer(Complex::new(2.0_f64, 1e-3), 1e-12), None);
    }
}
