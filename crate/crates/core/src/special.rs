//! Exponential-integral helpers behind the truncated-gamma Bernstein family.

use num_complex::Complex;

use crate::quad::GaussLegendre;
use crate::scalar::{creal, expm1_c, from_usize, lit, ln1p_c, Real};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `(1 - e^{-t}) / t`, entire in `t`.
pub fn ein_kernel<T: Real>(t: Complex<T>) -> Complex<T> {
    if t.norm() < lit(1e-8) {
        creal::<T>(T::one()) - t * lit::<T>(0.5)
    } else {
        -expm1_c(-t) / t
    }
}

/// Entire exponential integral `Ein(w) = \int_0^w (1 - e^{-t}) / t dt`.
pub fn ein<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.norm() > lit(6.0) && w.re > lit(0.5) {
        return w.ln() + creal(lit::<T>(EULER_GAMMA)) + e1(w);
    }
    // sum_{n>=1} (-1)^{n+1} w^n / (n n!)
    let mut term = w;
    let mut sum = w;
    for n in 2..400usize {
        term = -term * w / from_usize::<T>(n);
        let add = term / from_usize::<T>(n);
        sum += add;
        if add.norm() <= T::epsilon() * sum.norm() * lit(0.25) {
            break;
        }
    }
    sum
}

/// Exponential integral `E_1(w)` for `Re w > 0`.
pub fn e1<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.norm() < T::one() {
        return -creal::<T>(lit(EULER_GAMMA)) - w.ln() + ein_series(w);
    }
    // modified Lentz evaluation of the even continued fraction
    let tiny = T::min_positive_value() * lit(1e10);
    let one = creal::<T>(T::one());
    let mut b = w + one;
    let mut c = creal::<T>(T::one() / tiny);
    let mut d = one / b;
    let mut h = d;
    for i in 1..1000usize {
        let ii = from_usize::<T>(i);
        let an = creal::<T>(-ii * ii);
        b += lit::<T>(2.0);
        d = one / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - one).norm() <= T::epsilon() {
            break;
        }
    }
    h * (-w).exp()
}

fn ein_series<T: Real>(w: Complex<T>) -> Complex<T> {
    let mut term = w;
    let mut sum = w;
    for n in 2..400usize {
        term = -term * w / from_usize::<T>(n);
        let add = term / from_usize::<T>(n);
        sum += add;
        if add.norm() <= T::epsilon() * sum.norm() * lit(0.25) {
            break;
        }
    }
    sum
}

/// `Ein(c + z) - Ein(c)` for real `c >= 1`, evaluated without cancellation.
pub fn ein_diff<T: Real>(c: T, z: Complex<T>) -> Complex<T> {
    let zn = z.norm();
    if zn == T::zero() {
        return creal(T::zero());
    }
    let w = creal(c) + z;
    if zn <= lit(4.0) {
        let gl = GaussLegendre::<T>::new(16);
        let panels = zn.ceil().to_usize().unwrap_or(1) + 1;
        return gl.segment(creal(c), w, panels, ein_kernel);
    }
    if w.re >= T::one() {
        return ln1p_c(z / c) + e1(w) - e1(creal(c));
    }
    ein(w) - ein(creal(c))
}
