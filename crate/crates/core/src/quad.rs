//! Quadrature rules: Gauss-Legendre, adaptive Gauss-Kronrod (7/15) and
//! straight-line contour integration in the complex plane.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{creal, from_usize, is_finite_c, lit, to_f64, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let nn = from_usize::<T>(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (T::PI() * (from_usize::<T>(i) + lit(0.75)) / (nn + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let mut p0 = T::one();
            let mut p1 = T::zero();
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jj = from_usize::<T>(j);
                p0 = ((lit::<T>(2.0) * jj + T::one()) * z * p1 - jj * p2) / (jj + T::one());
            }
            dp = nn * (z * p0 - p1) / (z * z - T::one());
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() <= T::epsilon() * lit(4.0) {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = lit::<T>(2.0) / ((T::one() - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Precomputed Gauss-Legendre rule, reusable across many integrals.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// Integral of `f` along the straight segment from `a` to `b`, split
    /// into `panels` equal pieces.
    pub fn segment<F>(&self, a: Complex<T>, b: Complex<T>, panels: usize, mut f: F) -> Complex<T>
    where
        F: FnMut(Complex<T>) -> Complex<T>,
    {
        let panels = panels.max(1);
        let step = (b - a) / from_usize::<T>(panels);
        let half = step * lit::<T>(0.5);
        let mut acc = Complex::new(T::zero(), T::zero());
        for p in 0..panels {
            let mid = a + step * (from_usize::<T>(p) + lit(0.5));
            let mut s = Complex::new(T::zero(), T::zero());
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += f(mid + half * *x) * *w;
            }
            acc += s * half;
        }
        acc
    }

    /// Real-line convenience wrapper around [`Self::segment`].
    pub fn interval<F>(&self, a: T, b: T, panels: usize, mut f: F) -> T
    where
        F: FnMut(T) -> T,
    {
        let panels = panels.max(1);
        let step = (b - a) / from_usize::<T>(panels);
        let half = step * lit::<T>(0.5);
        let mut acc = T::zero();
        for p in 0..panels {
            let mid = a + step * (from_usize::<T>(p) + lit(0.5));
            let mut s = T::zero();
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += f(mid + half * *x) * *w;
            }
            acc += s * half;
        }
        acc
    }
}

fn gk15<T: Real, F>(f: &mut F, a: T, b: T) -> (Complex<T>, T)
where
    F: FnMut(T) -> Complex<T>,
{
    let c = (a + b) * lit(0.5);
    let h = (b - a) * lit(0.5);
    let fc = f(c);
    let mut kron = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    for j in 0..7 {
        let dx = h * lit::<T>(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        kron += s * lit::<T>(WGK[j]);
        if j % 2 == 1 {
            gauss += s * lit::<T>(WG[j / 2]);
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

struct Piece<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

impl<T: Real> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Piece<T> {}
impl<T: Real> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_pieces: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self { abs_tol: lit(1e-14), rel_tol: lit(1e-12), max_pieces: 4000 }
    }
}

/// Globally adaptive Gauss-Kronrod integration of a complex-valued
/// integrand over the finite interval `[a, b]`.
pub fn integrate<T: Real, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<Complex<T>>
where
    F: FnMut(T) -> Complex<T>,
{
    if a == b {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let (v, e) = gk15(&mut f, a, b);
    if !is_finite_c(v) {
        return Err(Error::Quadrature { estimate: to_f64(v.norm()), error: f64::INFINITY });
    }
    let mut total = v;
    let mut total_err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let floor = T::epsilon() * lit(50.0);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            return Ok(total);
        }
        if heap.len() >= opts.max_pieces {
            break;
        }
        let piece = match heap.pop() {
            Some(p) if p.error > T::zero() => p,
            // every remaining piece is already at the resolution limit
            _ => break,
        };
        let mid = (piece.a + piece.b) * lit(0.5);
        if (piece.b - piece.a).abs() <= floor * (piece.a.abs() + piece.b.abs()) {
            // cannot split further; accept the piece as is
            if total_err - piece.error <= target {
                return Ok(total);
            }
            heap.push(Piece { error: T::zero(), ..piece });
            total_err -= piece.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, piece.a, mid);
        let (v2, e2) = gk15(&mut f, mid, piece.b);
        if !is_finite_c(v1) || !is_finite_c(v2) {
            return Err(Error::Quadrature { estimate: to_f64(total.norm()), error: f64::INFINITY });
        }
        total = total - piece.value + v1 + v2;
        total_err = total_err - piece.error + e1 + e2;
        heap.push(Piece { a: piece.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: piece.b, value: v2, error: e2 });
    }
    // recompute the sum to shed accumulated rounding from the running updates
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut err = T::zero();
    for p in heap.iter() {
        sum += p.value;
        err += p.error;
    }
    if err <= opts.abs_tol.max(opts.rel_tol * sum.norm()) {
        Ok(sum)
    } else {
        Err(Error::Quadrature { estimate: to_f64(sum.norm()), error: to_f64(err) })
    }
}

/// Real-valued variant of [`integrate`].
pub fn integrate_real<T: Real, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<T>
where
    F: FnMut(T) -> T,
{
    integrate(|x| Complex::new(f(x), T::zero()), a, b, opts).map(|v| v.re)
}

/// Bernoulli-number weights `B_{2j} / (2j)!` for `j = 1, 2, 3`.
pub const EM_WEIGHTS: [f64; 3] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0];

/// Points on the Cauchy circle used by [`odd_derivatives`].
const CAUCHY_POINTS: usize = 48;

/// `f^{(j)}(x0)` for `j = 1, 3, 5` by the trapezoidal rule on a circle.
pub fn odd_derivatives<T: Real, F>(x0: T, radius: T, mut f: F) -> Result<[Complex<T>; 3]>
where
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let mut acc = [creal(T::zero()); 3];
    let m = from_usize::<T>(CAUCHY_POINTS);
    for i in 0..CAUCHY_POINTS {
        let theta = T::TAU() * from_usize::<T>(i) / m;
        let e = Complex::from_polar(T::one(), theta);
        let v = f(creal::<T>(x0) + e * radius)?;
        acc[0] += v * e.inv();
        acc[1] += v * e.powi(-3);
        acc[2] += v * e.powi(-5);
    }
    let fact = [1.0, 6.0, 120.0];
    let mut out = [creal(T::zero()); 3];
    for j in 0..3 {
        let order = 2 * j as i32 + 1;
        out[j] = acc[j] * (lit::<T>(fact[j]) / (m * radius.powi(order)));
    }
    Ok(out)
}
