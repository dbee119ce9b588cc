//! Scalar abstractions shared by the numeric modules.
//!
//! Floating-point code is written against [`Real`] (implemented for `f32` and
//! `f64`). Series coefficients and binomial expansions are generic over any
//! exact or inexact number type implementing [`num_traits::Num`], which lets
//! the same routines run on `BigRational` for the exact mixture path.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or tolerance.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand constructor for complex scalars.
#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Exact binomial coefficient `C(n, k)` in any number type.
pub fn binomial<T: Num + Clone + FromPrimitive>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        let num = T::from_usize(n - i).expect("binomial numerator");
        let den = T::from_usize(i + 1).expect("binomial denominator");
        acc = acc * num / den;
    }
    acc
}

/// Coefficients `c_n = (-1)^{n+1} (2n-3)!! / (n! 2^n)` of the binomial series
/// of `sqrt(1 + x)`, produced by the ratio recurrence
/// `c_{n+1} = -c_n (2n - 1) / (2n + 2)` starting from `c_1 = 1/2`.
///
/// Iteration yields `(n, c_n)` for `n = 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct SqrtCoefficients<T> {
    n: usize,
    current: T,
}

impl<T: Num + Clone + FromPrimitive> SqrtCoefficients<T> {
    pub fn new() -> Self {
        let half = T::one() / T::from_u8(2).expect("2");
        Self { n: 1, current: half }
    }
}

impl<T: Num + Clone + FromPrimitive> Default for SqrtCoefficients<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Num + Clone + FromPrimitive> Iterator for SqrtCoefficients<T> {
    type Item = (usize, T);

    fn next(&mut self) -> Option<Self::Item> {
        let out = (self.n, self.current.clone());
        let n = self.n;
        let num = T::from_usize(2 * n - 1).expect("ratio numerator");
        let den = T::from_usize(2 * n + 2).expect("ratio denominator");
        self.current = T::zero() - self.current.clone() * num / den;
        self.n += 1;
        Some(out)
    }
}

/// First `count` coefficients `c_1..=c_count`.
pub fn sqrt_coefficients<T: Num + Clone + FromPrimitive>(count: usize) -> Vec<T> {
    SqrtCoefficients::<T>::new()
        .take(count)
        .map(|(_, c)| c)
        .collect()
}

/// `Σ_{l > n} |c_l|`, the part of `Σ_l |c_l| = 1` not yet consumed after `n`
/// terms. Every eigenvalue `a > 0` of the radicand contributes this much
/// (times `1 - (1-a)^l` weights) to the remainder of the constant-free
/// square-root expansion.
pub fn sqrt_coefficient_tail(n: usize) -> f64 {
    let consumed: f64 = SqrtCoefficients::<f64>::new()
        .take(n)
        .map(|(_, c)| c.abs())
        .sum();
    (1.0 - consumed).max(0.0)
}

/// Running tails `τ_0..=τ_n` with `τ_k = Σ_{l>k} |c_l|`.
pub fn sqrt_coefficient_tails(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut consumed = 0.0;
    out.push(1.0);
    for (_, c) in SqrtCoefficients::<f64>::new().take(n) {
        consumed += c.abs();
        out.push((1.0 - consumed).max(0.0));
    }
    out
}

/// `Σ_{k=0}^{n} (-1)^k C(n,k) moments[k]`, the binomial alternating sum of a
/// moment sequence. `moments[k]` is expected to hold `Tr ρ^{k+1}`.
///
/// This is the literal trace-of-powers form. It is exact over rationals but
/// loses roughly `log10 C(n, n/2)` digits in floating point.
pub fn binomial_alternating_sum<T: Num + Clone + FromPrimitive>(moments: &[T], n: usize) -> T {
    assert!(moments.len() > n, "need moments up to index {n}");
    let mut acc = T::zero();
    for (k, m) in moments.iter().take(n + 1).enumerate() {
        let term = binomial::<T>(n, k) * m.clone();
        acc = if k % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Inner sum `Σ_{r=0}^{l-1} (-1)^r C(l,r) p[l-r]` of the constant-free square
/// root expansion, with `p[j]` the j-th power (or its trace), `p[0]` unused.
pub fn constant_free_inner<T: Num + Clone + FromPrimitive>(powers: &[T], l: usize) -> T {
    assert!(l >= 1 && powers.len() > l, "need powers up to index {l}");
    let mut acc = T::zero();
    for r in 0..l {
        let term = binomial::<T>(l, r) * powers[l - r].clone();
        acc = if r % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Partial sums `Σ_{l=1}^{L} c_l Σ_r (-1)^r C(l,r) p[l-r]` for `L = 1..=l_max`,
/// i.e. the trace of the constant-free square root of an operator whose
/// power traces are `p[1..]`.
pub fn constant_free_sqrt_partial_sums<T: Num + Clone + FromPrimitive>(
    powers: &[T],
    l_max: usize,
) -> Vec<T> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(l_max);
    for (l, c) in SqrtCoefficients::<T>::new().take(l_max) {
        acc = acc + c * constant_free_inner(powers, l);
        out.push(acc.clone());
    }
    out
}
