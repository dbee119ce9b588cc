//! Dense square complex matrices, trace and norm functionals, and the
//! monitored binomial square-root series.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};
use crate::scalar::{Real, SqrtCoefficients};

/// Square complex matrix stored row-major. Entry `(i, j)` holds `<φ_i|A|φ_j>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    /// Validating constructor: `entries.len() == dim²`, all entries finite.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(CertError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(CertError::EntryCount {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CertError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Real-valued rows; convenient for literals in tests.
    pub fn from_real_rows(rows: &[&[T]]) -> Result<Self> {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex::new(x, T::zero())))
            .collect();
        Self::new(dim, entries)
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// `self + s·I`.
    pub fn add_identity(&self, s: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] = out[(i, i)] + Complex::new(s, T::zero());
        }
        out
    }

    /// `self += s·other`, shapes must agree.
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = *a + *b * s;
        }
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// Sub-matrix on the given index subset (rows and columns).
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        mat_mul(self, rhs)
    }

    pub fn frobenius_norm(&self) -> T {
        hs_norm_sq(self).sqrt()
    }

    /// Maximum column absolute-sum norm, an upper bound on the spectral norm.
    pub fn col_sum_norm(&self) -> T {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
                .collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[i * self.dim + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    /// Panics on dimension mismatch; use [`mat_mul`] for the fallible form.
    fn mul(self, rhs: Self) -> Matrix<T> {
        mat_mul(self, rhs).expect("dimension mismatch in mul")
    }
}

/// Standard matrix product.
pub fn mat_mul<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.dim != b.dim {
        return Err(CertError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let n = a.dim;
    let mut out = vec![Complex::<T>::zero(); n * n];
    // i-k-j order keeps the inner loop contiguous in both b and out.
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.entries[i * n + k];
            if aik.is_zero() {
                continue;
            }
            let brow = &b.entries[k * n..(k + 1) * n];
            for (o, &bkj) in row.iter_mut().zip(brow) {
                *o = *o + aik * bkj;
            }
        }
    }
    Ok(Matrix { dim: n, entries: out })
}

pub fn trace<T: Real>(a: &Matrix<T>) -> Complex<T> {
    (0..a.dim).fold(Complex::zero(), |acc, i| acc + a[(i, i)])
}

/// `Σ_ij |a_ij|²`, the squared Hilbert–Schmidt norm.
pub fn hs_norm_sq<T: Real>(a: &Matrix<T>) -> T {
    a.entries.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest violation `max_ij |a_ij - conj(a_ji)|`.
pub fn hermiticity_defect<T: Real>(a: &Matrix<T>) -> T {
    let n = a.dim;
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian<T: Real>(a: &Matrix<T>, tol: T) -> bool {
    hermiticity_defect(a) <= tol
}

/// `a^k` by repeated squaring.
pub fn matrix_power<T: Real>(a: &Matrix<T>, k: u32) -> Result<Matrix<T>> {
    if k == 0 {
        return Err(CertError::InvalidArgument("matrix_power requires k >= 1".into()));
    }
    let mut result: Option<Matrix<T>> = None;
    let mut base = a.clone();
    let mut e = k;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = &base * &base;
    }
    Ok(result.expect("k >= 1"))
}

/// Tolerances and truncation bounds shared by every criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub hermiticity_tol: f64,
    pub sum_tol: f64,
    pub series_tol: f64,
    pub max_terms: usize,
    pub divergence_threshold: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            hermiticity_tol: 1e-10,
            sum_tol: 1e-9,
            series_tol: 1e-9,
            max_terms: 2000,
            divergence_threshold: 1e6,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.hermiticity_tol, self.sum_tol, self.series_tol];
        if tols.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(CertError::InvalidConfig("tolerances must be finite and >= 0".into()));
        }
        if self.max_terms == 0 {
            return Err(CertError::InvalidConfig("max_terms must be >= 1".into()));
        }
        if !(self.divergence_threshold > 1.0) {
            return Err(CertError::InvalidConfig("divergence_threshold must exceed 1".into()));
        }
        Ok(())
    }

    /// Same config with every tolerance set to `tol`.
    pub fn with_all_tols(mut self, tol: f64) -> Self {
        self.hermiticity_tol = tol;
        self.sum_tol = tol;
        self.series_tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Converged,
    Diverged,
    MaxTermsReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    pub terms_used: usize,
    #[serde(with = "crate::report::json_float")]
    pub final_residual: f64,
}

/// Binomial series `√A = 1̂ + Σ_{n≥1} c_n (A − 1̂)ⁿ`.
///
/// Stops as converged once both the column-sum norm of the current term and a
/// geometric estimate of the remaining tail (from the ratio of the last two
/// term norms) are at most `series_tol`; as diverged once a term norm exceeds
/// `divergence_threshold`. The input is assumed Hermitian.
pub fn sqrt_series<T: Real>(a: &Matrix<T>, cfg: &ToleranceConfig) -> (Matrix<T>, ConvergenceReport) {
    let n = a.dim();
    let shifted = a.add_identity(-T::one());
    let tol = T::lit(cfg.series_tol);
    let blowup = T::lit(cfg.divergence_threshold);

    let mut sum = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    let mut prev_norm: Option<T> = None;
    let mut last = T::zero();

    for (k, c) in SqrtCoefficients::<T>::new().take(cfg.max_terms) {
        power = &power * &shifted;
        let term_norm = power.col_sum_norm() * c.abs();
        sum.axpy(c, &power);
        last = term_norm;

        if !term_norm.is_finite() || term_norm > blowup {
            return (
                sum,
                ConvergenceReport {
                    status: ConvergenceStatus::Diverged,
                    terms_used: k,
                    final_residual: term_norm.as_f64(),
                },
            );
        }
        let tail = match prev_norm {
            _ if term_norm.is_zero() => T::zero(),
            Some(p) if p > T::zero() && term_norm < p => {
                let ratio = term_norm / p;
                term_norm * ratio / (T::one() - ratio)
            }
            _ => T::infinity(),
        };
        if term_norm <= tol && tail <= tol {
            return (
                sum,
                ConvergenceReport {
                    status: ConvergenceStatus::Converged,
                    terms_used: k,
                    final_residual: term_norm.max(tail).as_f64(),
                },
            );
        }
        prev_norm = Some(term_norm);
    }
    (
        sum,
        ConvergenceReport {
            status: ConvergenceStatus::MaxTermsReached,
            terms_used: cfg.max_terms,
            final_residual: last.as_f64(),
        },
    )
}

/// The `l`-th term `c_l Σ_{r=0}^{l-1} (−1)^r C(l,r) A^{l−r}` of the square-root
/// expansion written in positive powers of `A` only.
///
/// `a_powers[j]` must hold `A^{j+1}` for `j < l`. This is the literal
/// binomial form; in floating point it is reliable only for small `l`
/// (cancellation grows like `C(l, l/2)`).
pub fn sqrt_series_powers_term<T: Real>(a_powers: &[Matrix<T>], l: usize) -> Result<Matrix<T>> {
    if l < 1 {
        return Err(CertError::InvalidArgument("term index l must be >= 1".into()));
    }
    if a_powers.len() < l {
        return Err(CertError::InvalidArgument(format!(
            "need {l} precomputed powers, got {}",
            a_powers.len()
        )));
    }
    let coeff = SqrtCoefficients::<T>::new().nth(l - 1).expect("infinite iterator").1;
    let mut out = Matrix::zeros(a_powers[0].dim());
    for r in 0..l {
        let b: T = crate::scalar::binomial(l, r);
        let sign = if r % 2 == 0 { T::one() } else { -T::one() };
        out.axpy(sign * b, &a_powers[l - r - 1]);
    }
    Ok(out.scale(coeff))
}
