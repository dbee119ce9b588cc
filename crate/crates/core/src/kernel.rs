//! Operators on L²(ℝ) as sampled two-point kernels `A(x, y)`.
//!
//! Integrals use the trapezoid rule on a uniform grid with inclusive
//! endpoints. [`kernel_to_matrix`] symmetrically weights the samples so that
//! the matrix criteria see the same trace, Hilbert–Schmidt norm and products.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{CertError, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Default grid used throughout: `[-8, 8]` with 801 points.
pub const DEFAULT_X_RANGE: (f64, f64) = (-8.0, 8.0);
pub const DEFAULT_POINTS: usize = 801;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Kernel<T> {
    x_min: T,
    x_max: T,
    n_points: usize,
    values: Vec<Complex<T>>,
}

impl<T: Real> Kernel<T> {
    /// `values` is row-major, `values[i·n + j] = A(x_i, x_j)`.
    pub fn new(x_min: T, x_max: T, n_points: usize, values: Vec<Complex<T>>) -> Result<Self> {
        if n_points < 2 {
            return Err(CertError::InvalidGrid("kernel grid needs at least 2 points".into()));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(CertError::InvalidGrid(format!("bad range [{x_min}, {x_max}]")));
        }
        if values.len() != n_points * n_points {
            return Err(CertError::EntryCount {
                expected: n_points * n_points,
                actual: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(CertError::NonFinite {
                row: k / n_points,
                col: k % n_points,
            });
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            values,
        })
    }

    /// Samples `f(x, y)` on the grid.
    pub fn from_fn(x_min: T, x_max: T, n_points: usize, f: impl Fn(T, T) -> Complex<T>) -> Result<Self> {
        let grid = grid_points(x_min, x_max, n_points);
        let mut values = Vec::with_capacity(n_points * n_points);
        for &x in &grid {
            for &y in &grid {
                values.push(f(x, y));
            }
        }
        Self::new(x_min, x_max, n_points, values)
    }

    pub fn zeros(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, vec![Complex::new(T::zero(), T::zero()); n_points * n_points])
    }

    /// Discrete delta: `1/ŵ_i` on the diagonal, so composing with it is exact.
    pub fn identity(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        let mut k = Self::zeros(x_min, x_max, n_points)?;
        let w = k.weights();
        for (i, wi) in w.iter().enumerate() {
            k.values[i * n_points + i] = Complex::new(T::one() / *wi, T::zero());
        }
        Ok(k)
    }

    /// Rank-one kernel `Σ_k c_k f_k(x) conj(f_k(y))` from sampled functions.
    pub fn from_outer_products(x_min: T, x_max: T, terms: &[(T, Vec<Complex<T>>)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, f)| f.len())
            .ok_or_else(|| CertError::InvalidArgument("no terms".into()))?;
        let mut values = vec![Complex::new(T::zero(), T::zero()); n * n];
        for (c, f) in terms {
            if f.len() != n {
                return Err(CertError::DimensionMismatch {
                    left: n,
                    right: f.len(),
                });
            }
            for i in 0..n {
                let fi = f[i] * *c;
                for j in 0..n {
                    values[i * n + j] = values[i * n + j] + fi * f[j].conj();
                }
            }
        }
        Self::new(x_min, x_max, n, values)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::lit((self.n_points - 1) as f64)
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.values[i * self.n_points + j]
    }

    pub fn grid(&self) -> Vec<T> {
        grid_points(self.x_min, self.x_max, self.n_points)
    }

    /// Trapezoid weights `ŵ_i = dx·w_i` with `w = (½, 1, …, 1, ½)`.
    pub fn weights(&self) -> Vec<T> {
        trapezoid_weights(self.dx(), self.n_points)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.x_min == other.x_min && self.x_max == other.x_max
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            values: self.values.iter().map(|z| *z * s).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect(),
            ..self.clone()
        })
    }

    /// `(A + A⁺)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.n_points;
        let half = T::lit(0.5);
        let mut values = self.values.clone();
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = (self.at(i, j) + self.at(j, i).conj()) * half;
            }
        }
        Self { values, ..self.clone() }
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(CertError::GridMismatch(format!(
                "[{}, {}]x{} vs [{}, {}]x{}",
                self.x_min, self.x_max, self.n_points, other.x_min, other.x_max, other.n_points
            )))
        }
    }
}

pub(crate) fn grid_points<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::lit((n - 1) as f64);
    (0..n).map(|i| lo + step * T::lit(i as f64)).collect()
}

pub(crate) fn trapezoid_weights<T: Real>(dx: T, n: usize) -> Vec<T> {
    let mut w = vec![dx; n];
    w[0] = dx * T::lit(0.5);
    w[n - 1] = dx * T::lit(0.5);
    w
}

/// `(AB)(x_i, x_k) = Σ_j A(x_i, x_j) B(x_j, x_k) ŵ_j`.
pub fn kernel_compose<T: Real>(a: &Kernel<T>, b: &Kernel<T>) -> Result<Kernel<T>> {
    a.check_grid(b)?;
    let n = a.n_points;
    let w = a.weights();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; n * n];
    for i in 0..n {
        let row = &mut out[i * n..(i + 1) * n];
        for j in 0..n {
            let aij = a.at(i, j) * w[j];
            if aij == zero {
                continue;
            }
            let brow = &b.values[j * n..(j + 1) * n];
            for (o, bjk) in row.iter_mut().zip(brow) {
                *o = *o + aij * *bjk;
            }
        }
    }
    Ok(Kernel {
        values: out,
        ..a.clone()
    })
}

/// `∫ A(x, x) dx`.
pub fn kernel_trace<T: Real>(a: &Kernel<T>) -> Complex<T> {
    let w = a.weights();
    (0..a.n_points)
        .map(|i| a.at(i, i) * w[i])
        .fold(Complex::new(T::zero(), T::zero()), |s, z| s + z)
}

/// `∫∫ |A(x, y)|² dx dy`.
pub fn kernel_hs_norm_sq<T: Real>(a: &Kernel<T>) -> T {
    let w = a.weights();
    let n = a.n_points;
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + a.at(i, j).norm_sqr() * w[i] * w[j];
        }
    }
    s
}

/// `max |A(x_i, x_j) − conj A(x_j, x_i)| ≤ tol`.
pub fn kernel_is_symmetric<T: Real>(a: &Kernel<T>, tol: T) -> bool {
    let n = a.n_points;
    (0..n).all(|i| (i..n).all(|j| (a.at(i, j) - a.at(j, i).conj()).norm() <= tol))
}

/// `M_ij = A(x_i, x_j) √(ŵ_i ŵ_j)`.
pub fn kernel_to_matrix<T: Real>(a: &Kernel<T>) -> Matrix<T> {
    let s: Vec<T> = a.weights().into_iter().map(|w| w.sqrt()).collect();
    Matrix::from_fn(a.n_points, |i, j| a.at(i, j) * (s[i] * s[j]))
}

/// Harmonic-oscillator eigenfunctions `ψ_0..=ψ_{n_max}` (unit mass and
/// frequency) sampled at `xs`, by the three-term recurrence
/// `ψ_{n+1} = √(2/(ħ(n+1))) x ψ_n − √(n/(n+1)) ψ_{n−1}`.
pub fn oscillator_eigenfunctions<T: Real>(xs: &[T], n_max: usize, hbar: T) -> Vec<Vec<T>> {
    let pi = T::PI();
    let norm = (pi * hbar).powf(T::lit(-0.25));
    let two = T::lit(2.0);
    let mut out: Vec<Vec<T>> = Vec::with_capacity(n_max + 1);
    out.push(xs.iter().map(|&x| norm * (-(x * x) / (two * hbar)).exp()).collect());
    for n in 0..n_max {
        let nf = T::lit(n as f64);
        let a = (two / (hbar * (nf + T::one()))).sqrt();
        let b = (nf / (nf + T::one())).sqrt();
        let next: Vec<T> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let prev = if n == 0 { T::zero() } else { out[n - 1][i] };
                a * x * out[n][i] - b * prev
            })
            .collect();
        out.push(next);
    }
    out
}

/// `Σ_k c_k |ψ_k⟩⟨ψ_k|` over the first `coeffs.len()` oscillator eigenfunctions.
pub fn oscillator_mixture_kernel<T: Real>(
    x_min: T,
    x_max: T,
    n_points: usize,
    hbar: T,
    coeffs: &[T],
) -> Result<Kernel<T>> {
    if coeffs.is_empty() {
        return Err(CertError::InvalidArgument("no mixture coefficients".into()));
    }
    let xs = grid_points(x_min, x_max, n_points);
    let psi = oscillator_eigenfunctions(&xs, coeffs.len() - 1, hbar);
    let terms: Vec<(T, Vec<Complex<T>>)> = coeffs
        .iter()
        .zip(psi)
        .map(|(&c, f)| (c, f.into_iter().map(|v| Complex::new(v, T::zero())).collect()))
        .collect();
    Kernel::from_outer_products(x_min, x_max, &terms)
}

/// Projector `ψ_n(x) ψ_n(y)`.
pub fn oscillator_projector_kernel<T: Real>(
    x_min: T,
    x_max: T,
    n_points: usize,
    hbar: T,
    n: usize,
) -> Result<Kernel<T>> {
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    oscillator_mixture_kernel(x_min, x_max, n_points, hbar, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{check_pure_infinite, run_all, DEFAULT_N_MAX};
    use crate::linalg::{hs_norm_sq, trace, ToleranceConfig};
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type K = Kernel<f64>;
    const LO: f64 = -8.0;
    const HI: f64 = 8.0;

    fn proj(n: usize) -> K {
        oscillator_projector_kernel(LO, HI, DEFAULT_POINTS, 1.0, n).unwrap()
    }

    fn rel_l2(a: &K, b: &K) -> f64 {
        let d = a.add(&b.scale(-1.0)).unwrap();
        (kernel_hs_norm_sq(&d) / kernel_hs_norm_sq(b)).sqrt()
    }

    fn gaussian_kernel(n: usize) -> K {
        K::from_fn(LO, HI, n, |x, y| Complex::new((-(x * x + y * y) / 2.0 - (x - y).powi(2)).exp(), 0.0)).unwrap()
    }

    #[test]
    fn construction_is_validated() {
        assert!(K::new(0.0, 1.0, 1, vec![Complex::new(0.0, 0.0)]).is_err());
        assert!(K::new(1.0, 0.0, 2, vec![Complex::new(0.0, 0.0); 4]).is_err());
        assert!(K::new(0.0, 1.0, 2, vec![Complex::new(0.0, 0.0); 3]).is_err());
        let mut v = vec![Complex::new(0.0, 0.0); 4];
        v[3] = Complex::new(f64::NAN, 0.0);
        assert_eq!(
            K::new(0.0, 1.0, 2, v).unwrap_err(),
            CertError::NonFinite { row: 1, col: 1 }
        );
    }

    #[test]
    fn compose_examples() {
        let g = gaussian_kernel(201);
        let id = K::identity(LO, HI, 201).unwrap();
        assert!(rel_l2(&kernel_compose(&id, &g).unwrap(), &g) < 1e-12);
        assert!(rel_l2(&kernel_compose(&g, &id).unwrap(), &g) < 1e-12);

        let p = proj(0);
        assert!(rel_l2(&kernel_compose(&p, &p).unwrap(), &p) < 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let a = random_kernel(&mut rng, 61);
        let b = random_kernel(&mut rng, 61);
        let ab = kernel_trace(&kernel_compose(&a, &b).unwrap());
        let ba = kernel_trace(&kernel_compose(&b, &a).unwrap());
        assert!((ab - ba).norm() < 1e-8);

        let other = K::zeros(LO, HI, 60).unwrap();
        assert!(matches!(kernel_compose(&a, &other), Err(CertError::GridMismatch(_))));
    }

    fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> K {
        let m = sample::random_complex(rng, n);
        K::new(LO, HI, n, m.entries().to_vec()).unwrap()
    }

    #[test]
    fn trace_examples() {
        assert!((kernel_trace(&proj(0)) - 1.0).norm() < 1e-6);
        assert_eq!(kernel_trace(&K::zeros(LO, HI, 11).unwrap()).norm(), 0.0);
        let two = proj(0).add(&proj(1)).unwrap();
        assert!((kernel_trace(&two) - 2.0).norm() < 1e-6);
    }

    #[test]
    fn hs_examples() {
        assert!((kernel_hs_norm_sq(&proj(0)) - 1.0).abs() < 1e-6);
        let mix = oscillator_mixture_kernel(LO, HI, DEFAULT_POINTS, 1.0, &[0.5, 0.5]).unwrap();
        assert!((kernel_hs_norm_sq(&mix) - 0.5).abs() < 1e-6);
        assert_eq!(kernel_hs_norm_sq(&K::zeros(LO, HI, 11).unwrap()), 0.0);
    }

    #[test]
    fn symmetry_examples() {
        let g = gaussian_kernel(41);
        assert!(kernel_is_symmetric(&g, 0.0));
        let mut bumped = g.clone();
        bumped.values[1] += Complex::new(0.0, 1e-3);
        assert!(!kernel_is_symmetric(&bumped, 1e-6));
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        assert!(kernel_is_symmetric(&random_kernel(&mut rng, 31).hermitian_part(), 0.0));
    }

    #[test]
    fn matrix_adapter_examples() {
        let loose = ToleranceConfig::default().with_all_tols(1e-4);
        let m = kernel_to_matrix(&proj(0));
        assert!(check_pure_infinite(&m, &loose).accepted());

        // matrix criteria are O(n³) per step, so run them on a coarser grid
        let mix = oscillator_mixture_kernel(LO, HI, 129, 1.0, &[2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]).unwrap();
        let v = run_all(&kernel_to_matrix(&mix), &loose, DEFAULT_N_MAX);
        assert!(!v.is_state);
        assert!(v.conflicting.is_empty(), "{:?}", v.conflicting);

        let z = kernel_to_matrix(&K::zeros(LO, HI, 5).unwrap());
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn adapter_preserves_trace_and_hs() {
        let mix = oscillator_mixture_kernel(LO, HI, 301, 1.0, &[0.2, 0.5, 0.3]).unwrap();
        let m = kernel_to_matrix(&mix);
        assert!((trace(&m) - kernel_trace(&mix)).norm() < 1e-8);
        assert!((hs_norm_sq(&m) - kernel_hs_norm_sq(&mix)).abs() < 1e-8);
    }

    #[test]
    fn oscillator_projectors_are_orthogonal() {
        let ps: Vec<K> = (0..5).map(|n| oscillator_projector_kernel(LO, HI, 401, 1.0, n).unwrap()).collect();
        for (m, pm) in ps.iter().enumerate() {
            for (n, pn) in ps.iter().enumerate() {
                let c = kernel_compose(pm, pn).unwrap();
                if m == n {
                    assert!(rel_l2(&c, pn) < 1e-5, "{m}");
                } else {
                    assert!(kernel_hs_norm_sq(&c).sqrt() < 1e-5, "{m} {n}");
                }
            }
        }
    }

    #[test]
    fn eigenfunctions_are_orthonormal_with_other_hbar() {
        let xs = grid_points(-12.0, 12.0, 1201);
        let w = trapezoid_weights(xs[1] - xs[0], xs.len());
        let psi = oscillator_eigenfunctions(&xs, 10, 2.5);
        for m in 0..=10 {
            for n in 0..=10 {
                let ip: f64 = (0..xs.len()).map(|i| psi[m][i] * psi[n][i] * w[i]).sum();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-10, "{m} {n} {ip}");
            }
        }
    }
}
