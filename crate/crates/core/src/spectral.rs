//! Independent spectral ground truth: a cyclic Jacobi eigensolver for
//! Hermitian matrices and the functionals derived from it.
//!
//! Nothing in the series-based criteria calls into this module except the
//! trace-norm residual, which is itself the quantity the criterion is stated in.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{CertError, Result};
use crate::linalg::{hermiticity_defect, Matrix};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    /// `V f(Λ) V⁺`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        Matrix::from_fn(n, |i, j| {
            let mut s = Complex::zero();
            for k in 0..n {
                s = s + v[(i, k)] * v[(j, k)].conj() * fl[k];
            }
            s
        })
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

fn off_diagonal_sq<T: Real>(a: &Matrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Exits once the off-diagonal Frobenius mass is at most
/// `1e-12·‖a‖_F` (or exactly zero).
pub fn eigh<T: Real>(a: &Matrix<T>, tol: T) -> Result<Spectrum<T>> {
    let defect = hermiticity_defect(a);
    if defect > tol {
        return Err(CertError::NotHermitian {
            defect: defect.as_f64(),
            tol: tol.as_f64(),
        });
    }
    let n = a.dim();
    // work on the exactly Hermitian part
    let mut w = (&a.clone() + &a.adjoint()).scale(T::lit(0.5));
    let mut v = Matrix::identity(n);
    let target = T::lit(1e-12) * w.frobenius_norm();
    let target_sq = target * target;
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_sq(&w);
        if off <= target_sq || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                let b = apq.norm();
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                if b <= eps * eps * (app.abs() + aqq.abs()) || b.is_zero() {
                    w[(p, q)] = Complex::zero();
                    w[(q, p)] = Complex::zero();
                    continue;
                }
                let phase = apq / b;
                let tau = (aqq - app) / (b + b);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // J: J_pp = c, J_qq = c, J_pq = s·e, J_qp = -s·ē
                let se = phase * s;
                let se_bar = phase.conj() * s;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = w[(r, p)];
                    let arq = w[(r, q)];
                    let new_rp = arp * c - se_bar * arq;
                    let new_rq = se * arp + arq * c;
                    w[(r, p)] = new_rp;
                    w[(p, r)] = new_rp.conj();
                    w[(r, q)] = new_rq;
                    w[(q, r)] = new_rq.conj();
                }
                w[(p, p)] = Complex::new(app - t * b, T::zero());
                w[(q, q)] = Complex::new(aqq + t * b, T::zero());
                w[(p, q)] = Complex::zero();
                w[(q, p)] = Complex::zero();
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c - se_bar * vrq;
                    v[(r, q)] = se * vrp + vrq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = Matrix::from_fn(n, |r, k| v[(r, order[k])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// True iff the smallest eigenvalue is at least `-tol`.
pub fn psd_oracle<T: Real>(a: &Matrix<T>, tol: T) -> Result<bool> {
    Ok(eigh(a, herm_tol(a, tol))?.min() >= -tol)
}

fn herm_tol<T: Real>(a: &Matrix<T>, tol: T) -> T {
    tol.max(T::lit(1e-12) * a.max_abs().max(T::one()))
}

/// Sum of singular values. Hermitian inputs use `Σ|λ_i|` directly; others go
/// through the eigenvalues of `a⁺a`.
pub fn trace_norm<T: Real>(a: &Matrix<T>) -> T {
    let scale = a.max_abs();
    if scale.is_zero() {
        return T::zero();
    }
    if hermiticity_defect(a) <= T::lit(1e-13) * scale {
        let spec = eigh(a, T::infinity()).expect("Hermitian input");
        return spec.eigenvalues.iter().map(|l| l.abs()).sum();
    }
    let gram = &a.adjoint() * a;
    let spec = eigh(&gram, T::infinity()).expect("Gram matrix is Hermitian");
    spec.eigenvalues.iter().map(|&l| l.max(T::zero()).sqrt()).sum()
}

/// Operator (spectral) norm, the largest singular value.
pub fn spectral_norm<T: Real>(a: &Matrix<T>) -> T {
    let gram = &a.adjoint() * a;
    let spec = eigh(&gram, T::infinity()).expect("Gram matrix is Hermitian");
    spec.max().max(T::zero()).sqrt()
}

/// Positive square root `V diag(√λ) V⁺`; eigenvalues in `[-tol, 0)` are
/// clamped to zero.
pub fn sqrt_oracle<T: Real>(a: &Matrix<T>, tol: T) -> Result<Matrix<T>> {
    let spec = eigh(a, herm_tol(a, tol))?;
    if spec.min() < -tol {
        return Err(CertError::NotPositive {
            eigenvalue: spec.min().as_f64(),
        });
    }
    Ok(spec.apply(|l| l.max(T::zero()).sqrt()))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Real>(a: &Matrix<T>) -> Complex<T> {
    let n = a.dim();
    let mut m: Vec<Complex<T>> = a.entries().to_vec();
    let mut det = Complex::new(T::one(), T::zero());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i * n + col]
                    .norm()
                    .partial_cmp(&m[j * n + col].norm())
                    .expect("finite")
            })
            .expect("nonempty range");
        if m[pivot * n + col].is_zero() {
            return Complex::zero();
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det = det * d;
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let v = m[col * n + k];
                m[r * n + k] = m[r * n + k] - f * v;
            }
        }
    }
    det
}

pub const MAX_MINOR_DIM: usize = 12;

/// All `2^dim − 1` principal minors are at least `-tol`.
pub fn principal_minors_psd<T: Real>(a: &Matrix<T>, tol: T) -> Result<bool> {
    minors_above(a, |_| -tol)
}

/// Like [`principal_minors_psd`], but a `k×k` minor is compared against
/// `-tol·hᵏ` with `h` the largest diagonal magnitude. Minors of a small
/// matrix scale like `hᵏ`, so a fixed absolute tolerance would wave through
/// negative eigenvalues once `k` is large.
pub fn principal_minors_psd_scaled<T: Real>(a: &Matrix<T>, tol: T) -> Result<bool> {
    let h = a
        .diagonal()
        .iter()
        .map(|d| d.norm())
        .fold(T::zero(), T::max)
        .max(T::min_positive_value());
    minors_above(a, |k| -tol * h.powi(k as i32))
}

fn minors_above<T: Real>(a: &Matrix<T>, floor: impl Fn(usize) -> T) -> Result<bool> {
    let n = a.dim();
    if n > MAX_MINOR_DIM {
        return Err(CertError::TooLarge(n));
    }
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        idx.clear();
        idx.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        let minor = determinant(&a.principal_submatrix(&idx)).re;
        if minor < floor(idx.len()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_norm_sq;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = Matrix<f64>;

    #[test]
    fn eigh_examples() {
        let s = eigh(&M::from_real_diag(&[3.0, 1.0, 2.0]), 0.0).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        let x = M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let s = eigh(&x, 0.0).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14 && (s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for dim in [1, 2, 5, 8, 16] {
            let a = sample::random_hermitian(&mut rng, dim);
            let s = eigh(&a, 1e-12).unwrap();
            let v = &s.eigenvectors;
            let orth = &(&v.adjoint() * v) - &M::identity(dim);
            assert!(orth.frobenius_norm() < 1e-10, "dim {dim}");
            let rec = s.apply(|l| l);
            assert!((&rec - &a).frobenius_norm() < 1e-9, "dim {dim}");
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let a = sample::random_complex(&mut rng, 3);
        assert!(matches!(eigh(&a, 1e-9), Err(CertError::NotHermitian { .. })));
        assert!(psd_oracle(&a, 1e-9).is_err());
    }

    #[test]
    fn two_by_two_matches_quadratic_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let a = sample::random_hermitian(&mut rng, 2);
            let (p, q) = (a[(0, 0)].re, a[(1, 1)].re);
            let b = a[(0, 1)].norm_sqr();
            let mean = 0.5 * (p + q);
            let rad = (0.25 * (p - q) * (p - q) + b).sqrt();
            let s = eigh(&a, 1e-12).unwrap();
            assert!((s.eigenvalues[0] - (mean - rad)).abs() < 1e-10);
            assert!((s.eigenvalues[1] - (mean + rad)).abs() < 1e-10);
        }
    }

    #[test]
    fn psd_oracle_examples() {
        assert!(psd_oracle(&M::from_real_diag(&[0.5, 0.5]), 1e-9).unwrap());
        assert!(!psd_oracle(&M::from_real_diag(&[2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]), 1e-9).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        assert!(psd_oracle(&sample::random_gram(&mut rng, 6), 1e-9).unwrap());
    }

    #[test]
    fn trace_norm_examples() {
        for p in [0.0, 0.3, 0.5, 1.0] {
            let rho = M::from_real_diag(&[p, 1.0 - p]);
            assert!((trace_norm(&rho) - 1.0).abs() < 1e-14);
        }
        let t = trace_norm(&M::from_real_diag(&[2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]));
        assert!((t - 5.0 / 3.0).abs() < 1e-14);
        assert_eq!(trace_norm(&M::zeros(3)), 0.0);
    }

    #[test]
    fn norm_chain_on_non_hermitian_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..20 {
            let a = sample::random_complex(&mut rng, 4);
            let op = spectral_norm(&a);
            let hs = hs_norm_sq(&a).sqrt();
            let tr = trace_norm(&a);
            assert!(op <= hs + 1e-10 && hs <= tr + 1e-10);
            let g = &a.adjoint() * &a;
            let sum: f64 = eigh(&g, 1e-9).unwrap().eigenvalues.iter().sum();
            assert!((hs_norm_sq(&a) - sum).abs() < 1e-10 * sum.max(1.0));
        }
    }

    #[test]
    fn sqrt_oracle_examples() {
        let r = sqrt_oracle(&M::from_real_diag(&[4.0]), 1e-12).unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let p = sample::random_pure(&mut rng, 4);
        assert!((&sqrt_oracle(&p, 1e-9).unwrap() - &p).frobenius_norm() < 1e-9);
        for _ in 0..10 {
            let a = sample::random_gram(&mut rng, 5);
            let r = sqrt_oracle(&a, 1e-9).unwrap();
            assert!((&(&r * &r) - &a).frobenius_norm() < 1e-9 * a.frobenius_norm().max(1.0));
        }
        assert!(sqrt_oracle(&M::from_real_diag(&[1.0, -0.5]), 1e-9).is_err());
    }

    #[test]
    fn principal_minor_examples() {
        assert!(principal_minors_psd(&M::from_real_diag(&[1.0, 0.0]), 1e-12).unwrap());
        assert!(!principal_minors_psd(&M::from_real_diag(&[2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0]), 1e-12).unwrap());
        let a = M::from_real_rows(&[&[0.5, 0.25], &[0.25, 0.5]]).unwrap();
        assert!(principal_minors_psd(&a, 1e-12).unwrap());
        assert!((determinant(&a).re - 3.0 / 16.0).abs() < 1e-15);
        assert!(matches!(
            principal_minors_psd(&M::identity(13), 0.0),
            Err(CertError::TooLarge(13))
        ));
    }

    #[test]
    fn minors_agree_with_oracle_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let mut disagreements = 0;
        for k in 0..500 {
            let dim = 1 + k % 6;
            let a = if k % 2 == 0 {
                sample::random_hermitian(&mut rng, dim)
            } else {
                sample::random_gram(&mut rng, dim)
            };
            if psd_oracle(&a, 1e-9).unwrap() != principal_minors_psd(&a, 1e-9).unwrap() {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn scaled_minors_see_small_negative_eigenvalue_at_dim_12() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let mut spec = vec![1.02 / 11.0; 11];
        spec.push(-0.02);
        let a = sample::with_spectrum(&mut rng, &spec);
        assert!(!psd_oracle(&a, 1e-9).unwrap());
        assert!(!principal_minors_psd_scaled(&a, 1e-9).unwrap());
        let d = sample::random_density(&mut rng, 12);
        assert!(principal_minors_psd_scaled(&d, 1e-9).unwrap());
    }

    #[test]
    fn single_precision_smoke() {
        let a = Matrix::<f32>::from_real_diag(&[0.25, 0.75]);
        let s = eigh(&a, 1e-6).unwrap();
        assert!((s.eigenvalues[0] - 0.25).abs() < 1e-6);
    }
}
