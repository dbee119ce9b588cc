//! Seeded random generators for test inputs and the `gen` command.
//!
//! All generators take an explicit RNG; callers seed a `ChaCha8Rng` so that
//! outputs are reproducible across platforms.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<f64> {
    Matrix::from_fn(dim, |_, _| gaussian(rng))
}

/// `(G + G⁺)/2` for a complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<f64> {
    let g = random_complex(rng, dim);
    (&g + &g.adjoint()).scale(0.5)
}

/// Unit vector drawn uniformly from the complex sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex<f64>> {
    loop {
        let v: Vec<Complex<f64>> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-ish random unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<f64> {
    let mut cols: Vec<Vec<Complex<f64>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex<f64>> = (0..dim).map(|_| gaussian(rng)).collect();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex<f64> = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    Matrix::from_fn(dim, |i, j| cols[j][i])
}

/// `U diag(spectrum) U⁺` for a random unitary `U`.
pub fn with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> Matrix<f64> {
    let u = random_unitary(rng, spectrum.len());
    let d = Matrix::from_real_diag(spectrum);
    let out = &(&u * &d) * &u.adjoint();
    // exact Hermitian symmetrisation of rounding noise
    (&out + &out.adjoint()).scale(0.5)
}

/// Probability vector with entries bounded below by `floor`.
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize, floor: f64) -> Vec<f64> {
    assert!(floor * n as f64 <= 1.0, "floor too large for {n} weights");
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - floor * n as f64;
    raw.iter().map(|r| floor + free * r / total).collect()
}

/// Convex mixture `Σ p_j |v_j><v_j|` of orthonormal random vectors: a density
/// matrix by construction.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<f64> {
    let p = random_probabilities(rng, dim, 0.25 / dim as f64);
    with_spectrum(rng, &p)
}

/// Rank-one projector onto a random unit vector.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<f64> {
    let v = random_unit_vector(rng, dim);
    let p = Matrix::outer(&v);
    (&p + &p.adjoint()).scale(0.5)
}

/// PSD Hermitian matrix with eigenvalues uniform in `[lo, hi]`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Matrix<f64> {
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
    with_spectrum(rng, &spectrum)
}

/// Gram matrix `B⁺B`.
pub fn random_gram<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix<f64> {
    let b = random_complex(rng, dim);
    let g = &b.adjoint() * &b;
    (&g + &g.adjoint()).scale(0.5)
}

/// Trace-one Hermitian spectrum with `hs_norm_sq ≤ 1` and at least one
/// negative eigenvalue of magnitude in `[neg_lo, neg_hi]`; every positive
/// eigenvalue is at least `pos_floor`. Requires `dim ≥ 3`.
pub fn indefinite_unit_trace_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    pos_floor: f64,
    neg_lo: f64,
    neg_hi: f64,
) -> Vec<f64> {
    assert!(dim >= 3, "an indefinite trace-one spectrum inside the HS ball needs dim >= 3");
    loop {
        let n_neg = rng.random_range(1..=((dim - 1) / 2).max(1));
        let negs: Vec<f64> = (0..n_neg).map(|_| rng.random_range(neg_lo..=neg_hi)).collect();
        let n_pos = dim - n_neg;
        let pos_total = 1.0 + negs.iter().sum::<f64>();
        if pos_floor * n_pos as f64 > pos_total {
            continue;
        }
        let p = random_probabilities(rng, n_pos, pos_floor / pos_total);
        let mut spec: Vec<f64> = p.iter().map(|x| x * pos_total).collect();
        spec.extend(negs.iter().map(|y| -y));
        let hs: f64 = spec.iter().map(|x| x * x).sum();
        if hs <= 1.0 - 1e-6 {
            return spec;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_norm_sq, trace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 7);
        let e = &(&u.adjoint() * &u) - &Matrix::identity(7);
        assert!(e.frobenius_norm() < 1e-12);
    }

    #[test]
    fn density_has_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let rho = random_density(&mut rng, 8);
        assert!((trace(&rho).re - 1.0).abs() < 1e-12);
        assert!(hs_norm_sq(&rho) <= 1.0);
    }

    #[test]
    fn indefinite_spectrum_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 3..=16 {
            let s = indefinite_unit_trace_spectrum(&mut rng, dim, 0.02, 0.02, 0.3);
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(s.iter().map(|x| x * x).sum::<f64>() <= 1.0);
            assert!(s.iter().any(|&x| x < 0.0));
        }
    }
}
