//! The Moyal star product on a phase-space grid.
//!
//! The product is evaluated through the Weyl correspondence instead of the
//! four-fold twisted convolution: a symbol `f(q, p)` is mapped to its kernel
//! `K_f(x, y) = (1/2πħ) ∫ f((x+y)/2, p) e^{ip(x−y)/ħ} dp`, kernels are composed
//! by quadrature, and the result is mapped back by
//! `(f⋆g)(q, p) = ∫ K(q + s/2, q − s/2) e^{−ips/ħ} ds`.
//! With `x_a = q_min + 2a·dq` the midpoints `(x_a + x_b)/2` land exactly on
//! the `q` grid, so no interpolation is needed. The cost is `O(N³)` for an
//! `N×N` grid. The last `q` row is not a midpoint of any pair and is left at
//! zero; test states vanish there anyway.

use num_complex::Complex;
use num_traits::Zero;

use super::grid::{check_same, GridSpec, PhaseGrid};
use crate::error::{CertError, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Precomputed phase factors for one grid.
#[derive(Debug, Clone)]
pub struct StarProduct<T> {
    spec: GridSpec,
    n_x: usize,
    /// `e^{i p_j · 2d·dq/ħ}` at `[(d + n_x − 1)·n_p + j]`, `|d| < n_x`.
    phase: Vec<Complex<T>>,
}

/// Real part of a star product plus the size of the discarded imaginary part.
#[derive(Debug, Clone)]
pub struct StarOutput<T> {
    pub grid: PhaseGrid<T>,
    pub imag_max: T,
    /// `imag_max / max |Re|`.
    pub imag_ratio: T,
}

impl<T: Real> StarProduct<T> {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let n_x = spec.n_q / 2;
        let n_p = spec.n_p;
        let two_dq = T::lit(2.0 * spec.dq());
        let hbar = T::lit(spec.hbar);
        let mut phase = Vec::with_capacity((2 * n_x - 1) * n_p);
        for d in -(n_x as i64 - 1)..=(n_x as i64 - 1) {
            let s = two_dq * T::lit(d as f64);
            for j in 0..n_p {
                let p = T::lit(spec.p_min + j as f64 * spec.dp());
                phase.push(Complex::from_polar(T::one(), p * s / hbar));
            }
        }
        Ok(Self { spec, n_x, phase })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    fn phase_row(&self, d: i64) -> &[Complex<T>] {
        let n_p = self.spec.n_p;
        let k = (d + self.n_x as i64 - 1) as usize;
        &self.phase[k * n_p..(k + 1) * n_p]
    }

    fn to_kernel(&self, f: &[Complex<T>]) -> Matrix<T> {
        let n_p = self.spec.n_p;
        let scale = T::lit(self.spec.dp() / self.spec.two_pi_hbar());
        Matrix::from_fn(self.n_x, |a, b| {
            let row = &f[(a + b) * n_p..(a + b + 1) * n_p];
            let ph = self.phase_row(a as i64 - b as i64);
            let mut s = Complex::zero();
            for (x, e) in row.iter().zip(ph) {
                s = s + *x * *e;
            }
            s * scale
        })
    }

    fn from_kernel(&self, k: &Matrix<T>) -> Vec<Complex<T>> {
        let n_p = self.spec.n_p;
        let n_x = self.n_x;
        let scale = T::lit(4.0 * self.spec.dq());
        let mut out = vec![Complex::zero(); self.spec.n_q * n_p];
        for i in 0..self.spec.n_q {
            let row = &mut out[i * n_p..(i + 1) * n_p];
            let a_lo = i.saturating_sub(n_x - 1);
            let a_hi = i.min(n_x - 1);
            for a in a_lo..=a_hi {
                let b = i - a;
                if b >= n_x {
                    continue;
                }
                let c = k[(a, b)] * scale;
                let ph = self.phase_row(a as i64 - b as i64);
                for (o, e) in row.iter_mut().zip(ph) {
                    *o = *o + c * e.conj();
                }
            }
        }
        out
    }

    /// Star product of complex-valued samples (row-major, `q` slow).
    pub fn product_complex(&self, f: &[Complex<T>], g: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let len = self.spec.n_q * self.spec.n_p;
        for v in [f, g] {
            if v.len() != len {
                return Err(CertError::EntryCount {
                    expected: len,
                    actual: v.len(),
                });
            }
        }
        let kf = self.to_kernel(f);
        let kg = self.to_kernel(g);
        let c = (&kf * &kg).scale(T::lit(2.0 * self.spec.dq()));
        Ok(self.from_kernel(&c))
    }

    pub fn product(&self, f: &PhaseGrid<T>, g: &PhaseGrid<T>) -> Result<StarOutput<T>> {
        check_same(&self.spec, f.spec())?;
        check_same(&self.spec, g.spec())?;
        let lift = |w: &PhaseGrid<T>| -> Vec<Complex<T>> {
            w.values().iter().map(|&v| Complex::new(v, T::zero())).collect()
        };
        let out = self.product_complex(&lift(f), &lift(g))?;
        let imag_max = out.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
        let re: Vec<T> = out.iter().map(|z| z.re).collect();
        let grid = PhaseGrid::new(self.spec, re)?;
        let scale = grid.max_abs();
        let imag_ratio = if scale > T::zero() { imag_max / scale } else { imag_max };
        Ok(StarOutput {
            grid,
            imag_max,
            imag_ratio,
        })
    }

    /// `w^{⋆m}` as a left fold, `m ≥ 1`.
    pub fn power(&self, w: &PhaseGrid<T>, m: usize) -> Result<PhaseGrid<T>> {
        if m == 0 {
            return Err(CertError::InvalidArgument("star power needs m >= 1".into()));
        }
        let mut acc = w.clone();
        for _ in 1..m {
            acc = self.product(&acc, w)?.grid;
        }
        Ok(acc)
    }
}

/// `f ⋆ g` on a shared grid.
pub fn moyal_star<T: Real>(f: &PhaseGrid<T>, g: &PhaseGrid<T>) -> Result<StarOutput<T>> {
    check_same(f.spec(), g.spec())?;
    StarProduct::new(*f.spec())?.product(f, g)
}

/// `w ⋆ w ⋆ … ⋆ w` (`m` factors).
pub fn star_power<T: Real>(w: &PhaseGrid<T>, m: usize) -> Result<PhaseGrid<T>> {
    StarProduct::new(*w.spec())?.power(w, m)
}
