//! Real functions on a uniform phase-space grid.

use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};
use crate::kernel::grid_points;
use crate::scalar::Real;

/// Grid geometry and ħ. Endpoints are inclusive: `dq = (q_max − q_min)/(n_q − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
    pub hbar: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(8.0, 256, 1.0)
    }
}

impl GridSpec {
    /// `[−half_width, half_width]²` with `n` points per axis.
    pub fn square(half_width: f64, n: usize, hbar: f64) -> Self {
        Self {
            q_min: -half_width,
            q_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            n_q: n,
            n_p: n,
            hbar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_q", self.n_q), ("n_p", self.n_p)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(CertError::InvalidGrid(format!("{name} = {n} must be a power of two >= 4")));
            }
        }
        let finite = [self.q_min, self.q_max, self.p_min, self.p_max, self.hbar]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.q_max <= self.q_min || self.p_max <= self.p_min {
            return Err(CertError::InvalidGrid("ranges must be finite and increasing".into()));
        }
        if self.hbar <= 0.0 {
            return Err(CertError::InvalidGrid("hbar must be positive".into()));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_q - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn two_pi_hbar(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }
}

/// `W(q_i, p_j)` stored row-major with `q` as the slow index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid<T> {
    spec: GridSpec,
    values: Vec<T>,
}

impl<T: Real> PhaseGrid<T> {
    pub fn new(spec: GridSpec, values: Vec<T>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.n_q * spec.n_p {
            return Err(CertError::EntryCount {
                expected: spec.n_q * spec.n_p,
                actual: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(CertError::NonFinite {
                row: k / spec.n_p,
                col: k % spec.n_p,
            });
        }
        Ok(Self { spec, values })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(T, T) -> T) -> Result<Self> {
        spec.validate()?;
        let qs = grid_points(T::lit(spec.q_min), T::lit(spec.q_max), spec.n_q);
        let ps = grid_points(T::lit(spec.p_min), T::lit(spec.p_max), spec.n_p);
        let mut values = Vec::with_capacity(spec.n_q * spec.n_p);
        for &q in &qs {
            for &p in &ps {
                values.push(f(q, p));
            }
        }
        Self::new(spec, values)
    }

    pub fn zeros(spec: GridSpec) -> Result<Self> {
        Self::new(spec, vec![T::zero(); spec.n_q * spec.n_p])
    }

    pub fn constant(spec: GridSpec, c: T) -> Result<Self> {
        Self::new(spec, vec![c; spec.n_q * spec.n_p])
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.spec.n_p + j]
    }

    pub fn hbar(&self) -> T {
        T::lit(self.spec.hbar)
    }

    pub fn two_pi_hbar(&self) -> T {
        T::lit(self.spec.two_pi_hbar())
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        check_same(&self.spec, &other.spec)?;
        Ok(Self {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `∬ W dq dp` (rectangle rule; test states vanish at the boundary).
    pub fn integral(&self) -> T {
        let cell = T::lit(self.spec.dq() * self.spec.dp());
        self.values.iter().copied().sum::<T>() * cell
    }

    /// `∬ F G dq dp`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        check_same(&self.spec, &other.spec)?;
        let cell = T::lit(self.spec.dq() * self.spec.dp());
        Ok(self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).sum::<T>() * cell)
    }

    /// `(∬ W² dq dp)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        self.inner(self).expect("same grid").sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(CertError::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

/// The trace functional `(1/(2πħ)) ∬ W dq dp` with trace density one.
pub fn phase_trace<T: Real>(w: &PhaseGrid<T>) -> T {
    w.integral() / w.two_pi_hbar()
}

/// Highest Fock index accepted by [`fock_wigner`].
pub const MAX_FOCK: usize = 20;

/// `L_n(x)` by `(k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}`.
pub fn laguerre<T: Real>(n: usize, x: T) -> T {
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() - x;
    for k in 1..n {
        let kf = T::lit(k as f64);
        let next = ((T::lit((2 * k + 1) as f64) - x) * cur - kf * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Wigner function of the n-th oscillator eigenstate,
/// `W_n = ((−1)ⁿ/(πħ)) L_n(2r²/ħ) e^{−r²/ħ}`, `r² = q² + p²`.
pub fn fock_wigner<T: Real>(n: usize, spec: GridSpec) -> Result<PhaseGrid<T>> {
    if n > MAX_FOCK {
        return Err(CertError::InvalidArgument(format!("Fock index {n} exceeds {MAX_FOCK}")));
    }
    let hbar = T::lit(spec.hbar);
    let sign = if n % 2 == 0 { T::one() } else { -T::one() };
    let pre = sign / (T::PI() * hbar);
    let two = T::lit(2.0);
    PhaseGrid::from_fn(spec, |q, p| {
        let r2 = q * q + p * p;
        pre * laguerre(n, two * r2 / hbar) * (-r2 / hbar).exp()
    })
}

/// `Σ_i c_i W_i` over Fock states `0..coeffs.len()`.
pub fn fock_mixture<T: Real>(coeffs: &[T], spec: GridSpec) -> Result<PhaseGrid<T>> {
    let mut out = PhaseGrid::zeros(spec)?;
    for (n, &c) in coeffs.iter().enumerate() {
        if c != T::zero() {
            out = out.add(&fock_wigner(n, spec)?.scale(c))?;
        }
    }
    Ok(out)
}

/// `(2/3) W_0 + (2/3) W_1 − (1/3) W_2`: normalized, saturates the purity
/// bound, yet is not a Wigner function.
pub fn build_tatarskij<T: Real>(spec: GridSpec) -> Result<PhaseGrid<T>> {
    let c = [T::lit(2.0 / 3.0), T::lit(2.0 / 3.0), T::lit(-1.0 / 3.0)];
    fock_mixture(&c, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = PhaseGrid<f64>;

    #[test]
    fn spec_validation() {
        assert!(GridSpec::default().validate().is_ok());
        let mut s = GridSpec::default();
        s.n_q = 100;
        assert!(s.validate().is_err());
        s = GridSpec::default();
        s.hbar = 0.0;
        assert!(s.validate().is_err());
        s = GridSpec::default();
        s.p_max = s.p_min;
        assert!(s.validate().is_err());
        assert!(G::new(GridSpec::default(), vec![0.0; 3]).is_err());
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 0.7), 1.0);
        assert!((laguerre(1, 0.7f64) - 0.3).abs() < 1e-15);
        // L_2 = (x² − 4x + 2)/2, L_3 = (−x³ + 9x² − 18x + 6)/6
        let x = 1.3f64;
        assert!((laguerre(2, x) - (x * x - 4.0 * x + 2.0) / 2.0).abs() < 1e-14);
        assert!((laguerre(3, x) - (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn fock_examples() {
        let spec = GridSpec::default();
        let w0: G = fock_wigner(0, spec).unwrap();
        assert!(w0.values().iter().all(|&v| v > 0.0));
        assert!((w0.integral() - 1.0).abs() < 1e-6);

        let w1: G = fock_wigner(1, spec).unwrap();
        assert!((w1.integral() - 1.0).abs() < 1e-6);
        // sign change at r² = ħ/2
        let f = |r2: f64| -(1.0 / std::f64::consts::PI) * laguerre(1, 2.0 * r2) * (-r2).exp();
        assert!(f(0.49) < 0.0 && f(0.51) > 0.0);

        let overlap = spec.two_pi_hbar() * w0.inner(&w1).unwrap();
        assert!(overlap.abs() < 1e-6);
        assert!(fock_wigner::<f64>(21, spec).is_err());
    }

    #[test]
    fn fock_normalization_up_to_six_and_other_hbar() {
        let spec = GridSpec::default();
        for n in 0..=6 {
            let w: G = fock_wigner(n, spec).unwrap();
            assert!((w.integral() - 1.0).abs() < 1e-6, "n = {n}");
        }
        let spec = GridSpec::square(6.0, 128, 0.5);
        let w: G = fock_wigner(3, spec).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn trace_examples() {
        let spec = GridSpec::default();
        let w0: G = fock_wigner(0, spec).unwrap();
        let tph = spec.two_pi_hbar();
        assert!((phase_trace(&w0) - 1.0 / tph).abs() < 1e-7);
        assert_eq!(phase_trace(&G::zeros(spec).unwrap()), 0.0);
        assert!((phase_trace(&w0.scale(2.0)) - 2.0 / tph).abs() < 1e-7);
    }

    #[test]
    fn tatarskij_is_normalized() {
        let t: G = build_tatarskij(GridSpec::default()).unwrap();
        assert!((t.integral() - 1.0).abs() < 1e-6);
    }
}
