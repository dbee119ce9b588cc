//! Exact arithmetic for `W = Σ c_i W_i` over mutually orthogonal pure-state
//! Wigner functions.
//!
//! Orthogonality `∫ W_i ⋆ W_j = δ_ij/(2πħ)` together with `W_i ⋆ W_i =
//! W_i/(2πħ)` gives `W^{⋆m} = (2πħ)^{−(m−1)} Σ c_i^m W_i`, so every integral
//! the criteria need is a power sum of rationals. Sums are reported in
//! dimensionless normalization (powers of `2πħ` stripped) and are exact.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::criteria::StateVerdict;
use crate::error::{CertError, Result};
use crate::linalg::{ConvergenceReport, ConvergenceStatus};
use crate::report::{thin_sequence, Check, CriterionId, CriterionReport};
use crate::scalar::{
    binomial_alternating_sum, constant_free_inner, constant_free_sqrt_partial_sums, sqrt_coefficient_tails,
};

/// `(2πħ)^{scale_power} Σ c_i W_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalMixture {
    pub hbar: f64,
    pub coeffs: Vec<BigRational>,
    /// Exponent of the symbolic prefactor `2πħ`; zero for a plain mixture.
    pub scale_power: i32,
}

impl OrthogonalMixture {
    pub fn new(hbar: f64, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(CertError::InvalidArgument("mixture needs at least one coefficient".into()));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(CertError::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self {
            hbar,
            coeffs,
            scale_power: 0,
        })
    }

    /// Parses `"2/3,2/3,-1/3"`; integers are accepted too.
    pub fn parse(hbar: f64, list: &str) -> Result<Self> {
        let coeffs = list
            .split(',')
            .map(|s| {
                let s = s.trim();
                BigRational::from_str(s)
                    .map_err(|_| CertError::InvalidArgument(format!("not a rational number: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(hbar, coeffs)
    }

    pub fn from_ratios(hbar: f64, ratios: &[(i64, i64)]) -> Result<Self> {
        if ratios.iter().any(|&(_, d)| d == 0) {
            return Err(CertError::InvalidArgument("zero denominator".into()));
        }
        Self::new(hbar, ratios.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    pub fn two_pi_hbar(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }

    /// `Σ c_i^k`, the dimensionless part of `∫ W^{⋆k}`.
    pub fn moment(&self, k: u32) -> BigRational {
        self.coeffs
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + num_traits::pow(c.clone(), k as usize))
    }

    /// `∫ W dq dp`, exact when `scale_power = 0`.
    pub fn normalization(&self) -> BigRational {
        self.moment(1)
    }

    /// `(2πħ) ∫ W⋆W`, i.e. `Tr ρ²`.
    pub fn purity(&self) -> BigRational {
        self.moment(2)
    }

    fn require_plain(&self) -> Result<()> {
        if self.scale_power == 0 {
            Ok(())
        } else {
            Err(CertError::InvalidArgument(format!(
                "criteria need an unscaled mixture, got prefactor (2 pi hbar)^{}",
                self.scale_power
            )))
        }
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `W^{⋆m}`: coefficients `c_i^m`, prefactor exponent decreased by `m − 1`.
pub fn mixture_star_power(mix: &OrthogonalMixture, m: usize) -> Result<OrthogonalMixture> {
    if m == 0 {
        return Err(CertError::InvalidArgument("star power needs m >= 1".into()));
    }
    let m_i32 = i32::try_from(m).map_err(|_| CertError::InvalidArgument(format!("power {m} too large")))?;
    Ok(OrthogonalMixture {
        hbar: mix.hbar,
        coeffs: mix.coeffs.iter().map(|c| num_traits::pow(c.clone(), m)).collect(),
        scale_power: m_i32 * mix.scale_power - (m_i32 - 1),
    })
}

/// How `T_m = Σ c_i (1 − c_i)^m` behaves as `m → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitBehaviour {
    Zero,
    MinusInfinity,
    /// No limit in `[−∞, 0]`: along at least one parity of `m` the sequence
    /// stays bounded below or grows.
    Oscillating,
}

/// Exact asymptotics of `T_m`. Terms are grouped by `λ = 1 − c`; along even
/// `m` the weight of level `|λ| = ρ` is `w(ρ) + w(−ρ)`, along odd `m` it is
/// `w(ρ) − w(−ρ)`, and the largest level with nonzero weight dominates.
pub fn binomial_limit(coeffs: &[BigRational]) -> LimitBehaviour {
    let one = BigRational::one();
    let mut weights: Vec<(BigRational, BigRational)> = Vec::new();
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        let lambda = &one - c;
        match weights.iter_mut().find(|(l, _)| *l == lambda) {
            Some((_, w)) => *w += c,
            None => weights.push((lambda, c.clone())),
        }
    }
    if weights.iter().all(|(l, _)| l.abs() < one) {
        return LimitBehaviour::Zero;
    }
    let mut levels: Vec<BigRational> = weights.iter().map(|(l, _)| l.abs()).collect();
    levels.sort();
    levels.dedup();
    let weight = |lambda: &BigRational| -> BigRational {
        weights
            .iter()
            .find(|(l, _)| l == lambda)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(BigRational::zero)
    };
    let diverges_down = |odd: bool| {
        for rho in levels.iter().rev() {
            let (up, down) = (weight(rho), weight(&-rho));
            let w = if odd { up - down } else { up + down };
            if !w.is_zero() {
                return *rho > one && w.is_negative();
            }
        }
        false
    };
    if diverges_down(false) && diverges_down(true) {
        LimitBehaviour::MinusInfinity
    } else {
        LimitBehaviour::Oscillating
    }
}

/// Every exact quantity the phase criteria look at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSums {
    pub normalization: BigRational,
    pub purity: BigRational,
    /// Closed form `Σ |c_i|` of the square-root series (`Tr √(ρ²)`).
    pub trace_sqrt: BigRational,
    /// Raw partial sums of the constant-free series, `l = 1..=l_max`.
    pub trace_sqrt_partial: Vec<BigRational>,
    /// Last partial sum plus the tail correction.
    pub trace_sqrt_corrected: f64,
    /// `T_0..=T_{m_max}` from the literal alternating binomial formula.
    pub binomial: Vec<BigRational>,
    pub limit: LimitBehaviour,
}

/// Number of exact square-root series terms evaluated as a cross-check.
pub const EXACT_SQRT_TERMS: usize = 40;

pub fn mixture_sums(mix: &OrthogonalMixture, m_max: usize) -> MixtureSums {
    let l_max = EXACT_SQRT_TERMS;
    // traces of (ρ²)^j for j = 0..=l_max (index 0 unused)
    let powers: Vec<BigRational> = (0..=l_max as u32).map(|j| mix.moment(2 * j)).collect();
    let partial = constant_free_sqrt_partial_sums(&powers, l_max);
    let tail = sqrt_coefficient_tails(l_max)[l_max];
    let last_inner = f(&constant_free_inner(&powers, l_max));
    let sign = if l_max % 2 == 0 { 1.0 } else { -1.0 };
    let corrected = f(partial.last().expect("l_max >= 1")) - tail * sign * last_inner;

    let moments: Vec<BigRational> = (1..=m_max as u32 + 1).map(|k| mix.moment(k)).collect();
    let binomial = (0..=m_max).map(|m| binomial_alternating_sum(&moments, m)).collect();
    MixtureSums {
        normalization: mix.normalization(),
        purity: mix.purity(),
        trace_sqrt: mix.coeffs.iter().map(|c| c.abs()).sum(),
        trace_sqrt_partial: partial,
        trace_sqrt_corrected: corrected,
        binomial,
        limit: binomial_limit(&mix.coeffs),
    }
}

/// The phase criteria in exact arithmetic: `W_GATES`, `W_TRACE_SQRT`,
/// `W_BINOMIAL`, `W_LIMIT`, `W_PURE`, with zero tolerance.
pub fn mixture_criteria(mix: &OrthogonalMixture, m_max: usize) -> Result<Vec<CriterionReport>> {
    mix.require_plain()?;
    let sums = mixture_sums(mix, m_max);
    let one = BigRational::one();
    let tph = mix.two_pi_hbar();
    let finish = |r: CriterionReport| r.with_diag("two_pi_hbar", tph);

    let gates = vec![
        Check::new("2 pi hbar int W*W <= 1", sums.purity <= one, f(&sums.purity)),
        Check::new("W*W real", true, 0.0),
        Check::new("int W = 1", sums.normalization == one, f(&sums.normalization)),
    ];
    let gates_ok = gates.iter().all(Check::passed);
    let gated = |id: CriterionId, extra: Vec<Check>| {
        let mut checks = gates.clone();
        if gates_ok {
            checks.extend(extra);
        }
        CriterionReport::from_checks(id, checks)
    };

    let mut out = vec![finish(CriterionReport::from_checks(CriterionId::WGates, gates.clone()))];

    let mut r = gated(
        CriterionId::WTraceSqrt,
        vec![Check::new("2 pi hbar * sum = 1", sums.trace_sqrt == one, f(&sums.trace_sqrt))],
    );
    r.sequence = thin_sequence(&sums.trace_sqrt_partial.iter().map(f).collect::<Vec<_>>(), 1);
    let gap = (sums.trace_sqrt_corrected - f(&sums.trace_sqrt)).abs();
    r.convergence = Some(ConvergenceReport {
        status: ConvergenceStatus::Converged,
        terms_used: EXACT_SQRT_TERMS,
        final_residual: gap,
    });
    out.push(finish(
        r.with_diag("sum_dimensionless", f(&sums.trace_sqrt))
            .with_diag("sum", f(&sums.trace_sqrt) / tph)
            .with_diag("corrected_partial_sum_dimensionless", sums.trace_sqrt_corrected),
    ));

    let t: Vec<f64> = sums.binomial.iter().map(f).collect();
    let witness = sums.binomial.iter().position(|x| x.is_negative());
    // same value the grid path reports, which stops at the witness
    let worst = witness.map_or_else(|| t.iter().copied().fold(f64::INFINITY, f64::min), |w| t[w]);
    let mut r = gated(CriterionId::WBinomial, vec![Check::new("T_m >= 0", witness.is_none(), worst)]);
    if gates_ok {
        r.witness = witness;
        r.sequence = thin_sequence(&t, 0);
    }
    let mut r = r.with_diag("m_max", m_max as f64);
    if let (true, Some(w)) = (gates_ok, witness) {
        r = r.with_diag("witness_value_times_two_pi_hbar", t[w] * tph);
    }
    out.push(finish(r));

    let limit_value = match sums.limit {
        LimitBehaviour::Zero => 0.0,
        LimitBehaviour::MinusInfinity => f64::NEG_INFINITY,
        LimitBehaviour::Oscillating => f64::NAN,
    };
    let mut r = gated(
        CriterionId::WLimit,
        vec![Check::new("T_m -> 0", sums.limit == LimitBehaviour::Zero, limit_value)],
    );
    if gates_ok {
        r.sequence = thin_sequence(&t, 0);
        r.witness = witness;
    }
    out.push(finish(r));

    let idempotent = mix.coeffs.iter().all(|c| c * c == *c);
    let pure = vec![
        Check::new("2 pi hbar int W*W = 1", sums.purity == one, f(&sums.purity)),
        Check::new("W*W real", true, 0.0),
        Check::new("W*W = W / (2 pi hbar)", idempotent, if idempotent { 0.0 } else { 1.0 }),
        Check::new("int W = 1", sums.normalization == one, f(&sums.normalization)),
    ];
    out.push(finish(CriterionReport::from_checks(CriterionId::WPure, pure)));
    Ok(out)
}

/// Aggregates [`mixture_criteria`] with `W_TRACE_SQRT` as reference.
pub fn mixture_verdict(mix: &OrthogonalMixture, m_max: usize) -> Result<StateVerdict> {
    let mut reports = mixture_criteria(mix, m_max)?;
    let gates = reports.remove(0);
    let sqrt = reports.remove(0);
    let mut v = StateVerdict::aggregate(sqrt, reports);
    v.reports.push(gates);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    fn tat() -> OrthogonalMixture {
        OrthogonalMixture::from_ratios(1.0, &[(2, 3), (2, 3), (-1, 3)]).unwrap()
    }

    #[test]
    fn star_power_examples() {
        let p = mixture_star_power(&tat(), 2).unwrap();
        assert_eq!(p.scale_power, -1);
        assert_eq!(p.coeffs, vec![q(4, 9), q(4, 9), q(1, 9)]);
        assert_eq!(mixture_star_power(&tat(), 1).unwrap(), tat());
        let proj = OrthogonalMixture::from_ratios(1.0, &[(1, 1), (0, 1)]).unwrap();
        let p = mixture_star_power(&proj, 3).unwrap();
        assert_eq!(p.scale_power, -2);
        assert_eq!(p.coeffs, proj.coeffs);
        assert!(mixture_star_power(&proj, 0).is_err());
    }

    #[test]
    fn parse_and_validation() {
        assert_eq!(OrthogonalMixture::parse(1.0, "2/3, 2/3,-1/3").unwrap(), tat());
        assert!(OrthogonalMixture::parse(1.0, "").is_err());
        assert!(OrthogonalMixture::parse(1.0, "a/b").is_err());
        assert!(OrthogonalMixture::new(0.0, vec![q(1, 1)]).is_err());
        assert!(OrthogonalMixture::new(1.0, vec![]).is_err());
    }

    #[test]
    fn tatarskij_exact_values() {
        let s = mixture_sums(&tat(), 10);
        assert_eq!(s.normalization, q(1, 1));
        assert_eq!(s.purity, q(1, 1));
        assert_eq!(s.trace_sqrt, q(5, 3));
        assert_eq!(&s.binomial[..3], &[q(1, 1), q(0, 1), q(-4, 9)]);
        assert!(s.binomial[1..].windows(2).all(|w| w[1] < w[0]));
        assert_eq!(s.limit, LimitBehaviour::MinusInfinity);
        // lower bound; the slowest eigenvalue 1/9 of ρ² leaves τ_40 (8/9)^40 < 1e-3
        let gap = 5.0 / 3.0 - s.trace_sqrt_corrected;
        assert!((0.0..1e-3).contains(&gap), "{gap}");

        let reports = mixture_criteria(&tat(), 10).unwrap();
        let by = |id| reports.iter().find(|r| r.criterion == id).unwrap();
        assert!(by(CriterionId::WGates).accepted());
        assert!(by(CriterionId::WTraceSqrt).rejected());
        assert_eq!(by(CriterionId::WBinomial).witness, Some(2));
        assert!(by(CriterionId::WLimit).rejected());
        assert!(by(CriterionId::WPure).rejected());
        let w = by(CriterionId::WBinomial).diagnostic("witness_value_times_two_pi_hbar").unwrap();
        assert!((w + 4.0 / 9.0 * 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn singleton_is_pure_state() {
        let one = OrthogonalMixture::from_ratios(1.0, &[(1, 1)]).unwrap();
        let reports = mixture_criteria(&one, 20).unwrap();
        assert!(reports.iter().all(|r| r.verdict == Verdict::Accept));
        let v = mixture_verdict(&one, 20).unwrap();
        assert!(v.is_state);
        assert_eq!(v.is_pure, Some(true));
    }

    #[test]
    fn half_half_is_mixed_state() {
        let m = OrthogonalMixture::from_ratios(1.0, &[(1, 2), (1, 2)]).unwrap();
        let v = mixture_verdict(&m, 20).unwrap();
        assert!(v.is_state);
        assert_eq!(v.is_pure, Some(false));
        let s = mixture_sums(&m, 5);
        for (k, t) in s.binomial.iter().enumerate() {
            assert_eq!(*t, num_traits::pow(q(1, 2), k));
        }
    }

    #[test]
    fn limit_classification() {
        assert_eq!(binomial_limit(&[q(1, 2), q(1, 2)]), LimitBehaviour::Zero);
        assert_eq!(binomial_limit(&[q(1, 1), q(0, 1)]), LimitBehaviour::Zero);
        assert_eq!(binomial_limit(&[q(2, 1), q(-1, 1)]), LimitBehaviour::MinusInfinity);
        assert_eq!(binomial_limit(&[q(2, 1), q(1, 2)]), LimitBehaviour::Oscillating);
        assert_eq!(binomial_limit(&[q(-2, 1), q(-2, 1), q(4, 1), q(-1, 1)]), LimitBehaviour::MinusInfinity);
        assert_eq!(binomial_limit(&[q(3, 1), q(-1, 1)]), LimitBehaviour::Oscillating);
        assert_eq!(binomial_limit(&[q(3, 1), q(-2, 1)]), LimitBehaviour::MinusInfinity);
        assert_eq!(binomial_limit(&[q(5, 2), q(-3, 2)]), LimitBehaviour::MinusInfinity);
    }

    #[test]
    fn scaled_mixture_is_not_a_criterion_input() {
        let p = mixture_star_power(&tat(), 2).unwrap();
        assert!(mixture_criteria(&p, 5).is_err());
    }

    fn coeffs() -> impl Strategy<Value = Vec<BigRational>> {
        prop::collection::vec((-6i64..=12, 1i64..=6), 1..5).prop_map(|v| v.into_iter().map(|(n, d)| q(n, d)).collect())
    }

    proptest! {
        #[test]
        fn binomial_matches_spectral_form(c in coeffs()) {
            let mix = OrthogonalMixture::new(1.0, c.clone()).unwrap();
            let s = mixture_sums(&mix, 12);
            for (m, t) in s.binomial.iter().enumerate() {
                let spectral: BigRational = c.iter()
                    .map(|x| x * num_traits::pow(BigRational::one() - x, m))
                    .sum();
                prop_assert_eq!(t, &spectral);
            }
        }

        #[test]
        fn limit_agrees_with_long_sequence(c in coeffs()) {
            let t = |m: usize| -> BigRational {
                c.iter().map(|x| x * num_traits::pow(BigRational::one() - x, m)).sum()
            };
            let (t0, t1, t2, t3) = (f(&t(197)), f(&t(198)), f(&t(199)), f(&t(200)));
            match binomial_limit(&c) {
                LimitBehaviour::Zero => prop_assert!(t2.abs() < 1e-6 && t3.abs() < 1e-6),
                LimitBehaviour::MinusInfinity => {
                    prop_assert!(t2 < -1.0 && t3 < -1.0 && t2 < t0 && t3 < t1)
                }
                LimitBehaviour::Oscillating => prop_assert!(t2.max(t3) > -1e-6),
            }
        }
    }
}
