//! Phase-space recognition criteria for Wigner functions on a grid.
//!
//! Sums are reported in dimensionless normalization: integrals of star powers
//! are multiplied by the power of `2πħ` that makes a normalized state give
//! `T_0 = 1` and `Tr √(ρ²) = 1`. The factor `2πħ` is recorded in every report
//! (`two_pi_hbar`) so values in other conventions can be recovered.

use std::sync::OnceLock;

use super::grid::PhaseGrid;
use super::moyal::{StarOutput, StarProduct};
use crate::criteria::{RiseExtrapolator, StateVerdict};
use crate::error::Result;
use crate::linalg::{ConvergenceReport, ConvergenceStatus, ToleranceConfig};
use crate::report::{thin_sequence, Check, CriterionId, CriterionReport};
use crate::scalar::{sqrt_coefficient_tails, sqrt_coefficients, Real};

/// Tolerances suited to the default 256² grid, where quadrature limits
/// integrals of star products to about `1e-3` relative accuracy.
pub fn grid_tolerances() -> ToleranceConfig {
    ToleranceConfig {
        hermiticity_tol: 1e-6,
        sum_tol: 5e-3,
        series_tol: 1e-3,
        max_terms: 400,
        divergence_threshold: 1e6,
    }
}

/// Default number of binomial sums on the grid path.
pub const DEFAULT_M_MAX: usize = 60;

const SQRT_STRIDE: usize = 10;
const LIMIT_WINDOW: usize = 5;

/// A Wigner function with its star-product engine and a lazily computed
/// star square, shared read-only by all criteria of one run.
pub struct PhaseContext<'a, T: Real> {
    w: &'a PhaseGrid<T>,
    star: StarProduct<T>,
    square: OnceLock<Result<StarOutput<T>>>,
}

impl<'a, T: Real> PhaseContext<'a, T> {
    pub fn new(w: &'a PhaseGrid<T>) -> Result<Self> {
        Ok(Self {
            w,
            star: StarProduct::new(*w.spec())?,
            square: OnceLock::new(),
        })
    }

    pub fn square(&self) -> Result<&StarOutput<T>> {
        self.square
            .get_or_init(|| self.star.product(self.w, self.w))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn tph(&self) -> f64 {
        self.w.spec().two_pi_hbar()
    }

    /// `2πħ ∫ W⋆W`, i.e. `Tr ρ²`.
    fn purity(&self) -> Result<f64> {
        Ok(self.tph() * self.square()?.grid.integral().as_f64())
    }

    fn gate_checks(&self, cfg: &ToleranceConfig) -> Result<Vec<Check>> {
        let purity = self.purity()?;
        let imag = self.square()?.imag_ratio.as_f64();
        let norm = self.w.integral().as_f64();
        Ok(vec![
            Check::new("2 pi hbar int W*W <= 1", purity <= 1.0 + cfg.sum_tol, purity),
            Check::new("W*W real", imag <= cfg.hermiticity_tol, imag),
            Check::new("int W = 1", (norm - 1.0).abs() <= cfg.sum_tol, norm),
        ])
    }

    fn gated(&self, id: CriterionId, cfg: &ToleranceConfig) -> Result<std::result::Result<Vec<Check>, CriterionReport>> {
        let checks = self.gate_checks(cfg)?;
        if checks.iter().all(Check::passed) {
            Ok(Ok(checks))
        } else {
            Ok(Err(self.finish(CriterionReport::from_checks(id, checks))))
        }
    }

    fn finish(&self, r: CriterionReport) -> CriterionReport {
        r.with_diag("two_pi_hbar", self.tph())
    }

    pub fn gates(&self, cfg: &ToleranceConfig) -> Result<CriterionReport> {
        Ok(self.finish(CriterionReport::from_checks(CriterionId::WGates, self.gate_checks(cfg)?)))
    }

    /// `2πħ` times the constant-free series for `∫ √(W⋆W)`-type sum, i.e.
    /// `Tr √(ρ²)`. Works on symbols `X = 2πħ W`, `A = X⋆X` with
    /// `Q_1 = A`, `Q_{l+1} = A⋆Q_l − Q_l + (−1)^l A` (no constant term ever
    /// appears, so everything stays integrable) and adds the tail correction
    /// `−τ_n (−1)^n Tr Q_n`.
    pub fn trace_sqrt(&self, cfg: &ToleranceConfig) -> Result<CriterionReport> {
        let id = CriterionId::WTraceSqrt;
        let mut checks = match self.gated(id, cfg)? {
            Ok(c) => c,
            Err(r) => return Ok(r),
        };
        let tph = T::lit(self.tph());
        let a = self.square()?.grid.scale(tph * tph);
        let trace = |g: &PhaseGrid<T>| g.integral().as_f64() / self.tph();
        let coeffs = sqrt_coefficients::<f64>(cfg.max_terms);
        let tails = sqrt_coefficient_tails(cfg.max_terms);

        let mut q = a.clone();
        let mut raw_sum = 0.0;
        let mut raw = Vec::new();
        let mut corrected = 0.0;
        let mut rise = RiseExtrapolator::new(SQRT_STRIDE);
        let mut estimate = f64::INFINITY;
        let mut outcome = None;
        let mut n = 0;
        while n < cfg.max_terms {
            n += 1;
            if n > 1 {
                let sign = if (n - 1) % 2 == 0 { T::one() } else { -T::one() };
                let aq = self.star.product(&a, &q)?.grid;
                q = aq.sub(&q)?.add(&a.scale(sign))?;
            }
            let tq = trace(&q);
            raw_sum += coeffs[n - 1] * tq;
            raw.push(raw_sum);
            let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
            corrected = raw_sum - tails[n] * sign_n * tq;
            estimate = rise.observe(n, corrected);
            if !corrected.is_finite() || corrected > 1.0 + cfg.sum_tol {
                outcome = Some(false);
                break;
            }
            if (corrected - 1.0).abs() <= cfg.sum_tol && estimate <= cfg.series_tol {
                outcome = Some(true);
                break;
            }
        }
        checks.push(match outcome {
            Some(ok) => Check::new("2 pi hbar * sum = 1", ok, corrected),
            None => Check::undecided("2 pi hbar * sum = 1", corrected),
        });
        let mut r = CriterionReport::from_checks(id, checks);
        r.convergence = Some(ConvergenceReport {
            status: match outcome {
                Some(true) => ConvergenceStatus::Converged,
                Some(false) => ConvergenceStatus::Diverged,
                None => ConvergenceStatus::MaxTermsReached,
            },
            terms_used: n,
            final_residual: estimate,
        });
        r.sequence = thin_sequence(&raw, 1);
        if outcome == Some(false) {
            r.witness = Some(n);
        }
        let r = r
            .with_diag("sum_dimensionless", corrected)
            .with_diag("sum", corrected / self.tph())
            .with_diag("raw_partial_sum_dimensionless", raw_sum);
        Ok(self.finish(r))
    }

    /// `T_0..` by `H_0 = W`, `H_m = H_{m−1} − 2πħ (H_{m−1} ⋆ W)`,
    /// `T_m = ∫ H_m`, stopping early when `stop` says so.
    fn binomial_sequence(
        &self,
        m_max: usize,
        mut stop: impl FnMut(usize, f64) -> bool,
    ) -> Result<Vec<f64>> {
        let tph = T::lit(self.tph());
        let mut h = self.w.clone();
        let mut out = Vec::new();
        for m in 0..=m_max {
            let t = h.integral().as_f64();
            out.push(t);
            if stop(m, t) || m == m_max {
                break;
            }
            let hw = if m == 0 {
                self.square()?.grid.clone()
            } else {
                self.star.product(&h, self.w)?.grid
            };
            h = h.sub(&hw.scale(tph))?;
        }
        Ok(out)
    }

    pub fn binomial(&self, m_max: usize, cfg: &ToleranceConfig) -> Result<CriterionReport> {
        let id = CriterionId::WBinomial;
        let mut checks = match self.gated(id, cfg)? {
            Ok(c) => c,
            Err(r) => return Ok(r),
        };
        let sums = self.binomial_sequence(m_max, |_, t| t < -cfg.sum_tol)?;
        let witness = sums.iter().position(|&t| t < -cfg.sum_tol);
        let worst = sums.iter().copied().fold(f64::INFINITY, f64::min);
        checks.push(Check::new("T_m >= 0", witness.is_none(), worst));
        let mut r = CriterionReport::from_checks(id, checks);
        r.sequence = thin_sequence(&sums, 0);
        r.witness = witness;
        let mut r = r.with_diag("m_max", m_max as f64);
        if let Some(w) = witness {
            r = r.with_diag("witness_value_times_two_pi_hbar", sums[w] * self.tph());
        }
        Ok(self.finish(r))
    }

    pub fn limit(&self, cfg: &ToleranceConfig) -> Result<CriterionReport> {
        let id = CriterionId::WLimit;
        let mut checks = match self.gated(id, cfg)? {
            Ok(c) => c,
            Err(r) => return Ok(r),
        };
        let mut small = 0;
        let mut outcome = None;
        let sums = self.binomial_sequence(cfg.max_terms, |_, t| {
            if !t.is_finite() || t < -cfg.sum_tol || t.abs() > cfg.divergence_threshold {
                outcome = Some(false);
                return true;
            }
            small = if t.abs() <= cfg.sum_tol { small + 1 } else { 0 };
            if small >= LIMIT_WINDOW {
                outcome = Some(true);
                return true;
            }
            false
        })?;
        let last = *sums.last().expect("T_0 always computed");
        checks.push(match outcome {
            Some(ok) => Check::new("T_m -> 0", ok, last),
            None => Check::undecided("T_m -> 0", last),
        });
        let mut r = CriterionReport::from_checks(id, checks);
        r.convergence = Some(ConvergenceReport {
            status: match outcome {
                Some(true) => ConvergenceStatus::Converged,
                Some(false) => ConvergenceStatus::Diverged,
                None => ConvergenceStatus::MaxTermsReached,
            },
            terms_used: sums.len(),
            final_residual: last.abs(),
        });
        if outcome == Some(false) {
            r.witness = Some(sums.len() - 1);
        }
        r.sequence = thin_sequence(&sums, 0);
        Ok(self.finish(r))
    }

    /// Purity saturated, real star square, `W⋆W = W/(2πħ)` in L² relative to
    /// `‖W‖/(2πħ)`, and normalization.
    pub fn pure(&self, cfg: &ToleranceConfig) -> Result<CriterionReport> {
        let purity = self.purity()?;
        let sq = self.square()?;
        let target = self.w.scale(T::one() / T::lit(self.tph()));
        let defect = (sq.grid.sub(&target)?.l2_norm() / target.l2_norm()).as_f64();
        let norm = self.w.integral().as_f64();
        let checks = vec![
            Check::new("2 pi hbar int W*W = 1", (purity - 1.0).abs() <= cfg.sum_tol, purity),
            Check::new("W*W real", sq.imag_ratio.as_f64() <= cfg.hermiticity_tol, sq.imag_ratio.as_f64()),
            Check::new("W*W = W / (2 pi hbar)", defect <= cfg.series_tol, defect),
            Check::new("int W = 1", (norm - 1.0).abs() <= cfg.sum_tol, norm),
        ];
        Ok(self.finish(CriterionReport::from_checks(CriterionId::WPure, checks)))
    }

    /// Runs all phase criteria. `W_TRACE_SQRT` (an iff characterization) is
    /// the reference verdict; the others are compared with it.
    pub fn run_all(&self, cfg: &ToleranceConfig, m_max: usize) -> Result<StateVerdict> {
        self.square()?;
        let (sqrt, rest) = std::thread::scope(|s| {
            let b = s.spawn(|| self.binomial(m_max, cfg));
            let l = s.spawn(|| self.limit(cfg));
            let p = s.spawn(|| self.pure(cfg));
            let g = s.spawn(|| self.gates(cfg));
            let sqrt = self.trace_sqrt(cfg);
            let rest: Vec<Result<CriterionReport>> = [b, l, p, g]
                .into_iter()
                .map(|h| h.join().expect("criterion thread panicked"))
                .collect();
            (sqrt, rest)
        });
        let mut rest = rest.into_iter().collect::<Result<Vec<_>>>()?;
        let gates = rest.pop().expect("gates report");
        let mut v = StateVerdict::aggregate(sqrt?, rest);
        v.reports.push(gates);
        Ok(v)
    }
}

pub fn w_gate_conditions<T: Real>(w: &PhaseGrid<T>, cfg: &ToleranceConfig) -> Result<CriterionReport> {
    PhaseContext::new(w)?.gates(cfg)
}

pub fn criterion_w_trace_sqrt<T: Real>(w: &PhaseGrid<T>, cfg: &ToleranceConfig) -> Result<CriterionReport> {
    PhaseContext::new(w)?.trace_sqrt(cfg)
}

pub fn criterion_w_binomial<T: Real>(
    w: &PhaseGrid<T>,
    m_max: usize,
    cfg: &ToleranceConfig,
) -> Result<CriterionReport> {
    PhaseContext::new(w)?.binomial(m_max, cfg)
}

pub fn criterion_w_limit<T: Real>(w: &PhaseGrid<T>, cfg: &ToleranceConfig) -> Result<CriterionReport> {
    PhaseContext::new(w)?.limit(cfg)
}

pub fn criterion_w_pure<T: Real>(w: &PhaseGrid<T>, cfg: &ToleranceConfig) -> Result<CriterionReport> {
    PhaseContext::new(w)?.pure(cfg)
}

pub fn run_all_phase<T: Real>(w: &PhaseGrid<T>, cfg: &ToleranceConfig, m_max: usize) -> Result<StateVerdict> {
    PhaseContext::new(w)?.run_all(cfg, m_max)
}
