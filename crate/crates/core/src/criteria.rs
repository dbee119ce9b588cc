//! Operator-side recognition criteria for density matrices.
//!
//! Every criterion first checks the three shared gates (Hilbert–Schmidt norm at
//! most one, Hermiticity, unit trace) and then tests its own positivity
//! condition by a series or sequence built from the matrix alone. The spectral
//! oracle is used only where the condition is itself stated in the trace norm.
//!
//! Sums that are written in the literature as alternating binomial sums over
//! traces of powers are evaluated here through algebraically identical
//! recursions that never form those binomial sums, because the literal forms
//! lose all precision in `f64` once the binomial coefficients pass `1e16`.
//! The literal forms live in [`crate::scalar`] and are cross-checked in tests.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    hermiticity_defect, hs_norm_sq, sqrt_series, trace, ConvergenceReport, ConvergenceStatus, Matrix,
    ToleranceConfig,
};
use crate::report::{thin_sequence, Check, CriterionId, CriterionReport, Verdict};
use crate::scalar::{sqrt_coefficient_tails, sqrt_coefficients, Real};
use crate::spectral::{eigh, principal_minors_psd_scaled, psd_oracle, trace_norm, MAX_MINOR_DIM};

/// Default truncation of the binomial-sum sequence.
pub const DEFAULT_N_MAX: usize = 60;

/// How often (in terms) the trace-norm residual is evaluated.
const RESIDUAL_STRIDE: usize = 50;

/// Number of trailing sums that must vanish for the limit criterion.
const LIMIT_WINDOW: usize = 5;

fn finish<T: Real>(mut r: CriterionReport, m: &Matrix<T>) -> CriterionReport {
    r.truncation_dim = Some(m.dim());
    r
}

fn gate_checks<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> Vec<Check> {
    let hs = hs_norm_sq(m).as_f64();
    vec![
        Check::new("hs_norm_sq <= 1", hs <= 1.0 + cfg.sum_tol, hs),
        hermitian_check(m, cfg),
        trace_check(m, cfg),
    ]
}

fn hermitian_check<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> Check {
    let defect = hermiticity_defect(m).as_f64();
    Check::new("hermitian", defect <= cfg.hermiticity_tol, defect)
}

fn trace_check<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> Check {
    let tr = trace(m);
    let err = (Complex::new(tr.re.as_f64(), tr.im.as_f64()) - 1.0).norm();
    Check::new("trace = 1", err <= cfg.sum_tol, err)
}

/// Returns the passing gate checks, or a rejecting report if any gate fails.
fn gated<T: Real>(
    id: CriterionId,
    m: &Matrix<T>,
    cfg: &ToleranceConfig,
) -> Result<Vec<Check>, CriterionReport> {
    let checks = gate_checks(m, cfg);
    if checks.iter().all(Check::passed) {
        Ok(checks)
    } else {
        Err(finish(CriterionReport::from_checks(id, checks), m))
    }
}

/// The three conditions shared by every operator criterion.
pub fn gate_conditions<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    finish(CriterionReport::from_checks(CriterionId::Gates, gate_checks(m, cfg)), m)
}

/// Hermitian, unit trace and positive semidefinite: the complete
/// finite-dimensional test. Positivity uses all principal minors up to
/// dimension 12 and the eigenvalue oracle beyond.
pub fn check_finite_def2<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let herm = hermitian_check(m, cfg);
    let mut checks = vec![herm.clone(), trace_check(m, cfg)];
    let mut diag = Vec::new();
    if herm.passed() {
        let tol = T::lit(cfg.sum_tol);
        // eigenvalues are reported either way; the decision uses minors when small
        let min_eig = eigh(m, T::infinity()).map(|s| s.min().as_f64()).unwrap_or(f64::NAN);
        let positive = if m.dim() <= MAX_MINOR_DIM {
            principal_minors_psd_scaled(m, tol).unwrap_or(false)
        } else {
            psd_oracle(m, tol).unwrap_or(false)
        };
        checks.push(Check::new("positive semidefinite", positive, min_eig));
        diag.push(("min_eigenvalue".to_string(), min_eig));
    }
    let mut r = CriterionReport::from_checks(CriterionId::FiniteDef2, checks);
    r.diagnostics = diag;
    finish(r, m)
}

/// Hermitian, unit trace and idempotent (`‖m² − m‖_F ≤ series_tol·dim`).
pub fn check_pure_finite<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let sq = m * m;
    let defect = (&sq - m).frobenius_norm().as_f64();
    let checks = vec![
        hermitian_check(m, cfg),
        trace_check(m, cfg),
        Check::new("m^2 = m", defect <= cfg.series_tol * m.dim() as f64, defect),
    ];
    finish(CriterionReport::from_checks(CriterionId::PureFinite, checks), m)
}

/// Norm convergence of `(1̂ − m)ⁿ`.
///
/// Converged once `‖P_n − P_{n+1}‖ = ‖P_n m‖ ≤ series_tol` in the column-sum
/// norm; diverged once `‖P_n‖` exceeds `divergence_threshold`. On acceptance
/// the limit `L` is checked for idempotency and `Tr(L m) = 0`.
pub fn criterion_power_sequence<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let id = CriterionId::PowerSeq;
    let mut checks = match gated(id, m, cfg) {
        Ok(c) => c,
        Err(r) => return r,
    };
    let tol = T::lit(cfg.series_tol);
    let blowup = T::lit(cfg.divergence_threshold);
    let mut p = Matrix::identity(m.dim());
    let mut norms = Vec::new();
    let mut status = ConvergenceStatus::MaxTermsReached;
    let mut residual = T::zero();
    let mut terms = cfg.max_terms;
    for n in 0..cfg.max_terms {
        let step = &p * m;
        residual = step.col_sum_norm();
        if residual <= tol {
            status = ConvergenceStatus::Converged;
            terms = n;
            break;
        }
        p = &p - &step;
        let norm = p.col_sum_norm();
        norms.push(norm.as_f64());
        if !norm.is_finite() || norm > blowup {
            status = ConvergenceStatus::Diverged;
            terms = n + 1;
            residual = norm;
            break;
        }
    }
    let residual = residual.as_f64();
    checks.push(match status {
        ConvergenceStatus::Converged => Check::new("(1-m)^n converges", true, residual),
        ConvergenceStatus::Diverged => Check::new("(1-m)^n converges", false, residual),
        ConvergenceStatus::MaxTermsReached => Check::undecided("(1-m)^n converges", residual),
    });
    let mut r = CriterionReport::from_checks(id, checks);
    r.convergence = Some(ConvergenceReport {
        status,
        terms_used: terms,
        final_residual: residual,
    });
    r.sequence = thin_sequence(&norms, 1);
    if status == ConvergenceStatus::Converged {
        let idem = (&(&p * &p) - &p).frobenius_norm().as_f64();
        let lm = trace(&(&p * m)).norm().as_f64();
        r = r
            .with_diag("limit_idempotency_defect", idem)
            .with_diag("limit_trace_lm", lm)
            .with_diag("limit_rank", trace(&p).re.as_f64());
    }
    finish(r, m)
}

/// Norm convergence of the binomial square-root series of `m`, with the
/// returned `B` squaring back to `m`.
pub fn criterion_sqrt_series<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let id = CriterionId::SqrtSeries;
    let mut checks = match gated(id, m, cfg) {
        Ok(c) => c,
        Err(r) => return r,
    };
    let (b, conv) = sqrt_series(m, cfg);
    match conv.status {
        ConvergenceStatus::Converged => {
            checks.push(Check::new("series converges", true, conv.final_residual));
            let res = (&(&b * &b) - m).frobenius_norm().as_f64();
            checks.push(Check::new("B^2 = m", res <= cfg.series_tol * m.dim() as f64, res));
        }
        ConvergenceStatus::Diverged => {
            checks.push(Check::new("series converges", false, conv.final_residual));
        }
        ConvergenceStatus::MaxTermsReached => {
            checks.push(Check::undecided("series converges", conv.final_residual));
        }
    }
    let mut r = CriterionReport::from_checks(id, checks);
    r.convergence = Some(conv);
    finish(r, m)
}

/// Partial sums of the constant-free square-root expansion of `A = m²`.
///
/// With `B_l = (A − 1̂)^l` the `l`-th constant-free term is
/// `c_l (B_l − (−1)^l 1̂)`, so `ρ_n = Σ c_l B_l − k_n 1̂` with
/// `k_n = Σ c_l (−1)^l`. The tail-corrected sum
/// `ρ̃_n = ρ_n + τ_n (1̂ − (−1)^n B_n)`, `τ_n = Σ_{l>n} |c_l|`, is a lower bound
/// of `√A` on `0 ≤ A ≤ 1̂` whose error is at most `τ_n (1̂ − A)^n`.
struct SquareRootOfSquare<T: Real> {
    b: Matrix<T>,
    shifted: Matrix<T>,
    sum: Matrix<T>,
    constant: T,
    coeffs: Vec<T>,
    tails: Vec<f64>,
    n: usize,
}

impl<T: Real> SquareRootOfSquare<T> {
    fn new(m: &Matrix<T>, max_terms: usize) -> Self {
        let a = m * m;
        let dim = m.dim();
        Self {
            b: Matrix::identity(dim),
            shifted: a.add_identity(-T::one()),
            sum: Matrix::zeros(dim),
            constant: T::zero(),
            coeffs: sqrt_coefficients::<f64>(max_terms).into_iter().map(T::lit).collect(),
            tails: sqrt_coefficient_tails(max_terms),
            n: 0,
        }
    }

    fn sign(&self) -> T {
        if self.n % 2 == 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    /// Adds term `n + 1`.
    fn step(&mut self) {
        self.b = &self.b * &self.shifted;
        self.n += 1;
        let c = self.coeffs[self.n - 1];
        self.sum.axpy(c, &self.b);
        self.constant = self.constant + c * self.sign();
    }

    fn tail(&self) -> T {
        T::lit(self.tails[self.n])
    }

    fn raw(&self) -> Matrix<T> {
        self.sum.add_identity(-self.constant)
    }

    fn corrected(&self) -> Matrix<T> {
        let mut out = self.raw().add_identity(self.tail());
        out.axpy(-self.tail() * self.sign(), &self.b);
        out
    }

    fn raw_trace(&self) -> T {
        trace(&self.sum).re - self.constant * T::lit(self.b.dim() as f64)
    }

    fn corrected_trace(&self) -> T {
        let d = T::lit(self.b.dim() as f64);
        self.raw_trace() + self.tail() * (d - self.sign() * trace(&self.b).re)
    }

    /// Upper bound on `Tr√A − Tr ρ̃_n`, namely `τ_n Tr (1̂ − A)^n`.
    fn trace_gap(&self) -> T {
        (self.tail() * self.sign() * trace(&self.b).re).max(T::zero())
    }
}

/// Trace norm and positive part of a Hermitian residual.
fn residual_parts<T: Real>(d: &Matrix<T>) -> (f64, f64) {
    let h = (d + &d.adjoint()).scale(T::lit(0.5));
    match eigh(&h, T::infinity()) {
        Ok(s) => {
            let norm: f64 = s.eigenvalues.iter().map(|l| l.as_f64().abs()).sum();
            let pos: f64 = s.eigenvalues.iter().map(|l| l.as_f64().max(0.0)).sum();
            (norm, pos)
        }
        Err(_) => (trace_norm(d).as_f64(), f64::NAN),
    }
}

/// Trace-norm convergence of the constant-free square-root series of `m²` to
/// `m` itself.
///
/// Accepts when `‖ρ̃_n − m‖₁ ≤ series_tol`. Rejects when `m − ρ̃_n` has a
/// negative part above `sum_tol`: for positive `m` the tail-corrected sum never
/// exceeds `√(m²) = m`, so such a part proves the limit differs from `m`.
pub fn criterion_sqrt_square_trace<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let id = CriterionId::SqrtSquareTrace;
    let mut checks = match gated(id, m, cfg) {
        Ok(c) => c,
        Err(r) => return r,
    };
    let tol = T::lit(cfg.series_tol);
    let mut s = SquareRootOfSquare::new(m, cfg.max_terms);
    let mut residuals = Vec::new();
    let mut outcome = None;
    let mut last = (f64::NAN, f64::NAN);
    while s.n < cfg.max_terms {
        s.step();
        if !(s.n == 1 || s.n % RESIDUAL_STRIDE == 0 || s.n == cfg.max_terms) {
            continue;
        }
        let d = &s.corrected() - m;
        // ‖D‖₁ ≥ ‖D‖_F, so only a small Frobenius norm can lead to acceptance;
        // the eigenvalue pass is still needed for the rejection witness.
        let (norm, pos) = residual_parts(&d);
        residuals.push(norm);
        last = (norm, pos);
        if pos > cfg.sum_tol {
            outcome = Some(false);
            break;
        }
        if d.frobenius_norm() <= tol && norm <= cfg.series_tol {
            outcome = Some(true);
            break;
        }
    }
    let raw_residual = trace_norm(&(&s.raw() - m)).as_f64();
    checks.push(match outcome {
        Some(ok) => Check::new("||rho_n - m||_1 -> 0", ok, last.0),
        None => Check::undecided("||rho_n - m||_1 -> 0", last.0),
    });
    let mut r = CriterionReport::from_checks(id, checks);
    r.convergence = Some(ConvergenceReport {
        status: match outcome {
            Some(true) => ConvergenceStatus::Converged,
            Some(false) => ConvergenceStatus::Diverged,
            None => ConvergenceStatus::MaxTermsReached,
        },
        terms_used: s.n,
        final_residual: last.0,
    });
    r.sequence = residuals
        .iter()
        .enumerate()
        .map(|(i, &v)| (if i == 0 { 1 } else { (i * RESIDUAL_STRIDE).min(s.n) }, v))
        .collect();
    if outcome == Some(false) {
        r.witness = Some(s.n);
    }
    let r = r
        .with_diag("residual_trace_norm", last.0)
        .with_diag("negative_part", last.1)
        .with_diag("raw_partial_sum_residual", raw_residual);
    finish(r, m)
}

/// `Tr√(m²) = 1` through the constant-free series over traces.
///
/// The tail-corrected partial trace `Ŝ_n` is a nondecreasing lower bound of
/// `Tr√(m²)`, and `Ŝ_n + τ_n Tr(1̂−m²)^n` an upper bound. Rejects once
/// `Ŝ_n > 1 + sum_tol`. Accepts once `Ŝ_n` is within `sum_tol` of one and
/// either the upper bound is too, or a geometric extrapolation of the rise of
/// `Ŝ` over the last blocks of terms is below `sum_tol`. The extrapolation is
/// needed because the upper bound never closes on kernel directions, which
/// the series itself represents exactly.
pub fn criterion_trace_sqrt_square<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let id = CriterionId::TraceSqrtSquare;
    let mut checks = match gated(id, m, cfg) {
        Ok(c) => c,
        Err(r) => return r,
    };
    let mut s = SquareRootOfSquare::new(m, cfg.max_terms);
    let mut raw = Vec::new();
    let mut outcome = None;
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut rise = RiseExtrapolator::new(RESIDUAL_STRIDE);
    let mut rise_estimate = f64::INFINITY;
    while s.n < cfg.max_terms {
        s.step();
        raw.push(s.raw_trace().as_f64());
        lo = s.corrected_trace().as_f64();
        hi = lo + s.trace_gap().as_f64();
        rise_estimate = rise.observe(s.n, lo);
        if !lo.is_finite() || lo > 1.0 + cfg.sum_tol {
            outcome = Some(false);
            break;
        }
        let near_one = lo >= 1.0 - cfg.sum_tol;
        if near_one && (hi <= 1.0 + cfg.sum_tol || lo + rise_estimate <= 1.0 + cfg.sum_tol) {
            outcome = Some(true);
            break;
        }
    }
    checks.push(match outcome {
        Some(ok) => Check::new("Tr sqrt(m^2) = 1", ok, lo),
        None => Check::undecided("Tr sqrt(m^2) = 1", lo),
    });
    let mut r = CriterionReport::from_checks(id, checks);
    r.convergence = Some(ConvergenceReport {
        status: match outcome {
            Some(true) => ConvergenceStatus::Converged,
            Some(false) => ConvergenceStatus::Diverged,
            None => ConvergenceStatus::MaxTermsReached,
        },
        terms_used: s.n,
        final_residual: (hi - lo).min(rise_estimate),
    });
    r.sequence = thin_sequence(&raw, 1);
    if outcome == Some(false) {
        r.witness = Some(s.n);
    }
    let r = r
        .with_diag("sum", lo)
        .with_diag("sum_upper_bound", hi)
        .with_diag("raw_partial_sum", raw.last().copied().unwrap_or(0.0));
    finish(r, m)
}

/// Geometric extrapolation of the remaining rise of a nondecreasing sequence,
/// sampled every `stride` terms. Only rises between two block boundaries
/// count, so the first estimate needs three boundaries (or an exactly flat
/// block, which happens when every eigen-direction is already exact).
#[derive(Debug, Clone)]
pub(crate) struct RiseExtrapolator {
    stride: usize,
    block_start: Option<f64>,
    last_rise: Option<f64>,
    estimate: f64,
}

impl RiseExtrapolator {
    pub(crate) fn new(stride: usize) -> Self {
        Self {
            stride,
            block_start: None,
            last_rise: None,
            estimate: f64::INFINITY,
        }
    }

    /// Feeds term `n` and returns the current estimate of the remaining rise.
    pub(crate) fn observe(&mut self, n: usize, value: f64) -> f64 {
        if n % self.stride != 0 {
            return self.estimate;
        }
        if let Some(start) = self.block_start {
            let rise = (value - start).max(0.0);
            self.estimate = match self.last_rise {
                _ if rise == 0.0 => 0.0,
                Some(last) if last > rise => {
                    let r = rise / last;
                    rise * r / (1.0 - r)
                }
                _ => f64::INFINITY,
            };
            self.last_rise = Some(rise);
        }
        self.block_start = Some(value);
        self.estimate
    }
}

/// `S_n = Σ_k (−1)^k C(n,k) Tr m^{k+1} = Tr(m (1̂ − m)^n)` for `n = 0..=n_max`,
/// evaluated through `R_0 = m`, `R_{n+1} = R_n (1̂ − m)`.
pub fn binomial_sums<T: Real>(m: &Matrix<T>, n_max: usize) -> Vec<f64> {
    let mut r = m.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(trace(&r).re.as_f64());
        if n < n_max {
            r = &r - &(&r * m);
        }
    }
    out
}

/// Every `S_n` for `n ≤ n_max` is nonnegative. Acceptance means no
/// counterexample was found up to `n_max`.
pub fn criterion_binomial_sums<T: Real>(
    m: &Matrix<T>,
    n_max: usize,
    cfg: &ToleranceConfig,
) -> CriterionReport {
    let id = CriterionId::BinomialSums;
    let mut checks = match gated(id, m, cfg) {
        Ok(c) => c,
        Err(r) => return r,
    };
    let sums = binomial_sums(m, n_max);
    let witness = sums.iter().position(|&s| s < -cfg.sum_tol);
    let shown = witness.map_or(sums.len(), |w| w + 1);
    let worst = sums[..shown].iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check::new("S_n >= 0", witness.is_none(), worst));
    let mut r = CriterionReport::from_checks(id, checks);
    r.sequence = thin_sequence(&sums[..shown], 0);
    r.witness = witness;
    finish(r.with_diag("n_max", n_max as f64), m)
}

/// `S_n → 0`.
///
/// Runs up to `cfg.max_terms`. Accepts once `LIMIT_WINDOW` consecutive sums lie
/// within `sum_tol` of zero; rejects on any `S_n < −sum_tol` or `|S_n|` above
/// `divergence_threshold`.
pub fn criterion_binomial_limit<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let id = CriterionId::BinomialLimit;
    let mut checks = match gated(id, m, cfg) {
        Ok(c) => c,
        Err(r) => return r,
    };
    let mut r_n = m.clone();
    let mut sums = Vec::new();
    let mut small = 0;
    let mut outcome = None;
    for _ in 0..=cfg.max_terms {
        let s = trace(&r_n).re.as_f64();
        sums.push(s);
        if !s.is_finite() || s < -cfg.sum_tol || s.abs() > cfg.divergence_threshold {
            outcome = Some(false);
            break;
        }
        small = if s.abs() <= cfg.sum_tol { small + 1 } else { 0 };
        if small >= LIMIT_WINDOW {
            outcome = Some(true);
            break;
        }
        r_n = &r_n - &(&r_n * m);
    }
    let last = *sums.last().expect("at least S_0");
    checks.push(match outcome {
        Some(ok) => Check::new("S_n -> 0", ok, last),
        None => Check::undecided("S_n -> 0", last),
    });
    let mut r = CriterionReport::from_checks(id, checks);
    if outcome == Some(false) {
        r.witness = Some(sums.len() - 1);
    }
    r.convergence = Some(ConvergenceReport {
        status: match outcome {
            Some(true) => ConvergenceStatus::Converged,
            Some(false) => ConvergenceStatus::Diverged,
            None => ConvergenceStatus::MaxTermsReached,
        },
        terms_used: sums.len(),
        final_residual: last.abs(),
    });
    r.sequence = thin_sequence(&sums, 0);
    finish(r, m)
}

/// `‖m‖₂ = 1`, Hermitian, idempotent entrywise within `series_tol`, unit trace.
pub fn check_pure_infinite<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig) -> CriterionReport {
    let hs = hs_norm_sq(m).as_f64();
    let idem = (&(m * m) - m).max_abs().as_f64();
    let checks = vec![
        Check::new("hs_norm_sq = 1", (hs - 1.0).abs() <= cfg.sum_tol, hs),
        hermitian_check(m, cfg),
        Check::new("m^2 = m", idem <= cfg.series_tol, idem),
        trace_check(m, cfg),
    ];
    finish(CriterionReport::from_checks(CriterionId::PureInfinite, checks), m)
}

/// Aggregate verdict over every operator criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVerdict {
    pub is_state: bool,
    /// `None` when the two pure-state tests disagree.
    pub is_pure: Option<bool>,
    pub agreeing_criteria: Vec<CriterionId>,
    pub conflicting: Vec<CriterionId>,
    pub inconclusive: Vec<CriterionId>,
    pub reports: Vec<CriterionReport>,
}

impl StateVerdict {
    pub fn report(&self, id: CriterionId) -> Option<&CriterionReport> {
        self.reports.iter().find(|r| r.criterion == id)
    }

    /// Folds reports into a verdict. The first report is the reference;
    /// the others are compared with it, and pure tests with each other.
    pub fn aggregate(reference: CriterionReport, others: Vec<CriterionReport>) -> Self {
        let is_state = reference.accepted();
        let mut agreeing = vec![reference.criterion];
        let mut conflicting = Vec::new();
        let mut inconclusive = Vec::new();
        let pure: Vec<&CriterionReport> = others.iter().filter(|r| r.criterion.is_pure_test()).collect();
        for r in others.iter().filter(|r| !r.criterion.is_pure_test()) {
            match r.verdict {
                Verdict::Inconclusive => inconclusive.push(r.criterion),
                v if v == reference.verdict => agreeing.push(r.criterion),
                _ => conflicting.push(r.criterion),
            }
        }
        let is_pure = if pure.is_empty() {
            None
        } else if pure.iter().all(|r| r.accepted()) {
            Some(true)
        } else if pure.iter().all(|r| r.rejected()) {
            Some(false)
        } else {
            conflicting.extend(pure.iter().map(|r| r.criterion));
            None
        };
        // a pure state is a state
        if is_pure == Some(true) && !is_state {
            conflicting.extend(pure.iter().map(|r| r.criterion));
        }
        let mut reports = vec![reference];
        reports.extend(others);
        Self {
            is_state: is_state && conflicting.is_empty(),
            is_pure,
            agreeing_criteria: agreeing,
            conflicting,
            inconclusive,
            reports,
        }
    }
}

/// Runs every operator criterion (concurrently) and aggregates.
///
/// The finite-dimensional definition is the reference verdict; every other
/// decisive verdict that differs from it is listed as conflicting.
pub fn run_all<T: Real>(m: &Matrix<T>, cfg: &ToleranceConfig, n_max: usize) -> StateVerdict {
    let (reference, others) = std::thread::scope(|scope| {
        let jobs: Vec<Box<dyn FnOnce() -> CriterionReport + Send + '_>> = vec![
            Box::new(move || gate_conditions(m, cfg)),
            Box::new(move || criterion_power_sequence(m, cfg)),
            Box::new(move || criterion_sqrt_series(m, cfg)),
            Box::new(move || criterion_sqrt_square_trace(m, cfg)),
            Box::new(move || criterion_trace_sqrt_square(m, cfg)),
            Box::new(move || criterion_binomial_sums(m, n_max, cfg)),
            Box::new(move || criterion_binomial_limit(m, cfg)),
            Box::new(move || check_pure_finite(m, cfg)),
            Box::new(move || check_pure_infinite(m, cfg)),
        ];
        let handles: Vec<_> = jobs.into_iter().map(|job| scope.spawn(job)).collect();
        let reference = check_finite_def2(m, cfg);
        let others: Vec<CriterionReport> =
            handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect();
        (reference, others)
    });
    // the gate report is informational; it is not a positivity criterion
    let (gates, rest): (Vec<_>, Vec<_>) = others.into_iter().partition(|r| r.criterion == CriterionId::Gates);
    let mut v = StateVerdict::aggregate(reference, rest);
    v.reports.extend(gates);
    v
}
