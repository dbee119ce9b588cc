//! Criterion selection, execution and the stored report document.

use std::path::PathBuf;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statecert::criteria::{self, StateVerdict, DEFAULT_N_MAX};
use statecert::kernel::{kernel_to_matrix, oscillator_mixture_kernel};
use statecert::phase::{
    build_tatarskij, fock_wigner, grid_tolerances, mixture_criteria, mixture_sums, mixture_verdict, GridSpec,
    LimitBehaviour, OrthogonalMixture, PhaseContext, DEFAULT_M_MAX,
};
use statecert::{sample, CriterionId, CriterionReport, Kernel, Matrix, ToleranceConfig, Verdict, WignerGrid};

use crate::error::{CliError, Result};
use crate::formats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Matrix,
    Kernel,
    Wigner,
    Mixture,
}

impl Kind {
    fn is_phase(self) -> bool {
        matches!(self, Self::Wigner | Self::Mixture)
    }

    /// Tolerances suited to the input's own accuracy.
    pub fn default_tolerances(self) -> ToleranceConfig {
        match self {
            Self::Matrix => ToleranceConfig::default(),
            // quadrature on the kernel grid limits traces to about 1e-6
            Self::Kernel => ToleranceConfig {
                hermiticity_tol: 1e-8,
                ..ToleranceConfig::default().with_all_tols(1e-4)
            },
            Self::Wigner | Self::Mixture => grid_tolerances(),
        }
    }

    pub fn all_criteria(self) -> Vec<CriterionId> {
        use CriterionId::*;
        if self.is_phase() {
            vec![WTraceSqrt, WBinomial, WLimit, WPure, WGates]
        } else {
            vec![
                FiniteDef2,
                PowerSeq,
                SqrtSeries,
                SqrtSquareTrace,
                TraceSqrtSquare,
                BinomialSums,
                BinomialLimit,
                PureFinite,
                PureInfinite,
                Gates,
            ]
        }
    }
}

/// Resolves `--criteria` names: short aliases (`pure`, `binomial`, `limit`,
/// `sqrt`, `gates`, ...) or full identifiers such as `BINOMIAL_SUMS`.
pub fn select_criteria(kind: Kind, names: &[String]) -> Result<Vec<CriterionId>> {
    use CriterionId::*;
    let allowed = kind.all_criteria();
    let mut out: Vec<CriterionId> = Vec::new();
    for name in names {
        let key = name.trim().to_ascii_lowercase().replace('_', "-");
        let ids: Vec<CriterionId> = match (key.as_str(), kind.is_phase()) {
            ("all", _) => allowed.clone(),
            ("gates", false) => vec![Gates],
            ("gates", true) => vec![WGates],
            ("def2" | "finite", false) => vec![FiniteDef2],
            ("power", false) => vec![PowerSeq],
            ("sqrt-series", false) => vec![SqrtSeries],
            ("sqrt-square", false) => vec![SqrtSquareTrace],
            ("sqrt" | "trace-sqrt", false) => vec![TraceSqrtSquare],
            ("sqrt" | "trace-sqrt", true) => vec![WTraceSqrt],
            ("binomial", false) => vec![BinomialSums],
            ("binomial", true) => vec![WBinomial],
            ("limit", false) => vec![BinomialLimit],
            ("limit", true) => vec![WLimit],
            ("pure", false) => vec![PureFinite, PureInfinite],
            ("pure", true) => vec![WPure],
            ("pure-finite", false) => vec![PureFinite],
            ("pure-infinite", false) => vec![PureInfinite],
            _ => allowed
                .iter()
                .copied()
                .filter(|id| id.name().to_ascii_lowercase().replace('_', "-") == key)
                .collect(),
        };
        if ids.is_empty() {
            return Err(CliError::Usage(format!(
                "criterion {name:?} is not available for --kind {}",
                kind_name(kind)
            )));
        }
        for id in ids {
            if !out.contains(&id) {
                out.push(id);
            }
        }
    }
    Ok(out)
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Matrix => "matrix",
        Kind::Kernel => "kernel",
        Kind::Wigner => "wigner",
        Kind::Mixture => "mixture",
    }
}

/// Everything `check` needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: Kind,
    pub input: Option<PathBuf>,
    pub coeffs: Option<String>,
    pub hbar: f64,
    /// Empty means all criteria.
    pub criteria: Vec<String>,
    pub tolerances: ToleranceConfig,
    pub n_max: usize,
    pub m_max: usize,
}

impl RunConfig {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            input: None,
            coeffs: None,
            hbar: 1.0,
            criteria: Vec::new(),
            tolerances: kind.default_tolerances(),
            n_max: DEFAULT_N_MAX,
            m_max: DEFAULT_M_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Certified,
    Rejected,
    Inconclusive,
}

impl RunOutcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Certified => 0,
            Self::Rejected => 1,
            Self::Inconclusive => 2,
        }
    }
}

pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig {
    pub tolerances: ToleranceConfig,
    pub n_max: usize,
    pub m_max: usize,
    pub hbar: f64,
    pub criteria: Vec<CriterionId>,
    pub all_criteria: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureNote {
    pub criterion: CriterionId,
    pub label: String,
    #[serde(with = "statecert::report::json_float")]
    pub value: f64,
}

/// Exact values for mixture inputs, as reduced fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSums {
    /// `Σ|c_i|`; the square-root sum in units of `1/(2πħ)`.
    pub trace_sqrt: String,
    pub purity: String,
    pub normalization: String,
    /// `T_0..` in dimensionless normalization.
    pub binomial: Vec<String>,
    pub limit: LimitBehaviour,
}

/// The document written by `check --json` and read back by `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    pub input: String,
    pub config: EchoConfig,
    pub seed: Option<u64>,
    pub outcome: RunOutcome,
    pub exit_code: i32,
    pub is_state: Option<bool>,
    pub is_pure: Option<bool>,
    pub conflicting: Vec<CriterionId>,
    pub inconclusive: Vec<CriterionId>,
    pub first_failure: Option<FailureNote>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<ExactSums>,
    pub reports: Vec<CriterionReport>,
}

enum Input {
    Matrix(Matrix<f64>),
    Kernel(Kernel<f64>),
    Wigner(WignerGrid),
    Mixture(OrthogonalMixture),
}

fn load(cfg: &RunConfig) -> Result<(Input, String)> {
    if cfg.kind == Kind::Mixture {
        let list = cfg
            .coeffs
            .as_deref()
            .ok_or_else(|| CliError::Usage("--kind mixture needs --coeffs".into()))?;
        return Ok((Input::Mixture(OrthogonalMixture::parse(cfg.hbar, list)?), list.to_string()));
    }
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("--kind {} needs an input file", kind_name(cfg.kind))))?;
    let name = path.display().to_string();
    let input = match cfg.kind {
        Kind::Matrix => Input::Matrix(formats::parse_matrix_file(path)?),
        Kind::Kernel => Input::Kernel(formats::parse_kernel_file(path)?),
        Kind::Wigner => Input::Wigner(formats::parse_wigner_file(path)?),
        Kind::Mixture => unreachable!("handled above"),
    };
    Ok((input, name))
}

fn operator_report(m: &Matrix<f64>, id: CriterionId, cfg: &RunConfig) -> CriterionReport {
    let t = &cfg.tolerances;
    match id {
        CriterionId::Gates => criteria::gate_conditions(m, t),
        CriterionId::FiniteDef2 => criteria::check_finite_def2(m, t),
        CriterionId::PureFinite => criteria::check_pure_finite(m, t),
        CriterionId::PowerSeq => criteria::criterion_power_sequence(m, t),
        CriterionId::SqrtSeries => criteria::criterion_sqrt_series(m, t),
        CriterionId::SqrtSquareTrace => criteria::criterion_sqrt_square_trace(m, t),
        CriterionId::TraceSqrtSquare => criteria::criterion_trace_sqrt_square(m, t),
        CriterionId::BinomialSums => criteria::criterion_binomial_sums(m, cfg.n_max, t),
        CriterionId::BinomialLimit => criteria::criterion_binomial_limit(m, t),
        CriterionId::PureInfinite => criteria::check_pure_infinite(m, t),
        other => unreachable!("{other} is not an operator criterion"),
    }
}

fn phase_report(ctx: &PhaseContext<'_, f64>, id: CriterionId, cfg: &RunConfig) -> Result<CriterionReport> {
    let t = &cfg.tolerances;
    Ok(match id {
        CriterionId::WGates => ctx.gates(t)?,
        CriterionId::WTraceSqrt => ctx.trace_sqrt(t)?,
        CriterionId::WBinomial => ctx.binomial(cfg.m_max, t)?,
        CriterionId::WLimit => ctx.limit(t)?,
        CriterionId::WPure => ctx.pure(t)?,
        other => unreachable!("{other} is not a phase-space criterion"),
    })
}

fn exact_sums(mix: &OrthogonalMixture, m_max: usize) -> ExactSums {
    let s = mixture_sums(mix, m_max);
    ExactSums {
        trace_sqrt: s.trace_sqrt.to_string(),
        purity: s.purity.to_string(),
        normalization: s.normalization.to_string(),
        binomial: s.binomial.iter().map(ToString::to_string).collect(),
        limit: s.limit,
    }
}

fn first_failure<'a>(reports: impl IntoIterator<Item = &'a CriterionReport>) -> Option<FailureNote> {
    reports.into_iter().find_map(|r| {
        r.first_failure().map(|c| FailureNote {
            criterion: r.criterion,
            label: c.label.clone(),
            value: c.value,
        })
    })
}

/// Outcome of a full run from the aggregate verdict.
fn full_outcome(v: &StateVerdict) -> RunOutcome {
    let reference = &v.reports[0];
    if !v.conflicting.is_empty() || reference.verdict == Verdict::Inconclusive {
        RunOutcome::Inconclusive
    } else if v.is_state {
        RunOutcome::Certified
    } else {
        RunOutcome::Rejected
    }
}

/// Outcome of a partial run. Positivity criteria decide when any were
/// selected; otherwise the pure-state tests do.
fn subset_outcome(reports: &[CriterionReport]) -> (RunOutcome, Vec<&CriterionReport>) {
    let positivity: Vec<&CriterionReport> = reports.iter().filter(|r| !r.criterion.is_pure_test()).collect();
    let deciding = if positivity.is_empty() {
        reports.iter().collect()
    } else {
        positivity
    };
    let any = |v: Verdict| deciding.iter().any(|r| r.verdict == v);
    let outcome = if any(Verdict::Accept) && any(Verdict::Reject) {
        RunOutcome::Inconclusive
    } else if any(Verdict::Reject) {
        RunOutcome::Rejected
    } else if any(Verdict::Inconclusive) {
        RunOutcome::Inconclusive
    } else {
        RunOutcome::Certified
    };
    (outcome, deciding)
}

pub fn run_check(cfg: &RunConfig) -> Result<RunReport> {
    cfg.tolerances.validate()?;
    let selected = if cfg.criteria.is_empty() {
        Vec::new()
    } else {
        select_criteria(cfg.kind, &cfg.criteria)?
    };
    let all = selected.is_empty() || cfg.kind.all_criteria().iter().all(|id| selected.contains(id));
    let (input, name) = load(cfg)?;
    let hbar = match &input {
        Input::Wigner(w) => w.spec().hbar,
        _ => cfg.hbar,
    };

    let mut exact = None;
    let full: Option<StateVerdict>;
    let mut reports: Vec<CriterionReport> = Vec::new();
    match &input {
        Input::Matrix(_) | Input::Kernel(_) => {
            let m = match &input {
                Input::Matrix(m) => m.clone(),
                Input::Kernel(k) => kernel_to_matrix(k),
                _ => unreachable!(),
            };
            if all {
                full = Some(criteria::run_all(&m, &cfg.tolerances, cfg.n_max));
            } else {
                full = None;
                reports = selected.iter().map(|&id| operator_report(&m, id, cfg)).collect();
            }
        }
        Input::Wigner(w) => {
            let ctx = PhaseContext::new(w)?;
            if all {
                full = Some(ctx.run_all(&cfg.tolerances, cfg.m_max)?);
            } else {
                full = None;
                reports = selected
                    .iter()
                    .map(|&id| phase_report(&ctx, id, cfg))
                    .collect::<Result<_>>()?;
            }
        }
        Input::Mixture(mix) => {
            exact = Some(exact_sums(mix, cfg.m_max));
            if all {
                full = Some(mixture_verdict(mix, cfg.m_max)?);
            } else {
                full = None;
                reports = mixture_criteria(mix, cfg.m_max)?
                    .into_iter()
                    .filter(|r| selected.contains(&r.criterion))
                    .collect();
            }
        }
    }

    let criteria_used = if all { cfg.kind.all_criteria() } else { selected };
    let (outcome, is_state, is_pure, conflicting, inconclusive, failure, reports) = match full {
        Some(v) => {
            let outcome = full_outcome(&v);
            let failure = if outcome == RunOutcome::Rejected {
                first_failure(&v.reports)
            } else {
                None
            };
            (
                outcome,
                Some(v.is_state),
                v.is_pure,
                v.conflicting,
                v.inconclusive,
                failure,
                v.reports,
            )
        }
        None => {
            let (outcome, deciding) = subset_outcome(&reports);
            let failure = if outcome == RunOutcome::Rejected {
                first_failure(deciding.iter().copied())
            } else {
                None
            };
            let inconclusive = reports
                .iter()
                .filter(|r| r.verdict == Verdict::Inconclusive)
                .map(|r| r.criterion)
                .collect();
            let pure: Vec<&CriterionReport> = reports.iter().filter(|r| r.criterion.is_pure_test()).collect();
            let is_pure = if pure.is_empty() {
                None
            } else if pure.iter().all(|r| r.accepted()) {
                Some(true)
            } else if pure.iter().all(|r| r.rejected()) {
                Some(false)
            } else {
                None
            };
            (outcome, None, is_pure, Vec::new(), inconclusive, failure, reports)
        }
    };
    Ok(RunReport {
        tool: "statecert".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind: cfg.kind,
        input: name,
        config: EchoConfig {
            tolerances: cfg.tolerances,
            n_max: cfg.n_max,
            m_max: cfg.m_max,
            hbar,
            criteria: criteria_used,
            all_criteria: all,
        },
        seed: None,
        outcome,
        exit_code: outcome.exit_code(),
        is_state,
        is_pure,
        conflicting,
        inconclusive,
        first_failure: failure,
        exact,
        reports,
    })
}

/// Grid geometry flags shared by the Wigner generators.
#[derive(Debug, Clone, Copy)]
pub struct GridArgs {
    pub half_width: f64,
    pub points: usize,
    pub hbar: f64,
}

impl Default for GridArgs {
    fn default() -> Self {
        let d = GridSpec::default();
        Self {
            half_width: d.q_max,
            points: d.n_q,
            hbar: d.hbar,
        }
    }
}

impl GridArgs {
    fn spec(self) -> GridSpec {
        GridSpec::square(self.half_width, self.points, self.hbar)
    }
}

pub fn gen_fock(n: usize, grid: GridArgs) -> Result<Vec<u8>> {
    Ok(formats::write_wigner_bytes(&fock_wigner(n, grid.spec())?))
}

pub fn gen_tatarskij(grid: GridArgs) -> Result<Vec<u8>> {
    Ok(formats::write_wigner_bytes(&build_tatarskij(grid.spec())?))
}

/// Random convex mixture of orthonormal projectors; the seed is recorded in
/// a comment line.
pub fn gen_density(dim: usize, seed: u64) -> Result<String> {
    if dim == 0 {
        return Err(CliError::Usage("--dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sample::random_density(&mut rng, dim);
    Ok(format!("# random density matrix, seed {seed}\n{}", formats::write_matrix_string(&m)))
}

/// Oscillator kernel `Σ c_k ψ_k(x) ψ_k(y)`; `coeffs` defaults to the
/// projector onto level `n`.
pub fn gen_kernel(n: usize, coeffs: Option<&str>, points: usize, x_min: f64, x_max: f64, hbar: f64) -> Result<String> {
    let c: Vec<f64> = match coeffs {
        Some(list) => OrthogonalMixture::parse(hbar, list)?
            .coeffs
            .iter()
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .collect(),
        None => {
            let mut c = vec![0.0; n + 1];
            c[n] = 1.0;
            c
        }
    };
    let k = oscillator_mixture_kernel(x_min, x_max, points, hbar, &c)?;
    Ok(formats::write_kernel_string(&k))
}

/// `(criterion, index, value)` rows of every monitored sequence.
pub fn write_csv<W: std::io::Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["criterion", "index", "value"])?;
    for r in &report.reports {
        for &(i, v) in &r.sequence {
            w.write_record([r.criterion.name().to_string(), i.to_string(), format!("{v:?}")])?;
        }
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve_per_kind() {
        let s = |k, n: &str| select_criteria(k, &[n.to_string()]);
        assert_eq!(s(Kind::Wigner, "pure").unwrap(), vec![CriterionId::WPure]);
        assert_eq!(
            s(Kind::Matrix, "pure").unwrap(),
            vec![CriterionId::PureFinite, CriterionId::PureInfinite]
        );
        assert_eq!(s(Kind::Matrix, "BINOMIAL_SUMS").unwrap(), vec![CriterionId::BinomialSums]);
        assert_eq!(s(Kind::Mixture, "w-limit").unwrap(), vec![CriterionId::WLimit]);
        assert!(s(Kind::Wigner, "power").is_err());
        assert!(s(Kind::Matrix, "W_PURE").is_err());
    }

    #[test]
    fn mixture_run_reports_exact_values() {
        let mut cfg = RunConfig::new(Kind::Mixture);
        cfg.coeffs = Some("2/3,2/3,-1/3".into());
        let r = run_check(&cfg).unwrap();
        assert_eq!(r.exit_code, 1);
        let e = r.exact.unwrap();
        assert_eq!(e.trace_sqrt, "5/3");
        assert_eq!(&e.binomial[..3], &["1", "0", "-4/9"]);
    }

    #[test]
    fn subset_outcomes() {
        let mut cfg = RunConfig::new(Kind::Mixture);
        cfg.coeffs = Some("1/2,1/2".into());
        cfg.criteria = vec!["pure".into()];
        assert_eq!(run_check(&cfg).unwrap().outcome, RunOutcome::Rejected);
        cfg.criteria = vec!["pure".into(), "binomial".into()];
        assert_eq!(run_check(&cfg).unwrap().outcome, RunOutcome::Certified);
    }
}
