//! Verdicts and per-criterion reports shared by the operator and phase-space
//! criteria.

use serde::{Deserialize, Serialize};

use crate::linalg::ConvergenceReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionId {
    // operator side
    Gates,
    FiniteDef2,
    PureFinite,
    PowerSeq,
    SqrtSeries,
    SqrtSquareTrace,
    TraceSqrtSquare,
    BinomialSums,
    BinomialLimit,
    PureInfinite,
    // phase-space side
    WGates,
    WTraceSqrt,
    WBinomial,
    WLimit,
    WPure,
}

impl CriterionId {
    pub fn is_pure_test(self) -> bool {
        matches!(self, Self::PureFinite | Self::PureInfinite | Self::WPure)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gates => "GATES",
            Self::FiniteDef2 => "FINITE_DEF2",
            Self::PureFinite => "PURE_FINITE",
            Self::PowerSeq => "POWER_SEQ",
            Self::SqrtSeries => "SQRT_SERIES",
            Self::SqrtSquareTrace => "SQRT_SQUARE_TRACE",
            Self::TraceSqrtSquare => "TRACE_SQRT_SQUARE",
            Self::BinomialSums => "BINOMIAL_SUMS",
            Self::BinomialLimit => "BINOMIAL_LIMIT",
            Self::PureInfinite => "PURE_INFINITE",
            Self::WGates => "W_GATES",
            Self::WTraceSqrt => "W_TRACE_SQRT",
            Self::WBinomial => "W_BINOMIAL",
            Self::WLimit => "W_LIMIT",
            Self::WPure => "W_PURE",
        }
    }
}

impl std::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// Truncation bound hit with no evidence either way.
    Undecided,
}

/// One condition of a criterion with the value that was measured for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub outcome: Outcome,
    #[serde(with = "json_float")]
    pub value: f64,
}

impl Check {
    pub fn new(label: impl Into<String>, passed: bool, value: f64) -> Self {
        Self {
            label: label.into(),
            outcome: if passed { Outcome::Pass } else { Outcome::Fail },
            value,
        }
    }

    pub fn undecided(label: impl Into<String>, value: f64) -> Self {
        Self {
            label: label.into(),
            outcome: Outcome::Undecided,
            value,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: CriterionId,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
    /// `(index, value)` pairs of the monitored sum sequence.
    #[serde(skip_serializing_if = "Vec::is_empty", default, with = "json_float::pairs")]
    pub sequence: Vec<(usize, f64)>,
    /// First index at which the sequence violated its condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<usize>,
    /// Named scalar diagnostics.
    #[serde(skip_serializing_if = "Vec::is_empty", default, with = "json_float::pairs")]
    pub diagnostics: Vec<(String, f64)>,
    /// Dimension of the (possibly truncated) matrix the report certifies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_dim: Option<usize>,
}

impl CriterionReport {
    /// Builds a report; the verdict follows from the checks: any failure
    /// rejects, otherwise any undecided condition makes it inconclusive.
    pub fn from_checks(criterion: CriterionId, checks: Vec<Check>) -> Self {
        let verdict = if checks.iter().any(|c| c.outcome == Outcome::Fail) {
            Verdict::Reject
        } else if checks.iter().any(|c| c.outcome == Outcome::Undecided) {
            Verdict::Inconclusive
        } else {
            Verdict::Accept
        };
        Self {
            criterion,
            verdict,
            checks,
            convergence: None,
            sequence: Vec::new(),
            witness: None,
            diagnostics: Vec::new(),
            truncation_dim: None,
        }
    }

    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn rejected(&self) -> bool {
        self.verdict == Verdict::Reject
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.outcome == Outcome::Fail)
    }

    pub fn check(&self, label: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.label == label)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub(crate) fn with_diag(mut self, name: &str, value: f64) -> Self {
        self.diagnostics.push((name.to_string(), value));
        self
    }
}

/// JSON has no infinities or NaN; these codecs write non-finite values as the
/// strings `"inf"`, `"-inf"` and `"nan"` and read them back.
pub mod json_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *v {
            x if x.is_finite() => s.serialize_f64(x),
            x if x.is_nan() => s.serialize_str("nan"),
            x if x > 0.0 => s.serialize_str("inf"),
            _ => s.serialize_str("-inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }

    #[derive(Serialize, Deserialize)]
    struct Lossless(#[serde(with = "self")] f64);

    /// The same encoding for `(key, value)` lists.
    pub mod pairs {
        use super::Lossless;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<K: Serialize + Clone, S: Serializer>(v: &[(K, f64)], s: S) -> Result<S::Ok, S::Error> {
            let out: Vec<(K, Lossless)> = v.iter().map(|(k, x)| (k.clone(), Lossless(*x))).collect();
            out.serialize(s)
        }

        pub fn deserialize<'de, K: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<Vec<(K, f64)>, D::Error> {
            let v: Vec<(K, Lossless)> = Vec::deserialize(d)?;
            Ok(v.into_iter().map(|(k, x)| (k, x.0)).collect())
        }
    }
}

/// Keeps every entry up to 64, then every 64th, plus the last.
pub(crate) fn thin_sequence(values: &[f64], first_index: usize) -> Vec<(usize, f64)> {
    let last = values.len().saturating_sub(1);
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i < 64 || i % 64 == 0 || *i == last)
        .map(|(i, &v)| (i + first_index, v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_from_checks() {
        let ok = Check::new("a", true, 1.0);
        let bad = Check::new("b", false, 2.0);
        let open = Check::undecided("c", 3.0);
        let r = CriterionReport::from_checks(CriterionId::PowerSeq, vec![ok.clone()]);
        assert_eq!(r.verdict, Verdict::Accept);
        let r = CriterionReport::from_checks(CriterionId::PowerSeq, vec![ok.clone(), open.clone()]);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        let r = CriterionReport::from_checks(CriterionId::PowerSeq, vec![ok, open, bad]);
        assert_eq!(r.verdict, Verdict::Reject);
        assert_eq!(r.first_failure().unwrap().label, "b");
    }

    #[test]
    fn json_shape() {
        let r = CriterionReport::from_checks(CriterionId::BinomialSums, vec![Check::new("x", true, 0.5)]);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"BINOMIAL_SUMS\""));
        assert!(s.contains("\"accept\""));
    }

    #[test]
    fn non_finite_values_round_trip() {
        let mut r = CriterionReport::from_checks(CriterionId::WLimit, vec![Check::new("x", false, f64::NEG_INFINITY)]);
        r.sequence = vec![(0, 1.0), (1, f64::INFINITY)];
        r.diagnostics = vec![("gap".into(), f64::NAN), ("ok".into(), 0.25)];
        r.convergence = Some(ConvergenceReport {
            status: crate::linalg::ConvergenceStatus::MaxTermsReached,
            terms_used: 3,
            final_residual: f64::INFINITY,
        });
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"-inf\"") && s.contains("\"nan\""));
        let back: CriterionReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.checks[0].value, f64::NEG_INFINITY);
        assert_eq!(back.sequence[1].1, f64::INFINITY);
        assert!(back.diagnostics[0].1.is_nan());
        assert_eq!(back.diagnostics[1].1, 0.25);
        assert_eq!(back.convergence.unwrap().final_residual, f64::INFINITY);
    }
}
