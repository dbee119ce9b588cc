//! Human-readable rendering of a [`RunReport`].

use std::fmt::Write as _;

use statecert::phase::LimitBehaviour;
use statecert::{Outcome, Verdict};

use crate::run::{Kind, RunOutcome, RunReport};

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Accept => "accept",
        Verdict::Reject => "reject",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn mark(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "ok  ",
        Outcome::Fail => "FAIL",
        Outcome::Undecided => "??  ",
    }
}

fn limit_word(l: LimitBehaviour) -> &'static str {
    match l {
        LimitBehaviour::Zero => "0",
        LimitBehaviour::MinusInfinity => "-inf",
        LimitBehaviour::Oscillating => "oscillating",
    }
}

pub fn render_text(r: &RunReport) -> String {
    let mut s = String::new();
    let headline = match r.outcome {
        RunOutcome::Certified => "CERTIFIED",
        RunOutcome::Rejected => "REJECTED",
        RunOutcome::Inconclusive => "INCONCLUSIVE",
    };
    let _ = writeln!(s, "{headline}: {} ({:?})", r.input, r.kind);
    if let Some(p) = r.is_pure {
        let _ = writeln!(s, "pure: {}", if p { "yes" } else { "no" });
    }
    if let Some(f) = &r.first_failure {
        let _ = writeln!(s, "first failure: {} `{}` = {:.6e}", f.criterion, f.label, f.value);
    }
    if !r.conflicting.is_empty() {
        let names: Vec<_> = r.conflicting.iter().map(|c| c.name()).collect();
        let _ = writeln!(s, "conflicting: {}", names.join(", "));
    }
    if !r.inconclusive.is_empty() {
        let names: Vec<_> = r.inconclusive.iter().map(|c| c.name()).collect();
        let _ = writeln!(s, "inconclusive: {}", names.join(", "));
    }
    if let Some(e) = &r.exact {
        let _ = writeln!(s, "exact sums:");
        let _ = writeln!(s, "  int W              = {}", e.normalization);
        let _ = writeln!(s, "  sqrt sum           = {} * (2 pi hbar)^-1", e.trace_sqrt);
        let _ = writeln!(s, "  2 pi hbar int W*W  = {}", e.purity);
        let shown: Vec<&str> = e.binomial.iter().take(6).map(String::as_str).collect();
        let _ = writeln!(s, "  T_0.. (scaled)     = {}{}", shown.join(", "), if e.binomial.len() > 6 { ", ..." } else { "" });
        let _ = writeln!(s, "  lim T_m            = {}", limit_word(e.limit));
    }
    for rep in &r.reports {
        let _ = write!(s, "\n{:<18} {}", rep.criterion.name(), verdict_word(rep.verdict));
        if let Some(w) = rep.witness {
            let _ = write!(s, "  witness n={w}");
        }
        if let Some(c) = &rep.convergence {
            let _ = write!(s, "  ({:?} after {} terms)", c.status, c.terms_used);
        }
        s.push('\n');
        for c in &rep.checks {
            let _ = writeln!(s, "  [{}] {:<36} {:.6e}", mark(c.outcome), c.label, c.value);
        }
        for (name, v) in &rep.diagnostics {
            let _ = writeln!(s, "         {name:<36} {v:.6e}");
        }
    }
    if r.kind == Kind::Mixture || r.kind == Kind::Wigner {
        let _ = writeln!(s, "\n(phase-space sums are quoted relative to 1/(2 pi hbar), hbar = {})", r.config.hbar);
    }
    s
}
