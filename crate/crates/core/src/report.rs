//! Check records, residual aggregation and report serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const TOL_EXACT: f64 = 1e-12;
pub const TOL_ALGEBRAIC: f64 = 1e-9;
pub const TOL_FIRST_ORDER: f64 = 1e-8;
pub const TOL_SECOND_ORDER: f64 = 1e-7;
pub const TOL_THIRD_ORDER: f64 = 1e-6;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    NotApplicable,
    PrintedFormMismatch,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
            Status::NotApplicable => "not-applicable",
            Status::PrintedFormMismatch => "printed-form-mismatch",
        }
    }
}

/// How a check's residual translates into a status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Residual above tolerance is a failure.
    Normative,
    /// Evaluates a formula exactly as printed in the source; a residual
    /// above tolerance is reported but never fails the run.
    PrintedForm,
}

/// Static description of a single check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckDef {
    pub id: &'static str,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub kind: CheckKind,
}

impl CheckDef {
    pub const fn new(id: &'static str, anchor: &'static str, tolerance: f64) -> CheckDef {
        CheckDef {
            id,
            anchor,
            tolerance,
            kind: CheckKind::Normative,
        }
    }

    pub const fn printed(id: &'static str, anchor: &'static str, tolerance: f64) -> CheckDef {
        CheckDef {
            id,
            anchor,
            tolerance,
            kind: CheckKind::PrintedForm,
        }
    }

    pub fn residual(&'static self, value: f64) -> Measurement {
        Measurement {
            def: self,
            outcome: Outcome::Residual(value),
        }
    }

    pub fn vacuous(&'static self) -> Measurement {
        Measurement {
            def: self,
            outcome: Outcome::Vacuous,
        }
    }

    pub fn not_applicable(&'static self) -> Measurement {
        Measurement {
            def: self,
            outcome: Outcome::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Residual(f64),
    /// Nothing to evaluate (e.g. every candidate was degenerate).
    Vacuous,
    /// A precondition of the identity does not hold for this model.
    NotApplicable,
}

/// One evaluation of a check at one sample point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub def: &'static CheckDef,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, Default)]
struct Aggregate {
    max_residual: Option<f64>,
    vacuous: usize,
    not_applicable: usize,
}

/// Order-independent accumulation of measurements into per-check maxima.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    entries: BTreeMap<&'static str, (&'static CheckDef, Aggregate)>,
}

impl Tally {
    pub fn new() -> Tally {
        Tally::default()
    }

    pub fn push(&mut self, m: Measurement) {
        let entry = self
            .entries
            .entry(m.def.id)
            .or_insert((m.def, Aggregate::default()));
        let agg = &mut entry.1;
        match m.outcome {
            Outcome::Residual(r) => {
                // NaN must never be swallowed by max()
                let r = if r.is_nan() { f64::INFINITY } else { r.abs() };
                agg.max_residual = Some(agg.max_residual.map_or(r, |cur| cur.max(r)));
            }
            Outcome::Vacuous => agg.vacuous += 1,
            Outcome::NotApplicable => agg.not_applicable += 1,
        }
    }

    pub fn extend(&mut self, ms: impl IntoIterator<Item = Measurement>) {
        for m in ms {
            self.push(m);
        }
    }

    pub fn merge(&mut self, other: Tally) {
        for (_, (def, agg)) in other.entries {
            if let Some(r) = agg.max_residual {
                self.push(def.residual(r));
            }
            for _ in 0..agg.vacuous {
                self.push(def.vacuous());
            }
            for _ in 0..agg.not_applicable {
                self.push(def.not_applicable());
            }
        }
    }

    /// Drops every check whose id fails `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.entries.retain(|id, _| keep(id));
    }

    pub fn max_residual(&self, id: &str) -> Option<f64> {
        self.entries.get(id).and_then(|(_, a)| a.max_residual)
    }

    /// Final records, sorted by id. Tolerances are multiplied by `tol_scale`.
    pub fn records(&self, tol_scale: f64) -> Vec<CheckRecord> {
        self.entries
            .values()
            .map(|(def, agg)| {
                let tolerance = def.tolerance * tol_scale;
                let status = match agg.max_residual {
                    Some(r) if r <= tolerance => Status::Pass,
                    Some(_) => match def.kind {
                        CheckKind::Normative => Status::Fail,
                        CheckKind::PrintedForm => Status::PrintedFormMismatch,
                    },
                    None if agg.not_applicable > 0 => Status::NotApplicable,
                    None => Status::Vacuous,
                };
                CheckRecord {
                    id: def.id.to_string(),
                    anchor: def.anchor.to_string(),
                    residual: agg.max_residual,
                    tolerance,
                    status,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub model: String,
    pub suite: String,
    pub seed: u64,
    pub points: usize,
    pub engine_version: String,
    pub checks: Vec<CheckRecord>,
}

impl CheckReport {
    pub fn new(model: &str, suite: &str, seed: u64, points: usize, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        CheckReport {
            model: model.to_string(),
            suite: suite.to_string(),
            seed,
            points,
            engine_version: ENGINE_VERSION.to_string(),
            checks,
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.has_failures())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {}  suite {}  seed {}  points {}  engine {}",
            self.model, self.suite, self.seed, self.points, self.engine_version
        );
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let residual = c
                .residual
                .map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
            let _ = writeln!(
                out,
                "{:<22} {:<width$}  residual {:>10}  tol {:.0e}  {}",
                c.status.as_str(),
                c.id,
                residual,
                c.tolerance,
                c.anchor,
            );
        }
        let failed = self.checks.iter().filter(|c| c.status == Status::Fail).count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    static A: CheckDef = CheckDef::new("a.identity", "x = x", 1e-9);
    static B: CheckDef = CheckDef::printed("b.printed", "y = 2y", 1e-9);
    static C: CheckDef = CheckDef::new("c.gated", "z", 1e-9);

    #[test]
    fn statuses_follow_residuals_and_gates() {
        let mut t = Tally::new();
        t.push(A.residual(1e-12));
        t.push(A.residual(-5e-10));
        t.push(B.residual(0.3));
        t.push(C.not_applicable());
        let recs = t.records(1.0);
        assert_eq!(recs[0].status, Status::Pass);
        assert_eq!(recs[0].residual, Some(5e-10));
        assert_eq!(recs[1].status, Status::PrintedFormMismatch);
        assert_eq!(recs[2].status, Status::NotApplicable);
        let report = CheckReport::new("m", "s", 1, 2, recs);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn nan_residual_fails() {
        let mut t = Tally::new();
        t.push(A.residual(f64::NAN));
        assert_eq!(t.records(1.0)[0].status, Status::Fail);
    }

    #[test]
    fn vacuous_only_when_nothing_measured() {
        let mut t = Tally::new();
        t.push(A.vacuous());
        assert_eq!(t.records(1.0)[0].status, Status::Vacuous);
        t.push(A.residual(1.0));
        assert_eq!(t.records(1.0)[0].status, Status::Fail);
        assert_eq!(t.records(1e10)[0].status, Status::Pass);
    }

    #[test]
    fn json_shape() {
        let mut t = Tally::new();
        t.push(C.vacuous());
        let r = CheckReport::new("E1", "all", 42, 100, t.records(1.0));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["checks"][0]["status"], "vacuous");
        assert!(v["checks"][0]["residual"].is_null());
        assert_eq!(v["seed"], 42);
    }
}
