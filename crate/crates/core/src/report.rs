//! Serializable result documents shared by the command line and the HTTP
//! service, plus the single entry point both use to run an action.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{RealAlgebraic, Var};
use crate::engine::{self, DiscardReason, EngineError, Quadrant, Verdict};
use crate::frontend::{load, FrontendError, Lint, Origin, TheoryProblem};
use crate::qe::{QeConfig, QeError, QeStats, ResourceKind, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessValue {
    pub exact: String,
    pub approx: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceEntry {
    pub name: String,
    pub origin: Origin,
    pub display: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub total_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universal_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub existential_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub calls: Vec<QeStats>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestionEntry {
    pub variable: String,
    /// Restriction on the coordinate, e.g. `s >= 0`.
    pub formula: String,
    /// The same restriction over the pre-abstraction term, ready to paste
    /// into the theory file.
    pub source: String,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardEntry {
    pub variable: String,
    pub reason: DiscardReason,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Quadrant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<BTreeMap<String, WitnessValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<BTreeMap<String, WitnessValue>>,
    pub lints: Vec<Lint>,
    pub space: Vec<SpaceEntry>,
    pub stats: Stats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formulas: Option<BTreeMap<String, String>>,
    /// Per-variable formulas over the pre-abstraction terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_formulas: Option<BTreeMap<String, String>>,
    /// Per-variable failures, e.g. a resource limit on one projection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestions: Option<Vec<SuggestionEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discarded: Option<Vec<DiscardEntry>>,
}

pub fn witness_values(w: &Witness) -> BTreeMap<String, WitnessValue> {
    w.iter()
        .map(|(v, a)| (v.to_string(), witness_value(v, a)))
        .collect()
}

fn witness_value(v: &Var, a: &RealAlgebraic) -> WitnessValue {
    WitnessValue {
        exact: a.exact_string(v.as_str()),
        approx: a.approx_string(),
    }
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

impl ResultDocument {
    fn base(problem: &TheoryProblem) -> ResultDocument {
        ResultDocument {
            lints: problem.lints.clone(),
            space: problem
                .space
                .coordinates
                .iter()
                .map(|c| SpaceEntry {
                    name: c.name.clone(),
                    origin: c.origin,
                    display: c.display.clone(),
                })
                .collect(),
            ..ResultDocument::default()
        }
    }

    pub fn from_verdict(problem: &TheoryProblem, v: &Verdict) -> ResultDocument {
        ResultDocument {
            verdict: Some(v.quadrant),
            example: v.example.as_ref().map(witness_values),
            counterexample: v.counterexample.as_ref().map(witness_values),
            stats: Stats {
                total_ms: v.stats.total_ms,
                universal_ms: v.stats.universal_ms,
                existential_ms: Some(v.stats.existential_ms),
                calls: v.stats.calls.clone(),
            },
            ..ResultDocument::base(problem)
        }
    }

    pub fn from_space(problem: &TheoryProblem) -> ResultDocument {
        ResultDocument::base(problem)
    }

    /// Serialized with two-space indentation.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Analyze,
    /// Restricted to the listed coordinates when given.
    Possibilities(Option<Vec<String>>),
    Sufficient,
    Space,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{}", LintList(.0.clone()))]
    Parse(Vec<Lint>),
    #[error("{0}")]
    Usage(String),
    #[error("resource limit: {kind}")]
    Resource { kind: ResourceKind, stats: Option<QeStats> },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<FrontendError> for RunError {
    fn from(e: FrontendError) -> RunError {
        match e {
            FrontendError::Parse(p) => RunError::Parse(p.diagnostics),
            FrontendError::Resource(m) => RunError::Usage(m),
        }
    }
}

impl From<QeError> for RunError {
    fn from(e: QeError) -> RunError {
        match e {
            QeError::Resource { kind, stats } => RunError::Resource {
                kind,
                stats: Some(stats),
            },
            other => RunError::Internal(other.to_string()),
        }
    }
}

impl From<EngineError> for RunError {
    fn from(e: EngineError) -> RunError {
        match e {
            EngineError::Qe(q) => q.into(),
            other => RunError::Internal(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    BadRequest,
    ParseError,
    ResourceLimit,
    InternalError,
}

/// Body returned instead of a [`ResultDocument`] when a run fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub status: Status,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Lint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resource: Option<ResourceKind>,
    /// Partial statistics up to the point a limit was hit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<QeStats>,
}

impl RunError {
    pub fn status(&self) -> Status {
        match self {
            RunError::Parse(_) => Status::ParseError,
            RunError::Usage(_) => Status::BadRequest,
            RunError::Resource { .. } => Status::ResourceLimit,
            RunError::Internal(_) => Status::InternalError,
        }
    }

    pub fn to_document(&self) -> ErrorDocument {
        let (diagnostics, resource, stats) = match self {
            RunError::Parse(ls) => (ls.clone(), None, None),
            RunError::Resource { kind, stats } => (Vec::new(), Some(*kind), stats.clone()),
            _ => (Vec::new(), None, None),
        };
        ErrorDocument {
            status: self.status(),
            message: self.to_string(),
            diagnostics,
            resource,
            stats,
        }
    }
}

/// Newline-separated parse diagnostics.
#[derive(Debug)]
pub struct LintList(pub Vec<Lint>);

impl std::fmt::Display for LintList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses `source` and runs `action` on it.
pub fn run(source: &str, action: &Action, cfg: &QeConfig) -> Result<ResultDocument, RunError> {
    let start = Instant::now();
    let problem = load(source)?;
    run_problem(&problem, action, cfg, start)
}

pub fn run_problem(
    problem: &TheoryProblem,
    action: &Action,
    cfg: &QeConfig,
    start: Instant,
) -> Result<ResultDocument, RunError> {
    match action {
        Action::Analyze => {
            let v = engine::classify(problem, cfg)?;
            let mut doc = ResultDocument::from_verdict(problem, &v);
            doc.stats.total_ms = ms_since(start);
            Ok(doc)
        }
        Action::Space => {
            let mut doc = ResultDocument::from_space(problem);
            doc.stats.total_ms = ms_since(start);
            Ok(doc)
        }
        Action::Possibilities(vars) => {
            let vars = match vars {
                Some(names) => {
                    let known = problem.coordinates();
                    let mut out = Vec::new();
                    for n in names {
                        let v = Var::new(n);
                        if !known.contains(&v) {
                            return Err(RunError::Usage(format!("'{n}' is not a coordinate of this problem")));
                        }
                        out.push(v);
                    }
                    Some(out)
                }
                None => None,
            };
            let mut doc = ResultDocument::base(problem);
            let ps = match engine::possibilities(problem, vars.as_deref(), cfg) {
                Err(EngineError::Contradictory) => {
                    doc.verdict = Some(Quadrant::ContradictoryAssumptions);
                    doc.stats.total_ms = ms_since(start);
                    return Ok(doc);
                }
                other => other?,
            };
            let mut formulas = BTreeMap::new();
            let mut sources = BTreeMap::new();
            let mut errors = BTreeMap::new();
            for p in &ps {
                let name = p.variable.to_string();
                match &p.result {
                    Ok(set) => {
                        formulas.insert(name.clone(), set.to_string());
                        sources.insert(name, p.source_form(problem).unwrap_or_default());
                    }
                    Err(e) => {
                        errors.insert(name, e.clone());
                    }
                }
                doc.stats.calls.extend(p.stats.clone());
            }
            doc.formulas = Some(formulas);
            doc.source_formulas = Some(sources);
            doc.errors = (!errors.is_empty()).then_some(errors);
            doc.stats.total_ms = ms_since(start);
            Ok(doc)
        }
        Action::Sufficient => {
            let v = engine::classify(problem, cfg)?;
            let mut doc = ResultDocument::from_verdict(problem, &v);
            if v.quadrant == Quadrant::Mixed {
                let s = engine::sufficient(problem, cfg)?;
                doc.suggestions = Some(
                    s.suggestions
                        .iter()
                        .map(|g| SuggestionEntry {
                            variable: g.variable.to_string(),
                            formula: g.formula.to_string(),
                            source: g.source_form(problem),
                            verified: g.verified,
                        })
                        .collect(),
                );
                doc.discarded = Some(
                    s.discarded
                        .iter()
                        .map(|(v, r)| DiscardEntry {
                            variable: v.to_string(),
                            reason: *r,
                        })
                        .collect(),
                );
            } else {
                doc.suggestions = Some(Vec::new());
            }
            doc.stats.total_ms = ms_since(start);
            Ok(doc)
        }
    }
}


#[cfg(test)]
mod corpus_tests {
    use super::*;
    use crate::corpus::Corpus;

    #[test]
    fn bundled_verdicts_match_golden() {
        let c = Corpus::bundled();
        for e in &c.examples {
            let t = Instant::now();
            let doc = run(&e.source, &Action::Analyze, &QeConfig::default());
            eprintln!("{} {:?} {:?}", e.id, doc.as_ref().map(|d| d.verdict), t.elapsed());
            let doc = doc.unwrap();
            assert!(doc.lints.is_empty(), "{}: {:?}", e.id, doc.lints);
            assert_eq!(doc.verdict, Some(c.golden[&e.id]), "{}", e.id);
        }
    }
}
