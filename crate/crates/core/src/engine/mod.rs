//! Theorem classification, univariate deductions and missing-assumption
//! suggestions on a scalarized problem.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Var;
use crate::formula::{negate, Formula};
use crate::frontend::{Lint, Origin, SpaceReport, TheoryProblem};
use crate::qe::{decide, qe_one_var, Decision, OneVarSet, QeConfig, QeError, QeStats, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    True,
    False,
    Mixed,
    ContradictoryAssumptions,
}

impl Quadrant {
    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::True => "True",
            Quadrant::False => "False",
            Quadrant::Mixed => "Mixed",
            Quadrant::ContradictoryAssumptions => "ContradictoryAssumptions",
        }
    }

    pub fn from_presence(example: bool, counterexample: bool) -> Quadrant {
        match (example, counterexample) {
            (true, false) => Quadrant::True,
            (false, true) => Quadrant::False,
            (true, true) => Quadrant::Mixed,
            (false, false) => Quadrant::ContradictoryAssumptions,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictStats {
    pub total_ms: f64,
    /// Time spent deciding whether the hypothesis can fail; absent when
    /// the consistency witness already refuted it.
    pub universal_ms: Option<f64>,
    /// Time spent on the consistency check and the search for an example.
    pub existential_ms: f64,
    pub calls: Vec<QeStats>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub quadrant: Quadrant,
    pub example: Option<Witness>,
    pub counterexample: Option<Witness>,
    pub stats: VerdictStats,
    pub lints: Vec<Lint>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error("assumptions are contradictory")]
    Contradictory,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl EngineError {
    /// Partial statistics when the error is a resource limit.
    pub fn resource_stats(&self) -> Option<&QeStats> {
        match self {
            EngineError::Qe(QeError::Resource { stats, .. }) => Some(stats),
            _ => None,
        }
    }
}

fn exists_all(f: Formula) -> Formula {
    let vs: Vec<Var> = f.free_vars().into_iter().collect();
    Formula::exists(vs, f)
}

fn timed(f: &Formula, cfg: &QeConfig, calls: &mut Vec<QeStats>) -> Result<(Decision, f64), QeError> {
    let t = Instant::now();
    let d = decide(&exists_all(f.clone()), cfg)?;
    calls.push(d.stats.clone());
    Ok((d, t.elapsed().as_secs_f64() * 1000.0))
}

/// Whether `w` assigns every free variable of `f` and satisfies it.
fn satisfies(f: &Formula, w: &Witness) -> bool {
    f.free_vars().iter().all(|v| w.contains_key(v)) && f.eval_at(w).unwrap_or(false)
}

/// Four-way classification after a consistency check of the assumptions.
pub fn classify(problem: &TheoryProblem, cfg: &QeConfig) -> Result<Verdict, EngineError> {
    let start = Instant::now();
    let a = problem.assumptions_formula();
    let h = problem.hypothesis.formula.clone();
    let a_h = Formula::and([a.clone(), h.clone()]);
    let a_not_h = Formula::and([a.clone(), negate(&h)]);
    let mut stats = VerdictStats::default();

    let (consistent, ms) = timed(&a, cfg, &mut stats.calls)?;
    stats.existential_ms += ms;
    if !consistent.truth {
        stats.total_ms = start.elapsed().as_secs_f64() * 1000.0;
        return Ok(Verdict {
            quadrant: Quadrant::ContradictoryAssumptions,
            example: None,
            counterexample: None,
            stats,
            lints: problem.lints.clone(),
        });
    }
    let seed = consistent.witness.unwrap_or_default();

    let example = if satisfies(&a_h, &seed) {
        Some(seed.clone())
    } else {
        let (d, ms) = timed(&a_h, cfg, &mut stats.calls)?;
        stats.existential_ms += ms;
        d.witness.filter(|_| d.truth)
    };
    let counterexample = if satisfies(&a_not_h, &seed) {
        Some(seed)
    } else {
        let (d, ms) = timed(&a_not_h, cfg, &mut stats.calls)?;
        stats.universal_ms = Some(ms);
        d.witness.filter(|_| d.truth)
    };
    let example = example.map(|w| restrict(w, problem));
    let counterexample = counterexample.map(|w| restrict(w, problem));
    stats.total_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(Verdict {
        quadrant: Quadrant::from_presence(example.is_some(), counterexample.is_some()),
        example,
        counterexample,
        stats,
        lints: problem.lints.clone(),
    })
}

/// Keeps the coordinates of the problem space, filling any the
/// sentence left unconstrained with 0.
fn restrict(mut w: Witness, problem: &TheoryProblem) -> Witness {
    let coords = problem.coordinates();
    w.retain(|v, _| coords.contains(v));
    for v in coords {
        w.entry(v).or_insert_with(|| crate::algebra::RealAlgebraic::Rational(crate::algebra::int(0)));
    }
    w
}

/// Coordinates with total derivatives first, then alphabetical.
pub fn default_variables(problem: &TheoryProblem) -> Vec<Var> {
    let mut cs: Vec<_> = problem.space.coordinates.iter().collect();
    cs.sort_by_key(|c| (c.origin != Origin::TotalDerivative, c.name.clone()));
    cs.into_iter().map(|c| Var::new(&c.name)).collect()
}

#[derive(Clone, Debug)]
pub struct Possibility {
    pub variable: Var,
    pub result: Result<OneVarSet, String>,
    pub stats: Option<QeStats>,
}

impl Possibility {
    /// The deduction with the coordinate shown by its pre-abstraction term.
    pub fn source_form(&self, problem: &TheoryProblem) -> Option<String> {
        let name = problem.display_of(self.variable.as_str()).unwrap_or(self.variable.as_str());
        self.result.as_ref().ok().map(|s| s.render(name))
    }
}

/// Projection of the assumptions onto each requested coordinate.
pub fn possibilities(
    problem: &TheoryProblem,
    variables: Option<&[Var]>,
    cfg: &QeConfig,
) -> Result<Vec<Possibility>, EngineError> {
    let a = problem.assumptions_formula();
    let consistent = decide(&exists_all(a.clone()), cfg)?;
    if !consistent.truth {
        return Err(EngineError::Contradictory);
    }
    let vars = match variables {
        Some(vs) => vs.to_vec(),
        None => default_variables(problem),
    };
    Ok(vars
        .into_iter()
        .map(|v| match qe_one_var(&a, &v, cfg) {
            Ok(r) => Possibility {
                variable: v,
                result: Ok(r.set),
                stats: Some(r.stats),
            },
            Err(e) => Possibility {
                variable: v,
                stats: match &e {
                    QeError::Resource { stats, .. } => Some(stats.clone()),
                    _ => None,
                },
                result: Err(e.to_string()),
            },
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct Suggestion {
    pub variable: Var,
    pub formula: OneVarSet,
    pub verified: bool,
}

impl Suggestion {
    pub fn source_form(&self, problem: &TheoryProblem) -> String {
        let name = problem.display_of(self.variable.as_str()).unwrap_or(self.variable.as_str());
        self.formula.render(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscardReason {
    False,
    SameAsHypothesis,
}

#[derive(Clone, Debug)]
pub struct Sufficiency {
    pub suggestions: Vec<Suggestion>,
    pub discarded: Vec<(Var, DiscardReason)>,
}

/// Per-axis restrictions that, added to the assumptions, make the
/// hypothesis follow.
pub fn sufficient(problem: &TheoryProblem, cfg: &QeConfig) -> Result<Sufficiency, EngineError> {
    let a = problem.assumptions_formula();
    let h = problem.hypothesis.formula.clone();
    let counter = Formula::and([a.clone(), negate(&h)]);
    let h_vars = h.free_vars();
    let mut out = Sufficiency {
        suggestions: Vec::new(),
        discarded: Vec::new(),
    };
    for v in default_variables(problem) {
        let f = qe_one_var(&counter, &v, cfg)?.set;
        let p = qe_one_var(&a, &v, cfg)?.set;
        let f = if p.is_subset_of(&f) {
            OneVarSet::all(v.clone())
        } else {
            f.relative_to(&p)
        };
        let g = f.complement();
        if g.is_empty() {
            out.discarded.push((v, DiscardReason::False));
            continue;
        }
        if h_vars.len() == 1 && h_vars.contains(&v) {
            let hv = qe_one_var(&h, &v, cfg)?.set;
            if g.same_set(&hv) {
                out.discarded.push((v, DiscardReason::SameAsHypothesis));
                continue;
            }
        }
        let check = Formula::and([a.clone(), g.to_formula(), negate(&h)]);
        let verified = !decide(&exists_all(check), cfg)?.truth;
        if !verified {
            return Err(EngineError::Internal(format!(
                "suggestion {g} on {v} does not imply the hypothesis"
            )));
        }
        out.suggestions.push(Suggestion {
            variable: v,
            formula: g,
            verified,
        });
    }
    Ok(out)
}

pub fn space(problem: &TheoryProblem) -> SpaceReport {
    problem.space.clone()
}
