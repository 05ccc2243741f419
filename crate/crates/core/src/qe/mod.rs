//! Real quantifier elimination: linear virtual substitution where it
//! applies, cylindrical algebraic decomposition for the rest.

mod cad;
mod onevar;
mod order;
mod vs;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{interrupt, AlgebraError, RealAlgebraic, SamplePoint, Var};
use crate::formula::{simplify, to_prenex, Formula, FormulaError, PrenexSentence, Quantifier};

pub use cad::{project, rational_above, rational_below, rational_between, residual, Projection};
pub use onevar::OneVarSet;
pub use order::{choose_order, OrderMode, VariableOrder};
pub use vs::{eliminate_linear, eliminate_linear_forall, is_linear_in};

/// Largest matrix (in atoms) a substitution step may produce before the
/// remaining variables are left to the decomposition.
const VS_MAX_ATOMS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    Cells,
    Projection,
    Timeout,
    Cancelled,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceKind::Cells => "cell limit reached",
            ResourceKind::Projection => "projection size limit reached",
            ResourceKind::Timeout => "timeout",
            ResourceKind::Cancelled => "cancelled",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QeStats {
    pub cells: usize,
    pub projection_polys: usize,
    pub projection_levels: Vec<usize>,
    /// Elimination order of the variables handled by the decomposition.
    pub order: Vec<String>,
    pub vs_eliminated: Vec<String>,
    pub elapsed_ms: f64,
}

impl QeStats {
    /// Adds the work of another call; levels and order keep the largest
    /// decomposition seen.
    pub fn absorb(&mut self, o: QeStats) {
        self.cells += o.cells;
        if o.projection_levels.iter().sum::<usize>() > self.projection_levels.iter().sum::<usize>() {
            self.projection_levels = o.projection_levels;
            self.order = o.order;
        }
        self.projection_polys += o.projection_polys;
        for v in o.vs_eliminated {
            if !self.vs_eliminated.contains(&v) {
                self.vs_eliminated.push(v);
            }
        }
        self.elapsed_ms += o.elapsed_ms;
    }
}

#[derive(Clone, Debug)]
pub struct QeConfig {
    pub max_cells: usize,
    pub max_projection: usize,
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
    pub order_mode: OrderMode,
    /// Candidate orders tried by [`OrderMode::Search`].
    pub search_budget: usize,
    /// Explicit elimination order; overrides `order_mode` within blocks.
    pub order: Option<Vec<Var>>,
    pub use_vs: bool,
}

impl Default for QeConfig {
    fn default() -> Self {
        QeConfig {
            max_cells: 50_000,
            max_projection: 1_000_000,
            deadline: None,
            cancel: None,
            order_mode: OrderMode::Heuristic,
            search_budget: 720,
            order: None,
            use_vs: true,
        }
    }
}

impl QeConfig {
    pub fn with_timeout(mut self, t: Duration) -> Self {
        self.deadline = Some(Instant::now() + t);
        self
    }
}

#[derive(Clone, Debug, Error)]
pub enum QeError {
    #[error("{kind}")]
    Resource { kind: ResourceKind, stats: QeStats },
    #[error("variable {0} does not occur linearly")]
    NotLinear(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sentence has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Cell counting and deadline/cancellation checks.
pub struct Budget {
    max_cells: usize,
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
    started: Instant,
    pub stats: QeStats,
}

impl Budget {
    pub fn new(cfg: &QeConfig) -> Budget {
        Budget {
            max_cells: cfg.max_cells,
            deadline: cfg.deadline,
            cancel: cfg.cancel.clone(),
            started: Instant::now(),
            stats: QeStats::default(),
        }
    }

    fn fail(&self, kind: ResourceKind) -> QeError {
        let mut stats = self.stats.clone();
        stats.elapsed_ms = self.elapsed_ms();
        QeError::Resource { kind, stats }
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.started.elapsed().as_secs_f64() * 1000.0
    }

    pub fn check_time(&self) -> Result<(), QeError> {
        if let Some(c) = &self.cancel {
            if c.load(AtomicOrdering::Relaxed) {
                return Err(self.fail(ResourceKind::Cancelled));
            }
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Err(self.fail(ResourceKind::Timeout));
            }
        }
        Ok(())
    }

    pub fn tick(&mut self) -> Result<(), QeError> {
        self.stats.cells += 1;
        if self.stats.cells > self.max_cells {
            return Err(self.fail(ResourceKind::Cells));
        }
        self.check_time()
    }

    fn finish(mut self) -> QeStats {
        self.stats.elapsed_ms = self.elapsed_ms();
        self.stats
    }
}

/// Exact values for the existentially quantified variables.
pub type Witness = BTreeMap<Var, RealAlgebraic>;

#[derive(Clone, Debug)]
pub struct Decision {
    pub truth: bool,
    /// Present when the sentence is purely existential and true.
    pub witness: Option<Witness>,
    pub stats: QeStats,
}

#[derive(Clone, Debug)]
pub struct OneVarResult {
    pub set: OneVarSet,
    pub stats: QeStats,
}

/// A prenex problem after substitution has removed what it can.
struct Reduced {
    blocks: Vec<(Quantifier, Vec<Var>)>,
    matrix: Formula,
    /// Eliminated variables with the matrix just before their elimination.
    steps: Vec<(Var, Formula)>,
}

fn vs_key(matrix: &Formula, v: &Var) -> (bool, usize, String) {
    let atoms = matrix.atoms();
    let has_const_eq = atoms.iter().any(|a| {
        a.relation() == crate::formula::Relation::Eq
            && a.poly().degree(v) == 1
            && a.poly().coefficient(v, 1).is_constant()
    });
    let occ = atoms.iter().filter(|a| a.poly().contains_var(v)).count();
    (!has_const_eq, occ, v.to_string())
}

fn reduce(
    mut blocks: Vec<(Quantifier, Vec<Var>)>,
    mut matrix: Formula,
    cfg: &QeConfig,
    budget: &mut Budget,
) -> Result<Reduced, QeError> {
    let mut steps = Vec::new();
    'blocks: loop {
        if !cfg.use_vs {
            break;
        }
        let Some((q, vars)) = blocks.last_mut() else { break };
        let present = matrix.free_vars();
        vars.retain(|v| present.contains(v));
        if vars.is_empty() {
            blocks.pop();
            continue;
        }
        let mut cands: Vec<Var> = vars.iter().filter(|v| is_linear_in(&matrix, v)).cloned().collect();
        cands.sort_by_cached_key(|v| vs_key(&matrix, v));
        for v in cands {
            budget.check_time()?;
            let next = match q {
                Quantifier::Exists => eliminate_linear(&v, &matrix)?,
                Quantifier::Forall => eliminate_linear_forall(&v, &matrix)?,
            };
            let before = matrix.atoms().len();
            let after = next.atoms().len();
            if after > VS_MAX_ATOMS && after > 2 * before {
                continue;
            }
            vars.retain(|w| w != &v);
            budget.stats.vs_eliminated.push(v.to_string());
            steps.push((v, std::mem::replace(&mut matrix, next)));
            continue 'blocks;
        }
        break;
    }
    let present = matrix.free_vars();
    for (_, vars) in &mut blocks {
        vars.retain(|v| present.contains(v));
    }
    blocks.retain(|(_, vs)| !vs.is_empty());
    Ok(Reduced { blocks, matrix, steps })
}

fn pick_order(matrix: &Formula, blocks: &[Vec<Var>], cfg: &QeConfig) -> VariableOrder {
    match &cfg.order {
        Some(explicit) => {
            let pos = |v: &Var| explicit.iter().position(|w| w == v).unwrap_or(usize::MAX);
            let mut out = Vec::new();
            for b in blocks {
                let mut b = order::heuristic_block(matrix, b);
                b.sort_by_key(|v| pos(v));
                out.extend(b);
            }
            VariableOrder { elimination: out }
        }
        None => order::order_blocks(matrix, blocks, cfg.order_mode, cfg.search_budget),
    }
}

/// Runs `f` under the deadline and cancel flag of `cfg`, including inside
/// long polynomial arithmetic.
fn guarded<T>(cfg: &QeConfig, f: impl FnOnce() -> Result<T, QeError>) -> Result<T, QeError> {
    let started = Instant::now();
    interrupt::with_limits(cfg.deadline, cfg.cancel.clone(), f).unwrap_or_else(|_| {
        let cancelled = cfg.cancel.as_ref().is_some_and(|c| c.load(AtomicOrdering::Relaxed));
        Err(QeError::Resource {
            kind: if cancelled { ResourceKind::Cancelled } else { ResourceKind::Timeout },
            stats: QeStats {
                elapsed_ms: started.elapsed().as_secs_f64() * 1000.0,
                ..QeStats::default()
            },
        })
    })
}

/// Decides a sentence (a formula without free variables).
pub fn decide(sentence: &Formula, cfg: &QeConfig) -> Result<Decision, QeError> {
    guarded(cfg, || decide_unguarded(sentence, cfg))
}

fn decide_unguarded(sentence: &Formula, cfg: &QeConfig) -> Result<Decision, QeError> {
    let free = sentence.free_vars();
    if !free.is_empty() {
        return Err(QeError::FreeVariables(free.iter().map(|v| v.to_string()).collect()));
    }
    let p = to_prenex(sentence)?;
    // a uniform prefix distributes over the matching connective, so each
    // part gets its own (smaller) projection
    let parts = match (p.blocks.as_slice(), simplify(&p.matrix)) {
        ([(Quantifier::Exists, _)], Formula::Or(fs)) => Some((Quantifier::Exists, fs)),
        ([(Quantifier::Forall, _)], Formula::And(fs)) => Some((Quantifier::Forall, fs)),
        _ => None,
    };
    let Some((q, parts)) = parts else {
        return decide_prenex(p, cfg);
    };
    let bound = p.bound_vars();
    let started = Instant::now();
    let mut stats = QeStats::default();
    let mut cfg = cfg.clone();
    for part in parts {
        let vars: Vec<Var> = part.free_vars().into_iter().collect();
        let d = decide_prenex(to_prenex(&Formula::Quant(q, vars, Box::new(part)))?, &cfg)?;
        cfg.max_cells = cfg.max_cells.saturating_sub(d.stats.cells);
        stats.absorb(d.stats);
        if d.truth == (q == Quantifier::Exists) {
            stats.elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
            let witness = d.witness.map(|mut w| {
                for v in &bound {
                    w.entry(v.clone()).or_insert_with(|| RealAlgebraic::Rational(crate::algebra::int(0)));
                }
                w
            });
            return Ok(Decision { truth: d.truth, witness, stats });
        }
    }
    stats.elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
    Ok(Decision {
        truth: q == Quantifier::Forall,
        witness: None,
        stats,
    })
}

fn decide_prenex(p: PrenexSentence, cfg: &QeConfig) -> Result<Decision, QeError> {
    let mut budget = Budget::new(cfg);
    let all_exists = p.blocks.iter().all(|(q, _)| *q == Quantifier::Exists);
    let bound: Vec<Var> = p.bound_vars();
    let r = reduce(p.blocks.clone(), simplify(&p.matrix), cfg, &mut budget)?;

    // substitution may expose a connective worth splitting on
    let splittable = matches!(
        (r.blocks.as_slice(), &r.matrix),
        ([(Quantifier::Exists, _)], Formula::Or(_)) | ([(Quantifier::Forall, _)], Formula::And(_))
    );
    if !r.steps.is_empty() && splittable {
        let (q, vars) = r.blocks[0].clone();
        let sub = decide_unguarded(&Formula::Quant(q, vars, Box::new(r.matrix.clone())), cfg)?;
        let vs = std::mem::take(&mut budget.stats.vs_eliminated);
        budget.stats = sub.stats;
        budget.stats.vs_eliminated.splice(0..0, vs);
        let witness = match sub.witness {
            Some(w) if all_exists => Some(back_substitute(w, &bound, &r.steps, &mut budget)?),
            _ => None,
        };
        return Ok(Decision {
            truth: sub.truth,
            witness,
            stats: budget.finish(),
        });
    }

    let elim_blocks = order::elimination_blocks(&r.blocks, &BTreeSet::new());
    let ord = pick_order(&r.matrix, &elim_blocks, cfg);
    let cad_order = ord.cad_order();
    budget.stats.order = ord.elimination.iter().map(|v| v.to_string()).collect();
    let mut quants = Vec::new();
    for v in &cad_order {
        let q = r.blocks.iter().find(|(_, vs)| vs.contains(v)).map(|(q, _)| *q);
        quants.push(q);
    }

    let proj = project(&r.matrix.polynomials(), &cad_order, cfg.max_projection, Some(&budget))?;
    budget.stats.projection_polys = proj.size();
    budget.stats.projection_levels = proj.sizes();
    let mut sample = SamplePoint::new();
    let truth = {
        let mut lifter = cad::Lifter {
            proj: &proj,
            quants: &quants,
            budget: &mut budget,
        };
        let f0 = residual(&r.matrix, &BTreeSet::new(), &sample)?;
        lifter.lift(0, &mut sample, &f0)?
    };

    let witness = if truth && all_exists {
        let w: Witness = sample.into_iter().filter(|(v, _)| cad_order.contains(v)).collect();
        Some(back_substitute(w, &bound, &r.steps, &mut budget)?)
    } else {
        None
    };
    Ok(Decision {
        truth,
        witness,
        stats: budget.finish(),
    })
}

/// Completes a witness of the reduced problem: unconstrained variables get
/// 0, substituted ones are solved for in reverse order.
fn back_substitute(
    mut w: Witness,
    bound: &[Var],
    steps: &[(Var, Formula)],
    budget: &mut Budget,
) -> Result<Witness, QeError> {
    let stepped: BTreeSet<&Var> = steps.iter().map(|(v, _)| v).collect();
    for v in bound {
        if !w.contains_key(v) && !stepped.contains(v) {
            w.insert(v.clone(), RealAlgebraic::Rational(crate::algebra::int(0)));
        }
    }
    for (v, before) in steps.iter().rev() {
        let val = cad::solve_at(before, v, &w, budget)?
            .ok_or_else(|| QeError::Unsupported(format!("no value for {v} during back-substitution")))?;
        w.insert(v.clone(), val);
    }
    Ok(w)
}

/// The set of values of `var` for which `f` holds for some values of its
/// other free variables.
pub fn qe_one_var(f: &Formula, var: &Var, cfg: &QeConfig) -> Result<OneVarResult, QeError> {
    guarded(cfg, || qe_one_var_unguarded(f, var, cfg))
}

fn qe_one_var_unguarded(f: &Formula, var: &Var, cfg: &QeConfig) -> Result<OneVarResult, QeError> {
    let mut budget = Budget::new(cfg);
    let p = to_prenex(f)?;
    let others: Vec<Var> = f.free_vars().into_iter().filter(|v| v != var).collect();
    let mut blocks = Vec::new();
    if !others.is_empty() {
        blocks.push((Quantifier::Exists, others));
    }
    for (q, vs) in p.blocks {
        match blocks.last_mut() {
            Some((lq, lvs)) if *lq == q => lvs.extend(vs),
            _ => blocks.push((q, vs)),
        }
    }
    let r = reduce(blocks, simplify(&p.matrix), cfg, &mut budget)?;
    let elim_blocks = order::elimination_blocks(&r.blocks, &BTreeSet::new());
    let ord = pick_order(&r.matrix, &elim_blocks, cfg);
    let mut cad_order = vec![var.clone()];
    cad_order.extend(ord.cad_order());
    budget.stats.order = ord
        .elimination
        .iter()
        .chain(std::iter::once(var))
        .map(|v| v.to_string())
        .collect();
    let quants: Vec<Option<Quantifier>> = cad_order
        .iter()
        .map(|v| r.blocks.iter().find(|(_, vs)| vs.contains(v)).map(|(q, _)| *q))
        .collect();
    let proj = project(&r.matrix.polynomials(), &cad_order, cfg.max_projection, Some(&budget))?;
    budget.stats.projection_polys = proj.size();
    budget.stats.projection_levels = proj.sizes();
    let (roots, truth) = {
        let mut lifter = cad::Lifter {
            proj: &proj,
            quants: &quants,
            budget: &mut budget,
        };
        lifter.lift_free(&r.matrix)?
    };
    Ok(OneVarResult {
        set: OneVarSet::new(var.clone(), roots, truth),
        stats: budget.finish(),
    })
}

/// Whether `f` and `g` define the same subset of the line in `var`.
pub fn equivalent_in(f: &Formula, g: &Formula, var: &Var, cfg: &QeConfig) -> Result<bool, QeError> {
    let a = qe_one_var(f, var, cfg)?.set;
    let b = qe_one_var(g, var, cfg)?.set;
    Ok(a.same_set(&b))
}
