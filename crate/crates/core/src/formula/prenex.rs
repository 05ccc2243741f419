use std::collections::BTreeSet;

use super::{nnf, Formula, FormulaError, Quantifier};
use crate::algebra::Var;

/// Quantifier blocks (outermost first) over a quantifier-free matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrenexSentence {
    pub blocks: Vec<(Quantifier, Vec<Var>)>,
    pub matrix: Formula,
}

impl PrenexSentence {
    pub fn to_formula(&self) -> Formula {
        self.blocks
            .iter()
            .rev()
            .fold(self.matrix.clone(), |acc, (q, vs)| match q {
                Quantifier::Exists => Formula::exists(vs.clone(), acc),
                Quantifier::Forall => Formula::forall(vs.clone(), acc),
            })
    }

    pub fn bound_vars(&self) -> Vec<Var> {
        self.blocks.iter().flat_map(|(_, vs)| vs.iter().cloned()).collect()
    }
}

/// Prenex normal form. Requires every bound variable to be bound once and
/// never to occur free, so quantifiers can move outward without renaming.
pub fn to_prenex(f: &Formula) -> Result<PrenexSentence, FormulaError> {
    let free = f.free_vars();
    let mut seen = BTreeSet::new();
    for v in f.bound_vars() {
        if free.contains(&v) || !seen.insert(v.clone()) {
            return Err(FormulaError::Capture(v.to_string()));
        }
    }
    let mut blocks: Vec<(Quantifier, Vec<Var>)> = Vec::new();
    let matrix = pull(&nnf(f, false), &mut blocks);
    let mut merged: Vec<(Quantifier, Vec<Var>)> = Vec::new();
    for (q, vs) in blocks {
        match merged.last_mut() {
            Some((lq, lvs)) if *lq == q => lvs.extend(vs),
            _ => merged.push((q, vs)),
        }
    }
    Ok(PrenexSentence {
        blocks: merged,
        matrix,
    })
}

fn pull(f: &Formula, blocks: &mut Vec<(Quantifier, Vec<Var>)>) -> Formula {
    match f {
        Formula::Quant(q, vs, body) => {
            blocks.push((*q, vs.clone()));
            pull(body, blocks)
        }
        Formula::And(fs) => Formula::and(fs.iter().map(|g| pull(g, blocks)).collect::<Vec<_>>()),
        Formula::Or(fs) => Formula::or(fs.iter().map(|g| pull(g, blocks)).collect::<Vec<_>>()),
        other => other.clone(),
    }
}
