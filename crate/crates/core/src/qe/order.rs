//! Variable ordering for projection.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cad::project;
use crate::algebra::Var;
use crate::formula::{to_prenex, Formula, FormulaError, Quantifier};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderMode {
    #[default]
    Heuristic,
    Search,
}

impl std::str::FromStr for OrderMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heuristic" => Ok(OrderMode::Heuristic),
            "search" => Ok(OrderMode::Search),
            _ => Err(format!("unknown order mode '{s}' (expected heuristic or search)")),
        }
    }
}

/// An elimination order: `elimination[0]` is projected away first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableOrder {
    pub elimination: Vec<Var>,
}

impl VariableOrder {
    /// The CAD order (lowest level first).
    pub fn cad_order(&self) -> Vec<Var> {
        self.elimination.iter().rev().cloned().collect()
    }
}

/// Heuristic key: (max degree, number of atoms containing it, name).
fn key(matrix: &Formula, v: &Var) -> (u32, usize, String) {
    let atoms = matrix.atoms();
    let deg = atoms.iter().map(|a| a.poly().degree(v)).max().unwrap_or(0);
    let occ = atoms.iter().filter(|a| a.poly().contains_var(v)).count();
    (deg, occ, v.to_string())
}

pub(crate) fn heuristic_block(matrix: &Formula, vars: &[Var]) -> Vec<Var> {
    let mut vs = vars.to_vec();
    vs.sort_by_cached_key(|v| key(matrix, v));
    vs
}

/// Blocks are innermost first; free variables form the last block.
pub(crate) fn elimination_blocks(blocks: &[(Quantifier, Vec<Var>)], free: &BTreeSet<Var>) -> Vec<Vec<Var>> {
    let mut out: Vec<Vec<Var>> = blocks.iter().rev().map(|(_, vs)| vs.clone()).collect();
    if !free.is_empty() {
        out.push(free.iter().cloned().collect());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Orders within each block by the heuristic, or by searching block
/// permutations (at most `budget` candidates) for the smallest projection.
pub(crate) fn order_blocks(matrix: &Formula, blocks: &[Vec<Var>], mode: OrderMode, budget: usize) -> VariableOrder {
    let base: Vec<Vec<Var>> = blocks.iter().map(|b| heuristic_block(matrix, b)).collect();
    let flat = |bs: &[Vec<Var>]| VariableOrder {
        elimination: bs.iter().flatten().cloned().collect(),
    };
    if mode == OrderMode::Heuristic {
        return flat(&base);
    }
    let polys = matrix.polynomials();
    let score = |o: &VariableOrder| -> Option<(usize, u64)> {
        project(&polys, &o.cad_order(), 20_000, None)
            .ok()
            .map(|p| (p.size(), p.total_degree()))
    };
    let mut best = flat(&base);
    let mut best_score = score(&best);
    let mut perms: Vec<Vec<usize>> = base.iter().map(|b| (0..b.len()).collect()).collect();
    let mut tried = 1;
    'outer: loop {
        // odometer over per-block permutations, last block fastest
        let mut i = perms.len();
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            if next_permutation(&mut perms[i]) {
                break;
            }
            perms[i].sort_unstable();
        }
        if tried >= budget {
            break;
        }
        tried += 1;
        let cand: Vec<Vec<Var>> = base
            .iter()
            .zip(&perms)
            .map(|(b, p)| p.iter().map(|&k| b[k].clone()).collect())
            .collect();
        let cand = flat(&cand);
        let s = score(&cand);
        let better = match (&s, &best_score) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        if better {
            best = cand;
            best_score = s;
        }
    }
    best
}

/// The elimination order used for `f`: bound variables innermost block
/// first, then free variables.
pub fn choose_order(f: &Formula, mode: OrderMode) -> Result<VariableOrder, FormulaError> {
    let p = to_prenex(f)?;
    let free = f.free_vars();
    let blocks = elimination_blocks(&p.blocks, &free);
    Ok(order_blocks(&p.matrix, &blocks, mode, 720))
}
