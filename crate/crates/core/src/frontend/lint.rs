use std::collections::{BTreeMap, BTreeSet};

use super::ast::SFormula;
use super::{AssumeStmt, Code, Lint, Span, Theory};

fn occurrences<'a>(th: &'a Theory, f: &'a SFormula, out: &mut Vec<(&'a str, Span)>, refs: &mut BTreeSet<&'a str>) {
    match f {
        SFormula::Rel { lhs, rhs, .. } => {
            lhs.identifiers(out);
            rhs.identifiers(out);
        }
        SFormula::Ref(name, _) => {
            refs.insert(name);
            if let Some(d) = th.definition(name) {
                occurrences(th, &d.formula, out, refs);
            }
        }
        SFormula::Not(g) => occurrences(th, g, out, refs),
        SFormula::And(fs) | SFormula::Or(fs) => fs.iter().for_each(|g| occurrences(th, g, out, refs)),
        SFormula::Implies(a, b) => {
            occurrences(th, a, out, refs);
            occurrences(th, b, out, refs);
        }
    }
}

/// W1 for variables occurring exactly once across the assumptions and the
/// hypothesis (definitions inlined); W3 for definitions never referenced.
pub fn lint(th: &Theory) -> Vec<Lint> {
    let mut occ = Vec::new();
    let mut refs = BTreeSet::new();
    for a in &th.assumptions {
        match a {
            AssumeStmt::Formula(f) => occurrences(th, f, &mut occ, &mut refs),
            AssumeStmt::Total { name, .. } => {
                refs.insert(name.as_str());
                if let Some(d) = th.definition(name) {
                    occurrences(th, &d.formula, &mut occ, &mut refs);
                }
            }
        }
    }
    if let Some(h) = &th.hypothesis {
        occurrences(th, h, &mut occ, &mut refs);
    }
    // references made only from inside other definitions still count as uses
    for d in &th.definitions {
        let mut sink = Vec::new();
        occurrences(th, &d.formula, &mut sink, &mut refs);
    }
    let mut counts: BTreeMap<&str, (usize, Span)> = BTreeMap::new();
    for (name, span) in occ {
        counts.entry(name).or_insert((0, span)).0 += 1;
    }
    let mut out: Vec<Lint> = counts
        .into_iter()
        .filter(|(_, (n, _))| *n == 1)
        .map(|(name, (_, span))| {
            Lint::new(
                Code::W1,
                format!("variable {name} appears only once; possible typo"),
                span,
            )
        })
        .collect();
    for d in &th.definitions {
        if !refs.contains(d.name.as_str()) {
            out.push(Lint::new(
                Code::W3,
                format!("definition {} is never used", d.name),
                d.span,
            ));
        }
    }
    out.sort_by_key(|l| l.span.start);
    out
}
