//! Linear virtual substitution (Loos–Weispfenning test points).

use super::QeError;
use crate::algebra::{Polynomial, Var};
use crate::formula::{negate, nnf, simplify, Atom, Formula, Relation};

/// Coefficients `(a, b)` of an atom polynomial `a·x + b`.
fn split(p: &Polynomial, x: &Var) -> (Polynomial, Polynomial) {
    (p.coefficient(x, 1), p.coefficient(x, 0))
}

fn atom(p: Polynomial, r: Relation) -> Formula {
    Formula::atom(p, r)
}

/// `true` when every atom of `f` has degree at most one in `x`.
pub fn is_linear_in(f: &Formula, x: &Var) -> bool {
    f.atoms().iter().all(|a| a.poly().degree(x) <= 1)
}

/// `(c·x + d σ 0)` with `x := -b/a`, given `a != 0`.
fn at_root(c: &Polynomial, d: &Polynomial, rel: Relation, a: &Polynomial, b: &Polynomial) -> Formula {
    // c·(-b/a) + d = (d·a - c·b)/a
    let num = &(d * a) - &(c * b);
    match rel {
        Relation::Eq | Relation::Ne => atom(num, rel),
        _ => atom(&num * a, rel),
    }
}

/// `(c·x + d σ 0)` at `x := -b/a + ε`, given `a != 0`.
fn at_root_eps(c: &Polynomial, d: &Polynomial, rel: Relation, a: &Polynomial, b: &Polynomial) -> Formula {
    let f = |r: Relation| at_root(c, d, r, a, b);
    let cs = |r: Relation| atom(c.clone(), r);
    match rel {
        Relation::Lt => Formula::or([f(Relation::Lt), Formula::and([f(Relation::Eq), cs(Relation::Lt)])]),
        Relation::Gt => Formula::or([f(Relation::Gt), Formula::and([f(Relation::Eq), cs(Relation::Gt)])]),
        Relation::Le => Formula::or([f(Relation::Lt), Formula::and([f(Relation::Eq), cs(Relation::Le)])]),
        Relation::Ge => Formula::or([f(Relation::Gt), Formula::and([f(Relation::Eq), cs(Relation::Ge)])]),
        Relation::Eq => Formula::and([f(Relation::Eq), cs(Relation::Eq)]),
        Relation::Ne => Formula::or([f(Relation::Ne), cs(Relation::Ne)]),
    }
}

/// `(c·x + d σ 0)` as `x → −∞`.
fn at_minus_infinity(c: &Polynomial, d: &Polynomial, rel: Relation) -> Formula {
    let cs = |r: Relation| atom(c.clone(), r);
    let ds = |r: Relation| atom(d.clone(), r);
    match rel {
        Relation::Lt => Formula::or([cs(Relation::Gt), Formula::and([cs(Relation::Eq), ds(Relation::Lt)])]),
        Relation::Gt => Formula::or([cs(Relation::Lt), Formula::and([cs(Relation::Eq), ds(Relation::Gt)])]),
        Relation::Le => Formula::or([cs(Relation::Gt), Formula::and([cs(Relation::Eq), ds(Relation::Le)])]),
        Relation::Ge => Formula::or([cs(Relation::Lt), Formula::and([cs(Relation::Eq), ds(Relation::Ge)])]),
        Relation::Eq => Formula::and([cs(Relation::Eq), ds(Relation::Eq)]),
        Relation::Ne => Formula::or([cs(Relation::Ne), ds(Relation::Ne)]),
    }
}

fn substitute_with(f: &Formula, x: &Var, mut g: impl FnMut(&Polynomial, &Polynomial, Relation) -> Formula) -> Formula {
    f.map_atoms(&mut |a: &Atom| {
        if a.poly().contains_var(x) {
            let (c, d) = split(a.poly(), x);
            g(&c, &d, a.relation())
        } else {
            Formula::Atom(a.clone())
        }
    })
}

/// `f[x := -b/a]` assuming `a != 0`.
pub(crate) fn substitute_root(f: &Formula, x: &Var, a: &Polynomial, b: &Polynomial) -> Formula {
    substitute_with(f, x, |c, d, r| at_root(c, d, r, a, b))
}

/// `∃x f` for quantifier-free `f` in which `x` occurs at most linearly.
pub fn eliminate_linear(x: &Var, f: &Formula) -> Result<Formula, QeError> {
    if !f.is_quantifier_free() {
        return Err(QeError::Unsupported("eliminate_linear expects a quantifier-free formula".into()));
    }
    if !is_linear_in(f, x) {
        return Err(QeError::NotLinear(x.to_string()));
    }
    let f = simplify(&nnf(f, false));
    Ok(simplify(&eliminate(x, &f)))
}

fn eliminate(x: &Var, f: &Formula) -> Formula {
    if !f.free_vars().contains(x) {
        return f.clone();
    }
    // Gaussian shortcut on a top-level equation, constant coefficients first.
    let parts: &[Formula] = match f {
        Formula::And(parts) => parts,
        Formula::Atom(_) => std::slice::from_ref(f),
        _ => &[],
    };
    let eqs: Vec<usize> = (0..parts.len())
        .filter(|&i| matches!(&parts[i], Formula::Atom(a) if a.relation() == Relation::Eq && a.poly().contains_var(x)))
        .collect();
    let pick = eqs
        .iter()
        .copied()
        .find(|&i| split(atom_of(&parts[i]).poly(), x).0.is_constant())
        .or_else(|| eqs.first().copied());
    if let Some(i) = pick {
        let (a, b) = split(atom_of(&parts[i]).poly(), x);
        let rest = Formula::and(parts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()));
        let solved = Formula::and([atom(a.clone(), Relation::Ne), substitute_root(&rest, x, &a, &b)]);
        if a.is_constant() {
            return simplify(&solved);
        }
        let degenerate = Formula::and([
            atom(a.clone(), Relation::Eq),
            atom(b.clone(), Relation::Eq),
            eliminate(x, &simplify(&rest)),
        ]);
        return simplify(&Formula::or([solved, degenerate]));
    }
    let mut cases = vec![substitute_with(f, x, at_minus_infinity)];
    let mut seen: Vec<(Polynomial, bool)> = Vec::new();
    for a in f.atoms() {
        if !a.poly().contains_var(x) {
            continue;
        }
        let (ca, cb) = split(a.poly(), x);
        let strict = a.relation().is_strict();
        if seen.iter().any(|(p, s)| p == a.poly() && *s == strict) {
            continue;
        }
        seen.push((a.poly().clone(), strict));
        let body = if strict {
            substitute_with(f, x, |c, d, r| at_root_eps(c, d, r, &ca, &cb))
        } else {
            substitute_with(f, x, |c, d, r| at_root(c, d, r, &ca, &cb))
        };
        cases.push(Formula::and([atom(ca, Relation::Ne), body]));
    }
    Formula::or(cases.into_iter().map(|c| simplify(&c)))
}

fn atom_of(f: &Formula) -> &Atom {
    match f {
        Formula::Atom(a) => a,
        _ => unreachable!("filtered to atoms"),
    }
}

/// `∀x f` through `¬∃x ¬f`.
pub fn eliminate_linear_forall(x: &Var, f: &Formula) -> Result<Formula, QeError> {
    Ok(simplify(&negate(&eliminate_linear(x, &negate(f))?)))
}
