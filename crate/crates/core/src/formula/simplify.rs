use num_traits::Signed;

use super::{Atom, Formula, Relation};
use crate::algebra::Polynomial;

/// Constant folding, flattening, duplicate removal, and merging of atoms
/// over the same polynomial inside one conjunction or disjunction.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => fold_definite(a),
        Formula::Not(g) => match simplify(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a) => Formula::Atom(a.negated()),
            Formula::Not(h) => *h,
            h => Formula::not(h),
        },
        Formula::And(fs) => merge(fs.iter().map(simplify).collect(), true),
        Formula::Or(fs) => merge(fs.iter().map(simplify).collect(), false),
        Formula::Implies(a, b) => {
            let a = simplify(a);
            let b = simplify(b);
            match (&a, &b) {
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (Formula::True, _) => b,
                (_, Formula::False) => simplify(&Formula::not(a)),
                _ if a == b => Formula::True,
                _ => Formula::implies(a, b),
            }
        }
        Formula::Quant(q, vs, body) => {
            let body = simplify(body);
            let free = body.free_vars();
            let vs: Vec<_> = vs.iter().filter(|v| free.contains(v)).cloned().collect();
            if vs.is_empty() {
                body
            } else {
                Formula::Quant(*q, vs, Box::new(body))
            }
        }
    }
}

/// Signs a polynomial can take when it is a sum of even power products
/// with coefficients of one sign, e.g. `x^2 + 3*y^4 + 1`.
fn definite_signs(a: &Atom) -> Option<&'static [i32]> {
    let mut sign = 0;
    let mut constant = false;
    for (m, c) in a.poly().terms() {
        if m.factors().iter().any(|(_, e)| e % 2 == 1) {
            return None;
        }
        let s = if c.is_positive() { 1 } else { -1 };
        if sign != 0 && s != sign {
            return None;
        }
        sign = s;
        constant |= m.is_one();
    }
    Some(match (sign, constant) {
        (1, true) => &[1],
        (1, false) => &[0, 1],
        (_, true) => &[-1],
        _ => &[-1, 0],
    })
}

fn fold_definite(a: &Atom) -> Formula {
    let Some(signs) = definite_signs(a) else {
        return Formula::Atom(a.clone());
    };
    let holds: Vec<bool> = signs.iter().map(|&s| a.relation().holds(s)).collect();
    if holds.iter().all(|&h| h) {
        Formula::True
    } else if holds.iter().all(|&h| !h) {
        Formula::False
    } else if signs.contains(&0) {
        zero_set(a, !a.relation().holds(0))
    } else {
        Formula::Atom(a.clone())
    }
}

/// A semidefinite sum of pure powers vanishes iff each base does:
/// `x^2 + 3*y^4 <= 0` becomes `x == 0 && y == 0`. With `nonzero` the
/// complement is returned.
fn zero_set(a: &Atom, nonzero: bool) -> Formula {
    let mut vars = Vec::new();
    for (m, _) in a.poly().terms() {
        match m.factors() {
            [(v, _)] => vars.push(v.clone()),
            _ => return Formula::Atom(a.clone()),
        }
    }
    let rel = if nonzero { Relation::Ne } else { Relation::Eq };
    let atoms = vars.into_iter().map(|v| Formula::atom(Polynomial::var(v), rel));
    if nonzero {
        Formula::or(atoms)
    } else {
        Formula::and(atoms)
    }
}

fn merge(parts: Vec<Formula>, conj: bool) -> Formula {
    let flat = if conj {
        Formula::and(parts)
    } else {
        Formula::or(parts)
    };
    let items = match flat {
        Formula::And(v) if conj => v,
        Formula::Or(v) if !conj => v,
        other => return other,
    };
    // slot per distinct polynomial: (position, sign mask)
    let mut masks: Vec<(usize, u8)> = Vec::new();
    let mut out: Vec<Option<Formula>> = Vec::new();
    for item in items {
        if let Formula::Atom(a) = &item {
            let found = masks.iter_mut().find(|(i, _)| match &out[*i] {
                Some(Formula::Atom(b)) => b.poly() == a.poly(),
                _ => false,
            });
            if let Some((_, m)) = found {
                *m = if conj { *m & a.relation().mask() } else { *m | a.relation().mask() };
                continue;
            }
            masks.push((out.len(), a.relation().mask()));
            out.push(Some(item));
        } else if !out.iter().any(|o| o.as_ref() == Some(&item)) {
            out.push(Some(item));
        }
    }
    for (i, m) in masks {
        let Some(Formula::Atom(a)) = &out[i] else { unreachable!() };
        out[i] = Some(match Relation::from_mask(m) {
            Some(r) => Formula::Atom(Atom::build(a.poly().clone(), r).as_atom().clone()),
            None if m == 0 => Formula::False,
            None => Formula::True,
        });
    }
    let rest = out.into_iter().flatten();
    if conj {
        Formula::and(rest)
    } else {
        Formula::or(rest)
    }
}

impl Formula {
    fn as_atom(&self) -> &Atom {
        match self {
            Formula::Atom(a) => a,
            _ => panic!("expected an atom"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn atom(p: &str, r: Relation) -> Formula {
        Formula::atom(parse_poly(p), r)
    }

    #[test]
    fn sign_definite_atoms_fold() {
        assert_eq!(simplify(&atom("x^2 + y^4", Relation::Lt)), Formula::False);
        assert_eq!(simplify(&atom("x^2 + 1", Relation::Ne)), Formula::True);
        assert_eq!(simplify(&atom("-x^2*y^2 - 2", Relation::Ge)), Formula::False);
        assert_eq!(simplify(&atom("x^2 + 2*y^4", Relation::Le)).to_string(), "x == 0 && y == 0");
        assert_eq!(simplify(&atom("x^2", Relation::Gt)).to_string(), "x != 0");
        let kept = atom("x^2*y^2 + z^2", Relation::Le);
        assert_eq!(simplify(&kept), kept);
        let odd = atom("x^2 + y", Relation::Lt);
        assert_eq!(simplify(&odd), odd);
    }

    #[test]
    fn complementary_atoms_fold() {
        let f = Formula::and([atom("x", Relation::Lt), atom("x", Relation::Ge)]);
        assert_eq!(simplify(&f), Formula::False);
        let g = Formula::or([atom("x", Relation::Lt), atom("x", Relation::Ge)]);
        assert_eq!(simplify(&g), Formula::True);
    }

    #[test]
    fn same_polynomial_merges() {
        let f = Formula::and([
            atom("x", Relation::Le),
            atom("y", Relation::Gt),
            atom("x", Relation::Ne),
        ]);
        assert_eq!(simplify(&f).to_string(), "x < 0 && y > 0");
        let g = Formula::or([atom("x", Relation::Gt), atom("x", Relation::Eq)]);
        assert_eq!(simplify(&g).to_string(), "x >= 0");
    }

    #[test]
    fn unused_quantified_variables_drop() {
        let f = Formula::exists(vec![crate::algebra::Var::new("z")], atom("x", Relation::Gt));
        assert_eq!(simplify(&f), atom("x", Relation::Gt));
    }
}
