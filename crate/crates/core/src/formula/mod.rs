//! Tarski formulas: polynomial sign conditions under boolean connectives
//! and quantifier blocks.

mod prenex;
mod simplify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::algebra::{eval_sign, fmt_rational, sign_of, AlgebraError, Polynomial, Rational, SamplePoint, Var};

pub use prenex::{to_prenex, PrenexSentence};
pub use simplify::simplify;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable {0} is both free and bound, or bound twice")]
    Capture(String),
    #[error("variable {0} is bound in the formula")]
    BoundVariable(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Comparison of a polynomial against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    const NEG: u8 = 1;
    const ZERO: u8 = 2;
    const POS: u8 = 4;

    /// The signs admitted by the relation, as a bit set.
    pub fn mask(self) -> u8 {
        match self {
            Relation::Lt => Self::NEG,
            Relation::Eq => Self::ZERO,
            Relation::Gt => Self::POS,
            Relation::Le => Self::NEG | Self::ZERO,
            Relation::Ge => Self::ZERO | Self::POS,
            Relation::Ne => Self::NEG | Self::POS,
        }
    }

    /// Inverse of [`Relation::mask`]; `None` for the empty and full sets.
    pub fn from_mask(m: u8) -> Option<Relation> {
        Some(match m {
            1 => Relation::Lt,
            2 => Relation::Eq,
            4 => Relation::Gt,
            3 => Relation::Le,
            6 => Relation::Ge,
            5 => Relation::Ne,
            _ => return None,
        })
    }

    pub fn holds(self, sign: i32) -> bool {
        let bit = match sign.signum() {
            -1 => Self::NEG,
            0 => Self::ZERO,
            _ => Self::POS,
        };
        self.mask() & bit != 0
    }

    pub fn negate(self) -> Relation {
        Relation::from_mask(7 & !self.mask()).expect("complement of a proper relation")
    }

    /// The relation after multiplying both sides by −1.
    pub fn flip(self) -> Relation {
        match self {
            Relation::Lt => Relation::Gt,
            Relation::Gt => Relation::Lt,
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            r => r,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt | Relation::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

/// `poly rel 0` with `poly` primitive over the integers and positively led.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    poly: Polynomial,
    rel: Relation,
}

impl Atom {
    /// Normalizes `poly rel 0`; constants fold to `True`/`False`.
    pub fn build(poly: Polynomial, rel: Relation) -> Formula {
        if let Some(c) = poly.constant_value() {
            return Formula::constant(rel.holds(sign_of(&c)));
        }
        let (content, prim) = poly.primitive();
        let rel = if content.is_negative() { rel.flip() } else { rel };
        Formula::Atom(Atom { poly: prim, rel })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn relation(&self) -> Relation {
        self.rel
    }

    pub fn negated(&self) -> Atom {
        Atom {
            poly: self.poly.clone(),
            rel: self.rel.negate(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.poly.constant_term();
        if c.is_zero() {
            write!(f, "{} {} 0", self.poly, self.rel.symbol())
        } else {
            let lhs = &self.poly - &Polynomial::constant(c.clone());
            write!(f, "{} {} {}", lhs, self.rel.symbol(), fmt_rational(&-c))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Vec<Var>, Box<Formula>),
}

/// `lhs rel rhs`, normalized to `(lhs - rhs) rel 0`.
pub fn normalize_atom(lhs: &Polynomial, rel: Relation, rhs: &Polynomial) -> Formula {
    Atom::build(lhs - rhs, rel)
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn constant(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn atom(poly: Polynomial, rel: Relation) -> Formula {
        Atom::build(poly, rel)
    }

    /// Conjunction with flattening and constant folding.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().expect("one element"),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with flattening and constant folding.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().expect("one element"),
            _ => Formula::Or(out),
        }
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: Vec<Var>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Quant(Quantifier::Exists, vars, Box::new(body))
        }
    }

    pub fn forall(vars: Vec<Var>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Quant(Quantifier::Forall, vars, Box::new(body))
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Quant(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                for v in a.poly.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Every variable bound by some quantifier, with repetitions.
    pub fn bound_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Quant(_, vs, _) = f {
                out.extend(vs.iter().cloned());
            }
        });
        out
    }

    fn visit(&self, cb: &mut impl FnMut(&Formula)) {
        cb(self);
        match self {
            Formula::Not(f) | Formula::Quant(_, _, f) => f.visit(cb),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit(cb)),
            Formula::Implies(a, b) => {
                a.visit(cb);
                b.visit(cb);
            }
            _ => {}
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            match f {
                Formula::Atom(a) => out.push(a),
                Formula::Not(f) | Formula::Quant(_, _, f) => go(f, out),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| go(f, out)),
                Formula::Implies(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// Distinct atom polynomials.
    pub fn polynomials(&self) -> Vec<Polynomial> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in self.atoms() {
            if seen.insert(a.poly.to_string()) {
                out.push(a.poly.clone());
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Applies `f` to every atom, rebuilding with the smart constructors.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Formula) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => f(a),
            Formula::Not(g) => match g.map_atoms(f) {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                h => Formula::not(h),
            },
            Formula::And(fs) => Formula::and(fs.iter().map(|g| g.map_atoms(f))),
            Formula::Or(fs) => Formula::or(fs.iter().map(|g| g.map_atoms(f))),
            Formula::Implies(a, b) => {
                let a = a.map_atoms(f);
                let b = b.map_atoms(f);
                match (&a, &b) {
                    (Formula::False, _) | (_, Formula::True) => Formula::True,
                    (Formula::True, _) => b,
                    _ => Formula::implies(a, b),
                }
            }
            Formula::Quant(q, vs, body) => match body.map_atoms(f) {
                c @ (Formula::True | Formula::False) => c,
                b => Formula::Quant(*q, vs.clone(), Box::new(b)),
            },
        }
    }

    /// Replaces the free variable `var` by `value`, refolding constants.
    pub fn substitute(&self, var: &Var, value: &Rational) -> Result<Formula, FormulaError> {
        if self.bound_vars().contains(var) {
            return Err(FormulaError::BoundVariable(var.to_string()));
        }
        Ok(self.map_atoms(&mut |a| Atom::build(a.poly.substitute(var, value), a.rel)))
    }

    /// Replaces free variables by polynomials.
    pub fn compose(&self, map: &BTreeMap<Var, Polynomial>) -> Formula {
        self.map_atoms(&mut |a| {
            let mut p = a.poly.clone();
            for (v, q) in map {
                p = p.compose(v, q);
            }
            Atom::build(p, a.rel)
        })
    }

    /// Truth value of a quantifier-free formula at an exact point.
    pub fn eval_at(&self, point: &SamplePoint) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.rel.holds(eval_sign(&a.poly, point)?),
            Formula::Not(f) => !f.eval_at(point)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval_at(point)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval_at(point)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !a.eval_at(point)? || b.eval_at(point)?,
            Formula::Quant(..) => {
                panic!("eval_at expects a quantifier-free formula")
            }
        })
    }

    /// Truth value of a quantifier-free formula at a rational point.
    pub fn eval_rational(&self, point: &BTreeMap<Var, Rational>) -> Result<bool, FormulaError> {
        let sp: SamplePoint = point
            .iter()
            .map(|(v, q)| (v.clone(), crate::algebra::RealAlgebraic::Rational(q.clone())))
            .collect();
        self.eval_at(&sp)
    }
}

/// Negation in negation normal form: `¬` pushed onto atoms (flipping their
/// relation), quantifiers dualized, implications eliminated.
pub fn negate(f: &Formula) -> Formula {
    nnf(f, true)
}

/// Negation normal form without implications.
pub fn nnf(f: &Formula, negated: bool) -> Formula {
    match f {
        Formula::True => Formula::constant(!negated),
        Formula::False => Formula::constant(negated),
        Formula::Atom(a) => {
            if negated {
                Formula::Atom(a.negated())
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => nnf(g, !negated),
        Formula::And(fs) => {
            let parts = fs.iter().map(|g| nnf(g, negated));
            if negated {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Or(fs) => {
            let parts = fs.iter().map(|g| nnf(g, negated));
            if negated {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Implies(a, b) => {
            if negated {
                Formula::and([nnf(a, false), nnf(b, true)])
            } else {
                Formula::or([nnf(a, true), nnf(b, false)])
            }
        }
        Formula::Quant(q, vs, body) => {
            let q = if negated { q.dual() } else { *q };
            match nnf(body, negated) {
                c @ (Formula::True | Formula::False) => c,
                b => Formula::Quant(q, vs.clone(), Box::new(b)),
            }
        }
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, parts: &[Formula], sep: &str) -> fmt::Result {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        match p {
            Formula::And(_) | Formula::Or(_) | Formula::Implies(..) | Formula::Quant(..) => {
                write!(f, "({p})")?
            }
            _ => write!(f, "{p}")?,
        }
    }
    Ok(())
}

/// Surface syntax: `x > 0 && (y == 1 || !(z <= 2))`.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("True"),
            Formula::False => f.write_str("False"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "!({g})"),
            Formula::And(fs) => write_joined(f, fs, " && "),
            Formula::Or(fs) => write_joined(f, fs, " || "),
            Formula::Implies(a, b) => {
                write_joined(f, std::slice::from_ref(a), "")?;
                f.write_str(" ==> ")?;
                write_joined(f, std::slice::from_ref(b), "")
            }
            Formula::Quant(q, vs, body) => {
                let kw = match q {
                    Quantifier::Exists => "exists",
                    Quantifier::Forall => "forall",
                };
                let names: Vec<String> = vs.iter().map(ToString::to_string).collect();
                write!(f, "{kw} {}. ({body})", names.join(", "))
            }
        }
    }
}
