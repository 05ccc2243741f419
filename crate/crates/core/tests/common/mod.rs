//! Random formula generators with an independent fixed-width evaluator.
#![allow(dead_code)]

pub mod sturm;

use econreason::algebra::{Polynomial, Rational, Var};
use econreason::formula::{Formula, Relation};
use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;

pub type Q = Ratio<i128>;

pub const NAMES: [&str; 3] = ["x", "y", "z"];

pub fn var(i: usize) -> Var {
    Var::new(NAMES[i])
}

#[derive(Clone, Debug)]
pub struct TPoly(pub Vec<(i64, [u32; 3])>);

#[derive(Clone, Debug)]
pub enum TF {
    Atom(TPoly, Relation),
    And(Vec<TF>),
    Or(Vec<TF>),
    Not(Box<TF>),
}

pub const RELATIONS: [Relation; 6] = [
    Relation::Lt,
    Relation::Le,
    Relation::Eq,
    Relation::Ne,
    Relation::Ge,
    Relation::Gt,
];

fn exps(nvars: usize, max_deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=max_deg {
        for b in 0..=max_deg {
            for c in 0..=max_deg {
                let e = [a, b, c];
                if a + b + c <= max_deg && e[nvars..].iter().all(|&k| k == 0) {
                    out.push(e);
                }
            }
        }
    }
    out
}

pub fn poly_strategy(nvars: usize, max_deg: u32) -> impl Strategy<Value = TPoly> {
    let es = exps(nvars, max_deg);
    prop::collection::vec((-5i64..=5, prop::sample::select(es)), 1..=4).prop_map(TPoly)
}

pub fn atom_strategy(nvars: usize, max_deg: u32) -> impl Strategy<Value = TF> {
    (poly_strategy(nvars, max_deg), prop::sample::select(RELATIONS.to_vec())).prop_map(|(p, r)| TF::Atom(p, r))
}

pub fn formula_strategy(nvars: usize, max_deg: u32) -> impl Strategy<Value = TF> {
    atom_strategy(nvars, max_deg).prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..=3).prop_map(TF::And),
            prop::collection::vec(inner.clone(), 1..=3).prop_map(TF::Or),
            inner.prop_map(|f| TF::Not(Box::new(f))),
        ]
    })
}

impl TPoly {
    pub fn to_poly(&self) -> Polynomial {
        let mut p = Polynomial::zero();
        for (c, e) in &self.0 {
            let mut m = Polynomial::from_int(*c);
            for (i, k) in e.iter().enumerate() {
                m = &m * &Polynomial::var(var(i)).pow(*k);
            }
            p = &p + &m;
        }
        p
    }

    pub fn eval(&self, pt: &[Q; 3]) -> Q {
        let mut s = Q::from_integer(0);
        for (c, e) in &self.0 {
            let mut m = Q::from_integer(*c as i128);
            for (i, k) in e.iter().enumerate() {
                for _ in 0..*k {
                    m *= pt[i];
                }
            }
            s += m;
        }
        s
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.0.iter().filter(|(c, _)| *c != 0).map(|(_, e)| e[i]).max().unwrap_or(0)
    }
}

pub fn holds(r: Relation, v: Q) -> bool {
    let zero = Q::from_integer(0);
    match r {
        Relation::Lt => v < zero,
        Relation::Le => v <= zero,
        Relation::Eq => v == zero,
        Relation::Ne => v != zero,
        Relation::Ge => v >= zero,
        Relation::Gt => v > zero,
    }
}

impl TF {
    pub fn to_formula(&self) -> Formula {
        match self {
            TF::Atom(p, r) => Formula::atom(p.to_poly(), *r),
            TF::And(fs) => Formula::and(fs.iter().map(TF::to_formula)),
            TF::Or(fs) => Formula::or(fs.iter().map(TF::to_formula)),
            TF::Not(f) => Formula::not(f.to_formula()),
        }
    }

    pub fn eval(&self, pt: &[Q; 3]) -> bool {
        match self {
            TF::Atom(p, r) => holds(*r, p.eval(pt)),
            TF::And(fs) => fs.iter().all(|f| f.eval(pt)),
            TF::Or(fs) => fs.iter().any(|f| f.eval(pt)),
            TF::Not(f) => !f.eval(pt),
        }
    }

    pub fn atoms(&self) -> Vec<&TPoly> {
        match self {
            TF::Atom(p, _) => vec![p],
            TF::And(fs) | TF::Or(fs) => fs.iter().flat_map(TF::atoms).collect(),
            TF::Not(f) => f.atoms(),
        }
    }
}

pub fn to_rational(q: &Q) -> Rational {
    Rational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn random_q(rng: &mut impl Rng) -> Q {
    let d: i128 = [1, 1, 2, 3, 4, 5, 8][rng.gen_range(0..7)];
    let n: i128 = rng.gen_range(-5 * d..=5 * d);
    Q::new(n, d)
}

pub fn random_point(rng: &mut impl Rng) -> [Q; 3] {
    [random_q(rng), random_q(rng), random_q(rng)]
}

/// Whether any of `n` random points satisfies `f`.
pub fn sample_sat(f: &TF, n: usize, rng: &mut impl Rng) -> Option<[Q; 3]> {
    (0..n).map(|_| random_point(rng)).find(|p| f.eval(p))
}

pub fn exists_all(nvars: usize, f: Formula) -> Formula {
    Formula::exists((0..nvars).map(var).collect(), f)
}
