//! Sturm-sequence root counting on dense rational coefficient vectors,
//! independent of the library's isolation code.

use econreason::algebra::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Dense coefficient vector, constant term first, trailing zeros trimmed.
pub fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = r.last().expect("nonempty").clone() / &lb;
        for (i, bi) in b.iter().enumerate() {
            r[k + i] -= &c * bi;
        }
        r.pop();
        r = trim(r);
    }
    r
}

pub fn deriv(p: &[Rational]) -> Vec<Rational> {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

pub fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = vec![p.to_vec(), deriv(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let r: Vec<Rational> = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain
}

pub fn sign_at(p: &[Rational], x: &Rational) -> i32 {
    let v = p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

pub fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let s: Vec<i32> = signs.filter(|s| *s != 0).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots of `p` in `(a, b]`; all of `(a, b]` when unbounded.
pub fn sturm_count(p: &[Rational], a: Option<&Rational>, b: Option<&Rational>) -> usize {
    let chain = sturm_chain(p);
    let at = |x: Option<&Rational>, neg: bool| -> usize {
        variations(chain.iter().map(|q| match x {
            Some(x) => sign_at(q, x),
            None => {
                let lead = if q.last().expect("nonzero").is_positive() { 1 } else { -1 };
                if neg && (q.len() - 1) % 2 == 1 {
                    -lead
                } else {
                    lead
                }
            }
        }))
    };
    at(a, true) - at(b, false)
}
