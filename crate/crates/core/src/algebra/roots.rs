//! Square-free decomposition and Descartes/bisection real root isolation.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ran::RealAlgebraic;
use super::{floor, simplest_between, AlgebraError, Rational, UniPoly};

/// Yun's algorithm. Factors come back in increasing multiplicity, each
/// primitive, square-free and pairwise coprime; constants yield no factors.
pub fn square_free_factors(p: &UniPoly) -> Result<Vec<(UniPoly, u32)>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let dp = p.derivative();
    let b = p.gcd(&dp);
    let mut c = p.div_rem(&b).0;
    let mut d = dp.div_rem(&b).0.sub(&c.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while c.degree() > 0 {
        let a = c.gcd(&d);
        if a.degree() > 0 {
            out.push((a.primitive(), i));
        }
        c = c.div_rem(&a).0;
        d = d.div_rem(&a).0.sub(&c.derivative());
        i += 1;
    }
    Ok(out)
}

/// An integer strictly larger than the modulus of every complex root.
pub fn cauchy_bound(p: &UniPoly) -> Rational {
    let lead = p.leading().abs();
    let m = p.coeffs()[..p.degree()]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    Rational::from_integer(floor(&m) + BigInt::from(2))
}

/// Descartes bound on the number of roots in the open interval `(a, b)`;
/// exact when it returns 0 or 1.
pub fn descartes_count(p: &UniPoly, a: &Rational, b: &Rational) -> usize {
    let q = p.compose_linear(a, &(b - a));
    let r = q.reversed();
    let s = r.compose_linear(&Rational::one(), &Rational::one());
    s.sign_variations()
}

/// Distinct real roots in increasing order with disjoint isolating intervals.
pub fn isolate_real_roots(p: &UniPoly) -> Result<Vec<RealAlgebraic>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let sf = p.squarefree_part();
    if sf.degree() == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let (k, q) = sf.strip_zero_roots();
    if k > 0 {
        out.push(RealAlgebraic::Rational(Rational::zero()));
    }
    if q.degree() > 0 {
        let bound = cauchy_bound(&q);
        for f in super::factor::irreducible_factors(&q) {
            isolate_in(&f, -bound.clone(), bound.clone(), &mut out);
        }
    }
    out.sort_by(|a, b| a.cmp_exact(b));
    // roots of different factors may come with overlapping intervals
    for i in 1..out.len() {
        loop {
            let (_, hi) = out[i - 1].bounds();
            let (lo, _) = out[i].bounds();
            if hi <= lo {
                break;
            }
            super::interrupt::check();
            out[i - 1] = out[i - 1].bisect();
            out[i] = out[i].bisect();
        }
    }
    Ok(out)
}

/// Roots of square-free `q` in `(lo, hi)`; `lo`, `hi` must not be roots.
/// A split point that is a root is divided out, so subinterval endpoints
/// never vanish on the polynomial carried with them.
fn isolate_in(q: &UniPoly, lo: Rational, hi: Rational, out: &mut Vec<RealAlgebraic>) {
    let mut stack = vec![(q.clone(), lo, hi)];
    while let Some((q, a, b)) = stack.pop() {
        super::interrupt::check();
        match descartes_count(&q, &a, &b) {
            0 => {}
            1 => {
                out.push(single_root(&q, a, b));
            }
            _ => {
                let quarter = (&b - &a) / Rational::from_integer(BigInt::from(4));
                let m = simplest_between(&(&a + &quarter), &(&b - &quarter));
                let q = if q.eval(&m).is_zero() {
                    out.push(RealAlgebraic::Rational(m.clone()));
                    q.div_rem(&UniPoly::linear_root(&m)).0
                } else {
                    q
                };
                stack.push((q.clone(), a, m.clone()));
                stack.push((q, m, b));
            }
        }
    }
}

/// The root of `q` isolated in `(a, b)`. Any rational root `n/d` has
/// `d | lc(q)`, so once the interval is narrower than `1/lc²` it is the
/// simplest rational inside; checking that candidate at every bisection
/// detects rational roots exactly.
fn single_root(q: &UniPoly, mut a: Rational, mut b: Rational) -> RealAlgebraic {
    let q = q.primitive();
    if q.degree() == 1 {
        return RealAlgebraic::Rational(-&q.coeffs()[0] / &q.coeffs()[1]);
    }
    let lc = q.leading();
    let tiny = Rational::one() / (&lc * &lc);
    let sa = q.sign_at(&a);
    loop {
        super::interrupt::check();
        let s = simplest_between(&a, &b);
        if q.sign_at(&s) == 0 {
            return RealAlgebraic::Rational(s);
        }
        if &b - &a < tiny {
            return RealAlgebraic::from_isolating(q, a, b);
        }
        let quarter = (&b - &a) / Rational::from_integer(BigInt::from(4));
        let m = simplest_between(&(&a + &quarter), &(&b - &quarter));
        let sm = q.sign_at(&m);
        if sm == 0 {
            return RealAlgebraic::Rational(m);
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }
}
