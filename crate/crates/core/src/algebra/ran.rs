//! Real algebraic numbers and exact sign evaluation at algebraic points.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::pow_rational;
use super::{
    fmt_decimal, fmt_rational, isolate_real_roots, resultant, sign_of, to_f64, AlgebraError,
    Polynomial, Rational, UniPoly, Var,
};

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(q: Rational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, k: &Rational) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn pow(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(Rational::one());
        }
        let a = pow_rational(&self.lo, e);
        let b = pow_rational(&self.hi, e);
        if e % 2 == 1 || !self.lo.is_negative() {
            Interval { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            Interval { lo: b, hi: a }
        } else {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        }
    }

    /// `Some(sign)` when the interval excludes zero.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// A real root of a square-free integer polynomial, isolated in `(lo, hi)`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicRoot {
    poly: UniPoly,
    lo: Rational,
    hi: Rational,
}

/// Exact real algebraic number. Rational values are always stored as
/// [`RealAlgebraic::Rational`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RealAlgebraic {
    Rational(Rational),
    Root(Arc<AlgebraicRoot>),
}

pub type SamplePoint = BTreeMap<Var, RealAlgebraic>;

impl RealAlgebraic {
    /// `poly` square-free with exactly one root in the open `(lo, hi)`,
    /// neither endpoint a root.
    pub fn from_isolating(poly: UniPoly, lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo < hi);
        let poly = poly.primitive();
        if poly.degree() == 1 {
            return RealAlgebraic::Rational(-&poly.coeffs()[0] / &poly.coeffs()[1]);
        }
        RealAlgebraic::Root(Arc::new(AlgebraicRoot { poly, lo, hi }))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            RealAlgebraic::Rational(q) => Some(q),
            RealAlgebraic::Root(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, RealAlgebraic::Rational(_))
    }

    /// Square-free integer polynomial vanishing at this number.
    pub fn defining_poly(&self) -> UniPoly {
        match self {
            RealAlgebraic::Rational(q) => UniPoly::linear_root(q).primitive(),
            RealAlgebraic::Root(r) => r.poly.clone(),
        }
    }

    /// Isolating bounds; equal for rationals.
    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            RealAlgebraic::Rational(q) => (q.clone(), q.clone()),
            RealAlgebraic::Root(r) => (r.lo.clone(), r.hi.clone()),
        }
    }

    pub fn enclosure(&self) -> Interval {
        let (lo, hi) = self.bounds();
        Interval { lo, hi }
    }

    pub(crate) fn bisect(&self) -> RealAlgebraic {
        match self {
            RealAlgebraic::Rational(_) => self.clone(),
            RealAlgebraic::Root(r) => {
                let mid = (&r.lo + &r.hi) / Rational::from_integer(BigInt::from(2));
                let sm = r.poly.sign_at(&mid);
                if sm == 0 {
                    return RealAlgebraic::Rational(mid);
                }
                let (lo, hi) = if sm == r.poly.sign_at(&r.lo) {
                    (mid, r.hi.clone())
                } else {
                    (r.lo.clone(), mid)
                };
                RealAlgebraic::Root(Arc::new(AlgebraicRoot {
                    poly: r.poly.clone(),
                    lo,
                    hi,
                }))
            }
        }
    }

    /// Same number, isolating interval no wider than `width`.
    pub fn refine(&self, width: &Rational) -> RealAlgebraic {
        assert!(width.is_positive(), "width must be positive");
        let mut cur = self.clone();
        while let RealAlgebraic::Root(r) = &cur {
            super::interrupt::check();
            if &(&r.hi - &r.lo) <= width {
                break;
            }
            cur = cur.bisect();
        }
        cur
    }

    fn halve(&self) -> RealAlgebraic {
        self.bisect()
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            RealAlgebraic::Rational(q) => to_f64(q),
            RealAlgebraic::Root(r) => {
                let scale = to_f64(&r.lo).abs().max(to_f64(&r.hi).abs()).max(1.0);
                let w = Rational::new(BigInt::one(), BigInt::from(1u64 << 50));
                let tol = w * Rational::from_integer(BigInt::from(scale.ceil() as i64 + 1));
                let (lo, hi) = self.refine(&tol).bounds();
                to_f64(&((lo + hi) / Rational::from_integer(BigInt::from(2))))
            }
        }
    }

    /// Sign of a univariate polynomial at this number.
    pub fn sign_of(&self, p: &UniPoly) -> i32 {
        match self {
            RealAlgebraic::Rational(q) => p.sign_at(q),
            RealAlgebraic::Root(r) => {
                if p.is_zero() {
                    return 0;
                }
                let g = r.poly.gcd(p);
                if g.degree() > 0 && g.sign_at(&r.lo) != g.sign_at(&r.hi) {
                    return 0;
                }
                let mut cur = self.clone();
                loop {
                    super::interrupt::check();
                    match &cur {
                        RealAlgebraic::Rational(q) => return p.sign_at(q),
                        RealAlgebraic::Root(c) => {
                            let s = p.sign_at(&c.lo);
                            if s != 0
                                && s == p.sign_at(&c.hi)
                                && super::descartes_count(p, &c.lo, &c.hi) == 0
                            {
                                return s;
                            }
                        }
                    }
                    cur = cur.bisect();
                }
            }
        }
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        match self {
            RealAlgebraic::Rational(a) => a.cmp(q),
            RealAlgebraic::Root(r) => {
                if q <= &r.lo {
                    return Ordering::Greater;
                }
                if q >= &r.hi {
                    return Ordering::Less;
                }
                let s = r.poly.sign_at(q);
                if s == 0 {
                    Ordering::Equal
                } else if s == r.poly.sign_at(&r.lo) {
                    // no sign change on (lo, q]: root lies to the right of q
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// Exact total order on real algebraic numbers.
    pub fn cmp_exact(&self, other: &RealAlgebraic) -> Ordering {
        match (self, other) {
            (RealAlgebraic::Rational(a), RealAlgebraic::Rational(b)) => a.cmp(b),
            (_, RealAlgebraic::Rational(b)) => self.cmp_rational(b),
            (RealAlgebraic::Rational(a), _) => other.cmp_rational(a).reverse(),
            (RealAlgebraic::Root(ra), RealAlgebraic::Root(rb)) => {
                if ra.hi <= rb.lo {
                    return Ordering::Less;
                }
                if rb.hi <= ra.lo {
                    return Ordering::Greater;
                }
                let lo = (&ra.lo).max(&rb.lo).clone();
                let hi = (&ra.hi).min(&rb.hi).clone();
                let g = ra.poly.gcd(&rb.poly);
                if g.degree() > 0 {
                    let (sl, sh) = (g.sign_at(&lo), g.sign_at(&hi));
                    if sl != 0 && sh != 0 && sl != sh {
                        return Ordering::Equal;
                    }
                }
                let a = self.halve();
                let b = other.halve();
                a.cmp_exact(&b)
            }
        }
    }

    /// 1-based index among the real roots of the defining polynomial.
    pub fn root_index(&self) -> usize {
        let roots = isolate_real_roots(&self.defining_poly()).expect("nonzero");
        roots
            .iter()
            .position(|r| r.cmp_exact(self) == Ordering::Equal)
            .expect("number is a root of its defining polynomial")
            + 1
    }

    /// Exact form: a rational, or `root(p, k)` in variable `var`.
    pub fn exact_string(&self, var: &str) -> String {
        match self {
            RealAlgebraic::Rational(q) => fmt_rational(q),
            RealAlgebraic::Root(r) => format!(
                "root({}, {})",
                r.poly.to_poly(&Var::new(var)),
                self.root_index()
            ),
        }
    }

    pub fn approx_string(&self) -> String {
        fmt_decimal(self.to_f64())
    }
}

impl fmt::Display for RealAlgebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealAlgebraic::Rational(q) => f.write_str(&fmt_rational(q)),
            RealAlgebraic::Root(_) => {
                write!(f, "{} [≈ {}]", self.exact_string("x"), self.approx_string())
            }
        }
    }
}

fn interval_eval(p: &Polynomial, point: &BTreeMap<Var, RealAlgebraic>) -> Interval {
    let mut acc = Interval::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut term = Interval::point(c.clone());
        for (v, e) in m.factors() {
            term = term.mul(&point[v].enclosure().pow(*e));
        }
        acc = acc.add(&term);
    }
    acc
}

fn t_var() -> Var {
    Var::new("$t")
}

fn check_assigned(p: &Polynomial, point: &SamplePoint) -> Result<(), AlgebraError> {
    for v in p.vars() {
        if !point.contains_key(&v) {
            return Err(AlgebraError::Unassigned(v.to_string()));
        }
    }
    Ok(())
}

fn split_rational(
    p: &Polynomial,
    point: &SamplePoint,
) -> (Polynomial, BTreeMap<Var, RealAlgebraic>) {
    let mut rational = BTreeMap::new();
    let mut algebraic = BTreeMap::new();
    for v in p.vars() {
        if let Some(val) = point.get(&v) {
            match val {
                RealAlgebraic::Rational(q) => {
                    rational.insert(v, q.clone());
                }
                RealAlgebraic::Root(_) => {
                    algebraic.insert(v, val.clone());
                }
            }
        }
    }
    (p.substitute_all(&rational), algebraic)
}

/// Exact sign of `p` at `point`, which must assign every variable of `p`.
pub fn eval_sign(p: &Polynomial, point: &SamplePoint) -> Result<i32, AlgebraError> {
    check_assigned(p, point)?;
    let (p1, mut alg) = split_rational(p, point);
    if let Some(c) = p1.constant_value() {
        return Ok(sign_of(&c));
    }
    if alg.len() == 1 {
        let (v, a) = alg.iter().next().expect("one entry");
        let u = UniPoly::from_poly(&p1, v).expect("univariate after substitution");
        return Ok(a.sign_of(&u));
    }
    for _ in 0..4 {
        if let Some(s) = interval_eval(&p1, &alg).sign() {
            return Ok(s);
        }
        for a in alg.values_mut() {
            *a = a.halve();
        }
        if alg.values().any(RealAlgebraic::is_rational) {
            return eval_sign(p, &merge(point, &alg));
        }
    }
    // R(t) = Res_y1(d1, ... Res_yk(dk, t - p)): every conjugate value of p is a root.
    let t = t_var();
    let mut r = &Polynomial::var(t.clone()) - &p1;
    for (v, a) in &alg {
        if r.contains_var(v) {
            let d = a.defining_poly().to_poly(v);
            r = resultant(&d, &r, v).expect("positive degrees");
        }
    }
    let r = UniPoly::from_poly(&r, &t).expect("only t remains");
    let (k, rest) = r.strip_zero_roots();
    if k == 0 {
        return Ok(refine_until_sign(&p1, &mut alg, None));
    }
    if rest.degree() == 0 {
        return Ok(0);
    }
    let a0 = rest.coeffs()[0].abs();
    let max = rest.coeffs()[1..]
        .iter()
        .map(Signed::abs)
        .max()
        .expect("degree >= 1");
    let bound = &a0 / (&a0 + max);
    Ok(refine_until_sign(&p1, &mut alg, Some(bound)))
}

fn merge(point: &SamplePoint, alg: &BTreeMap<Var, RealAlgebraic>) -> SamplePoint {
    let mut out = point.clone();
    for (v, a) in alg {
        out.insert(v.clone(), a.clone());
    }
    out
}

/// Refines until the enclosure excludes zero, or (when a zero bound `b` is
/// known) fits inside `(-b, b)`, which certifies the value is zero.
fn refine_until_sign(
    p: &Polynomial,
    alg: &mut BTreeMap<Var, RealAlgebraic>,
    zero_bound: Option<Rational>,
) -> i32 {
    loop {
        super::interrupt::check();
        let enc = interval_eval(p, alg);
        if let Some(s) = enc.sign() {
            return s;
        }
        if let Some(b) = &zero_bound {
            if enc.lo > -b && &enc.hi < b {
                return 0;
            }
        }
        for a in alg.values_mut() {
            *a = a.halve();
        }
    }
}

/// Real roots in `x` of `p` with every other variable fixed by `point`.
/// Returns `None` when `p` vanishes identically there.
pub fn root_of_poly_at(
    p: &Polynomial,
    x: &Var,
    point: &SamplePoint,
) -> Result<Option<Vec<RealAlgebraic>>, AlgebraError> {
    let (p1, alg) = split_rational(p, point);
    for v in p1.vars() {
        if &v != x && !point.contains_key(&v) {
            return Err(AlgebraError::Unassigned(v.to_string()));
        }
    }
    let mut coeffs = p1.to_univariate(x);
    while let Some(c) = coeffs.last() {
        if eval_sign(c, point)? != 0 {
            break;
        }
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return Ok(None);
    }
    if coeffs.len() == 1 {
        return Ok(Some(Vec::new()));
    }
    let trimmed = Polynomial::from_univariate(x, &coeffs);
    if alg.is_empty() {
        let u = UniPoly::from_poly(&trimmed, x).expect("univariate");
        return Ok(Some(isolate_real_roots(&u)?));
    }
    let norm = norm_poly(&trimmed, x, &alg);
    let mut out = Vec::new();
    for cand in isolate_real_roots(&norm)? {
        let mut pt = point.clone();
        pt.insert(x.clone(), cand.clone());
        if eval_sign(&trimmed, &pt)? == 0 {
            out.push(cand);
        }
    }
    Ok(Some(out))
}

/// Univariate polynomial in `x` whose roots include those of `p(alg, x)`.
fn norm_poly(p: &Polynomial, x: &Var, alg: &BTreeMap<Var, RealAlgebraic>) -> UniPoly {
    let eliminate = |mut q: Polynomial| {
        for (v, a) in alg {
            if q.contains_var(v) {
                let d = a.defining_poly().to_poly(v);
                q = resultant(&d, &q, v).expect("positive degrees");
            }
        }
        q
    };
    let n = eliminate(p.clone());
    if !n.is_zero() {
        return UniPoly::from_poly(&n, x).expect("only x remains");
    }
    // Some conjugate makes p vanish identically: those contribute a bare factor u.
    let u = Var::new("$u");
    let n = eliminate(p + &Polynomial::var(u.clone()));
    let coeffs = n.to_univariate(&u);
    let low = coeffs
        .into_iter()
        .find(|c| !c.is_zero())
        .expect("norm in u is nonzero");
    UniPoly::from_poly(&low, x).expect("only x remains")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, parse_poly, rat};

    fn sqrt2() -> RealAlgebraic {
        isolate_real_roots(&UniPoly::from_ints(&[-2, 0, 1])).unwrap()[1].clone()
    }

    fn pt(entries: &[(&str, RealAlgebraic)]) -> SamplePoint {
        entries
            .iter()
            .map(|(v, a)| (Var::new(v), a.clone()))
            .collect()
    }

    #[test]
    fn eval_sign_examples() {
        let s = sqrt2();
        assert_eq!(eval_sign(&parse_poly("x^2 - 2"), &pt(&[("x", s.clone())])).unwrap(), 0);
        assert_eq!(
            eval_sign(&parse_poly("x^2 - 2"), &pt(&[("x", RealAlgebraic::Rational(rat(7, 5)))]))
                .unwrap(),
            -1
        );
        assert_eq!(
            eval_sign(
                &parse_poly("x - y"),
                &pt(&[("x", s), ("y", RealAlgebraic::Rational(int(1)))])
            )
            .unwrap(),
            1
        );
    }

    #[test]
    fn eval_sign_rejects_incomplete_points() {
        assert!(eval_sign(&parse_poly("x + y"), &pt(&[("x", sqrt2())])).is_err());
    }

    #[test]
    fn zero_at_two_algebraic_coordinates() {
        let s2 = sqrt2();
        let s3 = isolate_real_roots(&UniPoly::from_ints(&[-3, 0, 1])).unwrap()[1].clone();
        let p = pt(&[("x", s2.clone()), ("y", s3.clone())]);
        assert_eq!(eval_sign(&parse_poly("x^2*y^2 - 6"), &p).unwrap(), 0);
        assert_eq!(eval_sign(&parse_poly("x*y - 2"), &p).unwrap(), 1);
        assert_eq!(eval_sign(&parse_poly("x + y - 3.15"), &p).unwrap(), -1);
        // x*y = sqrt(6)
        let s6 = isolate_real_roots(&UniPoly::from_ints(&[-6, 0, 1])).unwrap()[1].clone();
        let q = pt(&[("x", s2), ("y", s3), ("z", s6)]);
        assert_eq!(eval_sign(&parse_poly("x*y - z"), &q).unwrap(), 0);
    }

    #[test]
    fn refine_examples() {
        let s = sqrt2().refine(&rat(1, 100));
        let (lo, hi) = s.bounds();
        assert!(&hi - &lo <= rat(1, 100));
        assert!(lo < rat(141422, 100000) && hi > rat(141421, 100000));
        let half = RealAlgebraic::Rational(rat(1, 2));
        assert_eq!(half.refine(&rat(1, 1000)), half);
        let a = sqrt2().refine(&rat(1, 10));
        let b = a.refine(&rat(1, 20));
        let (alo, ahi) = a.bounds();
        let (blo, bhi) = b.bounds();
        assert!(alo <= blo && bhi <= ahi);
    }

    #[test]
    fn roots_over_algebraic_point() {
        // x^2 - y at y = 2 → ±sqrt(2); at y = sqrt2 → ±2^(1/4)
        let p = parse_poly("x^2 - y");
        let r = root_of_poly_at(&p, &Var::new("x"), &pt(&[("y", sqrt2())]))
            .unwrap()
            .unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[1].to_f64() - 2f64.powf(0.25)).abs() < 1e-9);
        // (x - y)*(x + 1) at y = sqrt2 → -1, sqrt2
        let q = parse_poly("(x - y)*(x + 1)");
        let r = root_of_poly_at(&q, &Var::new("x"), &pt(&[("y", sqrt2())]))
            .unwrap()
            .unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], RealAlgebraic::Rational(int(-1)));
        assert_eq!(r[1].cmp_exact(&sqrt2()), Ordering::Equal);
        // nullified: (y^2 - 2) * x at y = sqrt2
        let z = parse_poly("(y^2 - 2)*x");
        assert!(root_of_poly_at(&z, &Var::new("x"), &pt(&[("y", sqrt2())]))
            .unwrap()
            .is_none());
    }

    #[test]
    fn norm_survives_vanishing_conjugates() {
        // (y - z)(x - 1) vanishes identically at the conjugate pair (sqrt2, sqrt2)
        let s = sqrt2();
        let m = isolate_real_roots(&UniPoly::from_ints(&[-2, 0, 1])).unwrap()[0].clone();
        let p = parse_poly("(y - z)*(x - 1)");
        let r = root_of_poly_at(&p, &Var::new("x"), &pt(&[("y", s.clone()), ("z", m)]))
            .unwrap()
            .unwrap();
        assert_eq!(r, vec![RealAlgebraic::Rational(int(1))]);
        let r = root_of_poly_at(&p, &Var::new("x"), &pt(&[("y", s.clone()), ("z", s)])).unwrap();
        assert!(r.is_none());
    }
}
