//! Resultants, principal subresultant coefficients, discriminants and gcds
//! over `Q[vars]`, all fraction-free in the main variable.

use super::{AlgebraError, Polynomial, UniPoly, Var};

fn lc(p: &[Polynomial]) -> &Polynomial {
    p.last().expect("nonzero")
}

fn trim(mut p: Vec<Polynomial>) -> Vec<Polynomial> {
    while p.len() > 1 && p.last().is_some_and(Polynomial::is_zero) {
        p.pop();
    }
    p
}

fn deg(p: &[Polynomial]) -> usize {
    p.len() - 1
}

fn is_zero(p: &[Polynomial]) -> bool {
    p.len() == 1 && p[0].is_zero()
}

/// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) · a mod b`.
fn prem(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    let db = deg(b);
    let mut r = a.to_vec();
    if deg(a) < db {
        return r;
    }
    let lb = lc(b).clone();
    let mut e = deg(a) - db + 1;
    while !is_zero(&r) && deg(&r) >= db {
        super::interrupt::check();
        let shift = deg(&r) - db;
        let lr = lc(&r).clone();
        let mut next: Vec<Polynomial> = r.iter().map(|c| c * &lb).collect();
        for (i, bi) in b.iter().enumerate() {
            next[i + shift] = &next[i + shift] - &(&lr * bi);
        }
        next.pop();
        r = trim(next);
        if r.is_empty() {
            r.push(Polynomial::zero());
        }
        e -= 1;
    }
    let k = lb.pow(e as u32);
    r.iter().map(|c| c * &k).collect()
}

fn div_all(p: &[Polynomial], d: &Polynomial) -> Vec<Polynomial> {
    p.iter()
        .map(|c| c.div_exact(d).expect("subresultant division is exact"))
        .collect()
}

/// Resultant with respect to `v` (Sylvester-determinant sign convention),
/// computed by the subresultant polynomial remainder sequence.
pub fn resultant(p: &Polynomial, q: &Polynomial, v: &Var) -> Result<Polynomial, AlgebraError> {
    for f in [p, q] {
        if f.degree(v) == 0 {
            return Err(AlgebraError::Degree {
                var: v.to_string(),
                degree: 0,
                need: 1,
            });
        }
    }
    let mut a = p.to_univariate(v);
    let mut b = q.to_univariate(v);
    let mut s = 1i32;
    if deg(&a) < deg(&b) {
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    let mut g = Polynomial::one();
    let mut h = Polynomial::one();
    loop {
        super::interrupt::check();
        let delta = deg(&a) - deg(&b);
        if deg(&a) % 2 == 1 && deg(&b) % 2 == 1 {
            s = -s;
        }
        let r = trim(prem(&a, &b));
        a = b;
        if is_zero(&r) {
            return Ok(Polynomial::zero());
        }
        let denom = &g * &h.pow(delta as u32);
        b = div_all(&r, &denom);
        g = lc(&a).clone();
        if delta > 0 {
            h = g
                .pow(delta as u32)
                .div_exact(&h.pow(delta as u32 - 1))
                .expect("exact");
        }
        if deg(&b) == 0 {
            let da = deg(&a) as u32;
            let res = lc(&b)
                .pow(da)
                .div_exact(&h.pow(da - 1))
                .expect("exact");
            return Ok(if s < 0 { -res } else { res });
        }
    }
}

/// Determinant by fraction-free Gaussian elimination (Bareiss).
pub(crate) fn bareiss_det(mut m: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one();
    }
    let mut neg = false;
    let mut prev = Polynomial::one();
    for k in 0..n {
        super::interrupt::check();
        let Some(piv) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Polynomial::zero();
        };
        if piv != k {
            m.swap(piv, k);
            neg = !neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if neg {
        -d
    } else {
        d
    }
}

/// Principal subresultant coefficient `psc_j(p, q)` with respect to `v`,
/// taking the formal degrees of `p` and `q` in `v`.
pub fn psc(p: &Polynomial, q: &Polynomial, v: &Var, j: usize) -> Polynomial {
    let a = p.to_univariate(v);
    let b = q.to_univariate(v);
    let (m, n) = (deg(&a), deg(&b));
    assert!(j <= m.min(n), "psc index out of range");
    let size = m + n - 2 * j;
    if size == 0 {
        return Polynomial::one();
    }
    let width = m + n - j; // columns x^(m+n-j-1) .. x^0
    let mut rows = Vec::with_capacity(size);
    let push_rows = |rows: &mut Vec<Vec<Polynomial>>, f: &[Polynomial], count: usize| {
        for shift in (0..count).rev() {
            super::interrupt::check();
            let mut row = vec![Polynomial::zero(); width];
            for (k, c) in f.iter().enumerate() {
                let power = k + shift;
                row[width - 1 - power] = c.clone();
            }
            rows.push(row);
        }
    };
    push_rows(&mut rows, &a, n - j);
    push_rows(&mut rows, &b, m - j);
    let square = rows.into_iter().map(|r| r[..size].to_vec()).collect();
    bareiss_det(square)
}

/// `(-1)^(n(n-1)/2) · res(p, ∂p/∂v) / lc(p)` for `n = deg(p, v) ≥ 2`.
pub fn discriminant(p: &Polynomial, v: &Var) -> Result<Polynomial, AlgebraError> {
    let n = p.degree(v);
    if n < 2 {
        return Err(AlgebraError::Degree {
            var: v.to_string(),
            degree: n,
            need: 2,
        });
    }
    let r = resultant(p, &p.derivative(v), v)?;
    let r = r
        .div_exact(&p.leading_coeff_in(v))
        .expect("leading coefficient divides the resultant");
    let n = n as u64;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}

pub(crate) fn content_in(p: &Polynomial, v: &Var) -> Polynomial {
    p.to_univariate(v)
        .iter()
        .fold(Polynomial::zero(), |acc, c| gcd(&acc, c))
}

/// Greatest common divisor in `Q[vars]`, normalized by [`Polynomial::primitive`].
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    let mut vars = a.vars();
    vars.extend(b.vars());
    if vars.len() == 1 {
        let v = vars.into_iter().next().expect("one variable");
        let ua = UniPoly::from_poly(a, &v).expect("univariate");
        let ub = UniPoly::from_poly(b, &v).expect("univariate");
        return ua.gcd(&ub).to_poly(&v).primitive_part();
    }
    let v = vars.into_iter().next().expect("non-constant");
    if !a.contains_var(&v) {
        return gcd(a, &content_in(b, &v));
    }
    if !b.contains_var(&v) {
        return gcd(&content_in(a, &v), b);
    }
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = gcd(&ca, &cb);
    let mut pa = a.div_exact(&ca).expect("content divides").to_univariate(&v);
    let mut pb = b.div_exact(&cb).expect("content divides").to_univariate(&v);
    if deg(&pa) < deg(&pb) {
        std::mem::swap(&mut pa, &mut pb);
    }
    if coprime_at_some_point(&pa, &pb) {
        return c.primitive_part();
    }
    let g = loop {
        super::interrupt::check();
        let r = trim(prem(&pa, &pb));
        if is_zero(&r) {
            break Polynomial::from_univariate(&v, &pb);
        }
        if deg(&r) == 0 {
            break Polynomial::one();
        }
        let rp = Polynomial::from_univariate(&v, &r);
        let rc = content_in(&rp, &v);
        pa = pb;
        pb = rp.div_exact(&rc).expect("content divides").to_univariate(&v);
    };
    let g = g.div_exact(&content_in(&g, &v)).expect("content divides");
    (&c * &g).primitive_part()
}

/// True when specializing the other variables at a point that keeps both
/// leading coefficients nonzero gives coprime images; a common factor in
/// the main variable would survive such a specialization. `false` means
/// unknown.
fn coprime_at_some_point(a: &[Polynomial], b: &[Polynomial]) -> bool {
    let mut others = std::collections::BTreeSet::new();
    for c in a.iter().chain(b) {
        others.extend(c.vars());
    }
    for attempt in 0..3i64 {
        let point: std::collections::BTreeMap<Var, super::Rational> = others
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), super::int(2 + 3 * i as i64 + 7 * attempt)))
            .collect();
        let image = |p: &[Polynomial]| {
            UniPoly::new(p.iter().map(|c| c.eval(&point).expect("all variables assigned")).collect())
        };
        let (ia, ib) = (image(a), image(b));
        if ia.degree() != deg(a) || ib.degree() != deg(b) {
            continue;
        }
        return ia.gcd(&ib).degree() == 0;
    }
    false
}

/// Removes repeated factors that involve `v`; factors free of `v` are kept.
pub fn squarefree_part(p: &Polynomial, v: &Var) -> Polynomial {
    if p.degree(v) < 2 {
        return p.primitive_part();
    }
    let g = gcd(p, &p.derivative(v));
    if g.contains_var(v) {
        p.div_exact(&g).expect("gcd divides").primitive_part()
    } else {
        p.primitive_part()
    }
}
