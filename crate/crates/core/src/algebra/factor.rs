//! Factorization of univariate polynomials over Q (Zassenhaus): factor
//! modulo a small prime, Hensel-lift, then recombine lifted factors.
//!
//! When recombination would need too many trials the remaining cofactor is
//! returned whole, so the result is always a factorization into
//! square-free, pairwise coprime parts, and irreducible in all but
//! pathological cases.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Rational, UniPoly};

/// Integer coefficients, constant term first, no trailing zeros.
type ZPoly = Vec<BigInt>;
/// Coefficients in `[0, p)`, constant term first, no trailing zeros.
type FpPoly = Vec<u64>;

const MAX_SUBSETS: usize = 20_000;
const PRIMES_TRIED: usize = 5;

/// Factors of a square-free `p` over Q, each primitive with positive
/// leading coefficient, in no particular order.
pub fn irreducible_factors(p: &UniPoly) -> Vec<UniPoly> {
    let p = p.primitive();
    if p.degree() <= 1 {
        return vec![p];
    }
    let mut out = Vec::new();
    let (k, q) = p.strip_zero_roots();
    if k > 0 {
        out.push(UniPoly::from_ints(&[0, 1]));
    }
    if q.degree() == 0 {
        return out;
    }
    let f: ZPoly = q.coeffs().iter().map(|c| c.numer().clone()).collect();
    for g in zassenhaus(f) {
        let u = UniPoly::new(g.into_iter().map(Rational::from_integer).collect());
        out.push(u.primitive());
    }
    out
}

fn zassenhaus(f: ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f];
    }
    let lc = f[n].clone();
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for p in primes() {
        if tried == PRIMES_TRIED {
            break;
        }
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = fp_monic(&fp_from(&f, p), p);
        if fp_gcd(&fp, &fp_derivative(&fp, p), p).len() > 1 {
            continue;
        }
        tried += 1;
        let factors = factor_mod_p(&fp, p);
        if factors.len() == 1 {
            return vec![f];
        }
        if best.as_ref().is_none_or(|(_, b)| factors.len() < b.len()) {
            best = Some((p, factors));
        }
    }
    let Some((p, factors)) = best else {
        return vec![f];
    };

    let bound = mignotte(&f) * lc.abs() * BigInt::from(2);
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut m = pb.clone();
    while m <= bound {
        m *= &pb;
        k += 1;
    }
    let inv = lc.modinv(&m).expect("lc is a unit modulo p^k");
    let fm: ZPoly = trim_z(f.iter().map(|c| (c * &inv).mod_floor(&m)).collect());
    let lifted = hensel(&fm, &factors, p, k);
    recombine(f, lifted, &m)
}

fn primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|n| (3..).step_by(2).take_while(|d| d * d <= *n).all(|d| n % d != 0))
}

/// `2^n · ‖f‖₂`, bounding the coefficients of any factor of `f`.
fn mignotte(f: &ZPoly) -> BigInt {
    let sq: BigInt = f.iter().map(|c| c * c).sum();
    (sq.sqrt() + BigInt::one()) << (f.len() - 1)
}

fn trim_z(mut v: ZPoly) -> ZPoly {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn z_mul_mod(a: &ZPoly, b: &ZPoly, m: &BigInt) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_z(out.into_iter().map(|c| c.mod_floor(m)).collect())
}

/// `f / g` over Z when `g` divides `f` exactly.
fn z_divide(f: &ZPoly, g: &ZPoly) -> Option<ZPoly> {
    let dg = g.len() - 1;
    if f.len() < g.len() {
        return None;
    }
    let mut r = f.clone();
    let mut q = vec![BigInt::zero(); f.len() - dg];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + dg].div_rem(&g[dg]);
        if !rem.is_zero() {
            return None;
        }
        for (j, gj) in g.iter().enumerate() {
            r[i + j] -= &c * gj;
        }
        q[i] = c;
    }
    r.iter().all(Zero::is_zero).then_some(q)
}

fn z_primitive(mut g: ZPoly) -> ZPoly {
    let c = g.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    if !c.is_zero() && !c.is_one() {
        g = g.into_iter().map(|x| x / &c).collect();
    }
    if g.last().is_some_and(Signed::is_negative) {
        g = g.into_iter().map(|x| -x).collect();
    }
    g
}

fn recombine(mut f: ZPoly, mut lifted: Vec<ZPoly>, m: &BigInt) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut s = 1;
    let mut trials = 0;
    'outer: while 2 * s <= lifted.len() {
        let r = lifted.len();
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            super::interrupt::check();
            trials += 1;
            if trials > MAX_SUBSETS {
                break 'outer;
            }
            let lc = f.last().expect("nonzero").clone();
            let mut g = vec![lc];
            for &i in &idx {
                g = z_mul_mod(&g, &lifted[i], m);
            }
            let g = z_primitive(trim_z(g.iter().map(|c| symmetric(c, m)).collect()));
            if let Some(q) = z_divide(&f, &g) {
                out.push(g);
                f = q;
                for &i in idx.iter().rev() {
                    lifted.remove(i);
                }
                continue 'outer;
            }
            // next s-subset of 0..r in lexicographic order
            let mut i = s;
            while i > 0 && idx[i - 1] == r - s + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..s {
                idx[j] = idx[j - 1] + 1;
            }
        }
        s += 1;
    }
    if f.len() > 1 {
        out.push(z_primitive(f));
    }
    out
}

/// Lifts `fm ≡ ∏ factors (mod p)` to monic factors modulo `p^k`.
fn hensel(fm: &ZPoly, factors: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let pb = BigInt::from(p);
    let m = pb.pow(k);
    if factors.len() == 1 {
        return vec![fm.iter().map(|c| c.mod_floor(&m)).collect()];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let prod = |fs: &[FpPoly]| fs.iter().fold(vec![1u64], |a, b| fp_mul(&a, b, p));
    let (a0, b0) = (prod(left), prod(right));
    let (s, t) = fp_ext_gcd(&a0, &b0, p);
    debug_assert!(s.len() <= b0.len() && t.len() <= a0.len());
    let mut a: ZPoly = a0.iter().map(|&c| BigInt::from(c)).collect();
    let mut b: ZPoly = b0.iter().map(|&c| BigInt::from(c)).collect();
    let mut pj = pb.clone();
    for _ in 1..k {
        super::interrupt::check();
        let ab = z_mul_mod(&a, &b, &(&pj * &pb));
        let e: FpPoly = fp_trim(
            (0..fm.len())
                .map(|i| {
                    let c = fm[i].mod_floor(&(&pj * &pb)) - ab.get(i).cloned().unwrap_or_default();
                    let d = c.div_floor(&pj);
                    d.mod_floor(&pb).to_u64().expect("below p")
                })
                .collect(),
        );
        let sigma = fp_divrem(&fp_mul(&e, &t, p), &a0, p).1;
        let tau = fp_divrem(&fp_sub(&e, &fp_mul(&sigma, &b0, p), p), &a0, p).0;
        for (i, c) in sigma.iter().enumerate() {
            a[i] += &pj * BigInt::from(*c);
        }
        for (i, c) in tau.iter().enumerate() {
            b[i] += &pj * BigInt::from(*c);
        }
        pj *= &pb;
    }
    let mut out = hensel(&a, left, p, k);
    out.extend(hensel(&b, right, p, k));
    out
}

// ---------------------------------------------------------------------------
// Arithmetic in F_p[x]

fn fp_trim(mut v: FpPoly) -> FpPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_from(f: &ZPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    fp_trim(f.iter().map(|c| c.mod_floor(&pb).to_u64().expect("below p")).collect())
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut r) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    r
}

fn fp_monic(a: &FpPoly, p: u64) -> FpPoly {
    match a.last() {
        None | Some(1) => a.clone(),
        Some(&l) => {
            let i = inv_mod(l, p);
            a.iter().map(|&c| mulmod(c, i, p)).collect()
        }
    }
}

fn fp_sub(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_mul(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_trim(out)
}

fn fp_divrem(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let inv = inv_mod(b[db], p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = mulmod(r[i + db], inv, p);
        q[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + p - mulmod(c, bj, p)) % p;
            }
        }
    }
    r.truncate(db);
    (fp_trim(q), fp_trim(r))
}

fn fp_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> FpPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

/// `(s, t)` with `s·a + t·b = 1` for coprime `a`, `b`.
fn fp_ext_gcd(a: &FpPoly, b: &FpPoly, p: u64) -> (FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s2);
        (t0, t1) = (t1, t2);
    }
    let inv = inv_mod(r0[0], p);
    let scale = |v: FpPoly| v.into_iter().map(|c| mulmod(c, inv, p)).collect::<FpPoly>();
    (fp_trim(scale(s0)), fp_trim(scale(t0)))
}

fn fp_derivative(a: &FpPoly, p: u64) -> FpPoly {
    fp_trim(a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect())
}

fn fp_powmod(base: &FpPoly, e: &BigUint, m: &FpPoly, p: u64) -> FpPoly {
    let mut r = vec![1u64];
    let base = fp_divrem(base, m, p).1;
    for i in (0..e.bits()).rev() {
        r = fp_divrem(&fp_mul(&r, &r, p), m, p).1;
        if e.bit(i) {
            r = fp_divrem(&fp_mul(&r, &base, p), m, p).1;
        }
    }
    r
}

/// Monic irreducible factors of a monic square-free polynomial.
fn factor_mod_p(f: &FpPoly, p: u64) -> Vec<FpPoly> {
    let x = vec![0u64, 1];
    let pu = BigUint::from(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut d = 1;
    while rest.len() > 1 {
        if 2 * d > rest.len() - 1 {
            out.push(rest.clone());
            break;
        }
        super::interrupt::check();
        h = fp_powmod(&h, &pu, &rest, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            out.extend(equal_degree(&g, d, p));
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_divrem(&h, &rest, p).1;
        }
        d += 1;
    }
    out.into_iter().map(|g| fp_monic(&g, p)).collect()
}

/// Splits a product of distinct irreducibles of degree `d` (Cantor and
/// Zassenhaus, with trial polynomials enumerated deterministically).
fn equal_degree(g: &FpPoly, d: usize, p: u64) -> Vec<FpPoly> {
    let n = g.len() - 1;
    if n == d {
        return vec![g.clone()];
    }
    let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    for counter in p..p + 2000 {
        super::interrupt::check();
        let mut r = Vec::new();
        let mut c = counter;
        while c > 0 && r.len() < n {
            r.push(c % p);
            c /= p;
        }
        let r = fp_trim(r);
        if r.len() < 2 {
            continue;
        }
        let w = fp_sub(&fp_powmod(&r, &e, g, p), &vec![1u64], p);
        let h = fp_gcd(&w, g, p);
        if h.len() > 1 && h.len() < g.len() {
            let mut out = equal_degree(&h, d, p);
            out.extend(equal_degree(&fp_divrem(g, &h, p).0, d, p));
            return out;
        }
    }
    vec![g.clone()]
}
