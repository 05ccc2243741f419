use std::collections::BTreeMap;

use econreason::algebra::{Rational, Var};
use econreason::frontend::{gramian_conditions, load, parse_source, total_diff, Code, Expr, Origin, SFormula};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// Gramian conditions

const VECS: [&str; 3] = ["u0", "u1", "u2"];

fn conditions(k: usize) -> Vec<econreason::formula::Formula> {
    let names: Vec<String> = VECS[..k].iter().map(|s| s.to_string()).collect();
    gramian_conditions(&names, |a, b| Var::new(&format!("g_{a}_{b}")))
        .into_iter()
        .map(|(_, f)| f)
        .collect()
}

fn env_of_matrix(m: &[Vec<Rational>]) -> BTreeMap<Var, Rational> {
    let mut env = BTreeMap::new();
    for i in 0..m.len() {
        for j in i..m.len() {
            env.insert(Var::new(&format!("g_{}_{}", VECS[i], VECS[j])), m[i][j].clone());
        }
    }
    env
}

fn all_hold(m: &[Vec<Rational>]) -> bool {
    let env = env_of_matrix(m);
    conditions(m.len()).iter().all(|f| f.eval_rational(&env).unwrap())
}

/// Exact positive semi-definiteness by symmetric Gaussian elimination.
fn psd_exact(m: Vec<Vec<Rational>>) -> bool {
    let n = m.len();
    if n == 0 {
        return true;
    }
    if (0..n).any(|i| m[i][i].is_negative()) {
        return false;
    }
    let Some(p) = (0..n).find(|&i| m[i][i].is_positive()) else {
        return m.iter().flatten().all(Zero::is_zero);
    };
    let rest: Vec<usize> = (0..n).filter(|&i| i != p).collect();
    let schur = rest
        .iter()
        .map(|&i| rest.iter().map(|&j| &m[i][j] - &m[i][p] * &m[p][j] / &m[p][p]).collect())
        .collect();
    psd_exact(schur)
}

fn psd_numeric(m: &[Vec<Rational>]) -> Option<bool> {
    let n = m.len();
    let to_f = |r: &Rational| r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap();
    let a = DMatrix::from_fn(n, n, |i, j| to_f(&m[i][j]));
    let min = a.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 1e-7 {
        Some(true)
    } else if min < -1e-7 {
        Some(false)
    } else {
        None
    }
}

fn gram(vs: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    vs.iter()
        .map(|a| vs.iter().map(|b| q(a.iter().zip(b).map(|(x, y)| x * y).sum())).collect())
        .collect()
}

fn vectors_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(k, dim)| prop::collection::vec(prop::collection::vec(-4i64..=4, dim), k))
}

fn symmetric_strategy() -> impl Strategy<Value = Vec<Vec<Rational>>> {
    let random = (1usize..=3).prop_flat_map(|k| prop::collection::vec(-4i64..=4, k * k)).prop_map(|v| {
        let k = (v.len() as f64).sqrt() as usize;
        (0..k)
            .map(|i| (0..k).map(|j| q(v[i.min(j) * k + i.max(j)])).collect())
            .collect()
    });
    // shifted Gram matrices land on and near the boundary
    let shifted = (vectors_strategy(), -1i64..=1).prop_map(|(vs, s)| {
        let mut m = gram(&vs);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += q(s);
        }
        m
    });
    prop_oneof![random, shifted]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn gramian_of_real_vectors_satisfies_conditions(vs in vectors_strategy()) {
        prop_assert!(all_hold(&gram(&vs)));
    }

    #[test]
    fn gramian_conditions_match_eigenvalues(m in symmetric_strategy()) {
        let exact = psd_exact(m.clone());
        if let Some(numeric) = psd_numeric(&m) {
            prop_assert_eq!(numeric, exact, "oracles disagree on {:?}", m);
        }
        prop_assert_eq!(all_hold(&m), exact, "{:?}", m);
    }
}

#[test]
fn psd_oracle_self_check() {
    let m = |rows: &[[i64; 2]]| rows.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect::<Vec<Vec<_>>>();
    assert!(psd_exact(m(&[[1, 1], [1, 1]])));
    assert!(!psd_exact(m(&[[0, 1], [1, 0]])));
    assert!(!psd_exact(m(&[[1, 2], [2, 1]])));
    assert!(psd_exact(m(&[[0, 0], [0, 3]])));
    // leading minors alone would accept this one
    assert!(!psd_exact(m(&[[0, 0], [0, -1]])));
    assert!(!all_hold(&m(&[[0, 0], [0, -1]])));
}

// ---------------------------------------------------------------------------
// Surface expressions

const SCALARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug)]
enum GE {
    Num(i64),
    Var(usize),
    Neg(Box<GE>),
    Add(Box<GE>, Box<GE>),
    Sub(Box<GE>, Box<GE>),
    Mul(Box<GE>, Box<GE>),
    Sq(Box<GE>),
    Call(Box<GE>),
}

fn ge_strategy(calls: bool) -> impl Strategy<Value = GE> {
    let leaf = prop_oneof![(0i64..=9).prop_map(GE::Num), (0usize..3).prop_map(GE::Var)];
    leaf.prop_recursive(3, 12, 2, move |inner| {
        let b = |a: GE| Box::new(a);
        let mut opts = vec![
            inner.clone().prop_map(move |a| GE::Neg(b(a))).boxed(),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| GE::Add(b(x), b(y))).boxed(),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| GE::Sub(b(x), b(y))).boxed(),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| GE::Mul(b(x), b(y))).boxed(),
            inner.clone().prop_map(move |a| GE::Sq(b(a))).boxed(),
        ];
        if calls {
            opts.push(inner.prop_map(move |a| GE::Call(b(a))).boxed());
        }
        proptest::strategy::Union::new(opts)
    })
}

impl GE {
    /// Fully parenthesized surface text.
    fn text(&self) -> String {
        match self {
            GE::Num(n) => n.to_string(),
            GE::Var(i) => SCALARS[*i].to_string(),
            GE::Neg(a) => format!("(-{})", a.text()),
            GE::Add(a, b) => format!("({} + {})", a.text(), b.text()),
            GE::Sub(a, b) => format!("({} - {})", a.text(), b.text()),
            GE::Mul(a, b) => format!("({} * {})", a.text(), b.text()),
            GE::Sq(a) => format!("({})^2", a.text()),
            GE::Call(a) => format!("f({})", a.text()),
        }
    }

    /// Value and derivative along x, with y' and z' given.
    fn dual(&self, pt: &[Rational; 3], dy: &Rational, dz: &Rational) -> (Rational, Rational) {
        match self {
            GE::Num(n) => (q(*n), q(0)),
            GE::Var(i) => (pt[*i].clone(), [q(1), dy.clone(), dz.clone()][*i].clone()),
            GE::Neg(a) => {
                let (v, d) = a.dual(pt, dy, dz);
                (-v, -d)
            }
            GE::Add(a, b) | GE::Sub(a, b) | GE::Mul(a, b) => {
                let (va, da) = a.dual(pt, dy, dz);
                let (vb, db) = b.dual(pt, dy, dz);
                match self {
                    GE::Add(..) => (va + vb, da + db),
                    GE::Sub(..) => (va - vb, da - db),
                    _ => (&va * &vb, da * &vb + va * db),
                }
            }
            GE::Sq(a) => {
                let (v, d) = a.dual(pt, dy, dz);
                (&v * &v, q(2) * v * d)
            }
            GE::Call(_) => unreachable!("calls have no dual value"),
        }
    }

    fn degree(&self) -> u32 {
        match self {
            GE::Num(_) => 0,
            GE::Var(_) => 1,
            GE::Neg(a) | GE::Call(a) => a.degree(),
            GE::Add(a, b) | GE::Sub(a, b) => a.degree().max(b.degree()),
            GE::Mul(a, b) => a.degree() + b.degree(),
            GE::Sq(a) => 2 * a.degree(),
        }
    }
}

/// Evaluates a parsed surface expression; `D(v, x)` reads `d_v`.
fn eval_expr(e: &Expr, env: &BTreeMap<String, Rational>) -> Rational {
    match e {
        Expr::Num(r) => r.clone(),
        Expr::Var(v, _) => env[v].clone(),
        Expr::D { var, .. } => env[&format!("d_{var}")].clone(),
        Expr::Neg(a) => -eval_expr(a, env),
        Expr::Add(a, b) => eval_expr(a, env) + eval_expr(b, env),
        Expr::Sub(a, b) => eval_expr(a, env) - eval_expr(b, env),
        Expr::Mul(a, b) => eval_expr(a, env) * eval_expr(b, env),
        Expr::Div(a, b, _) => eval_expr(a, env) / eval_expr(b, env),
        Expr::Pow(a, k) => {
            let v = eval_expr(a, env);
            (0..*k).fold(Rational::one(), |acc, _| acc * &v)
        }
        other => panic!("unexpected {other}"),
    }
}

fn hypothesis_of(src: &str) -> SFormula {
    parse_source(src).unwrap().hypothesis.unwrap()
}

fn rel_sides(f: &SFormula) -> (&Expr, &Expr) {
    match f {
        SFormula::Rel { lhs, rhs, .. } => (lhs, rhs),
        other => panic!("not a relation: {other}"),
    }
}

fn point_strategy() -> impl Strategy<Value = [i64; 5]> {
    [-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6]
}

fn env_at(p: &[i64; 5]) -> BTreeMap<String, Rational> {
    [("x", p[0]), ("y", p[1]), ("z", p[2]), ("d_y", p[3]), ("d_z", p[4])]
        .into_iter()
        .map(|(k, v)| (k.to_string(), q(v)))
        .collect()
}

/// Whether two call-free expressions in x and y agree as polynomials,
/// checked on a grid large enough to determine them.
fn same_polynomial(a: &GE, b: &GE) -> bool {
    let d = a.degree().max(b.degree()) as i64;
    let zero = q(0);
    (0..=d).all(|i| {
        (0..=d).all(|j| {
            (0..=d).all(|k| {
                let pt = [q(i), q(j), q(k)];
                a.dual(&pt, &zero, &zero).0 == b.dual(&pt, &zero, &zero).0
            })
        })
    })
}

#[derive(Clone, Debug)]
enum GF {
    Rel(GE, &'static str, GE),
    Not(Box<GF>),
    And(Box<GF>, Box<GF>),
    Or(Box<GF>, Box<GF>),
    Implies(Box<GF>, Box<GF>),
}

const RELS: [&str; 6] = ["<", "<=", "==", "!=", ">=", ">"];

fn gf_strategy() -> impl Strategy<Value = GF> {
    let leaf = (ge_strategy(true), prop::sample::select(RELS.to_vec()), ge_strategy(true))
        .prop_map(|(a, r, b)| GF::Rel(a, r, b));
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| GF::Not(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GF::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GF::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| GF::Implies(Box::new(a), Box::new(b))),
        ]
    })
}

impl GF {
    fn text(&self) -> String {
        match self {
            GF::Rel(a, r, b) => format!("{} {r} {}", a.text(), b.text()),
            GF::Not(a) => format!("!({})", a.text()),
            GF::And(a, b) => format!("({}) && ({})", a.text(), b.text()),
            GF::Or(a, b) => format!("({}) || ({})", a.text(), b.text()),
            GF::Implies(a, b) => format!("({}) ==> ({})", a.text(), b.text()),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn display_round_trips(f in gf_strategy()) {
        let parsed = hypothesis_of(&format!("hypothesis {};", f.text()));
        let shown = parsed.to_string();
        let again = hypothesis_of(&format!("hypothesis {shown};")).to_string();
        prop_assert_eq!(&shown, &again);
        let a = load(&format!("hypothesis {};", f.text()));
        let b = load(&format!("hypothesis {shown};"));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a.hypothesis.formula, b.hypothesis.formula);
        }
    }

    #[test]
    fn parsing_respects_precedence(e in ge_strategy(false), p in point_strategy()) {
        let f = hypothesis_of(&format!("hypothesis {} == 0;", e.text()));
        let printed = hypothesis_of(&format!("hypothesis {f};"));
        let env = env_at(&p);
        let pt = [q(p[0]), q(p[1]), q(p[2])];
        let want = e.dual(&pt, &q(0), &q(0)).0;
        prop_assert_eq!(eval_expr(rel_sides(&f).0, &env), want.clone());
        prop_assert_eq!(eval_expr(rel_sides(&printed).0, &env), want);
    }

    #[test]
    fn total_derivative_follows_chain_rule(e in ge_strategy(false), p in point_strategy()) {
        let f = hypothesis_of(&format!("hypothesis {} == 0;", e.text()));
        let d = total_diff(&f, "x").unwrap();
        let env = env_at(&p);
        let (l, r) = rel_sides(&d);
        let pt = [q(p[0]), q(p[1]), q(p[2])];
        let want = e.dual(&pt, &q(p[3]), &q(p[4])).1;
        prop_assert_eq!(eval_expr(l, &env) - eval_expr(r, &env), want);
    }

    #[test]
    fn total_derivative_is_linear(a in ge_strategy(false), b in ge_strategy(false), c in -4i64..=4, p in point_strategy()) {
        let diff_of = |src: String| {
            let f = hypothesis_of(&format!("hypothesis {src} == 0;"));
            let d = total_diff(&f, "x").unwrap();
            let (l, r) = rel_sides(&d);
            let env = env_at(&p);
            eval_expr(l, &env) - eval_expr(r, &env)
        };
        let combined = diff_of(format!("{} + {c} * {}", a.text(), b.text()));
        prop_assert_eq!(combined, diff_of(a.text()) + q(c) * diff_of(b.text()));
    }

    #[test]
    fn abstraction_is_injective(a in ge_strategy(false), b in ge_strategy(false)) {
        let src = format!("assume f({}) > 0; assume f({}) < 1; hypothesis x + y + z > 0;", a.text(), b.text());
        let p = load(&src).unwrap();
        let terms = p.space.coordinates.iter().filter(|c| c.origin == Origin::AbstractedFunctionTerm).count();
        prop_assert_eq!(terms == 1, same_polynomial(&a, &b), "{}", src);
    }

    #[test]
    fn single_equals_is_always_e2(rels in prop::collection::vec(prop::sample::select(vec!["<", "==", "=", ">=", "!="]), 1..6)) {
        let atoms: Vec<String> = rels.iter().enumerate().map(|(i, r)| format!("x {r} {i}")).collect();
        let defs: String = (0..rels.len()).map(|i| format!("P{i} := y == {i};\n")).collect();
        let refs: Vec<String> = (0..rels.len()).map(|i| format!("P{i}")).collect();
        let src = format!("{defs}assume {};\nassume {};\nhypothesis x >= 0;", atoms.join(" && "), refs.join(" || "));
        let singles = rels.iter().filter(|r| **r == "=").count();
        match parse_source(&src) {
            Ok(_) => prop_assert_eq!(singles, 0),
            Err(e) => {
                let e2: Vec<_> = e.diagnostics.iter().filter(|d| d.code == Code::E2).collect();
                prop_assert_eq!(e2.len(), singles);
                prop_assert!(e2.iter().all(|d| &src[d.span.start..d.span.end] == "="));
            }
        }
    }
}
