use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{fmt_rational, Polynomial, Rational, RealAlgebraic, Var};
use crate::formula::{Formula, Relation};

use super::cad::{rational_above, rational_below, rational_between};

/// A semialgebraic subset of the real line, stored as its sorted boundary
/// points `r_1 < … < r_m` and the truth value of each of the `2m + 1`
/// cells `(−∞, r_1), {r_1}, (r_1, r_2), …, {r_m}, (r_m, ∞)`.
#[derive(Clone, Debug)]
pub struct OneVarSet {
    var: Var,
    roots: Vec<RealAlgebraic>,
    truth: Vec<bool>,
}

#[derive(Clone, Debug)]
enum Bound {
    Open(RealAlgebraic),
    Closed(RealAlgebraic),
}

/// A maximal run of cells separated from the next by a false sector:
/// bounds (`None` for infinite) plus excluded interior points.
#[derive(Clone, Debug)]
struct Hull {
    lower: Option<Bound>,
    upper: Option<Bound>,
    holes: Vec<RealAlgebraic>,
}

impl OneVarSet {
    pub fn new(var: Var, roots: Vec<RealAlgebraic>, truth: Vec<bool>) -> OneVarSet {
        assert_eq!(truth.len(), 2 * roots.len() + 1, "one truth value per cell");
        let mut s = OneVarSet { var, roots, truth };
        s.normalize();
        s
    }

    pub fn all(var: Var) -> OneVarSet {
        OneVarSet::new(var, Vec::new(), vec![true])
    }

    pub fn empty(var: Var) -> OneVarSet {
        OneVarSet::new(var, Vec::new(), vec![false])
    }

    /// `{x : x rel c}`
    pub fn compare(var: Var, rel: Relation, c: RealAlgebraic) -> OneVarSet {
        let t = |s: i32| rel.holds(s);
        OneVarSet::new(var, vec![c], vec![t(-1), t(0), t(1)])
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    pub fn roots(&self) -> &[RealAlgebraic] {
        &self.roots
    }

    pub fn is_empty(&self) -> bool {
        self.truth.iter().all(|t| !t)
    }

    pub fn is_all(&self) -> bool {
        self.truth.iter().all(|t| *t)
    }

    /// Drops boundary points whose removal does not change the set.
    fn normalize(&mut self) {
        let mut i = 0;
        while i < self.roots.len() {
            let (a, b, c) = (self.truth[2 * i], self.truth[2 * i + 1], self.truth[2 * i + 2]);
            if a == b && b == c {
                self.roots.remove(i);
                self.truth.drain(2 * i..2 * i + 2);
            } else {
                i += 1;
            }
        }
    }

    pub fn contains(&self, x: &RealAlgebraic) -> bool {
        for (i, r) in self.roots.iter().enumerate() {
            match x.cmp_exact(r) {
                Ordering::Less => return self.truth[2 * i],
                Ordering::Equal => return self.truth[2 * i + 1],
                Ordering::Greater => {}
            }
        }
        *self.truth.last().expect("at least one cell")
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.contains(&RealAlgebraic::Rational(q.clone()))
    }

    pub fn complement(&self) -> OneVarSet {
        OneVarSet::new(
            self.var.clone(),
            self.roots.clone(),
            self.truth.iter().map(|t| !t).collect(),
        )
    }

    /// Common refinement of two boundary sets, one sample per cell.
    fn merged_samples(&self, other: &OneVarSet) -> (Vec<RealAlgebraic>, Vec<RealAlgebraic>) {
        let mut roots: Vec<RealAlgebraic> = self.roots.iter().chain(other.roots.iter()).cloned().collect();
        roots.sort_by(|a, b| a.cmp_exact(b));
        roots.dedup_by(|a, b| a.cmp_exact(b) == Ordering::Equal);
        let samples = cell_samples(&roots);
        (roots, samples)
    }

    fn combine(&self, other: &OneVarSet, op: impl Fn(bool, bool) -> bool) -> OneVarSet {
        let (roots, samples) = self.merged_samples(other);
        let truth = samples
            .iter()
            .map(|s| op(self.contains(s), other.contains(s)))
            .collect();
        OneVarSet::new(self.var.clone(), roots, truth)
    }

    pub fn intersect(&self, other: &OneVarSet) -> OneVarSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &OneVarSet) -> OneVarSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn is_subset_of(&self, other: &OneVarSet) -> bool {
        self.combine(other, |a, b| !a || b).is_all()
    }

    pub fn same_set(&self, other: &OneVarSet) -> bool {
        self.combine(other, |a, b| a == b).is_all()
    }

    fn hulls(&self) -> Vec<Hull> {
        let m = self.roots.len();
        let mut out = Vec::new();
        let mut cur: Option<Hull> = None;
        for cell in 0..=2 * m {
            let is_sector = cell % 2 == 0;
            let t = self.truth[cell];
            match (&mut cur, t) {
                (None, true) => {
                    let lower = if cell == 0 {
                        None
                    } else if is_sector {
                        Some(Bound::Open(self.roots[cell / 2 - 1].clone()))
                    } else {
                        Some(Bound::Closed(self.roots[cell / 2].clone()))
                    };
                    cur = Some(Hull {
                        lower,
                        upper: None,
                        holes: Vec::new(),
                    });
                }
                (Some(_), true) => {}
                (Some(h), false) => {
                    if !is_sector && cell < 2 * m && self.truth[cell + 1] {
                        h.holes.push(self.roots[cell / 2].clone());
                        continue;
                    }
                    // closes before this cell
                    h.upper = Some(if is_sector {
                        Bound::Closed(self.roots[cell / 2 - 1].clone())
                    } else {
                        Bound::Open(self.roots[cell / 2].clone())
                    });
                    out.push(cur.take().expect("open hull"));
                }
                (None, false) => {}
            }
        }
        if let Some(h) = cur {
            out.push(h);
        }
        out
    }

    /// Surface rendering with the variable shown as `name`.
    pub fn render(&self, name: &str) -> String {
        if self.is_all() {
            return "True".into();
        }
        if self.is_empty() {
            return "False".into();
        }
        let hulls = self.hulls();
        let multi = hulls.len() > 1;
        let parts: Vec<String> = hulls
            .iter()
            .map(|h| {
                let conj = hull_conjuncts(h, name);
                if multi && conj.len() > 1 {
                    format!("({})", conj.join(" && "))
                } else {
                    conj.join(" && ")
                }
            })
            .collect();
        parts.join(" || ")
    }

    /// An equivalent Tarski formula in the set's variable.
    pub fn to_formula(&self) -> Formula {
        let x = Polynomial::var(self.var.clone());
        Formula::or(self.hulls().iter().map(|h| {
            let mut conj = Vec::new();
            match (&h.lower, &h.upper) {
                (Some(Bound::Closed(a)), Some(Bound::Closed(b))) if a.cmp_exact(b) == Ordering::Equal => {
                    conj.push(cmp_formula(&x, Relation::Eq, a));
                }
                _ => {
                    if let Some(l) = &h.lower {
                        conj.push(match l {
                            Bound::Open(a) => cmp_formula(&x, Relation::Gt, a),
                            Bound::Closed(a) => cmp_formula(&x, Relation::Ge, a),
                        });
                    }
                    if let Some(u) = &h.upper {
                        conj.push(match u {
                            Bound::Open(b) => cmp_formula(&x, Relation::Lt, b),
                            Bound::Closed(b) => cmp_formula(&x, Relation::Le, b),
                        });
                    }
                }
            }
            for p in &h.holes {
                conj.push(cmp_formula(&x, Relation::Ne, p));
            }
            Formula::and(conj)
        }))
    }

    /// Keeps only the bounds of a single-hull set that `context` does not
    /// already imply; the result is `True` when every bound is implied.
    pub fn relative_to(&self, context: &OneVarSet) -> OneVarSet {
        let hulls = self.hulls();
        if hulls.len() != 1 || !hulls[0].holes.is_empty() {
            return self.clone();
        }
        let h = &hulls[0];
        if let (Some(Bound::Closed(a)), Some(Bound::Closed(b))) = (&h.lower, &h.upper) {
            if a.cmp_exact(b) == Ordering::Equal {
                return self.clone();
            }
        }
        let mut out = OneVarSet::all(self.var.clone());
        for (bound, upper) in [(&h.lower, false), (&h.upper, true)] {
            let Some(b) = bound else { continue };
            let half = match (b, upper) {
                (Bound::Open(a), false) => OneVarSet::compare(self.var.clone(), Relation::Gt, a.clone()),
                (Bound::Closed(a), false) => OneVarSet::compare(self.var.clone(), Relation::Ge, a.clone()),
                (Bound::Open(a), true) => OneVarSet::compare(self.var.clone(), Relation::Lt, a.clone()),
                (Bound::Closed(a), true) => OneVarSet::compare(self.var.clone(), Relation::Le, a.clone()),
            };
            if !context.is_subset_of(&half) {
                out = out.intersect(&half);
            }
        }
        out
    }
}

impl fmt::Display for OneVarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(self.var.as_str()))
    }
}

fn show(a: &RealAlgebraic, var: &str) -> String {
    match a {
        RealAlgebraic::Rational(q) => fmt_rational(q),
        RealAlgebraic::Root(_) => format!("{} [≈ {}]", a.exact_string(var), a.approx_string()),
    }
}

fn hull_conjuncts(h: &Hull, name: &str) -> Vec<String> {
    let mut out = Vec::new();
    match (&h.lower, &h.upper) {
        (Some(Bound::Closed(a)), Some(Bound::Closed(b))) if a.cmp_exact(b) == Ordering::Equal => {
            out.push(format!("{name} == {}", show(a, name)));
        }
        (Some(l), None) => out.push(match l {
            Bound::Open(a) => format!("{name} > {}", show(a, name)),
            Bound::Closed(a) => format!("{name} >= {}", show(a, name)),
        }),
        (l, u) => {
            if let Some(l) = l {
                out.push(match l {
                    Bound::Open(a) => format!("{} < {name}", show(a, name)),
                    Bound::Closed(a) => format!("{} <= {name}", show(a, name)),
                });
            }
            if let Some(u) = u {
                out.push(match u {
                    Bound::Open(b) => format!("{name} < {}", show(b, name)),
                    Bound::Closed(b) => format!("{name} <= {}", show(b, name)),
                });
            }
        }
    }
    for p in &h.holes {
        out.push(format!("{name} != {}", show(p, name)));
    }
    out
}

/// `x rel α` as a Tarski formula. For an algebraic `α` isolated in
/// `(lo, hi)` by `p` with `s = sign p(hi)`, `x > α` is
/// `x >= hi || (x > lo && s·p(x) > 0)`, and similarly for the others.
fn cmp_formula(x: &Polynomial, rel: Relation, a: &RealAlgebraic) -> Formula {
    match a {
        RealAlgebraic::Rational(q) => Formula::atom(x - &Polynomial::constant(q.clone()), rel),
        RealAlgebraic::Root(_) => {
            let (lo, hi) = a.bounds();
            let d = a.defining_poly();
            let s = d.sign_at(&hi);
            let v = x.vars().into_iter().next().expect("variable");
            let mut p = d.to_poly(&v);
            if s < 0 {
                p = -p;
            }
            let lin = |r: Relation, c: &Rational| Formula::atom(x - &Polynomial::constant(c.clone()), r);
            let pa = |r: Relation| Formula::atom(p.clone(), r);
            match rel {
                Relation::Gt | Relation::Ge => Formula::or([
                    lin(Relation::Ge, &hi),
                    Formula::and([lin(Relation::Gt, &lo), pa(rel)]),
                ]),
                Relation::Lt | Relation::Le => Formula::or([
                    lin(Relation::Le, &lo),
                    Formula::and([lin(Relation::Lt, &hi), pa(rel)]),
                ]),
                Relation::Eq => Formula::and([lin(Relation::Gt, &lo), lin(Relation::Lt, &hi), pa(Relation::Eq)]),
                Relation::Ne => Formula::or([lin(Relation::Le, &lo), lin(Relation::Ge, &hi), pa(Relation::Ne)]),
            }
        }
    }
}

/// One sample per cell of the partition induced by sorted distinct `roots`.
pub(crate) fn cell_samples(roots: &[RealAlgebraic]) -> Vec<RealAlgebraic> {
    if roots.is_empty() {
        return vec![RealAlgebraic::Rational(Rational::from_integer(0.into()))];
    }
    let mut out = Vec::with_capacity(2 * roots.len() + 1);
    out.push(RealAlgebraic::Rational(rational_below(&roots[0])));
    for (i, r) in roots.iter().enumerate() {
        out.push(r.clone());
        let next = match roots.get(i + 1) {
            Some(n) => rational_between(r, n),
            None => rational_above(r),
        };
        out.push(RealAlgebraic::Rational(next));
    }
    out
}
