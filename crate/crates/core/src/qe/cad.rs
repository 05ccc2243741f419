//! Cylindrical algebraic decomposition: Collins projection over a
//! square-free, gcd-free basis, and sample-point lifting with early exit.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Signed;

use super::{Budget, QeError, ResourceKind};
use crate::algebra::{
    content_in, eval_sign, gcd, psc, root_of_poly_at, simplest_between, squarefree_part, Polynomial, Rational,
    RealAlgebraic, SamplePoint, Var,
};
use crate::formula::{Atom, Formula, Quantifier};

/// Projection factors by level; `levels[k]` holds polynomials whose
/// highest variable in `order` is `order[k]`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub order: Vec<Var>,
    pub levels: Vec<Vec<Polynomial>>,
}

impl Projection {
    pub fn size(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Sum over factors of the degree in their main variable.
    pub fn total_degree(&self) -> u64 {
        self.levels
            .iter()
            .zip(&self.order)
            .map(|(ps, v)| ps.iter().map(|p| u64::from(p.degree(v))).sum::<u64>())
            .sum()
    }
}

struct Builder<'a> {
    order: &'a [Var],
    levels: Vec<Vec<Polynomial>>,
    limit: usize,
}

impl Builder<'_> {
    fn level_of(&self, p: &Polynomial) -> Option<usize> {
        let vars = p.vars();
        self.order
            .iter()
            .enumerate()
            .rev()
            .find(|(_, v)| vars.contains(*v))
            .map(|(i, _)| i)
    }

    fn size(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Adds the irreducible-enough parts of `p`, keeping each level
    /// square-free, primitive and pairwise coprime.
    fn insert(&mut self, p: Polynomial) -> Result<(), ResourceKind> {
        let mut work = vec![p];
        while let Some(p) = work.pop() {
            if p.is_constant() {
                continue;
            }
            let k = self.level_of(&p).expect("variables of p are in the order");
            let v = &self.order[k];
            let c = content_in(&p, v);
            let mut q = p;
            if !c.is_constant() {
                q = q.div_exact(&c).expect("content divides");
                work.push(c);
            }
            q = squarefree_part(&q, v);
            let mut absorbed = false;
            let mut i = 0;
            while i < self.levels[k].len() {
                if self.levels[k][i] == q {
                    absorbed = true;
                    break;
                }
                let g = gcd(&q, &self.levels[k][i]);
                if g.contains_var(v) {
                    let e = self.levels[k].remove(i);
                    let rest = e.div_exact(&g).expect("gcd divides");
                    q = q.div_exact(&g).expect("gcd divides");
                    work.push(rest);
                    work.push(g);
                    if !q.contains_var(v) {
                        work.push(q.clone());
                        absorbed = true;
                        break;
                    }
                    continue;
                }
                i += 1;
            }
            if !absorbed {
                self.levels[k].push(q);
                if self.size() > self.limit {
                    return Err(ResourceKind::Projection);
                }
            }
        }
        Ok(())
    }
}

/// Reducta of `f` in `v`, stopping after the first whose leading
/// coefficient is a nonzero constant.
fn reducta(f: &Polynomial, v: &Var) -> Vec<Polynomial> {
    let mut coeffs = f.to_univariate(v);
    let mut out = Vec::new();
    while coeffs.len() > 1 {
        let lc = coeffs.last().expect("nonempty").clone();
        if lc.is_zero() {
            coeffs.pop();
            continue;
        }
        out.push(Polynomial::from_univariate(v, &coeffs));
        if lc.is_constant() {
            break;
        }
        coeffs.pop();
    }
    out
}

/// Collins projection of `polys` with respect to `order` (lowest level
/// first). Fails when more than `limit` factors accumulate.
pub fn project(
    polys: &[Polynomial],
    order: &[Var],
    limit: usize,
    budget: Option<&Budget>,
) -> Result<Projection, QeError> {
    let mut b = Builder {
        order,
        levels: vec![Vec::new(); order.len()],
        limit,
    };
    let fail = |k: ResourceKind, b: &Builder| -> QeError {
        let mut stats = budget.map(|b| b.stats.clone()).unwrap_or_default();
        stats.projection_polys = b.size();
        QeError::Resource { kind: k, stats }
    };
    for p in polys {
        b.insert(p.clone()).map_err(|k| fail(k, &b))?;
    }
    for k in (1..order.len()).rev() {
        let v = &order[k];
        let level = b.levels[k].clone();
        let reds: Vec<Vec<Polynomial>> = level.iter().map(|f| reducta(f, v)).collect();
        let mut derived = Vec::new();
        for rs in &reds {
            for g in rs {
                derived.push(g.leading_coeff_in(v));
                let dg = g.derivative(v);
                let n = g.degree(v) as usize;
                for j in 0..n.saturating_sub(1) {
                    derived.push(psc(g, &dg, v, j));
                }
            }
        }
        for i in 0..reds.len() {
            for j in i + 1..reds.len() {
                for g1 in &reds[i] {
                    for g2 in &reds[j] {
                        let m = g1.degree(v).min(g2.degree(v)) as usize;
                        for l in 0..m {
                            derived.push(psc(g1, g2, v, l));
                        }
                    }
                }
            }
        }
        for p in derived {
            if let Some(bu) = budget {
                bu.check_time().map_err(|e| match e {
                    QeError::Resource { kind, .. } => fail(kind, &b),
                    e => e,
                })?;
            }
            b.insert(p).map_err(|k| fail(k, &b))?;
        }
    }
    Ok(Projection {
        order: order.to_vec(),
        levels: b.levels,
    })
}

fn bound_for_below(r: &RealAlgebraic) -> Rational {
    match r {
        RealAlgebraic::Rational(q) => q.clone(),
        RealAlgebraic::Root(_) => r.bounds().0,
    }
}

fn bound_for_above(r: &RealAlgebraic) -> Rational {
    match r {
        RealAlgebraic::Rational(q) => q.clone(),
        RealAlgebraic::Root(_) => r.bounds().1,
    }
}

/// A simple rational strictly below `r`.
pub fn rational_below(r: &RealAlgebraic) -> Rational {
    let b = bound_for_below(r);
    let lo = &b - b.abs() - Rational::from_integer(2.into());
    simplest_between(&lo, &b)
}

/// A simple rational strictly above `r`.
pub fn rational_above(r: &RealAlgebraic) -> Rational {
    let b = bound_for_above(r);
    let hi = &b + b.abs() + Rational::from_integer(2.into());
    simplest_between(&b, &hi)
}

/// A simple rational strictly between `a < b`.
pub fn rational_between(a: &RealAlgebraic, b: &RealAlgebraic) -> Rational {
    let mut a = a.clone();
    let mut b = b.clone();
    loop {
        let ahi = bound_for_above(&a);
        let blo = bound_for_below(&b);
        match ahi.cmp(&blo) {
            Ordering::Less => return simplest_between(&ahi, &blo),
            Ordering::Equal if !a.is_rational() && !b.is_rational() => return ahi,
            _ => {}
        }
        let half = |x: &RealAlgebraic| {
            let (lo, hi) = x.bounds();
            let w = (hi - lo) / Rational::from_integer(2.into());
            if w.is_positive() {
                x.refine(&w)
            } else {
                x.clone()
            }
        };
        a = half(&a);
        b = half(&b);

    }
}

/// Real roots of the level-`k` factors above `sample`, sorted and distinct.
fn section_roots(polys: &[Polynomial], v: &Var, sample: &SamplePoint) -> Result<Vec<RealAlgebraic>, QeError> {
    let mut roots: Vec<RealAlgebraic> = Vec::new();
    for p in polys {
        // nullified factors impose no sections over this cell
        if let Some(rs) = root_of_poly_at(p, v, sample)? {
            roots.extend(rs);
        }
    }
    roots.sort_by(|a, b| a.cmp_exact(b));
    roots.dedup_by(|a, b| a.cmp_exact(b) == Ordering::Equal);
    Ok(roots)
}

/// `f` with every atom whose variables are all in `known` folded to a
/// truth value at `sample`.
pub fn residual(f: &Formula, known: &BTreeSet<Var>, sample: &SamplePoint) -> Result<Formula, QeError> {
    let mut err = None;
    let out = f.map_atoms(&mut |a: &Atom| {
        if a.poly().vars().iter().all(|v| known.contains(v)) {
            match eval_sign(a.poly(), sample) {
                Ok(s) => Formula::constant(a.relation().holds(s)),
                Err(e) => {
                    err = Some(e);
                    Formula::False
                }
            }
        } else {
            Formula::Atom(a.clone())
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// Cell samples over the current sample in exploration order (sectors
/// first, then sections), tagged with their position `2i` / `2i + 1`.
fn ordered_cells(roots: &[RealAlgebraic]) -> Vec<(usize, RealAlgebraic)> {
    let all = super::onevar::cell_samples(roots);
    let mut cells: Vec<(usize, RealAlgebraic)> = all.into_iter().enumerate().collect();
    cells.sort_by_key(|(i, _)| i % 2);
    cells
}

pub(crate) struct Lifter<'a> {
    pub proj: &'a Projection,
    /// Quantifier per level; `None` for free variables.
    pub quants: &'a [Option<Quantifier>],
    pub budget: &'a mut Budget,
}

impl Lifter<'_> {
    fn known(&self, upto: usize) -> BTreeSet<Var> {
        self.proj.order[..upto].iter().cloned().collect()
    }

    /// Truth of the sentence with levels `< k` fixed by `sample`; `f` is
    /// already residual. On an existential success the witnessing
    /// coordinates are left in `sample`.
    pub fn lift(&mut self, k: usize, sample: &mut SamplePoint, f: &Formula) -> Result<bool, QeError> {
        match f {
            Formula::True => return Ok(true),
            Formula::False => return Ok(false),
            _ => {}
        }
        let order = &self.proj.order;
        if k >= order.len() {
            return Err(QeError::Unsupported(format!("formula has unassigned variables: {f}")));
        }
        let v = order[k].clone();
        for w in &order[k..] {
            sample.remove(w);
        }
        let roots = section_roots(&self.proj.levels[k], &v, sample)?;
        let known = self.known(k + 1);
        let q = self.quants[k].unwrap_or(Quantifier::Exists);
        for (_, val) in ordered_cells(&roots) {
            self.budget.tick()?;
            sample.insert(v.clone(), val);
            let r = residual(f, &known, sample)?;
            let t = self.lift(k + 1, sample, &r)?;
            match q {
                Quantifier::Exists if t => return Ok(true),
                Quantifier::Forall if !t => return Ok(false),
                _ => {}
            }
        }
        sample.remove(&v);
        Ok(q == Quantifier::Forall)
    }

    /// Truth value on every cell of the level-0 decomposition, in
    /// increasing order, together with the boundary points.
    pub fn lift_free(&mut self, f: &Formula) -> Result<(Vec<RealAlgebraic>, Vec<bool>), QeError> {
        let v = self.proj.order[0].clone();
        let roots = section_roots(&self.proj.levels[0], &v, &SamplePoint::new())?;
        let mut truth = vec![false; 2 * roots.len() + 1];
        let known = self.known(1);
        for (i, val) in ordered_cells(&roots) {
            self.budget.tick()?;
            let mut sample = SamplePoint::new();
            sample.insert(v.clone(), val);
            let r = residual(f, &known, &sample)?;
            truth[i] = self.lift(1, &mut sample, &r)?;
        }
        Ok((roots, truth))
    }
}

/// A value of `x` satisfying quantifier-free `f` once the other variables
/// are fixed by `point`, or `None` if there is none.
pub fn solve_at(
    f: &Formula,
    x: &Var,
    point: &SamplePoint,
    budget: &mut Budget,
) -> Result<Option<RealAlgebraic>, QeError> {
    let mut known: BTreeSet<Var> = point.keys().cloned().collect();
    known.insert(x.clone());
    let polys: Vec<Polynomial> = f
        .polynomials()
        .into_iter()
        .filter(|p| p.contains_var(x))
        .collect();
    let roots = section_roots(&polys, x, point)?;
    for (_, val) in ordered_cells(&roots) {
        budget.tick()?;
        let mut pt = point.clone();
        pt.insert(x.clone(), val.clone());
        if residual(f, &known, &pt)? == Formula::True {
            return Ok(Some(val));
        }
    }
    Ok(None)
}
