use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::Zero;
use sha2::{Digest, Sha256};

use super::ast::{Expr, SFormula};
use super::{
    AssumeStmt, Code, Coordinate, FrontendError, Lint, NamedFormula, Origin, ParseError, Span,
    Theory, TheoryProblem,
};
use crate::algebra::{bareiss_det, Polynomial, Var};
use crate::formula::{normalize_atom, Formula, Relation};

const MAX_VECTORS: usize = 4;

fn term_id(key: &str) -> String {
    let digest = Sha256::digest(key.as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("v{hex}")
}

fn invalid(msg: impl Into<String>, span: Span) -> Lint {
    Lint::new(Code::Error, msg, span)
}

struct Scalarizer<'a> {
    theory: &'a Theory,
    vectors: HashSet<&'a str>,
    reserved: HashSet<String>,
    registry: Vec<Coordinate>,
    by_key: HashMap<String, usize>,
    used_vectors: BTreeSet<String>,
}

impl<'a> Scalarizer<'a> {
    fn new(theory: &'a Theory) -> Self {
        let mut reserved: HashSet<String> = HashSet::new();
        reserved.extend(theory.scalars.iter().cloned());
        reserved.extend(theory.vectors.iter().cloned());
        reserved.extend(theory.functions.iter().cloned());
        reserved.extend(theory.definitions.iter().map(|d| d.name.clone()));
        Scalarizer {
            theory,
            vectors: theory.vectors.iter().map(String::as_str).collect(),
            reserved,
            registry: Vec::new(),
            by_key: HashMap::new(),
            used_vectors: BTreeSet::new(),
        }
    }

    /// Shared scalar for a canonical term, allocating an alias on first use.
    fn coordinate(&mut self, key: String, base: &str, origin: Origin) -> Var {
        if let Some(&i) = self.by_key.get(&key) {
            return Var::new(&self.registry[i].name);
        }
        let mut name = base.to_string();
        let mut k = 2;
        while self.reserved.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.reserved.insert(name.clone());
        self.by_key.insert(key.clone(), self.registry.len());
        self.registry.push(Coordinate {
            name: name.clone(),
            origin,
            id: term_id(&key),
            display: key,
        });
        Var::new(&name)
    }

    /// Canonical text of a polynomial argument: abstracted scalars are shown
    /// as the terms they stand for.
    fn canonical(&self, p: &Polynomial) -> String {
        let mut q = p.clone();
        for v in p.vars() {
            if let Some(c) = self.registry.iter().find(|c| c.name == v.as_str()) {
                q = q.rename(&v, &Var::new(&c.display));
            }
        }
        q.to_string()
    }

    fn gram(&mut self, a: &str, b: &str) -> Var {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.used_vectors.insert(a.to_string());
        self.used_vectors.insert(b.to_string());
        self.coordinate(format!("{a}.{b}"), &format!("g_{a}_{b}"), Origin::GramianEntry)
    }

    fn poly(&mut self, e: &Expr) -> Result<Polynomial, Lint> {
        Ok(match e {
            Expr::Num(q) => Polynomial::constant(q.clone()),
            Expr::Var(v, span) => {
                if self.vectors.contains(v.as_str()) {
                    return Err(invalid(
                        format!("vector {v} can only be used inside a dot product"),
                        *span,
                    ));
                }
                Polynomial::var(Var::new(v))
            }
            Expr::Neg(a) => -self.poly(a)?,
            Expr::Add(a, b) => &self.poly(a)? + &self.poly(b)?,
            Expr::Sub(a, b) => &self.poly(a)? - &self.poly(b)?,
            Expr::Mul(a, b) => &self.poly(a)? * &self.poly(b)?,
            Expr::Div(a, b, span) => {
                let num = self.poly(a)?;
                match self.poly(b)?.constant_value() {
                    Some(c) if !c.is_zero() => num.scale(&c.recip()),
                    _ => {
                        return Err(invalid(
                            "division is only supported by a nonzero constant",
                            *span,
                        ))
                    }
                }
            }
            Expr::Pow(a, n) => self.poly(a)?.pow(*n),
            Expr::Call {
                name, primes, args, ..
            } => {
                let mut parts = Vec::with_capacity(args.len());
                for a in args {
                    let p = self.poly(a)?;
                    parts.push(self.canonical(&p));
                }
                let key = format!("{name}{}({})", "'".repeat(*primes as usize), parts.join(", "));
                let base = name.chars().next().expect("identifier").to_ascii_lowercase().to_string();
                Polynomial::var(self.coordinate(key, &base, Origin::AbstractedFunctionTerm))
            }
            Expr::D { var, wrt, .. } => {
                let key = format!("D({var}, {wrt})");
                let base = wrt.chars().next().expect("identifier").to_ascii_lowercase().to_string();
                Polynomial::var(self.coordinate(key, &base, Origin::TotalDerivative))
            }
            Expr::Dot(a, b, _) => {
                let la = self.linear(a)?;
                let lb = self.linear(b)?;
                let mut acc = Polynomial::zero();
                for (ca, va) in &la {
                    for (cb, vb) in &lb {
                        let g = Polynomial::var(self.gram(va, vb));
                        acc = &acc + &(&(ca * cb) * &g);
                    }
                }
                acc
            }
        })
    }

    fn is_vector_expr(&self, e: &Expr) -> bool {
        match e {
            Expr::Var(v, _) => self.vectors.contains(v.as_str()),
            Expr::Neg(a) => self.is_vector_expr(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                self.is_vector_expr(a) || self.is_vector_expr(b)
            }
            Expr::Div(a, _, _) => self.is_vector_expr(a),
            _ => false,
        }
    }

    /// A vector expression as a list of (scalar coefficient, vector).
    fn linear(&mut self, e: &Expr) -> Result<Vec<(Polynomial, String)>, Lint> {
        let span_of = |e: &Expr| match e {
            Expr::Var(_, s) | Expr::Call { span: s, .. } | Expr::D { span: s, .. } => *s,
            Expr::Dot(_, _, s) | Expr::Div(_, _, s) => *s,
            _ => Span::default(),
        };
        Ok(match e {
            Expr::Var(v, span) => {
                if !self.vectors.contains(v.as_str()) {
                    return Err(invalid(format!("{v} is not a vector"), *span));
                }
                vec![(Polynomial::one(), v.clone())]
            }
            Expr::Neg(a) => self.linear(a)?.into_iter().map(|(c, v)| (-c, v)).collect(),
            Expr::Add(a, b) => {
                let mut l = self.linear(a)?;
                l.extend(self.linear(b)?);
                l
            }
            Expr::Sub(a, b) => {
                let mut l = self.linear(a)?;
                l.extend(self.linear(b)?.into_iter().map(|(c, v)| (-c, v)));
                l
            }
            Expr::Mul(a, b) => {
                let (vec_side, scalar_side) = match (self.is_vector_expr(a), self.is_vector_expr(b)) {
                    (true, false) => (a, b),
                    (false, true) => (b, a),
                    _ => {
                        return Err(invalid(
                            "a product inside a dot product needs exactly one vector factor",
                            span_of(e),
                        ))
                    }
                };
                let k = self.poly(scalar_side)?;
                self.linear(vec_side)?
                    .into_iter()
                    .map(|(c, v)| (&c * &k, v))
                    .collect()
            }
            Expr::Div(a, b, span) => {
                let Some(c) = self.poly(b)?.constant_value().filter(|c| !c.is_zero()) else {
                    return Err(invalid("division is only supported by a nonzero constant", *span));
                };
                self.linear(a)?
                    .into_iter()
                    .map(|(p, v)| (p.scale(&c.recip()), v))
                    .collect()
            }
            other => {
                return Err(invalid(
                    format!("{other} is not a vector expression"),
                    span_of(other),
                ))
            }
        })
    }

    fn formula(&mut self, f: &SFormula) -> Result<Formula, Lint> {
        Ok(match f {
            SFormula::Rel { lhs, rel, rhs, .. } => {
                let l = self.poly(lhs)?;
                let r = self.poly(rhs)?;
                normalize_atom(&l, *rel, &r)
            }
            SFormula::Ref(name, span) => {
                let def = self
                    .theory
                    .definition(name)
                    .ok_or_else(|| invalid(format!("unknown definition {name}"), *span))?;
                self.formula(&def.formula)?
            }
            SFormula::Not(g) => Formula::not(self.formula(g)?),
            SFormula::And(fs) => Formula::And(fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            SFormula::Or(fs) => Formula::Or(fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            SFormula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
        })
    }
}

/// Resolves a chain of bare references to the definition body.
fn resolve<'a>(th: &'a Theory, mut f: &'a SFormula) -> &'a SFormula {
    while let SFormula::Ref(name, _) = f {
        match th.definition(name) {
            Some(d) => f = &d.formula,
            None => break,
        }
    }
    f
}

/// Positive semi-definiteness of the Gramian of `vectors`: every principal
/// minor is nonnegative. Entries are named by `entry(a, b)` with `a <= b`.
pub fn gramian_conditions(
    vectors: &[String],
    mut entry: impl FnMut(&str, &str) -> Var,
) -> Vec<(String, Formula)> {
    let k = vectors.len();
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << k))
        .map(|m| (0..k).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .map(|s| {
            let m: Vec<Vec<Polynomial>> = s
                .iter()
                .map(|&i| {
                    s.iter()
                        .map(|&j| {
                            let (a, b) = (&vectors[i.min(j)], &vectors[i.max(j)]);
                            Polynomial::var(entry(a, b))
                        })
                        .collect()
                })
                .collect();
            let names: Vec<&str> = s.iter().map(|&i| vectors[i].as_str()).collect();
            let name = format!("gramian: minor{{{}}}", names.join(","));
            (name, Formula::atom(bareiss_det(m), Relation::Ge))
        })
        .collect()
}

/// Applies total differentiation, abstracts non-polynomial terms into
/// scalar coordinates, and appends the Gramian conditions.
pub fn scalarize(th: &Theory, lints: Vec<Lint>) -> Result<TheoryProblem, FrontendError> {
    let mut sc = Scalarizer::new(th);
    let mut assumptions = Vec::new();
    for a in &th.assumptions {
        let (name, surface) = match a {
            AssumeStmt::Formula(f) => {
                let name = match f {
                    SFormula::Ref(n, _) => Some(n.clone()),
                    _ => None,
                };
                (name, f.clone())
            }
            AssumeStmt::Total { name, wrt, span } => {
                let def = th
                    .definition(name)
                    .ok_or_else(|| ParseError::from(invalid(format!("unknown definition {name}"), *span)))?;
                let eq = resolve(th, &def.formula);
                let d = super::total_diff(eq, wrt).map_err(|(msg, sp)| {
                    ParseError::from(invalid(msg, sp.unwrap_or(*span)))
                })?;
                (Some(format!("total({name}, {wrt})")), d)
            }
        };
        let formula = sc.formula(&surface).map_err(ParseError::from)?;
        assumptions.push(NamedFormula {
            name,
            formula,
            source: surface.to_string(),
        });
    }
    let h = th.hypothesis.as_ref().expect("parser guarantees a hypothesis");
    let hypothesis = NamedFormula {
        name: match h {
            SFormula::Ref(n, _) => Some(n.clone()),
            _ => None,
        },
        formula: sc.formula(h).map_err(ParseError::from)?,
        source: h.to_string(),
    };
    let vectors: Vec<String> = sc.used_vectors.iter().cloned().collect();
    if vectors.len() > MAX_VECTORS {
        return Err(FrontendError::Resource(format!(
            "{} vectors appear in dot products; at most {MAX_VECTORS} are supported",
            vectors.len()
        )));
    }
    for (name, formula) in gramian_conditions(&vectors, |a, b| sc.gram(a, b)) {
        let source = formula.to_string();
        assumptions.push(NamedFormula {
            name: Some(name),
            formula,
            source,
        });
    }
    Ok(TheoryProblem::new(th, assumptions, hypothesis, sc.registry, lints))
}
