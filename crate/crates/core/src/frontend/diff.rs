use num_traits::{One, Zero};

use super::ast::{Expr, SFormula};
use super::Span;
use crate::algebra::Rational;
use crate::formula::Relation;

/// Total derivative of an equation with respect to `wrt`: every other
/// scalar `v` becomes a function of `wrt` with derivative `D(v, wrt)`, and
/// unknown functions pick up `f'(arg)·arg'` by the chain rule.
pub fn total_diff(eq: &SFormula, wrt: &str) -> Result<SFormula, (String, Option<Span>)> {
    let SFormula::Rel { lhs, rel, rhs, span } = eq else {
        return Err(("total differentiation needs a single equation".into(), eq.span()));
    };
    if *rel != Relation::Eq {
        return Err((
            format!("total differentiation needs an equation, not a '{}' relation", rel.symbol()),
            Some(*span),
        ));
    }
    for side in [lhs, rhs] {
        if side.call_depth() > 2 {
            return Err((
                "function compositions nested more than two deep cannot be totally differentiated".into(),
                Some(*span),
            ));
        }
    }
    Ok(SFormula::Rel {
        lhs: d(lhs, wrt).map_err(|m| (m, Some(*span)))?,
        rel: Relation::Eq,
        rhs: d(rhs, wrt).map_err(|m| (m, Some(*span)))?,
        span: *span,
    })
}

fn d(e: &Expr, wrt: &str) -> Result<Expr, String> {
    Ok(match e {
        Expr::Num(_) => Expr::Num(Rational::zero()),
        Expr::Var(v, span) => {
            if v == wrt {
                Expr::Num(Rational::one())
            } else {
                Expr::D {
                    var: v.clone(),
                    wrt: wrt.to_string(),
                    span: *span,
                }
            }
        }
        Expr::Neg(a) => Expr::neg(d(a, wrt)?),
        Expr::Add(a, b) => Expr::add(d(a, wrt)?, d(b, wrt)?),
        Expr::Sub(a, b) => Expr::sub(d(a, wrt)?, d(b, wrt)?),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(d(a, wrt)?, (**b).clone()),
            Expr::mul((**a).clone(), d(b, wrt)?),
        ),
        Expr::Div(a, b, span) => {
            let db = d(b, wrt)?;
            if db.is_zero() {
                Expr::Div(Box::new(d(a, wrt)?), b.clone(), *span)
            } else {
                let num = Expr::sub(
                    Expr::mul(d(a, wrt)?, (**b).clone()),
                    Expr::mul((**a).clone(), db),
                );
                Expr::Div(Box::new(num), Box::new(Expr::pow((**b).clone(), 2)), *span)
            }
        }
        Expr::Pow(a, n) => {
            if *n == 0 {
                return Ok(Expr::Num(Rational::zero()));
            }
            let k = Expr::Num(Rational::from_integer((*n).into()));
            Expr::mul(Expr::mul(k, Expr::pow((**a).clone(), n - 1)), d(a, wrt)?)
        }
        Expr::Call {
            name,
            primes,
            args,
            span,
        } => {
            if args.len() != 1 {
                return Err(format!(
                    "total differentiation of the multi-argument function {name} is not supported"
                ));
            }
            let outer = Expr::Call {
                name: name.clone(),
                primes: primes + 1,
                args: args.clone(),
                span: *span,
            };
            Expr::mul(outer, d(&args[0], wrt)?)
        }
        Expr::D { .. } => {
            return Err(format!("{e} cannot be totally differentiated"));
        }
        Expr::Dot(..) => {
            return Err("dot products cannot be totally differentiated".into());
        }
    })
}
