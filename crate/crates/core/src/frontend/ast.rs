use std::fmt;

use num_traits::{One, Signed, Zero};

use super::Span;
use crate::algebra::{fmt_rational, Rational};
use crate::formula::Relation;

/// Surface expression, before abstraction to polynomials.
#[derive(Clone, Debug)]
pub enum Expr {
    Num(Rational),
    Var(String, Span),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Span),
    Pow(Box<Expr>, u32),
    /// `f(args)`, or a derivative `f'(args)` when `primes > 0`.
    Call {
        name: String,
        primes: u32,
        args: Vec<Expr>,
        span: Span,
    },
    /// Total-derivative symbol `D(var, wrt)`.
    D {
        var: String,
        wrt: String,
        span: Span,
    },
    Dot(Box<Expr>, Box<Expr>, Span),
}

/// Surface formula.
#[derive(Clone, Debug)]
pub enum SFormula {
    Rel {
        lhs: Expr,
        rel: Relation,
        rhs: Expr,
        span: Span,
    },
    /// Reference to a named definition.
    Ref(String, Span),
    Not(Box<SFormula>),
    And(Vec<SFormula>),
    Or(Vec<SFormula>),
    Implies(Box<SFormula>, Box<SFormula>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn num(q: Rational) -> Expr {
        Expr::Num(q)
    }

    fn as_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(Zero::is_zero)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            a
        } else if a.is_zero() {
            Expr::neg(b)
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Num(q) => Expr::Num(-q),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::Num(Rational::zero());
        }
        if a.as_num().is_some_and(One::is_one) {
            return b;
        }
        if b.as_num().is_some_and(One::is_one) {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
            return Expr::Num(x * y);
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: u32) -> Expr {
        match e {
            0 => Expr::Num(Rational::one()),
            1 => a,
            _ => Expr::Pow(Box::new(a), e),
        }
    }

    /// Depth of nested function applications: `f(x)` is 1, `f(g(x))` is 2.
    pub fn call_depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(..) | Expr::D { .. } => 0,
            Expr::Neg(a) | Expr::Pow(a, _) => a.call_depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) | Expr::Dot(a, b, _) => {
                a.call_depth().max(b.call_depth())
            }
            Expr::Call { args, .. } => 1 + args.iter().map(Expr::call_depth).max().unwrap_or(0),
        }
    }

    /// Every identifier occurrence (scalars and vectors, including inside
    /// calls and `D(..)`), in source order.
    pub fn identifiers<'a>(&'a self, out: &mut Vec<(&'a str, Span)>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v, s) => out.push((v, *s)),
            Expr::Neg(a) | Expr::Pow(a, _) => a.identifiers(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) | Expr::Dot(a, b, _) => {
                a.identifiers(out);
                b.identifiers(out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.identifiers(out)),
            Expr::D { var, wrt, span } => {
                out.push((var, *span));
                out.push((wrt, *span));
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(q) if q.is_negative() || !q.is_integer() => 2,
            Expr::Pow(..) => 4,
            Expr::Dot(..) => 5,
            _ => 6,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => f.write_str(&fmt_rational(q)),
            Expr::Var(v, _) => f.write_str(v),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)
            }
            Expr::Add(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" + ")?;
                b.write_at(f, 1)
            }
            Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" - ")?;
                b.write_at(f, 2)
            }
            Expr::Mul(a, b) => {
                a.write_at(f, 2)?;
                f.write_str("*")?;
                b.write_at(f, 3)
            }
            Expr::Div(a, b, _) => {
                a.write_at(f, 2)?;
                f.write_str("/")?;
                b.write_at(f, 3)
            }
            Expr::Pow(a, e) => {
                a.write_at(f, 5)?;
                write!(f, "^{e}")
            }
            Expr::Call {
                name, primes, args, ..
            } => {
                write!(f, "{name}{}(", "'".repeat(*primes as usize))?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::D { var, wrt, .. } => write!(f, "D({var}, {wrt})"),
            Expr::Dot(a, b, _) => {
                a.write_at(f, 6)?;
                f.write_str(".")?;
                b.write_at(f, 6)
            }
        }
    }
}

impl SFormula {
    pub fn span(&self) -> Option<Span> {
        match self {
            SFormula::Rel { span, .. } | SFormula::Ref(_, span) => Some(*span),
            SFormula::Not(g) => g.span(),
            SFormula::And(fs) | SFormula::Or(fs) => fs.first().and_then(SFormula::span),
            SFormula::Implies(a, _) => a.span(),
        }
    }
}

fn write_sub(f: &mut fmt::Formatter<'_>, g: &SFormula) -> fmt::Result {
    match g {
        SFormula::Rel { .. } | SFormula::Ref(..) | SFormula::Not(_) => write!(f, "{g}"),
        _ => write!(f, "({g})"),
    }
}

impl fmt::Display for SFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SFormula::Rel { lhs, rel, rhs, .. } => write!(f, "{lhs} {} {rhs}", rel.symbol()),
            SFormula::Ref(n, _) => f.write_str(n),
            SFormula::Not(g) => {
                f.write_str("!")?;
                match **g {
                    SFormula::Ref(..) => write!(f, "{g}"),
                    _ => write!(f, "({g})"),
                }
            }
            SFormula::And(fs) | SFormula::Or(fs) => {
                let sep = if matches!(self, SFormula::And(_)) { " && " } else { " || " };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write_sub(f, g)?;
                }
                Ok(())
            }
            SFormula::Implies(a, b) => {
                write_sub(f, a)?;
                f.write_str(" ==> ")?;
                write_sub(f, b)
            }
        }
    }
}
