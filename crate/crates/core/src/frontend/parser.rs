use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive};

use super::ast::{Expr, SFormula};
use super::lexer::{tokenize, Tok, Token};
use super::{AssumeStmt, Code, Definition, Lint, ParseError, Span, Theory};
use crate::formula::Relation;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    errors: Vec<Lint>,
    defs: Vec<String>,
}

type PResult<T> = Result<T, Lint>;

fn syntax(msg: impl Into<String>, span: Span) -> Lint {
    Lint::new(Code::Syntax, msg, span)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(syntax(format!("expected '{s}', found {}", describe(self.peek())), self.span()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.advance().span;
                Ok((s, sp))
            }
            t => Err(syntax(format!("expected an identifier, found {}", describe(&t)), self.span())),
        }
    }

    fn program(&mut self) -> PResult<Theory> {
        let mut th = Theory::default();
        let mut hyp_span = None;
        while *self.peek() != Tok::Eof {
            let start = self.span();
            let Tok::Ident(word) = self.peek().clone() else {
                return Err(syntax(
                    format!("expected a statement, found {}", describe(self.peek())),
                    start,
                ));
            };
            let declares = matches!(word.as_str(), "scalars" | "vectors" | "functions")
                && matches!(self.peek_at(1), Tok::Ident(_));
            if declares {
                self.advance();
                let list = match word.as_str() {
                    "scalars" => &mut th.declared_scalars,
                    "vectors" => &mut th.declared_vectors,
                    _ => &mut th.declared_functions,
                };
                loop {
                    let (name, sp) = self.ident()?;
                    list.push((name, sp));
                    if !self.eat(",") {
                        break;
                    }
                }
            } else if matches!(self.peek_at(1), Tok::Sym(":=")) {
                let (name, sp) = self.ident()?;
                self.advance();
                if self.defs.contains(&name) {
                    return Err(syntax(format!("definition {name} is already defined"), sp));
                }
                let formula = self.formula()?;
                self.defs.push(name.clone());
                th.definitions.push(Definition {
                    name,
                    formula,
                    span: sp,
                });
            } else if word == "assume" {
                self.advance();
                if matches!(self.peek(), Tok::Ident(w) if w == "total") && matches!(self.peek_at(1), Tok::Sym("(")) {
                    let sp = self.advance().span;
                    self.advance();
                    let (name, nsp) = self.ident()?;
                    if !self.defs.contains(&name) {
                        return Err(syntax(format!("unknown definition {name}"), nsp));
                    }
                    self.expect(",")?;
                    let (wrt, wsp) = self.ident()?;
                    self.expect(")")?;
                    th.assumptions.push(AssumeStmt::Total {
                        name,
                        wrt,
                        span: sp.join(wsp),
                    });
                } else {
                    let f = self.formula()?;
                    th.assumptions.push(AssumeStmt::Formula(f));
                }
            } else if word == "hypothesis" {
                self.advance();
                let f = self.formula()?;
                if hyp_span.is_some() {
                    return Err(syntax("only one hypothesis is allowed", start));
                }
                hyp_span = Some(start);
                th.hypothesis = Some(f);
            } else {
                return Err(syntax(
                    format!("unknown statement '{word}'; expected scalars, vectors, functions, assume, hypothesis or Name := formula"),
                    start,
                ));
            }
            self.expect(";")?;
        }
        if th.hypothesis.is_none() {
            return Err(syntax("missing hypothesis statement", self.span()));
        }
        Ok(th)
    }

    fn formula(&mut self) -> PResult<SFormula> {
        let lhs = self.disjunction()?;
        if self.eat("==>") {
            let rhs = self.formula()?;
            return Ok(SFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<SFormula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat("||") {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one")
        } else {
            SFormula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> PResult<SFormula> {
        let mut parts = vec![self.negation()?];
        while self.eat("&&") {
            parts.push(self.negation()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one")
        } else {
            SFormula::And(parts)
        })
    }

    fn negation(&mut self) -> PResult<SFormula> {
        if self.eat("!") {
            return Ok(SFormula::Not(Box::new(self.negation()?)));
        }
        if self.is_sym("(") {
            let save = (self.pos, self.errors.len());
            self.advance();
            if let Ok(f) = self.formula() {
                if self.eat(")") && !self.continues_expression() {
                    return Ok(f);
                }
            }
            self.pos = save.0;
            self.errors.truncate(save.1);
        }
        self.relation()
    }

    fn continues_expression(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Sym("==" | "!=" | "<" | "<=" | ">" | ">=" | "=" | "+" | "-" | "*" | "/" | "^" | ".")
        )
    }

    fn relop(&mut self) -> Option<Relation> {
        let rel = match self.peek() {
            Tok::Sym("==") => Relation::Eq,
            Tok::Sym("!=") => Relation::Ne,
            Tok::Sym("<") => Relation::Lt,
            Tok::Sym("<=") => Relation::Le,
            Tok::Sym(">") => Relation::Gt,
            Tok::Sym(">=") => Relation::Ge,
            Tok::Sym("=") => {
                self.errors.push(Lint::new(
                    Code::E2,
                    "'=' is not a relation here; use == for equations",
                    self.span(),
                ));
                Relation::Eq
            }
            _ => return None,
        };
        self.advance();
        Some(rel)
    }

    fn relation(&mut self) -> PResult<SFormula> {
        let start = self.span();
        let mut lhs = self.expr()?;
        let mut rels = Vec::new();
        while let Some(rel) = self.relop() {
            let rhs = self.expr()?;
            rels.push(SFormula::Rel {
                lhs: lhs.clone(),
                rel,
                rhs: rhs.clone(),
                span: start.join(self.prev_span()),
            });
            lhs = rhs;
        }
        match rels.len() {
            0 => match &lhs {
                Expr::Var(name, sp) if self.defs.contains(name) => Ok(SFormula::Ref(name.clone(), *sp)),
                Expr::Var(name, sp) => Err(syntax(
                    format!("{name} is not a definition; expected a relation (==, !=, <, <=, >, >=)"),
                    *sp,
                )),
                _ => Err(syntax(
                    format!("expected a relation (==, !=, <, <=, >, >=), found {}", describe(self.peek())),
                    self.span(),
                )),
            },
            1 => Ok(rels.pop().expect("one")),
            _ => Ok(SFormula::And(rels)),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat("-") {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat("*") {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.is_sym("/") {
                let sp = self.advance().span;
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?), sp);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.dotted()?;
        if self.eat("^") {
            let sp = self.span();
            let Tok::Num(q) = self.peek().clone() else {
                return Err(syntax("exponent must be a nonnegative integer literal", sp));
            };
            self.advance();
            let e = if q.is_integer() && !q.is_negative() { q.to_integer().to_u32() } else { None };
            let Some(e) = e else {
                return Err(syntax("exponent must be a nonnegative integer literal", sp));
            };
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn dotted(&mut self) -> PResult<Expr> {
        let mut acc = self.atom()?;
        while self.is_sym(".") {
            let sp = self.advance().span;
            let rhs = self.atom()?;
            acc = Expr::Dot(Box::new(acc), Box::new(rhs), sp);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Num(q) => {
                self.advance();
                Ok(Expr::Num(q))
            }
            Tok::Sym("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let sp = self.advance().span;
                let mut primes = 0;
                while self.eat("'") {
                    primes += 1;
                }
                if !self.is_sym("(") {
                    if primes > 0 {
                        return Err(syntax(format!("derivative {name}' must be applied to an argument"), sp));
                    }
                    return Ok(Expr::Var(name, sp));
                }
                self.advance();
                if name == "D" && primes == 0 {
                    let (var, _) = self.ident()?;
                    self.expect(",")?;
                    let (wrt, _) = self.ident()?;
                    self.expect(")")?;
                    return Ok(Expr::D {
                        var,
                        wrt,
                        span: sp.join(self.prev_span()),
                    });
                }
                let mut args = vec![self.expr()?];
                while self.eat(",") {
                    args.push(self.expr()?);
                }
                self.expect(")")?;
                Ok(Expr::Call {
                    name,
                    primes,
                    args,
                    span: sp.join(self.prev_span()),
                })
            }
            t => Err(syntax(format!("expected an expression, found {}", describe(&t)), self.span())),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Num(_) => "a number".into(),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a theory file. `=` in formula position is reported as E2 (all
/// occurrences); any E-code or syntax error aborts.
pub fn parse_source(src: &str) -> Result<Theory, ParseError> {
    let toks = tokenize(src).map_err(|l| ParseError { diagnostics: vec![l] })?;
    let mut p = Parser {
        toks,
        pos: 0,
        errors: Vec::new(),
        defs: Vec::new(),
    };
    let result = p.program();
    let mut diagnostics = std::mem::take(&mut p.errors);
    match result {
        Ok(mut th) if diagnostics.is_empty() => {
            infer_kinds(&mut th).map_err(|l| ParseError { diagnostics: vec![l] })?;
            Ok(th)
        }
        Ok(_) => Err(ParseError { diagnostics }),
        Err(e) => {
            diagnostics.push(e);
            Err(ParseError { diagnostics })
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Scalar,
    Vector,
    Function,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Scalar => "scalar",
            Kind::Vector => "vector",
            Kind::Function => "function",
        }
    }
}

struct Kinds {
    map: HashMap<String, Kind>,
    order: Vec<String>,
    defs: Vec<String>,
}

impl Kinds {
    fn set(&mut self, name: &str, kind: Kind, span: Span) -> Result<(), Lint> {
        if self.defs.iter().any(|d| d == name) {
            return Err(syntax(format!("definition {name} cannot be used as a {}", kind.name()), span));
        }
        match self.map.get(name) {
            Some(k) if *k == kind => Ok(()),
            Some(k) => Err(syntax(format!("{name} is a {} but is used as a {}", k.name(), kind.name()), span)),
            None => {
                self.map.insert(name.to_string(), kind);
                self.order.push(name.to_string());
                Ok(())
            }
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<(), Lint> {
        match e {
            Expr::Num(_) => Ok(()),
            Expr::Var(v, sp) => {
                if self.map.get(v.as_str()) == Some(&Kind::Vector) {
                    Ok(())
                } else {
                    self.set(v, Kind::Scalar, *sp)
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) => self.expr(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                self.expr(a)?;
                self.expr(b)
            }
            Expr::Dot(a, b, _) => {
                for side in [a, b] {
                    if let Expr::Var(v, sp) = side.as_ref() {
                        self.set(v, Kind::Vector, *sp)?;
                    }
                }
                self.expr(a)?;
                self.expr(b)
            }
            Expr::Call { name, args, span, .. } => {
                self.set(name, Kind::Function, *span)?;
                args.iter().try_for_each(|a| self.expr(a))
            }
            Expr::D { var, wrt, span } => {
                self.set(var, Kind::Scalar, *span)?;
                self.set(wrt, Kind::Scalar, *span)
            }
        }
    }

    fn formula(&mut self, f: &SFormula) -> Result<(), Lint> {
        match f {
            SFormula::Rel { lhs, rhs, .. } => {
                self.expr(lhs)?;
                self.expr(rhs)
            }
            SFormula::Ref(..) => Ok(()),
            SFormula::Not(g) => self.formula(g),
            SFormula::And(fs) | SFormula::Or(fs) => fs.iter().try_for_each(|g| self.formula(g)),
            SFormula::Implies(a, b) => {
                self.formula(a)?;
                self.formula(b)
            }
        }
    }
}

/// Declared kinds first; then inference: applied identifiers are functions,
/// direct operands of `.` are vectors, everything else is a scalar.
fn infer_kinds(th: &mut Theory) -> Result<(), Lint> {
    let mut k = Kinds {
        map: HashMap::new(),
        order: Vec::new(),
        defs: th.definitions.iter().map(|d| d.name.clone()).collect(),
    };
    for (list, kind) in [
        (&th.declared_scalars, Kind::Scalar),
        (&th.declared_vectors, Kind::Vector),
        (&th.declared_functions, Kind::Function),
    ] {
        for (n, sp) in list {
            k.set(n, kind, *sp)?;
        }
    }
    // vectors first so that names inside vector expressions resolve
    let mut pre = Kinds {
        map: k.map.clone(),
        order: Vec::new(),
        defs: k.defs.clone(),
    };
    let mut dots = Vec::new();
    for f in th.formulas() {
        collect_dot_operands(f, &mut dots);
    }
    for (v, sp) in dots {
        pre.set(&v, Kind::Vector, sp)?;
        k.set(&v, Kind::Vector, sp)?;
    }
    let formulas: Vec<SFormula> = th.formulas().cloned().collect();
    for f in &formulas {
        k.formula(f)?;
    }
    for a in &th.assumptions {
        if let AssumeStmt::Total { wrt, span, .. } = a {
            k.set(wrt, Kind::Scalar, *span)?;
        }
    }
    for name in &k.order {
        match k.map[name] {
            Kind::Scalar => th.scalars.push(name.clone()),
            Kind::Vector => th.vectors.push(name.clone()),
            Kind::Function => th.functions.push(name.clone()),
        }
    }
    Ok(())
}

fn collect_dot_operands(f: &SFormula, out: &mut Vec<(String, Span)>) {
    fn expr(e: &Expr, out: &mut Vec<(String, Span)>) {
        match e {
            Expr::Dot(a, b, _) => {
                for side in [a, b] {
                    if let Expr::Var(v, sp) = side.as_ref() {
                        out.push((v.clone(), *sp));
                    }
                }
                expr(a, out);
                expr(b, out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => expr(a, out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                expr(a, out);
                expr(b, out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| expr(a, out)),
            _ => {}
        }
    }
    match f {
        SFormula::Rel { lhs, rhs, .. } => {
            expr(lhs, out);
            expr(rhs, out);
        }
        SFormula::Ref(..) => {}
        SFormula::Not(g) => collect_dot_operands(g, out),
        SFormula::And(fs) | SFormula::Or(fs) => fs.iter().for_each(|g| collect_dot_operands(g, out)),
        SFormula::Implies(a, b) => {
            collect_dot_operands(a, out);
            collect_dot_operands(b, out);
        }
    }
}
