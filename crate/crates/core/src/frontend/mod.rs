//! Theory files: parsing, lints, total differentiation, abstraction of
//! non-polynomial terms into scalar coordinates, and Gramian augmentation.

mod abstraction;
pub mod ast;
mod diff;
mod lexer;
mod lint;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Var;
use crate::formula::Formula;

pub use abstraction::{gramian_conditions, scalarize};
pub use ast::{Expr, SFormula};
pub use diff::total_diff;
pub use lint::lint;
pub use parser::parse_source;

/// Byte range plus 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub fn join(self, other: Span) -> Span {
        Span {
            end: other.end.max(self.end),
            ..self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Code {
    /// Variable with a single occurrence.
    W1,
    /// `=` used where a relation is expected.
    E2,
    /// Definition never referenced.
    W3,
    #[serde(rename = "syntax")]
    Syntax,
    #[serde(rename = "error")]
    Error,
}

impl Code {
    pub fn is_error(self) -> bool {
        !matches!(self, Code::W1 | Code::W3)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Code::W1 => "W1",
            Code::E2 => "E2",
            Code::W3 => "W3",
            Code::Syntax => "syntax",
            Code::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lint {
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Lint {
    pub fn new(code: Code, message: impl Into<String>, span: Span) -> Lint {
        Lint {
            code,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for Lint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {} {}",
            self.span.line,
            self.span.column,
            self.code.as_str(),
            self.message
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct ParseError {
    pub diagnostics: Vec<Lint>,
}

impl From<Lint> for ParseError {
    fn from(l: Lint) -> Self {
        ParseError {
            diagnostics: vec![l],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("resource limit: {0}")]
    Resource(String),
}

#[derive(Clone, Debug)]
pub struct Definition {
    pub name: String,
    pub formula: SFormula,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum AssumeStmt {
    Formula(SFormula),
    /// `assume total(Name, wrt)`
    Total { name: String, wrt: String, span: Span },
}

/// A parsed theory file, before any preprocessing.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    pub declared_scalars: Vec<(String, Span)>,
    pub declared_vectors: Vec<(String, Span)>,
    pub declared_functions: Vec<(String, Span)>,
    /// Declared and inferred identifiers, declarations first.
    pub scalars: Vec<String>,
    pub vectors: Vec<String>,
    pub functions: Vec<String>,
    pub definitions: Vec<Definition>,
    pub assumptions: Vec<AssumeStmt>,
    pub hypothesis: Option<SFormula>,
}

impl Theory {
    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.name == name)
    }

    /// Every surface formula: definitions, assumptions, hypothesis.
    pub fn formulas(&self) -> impl Iterator<Item = &SFormula> {
        self.definitions
            .iter()
            .map(|d| &d.formula)
            .chain(self.assumptions.iter().filter_map(|a| match a {
                AssumeStmt::Formula(f) => Some(f),
                AssumeStmt::Total { .. } => None,
            }))
            .chain(self.hypothesis.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    #[serde(rename = "user-scalar")]
    UserScalar,
    #[serde(rename = "total-derivative")]
    TotalDerivative,
    #[serde(rename = "abstracted-function-term")]
    AbstractedFunctionTerm,
    #[serde(rename = "gramian-entry")]
    GramianEntry,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::UserScalar => "user-scalar",
            Origin::TotalDerivative => "total-derivative",
            Origin::AbstractedFunctionTerm => "abstracted-function-term",
            Origin::GramianEntry => "gramian-entry",
        }
    }
}

/// A scalar coordinate of the problem space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coordinate {
    pub name: String,
    pub origin: Origin,
    /// The pre-abstraction term, e.g. `demand'(price + tax)`.
    pub display: String,
    /// Stable identifier hashed from the canonical term.
    #[serde(skip)]
    pub id: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpaceReport {
    pub coordinates: Vec<Coordinate>,
}

impl SpaceReport {
    pub fn get(&self, name: &str) -> Option<&Coordinate> {
        self.coordinates.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFormula {
    pub name: Option<String>,
    pub formula: Formula,
    /// Surface text before abstraction.
    pub source: String,
}

/// A fully scalarized problem: polynomial assumptions and hypothesis.
#[derive(Clone, Debug)]
pub struct TheoryProblem {
    pub scalars: Vec<String>,
    pub vectors: Vec<String>,
    pub functions: Vec<String>,
    pub definitions: Vec<String>,
    pub assumptions: Vec<NamedFormula>,
    pub hypothesis: NamedFormula,
    pub space: SpaceReport,
    pub lints: Vec<Lint>,
    registry: Vec<Coordinate>,
}

impl TheoryProblem {
    pub(crate) fn new(
        theory: &Theory,
        assumptions: Vec<NamedFormula>,
        hypothesis: NamedFormula,
        registry: Vec<Coordinate>,
        lints: Vec<Lint>,
    ) -> TheoryProblem {
        let mut p = TheoryProblem {
            scalars: theory.scalars.clone(),
            vectors: theory.vectors.clone(),
            functions: theory.functions.clone(),
            definitions: theory.definitions.iter().map(|d| d.name.clone()).collect(),
            assumptions,
            hypothesis,
            space: SpaceReport::default(),
            lints,
            registry,
        };
        p.refresh_space();
        p
    }

    fn refresh_space(&mut self) {
        let free = self.free_vars();
        let mut coords: Vec<Coordinate> = free
            .iter()
            .map(|v| {
                self.registry
                    .iter()
                    .find(|c| c.name == v.as_str())
                    .cloned()
                    .unwrap_or_else(|| Coordinate {
                        name: v.to_string(),
                        origin: Origin::UserScalar,
                        display: v.to_string(),
                        id: v.to_string(),
                    })
            })
            .collect();
        coords.sort_by(|a, b| a.name.cmp(&b.name));
        self.space = SpaceReport {
            coordinates: coords,
        };
    }

    /// The conjunction of all assumptions.
    pub fn assumptions_formula(&self) -> Formula {
        Formula::and(self.assumptions.iter().map(|a| a.formula.clone()))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut vs = self.hypothesis.formula.free_vars();
        for a in &self.assumptions {
            vs.extend(a.formula.free_vars());
        }
        vs
    }

    pub fn coordinates(&self) -> Vec<Var> {
        self.space
            .coordinates
            .iter()
            .map(|c| Var::new(&c.name))
            .collect()
    }

    /// Display form of a coordinate (the pre-abstraction term).
    pub fn display_of(&self, name: &str) -> Option<&str> {
        self.space.get(name).map(|c| c.display.as_str())
    }

    /// Copy without the named assumption(s).
    pub fn without_assumption(&self, name: &str) -> TheoryProblem {
        let mut p = self.clone();
        p.assumptions.retain(|a| a.name.as_deref() != Some(name));
        p.refresh_space();
        p
    }

    /// Copy with an extra scalarized assumption.
    pub fn with_assumption(&self, formula: Formula, source: String) -> TheoryProblem {
        let mut p = self.clone();
        p.assumptions.push(NamedFormula {
            name: None,
            formula,
            source,
        });
        p.refresh_space();
        p
    }
}

/// Parse, lint, and scalarize a theory file.
pub fn load(src: &str) -> Result<TheoryProblem, FrontendError> {
    let theory = parse_source(src)?;
    let lints = lint(&theory);
    scalarize(&theory, lints)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TAX: &str = "functions demand, supply;
scalars price, tax;
Equilibrium := demand(price + tax) == supply(price);
assume total(Equilibrium, tax);
assume demand'(price + tax) < 0;
assume supply'(price) > 0;
hypothesis D(price, tax) <= 0;
";

    #[test]
    fn tax_problem_scalarizes() {
        let p = load(TAX).unwrap();
        assert!(p.lints.is_empty(), "{:?}", p.lints);
        let got: Vec<String> = p.assumptions.iter().map(|a| a.formula.to_string()).collect();
        assert_eq!(got, vec!["d*t - s*t + d == 0", "d < 0", "s > 0"]);
        assert_eq!(p.hypothesis.formula.to_string(), "t <= 0");
        let space: Vec<(&str, Origin, &str)> = p
            .space
            .coordinates
            .iter()
            .map(|c| (c.name.as_str(), c.origin, c.display.as_str()))
            .collect();
        assert_eq!(
            space,
            vec![
                ("d", Origin::AbstractedFunctionTerm, "demand'(price + tax)"),
                ("s", Origin::AbstractedFunctionTerm, "supply'(price)"),
                ("t", Origin::TotalDerivative, "D(price, tax)"),
            ]
        );
    }

    #[test]
    fn pure_scalar_space() {
        let p = load("assume x > 0; hypothesis x + y > 0;").unwrap();
        assert!(p
            .space
            .coordinates
            .iter()
            .all(|c| c.origin == Origin::UserScalar));
        assert_eq!(p.space.coordinates.len(), 2);
    }

    #[test]
    fn two_vector_space_has_three_gramian_entries() {
        let p = load("vectors u, v; hypothesis (u.v)^2 <= (u.u)*(v.v);").unwrap();
        let g: Vec<&str> = p
            .space
            .coordinates
            .iter()
            .filter(|c| c.origin == Origin::GramianEntry)
            .map(|c| c.display.as_str())
            .collect();
        assert_eq!(g, vec!["u.u", "u.v", "v.v"]);
        assert_eq!(p.assumptions.len(), 3);
    }
}
