//! Classification of economic theorems by real quantifier elimination.
//!
//! A theory (assumptions and a hypothesis over real variables) is parsed by
//! [`frontend`], reduced to Tarski [`formula`]s over exact [`algebra`]
//! polynomials, and decided by the [`qe`] engine. [`engine`] maps the results
//! onto the four verdicts: True, False, Mixed, or contradictory assumptions.

pub mod algebra;
pub mod formula;
pub mod frontend;
pub mod qe;
pub mod engine;
pub mod report;
pub mod corpus;
