//! Human-readable output.

use std::collections::BTreeMap;
use std::fmt::Write;

use econreason::report::{Action, ResultDocument, WitnessValue};

use crate::Row;

fn ms(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"))
}

fn witness(out: &mut String, label: &str, w: &BTreeMap<String, WitnessValue>) {
    let _ = writeln!(out, "{label}:");
    for (k, v) in w {
        if v.exact == v.approx {
            let _ = writeln!(out, "  {k} = {}", v.exact);
        } else {
            let _ = writeln!(out, "  {k} = {}  (≈ {})", v.exact, v.approx);
        }
    }
}

fn display_name<'a>(doc: &'a ResultDocument, name: &'a str) -> &'a str {
    doc.space
        .iter()
        .find(|c| c.name == name)
        .map_or(name, |c| c.display.as_str())
}

pub fn document(action: &Action, doc: &ResultDocument) -> String {
    let mut out = String::new();
    for l in &doc.lints {
        let _ = writeln!(out, "warning {l}");
    }
    if let Some(v) = doc.verdict {
        let _ = writeln!(out, "Verdict: {}", v.as_str());
    }
    if matches!(action, Action::Analyze) {
        if let Some(w) = &doc.example {
            witness(&mut out, "Example", w);
        }
        if let Some(w) = &doc.counterexample {
            witness(&mut out, "Counterexample", w);
        }
    }
    if let Some(fs) = &doc.formulas {
        let sources = doc.source_formulas.clone().unwrap_or_default();
        for (v, f) in fs {
            let _ = writeln!(out, "{v}: {f}");
            if let Some(s) = sources.get(v).filter(|s| *s != f) {
                let _ = writeln!(out, "  as {s}");
            }
        }
    }
    if let Some(errs) = &doc.errors {
        for (v, e) in errs {
            let _ = writeln!(out, "{v}: failed ({e})");
        }
    }
    if let Some(ss) = &doc.suggestions {
        if ss.is_empty() {
            let _ = writeln!(out, "No suggestions.");
        }
        for s in ss {
            let tag = if s.verified { "verified" } else { "unverified" };
            let _ = writeln!(out, "Suggestion ({tag}): {}", s.source);
            if s.source != s.formula {
                let _ = writeln!(out, "  on {}: {}", s.variable, s.formula);
            }
        }
    }
    if let Some(ds) = &doc.discarded {
        for d in ds {
            let reason = match d.reason {
                econreason::engine::DiscardReason::False => "false",
                econreason::engine::DiscardReason::SameAsHypothesis => "same as the hypothesis",
            };
            let _ = writeln!(out, "Discarded {} ({}): {reason}", d.variable, display_name(doc, &d.variable));
        }
    }
    if matches!(action, Action::Space) {
        let w = doc.space.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(out, "{:<w$}  {:<24}  display", "name", "origin");
        for c in &doc.space {
            let _ = writeln!(out, "{:<w$}  {:<24}  {}", c.name, c.origin.as_str(), c.display);
        }
    }
    let _ = writeln!(out, "Stats:");
    let _ = writeln!(out, "  total        {} ms", ms(Some(doc.stats.total_ms)));
    if doc.verdict.is_some() && !doc.stats.calls.is_empty() {
        let _ = writeln!(out, "  existential  {} ms", ms(doc.stats.existential_ms));
        let _ = writeln!(out, "  universal    {} ms", ms(doc.stats.universal_ms));
    }
    let cells: usize = doc.stats.calls.iter().map(|c| c.cells).sum();
    if !doc.stats.calls.is_empty() {
        let _ = writeln!(out, "  qe calls     {} ({cells} cells)", doc.stats.calls.len());
    }
    out
}

pub fn timing_table(rows: &[Row]) -> String {
    let mut out = String::new();
    let w = rows.iter().map(|r| r.example.len()).max().unwrap_or(7).max(7);
    let _ = writeln!(
        out,
        "{:<w$}  {:>10}  {:>10}  {:>10}  verdict",
        "example", "total ms", "univ ms", "exist ms"
    );
    for r in rows {
        let verdict = match (&r.verdict, &r.error) {
            (Some(v), _) => v.clone(),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<w$}  {:>10}  {:>10}  {:>10}  {verdict}",
            r.example,
            ms(Some(r.total_ms)),
            ms(r.universal_ms),
            ms(r.existential_ms),
        );
    }
    out
}
