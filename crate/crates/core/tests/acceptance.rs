//! End-to-end acceptance checks, one PASS/FAIL line each. Runs without the
//! libtest harness so every line is printed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::sturm::sturm_count;
use common::*;
use econreason::algebra::{isolate_real_roots, Polynomial, Rational, UniPoly, Var};
use econreason::corpus::Corpus;
use econreason::engine::{classify, possibilities, sufficient, DiscardReason, Quadrant};
use econreason::formula::{Formula, Relation};
use econreason::frontend::{load, Code, TheoryProblem};
use econreason::qe::{decide, eliminate_linear, equivalent_in, QeConfig, QeError, Witness};
use num_bigint::BigInt;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn cfg() -> QeConfig {
    QeConfig::default().with_timeout(Duration::from_secs(60))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bundled(id: &str) -> String {
    Corpus::bundled().get(id).expect("bundled example").source.clone()
}

fn problem(id: &str) -> Result<TheoryProblem, String> {
    load(&bundled(id)).map_err(|e| format!("{id}: {e}"))
}

fn closure(f: Formula) -> Formula {
    let vars: Vec<Var> = f.free_vars().into_iter().collect();
    Formula::exists(vars, f)
}

fn satisfies(f: &Formula, w: &Witness) -> Result<bool, String> {
    f.eval_at(w).map_err(|e| e.to_string())
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn within(start: Instant, secs: f64, what: &str) -> Result<(), String> {
    let t = start.elapsed().as_secs_f64();
    ensure(t < secs, || format!("{what} took {t:.2}s, budget {secs}s"))
}

fn tax_incidence() -> Check {
    let start = Instant::now();
    let p = problem("tax_incidence")?;
    let v = classify(&p, &cfg()).map_err(|e| e.to_string())?;
    ensure(v.quadrant == Quadrant::True, || format!("verdict {}", v.quadrant.as_str()))?;
    let w = v.example.ok_or("no witness")?;
    for a in &p.assumptions {
        ensure(satisfies(&a.formula, &w)?, || format!("witness fails {}", a.source))?;
    }
    within(start, 5.0, "tax incidence")?;
    Ok(format!("True, witness satisfies {} assumptions", p.assumptions.len()))
}

fn univariate_deduction() -> Check {
    let p = problem("tax_incidence")?;
    let t = Var::new("t");
    let ps = possibilities(&p, Some(std::slice::from_ref(&t)), &cfg()).map_err(|e| e.to_string())?;
    let set = ps[0].result.clone()?;
    let target = Formula::and([
        Formula::atom(&Polynomial::var(t.clone()) + &Polynomial::from_int(1), Relation::Gt),
        Formula::atom(Polynomial::var(t.clone()), Relation::Lt),
    ]);
    ensure(equivalent_in(&set.to_formula(), &target, &t, &cfg()).map_err(|e| e.to_string())?, || {
        format!("engine equivalence rejects {set}")
    })?;
    let mut rng = StdRng::seed_from_u64(7);
    let mut points: Vec<Rational> = vec![rat(-1, 1), rat(0, 1), rat(-1, 2), rat(-1001, 1000), rat(1, 1000)];
    while points.len() < 1000 {
        let d = rng.gen_range(1..=1000);
        points.push(rat(rng.gen_range(-3 * d..=3 * d), d));
    }
    let formula = set.to_formula();
    for r in &points {
        let expected = *r > rat(-1, 1) && *r < rat(0, 1);
        ensure(set.contains_rational(r) == expected, || format!("set disagrees at {r}"))?;
        let pt = [(t.clone(), r.clone())].into_iter().collect();
        ensure(formula.eval_rational(&pt).map_err(|e| e.to_string())? == expected, || {
            format!("formula disagrees at {r}")
        })?;
    }
    Ok(format!("{set}, equivalent to -1 < t < 0 on 1000 rational points"))
}

fn missing_assumption() -> Check {
    let start = Instant::now();
    let src = bundled("tax_incidence_missing");
    let p = load(&src).map_err(|e| e.to_string())?;
    let v = classify(&p, &cfg()).map_err(|e| e.to_string())?;
    ensure(v.quadrant == Quadrant::Mixed, || format!("verdict {}", v.quadrant.as_str()))?;
    let cex = v.counterexample.ok_or("no counterexample")?;
    let refuted = Formula::and([p.assumptions_formula(), Formula::not(p.hypothesis.formula.clone())]);
    ensure(satisfies(&refuted, &cex)?, || "counterexample fails A and not H".into())?;

    let s = sufficient(&p, &cfg()).map_err(|e| e.to_string())?;
    ensure(s.suggestions.len() == 1, || format!("{} suggestions", s.suggestions.len()))?;
    let sug = &s.suggestions[0];
    ensure(sug.verified, || "suggestion not verified".into())?;
    let sv = Var::new("s");
    ensure(sug.variable == sv, || format!("suggestion on {}", sug.variable))?;
    let target = Formula::atom(Polynomial::var(sv.clone()), Relation::Ge);
    ensure(equivalent_in(&sug.formula.to_formula(), &target, &sv, &cfg()).map_err(|e| e.to_string())?, || {
        format!("suggestion {} is not s >= 0", sug.formula)
    })?;
    ensure(s.discarded.len() == 2, || format!("{} discarded", s.discarded.len()))?;
    ensure(
        s.discarded.contains(&(Var::new("t"), DiscardReason::SameAsHypothesis))
            && s.discarded.contains(&(Var::new("d"), DiscardReason::False)),
        || format!("discarded {:?}", s.discarded),
    )?;

    let added = format!("{src}\nassume {};\n", sug.source_form(&p));
    let p2 = load(&added).map_err(|e| e.to_string())?;
    let v2 = classify(&p2, &cfg()).map_err(|e| e.to_string())?;
    ensure(v2.quadrant == Quadrant::True, || format!("re-run gives {}", v2.quadrant.as_str()))?;
    within(start, 10.0, "missing assumption")?;
    Ok(format!("Mixed, suggestion {} verified, re-run True", sug.source_form(&p)))
}

fn quadrant_coverage() -> Check {
    let corpus = Corpus::bundled();
    let mut seen = Vec::new();
    for e in &corpus.examples {
        let p = load(&e.source).map_err(|err| format!("{}: {err}", e.id))?;
        let v = classify(&p, &cfg()).map_err(|err| format!("{}: {err}", e.id))?;
        if let Some(g) = corpus.golden.get(&e.id) {
            ensure(*g == v.quadrant, || format!("{}: {} vs golden {}", e.id, v.quadrant.as_str(), g.as_str()))?;
        }
        let (ex, cex) = (v.example.is_some(), v.counterexample.is_some());
        let shape = match v.quadrant {
            Quadrant::True => ex && !cex,
            Quadrant::False => !ex && cex,
            Quadrant::Mixed => ex && cex,
            Quadrant::ContradictoryAssumptions => !ex && !cex,
        };
        ensure(shape, || format!("{}: witness presence does not match {}", e.id, v.quadrant.as_str()))?;

        // three separate decisions, no reuse of witnesses
        let a = p.assumptions_formula();
        let h = p.hypothesis.formula.clone();
        let d = |f: Formula| decide(&closure(f), &cfg()).map(|d| d.truth).map_err(|err| err.to_string());
        let consistent = d(a.clone())?;
        let with_h = d(Formula::and([a.clone(), h.clone()]))?;
        let with_not_h = d(Formula::and([a, Formula::not(h)]))?;
        let independent = if consistent {
            Quadrant::from_presence(with_h, with_not_h)
        } else {
            Quadrant::ContradictoryAssumptions
        };
        ensure(independent == v.quadrant, || format!("{}: cross-check gives {}", e.id, independent.as_str()))?;
        seen.push(v.quadrant);
    }
    for q in [Quadrant::True, Quadrant::False, Quadrant::Mixed, Quadrant::ContradictoryAssumptions] {
        ensure(seen.contains(&q), || format!("no corpus file for {}", q.as_str()))?;
    }
    Ok(format!("{} files, all four quadrants, cross-checked", seen.len()))
}

fn gramian_soundness() -> Check {
    let start = Instant::now();
    let p = problem("cauchy_schwarz")?;
    ensure(p.vectors.len() == 2, || "expected two vectors".into())?;
    let v = classify(&p, &cfg()).map_err(|e| e.to_string())?;
    ensure(v.quadrant == Quadrant::True, || format!("verdict {}", v.quadrant.as_str()))?;
    let name = "gramian: minor{u,v}";
    let weaker = p.without_assumption(name);
    ensure(weaker.assumptions.len() + 1 == p.assumptions.len(), || format!("no assumption named {name}"))?;
    let v2 = classify(&weaker, &cfg()).map_err(|e| e.to_string())?;
    ensure(v2.quadrant == Quadrant::Mixed, || format!("without minor: {}", v2.quadrant.as_str()))?;
    within(start, 10.0, "Gramian")?;
    Ok("True; Mixed without the 2x2 minor".into())
}

enum Outcome {
    Decided(bool, Option<Witness>),
    Skipped,
}

fn decided(s: &Formula, c: &QeConfig) -> Result<Outcome, String> {
    match decide(s, c) {
        Ok(d) => Ok(Outcome::Decided(d.truth, d.witness)),
        Err(QeError::Resource { .. }) => Ok(Outcome::Skipped),
        Err(e) => Err(format!("{s}: {e}")),
    }
}

fn short() -> QeConfig {
    QeConfig::default().with_timeout(Duration::from_secs(20))
}

fn qe_suites() -> Check {
    let mut runner = TestRunner::deterministic();
    let mut rng = StdRng::seed_from_u64(11);

    // (a) decisions against a sampling oracle
    let strat = formula_strategy(3, 2);
    let (mut done, mut skipped) = (0, 0);
    while done < 200 {
        let f = strat.new_tree(&mut runner).unwrap().current();
        let s = exists_all(3, f.to_formula());
        match decided(&s, &short())? {
            Outcome::Skipped => skipped += 1,
            Outcome::Decided(truth, w) => {
                done += 1;
                if let Some(p) = sample_sat(&f, 10_000, &mut rng) {
                    ensure(truth, || format!("sampling found {p:?} for {s}"))?;
                }
                if truth {
                    let w = w.ok_or_else(|| format!("no witness for {s}"))?;
                    ensure(satisfies(&f.to_formula(), &w)?, || format!("witness fails {s}"))?;
                }
            }
        }
    }

    // (b) substitution against decomposition on linear formulas
    let lin = formula_strategy(3, 1);
    let cad_only = || QeConfig {
        use_vs: false,
        ..short()
    };
    let mut matched = 0;
    while matched < 200 {
        let f = lin.new_tree(&mut runner).unwrap().current();
        let mut g = f.to_formula();
        for i in 0..3 {
            g = eliminate_linear(&var(i), &g).map_err(|e| e.to_string())?;
        }
        ensure(g == Formula::True || g == Formula::False, || format!("not closed: {g}"))?;
        match decided(&exists_all(3, f.to_formula()), &cad_only())? {
            Outcome::Skipped => skipped += 1,
            Outcome::Decided(t, _) => {
                ensure(t == (g == Formula::True), || format!("disagree on {}", f.to_formula()))?;
                matched += 1;
            }
        }
    }

    // (c) truth does not depend on the variable order
    let mut orders = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    orders.push(vec![var(a), var(b), var(c)]);
                }
            }
        }
    }
    let mut suite = 0;
    while suite < 20 {
        let f = strat.new_tree(&mut runner).unwrap().current();
        let s = exists_all(3, f.to_formula());
        let mut truths = Vec::new();
        for o in &orders {
            let c = QeConfig {
                order: Some(o.clone()),
                ..cad_only()
            };
            match decided(&s, &c)? {
                Outcome::Decided(t, _) => truths.push(t),
                Outcome::Skipped => break,
            }
        }
        if truths.len() < orders.len() {
            skipped += 1;
            continue;
        }
        ensure(truths.iter().all(|t| *t == truths[0]), || format!("{s}: {truths:?}"))?;
        suite += 1;
    }
    Ok(format!("200 sampled, 200 linear, 20 x 6 orders; {skipped} skipped at resource limits"))
}

fn numerics() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let mut n = 0;
    while n < 500 {
        let deg = rng.gen_range(1..=6);
        let c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-10..=10)).collect();
        if c[1..].iter().all(|x| *x == 0) {
            continue;
        }
        let u = UniPoly::from_ints(&c);
        let roots = isolate_real_roots(&u).map_err(|e| e.to_string())?;
        let expected = sturm_count(u.coeffs(), None, None);
        ensure(roots.len() == expected, || format!("{c:?}: {} roots, Sturm {expected}", roots.len()))?;
        n += 1;
    }
    // every witness the engine reports on the corpus verifies exactly
    let mut checked = 0;
    for e in &Corpus::bundled().examples {
        let p = load(&e.source).map_err(|err| err.to_string())?;
        let v = classify(&p, &cfg()).map_err(|err| err.to_string())?;
        let a = p.assumptions_formula();
        let h = p.hypothesis.formula.clone();
        if let Some(w) = &v.example {
            ensure(satisfies(&Formula::and([a.clone(), h.clone()]), w)?, || format!("{}: example fails", e.id))?;
            checked += 1;
        }
        if let Some(w) = &v.counterexample {
            ensure(satisfies(&Formula::and([a, Formula::not(h)]), w)?, || format!("{}: counterexample fails", e.id))?;
            checked += 1;
        }
    }
    Ok(format!("500 polynomials match Sturm counts; {checked} corpus witnesses exact"))
}

fn expected_w1(src: &str) -> Option<Vec<String>> {
    let line = src.lines().find_map(|l| l.trim().strip_prefix("// expect-w1:"))?;
    let mut names: Vec<String> = line.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    names.sort();
    Some(names)
}

fn lints() -> Check {
    match load("scalars x;\nassume x = 0;\nhypothesis x >= 0;\n") {
        Err(econreason::frontend::FrontendError::Parse(p)) => {
            let e2 = p.diagnostics.iter().find(|d| d.code == Code::E2).ok_or("no E2")?;
            ensure(e2.span.line == 2 && e2.span.column == 10, || format!("E2 at {:?}", e2.span))?;
        }
        other => return Err(format!("expected E2, got {other:?}")),
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/lint_corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "econ"))
        .collect();
    files.sort();
    ensure(files.len() == 10, || format!("{} lint files", files.len()))?;
    for f in &files {
        let src = std::fs::read_to_string(f).map_err(|e| e.to_string())?;
        let want = expected_w1(&src).ok_or_else(|| format!("{} has no expect-w1 header", f.display()))?;
        let p = load(&src).map_err(|e| format!("{}: {e}", f.display()))?;
        let mut got: Vec<String> = p
            .lints
            .iter()
            .filter(|l| l.code == Code::W1)
            .map(|l| l.message.split_whitespace().nth(1).unwrap_or("").to_string())
            .collect();
        got.sort();
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        ensure(got == want, || format!("{name}: W1 on {got:?}, expected {want:?}"))?;
    }
    Ok("E2 on '=', W1 exact on 10 files".into())
}

type Named = (&'static str, fn() -> Check);

fn main() {
    let checks: [Named; 8] = [
        ("tax incidence", tax_incidence),
        ("univariate deduction", univariate_deduction),
        ("missing assumption", missing_assumption),
        ("quadrant coverage", quadrant_coverage),
        ("Gramian soundness", gramian_soundness),
        ("QE property suites", qe_suites),
        ("numerics", numerics),
        ("lints", lints),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<22} {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<22} {why} ({secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
