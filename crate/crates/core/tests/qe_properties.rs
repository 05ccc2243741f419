mod common;

use common::*;
use econreason::algebra::{RealAlgebraic, Var};
use econreason::formula::{negate, Formula, Quantifier};
use std::time::Duration;

use econreason::qe::{decide, eliminate_linear, qe_one_var, Decision, QeConfig, QeError};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn cfg() -> QeConfig {
    QeConfig::default().with_timeout(Duration::from_secs(30))
}

fn cad_only() -> QeConfig {
    QeConfig {
        use_vs: false,
        ..cfg()
    }
}

/// Random sentences occasionally land on a very expensive decomposition;
/// those cases are discarded rather than allowed to stall the suite.
fn decided(s: &Formula, c: &QeConfig) -> Result<Decision, TestCaseError> {
    match decide(s, c) {
        Ok(d) => Ok(d),
        Err(QeError::Resource { .. }) => Err(TestCaseError::reject("resource limit")),
        Err(e) => panic!("{s}: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn decide_agrees_with_sampling(f in formula_strategy(3, 2), seed in any::<u64>()) {
        let sentence = exists_all(3, f.to_formula());
        let d = decided(&sentence, &cfg())?;
        let mut rng = StdRng::seed_from_u64(seed);
        if let Some(p) = sample_sat(&f, 10_000, &mut rng) {
            prop_assert!(d.truth, "sampling found {:?} for {}", p, sentence);
        }
        if d.truth {
            let w = d.witness.expect("existential witness");
            prop_assert!(f.to_formula().eval_at(&w).unwrap(), "witness {:?} fails {}", w, sentence);
        }
    }

    #[test]
    fn substitution_agrees_with_decomposition(f in formula_strategy(3, 1)) {
        let mut g = f.to_formula();
        for i in 0..3 {
            g = eliminate_linear(&var(i), &g).unwrap();
        }
        prop_assert!(g == Formula::True || g == Formula::False, "not closed: {}", g);
        let d = decided(&exists_all(3, f.to_formula()), &cad_only())?;
        prop_assert_eq!(g == Formula::True, d.truth);
    }

    #[test]
    fn negation_duality(f in formula_strategy(2, 2), inner_forall in any::<bool>()) {
        let inner = if inner_forall { Quantifier::Forall } else { Quantifier::Exists };
        let body = f.to_formula();
        let s = Formula::Quant(Quantifier::Exists, vec![var(0)], Box::new(Formula::Quant(inner, vec![var(1)], Box::new(body))));
        let a = decided(&s, &cfg())?.truth;
        let b = decided(&negate(&s), &cfg())?.truth;
        prop_assert_eq!(a, !b);
    }

    #[test]
    fn one_variable_projection_is_exact(f in formula_strategy(2, 2), seed in any::<u64>()) {
        let g = f.to_formula();
        let x = var(0);
        let set = match qe_one_var(&g, &x, &cfg()) {
            Ok(r) => r.set,
            Err(QeError::Resource { .. }) => return Err(TestCaseError::reject("resource limit")),
            Err(e) => panic!("{g}: {e}"),
        };
        let as_formula = set.to_formula();
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..50 {
            let r = to_rational(&random_q(&mut rng));
            let inst = Formula::exists(vec![var(1)], g.substitute(&x, &r).unwrap());
            let expected = decided(&inst, &cfg())?.truth;
            prop_assert_eq!(set.contains_rational(&r), expected, "r = {} in {}", r, set);
            let pt = [(x.clone(), r.clone())].into_iter().collect();
            prop_assert_eq!(as_formula.eval_rational(&pt).unwrap(), expected);
        }
    }
}

fn permutations() -> Vec<Vec<Var>> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    out.push(vec![var(a), var(b), var(c)]);
                }
            }
        }
    }
    out
}

#[test]
fn truth_is_independent_of_variable_order() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strat = formula_strategy(3, 2);
    let orders = permutations();
    assert_eq!(orders.len(), 6);
    for _ in 0..20 {
        let f = strat.new_tree(&mut runner).unwrap().current();
        let s = exists_all(3, f.to_formula());
        let truths: Vec<bool> = orders
            .iter()
            .map(|o| {
                let c = QeConfig {
                    order: Some(o.clone()),
                    ..cad_only()
                };
                decide(&s, &c).unwrap().truth
            })
            .collect();
        assert!(truths.iter().all(|t| *t == truths[0]), "{s}: {truths:?}");
    }
}

#[test]
fn witnesses_with_algebraic_coordinates_verify() {
    let f = TF::And(vec![
        TF::Atom(TPoly(vec![(1, [2, 0, 0]), (-2, [0, 0, 0])]), econreason::formula::Relation::Eq),
        TF::Atom(TPoly(vec![(1, [1, 0, 0]), (-1, [0, 1, 0])]), econreason::formula::Relation::Eq),
    ]);
    let d = decide(&exists_all(2, f.to_formula()), &cad_only()).unwrap();
    let w = d.witness.unwrap();
    assert!(matches!(w[&var(0)], RealAlgebraic::Root(_)));
    assert!(f.to_formula().eval_at(&w).unwrap());
}
