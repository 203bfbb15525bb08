mod common;

use std::sync::Arc;

use common::suites::{coin_automaton, prob_triangle_suite};
use omega_kleisli::prob::{
    bscc_exact, finite_query, finite_values, monte_carlo, monte_carlo_finite, omega_query, omega_values, random_dfa,
    random_prob_automaton, ProbAutomaton, ProbTheory, TestLanguage, TestTable, DEFAULT_MAX_ITER,
    DEFAULT_MAX_ITER_OUTER, DEFAULT_TOL,
};
use omega_kleisli::word::{Alphabet, Sym, Word, WordLang};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn words(a: &Arc<Alphabet>, ws: &[Word]) -> TestLanguage {
    TestLanguage::from_lang(&WordLang::from_words(a.clone(), ws).unwrap())
}

fn finite(a: &ProbAutomaton, x: usize, l: &TestLanguage) -> f64 {
    finite_query(a, x, l, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap()
}

fn omega(a: &ProbAutomaton, x: usize, l: &TestLanguage) -> f64 {
    omega_query(a, x, l, DEFAULT_TOL, DEFAULT_MAX_ITER_OUTER).unwrap()
}

fn all_words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k as Sym).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
    }
    out
}

#[test]
fn coin_automaton_finite_values() {
    let a = coin_automaton();
    let sigma = a.alphabet().clone();
    for n in 0..=6 {
        for w in all_words(2, n) {
            let mut w1 = w.clone();
            w1.push(1);
            let mut w0 = w.clone();
            w0.push(0);
            for x in 0..2 {
                let p1 = finite(&a, x, &words(&sigma, &[w1.clone()]));
                assert!((p1 - 0.5f64.powi(n as i32 + 1)).abs() < 1e-6, "{w:?}1 from {x}: {p1}");
                assert!(finite(&a, x, &words(&sigma, &[w0.clone()])).abs() < 1e-6);
            }
        }
    }
    assert_eq!(finite(&a, 0, &TestLanguage::from_lang(&WordLang::empty(sigma))), 0.0);
}

#[test]
fn coin_automaton_omega_values() {
    let a = coin_automaton();
    let all = TestLanguage::universal(a.alphabet().clone());
    for x in 0..2 {
        assert!((omega(&a, x, &all) - 1.0).abs() < 1e-6);
        assert!((bscc_exact(&a, x, &all).unwrap() - 1.0).abs() < 1e-12);
    }
    let none = a.with_accepting(vec![false, false]).unwrap();
    assert_eq!(omega(&none, 0, &all), 0.0);
    assert_eq!(bscc_exact(&none, 0, &all).unwrap(), 0.0);
}

#[test]
fn coin_automaton_monte_carlo_finite_event() {
    let a = coin_automaton();
    let l = words(a.alphabet(), &[vec![1, 1]]);
    let est = monte_carlo_finite(&a, 0, &l, 100_000, 3, 1).unwrap();
    assert!(est.agrees_with(0.25, 3.0, 0.0), "{est}");
}

fn pa(text: &str) -> ProbAutomaton {
    omega_kleisli::prob::parse_pa(text).unwrap()
}

#[test]
fn absorbing_rejecting_sink() {
    let a = pa("pa\nalphabet a\nstates 2\ntrans 0 a 1 1\ntrans 1 a 1 1\naccept 0\n");
    let all = TestLanguage::universal(a.alphabet().clone());
    // One linear unknown: p(x) = P(x, a, sink)·0.
    assert_eq!(bscc_exact(&a, 0, &all).unwrap(), 0.0);
    assert!(omega(&a, 0, &all).abs() < 1e-9);
}

#[test]
fn fair_coin_into_two_absorbing_states() {
    let a =
        pa("pa\nalphabet h t\nstates 3\ntrans 0 h 1 0.5\ntrans 0 t 2 0.5\ntrans 1 h 1 1\ntrans 2 t 2 1\naccept 1\n");
    let all = TestLanguage::universal(a.alphabet().clone());
    // p₀ = ½p₁ + ½p₂ with p₁ = 1, p₂ = 0.
    assert!((bscc_exact(&a, 0, &all).unwrap() - 0.5).abs() < 1e-12);
    assert!((omega(&a, 0, &all) - 0.5).abs() < 1e-8);
    let est = monte_carlo(&a, 0, &all, 100_000, 9, 4).unwrap();
    assert!(est.agrees_with(0.5, 3.0, 0.0), "{est}");
    assert_eq!(est, monte_carlo(&a, 0, &all, 100_000, 9, 4).unwrap());
}

#[test]
fn deterministic_accepting_loop() {
    let a = pa("pa\nalphabet a\nstates 1\ntrans 0 a 0 1\naccept 0\n");
    let all = TestLanguage::universal(a.alphabet().clone());
    let est = monte_carlo(&a, 0, &all, 1000, 1, 2).unwrap();
    assert_eq!((est.mean, est.stderr), (1.0, 0.0));
}

#[test]
fn tolerance_and_budget_errors() {
    let a = coin_automaton();
    let all = TestLanguage::universal(a.alphabet().clone());
    assert!(matches!(
        finite_query(&a, 0, &all, 0.0, 10),
        Err(omega_kleisli::prob::ProbError::BadTolerance(_))
    ));
    let l = words(a.alphabet(), &[vec![0, 0, 0, 0, 1]]);
    match finite_query(&a, 0, &l, 1e-12, 2) {
        Err(omega_kleisli::prob::ProbError::IterationBudgetExceeded { value, rounds, .. }) => {
            assert_eq!(rounds, 2);
            assert!(value <= 1.0 / 32.0);
        }
        other => panic!("expected budget error, got {other:?}"),
    }
}

/// Probability over execution fragments of length at most `max_len` that
/// some prefix has its trace in `lambda` and ends in `𝔉`.
fn fragment_oracle(a: &ProbAutomaton, x: usize, lambda: &WordLang, max_len: usize) -> f64 {
    fn go(a: &ProbAutomaton, y: usize, trace: &mut Word, p: f64, lambda: &WordLang, max_len: usize) -> f64 {
        if a.accepting()[y] && lambda.member(trace) {
            return p;
        }
        if trace.len() == max_len {
            return 0.0;
        }
        let mut total = 0.0;
        for &(s, z, q) in a.moves(y) {
            trace.push(s);
            total += go(a, z, trace, p * q, lambda, max_len);
            trace.pop();
        }
        total
    }
    go(a, x, &mut Vec::new(), 1.0, lambda, max_len)
}

#[test]
fn finite_query_matches_fragment_enumeration() {
    let sigma = common::binary();
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let universe: Vec<Word> = (0..=4).flat_map(|n| all_words(2, n)).collect();
    for k in 0..60 {
        let n = 1 + k % 5;
        let a = random_prob_automaton(&sigma, n, &mut rng);
        let chosen: Vec<Word> = universe.iter().filter(|_| rng.gen_bool(0.15)).cloned().collect();
        let lang = WordLang::from_words(sigma.clone(), &chosen).unwrap();
        let l = TestLanguage::from_lang(&lang);
        let table = finite_values(&a, &l, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(table.monotone);
        assert!(table.values().iter().all(|v| (0.0..=1.0).contains(v)));
        for x in 0..n {
            let expected = fragment_oracle(&a, x, &lang, 4);
            assert!((table.at_initial(x) - expected).abs() < 1e-8, "instance {k} state {x}");
        }
    }
}

#[test]
fn finite_query_is_additive_on_incomparable_words() {
    let sigma = common::binary();
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    for k in 0..40 {
        let a = random_prob_automaton(&sigma, 1 + k % 5, &mut rng);
        let len = rng.gen_range(1..=4);
        let mut pool = all_words(2, len);
        let take = rng.gen_range(1..=pool.len().min(4));
        let chosen: Vec<Word> = (0..take)
            .map(|_| pool.swap_remove(rng.gen_range(0..pool.len())))
            .collect();
        let x = rng.gen_range(0..a.states());
        let joint = finite(&a, x, &words(&sigma, &chosen));
        let sum: f64 = chosen
            .iter()
            .map(|w| finite(&a, x, &words(&sigma, std::slice::from_ref(w))))
            .sum();
        assert!(
            (joint - sum).abs() <= chosen.len() as f64 * DEFAULT_TOL,
            "instance {k}: {joint} vs {sum}"
        );
    }
}

#[test]
fn finite_behaviour_ignores_the_omega_clause() {
    let sigma = common::binary();
    let t = ProbTheory::new(sigma.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    for k in 0..30 {
        let a = random_prob_automaton(&sigma, 1 + k % 4, &mut rng);
        let dfa = random_dfa(&sigma, rng.gen_range(1..=3), &mut rng);
        let l = TestLanguage::from_dfa(sigma.clone(), dfa.clone()).unwrap();
        let b = t.behaviour(&a).unwrap();
        let base = t
            .evaluate(&b, &TestTable::characteristic(&dfa, vec![0.0; dfa.states()]))
            .unwrap();
        for _ in 0..3 {
            let v: Vec<f64> = (0..dfa.states()).map(|_| rng.gen()).collect();
            assert_eq!(t.evaluate(&b, &TestTable::characteristic(&dfa, v)).unwrap(), base);
        }
        for x in 0..a.states() {
            let direct = finite_query(&a, x, &l, 1e-13, DEFAULT_MAX_ITER).unwrap();
            let via_kernel = base[x * dfa.states() + dfa.initial()];
            assert!(
                (via_kernel - direct).abs() < 1e-8,
                "instance {k} state {x}: {via_kernel} vs {direct}"
            );
        }
    }
}

#[test]
fn kernel_omega_behaviour_matches_acceptance_probability() {
    let sigma = common::binary();
    let t = ProbTheory::new(sigma.clone());
    let all = TestLanguage::universal(sigma.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for k in 0..30 {
        let a = random_prob_automaton(&sigma, 1 + k % 4, &mut rng);
        let w = t.omega_behaviour(&a).unwrap();
        let values = t
            .evaluate(
                &w,
                &TestTable {
                    dfa: all.dfa().clone(),
                    h: Vec::new(),
                    v: vec![1.0],
                },
            )
            .unwrap();
        for (x, value) in values.iter().enumerate() {
            let exact = bscc_exact(&a, x, &all).unwrap();
            assert!(
                (value - exact).abs() < 1e-6,
                "instance {k} state {x}: {value} vs {exact}"
            );
        }
    }
}

#[test]
fn omega_iteration_descends_within_bounds() {
    let sigma = common::binary();
    let mut rng = ChaCha8Rng::seed_from_u64(65);
    for k in 0..30 {
        let a = random_prob_automaton(&sigma, 1 + k % 5, &mut rng);
        let l = TestLanguage::from_dfa(sigma.clone(), random_dfa(&sigma, 3, &mut rng)).unwrap();
        let t = omega_values(&a, &l, DEFAULT_TOL, DEFAULT_MAX_ITER_OUTER).unwrap();
        assert!(t.monotone, "instance {k}: {t:?}");
        assert!(t.values().iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
    }
}

#[test]
fn oracle_triangle() {
    let stats = prob_triangle_suite(120, 66, 20_000).unwrap();
    assert_eq!(stats.instances, 120);
    assert!(stats.fractional >= 5, "{stats:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn queries_are_monotone_in_the_test_language(seed in any::<u64>(), n in 1usize..=4) {
        let sigma = common::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_prob_automaton(&sigma, n, &mut rng);
        let small = WordLang::from_words(sigma.clone(), &[vec![rng.gen_range(0..2)]]).unwrap();
        let large = small.union(&WordLang::from_words(sigma.clone(), &[vec![], vec![1, 0]]).unwrap()).unwrap();
        let (ls, ll) = (TestLanguage::from_lang(&small), TestLanguage::from_lang(&large));
        let all = TestLanguage::universal(sigma);
        for x in 0..n {
            let (fs, fl) = (finite(&a, x, &ls), finite(&a, x, &ll));
            prop_assert!((0.0..=1.0).contains(&fs) && fs <= fl + 1e-9);
            let (os, ol, oa) = (omega(&a, x, &ls), omega(&a, x, &ll), omega(&a, x, &all));
            prop_assert!(os <= ol + 1e-8 && ol <= oa + 1e-8);
        }
    }
}
