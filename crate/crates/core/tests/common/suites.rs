//! Randomized cross-check suites shared by the integration tests and the
//! acceptance harness. Each returns the number of checks made, or the first
//! disagreement.

use omega_kleisli::kernel::{eval_rational, eval_rational_nf, GeneratorTable, RationalTerm, Theory};
use omega_kleisli::lts::{
    check_kleene_roundtrip, check_omega_kleene_roundtrip, omega_rational_eval, omega_to_rational, random_automaton,
    random_term, LtsTheory, DEFAULT_BOUND,
};
use omega_kleisli::omega::{omega_of_matrix, LassoWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{binary, matrix_lasso_oracle, random_matrix};

#[derive(Debug, Default)]
pub struct MatrixOmegaStats {
    pub matrices: usize,
    pub lassos: usize,
    /// Components whose ω-language carries a universal tail from an ε-cycle.
    pub with_tail: usize,
}

/// `omega_of_matrix` against lasso factorization search on every lasso with
/// `|u|, |v| <= 3`, for `count` random matrices of size 1 to 3.
pub fn matrix_omega_suite(count: usize, seed: u64) -> Result<MatrixOmegaStats, String> {
    let alphabet = binary();
    let lassos = LassoWord::enumerate(alphabet.len(), 3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = MatrixOmegaStats::default();
    for k in 0..count {
        let n = 1 + k % 3;
        let m = random_matrix(&mut rng, &alphabet, n);
        let omega = omega_of_matrix(&m).map_err(|e| e.to_string())?;
        for (i, w) in omega.iter().enumerate() {
            if !w.tail().is_empty() {
                stats.with_tail += 1;
            }
            for l in &lassos {
                if w.lasso_member(l) != matrix_lasso_oracle(&m, i, l) {
                    return Err(format!(
                        "matrix {k} component {i} lasso {}: omega_of_matrix says {}",
                        l.display(&alphabet),
                        w.lasso_member(l)
                    ));
                }
                stats.lassos += 1;
            }
        }
        stats.matrices += 1;
    }
    Ok(stats)
}

/// Folded term and normal form of `to_rational(A, i)` against the behaviour,
/// for every state of `count` random automata with up to 4 states.
pub fn kleene_automata_suite(count: usize, seed: u64) -> Result<usize, String> {
    let t = LtsTheory::new(binary(), DEFAULT_BOUND);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    for k in 0..count {
        let n = 1 + k % 4;
        let a = random_automaton(&t, n, &mut rng);
        for i in 0..n {
            let v = check_kleene_roundtrip(&t, &a, i).map_err(|e| e.to_string())?;
            if !v.holds() {
                return Err(format!("automaton {k} state {i}: {v}"));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

/// Both rational evaluators on `count` random terms of depth at most `depth`
/// over objects of size at most 3.
pub fn rational_terms_suite(count: usize, seed: u64, depth: usize) -> Result<usize, String> {
    let t = LtsTheory::new(binary(), DEFAULT_BOUND);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let (m, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let mut table = GeneratorTable::new();
        let term = random_term(&t, &mut rng, m, p, depth, 3, &mut table);
        let folded = eval_rational(&t, &table, &term).map_err(|e| format!("term {k} `{term}`: {e}"))?;
        let nf = eval_rational_nf(&t, &table, &term)
            .and_then(|nf| nf.denotation(&t))
            .map_err(|e| format!("term {k} `{term}`: {e}"))?;
        let v = t.compare(&folded, &nf).map_err(|e| e.to_string())?;
        if !v.holds() {
            return Err(format!("term {k} `{term}`: {v}"));
        }
    }
    Ok(count)
}

/// `γ^ω·1 = [r₁, …, r_m]^ω·r` for random rows of terms `1 ⇸ m`, `m <= 3`.
pub fn gamma_suite(count: usize, seed: u64, depth: usize) -> Result<usize, String> {
    let t = LtsTheory::new(binary(), DEFAULT_BOUND);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let m = rng.gen_range(1..=3);
        let mut table = GeneratorTable::new();
        let rs: Vec<RationalTerm> = (0..m)
            .map(|_| random_term(&t, &mut rng, 1, m, depth, 3, &mut table))
            .collect();
        let r = random_term(&t, &mut rng, 1, m, depth, 3, &mut table);
        let v = check_omega_kleene_roundtrip(&t, &table, &rs, &r).map_err(|e| e.to_string())?;
        if !v.holds() {
            return Err(format!("row {k}: {v}"));
        }
    }
    Ok(count)
}

/// The ω-rational row read off an automaton evaluates to its ω-behaviour.
pub fn omega_automata_suite(count: usize, seed: u64) -> Result<usize, String> {
    let t = LtsTheory::new(binary(), DEFAULT_BOUND);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    for k in 0..count {
        let n = 1 + k % 4;
        let a = random_automaton(&t, n, &mut rng);
        let behaviour = a.omega_behaviour(&t).map_err(|e| e.to_string())?;
        for (i, expected) in behaviour.iter().enumerate() {
            let (rs, r, table) = omega_to_rational(&t, &a, i).map_err(|e| e.to_string())?;
            let got = omega_rational_eval(&t, &table, &rs, &r).map_err(|e| e.to_string())?;
            if let Some(l) = got.bounded_equal(expected, DEFAULT_BOUND).map_err(|e| e.to_string())? {
                return Err(format!("automaton {k} state {i}: differs on {}", l.display(&binary())));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

/// `tree_behaviour` against run search on every complete tree of height at
/// most 3, for `count` random automata with up to 3 states over two letters.
pub fn tree_behaviour_suite(count: usize, seed: u64) -> Result<usize, String> {
    use omega_kleisli::tree::{random_tree_automaton, FiniteTree, TreeTheory, DEFAULT_HEIGHT};
    let t = TreeTheory::new(super::trees::sigma2(), DEFAULT_HEIGHT);
    let universe = FiniteTree::enumerate(2, 1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    for k in 0..count {
        let n = 1 + k % 3;
        let a = random_tree_automaton(&t, n, &mut rng);
        let b = a.tree_behaviour(&t).map_err(|e| e.to_string())?;
        for i in 0..n {
            for tree in &universe {
                let expected = super::trees::run_exists(&a, i, tree);
                if b.member(i, tree) != expected || a.finite_member(i, tree).map_err(|e| e.to_string())? != expected {
                    return Err(format!(
                        "automaton {k} state {i} tree {}: run search says {expected}",
                        tree.display(t.alphabet())
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

/// Hand-checked Büchi tree cases.
pub fn buchi_hand_cases() -> Result<usize, String> {
    use omega_kleisli::tree::{buchi_tree_member, RegularInfTree, TreeAutomaton};
    let sigma = super::trees::sigma2();
    let single = RegularInfTree::new(sigma.clone(), vec![(0, 0, 0)], 0).unwrap();
    let alternating = RegularInfTree::new(sigma.clone(), vec![(0, 1, 1), (1, 0, 0)], 0).unwrap();
    let left_t = RegularInfTree::new(sigma.clone(), vec![(0, 1, 0), (1, 1, 1)], 0).unwrap();
    let auto = |n, delta: Vec<(usize, u32, usize, usize)>, acc: &[usize]| {
        TreeAutomaton::new(sigma.clone(), n, delta, acc).unwrap()
    };
    let total: Vec<_> = (0..2).flat_map(|a| [(0, a, 0, 0)]).collect();
    let cases: Vec<(&str, TreeAutomaton, &RegularInfTree, bool)> = vec![
        (
            "loop through accepting state",
            auto(1, vec![(0, 0, 0, 0)], &[0]),
            &single,
            true,
        ),
        (
            "loop without accepting state",
            auto(1, vec![(0, 0, 0, 0)], &[]),
            &single,
            false,
        ),
        ("no transitions", auto(1, vec![], &[0]), &single, false),
        ("total and accepting", auto(1, total.clone(), &[0]), &alternating, true),
        ("total and accepting, other tree", auto(1, total, &[0]), &left_t, true),
        ("label mismatch", auto(1, vec![(0, 0, 0, 0)], &[0]), &alternating, false),
        // State 1 reads t forever without accepting, and left subtrees of
        // `left_t` are all t.
        (
            "branch stuck outside F",
            auto(2, vec![(0, 0, 0, 1), (0, 1, 0, 1), (1, 1, 1, 1)], &[0]),
            &left_t,
            false,
        ),
        (
            "branch returns to F",
            auto(2, vec![(0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 0, 0)], &[0]),
            &left_t,
            true,
        ),
        // Automaton must avoid the transition into the dead state 1.
        (
            "choice between transitions",
            auto(2, vec![(0, 1, 0, 1), (0, 1, 0, 0), (0, 0, 0, 0)], &[0]),
            &alternating,
            true,
        ),
    ];
    for (name, a, tree, expected) in &cases {
        let got = buchi_tree_member(a, 0, tree).map_err(|e| e.to_string())?;
        if got != *expected {
            return Err(format!("{name}: expected {expected}, got {got}"));
        }
    }
    Ok(cases.len())
}

/// Enlarging the accepting set never turns acceptance into rejection.
pub fn buchi_monotone_suite(count: usize, seed: u64) -> Result<usize, String> {
    use omega_kleisli::tree::{
        buchi_tree_member, random_regular_tree, random_tree_automaton, TreeTheory, DEFAULT_HEIGHT,
    };
    let t = TreeTheory::new(super::trees::sigma2(), DEFAULT_HEIGHT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    for k in 0..count {
        let n = 1 + k % 3;
        let a = random_tree_automaton(&t, n, &mut rng);
        let tree = random_regular_tree(&t, rng.gen_range(1..=3), &mut rng);
        let mut bigger = a.accepting().to_vec();
        for f in bigger.iter_mut() {
            *f = *f || rng.gen_bool(0.5);
        }
        let b = a.with_accepting(bigger).map_err(|e| e.to_string())?;
        for s in 0..n {
            let small = buchi_tree_member(&a, s, &tree).map_err(|e| e.to_string())?;
            let large = buchi_tree_member(&b, s, &tree).map_err(|e| e.to_string())?;
            if small && !large {
                return Err(format!(
                    "instance {k} state {s}: accepted with F, rejected with a larger F"
                ));
            }
            checks += 1;
        }
    }
    Ok(checks)
}

#[derive(Debug, Default)]
pub struct TriangleStats {
    pub instances: usize,
    /// Largest `|omega_query - bscc_exact|`.
    pub max_iteration_gap: f64,
    /// Largest `|monte_carlo - bscc_exact| / stderr` over instances with
    /// positive standard error.
    pub max_z: f64,
    /// Instances whose exact value lies strictly between 0 and 1.
    pub fractional: usize,
}

/// `omega_query`, `bscc_exact` and `monte_carlo` from state 0 on `count`
/// random automata with 2 to 5 states and random test DFAs with up to 4
/// states.
pub fn prob_triangle_suite(count: usize, seed: u64, mc_samples: usize) -> Result<TriangleStats, String> {
    use omega_kleisli::prob::{
        bscc_exact, monte_carlo, omega_query, random_dfa, random_prob_automaton, TestLanguage, DEFAULT_MAX_ITER_OUTER,
        DEFAULT_TOL,
    };
    let alphabet = binary();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = TriangleStats::default();
    for k in 0..count {
        let n = 2 + k % 4;
        let a = random_prob_automaton(&alphabet, n, &mut rng);
        let dfa = random_dfa(&alphabet, rng.gen_range(1..=4), &mut rng);
        let lambda = TestLanguage::from_dfa(alphabet.clone(), dfa).map_err(|e| e.to_string())?;
        let x = 0;
        let exact = bscc_exact(&a, x, &lambda).map_err(|e| format!("instance {k}: {e}"))?;
        let iterated = omega_query(&a, x, &lambda, DEFAULT_TOL, DEFAULT_MAX_ITER_OUTER)
            .map_err(|e| format!("instance {k}: {e}"))?;
        let gap = (iterated - exact).abs();
        stats.max_iteration_gap = stats.max_iteration_gap.max(gap);
        if gap > 10.0 * DEFAULT_TOL {
            return Err(format!("instance {k}: omega_query {iterated} vs bscc_exact {exact}"));
        }
        let mc = monte_carlo(&a, x, &lambda, mc_samples, seed ^ k as u64, 1).map_err(|e| e.to_string())?;
        if exact > 1e-9 && exact < 1.0 - 1e-9 {
            stats.fractional += 1;
        }
        if mc.stderr > 0.0 {
            stats.max_z = stats.max_z.max((mc.mean - exact).abs() / mc.stderr);
        }
        if !mc.agrees_with(exact, 3.0, 10.0 * DEFAULT_TOL) {
            return Err(format!("instance {k}: monte_carlo {mc} vs bscc_exact {exact}"));
        }
        stats.instances += 1;
    }
    Ok(stats)
}

/// The two-state automaton whose moves all have probability one half:
/// `0` leads to state 0, `1` leads to the accepting state 1.
pub fn coin_automaton() -> omega_kleisli::prob::ProbAutomaton {
    omega_kleisli::prob::parse_pa(
        "pa\nalphabet 0 1\nstates 2\ntrans 0 0 0 0.5\ntrans 0 1 1 0.5\ntrans 1 0 0 0.5\ntrans 1 1 1 0.5\naccept 1\n",
    )
    .expect("example automaton parses")
}
