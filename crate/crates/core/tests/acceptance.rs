//! One pass/fail line per acceptance criterion, with its runtime against
//! the allowed budget. Exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::suites::{
    buchi_hand_cases, buchi_monotone_suite, coin_automaton, gamma_suite, kleene_automata_suite, matrix_omega_suite,
    omega_automata_suite, prob_triangle_suite, rational_terms_suite, tree_behaviour_suite,
};
use omega_kleisli::kernel::{check_theory_laws, LawConfig, SampleKind, Sampler, Theory, TheoryError, Verdict};
use omega_kleisli::lts::{LtsMorphism, LtsSampler, LtsTheory, DEFAULT_BOUND};
use omega_kleisli::omega::{words_up_to, LassoWord};
use omega_kleisli::prob::{
    finite_query, omega_query, TestLanguage, DEFAULT_MAX_ITER, DEFAULT_MAX_ITER_OUTER, DEFAULT_TOL,
};
use omega_kleisli::word::{Alphabet, LangMatrix, Regex, WordLang};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn paper_values() -> Outcome {
    let a = coin_automaton();
    let sigma = a.alphabet().clone();
    let single = |w: Vec<u32>| TestLanguage::from_lang(&WordLang::from_words(sigma.clone(), [&w]).unwrap());
    let mut checked = 0;
    for w in (0..=6).flat_map(|n| words_up_to(2, n).into_iter().filter(move |w| w.len() == n)) {
        for (last, expected) in [(1, 0.5f64.powi(w.len() as i32 + 1)), (0, 0.0)] {
            let mut wl = w.clone();
            wl.push(last);
            let p = finite_query(&a, 0, &single(wl), DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
            if (p - expected).abs() > 1e-6 {
                return Err(format!(
                    "finite_query(s0, {{{}}}) = {p}, expected {expected}",
                    sigma.format_word(&w)
                ));
            }
            checked += 1;
        }
    }
    let eps = single(Vec::new());
    for x in 0..2 {
        let p = omega_query(&a, x, &eps, DEFAULT_TOL, DEFAULT_MAX_ITER_OUTER).map_err(|e| e.to_string())?;
        if (p - 1.0).abs() > 1e-6 {
            return Err(format!("omega_query(s{x}, {{eps}}) = {p}"));
        }
    }
    Ok(format!("{checked} finite queries, 2 omega queries"))
}

fn figure_automaton() -> Outcome {
    let a = common::fig_automaton();
    let sigma = a.alphabet().clone();
    let t = LtsTheory::new(sigma.clone(), DEFAULT_BOUND);
    let behaviour = a.behaviour(&t).map_err(|e| e.to_string())?;
    let expected = Regex::parse("(0+1)1*", &sigma)
        .map_err(|e| e.to_string())?
        .to_lang(&sigma);
    if let Some(w) = behaviour
        .fin()
        .get(0, 0)
        .equivalent(&expected)
        .map_err(|e| e.to_string())?
    {
        return Err(format!("behaviour differs from (0+1)1* on {}", sigma.format_word(&w)));
    }
    let omega = a.omega_behaviour(&t).map_err(|e| e.to_string())?;
    for (u, v, member) in [
        (vec![], vec![1], true),
        (vec![0], vec![1], true),
        (vec![], vec![0], false),
    ] {
        let l = LassoWord::new(u, v).map_err(|e| e.to_string())?;
        if omega[0].lasso_member(&l) != member {
            return Err(format!(
                "lasso {} should be {}",
                l.display(&sigma),
                if member { "accepted" } else { "rejected" }
            ));
        }
    }
    Ok("equivalent to (0+1)1*; lassos :1 0:1 accepted, :0 rejected".into())
}

fn law_suite() -> Outcome {
    let t = LtsTheory::new(common::binary(), DEFAULT_BOUND);
    let config = LawConfig {
        samples: 200,
        seed: 7,
        jobs: 1,
        omega: true,
    };
    let report = check_theory_laws(&t, &LtsSampler::default(), &config);
    if !report.passed() {
        return Err(report.to_string());
    }
    if let Some(r) = report.results.iter().find(|r| r.checked < 200) {
        return Err(format!("{} checked only {} samples", r.law, r.checked));
    }
    Ok(format!("{} laws x 200 samples", report.results.len()))
}

fn omega_iteration_oracle() -> Outcome {
    let stats = matrix_omega_suite(120, 21)?;
    if stats.with_tail == 0 {
        return Err("no sampled component exercised the eps-cycle tail".into());
    }
    Ok(format!(
        "{} matrices, {} lasso checks, {} components with a tail",
        stats.matrices, stats.lassos, stats.with_tail
    ))
}

fn kleene_roundtrips() -> Outcome {
    let automata = kleene_automata_suite(100, 31)?;
    let terms = rational_terms_suite(100, 32, 4)?;
    let gammas = gamma_suite(100, 33, 2)?;
    let omega = omega_automata_suite(100, 34)?;
    Ok(format!(
        "{automata} automaton states, {terms} terms, {gammas} gamma rows, {omega} omega states"
    ))
}

fn tree_suite() -> Outcome {
    let trees = tree_behaviour_suite(50, 43)?;
    let hand = buchi_hand_cases()?;
    let monotone = buchi_monotone_suite(60, 44)?;
    Ok(format!(
        "{trees} tree memberships, {hand} hand cases, {monotone} monotone instances"
    ))
}

fn prob_triangle() -> Outcome {
    let stats = prob_triangle_suite(200, 67, 100_000)?;
    Ok(format!(
        "{} automata ({} with a value strictly inside (0, 1)), max |iter - exact| {:.1e}, max |z| {:.2}",
        stats.instances, stats.fractional, stats.max_iteration_gap, stats.max_z
    ))
}

/// The lts instance with a join that also adds the word `ab` to every
/// finite entry, so `f ∨ f ≠ f` whenever `f` misses `ab` somewhere.
struct SpuriousJoin(LtsTheory);

impl Theory for SpuriousJoin {
    type Arrow = LtsMorphism;

    fn dom(&self, f: &LtsMorphism) -> usize {
        self.0.dom(f)
    }

    fn cod(&self, f: &LtsMorphism) -> usize {
        self.0.cod(f)
    }

    fn compose(&self, g: &LtsMorphism, f: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        self.0.compose(g, f)
    }

    fn join(&self, f: &LtsMorphism, g: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        let u = self.0.join(f, g)?;
        let fin = LangMatrix::from_fn(self.0.alphabet().clone(), u.dom(), u.cod(), |i, j| {
            let spurious = WordLang::from_words(self.0.alphabet().clone(), [&vec![0, 1]]).expect("in range");
            u.fin().get(i, j).union(&spurious).expect("same alphabet")
        })?;
        Ok(LtsMorphism::new(fin, u.inf().to_vec())?)
    }

    fn bottom(&self, m: usize, p: usize) -> LtsMorphism {
        self.0.bottom(m, p)
    }

    fn base(&self, map: &[usize], p: usize) -> Result<LtsMorphism, TheoryError> {
        self.0.base(map, p)
    }

    fn cotuple(&self, parts: &[LtsMorphism]) -> Result<LtsMorphism, TheoryError> {
        self.0.cotuple(parts)
    }

    fn compare(&self, f: &LtsMorphism, g: &LtsMorphism) -> Result<Verdict, TheoryError> {
        self.0.compare(f, g)
    }

    fn compare_leq(&self, f: &LtsMorphism, g: &LtsMorphism) -> Result<Verdict, TheoryError> {
        self.0.compare_leq(f, g)
    }

    fn is_one_step(&self, f: &LtsMorphism) -> bool {
        self.0.is_one_step(f)
    }

    fn star(&self, alpha: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        self.0.star(alpha)
    }

    fn top(&self, n: usize) -> Option<LtsMorphism> {
        self.0.top(n)
    }

    fn omega(&self, beta: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        self.0.omega(beta)
    }

    fn star_is_join_of_powers(&self, alpha: &LtsMorphism, star: &LtsMorphism) -> Result<Verdict, TheoryError> {
        self.0.star_is_join_of_powers(alpha, star)
    }

    fn describe(&self, f: &LtsMorphism) -> String {
        self.0.describe(f)
    }
}

struct SpuriousJoinSampler(LtsSampler);

impl Sampler<SpuriousJoin> for SpuriousJoinSampler {
    fn sample(&self, t: &SpuriousJoin, rng: &mut ChaCha8Rng, dom: usize, cod: usize, kind: SampleKind) -> LtsMorphism {
        self.0.sample(&t.0, rng, dom, cod, kind)
    }

    fn max_dim(&self) -> usize {
        Sampler::<LtsTheory>::max_dim(&self.0)
    }
}

fn negative_control() -> Outcome {
    let broken = SpuriousJoin(LtsTheory::new(
        Arc::new(Alphabet::new(["a", "b"]).unwrap()),
        DEFAULT_BOUND,
    ));
    let config = LawConfig {
        samples: 30,
        seed: 5,
        jobs: 1,
        omega: false,
    };
    let report = check_theory_laws(&broken, &SpuriousJoinSampler(LtsSampler::default()), &config);
    let idem = report
        .result("join-idempotent")
        .ok_or("join-idempotent was not checked")?;
    match &idem.counterexample {
        Some(c) if idem.failures > 0 => {
            let first = c
                .lines()
                .next()
                .unwrap_or_default()
                .split("; inputs")
                .next()
                .unwrap_or_default();
            Ok(format!(
                "join-idempotent failed {}/{}; counterexample: {first}",
                idem.failures, idem.checked
            ))
        }
        _ => Err("broken join went unnoticed".into()),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 paper values (probabilistic)", 1, paper_values),
        ("2 figure automaton (words)", 1, figure_automaton),
        ("3 fixpoint law suite (lts)", 60, law_suite),
        ("4 omega iteration oracle", 60, omega_iteration_oracle),
        ("5 kleene round-trips", 120, kleene_roundtrips),
        ("6 tree suite", 120, tree_suite),
        ("7 probabilistic oracle triangle", 120, prob_triangle),
        ("8 negative control", 60, negative_control),
    ];
    // Numeric arguments select criteria by number; none selects all.
    let selected: Vec<String> = std::env::args().skip(1).filter(|a| a.parse::<u32>().is_ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (name, budget, run) in criteria {
        if !selected.is_empty() && !selected.iter().any(|n| name.split(' ').next() == Some(n.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over the {budget} s budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} criterion {name:<34} {:>8.2} s  {detail}",
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
