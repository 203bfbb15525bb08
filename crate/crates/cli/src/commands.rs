use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use omega_kleisli::kernel::{check_theory_laws, eval_rational, LawConfig};
use omega_kleisli::lts::{
    check_kleene_roundtrip, omega_rational_eval, omega_to_rational, parse_lts, parse_term_file, random_automaton,
    LtsSampler, LtsTheory, NdAutomaton, DEFAULT_BOUND,
};
use omega_kleisli::omega::LassoWord;
use omega_kleisli::prob::{
    bscc_exact, finite_query, monte_carlo, monte_carlo_finite, omega_query, parse_dfa, parse_pa, ProbSampler,
    ProbTheory, TestLanguage, DEFAULT_MAX_ITER, DEFAULT_MAX_ITER_OUTER,
};
use omega_kleisli::tree::{
    buchi_tree_member, parse_rtree, parse_tree_automaton, FiniteTree, TreeAutomaton, TreeSampler, TreeTheory,
};
use omega_kleisli::word::{Alphabet, Regex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::report::{probability, Report};

/// Settings shared by every subcommand.
pub struct Common {
    pub seed: u64,
    pub jobs: usize,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_lts(path: &Path) -> Result<NdAutomaton> {
    parse_lts(&read(path)?).with_context(|| path.display().to_string())
}

fn load_tree_automaton(path: &Path) -> Result<TreeAutomaton> {
    parse_tree_automaton(&read(path)?).with_context(|| path.display().to_string())
}

fn check_state(state: usize, states: usize) -> Result<()> {
    if state >= states {
        bail!("state {state} out of range for {states} states");
    }
    Ok(())
}

fn verdict(accepted: bool) -> &'static str {
    if accepted {
        "accept"
    } else {
        "reject"
    }
}

pub fn behaviour(args: &BehaviourArgs) -> Result<Report> {
    let a = load_lts(&args.input)?;
    check_state(args.state, a.states())?;
    let t = LtsTheory::new(a.alphabet().clone(), DEFAULT_BOUND);
    let lang = a.behaviour(&t)?.fin().get(args.state, 0).clone();
    let sigma = a.alphabet();
    let mut r = Report::new();
    match &args.word {
        Some(w) => {
            let word = sigma.parse_word(w)?;
            let ok = lang.member(&word);
            r.line(verdict(ok))
                .record([
                    ("state", args.state.to_string()),
                    ("word", sigma.format_word(&word)),
                    ("result", verdict(ok).into()),
                ])
                .reject_if(!ok);
        }
        None => {
            let words: Vec<String> = lang
                .words_up_to(args.max_len)
                .iter()
                .map(|w| sigma.format_word(w))
                .collect();
            r.line(format!(
                "words of length <= {} in the behaviour of state {}:",
                args.max_len, args.state
            ));
            for w in &words {
                r.line(format!("  {w}"));
                r.record([("word", w.as_str())]);
            }
            r.record([
                ("state", args.state.to_string()),
                ("max_len", args.max_len.to_string()),
                ("count", words.len().to_string()),
            ]);
        }
    }
    Ok(r)
}

pub fn omega_behaviour(args: &OmegaBehaviourArgs) -> Result<Report> {
    let a = load_lts(&args.input)?;
    check_state(args.state, a.states())?;
    let t = LtsTheory::new(a.alphabet().clone(), DEFAULT_BOUND);
    let lang = a.omega_behaviour(&t)?.swap_remove(args.state);
    let sigma = a.alphabet();
    let mut r = Report::new();
    match &args.lasso {
        Some(l) => {
            let lasso = LassoWord::parse(l, sigma)?;
            let ok = lang.lasso_member(&lasso);
            r.line(verdict(ok))
                .record([
                    ("state", args.state.to_string()),
                    ("lasso", lasso.display(sigma).to_string()),
                    ("result", verdict(ok).into()),
                ])
                .reject_if(!ok);
        }
        None => {
            let accepted: Vec<String> = LassoWord::enumerate(sigma.len(), args.bound, args.bound)
                .iter()
                .filter(|l| lang.lasso_member(l))
                .map(|l| l.display(sigma).to_string())
                .collect();
            r.line(format!(
                "lassos u:v with |u|, |v| <= {} accepted from state {}:",
                args.bound, args.state
            ));
            for l in &accepted {
                r.line(format!("  {l}"));
                r.record([("lasso", l.as_str())]);
            }
            r.record([
                ("state", args.state.to_string()),
                ("bound", args.bound.to_string()),
                ("count", accepted.len().to_string()),
            ]);
        }
    }
    Ok(r)
}

pub fn eval_rational_cmd(args: &EvalRationalArgs) -> Result<Report> {
    let file = parse_term_file(&read(&args.input)?, args.allow_raw_generators)
        .with_context(|| args.input.display().to_string())?;
    let t = LtsTheory::new(file.alphabet.clone(), DEFAULT_BOUND);
    let value = eval_rational(&t, &file.table, &file.term)?;
    let (dom, cod) = (value.dom(), value.cod());
    let sigma = &file.alphabet;
    if args.row >= dom {
        bail!("row {} out of range for domain {dom}", args.row);
    }
    let mut r = Report::new();
    r.record([
        ("term", file.term.to_string()),
        ("dom", dom.to_string()),
        ("cod", cod.to_string()),
    ]);
    if let Some(l) = &args.lasso {
        let lasso = LassoWord::parse(l, sigma)?;
        let ok = value.inf()[args.row].lasso_member(&lasso);
        r.line(verdict(ok))
            .record([
                ("row", args.row.to_string()),
                ("lasso", lasso.display(sigma).to_string()),
                ("result", verdict(ok).into()),
            ])
            .reject_if(!ok);
        return Ok(r);
    }
    if args.col >= cod {
        bail!("column {} out of range for codomain {cod}", args.col);
    }
    let entry = value.fin().get(args.row, args.col);
    match &args.word {
        Some(w) => {
            let word = sigma.parse_word(w)?;
            let ok = entry.member(&word);
            r.line(verdict(ok))
                .record([
                    ("row", args.row.to_string()),
                    ("col", args.col.to_string()),
                    ("word", sigma.format_word(&word)),
                    ("result", verdict(ok).into()),
                ])
                .reject_if(!ok);
        }
        None => {
            r.line(format!("{} : {dom} -> {cod}", file.term));
            r.line(format!(
                "words of length <= {} in entry ({}, {}):",
                args.max_len, args.row, args.col
            ));
            for w in entry.words_up_to(args.max_len) {
                let w = sigma.format_word(&w);
                r.line(format!("  {w}"));
                r.record([("word", w)]);
            }
        }
    }
    Ok(r)
}

/// Runs `check` on every item with `jobs` threads; returns the first
/// failure in item order.
fn first_failure<I: Sync>(
    items: &[I],
    jobs: usize,
    check: impl Fn(usize, &I) -> Result<Option<String>> + Sync,
) -> Result<Option<String>> {
    let jobs = jobs.clamp(1, items.len().max(1));
    let chunk = items.len().div_ceil(jobs).max(1);
    let results: Vec<Result<Option<String>>> = std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                let check = &check;
                s.spawn(move || {
                    for (k, item) in part.iter().enumerate() {
                        match check(c * chunk + k, item) {
                            Ok(None) => {}
                            other => return other,
                        }
                    }
                    Ok(None)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    for res in results {
        if let Some(msg) = res? {
            return Ok(Some(msg));
        }
    }
    Ok(None)
}

/// The automata of a round-trip run: the input file, or `samples` random
/// automata with 1 to 4 states over `{0, 1}`.
fn roundtrip_automata(args: &RoundtripArgs, common: &Common) -> Result<(LtsTheory, Vec<NdAutomaton>)> {
    if let Some(path) = &args.input {
        let a = load_lts(path)?;
        return Ok((LtsTheory::new(a.alphabet().clone(), args.bound), vec![a]));
    }
    let t = LtsTheory::new(Arc::new(Alphabet::numeric(2)), args.bound);
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let automata = (0..args.samples)
        .map(|k| random_automaton(&t, 1 + k % 4, &mut rng))
        .collect();
    Ok((t, automata))
}

fn roundtrip_report(name: &str, automata: usize, checks: usize, failure: Option<String>) -> Report {
    let mut r = Report::new();
    let status = if failure.is_none() { "pass" } else { "fail" };
    r.line(format!("{name}: {status} ({checks} states of {automata} automata)"));
    let mut fields = vec![
        ("check", name.to_string()),
        ("automata", automata.to_string()),
        ("states", checks.to_string()),
        ("result", status.to_string()),
    ];
    if let Some(f) = failure {
        r.line(format!("  counterexample: {f}"));
        fields.push(("counterexample", f));
        r.reject_if(true);
    }
    r.record(fields);
    r
}

pub fn kleene_roundtrip(args: &RoundtripArgs, common: &Common) -> Result<Report> {
    let (t, automata) = roundtrip_automata(args, common)?;
    let checks = automata.iter().map(NdAutomaton::states).sum();
    let failure = first_failure(&automata, common.jobs, |k, a| {
        for i in 0..a.states() {
            let v = check_kleene_roundtrip(&t, a, i)?;
            if !v.holds() {
                return Ok(Some(format!("automaton {k} state {i}: {v}")));
            }
        }
        Ok(None)
    })?;
    Ok(roundtrip_report("kleene-roundtrip", automata.len(), checks, failure))
}

pub fn omega_kleene_roundtrip(args: &RoundtripArgs, common: &Common) -> Result<Report> {
    let (t, automata) = roundtrip_automata(args, common)?;
    let checks = automata.iter().map(NdAutomaton::states).sum();
    let failure = first_failure(&automata, common.jobs, |k, a| {
        let behaviour = a.omega_behaviour(&t)?;
        for (i, expected) in behaviour.iter().enumerate() {
            let (rs, r, table) = omega_to_rational(&t, a, i)?;
            let got = omega_rational_eval(&t, &table, &rs, &r)?;
            if let Some(l) = got.bounded_equal(expected, args.bound)? {
                return Ok(Some(format!(
                    "automaton {k} state {i}: differs on {}",
                    l.display(t.alphabet())
                )));
            }
        }
        Ok(None)
    })?;
    Ok(roundtrip_report(
        "omega-kleene-roundtrip",
        automata.len(),
        checks,
        failure,
    ))
}

pub fn tree_member(args: &TreeMemberArgs) -> Result<Report> {
    let a = load_tree_automaton(&args.automaton)?;
    check_state(args.state, a.states())?;
    let tree = FiniteTree::parse(&args.tree, a.alphabet())?;
    let ok = a.finite_member(args.state, &tree)?;
    let mut r = Report::new();
    r.line(verdict(ok))
        .record([
            ("state", args.state.to_string()),
            ("tree", tree.display(a.alphabet()).to_string()),
            ("result", verdict(ok).into()),
        ])
        .reject_if(!ok);
    Ok(r)
}

pub fn tree_behaviour(args: &TreeBehaviourArgs) -> Result<Report> {
    let a = load_tree_automaton(&args.automaton)?;
    check_state(args.state, a.states())?;
    let sigma = a.alphabet();
    let t = TreeTheory::new(sigma.clone(), args.height);
    let b = a.tree_behaviour(&t)?;
    let mut r = Report::new();
    match &args.tree {
        Some(text) => {
            let tree = FiniteTree::parse(text, sigma)?;
            let ok = b.member(args.state, &tree);
            r.line(verdict(ok))
                .record([
                    ("state", args.state.to_string()),
                    ("tree", tree.display(sigma).to_string()),
                    ("result", verdict(ok).into()),
                ])
                .reject_if(!ok);
        }
        None => {
            let trees = b.trees_up_to(args.state, args.height);
            r.line(format!(
                "trees of height <= {} in the behaviour of state {}:",
                args.height, args.state
            ));
            for tree in &trees {
                let s = tree.display(sigma).to_string();
                r.line(format!("  {s}"));
                r.record([("tree", s)]);
            }
            r.record([
                ("state", args.state.to_string()),
                ("height", args.height.to_string()),
                ("count", trees.len().to_string()),
            ]);
        }
    }
    Ok(r)
}

pub fn buchi_tree(args: &BuchiTreeArgs) -> Result<Report> {
    let a = load_tree_automaton(&args.automaton)?;
    check_state(args.state, a.states())?;
    let tree = parse_rtree(&read(&args.tree)?, a.alphabet()).with_context(|| args.tree.display().to_string())?;
    let ok = buchi_tree_member(&a, args.state, &tree)?;
    let mut r = Report::new();
    r.line(verdict(ok))
        .record([
            ("state", args.state.to_string()),
            ("nodes", tree.len().to_string()),
            ("result", verdict(ok).into()),
        ])
        .reject_if(!ok);
    Ok(r)
}

/// `--lambda` names a dfa file if such a file exists, else it is a regex.
fn load_lambda(text: &str, sigma: &Arc<Alphabet>) -> Result<TestLanguage> {
    let path = Path::new(text);
    if path.is_file() {
        let l = parse_dfa(&read(path)?).with_context(|| path.display().to_string())?;
        if l.alphabet().symbols() != sigma.symbols() {
            bail!(
                "dfa alphabet {} differs from the automaton alphabet {}",
                l.alphabet(),
                sigma
            );
        }
        return Ok(TestLanguage::from_dfa(sigma.clone(), l.dfa().clone())?);
    }
    let regex = Regex::parse(text, sigma).with_context(|| format!("--lambda `{text}`"))?;
    Ok(TestLanguage::from_lang(&regex.to_lang(sigma)))
}

pub fn prob_query(args: &ProbQueryArgs, common: &Common) -> Result<Report> {
    let a = parse_pa(&read(&args.input)?).with_context(|| args.input.display().to_string())?;
    check_state(args.state, a.states())?;
    let lambda = load_lambda(&args.lambda, a.alphabet())?;
    let x = args.state;
    let event = if args.finite { "finite" } else { "omega" };
    let mut r = Report::new();
    let mut fields = vec![("state", x.to_string()), ("event", event.to_string())];
    if let Some(n) = args.montecarlo {
        let est = if args.finite {
            monte_carlo_finite(&a, x, &lambda, n, common.seed, common.jobs)?
        } else {
            monte_carlo(&a, x, &lambda, n, common.seed, common.jobs)?
        };
        r.line(format!("{} ± {} ({} samples)", est.mean, est.stderr, est.samples));
        fields.extend([
            ("method", "montecarlo".to_string()),
            ("mean", est.mean.to_string()),
            ("stderr", est.stderr.to_string()),
            ("samples", est.samples.to_string()),
        ]);
    } else if args.exact {
        if args.finite {
            bail!("--exact applies to --omega queries");
        }
        let p = bscc_exact(&a, x, &lambda)?;
        r.line(probability(p, 1e-12));
        fields.extend([("method", "exact".to_string()), ("value", probability(p, 1e-12))]);
    } else {
        let p = if args.finite {
            finite_query(&a, x, &lambda, args.tol, args.max_iter.unwrap_or(DEFAULT_MAX_ITER))?
        } else {
            omega_query(
                &a,
                x,
                &lambda,
                args.tol,
                args.max_iter.unwrap_or(DEFAULT_MAX_ITER_OUTER),
            )?
        };
        r.line(probability(p, args.tol));
        fields.extend([
            ("method", "iteration".to_string()),
            ("tol", args.tol.to_string()),
            ("value", probability(p, args.tol)),
        ]);
    }
    r.record(fields);
    Ok(r)
}

pub fn laws(args: &LawsArgs, common: &Common) -> Result<Report> {
    let config = LawConfig {
        samples: args.samples,
        seed: common.seed,
        jobs: common.jobs,
        omega: !args.no_omega,
    };
    let sigma = Arc::new(Alphabet::numeric(2));
    let report = match args.instance {
        Instance::Lts => check_theory_laws(&LtsTheory::new(sigma, args.bound), &LtsSampler::default(), &config),
        Instance::Tree => check_theory_laws(&TreeTheory::new(sigma, args.bound), &TreeSampler::default(), &config),
        Instance::Prob => check_theory_laws(&ProbTheory::new(sigma), &ProbSampler::default(), &config),
    };
    let mut r = Report::new();
    for line in report.to_string().lines() {
        r.line(line);
    }
    for res in &report.results {
        let mut fields = vec![
            ("law", res.law.to_string()),
            ("checked", res.checked.to_string()),
            ("failures", res.failures.to_string()),
        ];
        if let Some(c) = &res.counterexample {
            fields.push(("counterexample", c.clone()));
        }
        r.record(fields);
    }
    let status = if report.passed() { "pass" } else { "fail" };
    r.line(format!(
        "{status}: {} laws, {} failures",
        report.results.len(),
        report.total_failures()
    ));
    r.record([
        ("result", status.to_string()),
        ("laws", report.results.len().to_string()),
    ]);
    r.reject_if(!report.passed());
    Ok(r)
}
