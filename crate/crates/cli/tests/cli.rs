use std::path::PathBuf;
use std::process::{Command, Output};

use omega_kleisli::lts::{parse_lts, parse_term_file, print_lts, print_term_file};
use omega_kleisli::prob::{parse_dfa, parse_pa, print_dfa, print_pa};
use omega_kleisli::tree::{parse_rtree, parse_tree_automaton, print_rtree, print_tree_automaton};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega-kleisli"))
        .args(args)
        .env_remove("OMEGA_KLEISLI_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

#[test]
fn figure_automaton_accepts_01() {
    let o = run(&["behaviour", "--input", &path("fig.lts"), "--state", "0", "--word", "01"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "accept\n");
    let o = run(&["behaviour", "--input", &path("fig.lts"), "--state", "0", "--word", "00"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "reject\n");
}

#[test]
fn figure_automaton_omega_behaviour() {
    let fig = path("fig.lts");
    for (lasso, code) in [(":1", 0), ("0:1", 0), (":0", 1)] {
        let o = run(&["omega-behaviour", "--input", &fig, "--state", "0", "--lasso", lasso]);
        assert_eq!(o.status.code(), Some(code), "{lasso}");
    }
    let o = run(&[
        "omega-behaviour",
        "--input",
        &fig,
        "--state",
        "0",
        "--bound",
        "1",
        "--format",
        "records",
    ]);
    assert_eq!(stdout(&o), "lasso=:1\nlasso=0:1\nstate=0 bound=1 count=2\n");
}

#[test]
fn coin_automaton_finite_query() {
    let o = run(&[
        "prob-query",
        "--input",
        &path("ex.pa"),
        "--state",
        "0",
        "--lambda",
        "11",
        "--finite",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.25\n");
}

#[test]
fn lambda_from_dfa_file_and_exact_route() {
    let o = run(&[
        "prob-query",
        "--input",
        &path("ex.pa"),
        "--state",
        "1",
        "--lambda",
        &path("ends_in_1.dfa"),
        "--omega",
        "--exact",
        "--format",
        "records",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "state=1 event=omega method=exact value=1\n");
}

#[test]
fn monte_carlo_is_reproducible_for_fixed_seed_and_jobs() {
    let args = [
        "prob-query",
        "--input",
        &path("ex.pa"),
        "--state",
        "0",
        "--lambda",
        "11",
        "--finite",
        "--montecarlo",
        "20000",
        "--jobs",
        "3",
        "--seed",
        "5",
        "--format",
        "records",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let mean: f64 = out
        .split("mean=")
        .nth(1)
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let stderr: f64 = out
        .split("stderr=")
        .nth(1)
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((mean - 0.25).abs() <= 3.0 * stderr, "{out}");
}

#[test]
fn seed_can_come_from_the_environment() {
    let args = ["kleene-roundtrip", "--samples", "8", "--format", "records"];
    let flag = run(&[&args[..], &["--seed", "17"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_omega-kleisli"))
        .args(args)
        .env("OMEGA_KLEISLI_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(flag.status.code(), Some(0));
}

#[test]
fn empty_law_run_passes() {
    let o = run(&["laws", "--instance", "lts", "--samples", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("pass: 27 laws, 0 failures\n"));
}

#[test]
fn law_reports_are_byte_identical() {
    for instance in ["lts", "tree", "prob"] {
        let args = [
            "laws",
            "--instance",
            instance,
            "--samples",
            "5",
            "--seed",
            "3",
            "--jobs",
            "2",
            "--format",
            "records",
        ];
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0), "{instance}: {}", stdout(&a));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn roundtrip_suites_pass() {
    let o = run(&["kleene-roundtrip", "--samples", "12", "--seed", "1", "--jobs", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["omega-kleene-roundtrip", "--input", &path("fig.lts")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn rational_term_evaluation() {
    let term = path("loop.term");
    let o = run(&["eval-rational", "--input", &term, "--word", "aab"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["eval-rational", "--input", &term, "--word", "aba"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "eval-rational",
        "--input",
        &term,
        "--max-len",
        "2",
        "--format",
        "records",
    ]);
    assert_eq!(stdout(&o), "term=\"gb . ga*\" dom=1 cod=1\nword=b\nword=ab\n");
}

#[test]
fn tree_subcommands() {
    let a = path("even.tree");
    let member = |tree: &str| {
        run(&["tree-member", "--automaton", &a, "--tree", tree, "--state", "0"])
            .status
            .code()
    };
    assert_eq!(member("s(s(_,_),s(_,_))"), Some(0));
    assert_eq!(member("s(_,_)"), Some(1));
    let o = run(&[
        "tree-behaviour",
        "--automaton",
        &a,
        "--state",
        "0",
        "--tree",
        "s(s(_,_),s(_,_))",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "buchi-tree-member",
        "--automaton",
        &a,
        "--tree",
        &path("all_s.rtree"),
        "--state",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_and_input_errors_exit_2() {
    let o = run(&[
        "prob-query",
        "--input",
        &path("ex.pa"),
        "--state",
        "0",
        "--lambda",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["behaviour", "--input", &path("fig.lts"), "--state", "7", "--word", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("out of range"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pa");
    std::fs::write(&bad, "pa\nalphabet 0 1\nstates 1\ntrans 0 0 0 half\n").unwrap();
    let o = run(&[
        "prob-query",
        "--input",
        bad.to_str().unwrap(),
        "--state",
        "0",
        "--lambda",
        "0",
        "--finite",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let term = dir.path().join("bad.term");
    std::fs::write(&term, "gen g : 1->1\nentry 0 0 a\ng . id(2)\n").unwrap();
    let o = run(&["eval-rational", "--input", term.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("type"), "{}", stderr(&o));
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = run(&[
        "prob-query",
        "--input",
        &path("ex.pa"),
        "--state",
        "0",
        "--lambda",
        "000001",
        "--finite",
        "--tol",
        "1e-12",
        "--max-iter",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("best value"));
}

#[test]
fn help_prints_the_grammar() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for needle in ["trans SRC SYM DST PROB", "gen NAME : M->P", "rtree", "Exit codes"] {
        assert!(out.contains(needle), "{needle}");
    }
}

#[test]
fn sample_inputs_reprint_to_equal_values() {
    let read = |n: &str| std::fs::read_to_string(data(n)).unwrap();
    let a = parse_lts(&read("fig.lts")).unwrap();
    assert_eq!(parse_lts(&print_lts(&a)).unwrap().transitions(), a.transitions());
    let p = parse_pa(&read("ex.pa")).unwrap();
    assert_eq!(parse_pa(&print_pa(&p)).unwrap(), p);
    let d = parse_dfa(&read("ends_in_1.dfa")).unwrap();
    assert_eq!(parse_dfa(&print_dfa(&d)).unwrap(), d);
    let f = parse_term_file(&read("loop.term"), false).unwrap();
    assert_eq!(parse_term_file(&print_term_file(&f), false).unwrap(), f);
    let t = parse_tree_automaton(&read("even.tree")).unwrap();
    assert_eq!(parse_tree_automaton(&print_tree_automaton(&t)).unwrap(), t);
    let r = parse_rtree(&read("all_s.rtree"), t.alphabet()).unwrap();
    assert_eq!(parse_rtree(&print_rtree(&r), t.alphabet()).unwrap(), r);
}
