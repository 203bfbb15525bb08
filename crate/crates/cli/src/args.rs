use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const GRAMMAR: &str = "\
Input grammar (line based, `#` starts a comment):

  lts automaton        lts / alphabet SYM.. / states N / trans SRC SYM DST / accept STATE..
                       SYM may be `eps` for an internal move
  term file            alphabet SYM..            (optional, inferred otherwise)
                       gen NAME : M->P           followed by
                         entry I J SYM..         symbols or `eps`
                         rentry I J REGEX        only with --allow-raw-generators
                       TERM                      the remaining lines
  term syntax          empty(m,p) | id(n) | b(i1,..,ik ; n) | inj(i ; n1,..,nk)
                       | t . t | t + t | t* | t^w | [t, ..., t] | NAME | (t)
                       `g . f` runs f first
  tree automaton       tree / alphabet SYM.. / states N / trans SRC SYM LEFT RIGHT / accept STATE..
  regular tree         rtree / node ID SYM LEFT RIGHT / root ID   (symbols of the automaton)
  finite tree          SYM(t,t) with leaf `_` (or `_J` for variable J)
  prob automaton       pa / alphabet SYM.. / states N / trans SRC SYM DST PROB / accept STATE..
  test dfa             dfa / alphabet SYM.. / states N / initial Q / trans SRC SYM DST / accept Q..
  regex                0 (empty) | e (empty word) | SYM | r + r | r . r | r r | r* | (r)
                       symbols named `0` or `e` shadow the constants; `∅` and `ε` always work
  word                 symbols juxtaposed (single-char alphabets) or space separated; `eps` is empty
  lasso                u:v for u v^w, u possibly empty

Exit codes: 0 accept or pass, 1 reject or fail, 2 usage or input error, 3 budget exceeded.";

#[derive(Debug, Parser)]
#[command(
    name = "omega-kleisli",
    version,
    about = "Finite and infinite behaviour of automata in Kleisli theories"
)]
#[command(after_long_help = GRAMMAR)]
pub struct Cli {
    /// Output mode.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Worker threads for suite subcommands and Monte Carlo sampling.
    #[arg(long, default_value_t = 1, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,

    /// Seed for randomized subcommands.
    #[arg(long, env = "OMEGA_KLEISLI_SEED", default_value_t = 0, global = true)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One line of space-separated `key=value` pairs per record.
    Records,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite behaviour of a state of an lts automaton.
    Behaviour(BehaviourArgs),
    /// ω-behaviour of a state of an lts automaton.
    OmegaBehaviour(OmegaBehaviourArgs),
    /// Evaluate a rational term file in the lts instance.
    EvalRational(EvalRationalArgs),
    /// Automaton to rational term and back, compared exactly.
    KleeneRoundtrip(RoundtripArgs),
    /// Automaton to ω-rational row and back, compared on bounded lassos.
    OmegaKleeneRoundtrip(RoundtripArgs),
    /// Finite tree membership by a direct run search.
    TreeMember(TreeMemberArgs),
    /// Finite tree behaviour computed in the tree instance.
    TreeBehaviour(TreeBehaviourArgs),
    /// Büchi acceptance of a regular infinite tree.
    BuchiTreeMember(BuchiTreeArgs),
    /// Probability of a finite or ω test event.
    ProbQuery(ProbQueryArgs),
    /// Check the algebraic laws of an instance on random samples.
    Laws(LawsArgs),
}

#[derive(Debug, Args)]
pub struct BehaviourArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub state: usize,
    /// Decide membership of this word instead of listing the behaviour.
    #[arg(long)]
    pub word: Option<String>,
    /// Longest word listed when no word is given.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
}

#[derive(Debug, Args)]
pub struct OmegaBehaviourArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub state: usize,
    /// Decide membership of `u:v` instead of listing accepted lassos.
    #[arg(long)]
    pub lasso: Option<String>,
    /// Lassos listed have `|u|, |v|` at most this.
    #[arg(long, default_value_t = 2)]
    pub bound: usize,
}

#[derive(Debug, Args)]
pub struct EvalRationalArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, conflicts_with = "lasso")]
    pub word: Option<String>,
    #[arg(long)]
    pub lasso: Option<String>,
    /// Source index of the queried entry.
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    /// Target index of the queried entry (finite words only).
    #[arg(long, default_value_t = 0)]
    pub col: usize,
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    /// Accept `rentry` lines with arbitrary regular languages.
    #[arg(long)]
    pub allow_raw_generators: bool,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Check every state of this automaton instead of random ones.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Lasso bound for ω comparisons.
    #[arg(long, default_value_t = 3)]
    pub bound: usize,
}

#[derive(Debug, Args)]
pub struct TreeMemberArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    /// Finite tree such as `a(_,b(_,_))`.
    #[arg(long)]
    pub tree: String,
    #[arg(long)]
    pub state: usize,
}

#[derive(Debug, Args)]
pub struct TreeBehaviourArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    /// Decide membership of this finite tree instead of listing trees.
    #[arg(long)]
    pub tree: Option<String>,
    #[arg(long)]
    pub state: usize,
    /// Largest height listed, and the comparison height of the instance.
    #[arg(long, default_value_t = 2)]
    pub height: usize,
}

#[derive(Debug, Args)]
pub struct BuchiTreeArgs {
    #[arg(long)]
    pub automaton: PathBuf,
    /// Regular tree file.
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long)]
    pub state: usize,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["finite", "omega"]))]
pub struct ProbQueryArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub state: usize,
    /// Path of a dfa file, or a regular expression.
    #[arg(long)]
    pub lambda: String,
    /// Probability of reaching an accepting state along a trace in the language.
    #[arg(long)]
    pub finite: bool,
    /// Probability of infinitely many accepting visits on a run with a prefix in the language.
    #[arg(long)]
    pub omega: bool,
    /// Solve the bottom strongly connected components exactly (ω queries).
    #[arg(long, conflicts_with = "montecarlo")]
    pub exact: bool,
    /// Estimate by sampling this many trajectories.
    #[arg(long, value_name = "N")]
    pub montecarlo: Option<usize>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Iteration budget; the outer budget for ω queries.
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Instance {
    Lts,
    Tree,
    Prob,
}

#[derive(Debug, Args)]
pub struct LawsArgs {
    #[arg(long, value_enum)]
    pub instance: Instance,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Lasso bound (lts) or comparison height (tree).
    #[arg(long, default_value_t = 3)]
    pub bound: usize,
    /// Skip the ω-laws.
    #[arg(long)]
    pub no_omega: bool,
}
