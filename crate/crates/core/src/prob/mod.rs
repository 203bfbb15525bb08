//! Probabilistic automata: finite and ω-behaviour against regular test
//! languages, with an exact BSCC oracle and a Monte Carlo estimator.
//!
//! Test functions are never represented in general. Queries evaluate
//! against the characteristic functions of `Λ` (finite behaviour) and
//! `Λ·Σ^ω` (ω-behaviour), tracked by the state of a complete DFA.

mod bscc;
mod format;
mod montecarlo;
mod query;
mod random;
mod theory;

use std::sync::Arc;

use thiserror::Error;

use crate::word::{same_alphabet, Alphabet, Dfa, Sym, WordError, WordLang};

pub use bscc::{bscc_exact, ProductChain};
pub use format::{parse_dfa, parse_pa, print_dfa, print_pa};
pub use montecarlo::{monte_carlo, monte_carlo_finite, Estimate};
pub use query::{finite_query, finite_values, omega_query, omega_values, ValueTable};
pub use random::{random_dfa, random_prob_automaton, random_prob_term, random_step, ProbSampler};
pub use theory::{ProbArrow, ProbTheory, TestTable};

/// Rows of `P` must sum to one within this slack.
pub const STOCHASTIC_SLACK: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
pub const DEFAULT_MAX_ITER_OUTER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("probability {value} out of [0, 1] on transition {src} -> {dst}")]
    BadProbability { src: usize, dst: usize, value: f64 },
    #[error("outgoing probabilities of state {state} sum to {sum}, not 1")]
    NotStochastic { state: usize, sum: f64 },
    #[error("duplicate transition {src} {symbol} {dst}")]
    DuplicateTransition { src: usize, symbol: String, dst: usize },
    #[error("{0}")]
    OutOfRange(String),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    /// Carries the best bound reached when the budget ran out.
    #[error("no convergence within {rounds} rounds (best value {value}, residual {residual:e})")]
    IterationBudgetExceeded { rounds: usize, value: f64, residual: f64 },
    #[error("singular linear system")]
    Singular,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// `(X, Σ, P, 𝔉)` with stochastic rows. Zero-probability entries are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbAutomaton {
    alphabet: Arc<Alphabet>,
    out: Vec<Vec<(Sym, usize, f64)>>,
    accepting: Vec<bool>,
}

impl ProbAutomaton {
    pub fn new(
        alphabet: Arc<Alphabet>,
        states: usize,
        transitions: &[(usize, Sym, usize, f64)],
        accepting: &[usize],
    ) -> Result<Self, ProbError> {
        let mut out: Vec<Vec<(Sym, usize, f64)>> = vec![Vec::new(); states];
        for &(src, a, dst, p) in transitions {
            if src >= states || dst >= states {
                return Err(ProbError::OutOfRange(format!(
                    "transition {src} -> {dst} with {states} states"
                )));
            }
            alphabet.check(&[a])?;
            if !(0.0..=1.0).contains(&p) {
                return Err(ProbError::BadProbability { src, dst, value: p });
            }
            if out[src].iter().any(|&(b, d, _)| b == a && d == dst) {
                return Err(ProbError::DuplicateTransition {
                    src,
                    symbol: alphabet.name(a).to_string(),
                    dst,
                });
            }
            if p > 0.0 {
                out[src].push((a, dst, p));
            }
        }
        for (state, row) in out.iter().enumerate() {
            let sum: f64 = row.iter().map(|e| e.2).sum();
            if (sum - 1.0).abs() > STOCHASTIC_SLACK {
                return Err(ProbError::NotStochastic { state, sum });
            }
        }
        let mut acc = vec![false; states];
        for &f in accepting {
            if f >= states {
                return Err(ProbError::OutOfRange(format!(
                    "accepting state {f} with {states} states"
                )));
            }
            acc[f] = true;
        }
        Ok(ProbAutomaton {
            alphabet,
            out,
            accepting: acc,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.out.len()
    }

    /// Positive-probability moves `(a, y, P(x, a, y))` out of `x`.
    pub fn moves(&self, x: usize) -> &[(Sym, usize, f64)] {
        &self.out[x]
    }

    pub fn transitions(&self) -> Vec<(usize, Sym, usize, f64)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |&(a, y, p)| (x, a, y, p)))
            .collect()
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn with_accepting(&self, accepting: Vec<bool>) -> Result<Self, ProbError> {
        if accepting.len() != self.states() {
            return Err(ProbError::OutOfRange(format!(
                "{} accepting flags for {} states",
                accepting.len(),
                self.states()
            )));
        }
        Ok(ProbAutomaton {
            accepting,
            ..self.clone()
        })
    }

    pub(crate) fn check_state(&self, x: usize) -> Result<(), ProbError> {
        if x >= self.states() {
            return Err(ProbError::OutOfRange(format!(
                "state {x} with {} states",
                self.states()
            )));
        }
        Ok(())
    }
}

/// `Λ ⊆ Σ*` as a complete DFA, with the sink-accepting DFA for the prefixes
/// of `Λ·Σ^ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestLanguage {
    alphabet: Arc<Alphabet>,
    dfa: Dfa,
    sink: Dfa,
}

impl TestLanguage {
    pub fn from_dfa(alphabet: Arc<Alphabet>, dfa: Dfa) -> Result<Self, ProbError> {
        if dfa.symbols() != alphabet.len() {
            return Err(ProbError::OutOfRange(format!(
                "dfa over {} symbols for an alphabet of {}",
                dfa.symbols(),
                alphabet.len()
            )));
        }
        let sink = dfa.sink_accepting();
        Ok(TestLanguage { alphabet, dfa, sink })
    }

    pub fn from_lang(lang: &WordLang) -> Self {
        let dfa = lang.determinize().minimize();
        let sink = dfa.sink_accepting();
        TestLanguage {
            alphabet: lang.alphabet().clone(),
            dfa,
            sink,
        }
    }

    /// All of `Σ*`; its ω-extension is `Σ^ω`.
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        TestLanguage::from_lang(&WordLang::universal(alphabet))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    /// Accepting states are absorbing.
    pub fn sink_dfa(&self) -> &Dfa {
        &self.sink
    }

    pub(crate) fn check(&self, a: &ProbAutomaton) -> Result<(), ProbError> {
        same_alphabet(&self.alphabet, &a.alphabet)?;
        Ok(())
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<(), ProbError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ProbError::BadTolerance(tol));
    }
    Ok(())
}
