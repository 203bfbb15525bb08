//! Value iteration on the product of the automaton with the test DFA.

use super::{check_tol, ProbAutomaton, ProbError, TestLanguage};
use crate::word::Dfa;

/// Values over `(state, DFA state)` pairs with iteration metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    dfa_states: usize,
    values: Vec<f64>,
    /// DFA state the queries start from.
    pub initial: usize,
    pub rounds: usize,
    /// Size of the last step; for ω tables at least the geometric estimate
    /// of the remaining distance to the limit.
    pub residual: f64,
    /// Every round moved every entry in the iteration's direction.
    pub monotone: bool,
}

impl ValueTable {
    pub fn get(&self, x: usize, q: usize) -> f64 {
        self.values[x * self.dfa_states + q]
    }

    pub fn at_initial(&self, x: usize) -> f64 {
        self.get(x, self.initial)
    }

    pub fn states(&self) -> usize {
        self.values.len() / self.dfa_states
    }

    pub fn dfa_states(&self) -> usize {
        self.dfa_states
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Rounding slack allowed when checking monotonicity.
const MONOTONE_SLACK: f64 = 1e-12;

/// The inner fixpoints of the ω loop stop this much tighter than the outer
/// loop, so their truncation error stays below the outer residual.
const INNER_TOL_FACTOR: f64 = 1e-3;

/// Successor lists of the product chain: `(probability, product index)`.
struct Product {
    nq: usize,
    succ: Vec<Vec<(f64, usize)>>,
}

impl Product {
    fn new(a: &ProbAutomaton, dfa: &Dfa) -> Self {
        let nq = dfa.states();
        let mut succ = Vec::with_capacity(a.states() * nq);
        for y in 0..a.states() {
            for q in 0..nq {
                succ.push(
                    a.moves(y)
                        .iter()
                        .map(|&(s, z, p)| (p, z * nq + dfa.next(q, s)))
                        .collect(),
                );
            }
        }
        Product { nq, succ }
    }

    fn expect(&self, i: usize, v: &[f64]) -> f64 {
        self.succ[i].iter().map(|&(p, j)| p * v[j]).sum()
    }

    /// Least fixpoint of `V = max(goal, P·V)` by iteration from zero.
    fn least_fixpoint(&self, goal: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, usize, f64, bool) {
        let mut v = vec![0.0; goal.len()];
        let mut next = vec![0.0; goal.len()];
        let mut monotone = true;
        let mut rounds = 0;
        loop {
            let mut residual: f64 = 0.0;
            for i in 0..v.len() {
                next[i] = goal[i].max(self.expect(i, &v));
                monotone &= next[i] >= v[i] - MONOTONE_SLACK;
                residual = residual.max((next[i] - v[i]).abs());
            }
            std::mem::swap(&mut v, &mut next);
            rounds += 1;
            if residual < tol || rounds >= max_iter {
                return (v, rounds, residual, monotone);
            }
        }
    }
}

fn finite_raw(a: &ProbAutomaton, lambda: &TestLanguage, tol: f64, max_iter: usize) -> Result<ValueTable, ProbError> {
    check_tol(tol)?;
    lambda.check(a)?;
    let dfa = lambda.dfa();
    let product = Product::new(a, dfa);
    let nq = product.nq;
    let goal: Vec<f64> = (0..a.states() * nq)
        .map(|i| {
            if a.accepting()[i / nq] && dfa.is_accepting(i % nq) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let (values, rounds, residual, monotone) = product.least_fixpoint(&goal, tol, max_iter);
    Ok(ValueTable {
        dfa_states: nq,
        values,
        initial: dfa.initial(),
        rounds,
        residual,
        monotone,
    })
}

fn budget(t: &ValueTable, value: f64) -> ProbError {
    ProbError::IterationBudgetExceeded {
        rounds: t.rounds,
        value,
        residual: t.residual,
    }
}

/// `‖α̂,𝔉‖(·)(χ_Λ)` for every start state and every residual test `Λ_q`.
pub fn finite_values(
    a: &ProbAutomaton,
    lambda: &TestLanguage,
    tol: f64,
    max_iter: usize,
) -> Result<ValueTable, ProbError> {
    let t = finite_raw(a, lambda, tol, max_iter)?;
    if t.residual >= tol {
        return Err(budget(&t, t.values.iter().cloned().fold(0.0, f64::max)));
    }
    Ok(t)
}

/// Probability of reaching `𝔉` from `x` along a trace in `Λ`.
pub fn finite_query(
    a: &ProbAutomaton,
    x: usize,
    lambda: &TestLanguage,
    tol: f64,
    max_iter: usize,
) -> Result<f64, ProbError> {
    a.check_state(x)?;
    let t = finite_raw(a, lambda, tol, max_iter)?;
    if t.residual >= tol {
        return Err(budget(&t, t.at_initial(x)));
    }
    Ok(t.at_initial(x))
}

/// `‖α̂,𝔉‖_ω(·)(χ_{Λ·Σ^ω})` over the sink-accepting DFA.
///
/// Outer descending loop `G_{n+1}(x,q) = Σ P(x,a,y)·W(y,δ(q,a))`, where `W`
/// is the least fixpoint of `W(y,q) = max([y∈𝔉]·G_n(y,q), Σ P·W)`. The loop
/// starts from `G₀(y,q)`, the probability that a trace from `y` ever enters
/// an accepting DFA state from `q`; then `G_n` is the probability of at
/// least `n` later visits to `𝔉` on a trace with a prefix in `Λ_q`.
pub fn omega_values(
    a: &ProbAutomaton,
    lambda: &TestLanguage,
    tol: f64,
    max_outer: usize,
) -> Result<ValueTable, ProbError> {
    let t = omega_raw(a, lambda, tol, max_outer)?;
    if t.residual >= tol {
        return Err(budget(&t, t.values.iter().cloned().fold(0.0, f64::max)));
    }
    Ok(t)
}

fn omega_raw(a: &ProbAutomaton, lambda: &TestLanguage, tol: f64, max_outer: usize) -> Result<ValueTable, ProbError> {
    check_tol(tol)?;
    lambda.check(a)?;
    let dfa = lambda.sink_dfa();
    let product = Product::new(a, dfa);
    let nq = product.nq;
    let size = a.states() * nq;
    let inner_tol = tol * INNER_TOL_FACTOR;
    let inner = |goal: &[f64]| -> Result<Vec<f64>, ProbError> {
        let (w, rounds, residual, _) = product.least_fixpoint(goal, inner_tol, super::DEFAULT_MAX_ITER);
        if residual >= inner_tol {
            return Err(ProbError::IterationBudgetExceeded {
                rounds,
                value: w.iter().cloned().fold(0.0, f64::max),
                residual,
            });
        }
        Ok(w)
    };
    let reach: Vec<f64> = (0..size)
        .map(|i| if dfa.is_accepting(i % nq) { 1.0 } else { 0.0 })
        .collect();
    let mut g = inner(&reach)?;
    let mut monotone = true;
    let mut rounds = 0;
    let mut previous = f64::INFINITY;
    loop {
        let goal: Vec<f64> = (0..size)
            .map(|i| if a.accepting()[i / nq] { g[i] } else { 0.0 })
            .collect();
        let w = inner(&goal)?;
        let next: Vec<f64> = (0..size).map(|i| product.expect(i, &w)).collect();
        let mut residual: f64 = 0.0;
        for i in 0..size {
            // Inner truncation errors are bounded by the outer tolerance.
            monotone &= next[i] <= g[i] + tol;
            residual = residual.max((next[i] - g[i]).abs());
        }
        g = next;
        rounds += 1;
        // A step of size s after one of size p leaves at most s·r/(1-r) to go
        // when the chain contracts at rate r = s/p.
        let rate = residual / previous;
        let tail = if residual == 0.0 {
            0.0
        } else if rate < 1.0 {
            residual * rate / (1.0 - rate)
        } else {
            f64::INFINITY
        };
        previous = residual;
        let residual = residual.max(tail);
        if residual < tol || rounds >= max_outer {
            return Ok(ValueTable {
                dfa_states: nq,
                values: g,
                initial: dfa.initial(),
                rounds,
                residual,
                monotone,
            });
        }
    }
}

/// Probability that an execution from `x` has a prefix trace in `Λ` and
/// visits `𝔉` infinitely often.
pub fn omega_query(
    a: &ProbAutomaton,
    x: usize,
    lambda: &TestLanguage,
    tol: f64,
    max_outer: usize,
) -> Result<f64, ProbError> {
    a.check_state(x)?;
    let t = omega_raw(a, lambda, tol, max_outer)?;
    if t.residual >= tol {
        return Err(budget(&t, t.at_initial(x)));
    }
    Ok(t.at_initial(x))
}
