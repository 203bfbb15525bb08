//! Monte Carlo estimates over seeded trajectories.
//!
//! Samples are split into `jobs` contiguous blocks; block `w` draws from a
//! ChaCha8 generator seeded with `seed` on stream `w`. Results are
//! reproducible for a fixed `(seed, jobs)` pair.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ProbAutomaton, ProbError, ProductChain, TestLanguage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    fn from_hits(hits: usize, samples: usize) -> Self {
        let n = samples as f64;
        let mean = hits as f64 / n;
        let var = if samples > 1 {
            mean * (1.0 - mean) * n / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var / n).sqrt(),
            samples,
        }
    }

    /// `|mean - value| <= k·stderr + slack`.
    pub fn agrees_with(&self, value: f64, k: f64, slack: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + slack
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.mean, self.stderr)
    }
}

fn step(succ: &[(f64, usize)], rng: &mut ChaCha8Rng) -> usize {
    let mut u: f64 = rng.gen();
    for &(p, j) in succ {
        if u < p {
            return j;
        }
        u -= p;
    }
    succ.last().expect("stochastic rows are non-empty").1
}

/// Runs `samples` trials split over `jobs` workers; `trial` reports a hit.
fn run_trials<F>(samples: usize, seed: u64, jobs: usize, trial: F) -> Result<Estimate, ProbError>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    if samples == 0 {
        return Err(ProbError::OutOfRange("monte carlo needs at least one sample".into()));
    }
    let jobs = jobs.clamp(1, samples);
    let block = |w: usize| samples / jobs + usize::from(w < samples % jobs);
    let worker = |w: usize| -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(w as u64);
        (0..block(w)).filter(|_| trial(&mut rng)).count()
    };
    let hits: usize = if jobs == 1 {
        worker(0)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs).map(|w| scope.spawn(move || worker(w))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
        })
    };
    Ok(Estimate::from_hits(hits, samples))
}

/// Estimates the probability that an execution from `x` has a prefix trace
/// in `Λ` and visits `𝔉` infinitely often. Each trajectory runs until it
/// enters a BSCC of the product chain, whose acceptance is then exact.
pub fn monte_carlo(
    a: &ProbAutomaton,
    x: usize,
    lambda: &TestLanguage,
    samples: usize,
    seed: u64,
    jobs: usize,
) -> Result<Estimate, ProbError> {
    let chain = ProductChain::new(a, x, lambda)?;
    run_trials(samples, seed, jobs, |rng| {
        let mut i = 0;
        loop {
            if let Some(acc) = chain.settled(i) {
                return acc;
            }
            i = step(&chain.succ[i], rng);
        }
    })
}

/// Estimates the probability of reaching `𝔉` from `x` along a trace in `Λ`.
/// A trajectory stops at a hit or once no hit is reachable.
pub fn monte_carlo_finite(
    a: &ProbAutomaton,
    x: usize,
    lambda: &TestLanguage,
    samples: usize,
    seed: u64,
    jobs: usize,
) -> Result<Estimate, ProbError> {
    a.check_state(x)?;
    lambda.check(a)?;
    let dfa = lambda.dfa();
    let nq = dfa.states();
    let size = a.states() * nq;
    let succ: Vec<Vec<(f64, usize)>> = (0..size)
        .map(|i| {
            a.moves(i / nq)
                .iter()
                .map(|&(s, z, p)| (p, z * nq + dfa.next(i % nq, s)))
                .collect()
        })
        .collect();
    let hit: Vec<bool> = (0..size)
        .map(|i| a.accepting()[i / nq] && dfa.is_accepting(i % nq))
        .collect();
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, out) in succ.iter().enumerate() {
        for &(_, j) in out {
            pred[j].push(i);
        }
    }
    let mut live = hit.clone();
    let mut stack: Vec<usize> = (0..size).filter(|&i| hit[i]).collect();
    while let Some(j) = stack.pop() {
        for &i in &pred[j] {
            if !live[i] {
                live[i] = true;
                stack.push(i);
            }
        }
    }
    let start = x * nq + dfa.initial();
    run_trials(samples, seed, jobs, |rng| {
        let mut i = start;
        loop {
            if hit[i] {
                return true;
            }
            if !live[i] {
                return false;
            }
            i = step(&succ[i], rng);
        }
    })
}
