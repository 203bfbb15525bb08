use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ProbArrow, ProbAutomaton, ProbTheory};
use crate::kernel::{eval_rational, random_term_shape, GeneratorTable, RationalTerm, SampleKind, Sampler};
use crate::word::{Alphabet, Dfa, Sym};

/// Splits `total` into `k` random positive parts summing to `total` exactly.
fn split<R: Rng>(rng: &mut R, k: usize, total: f64) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut parts: Vec<f64> = raw.iter().map(|r| total * r / sum).collect();
    let head: f64 = parts[..k - 1].iter().sum();
    parts[k - 1] = total - head;
    parts
}

/// Stochastic automaton with `n` states; each state has one to three
/// distinct moves, and each state accepts with probability one half.
/// Targets lean towards higher-numbered states and some states only loop,
/// so low states are often transient between competing bottom components.
pub fn random_prob_automaton<R: Rng>(alphabet: &Arc<Alphabet>, n: usize, rng: &mut R) -> ProbAutomaton {
    let k = alphabet.len();
    let mut trans = Vec::new();
    for x in 0..n {
        let closed = x + 1 == n || (x > 0 && rng.gen_bool(0.5));
        let targets = if closed { 1 } else { n };
        let moves = rng.gen_range(1..=3.min(k * targets));
        let mut picks: Vec<(Sym, usize)> = Vec::with_capacity(moves);
        while picks.len() < moves {
            let y = if closed {
                x
            } else if rng.gen_bool(0.9) {
                rng.gen_range(x..n)
            } else {
                rng.gen_range(0..n)
            };
            let pick = (rng.gen_range(0..k) as Sym, y);
            if !picks.contains(&pick) {
                picks.push(pick);
            }
        }
        let weights = split(rng, moves, 1.0);
        for ((a, y), w) in picks.into_iter().zip(weights) {
            trans.push((x, a, y, w));
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    ProbAutomaton::new(alphabet.clone(), n, &trans, &accepting).expect("rows sum to one")
}

/// Complete DFA with `states` states and a random accepting set.
pub fn random_dfa<R: Rng>(alphabet: &Alphabet, states: usize, rng: &mut R) -> Dfa {
    let trans: Vec<(usize, Sym, usize)> = (0..states)
        .flat_map(|q| (0..alphabet.len() as Sym).map(move |a| (q, a)))
        .map(|(q, a)| (q, a, rng.gen_range(0..states)))
        .collect();
    let accepting: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.5)).collect();
    Dfa::from_table(alphabet, states, 0, &trans, &accepting).expect("total table")
}

/// One-step arrow `m ⇸ p`: each row spreads a random mass in `[0.3, 1]`
/// over up to three moves, sometimes keeping a share for `Σ^ω`.
pub fn random_step<R: Rng>(t: &ProbTheory, m: usize, p: usize, rng: &mut R) -> ProbArrow {
    let k = t.alphabet().len();
    let mut rows = Vec::with_capacity(m);
    let mut inf = Vec::with_capacity(m);
    for _ in 0..m {
        let moves = if p == 0 { 0 } else { rng.gen_range(0..=3) };
        let omega = p == 0 || rng.gen_bool(0.2);
        let total = rng.gen_range(0.3..=1.0);
        let parts = split(rng, moves + usize::from(omega), total);
        let row = (0..moves)
            .map(|j| (rng.gen_range(0..k) as Sym, rng.gen_range(0..p), parts[j]))
            .collect();
        rows.push(row);
        inf.push(if omega { parts[moves] } else { 0.0 });
    }
    ProbArrow::step(k, p, rows, inf).expect("subdistribution rows")
}

/// Random term `m ⇸ p` over fresh one-step generators inserted into `table`.
pub fn random_prob_term<R: Rng>(
    t: &ProbTheory,
    rng: &mut R,
    m: usize,
    p: usize,
    depth: usize,
    max_dim: usize,
    table: &mut GeneratorTable<ProbArrow>,
) -> RationalTerm {
    random_term_shape(rng, m, p, depth, max_dim, &mut |rng: &mut R, m, p| {
        let name = format!("g{}", table.len());
        table
            .insert(t, &name, random_step(t, m, p, rng))
            .expect("fresh one-step generator");
        RationalTerm::Gen(name)
    })
}

#[derive(Debug, Clone)]
pub struct ProbSampler {
    pub max_dim: usize,
    pub depth: usize,
}

impl Default for ProbSampler {
    fn default() -> Self {
        ProbSampler { max_dim: 3, depth: 2 }
    }
}

impl Sampler<ProbTheory> for ProbSampler {
    fn sample(&self, t: &ProbTheory, rng: &mut ChaCha8Rng, dom: usize, cod: usize, kind: SampleKind) -> ProbArrow {
        match kind {
            SampleKind::OneStep => random_step(t, dom, cod, rng),
            SampleKind::Regular => {
                let mut table = GeneratorTable::new();
                let term = random_prob_term(t, rng, dom, cod, self.depth, self.max_dim, &mut table);
                eval_rational(t, &table, &term).expect("well-typed random term")
            }
        }
    }

    fn max_dim(&self) -> usize {
        self.max_dim
    }
}
