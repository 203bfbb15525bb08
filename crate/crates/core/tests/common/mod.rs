//! Brute-force oracles shared by the integration tests and the acceptance
//! harness. None of them goes through the matrix or ω-language machinery.
#![allow(dead_code)]

pub mod suites;
pub mod trees;

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use omega_kleisli::lts::{parse_lts, NdAutomaton};
use omega_kleisli::omega::LassoWord;
use omega_kleisli::word::{Alphabet, LangMatrix, Regex, Sym};
use rand::Rng;

pub const FIG_LTS: &str = "\
lts
alphabet 0 1
states 3
trans 0 0 1
trans 0 0 2
trans 0 1 2
trans 1 1 2
trans 2 1 2
accept 2
";

pub fn fig_automaton() -> NdAutomaton {
    parse_lts(FIG_LTS).expect("figure automaton parses")
}

pub fn binary() -> Arc<Alphabet> {
    Arc::new(Alphabet::new(["a", "b"]).unwrap())
}

/// Nodes reachable from `start` (including `start`).
fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Whether some node satisfying `marked`, reachable from `start`, lies on a cycle.
pub fn reachable_marked_cycle(adj: &[Vec<usize>], start: usize, marked: impl Fn(usize) -> bool) -> bool {
    let from_start = reachable(adj, start);
    (0..adj.len()).any(|v| {
        from_start[v] && marked(v) && {
            let succ: Vec<usize> = adj[v].clone();
            succ.iter().any(|&w| reachable(adj, w)[v])
        }
    })
}

/// Finite-word acceptance by explicit ε-closure simulation of the transitions.
pub fn nfa_accepts(a: &NdAutomaton, start: usize, word: &[Sym]) -> bool {
    let trans = a.transitions();
    let closure = |set: BTreeSet<usize>| -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.into_iter().collect();
        while let Some(q) = stack.pop() {
            for &(s, sym, d) in &trans {
                if s == q && sym.is_none() && out.insert(d) {
                    stack.push(d);
                }
            }
        }
        out
    };
    let mut cur = closure([start].into());
    for &x in word {
        let next: BTreeSet<usize> = trans
            .iter()
            .filter(|&&(s, sym, _)| cur.contains(&s) && sym == Some(x))
            .map(|&(_, _, d)| d)
            .collect();
        cur = closure(next);
    }
    cur.iter().any(|&q| a.accepting()[q])
}

/// Lasso positions `0..|u|+|v|`; position `|u|+|v|` wraps to `|u|`.
fn next_pos(lasso: &LassoWord, p: usize) -> usize {
    let len = lasso.prefix().len() + lasso.period().len();
    if p + 1 == len {
        lasso.prefix().len()
    } else {
        p + 1
    }
}

/// Büchi acceptance of `lasso` from `start`: some run visits an accepting
/// state infinitely often. A run that stops reading letters but keeps
/// cycling through accepting states via ε-moves also accepts.
pub fn buchi_run_search(a: &NdAutomaton, start: usize, lasso: &LassoWord) -> bool {
    let positions = lasso.prefix().len() + lasso.period().len();
    let n = a.states();
    let node = |q: usize, p: usize| q * positions + p;
    let mut adj = vec![Vec::new(); n * positions];
    for (s, sym, d) in a.transitions() {
        for p in 0..positions {
            match sym {
                None => adj[node(s, p)].push(node(d, p)),
                Some(x) if lasso.at(p) == x => adj[node(s, p)].push(node(d, next_pos(lasso, p))),
                Some(_) => {}
            }
        }
    }
    reachable_marked_cycle(&adj, node(start, 0), |v| a.accepting()[v / positions])
}

/// Component `i` of the ω-iteration of `m` contains `lasso` iff the graph
/// on (index, lasso position) with an edge for every entry word matching the
/// lasso at that position has a reachable cycle. Entry words are tried up to
/// a length past which a run of the entry automaton must repeat a
/// (state, position) pair and can be shortened.
pub fn matrix_lasso_oracle(m: &LangMatrix, i: usize, lasso: &LassoWord) -> bool {
    let n = m.rows();
    let positions = lasso.prefix().len() + lasso.period().len();
    let node = |j: usize, p: usize| j * positions + p;
    let mut adj = vec![Vec::new(); n * positions];
    for a in 0..n {
        for b in 0..n {
            let entry = m.get(a, b);
            if entry.is_empty() {
                continue;
            }
            let max_len = entry.state_count() * positions + 1;
            for p in 0..positions {
                let mut q = p;
                let mut factor = Vec::new();
                for len in 0..=max_len {
                    if len > 0 {
                        factor.push(lasso.at(p + len - 1));
                        q = next_pos(lasso, q);
                    }
                    if entry.member(&factor) {
                        adj[node(a, p)].push(node(b, q));
                    }
                }
            }
        }
    }
    reachable_marked_cycle(&adj, node(i, 0), |_| true)
}

/// Random regular expression over `k` symbols with nesting at most `depth`.
pub fn random_regex<R: Rng>(rng: &mut R, k: usize, depth: usize) -> Regex {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..6) {
            0 => Regex::Empty,
            1 => Regex::Epsilon,
            _ => Regex::Symbol(rng.gen_range(0..k) as Sym),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => Regex::union(random_regex(rng, k, d), random_regex(rng, k, d)),
        1 => Regex::concat(random_regex(rng, k, d), random_regex(rng, k, d)),
        _ => Regex::star(random_regex(rng, k, d)),
    }
}

/// Random square matrix of small regular languages.
pub fn random_matrix<R: Rng>(rng: &mut R, alphabet: &Arc<Alphabet>, n: usize) -> LangMatrix {
    let cells: Vec<Regex> = (0..n * n).map(|_| random_regex(rng, alphabet.len(), 2)).collect();
    LangMatrix::from_fn(alphabet.clone(), n, n, |i, j| cells[i * n + j].to_lang(alphabet)).unwrap()
}
