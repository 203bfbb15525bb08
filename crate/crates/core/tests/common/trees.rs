//! Set-level oracles for the tree instance.

use std::collections::BTreeSet;
use std::sync::Arc;

use omega_kleisli::tree::{FiniteTree, TreeAutomaton};
use omega_kleisli::word::Alphabet;

pub fn sigma2() -> Arc<Alphabet> {
    Arc::new(Alphabet::new(["s", "t"]).unwrap())
}

/// Every way of replacing each leaf `j` of `t` by some tree of `sub[j]`,
/// chosen independently per occurrence, keeping results of height at most `max_height`.
pub fn substitute_all(t: &FiniteTree, sub: &[BTreeSet<FiniteTree>], max_height: usize) -> BTreeSet<FiniteTree> {
    match t {
        FiniteTree::Var(j) => sub[*j].iter().filter(|u| u.height() <= max_height).cloned().collect(),
        FiniteTree::Node(a, l, r) => {
            if max_height == 0 {
                return BTreeSet::new();
            }
            let ls = substitute_all(l, sub, max_height - 1);
            let rs = substitute_all(r, sub, max_height - 1);
            let mut out = BTreeSet::new();
            for x in &ls {
                for y in &rs {
                    out.insert(FiniteTree::node(*a, x.clone(), y.clone()));
                }
            }
            out
        }
    }
}

/// Set-level composite: for each `f`-tree, all substitutions by `g`-trees.
pub fn compose_sets(
    f: &[BTreeSet<FiniteTree>],
    g: &[BTreeSet<FiniteTree>],
    max_height: usize,
) -> Vec<BTreeSet<FiniteTree>> {
    f.iter()
        .map(|row| row.iter().flat_map(|t| substitute_all(t, g, max_height)).collect())
        .collect()
}

/// Least solution of `X = {leaf i} ∪ α(i)[X]`, truncated at `max_height`.
pub fn star_sets(alpha: &[BTreeSet<FiniteTree>], max_height: usize) -> Vec<BTreeSet<FiniteTree>> {
    let n = alpha.len();
    let mut x: Vec<BTreeSet<FiniteTree>> = (0..n).map(|i| BTreeSet::from([FiniteTree::Var(i)])).collect();
    loop {
        let next: Vec<BTreeSet<FiniteTree>> = compose_sets(alpha, &x, max_height)
            .into_iter()
            .enumerate()
            .map(|(i, mut s)| {
                s.insert(FiniteTree::Var(i));
                s
            })
            .collect();
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Run search from the root: choose a transition at every inner node and
/// require accepting states on the outer frontier.
pub fn run_exists(a: &TreeAutomaton, q: usize, t: &FiniteTree) -> bool {
    match t {
        FiniteTree::Var(_) => a.accepting()[q],
        FiniteTree::Node(s, l, r) => a
            .delta()
            .iter()
            .any(|&(p, b, ql, qr)| p == q && b == *s && run_exists(a, ql, l) && run_exists(a, qr, r)),
    }
}

/// Depths of all leaves.
pub fn leaf_depths(t: &FiniteTree) -> Vec<usize> {
    match t {
        FiniteTree::Var(_) => vec![0],
        FiniteTree::Node(_, l, r) => leaf_depths(l)
            .into_iter()
            .chain(leaf_depths(r))
            .map(|d| d + 1)
            .collect(),
    }
}
