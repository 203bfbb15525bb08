//! Finite and infinite binary trees: the tree instance, top-down tree
//! automata, and Büchi acceptance of regular infinite trees.
//!
//! Arrows `n ⇸ m` are tree automata with variable exits (see
//! [`TreeMorphism`]). Two arrows are equal when every entry generates the
//! same trees of height at most the instance bound, decided by a joint
//! bottom-up subset construction. The instance has no ω-arrows; infinite
//! trees are handled by the game in [`buchi_tree_member`].

mod format;
mod game;
mod kleene;
mod morphism;
mod random;
mod term;

use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{bang, check_endo, final_map, Theory, TheoryError, Verdict};
use crate::word::{Alphabet, Sym};

pub use format::{parse_rtree, parse_tree_automaton, print_rtree, print_tree_automaton};
pub use game::{acceptance_game, buchi_tree_member, BuchiGame, GameSolution, RegularInfTree, POSITION_CAP};
pub use kleene::{check_tree_omega_roundtrip, hub_game_member, omega_tree_automaton, one_step_table};
pub use morphism::TreeMorphism;
pub use random::{random_one_step_tree, random_regular_tree, random_tree_automaton, random_tree_term, TreeSampler};
pub use term::{FiniteTree, TreeSyntaxError};

use morphism::explore_jointly;

/// Height up to which the comparator checks denotations.
pub const DEFAULT_HEIGHT: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("game has more than {cap} positions")]
    Budget { cap: usize },
}

/// The tree instance over a fixed alphabet of binary symbols.
#[derive(Debug, Clone)]
pub struct TreeTheory {
    alphabet: Arc<Alphabet>,
    height: usize,
}

impl TreeTheory {
    pub fn new(alphabet: Arc<Alphabet>, height: usize) -> Self {
        TreeTheory { alphabet, height }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn check_alphabet(&self, f: &TreeMorphism) -> Result<(), TheoryError> {
        if **f.alphabet() != *self.alphabet {
            return Err(TheoryError::Type(format!(
                "alphabet {} in a theory over {}",
                f.alphabet(),
                self.alphabet
            )));
        }
        Ok(())
    }

    fn check_same_shape(&self, f: &TreeMorphism, g: &TreeMorphism, what: &str) -> Result<(), TheoryError> {
        self.check_alphabet(f)?;
        self.check_alphabet(g)?;
        if (f.dom(), f.cod()) != (g.dom(), g.cod()) {
            return Err(TheoryError::Type(format!(
                "{what} of {} -> {} and {} -> {}",
                f.dom(),
                f.cod(),
                g.dom(),
                g.cod()
            )));
        }
        Ok(())
    }

    /// First entry and tree of height at most the bound on which `f ≤ g`
    /// (or equality, when `both_ways`) fails.
    fn find_difference(&self, f: &TreeMorphism, g: &TreeMorphism, both_ways: bool) -> Option<String> {
        let (ef, eg) = (f.entries(), g.entries());
        let differs = |sets: &[fixedbitset::FixedBitSet], i: usize| {
            let (a, b) = (sets[0][ef[i] as usize], sets[1][eg[i] as usize]);
            (a && !b) || (both_ways && b && !a)
        };
        let witness = explore_jointly(&[f, g], f.cod(), self.height, |sets| {
            (0..f.dom()).any(|i| differs(sets, i))
        })?;
        let i = (0..f.dom())
            .find(|&i| f.member(i, &witness) != g.member(i, &witness))
            .unwrap_or(0);
        let side = if f.member(i, &witness) { "left" } else { "right" };
        Some(format!(
            "entry {i}: {} only on the {side}",
            witness.display(&self.alphabet)
        ))
    }
}

impl Theory for TreeTheory {
    type Arrow = TreeMorphism;

    fn dom(&self, f: &TreeMorphism) -> usize {
        f.dom()
    }

    fn cod(&self, f: &TreeMorphism) -> usize {
        f.cod()
    }

    fn compose(&self, g: &TreeMorphism, f: &TreeMorphism) -> Result<TreeMorphism, TheoryError> {
        self.check_alphabet(f)?;
        self.check_alphabet(g)?;
        if f.cod() != g.dom() {
            return Err(TheoryError::Type(format!(
                "composition of {} -> {} after {} -> {}",
                g.dom(),
                g.cod(),
                f.dom(),
                f.cod()
            )));
        }
        Ok(TreeMorphism::compose(g, f))
    }

    fn join(&self, f: &TreeMorphism, g: &TreeMorphism) -> Result<TreeMorphism, TheoryError> {
        self.check_same_shape(f, g, "join")?;
        Ok(TreeMorphism::join(f, g))
    }

    fn bottom(&self, m: usize, p: usize) -> TreeMorphism {
        TreeMorphism::bottom(self.alphabet.clone(), m, p)
    }

    fn base(&self, map: &[usize], p: usize) -> Result<TreeMorphism, TheoryError> {
        TreeMorphism::base(self.alphabet.clone(), map, p)
    }

    fn cotuple(&self, parts: &[TreeMorphism]) -> Result<TreeMorphism, TheoryError> {
        let p = parts
            .first()
            .map(|f| f.cod())
            .ok_or_else(|| TheoryError::Type("empty cotuple".into()))?;
        for f in parts {
            self.check_alphabet(f)?;
            if f.cod() != p {
                return Err(TheoryError::Type("cotuple parts with different codomains".into()));
            }
        }
        Ok(TreeMorphism::cotuple(parts, p, self.alphabet.clone()))
    }

    fn compare(&self, f: &TreeMorphism, g: &TreeMorphism) -> Result<Verdict, TheoryError> {
        self.check_same_shape(f, g, "compare")?;
        Ok(Verdict::from_witness(self.find_difference(f, g, true)))
    }

    fn compare_leq(&self, f: &TreeMorphism, g: &TreeMorphism) -> Result<Verdict, TheoryError> {
        self.check_same_shape(f, g, "compare")?;
        Ok(Verdict::from_witness(self.find_difference(f, g, false)))
    }

    /// Every entry generates only trees of height at most 1.
    fn is_one_step(&self, f: &TreeMorphism) -> bool {
        !f.exceeds_height_one()
    }

    fn star(&self, alpha: &TreeMorphism) -> Result<TreeMorphism, TheoryError> {
        check_endo(self, alpha, "star")?;
        self.check_alphabet(alpha)?;
        Ok(TreeMorphism::star(alpha))
    }

    fn omega(&self, _beta: &TreeMorphism) -> Result<TreeMorphism, TheoryError> {
        Err(TheoryError::Unsupported(
            "the tree instance has no ω-arrows; use the Büchi tree game".into(),
        ))
    }

    fn describe(&self, f: &TreeMorphism) -> String {
        let mut out = format!("{} -> {} with {} states", f.dom(), f.cod(), f.states());
        for i in 0..f.dom() {
            let trees: Vec<String> = f
                .trees_up_to(i, 1)
                .iter()
                .take(6)
                .map(|t| t.display(&self.alphabet).to_string())
                .collect();
            out.push_str(&format!("; entry {i} ⊇ {{{}}}", trees.join(", ")));
        }
        out
    }
}

/// Top-down tree automaton `(n, δ, F)` with `δ ⊆ n × Σ × n × n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    alphabet: Arc<Alphabet>,
    states: usize,
    delta: Vec<(usize, Sym, usize, usize)>,
    accepting: Vec<bool>,
}

impl TreeAutomaton {
    pub fn new(
        alphabet: Arc<Alphabet>,
        states: usize,
        mut delta: Vec<(usize, Sym, usize, usize)>,
        accepting: &[usize],
    ) -> Result<Self, TreeError> {
        if let Some(t) = delta
            .iter()
            .find(|&&(q, a, l, r)| q >= states || l >= states || r >= states || a as usize >= alphabet.len())
        {
            return Err(TreeError::Malformed(format!("transition {t:?} out of range")));
        }
        if let Some(q) = accepting.iter().find(|&&q| q >= states) {
            return Err(TreeError::Malformed(format!("accepting state {q} out of range")));
        }
        delta.sort_unstable();
        delta.dedup();
        let mut flags = vec![false; states];
        for &q in accepting {
            flags[q] = true;
        }
        Ok(TreeAutomaton {
            alphabet,
            states,
            delta,
            accepting: flags,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn delta(&self) -> &[(usize, Sym, usize, usize)] {
        &self.delta
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    /// Same transitions, different accepting set.
    pub fn with_accepting(&self, accepting: Vec<bool>) -> Result<Self, TreeError> {
        if accepting.len() != self.states {
            return Err(TreeError::Malformed("accepting flags do not match states".into()));
        }
        Ok(TreeAutomaton {
            accepting,
            ..self.clone()
        })
    }

    /// Transition map `α : n ⇸ n` with `α(q) = {a(l, r) | (q, a, l, r) ∈ δ}`.
    pub fn alpha(&self) -> TreeMorphism {
        let n = self.states as u32;
        let trans = self
            .delta
            .iter()
            .map(|&(q, a, l, r)| (q as u32, a, n + l as u32, n + r as u32))
            .collect();
        let exits = (0..self.states).map(|k| (n + k as u32, k)).collect();
        TreeMorphism::new(
            self.alphabet.clone(),
            self.states,
            2 * self.states,
            (0..n).collect(),
            trans,
            Vec::new(),
            exits,
        )
        .expect("indices checked on construction")
    }

    /// Whether a run from `s` labels every outer-frontier position with an
    /// accepting state. A bare leaf is accepted iff `s` is accepting.
    pub fn finite_member(&self, s: usize, t: &FiniteTree) -> Result<bool, TreeError> {
        if s >= self.states {
            return Err(TreeError::Malformed(format!("state {s} of {}", self.states)));
        }
        Ok(self.accepting_states(t)?[s])
    }

    fn accepting_states(&self, t: &FiniteTree) -> Result<Vec<bool>, TreeError> {
        match t {
            FiniteTree::Var(0) => Ok(self.accepting.clone()),
            FiniteTree::Var(j) => Err(TreeError::Malformed(format!("leaf {j} in a tree over one variable"))),
            FiniteTree::Node(a, l, r) => {
                if *a as usize >= self.alphabet.len() {
                    return Err(TreeError::Malformed(format!("symbol index {a} out of range")));
                }
                let (sl, sr) = (self.accepting_states(l)?, self.accepting_states(r)?);
                let mut out = vec![false; self.states];
                for &(q, b, ql, qr) in &self.delta {
                    if b == *a && sl[ql] && sr[qr] {
                        out[q] = true;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `!·f_F·α* : n ⇸ 1`.
    pub fn tree_behaviour(&self, t: &TreeTheory) -> Result<TreeMorphism, TreeError> {
        let n = self.states;
        let star = t.star(&self.alpha())?;
        let filtered = t.compose(&final_map(t, n, &self.accepting)?, &star)?;
        Ok(t.compose(&bang(t, n), &filtered)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["s"]).unwrap())
    }

    #[test]
    fn identity_denotes_its_own_leaf() {
        let t = TreeTheory::new(sigma(), DEFAULT_HEIGHT);
        let id = t.identity(3);
        for i in 0..3 {
            let trees = id.trees_up_to(i, 3);
            assert_eq!(trees.into_iter().collect::<Vec<_>>(), vec![FiniteTree::Var(i)]);
        }
    }

    #[test]
    fn star_of_bottom_is_identity() {
        let t = TreeTheory::new(sigma(), DEFAULT_HEIGHT);
        let s = t.star(&t.bottom(2, 2)).unwrap();
        assert!(t.compare(&s, &t.identity(2)).unwrap().holds());
    }

    #[test]
    fn star_of_single_fork_gives_full_trees() {
        let t = TreeTheory::new(sigma(), DEFAULT_HEIGHT);
        let fork = FiniteTree::node(0, FiniteTree::Var(0), FiniteTree::Var(0));
        let a = TreeMorphism::from_trees(sigma(), 1, &[vec![fork]]).unwrap();
        let s = t.star(&a).unwrap();
        let got = s.trees_up_to(0, 2);
        // `_`, `s(_,_)`, and the three ways of expanding one or both leaves.
        assert_eq!(got.len(), 5);
        assert!(got.contains(&FiniteTree::Var(0)));
    }

    #[test]
    fn compare_reports_a_witness_tree() {
        let t = TreeTheory::new(sigma(), DEFAULT_HEIGHT);
        let fork = FiniteTree::node(0, FiniteTree::Var(0), FiniteTree::Var(1));
        let a = TreeMorphism::from_trees(sigma(), 2, &[vec![fork]]).unwrap();
        let v = t.compare(&a, &t.bottom(1, 2)).unwrap();
        assert_eq!(v, Verdict::Fails("entry 0: s(_,_1) only on the left".into()));
        assert!(t.compare_leq(&t.bottom(1, 2), &a).unwrap().holds());
    }

    #[test]
    fn one_step_detection() {
        let t = TreeTheory::new(sigma(), DEFAULT_HEIGHT);
        let fork = FiniteTree::node(0, FiniteTree::Var(0), FiniteTree::Var(0));
        let a = TreeMorphism::from_trees(sigma(), 1, &[vec![fork.clone(), FiniteTree::Var(0)]]).unwrap();
        assert!(t.is_one_step(&a));
        assert!(!t.is_one_step(&t.star(&a).unwrap()));
        let tall =
            TreeMorphism::from_trees(sigma(), 1, &[vec![FiniteTree::node(0, fork, FiniteTree::Var(0))]]).unwrap();
        assert!(!t.is_one_step(&tall));
    }

    #[test]
    fn height_zero_tree_needs_an_accepting_state() {
        let a = TreeAutomaton::new(sigma(), 2, vec![(0, 0, 1, 1)], &[1]).unwrap();
        assert!(!a.finite_member(0, &FiniteTree::Var(0)).unwrap());
        assert!(a.finite_member(1, &FiniteTree::Var(0)).unwrap());
        let fork = FiniteTree::node(0, FiniteTree::Var(0), FiniteTree::Var(0));
        assert!(a.finite_member(0, &fork).unwrap());
        let t = TreeTheory::new(sigma(), DEFAULT_HEIGHT);
        let b = a.tree_behaviour(&t).unwrap();
        assert!(b.member(0, &fork));
        assert!(!b.member(0, &FiniteTree::Var(0)));
    }
}
