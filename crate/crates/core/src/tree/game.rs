use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{TreeAutomaton, TreeError};
use crate::word::{Alphabet, Sym};

/// Largest game the solver builds.
pub const POSITION_CAP: usize = 100_000;

/// Infinite binary tree given as the unfolding of a finite graph: every node
/// has a label and a left and a right successor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularInfTree {
    alphabet: Arc<Alphabet>,
    labels: Vec<Sym>,
    children: Vec<(usize, usize)>,
    root: usize,
}

impl RegularInfTree {
    pub fn new(alphabet: Arc<Alphabet>, nodes: Vec<(Sym, usize, usize)>, root: usize) -> Result<Self, TreeError> {
        let n = nodes.len();
        if root >= n {
            return Err(TreeError::Malformed(format!("root {root} of {n} nodes")));
        }
        if let Some(bad) = nodes
            .iter()
            .find(|&&(a, l, r)| a as usize >= alphabet.len() || l >= n || r >= n)
        {
            return Err(TreeError::Malformed(format!("node {bad:?} out of range")));
        }
        Ok(RegularInfTree {
            alphabet,
            labels: nodes.iter().map(|n| n.0).collect(),
            children: nodes.iter().map(|n| (n.1, n.2)).collect(),
            root,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn label(&self, v: usize) -> Sym {
        self.labels[v]
    }

    pub fn children(&self, v: usize) -> (usize, usize) {
        self.children[v]
    }
}

/// Tree automaton with ε-moves, as read by the game builder.
#[derive(Debug, Clone)]
pub(crate) struct EpsTreeAutomaton {
    pub states: usize,
    pub trans: Vec<(u32, Sym, u32, u32)>,
    pub eps: Vec<(u32, u32)>,
    pub accepting: Vec<bool>,
}

impl From<&TreeAutomaton> for EpsTreeAutomaton {
    fn from(a: &TreeAutomaton) -> Self {
        EpsTreeAutomaton {
            states: a.states(),
            trans: a
                .delta()
                .iter()
                .map(|&(q, s, l, r)| (q as u32, s, l as u32, r as u32))
                .collect(),
            eps: Vec::new(),
            accepting: a.accepting().to_vec(),
        }
    }
}

/// Two-player game graph. Automaton owns the positions `(state, node)` and
/// picks a transition or an ε-move; Pathfinder owns the positions holding a
/// chosen transition and picks a direction. Automaton wins a play that passes
/// accepting positions infinitely often, and loses when stuck.
#[derive(Debug, Clone)]
pub struct BuchiGame {
    automaton_owns: Vec<bool>,
    succ: Vec<Vec<u32>>,
    accepting: Vec<bool>,
}

/// Winning region of Automaton and a positional strategy on it.
#[derive(Debug, Clone)]
pub struct GameSolution {
    pub winning: FixedBitSet,
    /// For Automaton positions in the winning region: a move that stays in it
    /// and makes progress towards an accepting position.
    pub strategy: Vec<Option<u32>>,
}

#[derive(Hash, PartialEq, Eq, Clone, Copy)]
enum Key {
    Auto(u32, usize),
    Path(u32, u32, usize),
}

struct Builder {
    game: BuchiGame,
    index: HashMap<Key, u32>,
    queue: Vec<(Key, u32)>,
}

impl Builder {
    fn intern(&mut self, k: Key, accepting: &[bool]) -> Result<u32, TreeError> {
        if let Some(&i) = self.index.get(&k) {
            return Ok(i);
        }
        if self.game.succ.len() >= POSITION_CAP {
            return Err(TreeError::Budget { cap: POSITION_CAP });
        }
        let i = self.game.succ.len() as u32;
        self.game.succ.push(Vec::new());
        let (owner, acc) = match k {
            Key::Auto(q, _) => (true, accepting[q as usize]),
            Key::Path(..) => (false, false),
        };
        self.game.automaton_owns.push(owner);
        self.game.accepting.push(acc);
        self.index.insert(k, i);
        self.queue.push((k, i));
        Ok(i)
    }
}

impl BuchiGame {
    /// Game for acceptance of `tree` from state `start`; returns the game and
    /// the initial position. Only positions reachable from it are built.
    pub(crate) fn build(
        a: &EpsTreeAutomaton,
        tree: &RegularInfTree,
        start: usize,
    ) -> Result<(BuchiGame, usize), TreeError> {
        if start >= a.states {
            return Err(TreeError::Malformed(format!("state {start} of {}", a.states)));
        }
        let mut eps: Vec<Vec<u32>> = vec![Vec::new(); a.states];
        for &(p, q) in &a.eps {
            eps[p as usize].push(q);
        }
        let mut by_state: Vec<Vec<(Sym, u32, u32)>> = vec![Vec::new(); a.states];
        for &(q, s, l, r) in &a.trans {
            by_state[q as usize].push((s, l, r));
        }
        let mut b = Builder {
            game: BuchiGame {
                automaton_owns: Vec::new(),
                succ: Vec::new(),
                accepting: Vec::new(),
            },
            index: HashMap::new(),
            queue: Vec::new(),
        };
        let start_pos = b.intern(Key::Auto(start as u32, tree.root()), &a.accepting)?;
        while let Some((k, id)) = b.queue.pop() {
            let mut moves = Vec::new();
            match k {
                Key::Auto(q, v) => {
                    moves.extend(eps[q as usize].iter().map(|&q2| Key::Auto(q2, v)));
                    for &(s, l, r) in &by_state[q as usize] {
                        if s == tree.label(v) {
                            moves.push(Key::Path(l, r, v));
                        }
                    }
                }
                Key::Path(l, r, v) => {
                    let (vl, vr) = tree.children(v);
                    moves.push(Key::Auto(l, vl));
                    moves.push(Key::Auto(r, vr));
                }
            }
            let mut targets = Vec::with_capacity(moves.len());
            for m in moves {
                targets.push(b.intern(m, &a.accepting)?);
            }
            targets.sort_unstable();
            targets.dedup();
            b.game.succ[id as usize] = targets;
        }
        Ok((b.game, start_pos as usize))
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn automaton_owns(&self, p: usize) -> bool {
        self.automaton_owns[p]
    }

    pub fn successors(&self, p: usize) -> &[u32] {
        &self.succ[p]
    }

    pub fn accepting(&self, p: usize) -> bool {
        self.accepting[p]
    }

    /// Positions from which `automaton` (or Pathfinder, when false) can force
    /// a visit to `target`, moving inside `arena`. `via[p]` records, for
    /// attracted positions of that player, the move that enters the set.
    fn attractor(
        &self,
        automaton: bool,
        target: &FixedBitSet,
        arena: &FixedBitSet,
        via: &mut [Option<u32>],
    ) -> FixedBitSet {
        let n = self.len();
        let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut count = vec![0usize; n];
        for p in arena.ones() {
            for &q in &self.succ[p] {
                if arena[q as usize] {
                    pred[q as usize].push(p as u32);
                    count[p] += 1;
                }
            }
        }
        let mut attr = FixedBitSet::with_capacity(n);
        let mut stack: Vec<u32> = Vec::new();
        for p in target.ones() {
            if arena[p] {
                attr.insert(p);
                stack.push(p as u32);
            }
        }
        while let Some(q) = stack.pop() {
            for &p in &pred[q as usize] {
                let p = p as usize;
                if attr[p] {
                    continue;
                }
                if self.automaton_owns[p] == automaton {
                    via[p] = Some(q);
                    attr.insert(p);
                    stack.push(p as u32);
                } else {
                    count[p] -= 1;
                    if count[p] == 0 {
                        attr.insert(p);
                        stack.push(p as u32);
                    }
                }
            }
        }
        attr
    }

    /// Nested attractor fixpoint for the Büchi objective of Automaton.
    pub fn solve(&self) -> GameSolution {
        let n = self.len();
        let mut scratch = vec![None; n];
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        let mut stuck = FixedBitSet::with_capacity(n);
        for p in 0..n {
            if self.automaton_owns[p] && self.succ[p].is_empty() {
                stuck.insert(p);
            }
        }
        let mut alive = all.clone();
        alive.difference_with(&self.attractor(false, &stuck, &all, &mut scratch));
        loop {
            let mut target = FixedBitSet::with_capacity(n);
            for p in alive.ones() {
                if self.accepting[p] {
                    target.insert(p);
                }
            }
            let mut via = vec![None; n];
            let reach = self.attractor(true, &target, &alive, &mut via);
            let mut trap = alive.clone();
            trap.difference_with(&reach);
            if trap.is_clear() {
                let strategy = (0..n)
                    .map(|p| {
                        if !alive[p] || !self.automaton_owns[p] {
                            None
                        } else if target[p] {
                            self.succ[p].iter().copied().find(|&q| alive[q as usize])
                        } else {
                            via[p]
                        }
                    })
                    .collect();
                return GameSolution {
                    winning: alive,
                    strategy,
                };
            }
            alive.difference_with(&self.attractor(false, &trap, &alive, &mut scratch));
        }
    }
}

/// Whether some run of `a` on `tree` from `s` visits accepting states
/// infinitely often on every branch.
pub fn buchi_tree_member(a: &TreeAutomaton, s: usize, tree: &RegularInfTree) -> Result<bool, TreeError> {
    if **a.alphabet() != **tree.alphabet() {
        return Err(TreeError::Malformed(
            "automaton and tree use different alphabets".into(),
        ));
    }
    let (game, start) = BuchiGame::build(&EpsTreeAutomaton::from(a), tree, s)?;
    Ok(game.solve().winning[start])
}

/// Game and initial position for `buchi_tree_member(a, s, tree)`.
pub fn acceptance_game(a: &TreeAutomaton, s: usize, tree: &RegularInfTree) -> Result<(BuchiGame, usize), TreeError> {
    BuchiGame::build(&EpsTreeAutomaton::from(a), tree, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["s", "t"]).unwrap())
    }

    fn single_node() -> RegularInfTree {
        RegularInfTree::new(sigma(), vec![(0, 0, 0)], 0).unwrap()
    }

    #[test]
    fn self_loop_accepts_only_with_accepting_state() {
        let a = TreeAutomaton::new(sigma(), 1, vec![(0, 0, 0, 0)], &[0]).unwrap();
        assert!(buchi_tree_member(&a, 0, &single_node()).unwrap());
        let b = a.with_accepting(vec![false]).unwrap();
        assert!(!buchi_tree_member(&b, 0, &single_node()).unwrap());
    }

    #[test]
    fn no_transitions_rejects() {
        let a = TreeAutomaton::new(sigma(), 2, vec![], &[0, 1]).unwrap();
        assert!(!buchi_tree_member(&a, 0, &single_node()).unwrap());
    }

    #[test]
    fn every_branch_must_recur() {
        // State 0 accepts; state 1 loops forever without accepting. Sending
        // the right branch to state 1 loses even though the left recurs.
        let a = TreeAutomaton::new(sigma(), 2, vec![(0, 0, 0, 1), (1, 0, 1, 1)], &[0]).unwrap();
        assert!(!buchi_tree_member(&a, 0, &single_node()).unwrap());
        let b = TreeAutomaton::new(sigma(), 2, vec![(0, 0, 0, 1), (1, 0, 0, 0)], &[0]).unwrap();
        assert!(buchi_tree_member(&b, 0, &single_node()).unwrap());
    }

    #[test]
    fn labels_constrain_transitions() {
        // Root labelled t, then s forever.
        let tree = RegularInfTree::new(sigma(), vec![(1, 1, 1), (0, 1, 1)], 0).unwrap();
        let a = TreeAutomaton::new(sigma(), 1, vec![(0, 0, 0, 0)], &[0]).unwrap();
        assert!(!buchi_tree_member(&a, 0, &tree).unwrap());
        let b = TreeAutomaton::new(sigma(), 2, vec![(1, 1, 0, 0), (0, 0, 0, 0)], &[0]).unwrap();
        assert!(buchi_tree_member(&b, 1, &tree).unwrap());
    }
}
