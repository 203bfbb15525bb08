use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::FiniteTree;
use crate::kernel::TheoryError;
use crate::word::{Alphabet, Sym};

/// Arrow `dom ⇸ cod`: a top-down tree automaton with ε-moves and variable
/// exits. Entry `i` denotes the finite trees generated from `entries[i]`: an
/// exit `(q, j)` yields the leaf `j`, a transition `(q, a, l, r)` the tree
/// `a(t_l, t_r)` with `t_l` generated from `l` and `t_r` from `r`.
#[derive(Debug, Clone)]
pub struct TreeMorphism {
    alphabet: Arc<Alphabet>,
    dom: usize,
    cod: usize,
    states: usize,
    entries: Vec<u32>,
    trans: Vec<(u32, Sym, u32, u32)>,
    eps: Vec<(u32, u32)>,
    exits: Vec<(u32, usize)>,
}

impl TreeMorphism {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Arc<Alphabet>,
        cod: usize,
        states: usize,
        entries: Vec<u32>,
        trans: Vec<(u32, Sym, u32, u32)>,
        eps: Vec<(u32, u32)>,
        exits: Vec<(u32, usize)>,
    ) -> Result<Self, TheoryError> {
        let bad_state = |q: u32| q as usize >= states;
        if entries.iter().any(|&q| bad_state(q))
            || trans
                .iter()
                .any(|&(q, _, l, r)| bad_state(q) || bad_state(l) || bad_state(r))
            || eps.iter().any(|&(p, q)| bad_state(p) || bad_state(q))
            || exits.iter().any(|&(q, j)| bad_state(q) || j >= cod)
        {
            return Err(TheoryError::Type("tree morphism index out of range".into()));
        }
        if let Some(&(_, a, _, _)) = trans.iter().find(|&&(_, a, _, _)| a as usize >= alphabet.len()) {
            return Err(TheoryError::Type(format!("symbol index {a} out of range")));
        }
        Ok(TreeMorphism {
            alphabet,
            dom: entries.len(),
            cod,
            states,
            entries,
            trans,
            eps,
            exits,
        })
    }

    pub fn bottom(alphabet: Arc<Alphabet>, dom: usize, cod: usize) -> Self {
        TreeMorphism {
            alphabet,
            dom,
            cod,
            states: dom,
            entries: (0..dom as u32).collect(),
            trans: Vec::new(),
            eps: Vec::new(),
            exits: Vec::new(),
        }
    }

    /// Entry `i` denotes the single leaf `map[i]`.
    pub fn base(alphabet: Arc<Alphabet>, map: &[usize], cod: usize) -> Result<Self, TheoryError> {
        let mut f = TreeMorphism::bottom(alphabet, map.len(), cod);
        for (i, &j) in map.iter().enumerate() {
            if j >= cod {
                return Err(TheoryError::Type(format!("base map target {j} outside {cod}")));
            }
            f.exits.push((i as u32, j));
        }
        Ok(f)
    }

    /// Entry `i` denotes exactly the trees `rows[i]`.
    pub fn from_trees(alphabet: Arc<Alphabet>, cod: usize, rows: &[Vec<FiniteTree>]) -> Result<Self, TheoryError> {
        let mut f = TreeMorphism::bottom(alphabet, rows.len(), cod);
        for (i, row) in rows.iter().enumerate() {
            for t in row {
                f.add_tree(i as u32, t)?;
            }
        }
        Ok(f)
    }

    fn add_state(&mut self) -> u32 {
        self.states += 1;
        (self.states - 1) as u32
    }

    fn add_tree(&mut self, q: u32, t: &FiniteTree) -> Result<(), TheoryError> {
        match t {
            FiniteTree::Var(j) => {
                if *j >= self.cod {
                    return Err(TheoryError::Type(format!("leaf {j} outside {}", self.cod)));
                }
                self.exits.push((q, *j));
            }
            FiniteTree::Node(a, l, r) => {
                if *a as usize >= self.alphabet.len() {
                    return Err(TheoryError::Type(format!("symbol index {a} out of range")));
                }
                let (ql, qr) = (self.add_state(), self.add_state());
                self.trans.push((q, *a, ql, qr));
                self.add_tree(ql, l)?;
                self.add_tree(qr, r)?;
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn transitions(&self) -> &[(u32, Sym, u32, u32)] {
        &self.trans
    }

    pub fn eps_moves(&self) -> &[(u32, u32)] {
        &self.eps
    }

    pub fn exits(&self) -> &[(u32, usize)] {
        &self.exits
    }

    /// Copies `other` into `self` with shifted state numbers, exits included.
    fn append(&mut self, other: &TreeMorphism) -> u32 {
        let off = self.states as u32;
        self.states += other.states;
        self.trans
            .extend(other.trans.iter().map(|&(q, a, l, r)| (q + off, a, l + off, r + off)));
        self.eps.extend(other.eps.iter().map(|&(p, q)| (p + off, q + off)));
        self.exits.extend(other.exits.iter().map(|&(q, j)| (q + off, j)));
        off
    }

    fn empty_like(&self, dom: usize, cod: usize) -> TreeMorphism {
        TreeMorphism {
            alphabet: self.alphabet.clone(),
            dom,
            cod,
            states: 0,
            entries: Vec::new(),
            trans: Vec::new(),
            eps: Vec::new(),
            exits: Vec::new(),
        }
    }

    /// `g·f`: every exit `j` of `f` becomes an ε-move to entry `j` of `g`.
    pub(crate) fn compose(g: &TreeMorphism, f: &TreeMorphism) -> TreeMorphism {
        let mut out = f.empty_like(f.dom, g.cod);
        out.states = f.states;
        out.entries = f.entries.clone();
        out.trans = f.trans.clone();
        out.eps = f.eps.clone();
        let off = out.append(g);
        out.eps.extend(f.exits.iter().map(|&(q, j)| (q, g.entries[j] + off)));
        out.trim()
    }

    pub(crate) fn join(f: &TreeMorphism, g: &TreeMorphism) -> TreeMorphism {
        let mut out = f.empty_like(f.dom, f.cod);
        out.states = f.dom;
        out.entries = (0..f.dom as u32).collect();
        let of = out.append(f);
        let og = out.append(g);
        for i in 0..f.dom {
            out.eps.push((i as u32, f.entries[i] + of));
            out.eps.push((i as u32, g.entries[i] + og));
        }
        out.trim()
    }

    pub(crate) fn cotuple(parts: &[TreeMorphism], cod: usize, alphabet: Arc<Alphabet>) -> TreeMorphism {
        let mut out = TreeMorphism::bottom(alphabet, 0, cod);
        for p in parts {
            let off = out.append(p);
            out.entries.extend(p.entries.iter().map(|&q| q + off));
        }
        out.dom = out.entries.len();
        out.trim()
    }

    /// Fresh entries `e_i` exit at `i` and step into entry `i` of `alpha`;
    /// every exit `j` of `alpha` loops back to `e_j`.
    pub(crate) fn star(alpha: &TreeMorphism) -> TreeMorphism {
        let n = alpha.dom;
        let mut out = alpha.empty_like(n, n);
        out.states = n;
        out.entries = (0..n as u32).collect();
        out.exits = (0..n).map(|i| (i as u32, i)).collect();
        let off = out.state_offset_copy(alpha);
        for i in 0..n {
            out.eps.push((i as u32, alpha.entries[i] + off));
        }
        out.eps.extend(alpha.exits.iter().map(|&(q, j)| (q + off, j as u32)));
        out.trim()
    }

    /// Like `append` but leaves the exits of `other` out.
    fn state_offset_copy(&mut self, other: &TreeMorphism) -> u32 {
        let off = self.states as u32;
        self.states += other.states;
        self.trans
            .extend(other.trans.iter().map(|&(q, a, l, r)| (q + off, a, l + off, r + off)));
        self.eps.extend(other.eps.iter().map(|&(p, q)| (p + off, q + off)));
        off
    }

    /// States that generate at least one tree.
    fn productive(&self) -> FixedBitSet {
        let mut prod = FixedBitSet::with_capacity(self.states);
        for &(q, _) in &self.exits {
            prod.insert(q as usize);
        }
        loop {
            let mut changed = false;
            for &(p, q) in &self.eps {
                if prod[q as usize] && !prod[p as usize] {
                    prod.insert(p as usize);
                    changed = true;
                }
            }
            for &(q, _, l, r) in &self.trans {
                if prod[l as usize] && prod[r as usize] && !prod[q as usize] {
                    prod.insert(q as usize);
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    /// Drops states that are unreachable from the entries or generate nothing.
    /// Entry states are always kept.
    pub(crate) fn trim(mut self) -> TreeMorphism {
        let prod = self.productive();
        let mut succ: Vec<Vec<u32>> = vec![Vec::new(); self.states];
        for &(p, q) in &self.eps {
            if prod[q as usize] {
                succ[p as usize].push(q);
            }
        }
        for &(q, _, l, r) in &self.trans {
            if prod[l as usize] && prod[r as usize] {
                succ[q as usize].push(l);
                succ[q as usize].push(r);
            }
        }
        let mut seen = FixedBitSet::with_capacity(self.states);
        let mut stack: Vec<u32> = Vec::new();
        for &e in &self.entries {
            if !seen.put(e as usize) {
                stack.push(e);
            }
        }
        while let Some(q) = stack.pop() {
            for &t in &succ[q as usize] {
                if !seen.put(t as usize) {
                    stack.push(t);
                }
            }
        }
        let keep = |q: u32| seen[q as usize] && prod[q as usize];
        let mut map = vec![u32::MAX; self.states];
        let mut next = 0u32;
        for &e in &self.entries {
            if map[e as usize] == u32::MAX {
                map[e as usize] = next;
                next += 1;
            }
        }
        for q in 0..self.states as u32 {
            if keep(q) && map[q as usize] == u32::MAX {
                map[q as usize] = next;
                next += 1;
            }
        }
        let m = |q: u32| map[q as usize];
        self.trans = self
            .trans
            .iter()
            .filter(|&&(q, _, l, r)| keep(q) && keep(l) && keep(r))
            .map(|&(q, a, l, r)| (m(q), a, m(l), m(r)))
            .collect();
        self.eps = self
            .eps
            .iter()
            .filter(|&&(p, q)| keep(p) && keep(q) && p != q)
            .map(|&(p, q)| (m(p), m(q)))
            .collect();
        self.exits = self
            .exits
            .iter()
            .filter(|&&(q, _)| keep(q))
            .map(|&(q, j)| (m(q), j))
            .collect();
        self.trans.sort_unstable();
        self.trans.dedup();
        self.eps.sort_unstable();
        self.eps.dedup();
        self.exits.sort_unstable();
        self.exits.dedup();
        self.entries = self.entries.iter().map(|&e| m(e)).collect();
        self.states = next as usize;
        self
    }

    /// Whether some entry generates a tree of height 2 or more.
    pub(crate) fn exceeds_height_one(&self) -> bool {
        let prod = self.productive();
        let seed = |pred: &dyn Fn(u32, u32) -> bool| {
            let mut s = FixedBitSet::with_capacity(self.states);
            for &(q, _, l, r) in &self.trans {
                if prod[l as usize] && prod[r as usize] && pred(l, r) {
                    s.insert(q as usize);
                }
            }
            self.eps_pre_closure(s)
        };
        let tall = seed(&|_, _| true);
        let taller = seed(&|l, r| tall[l as usize] || tall[r as usize]);
        self.entries.iter().any(|&e| taller[e as usize])
    }

    /// States with an ε-path into `set`, including `set`.
    fn eps_pre_closure(&self, mut set: FixedBitSet) -> FixedBitSet {
        loop {
            let mut changed = false;
            for &(p, q) in &self.eps {
                if set[q as usize] && !set.put(p as usize) {
                    changed = true;
                }
            }
            if !changed {
                return set;
            }
        }
    }

    /// Whether entry `i` generates `t`.
    pub fn member(&self, i: usize, t: &FiniteTree) -> bool {
        i < self.dom && BottomUp::new(self).eval(t)[self.entries[i] as usize]
    }

    /// The trees of height at most `max_height` generated by entry `i`.
    pub fn trees_up_to(&self, i: usize, max_height: usize) -> BTreeSet<FiniteTree> {
        let mut fwd: Vec<Vec<u32>> = vec![Vec::new(); self.states];
        for &(p, q) in &self.eps {
            fwd[p as usize].push(q);
        }
        let closure: Vec<Vec<u32>> = (0..self.states as u32)
            .map(|q| {
                let mut seen = FixedBitSet::with_capacity(self.states);
                seen.insert(q as usize);
                let mut stack = vec![q];
                while let Some(p) = stack.pop() {
                    for &t in &fwd[p as usize] {
                        if !seen.put(t as usize) {
                            stack.push(t);
                        }
                    }
                }
                seen.ones().map(|s| s as u32).collect()
            })
            .collect();
        let leaves: Vec<BTreeSet<FiniteTree>> = (0..self.states)
            .map(|q| {
                closure[q]
                    .iter()
                    .flat_map(|&p| self.exits.iter().filter(move |&&(s, _)| s == p))
                    .map(|&(_, j)| FiniteTree::Var(j))
                    .collect()
            })
            .collect();
        let mut gen = leaves.clone();
        for _ in 0..max_height {
            let mut next = leaves.clone();
            for q in 0..self.states {
                for &p in &closure[q] {
                    for &(s, a, l, r) in &self.trans {
                        if s != p {
                            continue;
                        }
                        for tl in &gen[l as usize] {
                            for tr in &gen[r as usize] {
                                next[q].insert(FiniteTree::node(a, tl.clone(), tr.clone()));
                            }
                        }
                    }
                }
            }
            gen = next;
        }
        gen.swap_remove(self.entries[i] as usize)
    }
}

/// Bottom-up evaluation: the set of states generating a given tree.
pub(crate) struct BottomUp<'a> {
    f: &'a TreeMorphism,
    by_symbol: Vec<Vec<(u32, u32, u32)>>,
}

impl<'a> BottomUp<'a> {
    pub fn new(f: &'a TreeMorphism) -> Self {
        let mut by_symbol = vec![Vec::new(); f.alphabet.len()];
        for &(q, a, l, r) in &f.trans {
            by_symbol[a as usize].push((q, l, r));
        }
        BottomUp { f, by_symbol }
    }

    pub fn leaf(&self, j: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.f.states);
        for &(q, k) in &self.f.exits {
            if k == j {
                s.insert(q as usize);
            }
        }
        self.f.eps_pre_closure(s)
    }

    pub fn step(&self, a: Sym, left: &FixedBitSet, right: &FixedBitSet) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.f.states);
        for &(q, l, r) in &self.by_symbol[a as usize] {
            if left[l as usize] && right[r as usize] {
                s.insert(q as usize);
            }
        }
        self.f.eps_pre_closure(s)
    }

    pub fn eval(&self, t: &FiniteTree) -> FixedBitSet {
        match t {
            FiniteTree::Var(j) => self.leaf(*j),
            FiniteTree::Node(a, l, r) => self.step(*a, &self.eval(l), &self.eval(r)),
        }
    }
}

/// Explores the tuples of state sets reached jointly by `fs` on all trees of
/// height at most `max_height` over `cod` variables, stopping at the first
/// tuple for which `stop` holds. Returns that tuple's witness tree.
pub(crate) fn explore_jointly(
    fs: &[&TreeMorphism],
    cod: usize,
    max_height: usize,
    stop: impl Fn(&[FixedBitSet]) -> bool,
) -> Option<FiniteTree> {
    let evals: Vec<BottomUp> = fs.iter().map(|f| BottomUp::new(f)).collect();
    let symbols = fs.first().map_or(0, |f| f.alphabet.len()) as Sym;
    let mut known: HashMap<Vec<FixedBitSet>, ()> = HashMap::new();
    let mut items: Vec<(Vec<FixedBitSet>, FiniteTree)> = Vec::new();
    let mut push = |sets: Vec<FixedBitSet>, t: FiniteTree, items: &mut Vec<(Vec<FixedBitSet>, FiniteTree)>| {
        // A tuple of empty sets cannot contribute to any larger tree.
        if sets.iter().all(|s: &FixedBitSet| s.is_clear()) || known.insert(sets.clone(), ()).is_some() {
            return None;
        }
        if stop(&sets) {
            return Some(t);
        }
        items.push((sets, t));
        None
    };
    for j in 0..cod {
        let sets = evals.iter().map(|e| e.leaf(j)).collect();
        if let Some(w) = push(sets, FiniteTree::Var(j), &mut items) {
            return Some(w);
        }
    }
    let mut old = 0;
    for _ in 0..max_height {
        let end = items.len();
        for a in 0..symbols {
            for x in 0..end {
                for y in 0..end {
                    if x < old && y < old {
                        continue;
                    }
                    let sets = evals
                        .iter()
                        .enumerate()
                        .map(|(k, e)| e.step(a, &items[x].0[k], &items[y].0[k]))
                        .collect();
                    let t = FiniteTree::node(a, items[x].1.clone(), items[y].1.clone());
                    if let Some(w) = push(sets, t, &mut items) {
                        return Some(w);
                    }
                }
            }
        }
        if items.len() == end {
            break;
        }
        old = end;
    }
    None
}
