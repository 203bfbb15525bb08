use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::LassoWord;
use crate::word::{Nfa, Sym};

/// Büchi automaton with accepting transitions. A run is accepting if it
/// takes accepting transitions infinitely often.
#[derive(Debug, Clone, Default)]
pub(crate) struct Buchi {
    pub edges: Vec<Vec<(Sym, u32, bool)>>,
    pub initial: Vec<u32>,
}

impl Buchi {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn add_state(&mut self) -> u32 {
        self.edges.push(Vec::new());
        (self.edges.len() - 1) as u32
    }

    pub fn append(&mut self, other: &Buchi) -> u32 {
        let off = self.len() as u32;
        for e in &other.edges {
            self.edges.push(e.iter().map(|&(a, t, f)| (a, t + off, f)).collect());
        }
        off
    }

    /// States lying on a cycle that takes an accepting transition.
    fn good_states(&self) -> Vec<bool> {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(self.len(), 0);
        for _ in 0..self.len() {
            g.add_node(());
        }
        for (s, es) in self.edges.iter().enumerate() {
            for &(_, t, _) in es {
                g.add_edge(NodeIndex::new(s), NodeIndex::new(t as usize), ());
            }
        }
        let mut comp = vec![usize::MAX; self.len()];
        let sccs = tarjan_scc(&g);
        for (c, scc) in sccs.iter().enumerate() {
            for n in scc {
                comp[n.index()] = c;
            }
        }
        let mut good_comp = vec![false; sccs.len()];
        for (s, es) in self.edges.iter().enumerate() {
            for &(_, t, acc) in es {
                if acc && comp[s] == comp[t as usize] {
                    good_comp[comp[s]] = true;
                }
            }
        }
        (0..self.len()).map(|s| good_comp[comp[s]]).collect()
    }

    /// Keeps states reachable from the initial states that can reach an
    /// accepting cycle; duplicate edges are merged.
    pub fn trim(&self) -> Buchi {
        let n = self.len();
        let mut fwd = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        for &s in &self.initial {
            if !fwd[s as usize] {
                fwd[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &(_, t, _) in &self.edges[s as usize] {
                if !fwd[t as usize] {
                    fwd[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let mut bwd = self.good_states();
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (s, es) in self.edges.iter().enumerate() {
            for &(_, t, _) in es {
                rev[t as usize].push(s as u32);
            }
        }
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| bwd[s as usize]).collect();
        while let Some(s) = stack.pop() {
            for &t in &rev[s as usize] {
                if !bwd[t as usize] {
                    bwd[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let mut map = vec![u32::MAX; n];
        let mut out = Buchi::default();
        for s in 0..n {
            if fwd[s] && bwd[s] {
                map[s] = out.add_state();
            }
        }
        for s in 0..n {
            if map[s] == u32::MAX {
                continue;
            }
            let mut es: Vec<(Sym, u32, bool)> = self.edges[s]
                .iter()
                .filter(|&&(_, t, _)| map[t as usize] != u32::MAX)
                .map(|&(a, t, f)| (a, map[t as usize], f))
                .collect();
            es.sort_unstable();
            // An accepting copy of an edge subsumes the plain one.
            es.dedup_by(|later, earlier| {
                later.0 == earlier.0 && later.1 == earlier.1 && {
                    earlier.2 |= later.2;
                    true
                }
            });
            out.edges[map[s] as usize] = es;
        }
        let mut init: Vec<u32> = self
            .initial
            .iter()
            .map(|&s| map[s as usize])
            .filter(|&s| s != u32::MAX)
            .collect();
        init.sort_unstable();
        init.dedup();
        out.initial = init;
        out.quotient()
    }

    /// Merges forward-bisimilar states: same letters, marks and target
    /// classes. Every state of a class accepts the same ω-language.
    fn quotient(&self) -> Buchi {
        // Edge symbol, target class, accepting flag.
        type Signature = (Sym, u32, bool);
        let n = self.len();
        let mut class = vec![0u32; n];
        let mut classes = 1usize.min(n);
        loop {
            let mut ids: std::collections::HashMap<(u32, Vec<Signature>), u32> = Default::default();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let mut sig: Vec<Signature> = self.edges[s]
                    .iter()
                    .map(|&(a, t, f)| (a, class[t as usize], f))
                    .collect();
                sig.sort_unstable();
                sig.dedup();
                let fresh = ids.len() as u32;
                next[s] = *ids.entry((class[s], sig)).or_insert(fresh);
            }
            let count = ids.len();
            class = next;
            if count == classes {
                break;
            }
            classes = count;
        }
        if classes == n {
            return self.clone();
        }
        let mut out = Buchi {
            edges: vec![Vec::new(); classes],
            initial: Vec::new(),
        };
        let mut done = vec![false; classes];
        for s in 0..n {
            let c = class[s] as usize;
            if done[c] {
                continue;
            }
            done[c] = true;
            let mut es: Vec<(Sym, u32, bool)> = self.edges[s]
                .iter()
                .map(|&(a, t, f)| (a, class[t as usize], f))
                .collect();
            es.sort_unstable();
            es.dedup();
            out.edges[c] = es;
        }
        out.initial = self.initial.iter().map(|&s| class[s as usize]).collect();
        out.initial.sort_unstable();
        out.initial.dedup();
        out
    }

    /// Accepting run on `w` exists: some reachable product cycle in the
    /// periodic part takes an accepting transition.
    pub fn accepts(&self, w: &LassoWord) -> bool {
        if self.initial.is_empty() {
            return false;
        }
        let u = w.prefix().len();
        let len = u + w.period().len();
        let next_pos = |p: usize| if p + 1 < len { p + 1 } else { u };
        let id = |q: u32, p: usize| q as usize * len + p;
        let mut g: DiGraph<(), bool> = DiGraph::new();
        let mut node = vec![NodeIndex::end(); self.len() * len];
        let mut stack = Vec::new();
        for &q in &self.initial {
            if node[id(q, 0)] == NodeIndex::end() {
                node[id(q, 0)] = g.add_node(());
                stack.push((q, 0usize));
            }
        }
        while let Some((q, p)) = stack.pop() {
            let a = w.at(p);
            let src = node[id(q, p)];
            let p2 = next_pos(p);
            for &(b, t, acc) in &self.edges[q as usize] {
                if a != b {
                    continue;
                }
                if node[id(t, p2)] == NodeIndex::end() {
                    node[id(t, p2)] = g.add_node(());
                    stack.push((t, p2));
                }
                g.add_edge(src, node[id(t, p2)], acc);
            }
        }
        let mut comp = vec![usize::MAX; g.node_count()];
        for (c, scc) in tarjan_scc(&g).iter().enumerate() {
            for n in scc {
                comp[n.index()] = c;
            }
        }
        g.raw_edges()
            .iter()
            .any(|e| e.weight && comp[e.source().index()] == comp[e.target().index()])
    }

    /// The automaton read as an NFA, ignoring acceptance marks.
    pub fn as_nfa(&self) -> Nfa {
        let mut nfa = Nfa::default();
        for _ in 0..self.len() {
            nfa.add_state(false);
        }
        for (s, es) in self.edges.iter().enumerate() {
            for &(a, t, _) in es {
                nfa.add_sym(s as u32, a, t);
            }
        }
        nfa.initial = self.initial.clone();
        nfa
    }

    /// NFA for the non-empty words that lead from `s` back to `s` through at
    /// least one accepting transition.
    pub fn accepting_loops(&self, s: u32) -> Nfa {
        let n = self.len() as u32;
        let mut nfa = Nfa::default();
        for _ in 0..2 * n {
            nfa.add_state(false);
        }
        for (q, es) in self.edges.iter().enumerate() {
            let q = q as u32;
            for &(a, t, acc) in es {
                nfa.add_sym(q, a, if acc { t + n } else { t });
                nfa.add_sym(q + n, a, t + n);
            }
        }
        nfa.initial = vec![s];
        nfa.accepting[(s + n) as usize] = true;
        nfa
    }
}

/// Büchi automaton with ε-moves, used while gluing automata together.
#[derive(Debug, Clone, Default)]
pub(crate) struct EpsBuchi {
    pub eps: Vec<Vec<(u32, bool)>>,
    pub edges: Vec<Vec<(Sym, u32, bool)>>,
    pub initial: Vec<u32>,
}

impl EpsBuchi {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn add_state(&mut self) -> u32 {
        self.eps.push(Vec::new());
        self.edges.push(Vec::new());
        (self.edges.len() - 1) as u32
    }

    /// Copies an NFA with unmarked transitions; returns the offset.
    pub fn append_nfa(&mut self, nfa: &Nfa) -> u32 {
        let off = self.len() as u32;
        for s in 0..nfa.len() {
            self.eps.push(nfa.eps[s].iter().map(|&t| (t + off, false)).collect());
            self.edges
                .push(nfa.next[s].iter().map(|&(a, t)| (a, t + off, false)).collect());
        }
        off
    }

    pub fn append_buchi(&mut self, b: &Buchi) -> u32 {
        let off = self.len() as u32;
        for es in &b.edges {
            self.eps.push(Vec::new());
            self.edges.push(es.iter().map(|&(a, t, f)| (a, t + off, f)).collect());
        }
        off
    }

    /// Removes ε-moves. Runs that read finitely many letters are dropped;
    /// the marks passed along an ε-path move onto the following letter edge.
    pub fn eliminate(&self) -> Buchi {
        let n = self.len();
        let mut out = Buchi {
            edges: vec![Vec::new(); n],
            initial: self.initial.clone(),
        };
        // best[t]: 0 unseen, 1 reached unmarked, 2 reached through a mark.
        let mut best = vec![0u8; n];
        let mut touched = Vec::new();
        for s in 0..n {
            let mut stack = vec![(s as u32, false)];
            best[s] = 1;
            touched.push(s);
            while let Some((t, f)) = stack.pop() {
                if (best[t as usize] == 2) != f {
                    continue;
                }
                for &(t2, acc) in &self.eps[t as usize] {
                    let f2 = f || acc;
                    let level = if f2 { 2 } else { 1 };
                    if best[t2 as usize] < level {
                        if best[t2 as usize] == 0 {
                            touched.push(t2 as usize);
                        }
                        best[t2 as usize] = level;
                        stack.push((t2, f2));
                    }
                }
            }
            for &t in &touched {
                let f = best[t] == 2;
                for &(a, t2, acc) in &self.edges[t] {
                    out.edges[s].push((a, t2, f || acc));
                }
            }
            for &t in &touched {
                best[t] = 0;
            }
            touched.clear();
        }
        out
    }
}
