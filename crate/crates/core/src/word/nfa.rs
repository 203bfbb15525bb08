use super::Sym;

/// ε-NFA with adjacency lists. State sets handled by the helpers are sorted
/// and duplicate-free.
#[derive(Debug, Clone, Default)]
pub(crate) struct Nfa {
    pub eps: Vec<Vec<u32>>,
    pub next: Vec<Vec<(Sym, u32)>>,
    pub initial: Vec<u32>,
    pub accepting: Vec<bool>,
}

impl Nfa {
    pub fn len(&self) -> usize {
        self.accepting.len()
    }

    pub fn add_state(&mut self, accepting: bool) -> u32 {
        self.eps.push(Vec::new());
        self.next.push(Vec::new());
        self.accepting.push(accepting);
        (self.accepting.len() - 1) as u32
    }

    pub fn add_eps(&mut self, from: u32, to: u32) {
        if from != to {
            self.eps[from as usize].push(to);
        }
    }

    pub fn add_sym(&mut self, from: u32, a: Sym, to: u32) {
        self.next[from as usize].push((a, to));
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = u32> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i as u32)
    }

    pub fn symbol_edge_count(&self) -> usize {
        self.next.iter().map(Vec::len).sum()
    }

    /// Copies `other` into `self` without initial states; returns the offset.
    pub fn append(&mut self, other: &Nfa) -> u32 {
        let off = self.len() as u32;
        for s in 0..other.len() {
            self.eps.push(other.eps[s].iter().map(|&t| t + off).collect());
            self.next
                .push(other.next[s].iter().map(|&(a, t)| (a, t + off)).collect());
            self.accepting.push(other.accepting[s]);
        }
        off
    }

    pub fn closure(&self, set: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<u32> = Vec::with_capacity(set.len());
        for &s in set {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            out.push(s);
            for &t in &self.eps[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Letter step followed by ε-closure.
    pub fn step(&self, set: &[u32], a: Sym) -> Vec<u32> {
        let mut targets = Vec::new();
        for &s in set {
            for &(b, t) in &self.next[s as usize] {
                if a == b {
                    targets.push(t);
                }
            }
        }
        targets.sort_unstable();
        targets.dedup();
        self.closure(&targets)
    }

    pub fn accepts_empty(&self) -> bool {
        self.closure(&self.initial).iter().any(|&s| self.accepting[s as usize])
    }

    fn forward_reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<u32> = Vec::new();
        for &s in &self.initial {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            let succ = self.eps[s as usize]
                .iter()
                .copied()
                .chain(self.next[s as usize].iter().map(|&(_, t)| t));
            for t in succ {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn backward_reachable(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); self.len()];
        for s in 0..self.len() {
            for &t in &self.eps[s] {
                rev[t as usize].push(s as u32);
            }
            for &(_, t) in &self.next[s] {
                rev[t as usize].push(s as u32);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<u32> = self.accepting_states().collect();
        while let Some(s) = stack.pop() {
            for &t in &rev[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Keeps only useful states and removes duplicate edges.
    pub fn trim(&self) -> Nfa {
        let fwd = self.forward_reachable();
        let bwd = self.backward_reachable();
        let mut map = vec![u32::MAX; self.len()];
        let mut out = Nfa::default();
        for s in 0..self.len() {
            if fwd[s] && bwd[s] {
                map[s] = out.add_state(self.accepting[s]);
            }
        }
        for s in 0..self.len() {
            let m = map[s];
            if m == u32::MAX {
                continue;
            }
            let mut eps: Vec<u32> = self.eps[s]
                .iter()
                .map(|&t| map[t as usize])
                .filter(|&t| t != u32::MAX && t != m)
                .collect();
            eps.sort_unstable();
            eps.dedup();
            let mut next: Vec<(Sym, u32)> = self.next[s]
                .iter()
                .map(|&(a, t)| (a, map[t as usize]))
                .filter(|&(_, t)| t != u32::MAX)
                .collect();
            next.sort_unstable();
            next.dedup();
            out.eps[m as usize] = eps;
            out.next[m as usize] = next;
        }
        let mut init: Vec<u32> = self
            .initial
            .iter()
            .map(|&s| map[s as usize])
            .filter(|&t| t != u32::MAX)
            .collect();
        init.sort_unstable();
        init.dedup();
        out.initial = init;
        out
    }

    /// Same language, no ε-moves: a state accepts if its closure does, and
    /// letter edges are taken from every state of the closure.
    pub fn remove_epsilon(&self) -> Nfa {
        let mut out = Nfa::default();
        for s in 0..self.len() {
            let cl = self.closure(&[s as u32]);
            let acc = cl.iter().any(|&t| self.accepting[t as usize]);
            out.add_state(acc);
        }
        for s in 0..self.len() {
            let cl = self.closure(&[s as u32]);
            let mut next: Vec<(Sym, u32)> = cl.iter().flat_map(|&t| self.next[t as usize].iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            out.next[s] = next;
        }
        out.initial = self.initial.clone();
        out.trim()
    }
}
