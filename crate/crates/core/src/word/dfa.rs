use std::collections::HashMap;
use std::sync::Arc;

use super::{Alphabet, Nfa, Sym, WordError, WordLang};

/// Total deterministic automaton. `delta[q * k + a]` is the successor of `q` on `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    symbols: usize,
    delta: Vec<u32>,
    initial: u32,
    accepting: Vec<bool>,
}

impl Dfa {
    /// Builds a DFA from a transition table, rejecting missing entries.
    pub fn from_table(
        alphabet: &Alphabet,
        states: usize,
        initial: usize,
        transitions: &[(usize, Sym, usize)],
        accepting: &[usize],
    ) -> Result<Self, WordError> {
        let k = alphabet.len();
        let mut delta = vec![u32::MAX; states * k];
        for &(q, a, r) in transitions {
            if q >= states || r >= states {
                return Err(WordError::Shape(format!("dfa state out of range in {q} -> {r}")));
            }
            alphabet.check(&[a])?;
            delta[q * k + a as usize] = r as u32;
        }
        if let Some(pos) = delta.iter().position(|&d| d == u32::MAX) {
            return Err(WordError::NotTotal {
                state: pos / k,
                symbol: alphabet.name((pos % k) as Sym).to_string(),
            });
        }
        if initial >= states {
            return Err(WordError::Shape(format!("initial state {initial} out of range")));
        }
        let mut acc = vec![false; states];
        for &f in accepting {
            if f >= states {
                return Err(WordError::Shape(format!("accepting state {f} out of range")));
            }
            acc[f] = true;
        }
        Ok(Dfa {
            symbols: k,
            delta,
            initial: initial as u32,
            accepting: acc,
        })
    }

    pub(crate) fn from_nfa(nfa: &Nfa, k: usize) -> Self {
        Dfa::from_nfa_capped(nfa, k, usize::MAX).expect("uncapped")
    }

    /// Subset construction, abandoned once more than `cap` subsets appear.
    pub(crate) fn from_nfa_capped(nfa: &Nfa, k: usize, cap: usize) -> Option<Self> {
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut sets: Vec<Vec<u32>> = Vec::new();
        let start = nfa.closure(&nfa.initial);
        index.insert(start.clone(), 0);
        sets.push(start);
        let mut delta = Vec::new();
        let mut head = 0;
        while head < sets.len() {
            let cur = sets[head].clone();
            for a in 0..k as Sym {
                let t = nfa.step(&cur, a);
                let id = match index.get(&t) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= cap {
                            return None;
                        }
                        let id = sets.len() as u32;
                        index.insert(t.clone(), id);
                        sets.push(t);
                        id
                    }
                };
                delta.push(id);
            }
            head += 1;
        }
        let accepting = sets
            .iter()
            .map(|s| s.iter().any(|&q| nfa.accepting[q as usize]))
            .collect();
        Some(Dfa {
            symbols: k,
            delta,
            initial: 0,
            accepting,
        })
    }

    pub fn states(&self) -> usize {
        self.accepting.len()
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn next(&self, q: usize, a: Sym) -> usize {
        self.delta[q * self.symbols + a as usize] as usize
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn run(&self, from: usize, word: &[Sym]) -> usize {
        word.iter().fold(from, |q, &a| self.next(q, a))
    }

    pub fn accepts(&self, word: &[Sym]) -> bool {
        self.accepting[self.run(self.initial(), word)]
    }

    /// Accepts exactly the words having a prefix accepted by `self`: every
    /// accepting state moves to an absorbing accepting sink.
    pub fn sink_accepting(&self) -> Dfa {
        let n = self.states();
        let k = self.symbols;
        let sink = n as u32;
        let mut delta = self.delta.clone();
        for q in 0..n {
            if self.accepting[q] {
                for a in 0..k {
                    delta[q * k + a] = sink;
                }
            }
        }
        delta.extend(std::iter::repeat_n(sink, k));
        let mut accepting = self.accepting.clone();
        accepting.push(true);
        Dfa {
            symbols: k,
            delta,
            initial: self.initial,
            accepting,
        }
        .minimize()
    }

    /// Reachable part, merged by Moore partition refinement.
    pub fn minimize(&self) -> Dfa {
        let k = self.symbols;
        let mut order = vec![self.initial as usize];
        let mut seen = vec![false; self.states()];
        seen[self.initial as usize] = true;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            for a in 0..k {
                let r = self.delta[q * k + a] as usize;
                if !seen[r] {
                    seen[r] = true;
                    order.push(r);
                }
            }
            head += 1;
        }
        let mut class: Vec<usize> = vec![0; self.states()];
        for &q in &order {
            class[q] = self.accepting[q] as usize;
        }
        let mut count = {
            let mut c: Vec<usize> = order.iter().map(|&q| class[q]).collect();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next_class = vec![0; self.states()];
            for &q in &order {
                let mut sig = vec![class[q]];
                sig.extend((0..k).map(|a| class[self.delta[q * k + a] as usize]));
                let len = ids.len();
                next_class[q] = *ids.entry(sig).or_insert(len);
            }
            class = next_class;
            if ids.len() == count {
                break;
            }
            count = ids.len();
        }
        // Renumber classes in breadth-first order from the initial state.
        let mut rename = vec![usize::MAX; count];
        let mut next_id = 0;
        for &q in &order {
            if rename[class[q]] == usize::MAX {
                rename[class[q]] = next_id;
                next_id += 1;
            }
        }
        let mut delta = vec![0u32; count * k];
        let mut accepting = vec![false; count];
        for &q in &order {
            let c = rename[class[q]];
            accepting[c] = self.accepting[q];
            for a in 0..k {
                delta[c * k + a] = rename[class[self.delta[q * k + a] as usize]] as u32;
            }
        }
        Dfa {
            symbols: k,
            delta,
            initial: rename[class[self.initial as usize]] as u32,
            accepting,
        }
    }

    pub fn to_lang(&self, alphabet: Arc<Alphabet>) -> WordLang {
        let mut nfa = Nfa::default();
        for q in 0..self.states() {
            nfa.add_state(self.accepting[q]);
        }
        for q in 0..self.states() {
            for a in 0..self.symbols {
                nfa.add_sym(q as u32, a as Sym, self.delta[q * self.symbols + a]);
            }
        }
        nfa.initial.push(self.initial);
        WordLang::from_nfa(alphabet, nfa)
    }

    /// Transition triples `(state, symbol, successor)` in table order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Sym, usize)> + '_ {
        (0..self.states()).flat_map(move |q| (0..self.symbols).map(move |a| (q, a as Sym, self.next(q, a as Sym))))
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.states()).filter(|&q| self.accepting[q]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Regex;

    #[test]
    fn determinize_agrees_with_nfa() {
        let a = Arc::new(Alphabet::numeric(2));
        let l = Regex::parse("(0+1)*1(0+1)", &a).unwrap().to_lang(&a);
        let d = l.determinize();
        for w in l.words_up_to(6) {
            assert!(d.accepts(&w));
        }
        assert!(!d.accepts(&[1, 0, 0]));
        assert_eq!(d.minimize().states(), 4);
        assert_eq!(d.to_lang(a.clone()), l);
    }

    #[test]
    fn sink_variant_accepts_extensions() {
        let a = Arc::new(Alphabet::numeric(2));
        let d = Regex::parse("11", &a).unwrap().to_lang(&a).determinize();
        let s = d.sink_accepting();
        assert!(s.accepts(&[1, 1, 0, 1]));
        assert!(!s.accepts(&[1, 0, 1, 1]));
        assert!(s.accepts(&[1, 1]));
    }

    #[test]
    fn partial_table_is_rejected() {
        let a = Alphabet::numeric(2);
        let e = Dfa::from_table(&a, 1, 0, &[(0, 0, 0)], &[]).unwrap_err();
        assert!(matches!(e, WordError::NotTotal { state: 0, .. }));
    }
}
