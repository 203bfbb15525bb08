//! Exact ω-acceptance probabilities from the bottom strongly connected
//! components of the product chain.

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{ProbAutomaton, ProbError, TestLanguage};

/// Reachable part of the product of the automaton with the sink-accepting
/// DFA, from `(x, q₀)`. Node 0 is the start.
#[derive(Debug, Clone)]
pub struct ProductChain {
    /// `(automaton state, DFA state)` of each node.
    pub nodes: Vec<(usize, usize)>,
    pub succ: Vec<Vec<(f64, usize)>>,
    /// BSCC of each node, if it lies in one.
    pub bscc: Vec<Option<usize>>,
    /// Whether each BSCC meets `𝔉` with an accepting DFA flag.
    pub accepting_bscc: Vec<bool>,
}

impl ProductChain {
    pub fn new(a: &ProbAutomaton, x: usize, lambda: &TestLanguage) -> Result<Self, ProbError> {
        a.check_state(x)?;
        lambda.check(a)?;
        let dfa = lambda.sink_dfa();
        let nq = dfa.states();
        let mut index = vec![usize::MAX; a.states() * nq];
        let mut nodes = vec![(x, dfa.initial())];
        index[x * nq + dfa.initial()] = 0;
        let mut succ: Vec<Vec<(f64, usize)>> = Vec::new();
        let mut head = 0;
        while head < nodes.len() {
            let (y, q) = nodes[head];
            let mut out = Vec::new();
            for &(s, z, p) in a.moves(y) {
                let key = (z, dfa.next(q, s));
                let k = key.0 * nq + key.1;
                if index[k] == usize::MAX {
                    index[k] = nodes.len();
                    nodes.push(key);
                }
                out.push((p, index[k]));
            }
            succ.push(out);
            head += 1;
        }
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(nodes.len(), 0);
        for _ in 0..nodes.len() {
            g.add_node(());
        }
        for (i, out) in succ.iter().enumerate() {
            for &(_, j) in out {
                g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
            }
        }
        let sccs = tarjan_scc(&g);
        let mut comp = vec![0; nodes.len()];
        for (c, scc) in sccs.iter().enumerate() {
            for n in scc {
                comp[n.index()] = c;
            }
        }
        let mut bscc = vec![None; nodes.len()];
        let mut accepting_bscc = Vec::new();
        for scc in &sccs {
            let c = comp[scc[0].index()];
            let closed = scc.iter().all(|n| succ[n.index()].iter().all(|&(_, j)| comp[j] == c));
            if !closed {
                continue;
            }
            let id = accepting_bscc.len();
            // The DFA flag is absorbing, so it is constant on a BSCC.
            let flagged = dfa.is_accepting(nodes[scc[0].index()].1);
            let meets_f = scc.iter().any(|n| a.accepting()[nodes[n.index()].0]);
            accepting_bscc.push(flagged && meets_f);
            for n in scc {
                bscc[n.index()] = Some(id);
            }
        }
        Ok(ProductChain {
            nodes,
            succ,
            bscc,
            accepting_bscc,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Some(accepting)` once node `i` lies in a BSCC.
    pub fn settled(&self, i: usize) -> Option<bool> {
        self.bscc[i].map(|c| self.accepting_bscc[c])
    }
}

/// Probability of reaching an accepting BSCC from `(x, q₀)`, solved as a
/// linear system over the transient nodes by LU with partial pivoting.
pub fn bscc_exact(a: &ProbAutomaton, x: usize, lambda: &TestLanguage) -> Result<f64, ProbError> {
    let chain = ProductChain::new(a, x, lambda)?;
    if let Some(acc) = chain.settled(0) {
        return Ok(if acc { 1.0 } else { 0.0 });
    }
    let transient: Vec<usize> = (0..chain.len()).filter(|&i| chain.bscc[i].is_none()).collect();
    let mut slot = vec![usize::MAX; chain.len()];
    for (k, &i) in transient.iter().enumerate() {
        slot[i] = k;
    }
    let n = transient.len();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for (k, &i) in transient.iter().enumerate() {
        for &(p, j) in &chain.succ[i] {
            match chain.settled(j) {
                Some(true) => b[k] += p,
                Some(false) => {}
                None => m[(k, slot[j])] -= p,
            }
        }
    }
    let v = m.lu().solve(&b).ok_or(ProbError::Singular)?;
    Ok(v[0].clamp(0.0, 1.0))
}
