use std::sync::Arc;

use super::{final_states, LtsMorphism, LtsTheory};
use crate::kernel::{bang, plus, Theory, TheoryError};
use crate::omega::OmegaLang;
use crate::word::{Alphabet, LangMatrix, Sym, WordError, WordLang};

/// Nondeterministic automaton `(α, F)` with ε-moves. `α : n ⇸ n` is one-step.
#[derive(Debug, Clone)]
pub struct NdAutomaton {
    alpha: LtsMorphism,
    accepting: Vec<bool>,
}

impl NdAutomaton {
    /// Builds `α` from `(src, symbol, dst)` triples; `None` is an ε-move.
    pub fn from_transitions(
        alphabet: Arc<Alphabet>,
        states: usize,
        transitions: &[(usize, Option<Sym>, usize)],
        accepting: &[usize],
    ) -> Result<Self, WordError> {
        let mut cells: Vec<Vec<(Vec<Sym>, bool)>> = vec![vec![(Vec::new(), false); states]; states];
        for &(s, a, d) in transitions {
            if s >= states || d >= states {
                return Err(WordError::Shape(format!("transition {s} -> {d} with {states} states")));
            }
            match a {
                Some(a) => {
                    if a as usize >= alphabet.len() {
                        return Err(WordError::SymbolOutOfRange(a));
                    }
                    cells[s][d].0.push(a)
                }
                None => cells[s][d].1 = true,
            }
        }
        if let Some(&f) = accepting.iter().find(|&&f| f >= states) {
            return Err(WordError::Shape(format!("accepting state {f} with {states} states")));
        }
        let fin = LangMatrix::from_fn(alphabet.clone(), states, states, |i, j| {
            WordLang::letters(alphabet.clone(), &cells[i][j].0, cells[i][j].1).expect("symbols checked")
        })?;
        let mut flags = vec![false; states];
        for &f in accepting {
            flags[f] = true;
        }
        Ok(NdAutomaton {
            alpha: LtsMorphism::finite(fin),
            accepting: flags,
        })
    }

    /// Wraps a one-step endomorphism.
    pub fn new(t: &LtsTheory, alpha: LtsMorphism, accepting: Vec<bool>) -> Result<Self, TheoryError> {
        crate::kernel::check_endo(t, &alpha, "automaton")?;
        if !t.is_one_step(&alpha) {
            return Err(TheoryError::NotOneStep(t.describe(&alpha)));
        }
        if accepting.len() != alpha.dom() {
            return Err(TheoryError::Type(format!(
                "{} flags for {} states",
                accepting.len(),
                alpha.dom()
            )));
        }
        Ok(NdAutomaton { alpha, accepting })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.alpha.alphabet()
    }

    pub fn states(&self) -> usize {
        self.alpha.dom()
    }

    pub fn alpha(&self) -> &LtsMorphism {
        &self.alpha
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    /// `(src, symbol, dst)` triples in row-major order, ε-moves first per cell.
    pub fn transitions(&self) -> Vec<(usize, Option<Sym>, usize)> {
        let n = self.states();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let cell = self.alpha.fin().get(i, j);
                if cell.contains_epsilon() {
                    out.push((i, None, j));
                }
                for a in 0..self.alphabet().len() as Sym {
                    if cell.member(&[a]) {
                        out.push((i, Some(a), j));
                    }
                }
            }
        }
        out
    }

    /// `‖α, F‖ = !·f_F·α* : n ⇸ 1`.
    pub fn behaviour(&self, t: &LtsTheory) -> Result<LtsMorphism, TheoryError> {
        let star = t.star(&self.alpha)?;
        let filtered = t.compose(&final_states(t, &self.accepting), &star)?;
        t.compose(&bang(t, self.states()), &filtered)
    }

    /// `‖α, F‖_ω = (f_F·α⁺)^ω`, one ω-language per state.
    pub fn omega_behaviour(&self, t: &LtsTheory) -> Result<Vec<OmegaLang>, TheoryError> {
        let step = t.compose(&final_states(t, &self.accepting), &plus(t, &self.alpha)?)?;
        Ok(t.omega(&step)?.inf().to_vec())
    }
}
