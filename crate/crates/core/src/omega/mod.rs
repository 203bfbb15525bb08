//! Languages of infinite words.
//!
//! An [`OmegaLang`] is a pair `(buchi, tail)` denoting `L(buchi) ∪ tail·Σ^ω`.
//! The tail carries the coercion of finite words to sets of infinite words
//! that arises when an infinite iteration eventually only contributes `ε`.
//! The split is a representation choice: the same language has many splits,
//! and only the union is observable.

mod buchi;
mod lasso;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::word::{same_alphabet, Alphabet, LangMatrix, Sym, WordError, WordLang};
use buchi::{Buchi, EpsBuchi};

pub use lasso::{words_up_to, LassoError, LassoWord};

/// Regular language of infinite words.
#[derive(Clone)]
pub struct OmegaLang {
    alphabet: Arc<Alphabet>,
    buchi: Arc<Buchi>,
    tail: WordLang,
}

impl fmt::Debug for OmegaLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = LassoWord::enumerate(self.alphabet.len(), 1, 2)
            .into_iter()
            .filter(|w| self.lasso_member(w))
            .map(|w| w.display(&self.alphabet).to_string())
            .collect();
        write!(
            f,
            "OmegaLang(buchi {} states, tail {:?}, lassos<=1:2 {:?})",
            self.buchi.len(),
            self.tail,
            members
        )
    }
}

impl OmegaLang {
    fn from_parts(alphabet: Arc<Alphabet>, buchi: Buchi, tail: WordLang) -> Self {
        OmegaLang {
            alphabet,
            buchi: Arc::new(buchi.trim()),
            tail,
        }
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        let tail = WordLang::empty(alphabet.clone());
        OmegaLang {
            alphabet,
            buchi: Arc::new(Buchi::default()),
            tail,
        }
    }

    /// `Σ^ω`, carried entirely by the tail `{ε}`.
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        let tail = WordLang::epsilon(alphabet.clone());
        OmegaLang {
            alphabet,
            buchi: Arc::new(Buchi::default()),
            tail,
        }
    }

    /// `tail · Σ^ω`.
    pub fn from_tail(tail: WordLang) -> Self {
        OmegaLang {
            alphabet: tail.alphabet().clone(),
            buchi: Arc::new(Buchi::default()),
            tail,
        }
    }

    /// Büchi automaton from explicit transitions `(src, symbol, dst, accepting)`.
    pub fn from_buchi(
        alphabet: Arc<Alphabet>,
        states: usize,
        transitions: &[(usize, Sym, usize, bool)],
        initial: &[usize],
    ) -> Result<Self, WordError> {
        let mut b = Buchi::default();
        for _ in 0..states {
            b.add_state();
        }
        for &(s, a, t, acc) in transitions {
            if s >= states || t >= states {
                return Err(WordError::Shape(format!("büchi state out of range in {s} -> {t}")));
            }
            alphabet.check(&[a])?;
            b.edges[s].push((a, t as u32, acc));
        }
        for &i in initial {
            if i >= states {
                return Err(WordError::Shape(format!("initial state {i} out of range")));
            }
            b.initial.push(i as u32);
        }
        let tail = WordLang::empty(alphabet.clone());
        Ok(OmegaLang::from_parts(alphabet, b, tail))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn tail(&self) -> &WordLang {
        &self.tail
    }

    /// The Büchi part as a language with an empty tail.
    pub fn buchi_part(&self) -> OmegaLang {
        OmegaLang {
            alphabet: self.alphabet.clone(),
            buchi: self.buchi.clone(),
            tail: WordLang::empty(self.alphabet.clone()),
        }
    }

    pub fn buchi_states(&self) -> usize {
        self.buchi.len()
    }

    /// Exact emptiness: the trimmed Büchi part has no state and the tail is empty.
    pub fn is_empty(&self) -> bool {
        self.buchi.len() == 0 && self.tail.is_empty()
    }

    pub fn lasso_member(&self, w: &LassoWord) -> bool {
        self.tail_prefix_member(w) || self.buchi.accepts(w)
    }

    /// Some finite prefix of `w` lies in the tail.
    fn tail_prefix_member(&self, w: &LassoWord) -> bool {
        let nfa = self.tail.nfa();
        if nfa.len() == 0 {
            return false;
        }
        let u = w.prefix().len();
        let len = u + w.period().len();
        let mut set = nfa.closure(&nfa.initial);
        let mut pos = 0usize;
        let mut seen: HashSet<(usize, Vec<u32>)> = HashSet::new();
        loop {
            if set.iter().any(|&s| nfa.accepting[s as usize]) {
                return true;
            }
            if set.is_empty() || !seen.insert((pos, set.clone())) {
                return false;
            }
            set = nfa.step(&set, w.at(pos));
            pos = if pos + 1 < len { pos + 1 } else { u };
        }
    }

    pub fn union(&self, other: &OmegaLang) -> Result<OmegaLang, WordError> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        let tail = self.tail.union(&other.tail)?.compact();
        if other.buchi.len() == 0 {
            return Ok(OmegaLang {
                alphabet: self.alphabet.clone(),
                buchi: self.buchi.clone(),
                tail,
            });
        }
        if self.buchi.len() == 0 {
            return Ok(OmegaLang {
                alphabet: self.alphabet.clone(),
                buchi: other.buchi.clone(),
                tail,
            });
        }
        let mut b = (*self.buchi).clone();
        let off = b.append(&other.buchi);
        b.initial.extend(other.buchi.initial.iter().map(|&s| s + off));
        Ok(OmegaLang::from_parts(self.alphabet.clone(), b, tail))
    }

    /// `prefix · self`.
    pub fn concat_tail(prefix: &WordLang, w: &OmegaLang) -> Result<OmegaLang, WordError> {
        same_alphabet(prefix.alphabet(), &w.alphabet)?;
        if prefix.is_empty() || w.is_empty() {
            return Ok(OmegaLang::empty(w.alphabet.clone()));
        }
        if prefix.is_epsilon() {
            return Ok(w.clone());
        }
        let tail = prefix.concat(&w.tail)?.compact();
        if w.buchi.len() == 0 {
            return Ok(OmegaLang {
                alphabet: w.alphabet.clone(),
                buchi: w.buchi.clone(),
                tail,
            });
        }
        let mut e = EpsBuchi::default();
        let nfa = prefix.nfa();
        e.append_nfa(nfa);
        let off = e.append_buchi(&w.buchi);
        for f in nfa.accepting_states() {
            for &i in &w.buchi.initial {
                e.eps[f as usize].push((i + off, false));
            }
        }
        e.initial = nfa.initial.clone();
        Ok(OmegaLang::from_parts(w.alphabet.clone(), e.eliminate(), tail))
    }

    /// `R^ω`, with the convention that `ε ∈ R` contributes `R*·Σ^ω`.
    pub fn omega_power(r: &WordLang) -> OmegaLang {
        let m = LangMatrix::from_fn(r.alphabet().clone(), 1, 1, |_, _| r.clone()).expect("same alphabet");
        omega_of_matrix(&m)
            .expect("square matrix")
            .pop()
            .expect("one component")
    }

    /// `None` if the languages agree on every lasso with `|u| <= bound` and
    /// `1 <= |v| <= bound`, otherwise the first disagreeing lasso.
    pub fn bounded_equal(&self, other: &OmegaLang, bound: usize) -> Result<Option<LassoWord>, WordError> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        Ok(LassoWord::enumerate(self.alphabet.len(), bound, bound)
            .into_iter()
            .find(|w| self.lasso_member(w) != other.lasso_member(w)))
    }

    /// `None` if every bounded lasso of `self` is in `other`.
    pub fn bounded_included(&self, other: &OmegaLang, bound: usize) -> Result<Option<LassoWord>, WordError> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        Ok(LassoWord::enumerate(self.alphabet.len(), bound, bound)
            .into_iter()
            .find(|w| self.lasso_member(w) && !other.lasso_member(w)))
    }

    /// Pairs `(L_s, R_s)` with `L(buchi) = ⋃ L_s · R_s^ω`, one per state `s`:
    /// `L_s` reaches `s` from an initial state and `R_s` returns to `s`
    /// through an accepting transition.
    pub fn rational_parts(&self) -> Vec<(WordLang, WordLang)> {
        let mut out = Vec::new();
        for s in 0..self.buchi.len() as u32 {
            let mut reach = self.buchi.as_nfa();
            reach.accepting[s as usize] = true;
            let l = WordLang::from_nfa(self.alphabet.clone(), reach);
            let r = WordLang::from_nfa(self.alphabet.clone(), self.buchi.accepting_loops(s));
            if !l.is_empty() && !r.is_empty() {
                out.push((l, r));
            }
        }
        out
    }
}

/// Per-index ω-iteration of a square matrix of languages: component `i` is
/// the union of `|σ₁σ₂…|` over infinite index paths `i → i₁ → i₂ → …`, where
/// a finite concatenation `w` stands for `w·Σ^ω`.
pub fn omega_of_matrix(m: &LangMatrix) -> Result<Vec<OmegaLang>, WordError> {
    let n = m.rows();
    if m.cols() != n {
        return Err(WordError::Shape(format!("omega of non-square {}x{}", n, m.cols())));
    }
    let alphabet = m.alphabet().clone();
    let star = m.star()?;
    let plus = star.mul(m)?;
    let on_eps_cycle: Vec<usize> = (0..n).filter(|&j| plus.get(j, j).contains_epsilon()).collect();

    let mut glued = EpsBuchi::default();
    for _ in 0..n {
        glued.add_state();
    }
    for i in 0..n {
        for j in 0..n {
            let e = m.get(i, j);
            if e.is_empty() {
                continue;
            }
            if e.is_epsilon() {
                glued.eps[i].push((j as u32, true));
                continue;
            }
            let nfa = e.nfa();
            let off = glued.append_nfa(nfa);
            for &s in &nfa.initial {
                glued.eps[i].push((s + off, false));
            }
            for f in nfa.accepting_states() {
                glued.eps[(f + off) as usize].push((j as u32, true));
            }
        }
    }
    let eliminated = glued.eliminate();

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut tail = WordLang::empty(alphabet.clone());
        for &j in &on_eps_cycle {
            tail = tail.union(star.get(i, j))?;
        }
        let mut b = eliminated.clone();
        b.initial = vec![i as u32];
        out.push(OmegaLang::from_parts(alphabet.clone(), b, tail));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Regex;

    fn bin() -> Arc<Alphabet> {
        Arc::new(Alphabet::numeric(2))
    }

    fn re(s: &str) -> WordLang {
        Regex::parse(s, &bin()).unwrap().to_lang(&bin())
    }

    fn lasso(s: &str) -> LassoWord {
        LassoWord::parse(s, &bin()).unwrap()
    }

    #[test]
    fn omega_power_of_single_letter() {
        let w = OmegaLang::omega_power(&re("1"));
        assert!(w.lasso_member(&lasso(":1")));
        assert!(!w.lasso_member(&lasso("1:0")));
        assert!(w.tail().is_empty());
    }

    #[test]
    fn epsilon_in_base_coerces_to_sigma_omega() {
        let w = OmegaLang::omega_power(&re("e+1"));
        for l in LassoWord::enumerate(2, 2, 2) {
            assert!(w.lasso_member(&l));
        }
    }

    #[test]
    fn concat_tail_prefixes() {
        let w = OmegaLang::concat_tail(&re("00*"), &OmegaLang::omega_power(&re("1"))).unwrap();
        assert!(w.lasso_member(&lasso("00:1")));
        assert!(!w.lasso_member(&lasso(":1")));
        assert!(!w.lasso_member(&lasso("0:01")));
    }

    #[test]
    fn emptiness_is_exact() {
        let dead = OmegaLang::from_buchi(bin(), 2, &[(0, 0, 1, false), (1, 1, 1, false)], &[0]).unwrap();
        assert!(dead.is_empty());
        let live = OmegaLang::from_buchi(bin(), 2, &[(0, 0, 1, false), (1, 1, 1, true)], &[0]).unwrap();
        assert!(!live.is_empty());
        assert!(live.lasso_member(&lasso("0:1")));
    }

    #[test]
    fn bounded_equal_reports_witness() {
        let a = OmegaLang::omega_power(&re("0+1"));
        let b = OmegaLang::universal(bin());
        assert_eq!(a.bounded_equal(&b, 3).unwrap(), None);
        let c = OmegaLang::omega_power(&re("1"));
        let w = a.bounded_equal(&c, 3).unwrap().unwrap();
        assert!(a.lasso_member(&w) && !c.lasso_member(&w));
    }

    #[test]
    fn tail_member_needs_finite_prefix() {
        let w = OmegaLang::from_tail(re("01"));
        assert!(w.lasso_member(&lasso("01:0")));
        assert!(w.lasso_member(&lasso(":01")));
        assert!(!w.lasso_member(&lasso(":10")));
    }

    #[test]
    fn rational_parts_rebuild_the_buchi_part() {
        let w = OmegaLang::concat_tail(&re("0*"), &OmegaLang::omega_power(&re("10+1"))).unwrap();
        let mut rebuilt = OmegaLang::empty(bin());
        for (l, r) in w.rational_parts() {
            let part = OmegaLang::concat_tail(&l, &OmegaLang::omega_power(&r)).unwrap();
            rebuilt = rebuilt.union(&part).unwrap();
        }
        assert_eq!(rebuilt.bounded_equal(&w, 4).unwrap(), None);
    }
}
