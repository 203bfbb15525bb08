//! The labelled-transition instance: arrows `m ⇸ p` are an `m×p` matrix of
//! regular languages (finite runs ending at an output) together with one
//! ω-language per source (infinite runs that never exit).

mod automaton;
pub(crate) mod format;
mod kleene;
mod random;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::kernel::{Theory, TheoryError, Verdict};
use crate::omega::{omega_of_matrix, LassoWord, OmegaLang};
use crate::word::{Alphabet, LangMatrix, Word, WordError, WordLang};

pub use automaton::NdAutomaton;
pub use format::{parse_lts, parse_term_file, print_lts, print_term_file, FormatError, TermFile};
pub use kleene::{
    check_kleene_roundtrip, check_omega_kleene_roundtrip, omega_gamma, omega_rational_eval, omega_to_rational,
    to_rational, TRANSITION_GENERATOR,
};
pub use random::{random_automaton, random_one_step, random_term, LtsSampler};

/// Default lasso bound for comparing ω-parts.
pub const DEFAULT_BOUND: usize = 3;

#[derive(Clone)]
pub struct LtsMorphism {
    fin: LangMatrix,
    inf: Vec<OmegaLang>,
}

impl LtsMorphism {
    pub fn new(fin: LangMatrix, inf: Vec<OmegaLang>) -> Result<Self, WordError> {
        if inf.len() != fin.rows() {
            return Err(WordError::Shape(format!(
                "{} ω-components for {} rows",
                inf.len(),
                fin.rows()
            )));
        }
        for w in &inf {
            crate::word::same_alphabet(fin.alphabet(), w.alphabet())?;
        }
        Ok(LtsMorphism { fin, inf })
    }

    pub fn finite(fin: LangMatrix) -> Self {
        let inf = (0..fin.rows())
            .map(|_| OmegaLang::empty(fin.alphabet().clone()))
            .collect();
        LtsMorphism { fin, inf }
    }

    /// Arrow `n ⇸ 0` with the given ω-components.
    pub fn omega_vector(alphabet: Arc<Alphabet>, inf: Vec<OmegaLang>) -> Result<Self, WordError> {
        LtsMorphism::new(LangMatrix::zero(alphabet, inf.len(), 0), inf)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.fin.alphabet()
    }

    pub fn dom(&self) -> usize {
        self.fin.rows()
    }

    pub fn cod(&self) -> usize {
        self.fin.cols()
    }

    pub fn fin(&self) -> &LangMatrix {
        &self.fin
    }

    pub fn inf(&self) -> &[OmegaLang] {
        &self.inf
    }
}

impl fmt::Debug for LtsMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} fin [", self.dom(), self.cod())?;
        for i in 0..self.dom() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cod() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.fin.get(i, j))?;
            }
        }
        write!(f, "] inf {:?}", self.inf)
    }
}

/// The instance over a fixed alphabet. ω-parts are compared on lassos
/// `u·v^ω` with `|u|, |v| <= bound`; finite parts are compared exactly.
#[derive(Debug, Clone)]
pub struct LtsTheory {
    alphabet: Arc<Alphabet>,
    bound: usize,
}

impl LtsTheory {
    pub fn new(alphabet: Arc<Alphabet>, bound: usize) -> Self {
        LtsTheory { alphabet, bound }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `fin·w` for a matrix and a vector of ω-languages.
    fn act(&self, fin: &LangMatrix, w: &[OmegaLang]) -> Result<Vec<OmegaLang>, TheoryError> {
        let mut out = Vec::with_capacity(fin.rows());
        for i in 0..fin.rows() {
            let mut acc = OmegaLang::empty(self.alphabet.clone());
            for (j, wj) in w.iter().enumerate() {
                let l = fin.get(i, j);
                if l.is_empty() || wj.is_empty() {
                    continue;
                }
                acc = acc.union(&OmegaLang::concat_tail(l, wj)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn union_vec(a: &[OmegaLang], b: &[OmegaLang]) -> Result<Vec<OmegaLang>, TheoryError> {
        Ok(a.iter().zip(b).map(|(x, y)| x.union(y)).collect::<Result<_, _>>()?)
    }

    fn check_shape(f: &LtsMorphism, g: &LtsMorphism, what: &str) -> Result<(), TheoryError> {
        if f.dom() != g.dom() || f.cod() != g.cod() {
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

    fn compare_inf(&self, f: &[OmegaLang], g: &[OmegaLang], leq: bool) -> Result<Option<String>, TheoryError> {
        for (i, (x, y)) in f.iter().zip(g).enumerate() {
            let w = if leq {
                x.bounded_included(y, self.bound)?
            } else {
                x.bounded_equal(y, self.bound)?
            };
            if let Some(w) = w {
                return Ok(Some(format!("inf[{i}] differs on lasso {}", w.display(&self.alphabet))));
            }
        }
        Ok(None)
    }

    fn compare_fin(&self, f: &LangMatrix, g: &LangMatrix, leq: bool) -> Result<Option<String>, TheoryError> {
        let w = if leq { f.included_in(g)? } else { f.equivalent(g)? };
        Ok(w.map(|(i, j, w)| format!("fin[{i}][{j}] differs on word {}", self.alphabet.format_word(&w))))
    }
}

/// Words of length at most this are compared in `star_is_join_of_powers`.
const POWER_CHECK_LENGTH: usize = 3;

impl Theory for LtsTheory {
    type Arrow = LtsMorphism;

    fn dom(&self, f: &LtsMorphism) -> usize {
        f.dom()
    }

    fn cod(&self, f: &LtsMorphism) -> usize {
        f.cod()
    }

    fn compose(&self, g: &LtsMorphism, f: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        if f.cod() != g.dom() {
            return Err(TheoryError::Type(format!(
                "compose {} -> {} after {} -> {}",
                g.dom(),
                g.cod(),
                f.dom(),
                f.cod()
            )));
        }
        let fin = f.fin.mul(&g.fin)?;
        let inf = Self::union_vec(&f.inf, &self.act(&f.fin, &g.inf)?)?;
        Ok(LtsMorphism { fin, inf })
    }

    fn join(&self, f: &LtsMorphism, g: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        Self::check_shape(f, g, "join")?;
        Ok(LtsMorphism {
            fin: f.fin.join(&g.fin)?,
            inf: Self::union_vec(&f.inf, &g.inf)?,
        })
    }

    fn bottom(&self, m: usize, p: usize) -> LtsMorphism {
        LtsMorphism::finite(LangMatrix::zero(self.alphabet.clone(), m, p))
    }

    fn base(&self, map: &[usize], p: usize) -> Result<LtsMorphism, TheoryError> {
        if let Some(&j) = map.iter().find(|&&j| j >= p) {
            return Err(TheoryError::Type(format!("base map target {j} out of range for {p}")));
        }
        let eps = WordLang::epsilon(self.alphabet.clone());
        let empty = WordLang::empty(self.alphabet.clone());
        let fin = LangMatrix::from_fn(self.alphabet.clone(), map.len(), p, |i, j| {
            if map[i] == j {
                eps.clone()
            } else {
                empty.clone()
            }
        })?;
        Ok(LtsMorphism::finite(fin))
    }

    fn cotuple(&self, parts: &[LtsMorphism]) -> Result<LtsMorphism, TheoryError> {
        let p = parts
            .first()
            .map(|f| f.cod())
            .ok_or_else(|| TheoryError::Type("empty cotuple".into()))?;
        if parts.iter().any(|f| f.cod() != p) {
            return Err(TheoryError::Type("cotuple parts with different codomains".into()));
        }
        let fins: Vec<&LangMatrix> = parts.iter().map(|f| &f.fin).collect();
        let fin = LangMatrix::vstack(self.alphabet.clone(), p, &fins)?;
        let inf = parts.iter().flat_map(|f| f.inf.iter().cloned()).collect();
        Ok(LtsMorphism { fin, inf })
    }

    fn compare(&self, f: &LtsMorphism, g: &LtsMorphism) -> Result<Verdict, TheoryError> {
        Self::check_shape(f, g, "compare")?;
        if let Some(w) = self.compare_fin(&f.fin, &g.fin, false)? {
            return Ok(Verdict::Fails(w));
        }
        Ok(Verdict::from_witness(self.compare_inf(&f.inf, &g.inf, false)?))
    }

    fn compare_leq(&self, f: &LtsMorphism, g: &LtsMorphism) -> Result<Verdict, TheoryError> {
        Self::check_shape(f, g, "compare")?;
        if let Some(w) = self.compare_fin(&f.fin, &g.fin, true)? {
            return Ok(Verdict::Fails(w));
        }
        Ok(Verdict::from_witness(self.compare_inf(&f.inf, &g.inf, true)?))
    }

    /// Every finite entry is a subset of `Σ ∪ {ε}` and there are no ω-parts.
    fn is_one_step(&self, f: &LtsMorphism) -> bool {
        f.inf.iter().all(OmegaLang::is_empty)
            && (0..f.dom()).all(|i| (0..f.cod()).all(|j| f.fin.get(i, j).max_length_at_most(1)))
    }

    /// Closed form `fin*` with ω-part `fin*·inf`.
    fn star(&self, alpha: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        crate::kernel::check_endo(self, alpha, "star")?;
        let fin = alpha.fin.star()?;
        let inf = self.act(&fin, &alpha.inf)?;
        Ok(LtsMorphism { fin, inf })
    }

    fn top(&self, n: usize) -> Option<LtsMorphism> {
        let inf = (0..n).map(|_| OmegaLang::universal(self.alphabet.clone())).collect();
        Some(LtsMorphism::omega_vector(self.alphabet.clone(), inf).expect("consistent alphabet"))
    }

    /// Closed form `fin^ω ∪ fin*·inf`.
    fn omega(&self, beta: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
        crate::kernel::check_endo(self, beta, "omega")?;
        let iterated = omega_of_matrix(&beta.fin)?;
        let through = self.act(&beta.fin.star()?, &beta.inf)?;
        let inf = Self::union_vec(&iterated, &through)?;
        Ok(LtsMorphism::omega_vector(self.alphabet.clone(), inf)?)
    }

    /// Compares the finite part of `star` with `(id ∨ α)^K` on words of
    /// length at most 3, where `K = 4n` covers every path spelling such a
    /// word once ε-steps around cycles are cut. The ω-part of `star` must
    /// contain `x·inf(α)_j` for every such word `x` from `i` to `j`, checked
    /// on bounded lassos.
    fn star_is_join_of_powers(&self, alpha: &LtsMorphism, star: &LtsMorphism) -> Result<Verdict, TheoryError> {
        let n = crate::kernel::check_endo(self, alpha, "star")?;
        let len = POWER_CHECK_LENGTH;
        let rounds = (len + 1) * n;
        let words = |l: &WordLang| -> BTreeSet<Word> { l.words_up_to(len).into_iter().collect() };
        let step: Vec<Vec<BTreeSet<Word>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut w = words(alpha.fin.get(i, j));
                        if i == j {
                            w.insert(Vec::new());
                        }
                        w
                    })
                    .collect()
            })
            .collect();
        let mut power: Vec<Vec<BTreeSet<Word>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { [Vec::new()].into() } else { BTreeSet::new() })
                    .collect()
            })
            .collect();
        for _ in 0..rounds {
            let mut next = vec![vec![BTreeSet::new(); n]; n];
            for i in 0..n {
                for k in 0..n {
                    for x in &power[i][k] {
                        for j in 0..n {
                            for y in &step[k][j] {
                                if x.len() + y.len() <= len {
                                    next[i][j].insert([x.as_slice(), y.as_slice()].concat());
                                }
                            }
                        }
                    }
                }
            }
            power = next;
        }
        for (i, row) in power.iter().enumerate() {
            for (j, reached) in row.iter().enumerate() {
                let expected = words(star.fin.get(i, j));
                if let Some(w) = expected.symmetric_difference(reached).next() {
                    return Ok(Verdict::Fails(format!(
                        "star vs (id+a)^{rounds}: fin[{i}][{j}] differs on word {}",
                        self.alphabet.format_word(w)
                    )));
                }
            }
        }
        for lasso in LassoWord::enumerate(self.alphabet.len(), self.bound, self.bound) {
            for (i, row) in power.iter().enumerate() {
                if star.inf[i].lasso_member(&lasso) {
                    continue;
                }
                let reached = (0..n).any(|j| {
                    !alpha.inf[j].is_empty()
                        && row[j].iter().any(|x| {
                            lasso
                                .strip_prefix(x)
                                .is_some_and(|rest| alpha.inf[j].lasso_member(&rest))
                        })
                });
                if reached {
                    return Ok(Verdict::Fails(format!(
                        "inf[{i}] misses lasso {} reached through a power",
                        lasso.display(&self.alphabet)
                    )));
                }
            }
        }
        Ok(Verdict::Holds)
    }

    fn describe(&self, f: &LtsMorphism) -> String {
        format!("{f:?}")
    }
}

/// Diagonal arrow with `{ε}` at accepting states: `f_F : n ⇸ n`.
pub fn final_states(t: &LtsTheory, accepting: &[bool]) -> LtsMorphism {
    crate::kernel::final_map(t, accepting.len(), accepting).expect("diagonal of matching size")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theory() -> LtsTheory {
        LtsTheory::new(Arc::new(Alphabet::new(["a", "b"]).unwrap()), DEFAULT_BOUND)
    }

    fn lang(t: &LtsTheory, words: &[&str]) -> WordLang {
        let ws: Vec<Vec<u32>> = words.iter().map(|w| t.alphabet().parse_word(w).unwrap()).collect();
        WordLang::from_words(t.alphabet().clone(), &ws).unwrap()
    }

    fn single(t: &LtsTheory, words: &[&str]) -> LtsMorphism {
        let l = lang(t, words);
        LtsMorphism::finite(LangMatrix::from_fn(t.alphabet().clone(), 1, 1, |_, _| l.clone()).unwrap())
    }

    #[test]
    fn composite_carries_prefixed_omega_part() {
        let t = theory();
        let f = single(&t, &["a"]);
        let b = OmegaLang::omega_power(&lang(&t, &["b"]));
        let g = LtsMorphism::new(LangMatrix::zero(t.alphabet().clone(), 1, 1), vec![b]).unwrap();
        let gf = t.compose(&g, &f).unwrap();
        assert!(gf.inf()[0].lasso_member(&LassoWord::new(vec![0], vec![1]).unwrap()));
        assert!(!gf.inf()[0].lasso_member(&LassoWord::new(vec![], vec![1]).unwrap()));
    }

    #[test]
    fn star_of_bottom_is_identity() {
        let t = theory();
        assert!(t
            .compare(&t.star(&t.bottom(2, 2)).unwrap(), &t.identity(2))
            .unwrap()
            .holds());
    }

    #[test]
    fn omega_of_epsilon_is_universal() {
        let t = theory();
        let w = t.omega(&t.identity(1)).unwrap();
        assert!(t.compare(&w, &t.top(1).unwrap()).unwrap().holds());
        let a = t.omega(&single(&t, &["a"])).unwrap();
        assert!(a.inf()[0].lasso_member(&LassoWord::new(vec![], vec![0]).unwrap()));
        assert!(!a.inf()[0].lasso_member(&LassoWord::new(vec![1], vec![0]).unwrap()));
    }

    #[test]
    fn closed_form_star_matches_truncated_powers() {
        let t = theory();
        let a = lang(&t, &["a"]);
        let b = lang(&t, &["b"]);
        let e = WordLang::empty(t.alphabet().clone());
        let fin = LangMatrix::from_fn(t.alphabet().clone(), 2, 2, |i, j| match (i, j) {
            (0, 1) => a.clone(),
            (1, 0) => b.clone(),
            _ => e.clone(),
        })
        .unwrap();
        let inf = vec![OmegaLang::empty(t.alphabet().clone()), OmegaLang::omega_power(&a)];
        let alpha = LtsMorphism::new(fin, inf).unwrap();
        let closed = t.star(&alpha).unwrap();
        assert!(closed
            .fin()
            .get(0, 0)
            .equivalent(&lang(&t, &["ab"]).star())
            .unwrap()
            .is_none());
        assert!(t.star_is_join_of_powers(&alpha, &closed).unwrap().holds());
    }

    #[test]
    fn one_step_excludes_long_words_and_omega_parts() {
        let t = theory();
        assert!(t.is_one_step(&single(&t, &["a", ""])));
        assert!(!t.is_one_step(&single(&t, &["ab"])));
        assert!(!t.is_one_step(&t.top(1).unwrap()));
    }
}
