//! Regular languages of finite words over a finite alphabet.
//!
//! A [`WordLang`] is an ε-NFA kept trimmed after every operation: every
//! stored state is reachable from an initial state and co-reachable to an
//! accepting one. The empty language has zero states.

mod dfa;
mod matrix;
mod nfa;
mod regex;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use dfa::Dfa;
pub use matrix::LangMatrix;
pub(crate) use nfa::Nfa;
pub use regex::Regex;

const COMPACT_THRESHOLD: usize = 12;

/// Index of a symbol in its [`Alphabet`].
pub type Sym = u32;

/// Finite word as a sequence of symbol indices.
pub type Word = Vec<Sym>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: String, right: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol index {0} out of range")]
    SymbolOutOfRange(Sym),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("regex syntax error at offset {offset}: {message}")]
    RegexSyntax { offset: usize, message: String },
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("dfa is not total: state {state} has no transition on `{symbol}`")]
    NotTotal { state: usize, symbol: String },
}

/// Ordered set of symbol names. Symbols are non-empty tokens without
/// whitespace or regex operator characters; `eps` is reserved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

const RESERVED_CHARS: &[char] = &['(', ')', '+', '.', '*', ':', ',', '[', ']', ';'];

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(WordError::InvalidAlphabet("no symbols".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &symbols {
            if s.is_empty() || s == "eps" || s.chars().any(|c| c.is_whitespace() || RESERVED_CHARS.contains(&c)) {
                return Err(WordError::InvalidAlphabet(format!("bad symbol `{s}`")));
            }
            if !seen.insert(s.clone()) {
                return Err(WordError::InvalidAlphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The alphabet `{0, 1, ..., k-1}` with decimal symbol names.
    pub fn numeric(k: usize) -> Self {
        Alphabet::new((0..k).map(|i| i.to_string())).expect("numeric alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, a: Sym) -> &str {
        &self.symbols[a as usize]
    }

    pub fn index(&self, name: &str) -> Option<Sym> {
        self.symbols.iter().position(|s| s == name).map(|i| i as Sym)
    }

    pub fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Longest symbol that is a prefix of `input`, with its byte length.
    pub(crate) fn match_prefix(&self, input: &str) -> Option<(Sym, usize)> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| input.starts_with(s.as_str()))
            .max_by_key(|(_, s)| s.len())
            .map(|(i, s)| (i as Sym, s.len()))
    }

    /// Parses a word. Whitespace and commas separate tokens; otherwise the
    /// longest matching symbol is taken greedily. `""`, `eps` and `ε` denote
    /// the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text.is_empty() || text == "eps" || text == "ε" {
            return Ok(Vec::new());
        }
        let mut word = Vec::new();
        for chunk in text.split(|c: char| c.is_whitespace() || c == ',') {
            let mut rest = chunk;
            while !rest.is_empty() {
                match self.match_prefix(rest) {
                    Some((a, len)) => {
                        word.push(a);
                        rest = &rest[len..];
                    }
                    None => return Err(WordError::UnknownSymbol(rest.to_string())),
                }
            }
        }
        Ok(word)
    }

    /// Renders a word so that [`Alphabet::parse_word`] reads it back.
    pub fn format_word(&self, word: &[Sym]) -> String {
        if word.is_empty() {
            return "eps".to_string();
        }
        let sep = if self.single_char() { "" } else { " " };
        word.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(sep)
    }

    pub fn check(&self, word: &[Sym]) -> Result<(), WordError> {
        match word.iter().find(|&&a| a as usize >= self.len()) {
            Some(&a) => Err(WordError::SymbolOutOfRange(a)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols.join(","))
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> Result<(), WordError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(WordError::AlphabetMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

/// Regular language of finite words.
#[derive(Clone)]
pub struct WordLang {
    alphabet: Arc<Alphabet>,
    nfa: Arc<Nfa>,
    has_epsilon: bool,
}

impl fmt::Debug for WordLang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WordLang({} states", self.nfa.len())?;
        let sample = self.words_up_to(3);
        let shown: Vec<String> = sample.iter().take(8).map(|w| self.alphabet.format_word(w)).collect();
        write!(f, ", words<=3: {:?})", shown)
    }
}

impl WordLang {
    pub(crate) fn from_nfa(alphabet: Arc<Alphabet>, nfa: Nfa) -> Self {
        let nfa = nfa.trim();
        let has_epsilon = nfa.accepts_empty();
        WordLang {
            alphabet,
            nfa: Arc::new(nfa),
            has_epsilon,
        }
    }

    pub(crate) fn nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        WordLang {
            alphabet,
            nfa: Arc::new(Nfa::default()),
            has_epsilon: false,
        }
    }

    pub fn epsilon(alphabet: Arc<Alphabet>) -> Self {
        let mut nfa = Nfa::default();
        let s = nfa.add_state(true);
        nfa.initial.push(s);
        WordLang::from_nfa(alphabet, nfa)
    }

    pub fn symbol(alphabet: Arc<Alphabet>, a: Sym) -> Result<Self, WordError> {
        alphabet.check(&[a])?;
        let mut nfa = Nfa::default();
        let s = nfa.add_state(false);
        let t = nfa.add_state(true);
        nfa.add_sym(s, a, t);
        nfa.initial.push(s);
        Ok(WordLang::from_nfa(alphabet, nfa))
    }

    /// The finite set of `words`.
    pub fn from_words<'a, I>(alphabet: Arc<Alphabet>, words: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = &'a Word>,
    {
        let mut nfa = Nfa::default();
        for w in words {
            alphabet.check(w)?;
            let mut cur = nfa.add_state(w.is_empty());
            nfa.initial.push(cur);
            for (k, &a) in w.iter().enumerate() {
                let next = nfa.add_state(k + 1 == w.len());
                nfa.add_sym(cur, a, next);
                cur = next;
            }
        }
        Ok(WordLang::from_nfa(alphabet, nfa))
    }

    /// `Σ_ε` restricted to the given symbols, optionally with `ε`.
    pub fn letters(alphabet: Arc<Alphabet>, symbols: &[Sym], with_epsilon: bool) -> Result<Self, WordError> {
        alphabet.check(symbols)?;
        let mut nfa = Nfa::default();
        let s = nfa.add_state(with_epsilon);
        nfa.initial.push(s);
        if !symbols.is_empty() {
            let t = nfa.add_state(true);
            for &a in symbols {
                nfa.add_sym(s, a, t);
            }
        }
        Ok(WordLang::from_nfa(alphabet, nfa))
    }

    /// `Σ*`.
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        let mut nfa = Nfa::default();
        let s = nfa.add_state(true);
        nfa.initial.push(s);
        for a in 0..alphabet.len() as Sym {
            nfa.add_sym(s, a, s);
        }
        WordLang::from_nfa(alphabet, nfa)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.nfa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nfa.len() == 0
    }

    pub fn contains_epsilon(&self) -> bool {
        self.has_epsilon
    }

    /// True iff the language is exactly `{ε}`.
    pub fn is_epsilon(&self) -> bool {
        self.has_epsilon && self.nfa.symbol_edge_count() == 0
    }

    fn check_alphabet(&self, other: &WordLang) -> Result<(), WordError> {
        same_alphabet(&self.alphabet, &other.alphabet)
    }

    pub fn union(&self, other: &WordLang) -> Result<WordLang, WordError> {
        self.check_alphabet(other)?;
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let mut nfa = (*self.nfa).clone();
        let off = nfa.append(&other.nfa);
        nfa.initial.extend(other.nfa.initial.iter().map(|&s| s + off));
        Ok(WordLang::from_nfa(self.alphabet.clone(), nfa))
    }

    /// `self · other`.
    pub fn concat(&self, other: &WordLang) -> Result<WordLang, WordError> {
        self.check_alphabet(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(WordLang::empty(self.alphabet.clone()));
        }
        if self.is_epsilon() {
            return Ok(other.clone());
        }
        if other.is_epsilon() {
            return Ok(self.clone());
        }
        let mut nfa = (*self.nfa).clone();
        let finals: Vec<u32> = nfa.accepting_states().collect();
        let off = nfa.append(&other.nfa);
        for &f in &finals {
            nfa.accepting[f as usize] = false;
            for &i in &other.nfa.initial {
                nfa.add_eps(f, i + off);
            }
        }
        Ok(WordLang::from_nfa(self.alphabet.clone(), nfa))
    }

    /// Kleene star, followed by the hygiene pass of `from_nfa`.
    pub fn star(&self) -> WordLang {
        if self.is_empty() || self.is_epsilon() {
            return WordLang::epsilon(self.alphabet.clone());
        }
        let mut nfa = Nfa::default();
        let hub = nfa.add_state(true);
        nfa.initial.push(hub);
        let off = nfa.append(&self.nfa);
        for &i in &self.nfa.initial {
            nfa.add_eps(hub, i + off);
        }
        for f in self.nfa.accepting_states() {
            nfa.add_eps(f + off, hub);
        }
        WordLang::from_nfa(self.alphabet.clone(), nfa)
    }

    /// `self · self*`.
    pub fn plus(&self) -> WordLang {
        self.concat(&self.star()).expect("same alphabet")
    }

    pub fn member(&self, word: &[Sym]) -> bool {
        let mut cur = self.nfa.closure(&self.nfa.initial);
        for &a in word {
            if cur.is_empty() {
                return false;
            }
            cur = self.nfa.step(&cur, a);
        }
        cur.iter().any(|&s| self.nfa.accepting[s as usize])
    }

    /// Brzozowski derivative `{ w | a·w ∈ L }`.
    pub fn derivative(&self, a: Sym) -> WordLang {
        let start = self.nfa.closure(&self.nfa.initial);
        let next = self.nfa.step(&start, a);
        let mut nfa = (*self.nfa).clone();
        nfa.initial = next;
        WordLang::from_nfa(self.alphabet.clone(), nfa)
    }

    /// Subset construction; the result is total.
    /// Same language through the minimal DFA when that has fewer states.
    /// Small automata and subset blow-ups are left unchanged.
    pub fn compact(&self) -> WordLang {
        let n = self.state_count();
        if n <= COMPACT_THRESHOLD {
            return self.clone();
        }
        match Dfa::from_nfa_capped(&self.nfa, self.alphabet.len(), 2 * n) {
            Some(dfa) => {
                let small = dfa.minimize().to_lang(self.alphabet.clone());
                if small.state_count() < n {
                    small
                } else {
                    self.clone()
                }
            }
            None => self.clone(),
        }
    }

    pub fn determinize(&self) -> Dfa {
        Dfa::from_nfa(&self.nfa, self.alphabet.len())
    }

    /// `None` if the languages are equal, otherwise a word in exactly one of them.
    pub fn equivalent(&self, other: &WordLang) -> Result<Option<Word>, WordError> {
        self.check_alphabet(other)?;
        Ok(product_search(&self.nfa, &other.nfa, self.alphabet.len(), |a, b| {
            a != b
        }))
    }

    /// `None` if `self ⊆ other`, otherwise a word of `self` missing from `other`.
    pub fn included_in(&self, other: &WordLang) -> Result<Option<Word>, WordError> {
        self.check_alphabet(other)?;
        Ok(product_search(&self.nfa, &other.nfa, self.alphabet.len(), |a, b| {
            a && !b
        }))
    }

    pub fn intersect(&self, other: &WordLang) -> Result<WordLang, WordError> {
        self.check_alphabet(other)?;
        let x = self.without_epsilon_moves();
        let y = other.without_epsilon_moves();
        let mut nfa = Nfa::default();
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut get = |nfa: &mut Nfa, p: u32, q: u32, queue: &mut VecDeque<(u32, u32)>| -> u32 {
            *ids.entry((p, q)).or_insert_with(|| {
                queue.push_back((p, q));
                nfa.add_state(x.accepting[p as usize] && y.accepting[q as usize])
            })
        };
        for &p in &x.initial {
            for &q in &y.initial {
                let s = get(&mut nfa, p, q, &mut queue);
                nfa.initial.push(s);
            }
        }
        while let Some((p, q)) = queue.pop_front() {
            let s = get(&mut nfa, p, q, &mut queue);
            for &(a, p2) in &x.next[p as usize] {
                for &(b, q2) in &y.next[q as usize] {
                    if a == b {
                        let t = get(&mut nfa, p2, q2, &mut queue);
                        nfa.add_sym(s, a, t);
                    }
                }
            }
        }
        Ok(WordLang::from_nfa(self.alphabet.clone(), nfa))
    }

    /// Words of length at most `max_len`.
    pub fn truncate(&self, max_len: usize) -> WordLang {
        let x = self.without_epsilon_moves();
        let mut nfa = Nfa::default();
        let width = max_len + 1;
        for _ in 0..x.len() * width {
            nfa.add_state(false);
        }
        for p in 0..x.len() {
            for k in 0..width {
                let s = (p * width + k) as u32;
                nfa.accepting[s as usize] = x.accepting[p];
                if k < max_len {
                    for &(a, q) in &x.next[p] {
                        nfa.add_sym(s, a, q * width as u32 + k as u32 + 1);
                    }
                }
            }
        }
        nfa.initial = x.initial.iter().map(|&p| p * width as u32).collect();
        WordLang::from_nfa(self.alphabet.clone(), nfa)
    }

    /// Every word of the language has length at most `k`.
    pub fn max_length_at_most(&self, k: usize) -> bool {
        self.truncate(k).equivalent(self).expect("same alphabet").is_none()
    }

    /// All words of length at most `max_len`, in shortlex order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut frontier: Vec<(Word, Vec<u32>)> = vec![(Vec::new(), self.nfa.closure(&self.nfa.initial))];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (w, set) in frontier {
                if set.iter().any(|&s| self.nfa.accepting[s as usize]) {
                    out.push(w.clone());
                }
                if len == max_len {
                    continue;
                }
                for a in 0..self.alphabet.len() as Sym {
                    let t = self.nfa.step(&set, a);
                    if !t.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push((w2, t));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Equivalent automaton without ε-moves.
    pub(crate) fn without_epsilon_moves(&self) -> Nfa {
        self.nfa.remove_epsilon()
    }
}

/// Breadth-first search of the lazily determinized product, returning the
/// shortest word whose pair of acceptance bits satisfies `bad`.
fn product_search(x: &Nfa, y: &Nfa, k: usize, bad: impl Fn(bool, bool) -> bool) -> Option<Word> {
    let start = (x.closure(&x.initial), y.closure(&y.initial));
    let mut index: HashMap<(Vec<u32>, Vec<u32>), usize> = HashMap::new();
    let mut nodes: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    let mut parent: Vec<Option<(usize, Sym)>> = Vec::new();
    index.insert(start.clone(), 0);
    nodes.push(start);
    parent.push(None);
    let mut head = 0;
    while head < nodes.len() {
        let (sx, sy) = nodes[head].clone();
        let ax = sx.iter().any(|&s| x.accepting[s as usize]);
        let ay = sy.iter().any(|&s| y.accepting[s as usize]);
        if bad(ax, ay) {
            let mut word = Vec::new();
            let mut cur = head;
            while let Some((p, a)) = parent[cur] {
                word.push(a);
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for a in 0..k as Sym {
            let tx = x.step(&sx, a);
            let ty = y.step(&sy, a);
            if tx.is_empty() && ty.is_empty() {
                continue;
            }
            let key = (tx, ty);
            if !index.contains_key(&key) {
                index.insert(key.clone(), nodes.len());
                nodes.push(key);
                parent.push(Some((head, a)));
            }
        }
        head += 1;
    }
    None
}

impl PartialEq for WordLang {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.equivalent(other), Ok(None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::numeric(2))
    }

    fn re(s: &str) -> WordLang {
        Regex::parse(s, &ab()).unwrap().to_lang(&ab())
    }

    /// Exhaustive oracle: all words up to length `n` from an explicit predicate.
    fn oracle(n: usize, pred: impl Fn(&[Sym]) -> bool) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 0..=n {
            for bits in 0..(1u32 << len) {
                let w: Word = (0..len).map(|i| (bits >> (len - 1 - i)) & 1).collect();
                if pred(&w) {
                    out.push(w);
                }
            }
        }
        out
    }

    #[test]
    fn star_of_symbol() {
        let l = re("1*");
        assert!(l.member(&[]));
        assert!(l.member(&[1, 1, 1]));
        assert!(!l.member(&[1, 0]));
    }

    #[test]
    fn figure_language_members() {
        let l = re("(0+1)1*");
        let expected = oracle(5, |w| !w.is_empty() && w[1..].iter().all(|&a| a == 1));
        assert_eq!(l.words_up_to(5), expected);
    }

    #[test]
    fn concat_with_empty_is_empty() {
        let l = re("01*").concat(&WordLang::empty(ab())).unwrap();
        assert!(l.is_empty());
        assert_eq!(l.state_count(), 0);
    }

    #[test]
    fn equivalence_witness_is_shortest() {
        let w = re("1*").equivalent(&re("1*+0")).unwrap();
        assert_eq!(w, Some(vec![0]));
        assert_eq!(re("(1*)*").equivalent(&re("1*")).unwrap(), None);
        assert_eq!(re("(0+1)*").equivalent(&WordLang::universal(ab())).unwrap(), None);
    }

    #[test]
    fn inclusion() {
        assert_eq!(re("11").included_in(&re("1*")).unwrap(), None);
        assert_eq!(re("1*").included_in(&re("11")).unwrap(), Some(vec![]));
    }

    #[test]
    fn derivative_matches_definition() {
        let l = re("(01+1)*0");
        let d = l.derivative(0);
        let expected = oracle(5, |w| {
            let mut full = vec![0];
            full.extend_from_slice(w);
            l.member(&full)
        });
        assert_eq!(d.words_up_to(5), expected);
    }

    #[test]
    fn intersection_and_truncation() {
        let l = re("(0+1)*1").intersect(&re("0*1*")).unwrap();
        assert_eq!(
            l.words_up_to(4),
            oracle(4, |w| w.ends_with(&[1]) && w.windows(2).all(|p| p[0] <= p[1]))
        );
        assert_eq!(re("1*").truncate(2).words_up_to(5), vec![vec![], vec![1], vec![1, 1]]);
        assert!(re("0+1+e").max_length_at_most(1));
        assert!(!re("0+11").max_length_at_most(1));
    }

    #[test]
    fn alphabet_mismatch_is_reported() {
        let other = Arc::new(Alphabet::new(["a", "b"]).unwrap());
        let e = WordLang::epsilon(other);
        assert!(matches!(re("1").union(&e), Err(WordError::AlphabetMismatch { .. })));
    }

    #[test]
    fn parse_words() {
        let a = Alphabet::new(["a", "ab", "b"]).unwrap();
        assert_eq!(a.parse_word("abab").unwrap(), vec![1, 1]);
        assert_eq!(a.parse_word("a b ab").unwrap(), vec![0, 2, 1]);
        assert_eq!(a.parse_word("eps").unwrap(), Vec::<Sym>::new());
        assert!(a.parse_word("c").is_err());
    }

    #[test]
    fn trimmed_star_has_no_dead_states() {
        let l = re("(0+0)*");
        assert!(l.state_count() <= 5);
        assert_eq!(l, re("0*"));
    }
}
