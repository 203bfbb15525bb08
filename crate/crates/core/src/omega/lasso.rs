use std::fmt;

use crate::word::{Alphabet, Sym, Word, WordError};

/// Ultimately periodic word `prefix · period^ω`, stored in canonical form:
/// the period is primitive and the prefix is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    prefix: Word,
    period: Word,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LassoError {
    #[error("lasso period must be non-empty")]
    EmptyPeriod,
    #[error("lasso must have the form `u:v`")]
    MissingSeparator,
    #[error(transparent)]
    Word(#[from] WordError),
}

impl LassoWord {
    pub fn new(prefix: Word, period: Word) -> Result<Self, LassoError> {
        if period.is_empty() {
            return Err(LassoError::EmptyPeriod);
        }
        let mut prefix = prefix;
        let mut period = primitive_root(&period).to_vec();
        while let (Some(&p), Some(&q)) = (prefix.last(), period.last()) {
            if p != q {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(LassoWord { prefix, period })
    }

    /// Parses `u:v` where `u` and `v` are words over `alphabet`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, LassoError> {
        let (u, v) = text.split_once(':').ok_or(LassoError::MissingSeparator)?;
        LassoWord::new(alphabet.parse_word(u)?, alphabet.parse_word(v)?)
    }

    pub fn prefix(&self) -> &[Sym] {
        &self.prefix
    }

    pub fn period(&self) -> &[Sym] {
        &self.period
    }

    /// Symbol at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> Sym {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The lasso `w · self`.
    pub fn prepend(&self, w: &[Sym]) -> LassoWord {
        let mut prefix = w.to_vec();
        prefix.extend_from_slice(&self.prefix);
        LassoWord::new(prefix, self.period.clone()).expect("period is non-empty")
    }

    /// The suffix after `w`, if `w` is a prefix of `self`.
    pub fn strip_prefix(&self, w: &[Sym]) -> Option<LassoWord> {
        if w.iter().enumerate().any(|(i, &a)| self.at(i) != a) {
            return None;
        }
        let n = w.len();
        let (prefix, period) = if n <= self.prefix.len() {
            (self.prefix[n..].to_vec(), self.period.clone())
        } else {
            let mut period = self.period.clone();
            period.rotate_left((n - self.prefix.len()) % self.period.len());
            (Vec::new(), period)
        };
        Some(LassoWord::new(prefix, period).expect("period is non-empty"))
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        LassoDisplay { lasso: self, alphabet }
    }

    /// All canonical lassos with `|u| <= max_prefix` and `1 <= |v| <= max_period`, deduplicated.
    pub fn enumerate(symbols: usize, max_prefix: usize, max_period: usize) -> Vec<LassoWord> {
        let prefixes = words_up_to(symbols, max_prefix);
        let periods: Vec<Word> = words_up_to(symbols, max_period)
            .into_iter()
            .filter(|w| !w.is_empty())
            .collect();
        let mut out: Vec<LassoWord> = Vec::with_capacity(prefixes.len() * periods.len());
        for u in &prefixes {
            for v in &periods {
                out.push(LassoWord::new(u.clone(), v.clone()).expect("non-empty period"));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

struct LassoDisplay<'a> {
    lasso: &'a LassoWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = if self.lasso.prefix.is_empty() {
            String::new()
        } else {
            self.alphabet.format_word(&self.lasso.prefix)
        };
        write!(f, "{}:{}", u, self.alphabet.format_word(&self.lasso.period))
    }
}

fn primitive_root(v: &[Sym]) -> &[Sym] {
    let n = v.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| v[i] == v[i - d]) {
            return &v[..d];
        }
    }
    v
}

/// All words over `symbols` letters with length at most `n`, shortlex order.
pub fn words_up_to(symbols: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..symbols as Sym {
                let mut w2 = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let l = LassoWord::new(vec![0, 1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(l.prefix(), &[] as &[Sym]);
        assert_eq!(l.period(), &[0, 1]);
        let l = LassoWord::new(vec![1, 1], vec![0, 1]).unwrap();
        assert_eq!((l.prefix(), l.period()), (&[1][..], &[1, 0][..]));
        assert!(matches!(LassoWord::new(vec![0], vec![]), Err(LassoError::EmptyPeriod)));
    }

    #[test]
    fn parse_and_display() {
        let a = Alphabet::numeric(2);
        let l = LassoWord::parse("0:1", &a).unwrap();
        assert_eq!(l.display(&a).to_string(), "0:1");
        let l = LassoWord::parse(":11", &a).unwrap();
        assert_eq!(l.display(&a).to_string(), ":1");
        assert!(LassoWord::parse("01", &a).is_err());
    }

    proptest! {
        #[test]
        fn canonicalization_preserves_the_word(
            u in proptest::collection::vec(0u32..2, 0..5),
            v in proptest::collection::vec(0u32..2, 1..5),
        ) {
            let raw_at = |i: usize| if i < u.len() { u[i] } else { v[(i - u.len()) % v.len()] };
            let l = LassoWord::new(u.clone(), v.clone()).unwrap();
            for i in 0..40 {
                prop_assert_eq!(l.at(i), raw_at(i));
            }
            prop_assert!(l.prefix().len() <= u.len());
            prop_assert!(l.period().len() <= v.len());
        }
    }
}
