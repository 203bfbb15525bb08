use std::sync::Arc;

use super::{same_alphabet, Alphabet, Nfa, WordError, WordLang};

/// Matrix of languages. Entry `(i, j)` collects the words labelling moves
/// from row index `i` to column index `j`; products concatenate along paths.
#[derive(Debug, Clone)]
pub struct LangMatrix {
    alphabet: Arc<Alphabet>,
    rows: usize,
    cols: usize,
    data: Vec<WordLang>,
}

impl LangMatrix {
    pub fn zero(alphabet: Arc<Alphabet>, rows: usize, cols: usize) -> Self {
        let data = vec![WordLang::empty(alphabet.clone()); rows * cols];
        LangMatrix {
            alphabet,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(alphabet: Arc<Alphabet>, n: usize) -> Self {
        let mut m = LangMatrix::zero(alphabet.clone(), n, n);
        let eps = WordLang::epsilon(alphabet);
        for i in 0..n {
            m.data[i * n + i] = eps.clone();
        }
        m
    }

    pub fn from_fn(
        alphabet: Arc<Alphabet>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> WordLang,
    ) -> Result<Self, WordError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let l = f(i, j);
                same_alphabet(&alphabet, l.alphabet())?;
                data.push(l);
            }
        }
        Ok(LangMatrix {
            alphabet,
            rows,
            cols,
            data,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &WordLang {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, l: WordLang) -> Result<(), WordError> {
        same_alphabet(&self.alphabet, l.alphabet())?;
        self.data[i * self.cols + j] = l;
        Ok(())
    }

    fn same_shape(&self, other: &LangMatrix) -> Result<(), WordError> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(WordError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn join(&self, other: &LangMatrix) -> Result<LangMatrix, WordError> {
        self.same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.union(b).map(|l| l.compact()))
            .collect::<Result<_, _>>()?;
        Ok(LangMatrix {
            alphabet: self.alphabet.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `(self · other)_ik = ⋃_j self_ij · other_jk`.
    pub fn mul(&self, other: &LangMatrix) -> Result<LangMatrix, WordError> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        if self.cols != other.rows {
            return Err(WordError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = LangMatrix::zero(self.alphabet.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..other.cols {
                let mut acc = WordLang::empty(self.alphabet.clone());
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    let b = other.get(j, k);
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    acc = acc.union(&a.concat(b)?)?;
                }
                out.data[i * other.cols + k] = acc.compact();
            }
        }
        Ok(out)
    }

    fn require_square(&self) -> Result<(), WordError> {
        if self.rows != self.cols {
            return Err(WordError::Shape(format!(
                "star of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Reflexive-transitive closure. All entries are glued into one ε-NFA
    /// over the index states; entry `(i, j)` of the result is that automaton
    /// started at `i` and accepting at `j`.
    pub fn star(&self) -> Result<LangMatrix, WordError> {
        self.require_square()?;
        let n = self.rows;
        let mut nfa = Nfa::default();
        for _ in 0..n {
            nfa.add_state(false);
        }
        for i in 0..n {
            for j in 0..n {
                let e = self.get(i, j);
                if e.is_empty() {
                    continue;
                }
                if e.is_epsilon() {
                    nfa.add_eps(i as u32, j as u32);
                    continue;
                }
                let inner = e.nfa();
                let off = nfa.append(inner);
                for s in 0..inner.len() {
                    nfa.accepting[s + off as usize] = false;
                }
                for &s in &inner.initial {
                    nfa.add_eps(i as u32, s + off);
                }
                for f in inner.accepting_states() {
                    nfa.add_eps(f + off, j as u32);
                }
            }
        }
        let mut out = LangMatrix::zero(self.alphabet.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                let mut entry = nfa.clone();
                entry.initial = vec![i as u32];
                entry.accepting[j] = true;
                out.data[i * n + j] = WordLang::from_nfa(self.alphabet.clone(), entry).compact();
            }
        }
        Ok(out)
    }

    /// Reflexive-transitive closure by recursive block decomposition at the
    /// midpoint, with language star as the base case.
    pub fn star_blockwise(&self) -> Result<LangMatrix, WordError> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        if n == 1 {
            let mut out = self.clone();
            out.data[0] = self.data[0].star();
            return Ok(out);
        }
        let h = n / 2;
        let a = self.block(0, h, 0, h);
        let b = self.block(0, h, h, n);
        let c = self.block(h, n, 0, h);
        let d = self.block(h, n, h, n);
        let ds = d.star_blockwise()?;
        let bds = b.mul(&ds)?;
        let f = a.join(&bds.mul(&c)?)?.star_blockwise()?;
        let fbds = f.mul(&bds)?;
        let dsc = ds.mul(&c)?;
        let dscf = dsc.mul(&f)?;
        let lower_right = ds.join(&dscf.mul(&bds)?)?;
        Ok(LangMatrix::from_blocks(&f, &fbds, &dscf, &lower_right))
    }

    /// Sub-matrix of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> LangMatrix {
        let mut out = LangMatrix::zero(self.alphabet.clone(), r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.data[(i - r0) * (c1 - c0) + (j - c0)] = self.get(i, j).clone();
            }
        }
        out
    }

    fn from_blocks(a: &LangMatrix, b: &LangMatrix, c: &LangMatrix, d: &LangMatrix) -> LangMatrix {
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut out = LangMatrix::zero(a.alphabet.clone(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = match (i < a.rows, j < a.cols) {
                    (true, true) => a.get(i, j),
                    (true, false) => b.get(i, j - a.cols),
                    (false, true) => c.get(i - a.rows, j),
                    (false, false) => d.get(i - a.rows, j - a.cols),
                };
                out.data[i * cols + j] = e.clone();
            }
        }
        out
    }

    /// Rows of `parts` stacked in order; all parts share the column count.
    pub fn vstack(alphabet: Arc<Alphabet>, cols: usize, parts: &[&LangMatrix]) -> Result<LangMatrix, WordError> {
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            same_alphabet(&alphabet, &p.alphabet)?;
            if p.cols != cols {
                return Err(WordError::Shape(format!(
                    "cannot stack {} columns onto {}",
                    p.cols, cols
                )));
            }
            rows += p.rows;
            data.extend(p.data.iter().cloned());
        }
        Ok(LangMatrix {
            alphabet,
            rows,
            cols,
            data,
        })
    }

    /// `None` if entrywise equal, otherwise the first differing entry and a witness word.
    pub fn equivalent(&self, other: &LangMatrix) -> Result<Option<(usize, usize, Vec<u32>)>, WordError> {
        self.same_shape(other)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let Some(w) = self.get(i, j).equivalent(other.get(i, j))? {
                    return Ok(Some((i, j, w)));
                }
            }
        }
        Ok(None)
    }

    /// `None` if entrywise included, otherwise the first offending entry and word.
    pub fn included_in(&self, other: &LangMatrix) -> Result<Option<(usize, usize, Vec<u32>)>, WordError> {
        self.same_shape(other)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let Some(w) = self.get(i, j).included_in(other.get(i, j))? {
                    return Ok(Some((i, j, w)));
                }
            }
        }
        Ok(None)
    }

    pub fn map(&self, f: impl Fn(&WordLang) -> WordLang) -> LangMatrix {
        LangMatrix {
            alphabet: self.alphabet.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}
