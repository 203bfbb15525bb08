use super::iterate::extended_star;
use super::{Theory, TheoryError};

/// Arrow `m ⇸ p` presented as `[⊥_{n,p}, id_p]·α*·in^m_n` with a one-step
/// generator `α : n ⇸ n+p`. The first `sources` states are the entry points;
/// column `n + j` of the generator is the exit to output `j`.
#[derive(Debug, Clone)]
pub struct NormalForm<A> {
    pub generator: A,
    pub states: usize,
    pub sources: usize,
    pub outputs: usize,
}

fn relabel<T: Theory + ?Sized>(t: &T, f: &T::Arrow, map: Vec<usize>, cod: usize) -> Result<T::Arrow, TheoryError> {
    t.compose(&t.base(&map, cod)?, f)
}

impl<A: Clone + std::fmt::Debug> NormalForm<A> {
    /// Normal form of a one-step arrow `a : m ⇸ p`: every transition exits at once.
    pub fn from_one_step<T: Theory<Arrow = A> + ?Sized>(t: &T, a: &A) -> Result<Self, TheoryError> {
        if !t.is_one_step(a) {
            return Err(TheoryError::NotOneStep(t.describe(a)));
        }
        let (m, p) = (t.dom(a), t.cod(a));
        let generator = relabel(t, a, (0..p).map(|j| m + j).collect(), m + p)?;
        Ok(NormalForm {
            generator,
            states: m,
            sources: m,
            outputs: p,
        })
    }

    pub fn denotation<T: Theory<Arrow = A> + ?Sized>(&self, t: &T) -> Result<A, TheoryError> {
        let (n, p) = (self.states, self.outputs);
        let project = t.cotuple(&[t.bottom(n, p), t.identity(p)])?;
        let entry = t.base(&(0..self.sources).collect::<Vec<_>>(), n)?;
        t.compose(&t.compose(&project, &extended_star(t, &self.generator)?)?, &entry)
    }

    /// `r₂·r₁`: exits of `r₁` feed the entry states of `r₂`.
    pub fn compose<T: Theory<Arrow = A> + ?Sized>(t: &T, r2: &Self, r1: &Self) -> Result<Self, TheoryError> {
        if r1.outputs != r2.sources {
            return Err(TheoryError::Type(format!(
                "compose {} -> {} after {} -> {}",
                r2.sources, r2.outputs, r1.sources, r1.outputs
            )));
        }
        let (n1, n2, out) = (r1.states, r2.states, r2.outputs);
        let total = n1 + n2;
        let a = relabel(t, &r1.generator, (0..n1 + r1.outputs).collect(), total + out)?;
        let b = relabel(
            t,
            &r2.generator,
            (0..n2).map(|s| n1 + s).chain((0..out).map(|j| total + j)).collect(),
            total + out,
        )?;
        Ok(NormalForm {
            generator: t.cotuple(&[a, b])?,
            states: total,
            sources: r1.sources,
            outputs: out,
        })
    }

    /// `r₁ ∨ r₂` with fresh entry states branching into both automata.
    pub fn join<T: Theory<Arrow = A> + ?Sized>(t: &T, r1: &Self, r2: &Self) -> Result<Self, TheoryError> {
        if r1.sources != r2.sources || r1.outputs != r2.outputs {
            return Err(TheoryError::Type("join of normal forms with different types".into()));
        }
        let (m, p, n1, n2) = (r1.sources, r1.outputs, r1.states, r2.states);
        let total = m + n1 + n2;
        let entry = t.join(
            &t.base(&(0..m).map(|i| m + i).collect::<Vec<_>>(), total + p)?,
            &t.base(&(0..m).map(|i| m + n1 + i).collect::<Vec<_>>(), total + p)?,
        )?;
        let a = relabel(
            t,
            &r1.generator,
            (0..n1).map(|s| m + s).chain((0..p).map(|j| total + j)).collect(),
            total + p,
        )?;
        let b = relabel(
            t,
            &r2.generator,
            (0..n2).map(|s| m + n1 + s).chain((0..p).map(|j| total + j)).collect(),
            total + p,
        )?;
        Ok(NormalForm {
            generator: t.cotuple(&[entry, a, b])?,
            states: total,
            sources: m,
            outputs: p,
        })
    }

    fn check_square(&self) -> Result<(), TheoryError> {
        if self.sources != self.outputs {
            return Err(TheoryError::Type(format!(
                "star of {} -> {}",
                self.sources, self.outputs
            )));
        }
        Ok(())
    }

    /// `r*`: hub states `0..m` either exit or enter the automaton, whose exits
    /// return to the hubs.
    pub fn star<T: Theory<Arrow = A> + ?Sized>(t: &T, r: &Self) -> Result<Self, TheoryError> {
        r.check_square()?;
        let (m, n) = (r.sources, r.states);
        let total = m + n;
        let hubs = t.join(
            &t.base(&(0..m).map(|j| m + j).collect::<Vec<_>>(), total + m)?,
            &t.base(&(0..m).map(|j| total + j).collect::<Vec<_>>(), total + m)?,
        )?;
        let a = relabel(t, &r.generator, (0..n).map(|s| m + s).chain(0..m).collect(), total + m)?;
        Ok(NormalForm {
            generator: t.cotuple(&[hubs, a])?,
            states: total,
            sources: m,
            outputs: m,
        })
    }

    /// `r⁺`: as [`NormalForm::star`] but entering the automaton directly.
    pub fn plus<T: Theory<Arrow = A> + ?Sized>(t: &T, r: &Self) -> Result<Self, TheoryError> {
        r.check_square()?;
        let (m, n) = (r.sources, r.states);
        let total = n + m;
        let a = relabel(t, &r.generator, (0..n + m).collect(), total + m)?;
        let hubs = t.join(
            &t.base(&(0..m).collect::<Vec<_>>(), total + m)?,
            &t.base(&(0..m).map(|j| total + j).collect::<Vec<_>>(), total + m)?,
        )?;
        Ok(NormalForm {
            generator: t.cotuple(&[a, hubs])?,
            states: total,
            sources: m,
            outputs: m,
        })
    }

    /// `[r₁, …, r_k]`: all source blocks first, then the remaining states.
    pub fn cotuple<T: Theory<Arrow = A> + ?Sized>(t: &T, parts: &[Self]) -> Result<Self, TheoryError> {
        let p = match parts.first() {
            Some(r) => r.outputs,
            None => return Err(TheoryError::Type("empty cotuple of normal forms".into())),
        };
        if parts.iter().any(|r| r.outputs != p) {
            return Err(TheoryError::Type("cotuple parts with different codomains".into()));
        }
        let sources: usize = parts.iter().map(|r| r.sources).sum();
        let total: usize = parts.iter().map(|r| r.states).sum();
        let mut src_off = 0;
        let mut extra_off = sources;
        let mut positions: Vec<Vec<usize>> = Vec::new();
        let mut relabelled = Vec::new();
        for r in parts {
            let pos: Vec<usize> = (0..r.states)
                .map(|s| {
                    if s < r.sources {
                        src_off + s
                    } else {
                        extra_off + s - r.sources
                    }
                })
                .collect();
            src_off += r.sources;
            extra_off += r.states - r.sources;
            let map = pos.iter().copied().chain((0..p).map(|j| total + j)).collect();
            relabelled.push(relabel(t, &r.generator, map, total + p)?);
            positions.push(pos);
        }
        // `inverse[x]` is the position of new state `x` in the concatenated domains.
        let mut inverse = vec![0; total];
        let mut concat_off = 0;
        for (r, pos) in parts.iter().zip(&positions) {
            for (s, &x) in pos.iter().enumerate() {
                inverse[x] = concat_off + s;
            }
            concat_off += r.states;
        }
        let generator = t.compose(&t.cotuple(&relabelled)?, &t.base(&inverse, total)?)?;
        Ok(NormalForm {
            generator,
            states: total,
            sources,
            outputs: p,
        })
    }
}

/// Automaton `(ξ, F)` whose ω-behaviour at state `j < m` is `r^ω` at `j`:
/// hubs `0..m` step into the automaton of `r`, whose exits return to the
/// hubs, and the hubs are the final states.
pub fn omega_automaton<T: Theory + ?Sized>(
    t: &T,
    r: &NormalForm<T::Arrow>,
) -> Result<(T::Arrow, Vec<bool>), TheoryError> {
    r.check_square()?;
    let (m, n) = (r.sources, r.states);
    let total = m + n;
    let hubs = t.base(&(0..m).map(|j| m + j).collect::<Vec<_>>(), total)?;
    let a = relabel(t, &r.generator, (0..n).map(|s| m + s).chain(0..m).collect(), total)?;
    let xi = t.cotuple(&[hubs, a])?;
    let finals: Vec<bool> = (0..total).map(|s| s < m).collect();
    Ok((xi, finals))
}
