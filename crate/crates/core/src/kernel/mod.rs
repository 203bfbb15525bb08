//! Instance-generic machinery for order-enriched Lawvere theories.
//!
//! An instance supplies arrows `m ⇸ p` with composition, joins, bottoms, base
//! maps and cotupling. Star and omega default to the Kleene and co-Kleene
//! iterations of [`star_iterative`] and [`omega_iterative`]; instances with a
//! closed form override them. The instance's comparator doubles as the
//! stabilization test for those iterations.

mod iterate;
mod laws;
mod normal_form;
mod rational;

use std::fmt;

use thiserror::Error;

use crate::word::WordError;

pub use iterate::{
    bang, extended_star, final_map, gspi_lhs, gspi_rhs, omega_iterative, plus, star_iterative, DEFAULT_OMEGA_ROUNDS,
    DEFAULT_STAR_ROUNDS,
};
pub use laws::{check_theory_laws, LawConfig, LawReport, LawResult, SampleKind, Sampler};
pub use normal_form::{omega_automaton, NormalForm};
pub use rational::{eval_rational, eval_rational_nf, random_term_shape, GeneratorTable, RationalTerm, TermParseError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("type mismatch: {0}")]
    Type(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("iteration did not stabilize within {rounds} rounds")]
    NoFixpoint { rounds: usize },
    #[error("not supported by this instance: {0}")]
    Unsupported(String),
    #[error("generator `{0}` is not a one-step arrow")]
    NotOneStep(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

/// Outcome of a comparison: holds, or fails with a human-readable witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn from_witness(w: Option<String>) -> Verdict {
        match w {
            None => Verdict::Holds,
            Some(s) => Verdict::Fails(s),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Fails(w) => write!(f, "fails: {w}"),
        }
    }
}

/// An order-enriched Lawvere theory with a decidable (possibly bounded or
/// tolerance-based) comparator.
///
/// Composition follows diagrammatic application order of the arguments:
/// `compose(g, f)` is `g·f`, which runs `f` first.
pub trait Theory {
    type Arrow: Clone + fmt::Debug;

    fn dom(&self, f: &Self::Arrow) -> usize;
    fn cod(&self, f: &Self::Arrow) -> usize;

    fn compose(&self, g: &Self::Arrow, f: &Self::Arrow) -> Result<Self::Arrow, TheoryError>;
    fn join(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Self::Arrow, TheoryError>;
    fn bottom(&self, m: usize, p: usize) -> Self::Arrow;

    /// Base map `i ↦ map[i]` from `map.len()` to `p`.
    fn base(&self, map: &[usize], p: usize) -> Result<Self::Arrow, TheoryError>;

    /// `[f₁, …, f_k]`: parts share a codomain; domains are concatenated.
    fn cotuple(&self, parts: &[Self::Arrow]) -> Result<Self::Arrow, TheoryError>;

    /// Equality under the instance comparator.
    fn compare(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Verdict, TheoryError>;

    /// `f ≤ g` under the instance comparator.
    fn compare_leq(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Verdict, TheoryError>;

    /// Membership in the closure of the one-step generators under base maps.
    fn is_one_step(&self, f: &Self::Arrow) -> bool;

    fn identity(&self, n: usize) -> Self::Arrow {
        let map: Vec<usize> = (0..n).collect();
        self.base(&map, n).expect("identity map is in range")
    }

    /// Injection of block `block` into the coproduct of `sizes`.
    fn injection(&self, block: usize, sizes: &[usize]) -> Result<Self::Arrow, TheoryError> {
        if block >= sizes.len() {
            return Err(TheoryError::Type(format!(
                "injection block {block} of {} blocks",
                sizes.len()
            )));
        }
        let offset: usize = sizes[..block].iter().sum();
        let total: usize = sizes.iter().sum();
        let map: Vec<usize> = (0..sizes[block]).map(|i| offset + i).collect();
        self.base(&map, total)
    }

    fn star(&self, alpha: &Self::Arrow) -> Result<Self::Arrow, TheoryError> {
        star_iterative(self, alpha, DEFAULT_STAR_ROUNDS)
    }

    /// Greatest element of `hom(n, 0)`, if the instance represents ω-arrows.
    fn top(&self, _n: usize) -> Option<Self::Arrow> {
        None
    }

    fn omega(&self, beta: &Self::Arrow) -> Result<Self::Arrow, TheoryError> {
        omega_iterative(self, beta, DEFAULT_OMEGA_ROUNDS)
    }

    /// Checks that `star` is the join of the powers `(id ∨ α)^k`.
    fn star_is_join_of_powers(&self, alpha: &Self::Arrow, star: &Self::Arrow) -> Result<Verdict, TheoryError> {
        let iterated = star_iterative(self, alpha, DEFAULT_STAR_ROUNDS)?;
        self.compare(star, &iterated)
    }

    fn describe(&self, f: &Self::Arrow) -> String {
        format!("{f:?}")
    }
}

pub(crate) fn check_endo<T: Theory + ?Sized>(t: &T, f: &T::Arrow, what: &str) -> Result<usize, TheoryError> {
    let (m, p) = (t.dom(f), t.cod(f));
    if m != p {
        return Err(TheoryError::Type(format!(
            "{what} needs an endomorphism, got {m} -> {p}"
        )));
    }
    Ok(m)
}
