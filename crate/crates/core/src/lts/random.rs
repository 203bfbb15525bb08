use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{LtsMorphism, LtsTheory, NdAutomaton};
use crate::kernel::{eval_rational, random_term_shape, GeneratorTable, RationalTerm, SampleKind, Sampler, Theory};
use crate::omega::OmegaLang;
use crate::word::{LangMatrix, Sym, WordLang};

const LETTER_DENSITY: f64 = 0.3;
const EPSILON_DENSITY: f64 = 0.15;

fn random_cell<R: Rng>(t: &LtsTheory, rng: &mut R) -> WordLang {
    let letters: Vec<Sym> = (0..t.alphabet().len() as Sym)
        .filter(|_| rng.gen_bool(LETTER_DENSITY))
        .collect();
    WordLang::letters(t.alphabet().clone(), &letters, rng.gen_bool(EPSILON_DENSITY)).expect("letters in range")
}

/// One-step arrow `m ⇸ p`: every entry a random subset of `Σ ∪ {ε}`.
pub fn random_one_step<R: Rng>(t: &LtsTheory, m: usize, p: usize, rng: &mut R) -> LtsMorphism {
    let mut cells = Vec::with_capacity(m * p);
    for _ in 0..m * p {
        cells.push(random_cell(t, rng));
    }
    LtsMorphism::finite(
        LangMatrix::from_fn(t.alphabet().clone(), m, p, |i, j| cells[i * p + j].clone()).expect("same alphabet"),
    )
}

/// Automaton with `n` states and a random accepting set.
pub fn random_automaton<R: Rng>(t: &LtsTheory, n: usize, rng: &mut R) -> NdAutomaton {
    let alpha = random_one_step(t, n, n, rng);
    let accepting = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    NdAutomaton::new(t, alpha, accepting).expect("random one-step endomorphism")
}

/// Random term of type `m ⇸ p` with nesting at most `depth`, over objects of
/// size at most `max_dim`. Fresh generators are inserted into `table`.
pub fn random_term<R: Rng>(
    t: &LtsTheory,
    rng: &mut R,
    m: usize,
    p: usize,
    depth: usize,
    max_dim: usize,
    table: &mut GeneratorTable<LtsMorphism>,
) -> RationalTerm {
    random_term_shape(rng, m, p, depth, max_dim, &mut |rng: &mut R, m, p| {
        let name = format!("g{}", table.len());
        table
            .insert(t, &name, random_one_step(t, m, p, rng))
            .expect("one-step generator");
        RationalTerm::Gen(name)
    })
}

/// Law-suite sampler over objects of size at most `max_dim`.
#[derive(Debug, Clone)]
pub struct LtsSampler {
    pub max_dim: usize,
    /// Nesting depth of the random terms behind regular samples.
    pub depth: usize,
}

impl Default for LtsSampler {
    fn default() -> Self {
        LtsSampler { max_dim: 3, depth: 2 }
    }
}

impl LtsSampler {
    fn random_omega(&self, t: &LtsTheory, rng: &mut ChaCha8Rng) -> OmegaLang {
        let alphabet = t.alphabet().clone();
        match rng.gen_range(0..4) {
            0 => OmegaLang::empty(alphabet),
            1 => OmegaLang::from_tail(random_cell(t, rng)),
            _ => {
                let prefix = random_cell(t, rng);
                let mut period = random_cell(t, rng);
                if period.is_empty() {
                    period = WordLang::letters(alphabet, &[rng.gen_range(0..t.alphabet().len() as Sym)], false)
                        .expect("letter in range");
                }
                let lasso = OmegaLang::omega_power(&period.concat(&random_cell(t, rng).star()).expect("same alphabet"));
                OmegaLang::concat_tail(&prefix, &lasso).expect("same alphabet")
            }
        }
    }
}

impl Sampler<LtsTheory> for LtsSampler {
    fn sample(&self, t: &LtsTheory, rng: &mut ChaCha8Rng, dom: usize, cod: usize, kind: SampleKind) -> LtsMorphism {
        match kind {
            SampleKind::OneStep => random_one_step(t, dom, cod, rng),
            SampleKind::Regular => {
                let mut table = GeneratorTable::new();
                let term = random_term(t, rng, dom, cod, self.depth, self.max_dim, &mut table);
                let f = eval_rational(t, &table, &term).expect("well-typed random term");
                if !rng.gen_bool(0.5) {
                    return f;
                }
                let inf = (0..dom).map(|_| self.random_omega(t, rng)).collect();
                let extra =
                    LtsMorphism::new(LangMatrix::zero(t.alphabet().clone(), dom, cod), inf).expect("matching alphabet");
                t.join(&f, &extra).expect("same shape")
            }
        }
    }

    fn max_dim(&self) -> usize {
        self.max_dim
    }
}
