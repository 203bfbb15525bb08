use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{FiniteTree, RegularInfTree, TreeAutomaton, TreeMorphism, TreeTheory};
use crate::kernel::{eval_rational, random_term_shape, GeneratorTable, RationalTerm, SampleKind, Sampler};
use crate::word::Sym;

const BARE_DENSITY: f64 = 0.15;
/// Expected number of forks per entry, spread over all `(a, j, k)`.
const FORKS_PER_ENTRY: f64 = 1.2;

/// One-step arrow `m ⇸ p`: each entry gets random bare leaves and forks `a(j, k)`.
pub fn random_one_step_tree<R: Rng>(t: &TreeTheory, m: usize, p: usize, rng: &mut R) -> TreeMorphism {
    let symbols = t.alphabet().len();
    let fork_p = (FORKS_PER_ENTRY / (symbols * p * p).max(1) as f64).min(1.0);
    let rows: Vec<Vec<FiniteTree>> = (0..m)
        .map(|_| {
            let mut row = Vec::new();
            for j in 0..p {
                if rng.gen_bool(BARE_DENSITY) {
                    row.push(FiniteTree::Var(j));
                }
            }
            for a in 0..symbols as Sym {
                for j in 0..p {
                    for k in 0..p {
                        if rng.gen_bool(fork_p) {
                            row.push(FiniteTree::node(a, FiniteTree::Var(j), FiniteTree::Var(k)));
                        }
                    }
                }
            }
            row
        })
        .collect();
    TreeMorphism::from_trees(t.alphabet().clone(), p, &rows).expect("leaves in range")
}

/// Automaton with `n` states, about `1.5` transitions per state and letter,
/// and a random accepting set.
pub fn random_tree_automaton<R: Rng>(t: &TreeTheory, n: usize, rng: &mut R) -> TreeAutomaton {
    let density = (1.5 / (n * n) as f64).min(1.0);
    let mut delta = Vec::new();
    for q in 0..n {
        for a in 0..t.alphabet().len() as Sym {
            for l in 0..n {
                for r in 0..n {
                    if rng.gen_bool(density) {
                        delta.push((q, a, l, r));
                    }
                }
            }
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    TreeAutomaton::new(t.alphabet().clone(), n, delta, &accepting).expect("indices in range")
}

/// Regular infinite tree with `nodes` graph nodes, rooted at node 0.
pub fn random_regular_tree<R: Rng>(t: &TreeTheory, nodes: usize, rng: &mut R) -> RegularInfTree {
    let symbols = t.alphabet().len() as Sym;
    let graph = (0..nodes)
        .map(|_| {
            (
                rng.gen_range(0..symbols),
                rng.gen_range(0..nodes),
                rng.gen_range(0..nodes),
            )
        })
        .collect();
    RegularInfTree::new(t.alphabet().clone(), graph, 0).expect("nodes in range")
}

/// Random term `m ⇸ p` over fresh one-step generators inserted into `table`.
pub fn random_tree_term<R: Rng>(
    t: &TreeTheory,
    rng: &mut R,
    m: usize,
    p: usize,
    depth: usize,
    max_dim: usize,
    table: &mut GeneratorTable<TreeMorphism>,
) -> RationalTerm {
    random_term_shape(rng, m, p, depth, max_dim, &mut |rng: &mut R, m, p| {
        let name = format!("g{}", table.len());
        table
            .insert(t, &name, random_one_step_tree(t, m, p, rng))
            .expect("one-step generator");
        RationalTerm::Gen(name)
    })
}

/// Law-suite sampler for the tree instance.
#[derive(Debug, Clone)]
pub struct TreeSampler {
    pub max_dim: usize,
    pub depth: usize,
}

impl Default for TreeSampler {
    fn default() -> Self {
        TreeSampler { max_dim: 3, depth: 2 }
    }
}

impl Sampler<TreeTheory> for TreeSampler {
    fn sample(&self, t: &TreeTheory, rng: &mut ChaCha8Rng, dom: usize, cod: usize, kind: SampleKind) -> TreeMorphism {
        match kind {
            SampleKind::OneStep => random_one_step_tree(t, dom, cod, rng),
            SampleKind::Regular => {
                let mut table = GeneratorTable::new();
                let term = random_tree_term(t, rng, dom, cod, self.depth, self.max_dim, &mut table);
                eval_rational(t, &table, &term).expect("well-typed random term")
            }
        }
    }

    fn max_dim(&self) -> usize {
        self.max_dim
    }
}
