//! The probabilistic instance, restricted to DFA-tracked test functions.
//!
//! An arrow `m ⇸ p` is kept symbolically and evaluated against a test
//! table: a DFA, values `h(y, q)` for the finite summand and `v(q)` for the
//! `Σ^ω` summand. The test at DFA state `q` sends `(σ, y)` to
//! `h(y, δ(q, σ))`. Evaluation yields the value of every source state at
//! every DFA state. Two arrows are equal when they agree within the
//! instance tolerance on a fixed battery of tables.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ProbAutomaton;
use crate::kernel::{bang, check_endo, final_map, plus, Theory, TheoryError, Verdict};
use crate::word::{Alphabet, Dfa, Sym};

/// Comparator tolerance.
pub const COMPARE_TOL: f64 = 1e-6;
/// Stopping residual for the star and omega iterations.
pub const EVAL_TOL: f64 = 1e-12;

#[derive(Debug)]
enum Node {
    /// Subdistribution per source: weights on `(a, y)` plus `inf` on `Σ^ω`.
    Step {
        rows: Vec<Vec<(Sym, usize, f64)>>,
        inf: Vec<f64>,
    },
    Base(Vec<usize>),
    Bottom,
    Top,
    Cotuple(Vec<ProbArrow>),
    Compose(ProbArrow, ProbArrow),
    Join(ProbArrow, ProbArrow),
    Star(ProbArrow),
    Omega(ProbArrow),
}

#[derive(Clone)]
pub struct ProbArrow {
    dom: usize,
    cod: usize,
    node: Arc<Node>,
}

impl ProbArrow {
    fn new(dom: usize, cod: usize, node: Node) -> Self {
        ProbArrow {
            dom,
            cod,
            node: Arc::new(node),
        }
    }

    /// One-step arrow `rows.len() ⇸ cod`. Each row's weights plus its `inf`
    /// mass must not exceed one.
    pub fn step(
        symbols: usize,
        cod: usize,
        rows: Vec<Vec<(Sym, usize, f64)>>,
        inf: Vec<f64>,
    ) -> Result<Self, TheoryError> {
        if inf.len() != rows.len() {
            return Err(TheoryError::Type(format!(
                "{} ω-masses for {} rows",
                inf.len(),
                rows.len()
            )));
        }
        for (x, row) in rows.iter().enumerate() {
            let mut total = inf[x];
            for &(a, y, w) in row {
                if a as usize >= symbols || y >= cod || !(0.0..=1.0).contains(&w) {
                    return Err(TheoryError::Type(format!("bad step entry ({a}, {y}, {w}) in row {x}")));
                }
                total += w;
            }
            if !(0.0..=1.0 + super::STOCHASTIC_SLACK).contains(&inf[x]) || total > 1.0 + super::STOCHASTIC_SLACK {
                return Err(TheoryError::Type(format!("row {x} has mass {total} above one")));
            }
        }
        Ok(ProbArrow::new(rows.len(), cod, Node::Step { rows, inf }))
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    /// Built from base maps and bottoms only.
    fn is_plain(&self) -> bool {
        match &*self.node {
            Node::Base(_) | Node::Bottom => true,
            Node::Cotuple(ps) => ps.iter().all(ProbArrow::is_plain),
            Node::Join(f, g) | Node::Compose(f, g) => f.is_plain() && g.is_plain(),
            _ => false,
        }
    }

    fn is_one_step(&self) -> bool {
        match &*self.node {
            Node::Step { .. } => true,
            Node::Cotuple(ps) => ps.iter().all(ProbArrow::is_one_step),
            Node::Join(f, g) => f.is_one_step() && g.is_one_step(),
            Node::Compose(g, f) => (g.is_plain() && f.is_one_step()) || (g.is_one_step() && f.is_plain()),
            _ => self.is_plain(),
        }
    }
}

impl fmt::Debug for ProbArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Step { rows, inf } => {
                write!(f, "step{}->{}[", self.dom, self.cod)?;
                for (x, row) in rows.iter().enumerate() {
                    if x > 0 {
                        write!(f, "; ")?;
                    }
                    let cells: Vec<String> = row.iter().map(|(a, y, w)| format!("{w:.3}:{a}>{y}")).collect();
                    write!(f, "{}", cells.join(" "))?;
                    if inf[x] > 0.0 {
                        write!(f, " {:.3}:w", inf[x])?;
                    }
                }
                write!(f, "]")
            }
            Node::Base(map) => write!(f, "b({:?};{})", map, self.cod),
            Node::Bottom => write!(f, "empty({},{})", self.dom, self.cod),
            Node::Top => write!(f, "top({})", self.dom),
            Node::Cotuple(ps) => {
                write!(f, "[")?;
                for (k, p) in ps.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p:?}")?;
                }
                write!(f, "]")
            }
            Node::Compose(g, h) => write!(f, "({g:?} . {h:?})"),
            Node::Join(g, h) => write!(f, "({g:?} + {h:?})"),
            Node::Star(a) => write!(f, "({a:?})*"),
            Node::Omega(a) => write!(f, "({a:?})^w"),
        }
    }
}

/// A test function tracked by `dfa`: `h[y * |Q| + q]` on the finite summand
/// and `v[q]` on the `Σ^ω` summand.
#[derive(Debug, Clone, PartialEq)]
pub struct TestTable {
    pub dfa: Dfa,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

impl TestTable {
    /// `χ_Λ` on the single target object of a behaviour, with `v` on `Σ^ω`.
    pub fn characteristic(dfa: &Dfa, v: Vec<f64>) -> Self {
        let h = (0..dfa.states())
            .map(|q| if dfa.is_accepting(q) { 1.0 } else { 0.0 })
            .collect();
        TestTable { dfa: dfa.clone(), h, v }
    }
}

/// The probabilistic instance over a fixed alphabet.
#[derive(Debug, Clone)]
pub struct ProbTheory {
    alphabet: Arc<Alphabet>,
    dfas: Vec<Dfa>,
    tol: f64,
    max_iter: usize,
}

/// Random tables per DFA and codomain in the comparator battery.
const RANDOM_TABLES: usize = 3;

impl ProbTheory {
    /// Compares against the trivial DFA, the parity of the first symbol and
    /// "last symbol was the first symbol".
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len() as Sym;
        let all: Vec<(usize, Sym, usize)> = (0..k).map(|a| (0, a, 0)).collect();
        let parity: Vec<(usize, Sym, usize)> = (0..2)
            .flat_map(|q| (0..k).map(move |a| (q, a, if a == 0 { 1 - q } else { q })))
            .collect();
        let last: Vec<(usize, Sym, usize)> = (0..2)
            .flat_map(|q| (0..k).map(move |a| (q, a, usize::from(a == 0))))
            .collect();
        let dfas = vec![
            Dfa::from_table(&alphabet, 1, 0, &all, &[0]).expect("total"),
            Dfa::from_table(&alphabet, 2, 0, &parity, &[0]).expect("total"),
            Dfa::from_table(&alphabet, 2, 0, &last, &[1]).expect("total"),
        ];
        ProbTheory {
            alphabet,
            dfas,
            tol: COMPARE_TOL,
            max_iter: super::DEFAULT_MAX_ITER,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `α̂ : X ⇸ X`, placing no mass on `Σ^ω`.
    pub fn alpha_hat(&self, a: &ProbAutomaton) -> ProbArrow {
        let n = a.states();
        ProbArrow::new(
            n,
            n,
            Node::Step {
                rows: (0..n).map(|x| a.moves(x).to_vec()).collect(),
                inf: vec![0.0; n],
            },
        )
    }

    /// `‖α̂,𝔉‖ = !·f_𝔉·α̂*`.
    pub fn behaviour(&self, a: &ProbAutomaton) -> Result<ProbArrow, TheoryError> {
        let n = a.states();
        let f = final_map(self, n, a.accepting())?;
        self.compose(&bang(self, n), &self.compose(&f, &self.star(&self.alpha_hat(a))?)?)
    }

    /// `‖α̂,𝔉‖_ω = (f_𝔉·α̂⁺)^ω`.
    pub fn omega_behaviour(&self, a: &ProbAutomaton) -> Result<ProbArrow, TheoryError> {
        let f = final_map(self, a.states(), a.accepting())?;
        self.omega(&self.compose(&f, &plus(self, &self.alpha_hat(a))?)?)
    }

    /// Value of every source state at every DFA state, laid out like `h`.
    pub fn evaluate(&self, f: &ProbArrow, table: &TestTable) -> Result<Vec<f64>, TheoryError> {
        let nq = table.dfa.states();
        if table.h.len() != f.cod * nq || table.v.len() != nq {
            return Err(TheoryError::Type(format!(
                "test table of {} + {} values for codomain {} and {nq} DFA states",
                table.h.len(),
                table.v.len(),
                f.cod
            )));
        }
        self.eval(f, &table.dfa, &table.h, &table.v)
    }

    fn eval(&self, f: &ProbArrow, dfa: &Dfa, h: &[f64], v: &[f64]) -> Result<Vec<f64>, TheoryError> {
        let nq = dfa.states();
        Ok(match &*f.node {
            Node::Step { rows, inf } => {
                let mut out = vec![0.0; f.dom * nq];
                for (x, row) in rows.iter().enumerate() {
                    for q in 0..nq {
                        let mut s = inf[x] * v[q];
                        for &(a, y, w) in row {
                            s += w * h[y * nq + dfa.next(q, a)];
                        }
                        out[x * nq + q] = s;
                    }
                }
                out
            }
            Node::Base(map) => map
                .iter()
                .flat_map(|&y| h[y * nq..(y + 1) * nq].iter().copied())
                .collect(),
            Node::Bottom => vec![0.0; f.dom * nq],
            Node::Top => vec![1.0; f.dom * nq],
            Node::Cotuple(parts) => {
                let mut out = Vec::with_capacity(f.dom * nq);
                for p in parts {
                    out.extend(self.eval(p, dfa, h, v)?);
                }
                out
            }
            Node::Compose(g, k) => {
                let mid = self.eval(g, dfa, h, v)?;
                self.eval(k, dfa, &mid, v)?
            }
            Node::Join(g, k) => {
                let l = self.eval(g, dfa, h, v)?;
                let r = self.eval(k, dfa, h, v)?;
                l.iter().zip(&r).map(|(a, b)| a.max(*b)).collect()
            }
            Node::Star(a) => {
                let mut cur = h.to_vec();
                for _ in 0..self.max_iter {
                    let step = self.eval(a, dfa, &cur, v)?;
                    let next: Vec<f64> = h.iter().zip(&step).map(|(a, b)| a.max(*b)).collect();
                    let residual = sup_distance(&next, &cur);
                    cur = next;
                    if residual < EVAL_TOL {
                        return Ok(cur);
                    }
                }
                return Err(TheoryError::NoFixpoint { rounds: self.max_iter });
            }
            Node::Omega(b) => {
                let mut cur = vec![1.0; f.dom * nq];
                for _ in 0..self.max_iter {
                    let next = self.eval(b, dfa, &cur, v)?;
                    let residual = sup_distance(&next, &cur);
                    cur = next;
                    if residual < EVAL_TOL {
                        return Ok(cur);
                    }
                }
                return Err(TheoryError::NoFixpoint { rounds: self.max_iter });
            }
        })
    }

    /// The comparator battery for arrows into `cod`.
    fn tables(&self, cod: usize) -> Vec<TestTable> {
        let mut out = Vec::new();
        for (d, dfa) in self.dfas.iter().enumerate() {
            let nq = dfa.states();
            let mut rng = ChaCha8Rng::seed_from_u64(((cod as u64) << 8) | d as u64);
            out.push(TestTable {
                dfa: dfa.clone(),
                h: vec![1.0; cod * nq],
                v: vec![1.0; nq],
            });
            out.push(TestTable {
                dfa: dfa.clone(),
                h: vec![0.0; cod * nq],
                v: vec![0.0; nq],
            });
            for _ in 0..RANDOM_TABLES {
                out.push(TestTable {
                    dfa: dfa.clone(),
                    h: (0..cod * nq).map(|_| rng.gen()).collect(),
                    v: (0..nq).map(|_| rng.gen()).collect(),
                });
            }
        }
        out
    }

    fn check_same_type(&self, f: &ProbArrow, g: &ProbArrow) -> Result<(), TheoryError> {
        if (f.dom, f.cod) != (g.dom, g.cod) {
            return Err(TheoryError::Type(format!(
                "comparing {} -> {} with {} -> {}",
                f.dom, f.cod, g.dom, g.cod
            )));
        }
        Ok(())
    }

    /// First table entry where `bad(lhs, rhs)` holds.
    fn find(&self, f: &ProbArrow, g: &ProbArrow, bad: impl Fn(f64, f64) -> bool) -> Result<Verdict, TheoryError> {
        self.check_same_type(f, g)?;
        for (k, table) in self.tables(f.cod).iter().enumerate() {
            let l = self.eval(f, &table.dfa, &table.h, &table.v)?;
            let r = self.eval(g, &table.dfa, &table.h, &table.v)?;
            let nq = table.dfa.states();
            if let Some(i) = (0..l.len()).find(|&i| bad(l[i], r[i])) {
                return Ok(Verdict::Fails(format!(
                    "table {k}, state {} at DFA state {}: {} vs {}",
                    i / nq,
                    i % nq,
                    l[i],
                    r[i]
                )));
            }
        }
        Ok(Verdict::Holds)
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl Theory for ProbTheory {
    type Arrow = ProbArrow;

    fn dom(&self, f: &ProbArrow) -> usize {
        f.dom
    }

    fn cod(&self, f: &ProbArrow) -> usize {
        f.cod
    }

    fn compose(&self, g: &ProbArrow, f: &ProbArrow) -> Result<ProbArrow, TheoryError> {
        if g.dom != f.cod {
            return Err(TheoryError::Type(format!(
                "composing {} -> {} after {} -> {}",
                g.dom, g.cod, f.dom, f.cod
            )));
        }
        Ok(ProbArrow::new(f.dom, g.cod, Node::Compose(g.clone(), f.clone())))
    }

    fn join(&self, f: &ProbArrow, g: &ProbArrow) -> Result<ProbArrow, TheoryError> {
        self.check_same_type(f, g)?;
        Ok(ProbArrow::new(f.dom, f.cod, Node::Join(f.clone(), g.clone())))
    }

    fn bottom(&self, m: usize, p: usize) -> ProbArrow {
        ProbArrow::new(m, p, Node::Bottom)
    }

    fn base(&self, map: &[usize], p: usize) -> Result<ProbArrow, TheoryError> {
        if let Some(&bad) = map.iter().find(|&&j| j >= p) {
            return Err(TheoryError::Type(format!("base map target {bad} out of range {p}")));
        }
        Ok(ProbArrow::new(map.len(), p, Node::Base(map.to_vec())))
    }

    fn cotuple(&self, parts: &[ProbArrow]) -> Result<ProbArrow, TheoryError> {
        let first = parts
            .first()
            .ok_or_else(|| TheoryError::Type("cotuple of no arrows".into()))?;
        if let Some(p) = parts.iter().find(|p| p.cod != first.cod) {
            return Err(TheoryError::Type(format!(
                "cotuple parts into {} and {}",
                first.cod, p.cod
            )));
        }
        let dom = parts.iter().map(|p| p.dom).sum();
        Ok(ProbArrow::new(dom, first.cod, Node::Cotuple(parts.to_vec())))
    }

    fn compare(&self, f: &ProbArrow, g: &ProbArrow) -> Result<Verdict, TheoryError> {
        let tol = self.tol;
        self.find(f, g, |a, b| (a - b).abs() > tol)
    }

    fn compare_leq(&self, f: &ProbArrow, g: &ProbArrow) -> Result<Verdict, TheoryError> {
        let tol = self.tol;
        self.find(f, g, |a, b| a > b + tol)
    }

    fn is_one_step(&self, f: &ProbArrow) -> bool {
        f.is_one_step()
    }

    fn star(&self, alpha: &ProbArrow) -> Result<ProbArrow, TheoryError> {
        let n = check_endo(self, alpha, "star")?;
        Ok(ProbArrow::new(n, n, Node::Star(alpha.clone())))
    }

    fn top(&self, n: usize) -> Option<ProbArrow> {
        Some(ProbArrow::new(n, 0, Node::Top))
    }

    fn omega(&self, beta: &ProbArrow) -> Result<ProbArrow, TheoryError> {
        let n = check_endo(self, beta, "omega")?;
        Ok(ProbArrow::new(n, 0, Node::Omega(beta.clone())))
    }

    /// Compares `α*` with `(id ∨ α)^(2^k)`, built by repeated squaring,
    /// for growing `k`.
    fn star_is_join_of_powers(&self, alpha: &ProbArrow, star: &ProbArrow) -> Result<Verdict, TheoryError> {
        let n = check_endo(self, alpha, "star")?;
        let mut power = self.join(&self.identity(n), alpha)?;
        let mut last = Verdict::Holds;
        for _ in 0..16 {
            last = self.compare(star, &power)?;
            if last.holds() {
                return Ok(last);
            }
            power = self.compose(&power, &power)?;
        }
        Ok(last)
    }

    fn describe(&self, f: &ProbArrow) -> String {
        format!("{f:?}")
    }
}
