use super::{LtsMorphism, LtsTheory, NdAutomaton};
use crate::kernel::{eval_rational, eval_rational_nf, GeneratorTable, RationalTerm, Theory, TheoryError, Verdict};
use crate::omega::OmegaLang;

/// Name under which the automaton's transition map enters the generator table.
pub const TRANSITION_GENERATOR: &str = "alpha";

fn point(n: usize, i: usize) -> RationalTerm {
    RationalTerm::Base { map: vec![i], cod: n }
}

/// `f_F` as a cotuple of base rows and empty rows.
fn final_term(accepting: &[bool]) -> RationalTerm {
    let n = accepting.len();
    RationalTerm::Cotuple(
        (0..n)
            .map(|j| {
                if accepting[j] {
                    point(n, j)
                } else {
                    RationalTerm::Empty { dom: 1, cod: n }
                }
            })
            .collect(),
    )
}

fn transition_table(t: &LtsTheory, a: &NdAutomaton) -> Result<GeneratorTable<LtsMorphism>, TheoryError> {
    let mut table = GeneratorTable::new();
    table.insert(t, TRANSITION_GENERATOR, a.alpha().clone())?;
    Ok(table)
}

/// Term `!·f_F·α*·i : 1 ⇸ 1` denoting the finite behaviour of state `i`.
pub fn to_rational(
    t: &LtsTheory,
    a: &NdAutomaton,
    i: usize,
) -> Result<(RationalTerm, GeneratorTable<LtsMorphism>), TheoryError> {
    let n = a.states();
    if n == 0 || i >= n {
        return Err(TheoryError::Type(format!("state {i} of {n}")));
    }
    if a.accepting().len() != n {
        return Err(TheoryError::Type("accepting flags do not match states".into()));
    }
    let table = transition_table(t, a)?;
    let gen = RationalTerm::Gen(TRANSITION_GENERATOR.into());
    let term = RationalTerm::compose(
        RationalTerm::Base {
            map: vec![0; n],
            cod: 1,
        },
        RationalTerm::compose(
            final_term(a.accepting()),
            RationalTerm::compose(RationalTerm::star(gen), point(n, i)),
        ),
    );
    Ok((term, table))
}

/// Terms `r_k = f_F·α⁺·k` for every state `k` and `r = r_i`, so that the
/// ω-behaviour of `i` is `[r₁, …, r_n]^ω·r`.
#[allow(clippy::type_complexity)]
pub fn omega_to_rational(
    t: &LtsTheory,
    a: &NdAutomaton,
    i: usize,
) -> Result<(Vec<RationalTerm>, RationalTerm, GeneratorTable<LtsMorphism>), TheoryError> {
    let n = a.states();
    if i >= n {
        return Err(TheoryError::Type(format!("state {i} of {n}")));
    }
    let table = transition_table(t, a)?;
    let gen = RationalTerm::Gen(TRANSITION_GENERATOR.into());
    let plus = RationalTerm::compose(RationalTerm::star(gen.clone()), gen);
    let step = RationalTerm::compose(final_term(a.accepting()), plus);
    let rs: Vec<RationalTerm> = (0..n)
        .map(|k| RationalTerm::compose(step.clone(), point(n, k)))
        .collect();
    let r = rs[i].clone();
    Ok((rs, r, table))
}

fn eval_row(
    t: &LtsTheory,
    table: &GeneratorTable<LtsMorphism>,
    terms: &[RationalTerm],
) -> Result<LtsMorphism, TheoryError> {
    let parts = terms
        .iter()
        .map(|x| eval_rational(t, table, x))
        .collect::<Result<Vec<_>, _>>()?;
    let m = terms.len();
    for p in &parts {
        if p.dom() != 1 || p.cod() != m {
            return Err(TheoryError::Type(format!(
                "expected 1 -> {m}, got {} -> {}",
                p.dom(),
                p.cod()
            )));
        }
    }
    t.cotuple(&parts)
}

/// `[r₁, …, r_m]^ω·r` for terms `r, r_k : 1 ⇸ m`.
pub fn omega_rational_eval(
    t: &LtsTheory,
    table: &GeneratorTable<LtsMorphism>,
    rs: &[RationalTerm],
    r: &RationalTerm,
) -> Result<OmegaLang, TheoryError> {
    let s = eval_row(t, table, rs)?;
    let r = eval_rational(t, table, r)?;
    if r.dom() != 1 || r.cod() != rs.len() {
        return Err(TheoryError::Type(format!(
            "expected r : 1 -> {}, got {} -> {}",
            rs.len(),
            r.dom(),
            r.cod()
        )));
    }
    Ok(t.compose(&t.omega(&s)?, &r)?.inf()[0].clone())
}

/// `γ = [in₂·s', in₂·s] : m+m ⇸ m+m` with `s' = [r, ⊥]`, so that a run
/// from state 0 takes one `r` step into the second copy and then iterates `s`.
pub fn omega_gamma(t: &LtsTheory, s: &LtsMorphism, r: &LtsMorphism) -> Result<LtsMorphism, TheoryError> {
    let m = crate::kernel::check_endo(t, s, "gamma")?;
    if r.dom() != 1 || r.cod() != m {
        return Err(TheoryError::Type(format!(
            "expected r : 1 -> {m}, got {} -> {}",
            r.dom(),
            r.cod()
        )));
    }
    let s_prime = if m == 1 {
        r.clone()
    } else {
        t.cotuple(&[r.clone(), t.bottom(m - 1, m)])?
    };
    let second = t.injection(1, &[m, m])?;
    t.cotuple(&[t.compose(&second, &s_prime)?, t.compose(&second, s)?])
}

/// Checks that evaluating `to_rational(a, i)` by folding and through normal
/// forms both give the behaviour of `i`, exactly.
pub fn check_kleene_roundtrip(t: &LtsTheory, a: &NdAutomaton, i: usize) -> Result<Verdict, TheoryError> {
    let (term, table) = to_rational(t, a, i)?;
    let behaviour = t.compose(&a.behaviour(t)?, &t.base(&[i], a.states())?)?;
    let direct = eval_rational(t, &table, &term)?;
    if let Verdict::Fails(w) = t.compare(&direct, &behaviour)? {
        return Ok(Verdict::Fails(format!("folded term vs behaviour: {w}")));
    }
    let nf = eval_rational_nf(t, &table, &term)?.denotation(t)?;
    Ok(match t.compare(&nf, &behaviour)? {
        Verdict::Holds => Verdict::Holds,
        Verdict::Fails(w) => Verdict::Fails(format!("normal form vs behaviour: {w}")),
    })
}

/// Checks `γ^ω·1 = [r₁, …, r_m]^ω·r` on bounded lassos.
pub fn check_omega_kleene_roundtrip(
    t: &LtsTheory,
    table: &GeneratorTable<LtsMorphism>,
    rs: &[RationalTerm],
    r: &RationalTerm,
) -> Result<Verdict, TheoryError> {
    let m = rs.len();
    let s = eval_row(t, table, rs)?;
    let r_val = eval_rational(t, table, r)?;
    let gamma = omega_gamma(t, &s, &r_val)?;
    let lhs = t.compose(&t.omega(&gamma)?, &t.base(&[0], 2 * m)?)?;
    let rhs = t.compose(&t.omega(&s)?, &r_val)?;
    Ok(match t.compare(&lhs, &rhs)? {
        Verdict::Holds => Verdict::Holds,
        Verdict::Fails(w) => Verdict::Fails(format!("gamma^w.1 vs [r..]^w.r: {w}")),
    })
}
