use std::collections::VecDeque;

use super::game::{BuchiGame, EpsTreeAutomaton};
use super::morphism::BottomUp;
use super::{RegularInfTree, TreeAutomaton, TreeError, TreeMorphism, TreeTheory};
use crate::kernel::{eval_rational, eval_rational_nf, omega_automaton, GeneratorTable, RationalTerm, Theory, Verdict};
use crate::word::Sym;

/// Height-≤1 content of a one-step arrow `n ⇸ m`: bare leaves `(i, j)` and
/// forks `(i, a, j, k)` for `a(j, k)`.
#[allow(clippy::type_complexity)]
pub fn one_step_table(
    t: &TreeTheory,
    f: &TreeMorphism,
) -> Result<(Vec<(usize, usize)>, Vec<(usize, Sym, usize, usize)>), TreeError> {
    if !t.is_one_step(f) {
        return Err(TreeError::Malformed("arrow generates trees of height above 1".into()));
    }
    let eval = BottomUp::new(f);
    let leaves: Vec<_> = (0..f.cod()).map(|j| eval.leaf(j)).collect();
    let mut bare = Vec::new();
    let mut forks = Vec::new();
    for (i, &e) in f.entries().iter().enumerate() {
        for (j, set) in leaves.iter().enumerate() {
            if set[e as usize] {
                bare.push((i, j));
            }
        }
    }
    for a in 0..t.alphabet().len() as Sym {
        for (j, lj) in leaves.iter().enumerate() {
            for (k, lk) in leaves.iter().enumerate() {
                let s = eval.step(a, lj, lk);
                for (i, &e) in f.entries().iter().enumerate() {
                    if s[e as usize] {
                        forks.push((i, a, j, k));
                    }
                }
            }
        }
    }
    Ok((bare, forks))
}

/// Removes ε-moves. State `(q, b)` becomes `2q + b`, where `b` records an
/// accepting state met on the ε-path into the current node; an ε-cycle
/// through an accepting state leads to a universal accepting sink.
fn eliminate_eps(a: &EpsTreeAutomaton, t: &TreeTheory) -> Result<TreeAutomaton, TreeError> {
    let n = a.states;
    let mut eps: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(p, q) in &a.eps {
        eps[p as usize].push(q as usize);
    }
    // (q', c) reachable from (q, false) through at least zero ε-moves.
    let closure = |q: usize| -> Vec<(usize, bool)> {
        let mut seen = vec![[false; 2]; n];
        let mut queue = VecDeque::from([(q, false)]);
        seen[q][0] = true;
        while let Some((p, c)) = queue.pop_front() {
            for &p2 in &eps[p] {
                let c2 = c || a.accepting[p2];
                if !seen[p2][c2 as usize] {
                    seen[p2][c2 as usize] = true;
                    queue.push_back((p2, c2));
                }
            }
        }
        (0..n)
            .flat_map(|p| [(p, false), (p, true)])
            .filter(|&(p, c)| seen[p][c as usize])
            .collect()
    };
    // States on an ε-cycle that passes an accepting state.
    let on_good_cycle: Vec<bool> = (0..n).map(|q| closure(q).contains(&(q, true))).collect();
    let univ = 2 * n;
    let symbols = t.alphabet().len() as Sym;
    let mut delta = Vec::new();
    let mut by_state: Vec<Vec<(Sym, usize, usize)>> = vec![Vec::new(); n];
    for &(q, s, l, r) in &a.trans {
        by_state[q as usize].push((s, l as usize, r as usize));
    }
    for q in 0..n {
        let reach = closure(q);
        let universal = reach.iter().any(|&(p, _)| on_good_cycle[p]);
        for b in 0..2 {
            let src = 2 * q + b;
            for &(p, c) in &reach {
                for &(s, l, r) in &by_state[p] {
                    delta.push((src, s, 2 * l + c as usize, 2 * r + c as usize));
                }
            }
            if universal {
                delta.extend((0..symbols).map(|s| (src, s, univ, univ)));
            }
        }
    }
    delta.extend((0..symbols).map(|s| (univ, s, univ, univ)));
    let accepting: Vec<usize> = (0..n)
        .flat_map(|q| {
            let acc = a.accepting[q];
            [(2 * q, acc), (2 * q + 1, true)]
        })
        .filter(|&(_, acc)| acc)
        .map(|(s, _)| s)
        .chain([univ])
        .collect();
    TreeAutomaton::new(t.alphabet().clone(), 2 * n + 1, delta, &accepting)
}

/// `γ = [in₂·s', in₂·s]` with `s = [r₁, …, r_m]` and `s' = [r, ⊥]`.
fn gamma_term(rs: &[RationalTerm], r: &RationalTerm) -> RationalTerm {
    let m = rs.len();
    let s_prime = if m == 1 {
        r.clone()
    } else {
        RationalTerm::Cotuple(vec![r.clone(), RationalTerm::Empty { dom: m - 1, cod: m }])
    };
    let second = || RationalTerm::Injection {
        block: 1,
        sizes: vec![m, m],
    };
    RationalTerm::Cotuple(vec![
        RationalTerm::compose(second(), s_prime),
        RationalTerm::compose(second(), RationalTerm::Cotuple(rs.to_vec())),
    ])
}

/// Automaton for `γ^ω·1`, read off the normal form of `γ`, and its start state.
pub fn omega_tree_automaton(
    t: &TreeTheory,
    table: &GeneratorTable<TreeMorphism>,
    rs: &[RationalTerm],
    r: &RationalTerm,
) -> Result<(TreeAutomaton, usize), TreeError> {
    if rs.is_empty() {
        return Err(TreeError::Malformed("empty row of terms".into()));
    }
    let nf = eval_rational_nf(t, table, &gamma_term(rs, r))?;
    let (xi, finals) = omega_automaton(t, &nf)?;
    let (bare, forks) = one_step_table(t, &xi)?;
    let eps_automaton = EpsTreeAutomaton {
        states: xi.dom(),
        trans: forks
            .iter()
            .map(|&(i, a, j, k)| (i as u32, a, j as u32, k as u32))
            .collect(),
        eps: bare.iter().map(|&(i, j)| (i as u32, j as u32)).collect(),
        accepting: finals,
    };
    Ok((eliminate_eps(&eps_automaton, t)?, 0))
}

/// Membership of `tree` in `[r₁, …, r_m]^ω·r` by a game played directly on
/// the folded arrows: `r` exits into hub states, each hub `j` continues with
/// entry `j` of the row, whose exits return to the hubs. Automaton wins when
/// every branch passes hubs infinitely often.
pub fn hub_game_member(
    t: &TreeTheory,
    table: &GeneratorTable<TreeMorphism>,
    rs: &[RationalTerm],
    r: &RationalTerm,
    tree: &RegularInfTree,
) -> Result<bool, TreeError> {
    let m = rs.len();
    let parts = rs
        .iter()
        .map(|x| eval_rational(t, table, x))
        .collect::<Result<Vec<_>, _>>()?;
    let s = t.cotuple(&parts)?;
    let r = eval_rational(t, table, r)?;
    if s.dom() != m || s.cod() != m || r.dom() != 1 || r.cod() != m {
        return Err(TreeError::Malformed(format!("expected a row of 1 -> {m} terms")));
    }
    let off_r = m as u32;
    let off_s = off_r + r.states() as u32;
    let states = off_s as usize + s.states();
    let mut trans = Vec::new();
    let mut eps = Vec::new();
    for (f, off) in [(&r, off_r), (&s, off_s)] {
        trans.extend(
            f.transitions()
                .iter()
                .map(|&(q, a, l, rr)| (q + off, a, l + off, rr + off)),
        );
        eps.extend(f.eps_moves().iter().map(|&(p, q)| (p + off, q + off)));
        eps.extend(f.exits().iter().map(|&(q, j)| (q + off, j as u32)));
    }
    eps.extend(s.entries().iter().enumerate().map(|(j, &e)| (j as u32, e + off_s)));
    let a = EpsTreeAutomaton {
        states,
        trans,
        eps,
        accepting: (0..states).map(|q| q < m).collect(),
    };
    let (game, start) = BuchiGame::build(&a, tree, (r.entries()[0] + off_r) as usize)?;
    Ok(game.solve().winning[start])
}

/// Compares the two routes to `[r₁, …, r_m]^ω·r` on the given trees.
pub fn check_tree_omega_roundtrip(
    t: &TreeTheory,
    table: &GeneratorTable<TreeMorphism>,
    rs: &[RationalTerm],
    r: &RationalTerm,
    trees: &[RegularInfTree],
) -> Result<Verdict, TreeError> {
    let (a, start) = omega_tree_automaton(t, table, rs, r)?;
    for (k, tree) in trees.iter().enumerate() {
        let via_gamma = super::buchi_tree_member(&a, start, tree)?;
        let direct = hub_game_member(t, table, rs, r, tree)?;
        if via_gamma != direct {
            return Ok(Verdict::Fails(format!(
                "tree {k}: gamma automaton says {via_gamma}, hub game says {direct}"
            )));
        }
    }
    Ok(Verdict::Holds)
}
