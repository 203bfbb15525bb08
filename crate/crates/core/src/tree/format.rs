//! Tree automaton files:
//!
//! ```text
//! tree
//! alphabet s t
//! states 2
//! trans 0 s 0 1    # src symbol left right
//! accept 0
//! ```
//!
//! Regular infinite trees, with symbols resolved against a given alphabet:
//!
//! ```text
//! rtree
//! node 0 s 0 1     # id symbol left right
//! node 1 t 1 1
//! root 0
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{RegularInfTree, TreeAutomaton};
use crate::lts::format::{alphabet_from, err, lines, number};
use crate::lts::FormatError;
use crate::word::{Alphabet, Sym};

fn symbol(line: usize, alphabet: &Alphabet, tok: Option<&str>) -> Result<Sym, FormatError> {
    let tok = tok.ok_or_else(|| err(line, "missing symbol"))?;
    alphabet
        .index(tok)
        .ok_or_else(|| err(line, format!("unknown symbol `{tok}`")))
}

pub fn parse_tree_automaton(text: &str) -> Result<TreeAutomaton, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "tree")) => {}
        Some((line, _)) => return Err(err(line, "expected header `tree`")),
        None => return Err(err(1, "empty input")),
    }
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut states: Option<usize> = None;
    let mut delta = Vec::new();
    let mut accepting = Vec::new();
    let mut last = 1;
    for (line, l) in it {
        last = line;
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("alphabet") => alphabet = Some(alphabet_from(line, toks.by_ref())?),
            Some("states") => states = Some(number(line, toks.next(), "state count")?),
            Some("trans") => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| err(line, "`trans` before `alphabet`"))?;
                let n = states.ok_or_else(|| err(line, "`trans` before `states`"))?;
                let q = number(line, toks.next(), "source")?;
                let s = symbol(line, a, toks.next())?;
                let l = number(line, toks.next(), "left state")?;
                let r = number(line, toks.next(), "right state")?;
                if q >= n || l >= n || r >= n {
                    return Err(err(line, format!("state out of range 0..{n}")));
                }
                delta.push((q, s, l, r));
            }
            Some("accept") => {
                let n = states.ok_or_else(|| err(line, "`accept` before `states`"))?;
                for tok in toks.by_ref() {
                    let q = number(line, Some(tok), "accepting state")?;
                    if q >= n {
                        return Err(err(line, format!("state {q} out of range 0..{n}")));
                    }
                    accepting.push(q);
                }
            }
            Some(other) => return Err(err(line, format!("unknown directive `{other}`"))),
            None => {}
        }
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected `{extra}`")));
        }
    }
    let alphabet = alphabet.ok_or_else(|| err(last, "missing `alphabet`"))?;
    let states = states.ok_or_else(|| err(last, "missing `states`"))?;
    TreeAutomaton::new(alphabet, states, delta, &accepting).map_err(|e| err(last, e.to_string()))
}

pub fn print_tree_automaton(a: &TreeAutomaton) -> String {
    let mut out = String::from("tree\n");
    let _ = writeln!(out, "alphabet {}", a.alphabet().symbols().join(" "));
    let _ = writeln!(out, "states {}", a.states());
    for &(q, s, l, r) in a.delta() {
        let _ = writeln!(out, "trans {q} {} {l} {r}", a.alphabet().name(s));
    }
    let acc: Vec<String> = (0..a.states())
        .filter(|&q| a.accepting()[q])
        .map(|q| q.to_string())
        .collect();
    if !acc.is_empty() {
        let _ = writeln!(out, "accept {}", acc.join(" "));
    }
    out
}

/// Node ids are arbitrary tokens; they are numbered in order of definition.
pub fn parse_rtree(text: &str, alphabet: &Arc<Alphabet>) -> Result<RegularInfTree, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "rtree")) => {}
        Some((line, _)) => return Err(err(line, "expected header `rtree`")),
        None => return Err(err(1, "empty input")),
    }
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut raw: Vec<(usize, Sym, String, String)> = Vec::new();
    let mut root: Option<(usize, String)> = None;
    let mut last = 1;
    for (line, l) in it {
        last = line;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["node", id, sym, left, right] => {
                if ids.insert(id.to_string(), raw.len()).is_some() {
                    return Err(err(line, format!("node `{id}` defined twice")));
                }
                raw.push((
                    line,
                    symbol(line, alphabet, Some(sym))?,
                    left.to_string(),
                    right.to_string(),
                ));
            }
            ["root", id] => root = Some((line, id.to_string())),
            [other, ..] => return Err(err(line, format!("malformed `{other}` line"))),
            [] => {}
        }
    }
    let resolve = |line: usize, id: &str| {
        ids.get(id)
            .copied()
            .ok_or_else(|| err(line, format!("unknown node `{id}`")))
    };
    let nodes = raw
        .iter()
        .map(|(line, s, l, r)| Ok((*s, resolve(*line, l)?, resolve(*line, r)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let (line, root) = root.ok_or_else(|| err(last, "missing `root`"))?;
    let root = resolve(line, &root)?;
    RegularInfTree::new(alphabet.clone(), nodes, root).map_err(|e| err(last, e.to_string()))
}

pub fn print_rtree(t: &RegularInfTree) -> String {
    let mut out = String::from("rtree\n");
    for v in 0..t.len() {
        let (l, r) = t.children(v);
        let _ = writeln!(out, "node {v} {} {l} {r}", t.alphabet().name(t.label(v)));
    }
    let _ = writeln!(out, "root {}", t.root());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_automaton_round_trip() {
        let text = "tree\nalphabet s t\nstates 2\ntrans 0 s 0 1\ntrans 1 t 1 1\naccept 0 1\n";
        let a = parse_tree_automaton(text).unwrap();
        assert_eq!(print_tree_automaton(&a), text);
        assert_eq!(parse_tree_automaton(&print_tree_automaton(&a)).unwrap(), a);
    }

    #[test]
    fn rtree_round_trip_and_errors() {
        let alphabet = Arc::new(Alphabet::new(["s", "t"]).unwrap());
        let t = parse_rtree("rtree\nnode a s a b\nnode b t b b\nroot a\n", &alphabet).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(parse_rtree(&print_rtree(&t), &alphabet).unwrap(), t);
        let e = parse_rtree("rtree\nnode a s a c\nroot a\n", &alphabet).unwrap_err();
        assert_eq!(e.to_string(), "line 2: unknown node `c`");
        assert!(parse_tree_automaton("tree\nalphabet s\nstates 1\ntrans 0 s 0 3\n").is_err());
    }
}
