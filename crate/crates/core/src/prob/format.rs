//! Probabilistic automaton files:
//!
//! ```text
//! pa
//! alphabet 0 1
//! states 2
//! trans 0 0 0 0.5    # src symbol dst probability
//! trans 0 1 1 0.5
//! accept 1
//! ```
//!
//! Test-language DFA files use the same transition syntax without the
//! probability and must be total. `initial` defaults to state 0.
//!
//! ```text
//! dfa
//! alphabet 0 1
//! states 2
//! initial 0
//! trans 0 0 0
//! accept 1
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use super::{ProbAutomaton, TestLanguage};
use crate::lts::format::{alphabet_from, err, lines, number};
use crate::lts::FormatError;
use crate::word::{Alphabet, Dfa, Sym};

fn symbol(line: usize, alphabet: &Alphabet, tok: Option<&str>) -> Result<Sym, FormatError> {
    let tok = tok.ok_or_else(|| err(line, "missing symbol"))?;
    alphabet
        .index(tok)
        .ok_or_else(|| err(line, format!("unknown symbol `{tok}`")))
}

/// Fields shared by both formats; `trans` carries an optional probability.
struct Raw {
    alphabet: Arc<Alphabet>,
    states: usize,
    initial: Option<usize>,
    trans: Vec<(usize, Sym, usize, Option<f64>)>,
    accepting: Vec<usize>,
    last: usize,
}

fn parse_raw(text: &str, header: &str, weighted: bool) -> Result<Raw, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, h)) if h == header => {}
        Some((line, _)) => return Err(err(line, format!("expected header `{header}`"))),
        None => return Err(err(1, "empty input")),
    }
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut states: Option<usize> = None;
    let mut initial = None;
    let mut trans = Vec::new();
    let mut accepting = Vec::new();
    let mut last = 1;
    let in_range = |line: usize, n: usize, q: usize| {
        if q >= n {
            Err(err(line, format!("state {q} out of range 0..{n}")))
        } else {
            Ok(q)
        }
    };
    for (line, l) in it {
        last = line;
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("alphabet") => alphabet = Some(alphabet_from(line, toks.by_ref())?),
            Some("states") => states = Some(number(line, toks.next(), "state count")?),
            Some("initial") if !weighted => {
                let n = states.ok_or_else(|| err(line, "`initial` before `states`"))?;
                initial = Some(in_range(line, n, number(line, toks.next(), "initial state")?)?);
            }
            Some("trans") => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| err(line, "`trans` before `alphabet`"))?;
                let n = states.ok_or_else(|| err(line, "`trans` before `states`"))?;
                let src = in_range(line, n, number(line, toks.next(), "source")?)?;
                let s = symbol(line, a, toks.next())?;
                let dst = in_range(line, n, number(line, toks.next(), "target")?)?;
                let p = if weighted {
                    let tok = toks.next().ok_or_else(|| err(line, "missing probability"))?;
                    Some(
                        tok.parse::<f64>()
                            .map_err(|_| err(line, format!("invalid probability `{tok}`")))?,
                    )
                } else {
                    None
                };
                trans.push((src, s, dst, p));
            }
            Some("accept") => {
                let n = states.ok_or_else(|| err(line, "`accept` before `states`"))?;
                for tok in toks.by_ref() {
                    accepting.push(in_range(line, n, number(line, Some(tok), "accepting state")?)?);
                }
            }
            Some(other) => return Err(err(line, format!("unknown directive `{other}`"))),
            None => {}
        }
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected `{extra}`")));
        }
    }
    Ok(Raw {
        alphabet: alphabet.ok_or_else(|| err(last, "missing `alphabet`"))?,
        states: states.ok_or_else(|| err(last, "missing `states`"))?,
        initial,
        trans,
        accepting,
        last,
    })
}

pub fn parse_pa(text: &str) -> Result<ProbAutomaton, FormatError> {
    let raw = parse_raw(text, "pa", true)?;
    let trans: Vec<(usize, Sym, usize, f64)> = raw
        .trans
        .iter()
        .map(|&(x, a, y, p)| (x, a, y, p.expect("weighted")))
        .collect();
    ProbAutomaton::new(raw.alphabet, raw.states, &trans, &raw.accepting).map_err(|e| err(raw.last, e.to_string()))
}

pub fn print_pa(a: &ProbAutomaton) -> String {
    let mut out = String::from("pa\n");
    let _ = writeln!(out, "alphabet {}", a.alphabet().symbols().join(" "));
    let _ = writeln!(out, "states {}", a.states());
    for (x, s, y, p) in a.transitions() {
        let _ = writeln!(out, "trans {x} {} {y} {p}", a.alphabet().name(s));
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

pub fn parse_dfa(text: &str) -> Result<TestLanguage, FormatError> {
    let raw = parse_raw(text, "dfa", false)?;
    let trans: Vec<(usize, Sym, usize)> = raw.trans.iter().map(|&(q, a, r, _)| (q, a, r)).collect();
    let dfa = Dfa::from_table(
        &raw.alphabet,
        raw.states,
        raw.initial.unwrap_or(0),
        &trans,
        &raw.accepting,
    )
    .map_err(|e| err(raw.last, e.to_string()))?;
    TestLanguage::from_dfa(raw.alphabet, dfa).map_err(|e| err(raw.last, e.to_string()))
}

pub fn print_dfa(t: &TestLanguage) -> String {
    let d = t.dfa();
    let alphabet = t.alphabet();
    let mut out = String::from("dfa\n");
    let _ = writeln!(out, "alphabet {}", alphabet.symbols().join(" "));
    let _ = writeln!(out, "states {}", d.states());
    let _ = writeln!(out, "initial {}", d.initial());
    for (q, a, r) in d.transitions() {
        let _ = writeln!(out, "trans {q} {} {r}", alphabet.name(a));
    }
    let acc = d.accepting_states();
    if !acc.is_empty() {
        let acc: Vec<String> = acc.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "accept {}", acc.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str =
        "pa\nalphabet 0 1\nstates 2\ntrans 0 0 0 0.5\ntrans 0 1 1 0.5\ntrans 1 0 0 0.5\ntrans 1 1 1 0.5\naccept 1\n";

    #[test]
    fn pa_round_trip() {
        let a = parse_pa(EXAMPLE).unwrap();
        assert_eq!(print_pa(&a), EXAMPLE);
        assert_eq!(parse_pa(&print_pa(&a)).unwrap(), a);
    }

    #[test]
    fn dfa_round_trip() {
        let text =
            "dfa\nalphabet a b\nstates 2\ninitial 1\ntrans 0 a 0\ntrans 0 b 1\ntrans 1 a 0\ntrans 1 b 1\naccept 0\n";
        let t = parse_dfa(text).unwrap();
        assert_eq!(print_dfa(&t), text);
        assert!(t.dfa().accepts(&[1, 0]));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = EXAMPLE.replace("trans 1 1 1 0.5", "trans 1 1 1 0.4");
        assert!(parse_pa(&bad).unwrap_err().to_string().contains("sum to"));
        let bad = EXAMPLE.replace("trans 0 1 1 0.5", "trans 0 1 1 half");
        assert_eq!(
            parse_pa(&bad).unwrap_err().to_string(),
            "line 5: invalid probability `half`"
        );
        let partial = "dfa\nalphabet a\nstates 2\ntrans 0 a 1\n";
        assert!(parse_dfa(partial).unwrap_err().to_string().contains("not total"));
    }
}
