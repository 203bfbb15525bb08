//! Line-based file formats: `lts` automata and rational-term files.
//!
//! Automaton files:
//!
//! ```text
//! lts
//! alphabet 0 1
//! states 3
//! trans 0 0 1      # src symbol dst; symbol may be `eps`
//! accept 2
//! ```
//!
//! Term files declare generators, then give one term:
//!
//! ```text
//! alphabet a b     # optional; inferred from `entry` lines otherwise
//! gen g : 2->2
//! entry 0 1 a eps
//! rentry 1 0 (ab)*  # only when raw generators are allowed
//! g* . b(0 ; 2)
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::{LtsMorphism, LtsTheory, NdAutomaton, DEFAULT_BOUND};
use crate::kernel::{GeneratorTable, RationalTerm};
use crate::word::{Alphabet, LangMatrix, Regex, Sym, WordLang};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub(crate) fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((k + 1, l))
    })
}

pub(crate) fn number(line: usize, tok: Option<&str>, what: &str) -> Result<usize, FormatError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| err(line, format!("invalid {what} `{tok}`")))
}

fn symbol(line: usize, alphabet: &Alphabet, tok: &str) -> Result<Option<Sym>, FormatError> {
    if tok == "eps" || tok == "ε" {
        return Ok(None);
    }
    alphabet
        .index(tok)
        .map(Some)
        .ok_or_else(|| err(line, format!("unknown symbol `{tok}`")))
}

pub(crate) fn alphabet_from<'a>(
    line: usize,
    toks: impl Iterator<Item = &'a str>,
) -> Result<Arc<Alphabet>, FormatError> {
    Alphabet::new(toks).map(Arc::new).map_err(|e| err(line, e.to_string()))
}

pub fn parse_lts(text: &str) -> Result<NdAutomaton, FormatError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, "lts")) => {}
        Some((l, _)) => return Err(err(l, "expected header `lts`")),
        None => return Err(err(1, "empty file")),
    }
    let mut alphabet: Option<Arc<Alphabet>> = None;
    let mut states: Option<usize> = None;
    let mut transitions = Vec::new();
    let mut accepting = Vec::new();
    let mut last = 1;
    for (l, content) in it {
        last = l;
        let mut toks = content.split_whitespace();
        let kw = toks.next().expect("non-empty line");
        match kw {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(err(l, "duplicate alphabet"));
                }
                alphabet = Some(alphabet_from(l, toks)?);
            }
            "states" => {
                if states.is_some() {
                    return Err(err(l, "duplicate states"));
                }
                states = Some(number(l, toks.next(), "state count")?);
                if toks.next().is_some() {
                    return Err(err(l, "trailing tokens"));
                }
            }
            "trans" => {
                let alphabet = alphabet.as_ref().ok_or_else(|| err(l, "`trans` before `alphabet`"))?;
                let n = states.ok_or_else(|| err(l, "`trans` before `states`"))?;
                let src = number(l, toks.next(), "source state")?;
                let sym = symbol(l, alphabet, toks.next().ok_or_else(|| err(l, "missing symbol"))?)?;
                let dst = number(l, toks.next(), "target state")?;
                if toks.next().is_some() {
                    return Err(err(l, "trailing tokens"));
                }
                if src >= n || dst >= n {
                    return Err(err(l, format!("state out of range for {n} states")));
                }
                transitions.push((src, sym, dst));
            }
            "accept" => {
                let n = states.ok_or_else(|| err(l, "`accept` before `states`"))?;
                for tok in toks {
                    let s = number(l, Some(tok), "accepting state")?;
                    if s >= n {
                        return Err(err(l, format!("state {s} out of range for {n} states")));
                    }
                    accepting.push(s);
                }
            }
            other => return Err(err(l, format!("unknown keyword `{other}`"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| err(last, "missing `alphabet`"))?;
    let states = states.ok_or_else(|| err(last, "missing `states`"))?;
    NdAutomaton::from_transitions(alphabet, states, &transitions, &accepting).map_err(|e| err(last, e.to_string()))
}

pub fn print_lts(a: &NdAutomaton) -> String {
    let alphabet = a.alphabet();
    let mut out = String::from("lts\n");
    let _ = writeln!(out, "alphabet {}", alphabet.symbols().join(" "));
    let _ = writeln!(out, "states {}", a.states());
    for (s, sym, d) in a.transitions() {
        let name = sym.map_or("eps", |x| alphabet.name(x));
        let _ = writeln!(out, "trans {s} {name} {d}");
    }
    let acc: Vec<String> = (0..a.states())
        .filter(|&s| a.accepting()[s])
        .map(|s| s.to_string())
        .collect();
    if !acc.is_empty() {
        let _ = writeln!(out, "accept {}", acc.join(" "));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenEntry {
    /// Subset of `Σ ∪ {ε}`; `None` is ε.
    Symbols {
        row: usize,
        col: usize,
        symbols: Vec<Option<Sym>>,
    },
    /// Arbitrary regular language.
    Raw { row: usize, col: usize, regex: Regex },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenDecl {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
    pub entries: Vec<GenEntry>,
}

/// Parsed term file. `table` is derived from `generators`.
#[derive(Debug, Clone)]
pub struct TermFile {
    pub alphabet: Arc<Alphabet>,
    pub generators: Vec<GenDecl>,
    pub term: RationalTerm,
    pub table: GeneratorTable<LtsMorphism>,
}

impl PartialEq for TermFile {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.generators == other.generators && self.term == other.term
    }
}

fn parse_gen_header(l: usize, rest: &str) -> Result<(String, usize, usize), FormatError> {
    let (name, ty) = rest
        .split_once(':')
        .ok_or_else(|| err(l, "expected `gen NAME : M->P`"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(err(l, format!("invalid generator name `{name}`")));
    }
    let (m, p) = ty.split_once("->").ok_or_else(|| err(l, "expected `M->P`"))?;
    Ok((
        name.to_string(),
        number(l, Some(m.trim()), "domain")?,
        number(l, Some(p.trim()), "codomain")?,
    ))
}

/// Parses a term file. `rentry` lines are rejected unless `allow_raw`.
pub fn parse_term_file(text: &str, allow_raw: bool) -> Result<TermFile, FormatError> {
    let mut explicit: Option<Arc<Alphabet>> = None;
    let mut inferred: Vec<String> = Vec::new();
    let mut decls: Vec<(usize, GenDecl)> = Vec::new();
    // Raw entries are resolved once the alphabet is known.
    let mut pending: Vec<(usize, usize, usize, usize, String)> = Vec::new();
    let mut symbol_entries: Vec<(usize, usize, usize, usize, Vec<String>)> = Vec::new();
    let mut term_text = String::new();
    let mut term_line = 0;
    for (l, content) in lines(text) {
        if term_line == 0 {
            let (kw, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            match kw {
                "alphabet" => {
                    if explicit.is_some() || !decls.is_empty() {
                        return Err(err(l, "`alphabet` must come first and only once"));
                    }
                    explicit = Some(alphabet_from(l, rest.split_whitespace())?);
                    continue;
                }
                "gen" => {
                    let (name, dom, cod) = parse_gen_header(l, rest)?;
                    if decls.iter().any(|(_, d)| d.name == name) {
                        return Err(err(l, format!("duplicate generator `{name}`")));
                    }
                    decls.push((
                        l,
                        GenDecl {
                            name,
                            dom,
                            cod,
                            entries: Vec::new(),
                        },
                    ));
                    continue;
                }
                "entry" | "rentry" => {
                    let d = decls
                        .len()
                        .checked_sub(1)
                        .ok_or_else(|| err(l, format!("`{kw}` before any `gen`")))?;
                    let mut toks = rest.split_whitespace();
                    let row = number(l, toks.next(), "row")?;
                    let col = number(l, toks.next(), "column")?;
                    let decl = &decls[d].1;
                    if row >= decl.dom || col >= decl.cod {
                        return Err(err(
                            l,
                            format!("entry ({row}, {col}) outside {} -> {}", decl.dom, decl.cod),
                        ));
                    }
                    if kw == "rentry" {
                        if !allow_raw {
                            return Err(err(
                                l,
                                "raw generator entries are disabled (use --allow-raw-generators)",
                            ));
                        }
                        let regex: Vec<&str> = toks.collect();
                        pending.push((l, d, row, col, regex.join(" ")));
                    } else {
                        let syms: Vec<String> = toks.map(str::to_string).collect();
                        for s in &syms {
                            if s != "eps" && s != "ε" && !inferred.contains(s) {
                                inferred.push(s.clone());
                            }
                        }
                        symbol_entries.push((l, d, row, col, syms));
                    }
                    continue;
                }
                _ => term_line = l,
            }
        }
        term_text.push_str(content);
        term_text.push(' ');
    }
    if term_line == 0 {
        return Err(err(text.lines().count().max(1), "missing term"));
    }
    let alphabet = match explicit {
        Some(a) => a,
        None => {
            if let Some(&(l, ..)) = pending.first() {
                return Err(err(l, "`rentry` needs an `alphabet` line"));
            }
            alphabet_from(1, inferred.iter().map(String::as_str))?
        }
    };
    for (l, d, row, col, syms) in symbol_entries {
        let symbols = syms
            .iter()
            .map(|s| symbol(l, &alphabet, s))
            .collect::<Result<Vec<_>, _>>()?;
        decls[d].1.entries.push(GenEntry::Symbols { row, col, symbols });
    }
    for (l, d, row, col, text) in pending {
        let regex = Regex::parse(&text, &alphabet).map_err(|e| err(l, e.to_string()))?;
        decls[d].1.entries.push(GenEntry::Raw { row, col, regex });
    }
    let term = RationalTerm::parse(&term_text)
        .map_err(|e| err(term_line, format!("term syntax at offset {}: {}", e.offset, e.message)))?;
    let generators: Vec<GenDecl> = decls.into_iter().map(|(_, d)| d).collect();
    let table = build_table(&alphabet, &generators, allow_raw).map_err(|(name, msg)| {
        let l = lines(text)
            .find(|(_, c)| c.starts_with("gen") && c.contains(name.as_str()))
            .map_or(1, |(l, _)| l);
        err(l, msg)
    })?;
    Ok(TermFile {
        alphabet,
        generators,
        term,
        table,
    })
}

fn build_table(
    alphabet: &Arc<Alphabet>,
    generators: &[GenDecl],
    allow_raw: bool,
) -> Result<GeneratorTable<LtsMorphism>, (String, String)> {
    let t = LtsTheory::new(alphabet.clone(), DEFAULT_BOUND);
    let mut table = if allow_raw {
        GeneratorTable::allowing_raw()
    } else {
        GeneratorTable::new()
    };
    for g in generators {
        let mut cells = vec![WordLang::empty(alphabet.clone()); g.dom * g.cod];
        for e in &g.entries {
            let (row, col, lang) = match e {
                GenEntry::Symbols { row, col, symbols } => {
                    let letters: Vec<Sym> = symbols.iter().flatten().copied().collect();
                    let eps = symbols.iter().any(Option::is_none);
                    (
                        *row,
                        *col,
                        WordLang::letters(alphabet.clone(), &letters, eps).expect("symbols resolved"),
                    )
                }
                GenEntry::Raw { row, col, regex } => (*row, *col, regex.to_lang(alphabet)),
            };
            let cell = &mut cells[row * g.cod + col];
            *cell = cell.union(&lang).expect("same alphabet");
        }
        let fin = LangMatrix::from_fn(alphabet.clone(), g.dom, g.cod, |i, j| cells[i * g.cod + j].clone())
            .expect("same alphabet");
        table
            .insert(&t, &g.name, LtsMorphism::finite(fin))
            .map_err(|e| (g.name.clone(), e.to_string()))?;
    }
    Ok(table)
}

pub fn print_term_file(f: &TermFile) -> String {
    let alphabet = &f.alphabet;
    let mut out = String::new();
    let _ = writeln!(out, "alphabet {}", alphabet.symbols().join(" "));
    for g in &f.generators {
        let _ = writeln!(out, "gen {} : {}->{}", g.name, g.dom, g.cod);
        for e in &g.entries {
            match e {
                GenEntry::Symbols { row, col, symbols } => {
                    let names: Vec<&str> = symbols.iter().map(|s| s.map_or("eps", |x| alphabet.name(x))).collect();
                    let _ = writeln!(out, "entry {row} {col} {}", names.join(" "));
                }
                GenEntry::Raw { row, col, regex } => {
                    let _ = writeln!(out, "rentry {row} {col} {}", regex.display(alphabet));
                }
            }
        }
    }
    let _ = writeln!(out, "{}", f.term);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Theory;

    const FIG: &str = "lts\nalphabet 0 1\nstates 3\ntrans 0 0 1 # comment\ntrans 0 0 2\ntrans 0 1 2\ntrans 1 1 2\ntrans 2 1 2\naccept 2\n";

    #[test]
    fn lts_round_trip() {
        let a = parse_lts(FIG).unwrap();
        assert_eq!(a.states(), 3);
        let b = parse_lts(&print_lts(&a)).unwrap();
        assert_eq!(a.transitions(), b.transitions());
        assert_eq!(a.accepting(), b.accepting());
    }

    #[test]
    fn lts_errors_carry_line_numbers() {
        let e = parse_lts("lts\nalphabet a\nstates 2\ntrans 0 c 1\n").unwrap_err();
        assert_eq!(e, err(4, "unknown symbol `c`"));
        let e = parse_lts("lts\nalphabet a\nstates 2\ntrans 0 a 5\n").unwrap_err();
        assert!(matches!(e, FormatError::Syntax { line: 4, .. }));
    }

    #[test]
    fn term_file_round_trip() {
        let text = "gen g : 2->2\nentry 0 1 a eps\nentry 1 0 b\n# the term\ng* .\n  b(0 ; 2)\n";
        let f = parse_term_file(text, false).unwrap();
        assert_eq!(f.alphabet.symbols(), &["a".to_string(), "b".to_string()]);
        let g = parse_term_file(&print_term_file(&f), false).unwrap();
        assert_eq!(f, g);
        let t = LtsTheory::new(f.alphabet.clone(), DEFAULT_BOUND);
        let v = crate::kernel::eval_rational(&t, &f.table, &f.term).unwrap();
        assert_eq!((t.dom(&v), t.cod(&v)), (1, 2));
    }

    #[test]
    fn raw_entries_need_opt_in() {
        let text = "alphabet a b\ngen g : 1->1\nrentry 0 0 (ab)*\ng\n";
        assert!(matches!(
            parse_term_file(text, false),
            Err(FormatError::Syntax { line: 3, .. })
        ));
        let f = parse_term_file(text, true).unwrap();
        assert_eq!(parse_term_file(&print_term_file(&f), true).unwrap(), f);
    }
}
