use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use super::normal_form::NormalForm;
use super::{Theory, TheoryError};

/// Rational term over named one-step generators.
///
/// Concrete syntax, loosest binding first: `t + t` (join), `t . t`
/// (composition, the right operand runs first), postfix `t*` (star) and
/// `t^w` (omega), and atoms `empty(m,p)`, `id(n)`, `b(i₁,…,i_k ; n)`,
/// `inj(i ; n₁,…,n_k)`, `[t, …, t]` (cotuple), generator names and
/// parentheses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RationalTerm {
    Gen(String),
    Empty {
        dom: usize,
        cod: usize,
    },
    Identity(usize),
    Base {
        map: Vec<usize>,
        cod: usize,
    },
    Injection {
        block: usize,
        sizes: Vec<usize>,
    },
    /// `Compose(g, f)` is `g·f`.
    Compose(Box<RationalTerm>, Box<RationalTerm>),
    Join(Box<RationalTerm>, Box<RationalTerm>),
    Star(Box<RationalTerm>),
    Omega(Box<RationalTerm>),
    Cotuple(Vec<RationalTerm>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("term syntax error at offset {offset}: {message}")]
pub struct TermParseError {
    pub offset: usize,
    pub message: String,
}

impl RationalTerm {
    pub fn compose(g: RationalTerm, f: RationalTerm) -> Self {
        RationalTerm::Compose(Box::new(g), Box::new(f))
    }

    pub fn join(f: RationalTerm, g: RationalTerm) -> Self {
        RationalTerm::Join(Box::new(f), Box::new(g))
    }

    pub fn star(f: RationalTerm) -> Self {
        RationalTerm::Star(Box::new(f))
    }

    pub fn omega(f: RationalTerm) -> Self {
        RationalTerm::Omega(Box::new(f))
    }

    pub fn parse(text: &str) -> Result<Self, TermParseError> {
        let mut p = Parser { text, pos: 0 };
        let t = p.join()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected input"));
        }
        Ok(t)
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            RationalTerm::Compose(a, b) | RationalTerm::Join(a, b) => 1 + a.depth().max(b.depth()),
            RationalTerm::Star(a) | RationalTerm::Omega(a) => 1 + a.depth(),
            RationalTerm::Cotuple(ts) => 1 + ts.iter().map(RationalTerm::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Generator names in order of first occurrence.
    pub fn generators(&self) -> Vec<String> {
        fn walk(t: &RationalTerm, out: &mut Vec<String>) {
            match t {
                RationalTerm::Gen(g) => {
                    if !out.contains(g) {
                        out.push(g.clone());
                    }
                }
                RationalTerm::Compose(a, b) | RationalTerm::Join(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                RationalTerm::Star(a) | RationalTerm::Omega(a) => walk(a, out),
                RationalTerm::Cotuple(ts) => ts.iter().for_each(|t| walk(t, out)),
                _ => {}
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            RationalTerm::Join(..) => 0,
            RationalTerm::Compose(..) => 1,
            RationalTerm::Star(..) | RationalTerm::Omega(..) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            write!(f, "(")?;
        }
        match self {
            RationalTerm::Gen(g) => write!(f, "{g}")?,
            RationalTerm::Empty { dom, cod } => write!(f, "empty({dom},{cod})")?,
            RationalTerm::Identity(n) => write!(f, "id({n})")?,
            RationalTerm::Base { map, cod } => write!(f, "b({} ; {cod})", join_nums(map))?,
            RationalTerm::Injection { block, sizes } => write!(f, "inj({block} ; {})", join_nums(sizes))?,
            RationalTerm::Compose(a, b) => {
                a.write(f, 1)?;
                write!(f, " . ")?;
                b.write(f, 2)?;
            }
            RationalTerm::Join(a, b) => {
                a.write(f, 0)?;
                write!(f, " + ")?;
                b.write(f, 1)?;
            }
            RationalTerm::Star(a) => {
                a.write(f, 3)?;
                write!(f, "*")?;
            }
            RationalTerm::Omega(a) => {
                a.write(f, 3)?;
                write!(f, "^w")?;
            }
            RationalTerm::Cotuple(ts) => {
                write!(f, "[")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    t.write(f, 0)?;
                }
                write!(f, "]")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn join_nums(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RationalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TermParseError {
        TermParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn join(&mut self) -> Result<RationalTerm, TermParseError> {
        let mut t = self.compose()?;
        while self.eat('+') {
            t = RationalTerm::join(t, self.compose()?);
        }
        Ok(t)
    }

    fn compose(&mut self) -> Result<RationalTerm, TermParseError> {
        let mut t = self.postfix()?;
        while self.eat('.') {
            t = RationalTerm::compose(t, self.postfix()?);
        }
        Ok(t)
    }

    fn postfix(&mut self) -> Result<RationalTerm, TermParseError> {
        let mut t = self.atom()?;
        loop {
            if self.eat('*') {
                t = RationalTerm::star(t);
            } else if self.peek() == Some('^') {
                self.pos += 1;
                if !self.text[self.pos..].starts_with('w') {
                    return Err(self.error("expected `w` after `^`"));
                }
                self.pos += 1;
                t = RationalTerm::omega(t);
            } else {
                return Ok(t);
            }
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit()))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(rest[..len].to_string())
    }

    fn number(&mut self) -> Result<usize, TermParseError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a number"));
        }
        let n = rest[..len].parse().map_err(|_| self.error("number out of range"))?;
        self.pos += len;
        Ok(n)
    }

    fn numbers_until(&mut self, close: char) -> Result<Vec<usize>, TermParseError> {
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if !self.eat(',') {
                return Ok(out);
            }
        }
    }

    fn atom(&mut self) -> Result<RationalTerm, TermParseError> {
        if self.eat('(') {
            let t = self.join()?;
            self.expect(')')?;
            return Ok(t);
        }
        if self.eat('[') {
            let mut parts = vec![self.join()?];
            while self.eat(',') {
                parts.push(self.join()?);
            }
            self.expect(']')?;
            return Ok(RationalTerm::Cotuple(parts));
        }
        let start = self.pos;
        let name = self.ident().ok_or_else(|| self.error("expected a term"))?;
        match name.as_str() {
            "empty" if self.eat('(') => {
                let dom = self.number()?;
                self.expect(',')?;
                let cod = self.number()?;
                self.expect(')')?;
                Ok(RationalTerm::Empty { dom, cod })
            }
            "id" if self.eat('(') => {
                let n = self.number()?;
                self.expect(')')?;
                Ok(RationalTerm::Identity(n))
            }
            "b" if self.eat('(') => {
                let map = self.numbers_until(';')?;
                self.expect(';')?;
                let cod = self.number()?;
                self.expect(')')?;
                Ok(RationalTerm::Base { map, cod })
            }
            "inj" if self.eat('(') => {
                let block = self.number()?;
                self.expect(';')?;
                let sizes = self.numbers_until(')')?;
                self.expect(')')?;
                Ok(RationalTerm::Injection { block, sizes })
            }
            "empty" | "id" | "b" | "inj" => {
                self.pos = start;
                Err(self.error("reserved name used as a generator"))
            }
            _ => Ok(RationalTerm::Gen(name)),
        }
    }
}

/// Named one-step arrows. Insertion checks one-step membership unless raw
/// generators are explicitly allowed.
#[derive(Debug, Clone)]
pub struct GeneratorTable<A> {
    entries: BTreeMap<String, A>,
    allow_raw: bool,
}

impl<A: Clone> Default for GeneratorTable<A> {
    fn default() -> Self {
        GeneratorTable {
            entries: BTreeMap::new(),
            allow_raw: false,
        }
    }
}

impl<A: Clone + fmt::Debug> GeneratorTable<A> {
    pub fn new() -> Self {
        GeneratorTable::default()
    }

    /// A table that also accepts arrows outside the one-step class; such
    /// generators evaluate directly but have no normal form.
    pub fn allowing_raw() -> Self {
        GeneratorTable {
            entries: BTreeMap::new(),
            allow_raw: true,
        }
    }

    pub fn allows_raw(&self) -> bool {
        self.allow_raw
    }

    pub fn insert<T: Theory<Arrow = A> + ?Sized>(&mut self, t: &T, name: &str, arrow: A) -> Result<(), TheoryError> {
        if !self.allow_raw && !t.is_one_step(&arrow) {
            return Err(TheoryError::NotOneStep(name.to_string()));
        }
        self.entries.insert(name.to_string(), arrow);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&A, TheoryError> {
        self.entries
            .get(name)
            .ok_or_else(|| TheoryError::UnknownGenerator(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &A)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn base_of_term<T: Theory + ?Sized>(t: &T, term: &RationalTerm) -> Result<Option<T::Arrow>, TheoryError> {
    Ok(match term {
        RationalTerm::Empty { dom, cod } => Some(t.bottom(*dom, *cod)),
        RationalTerm::Identity(n) => Some(t.identity(*n)),
        RationalTerm::Base { map, cod } => Some(t.base(map, *cod)?),
        RationalTerm::Injection { block, sizes } => Some(t.injection(*block, sizes)?),
        _ => None,
    })
}

fn check_compose<T: Theory + ?Sized>(t: &T, g: &T::Arrow, f: &T::Arrow) -> Result<(), TheoryError> {
    if t.cod(f) != t.dom(g) {
        return Err(TheoryError::Type(format!(
            "composition of {} -> {} after {} -> {}",
            t.dom(g),
            t.cod(g),
            t.dom(f),
            t.cod(f)
        )));
    }
    Ok(())
}

/// Folds the term with the instance operations.
pub fn eval_rational<T: Theory + ?Sized>(
    t: &T,
    table: &GeneratorTable<T::Arrow>,
    term: &RationalTerm,
) -> Result<T::Arrow, TheoryError> {
    if let Some(a) = base_of_term(t, term)? {
        return Ok(a);
    }
    match term {
        RationalTerm::Gen(name) => table.get(name).cloned(),
        RationalTerm::Compose(g, f) => {
            let (g, f) = (eval_rational(t, table, g)?, eval_rational(t, table, f)?);
            check_compose(t, &g, &f)?;
            t.compose(&g, &f)
        }
        RationalTerm::Join(a, b) => t.join(&eval_rational(t, table, a)?, &eval_rational(t, table, b)?),
        RationalTerm::Star(a) => t.star(&eval_rational(t, table, a)?),
        RationalTerm::Omega(a) => t.omega(&eval_rational(t, table, a)?),
        RationalTerm::Cotuple(ts) => {
            let parts = ts
                .iter()
                .map(|x| eval_rational(t, table, x))
                .collect::<Result<Vec<_>, _>>()?;
            t.cotuple(&parts)
        }
        _ => unreachable!("atoms handled above"),
    }
}

/// Folds the term through normal forms; `^w` has no normal form.
pub fn eval_rational_nf<T: Theory + ?Sized>(
    t: &T,
    table: &GeneratorTable<T::Arrow>,
    term: &RationalTerm,
) -> Result<NormalForm<T::Arrow>, TheoryError> {
    if let Some(a) = base_of_term(t, term)? {
        return NormalForm::from_one_step(t, &a);
    }
    match term {
        RationalTerm::Gen(name) => {
            NormalForm::from_one_step(t, table.get(name)?).map_err(|_| TheoryError::NotOneStep(name.clone()))
        }
        RationalTerm::Compose(g, f) => {
            let (g, f) = (eval_rational_nf(t, table, g)?, eval_rational_nf(t, table, f)?);
            NormalForm::compose(t, &g, &f)
        }
        RationalTerm::Join(a, b) => {
            NormalForm::join(t, &eval_rational_nf(t, table, a)?, &eval_rational_nf(t, table, b)?)
        }
        RationalTerm::Star(a) => NormalForm::star(t, &eval_rational_nf(t, table, a)?),
        RationalTerm::Omega(_) => Err(TheoryError::Unsupported(
            "omega terms have no finite normal form".into(),
        )),
        RationalTerm::Cotuple(ts) => {
            let parts = ts
                .iter()
                .map(|x| eval_rational_nf(t, table, x))
                .collect::<Result<Vec<_>, _>>()?;
            NormalForm::cotuple(t, &parts)
        }
        _ => unreachable!("atoms handled above"),
    }
}

/// Random well-typed term `m ⇸ p` with nesting at most `depth` over objects
/// of size at most `max_dim`. Leaves are base maps, empty arrows, or
/// generators produced by `fresh(rng, m, p)`.
pub fn random_term_shape<R: Rng>(
    rng: &mut R,
    m: usize,
    p: usize,
    depth: usize,
    max_dim: usize,
    fresh: &mut dyn FnMut(&mut R, usize, usize) -> RationalTerm,
) -> RationalTerm {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..6) {
            0 if p > 0 => RationalTerm::Base {
                map: (0..m).map(|_| rng.gen_range(0..p)).collect(),
                cod: p,
            },
            1 => RationalTerm::Empty { dom: m, cod: p },
            _ => fresh(rng, m, p),
        };
    }
    let d = depth - 1;
    let mut sub = |rng: &mut R, m, p| random_term_shape(rng, m, p, d, max_dim, fresh);
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(1..=max_dim);
            let f = sub(rng, m, k);
            let g = sub(rng, k, p);
            RationalTerm::compose(g, f)
        }
        1 => {
            let f = sub(rng, m, p);
            let g = sub(rng, m, p);
            RationalTerm::join(f, g)
        }
        2 if m >= 2 => {
            let split = rng.gen_range(1..m);
            let f = sub(rng, split, p);
            let g = sub(rng, m - split, p);
            RationalTerm::Cotuple(vec![f, g])
        }
        _ if m == p => RationalTerm::star(sub(rng, m, m)),
        _ => {
            // Star on the codomain: `h*·f`.
            let f = sub(rng, m, p);
            let h = sub(rng, p, p);
            RationalTerm::compose(RationalTerm::star(h), f)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_precedence() {
        let t = RationalTerm::parse("a . g* + [id(1), empty(1,1)] . c^w").unwrap();
        let expected = RationalTerm::join(
            RationalTerm::compose(
                RationalTerm::Gen("a".into()),
                RationalTerm::star(RationalTerm::Gen("g".into())),
            ),
            RationalTerm::compose(
                RationalTerm::Cotuple(vec![RationalTerm::Identity(1), RationalTerm::Empty { dom: 1, cod: 1 }]),
                RationalTerm::omega(RationalTerm::Gen("c".into())),
            ),
        );
        assert_eq!(t, expected);
        assert_eq!(RationalTerm::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn parse_base_maps() {
        assert_eq!(
            RationalTerm::parse("b(0,0 ; 1)").unwrap(),
            RationalTerm::Base {
                map: vec![0, 0],
                cod: 1
            }
        );
        assert_eq!(
            RationalTerm::parse("b( ; 2)").unwrap(),
            RationalTerm::Base { map: vec![], cod: 2 }
        );
        assert_eq!(
            RationalTerm::parse("inj(1; 2, 3)").unwrap(),
            RationalTerm::Injection {
                block: 1,
                sizes: vec![2, 3]
            }
        );
        assert!(RationalTerm::parse("b(0 ; )").is_err());
        assert!(RationalTerm::parse("(a").is_err());
        assert!(RationalTerm::parse("a . ").is_err());
    }

    #[test]
    fn right_nested_composition_keeps_parentheses() {
        let t = RationalTerm::compose(
            RationalTerm::Gen("a".into()),
            RationalTerm::compose(RationalTerm::Gen("b".into()), RationalTerm::Gen("c".into())),
        );
        assert_eq!(t.to_string(), "a . (b . c)");
        assert_eq!(t.depth(), 2);
    }
}
