use std::fmt;
use std::sync::Arc;

use super::{Alphabet, Sym, WordError, WordLang};

/// Regular expression syntax tree.
///
/// Concrete syntax: `0` is the empty language and `e` the empty word unless
/// the alphabet has a symbol of that name; `∅` and `ε` are always available.
/// `+` is union, `.` or juxtaposition is concatenation, postfix `*` is star.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Empty,
    Epsilon,
    Symbol(Sym),
    Union(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Regex, WordError> {
        let mut p = Parser { text, pos: 0, alphabet };
        let r = p.union()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected input"));
        }
        Ok(r)
    }

    pub fn union(a: Regex, b: Regex) -> Regex {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Regex {
        Regex::Star(Box::new(a))
    }

    pub fn to_lang(&self, alphabet: &Arc<Alphabet>) -> WordLang {
        match self {
            Regex::Empty => WordLang::empty(alphabet.clone()),
            Regex::Epsilon => WordLang::epsilon(alphabet.clone()),
            Regex::Symbol(a) => WordLang::symbol(alphabet.clone(), *a).expect("symbol checked at construction"),
            Regex::Union(a, b) => a.to_lang(alphabet).union(&b.to_lang(alphabet)).expect("same alphabet"),
            Regex::Concat(a, b) => a.to_lang(alphabet).concat(&b.to_lang(alphabet)).expect("same alphabet"),
            Regex::Star(a) => a.to_lang(alphabet).star(),
        }
    }

    /// Renders with the alphabet's symbol names; the output re-parses to an
    /// equal tree up to associativity.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        RegexDisplay { regex: self, alphabet }
    }

    fn precedence(&self) -> u8 {
        match self {
            Regex::Union(..) => 0,
            Regex::Concat(..) => 1,
            Regex::Star(..) => 2,
            _ => 3,
        }
    }
}

struct RegexDisplay<'a> {
    regex: &'a Regex,
    alphabet: &'a Alphabet,
}

impl RegexDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, r: &Regex, min_prec: u8) -> fmt::Result {
        let paren = r.precedence() < min_prec;
        if paren {
            write!(f, "(")?;
        }
        match r {
            Regex::Empty => write!(f, "∅")?,
            Regex::Epsilon => write!(f, "ε")?,
            Regex::Symbol(a) => write!(f, "{}", self.alphabet.name(*a))?,
            Regex::Union(a, b) => {
                self.write(f, a, 0)?;
                write!(f, "+")?;
                self.write(f, b, 1)?;
            }
            Regex::Concat(a, b) => {
                self.write(f, a, 1)?;
                write!(f, ".")?;
                self.write(f, b, 2)?;
            }
            Regex::Star(a) => {
                self.write(f, a, 3)?;
                write!(f, "*")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RegexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.regex, 0)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> WordError {
        WordError::RegexSyntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn union(&mut self) -> Result<Regex, WordError> {
        let mut r = self.concat()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('+') {
                self.pos += 1;
                let rhs = self.concat()?;
                r = Regex::union(r, rhs);
            } else {
                return Ok(r);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            None => false,
            Some(c) => !matches!(c, '+' | ')' | '*'),
        }
    }

    fn concat(&mut self) -> Result<Regex, WordError> {
        let mut r = self.postfix()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('.') {
                self.pos += 1;
                let rhs = self.postfix()?;
                r = Regex::concat(r, rhs);
            } else if self.starts_atom() {
                let rhs = self.postfix()?;
                r = Regex::concat(r, rhs);
            } else {
                return Ok(r);
            }
        }
    }

    fn postfix(&mut self) -> Result<Regex, WordError> {
        let mut r = self.atom()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
                r = Regex::star(r);
            } else {
                return Ok(r);
            }
        }
    }

    fn atom(&mut self) -> Result<Regex, WordError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        if rest.starts_with('(') {
            self.pos += 1;
            let r = self.union()?;
            self.skip_ws();
            if self.peek() != Some(')') {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            return Ok(r);
        }
        if let Some((a, len)) = self.alphabet.match_prefix(rest) {
            self.pos += len;
            return Ok(Regex::Symbol(a));
        }
        for (token, r) in [
            ("∅", Regex::Empty),
            ("ε", Regex::Epsilon),
            ("0", Regex::Empty),
            ("e", Regex::Epsilon),
        ] {
            if rest.starts_with(token) {
                self.pos += token.len();
                return Ok(r);
            }
        }
        if rest.is_empty() {
            Err(self.error("unexpected end of input"))
        } else {
            Err(self.error("expected a symbol, `(`, `0` or `e`"))
        }
    }
}
