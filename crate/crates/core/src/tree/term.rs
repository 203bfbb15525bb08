use std::collections::BTreeSet;
use std::fmt;

use crate::word::{Alphabet, Sym};

/// Finite complete binary tree: inner nodes carry letters, leaves carry
/// variables. Variable 0 doubles as the output marker of `T_Σ 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiniteTree {
    Var(usize),
    Node(Sym, Box<FiniteTree>, Box<FiniteTree>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSyntaxError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for TreeSyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tree syntax error at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for TreeSyntaxError {}

impl FiniteTree {
    pub fn node(a: Sym, l: FiniteTree, r: FiniteTree) -> FiniteTree {
        FiniteTree::Node(a, Box::new(l), Box::new(r))
    }

    /// Length of the longest root-to-leaf path; a bare variable has height 0.
    pub fn height(&self) -> usize {
        match self {
            FiniteTree::Var(_) => 0,
            FiniteTree::Node(_, l, r) => 1 + l.height().max(r.height()),
        }
    }

    /// Largest variable index plus one; 0 when the tree has none.
    pub fn arity(&self) -> usize {
        match self {
            FiniteTree::Var(j) => j + 1,
            FiniteTree::Node(_, l, r) => l.arity().max(r.arity()),
        }
    }

    /// Leaf variables, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn walk(t: &FiniteTree, out: &mut Vec<usize>) {
            match t {
                FiniteTree::Var(j) => out.push(*j),
                FiniteTree::Node(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Replaces every leaf `j` by `sub(j)`.
    pub fn substitute(&self, sub: &impl Fn(usize) -> FiniteTree) -> FiniteTree {
        match self {
            FiniteTree::Var(j) => sub(*j),
            FiniteTree::Node(a, l, r) => FiniteTree::node(*a, l.substitute(sub), r.substitute(sub)),
        }
    }

    /// All trees over `symbols` letters and `vars` variables of height at most `max_height`.
    pub fn enumerate(symbols: usize, vars: usize, max_height: usize) -> Vec<FiniteTree> {
        let mut all: Vec<FiniteTree> = (0..vars).map(FiniteTree::Var).collect();
        for _ in 0..max_height {
            let mut next: Vec<FiniteTree> = (0..vars).map(FiniteTree::Var).collect();
            for a in 0..symbols as Sym {
                for l in &all {
                    for r in &all {
                        next.push(FiniteTree::node(a, l.clone(), r.clone()));
                    }
                }
            }
            all = next;
        }
        let set: BTreeSet<FiniteTree> = all.into_iter().collect();
        set.into_iter().collect()
    }

    /// Parses `sym(t,t)` with leaves `_` (variable 0) or `_j`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<FiniteTree, TreeSyntaxError> {
        let mut p = Parser { text, pos: 0, alphabet };
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected input"));
        }
        Ok(t)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        TreeDisplay { tree: self, alphabet }
    }
}

struct TreeDisplay<'a> {
    tree: &'a FiniteTree,
    alphabet: &'a Alphabet,
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tree {
            FiniteTree::Var(0) => write!(f, "_"),
            FiniteTree::Var(j) => write!(f, "_{j}"),
            FiniteTree::Node(a, l, r) => write!(
                f,
                "{}({},{})",
                self.alphabet.name(*a),
                l.display(self.alphabet),
                r.display(self.alphabet)
            ),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> TreeSyntaxError {
        TreeSyntaxError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TreeSyntaxError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn tree(&mut self) -> Result<FiniteTree, TreeSyntaxError> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | ','))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a tree"));
        }
        let tok = &rest[..len];
        let opens = rest[len..].trim_start().starts_with('(');
        if !opens {
            if let Some(var) = tok.strip_prefix('_') {
                let j = if var.is_empty() {
                    0
                } else {
                    var.parse().map_err(|_| self.error("invalid variable"))?
                };
                self.pos += len;
                return Ok(FiniteTree::Var(j));
            }
            return Err(self.error("inner node without children"));
        }
        let a = self
            .alphabet
            .index(tok)
            .ok_or_else(|| self.error(&format!("unknown symbol `{tok}`")))?;
        self.pos += len;
        self.expect('(')?;
        let l = self.tree()?;
        self.expect(',')?;
        let r = self.tree()?;
        self.expect(')')?;
        Ok(FiniteTree::node(a, l, r))
    }
}
