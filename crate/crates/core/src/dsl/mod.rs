//! The tree-structured regex DSL.
//!
//! Expressions are written in prefix notation, e.g.
//! `and(startwith(<C0>),endwith(rep(<num>,4)))`. Character classes use the
//! seven reserved names (`<let>`, `<cap>`, `<low>`, `<num>`, `<any>`,
//! `<spec>`, `<null>`); any other text between angle brackets is a constant.
//!
//! The same tree type doubles as a *partial* regex: [`Regex::Hole`] and
//! [`Count::Hole`] mark positions a left-to-right decoder has not produced yet.
//! Anonymized trees use [`Regex::AnonConst`] and [`Count::Anon`].

mod metrics;
mod parse;
mod print;

use std::fmt;

use thiserror::Error;

pub use metrics::{anonymize, ast_metrics, AstMetrics};
pub use parse::{parse_dsl, parse_partial, parse_token_prefix, tokenize, Token};
pub use print::{print_dsl, to_standard_regex, to_tokens};

/// Errors raised while reading DSL text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("`{op}` at {pos} expects {expected}, found {found} argument(s)")]
    Arity {
        op: String,
        pos: usize,
        expected: String,
        found: usize,
    },
    #[error("unknown operator `{name}` at {pos}")]
    UnknownOperator { name: String, pos: usize },
    #[error("unknown terminal `<{name}>` at {pos}")]
    UnknownTerminal { name: String, pos: usize },
    #[error("repetition range {k1},{k2} at {pos} must satisfy k1 < k2")]
    InvalidRange { k1: u32, k2: u32, pos: usize },
    #[error("hole at {pos} is only allowed in partial regexes")]
    UnexpectedHole { pos: usize },
    #[error("unexpected token `{token}` in prefix at index {index}: {msg}")]
    BadPrefix {
        token: String,
        index: usize,
        msg: String,
    },
    #[error("expression is not shaped like any template: {0}")]
    NotTemplateShaped(String),
}

/// Named character classes of the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharClass {
    Let,
    Cap,
    Low,
    Num,
    Any,
    Spec,
    Null,
}

impl CharClass {
    pub const ALL: [CharClass; 7] = [
        CharClass::Let,
        CharClass::Cap,
        CharClass::Low,
        CharClass::Num,
        CharClass::Any,
        CharClass::Spec,
        CharClass::Null,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CharClass::Let => "let",
            CharClass::Cap => "cap",
            CharClass::Low => "low",
            CharClass::Num => "num",
            CharClass::Any => "any",
            CharClass::Spec => "spec",
            CharClass::Null => "null",
        }
    }

    pub fn from_name(name: &str) -> Option<CharClass> {
        CharClass::ALL.iter().copied().find(|c| c.name() == name)
    }
}

/// An integer parameter of `rep`, `repatleast` or `reprange`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Count {
    Value(u32),
    /// Anonymized integer, printed as `int`.
    Anon,
    /// Not yet decided, printed as `?`.
    Hole,
}

impl Count {
    pub fn value(self) -> Option<u32> {
        match self {
            Count::Value(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Value(k) => write!(f, "{k}"),
            Count::Anon => f.write_str("int"),
            Count::Hole => f.write_str("?"),
        }
    }
}

/// A DSL regex. Arity is fixed per variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    StartWith(Box<Regex>),
    EndWith(Box<Regex>),
    Contain(Box<Regex>),
    Not(Box<Regex>),
    Optional(Box<Regex>),
    Star(Box<Regex>),
    /// Single symbol outside the language of the argument.
    NotCc(Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    And(Box<Regex>, Box<Regex>),
    Or(Box<Regex>, Box<Regex>),
    Rep(Box<Regex>, Count),
    RepAtLeast(Box<Regex>, Count),
    RepRange(Box<Regex>, Count, Count),
    Class(CharClass),
    Char(char),
    /// Constant of two or more symbols.
    Str(String),
    AnonConst,
    Hole,
}

/// Unary operators, in the order they are listed by the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    StartWith,
    EndWith,
    Contain,
    Not,
    Optional,
    Star,
    NotCc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Concat,
    And,
    Or,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::StartWith => "startwith",
            UnaryOp::EndWith => "endwith",
            UnaryOp::Contain => "contain",
            UnaryOp::Not => "not",
            UnaryOp::Optional => "optional",
            UnaryOp::Star => "star",
            UnaryOp::NotCc => "notcc",
        }
    }

    pub fn apply(self, r: Regex) -> Regex {
        let b = Box::new(r);
        match self {
            UnaryOp::StartWith => Regex::StartWith(b),
            UnaryOp::EndWith => Regex::EndWith(b),
            UnaryOp::Contain => Regex::Contain(b),
            UnaryOp::Not => Regex::Not(b),
            UnaryOp::Optional => Regex::Optional(b),
            UnaryOp::Star => Regex::Star(b),
            UnaryOp::NotCc => Regex::NotCc(b),
        }
    }
}

impl BinaryOp {
    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Concat => "concat",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }

    pub fn apply(self, a: Regex, b: Regex) -> Regex {
        let (a, b) = (Box::new(a), Box::new(b));
        match self {
            BinaryOp::Concat => Regex::Concat(a, b),
            BinaryOp::And => Regex::And(a, b),
            BinaryOp::Or => Regex::Or(a, b),
        }
    }
}

// Shorthand constructors, used heavily by the sampler and the tests.
impl Regex {
    pub fn class(c: CharClass) -> Regex {
        Regex::Class(c)
    }

    /// Constant literal: a `Char` for one symbol, a `Str` otherwise.
    pub fn constant(text: &str) -> Regex {
        let mut chars = text.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Regex::Char(c),
            _ => Regex::Str(text.to_string()),
        }
    }

    pub fn startwith(r: Regex) -> Regex {
        Regex::StartWith(Box::new(r))
    }
    pub fn endwith(r: Regex) -> Regex {
        Regex::EndWith(Box::new(r))
    }
    pub fn contain(r: Regex) -> Regex {
        Regex::Contain(Box::new(r))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(r: Regex) -> Regex {
        Regex::Not(Box::new(r))
    }
    pub fn optional(r: Regex) -> Regex {
        Regex::Optional(Box::new(r))
    }
    pub fn star(r: Regex) -> Regex {
        Regex::Star(Box::new(r))
    }
    pub fn notcc(r: Regex) -> Regex {
        Regex::NotCc(Box::new(r))
    }
    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }
    pub fn and(a: Regex, b: Regex) -> Regex {
        Regex::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Regex, b: Regex) -> Regex {
        Regex::Or(Box::new(a), Box::new(b))
    }
    pub fn rep(r: Regex, k: u32) -> Regex {
        Regex::Rep(Box::new(r), Count::Value(k))
    }
    pub fn repatleast(r: Regex, k: u32) -> Regex {
        Regex::RepAtLeast(Box::new(r), Count::Value(k))
    }
    pub fn reprange(r: Regex, k1: u32, k2: u32) -> Regex {
        Regex::RepRange(Box::new(r), Count::Value(k1), Count::Value(k2))
    }

    /// Right-nested chain `op(x0, op(x1, ...))`. Panics on an empty list.
    pub fn chain(op: BinaryOp, parts: Vec<Regex>) -> Regex {
        let mut it = parts.into_iter().rev();
        let last = it.next().expect("chain of zero parts");
        it.fold(last, |acc, r| op.apply(r, acc))
    }

    /// Flattens the right spine of a binary operator: `op(a, op(b, c))` -> `[a, b, c]`.
    pub fn spine(&self, op: BinaryOp) -> Vec<&Regex> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match (op, cur) {
                (BinaryOp::Concat, Regex::Concat(a, b))
                | (BinaryOp::And, Regex::And(a, b))
                | (BinaryOp::Or, Regex::Or(a, b)) => {
                    out.push(a.as_ref());
                    cur = b;
                }
                _ => {
                    out.push(cur);
                    return out;
                }
            }
        }
    }

    /// Sub-expressions in left-to-right order.
    pub fn children(&self) -> Vec<&Regex> {
        match self {
            Regex::StartWith(a)
            | Regex::EndWith(a)
            | Regex::Contain(a)
            | Regex::Not(a)
            | Regex::Optional(a)
            | Regex::Star(a)
            | Regex::NotCc(a)
            | Regex::Rep(a, _)
            | Regex::RepAtLeast(a, _)
            | Regex::RepRange(a, _, _) => vec![a],
            Regex::Concat(a, b) | Regex::And(a, b) | Regex::Or(a, b) => vec![a, b],
            Regex::Class(_) | Regex::Char(_) | Regex::Str(_) | Regex::AnonConst | Regex::Hole => {
                Vec::new()
            }
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Regex> {
        match self {
            Regex::StartWith(a)
            | Regex::EndWith(a)
            | Regex::Contain(a)
            | Regex::Not(a)
            | Regex::Optional(a)
            | Regex::Star(a)
            | Regex::NotCc(a)
            | Regex::Rep(a, _)
            | Regex::RepAtLeast(a, _)
            | Regex::RepRange(a, _, _) => vec![a],
            Regex::Concat(a, b) | Regex::And(a, b) | Regex::Or(a, b) => vec![a, b],
            Regex::Class(_) | Regex::Char(_) | Regex::Str(_) | Regex::AnonConst | Regex::Hole => {
                Vec::new()
            }
        }
    }

    pub fn counts(&self) -> Vec<Count> {
        match self {
            Regex::Rep(_, k) | Regex::RepAtLeast(_, k) => vec![*k],
            Regex::RepRange(_, k1, k2) => vec![*k1, *k2],
            _ => Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(
            self,
            Regex::Class(_) | Regex::Char(_) | Regex::Str(_) | Regex::AnonConst | Regex::Hole
        )
    }

    /// Literal in the grammar sense: a class other than `<any>`/`<null>`, or a constant.
    pub fn is_literal(&self) -> bool {
        match self {
            Regex::Class(c) => !matches!(c, CharClass::Any | CharClass::Null),
            Regex::Char(_) | Regex::Str(_) => true,
            _ => false,
        }
    }

    /// True when neither expression nor count holes remain.
    pub fn is_complete(&self) -> bool {
        self.hole_count() == 0
    }

    pub fn hole_count(&self) -> usize {
        let own = usize::from(matches!(self, Regex::Hole))
            + self.counts().iter().filter(|c| **c == Count::Hole).count();
        own + self
            .children()
            .iter()
            .map(|c| c.hole_count())
            .sum::<usize>()
    }

    /// True when no anonymized placeholder remains.
    pub fn is_concrete(&self) -> bool {
        !matches!(self, Regex::AnonConst)
            && !self.counts().contains(&Count::Anon)
            && self.children().iter().all(|c| c.is_concrete())
    }

    /// Visits every node in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Regex)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Replaces the first hole (expression or count) in pre-order token order.
    /// Returns false when there is no hole or the first hole has the other kind.
    pub fn fill_first_hole(&mut self, fill: HoleFill) -> bool {
        matches!(self.fill_first_hole_inner(fill), FillOutcome::Filled)
    }

    fn fill_first_hole_inner(&mut self, fill: HoleFill) -> FillOutcome {
        if matches!(self, Regex::Hole) {
            return match fill {
                HoleFill::Expr(r) => {
                    *self = r;
                    FillOutcome::Filled
                }
                HoleFill::Count(_) => FillOutcome::Mismatch,
            };
        }
        let mut fill = fill;
        for c in self.children_mut() {
            match c.fill_first_hole_inner(fill) {
                FillOutcome::NotFound(f) => fill = f,
                done => return done,
            }
        }
        let counts: Vec<&mut Count> = match self {
            Regex::Rep(_, k) | Regex::RepAtLeast(_, k) => vec![k],
            Regex::RepRange(_, k1, k2) => vec![k1, k2],
            _ => Vec::new(),
        };
        for k in counts {
            if *k == Count::Hole {
                return match fill {
                    HoleFill::Count(v) => {
                        *k = Count::Value(v);
                        FillOutcome::Filled
                    }
                    HoleFill::Expr(_) => FillOutcome::Mismatch,
                };
            }
        }
        FillOutcome::NotFound(fill)
    }

    /// Kind of the first hole in pre-order, if any.
    pub fn first_hole(&self) -> Option<HoleKind> {
        if matches!(self, Regex::Hole) {
            return Some(HoleKind::Expr);
        }
        for c in self.children() {
            if let Some(h) = c.first_hole() {
                return Some(h);
            }
        }
        self.counts()
            .contains(&Count::Hole)
            .then_some(HoleKind::Count)
    }
}

enum FillOutcome {
    Filled,
    Mismatch,
    NotFound(HoleFill),
}

/// Replacement for a hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoleFill {
    Expr(Regex),
    Count(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HoleKind {
    Expr,
    Count,
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_dsl(self))
    }
}

impl std::str::FromStr for Regex {
    type Err = DslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dsl(s)
    }
}
