//! Over- and under-approximations of partially built regexes, used to prune
//! search states that no completion can make consistent with the examples.
//!
//! A hole in positive context (an even number of enclosing `not`/`notcc`)
//! becomes `Σ*` in the over-approximation and `∅` in the under-approximation;
//! negative context swaps the two. Count holes take the loosest bounds
//! `[0, ∞)` when over-approximating and yield `∅` when under-approximating.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::Alphabet;
use crate::automaton::{AutomatonError, Compiler, Dfa};
use crate::dsl::{parse_token_prefix, to_tokens, Count, DslError, Regex};

/// A regex whose unexpanded positions are holes, with the pre-order token
/// prefix it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialRegex {
    ast: Regex,
    tokens: Vec<String>,
}

impl PartialRegex {
    /// `["rep", "(", "<num>", ","]` becomes `rep(<num>, ?)` with a count hole.
    pub fn from_token_prefix<S: AsRef<str>>(tokens: &[S]) -> Result<PartialRegex, DslError> {
        let ast = parse_token_prefix(tokens)?;
        Ok(PartialRegex {
            ast,
            tokens: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
        })
    }

    pub fn from_ast(ast: Regex) -> PartialRegex {
        let tokens = if ast.is_complete() {
            to_tokens(&ast)
        } else {
            Vec::new()
        };
        PartialRegex { ast, tokens }
    }

    pub fn ast(&self) -> &Regex {
        &self.ast
    }

    /// The consumed prefix; empty for a partial regex built from an AST.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_complete(&self) -> bool {
        self.ast.is_complete()
    }

    /// Polarity of every expression hole, in pre-order.
    pub fn hole_polarities(&self) -> Vec<Polarity> {
        let mut out = Vec::new();
        polarities(&self.ast, Polarity::Positive, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

fn polarities(r: &Regex, pol: Polarity, out: &mut Vec<Polarity>) {
    match r {
        Regex::Hole => out.push(pol),
        Regex::Not(x) | Regex::NotCc(x) => polarities(x, pol.flip(), out),
        _ => {
            for c in r.children() {
                polarities(c, pol, out);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    Over,
    Under,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Over => Side::Under,
            Side::Under => Side::Over,
        }
    }
}

/// Approximation engine with a memo keyed by partial subtree, so prefixes
/// that share structure reuse automata as the search extends them. One
/// instance must not be shared between threads without exclusion.
#[derive(Debug, Clone)]
pub struct Approximator {
    compiler: Compiler,
    memo: HashMap<(Regex, Side), Dfa>,
}

impl Approximator {
    pub fn new(alphabet: Arc<Alphabet>) -> Approximator {
        Approximator::with_compiler(Compiler::new(alphabet))
    }

    pub fn with_compiler(compiler: Compiler) -> Approximator {
        Approximator {
            compiler,
            memo: HashMap::new(),
        }
    }

    pub fn compiler(&mut self) -> &mut Compiler {
        &mut self.compiler
    }

    /// Superset of the language of every completion of `r`.
    pub fn over(&mut self, r: &Regex) -> Result<Dfa, AutomatonError> {
        self.approx(r, Side::Over)
    }

    /// Subset of the language of every completion of `r`.
    pub fn under(&mut self, r: &Regex) -> Result<Dfa, AutomatonError> {
        self.approx(r, Side::Under)
    }

    /// False only when no completion of `r` accepts every string of `pos`
    /// and rejects every string of `neg`. Automaton errors never prune.
    pub fn feasible<S: AsRef<str>>(&mut self, r: &Regex, pos: &[S], neg: &[S]) -> bool {
        if !pos.is_empty() {
            match self.over(r) {
                Ok(d) if pos.iter().any(|s| !d.matches(s.as_ref())) => return false,
                _ => {}
            }
        }
        if !neg.is_empty() {
            match self.under(r) {
                Ok(d) if neg.iter().any(|s| d.matches(s.as_ref())) => return false,
                _ => {}
            }
        }
        true
    }

    fn approx(&mut self, r: &Regex, side: Side) -> Result<Dfa, AutomatonError> {
        if r.is_complete() {
            return self.compiler.compile(r);
        }
        let key = (r.clone(), side);
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let d = self.build(r, side)?;
        if self.memo.len() > 50_000 {
            self.memo.clear();
        }
        self.memo.insert(key, d.clone());
        Ok(d)
    }

    fn build(&mut self, r: &Regex, side: Side) -> Result<Dfa, AutomatonError> {
        let c = &self.compiler;
        let (universal, empty) = (c.universal(), c.empty());
        let sigma1 = Dfa::symbols(c.alphabet(), c.alphabet().full()).with_cap(c.cap());
        Ok(match r {
            Regex::Hole => match side {
                Side::Over => universal,
                Side::Under => empty,
            },
            Regex::StartWith(x) => self.approx(x, side)?.concat(&universal)?,
            Regex::EndWith(x) => universal.concat(&self.approx(x, side)?)?,
            Regex::Contain(x) => universal
                .concat(&self.approx(x, side)?)?
                .concat(&universal)?,
            Regex::Not(x) => self.approx(x, side.flip())?.complement(),
            Regex::NotCc(x) => sigma1.difference(&self.approx(x, side.flip())?)?,
            Regex::Optional(x) => self.approx(x, side)?.optional()?,
            Regex::Star(x) => self.approx(x, side)?.star()?,
            Regex::Concat(x, y) => {
                let dx = self.approx(x, side)?;
                dx.concat(&self.approx(y, side)?)?
            }
            Regex::And(x, y) => {
                let dx = self.approx(x, side)?;
                dx.intersect(&self.approx(y, side)?)?
            }
            Regex::Or(x, y) => {
                let dx = self.approx(x, side)?;
                dx.union(&self.approx(y, side)?)?
            }
            Regex::Rep(x, k) => self.repeat(x, *k, *k, side)?,
            Regex::RepAtLeast(x, k) => match (side, k.value()) {
                (Side::Under, None) => empty,
                (_, lo) => self.approx(x, side)?.repeat(lo.unwrap_or(0), None)?,
            },
            Regex::RepRange(x, k1, k2) => self.repeat(x, *k1, *k2, side)?,
            // concrete leaves are handled by the compiler; an anonymized
            // constant is a literal of unknown value
            Regex::AnonConst => match side {
                Side::Over => universal,
                Side::Under => empty,
            },
            Regex::Class(_) | Regex::Char(_) | Regex::Str(_) => self.compiler.compile(r)?,
        })
    }

    fn repeat(
        &mut self,
        x: &Regex,
        k1: Count,
        k2: Count,
        side: Side,
    ) -> Result<Dfa, AutomatonError> {
        let (lo, hi) = (k1.value(), k2.value());
        match (side, lo, hi) {
            (Side::Under, None, _) | (Side::Under, _, None) => Ok(self.compiler.empty()),
            _ => self.approx(x, side)?.repeat(lo.unwrap_or(0), hi),
        }
    }
}

/// Over-approximation over the standard alphabet.
pub fn over_approx(p: &PartialRegex) -> Result<Dfa, AutomatonError> {
    Approximator::new(Alphabet::standard()).over(p.ast())
}

/// Under-approximation over the standard alphabet.
pub fn under_approx(p: &PartialRegex) -> Result<Dfa, AutomatonError> {
    Approximator::new(Alphabet::standard()).under(p.ast())
}

/// Pruning oracle over the standard alphabet.
pub fn feasible<S: AsRef<str>>(p: &PartialRegex, pos: &[S], neg: &[S]) -> bool {
    Approximator::new(Alphabet::standard()).feasible(p.ast(), pos, neg)
}
