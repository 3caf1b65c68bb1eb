//! The structured regex grammar: three templates over constraint (`Cons`)
//! and component (`Comp`) sub-regexes, macro rules, a recognizer, and an
//! adaptive sampler.

mod config;
pub(crate) mod recognize;
mod sampler;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::AutomatonError;

pub use config::GrammarConfig;
pub use recognize::{derivable, semantic_complexity, semantic_complexity_as, template_of};
pub use sampler::{
    adapt_weights, literal_symbols, sample_batch, sample_regex, slot_rng, Choice, DerivationState,
    Pooled,
};

/// Top-level shape of a sampled regex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    Intersection,
    Concatenation,
    Separation,
}

impl Template {
    pub const ALL: [Template; 3] = [
        Template::Intersection,
        Template::Concatenation,
        Template::Separation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Intersection => "intersection",
            Template::Concatenation => "concatenation",
            Template::Separation => "separation",
        }
    }

    fn index(self) -> u64 {
        match self {
            Template::Intersection => 0,
            Template::Concatenation => 1,
            Template::Separation => 2,
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Template {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "intersection" | "int" => Ok(Template::Intersection),
            "concatenation" | "cat" => Ok(Template::Concatenation),
            "separation" | "sep" => Ok(Template::Separation),
            _ => Err(GrammarError::Config(format!("unknown template `{s}`"))),
        }
    }
}

/// Nonterminals of the grammar with configurable production weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nonterminal {
    Cons,
    BasicCons,
    LengthCons,
    MacroCons,
    CondContainCons,
    ConsExpr,
    MinConsExpr,
    Comp,
    BasicComp,
    MacroComp,
    CompExpr,
    Seg,
    Literal,
    CC,
    LiteralSet,
}

impl Nonterminal {
    pub const ALL: [Nonterminal; 15] = [
        Nonterminal::Cons,
        Nonterminal::BasicCons,
        Nonterminal::LengthCons,
        Nonterminal::MacroCons,
        Nonterminal::CondContainCons,
        Nonterminal::ConsExpr,
        Nonterminal::MinConsExpr,
        Nonterminal::Comp,
        Nonterminal::BasicComp,
        Nonterminal::MacroComp,
        Nonterminal::CompExpr,
        Nonterminal::Seg,
        Nonterminal::Literal,
        Nonterminal::CC,
        Nonterminal::LiteralSet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Nonterminal::Cons => "Cons",
            Nonterminal::BasicCons => "BasicCons",
            Nonterminal::LengthCons => "LengthCons",
            Nonterminal::MacroCons => "MacroCons",
            Nonterminal::CondContainCons => "CondContainCons",
            Nonterminal::ConsExpr => "ConsExpr",
            Nonterminal::MinConsExpr => "MinConsExpr",
            Nonterminal::Comp => "Comp",
            Nonterminal::BasicComp => "BasicComp",
            Nonterminal::MacroComp => "MacroComp",
            Nonterminal::CompExpr => "CompExpr",
            Nonterminal::Seg => "Seg",
            Nonterminal::Literal => "Literal",
            Nonterminal::CC => "CC",
            Nonterminal::LiteralSet => "LiteralSet",
        }
    }

    pub fn from_name(s: &str) -> Option<Nonterminal> {
        Nonterminal::ALL.iter().copied().find(|n| n.name() == s)
    }

    /// Production names, in weight-vector order.
    pub fn productions(self) -> &'static [&'static str] {
        match self {
            Nonterminal::Cons => &["basic", "length", "macro"],
            Nonterminal::BasicCons => &["not", "startwith", "endwith", "contain"],
            Nonterminal::LengthCons => &["rep", "repatleast", "reprange"],
            Nonterminal::MacroCons => &["consistof", "advstartwith", "advendwith", "condcontain"],
            Nonterminal::CondContainCons => &["literal_notcc", "notcc_literal"],
            Nonterminal::ConsExpr => &["literalset", "minconsexpr", "concat"],
            Nonterminal::MinConsExpr => &["literal", "rep"],
            Nonterminal::Comp => &["optional", "basic", "macro"],
            Nonterminal::BasicComp => &["expr", "rep", "repatleast", "reprange"],
            Nonterminal::MacroComp => &["rep", "repatleast", "reprange"],
            Nonterminal::CompExpr => &["literal", "literalset"],
            Nonterminal::Seg => &["inttemp", "cattemp"],
            Nonterminal::Literal => &["cc", "const", "str"],
            Nonterminal::CC => &["num", "let", "low", "cap", "spec"],
            Nonterminal::LiteralSet => &["literal", "or"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrammarError {
    #[error("no valid {template} regex within {attempts} attempts")]
    BudgetExhausted { template: Template, attempts: usize },
    #[error("every production of {0} has zero weight")]
    DeadEnd(&'static str),
    #[error("invalid grammar configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}
