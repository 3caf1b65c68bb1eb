//! Example-guided synthesis: beam search over template-grammar derivations
//! with approximation-based pruning, k-best consistency filtering, and
//! DFA-equivalence evaluation.

mod beam;
mod eval;
mod space;

use std::time::Duration;

use thiserror::Error;

use crate::automaton::compile;
use crate::dsl::{DslError, Regex};
use crate::grammar::Template;

pub use beam::{
    default_scorer, synth_beam, DefaultScorer, Outcome, Scorer, SynthConfig, SynthResult,
};
pub use eval::{evaluate, parse_predictions, write_predictions, EvalReport, TaskOutcome};
pub use space::{Production, Space, Sym};

pub const DEFAULT_BEAM: usize = 20;
pub const DEFAULT_K: usize = 20;
pub const DEFAULT_BUDGET: usize = 20_000;

/// Examples plus search limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisTask {
    pub pos: Vec<String>,
    pub neg: Vec<String>,
    pub template: Option<Template>,
    pub beam: usize,
    /// Maximum number of generated search states.
    pub budget: usize,
    pub time_limit: Option<Duration>,
    pub k: usize,
}

impl SynthesisTask {
    pub fn new(pos: Vec<String>, neg: Vec<String>) -> SynthesisTask {
        SynthesisTask {
            pos,
            neg,
            template: None,
            beam: DEFAULT_BEAM,
            budget: DEFAULT_BUDGET,
            time_limit: None,
            k: DEFAULT_K,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("{predictions} prediction lists for {gold} gold regexes")]
    Misaligned { predictions: usize, gold: usize },
    #[error("line {line}: {source}")]
    BadPrediction { line: usize, source: DslError },
}

/// Accepts every positive and rejects every negative. Regexes that cannot
/// be compiled are never consistent.
pub fn is_consistent<S: AsRef<str>>(r: &Regex, pos: &[S], neg: &[S]) -> bool {
    match compile(r) {
        Ok(d) => {
            pos.iter().all(|s| d.matches(s.as_ref())) && !neg.iter().any(|s| d.matches(s.as_ref()))
        }
        Err(_) => false,
    }
}

/// The earliest candidate consistent with the examples.
pub fn filter_kbest<'a, S: AsRef<str>>(
    candidates: &'a [Regex],
    pos: &[S],
    neg: &[S],
) -> Option<&'a Regex> {
    candidates.iter().find(|r| is_consistent(r, pos, neg))
}
