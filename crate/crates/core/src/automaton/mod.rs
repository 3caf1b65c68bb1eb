//! Deterministic automata over partitioned alphabets, compilation of DSL
//! regexes into them, and example sampling.

mod compile;
mod dfa;
mod sample;

use thiserror::Error;

pub use compile::{compile, compile_with, Compiler};
pub use dfa::{Dfa, DEFAULT_STATE_CAP};
pub use sample::{
    count_in_window, default_window, enumerate_window, sample_accepted, Coverage,
    DEFAULT_WINDOW_SLACK,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("automaton exceeds the state cap of {cap}")]
    StateCapExceeded { cap: usize },
    #[error("automata are defined over different alphabets")]
    AlphabetMismatch,
    #[error("expression contains holes or anonymized placeholders")]
    NotConcrete,
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(char),
    #[error("no accepted string has length in [{min}, {max}]")]
    InfeasibleWindow { min: usize, max: usize },
    #[error("language is empty")]
    EmptyLanguage,
}
