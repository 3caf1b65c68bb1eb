//! Structured regex sampling, distinguishing-example generation and
//! example-guided regex synthesis.

pub mod alphabet;
pub mod approx;
pub mod automaton;
pub mod dataset;
pub mod dsl;
pub mod example_gen;
pub mod grammar;
pub mod synth;
