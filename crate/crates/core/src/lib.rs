//! Dependency parsing with bracket sequence labelling, maximum spanning
//! arborescence decoding and a left-to-right transition system, plus a
//! harness for measuring parsing speed, training energy and Pareto fronts.

pub mod bench;
pub mod cli;
pub mod conllu;
pub mod error;
pub mod eval;
pub mod graph;
pub mod scoring;
pub mod seqlab;
pub mod transition;
pub mod tree;

pub use error::{Error, Result};
