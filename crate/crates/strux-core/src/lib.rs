//! Deterministic generation and evaluation of structure-reading benchmarks.
//!
//! The crate builds semantically void but syntactically valid documents in
//! eight text formats, derives question/answer pairs for them with exact
//! procedural oracles, and scores model responses against those answers.

pub mod corrupt;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod mockserver;
pub mod prompts;
pub mod render;
pub mod rng;
pub mod runner;
pub mod tabular;
pub mod tasks;
pub mod tree;

pub use error::{Error, Result};
