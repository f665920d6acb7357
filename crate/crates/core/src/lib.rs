//! Neuron mining over source-code embeddings.
//!
//! The pipeline: ingest a corpus of Java-like methods, embed each method as a
//! fixed-dimension vector (token or AST skip-gram, or imported vectors), train
//! a dense autoencoder on the vectors, then mine the probed layers (code,
//! dec1, dec2) for neurons that detect program properties — via per-task
//! threshold probing and via task-independent correlation and entropy scores.

pub mod autonet;
pub mod corpus;
pub mod embed;
pub mod labels;
pub mod lexparse;
pub mod neuronscore;
pub mod probe;
pub mod report;
pub mod seeds;


pub use corpus::{CorpusStore, Method, SplitTag};

pub use labels::LabelPolicy;
pub use lexparse::{SyntaxTree, Token};


