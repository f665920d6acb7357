//! Method embeddings by three routes: token-sentence skip-gram, AST-sentence
//! skip-gram, and import of externally computed vectors.
//!
//! A method's vector is the mean of the input-matrix vectors of all
//! in-vocabulary word occurrences in its sentences; out-of-vocabulary words
//! are skipped so rare eval-set tokens cannot corrupt vectors.
//!
//! Vectors file format: line 1 is `<count> <dim>`, then one line per method,
//! `<id> <v1> ... <vdim>`, space separated, shortest round-trip decimals, LF
//! endings.

mod skipgram;

pub use skipgram::{example_gradients, example_loss, train_skipgram, VocabEmbedding};

use crate::corpus::Method;
use crate::lexparse::{self, LexError, SyntaxTree, Token, TokenKind};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

/// An ordered, non-empty word sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub words: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Token,
    Ast,
    Imported,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Token => "token",
            Provenance::Ast => "ast",
            Provenance::Imported => "imported",
        }
    }
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("no (center, context) pairs to train on")]
    NoPairs,
    #[error("method '{id}' has no in-vocabulary words")]
    NoVocabularyOverlap { id: String },
    #[error("line {row}: expected {expected} values, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {row}: non-finite value")]
    NonFinite { row: usize },
    #[error("line {row}: dimension {found} does not match expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {row}: malformed: {message}")]
    Malformed { row: usize, message: String },
    #[error("vector for '{id}' has wrong length or non-finite entries")]
    BadVector { id: String },
    #[error("duplicate vector id '{id}'")]
    DuplicateId { id: String },
    #[error("no vector for method '{id}'")]
    MissingId { id: String },
}

/// Fixed-dimension vectors keyed by method id, in insertion order. Never
/// contains NaN or infinity (checked on every insert).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    provenance: Provenance,
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingSet {
    pub fn new(dim: usize, provenance: Provenance) -> Self {
        EmbeddingSet {
            dim,
            provenance,
            ids: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<(), EmbedError> {
        let id = id.into();
        if vector.len() != self.dim || vector.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::BadVector { id });
        }
        if self.index.contains_key(&id) {
            return Err(EmbedError::DuplicateId { id });
        }
        self.index.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.vectors[i].as_slice())
    }

    /// Iteration order is insertion order; downstream activation matrices
    /// keep their columns in this order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids
            .iter()
            .map(|s| s.as_str())
            .zip(self.vectors.iter().map(|v| v.as_slice()))
    }

    /// A new set containing `ids` in the given order.
    pub fn subset(&self, ids: &[String]) -> Result<EmbeddingSet, EmbedError> {
        let mut out = EmbeddingSet::new(self.dim, self.provenance);
        for id in ids {
            let v = self
                .get(id)
                .ok_or_else(|| EmbedError::MissingId { id: id.clone() })?;
            out.insert(id.clone(), v.to_vec())?;
        }
        Ok(out)
    }
}

/// One sentence per statement: the token stream split at `;` and block
/// boundaries, delimiters dropped.
pub fn token_sentences(method: &Method) -> Result<Vec<Sentence>, EmbedError> {
    let tokens = lexparse::tokenize(&method.source)?;
    Ok(split_statements(&tokens))
}

fn split_statements(tokens: &[Token]) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for t in tokens {
        if t.kind == TokenKind::Punctuation && matches!(t.text.as_str(), ";" | "{" | "}") {
            if !current.is_empty() {
                sentences.push(Sentence {
                    words: std::mem::take(&mut current),
                });
            }
            continue;
        }
        current.push(t.text.clone());
    }
    if !current.is_empty() {
        sentences.push(Sentence { words: current });
    }
    sentences
}

/// AST sentences: one depth-first sentence of node-kind names for the method
/// root and for each block subtree, plus one root-to-leaf path sentence per
/// leaf with the leaf's spelling appended when it has one.
pub fn ast_sentences(tree: &SyntaxTree) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    collect_dfs(tree, &mut sentences);
    let mut stack = Vec::new();
    collect_paths(tree, &mut stack, &mut sentences);
    sentences
}

fn collect_dfs(node: &SyntaxTree, out: &mut Vec<Sentence>) {
    use crate::lexparse::NodeKind;
    if matches!(node.kind, NodeKind::Method | NodeKind::Block) {
        let mut words = Vec::new();
        node.walk(&mut |n| words.push(n.kind.name().to_string()));
        out.push(Sentence { words });
    }
    for child in &node.children {
        collect_dfs(child, out);
    }
}

fn collect_paths(node: &SyntaxTree, stack: &mut Vec<String>, out: &mut Vec<Sentence>) {
    stack.push(node.kind.name().to_string());
    if node.is_leaf() {
        let mut words = stack.clone();
        if let Some(text) = &node.text {
            words.push(text.clone());
        }
        out.push(Sentence { words });
    } else {
        for child in &node.children {
            collect_paths(child, stack, out);
        }
    }
    stack.pop();
}

/// Mean of the input-matrix vectors over every in-vocabulary word
/// occurrence. Out-of-vocabulary words are skipped.
pub fn embed_method(
    ve: &VocabEmbedding,
    id: &str,
    sentences: &[Sentence],
) -> Result<Vec<f64>, EmbedError> {
    let dim = ve.dim();
    let mut acc = vec![0.0f64; dim];
    let mut occurrences = 0usize;
    for s in sentences {
        for w in &s.words {
            if let Some(i) = ve.word_index(w) {
                let v = ve.input_vector(i);
                for d in 0..dim {
                    acc[d] += v[d];
                }
                occurrences += 1;
            }
        }
    }
    if occurrences == 0 {
        return Err(EmbedError::NoVocabularyOverlap { id: id.to_string() });
    }
    for x in acc.iter_mut() {
        *x /= occurrences as f64;
    }
    Ok(acc)
}

/// Read a vectors file; errors carry the offending 1-based line number.
pub fn import_vectors(
    path: impl AsRef<Path>,
    expected_dim: Option<usize>,
) -> Result<EmbeddingSet, EmbedError> {
    let file = File::open(path.as_ref())?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| EmbedError::Malformed {
            row: 1,
            message: "missing header".to_string(),
        })?;
    let mut parts = header.split_whitespace();
    let (count, dim) = match (
        parts.next().and_then(|v| v.parse::<usize>().ok()),
        parts.next().and_then(|v| v.parse::<usize>().ok()),
        parts.next(),
    ) {
        (Some(c), Some(d), None) => (c, d),
        _ => {
            return Err(EmbedError::Malformed {
                row: 1,
                message: format!("bad header '{header}', expected '<count> <dim>'"),
            })
        }
    };
    if let Some(expected) = expected_dim {
        if dim != expected {
            return Err(EmbedError::DimensionMismatch {
                row: 1,
                expected,
                found: dim,
            });
        }
    }

    let mut set = EmbeddingSet::new(dim, Provenance::Imported);
    let mut row = 1usize;
    for line in lines {
        let line = line?;
        row += 1;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let id = fields
            .next()
            .ok_or_else(|| EmbedError::Malformed {
                row,
                message: "missing id".to_string(),
            })?
            .to_string();
        let mut vector = Vec::with_capacity(dim);
        for field in fields {
            let value: f64 = field.parse().map_err(|_| EmbedError::Malformed {
                row,
                message: format!("bad float '{field}'"),
            })?;
            if !value.is_finite() {
                return Err(EmbedError::NonFinite { row });
            }
            vector.push(value);
        }
        if vector.len() != dim {
            return Err(EmbedError::Ragged {
                row,
                expected: dim,
                found: vector.len(),
            });
        }
        if set.index.contains_key(&id) {
            return Err(EmbedError::DuplicateId { id });
        }
        set.insert(id, vector)?;
    }
    if set.len() != count {
        return Err(EmbedError::Malformed {
            row,
            message: format!("header declared {count} vectors, found {}", set.len()),
        });
    }
    Ok(set)
}

/// Write a vectors file; `import_vectors(export_vectors(s)) == s` bit for
/// bit (floats render as shortest round-trip decimals).
pub fn export_vectors(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<(), EmbedError> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    write!(w, "{} {}\n", set.len(), set.dim())?;
    for (id, vector) in set.iter() {
        write!(w, "{id}")?;
        for v in vector {
            write!(w, " {v}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
