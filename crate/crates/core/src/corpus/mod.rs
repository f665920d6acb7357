//! Corpus ingestion, splitting, and sampling.
//!
//! The corpus is a JSONL file, one method per line, with required keys
//! `id`, `name`, `source` and optional `repo`. Synthetic corpora carry an
//! extra `cc_true` field recording the generator's known complexity. The
//! store is the single source of truth for method identity and keeps the
//! input file order.

mod synth;

pub use synth::gen_synthetic;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

/// One corpus item: a single Java-like method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub id: String,
    pub name: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repo: Option<String>,
    /// Generator-recorded cyclomatic complexity, present on synthetic corpora.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc_true: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitTag {
    Train,
    Eval,
}

impl SplitTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Eval => "eval",
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: field '{field}' must be non-empty")]
    EmptyField { line: usize, field: &'static str },
    #[error("duplicate method id '{id}' (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("corpus is empty")]
    Empty,
    #[error("no eval methods in class {class}")]
    EmptyClass { class: u8 },
    #[error("method '{id}' has no label")]
    MissingLabel { id: String },
}

/// Ordered corpus with a train/eval tag per method. Read-only after
/// construction; construction is single-threaded.
#[derive(Debug, Clone)]
pub struct CorpusStore {
    methods: Vec<Method>,
    split: Vec<SplitTag>,
    index: HashMap<String, usize>,
}

impl CorpusStore {
    pub fn from_methods(methods: Vec<Method>) -> Result<Self, CorpusError> {
        let mut index = HashMap::with_capacity(methods.len());
        for (i, m) in methods.iter().enumerate() {
            if index.insert(m.id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId {
                    id: m.id.clone(),
                    line: i + 1,
                });
            }
        }
        let split = vec![SplitTag::Train; methods.len()];
        Ok(CorpusStore {
            methods,
            split,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn methods(&self) -> &[Method] {
        &self.methods
    }

    pub fn get(&self, id: &str) -> Option<&Method> {
        self.index.get(id).map(|&i| &self.methods[i])
    }

    pub fn split_of(&self, id: &str) -> Option<SplitTag> {
        self.index.get(id).map(|&i| self.split[i])
    }

    /// Methods and tags in corpus order.
    pub fn iter_tagged(&self) -> impl Iterator<Item = (&Method, SplitTag)> {
        self.methods.iter().zip(self.split.iter().copied())
    }

    pub fn ids_in(&self, tag: SplitTag) -> Vec<&str> {
        self.iter_tagged()
            .filter(|&(_, t)| t == tag)
            .map(|(m, _)| m.id.as_str())
            .collect()
    }

    /// Restore split tags (e.g. from a cached stage). Unknown ids are
    /// ignored; methods absent from `tags` keep their current tag.
    pub fn apply_split(&mut self, tags: &HashMap<String, SplitTag>) {
        for (i, m) in self.methods.iter().enumerate() {
            if let Some(&t) = tags.get(&m.id) {
                self.split[i] = t;
            }
        }
    }
}

/// Read a JSONL corpus, preserving line order. Duplicate ids and empty
/// required fields are rejected with the offending line number.
pub fn ingest_jsonl(path: impl AsRef<Path>) -> Result<CorpusStore, CorpusError> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    let mut methods = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let method: Method =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: lineno,
                message: e.to_string(),
            })?;
        if method.id.is_empty() {
            return Err(CorpusError::EmptyField {
                line: lineno,
                field: "id",
            });
        }
        if method.name.is_empty() {
            return Err(CorpusError::EmptyField {
                line: lineno,
                field: "name",
            });
        }
        if method.source.is_empty() {
            return Err(CorpusError::EmptyField {
                line: lineno,
                field: "source",
            });
        }
        if !seen.insert(method.id.clone()) {
            return Err(CorpusError::DuplicateId {
                id: method.id,
                line: lineno,
            });
        }
        methods.push(method);
    }
    CorpusStore::from_methods(methods)
}

/// Write the corpus back out as JSONL in store order.
pub fn write_jsonl(store: &CorpusStore, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let file = File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    for m in store.methods() {
        let line = serde_json::to_string(m).expect("method serializes");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

/// Tag exactly `round(train_fraction * len)` methods as train, the rest as
/// eval, via a seeded shuffle. Same seed, same split.
pub fn split(
    store: &mut CorpusStore,
    train_fraction: f64,
    seed: u64,
) -> Result<(), CorpusError> {
    if store.is_empty() {
        return Err(CorpusError::Empty);
    }
    let n = store.len();
    let train_count = ((train_fraction * n as f64).round() as usize).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    for tag in store.split.iter_mut() {
        *tag = SplitTag::Eval;
    }
    for &i in order.iter().take(train_count) {
        store.split[i] = SplitTag::Train;
    }
    Ok(())
}

/// Draw up to `per_class` eval methods from each label class, deterministic
/// in the seed, classes interleaved 0,1,0,1,... with the longer class's
/// remainder appended.
pub fn balanced_sample(
    store: &CorpusStore,
    labels: &HashMap<String, u8>,
    per_class: usize,
    seed: u64,
) -> Result<Vec<(String, u8)>, CorpusError> {
    let mut class0 = Vec::new();
    let mut class1 = Vec::new();
    for (m, tag) in store.iter_tagged() {
        if tag != SplitTag::Eval {
            continue;
        }
        match labels.get(&m.id) {
            Some(0) => class0.push(m.id.clone()),
            Some(1) => class1.push(m.id.clone()),
            Some(_) | None => {
                return Err(CorpusError::MissingLabel { id: m.id.clone() });
            }
        }
    }
    if per_class == 0 {
        return Ok(Vec::new());
    }
    if class0.is_empty() {
        return Err(CorpusError::EmptyClass { class: 0 });
    }
    if class1.is_empty() {
        return Err(CorpusError::EmptyClass { class: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    class0.shuffle(&mut rng);
    class1.shuffle(&mut rng);
    class0.truncate(per_class);
    class1.truncate(per_class);
    let mut out = Vec::with_capacity(class0.len() + class1.len());
    let longest = class0.len().max(class1.len());
    for i in 0..longest {
        if let Some(id) = class0.get(i) {
            out.push((id.clone(), 0));
        }
        if let Some(id) = class1.get(i) {
            out.push((id.clone(), 1));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_lines(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f
    }

    fn method(id: &str) -> Method {
        Method {
            id: id.to_string(),
            name: format!("name{id}"),
            source: "int f(){return 1;}".to_string(),
            repo: None,
            cc_true: None,
        }
    }

    #[test]
    fn ingest_preserves_order() {
        let f = write_lines(&[
            r#"{"id":"m1","name":"a","source":"void a(){}"}"#,
            r#"{"id":"m2","name":"b","source":"void b(){}"}"#,
            r#"{"id":"m3","name":"c","source":"void c(){}","repo":"r"}"#,
        ]);
        let store = ingest_jsonl(f.path()).unwrap();
        let ids: Vec<&str> = store.methods().iter().map(|m| m.id.as_str()).collect();
        assert_eq!(ids, ["m1", "m2", "m3"]);
        assert_eq!(store.get("m3").unwrap().repo.as_deref(), Some("r"));
    }

    #[test]
    fn ingest_rejects_duplicate_id() {
        let f = write_lines(&[
            r#"{"id":"m1","name":"a","source":"void a(){}"}"#,
            r#"{"id":"m1","name":"b","source":"void b(){}"}"#,
        ]);
        let err = ingest_jsonl(f.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("m1"), "error should cite the id: {msg}");
    }

    #[test]
    fn ingest_names_line_of_malformed_record() {
        let f = write_lines(&[
            r#"{"id":"m1","name":"a","source":"void a(){}"}"#,
            "not json",
        ]);
        let err = ingest_jsonl(f.path()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn ingest_empty_file_is_empty_store() {
        let f = write_lines(&[]);
        let store = ingest_jsonl(f.path()).unwrap();
        assert!(store.is_empty());
    }

    #[test]
    fn jsonl_round_trip() {
        let methods = vec![
            Method {
                id: "m1".into(),
                name: "alpha".into(),
                source: "int f(){return 1;}".into(),
                repo: Some("r1".into()),
                cc_true: Some(1),
            },
            method("m2"),
        ];
        let store = CorpusStore::from_methods(methods.clone()).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_jsonl(&store, f.path()).unwrap();
        let back = ingest_jsonl(f.path()).unwrap();
        assert_eq!(back.methods(), store.methods());
    }

    #[test]
    fn split_counts_and_determinism() {
        let methods: Vec<Method> = (0..100).map(|i| method(&format!("m{i}"))).collect();
        let mut store = CorpusStore::from_methods(methods).unwrap();
        split(&mut store, 0.75, 7).unwrap();
        let train = store.ids_in(SplitTag::Train).len();
        let eval = store.ids_in(SplitTag::Eval).len();
        assert_eq!((train, eval), (75, 25));

        let mut store2 =
            CorpusStore::from_methods((0..100).map(|i| method(&format!("m{i}"))).collect())
                .unwrap();
        split(&mut store2, 0.75, 7).unwrap();
        for (a, b) in store.iter_tagged().zip(store2.iter_tagged()) {
            assert_eq!(a.1, b.1);
        }
    }

    #[test]
    fn split_rounds_single_method_to_train() {
        let mut store = CorpusStore::from_methods(vec![method("m0")]).unwrap();
        split(&mut store, 0.75, 1).unwrap();
        assert_eq!(store.ids_in(SplitTag::Train).len(), 1);
        assert_eq!(store.ids_in(SplitTag::Eval).len(), 0);
    }

    #[test]
    fn split_is_partition() {
        let methods: Vec<Method> = (0..33).map(|i| method(&format!("m{i}"))).collect();
        let mut store = CorpusStore::from_methods(methods).unwrap();
        split(&mut store, 0.4, 3).unwrap();
        let train = store.ids_in(SplitTag::Train).len();
        let eval = store.ids_in(SplitTag::Eval).len();
        assert_eq!(train + eval, 33);
        assert_eq!(train, (0.4f64 * 33.0).round() as usize);
    }

    fn labelled_store(n0: usize, n1: usize) -> (CorpusStore, HashMap<String, u8>) {
        let total = n0 + n1;
        let methods: Vec<Method> = (0..total).map(|i| method(&format!("m{i}"))).collect();
        let mut store = CorpusStore::from_methods(methods).unwrap();
        // All eval so class sizes are exact.
        split(&mut store, 0.0, 1).unwrap();
        let labels: HashMap<String, u8> = (0..total)
            .map(|i| (format!("m{i}"), u8::from(i >= n0)))
            .collect();
        (store, labels)
    }

    #[test]
    fn balanced_sample_caps_by_availability() {
        let (store, labels) = labelled_store(40, 60);
        let sample = balanced_sample(&store, &labels, 50, 9).unwrap();
        let zeros = sample.iter().filter(|&&(_, l)| l == 0).count();
        let ones = sample.iter().filter(|&&(_, l)| l == 1).count();
        assert_eq!((zeros, ones), (40, 50));
    }

    #[test]
    fn balanced_sample_zero_per_class_is_empty() {
        let (store, labels) = labelled_store(5, 5);
        assert!(balanced_sample(&store, &labels, 0, 9).unwrap().is_empty());
    }

    #[test]
    fn balanced_sample_deterministic_and_duplicate_free() {
        let (store, labels) = labelled_store(30, 30);
        let a = balanced_sample(&store, &labels, 10, 42).unwrap();
        let b = balanced_sample(&store, &labels, 10, 42).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<&String> = a.iter().map(|(id, _)| id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), a.len());
    }

    #[test]
    fn balanced_sample_excludes_train_split() {
        let methods: Vec<Method> = (0..20).map(|i| method(&format!("m{i}"))).collect();
        let mut store = CorpusStore::from_methods(methods).unwrap();
        split(&mut store, 0.5, 5).unwrap();
        let labels: HashMap<String, u8> = store
            .methods()
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), (i % 2) as u8))
            .collect();
        let sample = balanced_sample(&store, &labels, 20, 1).unwrap();
        for (id, _) in &sample {
            assert_eq!(store.split_of(id), Some(SplitTag::Eval));
        }
    }

    #[test]
    fn balanced_sample_errors_on_empty_class() {
        let (store, mut labels) = labelled_store(10, 10);
        for v in labels.values_mut() {
            *v = 0;
        }
        let err = balanced_sample(&store, &labels, 5, 1).unwrap_err();
        assert!(err.to_string().contains("class 1"), "{err}");
    }
}
