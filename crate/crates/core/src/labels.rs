//! The three binary labelling policies: structural (cyclomatic threshold),
//! semantic (name patterns), and random (baseline).

use crate::lexparse::{self, MethodParseError};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use thiserror::Error;

/// A labelling policy, parsed from a spec string:
/// `struct:c=10`, `sem:sort,find`, `rand:n=500,seed=7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelPolicy {
    /// Class 1 iff cyclomatic complexity >= c.
    Structural { c: u32 },
    /// Class 1 iff any pattern is a substring of the lowercased name.
    Semantic { patterns: Vec<String> },
    /// Seeded shuffle; the first n methods are class 1.
    Random { n: usize, seed: u64 },
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("bad policy spec '{0}': expected struct:c=N, sem:p1,p2,..., or rand:n=N,seed=S")]
    BadSpec(String),
    #[error("method '{id}' failed to parse: {source}")]
    Unparseable {
        id: String,
        source: MethodParseError,
    },
    #[error("random cutoff {n} exceeds population {len}")]
    CutoffTooLarge { n: usize, len: usize },
}

impl LabelPolicy {
    pub fn parse(spec: &str) -> Result<Self, PolicyError> {
        let bad = || PolicyError::BadSpec(spec.to_string());
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "struct" => {
                let c = rest
                    .strip_prefix("c=")
                    .and_then(|v| v.parse::<u32>().ok())
                    .filter(|&c| c >= 1)
                    .ok_or_else(bad)?;
                Ok(LabelPolicy::Structural { c })
            }
            "sem" => {
                let patterns: Vec<String> = rest
                    .split(',')
                    .map(|p| p.trim().to_lowercase())
                    .filter(|p| !p.is_empty())
                    .collect();
                if patterns.is_empty() {
                    return Err(bad());
                }
                Ok(LabelPolicy::Semantic { patterns })
            }
            "rand" => {
                let mut n = None;
                let mut seed = None;
                for part in rest.split(',') {
                    if let Some(v) = part.strip_prefix("n=") {
                        n = v.parse::<usize>().ok();
                    } else if let Some(v) = part.strip_prefix("seed=") {
                        seed = v.parse::<u64>().ok();
                    } else {
                        return Err(bad());
                    }
                }
                match (n, seed) {
                    (Some(n), Some(seed)) => Ok(LabelPolicy::Random { n, seed }),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }

    /// Canonical spec string (round-trips through `parse`).
    pub fn spec(&self) -> String {
        match self {
            LabelPolicy::Structural { c } => format!("struct:c={c}"),
            LabelPolicy::Semantic { patterns } => format!("sem:{}", patterns.join(",")),
            LabelPolicy::Random { n, seed } => format!("rand:n={n},seed={seed}"),
        }
    }
}

/// Structural label: 0 iff V(G) < c, per the complexity counting rules.
pub fn label_structural(source: &str, c: u32) -> Result<u8, MethodParseError> {
    let tree = lexparse::parse_source(source)?;
    Ok(u8::from(lexparse::cyclomatic(&tree) >= c))
}

/// Semantic label: 1 iff any pattern occurs in the lowercased name.
/// Patterns are expected lowercase.
pub fn label_semantic(name: &str, patterns: &[String]) -> u8 {
    let lower = name.to_lowercase();
    u8::from(patterns.iter().any(|p| lower.contains(p.as_str())))
}

/// Random label: seeded shuffle of `ids`; the first `n` get class 1.
pub fn label_random(ids: &[String], n: usize, seed: u64) -> HashMap<String, u8> {
    let mut shuffled: Vec<&String> = ids.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    shuffled
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), u8::from(i < n)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pats(terms: &[&str]) -> Vec<String> {
        terms.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn structural_straight_line_below_threshold() {
        assert_eq!(label_structural("int f(){return 1;}", 10).unwrap(), 0);
    }

    #[test]
    fn structural_at_threshold_is_one() {
        // Nine ifs plus the method start: V = 10.
        let body: String = (0..9).map(|i| format!("if(a{i}>0){{g();}}")).collect();
        let src = format!("void f(){{{body}}}");
        assert_eq!(label_structural(&src, 10).unwrap(), 1);
        assert_eq!(label_structural(&src, 11).unwrap(), 0);
    }

    #[test]
    fn structural_monotone_in_threshold() {
        let src = "void f(){if(a){b();}while(c){d();}}";
        let mut prev = 1;
        for c in 1..8 {
            let label = label_structural(src, c).unwrap();
            assert!(label <= prev, "label not monotone at c={c}");
            prev = label;
        }
    }

    #[test]
    fn semantic_matches_camel_case() {
        assert_eq!(label_semantic("quickSortItems", &pats(&["sort"])), 1);
        assert_eq!(label_semantic("getIndex", &pats(&["sort", "find"])), 0);
        assert_eq!(label_semantic("findFirst", &pats(&["find"])), 1);
    }

    #[test]
    fn semantic_union_is_or_of_parts() {
        let names = ["computeHash", "quickSort", "getValue", "hashAndSort"];
        for name in names {
            let union = label_semantic(name, &pats(&["hash", "sort"]));
            let either = label_semantic(name, &pats(&["hash"])).max(label_semantic(name, &pats(&["sort"])));
            assert_eq!(union, either, "union mismatch for {name}");
        }
    }

    #[test]
    fn random_exact_count_and_determinism() {
        let ids: Vec<String> = (0..40).map(|i| format!("m{i}")).collect();
        for seed in [1u64, 2, 99] {
            let labels = label_random(&ids, 20, seed);
            assert_eq!(labels.values().filter(|&&v| v == 1).count(), 20);
        }
        assert_eq!(label_random(&ids, 7, 5), label_random(&ids, 7, 5));
        let all_zero = label_random(&ids, 0, 5);
        assert!(all_zero.values().all(|&v| v == 0));
    }

    #[test]
    fn policy_specs_round_trip() {
        for spec in ["struct:c=10", "sem:sort,find", "rand:n=500,seed=7"] {
            let policy = LabelPolicy::parse(spec).unwrap();
            assert_eq!(policy.spec(), spec);
        }
        assert!(LabelPolicy::parse("struct:c=0").is_err());
        assert!(LabelPolicy::parse("sem:").is_err());
        assert!(LabelPolicy::parse("rand:n=5").is_err());
        assert!(LabelPolicy::parse("bogus").is_err());
    }
}
