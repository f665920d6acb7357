//! Synthetic corpus generator.
//!
//! Emits syntactically valid Java-like methods with a known cyclomatic
//! complexity, recorded in `cc_true`. The generator is the oracle for the
//! complexity analyzer: every construct it emits maps to exactly one counted
//! point (or a known number of Boolean-operator points), so the recorded
//! value and the analyzer must agree on every method.
//!
//! Method names mix neutral verbs with the pattern terms used by the
//! semantic labelling tasks; pattern-named methods additionally contain
//! calls into a term-specific helper vocabulary so that name and body are
//! correlated.

use super::{CorpusStore, Method};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

struct Motif {
    term: &'static str,
    callees: &'static [&'static str],
    vars: &'static [&'static str],
}

const MOTIFS: &[Motif] = &[
    Motif {
        term: "sort",
        callees: &["swapElements", "comparePairs", "partitionRange"],
        vars: &["pivot", "lowMark", "highMark"],
    },
    Motif {
        term: "find",
        callees: &["scanForward", "matchKey", "probeSlot"],
        vars: &["needle", "cursor", "span"],
    },
    Motif {
        term: "search",
        callees: &["descendTree", "boundRange", "bisectSpan"],
        vars: &["midPoint", "leftEdge", "rightEdge"],
    },
    Motif {
        term: "locate",
        callees: &["traceOrigin", "resolveAnchor", "mapOffset"],
        vars: &["anchor", "offsetMark", "landmark"],
    },
    Motif {
        term: "hash",
        callees: &["mixBits", "rotateWord", "foldDigest"],
        vars: &["seedWord", "digestAcc", "bucketSlot"],
    },
    Motif {
        term: "crypt",
        callees: &["cipherRound", "xorStream", "expandNonce"],
        vars: &["nonceWord", "keySlice", "padMask"],
    },
];

const NEUTRAL_MOTIF: Motif = Motif {
    term: "",
    callees: &["applyDelta", "refreshState", "collectStats", "advanceStep"],
    vars: &["tally", "scratch", "ledger"],
};

const NEUTRAL_VERBS: &[&str] = &[
    "get", "set", "load", "update", "merge", "apply", "build", "init", "copy", "fill", "emit",
    "track",
];

const NAME_PREFIXES: &[&str] = &["quick", "fast", "deep", "lazy", "safe", "bulk", ""];

const NAME_SUFFIXES: &[&str] = &[
    "Items", "Entry", "Value", "Node", "Buffer", "Record", "Table", "Key", "Data", "Block",
];

const MAX_NEST: usize = 4;

/// Generate `count` methods whose complexity is uniform over
/// `complexity_range` (inclusive). Panics if the range minimum is zero.
pub fn gen_synthetic(count: usize, seed: u64, complexity_range: (u32, u32)) -> CorpusStore {
    let (lo, hi) = complexity_range;
    assert!(lo >= 1, "complexity range minimum must be at least 1");
    let hi = hi.max(lo);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut methods = Vec::with_capacity(count);
    for i in 0..count {
        let target = rng.gen_range(lo..=hi);
        let motif: &Motif = if rng.gen_bool(0.5) {
            &MOTIFS[rng.gen_range(0..MOTIFS.len())]
        } else {
            &NEUTRAL_MOTIF
        };
        let name = method_name(&mut rng, motif);
        let source = MethodGen::new(&mut rng, motif).generate(&name, target);
        methods.push(Method {
            id: format!("m{i:06}"),
            name,
            source,
            repo: Some(format!(
                "synthetic/{}",
                if motif.term.is_empty() {
                    "plain"
                } else {
                    motif.term
                }
            )),
            cc_true: Some(target),
        });
    }
    CorpusStore::from_methods(methods).expect("generated ids are unique")
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn method_name(rng: &mut ChaCha8Rng, motif: &Motif) -> String {
    let verb = if motif.term.is_empty() {
        NEUTRAL_VERBS[rng.gen_range(0..NEUTRAL_VERBS.len())]
    } else {
        motif.term
    };
    let prefix = NAME_PREFIXES[rng.gen_range(0..NAME_PREFIXES.len())];
    let suffix = NAME_SUFFIXES[rng.gen_range(0..NAME_SUFFIXES.len())];
    if prefix.is_empty() {
        format!("{verb}{suffix}")
    } else {
        format!("{prefix}{}{suffix}", capitalize(verb))
    }
}

struct MethodGen<'a> {
    rng: &'a mut ChaCha8Rng,
    motif: &'a Motif,
    lines: Vec<String>,
    indent: usize,
    locals: Vec<String>,
    next_var: usize,
}

impl<'a> MethodGen<'a> {
    fn new(rng: &'a mut ChaCha8Rng, motif: &'a Motif) -> Self {
        MethodGen {
            rng,
            motif,
            lines: Vec::new(),
            indent: 0,
            locals: Vec::new(),
            next_var: 0,
        }
    }

    fn generate(mut self, name: &str, target_cc: u32) -> String {
        self.emit(format!("int {name}(int arg0, int arg1) {{"));
        self.indent += 1;
        self.locals.push("arg0".to_string());
        self.locals.push("arg1".to_string());
        self.declare_local();
        // One motif variable so the body vocabulary is always present.
        let motif_var = self.motif.vars[self.rng.gen_range(0..self.motif.vars.len())];
        let var = format!("{motif_var}{}", self.next_var);
        self.next_var += 1;
        let value = self.rng.gen_range(1..100);
        self.emit(format!("int {var} = {value};"));
        self.locals.push(var);

        let mut budget = target_cc - 1;
        self.statements(&mut budget, 1, true);
        debug_assert_eq!(budget, 0);

        let result = self.local();
        self.emit(format!("return {result};"));
        self.indent -= 1;
        self.emit("}".to_string());
        self.lines.join("\n")
    }

    fn emit(&mut self, line: String) {
        self.lines.push(format!("{}{line}", "    ".repeat(self.indent)));
    }

    fn local(&mut self) -> String {
        self.locals[self.rng.gen_range(0..self.locals.len())].clone()
    }

    fn declare_local(&mut self) {
        let var = format!("v{}", self.next_var);
        self.next_var += 1;
        let value = self.rng.gen_range(0..50);
        self.emit(format!("int {var} = {value};"));
        self.locals.push(var);
    }

    fn plain_statement(&mut self) {
        match self.rng.gen_range(0..4) {
            0 => self.declare_local(),
            1 => {
                let target = self.local();
                let operand = self.local();
                let op = ["+", "-", "*"][self.rng.gen_range(0..3)];
                let value = self.rng.gen_range(1..20);
                self.emit(format!("{target} = {operand} {op} {value};"));
            }
            _ => {
                let callee = self.motif.callees[self.rng.gen_range(0..self.motif.callees.len())];
                let a = self.local();
                if self.rng.gen_bool(0.5) {
                    let target = self.local();
                    self.emit(format!("{target} = {callee}({a});"));
                } else {
                    let b = self.local();
                    self.emit(format!("{callee}({a}, {b});"));
                }
            }
        }
    }

    /// A comparison contributing zero complexity points.
    fn simple_condition(&mut self) -> String {
        let a = self.local();
        match self.rng.gen_range(0..3) {
            0 => format!("{a} < {}", self.rng.gen_range(1..100)),
            1 => format!("{a} > {}", self.rng.gen_range(1..100)),
            _ => {
                let b = self.local();
                format!("{a} != {b}")
            }
        }
    }

    /// `ops` Boolean operators joined at the top level: `ops` extra points.
    fn bool_condition(&mut self, ops: u32) -> String {
        let mut cond = self.simple_condition();
        for _ in 0..ops {
            let op = if self.rng.gen_bool(0.5) { "&&" } else { "||" };
            cond = format!("{cond} {op} {}", self.simple_condition());
        }
        cond
    }

    /// Emit statements consuming exactly `*budget` complexity points when
    /// `top` is set; nested invocations may leave budget for outer levels.
    fn statements(&mut self, budget: &mut u32, depth: usize, top: bool) {
        for _ in 0..self.rng.gen_range(1..=2) {
            self.plain_statement();
        }
        loop {
            if *budget == 0 {
                return;
            }
            if !top && self.rng.gen_bool(0.4) {
                return;
            }
            self.construct(budget, depth);
        }
    }

    fn body(&mut self, budget: &mut u32, depth: usize) {
        self.indent += 1;
        if depth < MAX_NEST {
            self.statements(budget, depth + 1, false);
        } else {
            self.plain_statement();
        }
        self.indent -= 1;
    }

    fn construct(&mut self, budget: &mut u32, depth: usize) {
        debug_assert!(*budget >= 1);
        // Candidate constructs by base cost; switch needs at least 2 points.
        let mut choices: Vec<u32> = vec![0, 1, 2, 3, 4, 5, 8];
        if *budget >= 2 {
            choices.push(6); // if with Boolean operators
            choices.push(7); // switch
        }
        match choices[self.rng.gen_range(0..choices.len())] {
            0 => {
                *budget -= 1;
                let cond = self.simple_condition();
                self.emit(format!("if ({cond}) {{"));
                self.body(budget, depth);
                self.emit("}".to_string());
            }
            1 => {
                *budget -= 1;
                let cond = self.simple_condition();
                self.emit(format!("if ({cond}) {{"));
                self.body(budget, depth);
                self.emit("} else {".to_string());
                self.body(budget, depth);
                self.emit("}".to_string());
            }
            2 => {
                *budget -= 1;
                let limit = self.rng.gen_range(2..20);
                let var = format!("i{}", self.next_var);
                self.next_var += 1;
                self.emit(format!("for (int {var} = 0; {var} < {limit}; {var}++) {{"));
                self.body(budget, depth);
                self.emit("}".to_string());
            }
            3 => {
                *budget -= 1;
                let cond = self.simple_condition();
                self.emit(format!("while ({cond}) {{"));
                self.body(budget, depth);
                self.emit("}".to_string());
            }
            4 => {
                *budget -= 1;
                let cond = self.simple_condition();
                self.emit("do {".to_string());
                self.body(budget, depth);
                self.emit(format!("}} while ({cond});"));
            }
            5 => {
                *budget -= 1;
                self.emit("try {".to_string());
                self.body(budget, depth);
                self.emit("} catch (Exception err0) {".to_string());
                self.indent += 1;
                self.plain_statement();
                self.indent -= 1;
                self.emit("}".to_string());
            }
            6 => {
                let ops = self.rng.gen_range(1..=(*budget - 1).min(2));
                *budget -= 1 + ops;
                let cond = self.bool_condition(ops);
                self.emit(format!("if ({cond}) {{"));
                self.body(budget, depth);
                self.emit("}".to_string());
            }
            7 => {
                let cases = self.rng.gen_range(1..=(*budget - 1).min(3));
                *budget -= cases + 1;
                let selector = self.local();
                self.emit(format!("switch ({selector}) {{"));
                for c in 0..cases {
                    self.emit(format!("case {c}:"));
                    self.indent += 1;
                    self.plain_statement();
                    self.emit("break;".to_string());
                    self.indent -= 1;
                }
                self.emit("default:".to_string());
                self.indent += 1;
                self.plain_statement();
                self.indent -= 1;
                self.emit("}".to_string());
            }
            _ => {
                *budget -= 1;
                let cond = self.simple_condition();
                let a = self.local();
                let b = self.local();
                let var = format!("t{}", self.next_var);
                self.next_var += 1;
                self.emit(format!("int {var} = {cond} ? {a} : {b};"));
                self.locals.push(var);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::label_semantic;
    use crate::lexparse::{cyclomatic, parse_source};
    use std::collections::HashSet;

    #[test]
    fn straight_line_range_yields_complexity_one() {
        let store = gen_synthetic(10, 3, (1, 1));
        assert_eq!(store.len(), 10);
        for m in store.methods() {
            assert_eq!(m.cc_true, Some(1));
            let tree = parse_source(&m.source).unwrap();
            assert_eq!(cyclomatic(&tree), 1, "method {}:\n{}", m.id, m.source);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = gen_synthetic(50, 11, (1, 20));
        let b = gen_synthetic(50, 11, (1, 20));
        assert_eq!(a.methods(), b.methods());
    }

    #[test]
    fn generator_and_analyzer_agree() {
        let store = gen_synthetic(200, 5, (1, 20));
        for m in store.methods() {
            let tree = parse_source(&m.source)
                .unwrap_or_else(|e| panic!("method {} does not parse: {e}\n{}", m.id, m.source));
            assert_eq!(
                cyclomatic(&tree),
                m.cc_true.unwrap(),
                "complexity mismatch for {}:\n{}",
                m.id,
                m.source
            );
        }
    }

    #[test]
    fn complexities_cover_the_range() {
        let store = gen_synthetic(500, 9, (1, 6));
        let seen: HashSet<u32> = store.methods().iter().filter_map(|m| m.cc_true).collect();
        assert_eq!(seen, (1..=6).collect());
    }

    #[test]
    fn pattern_terms_match_recorded_group_exactly() {
        let store = gen_synthetic(400, 21, (1, 8));
        let patterns = ["sort", "find", "search", "locate", "hash", "crypt"];
        for m in store.methods() {
            let group = m.repo.as_deref().unwrap().strip_prefix("synthetic/").unwrap();
            for term in patterns {
                let labelled = label_semantic(&m.name, &[term.to_string()]);
                assert_eq!(
                    labelled == 1,
                    group == term,
                    "name {} vs group {group} on term {term}",
                    m.name
                );
            }
        }
    }
}
