//! Tokenizer, tolerant parser, and cyclomatic complexity for a Java-like
//! method subset.
//!
//! The tokenizer drops comments and collapses every literal (string, char,
//! number) to the placeholder token `LIT`; joining token texts with single
//! spaces is the canonical pretty-printed sentence form consumed by the
//! embedding stage. The parser is a tolerant recursive descent: constructs
//! outside the subset degrade to `expr` nodes instead of failing, since real
//! corpus methods may use features we do not model. Complexity is computed by
//! construct counting over the resulting tree, never by building a CFG.

mod lexer;
mod parser;

pub use lexer::{pretty, tokenize, LexError, Token, TokenKind};
pub use parser::{parse_method, ParseError};

use thiserror::Error;

/// Structural node kinds. `cond_and`/`cond_or` appear only inside condition
/// expressions of `if`/`while`/`for`/`do`/ternary/`switch`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Method,
    Block,
    If,
    Else,
    For,
    While,
    Do,
    Switch,
    Case,
    Default,
    Try,
    Catch,
    Finally,
    Return,
    Call,
    Assign,
    Decl,
    Expr,
    CondAnd,
    CondOr,
    Ternary,
}

impl NodeKind {
    /// Lowercase name used in AST sentences.
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Method => "method",
            NodeKind::Block => "block",
            NodeKind::If => "if",
            NodeKind::Else => "else",
            NodeKind::For => "for",
            NodeKind::While => "while",
            NodeKind::Do => "do",
            NodeKind::Switch => "switch",
            NodeKind::Case => "case",
            NodeKind::Default => "default",
            NodeKind::Try => "try",
            NodeKind::Catch => "catch",
            NodeKind::Finally => "finally",
            NodeKind::Return => "return",
            NodeKind::Call => "call",
            NodeKind::Assign => "assign",
            NodeKind::Decl => "decl",
            NodeKind::Expr => "expr",
            NodeKind::CondAnd => "cond_and",
            NodeKind::CondOr => "cond_or",
            NodeKind::Ternary => "ternary",
        }
    }
}

/// Lightweight structural syntax tree. Root kind is always `method`;
/// `case`/`default` nodes appear only under `switch`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxTree {
    pub kind: NodeKind,
    pub children: Vec<SyntaxTree>,
    /// Identifier/literal spelling, set on leaves only.
    pub text: Option<String>,
}

impl SyntaxTree {
    pub fn new(kind: NodeKind) -> Self {
        SyntaxTree {
            kind,
            children: Vec::new(),
            text: None,
        }
    }

    pub fn leaf(kind: NodeKind, text: Option<String>) -> Self {
        SyntaxTree {
            kind,
            children: Vec::new(),
            text,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Depth-first pre-order walk.
    pub fn walk(&self, f: &mut impl FnMut(&SyntaxTree)) {
        f(self);
        for child in &self.children {
            child.walk(f);
        }
    }
}

/// Counting rules for cyclomatic complexity.
#[derive(Debug, Clone, Copy)]
pub struct CyclomaticOptions {
    /// Count each catch block as a conditional construct. The strict rule
    /// list omits catch; OFF reproduces it exactly.
    pub count_catch: bool,
}

impl Default for CyclomaticOptions {
    fn default() -> Self {
        CyclomaticOptions { count_catch: true }
    }
}

/// Cyclomatic complexity by construct counting: one point for the method
/// itself, one per conditional construct (`if`, ternary, `case`, `default`,
/// catch when enabled), one per iterative structure (`for`, `while`, `do`),
/// and one per Boolean operator inside condition expressions.
pub fn cyclomatic(tree: &SyntaxTree) -> u32 {
    cyclomatic_with(tree, CyclomaticOptions::default())
}

pub fn cyclomatic_with(tree: &SyntaxTree, opts: CyclomaticOptions) -> u32 {
    let mut points = 1u32;
    tree.walk(&mut |node| {
        points += match node.kind {
            NodeKind::If
            | NodeKind::Ternary
            | NodeKind::Case
            | NodeKind::Default
            | NodeKind::For
            | NodeKind::While
            | NodeKind::Do
            | NodeKind::CondAnd
            | NodeKind::CondOr => 1,
            NodeKind::Catch if opts.count_catch => 1,
            _ => 0,
        };
    });
    points
}

/// Tokenize-and-parse convenience for whole method sources.
#[derive(Debug, Error)]
pub enum MethodParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn parse_source(source: &str) -> Result<SyntaxTree, MethodParseError> {
    let tokens = tokenize(source)?;
    Ok(parse_method(&tokens)?)
}

#[cfg(test)]
mod tests;
