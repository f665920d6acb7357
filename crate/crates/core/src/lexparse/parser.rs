//! Tolerant recursive-descent parser producing a [`SyntaxTree`].
//!
//! Statements outside the modelled subset degrade to `expr` nodes. Boolean
//! `&&`/`||` structure is built only for condition expressions (of `if`,
//! `while`, `for`, `do`, ternary, `switch`); short-circuit operators buried
//! inside call arguments are treated as opaque expression material.

use super::lexer::{Token, TokenKind};
use super::{NodeKind, SyntaxTree};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unbalanced '{delim}' at {line}:{col}")]
    Unbalanced { delim: char, line: u32, col: u32 },
    #[error("method has no body block")]
    MissingBody,
}

// Nesting beyond this degrades to opaque expr leaves instead of recursing.
const MAX_DEPTH: usize = 150;

/// Parse one method declaration (signature plus braced body) into a tree
/// rooted at a `method` node.
pub fn parse_method(tokens: &[Token]) -> Result<SyntaxTree, ParseError> {
    check_balanced(tokens)?;
    let body_start = tokens
        .iter()
        .position(|t| t.is_text("{"))
        .ok_or(ParseError::MissingBody)?;

    let mut parser = Parser {
        toks: tokens,
        pos: body_start,
        depth: 0,
    };
    let block = parser.block();
    let mut method = SyntaxTree::new(NodeKind::Method);
    method.children.push(block);
    Ok(method)
}

fn check_balanced(tokens: &[Token]) -> Result<(), ParseError> {
    let mut stack: Vec<(char, &Token)> = Vec::new();
    for t in tokens {
        if t.kind != TokenKind::Punctuation {
            continue;
        }
        match t.text.as_str() {
            "(" => stack.push((')', t)),
            "[" => stack.push((']', t)),
            "{" => stack.push(('}', t)),
            ")" | "]" | "}" => {
                let c = t.text.chars().next().unwrap();
                match stack.pop() {
                    Some((want, _)) if want == c => {}
                    _ => {
                        return Err(ParseError::Unbalanced {
                            delim: c,
                            line: t.line,
                            col: t.col,
                        })
                    }
                }
            }
            _ => {}
        }
    }
    if let Some((want, open)) = stack.pop() {
        return Err(ParseError::Unbalanced {
            delim: want,
            line: open.line,
            col: open.col,
        });
    }
    Ok(())
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn at_text(&self, s: &str) -> bool {
        self.peek().is_some_and(|t| t.is_text(s))
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at_text(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Index just past the group opened by the delimiter at `self.pos`.
    /// Assumes the stream is balanced (checked up front).
    fn matching_end(&self, open: &str, close: &str) -> usize {
        let mut depth = 0usize;
        let mut i = self.pos;
        while i < self.toks.len() {
            let t = &self.toks[i];
            if t.is_text(open) {
                depth += 1;
            } else if t.is_text(close) {
                depth -= 1;
                if depth == 0 {
                    return i + 1;
                }
            }
            i += 1;
        }
        self.toks.len()
    }

    /// Body block starting at `{`. Cursor ends just past the matching `}`.
    fn block(&mut self) -> SyntaxTree {
        let mut node = SyntaxTree::new(NodeKind::Block);
        if !self.eat("{") {
            return node;
        }
        while let Some(t) = self.peek() {
            if t.is_text("}") {
                self.pos += 1;
                break;
            }
            if let Some(stmt) = self.statement() {
                node.children.push(stmt);
            }
        }
        node
    }

    fn statement(&mut self) -> Option<SyntaxTree> {
        self.depth += 1;
        let stmt = if self.depth > MAX_DEPTH {
            Some(self.opaque_statement())
        } else {
            self.statement_inner()
        };
        self.depth -= 1;
        stmt
    }

    fn statement_inner(&mut self) -> Option<SyntaxTree> {
        let t = self.peek()?;
        let text = t.text.clone();
        let is_keyword = t.kind == TokenKind::Keyword;
        match text.as_str() {
            "{" => Some(self.block()),
            ";" => {
                self.pos += 1;
                None
            }
            "if" if is_keyword => Some(self.if_statement()),
            "while" if is_keyword => Some(self.while_statement()),
            "do" if is_keyword => Some(self.do_statement()),
            "for" if is_keyword => Some(self.for_statement()),
            "switch" if is_keyword => Some(self.switch_statement()),
            "try" if is_keyword => Some(self.try_statement()),
            "return" if is_keyword => Some(self.return_statement()),
            "synchronized" if is_keyword => {
                // Transparent wrapper: drop the monitor expression, keep the body.
                self.pos += 1;
                if self.at_text("(") {
                    self.pos = self.matching_end("(", ")");
                }
                self.statement()
            }
            "else" if is_keyword => {
                // Stray else (if-less); keep the subtree so nothing is lost.
                self.pos += 1;
                let mut node = SyntaxTree::new(NodeKind::Else);
                if let Some(stmt) = self.statement() {
                    node.children.push(stmt);
                }
                Some(node)
            }
            "case" | "default" if is_keyword => {
                // Labels outside a switch degrade to expr.
                Some(self.opaque_statement())
            }
            _ => Some(self.simple_statement()),
        }
    }

    /// Consume one statement-ish span without interpretation.
    fn opaque_statement(&mut self) -> SyntaxTree {
        let span = self.statement_span();
        SyntaxTree::leaf(NodeKind::Expr, first_word(span))
    }

    fn condition_group(&mut self) -> SyntaxTree {
        if self.at_text("(") {
            let end = self.matching_end("(", ")");
            let span = &self.toks[self.pos + 1..end - 1];
            self.pos = end;
            self.condition(span, 0)
        } else {
            // Degraded: no parenthesized condition present.
            SyntaxTree::leaf(NodeKind::Expr, None)
        }
    }

    fn if_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let mut node = SyntaxTree::new(NodeKind::If);
        node.children.push(self.condition_group());
        if let Some(then) = self.statement() {
            node.children.push(then);
        }
        if self.at_text("else") {
            self.pos += 1;
            let mut else_node = SyntaxTree::new(NodeKind::Else);
            if let Some(stmt) = self.statement() {
                else_node.children.push(stmt);
            }
            node.children.push(else_node);
        }
        node
    }

    fn while_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let mut node = SyntaxTree::new(NodeKind::While);
        node.children.push(self.condition_group());
        if let Some(body) = self.statement() {
            node.children.push(body);
        }
        node
    }

    fn do_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let mut node = SyntaxTree::new(NodeKind::Do);
        if let Some(body) = self.statement() {
            node.children.push(body);
        }
        if self.eat("while") {
            node.children.push(self.condition_group());
            self.eat(";");
        }
        node
    }

    fn for_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let mut node = SyntaxTree::new(NodeKind::For);
        if self.at_text("(") {
            let end = self.matching_end("(", ")");
            let span = &self.toks[self.pos + 1..end - 1];
            self.pos = end;
            // Classic three-clause header: the middle clause is a condition.
            let clauses = split_top_level(span, ";");
            if clauses.len() == 3 && !clauses[1].is_empty() {
                node.children.push(self.condition(clauses[1], 0));
            }
        }
        if let Some(body) = self.statement() {
            node.children.push(body);
        }
        node
    }

    fn switch_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let mut node = SyntaxTree::new(NodeKind::Switch);
        node.children.push(self.condition_group());
        if !self.eat("{") {
            return node;
        }
        let mut current: Option<SyntaxTree> = None;
        while let Some(t) = self.peek() {
            if t.is_text("}") {
                self.pos += 1;
                break;
            }
            if t.is_text("case") || t.is_text("default") {
                if let Some(done) = current.take() {
                    node.children.push(done);
                }
                let kind = if t.is_text("case") {
                    NodeKind::Case
                } else {
                    NodeKind::Default
                };
                self.pos += 1;
                // Skip the label expression up to its colon.
                while let Some(l) = self.peek() {
                    if l.is_text(":") {
                        self.pos += 1;
                        break;
                    }
                    if l.is_text("}") || l.is_text("{") {
                        break;
                    }
                    self.pos += 1;
                }
                current = Some(SyntaxTree::new(kind));
                continue;
            }
            let stmt = self.statement();
            if let Some(stmt) = stmt {
                match current.as_mut() {
                    Some(group) => group.children.push(stmt),
                    None => node.children.push(stmt),
                }
            }
        }
        if let Some(done) = current.take() {
            node.children.push(done);
        }
        node
    }

    fn try_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let mut node = SyntaxTree::new(NodeKind::Try);
        // try-with-resources header, skipped.
        if self.at_text("(") {
            self.pos = self.matching_end("(", ")");
        }
        if let Some(body) = self.statement() {
            node.children.push(body);
        }
        while self.at_text("catch") {
            self.pos += 1;
            if self.at_text("(") {
                self.pos = self.matching_end("(", ")");
            }
            let mut catch = SyntaxTree::new(NodeKind::Catch);
            if let Some(body) = self.statement() {
                catch.children.push(body);
            }
            node.children.push(catch);
        }
        if self.eat("finally") {
            let mut fin = SyntaxTree::new(NodeKind::Finally);
            if let Some(body) = self.statement() {
                fin.children.push(body);
            }
            node.children.push(fin);
        }
        node
    }

    fn return_statement(&mut self) -> SyntaxTree {
        self.pos += 1;
        let span = self.statement_span();
        let mut node = SyntaxTree::new(NodeKind::Return);
        if !span.is_empty() {
            node.children.push(self.expr_material(span, 0));
        }
        node
    }

    /// Tokens up to (not including) the next top-level `;` or the closing
    /// `}` of the enclosing block; a trailing `;` is consumed.
    fn statement_span(&mut self) -> &'a [Token] {
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                "}" => {
                    if depth == 0 {
                        return &self.toks[start..self.pos];
                    }
                    depth -= 1;
                }
                ";" if depth == 0 => {
                    let span = &self.toks[start..self.pos];
                    self.pos += 1;
                    return span;
                }
                _ => {}
            }
            self.pos += 1;
        }
        &self.toks[start..self.pos]
    }

    /// Declarations, assignments, calls, and leftover expressions.
    fn simple_statement(&mut self) -> SyntaxTree {
        let span = self.statement_span();
        if span.is_empty() {
            // Should not happen (statement_span always advances past at
            // least one token when called on a non-empty position), but
            // guard against cursor stalls anyway.
            self.pos += 1;
            return SyntaxTree::leaf(NodeKind::Expr, None);
        }
        self.classify_simple(span)
    }

    fn classify_simple(&mut self, span: &'a [Token]) -> SyntaxTree {
        if let Some(eq) = find_top_level_assign(span) {
            let lhs = &span[..eq];
            let rhs = &span[eq + 1..];
            let kind = if is_declaration_target(lhs) {
                NodeKind::Decl
            } else {
                NodeKind::Assign
            };
            let mut node = SyntaxTree::new(kind);
            if find_top_level(rhs, "?").is_some() {
                node.children.push(self.expr_material(rhs, 0));
                return node;
            }
            return SyntaxTree::leaf(kind, last_word(lhs));
        }
        // Bare declaration: `int x;` / `List<T> xs;`
        if is_bare_declaration(span) {
            return SyntaxTree::leaf(NodeKind::Decl, last_word(span));
        }
        if let Some(callee) = call_target(span) {
            return SyntaxTree::leaf(NodeKind::Call, Some(callee));
        }
        if find_top_level(span, "?").is_some() {
            let mut node = SyntaxTree::new(NodeKind::Expr);
            node.children.push(self.expr_material(span, 0));
            return node;
        }
        SyntaxTree::leaf(NodeKind::Expr, first_word(span))
    }

    /// Expression material where only ternaries introduce structure.
    fn expr_material(&mut self, span: &'a [Token], depth: usize) -> SyntaxTree {
        if depth > MAX_DEPTH {
            return SyntaxTree::leaf(NodeKind::Expr, first_word(span));
        }
        if let Some((cond, then_part, else_part)) = split_ternary(span) {
            let mut node = SyntaxTree::new(NodeKind::Ternary);
            node.children.push(self.condition(cond, depth + 1));
            node.children.push(self.expr_material(then_part, depth + 1));
            node.children.push(self.expr_material(else_part, depth + 1));
            return node;
        }
        SyntaxTree::leaf(NodeKind::Expr, first_word(span))
    }

    /// Boolean structure of a condition expression: left-nested `cond_or` /
    /// `cond_and` nodes, one per operator occurrence.
    fn condition(&mut self, span: &'a [Token], depth: usize) -> SyntaxTree {
        if depth > MAX_DEPTH {
            return SyntaxTree::leaf(NodeKind::Expr, first_word(span));
        }
        let span = trim_condition(span);
        if span.is_empty() {
            return SyntaxTree::leaf(NodeKind::Expr, None);
        }
        for (op, kind) in [("||", NodeKind::CondOr), ("&&", NodeKind::CondAnd)] {
            let parts = split_top_level(span, op);
            if parts.len() > 1 {
                let mut iter = parts.into_iter();
                let mut node = self.condition(iter.next().unwrap(), depth + 1);
                for part in iter {
                    let mut parent = SyntaxTree::new(kind);
                    parent.children.push(node);
                    parent.children.push(self.condition(part, depth + 1));
                    node = parent;
                }
                return node;
            }
        }
        if let Some((cond, then_part, else_part)) = split_ternary(span) {
            let mut node = SyntaxTree::new(NodeKind::Ternary);
            node.children.push(self.condition(cond, depth + 1));
            node.children.push(self.expr_material(then_part, depth + 1));
            node.children.push(self.expr_material(else_part, depth + 1));
            return node;
        }
        SyntaxTree::leaf(NodeKind::Expr, first_word(span))
    }
}

/// Strip leading `!` operators and fully wrapping parentheses, repeatedly.
fn trim_condition(mut span: &[Token]) -> &[Token] {
    loop {
        while span.first().is_some_and(|t| t.is_text("!")) {
            span = &span[1..];
        }
        if span.len() >= 2 && span[0].is_text("(") && span[span.len() - 1].is_text(")") {
            let mut depth = 0i32;
            let mut wraps = true;
            for (i, t) in span.iter().enumerate() {
                if t.is_text("(") {
                    depth += 1;
                } else if t.is_text(")") {
                    depth -= 1;
                    if depth == 0 && i != span.len() - 1 {
                        wraps = false;
                        break;
                    }
                }
            }
            if wraps {
                span = &span[1..span.len() - 1];
                continue;
            }
        }
        return span;
    }
}

/// Positions are scanned at zero bracket depth over `()[]{}`.
fn find_top_level(span: &[Token], text: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, t) in span.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            s if s == text && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn split_top_level<'a>(span: &'a [Token], text: &str) -> Vec<&'a [Token]> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (i, t) in span.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            s if s == text && depth == 0 => {
                parts.push(&span[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&span[start..]);
    parts
}

/// Split `cond ? a : b` at the top level, pairing nested `?`/`:` correctly.
fn split_ternary(span: &[Token]) -> Option<(&[Token], &[Token], &[Token])> {
    let q = find_top_level(span, "?")?;
    let mut nested = 0usize;
    let mut depth = 0i32;
    for (i, t) in span.iter().enumerate().skip(q + 1) {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            "?" if depth == 0 => nested += 1,
            ":" if depth == 0 => {
                if nested == 0 {
                    return Some((&span[..q], &span[q + 1..i], &span[i + 1..]));
                }
                nested -= 1;
            }
            _ => {}
        }
    }
    None
}

/// Plain `=` or compound assignment operator at the top level.
fn find_top_level_assign(span: &[Token]) -> Option<usize> {
    const ASSIGN_OPS: &[&str] = &[
        "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
    ];
    let mut depth = 0i32;
    for (i, t) in span.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            s if depth == 0 && t.kind == TokenKind::Operator && ASSIGN_OPS.contains(&s) => {
                return Some(i)
            }
            _ => {}
        }
    }
    None
}

fn is_word(t: &Token) -> bool {
    matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword)
}

/// `Type name` shape before an `=`: at least two word tokens, ends with an
/// identifier, and no member access.
fn is_declaration_target(lhs: &[Token]) -> bool {
    let words = lhs.iter().filter(|t| is_word(t)).count();
    words >= 2
        && lhs.last().is_some_and(|t| t.kind == TokenKind::Identifier)
        && !lhs.iter().any(|t| t.is_text("."))
}

fn is_bare_declaration(span: &[Token]) -> bool {
    is_declaration_target(span) && !span.iter().any(|t| t.is_text("("))
}

/// Identifier immediately preceding the first top-level `(`.
fn call_target(span: &[Token]) -> Option<String> {
    let mut depth = 0i32;
    for (i, t) in span.iter().enumerate() {
        match t.text.as_str() {
            "(" => {
                if depth == 0 {
                    let prev = span[..i].last()?;
                    return (prev.kind == TokenKind::Identifier).then(|| prev.text.clone());
                }
                depth += 1;
            }
            "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            _ => {}
        }
    }
    None
}

fn first_word(span: &[Token]) -> Option<String> {
    span.iter()
        .find(|t| t.kind == TokenKind::Identifier || t.kind == TokenKind::Literal)
        .map(|t| t.text.clone())
}

fn last_word(span: &[Token]) -> Option<String> {
    span.iter()
        .rev()
        .find(|t| t.kind == TokenKind::Identifier)
        .map(|t| t.text.clone())
}
