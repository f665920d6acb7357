//! Tokenizer for the Java-like subset.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
    Punctuation,
}

/// One lexical token with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: u32,
    pub col: u32,
}

impl Token {
    fn new(kind: TokenKind, text: impl Into<String>, line: u32, col: u32) -> Self {
        Token {
            kind,
            text: text.into(),
            line,
            col,
        }
    }

    pub fn is_text(&self, s: &str) -> bool {
        self.text == s
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("unterminated string literal starting at {line}:{col}")]
    UnterminatedString { line: u32, col: u32 },
    #[error("unterminated block comment starting at {line}:{col}")]
    UnterminatedComment { line: u32, col: u32 },
}

/// Placeholder text every literal token collapses to.
pub const LITERAL_TEXT: &str = "LIT";

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "var",
    "void",
    "volatile",
    "while",
];

// Longest first so maximal munch is a plain linear scan.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", ">>", "->", "::", "+", "-", "*", "/", "%", "=", "<", ">",
    "!", "~", "&", "|", "^", "?", "@",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', ':'];

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_' || b == b'$' || b >= 0x80
}

fn is_ident_continue(b: u8) -> bool {
    is_ident_start(b) || b.is_ascii_digit()
}

/// Tokenize one method source. Comments are dropped; string, char, and
/// numeric literals collapse to the placeholder `LIT`.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut sc = Scanner::new(source);
    let mut out = Vec::new();

    'outer: while let Some(b) = sc.peek() {
        if b.is_ascii_whitespace() {
            sc.bump();
            continue;
        }
        let (line, col) = (sc.line, sc.col);

        // Comments.
        if b == b'/' && sc.peek2() == Some(b'/') {
            while let Some(c) = sc.peek() {
                if c == b'\n' {
                    break;
                }
                sc.bump();
            }
            continue;
        }
        if b == b'/' && sc.peek2() == Some(b'*') {
            sc.bump();
            sc.bump();
            loop {
                match sc.peek() {
                    None => return Err(LexError::UnterminatedComment { line, col }),
                    Some(b'*') if sc.peek2() == Some(b'/') => {
                        sc.bump();
                        sc.bump();
                        continue 'outer;
                    }
                    _ => {
                        sc.bump();
                    }
                }
            }
        }

        // String and char literals: contents dropped.
        if b == b'"' || b == b'\'' {
            let quote = b;
            sc.bump();
            loop {
                match sc.peek() {
                    None => return Err(LexError::UnterminatedString { line, col }),
                    Some(b'\\') => {
                        sc.bump();
                        sc.bump();
                    }
                    Some(c) if c == quote => {
                        sc.bump();
                        break;
                    }
                    _ => {
                        sc.bump();
                    }
                }
            }
            out.push(Token::new(TokenKind::Literal, LITERAL_TEXT, line, col));
            continue;
        }

        // Numeric literals, including hex, underscores, exponents, suffixes.
        if b.is_ascii_digit() {
            let mut prev = b;
            sc.bump();
            while let Some(c) = sc.peek() {
                let take = c.is_ascii_alphanumeric()
                    || c == b'.'
                    || c == b'_'
                    || ((c == b'+' || c == b'-') && (prev == b'e' || prev == b'E'));
                if !take {
                    break;
                }
                prev = c;
                sc.bump();
            }
            out.push(Token::new(TokenKind::Literal, LITERAL_TEXT, line, col));
            continue;
        }

        // Words: keywords and identifiers.
        if is_ident_start(b) {
            let start = sc.pos;
            while let Some(c) = sc.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                sc.bump();
            }
            let text = std::str::from_utf8(&sc.src[start..sc.pos])
                .unwrap_or(LITERAL_TEXT)
                .to_string();
            let kind = if KEYWORDS.contains(&text.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            out.push(Token::new(kind, text, line, col));
            continue;
        }

        if PUNCTUATION.contains(&(b as char)) {
            sc.bump();
            out.push(Token::new(
                TokenKind::Punctuation,
                (b as char).to_string(),
                line,
                col,
            ));
            continue;
        }

        let mut matched = false;
        for op in OPERATORS {
            if sc.starts_with(op) {
                for _ in 0..op.len() {
                    sc.bump();
                }
                out.push(Token::new(TokenKind::Operator, *op, line, col));
                matched = true;
                break;
            }
        }
        if !matched {
            // Unknown byte: keep it as a one-character operator token.
            sc.bump();
            out.push(Token::new(
                TokenKind::Operator,
                (b as char).to_string(),
                line,
                col,
            ));
        }
    }

    Ok(out)
}

/// Canonical pretty-printed form: token texts joined by single spaces.
pub fn pretty(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
