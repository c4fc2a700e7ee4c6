use serde::{Deserialize, Serialize};

use super::CstError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Punctuation,
    Preprocessor,
}

/// One lexeme of C source.
///
/// `leading` holds the whitespace and comments between the previous token
/// and this one, so a token stream can always be turned back into the exact
/// input text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub line: usize,
    pub col: usize,
    pub offset: usize,
    pub leading: String,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punctuation && self.text == p
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == k
    }

    pub fn end_offset(&self) -> usize {
        self.offset + self.text.len()
    }

    /// Line on which the token's last character sits.
    pub fn end_line(&self) -> usize {
        self.line + self.text.matches('\n').count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tokens {
    pub tokens: Vec<Token>,
    pub trailing: String,
}

impl Tokens {
    /// Rebuilds the source text the stream was lexed from.
    pub fn reconstruct(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(&t.leading);
            out.push_str(&t.text);
        }
        out.push_str(&self.trailing);
        out
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn into_vec(self) -> Vec<Token> {
        self.tokens
    }
}

impl std::ops::Deref for Tokens {
    type Target = [Token];

    fn deref(&self) -> &[Token] {
        &self.tokens
    }
}

pub const KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex", "_Imaginary",
    "_Alignas", "_Alignof", "_Atomic", "_Generic", "_Noreturn", "_Static_assert",
    "_Thread_local",
];

const PUNCTUATORS: &[&str] = &[
    ">>=", "<<=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "*=",
    "/=", "%=", "+=", "-=", "&=", "^=", "|=", "##",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Decodes raw file bytes, rejecting anything that is not UTF-8.
pub fn decode(bytes: &[u8]) -> Result<&str, CstError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = &bytes[..e.valid_up_to()];
        let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
        CstError::Encoding { line, byte: e.valid_up_to() }
    })
}

pub fn tokenize_bytes(bytes: &[u8]) -> Result<Tokens, CstError> {
    decode(bytes).map(tokenize)
}

pub fn token_count(text: &str) -> usize {
    tokenize(text).len()
}

/// Splits C source into tokens. Never fails: unknown characters become
/// single-character punctuation and unterminated literals or comments run to
/// the end of their line (or file).
pub fn tokenize(text: &str) -> Tokens {
    Lexer::new(text).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0, line: 1, line_start: 0 }
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn advance_to(&mut self, end: usize) {
        while self.pos < end {
            if self.bytes[self.pos] == b'\n' {
                self.line += 1;
                self.line_start = self.pos + 1;
            }
            self.pos += 1;
        }
    }

    fn col(&self) -> usize {
        self.src[self.line_start..self.pos].chars().count() + 1
    }

    /// True when only horizontal whitespace precedes `pos` on its line.
    fn at_line_start(&self) -> bool {
        self.bytes[self.line_start..self.pos].iter().all(|b| matches!(b, b' ' | b'\t' | b'\x0b' | b'\x0c' | b'\r'))
    }

    fn skip_trivia(&mut self) {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(b' ' | b'\t' | b'\n' | b'\r' | b'\x0b' | b'\x0c'), _) => self.advance_to(self.pos + 1),
                (Some(b'\\'), Some(b'\n')) => self.advance_to(self.pos + 2),
                (Some(b'\\'), Some(b'\r')) if self.peek(2) == Some(b'\n') => self.advance_to(self.pos + 3),
                (Some(b'/'), Some(b'/')) => {
                    let end = self.src[self.pos..].find('\n').map_or(self.bytes.len(), |i| self.pos + i);
                    self.advance_to(end);
                }
                (Some(b'/'), Some(b'*')) => {
                    let end = self.src[self.pos + 2..].find("*/").map_or(self.bytes.len(), |i| self.pos + 2 + i + 2);
                    self.advance_to(end);
                }
                _ => return,
            }
        }
    }

    fn run(mut self) -> Tokens {
        let mut tokens = Vec::new();
        loop {
            let trivia_start = self.pos;
            self.skip_trivia();
            let leading = self.src[trivia_start..self.pos].to_string();
            if self.pos >= self.bytes.len() {
                return Tokens { tokens, trailing: leading };
            }
            let (line, col, start) = (self.line, self.col(), self.pos);
            let (kind, end) = self.scan();
            self.advance_to(end);
            tokens.push(Token { kind, text: self.src[start..end].to_string(), line, col, offset: start, leading });
        }
    }

    fn scan(&self) -> (TokenKind, usize) {
        let c = self.bytes[self.pos];
        if c == b'#' && self.at_line_start() {
            return (TokenKind::Preprocessor, self.directive_end());
        }
        if let Some(end) = self.string_like() {
            return (TokenKind::Literal, end);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let end = self.word_end(self.pos);
            let kind = if is_keyword(&self.src[self.pos..end]) { TokenKind::Keyword } else { TokenKind::Identifier };
            return (kind, end);
        }
        if c.is_ascii_digit() || (c == b'.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            return (TokenKind::Literal, self.number_end());
        }
        for p in PUNCTUATORS {
            if self.src[self.pos..].starts_with(p) {
                return (TokenKind::Punctuation, self.pos + p.len());
            }
        }
        let ch_len = self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        (TokenKind::Punctuation, self.pos + ch_len)
    }

    fn word_end(&self, from: usize) -> usize {
        let mut end = from;
        while end < self.bytes.len() && (self.bytes[end].is_ascii_alphanumeric() || self.bytes[end] == b'_') {
            end += 1;
        }
        end
    }

    fn number_end(&self) -> usize {
        let mut end = self.pos;
        while end < self.bytes.len() {
            let b = self.bytes[end];
            let exponent_sign =
                matches!(b, b'+' | b'-') && end > self.pos && matches!(self.bytes[end - 1], b'e' | b'E' | b'p' | b'P');
            if exponent_sign || b.is_ascii_alphanumeric() || b == b'_' || b == b'.' {
                end += 1;
            } else {
                break;
            }
        }
        end
    }

    /// String or character literal, including encoding prefixes.
    fn string_like(&self) -> Option<usize> {
        let rest = &self.bytes[self.pos..];
        let prefix = [&b"u8"[..], b"u", b"U", b"L", b""]
            .into_iter()
            .find(|p| rest.starts_with(p) && matches!(rest.get(p.len()), Some(b'"' | b'\'')))?;
        let quote = rest[prefix.len()];
        let mut i = self.pos + prefix.len() + 1;
        while i < self.bytes.len() {
            match self.bytes[i] {
                b'\\' => i += 2,
                b'\n' => return Some(i),
                b if b == quote => return Some(i + 1),
                _ => i += 1,
            }
        }
        Some(self.bytes.len())
    }

    fn directive_end(&self) -> usize {
        let mut i = self.pos;
        let mut in_block = false;
        let mut quote: Option<u8> = None;
        while i < self.bytes.len() {
            let b = self.bytes[i];
            if in_block {
                if b == b'*' && self.bytes.get(i + 1) == Some(&b'/') {
                    in_block = false;
                    i += 2;
                    continue;
                }
                i += 1;
                continue;
            }
            if let Some(q) = quote {
                match b {
                    b'\\' => i += 2,
                    b'\n' => return i,
                    _ if b == q => {
                        quote = None;
                        i += 1;
                    }
                    _ => i += 1,
                }
                continue;
            }
            match b {
                b'\\' if self.bytes.get(i + 1) == Some(&b'\n') => i += 2,
                b'\\' if self.bytes.get(i + 1) == Some(&b'\r') && self.bytes.get(i + 2) == Some(&b'\n') => i += 3,
                b'\n' => break,
                b'/' if self.bytes.get(i + 1) == Some(&b'*') => {
                    in_block = true;
                    i += 2;
                }
                b'/' if self.bytes.get(i + 1) == Some(&b'/') => {
                    while i < self.bytes.len() && self.bytes[i] != b'\n' {
                        i += 1;
                    }
                    break;
                }
                b'"' | b'\'' => {
                    quote = Some(b);
                    i += 1;
                }
                _ => i += 1,
            }
        }
        // a trailing '\r' belongs to the line break, not the directive
        let mut end = i.min(self.bytes.len());
        while end > self.pos && matches!(self.bytes[end - 1], b'\r' | b' ' | b'\t') {
            end -= 1;
        }
        end
    }
}
