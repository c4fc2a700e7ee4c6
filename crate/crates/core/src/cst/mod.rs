//! C source front end: tokenizer, tolerant parser and standardizing renderer.

mod ast;
mod lexer;
mod parser;
mod render;

pub use ast::{AstNode, NodeKind, SourceUnit, Span};
pub use lexer::{decode, is_keyword, token_count, tokenize, tokenize_bytes, Token, TokenKind, Tokens, KEYWORDS};
pub use parser::parse;
pub use render::{normalize_directive, render};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CstError {
    #[error("invalid UTF-8 at line {line} (byte {byte})")]
    Encoding { line: usize, byte: usize },
    #[error("parse error at {line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
}

/// Parses and re-renders `text` in standardized form.
pub fn standardize(text: &str) -> Result<String, CstError> {
    parse(text).map(|ast| render(&ast))
}
