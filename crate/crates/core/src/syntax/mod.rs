//! Concrete syntax: lexing, parsing, pretty-printing and the keyword check
//! that has to run on raw text before names are interned.

mod lexer;
mod parser;
mod printer;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ast::Program;

pub use parser::parse_str;
pub use printer::{print_expr, print_statement, pretty_print};

/// ISO C99 keywords.
pub const C99_KEYWORDS: [&str; 37] = [
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum", "extern",
    "float", "for", "goto", "if", "inline", "int", "long", "register", "restrict", "return", "short", "signed",
    "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void", "volatile", "while", "_Bool",
    "_Complex", "_Imaginary",
];

pub fn is_c_keyword(text: &str) -> bool {
    C99_KEYWORDS.contains(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(pos: lexer::Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
}

impl SourceFile {
    pub fn read(path: impl AsRef<Path>) -> std::io::Result<SourceFile> {
        let path = path.as_ref().to_path_buf();
        let text = std::fs::read_to_string(&path)?;
        Ok(SourceFile { path, text })
    }

    pub fn in_memory(text: impl Into<String>) -> SourceFile {
        SourceFile {
            path: PathBuf::from("<memory>"),
            text: text.into(),
        }
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())
    }
}

pub fn parse(src: &SourceFile) -> Result<Program, ParseError> {
    parse_str(&src.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyword_examples() {
        assert!(is_c_keyword("while"));
        assert!(is_c_keyword("volatile"));
        assert!(is_c_keyword("_Bool"));
        assert!(!is_c_keyword("y"));
        assert!(!is_c_keyword("main"));
        assert!(!is_c_keyword("bool"));
    }
}
