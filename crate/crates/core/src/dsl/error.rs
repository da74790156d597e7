use std::fmt;

/// What went wrong while reading a pulse program.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnknownSpin(String),
    MalformedAngle(String),
    NegativeDelay(f64),
    UnknownKeyword(String),
    Syntax(String),
}

/// Diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::UnknownSpin(s) => write!(f, "unknown spin {s}"),
            ParseErrorKind::MalformedAngle(s) => write!(f, "malformed angle '{s}'"),
            ParseErrorKind::NegativeDelay(d) => write!(f, "delay evaluates to negative {d} s"),
            ParseErrorKind::UnknownKeyword(s) => write!(f, "unknown keyword '{s}'"),
            ParseErrorKind::Syntax(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for ParseError {}
