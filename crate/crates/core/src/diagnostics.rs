use std::fmt;

use crate::event_reader::{ReaderError, SourcePosition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Note,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Note => "note",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reported problem. `code` is a stable identifier such as
/// `UndeclaredVar`; the full list is in the README.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub position: SourcePosition,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &'static str, position: SourcePosition, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code,
            position,
            message: message.into(),
        }
    }

    pub fn note(code: &'static str, position: SourcePosition, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Note,
            code,
            position,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `<file>:<line>:<col>: <severity> <code>: <message>`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{file}:{}:{}: {} {}: {}",
            self.position.line, self.position.column, self.severity, self.code, self.message
        )
    }
}

impl From<&ReaderError> for Diagnostic {
    fn from(e: &ReaderError) -> Self {
        Diagnostic::error(e.code.as_str(), e.position, e.detail.clone())
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Orders diagnostics by position and drops exact duplicates (same code at
/// the same place), which arise when two passes detect the same fault.
pub fn normalize(diagnostics: &mut Vec<Diagnostic>) {
    diagnostics.sort_by_key(|d| (d.position.byte_offset, std::cmp::Reverse(d.severity)));
    let mut seen = std::collections::HashSet::new();
    diagnostics.retain(|d| seen.insert((d.code, d.position.byte_offset)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_format() {
        let d = Diagnostic::error(
            "RepeatedDecl",
            SourcePosition { line: 3, column: 7, byte_offset: 40 },
            "'a' is already declared",
        );
        assert_eq!(
            d.render("bad.xml"),
            "bad.xml:3:7: error RepeatedDecl: 'a' is already declared"
        );
    }

    #[test]
    fn normalize_sorts_and_dedups() {
        let p = |o| SourcePosition { line: 1, column: o as u32 + 1, byte_offset: o };
        let mut v = vec![
            Diagnostic::error("B", p(5), "x"),
            Diagnostic::error("A", p(1), "y"),
            Diagnostic::error("B", p(5), "x again"),
        ];
        normalize(&mut v);
        assert_eq!(v.iter().map(|d| d.code).collect::<Vec<_>>(), vec!["A", "B"]);
    }
}
