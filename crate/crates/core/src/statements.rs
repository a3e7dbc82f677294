//! The control-flow mini-language carried by `<s>` tags.
//!
//! ```text
//! statement := "if" paren-group ["then"]
//!            | "else" | "endif" | "endloop"
//!            | "loop" "from" ident "=" expr "to" bound "step" expr
//! bound     := paren-group | expr
//! ```
//! Expressions and conditions are passed through verbatim.

use std::fmt;

use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::dsl::is_identifier;
use crate::event_reader::SourcePosition;
use crate::symbols::{ScopeId, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopBound {
    Limit(String),
    /// Parenthesized condition, parentheses included.
    Condition(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopHeader {
    pub index: String,
    pub start: String,
    pub bound: LoopBound,
    pub step: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    If(String),
    Else,
    EndIf,
    Loop(LoopHeader),
    EndLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct MalformedStatement(pub String);

impl Statement {
    /// Canonical source form; `parse_statement` maps it back to `self`.
    pub fn render(&self) -> String {
        match self {
            Statement::If(c) => format!("if ({c})"),
            Statement::Else => "else".into(),
            Statement::EndIf => "endif".into(),
            Statement::EndLoop => "endloop".into(),
            Statement::Loop(h) => {
                let bound = match &h.bound {
                    LoopBound::Limit(l) => l,
                    LoopBound::Condition(c) => c,
                };
                format!("loop from {} = {} to {} step {}", h.index, h.start, bound, h.step)
            }
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Index one past the parenthesis matching the `(` at `open`, skipping
/// string and character literals.
fn matching_paren(text: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (i, c) in text[open..].char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
            }
            continue;
        }
        match c {
            '"' | '\'' => quote = Some(c),
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(open + i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Byte offset of the first top-level occurrence of keyword `kw` as a whole
/// word, outside parentheses and literals.
fn find_keyword(text: &str, kw: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut prev: Option<char> = None;
    for (i, c) in text.char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
            }
            prev = Some(c);
            continue;
        }
        match c {
            '"' | '\'' => quote = Some(c),
            '(' => depth += 1,
            ')' => depth -= 1,
            _ if depth == 0 && !prev.is_some_and(is_ident_char) && text[i..].starts_with(kw) => {
                let after = text[i + kw.len()..].chars().next();
                if !after.is_some_and(is_ident_char) {
                    return Some(i);
                }
            }
            _ => {}
        }
        prev = Some(c);
    }
    None
}

fn leading_word(text: &str) -> (&str, &str) {
    let end = text
        .char_indices()
        .find(|&(_, c)| !c.is_ascii_alphabetic())
        .map_or(text.len(), |(i, _)| i);
    (&text[..end], &text[end..])
}

fn malformed(msg: impl Into<String>) -> MalformedStatement {
    MalformedStatement(msg.into())
}

fn parse_loop(rest: &str) -> Result<LoopHeader, MalformedStatement> {
    let rest = rest.trim_start();
    let (from, rest) = leading_word(rest);
    if from != "from" {
        return Err(malformed("expected 'loop from <index> = <start> to <bound> step <step>'"));
    }
    let (index, rest) = rest
        .split_once('=')
        .ok_or_else(|| malformed("expected '=' after the loop index"))?;
    let index = index.trim();
    if !is_identifier(index) {
        return Err(malformed(format!("'{index}' is not a valid loop index")));
    }
    if rest.starts_with('=') {
        return Err(malformed("expected '=' after the loop index, found '=='"));
    }
    let to = find_keyword(rest, "to").ok_or_else(|| malformed("missing 'to' in loop header"))?;
    let start = rest[..to].trim();
    if start.is_empty() {
        return Err(malformed("missing start value in loop header"));
    }
    let after_to = rest[to + 2..].trim_start();
    let (bound, after_bound) = if after_to.starts_with('(') {
        let close = matching_paren(after_to, 0)
            .ok_or_else(|| malformed("unbalanced parenthesis in loop condition"))?;
        (LoopBound::Condition(after_to[..close].to_string()), &after_to[close..])
    } else {
        let step = find_keyword(after_to, "step").ok_or_else(|| malformed("missing 'step' in loop header"))?;
        (LoopBound::Limit(after_to[..step].trim().to_string()), &after_to[step..])
    };
    match &bound {
        LoopBound::Limit(l) if l.is_empty() => return Err(malformed("missing loop limit")),
        _ => {}
    }
    let after_bound = after_bound.trim_start();
    let step = after_bound
        .strip_prefix("step")
        .filter(|s| !s.starts_with(is_ident_char))
        .ok_or_else(|| malformed("missing 'step' in loop header"))?
        .trim();
    if step.is_empty() {
        return Err(malformed("missing step value in loop header"));
    }
    Ok(LoopHeader {
        index: index.to_string(),
        start: start.to_string(),
        bound,
        step: step.to_string(),
    })
}

/// Parses the content of an `<s>` element.
pub fn parse_statement(text: &str) -> Result<Statement, MalformedStatement> {
    let text = text.trim();
    let (word, rest) = leading_word(text);
    let bare = |s: Statement| {
        if rest.trim().is_empty() {
            Ok(s)
        } else {
            Err(malformed(format!("unexpected text after '{word}'")))
        }
    };
    match word {
        "if" => {
            let rest = rest.trim_start();
            if !rest.starts_with('(') {
                return Err(malformed("the condition must be enclosed in parentheses"));
            }
            let close = matching_paren(rest, 0).ok_or_else(|| malformed("unbalanced parenthesis in condition"))?;
            let cond = rest[1..close - 1].trim();
            if cond.is_empty() {
                return Err(malformed("empty condition"));
            }
            match rest[close..].trim() {
                "" | "then" => Ok(Statement::If(cond.to_string())),
                other => Err(malformed(format!("unexpected '{other}' after condition"))),
            }
        }
        "else" if leading_word(rest.trim_start()).0 == "if" => {
            Err(malformed("'else if' chains are not supported; nest an if inside else"))
        }
        "else" => bare(Statement::Else),
        "endif" => bare(Statement::EndIf),
        "endloop" => bare(Statement::EndLoop),
        "loop" => parse_loop(rest).map(Statement::Loop),
        "" => Err(malformed("empty statement")),
        other => Err(malformed(format!("unknown statement keyword '{other}'"))),
    }
}

const JAVA_WORDS: &[&str] = &["true", "false", "null", "new", "instanceof", "this"];

/// Identifier tokens in an expression that refer to variables: string and
/// character literals, numbers, member names after `.` and Java literal
/// keywords are skipped.
pub fn referenced_identifiers(expr: &str) -> Vec<String> {
    let chars: Vec<char> = expr.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut prev_sig: Option<char> = None;
    while i < chars.len() {
        let c = chars[i];
        if c == '"' || c == '\'' {
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            i += 1;
            prev_sig = Some(c);
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && (is_ident_char(chars[i]) || chars[i] == '.') {
                i += 1;
            }
            prev_sig = Some('0');
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            // `Math.max(..)`: capitalized qualifiers are taken as class names
            let qualifier = c.is_uppercase() && chars[i..].iter().find(|c| !c.is_whitespace()) == Some(&'.');
            if prev_sig != Some('.') && !qualifier && is_identifier(&word) && !JAVA_WORDS.contains(&word.as_str()) {
                out.push(word);
            }
            prev_sig = Some('a');
            continue;
        }
        if !c.is_whitespace() {
            prev_sig = Some(c);
        }
        i += 1;
    }
    out
}

/// Renders a loop header as a Java `for` statement opener. The index gets
/// an inline `int` declaration when it is undeclared (lenient mode) or was
/// implicitly declared by an earlier loop.
pub fn translate_loop_header(
    header: &LoopHeader,
    strict: bool,
    table: &SymbolTable,
    scope: ScopeId,
    at: SourcePosition,
) -> Result<String, Diagnostic> {
    let decl = match table.lookup_from(scope, &header.index) {
        Some(sym) if sym.implicit => "int ",
        Some(_) => "",
        None if strict => {
            return Err(Diagnostic::error(
                "UndeclaredVar",
                at,
                format!("loop index '{}' must be declared before use", header.index),
            ))
        }
        None => "int ",
    };
    let i = &header.index;
    let cond = match &header.bound {
        LoopBound::Limit(limit) => format!("{i}<={limit}"),
        LoopBound::Condition(c) => c.clone(),
    };
    Ok(format!("for({decl}{i}={};{cond};{i}={i}+{}){{", header.start, header.step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    If,
    Loop,
    Try,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::If => "if",
            BlockKind::Loop => "loop",
            BlockKind::Try => "database",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OpenBlock {
    kind: BlockKind,
    opened_at: SourcePosition,
    has_else: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct UnbalancedBlock {
    pub position: SourcePosition,
    pub message: String,
}

impl From<UnbalancedBlock> for Diagnostic {
    fn from(e: UnbalancedBlock) -> Self {
        Diagnostic::error("UnbalancedBlock", e.position, e.message)
    }
}

/// Checks that if/else/endif, loop/endloop and database try blocks nest
/// properly.
#[derive(Debug, Clone, Default)]
pub struct BlockTracker {
    stack: Vec<OpenBlock>,
}

impl BlockTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    pub fn top(&self) -> Option<BlockKind> {
        self.stack.last().map(|b| b.kind)
    }

    pub fn contains(&self, kind: BlockKind) -> bool {
        self.stack.iter().any(|b| b.kind == kind)
    }

    pub fn open_try(&mut self, at: SourcePosition) {
        self.stack.push(OpenBlock {
            kind: BlockKind::Try,
            opened_at: at,
            has_else: false,
        });
    }

    /// Pops a try block if it is innermost.
    pub fn close_try(&mut self) -> bool {
        if self.top() == Some(BlockKind::Try) {
            self.stack.pop();
            true
        } else {
            false
        }
    }

    pub fn track(&mut self, s: &Statement, at: SourcePosition) -> Result<(), UnbalancedBlock> {
        let err = |message: String| UnbalancedBlock { position: at, message };
        match s {
            Statement::If(_) | Statement::Loop(_) => {
                self.stack.push(OpenBlock {
                    kind: if matches!(s, Statement::If(_)) { BlockKind::If } else { BlockKind::Loop },
                    opened_at: at,
                    has_else: false,
                });
                Ok(())
            }
            Statement::Else => match self.stack.last_mut() {
                Some(b) if b.kind == BlockKind::If && !b.has_else => {
                    b.has_else = true;
                    Ok(())
                }
                Some(b) if b.kind == BlockKind::If => Err(err("this if block already has an else".into())),
                Some(b) => Err(err(format!("else inside an open {} block", b.kind))),
                None => Err(err("else without a matching if".into())),
            },
            Statement::EndIf | Statement::EndLoop => {
                let want = if matches!(s, Statement::EndIf) { BlockKind::If } else { BlockKind::Loop };
                match self.stack.last() {
                    Some(b) if b.kind == want => {
                        self.stack.pop();
                        Ok(())
                    }
                    Some(b) => Err(err(format!(
                        "{} closes a {} block opened at {}",
                        s.render(),
                        b.kind,
                        b.opened_at
                    ))),
                    None => Err(err(format!("{} without a matching opener", s.render()))),
                }
            }
        }
    }

    /// Removes the innermost open block.
    pub fn pop(&mut self) -> Option<(BlockKind, SourcePosition)> {
        self.stack.pop().map(|b| (b.kind, b.opened_at))
    }

    /// Reports every block still open, innermost last.
    pub fn finish(&mut self) -> Vec<UnbalancedBlock> {
        self.stack
            .drain(..)
            .map(|b| UnbalancedBlock {
                position: b.opened_at,
                message: format!("{} block opened here is never closed", b.kind),
            })
            .collect()
    }
}

pub fn track_block(tracker: &mut BlockTracker, s: &Statement, at: SourcePosition) -> Result<(), UnbalancedBlock> {
    tracker.track(s, at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{DslType, Symbol, SymbolTable};

    fn p(text: &str) -> Statement {
        parse_statement(text).unwrap()
    }

    #[test]
    fn parses_worked_examples() {
        assert_eq!(
            p("loop from xx = 2 to 10 step 2"),
            Statement::Loop(LoopHeader {
                index: "xx".into(),
                start: "2".into(),
                bound: LoopBound::Limit("10".into()),
                step: "2".into(),
            })
        );
        assert_eq!(p(" endif "), Statement::EndIf);
        assert_eq!(p("if( r!=0)"), Statement::If("r!=0".into()));
        assert_eq!(p("if (a > b) then"), Statement::If("a > b".into()));
        assert_eq!(p("else"), Statement::Else);
        assert_eq!(p("endloop"), Statement::EndLoop);
    }

    #[test]
    fn condition_bound() {
        let Statement::Loop(h) = p("loop from i=a to (i<n && ok) step 1") else { panic!() };
        assert_eq!(h.start, "a");
        assert_eq!(h.bound, LoopBound::Condition("(i<n && ok)".into()));
        assert_eq!(h.step, "1");
    }

    #[test]
    fn keywords_inside_expressions_are_not_split() {
        let Statement::Loop(h) = p("loop from i = total to stop step steps") else { panic!() };
        assert_eq!((h.start.as_str(), h.step.as_str()), ("total", "steps"));
        assert_eq!(h.bound, LoopBound::Limit("stop".into()));
        let Statement::Loop(h) = p("loop from i = f(\"to\") to g(to) step 1") else { panic!() };
        assert_eq!(h.start, "f(\"to\")");
        assert_eq!(h.bound, LoopBound::Limit("g(to)".into()));
    }

    #[test]
    fn malformed_statements() {
        for bad in [
            "if r!=0",
            "if ()",
            "if (a",
            "if (a) than",
            "else if (a)",
            "endif x",
            "loop from 9 = 1 to 2 step 1",
            "loop from i = 1 to 2",
            "loop from i = 1 to 2 step",
            "loop from i = to 2 step 1",
            "loop from i = 1 to step 1",
            "loop i = 1 to 2 step 1",
            "loop from i == 1 to 2 step 1",
            "while (x)",
            "",
            "iffy (x)",
        ] {
            assert!(parse_statement(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn identifiers_in_expressions() {
        assert_eq!(referenced_identifiers(" r!=0"), vec!["r"]);
        assert_eq!(
            referenced_identifiers(r#"name.equals("x y") && count > 10L || flag == true"#),
            vec!["name", "count", "flag"]
        );
        assert_eq!(referenced_identifiers("a.b.c + 'q' + 1e5"), vec!["a"]);
        assert_eq!(referenced_identifiers("Math.max(x, n) > limit"), vec!["x", "n", "limit"]);
        assert!(referenced_identifiers("\"escaped \\\" quote\"").is_empty());
    }

    fn table_with(names: &[&str]) -> SymbolTable {
        let mut t = SymbolTable::new();
        for n in names {
            t.declare(Symbol::new(n, DslType::Int, SourcePosition::START)).unwrap();
        }
        t
    }

    fn header(text: &str) -> LoopHeader {
        match p(text) {
            Statement::Loop(h) => h,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_translation() {
        let empty = table_with(&[]);
        let body = empty.body_scope();
        assert_eq!(
            translate_loop_header(&header("loop from xx = 2 to 10 step 2"), false, &empty, body, SourcePosition::START).unwrap(),
            "for(int xx=2;xx<=10;xx=xx+2){"
        );
        let with_i = table_with(&["i", "a", "n", "ok"]);
        assert_eq!(
            translate_loop_header(&header("loop from i = 0 to 0 step 1"), false, &with_i, body, SourcePosition::START).unwrap(),
            "for(i=0;i<=0;i=i+1){"
        );
        assert_eq!(
            translate_loop_header(&header("loop from i=a to (i<n && ok) step 1"), true, &with_i, body, SourcePosition::START).unwrap(),
            "for(i=a;(i<n && ok);i=i+1){"
        );
        let err = translate_loop_header(&header("loop from q = 1 to 2 step 1"), true, &with_i, body, SourcePosition::START)
            .unwrap_err();
        assert_eq!(err.code, "UndeclaredVar");
    }

    #[test]
    fn block_tracking() {
        let at = SourcePosition::START;
        let mut t = BlockTracker::new();
        t.track(&Statement::If("a".into()), at).unwrap();
        assert!(t.track(&Statement::EndLoop, at).is_err());

        let mut t = BlockTracker::new();
        t.track(&Statement::If("a".into()), at).unwrap();
        t.track(&Statement::Else, at).unwrap();
        assert!(t.track(&Statement::Else, at).is_err());

        let mut t = BlockTracker::new();
        t.open_try(at);
        t.track(&Statement::Loop(header("loop from i = 1 to 2 step 1")), at).unwrap();
        assert!(!t.close_try());
        t.track(&Statement::EndLoop, at).unwrap();
        assert!(t.close_try());
        assert!(t.finish().is_empty());
    }

    #[test]
    fn unclosed_blocks_report_their_openers() {
        let mut t = BlockTracker::new();
        let opened = SourcePosition { line: 4, column: 1, byte_offset: 30 };
        t.track(&Statement::Loop(header("loop from i = 1 to 2 step 1")), opened).unwrap();
        let errs = t.finish();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].position, opened);
    }

    #[derive(Clone, Copy, Debug)]
    enum Tok {
        If,
        Else,
        EndIf,
        Loop,
        EndLoop,
    }

    /// Recursive-descent recognizer for
    /// `block := (If block [Else block] EndIf | Loop block EndLoop)*`.
    fn grammar_accepts(toks: &[Tok]) -> bool {
        fn block(toks: &[Tok], mut i: usize) -> usize {
            loop {
                match toks.get(i) {
                    Some(Tok::If) => {
                        let j = block(toks, i + 1);
                        let j = if matches!(toks.get(j), Some(Tok::Else)) { block(toks, j + 1) } else { j };
                        if !matches!(toks.get(j), Some(Tok::EndIf)) {
                            return usize::MAX;
                        }
                        i = j + 1;
                    }
                    Some(Tok::Loop) => {
                        let j = block(toks, i + 1);
                        if !matches!(toks.get(j), Some(Tok::EndLoop)) {
                            return usize::MAX;
                        }
                        i = j + 1;
                    }
                    _ => return i,
                }
                if i == usize::MAX {
                    return i;
                }
            }
        }
        // usize::MAX propagates as a failure through `get` returning None
        block(toks, 0) == toks.len()
    }

    #[test]
    fn tracker_accepts_exactly_the_balanced_sequences() {
        let alphabet = [Tok::If, Tok::Else, Tok::EndIf, Tok::Loop, Tok::EndLoop];
        let lp = header("loop from i = 1 to 2 step 1");
        let mut checked = 0;
        for len in 0..=6u32 {
            for code in 0..5usize.pow(len) {
                let mut c = code;
                let toks: Vec<Tok> = (0..len)
                    .map(|_| {
                        let t = alphabet[c % 5];
                        c /= 5;
                        t
                    })
                    .collect();
                let mut tracker = BlockTracker::new();
                let ok = toks.iter().all(|t| {
                    let s = match t {
                        Tok::If => Statement::If("c".into()),
                        Tok::Else => Statement::Else,
                        Tok::EndIf => Statement::EndIf,
                        Tok::Loop => Statement::Loop(lp.clone()),
                        Tok::EndLoop => Statement::EndLoop,
                    };
                    tracker.track(&s, SourcePosition::START).is_ok()
                }) && tracker.finish().is_empty();
                assert_eq!(ok, grammar_accepts(&toks), "{toks:?}");
                checked += 1;
            }
        }
        assert_eq!(checked, (0..=6).map(|l| 5usize.pow(l)).sum::<usize>());
    }
}
