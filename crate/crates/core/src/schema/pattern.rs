//! XML Schema regular expressions.
//!
//! XSD patterns differ from Perl-style expressions: they are implicitly
//! anchored, `^` and `$` are ordinary characters, `\s` is exactly the four
//! XML whitespace characters, `\w` is "anything but punctuation, separators
//! and other", `.` excludes CR as well as LF, and character classes support
//! subtraction (`[a-z-[aeiou]]`). Patterns are translated once into the
//! `regex` crate's syntax.

use std::fmt;

use regex::Regex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid pattern {pattern:?}: {reason}")]
pub struct PatternError {
    pub pattern: String,
    pub reason: String,
}

/// A compiled XSD pattern facet.
#[derive(Clone)]
pub struct Pattern {
    source: String,
    regex: Regex,
}

impl Pattern {
    pub fn new(xsd_pattern: &str) -> Result<Self, PatternError> {
        let err = |reason: String| PatternError {
            pattern: xsd_pattern.to_string(),
            reason,
        };
        let body = Translator::new(xsd_pattern).translate().map_err(err)?;
        let regex = Regex::new(&format!("^(?:{body})$")).map_err(|e| err(e.to_string()))?;
        Ok(Self {
            source: xsd_pattern.to_string(),
            regex,
        })
    }

    /// The pattern as written in XSD syntax.
    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Pattern").field(&self.source).finish()
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

/// True iff the whole of `text` matches `pattern`.
pub fn check_content_pattern(text: &str, pattern: &Pattern) -> bool {
    pattern.is_match(text)
}

const XSD_SPACE: &str = r"\t\n\r ";
const XSD_WORD_COMPLEMENT: &str = r"\p{P}\p{Z}\p{C}";

struct Translator<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

fn class_literal(c: char) -> String {
    if c.is_ascii_alphanumeric() {
        c.to_string()
    } else {
        format!("\\x{{{:X}}}", c as u32)
    }
}

impl<'a> Translator<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().peekable(),
        }
    }

    fn translate(mut self) -> Result<String, String> {
        let mut out = String::new();
        while let Some(c) = self.chars.next() {
            match c {
                '\\' => out.push_str(&self.escape(false)?),
                '[' => out.push_str(&self.class()?),
                ']' => return Err("unbalanced ']'".into()),
                '.' => out.push_str(r"[^\n\r]"),
                '(' => out.push_str("(?:"),
                ')' | '|' | '*' | '+' | '?' => out.push(c),
                '{' => {
                    let mut q = String::from("{");
                    loop {
                        match self.chars.next() {
                            Some('}') => break,
                            Some(d) if d.is_ascii_digit() || d == ',' => q.push(d),
                            _ => return Err("malformed quantifier".into()),
                        }
                    }
                    q.push('}');
                    out.push_str(&q);
                }
                _ => out.push_str(&regex::escape(c.encode_utf8(&mut [0; 4]))),
            }
        }
        Ok(out)
    }

    fn category(&mut self, negated: bool) -> Result<String, String> {
        if self.chars.next() != Some('{') {
            return Err("expected '{' after \\p".into());
        }
        let mut name = String::new();
        loop {
            match self.chars.next() {
                Some('}') => break,
                Some(c) if c.is_ascii_alphanumeric() || c == '-' => name.push(c),
                _ => return Err("malformed category escape".into()),
            }
        }
        if name.starts_with("Is") {
            return Err(format!("block escape \\p{{{name}}} is not supported"));
        }
        Ok(format!("\\{}{{{name}}}", if negated { 'P' } else { 'p' }))
    }

    /// Translates the escape following a backslash. Inside a class the
    /// result is a class item; outside it is a standalone atom.
    fn escape(&mut self, in_class: bool) -> Result<String, String> {
        let c = self.chars.next().ok_or("trailing backslash")?;
        let wrap = |items: &str, negate: bool| {
            format!("[{}{}]", if negate { "^" } else { "" }, items)
        };
        Ok(match c {
            's' if in_class => XSD_SPACE.to_string(),
            's' => wrap(XSD_SPACE, false),
            'S' => wrap(XSD_SPACE, true),
            'w' => wrap(XSD_WORD_COMPLEMENT, true),
            'W' if in_class => XSD_WORD_COMPLEMENT.to_string(),
            'W' => wrap(XSD_WORD_COMPLEMENT, false),
            'd' => r"\p{Nd}".to_string(),
            'D' => r"\P{Nd}".to_string(),
            'p' => self.category(false)?,
            'P' => self.category(true)?,
            'n' => r"\n".to_string(),
            'r' => r"\r".to_string(),
            't' => r"\t".to_string(),
            '\\' | '|' | '.' | '-' | '^' | '?' | '*' | '+' | '{' | '}' | '(' | ')' | '[' | ']' => {
                class_literal(c)
            }
            'i' | 'I' | 'c' | 'C' => return Err(format!("escape \\{c} is not supported")),
            _ => return Err(format!("unknown escape \\{c}")),
        })
    }

    /// Translates a character class; the opening `[` is already consumed.
    fn class(&mut self) -> Result<String, String> {
        let negated = self.chars.peek() == Some(&'^');
        if negated {
            self.chars.next();
        }
        let mut items = String::new();
        let mut first = true;
        let mut subtraction = None;
        loop {
            let c = self.chars.next().ok_or("unterminated character class")?;
            match c {
                ']' if !first => break,
                '-' if self.chars.peek() == Some(&'[') => {
                    self.chars.next();
                    subtraction = Some(self.class()?);
                    if self.chars.next() != Some(']') {
                        return Err("subtraction must end the character class".into());
                    }
                    break;
                }
                '[' => return Err("unescaped '[' in character class".into()),
                _ => {
                    let start = if c == '\\' {
                        let next = *self.chars.peek().ok_or("trailing backslash")?;
                        if matches!(next, 's' | 'S' | 'w' | 'W' | 'd' | 'D' | 'p' | 'P') {
                            items.push_str(&self.escape(true)?);
                            first = false;
                            continue;
                        }
                        self.escape(true)?
                    } else {
                        class_literal(c)
                    };
                    // a '-' followed by something other than ']' or '[' forms a range
                    let mut lookahead = self.chars.clone();
                    if lookahead.next() == Some('-') && !matches!(lookahead.peek(), Some(']') | Some('[') | None) {
                        self.chars.next();
                        let hi = match self.chars.next() {
                            Some('\\') => self.escape(true)?,
                            Some(h) => class_literal(h),
                            None => return Err("unterminated range".into()),
                        };
                        items.push_str(&format!("{start}-{hi}"));
                    } else {
                        items.push_str(&start);
                    }
                }
            }
            first = false;
        }
        if items.is_empty() {
            return Err("empty character class".into());
        }
        let base = format!("[{}{}]", if negated { "^" } else { "" }, items);
        Ok(match subtraction {
            Some(sub) => format!("[{base}--{sub}]"),
            None => base,
        })
    }
}
