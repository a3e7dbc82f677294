//! Pull-style streaming reader for the XML subset used by the tag dialect.
//!
//! The reader yields five kinds of events (document start/end, element
//! start/end and character data) and keeps only the currently open element
//! names plus the text node being assembled in memory. Comments are skipped;
//! CDATA sections, processing instructions and DTDs are rejected.

use std::fmt;
use std::io::{self, Read};

use thiserror::Error;

/// Maximum element nesting accepted by the reader.
pub const MAX_DEPTH: usize = 256;

const CHUNK: usize = 64 * 1024;

/// A location in the input. Lines and columns are 1-based; columns count
/// characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourcePosition {
    pub line: u32,
    pub column: u32,
    pub byte_offset: u64,
}

impl SourcePosition {
    pub const START: SourcePosition = SourcePosition {
        line: 1,
        column: 1,
        byte_offset: 0,
    };
}

impl Default for SourcePosition {
    fn default() -> Self {
        Self::START
    }
}

impl fmt::Display for SourcePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub value: String,
    pub position: SourcePosition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    StartDocument,
    EndDocument,
    StartElement {
        name: String,
        attributes: Vec<Attribute>,
    },
    EndElement {
        name: String,
    },
    Characters(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlEvent {
    pub kind: EventKind,
    pub position: SourcePosition,
}

impl XmlEvent {
    pub fn element_name(&self) -> Option<&str> {
        match &self.kind {
            EventKind::StartElement { name, .. } | EventKind::EndElement { name } => Some(name),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReaderErrorCode {
    UnexpectedEof,
    MismatchedCloseTag,
    IllegalCharacter,
    BadEntity,
    MultipleRoots,
    BadProlog,
    NestingTooDeep,
    Io,
}

impl ReaderErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::UnexpectedEof => "UnexpectedEof",
            Self::MismatchedCloseTag => "MismatchedCloseTag",
            Self::IllegalCharacter => "IllegalCharacter",
            Self::BadEntity => "BadEntity",
            Self::MultipleRoots => "MultipleRoots",
            Self::BadProlog => "BadProlog",
            Self::NestingTooDeep => "NestingTooDeep",
            Self::Io => "Io",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {}: {detail}", code.as_str())]
pub struct ReaderError {
    pub code: ReaderErrorCode,
    pub position: SourcePosition,
    pub detail: String,
}

impl ReaderError {
    pub fn new(code: ReaderErrorCode, position: SourcePosition, detail: impl Into<String>) -> Self {
        Self {
            code,
            position,
            detail: detail.into(),
        }
    }

    /// A failure to open or read the underlying source.
    pub fn io(e: &std::io::Error) -> Self {
        Self::new(ReaderErrorCode::Io, SourcePosition::START, e.to_string())
    }
}

/// Byte cursor with arbitrary lookahead over a `Read`, tracking positions.
struct Cursor<R> {
    inner: R,
    buf: Vec<u8>,
    start: usize,
    eof: bool,
    pos: SourcePosition,
}

impl<R: Read> Cursor<R> {
    fn new(inner: R) -> Self {
        Self {
            inner,
            buf: Vec::new(),
            start: 0,
            eof: false,
            pos: SourcePosition::START,
        }
    }

    fn fill(&mut self, want: usize) -> io::Result<()> {
        while self.buf.len() - self.start < want && !self.eof {
            if self.start > 0 {
                self.buf.drain(..self.start);
                self.start = 0;
            }
            let len = self.buf.len();
            self.buf.resize(len + CHUNK, 0);
            let n = loop {
                match self.inner.read(&mut self.buf[len..]) {
                    Ok(n) => break n,
                    Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                    Err(e) => {
                        self.buf.truncate(len);
                        return Err(e);
                    }
                }
            };
            self.buf.truncate(len + n);
            if n == 0 {
                self.eof = true;
            }
        }
        Ok(())
    }

    fn peek_at(&mut self, n: usize) -> io::Result<Option<u8>> {
        self.fill(n + 1)?;
        Ok(self.buf.get(self.start + n).copied())
    }

    fn peek(&mut self) -> io::Result<Option<u8>> {
        if self.start < self.buf.len() {
            return Ok(Some(self.buf[self.start]));
        }
        self.peek_at(0)
    }

    fn starts_with(&mut self, s: &[u8]) -> io::Result<bool> {
        self.fill(s.len())?;
        Ok(self.buf[self.start..].starts_with(s))
    }

    /// Consumes one byte that has already been peeked.
    fn bump(&mut self) -> u8 {
        let b = self.buf[self.start];
        self.start += 1;
        self.pos.byte_offset += 1;
        match b {
            b'\n' => {
                self.pos.line += 1;
                self.pos.column = 1;
            }
            b'\r' => {
                // A CR starts a new line only when it is not half of CRLF.
                if self.buf.get(self.start) == Some(&b'\n') {
                    self.pos.column += 1;
                } else {
                    self.pos.line += 1;
                    self.pos.column = 1;
                }
            }
            0x80..=0xBF => {}
            _ => self.pos.column += 1,
        }
        b
    }

    fn skip(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    BeforeStart,
    Prolog,
    Content,
    Epilog,
    Done,
}

/// Streaming event reader. Obtain one with [`open_document`].
pub struct XmlReader<R> {
    cur: Cursor<R>,
    open: Vec<String>,
    phase: Phase,
    pending: Option<XmlEvent>,
    failed: bool,
}

fn is_xml_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

fn is_name_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_name_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'-'
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r')
        || ('\u{20}'..='\u{D7FF}').contains(&c)
        || ('\u{E000}'..='\u{FFFD}').contains(&c)
        || c >= '\u{10000}'
}

/// Opens a document, consuming an optional byte-order mark and XML
/// declaration. The returned handle yields `StartDocument` first.
pub fn open_document<R: Read>(source: R) -> Result<XmlReader<R>, ReaderError> {
    let mut reader = XmlReader {
        cur: Cursor::new(source),
        open: Vec::new(),
        phase: Phase::BeforeStart,
        pending: None,
        failed: false,
    };
    reader.read_prolog()?;
    Ok(reader)
}

impl<R: Read> XmlReader<R> {
    /// Current nesting depth.
    pub fn depth(&self) -> usize {
        self.open.len()
    }

    fn io_err(&self, e: io::Error) -> ReaderError {
        ReaderError::new(ReaderErrorCode::Io, self.cur.pos, e.to_string())
    }

    fn err(&self, code: ReaderErrorCode, detail: impl Into<String>) -> ReaderError {
        ReaderError::new(code, self.cur.pos, detail)
    }

    fn peek(&mut self) -> Result<Option<u8>, ReaderError> {
        self.cur.peek().map_err(|e| self.io_err(e))
    }

    fn starts_with(&mut self, s: &[u8]) -> Result<bool, ReaderError> {
        self.cur.starts_with(s).map_err(|e| self.io_err(e))
    }

    fn expect_byte(&mut self) -> Result<u8, ReaderError> {
        match self.peek()? {
            Some(_) => Ok(self.cur.bump()),
            None => Err(self.err(
                ReaderErrorCode::UnexpectedEof,
                "unexpected end of input",
            )),
        }
    }

    fn skip_space(&mut self) -> Result<bool, ReaderError> {
        let mut any = false;
        while let Some(b) = self.peek()? {
            if !is_xml_space(b) {
                break;
            }
            self.cur.bump();
            any = true;
        }
        Ok(any)
    }

    fn read_prolog(&mut self) -> Result<(), ReaderError> {
        if self.starts_with(b"\xEF\xBB\xBF")? {
            self.cur.skip(3);
        }
        if self.starts_with(b"<?xml")? {
            let after = self.cur.peek_at(5).map_err(|e| self.io_err(e))?;
            if after.is_some_and(is_xml_space) {
                self.read_xml_decl()?;
            }
        }
        Ok(())
    }

    fn read_xml_decl(&mut self) -> Result<(), ReaderError> {
        let bad = |r: &Self, msg: &str| r.err(ReaderErrorCode::BadProlog, msg.to_string());
        self.cur.skip(5);
        let mut seen = Vec::new();
        loop {
            let spaced = self.skip_space()?;
            if self.starts_with(b"?>")? {
                self.cur.skip(2);
                break;
            }
            if self.peek()?.is_none() {
                return Err(bad(self, "unterminated XML declaration"));
            }
            if !spaced {
                return Err(bad(self, "expected whitespace in XML declaration"));
            }
            let name = self
                .read_name()
                .map_err(|_| bad(self, "malformed pseudo-attribute in XML declaration"))?;
            self.skip_space()?;
            if self.peek()? != Some(b'=') {
                return Err(bad(self, "expected '=' in XML declaration"));
            }
            self.cur.bump();
            self.skip_space()?;
            let quote = match self.peek()? {
                Some(q @ (b'"' | b'\'')) => {
                    self.cur.bump();
                    q
                }
                _ => return Err(bad(self, "expected quoted value in XML declaration")),
            };
            let mut value = Vec::new();
            loop {
                match self.peek()? {
                    None => return Err(bad(self, "unterminated value in XML declaration")),
                    Some(b) if b == quote => {
                        self.cur.bump();
                        break;
                    }
                    Some(_) => value.push(self.cur.bump()),
                }
            }
            let value = String::from_utf8_lossy(&value).into_owned();
            let order = match name.as_str() {
                "version" => 0,
                "encoding" => 1,
                "standalone" => 2,
                _ => return Err(bad(self, &format!("unknown declaration field '{name}'"))),
            };
            if seen.last().is_some_and(|&last| last >= order) || (seen.is_empty() && order != 0) {
                return Err(bad(self, "XML declaration fields out of order"));
            }
            seen.push(order);
            let ok = match order {
                0 => {
                    value.len() > 2
                        && value.starts_with("1.")
                        && value[2..].bytes().all(|b| b.is_ascii_digit())
                }
                1 => value.eq_ignore_ascii_case("utf-8"),
                _ => value == "yes" || value == "no",
            };
            if !ok {
                return Err(bad(self, &format!("unsupported {name} '{value}'")));
            }
        }
        if seen.is_empty() {
            return Err(bad(self, "XML declaration lacks a version"));
        }
        Ok(())
    }

    fn read_name(&mut self) -> Result<String, ReaderError> {
        let mut name = String::new();
        match self.peek()? {
            Some(b) if is_name_start(b) => name.push(self.cur.bump() as char),
            Some(b) if b >= 0x80 || b == b':' => {
                return Err(self.err(
                    ReaderErrorCode::IllegalCharacter,
                    "names are restricted to ASCII letters, digits, '_' and '-'",
                ))
            }
            Some(_) => return Err(self.err(ReaderErrorCode::IllegalCharacter, "expected a name")),
            None => return Err(self.err(ReaderErrorCode::UnexpectedEof, "expected a name")),
        }
        while let Some(b) = self.peek()? {
            if is_name_char(b) {
                name.push(self.cur.bump() as char);
            } else if b == b':' || b == b'.' || b >= 0x80 {
                return Err(self.err(
                    ReaderErrorCode::IllegalCharacter,
                    "names are restricted to ASCII letters, digits, '_' and '-'",
                ));
            } else {
                break;
            }
        }
        Ok(name)
    }

    /// Decodes an entity or character reference; the cursor sits on `&`.
    fn read_reference(&mut self, out: &mut Vec<u8>) -> Result<(), ReaderError> {
        let at = self.cur.pos;
        self.cur.bump();
        let mut body = String::new();
        loop {
            match self.peek()? {
                Some(b';') => {
                    self.cur.bump();
                    break;
                }
                Some(b) if body.len() < 12 && (b.is_ascii_alphanumeric() || b == b'#') => {
                    body.push(self.cur.bump() as char);
                }
                _ => {
                    return Err(ReaderError::new(
                        ReaderErrorCode::BadEntity,
                        at,
                        "malformed entity reference",
                    ))
                }
            }
        }
        let decoded = match body.as_str() {
            "lt" => Some('<'),
            "gt" => Some('>'),
            "amp" => Some('&'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ => body.strip_prefix('#').and_then(|num| {
                let code = match num.strip_prefix('x') {
                    Some(hex) if !hex.is_empty() && hex.bytes().all(|b| b.is_ascii_hexdigit()) => {
                        u32::from_str_radix(hex, 16).ok()
                    }
                    None if !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()) => {
                        num.parse().ok()
                    }
                    _ => None,
                };
                code.and_then(char::from_u32).filter(|&c| is_xml_char(c))
            }),
        };
        match decoded {
            Some(c) => {
                let mut tmp = [0u8; 4];
                out.extend_from_slice(c.encode_utf8(&mut tmp).as_bytes());
                Ok(())
            }
            None => Err(ReaderError::new(
                ReaderErrorCode::BadEntity,
                at,
                format!("unknown entity '&{body};'"),
            )),
        }
    }

    fn skip_comment(&mut self) -> Result<(), ReaderError> {
        let at = self.cur.pos;
        self.cur.skip(4);
        loop {
            if self.starts_with(b"--")? {
                if self.starts_with(b"-->")? {
                    self.cur.skip(3);
                    return Ok(());
                }
                return Err(self.err(
                    ReaderErrorCode::IllegalCharacter,
                    "'--' is not allowed inside a comment",
                ));
            }
            if self.peek()?.is_none() {
                return Err(ReaderError::new(
                    ReaderErrorCode::UnexpectedEof,
                    at,
                    "unterminated comment",
                ));
            }
            self.cur.bump();
        }
    }

    /// Rejects markup the dialect does not use; the cursor sits on `<`.
    fn reject_special_markup(&mut self) -> Result<(), ReaderError> {
        if self.starts_with(b"<![CDATA[")? {
            return Err(self.err(
                ReaderErrorCode::IllegalCharacter,
                "CDATA sections are not supported",
            ));
        }
        if self.starts_with(b"<!")? {
            return Err(self.err(
                ReaderErrorCode::IllegalCharacter,
                "document type declarations are not supported",
            ));
        }
        if self.starts_with(b"<?xml")? {
            return Err(self.err(
                ReaderErrorCode::BadProlog,
                "XML declaration is only allowed at the start of the document",
            ));
        }
        if self.starts_with(b"<?")? {
            return Err(self.err(
                ReaderErrorCode::IllegalCharacter,
                "processing instructions are not supported",
            ));
        }
        Ok(())
    }

    /// Reads an element start tag; the cursor sits on `<`.
    fn read_start_tag(&mut self) -> Result<XmlEvent, ReaderError> {
        let position = self.cur.pos;
        self.cur.bump();
        let name = self.read_name()?;
        let mut attributes: Vec<Attribute> = Vec::new();
        loop {
            let spaced = self.skip_space()?;
            match self.peek()? {
                None => {
                    return Err(self.err(ReaderErrorCode::UnexpectedEof, "unterminated start tag"))
                }
                Some(b'>') => {
                    self.cur.bump();
                    break;
                }
                Some(b'/') => {
                    let end_pos = self.cur.pos;
                    self.cur.bump();
                    if self.expect_byte()? != b'>' {
                        return Err(self.err(ReaderErrorCode::IllegalCharacter, "expected '>'"));
                    }
                    self.pending = Some(XmlEvent {
                        kind: EventKind::EndElement { name: name.clone() },
                        position: end_pos,
                    });
                    break;
                }
                Some(_) if !spaced => {
                    return Err(self.err(
                        ReaderErrorCode::IllegalCharacter,
                        "expected whitespace, '>' or '/>' in start tag",
                    ))
                }
                Some(_) => {
                    let attr = self.read_attribute()?;
                    if attributes.iter().any(|a| a.name == attr.name) {
                        return Err(ReaderError::new(
                            ReaderErrorCode::IllegalCharacter,
                            attr.position,
                            format!("duplicate attribute '{}'", attr.name),
                        ));
                    }
                    attributes.push(attr);
                }
            }
        }
        self.push_open(&name, position)?;
        if self.pending.is_some() {
            self.open.pop();
        }
        Ok(XmlEvent {
            kind: EventKind::StartElement { name, attributes },
            position,
        })
    }

    fn push_open(&mut self, name: &str, position: SourcePosition) -> Result<(), ReaderError> {
        if self.open.len() >= MAX_DEPTH {
            return Err(ReaderError::new(
                ReaderErrorCode::NestingTooDeep,
                position,
                format!("nesting deeper than {MAX_DEPTH} elements"),
            ));
        }
        self.open.push(name.to_string());
        Ok(())
    }

    fn read_attribute(&mut self) -> Result<Attribute, ReaderError> {
        let position = self.cur.pos;
        let name = self.read_name()?;
        self.skip_space()?;
        if self.expect_byte()? != b'=' {
            return Err(self.err(ReaderErrorCode::IllegalCharacter, "expected '=' after attribute name"));
        }
        self.skip_space()?;
        let quote = self.expect_byte()?;
        if quote != b'"' && quote != b'\'' {
            return Err(self.err(ReaderErrorCode::IllegalCharacter, "attribute value must be quoted"));
        }
        let mut raw = Vec::new();
        loop {
            match self.peek()? {
                None => {
                    return Err(self.err(ReaderErrorCode::UnexpectedEof, "unterminated attribute value"))
                }
                Some(b) if b == quote => {
                    self.cur.bump();
                    break;
                }
                Some(b'<') => {
                    return Err(self.err(
                        ReaderErrorCode::IllegalCharacter,
                        "'<' is not allowed in attribute values",
                    ))
                }
                Some(b'&') => self.read_reference(&mut raw)?,
                Some(_) => raw.push(self.cur.bump()),
            }
        }
        let value = self.decode_text(raw, position)?;
        Ok(Attribute {
            name,
            value,
            position,
        })
    }

    fn read_end_tag(&mut self) -> Result<XmlEvent, ReaderError> {
        let position = self.cur.pos;
        self.cur.skip(2);
        let name = self.read_name()?;
        self.skip_space()?;
        if self.expect_byte()? != b'>' {
            return Err(self.err(ReaderErrorCode::IllegalCharacter, "expected '>' in end tag"));
        }
        match self.open.pop() {
            Some(open) if open == name => Ok(XmlEvent {
                kind: EventKind::EndElement { name },
                position,
            }),
            Some(open) => Err(ReaderError::new(
                ReaderErrorCode::MismatchedCloseTag,
                position,
                format!("</{name}> does not close <{open}>"),
            )),
            None => Err(ReaderError::new(
                ReaderErrorCode::MismatchedCloseTag,
                position,
                format!("</{name}> has no matching start tag"),
            )),
        }
    }

    fn decode_text(&self, bytes: Vec<u8>, at: SourcePosition) -> Result<String, ReaderError> {
        let text = String::from_utf8(bytes).map_err(|_| {
            ReaderError::new(ReaderErrorCode::IllegalCharacter, at, "input is not valid UTF-8")
        })?;
        if let Some(c) = text.chars().find(|&c| !is_xml_char(c)) {
            return Err(ReaderError::new(
                ReaderErrorCode::IllegalCharacter,
                at,
                format!("character U+{:04X} is not allowed in XML", c as u32),
            ));
        }
        Ok(text)
    }

    /// Collects character data up to the next markup other than a comment.
    fn read_text(&mut self) -> Result<Option<XmlEvent>, ReaderError> {
        let position = self.cur.pos;
        let mut raw = Vec::new();
        loop {
            match self.peek()? {
                None => break,
                Some(b'<') => {
                    if self.starts_with(b"<!--")? {
                        self.skip_comment()?;
                        continue;
                    }
                    break;
                }
                Some(b'&') => self.read_reference(&mut raw)?,
                Some(b']') if self.starts_with(b"]]>")? => {
                    return Err(self.err(
                        ReaderErrorCode::IllegalCharacter,
                        "']]>' is not allowed in character data",
                    ))
                }
                Some(b'\r') => {
                    self.cur.bump();
                    if self.peek()? == Some(b'\n') {
                        self.cur.bump();
                    }
                    raw.push(b'\n');
                }
                Some(_) => raw.push(self.cur.bump()),
            }
        }
        if raw.is_empty() {
            return Ok(None);
        }
        let text = self.decode_text(raw, position)?;
        Ok(Some(XmlEvent {
            kind: EventKind::Characters(text),
            position,
        }))
    }

    /// Skips whitespace and comments outside the document element.
    fn skip_misc(&mut self) -> Result<(), ReaderError> {
        loop {
            self.skip_space()?;
            if self.starts_with(b"<!--")? {
                self.skip_comment()?;
            } else {
                return Ok(());
            }
        }
    }

    fn step(&mut self) -> Result<Option<XmlEvent>, ReaderError> {
        if let Some(ev) = self.pending.take() {
            if self.open.is_empty() {
                self.phase = Phase::Epilog;
            }
            return Ok(Some(ev));
        }
        match self.phase {
            Phase::BeforeStart => {
                self.phase = Phase::Prolog;
                Ok(Some(XmlEvent {
                    kind: EventKind::StartDocument,
                    position: SourcePosition::START,
                }))
            }
            Phase::Prolog => {
                self.skip_misc()?;
                match self.peek()? {
                    None => Err(self.err(
                        ReaderErrorCode::UnexpectedEof,
                        "document has no root element",
                    )),
                    Some(b'<') => {
                        self.reject_special_markup()?;
                        if self.starts_with(b"</")? {
                            return Err(self.err(
                                ReaderErrorCode::MismatchedCloseTag,
                                "end tag before the root element",
                            ));
                        }
                        self.phase = Phase::Content;
                        self.read_start_tag().map(Some)
                    }
                    Some(_) => Err(self.err(
                        ReaderErrorCode::IllegalCharacter,
                        "text is not allowed outside the root element",
                    )),
                }
            }
            Phase::Content => {
                if let Some(text) = self.read_text()? {
                    return Ok(Some(text));
                }
                if self.peek()?.is_none() {
                    let open = self.open.last().cloned().unwrap_or_default();
                    return Err(self.err(
                        ReaderErrorCode::UnexpectedEof,
                        format!("end of input inside <{open}>"),
                    ));
                }
                self.reject_special_markup()?;
                let ev = if self.starts_with(b"</")? {
                    self.read_end_tag()?
                } else {
                    self.read_start_tag()?
                };
                if self.open.is_empty() && self.pending.is_none() {
                    self.phase = Phase::Epilog;
                }
                Ok(Some(ev))
            }
            Phase::Epilog => {
                self.skip_misc()?;
                match self.peek()? {
                    None => {
                        self.phase = Phase::Done;
                        Ok(Some(XmlEvent {
                            kind: EventKind::EndDocument,
                            position: self.cur.pos,
                        }))
                    }
                    Some(b'<') => {
                        self.reject_special_markup()?;
                        Err(self.err(
                            ReaderErrorCode::MultipleRoots,
                            "a second top-level element begins here",
                        ))
                    }
                    Some(_) => Err(self.err(
                        ReaderErrorCode::IllegalCharacter,
                        "text is not allowed after the root element",
                    )),
                }
            }
            Phase::Done => Ok(None),
        }
    }

    /// Returns the next event, an error, or `None` once `EndDocument` has
    /// been delivered. After an error the reader is exhausted.
    pub fn next_event(&mut self) -> Option<Result<XmlEvent, ReaderError>> {
        if self.failed {
            return None;
        }
        match self.step() {
            Ok(ev) => ev.map(Ok),
            Err(e) => {
                self.failed = true;
                self.phase = Phase::Done;
                Some(Err(e))
            }
        }
    }
}

impl<R: Read> Iterator for XmlReader<R> {
    type Item = Result<XmlEvent, ReaderError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_event()
    }
}

/// Reads a whole in-memory document into an event list.
pub fn read_all(input: &[u8]) -> Result<Vec<XmlEvent>, ReaderError> {
    open_document(input)?.collect()
}
