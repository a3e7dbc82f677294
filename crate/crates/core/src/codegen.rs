//! Code generation: one handler per tag category, producing declaration,
//! scriptlet and action fragments that the writer lays out as a JSP page.
//!
//! Generation streams the document twice. The first pass emits the page
//! declarations (`declare` contents and functions), the second the
//! scriptlet body, so fragments reach the sink already in output order.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::dsl::{
    is_decimal_literal, is_identifier, is_integer_literal, is_string_literal, split_assignment, ArrayDecl,
    ClassDecl, FunctionHeader, GetCall, QueryDecl, SetCall,
};
use crate::event_reader::{open_document, ReaderError, SourcePosition, XmlReader};
use crate::statements::{parse_statement, translate_loop_header, BlockKind, BlockTracker, Statement};
use crate::symbols::{infer_literal_type, DslType, ScopeId, SymbolTable};
use crate::tree::{ElementNode, Item, Items};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TranslationOptions {
    pub strict: bool,
    /// Print the `dB` element's `excep_msg` inside the generated catch.
    pub emit_excep_msg: bool,
    /// Print through the page's `out` writer instead of `System.out`.
    pub response_out: bool,
    /// Start the page with `<%@ page import="java.sql.*" %>`.
    pub emit_imports: bool,
    pub check_only: bool,
}

/// One generated line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub text: String,
    pub origin: SourcePosition,
    /// Block nesting depth, used for indentation.
    pub depth: usize,
}

impl Fragment {
    /// Java source; `%>` is written in the quoted form `%\>` so it cannot end
    /// the enclosing scripting element.
    pub fn code(text: impl Into<String>, origin: SourcePosition, depth: usize) -> Self {
        Self {
            text: text.into().replace("%>", "%\\>"),
            origin,
            depth,
        }
    }

    pub fn action(text: impl Into<String>, origin: SourcePosition, depth: usize) -> Self {
        Self {
            text: text.into(),
            origin,
            depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyItem {
    Scriptlet(Fragment),
    Action(Fragment),
}

impl BodyItem {
    pub fn fragment(&self) -> &Fragment {
        match self {
            BodyItem::Scriptlet(f) | BodyItem::Action(f) => f,
        }
    }
}

/// Receives fragments in output order: all declarations, then the body.
pub trait ProgramSink {
    fn declaration(&mut self, fragment: Fragment) -> io::Result<()>;
    fn body(&mut self, item: BodyItem) -> io::Result<()>;
}

/// The whole program in memory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JspProgram {
    pub declarations: Vec<Fragment>,
    pub body: Vec<BodyItem>,
}

impl ProgramSink for JspProgram {
    fn declaration(&mut self, fragment: Fragment) -> io::Result<()> {
        self.declarations.push(fragment);
        Ok(())
    }

    fn body(&mut self, item: BodyItem) -> io::Result<()> {
        self.body.push(item);
        Ok(())
    }
}

impl JspProgram {
    pub fn is_empty(&self) -> bool {
        self.declarations.is_empty() && self.body.is_empty()
    }
}

/// Serializes fragments as they arrive. Declarations go into a single
/// `<%! %>` block; consecutive scriptlet fragments share one `<% %>` block
/// and actions sit between blocks.
pub struct JspWriter<W: Write> {
    out: W,
    imports: bool,
    started: bool,
    in_declarations: bool,
    in_scriptlet: bool,
}

const INDENT: &str = "    ";

impl<W: Write> JspWriter<W> {
    pub fn new(out: W, emit_imports: bool) -> Self {
        Self {
            out,
            imports: emit_imports,
            started: false,
            in_declarations: false,
            in_scriptlet: false,
        }
    }

    fn start(&mut self) -> io::Result<()> {
        if !self.started {
            self.started = true;
            if self.imports {
                writeln!(self.out, "<%@ page import=\"java.sql.*\" %>")?;
            }
        }
        Ok(())
    }

    fn line(&mut self, f: &Fragment) -> io::Result<()> {
        for _ in 0..f.depth {
            self.out.write_all(INDENT.as_bytes())?;
        }
        self.out.write_all(f.text.as_bytes())?;
        self.out.write_all(b"\n")
    }

    fn close_declarations(&mut self) -> io::Result<()> {
        if self.in_declarations {
            self.in_declarations = false;
            self.out.write_all(b"%>\n")?;
        }
        Ok(())
    }

    /// Closes any open block and returns the underlying writer.
    pub fn finish(mut self) -> io::Result<W> {
        self.start()?;
        self.close_declarations()?;
        if self.in_scriptlet {
            self.out.write_all(b"%>\n")?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> ProgramSink for JspWriter<W> {
    fn declaration(&mut self, fragment: Fragment) -> io::Result<()> {
        self.start()?;
        if !self.in_declarations {
            self.in_declarations = true;
            self.out.write_all(b"<%!\n")?;
        }
        self.line(&fragment)
    }

    fn body(&mut self, item: BodyItem) -> io::Result<()> {
        self.start()?;
        self.close_declarations()?;
        match item {
            BodyItem::Scriptlet(f) => {
                if !self.in_scriptlet {
                    self.in_scriptlet = true;
                    self.out.write_all(b"<%\n")?;
                }
                self.line(&f)
            }
            BodyItem::Action(f) => {
                if self.in_scriptlet {
                    self.in_scriptlet = false;
                    self.out.write_all(b"%>\n")?;
                }
                self.line(&f)
            }
        }
    }
}

/// Writes `program` as JSP text.
pub fn emit_program<W: Write>(program: &JspProgram, sink: W) -> io::Result<()> {
    let mut w = JspWriter::new(sink, false);
    for f in &program.declarations {
        w.declaration(f.clone())?;
    }
    for item in &program.body {
        w.body(item.clone())?;
    }
    w.finish().map(|_| ())
}

/// A document that can be read from the start more than once.
pub trait DocumentSource {
    type Reader: Read;

    fn open(&self) -> io::Result<Self::Reader>;

    fn events(&self) -> Result<XmlReader<Self::Reader>, ReaderError> {
        let reader = self.open().map_err(|e| ReaderError::io(&e))?;
        open_document(reader)
    }
}

impl<F, R> DocumentSource for F
where
    F: Fn() -> io::Result<R>,
    R: Read,
{
    type Reader = R;

    fn open(&self) -> io::Result<R> {
        self()
    }
}

#[derive(Debug, Clone)]
pub struct FileSource(pub PathBuf);

impl DocumentSource for FileSource {
    type Reader = File;

    fn open(&self) -> io::Result<File> {
        File::open(&self.0)
    }
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Reader(#[from] ReaderError),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
}

/// Java string literal for `s`.
pub fn java_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Value of a JSP action attribute, for use between double quotes.
pub fn action_attribute(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace("<%", "<\\%")
        .replace("%>", "%\\>")
        .replace('$', "\\$")
}

/// Decimal Java `int` literal for an integer literal, or `None` when the
/// value does not fit. Leading zeros are dropped so nothing reads as octal.
fn java_int(text: &str) -> Option<String> {
    let text = text.trim();
    let v: i64 = text.strip_prefix('+').unwrap_or(text).parse().ok()?;
    i32::try_from(v).ok().map(|v| v.to_string())
}

fn unquote(s: &str) -> &str {
    if is_string_literal(s) {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn bean_setter(property: &str) -> String {
    let mut chars = property.chars();
    match chars.next() {
        Some(c) => format!("set{}{}", c.to_uppercase(), chars.as_str()),
        None => "set".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbContext {
    pub conn_name: String,
    pub excep_msg: Option<String>,
    pub opened_at: SourcePosition,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pass {
    Declarations,
    Body,
}

struct Generator<'a, K> {
    table: &'a SymbolTable,
    options: &'a TranslationOptions,
    sink: &'a mut K,
    pass: Pass,
    diagnostics: Vec<Diagnostic>,
    containers: Vec<String>,
    function_ordinal: usize,
    function_open: bool,
    scope: ScopeId,
    blocks: BlockTracker,
    db: Option<DbContext>,
    statement_names: HashSet<String>,
}

impl<K: ProgramSink> Generator<'_, K> {
    fn error(&mut self, code: &'static str, at: SourcePosition, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::error(code, at, message));
    }

    fn in_function(&self) -> bool {
        self.containers.iter().any(|c| c == "function")
    }

    fn in_declare(&self) -> bool {
        self.containers.last().is_some_and(|c| c == "declare")
    }

    fn depth(&self) -> usize {
        usize::from(self.in_function()) + self.blocks.depth()
    }

    fn push(&mut self, f: Fragment, action: bool) -> io::Result<()> {
        if self.pass == Pass::Declarations {
            self.sink.declaration(f)
        } else if action {
            self.sink.body(BodyItem::Action(f))
        } else {
            self.sink.body(BodyItem::Scriptlet(f))
        }
    }

    fn code_at(&mut self, depth: usize, text: impl Into<String>, at: SourcePosition) -> io::Result<()> {
        self.push(Fragment::code(text, at, depth), false)
    }

    fn code(&mut self, text: impl Into<String>, at: SourcePosition) -> io::Result<()> {
        self.code_at(self.depth(), text, at)
    }

    fn println(&self, arg: &str) -> String {
        let stream = if self.options.response_out { "out" } else { "System.out" };
        format!("{stream}.println({arg});")
    }

    fn var(&mut self, node: &ElementNode) -> io::Result<()> {
        let Some((name, value)) = split_assignment(&node.text) else {
            return Ok(());
        };
        let scope = if self.in_declare() { self.table.declarations_scope() } else { self.scope };
        let Some(sym) = self.table.lookup_in(scope, name) else {
            // rejected during analysis
            return Ok(());
        };
        let line = if sym.is_read_target {
            format!("String {name} = \"\";")
        } else {
            match infer_literal_type(value) {
                Ok(DslType::Str) => format!("String {name} = {};", java_string(unquote(value))),
                Ok(DslType::Int) => match java_int(value) {
                    Some(v) => format!("int {name} = {v};"),
                    None => {
                        self.error("IntegerOutOfRange", node.position, format!("{value} does not fit in an int"));
                        return Ok(());
                    }
                },
                Ok(_) => format!("double {name} = {value};"),
                Err(_) => return Ok(()),
            }
        };
        self.code(line, node.position)
    }

    fn array(&mut self, node: &ElementNode) -> io::Result<()> {
        let decl = match ArrayDecl::parse(&node.text) {
            Ok(d) => d,
            Err(e) => {
                self.error("MalformedArrayDecl", node.position, e);
                return Ok(());
            }
        };
        if decl.size == 0 {
            self.error("ZeroArraySize", node.position, format!("array '{}' must have a non-zero size", decl.name));
            return Ok(());
        }
        if decl.size > i32::MAX as u64 {
            self.error("MalformedArrayDecl", node.position, format!("array size {} is too large", decl.size));
            return Ok(());
        }
        let ty = decl.element.java_name();
        self.code(format!("{ty}[] {} = new {ty}[{}];", decl.name, decl.size), node.position)
    }

    fn read(&mut self, node: &ElementNode) -> io::Result<()> {
        if self.in_function() {
            self.error(
                "ImplicitObjectInFunction",
                node.position,
                "request and session are not available inside a function",
            );
            return Ok(());
        }
        let target = node.trimmed_text();
        let part = |tag: &str| node.child(tag).map(|c| c.trimmed_text().to_string()).unwrap_or_default();
        let (object, kind, name) = (part("object").to_lowercase(), part("type").to_lowercase(), part("name"));
        let call = match (object.as_str(), kind.as_str()) {
            ("request", "parameter") => format!("request.getParameter({})", java_string(&name)),
            ("request", "attribute") => format!("(String)request.getAttribute({})", java_string(&name)),
            ("session", "attribute") => format!("(String)session.getAttribute({})", java_string(&name)),
            _ => {
                self.error(
                    "InvalidReadCombo",
                    node.position,
                    format!("cannot read a {kind} from {object}; sessions only hold attributes"),
                );
                return Ok(());
            }
        };
        self.code(format!("{target}={call};"), node.position)
    }

    fn out(&mut self, node: &ElementNode) -> io::Result<()> {
        let pieces: Vec<String> = node
            .children
            .iter()
            .map(|c| match c.name.as_str() {
                "writev" => c.trimmed_text().to_string(),
                _ => java_string(c.trimmed_text()),
            })
            .collect();
        let arg = if pieces.is_empty() {
            "\"\"".to_string()
        } else {
            format!("{} + \"\"", pieces.join(" + "))
        };
        let line = self.println(&arg);
        self.code(line, node.position)
    }

    fn close_try(&mut self, at: SourcePosition) -> io::Result<()> {
        self.blocks.close_try();
        let db = self.db.take().expect("open try has a context");
        let mut handler = String::new();
        if self.options.emit_excep_msg {
            if let Some(msg) = db.excep_msg.as_deref().filter(|m| !m.is_empty()) {
                handler = self.println(&java_string(msg));
            }
        }
        self.code("}", at)?;
        self.code(format!("catch(Exception e){{{handler}e.printStackTrace();}}"), at)
    }

    fn db(&mut self, node: &ElementNode) -> io::Result<()> {
        if let Some(open) = &self.db {
            if self.blocks.top() == Some(BlockKind::Try) {
                self.close_try(node.position)?;
            } else {
                let opened = open.opened_at;
                self.error(
                    "NestedDb",
                    node.position,
                    format!("the database block opened at {opened} is still open; use a separate dB block after it"),
                );
                return Ok(());
            }
        }
        let part = |tag: &str| node.child(tag).map(|c| c.trimmed_text().to_string()).unwrap_or_default();
        let conn = part("conn_name");
        let at = node.position;
        let depth = self.depth();
        self.code_at(depth, "try{", at)?;
        self.code_at(depth + 1, format!("Class.forName({});", java_string(&part("driver"))), at)?;
        self.code_at(
            depth + 1,
            format!(
                "Connection {conn} = DriverManager.getConnection({},{},{});",
                java_string(&part("url")),
                java_string(&part("uid")),
                java_string(&part("pwd"))
            ),
            at,
        )?;
        self.blocks.open_try(at);
        self.db = Some(DbContext {
            conn_name: conn,
            excep_msg: node.child("excep_msg").map(|c| c.trimmed_text().to_string()),
            opened_at: at,
        });
        Ok(())
    }

    fn statement_name(&mut self, label: &str, at: SourcePosition) -> Option<String> {
        if label == "query" {
            let name = (1..)
                .map(|n| if n == 1 { "ps".to_string() } else { format!("ps{n}") })
                .find(|n| !self.statement_names.contains(n) && self.table.lookup_from(self.scope, n).is_none())
                .expect("unbounded candidates");
            self.statement_names.insert(name.clone());
            return Some(name);
        }
        if !self.statement_names.insert(label.to_string()) || self.table.lookup_from(self.scope, label).is_some() {
            self.error("RepeatedDecl", at, format!("statement name '{label}' is already in use"));
            return None;
        }
        Some(label.to_string())
    }

    fn set(&mut self, node: &ElementNode, stmt: &str) -> io::Result<()> {
        let set = match SetCall::parse(&node.text) {
            Ok(s) => s,
            Err(e) => {
                self.error("BadSetSyntax", node.position, e);
                return Ok(());
            }
        };
        let arg = set.argument.as_str();
        let inferred = if is_identifier(arg) {
            match self.table.lookup_from(self.scope, arg).map(|s| &s.dsl_type) {
                Some(DslType::Str) => Some(("setString", arg.to_string())),
                Some(DslType::Int | DslType::ResultCount) => Some(("setInt", arg.to_string())),
                Some(DslType::Real) => Some(("setDouble", arg.to_string())),
                Some(DslType::Object(_)) => Some(("setObject", arg.to_string())),
                Some(other) => {
                    let other = other.clone();
                    self.error("BadSetSyntax", node.position, format!("cannot bind '{arg}' of type {other}"));
                    return Ok(());
                }
                // reported during analysis
                None => return Ok(()),
            }
        } else if is_string_literal(arg) {
            Some(("setString", java_string(unquote(arg))))
        } else if is_integer_literal(arg) {
            match java_int(arg) {
                Some(v) => Some(("setInt", v)),
                None => {
                    self.error("IntegerOutOfRange", node.position, format!("{arg} does not fit in an int"));
                    return Ok(());
                }
            }
        } else if is_decimal_literal(arg) {
            Some(("setDouble", arg.to_string()))
        } else {
            None
        };
        let by_keyword = match set.keyword.as_str() {
            "int" | "integer" => Some("setInt"),
            "double" | "real" => Some("setDouble"),
            "string" => Some("setString"),
            _ => None,
        };
        let (setter, value) = match (inferred, by_keyword) {
            (Some((setter, value)), kw) => {
                if kw != Some(setter) {
                    self.diagnostics.push(Diagnostic::note(
                        "SetTypeMismatch",
                        node.position,
                        format!("'{}' keyword ignored; the value '{arg}' binds with {setter}", set.keyword),
                    ));
                }
                (setter, value)
            }
            (None, Some(setter)) => (setter, arg.to_string()),
            (None, None) => {
                self.error(
                    "BadSetSyntax",
                    node.position,
                    format!("cannot tell how to bind '{arg}' with keyword '{}'", set.keyword),
                );
                return Ok(());
            }
        };
        self.code(format!("{stmt}.{setter}({},{value});", set.index), node.position)
    }

    fn ps(&mut self, node: &ElementNode) -> io::Result<()> {
        let Some(conn) = self.db.as_ref().map(|d| d.conn_name.clone()) else {
            self.error("NoDbContext", node.position, "prepared statement outside a database block");
            return Ok(());
        };
        let gets: Vec<&ElementNode> = node.children_named("get").collect();
        if let (Some(_), Some(get)) = (node.child("result"), gets.first()) {
            self.error("ResultAndGetMix", get.position, "a statement has either a result or gets, not both");
            return Ok(());
        }
        let Some(query) = node.child("query") else {
            return Ok(());
        };
        let query = match QueryDecl::parse(&query.text) {
            Ok(q) => q,
            Err(e) => {
                self.error("MalformedQuery", query.position, e);
                return Ok(());
            }
        };
        let Some(stmt) = self.statement_name(&query.label, node.position) else {
            return Ok(());
        };
        self.code(
            format!("PreparedStatement {stmt} = {conn}.prepareStatement({});", java_string(&query.sql)),
            node.position,
        )?;
        for child in &node.children {
            match child.name.as_str() {
                "var" => self.var(child)?,
                "read" => self.read(child)?,
                "set" => self.set(child, &stmt)?,
                "result" => {
                    let r = child.trimmed_text();
                    self.code(format!("int {r} = 0;"), child.position)?;
                    self.code(format!("{r} = {stmt}.executeUpdate();"), child.position)?;
                }
                _ => {}
            }
        }
        let Some(first) = gets.first() else {
            return Ok(());
        };
        let mut lines = Vec::new();
        for get in &gets {
            let call = match GetCall::parse(&get.text) {
                Ok(g) => g,
                Err(e) => {
                    self.error("BadGetSyntax", get.position, e);
                    continue;
                }
            };
            let getter = match call.keyword.as_str() {
                "int" | "integer" => "getInt",
                "double" | "real" => "getDouble",
                "string" => "getString",
                other => {
                    self.error("BadGetSyntax", get.position, format!("unknown column type '{other}'"));
                    continue;
                }
            };
            lines.push((format!("{} = rs_{stmt}.{getter}({});", call.target, call.column), get.position));
        }
        let depth = self.depth();
        self.code_at(depth, format!("ResultSet rs_{stmt} = {stmt}.executeQuery();"), first.position)?;
        self.code_at(depth, format!("if(rs_{stmt}.next()){{"), first.position)?;
        for (line, at) in lines {
            self.code_at(depth + 1, line, at)?;
        }
        let last = gets.last().expect("non-empty").position;
        self.code_at(depth, "}", last)
    }

    fn close_inner_try(&mut self, at: SourcePosition) -> io::Result<()> {
        if self.blocks.top() == Some(BlockKind::Try) {
            self.close_try(at)?;
        }
        Ok(())
    }

    fn statement(&mut self, node: &ElementNode) -> io::Result<()> {
        let at = node.position;
        let stmt = match parse_statement(&node.text) {
            Ok(s) => s,
            Err(e) => {
                self.error("MalformedStatement", at, e.0);
                return Ok(());
            }
        };
        match &stmt {
            Statement::If(cond) => {
                let depth = self.depth();
                self.blocks.track(&stmt, at).expect("openers always push");
                self.code_at(depth, format!("if({cond}){{"), at)
            }
            Statement::Loop(h) => {
                let depth = self.depth();
                let header = translate_loop_header(h, self.options.strict, self.table, self.scope, at);
                self.blocks.track(&stmt, at).expect("openers always push");
                match header {
                    Ok(text) => self.code_at(depth, text, at),
                    Err(d) => {
                        self.diagnostics.push(d);
                        Ok(())
                    }
                }
            }
            Statement::Else => {
                self.close_inner_try(at)?;
                match self.blocks.track(&stmt, at) {
                    Ok(()) => {
                        let depth = self.depth() - 1;
                        self.code_at(depth, "}", at)?;
                        self.code_at(depth, "else {", at)
                    }
                    Err(e) => {
                        self.diagnostics.push(e.into());
                        Ok(())
                    }
                }
            }
            Statement::EndIf | Statement::EndLoop => {
                self.close_inner_try(at)?;
                match self.blocks.track(&stmt, at) {
                    Ok(()) => self.code("}", at),
                    Err(e) => {
                        self.diagnostics.push(e.into());
                        Ok(())
                    }
                }
            }
        }
    }

    fn class(&mut self, node: &ElementNode) -> io::Result<()> {
        let decl = match ClassDecl::parse(&node.text) {
            Ok(d) => d,
            Err(e) => {
                self.error("MalformedClassDecl", node.position, e);
                return Ok(());
            }
        };
        let (class, obj) = (&decl.class_name, &decl.object_name);
        let mut lines = vec![(format!("{class} {obj} = new {class}();"), node.position)];
        for p in node.children_named("pname") {
            match split_assignment(&p.text) {
                Some((prop, value)) if is_identifier(prop) && !value.is_empty() => {
                    lines.push((format!("{obj}.{}({value});", bean_setter(prop)), p.position))
                }
                _ => {
                    self.error("MalformedClassDecl", p.position, "expected 'property=value'");
                    return Ok(());
                }
            }
        }
        for (line, at) in lines {
            self.code(line, at)?;
        }
        Ok(())
    }

    fn single_token(&mut self, node: &ElementNode) -> Option<String> {
        let text = node.trimmed_text();
        if text.is_empty() || text.contains(char::is_whitespace) {
            self.error("BadActionTarget", node.position, format!("<{}> needs a single file name or URL", node.name));
            return None;
        }
        Some(text.to_string())
    }

    fn forward(&mut self, node: &ElementNode) -> io::Result<()> {
        let Some(page) = self.single_token(node) else {
            return Ok(());
        };
        let mut params = String::new();
        for p in node.children_named("pname") {
            match split_assignment(&p.text) {
                Some((name, value)) if is_identifier(name) => params.push_str(&format!(
                    "<jsp:param name=\"{}\" value=\"{}\"/>",
                    action_attribute(name),
                    action_attribute(unquote(value))
                )),
                _ => {
                    self.error("BadActionTarget", p.position, "expected 'name=value'");
                    return Ok(());
                }
            }
        }
        let page = action_attribute(&page);
        let text = if params.is_empty() {
            format!("<jsp:forward page=\"{page}\" />")
        } else {
            format!("<jsp:forward page=\"{page}\">{params}</jsp:forward>")
        };
        self.push(Fragment::action(text, node.position, self.depth()), true)
    }

    fn session(&mut self, node: &ElementNode) -> io::Result<()> {
        for set in &node.children {
            let Some((name, value)) = split_assignment(&set.text).filter(|(n, _)| is_identifier(n)) else {
                self.error("BadSetSyntax", set.position, "session set expects 'name=value'");
                continue;
            };
            let value = if is_string_literal(value) {
                java_string(unquote(value))
            } else if is_integer_literal(value) {
                java_int(value).unwrap_or_else(|| java_string(value))
            } else if is_decimal_literal(value)
                || (is_identifier(value) && self.table.lookup_from(self.scope, value).is_some())
            {
                value.to_string()
            } else {
                java_string(value)
            };
            self.code(format!("session.setAttribute({},{value});", java_string(name)), set.position)?;
        }
        Ok(())
    }

    fn header(&mut self, node: &ElementNode) -> io::Result<()> {
        let h = match FunctionHeader::parse(&node.text) {
            Ok(h) => h,
            Err(e) => {
                self.error("MalformedHeader", node.position, e);
                return Ok(());
            }
        };
        let ret = h.returns.as_ref().map_or("void".to_string(), |t| t.java_name());
        let params: Vec<String> = h.params.iter().map(|p| format!("{} {}", p.ty.java_name(), p.name)).collect();
        self.function_open = true;
        self.code_at(0, format!("{ret} {}({}){{", h.name, params.join(", ")), node.position)
    }

    fn statement_node(&mut self, node: &ElementNode) -> io::Result<()> {
        let at = node.position;
        match node.name.as_str() {
            "var" => self.var(node),
            "array" => self.array(node),
            "read" => self.read(node),
            "out" => self.out(node),
            "write" => {
                let line = self.println(&java_string(node.trimmed_text()));
                self.code(line, at)
            }
            "writev" => {
                let line = self.println(&format!("{} + \"\"", node.trimmed_text()));
                self.code(line, at)
            }
            "dB" => self.db(node),
            "ps" => self.ps(node),
            "s" => self.statement(node),
            "class" => self.class(node),
            "redirect" => match self.single_token(node) {
                Some(url) => self.code(format!("response.sendRedirect({});", java_string(&url)), at),
                None => Ok(()),
            },
            "include" => match self.single_token(node) {
                Some(page) => {
                    let text = format!("<jsp:include page=\"{}\" />", action_attribute(&page));
                    self.push(Fragment::action(text, at, self.depth()), true)
                }
                None => Ok(()),
            },
            "forward" => self.forward(node),
            "session" => self.session(node),
            _ => Ok(()),
        }
    }

    /// Closes what is still open at the end of the body or of a function.
    fn end_unit(&mut self, at: SourcePosition) -> io::Result<()> {
        while let Some((kind, opened)) = self.blocks.pop() {
            match kind {
                BlockKind::Try => {
                    self.blocks.open_try(opened);
                    self.close_try(at)?;
                }
                _ => self.error("UnbalancedBlock", opened, format!("{kind} block opened here is never closed")),
            }
        }
        self.db = None;
        Ok(())
    }

    fn item(&mut self, item: Item) -> io::Result<()> {
        match item {
            Item::Enter { tag, .. } => {
                if tag == "function" {
                    self.scope = self
                        .table
                        .function_scope(self.function_ordinal)
                        .unwrap_or(self.table.declarations_scope());
                    self.function_ordinal += 1;
                    self.function_open = false;
                }
                self.containers.push(tag);
                Ok(())
            }
            Item::Exit { tag, position } => {
                let in_scope = match tag.as_str() {
                    "function" => self.pass == Pass::Declarations,
                    "root" => self.pass == Pass::Body,
                    _ => false,
                };
                if in_scope {
                    self.end_unit(position)?;
                }
                if tag == "function" {
                    if self.function_open && self.pass == Pass::Declarations {
                        self.code_at(0, "}", position)?;
                    }
                    self.scope = self.table.body_scope();
                }
                self.containers.pop();
                Ok(())
            }
            Item::Leaf(node) => {
                let owned_by_declarations = self.in_declare() || self.in_function();
                if owned_by_declarations != (self.pass == Pass::Declarations) {
                    return Ok(());
                }
                if node.name == "header" {
                    return self.header(&node);
                }
                self.statement_node(&node)
            }
        }
    }
}

/// Generates code for a validated, analyzed document, streaming it once
/// per section. Returned diagnostics are in document order; when any is an
/// error the sink's contents must be discarded.
pub fn translate<S, K>(
    source: &S,
    table: &SymbolTable,
    options: &TranslationOptions,
    sink: &mut K,
) -> Result<Vec<Diagnostic>, TranslateError>
where
    S: DocumentSource + ?Sized,
    K: ProgramSink,
{
    let mut gen = Generator {
        table,
        options,
        sink,
        pass: Pass::Declarations,
        diagnostics: Vec::new(),
        containers: Vec::new(),
        function_ordinal: 0,
        function_open: false,
        scope: table.body_scope(),
        blocks: BlockTracker::new(),
        db: None,
        statement_names: HashSet::new(),
    };
    for pass in [Pass::Declarations, Pass::Body] {
        gen.pass = pass;
        gen.function_ordinal = 0;
        gen.scope = table.body_scope();
        for item in Items::new(source.events()?) {
            gen.item(item?)?;
        }
    }
    let mut diagnostics = gen.diagnostics;
    diagnostics.sort_by_key(|d| d.position.byte_offset);
    Ok(diagnostics)
}
