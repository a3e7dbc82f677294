//! Symbol table and the analysis pass that fills it.
//!
//! Scopes form a small arena: the declarations scope (page-level fields and
//! methods), the body scope nested inside it, and one scope per function,
//! also nested directly inside the declarations scope.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::dsl::{
    is_decimal_literal, is_identifier, is_integer_literal, is_string_literal, split_assignment, ArrayDecl,
    ClassDecl, FunctionHeader, GetCall, SetCall,
};
use crate::event_reader::{ReaderError, SourcePosition, XmlEvent};
use crate::statements::{parse_statement, referenced_identifiers, LoopBound, Statement};
use crate::tree::{ElementNode, Item, Items};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DslType {
    Int,
    Real,
    Str,
    ArrayOf(Box<DslType>),
    Connection,
    PreparedStmt,
    ResultCount,
    Object(String),
    /// A function; carries the return type, `None` for void.
    Function(Option<Box<DslType>>),
}

impl DslType {
    pub fn java_name(&self) -> String {
        match self {
            DslType::Int | DslType::ResultCount => "int".into(),
            DslType::Real => "double".into(),
            DslType::Str => "String".into(),
            DslType::ArrayOf(e) => format!("{}[]", e.java_name()),
            DslType::Connection => "Connection".into(),
            DslType::PreparedStmt => "PreparedStatement".into(),
            DslType::Object(class) => class.clone(),
            DslType::Function(Some(r)) => r.java_name(),
            DslType::Function(None) => "void".into(),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, DslType::Int | DslType::Real | DslType::Str)
    }
}

impl fmt::Display for DslType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.java_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScopeId(usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScopeKind {
    Declarations,
    Body,
    Function(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub dsl_type: DslType,
    pub declared_at: SourcePosition,
    pub scope: ScopeKind,
    pub is_read_target: bool,
    /// Declared by a loop header rather than by the user.
    pub implicit: bool,
}

impl Symbol {
    pub fn new(name: &str, dsl_type: DslType, declared_at: SourcePosition) -> Self {
        Self {
            name: name.to_string(),
            dsl_type,
            declared_at,
            scope: ScopeKind::Body,
            is_read_target: false,
            implicit: false,
        }
    }
}

#[derive(Debug, Clone)]
struct Scope {
    kind: ScopeKind,
    parent: Option<ScopeId>,
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct SymbolTable {
    scopes: Vec<Scope>,
    functions: Vec<ScopeId>,
}

const DECLARATIONS: ScopeId = ScopeId(0);
const BODY: ScopeId = ScopeId(1);

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let scope = |kind, parent| Scope {
            kind,
            parent,
            symbols: Vec::new(),
            index: HashMap::new(),
        };
        Self {
            scopes: vec![
                scope(ScopeKind::Declarations, None),
                scope(ScopeKind::Body, Some(DECLARATIONS)),
            ],
            functions: Vec::new(),
        }
    }

    pub fn declarations_scope(&self) -> ScopeId {
        DECLARATIONS
    }

    pub fn body_scope(&self) -> ScopeId {
        BODY
    }

    /// Opens the scope of the next function, in document order.
    pub fn add_function_scope(&mut self, name: &str) -> ScopeId {
        let id = ScopeId(self.scopes.len());
        self.scopes.push(Scope {
            kind: ScopeKind::Function(name.to_string()),
            parent: Some(DECLARATIONS),
            symbols: Vec::new(),
            index: HashMap::new(),
        });
        self.functions.push(id);
        id
    }

    /// Scope of the `ordinal`-th function (0-based, document order).
    pub fn function_scope(&self, ordinal: usize) -> Option<ScopeId> {
        self.functions.get(ordinal).copied()
    }

    pub fn scope_kind(&self, scope: ScopeId) -> &ScopeKind {
        &self.scopes[scope.0].kind
    }

    /// Declares in the body scope.
    pub fn declare(&mut self, symbol: Symbol) -> Result<(), SourcePosition> {
        self.declare_in(BODY, symbol)
    }

    /// Fails with the earlier declaration's position when `scope` already
    /// holds the name.
    pub fn declare_in(&mut self, scope: ScopeId, mut symbol: Symbol) -> Result<(), SourcePosition> {
        let s = &mut self.scopes[scope.0];
        if let Some(&i) = s.index.get(&symbol.name) {
            return Err(s.symbols[i].declared_at);
        }
        symbol.scope = s.kind.clone();
        s.index.insert(symbol.name.clone(), s.symbols.len());
        s.symbols.push(symbol);
        Ok(())
    }

    pub fn lookup_in(&self, scope: ScopeId, name: &str) -> Option<&Symbol> {
        let s = &self.scopes[scope.0];
        s.index.get(name).map(|&i| &s.symbols[i])
    }

    fn resolve(&self, scope: ScopeId, name: &str) -> Option<(ScopeId, usize)> {
        let mut cur = Some(scope);
        while let Some(id) = cur {
            let s = &self.scopes[id.0];
            if let Some(&i) = s.index.get(name) {
                return Some((id, i));
            }
            cur = s.parent;
        }
        None
    }

    /// Innermost binding visible from `scope`.
    pub fn lookup_from(&self, scope: ScopeId, name: &str) -> Option<&Symbol> {
        self.resolve(scope, name).map(|(s, i)| &self.scopes[s.0].symbols[i])
    }

    /// Innermost binding visible from the body.
    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.lookup_from(BODY, name)
    }

    fn lookup_from_mut(&mut self, scope: ScopeId, name: &str) -> Option<&mut Symbol> {
        let (s, i) = self.resolve(scope, name)?;
        Some(&mut self.scopes[s.0].symbols[i])
    }

    /// Symbols of one scope in declaration order.
    pub fn symbols(&self, scope: ScopeId) -> &[Symbol] {
        &self.scopes[scope.0].symbols
    }

    pub fn len(&self) -> usize {
        self.scopes.iter().map(|s| s.symbols.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("'{0}' is not a string, integer or decimal literal")]
pub struct UnrecognizedLiteral(pub String);

/// Type of the right-hand side of a `var` binding.
pub fn infer_literal_type(text: &str) -> Result<DslType, UnrecognizedLiteral> {
    let text = text.trim();
    if is_string_literal(text) {
        Ok(DslType::Str)
    } else if is_integer_literal(text) {
        Ok(DslType::Int)
    } else if is_decimal_literal(text) {
        Ok(DslType::Real)
    } else {
        Err(UnrecognizedLiteral(text.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Undeclared loop indexes are errors instead of implicit `int`s.
    pub strict: bool,
}

struct Analyzer {
    table: SymbolTable,
    diagnostics: Vec<Diagnostic>,
    options: AnalysisOptions,
    scope: ScopeId,
    containers: Vec<String>,
    function_pending: bool,
}

impl Analyzer {
    fn declare(&mut self, scope: ScopeId, name: &str, ty: DslType, at: SourcePosition) {
        if !is_identifier(name) {
            self.diagnostics.push(Diagnostic::error(
                "BadIdentifier",
                at,
                format!("'{name}' is not a valid identifier"),
            ));
            return;
        }
        if let Err(first) = self.table.declare_in(scope, Symbol::new(name, ty, at)) {
            let implicit = self.table.lookup_in(scope, name).is_some_and(|s| s.implicit);
            let how = if implicit { "implicitly by a loop" } else { "already" };
            self.diagnostics.push(Diagnostic::error(
                "RepeatedDecl",
                at,
                format!("'{name}' is {how} declared at {first}"),
            ));
        }
    }

    fn require(&mut self, name: &str, at: SourcePosition) {
        if self.table.lookup_from(self.scope, name).is_none() {
            self.diagnostics.push(Diagnostic::error(
                "UndeclaredVar",
                at,
                format!("'{name}' is used but never declared"),
            ));
        }
    }

    fn require_expr(&mut self, expr: &str, at: SourcePosition) {
        for name in referenced_identifiers(expr) {
            self.require(&name, at);
        }
    }

    fn var(&mut self, node: &ElementNode, scope: ScopeId) {
        let Some((name, value)) = split_assignment(&node.text) else {
            return;
        };
        let ty = match infer_literal_type(value) {
            Ok(t) => t,
            Err(e) => {
                self.diagnostics
                    .push(Diagnostic::error("UnrecognizedLiteral", node.position, e.to_string()));
                DslType::Str
            }
        };
        self.declare(scope, name, ty, node.position);
    }

    fn read(&mut self, node: &ElementNode) {
        let target = node.trimmed_text();
        match self.table.lookup_from_mut(self.scope, target) {
            Some(sym) if sym.dsl_type.is_scalar() => {
                sym.is_read_target = true;
                sym.dsl_type = DslType::Str;
            }
            Some(sym) => {
                let ty = sym.dsl_type.clone();
                self.diagnostics.push(Diagnostic::error(
                    "InvalidReadTarget",
                    node.position,
                    format!("'{target}' has type {ty}; only plain variables can receive a read"),
                ));
            }
            None => self.require(target, node.position),
        }
    }

    fn loop_or_condition(&mut self, node: &ElementNode) {
        let Ok(stmt) = parse_statement(&node.text) else {
            return;
        };
        match stmt {
            Statement::If(cond) => self.require_expr(&cond, node.position),
            Statement::Loop(h) => {
                if self.table.lookup_from(self.scope, &h.index).is_none() {
                    if self.options.strict {
                        self.require(&h.index, node.position);
                    } else {
                        let mut sym = Symbol::new(&h.index, DslType::Int, node.position);
                        sym.implicit = true;
                        self.table.declare_in(self.scope, sym).expect("name is free");
                        self.diagnostics.push(Diagnostic::note(
                            "ImplicitLoopVar",
                            node.position,
                            format!("loop index '{}' is not declared; declaring it as int", h.index),
                        ));
                    }
                }
                self.require_expr(&h.start, node.position);
                match &h.bound {
                    LoopBound::Limit(e) | LoopBound::Condition(e) => self.require_expr(e, node.position),
                }
                self.require_expr(&h.step, node.position);
            }
            Statement::Else | Statement::EndIf | Statement::EndLoop => {}
        }
    }

    fn header(&mut self, node: &ElementNode) {
        let name = match FunctionHeader::parse(&node.text) {
            Ok(h) => {
                let ret = DslType::Function(h.returns.clone().map(Box::new));
                self.declare(DECLARATIONS, &h.name, ret, node.position);
                let scope = self.table.add_function_scope(&h.name);
                for p in &h.params {
                    self.declare(scope, &p.name, p.ty.clone(), node.position);
                }
                self.scope = scope;
                return;
            }
            // the generator reports the malformed header
            Err(_) => node.trimmed_text().to_string(),
        };
        self.scope = self.table.add_function_scope(&name);
    }

    fn leaf(&mut self, node: &ElementNode) {
        if self.function_pending {
            self.function_pending = false;
            if node.name == "header" {
                self.header(node);
                return;
            }
            self.scope = self.table.add_function_scope("");
        }
        let in_declare = self.containers.last().is_some_and(|c| c == "declare");
        let scope = if in_declare { DECLARATIONS } else { self.scope };
        let at = node.position;
        match node.name.as_str() {
            "var" => self.var(node, scope),
            "array" => {
                if let Ok(a) = ArrayDecl::parse(&node.text) {
                    self.declare(scope, &a.name, DslType::ArrayOf(Box::new(a.element)), at);
                }
            }
            "read" => self.read(node),
            "writev" => self.require(node.trimmed_text(), at),
            "out" => {
                for w in node.children_named("writev") {
                    self.require(w.trimmed_text(), w.position);
                }
            }
            "dB" => {
                if let Some(c) = node.child("conn_name") {
                    self.declare(scope, c.trimmed_text(), DslType::Connection, c.position);
                }
            }
            "ps" => {
                for child in &node.children {
                    match child.name.as_str() {
                        "var" => self.var(child, scope),
                        "read" => self.read(child),
                        "set" => {
                            if let Ok(set) = SetCall::parse(&child.text) {
                                if is_identifier(&set.argument) {
                                    self.require(&set.argument, child.position);
                                }
                            }
                        }
                        "result" => {
                            self.declare(scope, child.trimmed_text(), DslType::ResultCount, child.position)
                        }
                        "get" => {
                            if let Ok(get) = GetCall::parse(&child.text) {
                                self.require(&get.target, child.position);
                            }
                        }
                        _ => {}
                    }
                }
            }
            "s" => self.loop_or_condition(node),
            "class" => {
                if let Ok(c) = ClassDecl::parse(&node.text) {
                    self.declare(scope, &c.object_name, DslType::Object(c.class_name), at);
                }
            }
            _ => {}
        }
    }

    fn item(&mut self, item: Item) {
        match item {
            Item::Enter { tag, .. } => {
                if tag == "function" {
                    self.function_pending = true;
                }
                self.containers.push(tag);
            }
            Item::Exit { tag, .. } => {
                if tag == "function" {
                    if self.function_pending {
                        self.function_pending = false;
                        self.table.add_function_scope("");
                    }
                    self.scope = BODY;
                }
                self.containers.pop();
            }
            Item::Leaf(node) => self.leaf(&node),
        }
    }
}

/// Builds the symbol table for a document that has passed validation and
/// reports repeated declarations and uses of undeclared names.
pub fn analyze<I>(events: I, options: AnalysisOptions) -> Result<(SymbolTable, Vec<Diagnostic>), ReaderError>
where
    I: IntoIterator<Item = Result<XmlEvent, ReaderError>>,
{
    let mut a = Analyzer {
        table: SymbolTable::new(),
        diagnostics: Vec::new(),
        options,
        scope: BODY,
        containers: Vec::new(),
        function_pending: false,
    };
    for item in Items::new(events.into_iter()) {
        a.item(item?);
    }
    Ok((a.table, a.diagnostics))
}
