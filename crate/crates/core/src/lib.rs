//! Translator from an XML pseudo-code dialect to JSP source.
//!
//! The pipeline streams the input three times: validation and symbol
//! analysis share the first pass, code generation takes two more (page
//! declarations, then the scriptlet body). No pass holds more than one
//! top-level statement in memory.

pub mod codegen;
pub mod diagnostics;
pub mod dsl;
pub mod event_reader;
pub mod pipeline;
pub mod schema;
pub mod statements;
pub mod symbols;
pub mod tree;

pub use codegen::TranslationOptions;
pub use diagnostics::{Diagnostic, Severity};
pub use event_reader::{open_document, ReaderError, SourcePosition, XmlEvent};
pub use pipeline::{compile, translate_str, Outcome};
pub use schema::{builtin_schema, export_xsd, Schema};
