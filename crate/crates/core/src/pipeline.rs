//! Reader → validator → analyzer → generator, end to end.

use std::io::{self, Write};

use crate::codegen::{translate, BodyItem, DocumentSource, Fragment, JspWriter, ProgramSink, TranslateError, TranslationOptions};
use crate::diagnostics::{has_errors, normalize, Diagnostic};
use crate::schema::{Schema, ValidationDiagnostic, Validator};
use crate::symbols::{analyze, AnalysisOptions};

impl From<&ValidationDiagnostic> for Diagnostic {
    fn from(d: &ValidationDiagnostic) -> Self {
        Diagnostic::error(d.code.as_str(), d.position, d.message.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    /// In document order, duplicates removed.
    pub diagnostics: Vec<Diagnostic>,
    /// Whether JSP text was written to the output.
    pub written: bool,
}

impl Outcome {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }
}

struct Discard;

impl ProgramSink for Discard {
    fn declaration(&mut self, _: Fragment) -> io::Result<()> {
        Ok(())
    }

    fn body(&mut self, _: BodyItem) -> io::Result<()> {
        Ok(())
    }
}

fn reader_failure(e: TranslateError) -> io::Result<Diagnostic> {
    match e {
        TranslateError::Reader(e) => Ok(Diagnostic::from(&e)),
        TranslateError::Io(e) => Err(e),
    }
}

/// Validates and translates the document. `out` receives the page only if
/// no error was found; with `check_only` it is never written. Only failures
/// writing `out` are returned as `Err`.
pub fn compile<S, W>(source: &S, schema: &Schema, options: &TranslationOptions, out: W) -> io::Result<Outcome>
where
    S: DocumentSource + ?Sized,
    W: Write,
{
    let mut diagnostics = Vec::new();
    let finish = |mut diagnostics: Vec<Diagnostic>, written| {
        normalize(&mut diagnostics);
        Ok(Outcome { diagnostics, written })
    };

    let events = match source.events() {
        Ok(ev) => ev,
        Err(e) => return finish(vec![Diagnostic::from(&e)], false),
    };
    let mut validator = Validator::new(schema);
    let analysis = analyze(
        events.inspect(|ev| {
            if let Ok(ev) = ev {
                validator.feed(ev);
            }
        }),
        AnalysisOptions { strict: options.strict },
    );
    let validation = validator.finish();
    let (table, analysis_diags) = match analysis {
        Ok(r) => r,
        Err(e) => {
            diagnostics.push(Diagnostic::from(&e));
            diagnostics.extend(validation.iter().map(Diagnostic::from));
            return finish(diagnostics, false);
        }
    };
    if !validation.is_empty() {
        // analysis assumes a valid document
        diagnostics.extend(validation.iter().map(Diagnostic::from));
        return finish(diagnostics, false);
    }
    diagnostics.extend(analysis_diags);

    match translate(source, &table, options, &mut Discard) {
        Ok(d) => diagnostics.extend(d),
        Err(e) => {
            diagnostics.push(reader_failure(e)?);
            return finish(diagnostics, false);
        }
    }
    if has_errors(&diagnostics) || options.check_only {
        return finish(diagnostics, false);
    }

    let mut writer = JspWriter::new(out, options.emit_imports);
    if let Err(e) = translate(source, &table, options, &mut writer) {
        diagnostics.push(reader_failure(e)?);
        return finish(diagnostics, false);
    }
    writer.finish()?;
    finish(diagnostics, true)
}

/// Translates an in-memory document with the built-in grammar. Returns the
/// page text when there were no errors.
pub fn translate_str(document: &str, options: &TranslationOptions) -> (Option<String>, Vec<Diagnostic>) {
    let bytes = document.as_bytes();
    let source = || Ok(bytes);
    let mut out = Vec::new();
    let outcome = compile(&source, &crate::schema::builtin_schema(), options, &mut out)
        .expect("writing to memory cannot fail");
    let text = outcome
        .written
        .then(|| String::from_utf8(out).expect("generated text is UTF-8"));
    (text, outcome.diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = include_str!("../tests/fixtures/sample.xml");

    #[test]
    fn sample_translates() {
        let (text, diags) = translate_str(SAMPLE, &TranslationOptions::default());
        assert!(diags.iter().all(|d| !d.is_error()), "{diags:?}");
        let text = text.unwrap();
        assert!(text.starts_with("<%!\nString a = \"this is how!\";\n%>\n<%\nfor(int xx=2;xx<=10;xx=xx+2){\n"));
        assert!(text.ends_with("}\ncatch(Exception e){e.printStackTrace();}\n%>\n"));
    }

    #[test]
    fn errors_suppress_output() {
        let (text, diags) = translate_str("<root><writev>q</writev></root>", &TranslationOptions::default());
        assert!(text.is_none());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "UndeclaredVar");
    }

    #[test]
    fn validation_errors_stop_before_analysis() {
        let (text, diags) = translate_str("<root><bogus/><writev>q</writev></root>", &TranslationOptions::default());
        assert!(text.is_none());
        assert_eq!(diags.iter().map(|d| d.code).collect::<Vec<_>>(), ["UnknownTag"]);
    }

    #[test]
    fn reader_errors_are_diagnostics() {
        let (text, diags) = translate_str("<root><out></root>", &TranslationOptions::default());
        assert!(text.is_none());
        assert_eq!(diags[0].code, "MismatchedCloseTag");
    }

    #[test]
    fn check_only_writes_nothing() {
        let bytes = SAMPLE.as_bytes();
        let mut out = Vec::new();
        let options = TranslationOptions {
            check_only: true,
            ..Default::default()
        };
        let outcome = compile(&|| Ok(bytes), &crate::schema::builtin_schema(), &options, &mut out).unwrap();
        assert!(!outcome.has_errors() && !outcome.written && out.is_empty());
    }
}
