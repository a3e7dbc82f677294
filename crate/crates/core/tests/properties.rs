use std::io;

use xml2jsp_core::codegen::{translate, JspProgram};
use xml2jsp_core::symbols::{analyze, AnalysisOptions};
use xml2jsp_core::{open_document, translate_str, SourcePosition, TranslationOptions};
use xml2jsp_testkit::generator::documents;
use xml2jsp_testkit::jsp::check_balance;
use xml2jsp_testkit::loops::{count_iterations, parse_for, random_triples};
use xml2jsp_testkit::mutants::sample_mutants;

const SAMPLE: &str = include_str!("fixtures/sample.xml");

fn program(doc: &str) -> JspProgram {
    let (table, _) = analyze(open_document(doc.as_bytes()).unwrap(), AnalysisOptions::default()).unwrap();
    let source = || Ok::<_, io::Error>(doc.as_bytes());
    let mut program = JspProgram::default();
    translate(&source, &table, &TranslationOptions::default(), &mut program).unwrap();
    program
}

fn non_decreasing<'a>(origins: impl Iterator<Item = &'a SourcePosition>) -> bool {
    let offsets: Vec<u64> = origins.map(|p| p.byte_offset).collect();
    offsets.windows(2).all(|w| w[0] <= w[1])
}

#[test]
fn generated_documents_translate_cleanly() {
    for (i, doc) in documents(7, 500).iter().enumerate() {
        let opts = TranslationOptions::default();
        let (first, diags) = translate_str(doc, &opts);
        let page = first.unwrap_or_else(|| panic!("document {i} rejected: {diags:?}\n{doc}"));
        check_balance(&page).unwrap_or_else(|e| panic!("document {i}: {e}\n{page}"));
        assert_eq!(translate_str(doc, &opts).0.as_deref(), Some(page.as_str()), "document {i} is not deterministic");

        let p = program(doc);
        assert!(non_decreasing(p.declarations.iter().map(|f| &f.origin)), "document {i}: declaration order");
        assert!(non_decreasing(p.body.iter().map(|b| &b.fragment().origin)), "document {i}: body order");
    }
}

#[test]
fn emitted_loops_run_the_expected_number_of_times() {
    for (start, limit, step) in random_triples(11, 100) {
        let doc = format!("<root><s>loop from i = {start} to {limit} step {step}</s><s>endloop</s></root>");
        let (page, diags) = translate_str(&doc, &TranslationOptions::default());
        let page = page.unwrap_or_else(|| panic!("{diags:?}"));
        let header = page.lines().find(|l| l.starts_with("for(")).expect("for header");
        let expected = ((limit - start) / step + 1) as u64;
        assert_eq!(count_iterations(parse_for(header).unwrap(), 1_000_000), Some(expected), "{header}");
    }
}

#[test]
fn every_mutant_is_rejected_at_its_fault() {
    for m in sample_mutants(SAMPLE) {
        let (page, diags) = translate_str(&m.text, &TranslationOptions::default());
        assert!(page.is_none(), "{}: produced output", m.name);
        let hit = diags
            .iter()
            .filter(|d| d.is_error())
            .any(|d| m.span.contains(&(d.position.byte_offset as usize)));
        assert!(hit, "{}: no error inside {:?}: {diags:?}", m.name, m.span);
    }
}
