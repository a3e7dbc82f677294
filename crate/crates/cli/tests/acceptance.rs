//! One PASS/FAIL line per acceptance criterion. Runs sequentially in a
//! single process so the allocation counter sees only the streaming check.

use std::alloc::{GlobalAlloc, Layout, System};
use std::io;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use xml2jsp_core::codegen::{translate, JspProgram};
use xml2jsp_core::event_reader::read_all;
use xml2jsp_core::schema::validate_stream;
use xml2jsp_core::symbols::{analyze, AnalysisOptions};
use xml2jsp_core::{builtin_schema, compile, export_xsd, open_document, translate_str, TranslationOptions};
use xml2jsp_testkit::flat::FlatDocument;
use xml2jsp_testkit::generator::documents;
use xml2jsp_testkit::jsp::{check_balance, tokenize};
use xml2jsp_testkit::loops::{count_iterations, parse_for, random_triples};
use xml2jsp_testkit::mutants::sample_mutants;
use xml2jsp_testkit::xsd::{python_xmlschema_available, validate_with_xmlschema, XsdInterpreter};

const READ_PARAM: &str = include_str!("../../core/tests/fixtures/read_param.xml");
const READ_PARAM_JSP: &str = include_str!("../../core/tests/fixtures/read_param.jsp");
const SAMPLE: &str = include_str!("../../core/tests/fixtures/sample.xml");
const SAMPLE_JSP: &str = include_str!("../../core/tests/fixtures/sample.jsp");

const GOLDEN_TIME_LIMIT: Duration = Duration::from_secs(1);
const GENERATED_DOCS: usize = 500;
const GENERATOR_SEED: u64 = 7;
const LOOP_TRIPLES: usize = 100;
const LOOP_SEED: u64 = 11;
const FLAT_BYTES: u64 = 50 * 1024 * 1024;
const MEMORY_CEILING: usize = 16 * 1024 * 1024;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

type Verdict = Result<String, String>;

fn page(doc: &str) -> Result<String, String> {
    let (out, diags) = translate_str(doc, &TranslationOptions::default());
    out.ok_or_else(|| format!("rejected: {diags:?}"))
}

fn golden_read_parameter() -> Verdict {
    let t = Instant::now();
    let page = page(READ_PARAM)?;
    let elapsed = t.elapsed();
    let tokens = tokenize(&page);
    let inner = tokens
        .strip_prefix(&["<%".to_string()])
        .and_then(|t| t.strip_suffix(&["%>".to_string()]))
        .ok_or("page is not a single scriptlet")?;
    if inner != tokenize(READ_PARAM_JSP) {
        return Err(format!("token mismatch:\n{page}"));
    }
    if elapsed >= GOLDEN_TIME_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("3 statements match in {elapsed:?}"))
}

fn golden_database_update() -> Verdict {
    let t = Instant::now();
    let page = page(SAMPLE)?;
    let elapsed = t.elapsed();
    if !page.contains("for(int xx=2;xx<=10;xx=xx+2){") {
        return Err("deviation (a): loop index declaration missing".into());
    }
    if !page.contains("ps.setString(1,b);") || !page.contains("ps.setInt(2,20000);") {
        return Err("deviation (b): setter lines differ".into());
    }
    let mut ours = tokenize(&page);
    let at = ours
        .windows(3)
        .position(|w| w == ["(", "int", "xx"])
        .ok_or("no declared loop index")?;
    ours.remove(at + 1);
    // (c) spacing: the comparison is over tokens
    let expected = tokenize(SAMPLE_JSP);
    if ours != expected {
        let i = ours.iter().zip(&expected).position(|(a, b)| a != b).unwrap_or(ours.len().min(expected.len()));
        return Err(format!("first token difference at {i}: {:?} vs {:?}", ours.get(i), expected.get(i)));
    }
    if elapsed >= GOLDEN_TIME_LIMIT {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} tokens match modulo 3 deviations in {elapsed:?}", expected.len()))
}

fn offset_of(text: &str, line: usize, column: usize) -> Option<usize> {
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    let rest = &text[start..];
    Some(start + rest.char_indices().nth(column - 1).map_or(rest.len(), |(i, _)| i))
}

fn cli(args: &[&Path]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_xml2jsp")).args(args).output().expect("run xml2jsp");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn validation_gate() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("sample.xml");
    std::fs::write(&input, SAMPLE).map_err(|e| e.to_string())?;
    let (code, stdout, stderr) = cli(&[&input]);
    if code != 0 || stdout.trim() != "Input validated successfully" {
        return Err(format!("sample: exit {code}, stdout {stdout:?}, stderr {stderr:?}"));
    }
    if stderr.lines().any(|l| l.contains(": error ") || l.contains(": warning ")) {
        return Err(format!("sample produced diagnostics: {stderr}"));
    }
    let events = read_all(SAMPLE.as_bytes()).map_err(|e| e.to_string())?;
    let validation = validate_stream(&events, &builtin_schema());
    if !validation.is_empty() {
        return Err(format!("sample has validation diagnostics: {validation:?}"));
    }
    if !input.with_extension("jsp").exists() {
        return Err("sample produced no page".into());
    }

    let mutants = sample_mutants(SAMPLE);
    for m in &mutants {
        let input = dir.path().join("mutant.xml");
        let output = dir.path().join("mutant.jsp");
        std::fs::write(&input, &m.text).map_err(|e| e.to_string())?;
        let (code, _, stderr) = cli(&[&input, Path::new("-o"), &output]);
        if code != 1 {
            return Err(format!("{}: exit {code}", m.name));
        }
        if output.exists() {
            return Err(format!("{}: output file written", m.name));
        }
        let prefix = format!("{}:", input.display());
        let inside = stderr.lines().filter_map(|l| l.strip_prefix(&prefix)).any(|rest| {
            let mut parts = rest.splitn(3, ':');
            let (Some(line), Some(col), Some(tail)) = (parts.next(), parts.next(), parts.next()) else {
                return false;
            };
            let (Ok(line), Ok(col)) = (line.parse(), col.parse()) else {
                return false;
            };
            tail.starts_with(" error ") && offset_of(&m.text, line, col).is_some_and(|o| m.span.contains(&o))
        });
        if !inside {
            return Err(format!("{}: no error inside the mutated element: {stderr}", m.name));
        }
    }
    Ok(format!("banner printed, {} mutants rejected with exit 1 and no output", mutants.len()))
}

fn property_suite() -> Verdict {
    let opts = TranslationOptions::default();
    for (i, doc) in documents(GENERATOR_SEED, GENERATED_DOCS).iter().enumerate() {
        let first = page(doc).map_err(|e| format!("document {i}: {e}"))?;
        check_balance(&first).map_err(|e| format!("document {i}: {e}"))?;
        if translate_str(doc, &opts).0.as_deref() != Some(first.as_str()) {
            return Err(format!("document {i}: output differs between runs"));
        }
        let (table, _) = analyze(open_document(doc.as_bytes()).map_err(|e| e.to_string())?, AnalysisOptions::default())
            .map_err(|e| e.to_string())?;
        let mut program = JspProgram::default();
        let source = || Ok::<_, io::Error>(doc.as_bytes());
        translate(&source, &table, &opts, &mut program).map_err(|e| e.to_string())?;
        let ordered = |offsets: Vec<u64>| offsets.windows(2).all(|w| w[0] <= w[1]);
        if !ordered(program.declarations.iter().map(|f| f.origin.byte_offset).collect())
            || !ordered(program.body.iter().map(|b| b.fragment().origin.byte_offset).collect())
        {
            return Err(format!("document {i}: fragment origins go backwards"));
        }
    }
    Ok(format!("{GENERATED_DOCS} documents balanced, ordered and deterministic"))
}

fn accepts(doc: &str) -> bool {
    match read_all(doc.as_bytes()) {
        Ok(events) => validate_stream(&events, &builtin_schema()).is_empty(),
        Err(_) => false,
    }
}

fn oracle_equivalence() -> Verdict {
    let mut xsd = Vec::new();
    export_xsd(&builtin_schema(), &mut xsd).map_err(|e| e.to_string())?;
    let xsd = String::from_utf8(xsd).map_err(|e| e.to_string())?;
    let mut cases = documents(GENERATOR_SEED, GENERATED_DOCS);
    cases.extend(sample_mutants(SAMPLE).into_iter().map(|m| m.text));
    let ours: Vec<bool> = cases.iter().map(|d| accepts(d)).collect();

    let interpreter = XsdInterpreter::parse(&xsd)?;
    for (i, doc) in cases.iter().enumerate() {
        if interpreter.validate(doc) != ours[i] {
            return Err(format!("case {i}: schema interpreter says {}, validator says {}", !ours[i], ours[i]));
        }
    }
    let mut oracles = "schema interpreter";
    if python_xmlschema_available() {
        let verdicts = validate_with_xmlschema(&xsd, &cases).map_err(|e| e.to_string())?;
        if let Some(i) = (0..cases.len()).find(|&i| verdicts[i] != ours[i]) {
            return Err(format!("case {i}: xmlschema says {}, validator says {}", verdicts[i], ours[i]));
        }
        oracles = "xmlschema and schema interpreter";
    }
    let rejected = ours.iter().filter(|v| !**v).count();
    Ok(format!("{} cases agree with {oracles} ({rejected} rejected)", cases.len()))
}

fn statement_oracle() -> Verdict {
    for (start, limit, step) in random_triples(LOOP_SEED, LOOP_TRIPLES) {
        let doc = format!("<root><s>loop from i = {start} to {limit} step {step}</s><s>endloop</s></root>");
        let page = page(&doc)?;
        let header = page.lines().find(|l| l.starts_with("for(")).ok_or("no for header")?;
        let counted = count_iterations(parse_for(header)?, 1_000_000);
        let expected = ((limit - start) / step + 1) as u64;
        if counted != Some(expected) {
            return Err(format!("{header}: {counted:?} iterations, expected {expected}"));
        }
    }
    Ok(format!("{LOOP_TRIPLES} loop headers iterate floor((limit-start)/step)+1 times"))
}

fn streaming_memory() -> Verdict {
    let source = || Ok::<_, io::Error>(FlatDocument::new(FLAT_BYTES));
    let schema = builtin_schema();
    let baseline = CURRENT.load(Ordering::Relaxed);
    PEAK.store(baseline, Ordering::Relaxed);
    let outcome = compile(&source, &schema, &TranslationOptions::default(), io::sink()).map_err(|e| e.to_string())?;
    let peak = PEAK.load(Ordering::Relaxed) - baseline;
    if !outcome.written || outcome.has_errors() {
        return Err(format!("flat document rejected: {:?}", outcome.diagnostics.first()));
    }
    if peak > MEMORY_CEILING {
        return Err(format!("peak heap {peak} bytes exceeds {MEMORY_CEILING}"));
    }
    Ok(format!("50 MiB document translated with peak heap {} KiB (ceiling {} KiB)", peak / 1024, MEMORY_CEILING / 1024))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("1 golden read-parameter page", golden_read_parameter),
        ("2 golden database-update page", golden_database_update),
        ("3 validation gate", validation_gate),
        ("4 property suite", property_suite),
        ("5 XSD oracle equivalence", oracle_equivalence),
        ("6 loop statement oracle", statement_oracle),
        ("7 streaming memory bound", streaming_memory),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
