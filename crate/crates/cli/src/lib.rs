//! The `xml2jsp` command.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use xml2jsp_core::codegen::{DocumentSource, FileSource};
use xml2jsp_core::{builtin_schema, compile, export_xsd, Diagnostic, Outcome, TranslationOptions};

pub const BANNER: &str = "Input validated successfully";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xml2jsp", version, about = "Translate an XML pseudo-code document into a JSP page")]
struct Args {
    /// Input document, or `-` for standard input
    #[arg(required_unless_present = "emit_xsd")]
    input: Option<PathBuf>,

    /// Output page; defaults to the input path with a .jsp extension
    #[arg(short, long, value_name = "OUTPUT")]
    output: Option<PathBuf>,

    /// Reject loop indexes that were never declared
    #[arg(long)]
    strict: bool,

    /// Validate and analyze only; write nothing
    #[arg(long)]
    check: bool,

    /// Print the dB block's excep_msg in the generated catch
    #[arg(long)]
    emit_excep_msg: bool,

    /// Print with out.println instead of System.out.println
    #[arg(long)]
    response_out: bool,

    /// Start the page with a java.sql import directive
    #[arg(long)]
    emit_imports: bool,

    /// Write the grammar as an XML Schema to this path (`-` for stdout)
    #[arg(long, value_name = "PATH")]
    emit_xsd: Option<PathBuf>,
}

impl Args {
    fn options(&self) -> TranslationOptions {
        TranslationOptions {
            strict: self.strict,
            emit_excep_msg: self.emit_excep_msg,
            response_out: self.response_out,
            emit_imports: self.emit_imports,
            check_only: self.check,
        }
    }
}

fn is_dash(p: &Path) -> bool {
    p.as_os_str() == "-"
}

struct Failure(String);

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the command with `argv` (program name first) and returns the exit
/// code.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&args, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "xml2jsp: {msg}");
            EXIT_USAGE
        }
    }
}

fn execute(args: &Args, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    if let Some(path) = &args.emit_xsd {
        let mut text = Vec::new();
        export_xsd(&builtin_schema(), &mut text)?;
        if is_dash(path) {
            stdout.write_all(&text)?;
        } else {
            fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        }
    }
    let Some(input) = &args.input else {
        return Ok(EXIT_OK);
    };

    let output = match (&args.output, is_dash(input)) {
        (Some(o), _) => Some(o.clone()),
        (None, false) => Some(input.with_extension("jsp")),
        (None, true) if args.check => None,
        (None, true) => return Err(Failure("reading standard input needs -o".into())),
    };
    if let Some(out) = &output {
        if !is_dash(input) && !is_dash(out) && same_file(input, out) {
            return Err(Failure(format!("{}: output would overwrite the input", out.display())));
        }
    }

    let options = args.options();
    let (name, outcome, page) = if is_dash(input) {
        let mut doc = Vec::new();
        stdin.read_to_end(&mut doc)?;
        let source = || Ok::<_, io::Error>(doc.as_slice());
        let (outcome, page) = translate(&source, &options, output.as_deref())?;
        ("<stdin>".to_string(), outcome, page)
    } else {
        File::open(input).map_err(|e| Failure(format!("{}: {e}", input.display())))?;
        let (outcome, page) = translate(&FileSource(input.clone()), &options, output.as_deref())?;
        (input.display().to_string(), outcome, page)
    };

    report(&name, &outcome.diagnostics, stderr)?;
    if let Some(io_error) = outcome.diagnostics.iter().find(|d| d.code == "Io") {
        return Err(Failure(format!("{name}: {}", io_error.message)));
    }
    if outcome.has_errors() {
        return Ok(EXIT_INVALID);
    }
    match page {
        // the page owns stdout
        Some(page) => {
            writeln!(stderr, "{BANNER}")?;
            stdout.write_all(&page)?;
        }
        None => writeln!(stdout, "{BANNER}")?,
    }
    Ok(EXIT_OK)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Compiles into a temporary file next to `output` and moves it into place
/// only on success; `-` collects the page for stdout instead.
fn translate<S: DocumentSource>(
    source: &S,
    options: &TranslationOptions,
    output: Option<&Path>,
) -> Result<(Outcome, Option<Vec<u8>>), Failure> {
    let schema = builtin_schema();
    match output {
        None => Ok((compile(source, &schema, options, io::sink())?, None)),
        Some(out) if is_dash(out) => {
            let mut page = Vec::new();
            let outcome = compile(source, &schema, options, &mut page)?;
            let page = outcome.written.then_some(page);
            Ok((outcome, page))
        }
        Some(out) => {
            let dir = match out.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
            let mut writer = BufWriter::new(tmp);
            let outcome = compile(source, &schema, options, &mut writer)?;
            if outcome.written {
                let tmp = writer.into_inner().map_err(|e| Failure(e.error().to_string()))?;
                #[cfg(unix)]
                {
                    use std::os::unix::fs::PermissionsExt;
                    tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
                }
                tmp.persist(out).map_err(|e| Failure(format!("{}: {}", out.display(), e.error)))?;
            }
            Ok((outcome, None))
        }
    }
}

fn report(name: &str, diagnostics: &[Diagnostic], stderr: &mut dyn Write) -> io::Result<()> {
    for d in diagnostics {
        writeln!(stderr, "{}", d.render(name))?;
    }
    Ok(())
}
