//! The `tores` command.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::{
    check_source, parse_program, print_program, print_type, print_value, syntax_diagnostic, Diagnostic, ElabOptions,
    Span,
};
use crate::machine::{is_pair_stream, Halt, IndexEnv, Machine, TraceEvent, Value, ValueEnv, DEFAULT_FUEL, EVAL_STACK};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

// Deeply nested values recurse deeply in the evaluator.

#[derive(Parser, Debug)]
#[command(
    name = "tores",
    version,
    about = "Checker and interpreter for an indexed type system with Mendler (co)recursion"
)]
struct Cli {
    /// Emit diagnostics and results as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Print the parsed syntax tree.
    #[arg(long, global = true)]
    dump_ast: bool,
    /// Print one line per evaluation rule to stderr.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kind- and type-check source files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Evaluate a definition.
    Run {
        file: PathBuf,
        /// Definition to evaluate.
        #[arg(long = "main")]
        main: String,
        /// Step budget.
        #[arg(long, env = "TORES_FUEL", default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Observe this many elements of a stream result.
        #[arg(long)]
        take: Option<usize>,
    },
    /// Pretty-print a source file.
    Fmt { file: PathBuf },
}

struct Io<'a> {
    json: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn report(&mut self, diags: &[Diagnostic], src: &str) {
        if self.json {
            return;
        }
        for d in diags {
            let _ = write!(self.err, "{}", d.render(src));
        }
    }

    fn json<T: Serialize>(&mut self, v: &T) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
    }
}

#[derive(Serialize)]
struct CheckReport<'a> {
    ok: bool,
    diagnostics: &'a [Diagnostic],
}

#[derive(Serialize)]
struct RunReport<'a> {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    observations: Option<Vec<String>>,
    steps: u64,
    diagnostics: &'a [Diagnostic],
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`main`] writing to the given streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let mut io = Io { json: cli.json, out, err };
    match &cli.command {
        Command::Check { files } => cmd_check(&cli, files, &mut io),
        Command::Run { file, main, fuel, take } => cmd_run(&cli, file, main, *fuel, *take, &mut io),
        Command::Fmt { file } => cmd_fmt(&cli, file, &mut io),
    }
}

fn read(path: &PathBuf, io: &mut Io<'_>) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Some(s),
        Err(e) => {
            let d = Diagnostic::error(&path.display().to_string(), "", Span::default(), "io", e.to_string());
            if io.json {
                io.json(&CheckReport { ok: false, diagnostics: std::slice::from_ref(&d) });
            } else {
                io.report(std::slice::from_ref(&d), "");
            }
            None
        }
    }
}

fn dump_ast(cli: &Cli, src: &str, io: &mut Io<'_>) {
    if cli.dump_ast {
        if let Ok(p) = parse_program(src) {
            let _ = writeln!(io.out, "{p:#?}");
        }
    }
}

fn cmd_check(cli: &Cli, files: &[PathBuf], io: &mut Io<'_>) -> i32 {
    let mut all = Vec::new();
    let mut code = EXIT_OK;
    for path in files {
        let Some(src) = read(path, io) else {
            return EXIT_USAGE;
        };
        dump_ast(cli, &src, io);
        let file = path.display().to_string();
        let checked = check_source(&file, &src, &ElabOptions::default());
        io.report(&checked.diagnostics, &src);
        if checked.is_ok() {
            if !io.json {
                let _ = writeln!(io.out, "{file}: ok ({} declarations)", checked.elaborated.items.len());
            }
        } else {
            code = EXIT_DIAGNOSTICS;
        }
        all.extend(checked.diagnostics);
    }
    if io.json {
        io.json(&CheckReport { ok: all.is_empty(), diagnostics: &all });
    }
    code
}

fn cmd_fmt(cli: &Cli, path: &PathBuf, io: &mut Io<'_>) -> i32 {
    let Some(src) = read(path, io) else {
        return EXIT_USAGE;
    };
    dump_ast(cli, &src, io);
    match parse_program(&src) {
        Ok(p) => {
            let _ = write!(io.out, "{}", print_program(&p));
            EXIT_OK
        }
        Err(e) => {
            let d = syntax_diagnostic(&path.display().to_string(), &src, &e);
            if io.json {
                io.json(&CheckReport { ok: false, diagnostics: std::slice::from_ref(&d) });
            } else {
                io.report(std::slice::from_ref(&d), &src);
            }
            EXIT_DIAGNOSTICS
        }
    }
}

/// A coinductive type whose observations are pairs.
enum RunResult {
    Value(Value),
    Observations(Vec<Value>),
}

fn cmd_run(cli: &Cli, path: &PathBuf, main: &str, fuel: u64, take: Option<usize>, io: &mut Io<'_>) -> i32 {
    let Some(src) = read(path, io) else {
        return EXIT_USAGE;
    };
    dump_ast(cli, &src, io);
    let file = path.display().to_string();
    let checked = check_source(&file, &src, &ElabOptions::default());
    let fail = |io: &mut Io<'_>, diags: &[Diagnostic], steps: u64, code: i32| {
        io.report(diags, &src);
        if io.json {
            io.json(&RunReport { ok: false, value: None, observations: None, steps, diagnostics: diags });
        }
        code
    };
    if !checked.is_ok() {
        return fail(io, &checked.diagnostics, 0, EXIT_DIAGNOSTICS);
    }
    let main_span = checked
        .program
        .as_ref()
        .and_then(|p| p.decls.iter().find(|d| &*d.name == main))
        .map_or(Span::default(), |d| d.name_span);
    let Some((ty, body)) = checked.elaborated.def(main) else {
        let d = Diagnostic::error(&file, &src, main_span, "run/unknown_main", format!("no definition named `{main}`"));
        return fail(io, &[d], 0, EXIT_DIAGNOSTICS);
    };
    if take.is_some() && !is_pair_stream(ty) {
        let d = Diagnostic::error(
            &file,
            &src,
            main_span,
            "run/not_stream",
            format!("`{main}` has type `{}`, which is not a stream of <head, tail> observations", print_type(ty)),
        );
        return fail(io, &[d], 0, EXIT_DIAGNOSTICS);
    }

    let body = body.clone();
    let trace = cli.trace;
    let (trace_tx, trace_rx) = std::sync::mpsc::sync_channel::<String>(1024);
    let handle = std::thread::Builder::new().stack_size(EVAL_STACK).spawn(move || {
        let mut sink = |e: &TraceEvent| {
            let _ = trace_tx.send(e.to_string());
        };
        let mut m = if trace { Machine::with_trace(fuel, &mut sink) } else { Machine::new(fuel) };
        let r = m.eval(&body, &IndexEnv::new(), &ValueEnv::new()).and_then(|v| match take {
            Some(k) => m.take(&v, k).map(RunResult::Observations),
            None => Ok(RunResult::Value(v)),
        });
        (r, m.steps())
    });
    let mut trace_ok = true;
    for line in trace_rx {
        if trace_ok {
            trace_ok = writeln!(io.err, "{line}").is_ok();
        }
    }
    let (result, steps) = match handle.map(|h| h.join()) {
        Ok(Ok(r)) => r,
        _ => (Err(Halt::Internal("evaluator thread failed".into())), 0),
    };
    match result {
        Ok(r) => {
            let (value, observations) = match r {
                RunResult::Value(v) => (Some(print_value(&v)), None),
                RunResult::Observations(vs) => (None, Some(vs.iter().map(print_value).collect::<Vec<_>>())),
            };
            if io.json {
                io.json(&RunReport { ok: true, value, observations, steps, diagnostics: &[] });
            } else {
                if let Some(v) = value {
                    let _ = writeln!(io.out, "{v}");
                }
                for o in observations.into_iter().flatten() {
                    let _ = writeln!(io.out, "{o}");
                }
            }
            EXIT_OK
        }
        Err(Halt::FuelExhausted) => {
            let d = Diagnostic::error(
                &file,
                &src,
                main_span,
                "run/fuel_exhausted",
                format!("evaluation of `{main}` did not finish within {fuel} steps"),
            );
            fail(io, &[d], steps, EXIT_RUNTIME)
        }
        Err(Halt::Internal(msg)) => {
            let d = Diagnostic::error(&file, &src, main_span, "run/internal_error", msg);
            fail(io, &[d], steps, EXIT_RUNTIME)
        }
    }
}
