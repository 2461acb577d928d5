//! Surface syntax: lexer, parser, pretty-printer, the declaration driver and
//! the command-line interface.

pub mod cli;
mod diagnostic;
mod elab;
mod lexer;
mod parser;
mod printer;

pub use diagnostic::{is_documented, Diagnostic, Severity, SourceSpan, CODES};
pub use elab::{elaborate, ElabOptions, Elaborated, Item, DEFAULT_SIZE_LIMIT};
pub use lexer::{is_keyword, Span, KEYWORDS};
pub use parser::{
    parse_kind_str, parse_program, parse_term_str, parse_type_str, Decl, DeclBody, ParseError, Program, SpanTree,
};
pub use printer::{print_decl, print_index, print_kind, print_program, print_term, print_type, print_value};

/// Result of parsing and checking one source file.
#[derive(Clone, Debug)]
pub struct Checked {
    /// `None` when the file does not parse.
    pub program: Option<Program>,
    pub elaborated: Elaborated,
    pub diagnostics: Vec<Diagnostic>,
}

impl Checked {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn syntax_diagnostic(file: &str, src: &str, e: &ParseError) -> Diagnostic {
    Diagnostic::error(file, src, e.span, "syntax", e.message.clone())
        .with_expected_found(e.expected.clone(), e.found.clone())
}

/// Parse and elaborate `src`.
pub fn check_source(file: &str, src: &str, opts: &ElabOptions) -> Checked {
    match parse_program(src) {
        Err(e) => Checked {
            program: None,
            elaborated: Elaborated::default(),
            diagnostics: vec![syntax_diagnostic(file, src, &e)],
        },
        Ok(p) => {
            let (elaborated, diagnostics) = elaborate(&p, file, src, opts);
            Checked { program: Some(p), elaborated, diagnostics }
        }
    }
}
