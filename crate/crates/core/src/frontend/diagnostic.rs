use serde::Serialize;

use super::lexer::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl SourceSpan {
    pub fn from_span(src: &str, span: Span) -> Self {
        let start = floor_char_boundary(src, span.start.min(src.len()));
        let end = floor_char_boundary(src, span.end.min(src.len())).max(start);
        let before = &src[..start];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let col = src[line_start..start].chars().count() + 1;
        SourceSpan { start, end, line, col }
    }
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub file: String,
    pub span: SourceSpan,
    pub code: String,
    pub message: String,
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found: Option<String>,
}

impl Diagnostic {
    pub fn error(file: &str, src: &str, span: Span, code: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            file: file.to_string(),
            span: SourceSpan::from_span(src, span),
            code: code.into(),
            message: message.into(),
            severity: Severity::Error,
            expected: None,
            found: None,
        }
    }

    pub fn with_expected_found(mut self, expected: Option<String>, found: Option<String>) -> Self {
        self.expected = expected;
        self.found = found;
        self
    }

    /// `file:line:col: error[code]: message`, followed by the offending
    /// source line with a caret underline.
    pub fn render(&self, src: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut out =
            format!("{}:{}:{}: {sev}[{}]: {}\n", self.file, self.span.line, self.span.col, self.code, self.message);
        if let Some(e) = &self.expected {
            out.push_str(&format!("  expected: {e}\n"));
        }
        if let Some(f) = &self.found {
            out.push_str(&format!("  found:    {f}\n"));
        }
        if let Some(line) = src.lines().nth(self.span.line - 1) {
            let width = {
                let rest = &src[self.span.start..];
                let on_line = rest.find('\n').unwrap_or(rest.len());
                (self.span.end - self.span.start).clamp(1, on_line.max(1))
            };
            out.push_str(&format!("  | {line}\n"));
            out.push_str(&format!("  | {}{}\n", " ".repeat(self.span.col - 1), "^".repeat(width)));
        }
        out
    }
}

/// Every diagnostic code the tool can emit, with a short description.
pub const CODES: &[(&str, &str)] = &[
    ("io", "the input file could not be read"),
    ("syntax", "the source does not parse"),
    ("duplicate_decl", "a declaration name is used twice"),
    ("scope", "a name is not bound by an earlier declaration or an enclosing binder"),
    ("size_limit", "inlining earlier declarations exceeds the AST size limit"),
    ("kind/not_star", "a type of kind * was required"),
    ("kind/head_not_pi", "a type is applied to an index but its kind has no Pi"),
    ("kind/unbound_tvar", "a type variable is not in scope"),
    ("kind/lambda_needs_pi", "an index abstraction was checked against kind *"),
    ("kind/strat_kind_shape", "a stratified type needs a kind of the form Pi u:nat. K"),
    ("kind/sort_mismatch", "an index term is ill-sorted or uses an unbound index variable"),
    ("kind/kind_mismatch", "an inferred kind differs from the expected one"),
    ("type/mismatch", "the inferred type differs from the expected one"),
    ("type/cannot_infer", "the term needs a type annotation"),
    ("type/not_function", "a function type was required"),
    ("type/not_product", "a product type was required"),
    ("type/not_sum", "a sum type was required"),
    ("type/not_sigma", "a dependent pair type was required"),
    ("type/not_equality", "an equation type was required"),
    ("type/not_mu", "an inductive type was required"),
    ("type/not_nu", "a coinductive type was required"),
    ("type/not_strat", "a stratified type at a known index was required"),
    ("type/unifier_mismatch", "the unifier written on eqelim is not a most general unifier"),
    ("type/expected_clash_but_unifiable", "eqabort was used on an equation that can hold"),
    ("type/index_error", "an index term or spine is ill-formed"),
    ("type/scope_error", "a term variable is not in scope"),
    ("type/rec_shape", "rec/corec need an indexed function type over the fixed point"),
    ("type/spine_shape", "the number of index arguments does not match the function type"),
    ("type/ill_kinded", "a type annotation is not well kinded"),
    ("run/unknown_main", "the requested entry point is not a well-typed definition"),
    ("run/not_stream", "--take was given for a definition that is not a stream of pairs"),
    ("run/fuel_exhausted", "evaluation ran out of its step budget"),
    ("run/internal_error", "evaluation reached a state the type system rules out"),
];

pub fn is_documented(code: &str) -> bool {
    CODES.iter().any(|(c, _)| *c == code)
}
