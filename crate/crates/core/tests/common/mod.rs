#![allow(dead_code)]

pub mod fuzz;
pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use tores::frontend::{check_source, ElabOptions, Elaborated};
use tores::syntax::{Term, Type};

pub const CORPUS: &[&str] = &["vectors.tores", "streams.tores", "falsehood.tores", "equality.tores"];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

pub fn corpus_source(file: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(file)).unwrap_or_else(|e| panic!("reading {file}: {e}"))
}

/// Parse and elaborate a corpus file, panicking on any diagnostic.
pub fn load(file: &str) -> Elaborated {
    load_source(file, &corpus_source(file))
}

pub fn load_source(file: &str, src: &str) -> Elaborated {
    let checked = check_source(file, src, &ElabOptions::default());
    assert!(checked.is_ok(), "{file} has diagnostics: {:#?}", checked.diagnostics);
    checked.elaborated
}

/// A definition of the corpus as a closed, annotated term.
pub fn closed_def(e: &Elaborated, name: &str) -> (Term, Type) {
    let (ty, body) = e.def(name).unwrap_or_else(|| panic!("no definition `{name}`"));
    (Term::annot(body.clone(), ty.clone()), ty.clone())
}

pub fn type_decl(e: &Elaborated, name: &str) -> Type {
    e.type_decl(name).unwrap_or_else(|| panic!("no type `{name}`")).1.clone()
}
