//! `tores`: a checker and evaluator for a small indexed type language.
//!
//! Types are indexed by natural numbers and may be defined inductively
//! (`mu`), coinductively (`nu`) or by primitive recursion on an index
//! (`Rec`). Programs over them are written with Mendler-style `rec` and
//! `corec`, stratified `ind`, and equality elimination driven by
//! first-order unification on index terms.
//!
//! The crate is layered bottom-up:
//!
//! * [`index`]: the index language, substitutions, unification and matching.
//! * [`syntax`]: kinds, types, terms and contexts.
//! * [`kinding`] and [`typing`]: bidirectional checkers.
//! * [`machine`]: an environment-based big-step evaluator with fuel, and
//!   value typing.
//! * [`frontend`]: concrete syntax, pretty printing, elaboration and the CLI.

pub mod frontend;
pub mod index;
pub mod kinding;
pub mod machine;
pub mod syntax;
pub mod typing;

use std::sync::Arc;

/// Identifier used for index variables, type variables and term variables.
pub type Name = Arc<str>;

/// Build a [`Name`] from anything string-like.
pub fn name(s: impl AsRef<str>) -> Name {
    Arc::from(s.as_ref())
}

/// Pick a name based on `base` for which `taken` returns false.
///
/// Trailing digits of `base` are replaced by a counter, so repeated
/// freshening of `u1` yields `u2`, `u3`, ... rather than `u11`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    if !taken(base) {
        return name(base);
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    let mut i = 1u64;
    loop {
        let candidate = format!("{stem}{i}");
        if !taken(&candidate) {
            return name(candidate);
        }
        i += 1;
    }
}
