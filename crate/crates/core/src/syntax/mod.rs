//! Abstract syntax of kinds, types and terms, plus the type-variable and
//! typing contexts.

mod term;
mod ty;

pub use term::{FnSig, Fun, FunForm, Side, Term, Unifier};
pub use ty::{StratType, Type};

use std::fmt;
use std::sync::Arc;

use crate::index::{IndexSort, IndexSubst};
use crate::Name;

/// Location of a node as the list of child positions leading to it.
///
/// Children are numbered left to right in source order: `Prod`, `Sum` and
/// `Pair` have 0 and 1; `Arrow` has domain 0 and codomain 1; every binder
/// form has its body at 0; `Rec` and `ind` have the zero branch at 0 and the
/// successor branch at 1; `App` has the function at 0 and the argument at 1;
/// `Split`, `Unpack` and `EqElim` have the scrutinee at 0 and the body at 1;
/// `Case` has the scrutinee at 0 and branches at 1 and 2; an annotation has
/// the term at 0 and the type at 1.
pub type AstPath = Vec<u32>;

/// `*` or `Πu:U. K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Star,
    Pi(Name, IndexSort, Arc<Kind>),
}

impl Kind {
    pub fn pi(u: impl AsRef<str>, body: Kind) -> Kind {
        Kind::Pi(crate::name(u), IndexSort::Nat, Arc::new(body))
    }

    /// `Πu1:nat. ... Πun:nat. *` for the given binder names.
    pub fn arity_kind<S: AsRef<str>>(binders: &[S]) -> Kind {
        binders.iter().rev().fold(Kind::Star, |k, u| Kind::pi(u, k))
    }

    /// Number of leading Π binders.
    pub fn arity(&self) -> usize {
        match self {
            Kind::Star => 0,
            Kind::Pi(_, _, k) => 1 + k.arity(),
        }
    }

    /// Kinds are equal up to the names of their binders.
    pub fn alpha_eq(&self, other: &Kind) -> bool {
        match (self, other) {
            (Kind::Star, Kind::Star) => true,
            (Kind::Pi(_, s, k), Kind::Pi(_, t, l)) => s == t && k.alpha_eq(l),
            _ => false,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Star => f.write_str("*"),
            Kind::Pi(u, s, k) => write!(f, "Pi {u}:{s}. {k}"),
        }
    }
}

/// `Ξ`: type variables with their kinds. Later entries shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeVarCtx {
    entries: Vec<(Name, Kind)>,
}

impl TypeVarCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: Name, kind: Kind) {
        self.entries.push((x, kind));
    }

    pub fn extended(&self, x: Name, kind: Kind) -> Self {
        let mut c = self.clone();
        c.push(x, kind);
        c
    }

    pub fn lookup(&self, x: &str) -> Option<&Kind> {
        self.entries.iter().rev().find(|(y, _)| &**y == x).map(|(_, k)| k)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.lookup(x).is_some()
    }

    pub fn entries(&self) -> &[(Name, Kind)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Ξ[Θ]`. Kinds over `nat` mention no index terms, so this is the identity.
    pub fn apply_isubst(&self, _theta: &IndexSubst) -> Self {
        self.clone()
    }
}

/// `Γ`: term variables with their types.
///
/// Binding a name that is already present replaces the older entry, so the
/// context never holds duplicates and its order matches the visible
/// bindings of a runtime environment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingCtx {
    entries: Vec<(Name, Type)>,
}

impl TypingCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: Name, ty: Type) {
        self.entries.retain(|(y, _)| *y != x);
        self.entries.push((x, ty));
    }

    pub fn extended(&self, x: Name, ty: Type) -> Self {
        let mut c = self.clone();
        c.push(x, ty);
        c
    }

    /// Build a context from bindings, oldest first.
    pub fn from_entries(entries: Vec<(Name, Type)>) -> Self {
        let mut c = TypingCtx::new();
        for (x, t) in entries {
            c.push(x, t);
        }
        c
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.entries.iter().rev().find(|(y, _)| &**y == x).map(|(_, t)| t)
    }

    pub fn entries(&self) -> &[(Name, Type)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Γ[Θ]`.
    pub fn apply_isubst(&self, theta: &IndexSubst) -> Self {
        TypingCtx { entries: self.entries.iter().map(|(x, t)| (x.clone(), t.apply_isubst(theta))).collect() }
    }

    /// Substitute the closed type `s` for the type variable `x` everywhere.
    pub fn subst_tvar(&self, x: &str, s: &Type) -> Self {
        TypingCtx { entries: self.entries.iter().map(|(y, t)| (y.clone(), t.subst_tvar(x, s))).collect() }
    }
}
