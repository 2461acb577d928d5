//! The index language: natural-number terms over index variables.
//!
//! Contexts and substitutions are ordered lists. A substitution is written
//! `[M1/u1, ..., Mn/un]` and is built right to left, so its last entry is the
//! most recently added one. Lookups give precedence to later entries.

use std::collections::BTreeSet;
use std::fmt;

use crate::{name, Name};

/// The only index sort.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexSort {
    Nat,
}

impl fmt::Display for IndexSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("nat")
    }
}

/// `0`, `suc M` or an index variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexTerm {
    Zero,
    Suc(Box<IndexTerm>),
    Var(Name),
}

impl IndexTerm {
    pub fn var(u: impl AsRef<str>) -> Self {
        IndexTerm::Var(name(u))
    }

    pub fn suc(m: IndexTerm) -> Self {
        IndexTerm::Suc(Box::new(m))
    }

    /// The numeral `suc^k 0`.
    pub fn nat(k: u64) -> Self {
        let mut t = IndexTerm::Zero;
        for _ in 0..k {
            t = IndexTerm::suc(t);
        }
        t
    }

    /// `Some(k)` when the term is the closed numeral `suc^k 0`.
    pub fn as_nat(&self) -> Option<u64> {
        let mut k = 0;
        let mut t = self;
        loop {
            match t {
                IndexTerm::Zero => return Some(k),
                IndexTerm::Suc(m) => {
                    k += 1;
                    t = m;
                }
                IndexTerm::Var(_) => return None,
            }
        }
    }

    pub fn is_ground(&self) -> bool {
        self.as_nat().is_some()
    }

    /// The variable at the bottom of a `suc` chain, if any.
    pub fn base_var(&self) -> Option<&Name> {
        let mut t = self;
        loop {
            match t {
                IndexTerm::Zero => return None,
                IndexTerm::Suc(m) => t = m,
                IndexTerm::Var(u) => return Some(u),
            }
        }
    }

    pub fn occurs(&self, u: &str) -> bool {
        self.base_var().is_some_and(|v| &**v == u)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        self.base_var().into_iter().cloned().collect()
    }

    /// Number of constructors, counting variables as one.
    pub fn size(&self) -> usize {
        let mut n = 1;
        let mut t = self;
        while let IndexTerm::Suc(m) = t {
            n += 1;
            t = m;
        }
        n
    }
}

impl fmt::Display for IndexTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexTerm::Zero => f.write_str("0"),
            IndexTerm::Var(u) => f.write_str(u),
            IndexTerm::Suc(m) => match **m {
                IndexTerm::Suc(_) => write!(f, "suc ({m})"),
                _ => write!(f, "suc {m}"),
            },
        }
    }
}

/// An ordered index context `u1:nat, ..., un:nat`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexCtx {
    entries: Vec<(Name, IndexSort)>,
}

impl IndexCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        IndexCtx { entries: names.into_iter().map(|u| (name(u), IndexSort::Nat)).collect() }
    }

    pub fn push(&mut self, u: Name, sort: IndexSort) {
        self.entries.push((u, sort));
    }

    pub fn extended(&self, u: Name, sort: IndexSort) -> Self {
        let mut c = self.clone();
        c.push(u, sort);
        c
    }

    pub fn lookup(&self, u: &str) -> Option<IndexSort> {
        self.entries.iter().rev().find(|(v, _)| &**v == u).map(|(_, s)| *s)
    }

    pub fn contains(&self, u: &str) -> bool {
        self.lookup(u).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Name, IndexSort)] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(u, _)| u)
    }

    /// Split `Δ1, u, Δ2` at the last occurrence of `u`.
    fn split_at(&self, u: &str) -> Option<(IndexCtx, IndexSort, IndexCtx)> {
        let i = self.entries.iter().rposition(|(v, _)| &**v == u)?;
        Some((
            IndexCtx { entries: self.entries[..i].to_vec() },
            self.entries[i].1,
            IndexCtx { entries: self.entries[i + 1..].to_vec() },
        ))
    }
}

impl fmt::Display for IndexCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("·");
        }
        for (i, (u, s)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{u}:{s}")?;
        }
        Ok(())
    }
}

/// Sorted binders of an indexed function type.
pub type SortSpine = Vec<(Name, IndexSort)>;

/// Index arguments, left to right.
pub type TermSpine = Vec<IndexTerm>;

/// An ordered substitution; each entry is `(term, variable)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexSubst {
    entries: Vec<(IndexTerm, Name)>,
}

impl IndexSubst {
    pub fn new() -> Self {
        Self::default()
    }

    /// `[M/u]`.
    pub fn single(m: IndexTerm, u: Name) -> Self {
        IndexSubst { entries: vec![(m, u)] }
    }

    /// Pair up a spine of terms with the binders they instantiate.
    pub fn from_spine(terms: &[IndexTerm], binders: &[(Name, IndexSort)]) -> Self {
        IndexSubst { entries: terms.iter().cloned().zip(binders.iter().map(|(u, _)| u.clone())).collect() }
    }

    pub fn from_entries(entries: Vec<(IndexTerm, Name)>) -> Self {
        IndexSubst { entries }
    }

    pub fn push(&mut self, m: IndexTerm, u: Name) {
        self.entries.push((m, u));
    }

    pub fn extended(&self, m: IndexTerm, u: Name) -> Self {
        let mut s = self.clone();
        s.push(m, u);
        s
    }

    pub fn lookup(&self, u: &str) -> Option<&IndexTerm> {
        self.entries.iter().rev().find(|(_, v)| &**v == u).map(|(m, _)| m)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(IndexTerm, Name)] {
        &self.entries
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(_, u)| u)
    }

    /// Drop every entry for `u`.
    pub fn without(&self, u: &str) -> Self {
        IndexSubst { entries: self.entries.iter().filter(|(_, v)| &**v != u).cloned().collect() }
    }

    /// Free variables of the range.
    pub fn range_vars(&self) -> BTreeSet<Name> {
        self.entries.iter().filter_map(|(m, _)| m.base_var().cloned()).collect()
    }

    pub fn is_ground(&self) -> bool {
        self.entries.iter().all(|(m, _)| m.is_ground())
    }
}

impl fmt::Display for IndexSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (m, u)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}/{u}")?;
        }
        f.write_str("]")
    }
}

/// Result of [`unify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyResult {
    /// Most general unifier: `Δ' ⊢ Θ : Δ`.
    Mgu {
        ctx: IndexCtx,
        subst: IndexSubst,
    },
    Clash,
}

/// Result of [`match_term`] and [`match_subst`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchResult {
    Matched { ctx: IndexCtx, subst: IndexSubst },
    NoMatch,
}

/// Names in the context are pairwise distinct.
pub fn ictx_wf(ctx: &IndexCtx) -> bool {
    let mut seen = BTreeSet::new();
    ctx.names().all(|u| seen.insert(u.clone()))
}

/// `Δ ⊢ M : U`: every variable of `M` is bound in `Δ`.
pub fn idx_check(ctx: &IndexCtx, m: &IndexTerm, sort: IndexSort) -> bool {
    let IndexSort::Nat = sort;
    match m.base_var() {
        None => true,
        Some(u) => ctx.lookup(u) == Some(IndexSort::Nat),
    }
}

/// Definitional equality of index terms, which is syntactic.
pub fn idx_eq(m: &IndexTerm, n: &IndexTerm) -> bool {
    m == n
}

/// `M[Θ]`. Variables outside the domain are left alone.
pub fn subst_apply(m: &IndexTerm, theta: &IndexSubst) -> IndexTerm {
    let mut depth = 0;
    let mut t = m;
    loop {
        match t {
            IndexTerm::Suc(inner) => {
                depth += 1;
                t = inner;
            }
            IndexTerm::Zero => return m.clone(),
            IndexTerm::Var(u) => match theta.lookup(u) {
                None => return m.clone(),
                Some(r) => {
                    let mut out = r.clone();
                    for _ in 0..depth {
                        out = IndexTerm::suc(out);
                    }
                    return out;
                }
            },
        }
    }
}

/// `Θ1[Θ2]`: apply `Θ2` to every entry of `Θ1`, keeping `Θ1`'s domain.
pub fn subst_compose(theta1: &IndexSubst, theta2: &IndexSubst) -> IndexSubst {
    IndexSubst { entries: theta1.entries.iter().map(|(m, u)| (subst_apply(m, theta2), u.clone())).collect() }
}

/// `Δ' ⊢ Θ : Δ`, entry by entry from the right.
pub fn subst_check(target: &IndexCtx, theta: &IndexSubst, source: &IndexCtx) -> bool {
    theta.len() == source.len()
        && theta
            .entries
            .iter()
            .zip(source.entries.iter())
            .all(|((m, u), (v, sort))| u == v && idx_check(target, m, *sort))
}

/// `Δ ⊢ M⃗ : 𝕌`.
pub fn spine_check(ctx: &IndexCtx, spine: &[IndexTerm], binders: &[(Name, IndexSort)]) -> bool {
    spine.len() == binders.len() && spine.iter().zip(binders).all(|(m, (_, s))| idx_check(ctx, m, *s))
}

/// `id_Δ`.
pub fn id_subst(ctx: &IndexCtx) -> IndexSubst {
    IndexSubst { entries: ctx.entries.iter().map(|(u, _)| (IndexTerm::Var(u.clone()), u.clone())).collect() }
}

/// Most general unifier of `M` and `N` over `Δ`.
///
/// Variables not bound in `Δ` are treated as rigid constants.
pub fn unify(ctx: &IndexCtx, m: &IndexTerm, n: &IndexTerm) -> UnifyResult {
    match (m, n) {
        (IndexTerm::Zero, IndexTerm::Zero) => UnifyResult::Mgu { ctx: ctx.clone(), subst: id_subst(ctx) },
        (IndexTerm::Suc(a), IndexTerm::Suc(b)) => unify(ctx, a, b),
        (IndexTerm::Var(u), IndexTerm::Var(v)) if u == v => UnifyResult::Mgu { ctx: ctx.clone(), subst: id_subst(ctx) },
        (IndexTerm::Var(u), other) | (other, IndexTerm::Var(u)) => {
            if ctx.contains(u) && !other.occurs(u) {
                eliminate(ctx, u, other)
            } else if let IndexTerm::Var(v) = other {
                // `u` is rigid; the other side may still be flexible.
                if ctx.contains(v) {
                    eliminate(ctx, v, &IndexTerm::Var(u.clone()))
                } else {
                    UnifyResult::Clash
                }
            } else {
                UnifyResult::Clash
            }
        }
        (IndexTerm::Zero, IndexTerm::Suc(_)) | (IndexTerm::Suc(_), IndexTerm::Zero) => UnifyResult::Clash,
    }
}

fn eliminate(ctx: &IndexCtx, u: &str, m: &IndexTerm) -> UnifyResult {
    let Some((before, _, after)) = ctx.split_at(u) else {
        return UnifyResult::Clash;
    };
    let mut subst = id_subst(&before);
    subst.push(m.clone(), name(u));
    subst.entries.extend(id_subst(&after).entries);
    let mut rest = before;
    rest.entries.extend(after.entries);
    UnifyResult::Mgu { ctx: rest, subst }
}

/// One-sided matching: find `ρ` with `M[ρ] = N`, instantiating only `Δ`.
pub fn match_term(ctx: &IndexCtx, m: &IndexTerm, n: &IndexTerm) -> MatchResult {
    match (m, n) {
        (IndexTerm::Zero, IndexTerm::Zero) => MatchResult::Matched { ctx: ctx.clone(), subst: id_subst(ctx) },
        (IndexTerm::Suc(a), IndexTerm::Suc(b)) => match_term(ctx, a, b),
        (IndexTerm::Var(u), _) => match ctx.split_at(u) {
            Some((before, _, after)) => {
                let mut subst = id_subst(&before);
                subst.push(n.clone(), u.clone());
                subst.entries.extend(id_subst(&after).entries);
                let mut rest = before;
                rest.entries.extend(after.entries);
                MatchResult::Matched { ctx: rest, subst }
            }
            None if m == n => MatchResult::Matched { ctx: ctx.clone(), subst: id_subst(ctx) },
            None => MatchResult::NoMatch,
        },
        _ => MatchResult::NoMatch,
    }
}

/// Match `Θ1` (over `Δ`) against `Θ2` entry by entry; both must have the
/// same domain in the same order.
pub fn match_subst(ctx: &IndexCtx, theta1: &IndexSubst, theta2: &IndexSubst) -> MatchResult {
    if theta1.len() != theta2.len() {
        return MatchResult::NoMatch;
    }
    let mut cur_ctx = ctx.clone();
    let mut rho = id_subst(ctx);
    for ((m, u), (n, v)) in theta1.entries.iter().zip(&theta2.entries) {
        if u != v {
            return MatchResult::NoMatch;
        }
        match match_term(&cur_ctx, &subst_apply(m, &rho), n) {
            MatchResult::Matched { ctx, subst } => {
                rho = subst_compose(&rho, &subst);
                cur_ctx = ctx;
            }
            MatchResult::NoMatch => return MatchResult::NoMatch,
        }
    }
    MatchResult::Matched { ctx: cur_ctx, subst: rho }
}

/// Two unifiers are equivalent when a bijective renaming of the first
/// target context onto the second carries one substitution to the other.
/// Both substitutions must list the same domain in the same order.
pub fn unifier_equiv(a: (&IndexCtx, &IndexSubst), b: (&IndexCtx, &IndexSubst)) -> bool {
    let (ctx_a, sub_a) = a;
    let (ctx_b, sub_b) = b;
    if ctx_a.len() != ctx_b.len() || sub_a.len() != sub_b.len() {
        return false;
    }
    let mut fwd: Vec<(Name, Name)> = Vec::new();
    fn walk(m: &IndexTerm, n: &IndexTerm, ca: &IndexCtx, cb: &IndexCtx, fwd: &mut Vec<(Name, Name)>) -> bool {
        match (m, n) {
            (IndexTerm::Zero, IndexTerm::Zero) => true,
            (IndexTerm::Suc(x), IndexTerm::Suc(y)) => walk(x, y, ca, cb, fwd),
            (IndexTerm::Var(u), IndexTerm::Var(v)) => match (ca.contains(u), cb.contains(v)) {
                // Variables outside both target contexts are rigid.
                (false, false) => u == v,
                (true, true) => match fwd.iter().find(|(x, y)| x == u || y == v) {
                    Some((x, y)) => x == u && y == v,
                    None => {
                        fwd.push((u.clone(), v.clone()));
                        true
                    }
                },
                _ => false,
            },
            _ => false,
        }
    }
    sub_a.entries.iter().zip(&sub_b.entries).all(|((m, u), (n, v))| u == v && walk(m, n, ctx_a, ctx_b, &mut fwd))
}
