use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::Kind;
use crate::index::{subst_apply, IndexSort, IndexSubst, IndexTerm, SortSpine};
use crate::{fresh_name, name, Name};

/// Types, including type-level functions over indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Unit,
    Prod(Arc<Type>, Arc<Type>),
    Sum(Arc<Type>, Arc<Type>),
    /// `(u1:nat, ..., un:nat | S) -> T`.
    Arrow {
        binders: SortSpine,
        dom: Arc<Type>,
        cod: Arc<Type>,
    },
    Sigma {
        var: Name,
        sort: IndexSort,
        body: Arc<Type>,
    },
    Eq(IndexTerm, IndexTerm),
    App(Arc<Type>, IndexTerm),
    Lam(Name, Arc<Type>),
    Var(Name),
    Mu {
        var: Name,
        kind: Kind,
        body: Arc<Type>,
    },
    Nu {
        var: Name,
        kind: Kind,
        body: Arc<Type>,
    },
    Rec(Arc<StratType>),
}

/// `Rec K (0 => zero | suc ivar, tvar => suc)`: a type defined by recursion
/// on its first index. `tvar` stands for the type at the predecessor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StratType {
    pub kind: Kind,
    pub zero: Type,
    pub ivar: Name,
    pub tvar: Name,
    pub suc: Type,
}

impl Type {
    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Arc::new(a), Arc::new(b))
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Arc::new(a), Arc::new(b))
    }

    /// Indexed function type over `nat` binders.
    pub fn arrow<S: AsRef<str>>(binders: &[S], dom: Type, cod: Type) -> Type {
        Type::Arrow {
            binders: binders.iter().map(|u| (name(u), IndexSort::Nat)).collect(),
            dom: Arc::new(dom),
            cod: Arc::new(cod),
        }
    }

    /// Plain function type `S -> T`.
    pub fn fun(dom: Type, cod: Type) -> Type {
        Type::arrow::<&str>(&[], dom, cod)
    }

    pub fn sigma(u: impl AsRef<str>, body: Type) -> Type {
        Type::Sigma { var: name(u), sort: IndexSort::Nat, body: Arc::new(body) }
    }

    pub fn eq(m: IndexTerm, n: IndexTerm) -> Type {
        Type::Eq(m, n)
    }

    pub fn app(head: Type, m: IndexTerm) -> Type {
        Type::App(Arc::new(head), m)
    }

    /// `T M1 ... Mn`.
    pub fn apps(head: Type, args: impl IntoIterator<Item = IndexTerm>) -> Type {
        args.into_iter().fold(head, Type::app)
    }

    pub fn lam(u: impl AsRef<str>, body: Type) -> Type {
        Type::Lam(name(u), Arc::new(body))
    }

    pub fn var(x: impl AsRef<str>) -> Type {
        Type::Var(name(x))
    }

    pub fn mu(x: impl AsRef<str>, kind: Kind, body: Type) -> Type {
        Type::Mu { var: name(x), kind, body: Arc::new(body) }
    }

    pub fn nu(x: impl AsRef<str>, kind: Kind, body: Type) -> Type {
        Type::Nu { var: name(x), kind, body: Arc::new(body) }
    }

    pub fn strat(kind: Kind, zero: Type, ivar: impl AsRef<str>, tvar: impl AsRef<str>, suc: Type) -> Type {
        Type::Rec(Arc::new(StratType { kind, zero, ivar: name(ivar), tvar: name(tvar), suc }))
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Type::Unit | Type::Var(_) => 1,
            Type::Eq(m, n) => 1 + m.size() + n.size(),
            Type::Prod(a, b) | Type::Sum(a, b) => 1 + a.size() + b.size(),
            Type::Arrow { binders, dom, cod } => 1 + binders.len() + dom.size() + cod.size(),
            Type::Sigma { body, .. } | Type::Lam(_, body) => 1 + body.size(),
            Type::App(h, m) => 1 + h.size() + m.size(),
            Type::Mu { body, .. } | Type::Nu { body, .. } => 1 + body.size(),
            Type::Rec(st) => 1 + st.zero.size() + st.suc.size(),
        }
    }

    pub fn free_ivars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_ivars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_ivars(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let term = |m: &IndexTerm, bound: &Vec<Name>, out: &mut BTreeSet<Name>| {
            if let Some(u) = m.base_var() {
                if !bound.contains(u) {
                    out.insert(u.clone());
                }
            }
        };
        match self {
            Type::Unit | Type::Var(_) => {}
            Type::Eq(m, n) => {
                term(m, bound, out);
                term(n, bound, out);
            }
            Type::Prod(a, b) | Type::Sum(a, b) => {
                a.collect_ivars(bound, out);
                b.collect_ivars(bound, out);
            }
            Type::Arrow { binders, dom, cod } => {
                let n = bound.len();
                bound.extend(binders.iter().map(|(u, _)| u.clone()));
                dom.collect_ivars(bound, out);
                cod.collect_ivars(bound, out);
                bound.truncate(n);
            }
            Type::Sigma { var, body, .. } | Type::Lam(var, body) => {
                bound.push(var.clone());
                body.collect_ivars(bound, out);
                bound.pop();
            }
            Type::App(h, m) => {
                h.collect_ivars(bound, out);
                term(m, bound, out);
            }
            Type::Mu { body, .. } | Type::Nu { body, .. } => body.collect_ivars(bound, out),
            Type::Rec(st) => {
                st.zero.collect_ivars(bound, out);
                bound.push(st.ivar.clone());
                st.suc.collect_ivars(bound, out);
                bound.pop();
            }
        }
    }

    pub fn free_tvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_tvars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_tvars(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Type::Unit | Type::Eq(..) => {}
            Type::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Type::Prod(a, b) | Type::Sum(a, b) => {
                a.collect_tvars(bound, out);
                b.collect_tvars(bound, out);
            }
            Type::Arrow { dom, cod, .. } => {
                dom.collect_tvars(bound, out);
                cod.collect_tvars(bound, out);
            }
            Type::Sigma { body, .. } | Type::Lam(_, body) => body.collect_tvars(bound, out),
            Type::App(h, _) => h.collect_tvars(bound, out),
            Type::Mu { var, body, .. } | Type::Nu { var, body, .. } => {
                bound.push(var.clone());
                body.collect_tvars(bound, out);
                bound.pop();
            }
            Type::Rec(st) => {
                st.zero.collect_tvars(bound, out);
                bound.push(st.tvar.clone());
                st.suc.collect_tvars(bound, out);
                bound.pop();
            }
        }
    }

    /// `T[Θ]`, avoiding capture by renaming binders.
    pub fn apply_isubst(&self, theta: &IndexSubst) -> Type {
        if theta.is_empty() {
            return self.clone();
        }
        match self {
            Type::Unit | Type::Var(_) => self.clone(),
            Type::Eq(m, n) => Type::Eq(subst_apply(m, theta), subst_apply(n, theta)),
            Type::Prod(a, b) => Type::prod(a.apply_isubst(theta), b.apply_isubst(theta)),
            Type::Sum(a, b) => Type::sum(a.apply_isubst(theta), b.apply_isubst(theta)),
            Type::Arrow { binders, dom, cod } => {
                let mut inner = theta.clone();
                let mut new_binders = Vec::with_capacity(binders.len());
                for (u, s) in binders {
                    let (u2, next) = under_ibinder(u, &inner, &[dom, cod]);
                    inner = next;
                    new_binders.push((u2, *s));
                }
                Type::Arrow {
                    binders: new_binders,
                    dom: Arc::new(dom.apply_isubst(&inner)),
                    cod: Arc::new(cod.apply_isubst(&inner)),
                }
            }
            Type::Sigma { var, sort, body } => {
                let (v2, inner) = under_ibinder(var, theta, &[body]);
                Type::Sigma { var: v2, sort: *sort, body: Arc::new(body.apply_isubst(&inner)) }
            }
            Type::Lam(u, body) => {
                let (u2, inner) = under_ibinder(u, theta, &[body]);
                Type::Lam(u2, Arc::new(body.apply_isubst(&inner)))
            }
            Type::App(h, m) => Type::App(Arc::new(h.apply_isubst(theta)), subst_apply(m, theta)),
            Type::Mu { var, kind, body } => {
                Type::Mu { var: var.clone(), kind: kind.clone(), body: Arc::new(body.apply_isubst(theta)) }
            }
            Type::Nu { var, kind, body } => {
                Type::Nu { var: var.clone(), kind: kind.clone(), body: Arc::new(body.apply_isubst(theta)) }
            }
            Type::Rec(st) => {
                let (u2, inner) = under_ibinder(&st.ivar, theta, &[&st.suc]);
                Type::Rec(Arc::new(StratType {
                    kind: st.kind.clone(),
                    zero: st.zero.apply_isubst(theta),
                    ivar: u2,
                    tvar: st.tvar.clone(),
                    suc: st.suc.apply_isubst(&inner),
                }))
            }
        }
    }

    /// `T[S/X]`, avoiding capture of the free variables of `S`.
    pub fn subst_tvar(&self, x: &str, s: &Type) -> Type {
        let ctx = TvSubst { x, s, s_tvars: s.free_tvars(), s_ivars: s.free_ivars() };
        ctx.go(self)
    }

    /// Decompose `H M1 ... Mn` into `(H, [M1, ..., Mn])`.
    pub fn spine_head_form(&self) -> (&Type, Vec<IndexTerm>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::App(h, m) = t {
            args.push(m.clone());
            t = h;
        }
        args.reverse();
        (t, args)
    }

    /// Apply `self` to `args`, reducing leading type-level lambdas.
    pub fn instantiate(&self, args: &[IndexTerm]) -> Type {
        let mut cur = self.clone();
        let mut rest = args;
        while let (Type::Lam(u, body), Some((m, tail))) = (&cur, rest.split_first()) {
            cur = body.apply_isubst(&IndexSubst::single(m.clone(), u.clone()));
            rest = tail;
        }
        Type::apps(cur, rest.iter().cloned())
    }

    /// Equality up to renaming of bound index and type variables.
    pub fn alpha_eq(&self, other: &Type) -> bool {
        Alpha::default().types(self, other)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::print_type(self))
    }
}

/// Prepare to substitute under an index binder `u`: drop entries shadowed by
/// `u` and rename `u` if the range would otherwise be captured.
fn under_ibinder(u: &Name, theta: &IndexSubst, bodies: &[&Type]) -> (Name, IndexSubst) {
    let inner = theta.without(u);
    let range = inner.range_vars();
    if !range.contains(u) {
        return (u.clone(), inner);
    }
    let mut avoid = range;
    avoid.extend(inner.domain().cloned());
    for b in bodies {
        avoid.extend(b.free_ivars());
    }
    let fresh = fresh_name(u, |c| avoid.contains(c));
    let renamed = inner.extended(IndexTerm::Var(fresh.clone()), u.clone());
    (fresh, renamed)
}

struct TvSubst<'a> {
    x: &'a str,
    s: &'a Type,
    s_tvars: BTreeSet<Name>,
    s_ivars: BTreeSet<Name>,
}

impl TvSubst<'_> {
    fn fresh_ivar(&self, u: &Name, bodies: &[&Type]) -> Option<Name> {
        if !self.s_ivars.contains(u) {
            return None;
        }
        let mut avoid = self.s_ivars.clone();
        for b in bodies {
            avoid.extend(b.free_ivars());
        }
        Some(fresh_name(u, |c| avoid.contains(c)))
    }

    fn fresh_tvar(&self, y: &Name, body: &Type) -> Option<Name> {
        if !self.s_tvars.contains(y) {
            return None;
        }
        let mut avoid = self.s_tvars.clone();
        avoid.extend(body.free_tvars());
        Some(fresh_name(y, |c| avoid.contains(c) || c == self.x))
    }

    fn go(&self, t: &Type) -> Type {
        match t {
            Type::Var(y) if &**y == self.x => self.s.clone(),
            Type::Var(_) | Type::Unit | Type::Eq(..) => t.clone(),
            Type::Prod(a, b) => Type::prod(self.go(a), self.go(b)),
            Type::Sum(a, b) => Type::sum(self.go(a), self.go(b)),
            Type::App(h, m) => Type::App(Arc::new(self.go(h)), m.clone()),
            Type::Arrow { binders, dom, cod } => {
                let mut renaming = IndexSubst::new();
                let mut new_binders = Vec::with_capacity(binders.len());
                for (u, s) in binders {
                    match self.fresh_ivar(u, &[dom, cod]) {
                        Some(f) => {
                            renaming.push(IndexTerm::Var(f.clone()), u.clone());
                            new_binders.push((f, *s));
                        }
                        None => new_binders.push((u.clone(), *s)),
                    }
                }
                Type::Arrow {
                    binders: new_binders,
                    dom: Arc::new(self.go(&dom.apply_isubst(&renaming))),
                    cod: Arc::new(self.go(&cod.apply_isubst(&renaming))),
                }
            }
            Type::Sigma { var, sort, body } => {
                let (v, b) = self.rename_ibinder(var, body);
                Type::Sigma { var: v, sort: *sort, body: Arc::new(self.go(&b)) }
            }
            Type::Lam(u, body) => {
                let (v, b) = self.rename_ibinder(u, body);
                Type::Lam(v, Arc::new(self.go(&b)))
            }
            Type::Mu { var, kind, body } => {
                let (v, b) = self.under_tbinder(var, body);
                Type::Mu { var: v, kind: kind.clone(), body: Arc::new(b) }
            }
            Type::Nu { var, kind, body } => {
                let (v, b) = self.under_tbinder(var, body);
                Type::Nu { var: v, kind: kind.clone(), body: Arc::new(b) }
            }
            Type::Rec(st) => {
                let zero = self.go(&st.zero);
                let (ivar, suc) = self.rename_ibinder(&st.ivar, &st.suc);
                let (tvar, suc) = self.under_tbinder(&st.tvar, &suc);
                Type::Rec(Arc::new(StratType { kind: st.kind.clone(), zero, ivar, tvar, suc }))
            }
        }
    }

    fn rename_ibinder(&self, u: &Name, body: &Type) -> (Name, Type) {
        match self.fresh_ivar(u, &[body]) {
            Some(f) => {
                let b = body.apply_isubst(&IndexSubst::single(IndexTerm::Var(f.clone()), u.clone()));
                (f, b)
            }
            None => (u.clone(), body.clone()),
        }
    }

    /// Substitute under a type binder `y`, stopping if it shadows `x`.
    fn under_tbinder(&self, y: &Name, body: &Type) -> (Name, Type) {
        if &**y == self.x {
            return (y.clone(), body.clone());
        }
        match self.fresh_tvar(y, body) {
            Some(f) => {
                let renamed = body.subst_tvar(y, &Type::Var(f.clone()));
                (f, self.go(&renamed))
            }
            None => (y.clone(), self.go(body)),
        }
    }
}

/// Paired binder stacks for α-equivalence.
#[derive(Default)]
pub(crate) struct Alpha {
    il: Vec<Name>,
    ir: Vec<Name>,
    tl: Vec<Name>,
    tr: Vec<Name>,
}

pub(crate) fn var_match(l: &[Name], r: &[Name], a: &str, b: &str) -> bool {
    let i = l.iter().rposition(|n| &**n == a);
    let j = r.iter().rposition(|n| &**n == b);
    match (i, j) {
        (Some(i), Some(j)) => i == j,
        (None, None) => a == b,
        _ => false,
    }
}

impl Alpha {
    pub(crate) fn push_i(&mut self, a: &Name, b: &Name) {
        self.il.push(a.clone());
        self.ir.push(b.clone());
    }

    pub(crate) fn pop_i(&mut self, n: usize) {
        let k = self.il.len() - n;
        self.il.truncate(k);
        self.ir.truncate(k);
    }

    /// Replace the index scope, returning the old one.
    pub(crate) fn swap_i(&mut self, l: Vec<Name>, r: Vec<Name>) -> (Vec<Name>, Vec<Name>) {
        (std::mem::replace(&mut self.il, l), std::mem::replace(&mut self.ir, r))
    }

    pub(crate) fn index(&self, m: &IndexTerm, n: &IndexTerm) -> bool {
        match (m, n) {
            (IndexTerm::Zero, IndexTerm::Zero) => true,
            (IndexTerm::Suc(a), IndexTerm::Suc(b)) => self.index(a, b),
            (IndexTerm::Var(a), IndexTerm::Var(b)) => var_match(&self.il, &self.ir, a, b),
            _ => false,
        }
    }

    pub(crate) fn types(&mut self, a: &Type, b: &Type) -> bool {
        match (a, b) {
            (Type::Unit, Type::Unit) => true,
            (Type::Prod(a1, a2), Type::Prod(b1, b2)) | (Type::Sum(a1, a2), Type::Sum(b1, b2)) => {
                self.types(a1, b1) && self.types(a2, b2)
            }
            (Type::Arrow { binders: ba, dom: da, cod: ca }, Type::Arrow { binders: bb, dom: db, cod: cb }) => {
                if ba.len() != bb.len() || ba.iter().zip(bb).any(|((_, s), (_, t))| s != t) {
                    return false;
                }
                for ((u, _), (v, _)) in ba.iter().zip(bb) {
                    self.push_i(u, v);
                }
                let ok = self.types(da, db) && self.types(ca, cb);
                self.pop_i(ba.len());
                ok
            }
            (Type::Sigma { var: u, sort: s, body: ba }, Type::Sigma { var: v, sort: t, body: bb }) => {
                if s != t {
                    return false;
                }
                self.push_i(u, v);
                let ok = self.types(ba, bb);
                self.pop_i(1);
                ok
            }
            (Type::Lam(u, ba), Type::Lam(v, bb)) => {
                self.push_i(u, v);
                let ok = self.types(ba, bb);
                self.pop_i(1);
                ok
            }
            (Type::Eq(m1, n1), Type::Eq(m2, n2)) => self.index(m1, m2) && self.index(n1, n2),
            (Type::App(h1, m1), Type::App(h2, m2)) => self.index(m1, m2) && self.types(h1, h2),
            (Type::Var(x), Type::Var(y)) => var_match(&self.tl, &self.tr, x, y),
            (Type::Mu { var: x, kind: k, body: ba }, Type::Mu { var: y, kind: l, body: bb })
            | (Type::Nu { var: x, kind: k, body: ba }, Type::Nu { var: y, kind: l, body: bb }) => {
                if !k.alpha_eq(l) {
                    return false;
                }
                self.tl.push(x.clone());
                self.tr.push(y.clone());
                let ok = self.types(ba, bb);
                self.tl.pop();
                self.tr.pop();
                ok
            }
            (Type::Rec(s), Type::Rec(t)) => {
                if !s.kind.alpha_eq(&t.kind) || !self.types(&s.zero, &t.zero) {
                    return false;
                }
                self.push_i(&s.ivar, &t.ivar);
                self.tl.push(s.tvar.clone());
                self.tr.push(t.tvar.clone());
                let ok = self.types(&s.suc, &t.suc);
                self.tl.pop();
                self.tr.pop();
                self.pop_i(1);
                ok
            }
            _ => false,
        }
    }
}
