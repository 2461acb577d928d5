use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::ty::{var_match, Alpha};
use super::{Type, TypeVarCtx, TypingCtx};
use crate::index::{subst_apply, IndexCtx, IndexSubst, IndexTerm, TermSpine};
use crate::{name, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// The `(Δ' | Θ)` annotation of an equality elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unifier {
    pub ctx: IndexCtx,
    pub subst: IndexSubst,
}

/// Terms. Function forms live behind [`Fun`] so closures can share them.
#[derive(Clone, Debug)]
pub enum Term {
    Var(Name),
    Unit,
    Fun(Arc<Fun>),
    /// `t [M1, ..., Mn] s`.
    App(Arc<Term>, TermSpine, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Split {
        scrut: Arc<Term>,
        left: Name,
        right: Name,
        body: Arc<Term>,
    },
    Inj(Side, Arc<Term>),
    Case {
        scrut: Arc<Term>,
        left: Name,
        left_body: Arc<Term>,
        right: Name,
        right_body: Arc<Term>,
    },
    Pack(IndexTerm, Arc<Term>),
    Unpack {
        scrut: Arc<Term>,
        ivar: Name,
        var: Name,
        body: Arc<Term>,
    },
    Refl,
    /// Equality elimination. A missing unifier is filled in by the checker.
    EqElim {
        scrut: Arc<Term>,
        unifier: Option<Unifier>,
        body: Arc<Term>,
    },
    EqAbort(Arc<Term>),
    Fold(Arc<Term>),
    OutNu(Arc<Term>),
    InjZero(Arc<Term>),
    InjSuc(Arc<Term>),
    OutZero(Arc<Term>),
    OutSuc(Arc<Term>),
    Annot(Arc<Term>, Type),
}

/// A function form together with the typing it was checked at.
#[derive(Clone, Debug)]
pub struct Fun {
    pub form: FunForm,
    /// Filled in by the checker; used to type closures at runtime.
    pub sig: Option<Arc<FnSig>>,
}

#[derive(Clone, Debug)]
pub enum FunForm {
    /// `fn (u1, ..., un | x) => body`.
    Lam { ivars: Vec<Name>, var: Name, body: Arc<Term> },
    /// `rec f => body`.
    Rec { f: Name, body: Arc<Term> },
    /// `corec f => body`.
    Corec { f: Name, body: Arc<Term> },
    /// `ind (0 => zero | suc ivar, f => suc)`.
    Ind { zero: Arc<Term>, ivar: Name, f: Name, suc: Arc<Term> },
}

/// The judgment `Δ; Ξ; Γ ⊢ g ⇐ T` under which a function form was accepted,
/// with `inst` giving the closed type each variable of `Ξ` stands for.
#[derive(Clone, Debug)]
pub struct FnSig {
    pub ictx: IndexCtx,
    pub tctx: TypeVarCtx,
    pub inst: Vec<(Name, Type)>,
    pub ctx: TypingCtx,
    pub ty: Type,
}

impl Fun {
    pub fn head(&self) -> &'static str {
        match self.form {
            FunForm::Lam { .. } => "fn",
            FunForm::Rec { .. } => "rec",
            FunForm::Corec { .. } => "corec",
            FunForm::Ind { .. } => "ind",
        }
    }
}

impl Term {
    pub fn var(x: impl AsRef<str>) -> Term {
        Term::Var(name(x))
    }

    fn fun(form: FunForm) -> Term {
        Term::Fun(Arc::new(Fun { form, sig: None }))
    }

    /// `fn (u1, ..., un | x) => body`.
    pub fn lam<S: AsRef<str>>(ivars: &[S], x: impl AsRef<str>, body: Term) -> Term {
        Term::fun(FunForm::Lam { ivars: ivars.iter().map(name).collect(), var: name(x), body: Arc::new(body) })
    }

    /// `fn x => body`.
    pub fn lam0(x: impl AsRef<str>, body: Term) -> Term {
        Term::lam::<&str>(&[], x, body)
    }

    pub fn rec(f: impl AsRef<str>, body: Term) -> Term {
        Term::fun(FunForm::Rec { f: name(f), body: Arc::new(body) })
    }

    pub fn corec(f: impl AsRef<str>, body: Term) -> Term {
        Term::fun(FunForm::Corec { f: name(f), body: Arc::new(body) })
    }

    pub fn ind(zero: Term, u: impl AsRef<str>, f: impl AsRef<str>, suc: Term) -> Term {
        Term::fun(FunForm::Ind { zero: Arc::new(zero), ivar: name(u), f: name(f), suc: Arc::new(suc) })
    }

    pub fn app(t: Term, spine: TermSpine, s: Term) -> Term {
        Term::App(Arc::new(t), spine, Arc::new(s))
    }

    /// `t s`.
    pub fn app0(t: Term, s: Term) -> Term {
        Term::app(t, Vec::new(), s)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn split(scrut: Term, x: impl AsRef<str>, y: impl AsRef<str>, body: Term) -> Term {
        Term::Split { scrut: Arc::new(scrut), left: name(x), right: name(y), body: Arc::new(body) }
    }

    pub fn inj(side: Side, t: Term) -> Term {
        Term::Inj(side, Arc::new(t))
    }

    pub fn case(scrut: Term, x: impl AsRef<str>, l: Term, y: impl AsRef<str>, r: Term) -> Term {
        Term::Case {
            scrut: Arc::new(scrut),
            left: name(x),
            left_body: Arc::new(l),
            right: name(y),
            right_body: Arc::new(r),
        }
    }

    pub fn pack(m: IndexTerm, t: Term) -> Term {
        Term::Pack(m, Arc::new(t))
    }

    pub fn unpack(scrut: Term, u: impl AsRef<str>, x: impl AsRef<str>, body: Term) -> Term {
        Term::Unpack { scrut: Arc::new(scrut), ivar: name(u), var: name(x), body: Arc::new(body) }
    }

    pub fn eqelim(scrut: Term, unifier: Option<Unifier>, body: Term) -> Term {
        Term::EqElim { scrut: Arc::new(scrut), unifier, body: Arc::new(body) }
    }

    pub fn eqabort(t: Term) -> Term {
        Term::EqAbort(Arc::new(t))
    }

    pub fn fold(t: Term) -> Term {
        Term::Fold(Arc::new(t))
    }

    pub fn out_nu(t: Term) -> Term {
        Term::OutNu(Arc::new(t))
    }

    pub fn inj_zero(t: Term) -> Term {
        Term::InjZero(Arc::new(t))
    }

    pub fn inj_suc(t: Term) -> Term {
        Term::InjSuc(Arc::new(t))
    }

    pub fn out_zero(t: Term) -> Term {
        Term::OutZero(Arc::new(t))
    }

    pub fn out_suc(t: Term) -> Term {
        Term::OutSuc(Arc::new(t))
    }

    pub fn annot(t: Term, ty: Type) -> Term {
        Term::Annot(Arc::new(t), ty)
    }

    /// Short name of the outermost constructor.
    pub fn head(&self) -> &'static str {
        match self {
            Term::Var(_) => "var",
            Term::Unit => "unit",
            Term::Fun(f) => f.head(),
            Term::App(..) => "app",
            Term::Pair(..) => "pair",
            Term::Split { .. } => "split",
            Term::Inj(Side::Left, _) => "inl",
            Term::Inj(Side::Right, _) => "inr",
            Term::Case { .. } => "case",
            Term::Pack(..) => "pack",
            Term::Unpack { .. } => "unpack",
            Term::Refl => "refl",
            Term::EqElim { .. } => "eqelim",
            Term::EqAbort(_) => "eqabort",
            Term::Fold(_) => "fold",
            Term::OutNu(_) => "out_nu",
            Term::InjZero(_) => "inj0",
            Term::InjSuc(_) => "injs",
            Term::OutZero(_) => "out0",
            Term::OutSuc(_) => "outs",
            Term::Annot(..) => "annot",
        }
    }

    /// Number of syntax nodes, counting embedded types.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Unit | Term::Refl => 1,
            Term::Fun(f) => {
                1 + match &f.form {
                    FunForm::Lam { body, .. } | FunForm::Rec { body, .. } | FunForm::Corec { body, .. } => body.size(),
                    FunForm::Ind { zero, suc, .. } => zero.size() + suc.size(),
                }
            }
            Term::App(t, sp, s) => 1 + t.size() + sp.iter().map(IndexTerm::size).sum::<usize>() + s.size(),
            Term::Pair(a, b) => 1 + a.size() + b.size(),
            Term::Split { scrut, body, .. } | Term::Unpack { scrut, body, .. } | Term::EqElim { scrut, body, .. } => {
                1 + scrut.size() + body.size()
            }
            Term::Case { scrut, left_body, right_body, .. } => 1 + scrut.size() + left_body.size() + right_body.size(),
            Term::Pack(m, t) => 1 + m.size() + t.size(),
            Term::Inj(_, t)
            | Term::EqAbort(t)
            | Term::Fold(t)
            | Term::OutNu(t)
            | Term::InjZero(t)
            | Term::InjSuc(t)
            | Term::OutZero(t)
            | Term::OutSuc(t) => 1 + t.size(),
            Term::Annot(t, ty) => 1 + t.size() + ty.size(),
        }
    }

    /// Every index-variable name mentioned anywhere in the term.
    pub fn ivar_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_ivar_names(&mut out);
        out
    }

    fn collect_ivar_names(&self, out: &mut BTreeSet<Name>) {
        let add = |m: &IndexTerm, out: &mut BTreeSet<Name>| {
            if let Some(u) = m.base_var() {
                out.insert(u.clone());
            }
        };
        match self {
            Term::Var(_) | Term::Unit | Term::Refl => {}
            Term::Fun(f) => match &f.form {
                FunForm::Lam { ivars, body, .. } => {
                    out.extend(ivars.iter().cloned());
                    body.collect_ivar_names(out);
                }
                FunForm::Rec { body, .. } | FunForm::Corec { body, .. } => body.collect_ivar_names(out),
                FunForm::Ind { zero, ivar, suc, .. } => {
                    out.insert(ivar.clone());
                    zero.collect_ivar_names(out);
                    suc.collect_ivar_names(out);
                }
            },
            Term::App(t, sp, s) => {
                for m in sp {
                    add(m, out);
                }
                t.collect_ivar_names(out);
                s.collect_ivar_names(out);
            }
            Term::Pair(a, b) => {
                a.collect_ivar_names(out);
                b.collect_ivar_names(out);
            }
            Term::Split { scrut, body, .. } => {
                scrut.collect_ivar_names(out);
                body.collect_ivar_names(out);
            }
            Term::Unpack { scrut, ivar, body, .. } => {
                out.insert(ivar.clone());
                scrut.collect_ivar_names(out);
                body.collect_ivar_names(out);
            }
            Term::EqElim { scrut, unifier, body } => {
                if let Some(u) = unifier {
                    out.extend(u.ctx.names().cloned());
                    for (m, v) in u.subst.entries() {
                        add(m, out);
                        out.insert(v.clone());
                    }
                }
                scrut.collect_ivar_names(out);
                body.collect_ivar_names(out);
            }
            Term::Case { scrut, left_body, right_body, .. } => {
                scrut.collect_ivar_names(out);
                left_body.collect_ivar_names(out);
                right_body.collect_ivar_names(out);
            }
            Term::Pack(m, t) => {
                add(m, out);
                t.collect_ivar_names(out);
            }
            Term::Inj(_, t)
            | Term::EqAbort(t)
            | Term::Fold(t)
            | Term::OutNu(t)
            | Term::InjZero(t)
            | Term::InjSuc(t)
            | Term::OutZero(t)
            | Term::OutSuc(t) => t.collect_ivar_names(out),
            Term::Annot(t, ty) => {
                out.extend(ty.free_ivars());
                t.collect_ivar_names(out);
            }
        }
    }

    /// Rename the free index variable `old` to `new`, which must not occur in
    /// the term. Checker annotations on function forms are dropped.
    pub fn rename_ivar(&self, old: &str, new: &Name) -> Term {
        let r = |m: &IndexTerm| subst_apply(m, &IndexSubst::single(IndexTerm::Var(new.clone()), name(old)));
        let go = |t: &Arc<Term>| Arc::new(t.rename_ivar(old, new));
        match self {
            Term::Var(_) | Term::Unit | Term::Refl => self.clone(),
            Term::Fun(f) => {
                let form = match &f.form {
                    FunForm::Lam { ivars, var, body } => FunForm::Lam {
                        ivars: ivars.clone(),
                        var: var.clone(),
                        body: if ivars.iter().any(|u| &**u == old) { body.clone() } else { go(body) },
                    },
                    FunForm::Rec { f, body } => FunForm::Rec { f: f.clone(), body: go(body) },
                    FunForm::Corec { f, body } => FunForm::Corec { f: f.clone(), body: go(body) },
                    FunForm::Ind { zero, ivar, f, suc } => FunForm::Ind {
                        zero: go(zero),
                        ivar: ivar.clone(),
                        f: f.clone(),
                        suc: if &**ivar == old { suc.clone() } else { go(suc) },
                    },
                };
                Term::Fun(Arc::new(Fun { form, sig: None }))
            }
            Term::App(t, sp, s) => Term::App(go(t), sp.iter().map(r).collect(), go(s)),
            Term::Pair(a, b) => Term::Pair(go(a), go(b)),
            Term::Split { scrut, left, right, body } => {
                Term::Split { scrut: go(scrut), left: left.clone(), right: right.clone(), body: go(body) }
            }
            Term::Inj(side, t) => Term::Inj(*side, go(t)),
            Term::Case { scrut, left, left_body, right, right_body } => Term::Case {
                scrut: go(scrut),
                left: left.clone(),
                left_body: go(left_body),
                right: right.clone(),
                right_body: go(right_body),
            },
            Term::Pack(m, t) => Term::Pack(r(m), go(t)),
            Term::Unpack { scrut, ivar, var, body } => Term::Unpack {
                scrut: go(scrut),
                ivar: ivar.clone(),
                var: var.clone(),
                body: if &**ivar == old { body.clone() } else { go(body) },
            },
            Term::EqElim { scrut, unifier, body } => match unifier {
                // The body lives in the unifier's target context.
                Some(u) => Term::EqElim {
                    scrut: go(scrut),
                    unifier: Some(Unifier {
                        ctx: u.ctx.clone(),
                        subst: IndexSubst::from_entries(
                            u.subst
                                .entries()
                                .iter()
                                .map(|(m, v)| (m.clone(), if &**v == old { new.clone() } else { v.clone() }))
                                .collect(),
                        ),
                    }),
                    body: body.clone(),
                },
                None => Term::EqElim { scrut: go(scrut), unifier: None, body: go(body) },
            },
            Term::EqAbort(t) => Term::EqAbort(go(t)),
            Term::Fold(t) => Term::Fold(go(t)),
            Term::OutNu(t) => Term::OutNu(go(t)),
            Term::InjZero(t) => Term::InjZero(go(t)),
            Term::InjSuc(t) => Term::InjSuc(go(t)),
            Term::OutZero(t) => Term::OutZero(go(t)),
            Term::OutSuc(t) => Term::OutSuc(go(t)),
            Term::Annot(t, ty) => {
                Term::Annot(go(t), ty.apply_isubst(&IndexSubst::single(IndexTerm::Var(new.clone()), name(old))))
            }
        }
    }

    /// Equality up to renaming of bound variables, ignoring checker
    /// annotations on function forms.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        TermAlpha::default().terms(self, other)
    }
}

#[derive(Default)]
struct TermAlpha {
    ty: Alpha,
    vl: Vec<Name>,
    vr: Vec<Name>,
}

impl TermAlpha {
    fn with_vars<R>(&mut self, pairs: &[(&Name, &Name)], f: impl FnOnce(&mut Self) -> R) -> R {
        for (a, b) in pairs {
            self.vl.push((*a).clone());
            self.vr.push((*b).clone());
        }
        let r = f(self);
        let k = self.vl.len() - pairs.len();
        self.vl.truncate(k);
        self.vr.truncate(k);
        r
    }

    fn with_ivars<R>(&mut self, pairs: &[(&Name, &Name)], f: impl FnOnce(&mut Self) -> R) -> R {
        for (a, b) in pairs {
            self.ty.push_i(a, b);
        }
        let r = f(self);
        self.ty.pop_i(pairs.len());
        r
    }

    fn terms(&mut self, a: &Term, b: &Term) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => var_match(&self.vl, &self.vr, x, y),
            (Term::Unit, Term::Unit) | (Term::Refl, Term::Refl) => true,
            (Term::Fun(f), Term::Fun(g)) => self.funs(f, g),
            (Term::App(t1, sp1, s1), Term::App(t2, sp2, s2)) => {
                sp1.len() == sp2.len()
                    && sp1.iter().zip(sp2).all(|(m, n)| self.ty.index(m, n))
                    && self.terms(t1, t2)
                    && self.terms(s1, s2)
            }
            (Term::Pair(a1, b1), Term::Pair(a2, b2)) => self.terms(a1, a2) && self.terms(b1, b2),
            (
                Term::Split { scrut: s1, left: x1, right: y1, body: b1 },
                Term::Split { scrut: s2, left: x2, right: y2, body: b2 },
            ) => self.terms(s1, s2) && self.with_vars(&[(x1, x2), (y1, y2)], |me| me.terms(b1, b2)),
            (Term::Inj(i, t1), Term::Inj(j, t2)) => i == j && self.terms(t1, t2),
            (
                Term::Case { scrut: s1, left: x1, left_body: l1, right: y1, right_body: r1 },
                Term::Case { scrut: s2, left: x2, left_body: l2, right: y2, right_body: r2 },
            ) => {
                self.terms(s1, s2)
                    && self.with_vars(&[(x1, x2)], |me| me.terms(l1, l2))
                    && self.with_vars(&[(y1, y2)], |me| me.terms(r1, r2))
            }
            (Term::Pack(m, t1), Term::Pack(n, t2)) => self.ty.index(m, n) && self.terms(t1, t2),
            (
                Term::Unpack { scrut: s1, ivar: u1, var: x1, body: b1 },
                Term::Unpack { scrut: s2, ivar: u2, var: x2, body: b2 },
            ) => {
                self.terms(s1, s2)
                    && self.with_ivars(&[(u1, u2)], |me| me.with_vars(&[(x1, x2)], |me| me.terms(b1, b2)))
            }
            (Term::EqElim { scrut: s1, unifier: u1, body: b1 }, Term::EqElim { scrut: s2, unifier: u2, body: b2 }) => {
                if !self.terms(s1, s2) {
                    return false;
                }
                match (u1, u2) {
                    (None, None) => self.terms(b1, b2),
                    (Some(u1), Some(u2)) => self.unifiers_then_body(u1, u2, b1, b2),
                    _ => false,
                }
            }
            (Term::EqAbort(t1), Term::EqAbort(t2))
            | (Term::Fold(t1), Term::Fold(t2))
            | (Term::OutNu(t1), Term::OutNu(t2))
            | (Term::InjZero(t1), Term::InjZero(t2))
            | (Term::InjSuc(t1), Term::InjSuc(t2))
            | (Term::OutZero(t1), Term::OutZero(t2))
            | (Term::OutSuc(t1), Term::OutSuc(t2)) => self.terms(t1, t2),
            (Term::Annot(t1, ty1), Term::Annot(t2, ty2)) => self.ty.types(ty1, ty2) && self.terms(t1, t2),
            _ => false,
        }
    }

    fn unifiers_then_body(&mut self, u1: &Unifier, u2: &Unifier, b1: &Term, b2: &Term) -> bool {
        if u1.ctx.len() != u2.ctx.len() || u1.subst.len() != u2.subst.len() {
            return false;
        }
        // Domains refer to the outer scope.
        let outer_ok = u1
            .subst
            .entries()
            .iter()
            .zip(u2.subst.entries())
            .all(|((_, a), (_, b))| self.ty.index(&IndexTerm::Var(a.clone()), &IndexTerm::Var(b.clone())));
        if !outer_ok {
            return false;
        }
        let inner_l: Vec<Name> = u1.ctx.names().cloned().collect();
        let inner_r: Vec<Name> = u2.ctx.names().cloned().collect();
        let saved = self.ty.swap_i(inner_l, inner_r);
        let ok = u1.subst.entries().iter().zip(u2.subst.entries()).all(|((m, _), (n, _))| self.ty.index(m, n))
            && self.terms(b1, b2);
        self.ty.swap_i(saved.0, saved.1);
        ok
    }

    fn funs(&mut self, f: &Fun, g: &Fun) -> bool {
        match (&f.form, &g.form) {
            (FunForm::Lam { ivars: us, var: x, body: b1 }, FunForm::Lam { ivars: vs, var: y, body: b2 }) => {
                if us.len() != vs.len() {
                    return false;
                }
                let pairs: Vec<(&Name, &Name)> = us.iter().zip(vs).collect();
                self.with_ivars(&pairs, |me| me.with_vars(&[(x, y)], |me| me.terms(b1, b2)))
            }
            (FunForm::Rec { f: f1, body: b1 }, FunForm::Rec { f: f2, body: b2 })
            | (FunForm::Corec { f: f1, body: b1 }, FunForm::Corec { f: f2, body: b2 }) => {
                self.with_vars(&[(f1, f2)], |me| me.terms(b1, b2))
            }
            (
                FunForm::Ind { zero: z1, ivar: u1, f: f1, suc: s1 },
                FunForm::Ind { zero: z2, ivar: u2, f: f2, suc: s2 },
            ) => {
                self.terms(z1, z2)
                    && self.with_ivars(&[(u1, u2)], |me| me.with_vars(&[(f1, f2)], |me| me.terms(s1, s2)))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::print_term(self))
    }
}
