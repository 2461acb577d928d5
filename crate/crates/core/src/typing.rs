//! Bidirectional type checking: `Δ; Ξ; Γ ⊢ t ⇐ T` and `Δ; Ξ; Γ ⊢ t ⇒ T`.
//!
//! Checking also elaborates: it returns a copy of the term in which every
//! `eqelim` carries its unifier, clashing index binders have been renamed
//! apart from `Δ`, and every function form records the judgment it was
//! checked under (see [`FnSig`]).

use std::fmt;
use std::sync::Arc;

use crate::index::{
    ictx_wf, idx_check, idx_eq, spine_check, subst_check, unifier_equiv, unify, IndexCtx, IndexSort, IndexSubst,
    IndexTerm, UnifyResult,
};
use crate::kinding::{kind_check_at, KindError};
use crate::syntax::{AstPath, FnSig, Fun, FunForm, Kind, StratType, Term, Type, TypeVarCtx, TypingCtx, Unifier};
use crate::{fresh_name, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorReason {
    Mismatch,
    CannotInfer,
    NotFunction,
    NotProduct,
    NotSum,
    NotSigma,
    NotEquality,
    NotMu,
    NotNu,
    NotStrat,
    UnifierMismatch,
    ExpectedClashButUnifiable,
    IndexError,
    ScopeError,
    RecShape,
    SpineShape,
    IllKinded,
}

impl TypeErrorReason {
    pub fn code(self) -> &'static str {
        use TypeErrorReason::*;
        match self {
            Mismatch => "mismatch",
            CannotInfer => "cannot_infer",
            NotFunction => "not_function",
            NotProduct => "not_product",
            NotSum => "not_sum",
            NotSigma => "not_sigma",
            NotEquality => "not_equality",
            NotMu => "not_mu",
            NotNu => "not_nu",
            NotStrat => "not_strat",
            UnifierMismatch => "unifier_mismatch",
            ExpectedClashButUnifiable => "expected_clash_but_unifiable",
            IndexError => "index_error",
            ScopeError => "scope_error",
            RecShape => "rec_shape",
            SpineShape => "spine_shape",
            IllKinded => "ill_kinded",
        }
    }
}

impl fmt::Display for TypeErrorReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("{reason}: {detail}")]
pub struct TypeError {
    pub reason: TypeErrorReason,
    pub path: AstPath,
    pub expected: Option<Box<Type>>,
    pub found: Option<Box<Type>>,
    pub detail: String,
}

impl TypeError {
    fn from_kind(e: KindError) -> Self {
        TypeError {
            reason: TypeErrorReason::IllKinded,
            path: e.path,
            expected: None,
            found: None,
            detail: format!("{}: {}", e.reason, e.detail),
        }
    }
}

type R<T> = Result<T, TypeError>;

fn abbreviate(s: &str) -> String {
    const MAX: usize = 40;
    match s.char_indices().nth(MAX) {
        Some((i, _)) => format!("{} ...", s[..i].trim_end()),
        None => s.to_string(),
    }
}

/// `Δ; Ξ; Γ ⊢ t ⇐ T`.
pub fn check(ictx: &IndexCtx, tctx: &TypeVarCtx, ctx: &TypingCtx, term: &Term, ty: &Type) -> R<()> {
    elaborate_check(ictx, tctx, ctx, term, ty).map(|_| ())
}

/// `Δ; Ξ; Γ ⊢ t ⇒ T`.
pub fn infer(ictx: &IndexCtx, tctx: &TypeVarCtx, ctx: &TypingCtx, term: &Term) -> R<Type> {
    elaborate_infer(ictx, tctx, ctx, term).map(|(_, ty)| ty)
}

/// Like [`check`], returning the elaborated term.
pub fn elaborate_check(ictx: &IndexCtx, tctx: &TypeVarCtx, ctx: &TypingCtx, term: &Term, ty: &Type) -> R<Term> {
    let env = Env::new(ictx, tctx, ctx);
    Checker::default().check(&env, term, ty)
}

/// Like [`infer`], returning the elaborated term.
pub fn elaborate_infer(ictx: &IndexCtx, tctx: &TypeVarCtx, ctx: &TypingCtx, term: &Term) -> R<(Term, Type)> {
    let env = Env::new(ictx, tctx, ctx);
    Checker::default().infer(&env, term)
}

/// Re-check a function form under the judgment recorded in its signature.
pub(crate) fn recheck_fun(sig: &FnSig, fun: &Arc<Fun>) -> bool {
    let env = Env { ictx: sig.ictx.clone(), tctx: sig.tctx.clone(), inst: sig.inst.clone(), ctx: sig.ctx.clone() };
    Checker::default().check_fun(&env, fun, &sig.ty).is_ok()
}

/// Substitute the recorded instantiations for the type variables of `ty`.
pub(crate) fn apply_inst(inst: &[(Name, Type)], ty: &Type) -> Type {
    inst.iter().rev().fold(ty.clone(), |t, (x, s)| t.subst_tvar(x, s))
}

/// `Ts[N/u; (Rec N)/X]`: the unfolding of a stratified type at `suc N`.
pub fn unfold_suc(st: &Arc<StratType>, n: &IndexTerm) -> Type {
    let at_pred = Type::app(Type::Rec(st.clone()), n.clone());
    st.suc.apply_isubst(&IndexSubst::single(n.clone(), st.ivar.clone())).subst_tvar(&st.tvar, &at_pred)
}

/// The one-step unfolding of `(μX:K. B) M⃗` or `(νX:K. B) M⃗`.
pub fn unfold_fix(head: &Type, var: &str, body: &Type, args: &[IndexTerm]) -> Type {
    body.subst_tvar(var, head).instantiate(args)
}

#[derive(Clone)]
struct Env {
    ictx: IndexCtx,
    tctx: TypeVarCtx,
    inst: Vec<(Name, Type)>,
    ctx: TypingCtx,
}

impl Env {
    fn new(ictx: &IndexCtx, tctx: &TypeVarCtx, ctx: &TypingCtx) -> Self {
        Env { ictx: ictx.clone(), tctx: tctx.clone(), inst: Vec::new(), ctx: ctx.clone() }
    }

    fn with_var(&self, x: &Name, ty: Type) -> Env {
        let mut e = self.clone();
        e.ctx.push(x.clone(), ty);
        e
    }

    fn sig(&self, ty: &Type) -> Arc<FnSig> {
        Arc::new(FnSig {
            ictx: self.ictx.clone(),
            tctx: self.tctx.clone(),
            inst: self.inst.clone(),
            ctx: self.ctx.clone(),
            ty: ty.clone(),
        })
    }
}

#[derive(Default)]
struct Checker {
    path: AstPath,
}

impl Checker {
    fn err(&self, reason: TypeErrorReason, detail: impl Into<String>) -> TypeError {
        TypeError { reason, path: self.path.clone(), expected: None, found: None, detail: detail.into() }
    }

    fn err_types(
        &self,
        reason: TypeErrorReason,
        detail: impl Into<String>,
        expected: &Type,
        found: &Type,
    ) -> TypeError {
        TypeError {
            reason,
            path: self.path.clone(),
            expected: Some(Box::new(expected.clone())),
            found: Some(Box::new(found.clone())),
            detail: detail.into(),
        }
    }

    fn mismatch(&self, expected: &Type, found: &Type) -> TypeError {
        self.err_types(TypeErrorReason::Mismatch, format!("expected `{expected}`, found `{found}`"), expected, found)
    }

    fn wrong_shape(&self, reason: TypeErrorReason, what: &str, ty: &Type) -> TypeError {
        TypeError {
            reason,
            path: self.path.clone(),
            expected: None,
            found: Some(Box::new(ty.clone())),
            detail: format!("expected {what}, found `{ty}`"),
        }
    }

    fn at<T>(&mut self, child: u32, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(child);
        let r = f(self);
        self.path.pop();
        r
    }

    fn index(&self, env: &Env, m: &IndexTerm) -> R<()> {
        if idx_check(&env.ictx, m, IndexSort::Nat) {
            Ok(())
        } else {
            Err(self.err(TypeErrorReason::IndexError, format!("index term `{m}` is not well-sorted in `{}`", env.ictx)))
        }
    }

    /// Rename an index binder that would clash with `Δ`.
    fn fresh_ivar(&self, env: &Env, u: &Name, body: &Term, extra: &[Name]) -> Option<Name> {
        if !env.ictx.contains(u) && !extra.contains(u) {
            return None;
        }
        let used = body.ivar_names();
        Some(fresh_name(u, |c| env.ictx.contains(c) || used.contains(c) || extra.iter().any(|e| &**e == c)))
    }

    fn check(&mut self, env: &Env, term: &Term, ty: &Type) -> R<Term> {
        use TypeErrorReason::*;
        match term {
            Term::Unit => match ty {
                Type::Unit => Ok(Term::Unit),
                _ => Err(self.mismatch(ty, &Type::Unit)),
            },
            Term::Fun(f) => self.check_fun(env, f, ty),
            Term::Pair(a, b) => match ty {
                Type::Prod(ta, tb) => {
                    let a2 = self.at(0, |c| c.check(env, a, ta))?;
                    let b2 = self.at(1, |c| c.check(env, b, tb))?;
                    Ok(Term::pair(a2, b2))
                }
                _ => Err(self.wrong_shape(NotProduct, "a product type for a pair", ty)),
            },
            Term::Split { scrut, left, right, body } => {
                let (s2, sty) = self.at(0, |c| c.infer(env, scrut))?;
                let Type::Prod(ta, tb) = &sty else {
                    return Err(self.at(0, |c| c.wrong_shape(NotProduct, "a product to split", &sty)));
                };
                let env2 = env.with_var(left, (**ta).clone()).with_var(right, (**tb).clone());
                let b2 = self.at(1, |c| c.check(&env2, body, ty))?;
                Ok(Term::Split { scrut: Arc::new(s2), left: left.clone(), right: right.clone(), body: Arc::new(b2) })
            }
            Term::Inj(side, t) => match ty {
                Type::Sum(ta, tb) => {
                    let target = match side {
                        crate::syntax::Side::Left => ta,
                        crate::syntax::Side::Right => tb,
                    };
                    let t2 = self.at(0, |c| c.check(env, t, target))?;
                    Ok(Term::inj(*side, t2))
                }
                _ => Err(self.wrong_shape(NotSum, "a sum type for an injection", ty)),
            },
            Term::Case { scrut, left, left_body, right, right_body } => {
                let (s2, sty) = self.at(0, |c| c.infer(env, scrut))?;
                let Type::Sum(ta, tb) = &sty else {
                    return Err(self.at(0, |c| c.wrong_shape(NotSum, "a sum to analyse", &sty)));
                };
                let l2 = self.at(1, |c| c.check(&env.with_var(left, (**ta).clone()), left_body, ty))?;
                let r2 = self.at(2, |c| c.check(&env.with_var(right, (**tb).clone()), right_body, ty))?;
                Ok(Term::Case {
                    scrut: Arc::new(s2),
                    left: left.clone(),
                    left_body: Arc::new(l2),
                    right: right.clone(),
                    right_body: Arc::new(r2),
                })
            }
            Term::Pack(m, t) => match ty {
                Type::Sigma { var, body, .. } => {
                    self.index(env, m)?;
                    let target = body.apply_isubst(&IndexSubst::single(m.clone(), var.clone()));
                    let t2 = self.at(0, |c| c.check(env, t, &target))?;
                    Ok(Term::pack(m.clone(), t2))
                }
                _ => Err(self.wrong_shape(NotSigma, "a dependent pair type for pack", ty)),
            },
            Term::Unpack { scrut, ivar, var, body } => {
                let (s2, sty) = self.at(0, |c| c.infer(env, scrut))?;
                let Type::Sigma { var: v, body: sbody, .. } = &sty else {
                    return Err(self.at(0, |c| c.wrong_shape(NotSigma, "a dependent pair to unpack", &sty)));
                };
                let (u, body) = match self.fresh_ivar(env, ivar, body, &[]) {
                    Some(u2) => (u2.clone(), Arc::new(body.rename_ivar(ivar, &u2))),
                    None => (ivar.clone(), body.clone()),
                };
                let xty = sbody.apply_isubst(&IndexSubst::single(IndexTerm::Var(u.clone()), v.clone()));
                let mut env2 = env.with_var(var, xty);
                env2.ictx.push(u.clone(), IndexSort::Nat);
                let b2 = self.at(1, |c| c.check(&env2, &body, ty))?;
                Ok(Term::Unpack { scrut: Arc::new(s2), ivar: u, var: var.clone(), body: Arc::new(b2) })
            }
            Term::Refl => match ty {
                Type::Eq(m, n) => {
                    if idx_eq(m, n) {
                        Ok(Term::Refl)
                    } else {
                        Err(self.err_types(
                            Mismatch,
                            format!("refl proves only reflexive equations; `{m}` and `{n}` differ"),
                            ty,
                            &Type::Eq(m.clone(), m.clone()),
                        ))
                    }
                }
                _ => Err(self.wrong_shape(NotEquality, "an equation for refl", ty)),
            },
            Term::EqElim { scrut, unifier, body } => self.check_eqelim(env, scrut, unifier.as_ref(), body, ty),
            Term::EqAbort(s) => {
                let (s2, sty) = self.at(0, |c| c.infer(env, s))?;
                let Type::Eq(m, n) = &sty else {
                    return Err(self.at(0, |c| c.wrong_shape(NotEquality, "an equation", &sty)));
                };
                match unify(&env.ictx, m, n) {
                    UnifyResult::Clash => Ok(Term::eqabort(s2)),
                    UnifyResult::Mgu { ctx, subst } => Err(self.err(
                        ExpectedClashButUnifiable,
                        format!("`{m} == {n}` is satisfiable (unifier ({ctx} | {subst})); eliminate it with eqelim"),
                    )),
                }
            }
            Term::Fold(t) => {
                let (head, args) = ty.spine_head_form();
                match head {
                    Type::Mu { var, body, .. } => {
                        let target = unfold_fix(head, var, body, &args);
                        let t2 = self.at(0, |c| c.check(env, t, &target))?;
                        Ok(Term::fold(t2))
                    }
                    _ => Err(self.wrong_shape(NotMu, "an inductive type for fold", ty)),
                }
            }
            Term::InjZero(t) => {
                let (st, rest) = self.strat_at(ty, true, "inj0")?;
                let target = st.zero.instantiate(&rest[1..]);
                let t2 = self.at(0, |c| c.check(env, t, &target))?;
                Ok(Term::inj_zero(t2))
            }
            Term::InjSuc(t) => {
                let (st, rest) = self.strat_at(ty, false, "injs")?;
                let IndexTerm::Suc(n) = &rest[0] else { unreachable!("strat_at checked the index") };
                let target = unfold_suc(&st, n).instantiate(&rest[1..]);
                let t2 = self.at(0, |c| c.check(env, t, &target))?;
                Ok(Term::inj_suc(t2))
            }
            Term::Var(_) | Term::App(..) | Term::OutNu(_) | Term::OutZero(_) | Term::OutSuc(_) | Term::Annot(..) => {
                let (t2, found) = self.infer(env, term)?;
                if found.alpha_eq(ty) {
                    Ok(t2)
                } else {
                    Err(self.mismatch(ty, &found))
                }
            }
        }
    }

    /// Decompose `(Rec K ...) M M⃗` where `M` is `0` (`zero`) or `suc N`.
    fn strat_at(&self, ty: &Type, zero: bool, what: &str) -> R<(Arc<StratType>, Vec<IndexTerm>)> {
        let (head, args) = ty.spine_head_form();
        let expected = if zero { "index 0" } else { "an index of the form suc N" };
        match (head, args.first()) {
            (Type::Rec(st), Some(IndexTerm::Zero)) if zero => Ok((st.clone(), args)),
            (Type::Rec(st), Some(IndexTerm::Suc(_))) if !zero => Ok((st.clone(), args)),
            (Type::Rec(_), _) => Err(self.wrong_shape(
                TypeErrorReason::NotStrat,
                &format!("a stratified type at {expected} for {what}"),
                ty,
            )),
            _ => Err(self.wrong_shape(TypeErrorReason::NotStrat, &format!("a stratified type for {what}"), ty)),
        }
    }

    fn check_eqelim(&mut self, env: &Env, scrut: &Term, given: Option<&Unifier>, body: &Term, ty: &Type) -> R<Term> {
        use TypeErrorReason::*;
        let (s2, sty) = self.at(0, |c| c.infer(env, scrut))?;
        let Type::Eq(m, n) = &sty else {
            return Err(self.at(0, |c| c.wrong_shape(NotEquality, "an equation", &sty)));
        };
        let (mgu_ctx, mgu_subst) = match unify(&env.ictx, m, n) {
            UnifyResult::Mgu { ctx, subst } => (ctx, subst),
            UnifyResult::Clash => {
                return Err(self.err(UnifierMismatch, format!("`{m} == {n}` has no unifier; refute it with eqabort")))
            }
        };
        let unifier = match given {
            None => Unifier { ctx: mgu_ctx, subst: mgu_subst },
            Some(u) => {
                let (ctx, subst) = self.complete_unifier(env, u)?;
                if !ictx_wf(&ctx) || !subst_check(&ctx, &subst, &env.ictx) {
                    return Err(self.err(
                        UnifierMismatch,
                        format!("`({ctx} | {subst})` is not a substitution from `{}`", env.ictx),
                    ));
                }
                if !unifier_equiv((&mgu_ctx, &mgu_subst), (&ctx, &subst)) {
                    return Err(self.err(
                        UnifierMismatch,
                        format!(
                            "given unifier `({ctx} | {subst})` is not equivalent to the most general one `({mgu_ctx} | {mgu_subst})`"
                        ),
                    ));
                }
                Unifier { ctx, subst }
            }
        };
        let theta = &unifier.subst;
        let env2 = Env {
            ictx: unifier.ctx.clone(),
            tctx: env.tctx.apply_isubst(theta),
            inst: env.inst.iter().map(|(x, t)| (x.clone(), t.apply_isubst(theta))).collect(),
            ctx: env.ctx.apply_isubst(theta),
        };
        let target = ty.apply_isubst(theta);
        let b2 = self.at(1, |c| c.check(&env2, body, &target))?;
        Ok(Term::EqElim { scrut: Arc::new(s2), unifier: Some(unifier), body: Arc::new(b2) })
    }

    /// Fill in identity entries, in the order of `Δ`, for the variables of
    /// `Δ` the user left out; each such variable also joins `Δ'`.
    fn complete_unifier(&self, env: &Env, u: &Unifier) -> R<(IndexCtx, IndexSubst)> {
        for (i, (_, v)) in u.subst.entries().iter().enumerate() {
            if !env.ictx.contains(v) {
                return Err(self.err(
                    TypeErrorReason::UnifierMismatch,
                    format!("unifier mentions `{v}`, which is not an index variable in scope"),
                ));
            }
            if u.subst.entries()[..i].iter().any(|(_, w)| w == v) {
                return Err(self.err(TypeErrorReason::UnifierMismatch, format!("unifier binds `{v}` twice")));
            }
        }
        let mut ctx = u.ctx.clone();
        let mut entries = Vec::with_capacity(env.ictx.len());
        for v in env.ictx.names() {
            match u.subst.lookup(v) {
                Some(m) => entries.push((m.clone(), v.clone())),
                None if ctx.contains(v) => {
                    return Err(self.err(
                        TypeErrorReason::UnifierMismatch,
                        format!("`{v}` is left unchanged by the unifier but also declared as a new variable"),
                    ))
                }
                None => {
                    ctx.push(v.clone(), IndexSort::Nat);
                    entries.push((IndexTerm::Var(v.clone()), v.clone()));
                }
            }
        }
        Ok((ctx, IndexSubst::from_entries(entries)))
    }

    fn check_fun(&mut self, env: &Env, fun: &Arc<Fun>, ty: &Type) -> R<Term> {
        use TypeErrorReason::*;
        let Type::Arrow { binders, dom, cod } = ty else {
            return Err(self.wrong_shape(NotFunction, &format!("a function type for `{}`", fun.head()), ty));
        };
        let form = match &fun.form {
            FunForm::Lam { ivars, var, body } => {
                if ivars.len() != binders.len() {
                    return Err(self.err(
                        SpineShape,
                        format!("function binds {} index variables but its type has {}", ivars.len(), binders.len()),
                    ));
                }
                let mut body = body.clone();
                let mut names: Vec<Name> = Vec::with_capacity(ivars.len());
                for (i, u) in ivars.iter().enumerate() {
                    if ivars[i + 1..].contains(u) {
                        // Unreferenced: a later binder shadows it.
                        let used = body.ivar_names();
                        let fresh = fresh_name(u, |c| {
                            env.ictx.contains(c)
                                || used.contains(c)
                                || ivars.iter().any(|w| &**w == c)
                                || names.iter().any(|w| &**w == c)
                        });
                        names.push(fresh);
                    } else if let Some(fresh) = self.fresh_ivar(env, u, &body, &names) {
                        body = Arc::new(body.rename_ivar(u, &fresh));
                        names.push(fresh);
                    } else {
                        names.push(u.clone());
                    }
                }
                let renaming = IndexSubst::from_spine(
                    &names.iter().map(|u| IndexTerm::Var(u.clone())).collect::<Vec<_>>(),
                    binders,
                );
                let mut env2 = env.with_var(var, dom.apply_isubst(&renaming));
                for u in &names {
                    env2.ictx.push(u.clone(), IndexSort::Nat);
                }
                let target = cod.apply_isubst(&renaming);
                let b2 = self.at(0, |c| c.check(&env2, &body, &target))?;
                FunForm::Lam { ivars: names, var: var.clone(), body: Arc::new(b2) }
            }
            FunForm::Rec { f, body } => {
                let (head, args) = dom.spine_head_form();
                let Type::Mu { var, kind, body: fbody } = head else {
                    return Err(self.wrong_shape(RecShape, "an inductive type as the domain of rec", dom));
                };
                self.fixpoint_shape(binders, head, &args)?;
                let (x, fbody) = self.fresh_tvar(env, var, fbody, ty);
                let xu = Type::apps(Type::Var(x.clone()), args.iter().cloned());
                let fty = Type::Arrow { binders: binders.clone(), dom: Arc::new(xu), cod: cod.clone() };
                let target =
                    Type::Arrow { binders: binders.clone(), dom: Arc::new(fbody.instantiate(&args)), cod: cod.clone() };
                let env2 = self.enter_fix(env, &x, kind, head, f, fty);
                let b2 = self.at(0, |c| c.check(&env2, body, &target))?;
                FunForm::Rec { f: f.clone(), body: Arc::new(b2) }
            }
            FunForm::Corec { f, body } => {
                let (head, args) = cod.spine_head_form();
                let Type::Nu { var, kind, body: fbody } = head else {
                    return Err(self.wrong_shape(RecShape, "a coinductive type as the codomain of corec", cod));
                };
                self.fixpoint_shape(binders, head, &args)?;
                let (x, fbody) = self.fresh_tvar(env, var, fbody, ty);
                let xu = Type::apps(Type::Var(x.clone()), args.iter().cloned());
                let fty = Type::Arrow { binders: binders.clone(), dom: dom.clone(), cod: Arc::new(xu) };
                let target =
                    Type::Arrow { binders: binders.clone(), dom: dom.clone(), cod: Arc::new(fbody.instantiate(&args)) };
                let env2 = self.enter_fix(env, &x, kind, head, f, fty);
                let b2 = self.at(0, |c| c.check(&env2, body, &target))?;
                FunForm::Corec { f: f.clone(), body: Arc::new(b2) }
            }
            FunForm::Ind { zero, ivar, f, suc } => {
                let [(v, _)] = binders.as_slice() else {
                    return Err(self.wrong_shape(RecShape, "a type of the form (u:nat | unit) -> T for ind", ty));
                };
                if !dom.alpha_eq(&Type::Unit) {
                    return Err(self.wrong_shape(RecShape, "a type of the form (u:nat | unit) -> T for ind", ty));
                }
                let at = |m: IndexTerm| cod.apply_isubst(&IndexSubst::single(m, v.clone()));
                let z2 = self.at(0, |c| c.check(env, zero, &at(IndexTerm::Zero)))?;
                let (u, suc) = match self.fresh_ivar(env, ivar, suc, &[]) {
                    Some(u2) => (u2.clone(), Arc::new(suc.rename_ivar(ivar, &u2))),
                    None => (ivar.clone(), suc.clone()),
                };
                let mut env2 = env.with_var(f, at(IndexTerm::Var(u.clone())));
                env2.ictx.push(u.clone(), IndexSort::Nat);
                let s2 = self.at(1, |c| c.check(&env2, &suc, &at(IndexTerm::suc(IndexTerm::Var(u.clone())))))?;
                FunForm::Ind { zero: Arc::new(z2), ivar: u, f: f.clone(), suc: Arc::new(s2) }
            }
        };
        Ok(Term::Fun(Arc::new(Fun { form, sig: Some(env.sig(ty)) })))
    }

    /// The fixed point must be applied to exactly the function's binders, in
    /// order, and must not itself mention them.
    fn fixpoint_shape(&self, binders: &[(Name, IndexSort)], head: &Type, args: &[IndexTerm]) -> R<()> {
        let exact = args.len() == binders.len()
            && args.iter().zip(binders).all(|(m, (u, _))| matches!(m, IndexTerm::Var(v) if v == u))
            && binders.iter().enumerate().all(|(i, (u, _))| !binders[..i].iter().any(|(w, _)| w == u));
        if !exact {
            return Err(self.err(
                TypeErrorReason::RecShape,
                "the recursive type must be applied to exactly the function's index binders, in order",
            ));
        }
        let fv = head.free_ivars();
        if let Some((u, _)) = binders.iter().find(|(u, _)| fv.contains(u)) {
            return Err(self
                .err(TypeErrorReason::RecShape, format!("index binder `{u}` also occurs free in the recursive type")));
        }
        Ok(())
    }

    fn fresh_tvar(&self, env: &Env, x: &Name, body: &Arc<Type>, ty: &Type) -> (Name, Type) {
        let free = ty.free_tvars();
        if !env.tctx.contains(x) && !free.contains(x) {
            return (x.clone(), (**body).clone());
        }
        let fresh = fresh_name(x, |c| env.tctx.contains(c) || free.contains(c));
        let renamed = body.subst_tvar(x, &Type::Var(fresh.clone()));
        (fresh, renamed)
    }

    fn enter_fix(&self, env: &Env, x: &Name, kind: &Kind, head: &Type, f: &Name, fty: Type) -> Env {
        let mut env2 = env.with_var(f, fty);
        env2.tctx.push(x.clone(), kind.clone());
        let closed = apply_inst(&env.inst, head);
        env2.inst.push((x.clone(), closed));
        env2
    }

    fn infer(&mut self, env: &Env, term: &Term) -> R<(Term, Type)> {
        use TypeErrorReason::*;
        match term {
            Term::Var(x) => match env.ctx.lookup(x) {
                Some(t) => Ok((term.clone(), t.clone())),
                None => Err(self.err(ScopeError, format!("variable `{x}` is not in scope"))),
            },
            Term::App(f, spine, arg) => {
                let (f2, fty) = self.at(0, |c| c.infer(env, f))?;
                let Type::Arrow { binders, dom, cod } = &fty else {
                    return Err(self.at(0, |c| c.wrong_shape(NotFunction, "a function", &fty)));
                };
                if spine.len() != binders.len() {
                    return Err(self.err(
                        SpineShape,
                        format!("function expects {} index arguments, given {}", binders.len(), spine.len()),
                    ));
                }
                if !spine_check(&env.ictx, spine, binders) {
                    let bad = spine.iter().find(|m| !idx_check(&env.ictx, m, IndexSort::Nat));
                    return Err(self.err(
                        IndexError,
                        format!(
                            "index argument `{}` is not well-sorted",
                            bad.map(|m| m.to_string()).unwrap_or_default()
                        ),
                    ));
                }
                let theta = IndexSubst::from_spine(spine, binders);
                let a2 = self.at(1, |c| c.check(env, arg, &dom.apply_isubst(&theta)))?;
                Ok((Term::app(f2, spine.clone(), a2), cod.apply_isubst(&theta)))
            }
            Term::OutZero(t) => {
                let (t2, tty) = self.at(0, |c| c.infer(env, t))?;
                let (st, rest) = self.at(0, |c| c.strat_at(&tty, true, "out0"))?;
                Ok((Term::out_zero(t2), st.zero.instantiate(&rest[1..])))
            }
            Term::OutSuc(t) => {
                let (t2, tty) = self.at(0, |c| c.infer(env, t))?;
                let (st, rest) = self.at(0, |c| c.strat_at(&tty, false, "outs"))?;
                let IndexTerm::Suc(n) = &rest[0] else { unreachable!("strat_at checked the index") };
                Ok((Term::out_suc(t2), unfold_suc(&st, n).instantiate(&rest[1..])))
            }
            Term::OutNu(t) => {
                let (t2, tty) = self.at(0, |c| c.infer(env, t))?;
                let (head, args) = tty.spine_head_form();
                match head {
                    Type::Nu { var, body, .. } => Ok((Term::out_nu(t2), unfold_fix(head, var, body, &args))),
                    _ => Err(self.at(0, |c| c.wrong_shape(NotNu, "a coinductive type to observe", &tty))),
                }
            }
            Term::Annot(t, ty) => {
                let mut tpath = self.path.clone();
                tpath.push(1);
                kind_check_at(&env.ictx, &env.tctx, ty, &Kind::Star, tpath).map_err(TypeError::from_kind)?;
                let t2 = self.at(0, |c| c.check(env, t, ty))?;
                Ok((Term::annot(t2, ty.clone()), ty.clone()))
            }
            _ => Err(self.err(
                CannotInfer,
                format!("cannot infer a type for `{}`; add a type annotation", abbreviate(&term.to_string())),
            )),
        }
    }
}
