//! Bidirectional kind checking: `Δ; Ξ ⊢ T ⇐ K` and `Δ; Ξ ⊢ T ⇒ K`.

use std::fmt;

use crate::index::{idx_check, IndexCtx, IndexSort};
use crate::syntax::{AstPath, Kind, Type, TypeVarCtx};
use crate::Name;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KindErrorReason {
    NotStar,
    HeadNotPi,
    UnboundTvar,
    LambdaNeedsPi,
    StratKindShape,
    SortMismatch,
    KindMismatch,
}

impl KindErrorReason {
    pub fn code(self) -> &'static str {
        match self {
            KindErrorReason::NotStar => "not_star",
            KindErrorReason::HeadNotPi => "head_not_pi",
            KindErrorReason::UnboundTvar => "unbound_tvar",
            KindErrorReason::LambdaNeedsPi => "lambda_needs_pi",
            KindErrorReason::StratKindShape => "strat_kind_shape",
            KindErrorReason::SortMismatch => "sort_mismatch",
            KindErrorReason::KindMismatch => "kind_mismatch",
        }
    }
}

impl fmt::Display for KindErrorReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{reason}: {detail}")]
pub struct KindError {
    pub reason: KindErrorReason,
    pub path: AstPath,
    pub detail: String,
}

/// `Δ; Ξ ⊢ T ⇐ K`.
pub fn kind_check(ictx: &IndexCtx, tctx: &TypeVarCtx, ty: &Type, kind: &Kind) -> Result<(), KindError> {
    kind_check_at(ictx, tctx, ty, kind, Vec::new())
}

/// `Δ; Ξ ⊢ T ⇒ K`.
pub fn kind_infer(ictx: &IndexCtx, tctx: &TypeVarCtx, ty: &Type) -> Result<Kind, KindError> {
    let mut k = Kinder::new(ictx, tctx, Vec::new());
    k.infer(ty)
}

/// [`kind_check`] for a type found at `path` inside a larger tree, so that
/// errors report their position relative to the enclosing root.
pub fn kind_check_at(
    ictx: &IndexCtx,
    tctx: &TypeVarCtx,
    ty: &Type,
    kind: &Kind,
    path: AstPath,
) -> Result<(), KindError> {
    let mut k = Kinder::new(ictx, tctx, path);
    k.check(ty, kind)
}

struct Kinder {
    ivars: Vec<Name>,
    tvars: Vec<(Name, Kind)>,
    path: AstPath,
}

impl Kinder {
    fn new(ictx: &IndexCtx, tctx: &TypeVarCtx, path: AstPath) -> Self {
        Kinder { ivars: ictx.names().cloned().collect(), tvars: tctx.entries().to_vec(), path }
    }

    fn err(&self, reason: KindErrorReason, detail: impl Into<String>) -> KindError {
        KindError { reason, path: self.path.clone(), detail: detail.into() }
    }

    fn at<R>(&mut self, child: u32, f: impl FnOnce(&mut Self) -> R) -> R {
        self.path.push(child);
        let r = f(self);
        self.path.pop();
        r
    }

    fn with_ivars<R>(&mut self, us: &[Name], f: impl FnOnce(&mut Self) -> R) -> R {
        let n = self.ivars.len();
        self.ivars.extend(us.iter().cloned());
        let r = f(self);
        self.ivars.truncate(n);
        r
    }

    fn with_tvar<R>(&mut self, x: &Name, k: &Kind, f: impl FnOnce(&mut Self) -> R) -> R {
        self.tvars.push((x.clone(), k.clone()));
        let r = f(self);
        self.tvars.pop();
        r
    }

    fn index(&self, m: &crate::index::IndexTerm) -> Result<(), KindError> {
        let ctx = IndexCtx::from_names(self.ivars.iter());
        if idx_check(&ctx, m, IndexSort::Nat) {
            Ok(())
        } else {
            Err(self.err(KindErrorReason::SortMismatch, format!("index term `{m}` is not well-sorted here")))
        }
    }

    fn star(&self, kind: &Kind, what: &str) -> Result<(), KindError> {
        match kind {
            Kind::Star => Ok(()),
            Kind::Pi(..) => Err(self.err(KindErrorReason::NotStar, format!("{what} has kind *, expected {kind}"))),
        }
    }

    fn check(&mut self, ty: &Type, kind: &Kind) -> Result<(), KindError> {
        match ty {
            Type::Unit => self.star(kind, "unit"),
            Type::Prod(a, b) | Type::Sum(a, b) => {
                self.star(kind, "a product or sum")?;
                self.at(0, |k| k.check(a, &Kind::Star))?;
                self.at(1, |k| k.check(b, &Kind::Star))
            }
            Type::Arrow { binders, dom, cod } => {
                self.star(kind, "a function type")?;
                let us: Vec<Name> = binders.iter().map(|(u, _)| u.clone()).collect();
                self.with_ivars(&us, |k| {
                    k.at(0, |k| k.check(dom, &Kind::Star))?;
                    k.at(1, |k| k.check(cod, &Kind::Star))
                })
            }
            Type::Sigma { var, body, .. } => {
                self.star(kind, "a dependent pair type")?;
                self.with_ivars(std::slice::from_ref(var), |k| k.at(0, |k| k.check(body, &Kind::Star)))
            }
            Type::Eq(m, n) => {
                self.star(kind, "an equation")?;
                self.index(m)?;
                self.index(n)
            }
            Type::Lam(u, body) => match kind {
                Kind::Pi(_, IndexSort::Nat, inner) => {
                    self.with_ivars(std::slice::from_ref(u), |k| k.at(0, |k| k.check(body, inner)))
                }
                Kind::Star => Err(self.err(
                    KindErrorReason::LambdaNeedsPi,
                    format!("type-level function over `{u}` checked against kind *"),
                )),
            },
            Type::Var(_) | Type::App(..) | Type::Mu { .. } | Type::Nu { .. } | Type::Rec(_) => {
                let found = self.infer(ty)?;
                if found.alpha_eq(kind) {
                    Ok(())
                } else if *kind == Kind::Star {
                    Err(self.err(KindErrorReason::NotStar, format!("expected kind *, found {found}")))
                } else {
                    Err(self.err(KindErrorReason::KindMismatch, format!("expected kind {kind}, found {found}")))
                }
            }
        }
    }

    fn infer(&mut self, ty: &Type) -> Result<Kind, KindError> {
        match ty {
            Type::Var(x) => match self.tvars.iter().rev().find(|(y, _)| y == x) {
                Some((_, k)) => Ok(k.clone()),
                None => Err(self.err(KindErrorReason::UnboundTvar, format!("type variable `{x}` is not in scope"))),
            },
            Type::App(head, m) => {
                let hk = match &**head {
                    Type::Lam(..) => {
                        return Err(self.at(0, |k| {
                            k.err(KindErrorReason::HeadNotPi, "a type-level function cannot be applied directly")
                        }))
                    }
                    h => self.at(0, |k| k.infer(h))?,
                };
                match hk {
                    Kind::Pi(_, _, body) => {
                        self.index(m)?;
                        Ok((*body).clone())
                    }
                    Kind::Star => Err(self.at(0, |k| {
                        k.err(KindErrorReason::HeadNotPi, format!("`{head}` has kind * and cannot take an index"))
                    })),
                }
            }
            Type::Mu { var, kind, body } | Type::Nu { var, kind, body } => {
                self.with_tvar(var, kind, |k| k.at(0, |k| k.check(body, kind)))?;
                Ok(kind.clone())
            }
            Type::Rec(st) => {
                let Kind::Pi(_, IndexSort::Nat, inner) = &st.kind else {
                    return Err(self.err(
                        KindErrorReason::StratKindShape,
                        format!("a stratified type needs a kind of the form Pi u:nat. K, found {}", st.kind),
                    ));
                };
                self.at(0, |k| k.check(&st.zero, inner))?;
                self.with_ivars(std::slice::from_ref(&st.ivar), |k| {
                    k.with_tvar(&st.tvar, inner, |k| k.at(1, |k| k.check(&st.suc, inner)))
                })?;
                Ok(st.kind.clone())
            }
            Type::Lam(u, _) => Err(self.err(
                KindErrorReason::LambdaNeedsPi,
                format!("the kind of a type-level function over `{u}` cannot be inferred"),
            )),
            Type::Unit | Type::Prod(..) | Type::Sum(..) | Type::Arrow { .. } | Type::Sigma { .. } | Type::Eq(..) => {
                self.check(ty, &Kind::Star)?;
                Ok(Kind::Star)
            }
        }
    }
}
