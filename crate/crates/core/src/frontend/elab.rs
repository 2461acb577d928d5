//! Declaration-level driver: name resolution by inlining, then kind and type
//! checking of each declaration in order.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::index::IndexCtx;
use crate::kinding::{kind_check, KindError};
use crate::syntax::{AstPath, Fun, FunForm, Kind, StratType, Term, Type, TypeVarCtx, TypingCtx};
use crate::typing::{elaborate_check, TypeError};
use crate::Name;

use super::diagnostic::Diagnostic;
use super::lexer::Span;
use super::parser::{DeclBody, Program, SpanTree};
use super::printer::print_type;

pub const DEFAULT_SIZE_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct ElabOptions {
    /// Largest AST, in nodes, a declaration may reach after inlining.
    pub size_limit: usize,
}

impl Default for ElabOptions {
    fn default() -> Self {
        ElabOptions { size_limit: DEFAULT_SIZE_LIMIT }
    }
}

/// A declaration that passed checking, with all references inlined.
#[derive(Clone, Debug)]
pub enum Item {
    Type { kind: Kind, body: Type },
    Def { ty: Type, body: Term },
}

#[derive(Clone, Debug, Default)]
pub struct Elaborated {
    pub items: Vec<(Name, Item)>,
}

impl Elaborated {
    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|(n, _)| &**n == name).map(|(_, i)| i)
    }

    pub fn def(&self, name: &str) -> Option<(&Type, &Term)> {
        match self.get(name)? {
            Item::Def { ty, body } => Some((ty, body)),
            Item::Type { .. } => None,
        }
    }

    pub fn type_decl(&self, name: &str) -> Option<(&Kind, &Type)> {
        match self.get(name)? {
            Item::Type { kind, body } => Some((kind, body)),
            Item::Def { .. } => None,
        }
    }
}

enum Entry {
    Type(Type),
    Def(Type, Term),
    Failed,
}

enum ResolveError {
    /// Depends on a declaration that already failed; stay quiet.
    Skip,
    Unbound {
        path: AstPath,
        message: String,
    },
}

struct Resolver<'a> {
    env: &'a HashMap<Name, Entry>,
    path: AstPath,
}

impl Resolver<'_> {
    fn at<T>(&mut self, child: u32, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(child);
        let r = f(self);
        self.path.pop();
        r
    }

    fn unbound(&self, message: String) -> ResolveError {
        ResolveError::Unbound { path: self.path.clone(), message }
    }

    fn ty(&mut self, t: &Type, bound: &mut Vec<Name>) -> Result<Type, ResolveError> {
        Ok(match t {
            Type::Unit | Type::Eq(..) => t.clone(),
            Type::Var(x) => {
                if bound.contains(x) {
                    return Ok(t.clone());
                }
                match self.env.get(x) {
                    Some(Entry::Type(body)) => body.clone(),
                    Some(Entry::Def(..)) => return Err(self.unbound(format!("`{x}` is a definition, not a type"))),
                    Some(Entry::Failed) => return Err(ResolveError::Skip),
                    None => return Err(self.unbound(format!("unknown type `{x}`"))),
                }
            }
            Type::Prod(a, b) => Type::prod(self.at(0, |r| r.ty(a, bound))?, self.at(1, |r| r.ty(b, bound))?),
            Type::Sum(a, b) => Type::sum(self.at(0, |r| r.ty(a, bound))?, self.at(1, |r| r.ty(b, bound))?),
            Type::Arrow { binders, dom, cod } => Type::Arrow {
                binders: binders.clone(),
                dom: Arc::new(self.at(0, |r| r.ty(dom, bound))?),
                cod: Arc::new(self.at(1, |r| r.ty(cod, bound))?),
            },
            Type::Sigma { var, sort, body } => {
                Type::Sigma { var: var.clone(), sort: *sort, body: Arc::new(self.at(0, |r| r.ty(body, bound))?) }
            }
            Type::Lam(u, body) => Type::Lam(u.clone(), Arc::new(self.at(0, |r| r.ty(body, bound))?)),
            Type::App(h, m) => Type::App(Arc::new(self.at(0, |r| r.ty(h, bound))?), m.clone()),
            Type::Mu { var, kind, body } | Type::Nu { var, kind, body } => {
                let body = Arc::new(self.with_bound(bound, var, |r, b| r.at(0, |r| r.ty(body, b)))?);
                if matches!(t, Type::Mu { .. }) {
                    Type::Mu { var: var.clone(), kind: kind.clone(), body }
                } else {
                    Type::Nu { var: var.clone(), kind: kind.clone(), body }
                }
            }
            Type::Rec(st) => {
                let zero = self.at(0, |r| r.ty(&st.zero, bound))?;
                let suc = self.with_bound(bound, &st.tvar, |r, b| r.at(1, |r| r.ty(&st.suc, b)))?;
                Type::Rec(Arc::new(StratType {
                    kind: st.kind.clone(),
                    zero,
                    ivar: st.ivar.clone(),
                    tvar: st.tvar.clone(),
                    suc,
                }))
            }
        })
    }

    fn with_bound<T>(
        &mut self,
        bound: &mut Vec<Name>,
        names: &Name,
        f: impl FnOnce(&mut Self, &mut Vec<Name>) -> T,
    ) -> T {
        bound.push(names.clone());
        let r = f(self, bound);
        bound.pop();
        r
    }

    fn with_bound2<T>(
        &mut self,
        bound: &mut Vec<Name>,
        a: &Name,
        b: &Name,
        f: impl FnOnce(&mut Self, &mut Vec<Name>) -> T,
    ) -> T {
        bound.push(a.clone());
        bound.push(b.clone());
        let r = f(self, bound);
        bound.pop();
        bound.pop();
        r
    }

    fn term(&mut self, t: &Term, bound: &mut Vec<Name>) -> Result<Term, ResolveError> {
        let arc = |t: Term| Arc::new(t);
        Ok(match t {
            Term::Unit | Term::Refl => t.clone(),
            Term::Var(x) => {
                if bound.contains(x) {
                    return Ok(t.clone());
                }
                match self.env.get(x) {
                    Some(Entry::Def(ty, body)) => Term::annot(body.clone(), ty.clone()),
                    Some(Entry::Type(_)) => return Err(self.unbound(format!("`{x}` is a type, not a term"))),
                    Some(Entry::Failed) => return Err(ResolveError::Skip),
                    None => return Err(self.unbound(format!("unknown name `{x}`"))),
                }
            }
            Term::Fun(f) => {
                let form = match &f.form {
                    FunForm::Lam { ivars, var, body } => FunForm::Lam {
                        ivars: ivars.clone(),
                        var: var.clone(),
                        body: arc(self.with_bound(bound, var, |r, b| r.at(0, |r| r.term(body, b)))?),
                    },
                    FunForm::Rec { f, body } => FunForm::Rec {
                        f: f.clone(),
                        body: arc(self.with_bound(bound, f, |r, b| r.at(0, |r| r.term(body, b)))?),
                    },
                    FunForm::Corec { f, body } => FunForm::Corec {
                        f: f.clone(),
                        body: arc(self.with_bound(bound, f, |r, b| r.at(0, |r| r.term(body, b)))?),
                    },
                    FunForm::Ind { zero, ivar, f, suc } => FunForm::Ind {
                        zero: arc(self.at(0, |r| r.term(zero, bound))?),
                        ivar: ivar.clone(),
                        f: f.clone(),
                        suc: arc(self.with_bound(bound, f, |r, b| r.at(1, |r| r.term(suc, b)))?),
                    },
                };
                Term::Fun(Arc::new(Fun { form, sig: None }))
            }
            Term::App(f, spine, a) => {
                Term::App(arc(self.at(0, |r| r.term(f, bound))?), spine.clone(), arc(self.at(1, |r| r.term(a, bound))?))
            }
            Term::Pair(a, b) => Term::pair(self.at(0, |r| r.term(a, bound))?, self.at(1, |r| r.term(b, bound))?),
            Term::Split { scrut, left, right, body } => Term::Split {
                scrut: arc(self.at(0, |r| r.term(scrut, bound))?),
                left: left.clone(),
                right: right.clone(),
                body: arc(self.with_bound2(bound, left, right, |r, b| r.at(1, |r| r.term(body, b)))?),
            },
            Term::Case { scrut, left, left_body, right, right_body } => Term::Case {
                scrut: arc(self.at(0, |r| r.term(scrut, bound))?),
                left: left.clone(),
                left_body: arc(self.with_bound(bound, left, |r, b| r.at(1, |r| r.term(left_body, b)))?),
                right: right.clone(),
                right_body: arc(self.with_bound(bound, right, |r, b| r.at(2, |r| r.term(right_body, b)))?),
            },
            Term::Unpack { scrut, ivar, var, body } => Term::Unpack {
                scrut: arc(self.at(0, |r| r.term(scrut, bound))?),
                ivar: ivar.clone(),
                var: var.clone(),
                body: arc(self.with_bound(bound, var, |r, b| r.at(1, |r| r.term(body, b)))?),
            },
            Term::EqElim { scrut, unifier, body } => Term::EqElim {
                scrut: arc(self.at(0, |r| r.term(scrut, bound))?),
                unifier: unifier.clone(),
                body: arc(self.at(1, |r| r.term(body, bound))?),
            },
            Term::Annot(t, ty) => {
                let t = self.at(0, |r| r.term(t, bound))?;
                let ty = self.at(1, |r| r.ty(ty, &mut Vec::new()))?;
                Term::annot(t, ty)
            }
            Term::Inj(side, a) => Term::Inj(*side, arc(self.at(0, |r| r.term(a, bound))?)),
            Term::Pack(m, a) => Term::Pack(m.clone(), arc(self.at(0, |r| r.term(a, bound))?)),
            Term::EqAbort(a) => Term::EqAbort(arc(self.at(0, |r| r.term(a, bound))?)),
            Term::Fold(a) => Term::Fold(arc(self.at(0, |r| r.term(a, bound))?)),
            Term::OutNu(a) => Term::OutNu(arc(self.at(0, |r| r.term(a, bound))?)),
            Term::InjZero(a) => Term::InjZero(arc(self.at(0, |r| r.term(a, bound))?)),
            Term::InjSuc(a) => Term::InjSuc(arc(self.at(0, |r| r.term(a, bound))?)),
            Term::OutZero(a) => Term::OutZero(arc(self.at(0, |r| r.term(a, bound))?)),
            Term::OutSuc(a) => Term::OutSuc(arc(self.at(0, |r| r.term(a, bound))?)),
        })
    }
}

struct Ctx<'a> {
    file: &'a str,
    src: &'a str,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn push(&mut self, span: Span, code: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(self.file, self.src, span, code, message));
    }

    fn resolve_error(&mut self, e: ResolveError, spans: &SpanTree) {
        if let ResolveError::Unbound { path, message } = e {
            self.push(spans.locate(&path), "scope", message);
        }
    }

    fn kind_error(&mut self, e: KindError, spans: &SpanTree) {
        self.push(spans.locate(&e.path), format!("kind/{}", e.reason.code()), e.detail);
    }

    fn type_error(&mut self, e: TypeError, spans: &SpanTree) {
        let d = Diagnostic::error(
            self.file,
            self.src,
            spans.locate(&e.path),
            format!("type/{}", e.reason.code()),
            e.detail,
        )
        .with_expected_found(e.expected.as_deref().map(print_type), e.found.as_deref().map(print_type));
        self.diags.push(d);
    }
}

/// Checks every declaration of `program` in order. Declarations that fail,
/// or depend on one that failed, are left out of the result.
pub fn elaborate(program: &Program, file: &str, src: &str, opts: &ElabOptions) -> (Elaborated, Vec<Diagnostic>) {
    let mut env: HashMap<Name, Entry> = HashMap::new();
    let mut seen = BTreeSet::new();
    let mut out = Elaborated::default();
    let mut cx = Ctx { file, src, diags: Vec::new() };
    let (ictx, tctx, ctx) = (IndexCtx::new(), TypeVarCtx::new(), TypingCtx::new());

    for decl in &program.decls {
        if !seen.insert(decl.name.clone()) {
            cx.push(decl.name_span, "duplicate_decl", format!("`{}` is declared more than once", decl.name));
            continue;
        }
        let mut resolver = Resolver { env: &env, path: Vec::new() };
        let entry = match &decl.body {
            DeclBody::Type { kind, body, body_spans, .. } => match resolver.ty(body, &mut Vec::new()) {
                Err(e) => {
                    cx.resolve_error(e, body_spans);
                    Entry::Failed
                }
                Ok(body) if body.size() > opts.size_limit => {
                    cx.push(decl.name_span, "size_limit", size_message(body.size(), opts.size_limit));
                    Entry::Failed
                }
                Ok(body) => match kind_check(&ictx, &tctx, &body, kind) {
                    Err(e) => {
                        cx.kind_error(e, body_spans);
                        Entry::Failed
                    }
                    Ok(()) => {
                        out.items.push((decl.name.clone(), Item::Type { kind: kind.clone(), body: body.clone() }));
                        Entry::Type(body)
                    }
                },
            },
            DeclBody::Def { ty, ty_spans, body, body_spans } => {
                let resolved = resolver.ty(ty, &mut Vec::new()).map_err(|e| (e, ty_spans)).and_then(|ty| {
                    let mut r = Resolver { env: &env, path: Vec::new() };
                    r.term(body, &mut Vec::new()).map(|b| (ty, b)).map_err(|e| (e, body_spans))
                });
                match resolved {
                    Err((e, spans)) => {
                        cx.resolve_error(e, spans);
                        Entry::Failed
                    }
                    Ok((ty, body)) => {
                        let size = ty.size() + body.size();
                        if size > opts.size_limit {
                            cx.push(decl.name_span, "size_limit", size_message(size, opts.size_limit));
                            Entry::Failed
                        } else if let Err(e) = kind_check(&ictx, &tctx, &ty, &Kind::Star) {
                            cx.kind_error(e, ty_spans);
                            Entry::Failed
                        } else {
                            match elaborate_check(&ictx, &tctx, &ctx, &body, &ty) {
                                Err(e) => {
                                    cx.type_error(e, body_spans);
                                    Entry::Failed
                                }
                                Ok(body) => {
                                    out.items
                                        .push((decl.name.clone(), Item::Def { ty: ty.clone(), body: body.clone() }));
                                    Entry::Def(ty, body)
                                }
                            }
                        }
                    }
                }
            }
        };
        env.insert(decl.name.clone(), entry);
    }
    (out, cx.diags)
}

fn size_message(size: usize, limit: usize) -> String {
    format!("declaration grows to {size} nodes after inlining, above the limit of {limit}")
}
