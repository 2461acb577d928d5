//! Pretty printer producing concrete syntax that the parser reads back.

use crate::index::{IndexCtx, IndexSubst, IndexTerm};
use crate::machine::{Closure, Value};
use crate::syntax::{FunForm, Kind, Side, Term, Type};

use super::parser::{Decl, DeclBody, Program};

// Type precedence levels.
const T_TOP: u8 = 0;
const T_SUM: u8 = 1;
const T_PROD: u8 = 2;
const T_APP: u8 = 3;
const T_ATOM: u8 = 4;

// Term precedence levels.
const E_TOP: u8 = 0;
const E_PREFIX: u8 = 1;
const E_APP: u8 = 2;
const E_ATOM: u8 = 3;

pub fn print_kind(k: &Kind) -> String {
    match k {
        Kind::Star => "*".into(),
        Kind::Pi(u, s, body) => format!("Pi {u}:{s}. {}", print_kind(body)),
    }
}

/// Index terms; ground ones print as numerals.
pub fn print_index(m: &IndexTerm) -> String {
    match (m.as_nat(), m) {
        (Some(k), _) => k.to_string(),
        (None, IndexTerm::Suc(n)) => format!("suc {}", index_atom(n)),
        (None, _) => m.to_string(),
    }
}

fn index_atom(m: &IndexTerm) -> String {
    match (m.as_nat(), m) {
        (None, IndexTerm::Suc(_)) => format!("({})", print_index(m)),
        _ => print_index(m),
    }
}

fn print_ictx(ctx: &IndexCtx) -> String {
    ctx.entries().iter().map(|(u, s)| format!("{u}:{s}")).collect::<Vec<_>>().join(", ")
}

fn print_subst(s: &IndexSubst) -> String {
    let entries = s.entries().iter().map(|(m, u)| format!("{}/{u}", print_index(m))).collect::<Vec<_>>();
    format!("[{}]", entries.join(", "))
}

pub fn print_type(t: &Type) -> String {
    ty(t, T_TOP)
}

fn paren(s: String, wrap: bool) -> String {
    if wrap {
        format!("({s})")
    } else {
        s
    }
}

fn ty(t: &Type, prec: u8) -> String {
    match t {
        Type::Unit => "unit".into(),
        Type::Var(x) => x.to_string(),
        Type::Arrow { binders, dom, cod } => {
            let s = if binders.is_empty() {
                format!("{} -> {}", ty(dom, T_SUM), ty(cod, T_TOP))
            } else {
                let bs = binders.iter().map(|(u, s)| format!("{u}:{s}")).collect::<Vec<_>>().join(", ");
                format!("({bs} | {}) -> {}", ty(dom, T_TOP), ty(cod, T_TOP))
            };
            paren(s, prec > T_TOP)
        }
        Type::Sigma { var, sort, body } => paren(format!("Sig {var}:{sort}. {}", ty(body, T_TOP)), prec > T_TOP),
        Type::Lam(u, body) => paren(format!("Lam {u}. {}", ty(body, T_TOP)), prec > T_TOP),
        Type::Mu { var, kind, body } => {
            paren(format!("mu {var} : {}. {}", print_kind(kind), ty(body, T_TOP)), prec > T_TOP)
        }
        Type::Nu { var, kind, body } => {
            paren(format!("nu {var} : {}. {}", print_kind(kind), ty(body, T_TOP)), prec > T_TOP)
        }
        Type::Sum(a, b) => paren(format!("{} + {}", ty(a, T_SUM), ty(b, T_PROD)), prec > T_SUM),
        Type::Prod(a, b) => paren(format!("{} * {}", ty(a, T_PROD), ty(b, T_APP)), prec > T_PROD),
        Type::Eq(m, n) => paren(format!("{} == {}", print_index(m), print_index(n)), prec > T_PROD),
        Type::App(h, m) => paren(format!("{} {}", ty(h, T_APP), index_atom(m)), prec > T_APP),
        Type::Rec(st) => {
            let kind = match st.kind {
                Kind::Star => "*".to_string(),
                _ => format!("({})", print_kind(&st.kind)),
            };
            let s = format!(
                "Rec {kind} (0 => {} | suc {}, {} => {})",
                ty(&st.zero, T_TOP),
                st.ivar,
                st.tvar,
                ty(&st.suc, T_TOP)
            );
            paren(s, prec > T_ATOM)
        }
    }
}

pub fn print_term(t: &Term) -> String {
    term(t, E_TOP)
}

/// Does the printed form of `t` end in a `case` whose last branch would
/// swallow a following `| ...`?
fn ends_in_open_case(t: &Term) -> bool {
    match t {
        Term::Case { .. } => true,
        Term::Fun(f) => match &f.form {
            FunForm::Lam { body, .. } | FunForm::Rec { body, .. } | FunForm::Corec { body, .. } => {
                ends_in_open_case(body)
            }
            FunForm::Ind { .. } => false,
        },
        Term::Split { body, .. } | Term::Unpack { body, .. } | Term::EqElim { body, .. } => ends_in_open_case(body),
        Term::Inj(_, t)
        | Term::EqAbort(t)
        | Term::Fold(t)
        | Term::OutNu(t)
        | Term::InjZero(t)
        | Term::InjSuc(t)
        | Term::OutZero(t)
        | Term::OutSuc(t)
        | Term::Pack(_, t) => ends_in_open_case(t),
        _ => false,
    }
}

fn branch(t: &Term) -> String {
    if ends_in_open_case(t) {
        format!("({})", term(t, E_TOP))
    } else {
        term(t, E_TOP)
    }
}

fn prefix(kw: &str, t: &Term, prec: u8) -> String {
    paren(format!("{kw} {}", term(t, E_PREFIX)), prec > E_PREFIX)
}

fn term(t: &Term, prec: u8) -> String {
    match t {
        Term::Var(x) => x.to_string(),
        Term::Unit => "<>".into(),
        Term::Refl => "refl".into(),
        Term::Pair(a, b) => format!("<{}, {}>", term(a, E_TOP), term(b, E_TOP)),
        Term::Annot(t, ty) => format!("({} : {})", term(t, E_TOP), print_type(ty)),
        Term::Fun(f) => match &f.form {
            FunForm::Lam { ivars, var, body } => {
                let head = if ivars.is_empty() {
                    format!("fn {var}")
                } else {
                    format!("fn ({} | {var})", ivars.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(", "))
                };
                paren(format!("{head} => {}", term(body, E_TOP)), prec > E_TOP)
            }
            FunForm::Rec { f, body } => paren(format!("rec {f} => {}", term(body, E_TOP)), prec > E_TOP),
            FunForm::Corec { f, body } => paren(format!("corec {f} => {}", term(body, E_TOP)), prec > E_TOP),
            FunForm::Ind { zero, ivar, f, suc } => {
                format!("ind (0 => {} | suc {ivar}, {f} => {})", branch(zero), term(suc, E_TOP))
            }
        },
        Term::App(f, spine, arg) => {
            let s = if spine.is_empty() {
                format!("{} {}", term(f, E_APP), term(arg, E_ATOM))
            } else {
                let sp = spine.iter().map(print_index).collect::<Vec<_>>().join(", ");
                format!("{} [{sp}] {}", term(f, E_APP), term(arg, E_ATOM))
            };
            paren(s, prec > E_APP)
        }
        Term::Split { scrut, left, right, body } => paren(
            format!("split {} as ({left}, {right}) in {}", term(scrut, E_PREFIX), term(body, E_TOP)),
            prec > E_TOP,
        ),
        Term::Case { scrut, left, left_body, right, right_body } => paren(
            format!(
                "case {} of inl {left} => {} | inr {right} => {}",
                term(scrut, E_PREFIX),
                branch(left_body),
                term(right_body, E_TOP)
            ),
            prec > E_TOP,
        ),
        Term::Unpack { scrut, ivar, var, body } => {
            paren(format!("unpack {} as ({ivar}, {var}) in {}", term(scrut, E_PREFIX), term(body, E_TOP)), prec > E_TOP)
        }
        Term::EqElim { scrut, unifier, body } => {
            let with = match unifier {
                Some(u) => format!(" with ({} | {})", print_ictx(&u.ctx), print_subst(&u.subst)),
                None => String::new(),
            };
            paren(format!("eqelim {}{with} in {}", term(scrut, E_PREFIX), term(body, E_TOP)), prec > E_TOP)
        }
        Term::Inj(Side::Left, t) => prefix("inl", t, prec),
        Term::Inj(Side::Right, t) => prefix("inr", t, prec),
        Term::Pack(m, t) => paren(format!("pack [{}] {}", print_index(m), term(t, E_PREFIX)), prec > E_PREFIX),
        Term::EqAbort(t) => prefix("eqabort", t, prec),
        Term::Fold(t) => prefix("fold", t, prec),
        Term::OutNu(t) => prefix("out_nu", t, prec),
        Term::InjZero(t) => prefix("inj0", t, prec),
        Term::InjSuc(t) => prefix("injs", t, prec),
        Term::OutZero(t) => prefix("out0", t, prec),
        Term::OutSuc(t) => prefix("outs", t, prec),
    }
}

pub fn print_decl(d: &Decl) -> String {
    match &d.body {
        DeclBody::Type { kind, body, .. } => format!("type {} : {} = {}", d.name, print_kind(kind), print_type(body)),
        DeclBody::Def { ty, body, .. } => format!("def {} : {} =\n  {}", d.name, print_type(ty), print_term(body)),
    }
}

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&print_decl(d));
        out.push('\n');
    }
    out
}

pub fn print_value(v: &Value) -> String {
    value(v, false)
}

fn value(v: &Value, arg: bool) -> String {
    let wrap = |s: String| if arg { format!("({s})") } else { s };
    match v {
        Value::Unit => "<>".into(),
        Value::Refl => "refl".into(),
        Value::Pair(a, b) => format!("<{}, {}>", value(a, false), value(b, false)),
        Value::Inj(Side::Left, a) => wrap(format!("inl {}", value(a, true))),
        Value::Inj(Side::Right, a) => wrap(format!("inr {}", value(a, true))),
        Value::Pack(m, a) => wrap(format!("pack [{}] {}", print_index(m), value(a, true))),
        Value::Fold(a) => wrap(format!("fold {}", value(a, true))),
        Value::InjZero(a) => wrap(format!("inj0 {}", value(a, true))),
        Value::InjSuc(a) => wrap(format!("injs {}", value(a, true))),
        Value::Closure(c) => match &**c {
            Closure::Fn { code, .. } => format!("<closure {}>", code.head()),
            Closure::Thunk { .. } => "<thunk corec>".into(),
        },
    }
}
