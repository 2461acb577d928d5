//! Value typing `v : T` and environment typing `σ : Γ` for closed types.

use std::sync::Arc;

use super::value::{Closure, IndexEnv, Value, ValueEnv};
use crate::index::{spine_check, subst_check, IndexCtx, IndexSubst, IndexTerm};
use crate::syntax::{Fun, FunForm, Side, Type, TypingCtx};
use crate::typing::{apply_inst, recheck_fun, unfold_fix, unfold_suc};

/// `v : T`.
pub fn value_check(v: &Value, ty: &Type) -> bool {
    match v {
        Value::Unit => matches!(ty, Type::Unit),
        Value::Pair(a, b) => match ty {
            Type::Prod(ta, tb) => value_check(a, ta) && value_check(b, tb),
            _ => false,
        },
        Value::Inj(side, a) => match (side, ty) {
            (Side::Left, Type::Sum(t, _)) | (Side::Right, Type::Sum(_, t)) => value_check(a, t),
            _ => false,
        },
        Value::Pack(m, a) => match ty {
            Type::Sigma { var, body, .. } => {
                m.is_ground() && value_check(a, &body.apply_isubst(&IndexSubst::single(m.clone(), var.clone())))
            }
            _ => false,
        },
        Value::Refl => match ty {
            Type::Eq(m, n) => m.is_ground() && m == n,
            _ => false,
        },
        Value::Fold(a) => {
            let (head, args) = ty.spine_head_form();
            match head {
                Type::Mu { var, body, .. } => {
                    args.iter().all(IndexTerm::is_ground) && value_check(a, &unfold_fix(head, var, body, &args))
                }
                _ => false,
            }
        }
        Value::InjZero(a) => {
            let (head, args) = ty.spine_head_form();
            match (head, args.first()) {
                (Type::Rec(st), Some(IndexTerm::Zero)) => value_check(a, &st.zero.instantiate(&args[1..])),
                _ => false,
            }
        }
        Value::InjSuc(a) => {
            let (head, args) = ty.spine_head_form();
            match (head, args.first()) {
                (Type::Rec(st), Some(IndexTerm::Suc(n))) if n.is_ground() => {
                    value_check(a, &unfold_suc(st, n).instantiate(&args[1..]))
                }
                _ => false,
            }
        }
        Value::Closure(c) => closure_check(c, ty),
    }
}

/// `σ : Γ`, pointwise over the visible bindings of `σ`.
pub fn env_check(venv: &ValueEnv, ctx: &TypingCtx) -> bool {
    let bindings = venv.bindings();
    bindings.len() == ctx.len()
        && bindings.iter().zip(ctx.entries()).all(|((x, v), (y, t))| x == y && value_check(v, t))
}

fn closure_check(c: &Arc<Closure>, ty: &Type) -> bool {
    match &**c {
        Closure::Fn { code, ienv, venv } => fn_type(code, ienv, venv).is_some_and(|t| t.alpha_eq(ty)),
        Closure::Thunk { corec, spine, arg } => {
            let Closure::Fn { code, ienv, venv } = &**corec else {
                return false;
            };
            if !matches!(code.form, FunForm::Corec { .. }) {
                return false;
            }
            let Some(Type::Arrow { binders, dom, cod }) = fn_type(code, ienv, venv) else {
                return false;
            };
            if !spine_check(&IndexCtx::new(), spine, &binders) {
                return false;
            }
            let theta = IndexSubst::from_spine(spine, &binders);
            cod.apply_isubst(&theta).alpha_eq(ty) && value_check(arg, &dom.apply_isubst(&theta))
        }
    }
}

/// The closed type of `code[θ; σ]`, if the closure is well typed.
fn fn_type(code: &Arc<Fun>, ienv: &IndexEnv, venv: &ValueEnv) -> Option<Type> {
    let sig = code.sig.as_ref()?;
    if !subst_check(&IndexCtx::new(), ienv, &sig.ictx) || !recheck_fun(sig, code) {
        return None;
    }
    let ctx = TypingCtx::from_entries(
        sig.ctx.entries().iter().map(|(x, t)| (x.clone(), apply_inst(&sig.inst, t).apply_isubst(ienv))).collect(),
    );
    if !env_check(venv, &ctx) {
        return None;
    }
    Some(apply_inst(&sig.inst, &sig.ty).apply_isubst(ienv))
}
