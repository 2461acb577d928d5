//! Environment-based big-step evaluation with a fuel budget.
//!
//! Every rule application costs one unit of fuel. `corec` applications
//! suspend into thunks that are unfolded one step by each `out_nu`; thunks
//! are not memoised, so observing the same stream twice recomputes it.

mod valtype;
mod value;

pub use valtype::{env_check, value_check};
pub use value::{Closure, IndexEnv, Value, ValueEnv};

use std::fmt;
use std::sync::Arc;

use crate::index::{match_subst, subst_apply, IndexSubst, IndexTerm, MatchResult};
use crate::syntax::{FunForm, Term, Type};
use crate::typing::unfold_fix;

/// Fuel used when none is given.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum EvalOutcome {
    Value(Value),
    FuelExhausted,
    /// Evaluation got stuck; impossible for well-typed programs.
    InternalError(String),
}

impl EvalOutcome {
    pub fn value(self) -> Option<Value> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Why evaluation stopped early.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halt {
    FuelExhausted,
    Internal(String),
}

impl From<Result<Value, Halt>> for EvalOutcome {
    fn from(r: Result<Value, Halt>) -> Self {
        match r {
            Ok(v) => EvalOutcome::Value(v),
            Err(Halt::FuelExhausted) => EvalOutcome::FuelExhausted,
            Err(Halt::Internal(msg)) => EvalOutcome::InternalError(msg),
        }
    }
}

/// One rule application, as reported to a trace sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: &'static str,
    pub head: &'static str,
    pub ienv_len: usize,
    pub venv_len: usize,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<12} {:<8} |θ|={} |σ|={}", self.rule, self.head, self.ienv_len, self.venv_len)
    }
}

type R = Result<Value, Halt>;

fn internal(msg: impl Into<String>) -> Halt {
    Halt::Internal(msg.into())
}

/// Evaluator state: remaining fuel and an optional trace sink.
pub struct Machine<'a> {
    fuel: u64,
    used: u64,
    trace: Option<&'a mut dyn FnMut(&TraceEvent)>,
}

impl<'a> Machine<'a> {
    pub fn new(fuel: u64) -> Self {
        Machine { fuel, used: 0, trace: None }
    }

    pub fn with_trace(fuel: u64, sink: &'a mut dyn FnMut(&TraceEvent)) -> Self {
        Machine { fuel, used: 0, trace: Some(sink) }
    }

    /// Rule applications performed so far.
    pub fn steps(&self) -> u64 {
        self.used
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self, rule: &'static str, head: &'static str, ienv: &IndexEnv, venv: &ValueEnv) -> Result<(), Halt> {
        if self.fuel == 0 {
            return Err(Halt::FuelExhausted);
        }
        self.fuel -= 1;
        self.used += 1;
        if let Some(sink) = self.trace.as_mut() {
            sink(&TraceEvent { rule, head, ienv_len: ienv.len(), venv_len: venv.len() });
        }
        Ok(())
    }

    fn ground(&self, m: &IndexTerm, ienv: &IndexEnv) -> Result<IndexTerm, Halt> {
        let n = subst_apply(m, ienv);
        if n.is_ground() {
            Ok(n)
        } else {
            Err(internal(format!("index term `{m}` is not closed by the index environment")))
        }
    }

    fn closure(&self, v: Value, what: &str) -> Result<Arc<Closure>, Halt> {
        match v {
            Value::Closure(c) => Ok(c),
            other => Err(internal(format!("{what}: expected a closure, found {}", other.head()))),
        }
    }

    /// `θ; σ ⊢ t ⇓ v`.
    pub fn eval(&mut self, t: &Term, ienv: &IndexEnv, venv: &ValueEnv) -> R {
        self.tick("eval", t.head(), ienv, venv)?;
        match t {
            Term::Var(x) => venv.lookup(x).cloned().ok_or_else(|| internal(format!("unbound variable `{x}`"))),
            Term::Unit => Ok(Value::Unit),
            Term::Fun(f) => {
                Ok(Value::Closure(Arc::new(Closure::Fn { code: f.clone(), ienv: ienv.clone(), venv: venv.clone() })))
            }
            Term::App(f, spine, arg) => {
                let fv = self.eval(f, ienv, venv)?;
                let c = self.closure(fv, "application")?;
                let v = self.eval(arg, ienv, venv)?;
                let spine = spine.iter().map(|m| self.ground(m, ienv)).collect::<Result<Vec<_>, _>>()?;
                self.apply(&c, &spine, v)
            }
            Term::Pair(a, b) => {
                let va = self.eval(a, ienv, venv)?;
                let vb = self.eval(b, ienv, venv)?;
                Ok(Value::pair(va, vb))
            }
            Term::Split { scrut, left, right, body } => match self.eval(scrut, ienv, venv)? {
                Value::Pair(a, b) => {
                    let env = venv.extended(left.clone(), (*a).clone()).extended(right.clone(), (*b).clone());
                    self.eval(body, ienv, &env)
                }
                other => Err(internal(format!("split: expected a pair, found {}", other.head()))),
            },
            Term::Inj(side, t) => Ok(Value::inj(*side, self.eval(t, ienv, venv)?)),
            Term::Case { scrut, left, left_body, right, right_body } => match self.eval(scrut, ienv, venv)? {
                Value::Inj(crate::syntax::Side::Left, v) => {
                    self.eval(left_body, ienv, &venv.extended(left.clone(), (*v).clone()))
                }
                Value::Inj(crate::syntax::Side::Right, v) => {
                    self.eval(right_body, ienv, &venv.extended(right.clone(), (*v).clone()))
                }
                other => Err(internal(format!("case: expected an injection, found {}", other.head()))),
            },
            Term::Pack(m, t) => {
                let n = self.ground(m, ienv)?;
                Ok(Value::pack(n, self.eval(t, ienv, venv)?))
            }
            Term::Unpack { scrut, ivar, var, body } => match self.eval(scrut, ienv, venv)? {
                Value::Pack(n, v) => {
                    let ienv2 = ienv.extended(n, ivar.clone());
                    self.eval(body, &ienv2, &venv.extended(var.clone(), (*v).clone()))
                }
                other => Err(internal(format!("unpack: expected a package, found {}", other.head()))),
            },
            Term::Refl => Ok(Value::Refl),
            Term::EqElim { scrut, unifier, body } => {
                match self.eval(scrut, ienv, venv)? {
                    Value::Refl => {}
                    other => return Err(internal(format!("eqelim: expected refl, found {}", other.head()))),
                }
                let Some(u) = unifier else {
                    return Err(internal("eqelim without a unifier; elaborate the term first"));
                };
                match match_subst(&u.ctx, &u.subst, ienv) {
                    MatchResult::Matched { ctx, subst } if ctx.is_empty() => self.eval(body, &subst, venv),
                    _ => Err(internal(format!("eqelim: unifier {} does not match {}", u.subst, ienv))),
                }
            }
            Term::EqAbort(_) => Err(internal("eqabort reached at runtime")),
            Term::Fold(t) => Ok(Value::fold(self.eval(t, ienv, venv)?)),
            Term::InjZero(t) => Ok(Value::inj_zero(self.eval(t, ienv, venv)?)),
            Term::InjSuc(t) => Ok(Value::inj_suc(self.eval(t, ienv, venv)?)),
            Term::OutZero(t) => match self.eval(t, ienv, venv)? {
                Value::InjZero(v) => Ok((*v).clone()),
                other => Err(internal(format!("out0: expected inj0, found {}", other.head()))),
            },
            Term::OutSuc(t) => match self.eval(t, ienv, venv)? {
                Value::InjSuc(v) => Ok((*v).clone()),
                other => Err(internal(format!("outs: expected injs, found {}", other.head()))),
            },
            Term::OutNu(t) => {
                let v = self.eval(t, ienv, venv)?;
                let c = self.closure(v, "out_nu")?;
                self.force_out(&c)
            }
            Term::Annot(t, _) => self.eval(t, ienv, venv),
        }
    }

    /// `apply(c, N⃗, v)`.
    pub fn apply(&mut self, c: &Arc<Closure>, spine: &[IndexTerm], v: Value) -> R {
        let Closure::Fn { code, ienv, venv } = &**c else {
            return Err(internal("cannot apply a suspended corecursive call"));
        };
        match &code.form {
            FunForm::Lam { ivars, var, body } => {
                self.tick("apply", "fn", ienv, venv)?;
                if ivars.len() != spine.len() {
                    return Err(internal("index argument count does not match the function"));
                }
                let mut ienv2 = ienv.clone();
                for (n, u) in spine.iter().zip(ivars) {
                    ienv2.push(n.clone(), u.clone());
                }
                self.eval(body, &ienv2, &venv.extended(var.clone(), v))
            }
            FunForm::Rec { f, body } => {
                self.tick("apply", "rec", ienv, venv)?;
                let Value::Fold(inner) = v else {
                    return Err(internal(format!("rec: expected a folded argument, found {}", v.head())));
                };
                let step = self.eval(body, ienv, &venv.extended(f.clone(), Value::Closure(c.clone())))?;
                let step = self.closure(step, "rec body")?;
                self.apply(&step, spine, (*inner).clone())
            }
            FunForm::Corec { .. } => {
                self.tick("apply", "corec", ienv, venv)?;
                Ok(Value::Closure(Arc::new(Closure::Thunk { corec: c.clone(), spine: spine.to_vec(), arg: v })))
            }
            FunForm::Ind { zero, ivar, f, suc } => {
                self.tick("apply", "ind", ienv, venv)?;
                if !matches!(v, Value::Unit) {
                    return Err(internal("ind: expected a unit argument"));
                }
                match spine {
                    [IndexTerm::Zero] => self.eval(zero, ienv, venv),
                    [IndexTerm::Suc(pred)] => {
                        let pred = (**pred).clone();
                        let below = self.apply(c, std::slice::from_ref(&pred), Value::Unit)?;
                        let ienv2 = ienv.extended(pred, ivar.clone());
                        self.eval(suc, &ienv2, &venv.extended(f.clone(), below))
                    }
                    _ => Err(internal("ind: expected one ground index argument")),
                }
            }
        }
    }

    /// Observe up to `k` heads of a stream of `<head, tail>` observations.
    pub fn take(&mut self, stream: &Value, k: usize) -> Result<Vec<Value>, Halt> {
        let mut cur = stream.clone();
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let c = self.closure(cur, "take")?;
            match self.force_out(&c)? {
                Value::Pair(h, t) => {
                    out.push((*h).clone());
                    cur = (*t).clone();
                }
                other => {
                    return Err(internal(format!("stream observation is not a <head, tail> pair but {}", other.head())))
                }
            }
        }
        Ok(out)
    }

    /// Unfold a suspended corecursive call by one observation.
    pub fn force_out(&mut self, c: &Arc<Closure>) -> R {
        let Closure::Thunk { corec, spine, arg } = &**c else {
            return Err(internal(format!("out_nu: expected a corecursive value, found {}", c.head())));
        };
        let Closure::Fn { code, ienv, venv } = &**corec else {
            return Err(internal("out_nu: malformed suspension"));
        };
        let FunForm::Corec { f, body } = &code.form else {
            return Err(internal("out_nu: suspension does not hold a corec"));
        };
        self.tick("force", "corec", ienv, venv)?;
        let step = self.eval(body, ienv, &venv.extended(f.clone(), Value::Closure(corec.clone())))?;
        let step = self.closure(step, "corec body")?;
        self.apply(&step, spine, arg.clone())
    }
}

/// Evaluate `t` under `θ` and `σ` with the given fuel.
pub fn eval(t: &Term, ienv: &IndexEnv, venv: &ValueEnv, fuel: u64) -> EvalOutcome {
    Machine::new(fuel).eval(t, ienv, venv).into()
}

/// Apply a closure to index arguments and an argument.
pub fn apply(c: &Arc<Closure>, spine: &[IndexTerm], v: Value, fuel: u64) -> EvalOutcome {
    Machine::new(fuel).apply(c, spine, v).into()
}

/// Observe a corecursive value once.
pub fn force_out(c: &Arc<Closure>, fuel: u64) -> EvalOutcome {
    Machine::new(fuel).force_out(c).into()
}

/// Stack size for threads running the evaluator; evaluation recurses on the
/// structure of values.
pub const EVAL_STACK: usize = 256 << 20;

/// Run `f` on a fresh thread with [`EVAL_STACK`] bytes of stack. `None` if
/// the thread could not be started or panicked.
pub fn on_eval_stack<T, F>(f: F) -> Option<T>
where
    T: Send + 'static,
    F: FnOnce() -> T + Send + 'static,
{
    std::thread::Builder::new().stack_size(EVAL_STACK).spawn(f).ok()?.join().ok()
}

/// A closed coinductive type whose observations are `<head, tail>` pairs.
pub fn is_pair_stream(ty: &Type) -> bool {
    match ty.spine_head_form() {
        (head @ Type::Nu { var, body, .. }, args) => {
            matches!(unfold_fix(head, var, body, &args), Type::Prod(..))
        }
        _ => false,
    }
}

/// Evaluate a closed term, also reporting the number of rule applications.
pub fn eval_closed(t: &Term, fuel: u64) -> (EvalOutcome, u64) {
    let mut m = Machine::new(fuel);
    let r = m.eval(t, &IndexSubst::new(), &ValueEnv::new());
    (r.into(), m.steps())
}

/// Observe up to `k` elements of a stream whose observations are pairs
/// `<head, tail>`, returning the heads.
pub fn take_stream(stream: &Value, k: usize, fuel: u64) -> Result<Vec<Value>, EvalOutcome> {
    Machine::new(fuel).take(stream, k).map_err(|h| Err::<Value, Halt>(h).into())
}
