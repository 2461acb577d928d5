//! Reference interpreter: big-step evaluation by substitution on a private
//! copy of the syntax. It shares no evaluation code with the library; only
//! the conversion from library terms touches library types.
//!
//! Values are closed terms, so substituting them never captures.

use std::rc::Rc;

use tores::index::IndexTerm;
use tores::machine::Value;
use tores::syntax::{FunForm, Side, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ix {
    Z,
    S(Box<Ix>),
    V(String),
}

impl Ix {
    fn ground(&self) -> bool {
        match self {
            Ix::Z => true,
            Ix::S(m) => m.ground(),
            Ix::V(_) => false,
        }
    }

    fn subst(&self, u: &str, n: &Ix) -> Ix {
        match self {
            Ix::Z => Ix::Z,
            Ix::S(m) => Ix::S(Box::new(m.subst(u, n))),
            Ix::V(v) if v == u => n.clone(),
            Ix::V(_) => self.clone(),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Ix::Z => Some(0),
            Ix::S(m) => m.to_u64().map(|k| k + 1),
            Ix::V(_) => None,
        }
    }
}

type E = Rc<Ex>;

#[derive(Clone, Debug, PartialEq)]
pub enum Ex {
    Var(String),
    Unit,
    Lam(Vec<String>, String, E),
    Rec(String, E),
    Corec(String, E),
    Ind(E, String, String, E),
    App(E, Vec<Ix>, E),
    Pair(E, E),
    Split(E, String, String, E),
    Inl(E),
    Inr(E),
    Case(E, String, E, String, E),
    Pack(Ix, E),
    Unpack(E, String, String, E),
    Refl,
    /// Equality elimination: `binders` are bound in `body` and in the
    /// patterns; each pattern is matched against its target at runtime.
    EqElim {
        scrut: E,
        binders: Vec<String>,
        pending: Vec<(Ix, Ix)>,
        body: E,
    },
    EqAbort(E),
    Fold(E),
    OutNu(E),
    InjZero(E),
    InjSuc(E),
    OutZero(E),
    OutSuc(E),
    /// A suspended corecursive call (values only).
    Thunk(E, Vec<Ix>, E),
}

fn ix(m: &IndexTerm) -> Ix {
    match m {
        IndexTerm::Zero => Ix::Z,
        IndexTerm::Suc(n) => Ix::S(Box::new(ix(n))),
        IndexTerm::Var(u) => Ix::V(u.to_string()),
    }
}

/// Convert an elaborated library term.
pub fn from_term(t: &Term) -> E {
    let s = |n: &tores::Name| n.to_string();
    Rc::new(match t {
        Term::Var(x) => Ex::Var(s(x)),
        Term::Unit => Ex::Unit,
        Term::Refl => Ex::Refl,
        Term::Fun(f) => match &f.form {
            FunForm::Lam { ivars, var, body } => Ex::Lam(ivars.iter().map(s).collect(), s(var), from_term(body)),
            FunForm::Rec { f, body } => Ex::Rec(s(f), from_term(body)),
            FunForm::Corec { f, body } => Ex::Corec(s(f), from_term(body)),
            FunForm::Ind { zero, ivar, f, suc } => Ex::Ind(from_term(zero), s(ivar), s(f), from_term(suc)),
        },
        Term::App(f, spine, a) => Ex::App(from_term(f), spine.iter().map(ix).collect(), from_term(a)),
        Term::Pair(a, b) => Ex::Pair(from_term(a), from_term(b)),
        Term::Split { scrut, left, right, body } => Ex::Split(from_term(scrut), s(left), s(right), from_term(body)),
        Term::Inj(Side::Left, a) => Ex::Inl(from_term(a)),
        Term::Inj(Side::Right, a) => Ex::Inr(from_term(a)),
        Term::Case { scrut, left, left_body, right, right_body } => {
            Ex::Case(from_term(scrut), s(left), from_term(left_body), s(right), from_term(right_body))
        }
        Term::Pack(m, a) => Ex::Pack(ix(m), from_term(a)),
        Term::Unpack { scrut, ivar, var, body } => Ex::Unpack(from_term(scrut), s(ivar), s(var), from_term(body)),
        Term::EqElim { scrut, unifier, body } => {
            let u = unifier.as_ref().expect("oracle needs elaborated terms");
            Ex::EqElim {
                scrut: from_term(scrut),
                binders: u.ctx.names().map(s).collect(),
                pending: u.subst.entries().iter().map(|(m, v)| (ix(m), Ix::V(s(v)))).collect(),
                body: from_term(body),
            }
        }
        Term::EqAbort(a) => Ex::EqAbort(from_term(a)),
        Term::Fold(a) => Ex::Fold(from_term(a)),
        Term::OutNu(a) => Ex::OutNu(from_term(a)),
        Term::InjZero(a) => Ex::InjZero(from_term(a)),
        Term::InjSuc(a) => Ex::InjSuc(from_term(a)),
        Term::OutZero(a) => Ex::OutZero(from_term(a)),
        Term::OutSuc(a) => Ex::OutSuc(from_term(a)),
        Term::Annot(a, _) => return from_term(a),
    })
}

/// Convert a first-order machine value; closures have no counterpart.
pub fn from_value(v: &Value) -> Option<E> {
    Some(Rc::new(match v {
        Value::Unit => Ex::Unit,
        Value::Refl => Ex::Refl,
        Value::Pair(a, b) => Ex::Pair(from_value(a)?, from_value(b)?),
        Value::Inj(Side::Left, a) => Ex::Inl(from_value(a)?),
        Value::Inj(Side::Right, a) => Ex::Inr(from_value(a)?),
        Value::Pack(m, a) => Ex::Pack(ix(m), from_value(a)?),
        Value::Fold(a) => Ex::Fold(from_value(a)?),
        Value::InjZero(a) => Ex::InjZero(from_value(a)?),
        Value::InjSuc(a) => Ex::InjSuc(from_value(a)?),
        Value::Closure(_) => return None,
    }))
}

/// `e[v/x]` for a closed value `v`.
fn subst(e: &E, x: &str, v: &E) -> E {
    let go = |e: &E| subst(e, x, v);
    let under = |bound: &[&String], e: &E| {
        if bound.iter().any(|b| *b == x) {
            e.clone()
        } else {
            subst(e, x, v)
        }
    };
    Rc::new(match &**e {
        Ex::Var(y) if y == x => return v.clone(),
        Ex::Var(_) | Ex::Unit | Ex::Refl => return e.clone(),
        Ex::Lam(us, y, b) => Ex::Lam(us.clone(), y.clone(), under(&[y], b)),
        Ex::Rec(f, b) => Ex::Rec(f.clone(), under(&[f], b)),
        Ex::Corec(f, b) => Ex::Corec(f.clone(), under(&[f], b)),
        Ex::Ind(z, u, f, s) => Ex::Ind(go(z), u.clone(), f.clone(), under(&[f], s)),
        Ex::App(f, sp, a) => Ex::App(go(f), sp.clone(), go(a)),
        Ex::Pair(a, b) => Ex::Pair(go(a), go(b)),
        Ex::Split(s, y, z, b) => Ex::Split(go(s), y.clone(), z.clone(), under(&[y, z], b)),
        Ex::Inl(a) => Ex::Inl(go(a)),
        Ex::Inr(a) => Ex::Inr(go(a)),
        Ex::Case(s, y, l, z, r) => Ex::Case(go(s), y.clone(), under(&[y], l), z.clone(), under(&[z], r)),
        Ex::Pack(m, a) => Ex::Pack(m.clone(), go(a)),
        Ex::Unpack(s, u, y, b) => Ex::Unpack(go(s), u.clone(), y.clone(), under(&[y], b)),
        Ex::EqElim { scrut, binders, pending, body } => {
            Ex::EqElim { scrut: go(scrut), binders: binders.clone(), pending: pending.clone(), body: go(body) }
        }
        Ex::EqAbort(a) => Ex::EqAbort(go(a)),
        Ex::Fold(a) => Ex::Fold(go(a)),
        Ex::OutNu(a) => Ex::OutNu(go(a)),
        Ex::InjZero(a) => Ex::InjZero(go(a)),
        Ex::InjSuc(a) => Ex::InjSuc(go(a)),
        Ex::OutZero(a) => Ex::OutZero(go(a)),
        Ex::OutSuc(a) => Ex::OutSuc(go(a)),
        Ex::Thunk(c, sp, a) => Ex::Thunk(go(c), sp.clone(), go(a)),
    })
}

/// `e[n/u]` for a ground index `n`.
fn isubst(e: &E, u: &str, n: &Ix) -> E {
    let go = |e: &E| isubst(e, u, n);
    let under = |bound: bool, e: &E| if bound { e.clone() } else { isubst(e, u, n) };
    let i = |m: &Ix| m.subst(u, n);
    Rc::new(match &**e {
        Ex::Var(_) | Ex::Unit | Ex::Refl => return e.clone(),
        Ex::Lam(us, y, b) => Ex::Lam(us.clone(), y.clone(), under(us.iter().any(|v| v == u), b)),
        Ex::Rec(f, b) => Ex::Rec(f.clone(), go(b)),
        Ex::Corec(f, b) => Ex::Corec(f.clone(), go(b)),
        Ex::Ind(z, v, f, s) => Ex::Ind(go(z), v.clone(), f.clone(), under(v == u, s)),
        Ex::App(f, sp, a) => Ex::App(go(f), sp.iter().map(i).collect(), go(a)),
        Ex::Pair(a, b) => Ex::Pair(go(a), go(b)),
        Ex::Split(s, y, z, b) => Ex::Split(go(s), y.clone(), z.clone(), go(b)),
        Ex::Inl(a) => Ex::Inl(go(a)),
        Ex::Inr(a) => Ex::Inr(go(a)),
        Ex::Case(s, y, l, z, r) => Ex::Case(go(s), y.clone(), go(l), z.clone(), go(r)),
        Ex::Pack(m, a) => Ex::Pack(i(m), go(a)),
        Ex::Unpack(s, v, y, b) => Ex::Unpack(go(s), v.clone(), y.clone(), under(v == u, b)),
        Ex::EqElim { scrut, binders, pending, body } => {
            let bound = binders.iter().any(|b| b == u);
            Ex::EqElim {
                scrut: go(scrut),
                binders: binders.clone(),
                // Patterns live under the binders; targets live outside.
                pending: pending.iter().map(|(p, t)| (if bound { p.clone() } else { i(p) }, i(t))).collect(),
                body: under(bound, body),
            }
        }
        Ex::EqAbort(a) => Ex::EqAbort(go(a)),
        Ex::Fold(a) => Ex::Fold(go(a)),
        Ex::OutNu(a) => Ex::OutNu(go(a)),
        Ex::InjZero(a) => Ex::InjZero(go(a)),
        Ex::InjSuc(a) => Ex::InjSuc(go(a)),
        Ex::OutZero(a) => Ex::OutZero(go(a)),
        Ex::OutSuc(a) => Ex::OutSuc(go(a)),
        Ex::Thunk(c, sp, a) => Ex::Thunk(go(c), sp.iter().map(i).collect(), go(a)),
    })
}

/// Solve `pattern = target` for the pattern's variables, `target` ground.
fn solve(p: &Ix, t: &Ix, out: &mut Vec<(String, Ix)>) -> bool {
    match (p, t) {
        (Ix::Z, Ix::Z) => true,
        (Ix::S(a), Ix::S(b)) => solve(a, b, out),
        (Ix::V(u), _) => match out.iter().find(|(v, _)| v == u) {
            Some((_, prev)) => prev == t,
            None => {
                out.push((u.clone(), t.clone()));
                true
            }
        },
        _ => false,
    }
}

#[derive(Debug, PartialEq)]
pub enum Stop {
    OutOfFuel,
    Stuck(String),
}

pub struct Oracle {
    pub fuel: u64,
}

type R = Result<E, Stop>;

fn stuck<T>(msg: impl Into<String>) -> Result<T, Stop> {
    Err(Stop::Stuck(msg.into()))
}

impl Oracle {
    pub fn new(fuel: u64) -> Self {
        Oracle { fuel }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        if self.fuel == 0 {
            return Err(Stop::OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn eval(&mut self, e: &E) -> R {
        self.tick()?;
        match &**e {
            Ex::Var(x) => stuck(format!("free variable {x}")),
            Ex::Unit | Ex::Refl | Ex::Lam(..) | Ex::Rec(..) | Ex::Corec(..) | Ex::Ind(..) | Ex::Thunk(..) => {
                Ok(e.clone())
            }
            Ex::App(f, sp, a) => {
                let f = self.eval(f)?;
                if !sp.iter().all(Ix::ground) {
                    return stuck("open index argument");
                }
                let a = self.eval(a)?;
                self.apply(&f, sp, &a)
            }
            Ex::Pair(a, b) => Ok(Rc::new(Ex::Pair(self.eval(a)?, self.eval(b)?))),
            Ex::Split(s, x, y, b) => match &*self.eval(s)? {
                Ex::Pair(va, vb) => self.eval(&subst(&subst(b, x, va), y, vb)),
                _ => stuck("split of a non-pair"),
            },
            Ex::Inl(a) => Ok(Rc::new(Ex::Inl(self.eval(a)?))),
            Ex::Inr(a) => Ok(Rc::new(Ex::Inr(self.eval(a)?))),
            Ex::Case(s, x, l, y, r) => match &*self.eval(s)? {
                Ex::Inl(v) => self.eval(&subst(l, x, v)),
                Ex::Inr(v) => self.eval(&subst(r, y, v)),
                _ => stuck("case of a non-injection"),
            },
            Ex::Pack(m, a) => {
                if !m.ground() {
                    return stuck("open pack witness");
                }
                Ok(Rc::new(Ex::Pack(m.clone(), self.eval(a)?)))
            }
            Ex::Unpack(s, u, x, b) => match &*self.eval(s)? {
                Ex::Pack(m, v) => self.eval(&subst(&isubst(b, u, m), x, v)),
                _ => stuck("unpack of a non-pack"),
            },
            Ex::EqElim { scrut, binders, pending, body } => {
                if *self.eval(scrut)? != Ex::Refl {
                    return stuck("eqelim of a non-refl");
                }
                let mut sol = Vec::new();
                for (p, t) in pending {
                    if !t.ground() || !solve(p, t, &mut sol) {
                        return stuck("unifier does not match the runtime indices");
                    }
                }
                let mut b = body.clone();
                for u in binders {
                    let Some((_, n)) = sol.iter().find(|(v, _)| v == u) else {
                        return stuck(format!("unifier leaves {u} undetermined"));
                    };
                    b = isubst(&b, u, n);
                }
                self.eval(&b)
            }
            Ex::EqAbort(_) => stuck("eqabort reached"),
            Ex::Fold(a) => Ok(Rc::new(Ex::Fold(self.eval(a)?))),
            Ex::InjZero(a) => Ok(Rc::new(Ex::InjZero(self.eval(a)?))),
            Ex::InjSuc(a) => Ok(Rc::new(Ex::InjSuc(self.eval(a)?))),
            Ex::OutZero(a) => match &*self.eval(a)? {
                Ex::InjZero(v) => Ok(v.clone()),
                _ => stuck("out0 of a non-inj0"),
            },
            Ex::OutSuc(a) => match &*self.eval(a)? {
                Ex::InjSuc(v) => Ok(v.clone()),
                _ => stuck("outs of a non-injs"),
            },
            Ex::OutNu(a) => {
                let v = self.eval(a)?;
                self.observe(&v)
            }
        }
    }

    pub fn observe(&mut self, v: &E) -> R {
        match &**v {
            Ex::Thunk(c, sp, arg) => match &**c {
                Ex::Corec(f, body) => {
                    let step = self.eval(&subst(body, f, c))?;
                    self.apply(&step, sp, arg)
                }
                _ => stuck("thunk without corec"),
            },
            _ => stuck("observation of a non-thunk"),
        }
    }

    pub fn apply(&mut self, f: &E, sp: &[Ix], a: &E) -> R {
        self.tick()?;
        match &**f {
            Ex::Lam(us, x, b) => {
                if us.len() != sp.len() {
                    return stuck("index arity");
                }
                let mut b = b.clone();
                for (u, n) in us.iter().zip(sp) {
                    b = isubst(&b, u, n);
                }
                self.eval(&subst(&b, x, a))
            }
            Ex::Rec(g, body) => match &**a {
                Ex::Fold(inner) => {
                    let step = self.eval(&subst(body, g, f))?;
                    self.apply(&step, sp, inner)
                }
                _ => stuck("rec applied to a non-fold"),
            },
            Ex::Corec(..) => Ok(Rc::new(Ex::Thunk(f.clone(), sp.to_vec(), a.clone()))),
            Ex::Ind(z, u, g, s) => match sp {
                [Ix::Z] => self.eval(z),
                [Ix::S(n)] => {
                    let below = self.apply(f, &[(**n).clone()], &Rc::new(Ex::Unit))?;
                    self.eval(&subst(&isubst(s, u, n), g, &below))
                }
                _ => stuck("ind needs one ground index"),
            },
            _ => stuck("application of a non-function"),
        }
    }

    /// First `k` heads of a stream of pairs.
    pub fn take(&mut self, s: &E, k: usize) -> Result<Vec<E>, Stop> {
        let mut out = Vec::new();
        let mut cur = s.clone();
        for _ in 0..k {
            match &*self.observe(&cur)? {
                Ex::Pair(h, t) => {
                    out.push(h.clone());
                    cur = t.clone();
                }
                _ => return stuck("stream observation is not a pair"),
            }
        }
        Ok(out)
    }
}

/// Evaluate a closed library term with the oracle.
pub fn eval_term(t: &Term, fuel: u64) -> R {
    Oracle::new(fuel).eval(&from_term(t))
}

/// `pack [n] <>`, the representation of a number.
pub fn packed_nat(e: &E) -> Option<u64> {
    match &**e {
        Ex::Pack(m, _) => m.to_u64(),
        _ => None,
    }
}
