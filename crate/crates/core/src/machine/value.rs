use std::fmt;
use std::sync::Arc;

use crate::index::{IndexSubst, IndexTerm, TermSpine};
use crate::syntax::{Fun, Side, Term};
use crate::Name;

/// Runtime index environment `θ`; its range is ground.
pub type IndexEnv = IndexSubst;

/// Runtime values.
#[derive(Clone, Debug)]
pub enum Value {
    Unit,
    Pair(Arc<Value>, Arc<Value>),
    Inj(Side, Arc<Value>),
    Pack(IndexTerm, Arc<Value>),
    Refl,
    Fold(Arc<Value>),
    InjZero(Arc<Value>),
    InjSuc(Arc<Value>),
    Closure(Arc<Closure>),
}

/// A function form with its environments, or a suspended corecursive call.
#[derive(Clone, Debug)]
pub enum Closure {
    Fn {
        code: Arc<Fun>,
        ienv: IndexEnv,
        venv: ValueEnv,
    },
    /// A `corec` closure applied to index arguments and an argument, waiting
    /// to be observed with `out_nu`.
    Thunk {
        corec: Arc<Closure>,
        spine: TermSpine,
        arg: Value,
    },
}

impl Closure {
    pub fn head(&self) -> &'static str {
        match self {
            Closure::Fn { code, .. } => code.head(),
            Closure::Thunk { .. } => "thunk",
        }
    }
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn inj(side: Side, v: Value) -> Value {
        Value::Inj(side, Arc::new(v))
    }

    pub fn pack(m: IndexTerm, v: Value) -> Value {
        Value::Pack(m, Arc::new(v))
    }

    pub fn fold(v: Value) -> Value {
        Value::Fold(Arc::new(v))
    }

    pub fn inj_zero(v: Value) -> Value {
        Value::InjZero(Arc::new(v))
    }

    pub fn inj_suc(v: Value) -> Value {
        Value::InjSuc(Arc::new(v))
    }

    pub fn head(&self) -> &'static str {
        match self {
            Value::Unit => "unit",
            Value::Pair(..) => "pair",
            Value::Inj(Side::Left, _) => "inl",
            Value::Inj(Side::Right, _) => "inr",
            Value::Pack(..) => "pack",
            Value::Refl => "refl",
            Value::Fold(_) => "fold",
            Value::InjZero(_) => "inj0",
            Value::InjSuc(_) => "injs",
            Value::Closure(c) => c.head(),
        }
    }

    /// The witness of `pack [N] <>`, as a number.
    pub fn as_packed_nat(&self) -> Option<u64> {
        match self {
            Value::Pack(m, _) => m.as_nat(),
            _ => None,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Unit, Value::Unit) | (Value::Refl, Value::Refl) => true,
            (Value::Pair(a1, b1), Value::Pair(a2, b2)) => a1 == a2 && b1 == b2,
            (Value::Inj(i, a), Value::Inj(j, b)) => i == j && a == b,
            (Value::Pack(m, a), Value::Pack(n, b)) => m == n && a == b,
            (Value::Fold(a), Value::Fold(b))
            | (Value::InjZero(a), Value::InjZero(b))
            | (Value::InjSuc(a), Value::InjSuc(b)) => a == b,
            (Value::Closure(c), Value::Closure(d)) => Arc::ptr_eq(c, d) || c == d,
            _ => false,
        }
    }
}

impl PartialEq for Closure {
    fn eq(&self, other: &Closure) -> bool {
        match (self, other) {
            (Closure::Fn { code: c1, ienv: i1, venv: v1 }, Closure::Fn { code: c2, ienv: i2, venv: v2 }) => {
                i1 == i2 && v1 == v2 && (Arc::ptr_eq(c1, c2) || Term::Fun(c1.clone()).alpha_eq(&Term::Fun(c2.clone())))
            }
            (Closure::Thunk { corec: c1, spine: s1, arg: a1 }, Closure::Thunk { corec: c2, spine: s2, arg: a2 }) => {
                s1 == s2 && a1 == a2 && c1 == c2
            }
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::print_value(self))
    }
}

/// Runtime term environment `σ`, a persistent list. Later bindings shadow
/// earlier ones.
#[derive(Clone, Debug, Default)]
pub struct ValueEnv {
    head: Option<Arc<EnvNode>>,
    len: usize,
}

#[derive(Debug)]
struct EnvNode {
    name: Name,
    value: Value,
    next: Option<Arc<EnvNode>>,
}

impl ValueEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extended(&self, x: Name, v: Value) -> Self {
        ValueEnv { head: Some(Arc::new(EnvNode { name: x, value: v, next: self.head.clone() })), len: self.len + 1 }
    }

    pub fn lookup(&self, x: &str) -> Option<&Value> {
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            if &*node.name == x {
                return Some(&node.value);
            }
            cur = node.next.as_deref();
        }
        None
    }

    /// Number of bindings, including shadowed ones.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Visible bindings, oldest first.
    pub fn bindings(&self) -> Vec<(Name, Value)> {
        let mut out: Vec<(Name, Value)> = Vec::new();
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            if !out.iter().any(|(y, _)| *y == node.name) {
                out.push((node.name.clone(), node.value.clone()));
            }
            cur = node.next.as_deref();
        }
        out.reverse();
        out
    }
}

impl PartialEq for ValueEnv {
    fn eq(&self, other: &ValueEnv) -> bool {
        match (&self.head, &other.head) {
            (None, None) => true,
            (Some(a), Some(b)) if Arc::ptr_eq(a, b) => true,
            _ => self.bindings() == other.bindings(),
        }
    }
}
