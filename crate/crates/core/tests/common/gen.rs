//! Type-directed generator of closed, well-typed terms.
//!
//! Terms are built against a small grammar of types over the corpus
//! datatypes. Library functions from the corpus (copy, head, natsFrom, ...)
//! appear as annotated closed terms, so generated programs exercise
//! recursion, corecursion, stratified types and equality elimination.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use tores::index::IndexTerm;
use tores::syntax::{Side, Term, Type};
use tores::{name, Name};

use super::{closed_def, load, type_decl};

#[derive(Clone, Debug, PartialEq)]
pub enum G {
    Unit,
    Prod(Box<G>, Box<G>),
    Sum(Box<G>, Box<G>),
    Nat,
    Eq(IndexTerm, IndexTerm),
    Vec(IndexTerm),
    VecS(IndexTerm),
    Stream,
    Fun(Box<G>, Box<G>),
    /// `(n:nat | Vec n) -> Vec n`.
    VecFun,
    /// `(v:nat | unit) -> Nat`.
    Counter,
}

/// Corpus types and closed library functions.
pub struct Lib {
    pub vec: Type,
    pub vec_s: Type,
    pub nat: Type,
    pub stream: Type,
    fns: Vec<(&'static str, Term)>,
}

impl Lib {
    pub fn load() -> Self {
        let vectors = load("vectors.tores");
        let streams = load("streams.tores");
        let equality = load("equality.tores");
        let mut fns = Vec::new();
        for (e, names) in [
            (&vectors, &["copy", "copyS", "cons", "nil", "head"][..]),
            (&streams, &["succ", "add", "natsFrom", "fibFrom", "plus"][..]),
            (&equality, &["sym", "cong", "sucInj"][..]),
        ] {
            for n in names {
                fns.push((*n, closed_def(e, n).0));
            }
        }
        Lib {
            vec: type_decl(&vectors, "Vec"),
            vec_s: type_decl(&vectors, "VecS"),
            nat: type_decl(&streams, "Nat"),
            stream: type_decl(&streams, "Stream"),
            fns,
        }
    }

    pub fn f(&self, n: &str) -> Term {
        self.fns.iter().find(|(m, _)| *m == n).unwrap_or_else(|| panic!("no library function {n}")).1.clone()
    }

    pub fn ty(&self, g: &G) -> Type {
        match g {
            G::Unit => Type::Unit,
            G::Prod(a, b) => Type::prod(self.ty(a), self.ty(b)),
            G::Sum(a, b) => Type::sum(self.ty(a), self.ty(b)),
            G::Nat => self.nat.clone(),
            G::Eq(m, n) => Type::eq(m.clone(), n.clone()),
            G::Vec(m) => Type::app(self.vec.clone(), m.clone()),
            G::VecS(m) => Type::app(self.vec_s.clone(), m.clone()),
            G::Stream => self.stream.clone(),
            G::Fun(a, b) => Type::fun(self.ty(a), self.ty(b)),
            G::VecFun => {
                let v = Type::app(self.vec.clone(), IndexTerm::var("n"));
                Type::arrow(&["n"], v.clone(), v)
            }
            G::Counter => Type::arrow(&["v"], Type::Unit, self.nat.clone()),
        }
    }
}

pub struct Sample {
    pub term: Term,
    pub ty: Type,
    pub g: G,
}

pub struct Gen<'a> {
    pub rng: StdRng,
    lib: &'a Lib,
    counter: usize,
    /// Index variables in scope; the flag marks those with a vector of that
    /// length in the term context, so vector types may mention them.
    ivars: Vec<(Name, bool)>,
    vars: Vec<(Name, G)>,
}

fn ann(t: Term, ty: Type) -> Term {
    Term::annot(t, ty)
}

impl<'a> Gen<'a> {
    pub fn new(lib: &'a Lib, seed: u64) -> Self {
        Gen { rng: StdRng::seed_from_u64(seed), lib, counter: 0, ivars: Vec::new(), vars: Vec::new() }
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        name(format!("{base}{}", self.counter))
    }

    fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// A small ground index, as a numeral.
    fn small(&mut self) -> IndexTerm {
        IndexTerm::nat(self.rng.gen_range(0..4))
    }

    /// Any index term in scope.
    fn any_index(&mut self) -> IndexTerm {
        let base = if !self.ivars.is_empty() && self.coin(0.5) {
            IndexTerm::Var(self.ivars.choose(&mut self.rng).unwrap().0.clone())
        } else {
            IndexTerm::Zero
        };
        (0..self.rng.gen_range(0..3)).fold(base, |m, _| IndexTerm::suc(m))
    }

    /// An index term built from ground numbers and vector-length variables.
    fn vec_index(&mut self) -> IndexTerm {
        let safe: Vec<Name> = self.ivars.iter().filter(|(_, s)| *s).map(|(u, _)| u.clone()).collect();
        if !safe.is_empty() && self.coin(0.5) {
            let base = IndexTerm::Var(safe.choose(&mut self.rng).unwrap().clone());
            (0..self.rng.gen_range(0..2)).fold(base, |m, _| IndexTerm::suc(m))
        } else {
            self.small()
        }
    }

    pub fn random_type(&mut self, depth: u32) -> G {
        let leaf = depth == 0;
        match self.rng.gen_range(0..if leaf { 7 } else { 12 }) {
            0 => G::Unit,
            1 => G::Nat,
            2 => G::Vec(self.vec_index()),
            3 => G::VecS(self.small()),
            4 => G::Stream,
            5 => {
                let m = self.any_index();
                G::Eq(m.clone(), m)
            }
            6 => G::Counter,
            7 => G::Prod(Box::new(self.random_type(depth - 1)), Box::new(self.random_type(depth - 1))),
            8 => G::Sum(Box::new(self.random_type(depth - 1)), Box::new(self.random_type(depth - 1))),
            9 | 10 => G::Fun(Box::new(self.random_type(depth - 1)), Box::new(self.random_type(depth - 1))),
            _ => G::VecFun,
        }
    }

    /// A closed sample of a random type.
    pub fn sample(&mut self, max_depth: u32) -> Sample {
        self.ivars.clear();
        self.vars.clear();
        let g = self.random_type(2);
        let depth = self.rng.gen_range(0..=max_depth);
        let term = self.gen(&g, depth);
        Sample { ty: self.lib.ty(&g), term, g }
    }

    fn var_of(&mut self, g: &G) -> Option<Term> {
        let hits: Vec<Name> = self.vars.iter().filter(|(_, h)| h == g).map(|(x, _)| x.clone()).collect();
        hits.choose(&mut self.rng).map(|x| Term::Var(x.clone()))
    }

    fn with_var<T>(&mut self, x: Name, g: G, f: impl FnOnce(&mut Self) -> T) -> T {
        self.vars.push((x, g));
        let r = f(self);
        self.vars.pop();
        r
    }

    fn with_ivar<T>(&mut self, u: Name, safe: bool, f: impl FnOnce(&mut Self) -> T) -> T {
        self.ivars.push((u, safe));
        let r = f(self);
        self.ivars.pop();
        r
    }

    pub fn gen(&mut self, g: &G, depth: u32) -> Term {
        if depth > 0 && self.coin(0.3) {
            return self.wrapper(g, depth - 1);
        }
        if self.coin(0.3) {
            if let Some(v) = self.var_of(g) {
                return v;
            }
        }
        let d = depth.saturating_sub(1);
        let lib = self.lib;
        match g {
            G::Unit => {
                if depth > 0 && self.coin(0.3) {
                    let k = self.vec_index();
                    let v = self.gen(&G::Vec(IndexTerm::suc(k.clone())), d);
                    let partial = Term::app(lib.f("head"), vec![IndexTerm::suc(k.clone())], v);
                    Term::app(partial, vec![k], Term::Refl)
                } else {
                    Term::Unit
                }
            }
            G::Prod(a, b) => Term::pair(self.gen(a, d), self.gen(b, d)),
            G::Sum(a, b) => {
                if self.coin(0.5) {
                    Term::inj(Side::Left, self.gen(a, d))
                } else {
                    Term::inj(Side::Right, self.gen(b, d))
                }
            }
            G::Nat => match if depth == 0 { 0 } else { self.rng.gen_range(0..5) } {
                0 => Term::pack(self.any_index(), Term::Unit),
                1 => Term::app0(lib.f("succ"), self.gen(&G::Nat, d)),
                2 => Term::app0(Term::app0(lib.f("add"), self.gen(&G::Nat, d)), self.gen(&G::Nat, d)),
                3 => {
                    let (h, t) = (self.fresh("h"), self.fresh("t"));
                    let s = self.gen(&G::Stream, d);
                    Term::split(Term::out_nu(ann(s, lib.stream.clone())), h.clone(), t, Term::Var(h))
                }
                _ => {
                    let c = self.gen(&G::Counter, d);
                    Term::app(ann(c, lib.ty(&G::Counter)), vec![self.any_index()], Term::Unit)
                }
            },
            G::Eq(m, n) => {
                assert_eq!(m, n, "only reflexive equations are requested");
                match if depth == 0 { 0 } else { self.rng.gen_range(0..4) } {
                    1 => Term::app(lib.f("sym"), vec![m.clone(), m.clone()], Term::Refl),
                    2 => Term::app(lib.f("sucInj"), vec![m.clone(), m.clone()], Term::Refl),
                    3 => match m {
                        IndexTerm::Suc(p) => Term::app(lib.f("cong"), vec![(**p).clone(), (**p).clone()], Term::Refl),
                        _ => Term::Refl,
                    },
                    _ => Term::Refl,
                }
            }
            G::Vec(m) => self.gen_vec(m, depth),
            G::VecS(m) => {
                if depth > 0 && self.coin(0.4) {
                    let v = self.gen(g, d);
                    Term::app(Term::app(lib.f("copyS"), vec![m.clone()], Term::Unit), vec![], v)
                } else {
                    self.build_vec_s(m.as_nat().expect("stratified vectors have ground lengths"), d)
                }
            }
            G::Stream => match if depth == 0 { 0 } else { self.rng.gen_range(0..3) } {
                0 => Term::app0(lib.f("natsFrom"), self.gen(&G::Nat, d)),
                1 => Term::app0(lib.f("fibFrom"), Term::pair(self.gen(&G::Nat, d), self.gen(&G::Nat, d))),
                _ => {
                    let (h, t) = (self.fresh("h"), self.fresh("t"));
                    let s = self.gen(&G::Stream, d);
                    Term::split(Term::out_nu(ann(s, lib.stream.clone())), h, t.clone(), Term::Var(t))
                }
            },
            G::Fun(a, b) => {
                let x = self.fresh("x");
                let body = self.with_var(x.clone(), (**a).clone(), |s| s.gen(b, d));
                Term::lam0(x, body)
            }
            G::VecFun => match if depth == 0 { 0 } else { self.rng.gen_range(0..3) } {
                0 => lib.f("copy"),
                1 => {
                    let (n, v) = (self.fresh("n"), self.fresh("v"));
                    let body = self.with_ivar(n.clone(), true, |s| {
                        s.with_var(v.clone(), G::Vec(IndexTerm::Var(n.clone())), |s| {
                            s.gen(&G::Vec(IndexTerm::Var(n.clone())), d)
                        })
                    });
                    Term::lam(&[n], v, body)
                }
                _ => self.copy_variant(d),
            },
            G::Counter => {
                if depth > 0 && self.coin(0.6) {
                    let (u, f) = (self.fresh("u"), self.fresh("f"));
                    let zero = self.gen(&G::Nat, d);
                    let suc =
                        self.with_ivar(u.clone(), false, |s| s.with_var(f.clone(), G::Nat, |s| s.gen(&G::Nat, d)));
                    Term::ind(zero, u, f, suc)
                } else {
                    let (v, x) = (self.fresh("v"), self.fresh("x"));
                    let body = self.with_ivar(v.clone(), false, |s| s.gen(&G::Nat, d));
                    Term::lam(&[v], x, body)
                }
            }
        }
    }

    /// A vector of the given length: from the context, by `cons`, or by
    /// applying a vector function.
    fn gen_vec(&mut self, m: &IndexTerm, depth: u32) -> Term {
        let d = depth.saturating_sub(1);
        let lib = self.lib;
        if depth > 0 && self.coin(0.35) {
            let f = self.gen(&G::VecFun, d);
            let v = self.gen(&G::Vec(m.clone()), d);
            return Term::app(ann(f, lib.ty(&G::VecFun)), vec![m.clone()], v);
        }
        match m {
            IndexTerm::Zero => lib.f("nil"),
            IndexTerm::Suc(p) => {
                let x = self.gen(&G::Unit, d);
                let tail = self.gen_vec(p, d);
                Term::app(Term::app(lib.f("cons"), vec![(**p).clone()], x), vec![], tail)
            }
            IndexTerm::Var(_) => self.var_of(&G::Vec(m.clone())).expect("vector lengths are backed by a variable"),
        }
    }

    fn build_vec_s(&mut self, k: u64, d: u32) -> Term {
        (0..k).fold(Term::inj_zero(Term::Unit), |acc, _| {
            let x = self.gen(&G::Unit, d.min(1));
            Term::inj_suc(Term::pair(x, acc))
        })
    }

    /// A Mendler-style vector copy whose element in each cell is generated.
    fn copy_variant(&mut self, d: u32) -> Term {
        let [f, n, v, z, s, m, p, e, p2, h, t] =
            ["f", "n", "v", "z", "s", "m", "p", "e", "p", "h", "t"].map(|b| self.fresh(b));
        let elem = self.with_ivar(n.clone(), false, |g| {
            g.with_ivar(m.clone(), false, |g| g.with_var(h.clone(), G::Unit, |g| g.gen(&G::Unit, d)))
        });
        let tail = Term::app(Term::Var(f.clone()), vec![IndexTerm::Var(m.clone())], Term::Var(t.clone()));
        let cell = Term::pair(Term::Var(e.clone()), Term::pair(elem, tail));
        let succ = Term::unpack(
            Term::Var(s.clone()),
            m.clone(),
            p.clone(),
            Term::split(
                Term::Var(p),
                e,
                p2.clone(),
                Term::split(
                    Term::Var(p2),
                    h,
                    t,
                    Term::fold(Term::inj(Side::Right, Term::pack(IndexTerm::Var(m), cell))),
                ),
            ),
        );
        let body =
            Term::case(Term::Var(v.clone()), z.clone(), Term::fold(Term::inj(Side::Left, Term::Var(z))), s, succ);
        Term::rec(f, Term::lam(&[n], v, body))
    }

    /// Wrap a term of type `g` in an elimination of something else.
    fn wrapper(&mut self, g: &G, d: u32) -> Term {
        let lib = self.lib;
        match self.rng.gen_range(0..5) {
            0 => {
                let (a, b) = (self.random_type(1), self.random_type(1));
                let pair = ann(
                    Term::pair(self.gen(&a, d), self.gen(&b, d)),
                    lib.ty(&G::Prod(Box::new(a.clone()), Box::new(b.clone()))),
                );
                let (x, y) = (self.fresh("x"), self.fresh("y"));
                let body = self.with_var(x.clone(), a, |s| s.with_var(y.clone(), b, |s| s.gen(g, d)));
                Term::split(pair, x, y, body)
            }
            1 => {
                let (a, b) = (self.random_type(1), self.random_type(1));
                let sum_ty = lib.ty(&G::Sum(Box::new(a.clone()), Box::new(b.clone())));
                let scrut = if self.coin(0.5) {
                    Term::inj(Side::Left, self.gen(&a, d))
                } else {
                    Term::inj(Side::Right, self.gen(&b, d))
                };
                let (x, y) = (self.fresh("x"), self.fresh("y"));
                let l = self.with_var(x.clone(), a, |s| s.gen(g, d));
                let r = self.with_var(y.clone(), b, |s| s.gen(g, d));
                Term::case(ann(scrut, sum_ty), x, l, y, r)
            }
            2 => {
                let a = self.random_type(1);
                let x = self.fresh("x");
                let body = self.with_var(x.clone(), a.clone(), |s| s.gen(g, d));
                let f = ann(Term::lam0(x, body), lib.ty(&G::Fun(Box::new(a.clone()), Box::new(g.clone()))));
                Term::app0(f, self.gen(&a, d))
            }
            3 => {
                let n = ann(self.gen(&G::Nat, d), lib.nat.clone());
                let (u, x) = (self.fresh("u"), self.fresh("x"));
                let body = self.with_ivar(u.clone(), false, |s| s.with_var(x.clone(), G::Unit, |s| s.gen(g, d)));
                Term::unpack(n, u, x, body)
            }
            _ => {
                let m = self.any_index();
                let q = ann(Term::Refl, Type::eq(m.clone(), m));
                Term::eqelim(q, None, self.gen(g, d))
            }
        }
    }
}
