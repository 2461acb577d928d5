//! Unconstrained random syntax trees, mostly ill-formed.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use tores::index::{IndexCtx, IndexSubst, IndexTerm};
use tores::syntax::{Kind, Side, Term, Type, Unifier};

const IVARS: &[&str] = &["u", "v", "w"];
const TVARS: &[&str] = &["X", "Y"];
const VARS: &[&str] = &["x", "y", "f"];

fn pick(rng: &mut StdRng, xs: &[&str]) -> String {
    xs.choose(rng).unwrap().to_string()
}

pub fn index(rng: &mut StdRng, depth: u32) -> IndexTerm {
    match rng.gen_range(0..if depth == 0 { 2 } else { 3 }) {
        0 => IndexTerm::Zero,
        1 => IndexTerm::var(pick(rng, IVARS)),
        _ => IndexTerm::suc(index(rng, depth - 1)),
    }
}

pub fn kind(rng: &mut StdRng, depth: u32) -> Kind {
    if depth == 0 || rng.gen_bool(0.5) {
        Kind::Star
    } else {
        Kind::pi(pick(rng, IVARS), kind(rng, depth - 1))
    }
}

pub fn ty(rng: &mut StdRng, depth: u32) -> Type {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Type::Unit,
            1 => Type::var(pick(rng, TVARS)),
            _ => Type::eq(index(rng, 2), index(rng, 2)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..12) {
        0 => Type::prod(ty(rng, d), ty(rng, d)),
        1 => Type::sum(ty(rng, d), ty(rng, d)),
        2 => {
            let n = rng.gen_range(0..3);
            let bs: Vec<String> = (0..n).map(|_| pick(rng, IVARS)).collect();
            Type::arrow(&bs, ty(rng, d), ty(rng, d))
        }
        3 => Type::sigma(pick(rng, IVARS), ty(rng, d)),
        4 => Type::app(ty(rng, d), index(rng, 2)),
        5 => Type::lam(pick(rng, IVARS), ty(rng, d)),
        6 => Type::mu(pick(rng, TVARS), kind(rng, 2), ty(rng, d)),
        7 => Type::nu(pick(rng, TVARS), kind(rng, 2), ty(rng, d)),
        8 => Type::strat(kind(rng, 2), ty(rng, d), pick(rng, IVARS), pick(rng, TVARS), ty(rng, d)),
        9 => Type::eq(index(rng, 2), index(rng, 2)),
        10 => Type::var(pick(rng, TVARS)),
        _ => Type::Unit,
    }
}

fn spine(rng: &mut StdRng) -> Vec<IndexTerm> {
    (0..rng.gen_range(0..3)).map(|_| index(rng, 2)).collect()
}

pub fn term(rng: &mut StdRng, depth: u32) -> Term {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Term::Unit,
            1 => Term::Refl,
            _ => Term::var(pick(rng, VARS)),
        };
    }
    let d = depth - 1;
    let x = pick(rng, VARS);
    let y = pick(rng, VARS);
    let u = pick(rng, IVARS);
    match rng.gen_range(0..24) {
        0 => {
            let n = rng.gen_range(0..3);
            let us: Vec<String> = (0..n).map(|_| pick(rng, IVARS)).collect();
            Term::lam(&us, x, term(rng, d))
        }
        1 => Term::rec(x, term(rng, d)),
        2 => Term::corec(x, term(rng, d)),
        3 => Term::ind(term(rng, d), u, x, term(rng, d)),
        4 => Term::app(term(rng, d), spine(rng), term(rng, d)),
        5 => Term::pair(term(rng, d), term(rng, d)),
        6 => Term::split(term(rng, d), x, y, term(rng, d)),
        7 => Term::inj(if rng.gen_bool(0.5) { Side::Left } else { Side::Right }, term(rng, d)),
        8 => Term::case(term(rng, d), x, term(rng, d), y, term(rng, d)),
        9 => Term::pack(index(rng, 2), term(rng, d)),
        10 => Term::unpack(term(rng, d), u, x, term(rng, d)),
        11 => Term::eqelim(term(rng, d), None, term(rng, d)),
        12 => {
            let mut ctx = IndexCtx::new();
            let mut subst = IndexSubst::new();
            for _ in 0..rng.gen_range(0..3) {
                ctx.push(tores::name(pick(rng, IVARS)), tores::index::IndexSort::Nat);
            }
            for _ in 0..rng.gen_range(0..3) {
                subst.push(index(rng, 2), tores::name(pick(rng, IVARS)));
            }
            Term::eqelim(term(rng, d), Some(Unifier { ctx, subst }), term(rng, d))
        }
        13 => Term::eqabort(term(rng, d)),
        14 => Term::fold(term(rng, d)),
        15 => Term::out_nu(term(rng, d)),
        16 => Term::inj_zero(term(rng, d)),
        17 => Term::inj_suc(term(rng, d)),
        18 => Term::out_zero(term(rng, d)),
        19 => Term::out_suc(term(rng, d)),
        _ => Term::annot(term(rng, d), ty(rng, d.min(3))),
    }
}

/// Random index context drawn from the fuzzing variable pool.
pub fn ictx(rng: &mut StdRng) -> IndexCtx {
    let mut c = IndexCtx::new();
    for u in IVARS {
        if rng.gen_bool(0.5) {
            c.push(tores::name(u), tores::index::IndexSort::Nat);
        }
    }
    c
}
