//! Subject reduction and agreement with the reference interpreter on
//! generated programs.

mod common;

use common::gen::{Gen, Lib};
use common::oracle;
use tores::index::IndexCtx;
use tores::machine::{eval_closed, value_check, EvalOutcome, DEFAULT_FUEL};
use tores::syntax::{TypeVarCtx, TypingCtx};
use tores::typing::elaborate_check;

fn elaborate(lib_term: &tores::syntax::Term, ty: &tores::syntax::Type) -> tores::syntax::Term {
    elaborate_check(&IndexCtx::new(), &TypeVarCtx::new(), &TypingCtx::new(), lib_term, ty)
        .unwrap_or_else(|e| panic!("generated term is ill-typed: {e}\n{lib_term}\n: {ty}"))
}

#[test]
fn generated_terms_are_well_typed_and_preserve_types() {
    let lib = Lib::load();
    let mut g = Gen::new(&lib, 7);
    for _ in 0..1500 {
        let s = g.sample(6);
        let t = elaborate(&s.term, &s.ty);
        let (out, _) = eval_closed(&t, DEFAULT_FUEL);
        let EvalOutcome::Value(v) = out else {
            panic!("evaluation failed with {out:?} on\n{}", s.term);
        };
        assert!(value_check(&v, &s.ty), "value {v} does not have type {}\nterm: {}", s.ty, s.term);
    }
}

#[test]
fn machine_agrees_with_substitution_interpreter() {
    let lib = Lib::load();
    let mut g = Gen::new(&lib, 11);
    let mut compared = 0;
    for _ in 0..1000 {
        let s = g.sample(5);
        let t = elaborate(&s.term, &s.ty);
        let v = eval_closed(&t, DEFAULT_FUEL).0.value().expect("evaluates");
        let want = oracle::eval_term(&t, DEFAULT_FUEL).expect("oracle evaluates");
        if let Some(got) = oracle::from_value(&v) {
            assert_eq!(got, want, "on {}", s.term);
            compared += 1;
        }
    }
    assert!(compared > 300, "only {compared} first-order results");
}

#[test]
fn checking_is_stable_under_reelaboration() {
    let lib = Lib::load();
    let mut g = Gen::new(&lib, 3);
    for _ in 0..300 {
        let s = g.sample(5);
        let once = elaborate(&s.term, &s.ty);
        let twice = elaborate(&once, &s.ty);
        assert!(once.alpha_eq(&twice), "elaboration is not idempotent on {}", s.term);
    }
}
