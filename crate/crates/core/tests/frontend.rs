mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{corpus_source, fuzz, CORPUS};
use tores::frontend::{
    check_source, is_documented, parse_kind_str, parse_program, parse_term_str, parse_type_str, print_kind,
    print_program, print_term, print_type, DeclBody, ElabOptions, CODES,
};
use tores::index::IndexTerm;
use tores::syntax::{Kind, Type};

#[test]
fn inductive_vector_type_parses_to_the_expected_tree() {
    let src = "mu V : Pi n:nat. *. Lam n. n == 0 + Sig m:nat. n == suc m * (unit * V m)";
    let n = || IndexTerm::var("n");
    let cons = Type::sigma(
        "m",
        Type::prod(
            Type::eq(n(), IndexTerm::suc(IndexTerm::var("m"))),
            Type::prod(Type::Unit, Type::app(Type::var("V"), IndexTerm::var("m"))),
        ),
    );
    let want =
        Type::mu("V", Kind::pi("n", Kind::Star), Type::lam("n", Type::sum(Type::eq(n(), IndexTerm::Zero), cons)));
    assert_eq!(parse_type_str(src).unwrap(), want);
}

#[test]
fn stratified_type_parses() {
    let t = parse_type_str("Rec (Pi n:nat. *) (0 => unit | suc m, V => unit * V)").unwrap();
    let want = Type::strat(Kind::pi("n", Kind::Star), Type::Unit, "m", "V", Type::prod(Type::Unit, Type::var("V")));
    assert_eq!(t, want);
}

#[test]
fn numerals_are_successor_chains() {
    assert_eq!(parse_type_str("3 == suc (suc (suc 0))").unwrap(), Type::eq(IndexTerm::nat(3), IndexTerm::nat(3)));
    assert_eq!(print_type(&Type::eq(IndexTerm::nat(2), IndexTerm::suc(IndexTerm::var("k")))), "2 == suc k");
}

fn assert_program_round_trips(src: &str) {
    let p = parse_program(src).unwrap();
    let printed = print_program(&p);
    let q = parse_program(&printed).unwrap_or_else(|e| panic!("{}: reparsing\n{printed}", e.message));
    assert_eq!(print_program(&q), printed);
    assert_eq!(p.decls.len(), q.decls.len());
    for (a, b) in p.decls.iter().zip(&q.decls) {
        assert_eq!(a.name, b.name);
        match (&a.body, &b.body) {
            (DeclBody::Type { kind: k1, body: t1, .. }, DeclBody::Type { kind: k2, body: t2, .. }) => {
                assert_eq!(k1, k2);
                assert_eq!(t1, t2);
            }
            (DeclBody::Def { ty: t1, body: e1, .. }, DeclBody::Def { ty: t2, body: e2, .. }) => {
                assert_eq!(t1, t2);
                assert!(e1.alpha_eq(e2), "{} changed", a.name);
            }
            _ => panic!("{} changed sort", a.name),
        }
    }
}

#[test]
fn corpus_round_trips_through_the_printer() {
    for file in CORPUS {
        assert_program_round_trips(&corpus_source(file));
    }
}

#[test]
fn elaborated_terms_reparse() {
    for file in CORPUS {
        let checked = check_source(file, &corpus_source(file), &ElabOptions::default());
        for item in checked.elaborated.items.iter() {
            if let (_, tores::frontend::Item::Def { body, .. }) = item {
                let printed = print_term(body);
                let back = parse_term_str(&printed).unwrap_or_else(|e| panic!("{}: {printed}", e.message));
                assert_eq!(print_term(&back), printed);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn random_types_round_trip(seed in any::<u64>()) {
        let t = fuzz::ty(&mut StdRng::seed_from_u64(seed), 4);
        let printed = print_type(&t);
        let back = parse_type_str(&printed).map_err(|e| TestCaseError::fail(format!("{}: {printed}", e.message)))?;
        prop_assert_eq!(back, t);
    }

    #[test]
    fn random_terms_round_trip(seed in any::<u64>()) {
        let t = fuzz::term(&mut StdRng::seed_from_u64(seed), 5);
        let printed = print_term(&t);
        let back = parse_term_str(&printed).map_err(|e| TestCaseError::fail(format!("{}: {printed}", e.message)))?;
        prop_assert!(back.alpha_eq(&t), "{}", printed);
        prop_assert_eq!(print_term(&back), printed);
    }

    #[test]
    fn random_kinds_round_trip(seed in any::<u64>()) {
        let k = fuzz::kind(&mut StdRng::seed_from_u64(seed), 4);
        prop_assert_eq!(parse_kind_str(&print_kind(&k)).unwrap(), k);
    }

    #[test]
    fn diagnostics_point_into_the_source(src in "[a-z0-9 :=|<>()\\[\\],.*+\n-]{0,80}") {
        let checked = check_source("f.tores", &src, &ElabOptions::default());
        for d in &checked.diagnostics {
            prop_assert!(d.span.start <= d.span.end && d.span.end <= src.len());
            prop_assert!(d.span.line >= 1 && d.span.col >= 1);
            prop_assert!(is_documented(&d.code), "undocumented code {}", d.code);
            let rendered = d.render(&src);
            let prefix = format!("f.tores:{}:{}: error[", d.span.line, d.span.col);
            prop_assert!(rendered.starts_with(&prefix));
        }
    }

    #[test]
    fn mutated_corpus_diagnostics_are_documented(cut in 0usize..4000, file in 0usize..4) {
        let src = corpus_source(CORPUS[file]);
        let mut cut = cut.min(src.len());
        while !src.is_char_boundary(cut) {
            cut -= 1;
        }
        let mutated = format!("{}{}", &src[..cut], src[cut..].replacen("n", "m", 1));
        for d in check_source("m.tores", &mutated, &ElabOptions::default()).diagnostics {
            prop_assert!(is_documented(&d.code), "undocumented code {}", d.code);
            prop_assert!(d.span.end <= mutated.len());
        }
    }
}

#[test]
fn syntax_errors_name_what_was_expected() {
    let d = &check_source("e.tores", "def x : unit = ", &ElabOptions::default()).diagnostics[0];
    assert_eq!(d.code, "syntax");
    assert_eq!(d.found.as_deref(), Some("end of input"));
    assert!(d.expected.is_some());
}

#[test]
fn type_errors_carry_expected_and_found() {
    let d = &check_source("e.tores", "def x : 0 == 1 = refl", &ElabOptions::default()).diagnostics[0];
    assert_eq!(d.code, "type/mismatch");
    assert_eq!((d.span.line, d.span.col), (1, 18));
    assert!(d.expected.is_some() && d.found.is_some());
}

#[test]
fn size_limit_is_enforced() {
    let opts = ElabOptions { size_limit: 10 };
    let d = check_source("s.tores", &corpus_source("vectors.tores"), &opts).diagnostics;
    assert!(d.iter().any(|d| d.code == "size_limit"));
}

#[test]
fn code_table_has_no_duplicates() {
    let mut codes: Vec<&str> = CODES.iter().map(|(c, _)| *c).collect();
    let n = codes.len();
    codes.sort();
    codes.dedup();
    assert_eq!(codes.len(), n);
}
