mod common;

use common::{naive_eval, random_data_word, rng, FormulaGen};
use prefsynth::dataword::evaluate;
use prefsynth::logic::corpus::CORPUS;
use prefsynth::{parse_formula, Alphabet, Error};
use proptest::prelude::*;

#[test]
fn corpus_round_trips() {
    for e in CORPUS {
        let f = e.formula();
        let printed = f.to_string();
        let g = parse_formula(&printed, &e.alphabet()).unwrap();
        assert_eq!(g.to_string(), printed, "{}", e.name);
        assert_eq!(g.depth(), f.depth(), "{}", e.name);
        assert_eq!(g.letters(), f.letters(), "{}", e.name);
    }
}

#[test]
fn ill_kinded_input_is_rejected() {
    let a = Alphabet::new(&["s"], &["e"]).unwrap();
    for bad in [
        "Ep x. e(x)",
        "Eb x. ProcS(x)",
        "Eb x. Eb y. x ~ y",
        "Eb x. Eb y. x < y",
        "Eb x. Eb y. Ex z < x. z < y",
        "Ex y < x. e(y)",
    ] {
        assert!(
            matches!(parse_formula(bad, &a), Err(Error::Kind { .. } | Error::FreeVariable { .. })),
            "{bad}"
        );
    }
    assert!(matches!(parse_formula("Eb x. q(x)", &a), Err(Error::UnknownLetter { .. })));
    assert!(matches!(parse_formula("Eb x. (e(x)", &a), Err(Error::Syntax { .. })));
}

#[test]
fn depth_laws() {
    let a = Alphabet::new(&["s"], &["e"]).unwrap();
    let d = |t: &str| parse_formula(t, &a).unwrap().depth();
    assert_eq!(d("Ap x. x = x"), 1);
    assert_eq!(d("(Eb x. e(x)) & (Eb x. Ex y < x. s(y))"), 2);
    assert_eq!(d("!(Eb x. Ex y < x. Ex z < x. y < z)"), 3);
    assert_eq!(d("Ep x. Eb y. y ~ x"), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printing_is_a_fixed_point(seed in any::<u64>(), depth in 1usize..=4, binary in any::<bool>()) {
        let a = if binary { common::binary_sys() } else { common::unary() };
        let mut r = rng(seed);
        let text = FormulaGen::new(&a).sentence(&mut r, depth);
        let f = parse_formula(&text, &a).unwrap();
        let printed = f.to_string();
        let g = parse_formula(&printed, &a).unwrap();
        prop_assert_eq!(g.to_string(), printed.clone());
        prop_assert_eq!(g.depth(), f.depth());
        prop_assert!(f.depth() <= depth);
        for _ in 0..8 {
            let w = random_data_word(&mut r, &a, 3, 6);
            prop_assert_eq!(evaluate(&f, &w).unwrap(), evaluate(&g, &w).unwrap());
        }
    }

    #[test]
    fn guards_match_kind_semantics(seed in any::<u64>(), depth in 1usize..=3) {
        let a = common::binary_sys();
        let mut r = rng(seed);
        let text = FormulaGen::new(&a).sentence(&mut r, depth);
        let f = parse_formula(&text, &a).unwrap();
        for _ in 0..12 {
            let w = random_data_word(&mut r, &a, 4, 8);
            prop_assert_eq!(evaluate(&f, &w).unwrap(), naive_eval(&f, &w), "{} on {}", text, w.to_text());
        }
    }
}
