mod common;

use common::{all_words, letters, random_word, rng, FormulaGen};
use prefsynth::dataword::{evaluate, DataWord};
use prefsynth::efgames::{fo_equiv_words, preffo_equiv_words};
use prefsynth::{parse_formula, Alphabet, Formula, LetterId, Player};
use proptest::prelude::*;

/// Environment-only alphabet with letters a, b named like the ids 0, 1.
fn ab() -> Alphabet {
    Alphabet::new::<&str, _>(&[], &["a", "b"]).unwrap()
}

fn one_class(a: &Alphabet, w: &[LetterId]) -> DataWord {
    DataWord::from_classes(a, &[("p", Player::Environment, w.to_vec())]).unwrap()
}

/// Sentences whose truth values on a single class determine its prefix
/// type of depth `k`, for k ≤ 2.
fn characteristic(a: &Alphabet, k: usize) -> Vec<Formula> {
    let names: Vec<&str> = a.names_of(Player::Environment);
    let mut out = Vec::new();
    for x in &names {
        out.push(format!("Eb x. {x}(x)"));
        if k >= 2 {
            for mask in 0..1u32 << names.len() {
                let mut text = format!("Eb x. {x}(x)");
                for (i, y) in names.iter().enumerate() {
                    let part = format!("(Ex y < x. {y}(y))");
                    if mask >> i & 1 == 1 {
                        text.push_str(&format!(" & {part}"));
                    } else {
                        text.push_str(&format!(" & !{part}"));
                    }
                }
                out.push(text);
            }
        }
    }
    out.iter().map(|t| parse_formula(t, a).unwrap()).collect()
}

fn agree(fs: &[Formula], a: &Alphabet, u: &[LetterId], v: &[LetterId]) -> bool {
    let (wu, wv) = (one_class(a, u), one_class(a, v));
    fs.iter().all(|f| evaluate(f, &wu).unwrap() == evaluate(f, &wv).unwrap())
}

#[test]
fn oracle_matches_characteristic_sentences() {
    let a = ab();
    let words = all_words(&letters(2), 5);
    for k in 1..=2 {
        let fs = characteristic(&a, k);
        for u in &words {
            for v in &words {
                assert_eq!(preffo_equiv_words(u, v, k).unwrap(), agree(&fs, &a, u, v), "{u:?} {v:?} k={k}");
            }
        }
    }
}

#[test]
fn sandwich_exhaustive() {
    let ls = letters(2);
    for k in 1..=3 {
        for uv in all_words(&ls, 8) {
            for cut in 0..=uv.len() {
                let u = &uv[..cut];
                if !preffo_equiv_words(u, &uv, k).unwrap() {
                    continue;
                }
                for end in cut..=uv.len() {
                    assert!(preffo_equiv_words(u, &uv[..end], k).unwrap(), "{uv:?} cut {cut} end {end} k={k}");
                }
            }
        }
    }
}

/// Finds u', v' with u·u' ≡ v and u ≡ v·v' in FO_k, trying words up to `len`.
fn witnesses(u: &[LetterId], v: &[LetterId], k: usize, len: usize) -> Option<(Vec<LetterId>, Vec<LetterId>)> {
    let candidates = all_words(&letters(2), len);
    let find = |x: &[LetterId], y: &[LetterId]| {
        candidates.iter().find(|c| {
            let xc: Vec<LetterId> = x.iter().chain(c.iter()).copied().collect();
            fo_equiv_words(&xc, y, k).unwrap()
        })
    };
    let uu = find(u, v)?.clone();
    let vv = find(v, u)?.clone();
    Some((uu, vv))
}

#[test]
fn fo_witnesses_for_prefix_equivalence() {
    let mut r = rng(11);
    let ls = letters(2);
    let (mut tried, mut missing) = (0, 0);
    while tried < 60 {
        let k = r.gen_range(1..=2);
        let u = random_word(&mut r, &ls, 6);
        let v = random_word(&mut r, &ls, 6);
        if !preffo_equiv_words(&u, &v, k + 1).unwrap() {
            continue;
        }
        tried += 1;
        match witnesses(&u, &v, k, 6) {
            Some((uu, vv)) => {
                let uuu: Vec<LetterId> = u.iter().chain(&uu).copied().collect();
                let vvv: Vec<LetterId> = v.iter().chain(&vv).copied().collect();
                assert!(fo_equiv_words(&uuu, &v, k).unwrap());
                assert!(fo_equiv_words(&u, &vvv, k).unwrap());
                assert!(preffo_equiv_words(&u, &v, k).unwrap(), "{u:?} {v:?} k={k}");
            }
            None => {
                missing += 1;
                eprintln!("no FO witnesses within length 6 for {u:?} {v:?} at k={k}");
            }
        }
    }
    eprintln!("{tried} prefix-equivalent pairs, {missing} without witnesses");
}

use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fo_refines_preffo(seed in any::<u64>(), k in 1usize..=3) {
        let mut r = rng(seed);
        let ls = letters(2);
        let u = random_word(&mut r, &ls, 8);
        // bias towards close pairs so both outcomes occur
        let mut v = u.clone();
        if !v.is_empty() && r.gen_bool(0.7) {
            let i = r.gen_range(0..v.len());
            v.insert(i, v[i]);
        } else {
            v = random_word(&mut r, &ls, 8);
        }
        if fo_equiv_words(&u, &v, k).unwrap() {
            prop_assert!(preffo_equiv_words(&u, &v, k).unwrap());
        }
        if preffo_equiv_words(&u, &v, k).unwrap() && k > 1 {
            prop_assert!(preffo_equiv_words(&u, &v, k - 1).unwrap());
        }
    }

    #[test]
    fn equivalence_laws(seed in any::<u64>(), k in 1usize..=3) {
        let mut r = rng(seed);
        let ls = letters(2);
        let ws: Vec<Vec<LetterId>> = (0..3).map(|_| random_word(&mut r, &ls, 6)).collect();
        let eq = |i: usize, j: usize| preffo_equiv_words(&ws[i], &ws[j], k).unwrap();
        prop_assert!(eq(0, 0));
        prop_assert_eq!(eq(0, 1), eq(1, 0));
        if eq(0, 1) && eq(1, 2) {
            prop_assert!(eq(0, 2));
        }
    }

    #[test]
    fn equivalent_words_agree_on_sentences(seed in any::<u64>(), k in 1usize..=3) {
        let mut r = rng(seed);
        let a = ab();
        let ls = letters(2);
        let u = random_word(&mut r, &ls, 6);
        let mut v = u.clone();
        v.extend(random_word(&mut r, &ls, 2));
        if preffo_equiv_words(&u, &v, k).unwrap() {
            let fs: Vec<Formula> = (0..10)
                .map(|_| {
                    let text = FormulaGen::new(&a).sentence(&mut r, k);
                    parse_formula(&text, &a).unwrap()
                })
                .collect();
            prop_assert!(agree(&fs, &a, &u, &v));
        }
    }
}
