mod common;

use std::collections::HashMap;

use common::{all_words, interleave, random_data_word, rng, FormulaGen};
use prefsynth::acceptance::{enumerate_acc, instantiate, instantiate_with_top, satisfies, CountingFunction};
use prefsynth::dataword::evaluate;
use prefsynth::logic::corpus::{self, CORPUS};
use prefsynth::typespace::{TypeBudget, TypeSpace};
use prefsynth::{parse_formula, Alphabet, Formula, LetterId, Player};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn space(a: &Alphabet, k: usize) -> TypeSpace {
    TypeSpace::build_unchecked(a, k, &TypeBudget::default()).unwrap()
}

/// Words of length at most `len` grouped by tagged type.
fn words_by_type(ts: &TypeSpace, len: usize) -> HashMap<usize, Vec<Vec<LetterId>>> {
    let mut out: HashMap<usize, Vec<Vec<LetterId>>> = HashMap::new();
    for p in [Player::Environment, Player::System] {
        for w in all_words(&ts.alphabet().letters_of(p), len) {
            let n = ts.classify_word(p, &w).unwrap();
            out.entry(ts.tagged_index(p, n)).or_default().push(w);
        }
    }
    out
}

fn random_function(r: &mut impl Rng, ts: &TypeSpace, reachable: &HashMap<usize, Vec<Vec<LetterId>>>) -> CountingFunction {
    let k = ts.depth();
    let mut c = CountingFunction::zeros(ts);
    for i in 0..c.len() {
        if reachable.contains_key(&i) && r.gen_bool(0.4) {
            c.set(i, r.gen_range(1..=k) as u8);
        }
    }
    c
}

/// Sentences over `a` of depth at most `k`: matching corpus entries and random ones.
fn sentences(a: &Alphabet, k: usize, r: &mut impl Rng, random: usize) -> Vec<Formula> {
    let mut out: Vec<Formula> = CORPUS
        .iter()
        .filter(|e| e.alphabet() == *a)
        .map(|e| e.formula())
        .filter(|f| f.depth() <= k)
        .collect();
    for _ in 0..random {
        let text = FormulaGen::new(a).sentence(r, k);
        out.push(parse_formula(&text, a).unwrap());
    }
    out
}

#[test]
fn phi_ex_acceptance_set() {
    let f = corpus::phi_ex();
    let ts = space(f.alphabet(), 3);
    let acc = enumerate_acc(&f, &ts).unwrap();
    let e = f.alphabet().letter("e").unwrap();
    let s = f.alphabet().letter("s").unwrap();
    let te = ts.tagged_index(Player::Environment, ts.classify_word(Player::Environment, &[e]).unwrap());
    let tsys = ts.tagged_index(Player::System, ts.classify_word(Player::System, &[s]).unwrap());
    let total = acc.universe().unwrap();
    let mut members = 0;
    for code in 0..total {
        let c = CountingFunction::from_code(code, acc.index_len(), 3);
        let expected = (c.get(te) >= 1) == (c.get(tsys) >= 1);
        assert_eq!(acc.contains(&c), expected, "{}", c.render(&ts));
        members += expected as usize;
    }
    assert_eq!(acc.count(), Some(members));
    assert_eq!(members, 655_360);
}

#[test]
fn small_acceptance_sets() {
    let a = common::unary();
    let ts = space(&a, 1);
    let e = a.letter("e").unwrap();
    let te = ts.tagged_index(Player::Environment, ts.classify_word(Player::Environment, &[e]).unwrap());
    let f = parse_formula("Eb x. e(x)", &a).unwrap();
    let acc = enumerate_acc(&f, &ts).unwrap();
    for code in 0..acc.universe().unwrap() {
        let c = CountingFunction::from_code(code, acc.index_len(), 1);
        assert_eq!(acc.contains(&c), c.get(te) >= 1);
    }
    let valid = corpus::entry("valid").unwrap().formula();
    let acc = enumerate_acc(&valid, &space(&a, 2)).unwrap();
    assert_eq!(acc.count(), Some(acc.universe().unwrap() as usize));
}

#[test]
fn instantiation_shape() {
    let a = common::binary_sys();
    let ts = space(&a, 2);
    let mut r = rng(2);
    let reach = words_by_type(&ts, 5);
    for _ in 0..50 {
        let c = random_function(&mut r, &ts, &reach);
        let w = instantiate(&c, &ts);
        let counts = ts.tagged_collection(&w).unwrap();
        assert_eq!(CountingFunction::threshold(&counts, 2), c);
        let wider = instantiate_with_top(&c, &ts, 3);
        assert_eq!(CountingFunction::threshold(&ts.tagged_collection(&wider).unwrap(), 2), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representatives_do_not_matter(seed in any::<u64>(), k in 1usize..=2, binary in any::<bool>()) {
        let a = if binary { common::binary_sys() } else { common::unary() };
        let ts = space(&a, k);
        let mut r = rng(seed);
        let reach = words_by_type(&ts, 5);
        let fs = sentences(&a, k, &mut r, 4);
        for _ in 0..4 {
            let c = random_function(&mut r, &ts, &reach);
            let top = r.gen_range(k..=k + 1);
            let mut classes = Vec::new();
            for i in 0..c.len() {
                let m = if c.is_top(i) { top } else { c.get(i) as usize };
                let (p, _) = ts.tagged_entry(i);
                for _ in 0..m {
                    classes.push((p, reach[&i].choose(&mut r).unwrap().clone()));
                }
            }
            classes.shuffle(&mut r);
            let w = interleave(&mut r, &a, &classes);
            for f in &fs {
                prop_assert_eq!(satisfies(&c, f, &ts).unwrap(), evaluate(f, &w).unwrap(), "{} on {}", f, c.render(&ts));
            }
        }
    }

    #[test]
    fn top_saturates(seed in any::<u64>(), k in 1usize..=2) {
        let a = common::binary_sys();
        let ts = space(&a, k);
        let mut r = rng(seed);
        let reach = words_by_type(&ts, 4);
        let fs = sentences(&a, k, &mut r, 4);
        let c = random_function(&mut r, &ts, &reach);
        let bigger = instantiate_with_top(&c, &ts, k + 1);
        for f in &fs {
            prop_assert_eq!(satisfies(&c, f, &ts).unwrap(), evaluate(f, &bigger).unwrap());
        }
    }

    #[test]
    fn thresholded_collections_decide_truth(seed in any::<u64>(), k in 1usize..=3) {
        let a = common::unary();
        let ts = space(&a, k);
        let mut r = rng(seed);
        let fs = sentences(&a, k, &mut r, 3);
        for _ in 0..4 {
            let w = random_data_word(&mut r, &a, 5, 10);
            let c = CountingFunction::threshold(&ts.tagged_collection(&w).unwrap(), k);
            for f in &fs {
                prop_assert_eq!(satisfies(&c, f, &ts).unwrap(), evaluate(f, &w).unwrap(), "{} on {}", f, w.to_text());
            }
        }
    }
}
