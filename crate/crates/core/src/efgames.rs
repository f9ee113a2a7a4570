//! Ehrenfeucht–Fraïssé games deciding equivalence up to a quantifier depth.
//!
//! Three games are provided: the prefix game on words (one bounding pebble,
//! then prefix pebbles strictly to its left), the classical game on labeled
//! linear orders with constants, and the prefix game on data words with
//! process, bounding and prefix pebbles. All are decided by exhaustive
//! minimax with a per-call memo table.

use std::collections::HashMap;

use crate::dataword::{DataWord, Structure};
use crate::logic::LetterId;
use crate::{Error, Result};

/// Size guards for game search. Exceeding them is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EfBudget {
    pub max_rounds: usize,
    pub max_positions: usize,
}

impl Default for EfBudget {
    fn default() -> Self {
        EfBudget {
            max_rounds: 4,
            max_positions: 12,
        }
    }
}

impl EfBudget {
    fn check(&self, k: usize, sizes: &[usize]) -> Result<()> {
        if k > self.max_rounds {
            return Err(Error::Budget(format!(
                "{k} rounds requested, at most {} allowed",
                self.max_rounds
            )));
        }
        if let Some(n) = sizes.iter().find(|&&n| n > self.max_positions) {
            return Err(Error::Budget(format!(
                "structure with {n} positions, at most {} allowed",
                self.max_positions
            )));
        }
        Ok(())
    }
}

type Pairs = Vec<(u8, u8)>;

struct WordGame<'a> {
    u: &'a [LetterId],
    v: &'a [LetterId],
    /// Prefix game: the first pebble is bounding, every later one lies left of it.
    prefix: bool,
    memo: HashMap<(Pairs, usize), bool>,
}

impl WordGame<'_> {
    fn compatible(&self, pairs: &Pairs, a: usize, b: usize) -> bool {
        self.u[a] == self.v[b]
            && pairs
                .iter()
                .all(|&(x, y)| a.cmp(&(x as usize)) == b.cmp(&(y as usize)))
    }

    /// Spoiler's moves on already pebbled positions are skipped: Duplicator
    /// answers them with the partner and the position does not change.
    fn duplicator_wins(&mut self, pairs: Pairs, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (pairs, rounds);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let pairs = key.0.clone();
        let (lim_u, lim_v) = match (self.prefix, pairs.last()) {
            (true, Some(&(bu, bv))) => (bu as usize, bv as usize),
            _ => (self.u.len(), self.v.len()),
        };
        let mut wins = true;
        'spoiler: for side in 0..2 {
            let (lim_s, lim_d) = if side == 0 { (lim_u, lim_v) } else { (lim_v, lim_u) };
            for s in 0..lim_s {
                let taken = pairs.iter().any(|&(x, y)| (if side == 0 { x } else { y }) as usize == s);
                if taken {
                    continue;
                }
                let answered = (0..lim_d).any(|d| {
                    let (a, b) = if side == 0 { (s, d) } else { (d, s) };
                    if !self.compatible(&pairs, a, b) {
                        return false;
                    }
                    let mut next = pairs.clone();
                    let at = next.partition_point(|&p| p < (a as u8, b as u8));
                    next.insert(at, (a as u8, b as u8));
                    self.duplicator_wins(next, rounds - 1)
                });
                if !answered {
                    wins = false;
                    break 'spoiler;
                }
            }
        }
        self.memo.insert(key, wins);
        wins
    }
}

/// Agreement on all prefix sentences of depth at most `k` over words.
pub fn preffo_equiv_words(u: &[LetterId], v: &[LetterId], k: usize) -> Result<bool> {
    preffo_equiv_words_with(u, v, k, &EfBudget::default())
}

pub fn preffo_equiv_words_with(u: &[LetterId], v: &[LetterId], k: usize, budget: &EfBudget) -> Result<bool> {
    budget.check(k, &[u.len(), v.len()])?;
    let mut game = WordGame {
        u,
        v,
        prefix: true,
        memo: HashMap::new(),
    };
    Ok(game.duplicator_wins(Vec::new(), k))
}

/// Agreement on all FO[<] sentences of depth at most `k`.
pub fn fo_equiv_words(u: &[LetterId], v: &[LetterId], k: usize) -> Result<bool> {
    fo_equiv_pointed(u, &[], v, &[], k, &EfBudget::default())
}

/// Classical game on words with constants, given as positions interpreting
/// `c1, c2, …` in order. Constants are pebbles placed before the first round.
pub fn fo_equiv_pointed(
    u: &[LetterId],
    cu: &[usize],
    v: &[LetterId],
    cv: &[usize],
    k: usize,
    budget: &EfBudget,
) -> Result<bool> {
    if cu.len() != cv.len() {
        return Err(Error::Vocabulary(format!(
            "{} constants against {}",
            cu.len(),
            cv.len()
        )));
    }
    if cu.iter().any(|&c| c >= u.len()) || cv.iter().any(|&c| c >= v.len()) {
        return Err(Error::Vocabulary("constant outside its word".into()));
    }
    budget.check(k, &[u.len(), v.len()])?;
    let game = WordGame {
        u,
        v,
        prefix: false,
        memo: HashMap::new(),
    };
    let mut pairs: Pairs = Vec::new();
    for (&a, &b) in cu.iter().zip(cv) {
        if !game.compatible(&pairs, a, b) {
            return Ok(false);
        }
        if !pairs.contains(&(a as u8, b as u8)) {
            pairs.push((a as u8, b as u8));
        }
    }
    pairs.sort_unstable();
    let mut game = game;
    Ok(game.duplicator_wins(pairs, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Pebble {
    Process,
    Bounding,
    Prefix,
}

const PEBBLES: [Pebble; 3] = [Pebble::Process, Pebble::Bounding, Pebble::Prefix];

type Placed = Vec<(Pebble, u8, u8)>;

struct DataWordGame {
    sides: [Structure; 2],
    memo: HashMap<(Placed, usize), bool>,
}

impl DataWordGame {
    fn legal(&self, side: usize, placed: &Placed, kind: Pebble, e: u32) -> bool {
        let s = &self.sides[side];
        let elem = |p: &(Pebble, u8, u8)| (if side == 0 { p.1 } else { p.2 }) as u32;
        match kind {
            Pebble::Process => s.is_process(e),
            Pebble::Bounding => {
                !s.is_process(e)
                    && !placed
                        .iter()
                        .any(|p| p.0 == Pebble::Bounding && s.class_of(elem(p)) == s.class_of(e))
            }
            Pebble::Prefix => {
                !s.is_process(e)
                    && placed
                        .iter()
                        .any(|p| p.0 == Pebble::Bounding && s.pref_less(e, elem(p)))
            }
        }
    }

    fn compatible(&self, placed: &Placed, a: u32, b: u32) -> bool {
        let [s, t] = &self.sides;
        s.player(a) == t.player(b)
            && s.letter(a) == t.letter(b)
            && placed.iter().all(|&(_, x, y)| {
                let (x, y) = (x as u32, y as u32);
                (a == x) == (b == y)
                    && (s.class_of(a) == s.class_of(x)) == (t.class_of(b) == t.class_of(y))
                    && s.pref_less(a, x) == t.pref_less(b, y)
                    && s.pref_less(x, a) == t.pref_less(y, b)
            })
    }

    fn duplicator_wins(&mut self, placed: Placed, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (placed, rounds);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let placed = key.0.clone();
        let mut wins = true;
        'spoiler: for side in 0..2 {
            let other = 1 - side;
            for kind in PEBBLES {
                for s in 0..self.sides[side].universe_size() as u32 {
                    let taken = placed
                        .iter()
                        .any(|p| (if side == 0 { p.1 } else { p.2 }) as u32 == s);
                    if taken || !self.legal(side, &placed, kind, s) {
                        continue;
                    }
                    let answered = (0..self.sides[other].universe_size() as u32).any(|d| {
                        let (a, b) = if side == 0 { (s, d) } else { (d, s) };
                        if !self.legal(other, &placed, kind, d) || !self.compatible(&placed, a, b) {
                            return false;
                        }
                        let mut next = placed.clone();
                        let item = (kind, a as u8, b as u8);
                        let at = next.partition_point(|&p| p < item);
                        next.insert(at, item);
                        self.duplicator_wins(next, rounds - 1)
                    });
                    if !answered {
                        wins = false;
                        break 'spoiler;
                    }
                }
            }
        }
        self.memo.insert(key, wins);
        wins
    }
}

/// Agreement on all prefix sentences of depth at most `k` over data words.
pub fn prefdw_equiv(w1: &DataWord, w2: &DataWord, k: usize) -> Result<bool> {
    prefdw_equiv_with(w1, w2, k, &EfBudget::default())
}

pub fn prefdw_equiv_with(w1: &DataWord, w2: &DataWord, k: usize, budget: &EfBudget) -> Result<bool> {
    if w1.alphabet() != w2.alphabet() {
        return Err(Error::AlphabetMismatch("data words over different alphabets".into()));
    }
    budget.check(
        k,
        &[
            w1.events().len(),
            w2.events().len(),
            w1.processes().len(),
            w2.processes().len(),
        ],
    )?;
    let mut game = DataWordGame {
        sides: [Structure::from_word(w1), Structure::from_word(w2)],
        memo: HashMap::new(),
    };
    Ok(game.duplicator_wins(Vec::new(), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Alphabet, Player};

    fn abc() -> Alphabet {
        Alphabet::new::<&str, _>(&[], &["a", "b", "c"]).unwrap()
    }

    fn w(text: &str) -> Vec<LetterId> {
        abc().parse_word(text).unwrap()
    }

    #[test]
    fn prefix_game_examples() {
        assert!(preffo_equiv_words(&w("abaac"), &w("abaaac"), 2).unwrap());
        // Spoiler bounds the last `a` of abaaac; no answer in abaac keeps an
        // `a` that has a `b` before it and another `a` before the bound.
        assert!(!preffo_equiv_words(&w("abaac"), &w("abaaac"), 3).unwrap());
        for k in 0..4 {
            assert!(preffo_equiv_words(&[], &[], k).unwrap());
        }
        assert!(!preffo_equiv_words(&w("aa"), &w("ab"), 1).unwrap());
        assert!(preffo_equiv_words(&w("aa"), &w("ab"), 0).unwrap());
        assert!(!preffo_equiv_words(&[], &w("a"), 1).unwrap());
    }

    #[test]
    fn classical_game_examples() {
        assert!(fo_equiv_words(&w("a"), &w("a"), 3).unwrap());
        assert!(fo_equiv_words(&w("aaa"), &w("aaaa"), 1).unwrap());
        assert!(fo_equiv_words(&w("aaa"), &w("aaaa"), 2).unwrap());
        assert!(!fo_equiv_words(&w("aa"), &w("aaa"), 2).unwrap());
        assert!(!fo_equiv_words(&w("abaac"), &w("abaaac"), 3).unwrap());
    }

    #[test]
    fn unary_thresholds() {
        let a = |n: usize| vec![LetterId(0); n];
        for k in 1..=3usize {
            let t = (1 << k) - 1;
            for n in 0..=9 {
                for m in 0..=9 {
                    let expected = n == m || (n >= t && m >= t);
                    assert_eq!(fo_equiv_words(&a(n), &a(m), k).unwrap(), expected, "{n} {m} {k}");
                }
            }
        }
    }

    #[test]
    fn constants() {
        let b = EfBudget::default();
        assert!(fo_equiv_pointed(&w("ab"), &[0], &w("ab"), &[0], 2, &b).unwrap());
        assert!(!fo_equiv_pointed(&w("ab"), &[0], &w("ab"), &[1], 0, &b).unwrap());
        assert!(matches!(
            fo_equiv_pointed(&w("ab"), &[0], &w("ab"), &[], 1, &b),
            Err(Error::Vocabulary(_))
        ));
        // the constant sits at the first `a` in both words
        assert!(fo_equiv_pointed(&w("aab"), &[0], &w("aaab"), &[0], 1, &b).unwrap());
    }

    #[test]
    fn budgets_are_enforced() {
        let long = vec![LetterId(0); 13];
        assert!(matches!(preffo_equiv_words(&long, &long, 1), Err(Error::Budget(_))));
        assert!(matches!(preffo_equiv_words(&[], &[], 5), Err(Error::Budget(_))));
    }

    #[test]
    fn data_word_game_examples() {
        let a = Alphabet::new(&["s"], &["e"]).unwrap();
        let e = a.letter("e").unwrap();
        let one = DataWord::from_classes(&a, &[("p", Player::Environment, vec![e]), ("q", Player::System, vec![])])
            .unwrap();
        let two = DataWord::from_classes(
            &a,
            &[("p", Player::Environment, vec![e, e]), ("q", Player::System, vec![])],
        )
        .unwrap();
        assert!(prefdw_equiv(&one, &one, 3).unwrap());
        assert!(!prefdw_equiv(&one, &two, 2).unwrap());
        assert!(prefdw_equiv(&one, &two, 1).unwrap());
        let swapped = DataWord::from_classes(&a, &[("q", Player::System, vec![]), ("p", Player::Environment, vec![e])])
            .unwrap();
        assert!(prefdw_equiv(&one, &swapped, 3).unwrap());
    }
}
