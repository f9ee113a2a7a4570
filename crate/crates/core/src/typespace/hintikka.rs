//! Canonical FO[<] types of words, hash-consed so that equal ids mean equal
//! types.
//!
//! The depth-r type of a tuple ā in u is its atomic type together with the
//! set of depth-(r−1) types of all extensions ā·b. Two words satisfy the same
//! FO sentences of depth r exactly when their depth-r types of the empty
//! tuple coincide.

use std::collections::HashMap;

use crate::logic::LetterId;

#[derive(Debug, Default)]
pub(crate) struct Hintikka {
    ids: HashMap<(Vec<u16>, Vec<u32>), u32>,
}

impl Hintikka {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn word_type(&mut self, w: &[LetterId], r: usize) -> u32 {
        let mut tuple = Vec::with_capacity(r);
        self.tuple_type(w, &mut tuple, r)
    }

    fn tuple_type(&mut self, w: &[LetterId], tuple: &mut Vec<usize>, r: usize) -> u32 {
        let mut atomic = Vec::with_capacity(1 + tuple.len() * (tuple.len() + 1) / 2);
        atomic.push(r as u16);
        for (i, &p) in tuple.iter().enumerate() {
            atomic.push(w[p].0);
            for &q in &tuple[..i] {
                atomic.push(p.cmp(&q) as i8 as u16);
            }
        }
        let mut children = Vec::new();
        if r > 0 {
            children.reserve(w.len());
            for p in 0..w.len() {
                tuple.push(p);
                children.push(self.tuple_type(w, tuple, r - 1));
                tuple.pop();
            }
            children.sort_unstable();
            children.dedup();
        }
        let next = self.ids.len() as u32;
        *self.ids.entry((atomic, children)).or_insert(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Vec<LetterId> {
        s.bytes().map(|b| LetterId((b - b'a') as u16)).collect()
    }

    #[test]
    fn unary_threshold_at_depth_two() {
        let mut h = Hintikka::new();
        let t: Vec<u32> = (0..6).map(|n| h.word_type(&vec![LetterId(0); n], 2)).collect();
        assert_eq!(t[3], t[4]);
        assert_eq!(t[4], t[5]);
        assert_ne!(t[2], t[3]);
        assert_ne!(t[0], t[1]);
    }

    #[test]
    fn order_matters() {
        let mut h = Hintikka::new();
        assert_ne!(h.word_type(&word("ab"), 2), h.word_type(&word("ba"), 2));
        assert_eq!(h.word_type(&word("ab"), 1), h.word_type(&word("ba"), 1));
    }
}
