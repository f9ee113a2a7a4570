//! Counting functions over tagged types and the acceptance set of a sentence.
//!
//! A counting function maps every (player, type) pair to a value in
//! `0..=k`, where `k` stands for "at least k". Whether a sentence of depth at
//! most k holds only depends on this abstraction, so membership is decided by
//! model checking one small instantiation.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::dataword::{DataWord, ProcessDecl, Structure};
use crate::logic::{Formula, LetterId, Player};
use crate::typespace::TypeSpace;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountingFunction {
    k: usize,
    values: Vec<u8>,
}

impl CountingFunction {
    pub fn zeros(ts: &TypeSpace) -> Self {
        CountingFunction {
            k: ts.depth(),
            values: vec![0; ts.tagged_len()],
        }
    }

    pub fn new(k: usize, values: Vec<u8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v as usize > k) {
            return Err(Error::Input(format!("count {v} exceeds the threshold {k}")));
        }
        Ok(CountingFunction { k, values })
    }

    /// Clamps exact counts at `k`.
    pub fn threshold(counts: &[usize], k: usize) -> Self {
        CountingFunction {
            k,
            values: counts.iter().map(|&c| c.min(k) as u8).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, i: usize) -> u8 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, v: u8) {
        assert!(v as usize <= self.k, "count above threshold");
        self.values[i] = v;
    }

    pub fn is_top(&self, i: usize) -> bool {
        self.values[i] as usize == self.k
    }

    /// Base-(k+1) code with index 0 least significant.
    pub fn code(&self) -> u64 {
        let base = self.k as u64 + 1;
        self.values.iter().rev().fold(0, |acc, &v| acc * base + v as u64)
    }

    pub fn from_code(mut code: u64, len: usize, k: usize) -> Self {
        let base = k as u64 + 1;
        let values = (0..len)
            .map(|_| {
                let v = (code % base) as u8;
                code /= base;
                v
            })
            .collect();
        CountingFunction { k, values }
    }

    /// Nonzero entries as `player:type_id=count`, with `TOP` for the threshold.
    pub fn render(&self, ts: &TypeSpace) -> String {
        let mut out = String::new();
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let (p, node) = ts.tagged_entry(i);
            if !out.is_empty() {
                out.push(' ');
            }
            if v as usize == self.k {
                let _ = write!(out, "{}:{}=TOP", p.tag(), node);
            } else {
                let _ = write!(out, "{}:{}={}", p.tag(), node, v);
            }
        }
        if out.is_empty() {
            out.push_str("(all zero)");
        }
        out
    }
}

/// Class words used to instantiate each tagged type.
#[derive(Debug, Clone)]
struct Instantiator {
    k: usize,
    classes: Vec<(Player, Vec<LetterId>)>,
}

impl Instantiator {
    fn new(ts: &TypeSpace) -> Self {
        let classes = (0..ts.tagged_len())
            .map(|i| {
                let (p, node) = ts.tagged_entry(i);
                (p, ts.structure(p).type_representative(node))
            })
            .collect();
        Instantiator { k: ts.depth(), classes }
    }

    fn multiplicities<'a>(&'a self, c: &'a CountingFunction, top: usize) -> impl Iterator<Item = (usize, usize)> + 'a {
        c.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i, if v as usize == self.k { top } else { v as usize }))
    }

    fn structure(&self, c: &CountingFunction) -> Structure {
        let mut players = Vec::new();
        let mut events = Vec::new();
        for (i, m) in self.multiplicities(c, self.k) {
            let (p, word) = &self.classes[i];
            for _ in 0..m {
                let proc = players.len();
                players.push(*p);
                events.extend(word.iter().map(|&a| (a, proc)));
            }
        }
        Structure::from_parts(players, events.into_iter())
    }

    fn data_word(&self, c: &CountingFunction, ts: &TypeSpace, top: usize) -> DataWord {
        let mut processes = Vec::new();
        let mut classes = Vec::new();
        for (i, m) in self.multiplicities(c, top) {
            let (p, word) = &self.classes[i];
            for _ in 0..m {
                processes.push(ProcessDecl {
                    id: format!("p{}", processes.len() + 1),
                    player: *p,
                });
                classes.push(word.clone());
            }
        }
        let events = classes
            .iter()
            .enumerate()
            .flat_map(|(proc, w)| {
                w.iter().map(move |&action| crate::dataword::Event { action, process: proc })
            })
            .collect();
        DataWord::new(ts.alphabet().clone(), processes, events).expect("representatives respect owners")
    }
}

/// The data word with, for each tagged type, as many classes as the counting
/// function says (k classes for TOP), each given by the type's representative.
pub fn instantiate(c: &CountingFunction, ts: &TypeSpace) -> DataWord {
    instantiate_with_top(c, ts, ts.depth())
}

/// Like [`instantiate`] but with `top` classes for every TOP entry.
pub fn instantiate_with_top(c: &CountingFunction, ts: &TypeSpace, top: usize) -> DataWord {
    assert_eq!(c.len(), ts.tagged_len(), "counting function over another type space");
    Instantiator::new(ts).data_word(c, ts, top)
}

fn check_formula(f: &Formula, ts: &TypeSpace) -> Result<()> {
    if f.alphabet() != ts.alphabet() {
        return Err(Error::AlphabetMismatch("formula and type space differ".into()));
    }
    if f.depth() > ts.depth() {
        return Err(Error::DepthMismatch {
            depth: f.depth(),
            k: ts.depth(),
        });
    }
    Ok(())
}

pub fn satisfies(c: &CountingFunction, f: &Formula, ts: &TypeSpace) -> Result<bool> {
    check_formula(f, ts)?;
    if c.len() != ts.tagged_len() || c.k() != ts.depth() {
        return Err(Error::Input("counting function over another type space".into()));
    }
    Ok(Instantiator::new(ts).structure(c).holds(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccBudget {
    /// Largest number of counting functions enumerated eagerly.
    pub max_functions: u64,
}

impl Default for AccBudget {
    fn default() -> Self {
        AccBudget { max_functions: 1 << 24 }
    }
}

#[derive(Debug)]
enum Repr {
    Dense(FixedBitSet),
    /// Decided per query and memoized; used when the index is too large.
    OnDemand {
        formula: Formula,
        inst: Instantiator,
        memo: Mutex<HashMap<Vec<u8>, bool>>,
    },
}

/// The counting functions whose instantiations satisfy a sentence.
#[derive(Debug)]
pub struct AcceptanceSet {
    k: usize,
    len: usize,
    repr: Repr,
}

impl AcceptanceSet {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Length of the tagged index the set is over.
    pub fn index_len(&self) -> usize {
        self.len
    }

    pub fn is_enumerated(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn contains(&self, c: &CountingFunction) -> bool {
        assert_eq!(c.len(), self.len, "counting function over another type space");
        match &self.repr {
            Repr::Dense(bits) => bits.contains(c.code() as usize),
            Repr::OnDemand { formula, inst, memo } => {
                if let Some(&r) = memo.lock().unwrap().get(&c.values) {
                    return r;
                }
                let r = inst.structure(c).holds(formula);
                memo.lock().unwrap().insert(c.values.clone(), r);
                r
            }
        }
    }

    /// Number of members, when enumerated.
    pub fn count(&self) -> Option<usize> {
        match &self.repr {
            Repr::Dense(bits) => Some(bits.count_ones(..)),
            Repr::OnDemand { .. } => None,
        }
    }

    /// Total number of counting functions over the index.
    pub fn universe(&self) -> Option<u64> {
        (self.k as u64 + 1).checked_pow(self.len as u32)
    }

    /// Members in code order, when enumerated.
    pub fn members(&self) -> Vec<CountingFunction> {
        match &self.repr {
            Repr::Dense(bits) => bits
                .ones()
                .map(|code| CountingFunction::from_code(code as u64, self.len, self.k))
                .collect(),
            Repr::OnDemand { .. } => Vec::new(),
        }
    }

    /// Compares with counting functions over untagged types, where the two
    /// roots merge into one type of the empty word.
    pub fn untagged_projection(&self, ts: &TypeSpace) -> Option<UntaggedStats> {
        let Repr::Dense(bits) = &self.repr else {
            return None;
        };
        let k = self.k;
        let e_root = ts.tagged_index(Player::Environment, 0);
        let s_root = ts.tagged_index(Player::System, 0);
        let total = self.universe()?;
        let mut seen: HashMap<Vec<u8>, (bool, bool)> = HashMap::new();
        for code in 0..total {
            let c = CountingFunction::from_code(code, self.len, k);
            let mut key: Vec<u8> = c
                .values
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != s_root)
                .map(|(_, &v)| v)
                .collect();
            let merged = (c.values[e_root] as usize + c.values[s_root] as usize).min(k) as u8;
            key[e_root] = merged;
            let entry = seen.entry(key).or_insert((false, false));
            if bits.contains(code as usize) {
                entry.0 = true;
            } else {
                entry.1 = true;
            }
        }
        Some(UntaggedStats {
            functions: seen.len(),
            members: seen.values().filter(|&&(a, r)| a && !r).count(),
            ambiguous: seen.values().filter(|&&(a, r)| a && r).count(),
        })
    }
}

/// Untagged counting functions whose tagged preimages are all accepted
/// (`members`) or split between accepted and rejected (`ambiguous`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UntaggedStats {
    pub functions: usize,
    pub members: usize,
    pub ambiguous: usize,
}

/// Tests every counting function over the tagged index.
pub fn enumerate_acc(f: &Formula, ts: &TypeSpace) -> Result<AcceptanceSet> {
    enumerate_acc_with(f, ts, &AccBudget::default())
}

pub fn enumerate_acc_with(f: &Formula, ts: &TypeSpace, budget: &AccBudget) -> Result<AcceptanceSet> {
    check_formula(f, ts)?;
    let len = ts.tagged_len();
    let k = ts.depth();
    let total = (k as u64 + 1)
        .checked_pow(len as u32)
        .filter(|&t| t <= budget.max_functions)
        .ok_or_else(|| {
            Error::Budget(format!(
                "{}^{len} counting functions exceed the limit of {}",
                k + 1,
                budget.max_functions
            ))
        })?;
    let inst = Instantiator::new(ts);
    let accepted: Vec<bool> = (0..total)
        .into_par_iter()
        .map(|code| inst.structure(&CountingFunction::from_code(code, len, k)).holds(f))
        .collect();
    let mut bits = FixedBitSet::with_capacity(total as usize);
    for (code, &a) in accepted.iter().enumerate() {
        if a {
            bits.insert(code);
        }
    }
    Ok(AcceptanceSet {
        k,
        len,
        repr: Repr::Dense(bits),
    })
}

/// An acceptance set that decides membership lazily.
pub fn acceptance_on_demand(f: &Formula, ts: &TypeSpace) -> Result<AcceptanceSet> {
    check_formula(f, ts)?;
    Ok(AcceptanceSet {
        k: ts.depth(),
        len: ts.tagged_len(),
        repr: Repr::OnDemand {
            formula: f.clone(),
            inst: Instantiator::new(ts),
            memo: Mutex::new(HashMap::new()),
        },
    })
}

/// Enumerates when within budget, otherwise falls back to lazy membership.
pub fn acceptance(f: &Formula, ts: &TypeSpace, budget: &AccBudget) -> Result<AcceptanceSet> {
    match enumerate_acc_with(f, ts, budget) {
        Err(Error::Budget(_)) => acceptance_on_demand(f, ts),
        other => other,
    }
}
