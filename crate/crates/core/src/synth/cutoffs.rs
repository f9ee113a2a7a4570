//! Cutoff bounds on the number of processes.
//!
//! With T types over the full alphabet and h_max the height of their order,
//! Environment never needs more than f_E = k·T^h_max processes. For a fixed
//! number n_E of Environment processes, System never needs more than
//! f_S = F(h(tp(ε))) where F(-1) = k and F(n) = T^(n_E+2)·(F(n-1)+1)² + k.
//! These numbers are far too large to search up to; they are only reported.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::logic::{Alphabet, Player};
use crate::typespace::{build_full_types, TypeBudget, TypeSpace};
use crate::Result;

/// Largest value, in bits, that is computed exactly.
pub const DEFAULT_BIT_CAP: u64 = 1 << 20;

/// An exact big integer, or an estimate of its size when it exceeds the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Exact(BigUint),
    TooLarge { bits: u64 },
}

impl Bound {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Bound::Exact(v) => Some(v),
            Bound::TooLarge { .. } => None,
        }
    }

    pub fn bits(&self) -> u64 {
        match self {
            Bound::Exact(v) => v.bits(),
            Bound::TooLarge { bits } => *bits,
        }
    }

    /// Short form: the value itself when it has at most `max_digits` digits.
    pub fn summary(&self, max_digits: usize) -> String {
        match self {
            Bound::Exact(v) => {
                let s = v.to_string();
                if s.len() <= max_digits {
                    s
                } else {
                    format!("{}...{} ({} digits)", &s[..12], &s[s.len() - 6..], s.len())
                }
            }
            Bound::TooLarge { bits } => format!("about 2^{bits} (not computed)"),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary(usize::MAX))
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2))?;
        match self {
            Bound::Exact(v) => {
                m.serialize_entry("bits", &v.bits())?;
                m.serialize_entry("value", &v.to_string())?;
            }
            Bound::TooLarge { bits } => {
                m.serialize_entry("bits", bits)?;
                m.serialize_entry("value", &Option::<String>::None)?;
            }
        }
        m.end()
    }
}

/// k·T^h.
pub fn f_env(k: usize, types: &BigUint, h: usize) -> BigUint {
    BigUint::from(k) * types.pow(h as u32)
}

/// F(-1..=h) for the given number of Environment processes.
pub fn f_table(k: usize, types: &BigUint, ne: usize, h: usize, bit_cap: u64) -> Vec<Bound> {
    let factor = types.pow(ne as u32 + 2);
    let factor_bits = log2(&factor);
    let mut out = vec![Bound::Exact(BigUint::from(k))];
    for _ in 0..=h {
        let next = match out.last().unwrap() {
            Bound::Exact(prev) => {
                let est = factor_bits + 2.0 * log2(&(prev + 1u32));
                if est > bit_cap as f64 {
                    Bound::TooLarge { bits: est.ceil() as u64 }
                } else {
                    let p1 = prev + BigUint::one();
                    Bound::Exact(&factor * &p1 * &p1 + BigUint::from(k))
                }
            }
            Bound::TooLarge { bits } => Bound::TooLarge {
                bits: (factor_bits + 2.0 * *bits as f64).min(u64::MAX as f64 / 2.0) as u64,
            },
        };
        out.push(next);
    }
    out
}

fn log2(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return v.to_u64().map_or(0.0, |x| (x.max(1) as f64).log2());
    }
    let top = (v >> (bits - 64)).to_u64().unwrap() as f64;
    top.log2() + (bits - 64) as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeSize {
    pub player: Player,
    pub types: usize,
    pub height: usize,
    pub is_tree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemCutoff {
    pub ne: usize,
    /// F(-1), F(0), ..., F(h(tp(ε))).
    pub table: Vec<Bound>,
    pub f_s: Bound,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutoffReport {
    pub k: usize,
    /// Number of types over the full alphabet; absent when over budget.
    pub types: Option<usize>,
    pub h_max: Option<usize>,
    pub root_height: Option<usize>,
    pub unavailable: Option<String>,
    pub f_e: Option<Bound>,
    /// f_S for the smallest values of n_E; the full range up to f_E is out of reach.
    pub f_s: Vec<SystemCutoff>,
    /// Per-player type orders, for comparison.
    pub per_player: Vec<TreeSize>,
}

#[derive(Debug, Clone, Copy)]
pub struct CutoffOptions {
    pub max_ne: usize,
    pub bit_cap: u64,
    pub budget: TypeBudget,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        CutoffOptions {
            max_ne: 2,
            bit_cap: DEFAULT_BIT_CAP,
            budget: TypeBudget::default(),
        }
    }
}

pub fn cutoffs(alphabet: &Alphabet, k: usize, opts: &CutoffOptions) -> Result<CutoffReport> {
    let per_player = match TypeSpace::build_unchecked(alphabet, k, &opts.budget) {
        Ok(ts) => [Player::Environment, Player::System]
            .into_iter()
            .map(|p| {
                let t = ts.tree(p);
                TreeSize {
                    player: p,
                    types: t.len(),
                    height: t.max_height(),
                    is_tree: t.is_tree(),
                }
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    let full = match build_full_types(alphabet, k, &opts.budget) {
        Ok(full) => full,
        Err(crate::Error::Budget(msg)) => {
            return Ok(CutoffReport {
                k,
                types: None,
                h_max: None,
                root_height: None,
                unavailable: Some(msg),
                f_e: None,
                f_s: Vec::new(),
                per_player,
            })
        }
        Err(e) => return Err(e),
    };
    let t = full.num_types();
    let tree = full.tree();
    let (h_max, root_height) = (tree.max_height(), tree.height(tree.root()));
    Ok(report_from_counts(k, t, h_max, root_height, opts, per_player))
}

/// The report for given counts, without building any types.
pub fn report_from_counts(
    k: usize,
    types: usize,
    h_max: usize,
    root_height: usize,
    opts: &CutoffOptions,
    per_player: Vec<TreeSize>,
) -> CutoffReport {
    let tb = BigUint::from(types);
    let f_e = f_env(k, &tb, h_max);
    let f_s = (0..=opts.max_ne)
        .filter(|&ne| BigUint::from(ne) <= f_e)
        .map(|ne| {
            let table = f_table(k, &tb, ne, root_height, opts.bit_cap);
            SystemCutoff {
                ne,
                f_s: table.last().unwrap().clone(),
                table,
            }
        })
        .collect();
    CutoffReport {
        k,
        types: Some(types),
        h_max: Some(h_max),
        root_height: Some(root_height),
        unavailable: None,
        f_e: Some(Bound::Exact(f_e)),
        f_s,
        per_player,
    }
}

impl CutoffReport {
    pub fn render_text(&self) -> String {
        let mut out = format!("k = {}\n", self.k);
        match (self.types, self.h_max, self.root_height) {
            (Some(t), Some(h), Some(r)) => {
                out.push_str(&format!("types over the full alphabet: {t}\nh_max = {h}, h(tp(eps)) = {r}\n"));
            }
            _ => out.push_str(&format!(
                "types over the full alphabet: unavailable ({})\n",
                self.unavailable.as_deref().unwrap_or("unknown")
            )),
        }
        for s in &self.per_player {
            out.push_str(&format!(
                "{} types: {} (height {}, {})\n",
                s.player,
                s.types,
                s.height,
                if s.is_tree { "tree" } else { "not a tree" }
            ));
        }
        if let Some(fe) = &self.f_e {
            out.push_str(&format!("f_E = {}\n", fe.summary(80)));
        }
        for s in &self.f_s {
            out.push_str(&format!("n_E = {}: f_S = {}\n", s.ne, s.f_s.summary(80)));
            for (i, b) in s.table.iter().enumerate() {
                out.push_str(&format!("  F({}) = {}\n", i as isize - 1, b.summary(80)));
            }
        }
        out
    }
}
