//! End-to-end synthesis: preparing types and acceptance for a sentence,
//! searching process counts, cutoff bounds and strategy playback.

pub mod cutoffs;
pub mod playout;

use rayon::prelude::*;
use serde::Serialize;

use crate::acceptance::{acceptance, AccBudget, AcceptanceSet};
use crate::logic::{Formula, Player};
use crate::tokengame::{build_game_with, solve_buchi, GameBudget, SolveResult, SolveStats, Strategy, TokenGame};
use crate::typespace::{build_typespace_with, TypeBudget, TypeSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Accept type orders that are not trees.
    pub allow_dag: bool,
    pub types: TypeBudget,
    pub acc: AccBudget,
    pub game: GameBudget,
}

/// Depth used for a sentence: its quantifier depth, at least 1.
pub fn depth_for(f: &Formula) -> usize {
    f.depth().max(1)
}

/// Type space and acceptance set for a sentence.
#[derive(Debug)]
pub struct Prepared {
    pub formula: Formula,
    pub ts: TypeSpace,
    pub acc: AcceptanceSet,
}

pub fn prepare(f: &Formula, k: usize, opts: &Options) -> Result<Prepared> {
    let ts = if opts.allow_dag {
        let ts = TypeSpace::build_unchecked(f.alphabet(), k, &opts.types)?;
        for p in [Player::Environment, Player::System] {
            if !ts.tree(p).representative_independent() {
                return Err(Error::NotATree(format!(
                    "{p} type order at depth {k} depends on the chosen representatives"
                )));
            }
        }
        ts
    } else {
        build_typespace_with(f.alphabet(), k, &opts.types)?
    };
    let acc = acceptance(f, &ts, &opts.acc)?;
    Ok(Prepared {
        formula: f.clone(),
        ts,
        acc,
    })
}

impl Prepared {
    pub fn game(&self, ns: usize, ne: usize, budget: &GameBudget) -> Result<TokenGame<'_>> {
        build_game_with(&self.ts, &self.acc, ns, ne, budget)
    }

    /// Solves one pair and returns the winner at the initial vertex.
    pub fn solve(&self, ns: usize, ne: usize, budget: &GameBudget) -> Result<Solved> {
        let g = self.game(ns, ne, budget)?;
        let r = solve_buchi(&g);
        let strategy = Strategy::from_solution(&g, &r, &self.formula);
        Ok(Solved {
            winner: r.winner(g.initial_vertex()),
            stats: r.stats,
            strategy,
            result: r,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub winner: Player,
    pub stats: SolveStats,
    pub strategy: Strategy,
    pub result: SolveResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchRegion {
    pub max_ns: usize,
    pub max_ne: usize,
}

impl SearchRegion {
    /// Pairs by increasing n_S + n_E, then by n_S.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for total in 0..=self.max_ns + self.max_ne {
            for ns in 0..=total.min(self.max_ns) {
                let ne = total - ns;
                if ne <= self.max_ne {
                    out.push((ns, ne));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum PairOutcome {
    SystemWins { ns: usize, ne: usize, vertices: usize },
    EnvironmentWins { ns: usize, ne: usize, vertices: usize },
    OverBudget { ns: usize, ne: usize, reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub k: usize,
    pub pairs: Vec<PairOutcome>,
    /// First winning pair in enumeration order.
    pub found: Option<(usize, usize)>,
    /// Whether some pair before the first win could not be solved.
    pub incomplete: bool,
}

/// Solves pairs diagonal by diagonal, in parallel within a diagonal, and
/// stops after the first diagonal containing a win.
pub fn search(p: &Prepared, region: &SearchRegion, opts: &Options) -> SearchReport {
    let pairs = region.pairs();
    let mut outcomes = Vec::new();
    let mut found = None;
    let mut incomplete = false;
    let mut i = 0;
    while i < pairs.len() && found.is_none() {
        let total = pairs[i].0 + pairs[i].1;
        let diag: Vec<(usize, usize)> = pairs[i..].iter().copied().take_while(|&(s, e)| s + e == total).collect();
        i += diag.len();
        let solved: Vec<PairOutcome> = diag
            .par_iter()
            .map(|&(ns, ne)| match p.game(ns, ne, &opts.game) {
                Ok(g) => {
                    let r = solve_buchi(&g);
                    let vertices = g.num_vertices();
                    if r.system_wins(g.initial_vertex()) {
                        PairOutcome::SystemWins { ns, ne, vertices }
                    } else {
                        PairOutcome::EnvironmentWins { ns, ne, vertices }
                    }
                }
                Err(e) => PairOutcome::OverBudget {
                    ns,
                    ne,
                    reason: e.to_string(),
                },
            })
            .collect();
        for o in solved {
            match o {
                PairOutcome::SystemWins { ns, ne, .. } if found.is_none() => found = Some((ns, ne)),
                PairOutcome::OverBudget { .. } if found.is_none() => incomplete = true,
                _ => {}
            }
            outcomes.push(o);
        }
    }
    SearchReport {
        k: p.ts.depth(),
        pairs: outcomes,
        found,
        incomplete,
    }
}

/// [`search`] on a dedicated pool of `jobs` threads, or the global pool.
pub fn search_with_jobs(p: &Prepared, region: &SearchRegion, opts: &Options, jobs: Option<usize>) -> Result<SearchReport> {
    match jobs {
        None => Ok(search(p, region, opts)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
            Ok(pool.install(|| search(p, region, opts)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{corpus, parse_formula};

    #[test]
    fn enumeration_order() {
        let r = SearchRegion { max_ns: 1, max_ne: 2 };
        assert_eq!(r.pairs(), vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (1, 2)]);
    }

    #[test]
    fn search_examples() {
        let opts = Options::default();
        let region = SearchRegion { max_ns: 2, max_ne: 2 };
        let f = corpus::phi_ex();
        let p = prepare(&f, 3, &opts).unwrap();
        assert_eq!(search(&p, &region, &opts).found, Some((0, 0)));

        let g = parse_formula(&format!("({}) & (Ep x. ProcE(x))", corpus::PHI_EX), f.alphabet()).unwrap();
        let p = prepare(&g, 3, &opts).unwrap();
        let found = search(&p, &region, &opts).found.unwrap();
        assert!(found.1 >= 1);
        assert_eq!(found, (1, 1));

        let h = corpus::entry("some_e").unwrap().formula();
        let p = prepare(&h, depth_for(&h), &opts).unwrap();
        let report = search(&p, &region, &opts);
        assert_eq!(report.found, None);
        assert_eq!(report.pairs.len(), 9);
        assert!(!report.incomplete);
    }

    #[test]
    fn strict_mode_rejects_posets() {
        let e = corpus::entry("t_preceded_by_s").unwrap();
        let f = e.formula();
        assert!(matches!(prepare(&f, 2, &Options::default()), Err(Error::NotATree(_))));
        let opts = Options {
            allow_dag: true,
            ..Options::default()
        };
        let p = prepare(&f, 2, &opts).unwrap();
        assert!(!p.ts.tree(Player::System).is_tree());
    }
}
