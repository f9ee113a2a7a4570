//! The token game on types.
//!
//! Every process is an anonymous token sitting on a node of its player's type
//! order. Players alternate, Environment first; a move relocates any number of
//! own tokens to types above their current ones, and passing is always legal.
//! System wins when accepting configurations are visited infinitely often.
//! Since strict moves only go up a finite order, plays stabilize and this is
//! the same as the limit configuration being accepting.
//!
//! Configurations are pairs of multisets. The vertex of configuration `c` at
//! Environment's turn is `2c`, at System's turn `2c + 1`. Edges are not stored;
//! they are generated from per-player successor lists of multisets.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acceptance::{AcceptanceSet, CountingFunction};
use crate::logic::{Formula, Player};
use crate::typespace::{TypeSpace, TypeTree};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Token counts per type node for both players.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub sys: Vec<usize>,
    pub env: Vec<usize>,
}

impl Configuration {
    /// All tokens at the root.
    pub fn initial(ts: &TypeSpace, ns: usize, ne: usize) -> Self {
        let mut sys = vec![0; ts.tree(Player::System).len()];
        let mut env = vec![0; ts.tree(Player::Environment).len()];
        if ns > 0 {
            sys[0] = ns;
        }
        if ne > 0 {
            env[0] = ne;
        }
        Configuration { sys, env }
    }

    /// Exact counts in tagged order, for comparison with a data word.
    pub fn from_tagged(ts: &TypeSpace, counts: &[usize]) -> Self {
        let ne = ts.tree(Player::Environment).len();
        Configuration {
            env: counts[..ne].to_vec(),
            sys: counts[ne..].to_vec(),
        }
    }

    pub fn counts(&self, p: Player) -> &[usize] {
        match p {
            Player::System => &self.sys,
            Player::Environment => &self.env,
        }
    }

    fn counts_mut(&mut self, p: Player) -> &mut Vec<usize> {
        match p {
            Player::System => &mut self.sys,
            Player::Environment => &mut self.env,
        }
    }

    pub fn tagged(&self) -> Vec<usize> {
        self.env.iter().chain(&self.sys).copied().collect()
    }

    pub fn thresholded(&self, k: usize) -> CountingFunction {
        CountingFunction::threshold(&self.tagged(), k)
    }

    /// Nonzero entries as `player:type_id:count`, Environment first, joined by
    /// commas.
    pub fn key(&self) -> String {
        let mut parts = Vec::new();
        for p in [Player::Environment, Player::System] {
            for (node, &c) in self.counts(p).iter().enumerate() {
                if c > 0 {
                    parts.push(format!("{}:{}:{}", p.tag(), node, c));
                }
            }
        }
        parts.join(",")
    }

    pub fn apply(&mut self, ts: &TypeSpace, mv: &Move) -> Result<()> {
        let tree = ts.tree(mv.player);
        let mut next = self.counts(mv.player).to_vec();
        for s in &mv.steps {
            if s.from >= next.len() || s.to >= next.len() || !tree.le(s.from, s.to) || s.from == s.to {
                return Err(Error::Strategy(format!("illegal step {} -> {}", s.from, s.to)));
            }
            if next[s.from] < s.count {
                return Err(Error::Strategy(format!("not enough tokens on type {}", s.from)));
            }
            next[s.from] -= s.count;
        }
        for s in &mv.steps {
            next[s.to] += s.count;
        }
        *self.counts_mut(mv.player) = next;
        Ok(())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let key = self.key();
        if key.is_empty() {
            f.write_str("(no tokens)")
        } else {
            f.write_str(&key)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub from: usize,
    pub to: usize,
    pub count: usize,
}

/// A simultaneous relocation of own tokens; no steps means pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub player: Player,
    pub steps: Vec<Step>,
}

impl Move {
    pub fn pass(player: Player) -> Self {
        Move { player, steps: Vec::new() }
    }

    pub fn is_pass(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn tokens_moved(&self) -> usize {
        self.steps.iter().map(|s| s.count).sum()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            return write!(f, "{} passes", self.player.tag());
        }
        let steps: Vec<String> = self
            .steps
            .iter()
            .map(|s| format!("{}x {}->{}", s.count, s.from, s.to))
            .collect();
        write!(f, "{} moves {}", self.player.tag(), steps.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameBudget {
    pub max_vertices: u64,
    /// Bound on the stored successor lists of both players together.
    pub max_move_entries: u64,
}

impl Default for GameBudget {
    fn default() -> Self {
        GameBudget {
            max_vertices: 5_000_000,
            max_move_entries: 50_000_000,
        }
    }
}

fn multiset_count(nodes: usize, n: usize) -> Option<u64> {
    // C(nodes + n - 1, n)
    if nodes == 0 {
        return Some(if n == 0 { 1 } else { 0 });
    }
    let mut r: u128 = 1;
    for i in 0..n as u128 {
        r = r.checked_mul(nodes as u128 + i)? / (i + 1);
        if r > u64::MAX as u128 {
            return None;
        }
    }
    Some(r as u64)
}

/// Number of game vertices, computed without building anything.
pub fn estimate_vertices(ts: &TypeSpace, ns: usize, ne: usize) -> Option<u64> {
    let s = multiset_count(ts.tree(Player::System).len(), ns)?;
    let e = multiset_count(ts.tree(Player::Environment).len(), ne)?;
    s.checked_mul(e)?.checked_mul(2)
}

/// All size-n multisets over one player's types with their strict successors.
#[derive(Debug)]
struct Side {
    player: Player,
    /// Sorted node ids, lexicographic order; index 0 is all tokens at the root.
    multisets: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    potential: Vec<usize>,
    height: usize,
}

impl Side {
    fn build(tree: &TypeTree, player: Player, n: usize, entry_budget: u64) -> Result<Self> {
        let nodes = tree.len() as u32;
        let mut multisets = Vec::new();
        let mut cur = vec![0u32; n];
        loop {
            multisets.push(cur.clone());
            // next nondecreasing sequence
            let Some(i) = (0..n).rev().find(|&i| cur[i] + 1 < nodes) else {
                break;
            };
            let v = cur[i] + 1;
            for c in &mut cur[i..] {
                *c = v;
            }
        }
        if nodes == 0 && n > 0 {
            multisets.clear();
        }
        let index: HashMap<Vec<u32>, u32> =
            multisets.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let ups: Vec<Vec<u32>> = (0..tree.len())
            .map(|a| std::iter::once(a).chain(tree.above(a)).map(|b| b as u32).collect())
            .collect();
        let succ: Vec<Vec<u32>> = multisets
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                let mut out = Vec::new();
                let mut dest = Vec::with_capacity(m.len());
                let mut choice = Vec::with_capacity(m.len());
                successors(m, &ups, 0, &mut choice, &mut dest, &mut |d: &[u32]| {
                    let mut d = d.to_vec();
                    d.sort_unstable();
                    out.push(index[&d]);
                });
                out.sort_unstable();
                out.dedup();
                out.retain(|&j| j != i as u32);
                out
            })
            .collect();
        let entries: u64 = succ.iter().map(|s| s.len() as u64).sum();
        if entries > entry_budget {
            return Err(Error::Budget(format!(
                "{entries} {player} moves exceed the limit of {entry_budget}"
            )));
        }
        let mut pred = vec![Vec::new(); multisets.len()];
        for (i, s) in succ.iter().enumerate() {
            for &j in s {
                pred[j as usize].push(i as u32);
            }
        }
        let potential = multisets
            .iter()
            .map(|m| m.iter().map(|&a| tree.height(a as usize)).sum())
            .collect();
        Ok(Side {
            player,
            multisets,
            index,
            succ,
            pred,
            potential,
            height: tree.max_height(),
        })
    }

    fn len(&self) -> usize {
        self.multisets.len()
    }

    fn counts(&self, m: u32, nodes: usize) -> Vec<usize> {
        let mut c = vec![0; nodes];
        for &a in &self.multisets[m as usize] {
            c[a as usize] += 1;
        }
        c
    }

    fn lookup(&self, counts: &[usize]) -> Option<u32> {
        let mut m = Vec::new();
        for (a, &c) in counts.iter().enumerate() {
            m.extend(std::iter::repeat_n(a as u32, c));
        }
        self.index.get(&m).copied()
    }

    /// A redistribution turning multiset `a` into `b`, if one exists.
    fn relocation(&self, tree: &TypeTree, a: u32, b: u32) -> Option<Move> {
        let src = &self.multisets[a as usize];
        let dst = &self.multisets[b as usize];
        // Tokens that stay put can always be matched to themselves.
        let mut rest_src = Vec::new();
        let mut rest_dst: Vec<u32> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < src.len() || j < dst.len() {
            if i < src.len() && j < dst.len() && src[i] == dst[j] {
                i += 1;
                j += 1;
            } else if j == dst.len() || (i < src.len() && src[i] < dst[j]) {
                rest_src.push(src[i]);
                i += 1;
            } else {
                rest_dst.push(dst[j]);
                j += 1;
            }
        }
        let matching = bipartite_match(&rest_src, &rest_dst, |x, y| tree.le(x as usize, y as usize))?;
        let mut steps: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (s, &d) in rest_src.iter().zip(&matching) {
            *steps.entry((*s as usize, rest_dst[d] as usize)).or_default() += 1;
        }
        Some(Move {
            player: self.player,
            steps: steps
                .into_iter()
                .map(|((from, to), count)| Step { from, to, count })
                .collect(),
        })
    }
}

fn successors(
    m: &[u32],
    ups: &[Vec<u32>],
    i: usize,
    choice: &mut Vec<usize>,
    dest: &mut Vec<u32>,
    emit: &mut impl FnMut(&[u32]),
) {
    if i == m.len() {
        emit(dest);
        return;
    }
    let up = &ups[m[i] as usize];
    // Equal tokens pick nondecreasing destinations to avoid duplicates.
    let start = if i > 0 && m[i] == m[i - 1] { choice[i - 1] } else { 0 };
    for c in start..up.len() {
        choice.push(c);
        dest.push(up[c]);
        successors(m, ups, i + 1, choice, dest, emit);
        dest.pop();
        choice.pop();
    }
}

/// Perfect matching from `left` into `right` under `ok`, by augmenting paths.
fn bipartite_match(left: &[u32], right: &[u32], ok: impl Fn(u32, u32) -> bool) -> Option<Vec<usize>> {
    if left.len() != right.len() {
        return None;
    }
    let n = left.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        l: usize,
        left: &[u32],
        right: &[u32],
        ok: &impl Fn(u32, u32) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for r in 0..right.len() {
            if seen[r] || !ok(left[l], right[r]) {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none() || augment(owner[r].unwrap(), left, right, ok, seen, owner) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    for l in 0..n {
        let mut seen = vec![false; n];
        if !augment(l, left, right, &ok, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut out = vec![0; n];
    for (r, l) in owner.iter().enumerate() {
        out[l.unwrap()] = r;
    }
    Some(out)
}

/// The configuration graph of the token game for fixed token counts.
#[derive(Debug)]
pub struct TokenGame<'a> {
    ts: &'a TypeSpace,
    ns: usize,
    ne: usize,
    sys: Side,
    env: Side,
    accepting: FixedBitSet,
}

pub fn build_game<'a>(ts: &'a TypeSpace, acc: &AcceptanceSet, ns: usize, ne: usize) -> Result<TokenGame<'a>> {
    build_game_with(ts, acc, ns, ne, &GameBudget::default())
}

pub fn build_game_with<'a>(
    ts: &'a TypeSpace,
    acc: &AcceptanceSet,
    ns: usize,
    ne: usize,
    budget: &GameBudget,
) -> Result<TokenGame<'a>> {
    if acc.index_len() != ts.tagged_len() || acc.k() != ts.depth() {
        return Err(Error::Input("acceptance set over another type space".into()));
    }
    match estimate_vertices(ts, ns, ne) {
        Some(v) if v <= budget.max_vertices => {}
        est => {
            return Err(Error::Budget(format!(
                "token game with ({ns},{ne}) tokens has {} vertices, limit {}",
                est.map_or("more than 2^64".to_string(), |v| v.to_string()),
                budget.max_vertices
            )))
        }
    }
    let sys = Side::build(ts.tree(Player::System), Player::System, ns, budget.max_move_entries)?;
    let env = Side::build(ts.tree(Player::Environment), Player::Environment, ne, budget.max_move_entries)?;
    let (ns_nodes, ne_nodes) = (ts.tree(Player::System).len(), ts.tree(Player::Environment).len());
    let k = ts.depth();
    let me = env.len();
    let accepted: Vec<bool> = (0..sys.len() * me)
        .into_par_iter()
        .map(|c| {
            let mut tagged = env.counts((c % me) as u32, ne_nodes);
            tagged.extend(sys.counts((c / me) as u32, ns_nodes));
            acc.contains(&CountingFunction::threshold(&tagged, k))
        })
        .collect();
    let mut accepting = FixedBitSet::with_capacity(accepted.len());
    for (c, &a) in accepted.iter().enumerate() {
        accepting.set(c, a);
    }
    Ok(TokenGame {
        ts,
        ns,
        ne,
        sys,
        env,
        accepting,
    })
}

#[inline]
fn turn_of(v: usize) -> Player {
    if v.is_multiple_of(2) {
        Player::Environment
    } else {
        Player::System
    }
}

impl<'a> TokenGame<'a> {
    pub fn typespace(&self) -> &'a TypeSpace {
        self.ts
    }

    pub fn tokens(&self) -> (usize, usize) {
        (self.ns, self.ne)
    }

    pub fn num_configurations(&self) -> usize {
        self.sys.len() * self.env.len()
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.num_configurations()
    }

    pub fn num_edges(&self) -> u64 {
        let s: u64 = self.sys.succ.iter().map(|x| x.len() as u64 + 1).sum();
        let e: u64 = self.env.succ.iter().map(|x| x.len() as u64 + 1).sum();
        s * self.env.len() as u64 + e * self.sys.len() as u64
    }

    /// All tokens at the root, Environment to move.
    pub fn initial_vertex(&self) -> usize {
        0
    }

    pub fn turn(&self, v: usize) -> Player {
        turn_of(v)
    }

    fn split(&self, v: usize) -> (usize, usize) {
        let c = v / 2;
        (c / self.env.len(), c % self.env.len())
    }

    fn join(&self, s: usize, e: usize, turn: Player) -> usize {
        2 * (s * self.env.len() + e) + (turn == Player::System) as usize
    }

    pub fn configuration(&self, v: usize) -> Configuration {
        let (s, e) = self.split(v);
        Configuration {
            sys: self.sys.counts(s as u32, self.ts.tree(Player::System).len()),
            env: self.env.counts(e as u32, self.ts.tree(Player::Environment).len()),
        }
    }

    pub fn vertex(&self, c: &Configuration, turn: Player) -> Option<usize> {
        let s = self.sys.lookup(&c.sys)?;
        let e = self.env.lookup(&c.env)?;
        Some(self.join(s as usize, e as usize, turn))
    }

    pub fn is_accepting(&self, v: usize) -> bool {
        self.accepting.contains(v / 2)
    }

    /// Sum of token heights; strict moves decrease it.
    pub fn potential(&self, v: usize) -> usize {
        let (s, e) = self.split(v);
        self.sys.potential[s] + self.env.potential[e]
    }

    /// Largest number of strict moves any play can contain.
    pub fn max_strict_moves(&self) -> usize {
        self.ns * self.sys.height + self.ne * self.env.height
    }

    fn for_each_succ(&self, v: usize, mut f: impl FnMut(usize)) {
        let (s, e) = self.split(v);
        match turn_of(v) {
            Player::Environment => {
                f(self.join(s, e, Player::System));
                for &e2 in &self.env.succ[e] {
                    f(self.join(s, e2 as usize, Player::System));
                }
            }
            Player::System => {
                f(self.join(s, e, Player::Environment));
                for &s2 in &self.sys.succ[s] {
                    f(self.join(s2 as usize, e, Player::Environment));
                }
            }
        }
    }

    fn for_each_pred(&self, v: usize, mut f: impl FnMut(usize)) {
        let (s, e) = self.split(v);
        match turn_of(v) {
            Player::System => {
                f(self.join(s, e, Player::Environment));
                for &e0 in &self.env.pred[e] {
                    f(self.join(s, e0 as usize, Player::Environment));
                }
            }
            Player::Environment => {
                f(self.join(s, e, Player::System));
                for &s0 in &self.sys.pred[s] {
                    f(self.join(s0 as usize, e, Player::System));
                }
            }
        }
    }

    /// Successor vertices, the pass successor first.
    pub fn successors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_succ(v, |w| out.push(w));
        out
    }

    pub fn predecessors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_pred(v, |w| out.push(w));
        out
    }

    /// The move leading from `v` to its successor `w`.
    pub fn move_between(&self, v: usize, w: usize) -> Option<Move> {
        let (s, e) = self.split(v);
        let (s2, e2) = self.split(w);
        let p = turn_of(v);
        if turn_of(w) == p {
            return None;
        }
        match p {
            Player::Environment if s == s2 => {
                self.env.relocation(self.ts.tree(p), e as u32, e2 as u32)
            }
            Player::System if e == e2 => self.sys.relocation(self.ts.tree(p), s as u32, s2 as u32),
            _ => None,
        }
    }

    /// All legal moves at `v`, pass first.
    pub fn moves(&self, v: usize) -> Vec<Move> {
        self.successors(v)
            .into_iter()
            .map(|w| self.move_between(v, w).expect("successor reachable by a move"))
            .collect()
    }

    /// The vertex reached by playing `mv` at `v`.
    pub fn apply(&self, v: usize, mv: &Move) -> Result<usize> {
        if mv.player != turn_of(v) {
            return Err(Error::WrongTurn(format!("{} cannot move at a {} vertex", mv.player, turn_of(v))));
        }
        let mut c = self.configuration(v);
        c.apply(self.ts, mv)?;
        Ok(self.vertex(&c, mv.player.opponent()).expect("moves preserve token totals"))
    }

    fn attractor(&self, owner: Player, target: &FixedBitSet, alive: &FixedBitSet) -> (FixedBitSet, Vec<u32>) {
        let n = self.num_vertices();
        let mut set = FixedBitSet::with_capacity(n);
        let mut rank = vec![NONE; n];
        let mut counter = vec![NONE; n];
        let mut queue = VecDeque::new();
        for v in target.ones() {
            set.insert(v);
            rank[v] = 0;
            queue.push_back(v);
        }
        while let Some(w) = queue.pop_front() {
            let r = rank[w] + 1;
            self.for_each_pred(w, |v| {
                if set.contains(v) || !alive.contains(v) {
                    return;
                }
                let join = if turn_of(v) == owner {
                    true
                } else {
                    if counter[v] == NONE {
                        let mut d = 0;
                        self.for_each_succ(v, |x| d += alive.contains(x) as u32);
                        counter[v] = d;
                    }
                    counter[v] -= 1;
                    counter[v] == 0
                };
                if join {
                    set.insert(v);
                    rank[v] = r;
                    queue.push_back(v);
                }
            });
        }
        (set, rank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub configurations: usize,
    pub vertices: usize,
    pub edges: u64,
    pub iterations: usize,
    pub winning_vertices: usize,
}

/// System's winning region with attractor ranks and a positional strategy.
#[derive(Debug, Clone)]
pub struct SolveResult {
    win: FixedBitSet,
    rank: Vec<u32>,
    /// Chosen successor of each winning System vertex.
    choice: Vec<u32>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn system_wins(&self, v: usize) -> bool {
        self.win.contains(v)
    }

    pub fn winner(&self, v: usize) -> Player {
        if self.system_wins(v) {
            Player::System
        } else {
            Player::Environment
        }
    }

    pub fn winning_region(&self) -> &FixedBitSet {
        &self.win
    }

    /// Attractor rank within the winning region; 0 on accepting vertices.
    pub fn rank(&self, v: usize) -> Option<u32> {
        (self.rank[v] != NONE).then_some(self.rank[v])
    }

    pub fn choice(&self, v: usize) -> Option<usize> {
        (self.choice[v] != NONE).then_some(self.choice[v] as usize)
    }
}

/// Büchi fixpoint: repeatedly remove the Environment attractor of the
/// vertices from which System cannot reach an accepting vertex.
pub fn solve_buchi(game: &TokenGame) -> SolveResult {
    let n = game.num_vertices();
    let mut alive = FixedBitSet::with_capacity(n);
    alive.insert_range(..);
    let mut accepting = FixedBitSet::with_capacity(n);
    for c in game.accepting.ones() {
        accepting.insert(2 * c);
        accepting.insert(2 * c + 1);
    }
    let mut iterations = 0;
    let rank = loop {
        iterations += 1;
        let mut target = accepting.clone();
        target.intersect_with(&alive);
        let (reach, rank) = game.attractor(Player::System, &target, &alive);
        let mut trap = alive.clone();
        trap.difference_with(&reach);
        if trap.is_clear() {
            break rank;
        }
        let (lost, _) = game.attractor(Player::Environment, &trap, &alive);
        alive.difference_with(&lost);
    };
    let win = alive;
    let mut choice = vec![NONE; n];
    for v in win.ones().filter(|&v| turn_of(v) == Player::System) {
        let mut best = NONE;
        let mut best_rank = NONE;
        if rank[v] == 0 {
            // Stay put when that keeps the play in the region.
            let pass = v - 1;
            if win.contains(pass) {
                choice[v] = pass as u32;
                continue;
            }
        }
        game.for_each_succ(v, |w| {
            if win.contains(w) && rank[w] < best_rank {
                best = w as u32;
                best_rank = rank[w];
            }
        });
        choice[v] = best;
    }
    let stats = SolveStats {
        configurations: game.num_configurations(),
        vertices: n,
        edges: game.num_edges(),
        iterations,
        winning_vertices: win.count_ones(..),
    };
    let rank = rank
        .into_iter()
        .enumerate()
        .map(|(v, r)| if win.contains(v) { r } else { NONE })
        .collect();
    SolveResult {
        win,
        rank,
        choice,
        stats,
    }
}

/// Backward induction over configurations by increasing potential. Relies on
/// strict moves decreasing the potential, which holds on any finite order.
pub fn solve_descent(game: &TokenGame) -> FixedBitSet {
    let mut sys_order: Vec<usize> = (0..game.sys.len()).collect();
    sys_order.sort_by_key(|&s| game.sys.potential[s]);
    let mut env_order: Vec<usize> = (0..game.env.len()).collect();
    env_order.sort_by_key(|&e| game.env.potential[e]);
    let mut win = FixedBitSet::with_capacity(game.num_vertices());
    for &s in &sys_order {
        for &e in &env_order {
            let sys_turn = game.join(s, e, Player::System);
            let env_turn = game.join(s, e, Player::Environment);
            let good = game.sys.succ[s]
                .iter()
                .any(|&s2| win.contains(game.join(s2 as usize, e, Player::Environment)));
            let bad = game.env.succ[e]
                .iter()
                .any(|&e2| !win.contains(game.join(s, e2 as usize, Player::System)));
            let acc = game.is_accepting(sys_turn);
            win.set(sys_turn, good || (!bad && acc));
            win.set(env_turn, !bad && (acc || good));
        }
    }
    win
}

/// The positional move stored for a winning System vertex.
pub fn extract_strategy(game: &TokenGame, result: &SolveResult, v: usize) -> Result<Move> {
    if game.turn(v) != Player::System {
        return Err(Error::WrongTurn("strategies are defined at System vertices".into()));
    }
    let w = result
        .choice(v)
        .ok_or_else(|| Error::NotWinning(format!("System does not win at {}", game.configuration(v))))?;
    Ok(game.move_between(v, w).expect("chosen successor reachable"))
}

fn owned(names: Vec<&str>) -> Vec<String> {
    names.into_iter().map(str::to_string).collect()
}

/// A positional System strategy restricted to the vertices reachable from
/// the initial one, keyed by configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub k: usize,
    pub ns: usize,
    pub ne: usize,
    pub sigma_s: Vec<String>,
    pub sigma_e: Vec<String>,
    pub formula: String,
    pub winner: Player,
    pub moves: BTreeMap<String, Vec<Step>>,
}

impl Strategy {
    pub fn from_solution(game: &TokenGame, result: &SolveResult, formula: &Formula) -> Self {
        let ts = game.typespace();
        let a = ts.alphabet();
        let init = game.initial_vertex();
        let mut moves = BTreeMap::new();
        if result.system_wins(init) {
            let mut seen = FixedBitSet::with_capacity(game.num_vertices());
            let mut stack = vec![init];
            seen.insert(init);
            while let Some(v) = stack.pop() {
                let next: Vec<usize> = match game.turn(v) {
                    Player::Environment => game.successors(v),
                    Player::System => {
                        let w = result.choice(v).expect("winning region is closed");
                        let mv = game.move_between(v, w).expect("chosen successor reachable");
                        moves.insert(game.configuration(v).key(), mv.steps);
                        vec![w]
                    }
                };
                for w in next {
                    if !seen.put(w) {
                        stack.push(w);
                    }
                }
            }
        }
        let (ns, ne) = game.tokens();
        Strategy {
            k: ts.depth(),
            ns,
            ne,
            sigma_s: owned(a.names_of(Player::System)),
            sigma_e: owned(a.names_of(Player::Environment)),
            formula: formula.to_string(),
            winner: result.winner(init),
            moves,
        }
    }

    pub fn move_at(&self, c: &Configuration) -> Option<Move> {
        self.moves.get(&c.key()).map(|steps| Move {
            player: Player::System,
            steps: steps.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks that the strategy was computed for this setting.
    pub fn check_compatible(&self, ts: &TypeSpace, ns: usize, ne: usize) -> Result<()> {
        let a = ts.alphabet();
        if self.k != ts.depth()
            || self.ns != ns
            || self.ne != ne
            || self.sigma_s != a.names_of(Player::System)
            || self.sigma_e != a.names_of(Player::Environment)
        {
            return Err(Error::Strategy(format!(
                "strategy is for k={} ({},{}) tokens over {:?}/{:?}",
                self.k, self.ns, self.ne, self.sigma_s, self.sigma_e
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::enumerate_acc;
    use crate::logic::{corpus, parse_formula, Alphabet};
    use crate::typespace::build_typespace;

    fn unary() -> Alphabet {
        Alphabet::new(&["s"], &["e"]).unwrap()
    }

    #[test]
    fn vertex_counts() {
        let a = unary();
        let ts = build_typespace(&a, 2).unwrap();
        let acc = enumerate_acc(&corpus::entry("valid").unwrap().formula(), &ts).unwrap();
        assert_eq!(build_game(&ts, &acc, 1, 1).unwrap().num_vertices(), 18);
        assert_eq!(build_game(&ts, &acc, 2, 2).unwrap().num_configurations(), 36);
        let g = build_game(&ts, &acc, 0, 0).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.successors(0), vec![1]);
        assert_eq!(g.successors(1), vec![0]);
        assert_eq!(estimate_vertices(&ts, 2, 2), Some(72));
        let tiny = GameBudget {
            max_vertices: 10,
            ..GameBudget::default()
        };
        assert!(matches!(build_game_with(&ts, &acc, 1, 1, &tiny), Err(Error::Budget(_))));
    }

    #[test]
    fn multisets_and_moves() {
        let a = unary();
        let ts = build_typespace(&a, 2).unwrap();
        let side = Side::build(ts.tree(Player::System), Player::System, 2, u64::MAX).unwrap();
        assert_eq!(side.len(), 6);
        assert_eq!(side.multisets[0], vec![0, 0]);
        // {0,0} reaches every other multiset
        assert_eq!(side.succ[0].len(), 5);
        let top = side.index[&vec![2, 2]];
        assert!(side.succ[top as usize].is_empty());
        let mv = side.relocation(ts.tree(Player::System), 0, side.index[&vec![0, 2]]).unwrap();
        assert_eq!(mv.steps, vec![Step { from: 0, to: 2, count: 1 }]);
        assert!(side.relocation(ts.tree(Player::System), top, 0).is_none());
    }

    #[test]
    fn phi_ex_outcomes() {
        let a = unary();
        let ts = build_typespace(&a, 3).unwrap();
        let f = corpus::phi_ex();
        let acc = enumerate_acc(&f, &ts).unwrap();
        for (ns, ne, sys) in [(1, 1, true), (1, 2, false), (2, 2, true), (0, 0, true), (0, 1, false)] {
            let g = build_game(&ts, &acc, ns, ne).unwrap();
            let r = solve_buchi(&g);
            assert_eq!(r.system_wins(0), sys, "({ns},{ne})");
            let d = solve_descent(&g);
            assert_eq!(&d, r.winning_region(), "({ns},{ne})");
        }
    }

    #[test]
    fn phi_ex_strategy_answers() {
        let a = unary();
        let ts = build_typespace(&a, 3).unwrap();
        let f = corpus::phi_ex();
        let acc = enumerate_acc(&f, &ts).unwrap();
        let g = build_game(&ts, &acc, 2, 2).unwrap();
        let r = solve_buchi(&g);
        let e1 = ts.classify_word(Player::Environment, &[a.letter("e").unwrap()]).unwrap();
        let s1 = ts.classify_word(Player::System, &[a.letter("s").unwrap()]).unwrap();
        let mv = Move {
            player: Player::Environment,
            steps: vec![Step { from: 0, to: e1, count: 1 }],
        };
        let v = g.apply(0, &mv).unwrap();
        let answer = extract_strategy(&g, &r, v).unwrap();
        assert_eq!(answer.steps, vec![Step { from: 0, to: s1, count: 1 }]);
        let w = g.apply(v, &answer).unwrap();
        assert!(g.is_accepting(w) && r.system_wins(w));
        assert!(matches!(extract_strategy(&g, &r, w), Err(Error::WrongTurn(_))));

        let strat = Strategy::from_solution(&g, &r, &f);
        let back = Strategy::from_json(&strat.to_json()).unwrap();
        assert_eq!(back, strat);
        assert_eq!(back.move_at(&g.configuration(v)), Some(answer));
        assert!(back.check_compatible(&ts, 2, 2).is_ok());
        assert!(back.check_compatible(&ts, 1, 2).is_err());
    }

    #[test]
    fn accepting_rank_zero_passes() {
        let a = unary();
        let ts = build_typespace(&a, 2).unwrap();
        let f = parse_formula("Ap x. x = x", &a).unwrap();
        let acc = enumerate_acc(&f, &ts).unwrap();
        let g = build_game(&ts, &acc, 2, 1).unwrap();
        let r = solve_buchi(&g);
        for v in (1..g.num_vertices()).step_by(2) {
            assert_eq!(r.rank(v), Some(0));
            assert!(extract_strategy(&g, &r, v).unwrap().is_pass());
        }
    }

    #[test]
    fn environment_can_refuse_to_act() {
        let a = unary();
        let ts = build_typespace(&a, 1).unwrap();
        let f = parse_formula("Eb x. e(x)", &a).unwrap();
        let acc = enumerate_acc(&f, &ts).unwrap();
        for ns in 0..3 {
            for ne in 0..3 {
                let g = build_game(&ts, &acc, ns, ne).unwrap();
                assert!(!solve_buchi(&g).system_wins(0));
            }
        }
    }

    #[test]
    fn configuration_keys() {
        let a = unary();
        let ts = build_typespace(&a, 2).unwrap();
        let mut c = Configuration::initial(&ts, 2, 1);
        assert_eq!(c.key(), "E:0:1,S:0:2");
        c.apply(
            &ts,
            &Move {
                player: Player::System,
                steps: vec![Step { from: 0, to: 1, count: 1 }],
            },
        )
        .unwrap();
        assert_eq!(c.key(), "E:0:1,S:0:1,S:1:1");
        let bad = Move {
            player: Player::System,
            steps: vec![Step { from: 1, to: 0, count: 1 }],
        };
        assert!(c.apply(&ts, &bad).is_err());
        assert_eq!(Configuration::initial(&ts, 0, 0).to_string(), "(no tokens)");
    }
}
