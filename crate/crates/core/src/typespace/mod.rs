//! Prefix types of words, their extension order, and the per-player type trees.
//!
//! The prefix type of depth k of a word u is determined by the set of pairs
//! (u[i], FO_{k−1}-type of u[..i]): a depth-k prefix sentence bounds one
//! position and then speaks about the word strictly to its left. The engine
//! therefore runs the FO_{k−1} congruence automaton and accumulates that set
//! along the word. Pairs (FO state, accumulated set) form a finite congruence
//! refining prefix equivalence; quotienting by the set gives the types.

mod hintikka;

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::dataword::DataWord;
use crate::logic::{Alphabet, LetterId, Player};
use crate::{Error, Result};

use hintikka::Hintikka;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeBudget {
    /// Cap on automaton states, for the FO automaton and the product alike.
    pub max_states: usize,
}

impl Default for TypeBudget {
    fn default() -> Self {
        TypeBudget { max_states: 200_000 }
    }
}

/// Letters of a sub-alphabet with a reverse index.
#[derive(Debug, Clone)]
struct LetterIndex {
    letters: Vec<LetterId>,
    slot: HashMap<LetterId, usize>,
}

impl LetterIndex {
    fn new(letters: Vec<LetterId>) -> Self {
        let slot = letters.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        LetterIndex { letters, slot }
    }

    fn len(&self) -> usize {
        self.letters.len()
    }
}

/// The FO[<] congruence of a fixed depth over one sub-alphabet, as a complete
/// deterministic automaton whose states carry shortlex-least representatives.
#[derive(Debug, Clone)]
pub struct FoStateAutomaton {
    depth: usize,
    letters: LetterIndex,
    reps: Vec<Vec<LetterId>>,
    trans: Vec<u32>,
}

impl FoStateAutomaton {
    pub fn build(letters: &[LetterId], depth: usize, budget: &TypeBudget) -> Result<Self> {
        let letters = LetterIndex::new(letters.to_vec());
        let mut hint = Hintikka::new();
        let mut ids: HashMap<u32, u32> = HashMap::new();
        let mut reps = vec![Vec::new()];
        ids.insert(hint.word_type(&[], depth), 0);
        let mut trans = Vec::new();
        let mut next = 0;
        while next < reps.len() {
            for &a in &letters.letters {
                let mut w = reps[next].clone();
                w.push(a);
                let h = hint.word_type(&w, depth);
                let fresh = reps.len() as u32;
                let id = *ids.entry(h).or_insert(fresh);
                if id == fresh {
                    if reps.len() >= budget.max_states {
                        return Err(Error::Budget(format!(
                            "FO_{depth} automaton exceeds {} states",
                            budget.max_states
                        )));
                    }
                    reps.push(w);
                }
                trans.push(id);
            }
            next += 1;
        }
        Ok(FoStateAutomaton {
            depth,
            letters,
            reps,
            trans,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representative(&self, state: usize) -> &[LetterId] {
        &self.reps[state]
    }

    pub fn step(&self, state: usize, letter: LetterId) -> Option<usize> {
        let slot = *self.letters.slot.get(&letter)?;
        Some(self.trans[state * self.letters.len() + slot] as usize)
    }

    pub fn run(&self, word: &[LetterId]) -> Option<usize> {
        word.iter().try_fold(0, |q, &a| self.step(q, a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NodeTag {
    /// The type of the empty word, shared by both players.
    Root,
    Player(Player),
    /// A type mixing letters of both players; no class can have it.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeNode {
    pub id: usize,
    pub tag: NodeTag,
    #[serde(skip)]
    pub rep: Vec<LetterId>,
    pub height: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// The extension order on the types of one sub-alphabet.
#[derive(Debug, Clone)]
pub struct TypeTree {
    nodes: Vec<TypeNode>,
    /// `le[a]` holds every b with a ⪯ b.
    le: Vec<FixedBitSet>,
    hasse_parents: Vec<Vec<usize>>,
    representative_independent: bool,
}

impl TypeTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TypeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TypeNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a].contains(b)
    }

    /// Strict ⪯-successors of a node, in id order.
    pub fn above(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.le[a].ones().filter(move |&b| b != a)
    }

    pub fn hasse_parents(&self, a: usize) -> &[usize] {
        &self.hasse_parents[a]
    }

    pub fn height(&self, a: usize) -> usize {
        self.nodes[a].height
    }

    pub fn max_height(&self) -> usize {
        self.nodes.iter().map(|n| n.height).max().unwrap_or(0)
    }

    /// Whether every word of a type extends to every type above it, so that
    /// the order does not depend on the chosen representatives.
    pub fn representative_independent(&self) -> bool {
        self.representative_independent
    }

    pub fn is_tree(&self) -> bool {
        self.hasse_parents
            .iter()
            .enumerate()
            .all(|(i, p)| if i == 0 { p.is_empty() } else { p.len() == 1 })
    }

    /// Partial-order laws with the root as minimum.
    pub fn check_order(&self) -> Result<()> {
        let n = self.len();
        if self.le[0].count_ones(..) != n {
            return Err(Error::NotATree("the empty word's type is not below every type".into()));
        }
        for a in 0..n {
            if !self.le(a, a) {
                return Err(Error::NotATree(format!("type {a} is not below itself")));
            }
            for b in self.above(a) {
                if self.le(b, a) {
                    return Err(Error::NotATree(format!("types {a} and {b} extend each other")));
                }
                if !self.le[b].is_subset(&self.le[a]) {
                    return Err(Error::NotATree(format!("order is not transitive through {a} ⪯ {b}")));
                }
            }
        }
        Ok(())
    }

    fn check_tree(&self, alphabet: &Alphabet) -> Result<()> {
        self.check_order()?;
        let mut bad = Vec::new();
        for (i, parents) in self.hasse_parents.iter().enumerate().skip(1) {
            if parents.len() != 1 {
                let reps: Vec<String> = parents
                    .iter()
                    .map(|&p| alphabet.render(&self.nodes[p].rep))
                    .collect();
                bad.push(format!(
                    "tp({}) has {} Hasse parents [{}]",
                    alphabet.render(&self.nodes[i].rep),
                    parents.len(),
                    reps.join(", ")
                ));
            }
        }
        if bad.is_empty() {
            return Ok(());
        }
        let total = bad.len();
        bad.truncate(8);
        if total > bad.len() {
            bad.push(format!("and {} more", total - 8));
        }
        Err(Error::NotATree(bad.join("; ")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ProductState {
    fo: u32,
    set: u32,
}

/// Types of words over one sub-alphabet (or the full alphabet).
///
/// Automaton states pair an FO_{k−1} state with the accumulated set of
/// (letter, FO_{k−1} state before it); the type is the set alone.
#[derive(Debug, Clone)]
pub struct TypeStructure {
    alphabet: Alphabet,
    owner: Option<Player>,
    k: usize,
    fo: FoStateAutomaton,
    letters: LetterIndex,
    states: Vec<ProductState>,
    /// BFS parent and letter slot of each state; state 0 is the empty word.
    discovered_by: Vec<(u32, u16)>,
    trans: Vec<u32>,
    node_of: Vec<u32>,
    node_first_state: Vec<u32>,
    tree: OnceLock<TypeTree>,
}

impl TypeStructure {
    /// Builds the type automaton. The order on types is computed on first use
    /// and its tree shape is not enforced here.
    pub fn build(alphabet: &Alphabet, owner: Option<Player>, k: usize, budget: &TypeBudget) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("type depth must be at least 1".into()));
        }
        let letters = match owner {
            Some(p) => alphabet.letters_of(p),
            None => alphabet.all(),
        };
        let fo = FoStateAutomaton::build(&letters, k - 1, budget)?;
        let letters = LetterIndex::new(letters);
        let nl = letters.len();

        let mut set_ids: HashMap<Vec<(u16, u32)>, u32> = HashMap::new();
        let mut sets: Vec<Vec<(u16, u32)>> = vec![Vec::new()];
        set_ids.insert(Vec::new(), 0);
        let mut state_ids: HashMap<ProductState, u32> = HashMap::new();
        let start = ProductState { fo: 0, set: 0 };
        state_ids.insert(start, 0);
        let mut states = vec![start];
        let mut discovered_by = vec![(u32::MAX, 0)];
        let mut trans = Vec::new();
        let mut next = 0;
        while next < states.len() {
            let st = states[next];
            for slot in 0..nl {
                let item = (slot as u16, st.fo);
                let current = &sets[st.set as usize];
                let set_id = match current.binary_search(&item) {
                    Ok(_) => st.set,
                    Err(at) => {
                        let mut set = current.clone();
                        set.insert(at, item);
                        let fresh = sets.len() as u32;
                        let id = *set_ids.entry(set.clone()).or_insert(fresh);
                        if id == fresh {
                            sets.push(set);
                        }
                        id
                    }
                };
                let target = ProductState {
                    fo: fo.trans[st.fo as usize * nl + slot],
                    set: set_id,
                };
                let fresh = states.len() as u32;
                let id = *state_ids.entry(target).or_insert(fresh);
                if id == fresh {
                    if states.len() >= budget.max_states {
                        return Err(Error::Budget(format!(
                            "type automaton exceeds {} states",
                            budget.max_states
                        )));
                    }
                    states.push(target);
                    discovered_by.push((next as u32, slot as u16));
                }
                trans.push(id);
            }
            next += 1;
        }

        // Breadth-first discovery is shortlex order, so numbering types by
        // their first state makes node 0 the root and representatives minimal.
        let mut node_ids: HashMap<u32, u32> = HashMap::new();
        let mut node_of = Vec::with_capacity(states.len());
        let mut node_first_state = Vec::new();
        for (i, st) in states.iter().enumerate() {
            let fresh = node_ids.len() as u32;
            let id = *node_ids.entry(st.set).or_insert(fresh);
            if id == fresh {
                node_first_state.push(i as u32);
            }
            node_of.push(id);
        }

        Ok(TypeStructure {
            alphabet: alphabet.clone(),
            owner,
            k,
            fo,
            letters,
            states,
            discovered_by,
            trans,
            node_of,
            node_first_state,
            tree: OnceLock::new(),
        })
    }

    fn compute_tree(&self) -> TypeTree {
        let n = self.node_first_state.len();
        let ns = self.states.len();
        let nl = self.letters.len();

        let mut graph = DiGraph::<(), ()>::with_capacity(ns, ns * nl);
        for _ in 0..ns {
            graph.add_node(());
        }
        for s in 0..ns {
            for &t in &self.trans[s * nl..(s + 1) * nl] {
                if t as usize != s {
                    graph.add_edge(NodeIndex::new(s), NodeIndex::new(t as usize), ());
                }
            }
        }
        // Components come sinks first, so successors are always finished.
        let sccs = tarjan_scc(&graph);
        drop(graph);
        let mut scc_of = vec![0usize; ns];
        for (i, comp) in sccs.iter().enumerate() {
            for v in comp {
                scc_of[v.index()] = i;
            }
        }
        let mut reach: Vec<FixedBitSet> = Vec::with_capacity(sccs.len());
        for (i, comp) in sccs.iter().enumerate() {
            let mut r = FixedBitSet::with_capacity(n);
            for v in comp {
                let s = v.index();
                r.insert(self.node_of[s] as usize);
                for &t in &self.trans[s * nl..(s + 1) * nl] {
                    let j = scc_of[t as usize];
                    if j != i {
                        r.union_with(&reach[j]);
                    }
                }
            }
            reach.push(r);
        }

        let mut le = vec![FixedBitSet::with_capacity(n); n];
        for s in 0..ns {
            le[self.node_of[s] as usize].union_with(&reach[scc_of[s]]);
        }
        let representative_independent = (0..ns).all(|s| reach[scc_of[s]] == le[self.node_of[s] as usize]);
        drop(reach);

        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (a, row) in le.iter().enumerate() {
            for b in row.ones() {
                if b != a {
                    below[b].insert(a);
                }
            }
        }
        let hasse_parents: Vec<Vec<usize>> = below
            .iter()
            .map(|preds| {
                preds
                    .ones()
                    .filter(|&a| !le[a].intersection(preds).any(|c| c != a))
                    .collect()
            })
            .collect();

        // In a partial order a strict successor has strictly fewer successors,
        // so increasing successor count is a valid evaluation order.
        let succ_count: Vec<usize> = le.iter().map(|r| r.count_ones(..) - 1).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&a| succ_count[a]);
        let mut height = vec![0usize; n];
        for &a in &order {
            height[a] = le[a]
                .ones()
                .filter(|&b| b != a && succ_count[b] < succ_count[a])
                .map(|b| height[b] + 1)
                .max()
                .unwrap_or(0);
        }

        let mut children = vec![Vec::new(); n];
        for (b, ps) in hasse_parents.iter().enumerate() {
            for &a in ps {
                children[a].push(b);
            }
        }
        let nodes = children
            .into_iter()
            .enumerate()
            .map(|(id, children)| {
                let rep = self.state_representative(self.node_first_state[id] as usize);
                TypeNode {
                    id,
                    tag: tag_of(&self.alphabet, &rep),
                    rep,
                    height: height[id],
                    parent: match hasse_parents[id].as_slice() {
                        [p] => Some(*p),
                        _ => None,
                    },
                    children,
                }
            })
            .collect();
        TypeTree {
            nodes,
            le,
            hasse_parents,
            representative_independent,
        }
    }

    pub fn owner(&self) -> Option<Player> {
        self.owner
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn letters(&self) -> &[LetterId] {
        &self.letters.letters
    }

    /// The order on types, computed on first call.
    pub fn tree(&self) -> &TypeTree {
        self.tree.get_or_init(|| self.compute_tree())
    }

    pub fn num_types(&self) -> usize {
        self.node_first_state.len()
    }

    pub fn fo_automaton(&self) -> &FoStateAutomaton {
        &self.fo
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_representative(&self, state: usize) -> Vec<LetterId> {
        let mut w = Vec::new();
        let mut at = state;
        while at != 0 {
            let (parent, slot) = self.discovered_by[at];
            w.push(self.letters.letters[slot as usize]);
            at = parent as usize;
        }
        w.reverse();
        w
    }

    pub fn type_representative(&self, node: usize) -> Vec<LetterId> {
        self.state_representative(self.node_first_state[node] as usize)
    }

    pub fn state_node(&self, state: usize) -> usize {
        self.node_of[state] as usize
    }

    /// The FO component of a product state.
    pub fn state_fo(&self, state: usize) -> usize {
        self.states[state].fo as usize
    }

    pub fn step(&self, state: usize, letter: LetterId) -> Result<usize> {
        let slot = *self.letters.slot.get(&letter).ok_or_else(|| {
            Error::AlphabetMismatch(format!(
                "action `{}` is outside this sub-alphabet",
                self.alphabet.name(letter)
            ))
        })?;
        Ok(self.trans[state * self.letters.len() + slot] as usize)
    }

    pub fn run(&self, word: &[LetterId]) -> Result<usize> {
        word.iter().try_fold(0, |q, &a| self.step(q, a))
    }

    pub fn classify(&self, word: &[LetterId]) -> Result<usize> {
        Ok(self.state_node(self.run(word)?))
    }

    /// Shortest (then least) suffix taking `current` to a word of type `target`.
    pub fn realize_extension(&self, current: &[LetterId], target: usize) -> Result<Vec<LetterId>> {
        let start = self.run(current)?;
        let nl = self.letters.len();
        let mut back: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        back.insert(start, (usize::MAX, 0));
        while let Some(s) = queue.pop_front() {
            if self.state_node(s) == target {
                let mut suffix = Vec::new();
                let mut at = s;
                while at != start {
                    let (prev, slot) = back[&at];
                    suffix.push(self.letters.letters[slot]);
                    at = prev;
                }
                suffix.reverse();
                return Ok(suffix);
            }
            for slot in 0..nl {
                let t = self.trans[s * nl + slot] as usize;
                if let Entry::Vacant(e) = back.entry(t) {
                    e.insert((s, slot));
                    queue.push_back(t);
                }
            }
        }
        Err(Error::Unreachable(format!(
            "type {target} does not extend the type of the current word"
        )))
    }
}

fn tag_of(alphabet: &Alphabet, rep: &[LetterId]) -> NodeTag {
    let mut owners = rep.iter().map(|&l| alphabet.owner(l));
    match owners.next() {
        None => NodeTag::Root,
        Some(first) if owners.all(|o| o == first) => NodeTag::Player(first),
        Some(_) => NodeTag::Mixed,
    }
}

/// Canonical prefix types computed word by word, without building an
/// automaton. Keys are comparable only within one instance.
#[derive(Debug)]
pub struct PrefixTypeKeys {
    k: usize,
    hint: Hintikka,
}

impl PrefixTypeKeys {
    pub fn new(k: usize) -> Self {
        PrefixTypeKeys {
            k,
            hint: Hintikka::new(),
        }
    }

    /// The set of pairs (letter at i, FO_{k−1} type of the prefix before i).
    pub fn key(&mut self, word: &[LetterId]) -> Vec<(LetterId, u32)> {
        if self.k == 0 {
            return Vec::new();
        }
        let mut key: Vec<(LetterId, u32)> = (0..word.len())
            .map(|i| (word[i], self.hint.word_type(&word[..i], self.k - 1)))
            .collect();
        key.sort_unstable();
        key.dedup();
        key
    }
}

/// Per-player type trees for one alphabet and depth.
#[derive(Debug, Clone)]
pub struct TypeSpace {
    alphabet: Alphabet,
    k: usize,
    env: TypeStructure,
    sys: TypeStructure,
}

/// Builds both per-player structures and requires each to be a tree.
pub fn build_typespace(alphabet: &Alphabet, k: usize) -> Result<TypeSpace> {
    build_typespace_with(alphabet, k, &TypeBudget::default())
}

pub fn build_typespace_with(alphabet: &Alphabet, k: usize, budget: &TypeBudget) -> Result<TypeSpace> {
    let ts = TypeSpace::build_unchecked(alphabet, k, budget)?;
    for p in [Player::Environment, Player::System] {
        ts.structure(p).tree().check_tree(alphabet).map_err(|e| match e {
            Error::NotATree(msg) => Error::NotATree(format!("{p} types at depth {k}: {msg}")),
            other => other,
        })?;
    }
    Ok(ts)
}

/// Types over the full alphabet, including mixed ones. Used for cutoffs.
pub fn build_full_types(alphabet: &Alphabet, k: usize, budget: &TypeBudget) -> Result<TypeStructure> {
    TypeStructure::build(alphabet, None, k, budget)
}

impl TypeSpace {
    /// Builds without enforcing the tree shape, for diagnostics.
    pub fn build_unchecked(alphabet: &Alphabet, k: usize, budget: &TypeBudget) -> Result<Self> {
        Ok(TypeSpace {
            alphabet: alphabet.clone(),
            k,
            env: TypeStructure::build(alphabet, Some(Player::Environment), k, budget)?,
            sys: TypeStructure::build(alphabet, Some(Player::System), k, budget)?,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn structure(&self, p: Player) -> &TypeStructure {
        match p {
            Player::Environment => &self.env,
            Player::System => &self.sys,
        }
    }

    pub fn tree(&self, p: Player) -> &TypeTree {
        self.structure(p).tree()
    }

    pub fn classify_word(&self, p: Player, u: &[LetterId]) -> Result<usize> {
        self.structure(p).classify(u)
    }

    pub fn realize_extension(&self, p: Player, current: &[LetterId], target: usize) -> Result<Vec<LetterId>> {
        self.structure(p).realize_extension(current, target)
    }

    /// Types of every prefix of `u·extensions`, starting with the empty prefix.
    pub fn stationary_probe(&self, p: Player, u: &[LetterId], extensions: &[LetterId]) -> Result<Vec<usize>> {
        let s = self.structure(p);
        let mut state = 0;
        let mut out = vec![s.state_node(0)];
        for &a in u.iter().chain(extensions) {
            state = s.step(state, a)?;
            out.push(s.state_node(state));
        }
        Ok(out)
    }

    /// Size of the tagged index: Environment types first, then System types.
    pub fn tagged_len(&self) -> usize {
        self.env.num_types() + self.sys.num_types()
    }

    pub fn tagged_index(&self, p: Player, node: usize) -> usize {
        match p {
            Player::Environment => node,
            Player::System => self.env.num_types() + node,
        }
    }

    pub fn tagged_entry(&self, i: usize) -> (Player, usize) {
        let ne = self.env.num_types();
        if i < ne {
            (Player::Environment, i)
        } else {
            (Player::System, i - ne)
        }
    }

    /// Exact number of classes per tagged type, empty classes included.
    pub fn tagged_collection(&self, w: &DataWord) -> Result<Vec<usize>> {
        if w.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch("data word over a different alphabet".into()));
        }
        let mut counts = vec![0; self.tagged_len()];
        for (decl, word) in w.processes().iter().zip(w.class_words()) {
            let node = self.classify_word(decl.player, &word)?;
            counts[self.tagged_index(decl.player, node)] += 1;
        }
        Ok(counts)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for p in [Player::Environment, Player::System] {
            let _ = writeln!(out, "# {p} types at depth {}", self.k);
            out.push_str(&render_tree_text(&self.alphabet, self.tree(p)));
        }
        out
    }

    pub fn render_dot(&self) -> String {
        let mut out = String::from("digraph types {\n  node [shape=box];\n");
        for p in [Player::Environment, Player::System] {
            let tree = self.tree(p);
            for n in tree.nodes() {
                let _ = writeln!(
                    out,
                    "  {}{} [label=\"tp({})\\nh={}\"];",
                    p.tag(),
                    n.id,
                    self.alphabet.render(&n.rep),
                    n.height
                );
            }
            for n in tree.nodes() {
                for &c in &n.children {
                    let _ = writeln!(out, "  {}{} -> {}{};", p.tag(), n.id, p.tag(), c);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let tree_json = |p: Player| {
            let tree = self.tree(p);
            serde_json::json!({
                "player": p,
                "states": self.structure(p).num_states(),
                "nodes": tree.nodes().iter().map(|n| serde_json::json!({
                    "id": n.id,
                    "rep": self.alphabet.render(&n.rep),
                    "height": n.height,
                    "parent": n.parent,
                    "children": n.children,
                })).collect::<Vec<_>>(),
            })
        };
        serde_json::json!({
            "k": self.k,
            "environment": tree_json(Player::Environment),
            "system": tree_json(Player::System),
        })
    }
}

/// One node per line: id, representative, height, parent.
pub fn render_tree_text(alphabet: &Alphabet, tree: &TypeTree) -> String {
    let mut out = String::new();
    for n in tree.nodes() {
        let parent = match tree.hasse_parents(n.id) {
            [] => "-".to_string(),
            ps => ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
        };
        let _ = writeln!(
            out,
            "{} {} height={} parent={}",
            n.id,
            alphabet.render(&n.rep),
            n.height,
            parent
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unary() -> Alphabet {
        Alphabet::new(&["s"], &["e"]).unwrap()
    }

    fn chain_reps(ts: &TypeSpace, p: Player) -> Vec<String> {
        ts.tree(p)
            .nodes()
            .iter()
            .map(|n| ts.alphabet().render(&n.rep))
            .collect()
    }

    #[test]
    fn unary_depth_two_is_a_three_chain() {
        let ts = build_typespace(&unary(), 2).unwrap();
        assert_eq!(chain_reps(&ts, Player::Environment), ["ε", "e", "ee"]);
        assert_eq!(chain_reps(&ts, Player::System), ["ε", "s", "ss"]);
        let t = ts.tree(Player::Environment);
        assert_eq!(t.node(1).parent, Some(0));
        assert_eq!(t.node(2).parent, Some(1));
        assert_eq!([t.height(0), t.height(1), t.height(2)], [2, 1, 0]);
    }

    #[test]
    fn unary_depth_one_is_a_two_chain() {
        let ts = build_typespace(&unary(), 1).unwrap();
        assert_eq!(chain_reps(&ts, Player::Environment), ["ε", "e"]);
    }

    #[test]
    fn empty_sub_alphabet_has_only_the_root() {
        let a = Alphabet::new::<&str, _>(&[], &["e"]).unwrap();
        let ts = build_typespace(&a, 2).unwrap();
        assert_eq!(ts.tree(Player::System).len(), 1);
        assert_eq!(ts.tagged_len(), 4);
    }

    #[test]
    fn classify_and_realize() {
        let a = unary();
        let ts = build_typespace(&a, 2).unwrap();
        let e = |s: &str| a.parse_word(s).unwrap();
        let env = Player::Environment;
        assert_eq!(ts.classify_word(env, &e("e")).unwrap(), 1);
        assert_eq!(ts.classify_word(env, &e("eee")).unwrap(), 2);
        assert_eq!(ts.classify_word(env, &[]).unwrap(), 0);
        assert!(ts.classify_word(env, &e("s")).is_err());
        assert_eq!(ts.realize_extension(env, &[], 2).unwrap(), e("ee"));
        assert_eq!(ts.realize_extension(env, &e("e"), 1).unwrap(), vec![]);
        assert_eq!(ts.realize_extension(env, &e("eee"), 2).unwrap(), vec![]);
        assert!(matches!(
            ts.realize_extension(env, &e("ee"), 1),
            Err(Error::Unreachable(_))
        ));
        assert_eq!(ts.stationary_probe(env, &e("eee"), &e("e")).unwrap(), [0, 1, 2, 2, 2]);
        assert_eq!(ts.stationary_probe(env, &[], &[]).unwrap(), [0]);
    }

    #[test]
    fn tagged_collections() {
        let a = unary();
        let ts = build_typespace(&a, 2).unwrap();
        let w = DataWord::parse_text("proc p E\nproc q S\ne p", &a).unwrap();
        let c = ts.tagged_collection(&w).unwrap();
        assert_eq!(c, [0, 1, 0, 1, 0, 0]);
        let w = DataWord::parse_text("proc p E\nproc q E\ne p\ne p\ne p\ne q\ne q", &a).unwrap();
        assert_eq!(ts.tagged_collection(&w).unwrap(), [0, 0, 2, 0, 0, 0]);
    }

    #[test]
    fn depth_one_over_two_letters_is_a_diamond() {
        let a = Alphabet::new::<&str, _>(&[], &["a", "b"]).unwrap();
        let err = build_typespace(&a, 1).unwrap_err();
        assert!(matches!(err, Error::NotATree(_)), "{err}");
        let ts = TypeSpace::build_unchecked(&a, 1, &TypeBudget::default()).unwrap();
        let t = ts.tree(Player::Environment);
        assert_eq!(t.len(), 4);
        t.check_order().unwrap();
        assert_eq!(t.hasse_parents(3).len(), 2);
    }

    #[test]
    fn output_formats_mention_every_node() {
        let ts = build_typespace(&unary(), 2).unwrap();
        let text = ts.render_text();
        assert!(text.contains("2 ee height=0 parent=1"));
        assert!(ts.render_dot().contains("E1 -> E2"));
        assert_eq!(ts.to_json()["system"]["nodes"].as_array().unwrap().len(), 3);
    }
}
