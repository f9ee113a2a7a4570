//! Finite data words and exact first-order evaluation over them.
//!
//! A data word is viewed as a structure with one element per process and one
//! element per position. `<` orders positions only; `~` groups a process
//! element with all positions of its class.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::logic::{Alphabet, Atom, Formula, LetterId, Node, Player, VarKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcessDecl {
    pub id: String,
    pub player: Player,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub action: LetterId,
    /// Index into the process declarations.
    pub process: usize,
}

/// The actions of one process, in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassWord {
    pub player: Player,
    pub word: Vec<LetterId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataWord {
    alphabet: Alphabet,
    processes: Vec<ProcessDecl>,
    events: Vec<Event>,
}

impl DataWord {
    pub fn new(alphabet: Alphabet, processes: Vec<ProcessDecl>, events: Vec<Event>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, p) in processes.iter().enumerate() {
            if seen.insert(p.id.as_str(), i).is_some() {
                return Err(Error::DataWord(format!("process `{}` declared twice", p.id)));
            }
        }
        for ev in &events {
            let Some(p) = processes.get(ev.process) else {
                return Err(Error::DataWord(format!("undeclared process index {}", ev.process)));
            };
            if ev.action.0 as usize >= alphabet.len() {
                return Err(Error::DataWord(format!("unknown action id {}", ev.action.0)));
            }
            if alphabet.owner(ev.action) != p.player {
                return Err(Error::DataWord(format!(
                    "{} process `{}` cannot take action `{}`",
                    p.player,
                    p.id,
                    alphabet.name(ev.action)
                )));
            }
        }
        Ok(DataWord {
            alphabet,
            processes,
            events,
        })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        DataWord {
            alphabet,
            processes: Vec::new(),
            events: Vec::new(),
        }
    }

    /// Builds a data word whose classes are laid out one after the other.
    pub fn from_classes(alphabet: &Alphabet, classes: &[(&str, Player, Vec<LetterId>)]) -> Result<Self> {
        let processes = classes
            .iter()
            .map(|(id, player, _)| ProcessDecl {
                id: id.to_string(),
                player: *player,
            })
            .collect();
        let events = classes
            .iter()
            .enumerate()
            .flat_map(|(i, (_, _, w))| w.iter().map(move |&a| Event { action: a, process: i }))
            .collect();
        DataWord::new(alphabet.clone(), processes, events)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn processes(&self) -> &[ProcessDecl] {
        &self.processes
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn process_index(&self, id: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.id == id)
    }

    pub fn add_process(&mut self, id: &str, player: Player) -> Result<usize> {
        if self.process_index(id).is_some() {
            return Err(Error::DataWord(format!("process `{id}` declared twice")));
        }
        self.processes.push(ProcessDecl {
            id: id.to_string(),
            player,
        });
        Ok(self.processes.len() - 1)
    }

    pub fn push(&mut self, action: LetterId, process: usize) -> Result<()> {
        let p = self
            .processes
            .get(process)
            .ok_or_else(|| Error::DataWord(format!("undeclared process index {process}")))?;
        if self.alphabet.owner(action) != p.player {
            return Err(Error::DataWord(format!(
                "{} process `{}` cannot take action `{}`",
                p.player,
                p.id,
                self.alphabet.name(action)
            )));
        }
        self.events.push(Event { action, process });
        Ok(())
    }

    /// Class words indexed like [`DataWord::processes`].
    pub fn class_words(&self) -> Vec<Vec<LetterId>> {
        let mut out = vec![Vec::new(); self.processes.len()];
        for ev in &self.events {
            out[ev.process].push(ev.action);
        }
        out
    }

    /// Per-process classes, including empty ones.
    pub fn classes(&self) -> BTreeMap<String, ClassWord> {
        self.class_words()
            .into_iter()
            .zip(&self.processes)
            .map(|(word, p)| {
                (
                    p.id.clone(),
                    ClassWord {
                        player: p.player,
                        word,
                    },
                )
            })
            .collect()
    }

    /// True iff `other` permutes the events of `self` without changing any class
    /// or process declaration.
    pub fn reorder_equivalent(&self, other: &DataWord) -> bool {
        if self.alphabet != other.alphabet || self.processes.len() != other.processes.len() {
            return false;
        }
        let mine: HashMap<&str, Player> =
            self.processes.iter().map(|p| (p.id.as_str(), p.player)).collect();
        if other
            .processes
            .iter()
            .any(|p| mine.get(p.id.as_str()) != Some(&p.player))
        {
            return false;
        }
        self.classes() == other.classes()
    }

    /// Line format: `proc <id> S|E` declarations, then `<action> <id>` events.
    pub fn parse_text(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut w = DataWord::empty(alphabet.clone());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::DataWord(format!("line {}: {msg}", lineno + 1));
            match fields.as_slice() {
                ["proc", id, tag] => {
                    let player = Player::from_tag(tag).ok_or_else(|| bad("player must be S or E"))?;
                    if !w.events.is_empty() {
                        return Err(bad("process declarations must precede events"));
                    }
                    w.add_process(id, player).map_err(|e| bad(&e.to_string()))?;
                }
                [action, id] => {
                    let a = alphabet
                        .letter(action)
                        .ok_or_else(|| bad(&format!("unknown action `{action}`")))?;
                    let p = w
                        .process_index(id)
                        .ok_or_else(|| bad(&format!("undeclared process `{id}`")))?;
                    w.push(a, p).map_err(|e| bad(&e.to_string()))?;
                }
                _ => return Err(bad("expected `proc <id> S|E` or `<action> <process>`")),
            }
        }
        Ok(w)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.processes {
            out.push_str(&format!("proc {} {}\n", p.id, p.player.tag()));
        }
        for ev in &self.events {
            out.push_str(&format!(
                "{} {}\n",
                self.alphabet.name(ev.action),
                self.processes[ev.process].id
            ));
        }
        out
    }

    pub fn to_json(&self) -> DataWordJson {
        DataWordJson {
            processes: self
                .processes
                .iter()
                .map(|p| ProcessJson {
                    id: p.id.clone(),
                    player: p.player,
                })
                .collect(),
            events: self
                .events
                .iter()
                .map(|ev| EventJson {
                    action: self.alphabet.name(ev.action).to_string(),
                    process: self.processes[ev.process].id.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &DataWordJson, alphabet: &Alphabet) -> Result<Self> {
        let mut w = DataWord::empty(alphabet.clone());
        for p in &json.processes {
            w.add_process(&p.id, p.player)?;
        }
        for ev in &json.events {
            let a = alphabet
                .letter(&ev.action)
                .ok_or_else(|| Error::DataWord(format!("unknown action `{}`", ev.action)))?;
            let p = w
                .process_index(&ev.process)
                .ok_or_else(|| Error::DataWord(format!("undeclared process `{}`", ev.process)))?;
            w.push(a, p)?;
        }
        Ok(w)
    }

    /// Accepts either the JSON form or the line format.
    pub fn parse_any(text: &str, alphabet: &Alphabet) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let json: DataWordJson = serde_json::from_str(text)?;
            DataWord::from_json(&json, alphabet)
        } else {
            DataWord::parse_text(text, alphabet)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessJson {
    pub id: String,
    pub player: Player,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventJson {
    pub action: String,
    pub process: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataWordJson {
    pub processes: Vec<ProcessJson>,
    pub events: Vec<EventJson>,
}

/// The logical structure of a data word. Elements `0..procs` are process
/// elements, the remaining ones are positions in word order.
#[derive(Debug, Clone)]
pub struct Structure {
    players: Vec<Player>,
    /// Class (process index) of each element.
    class_of: Vec<u32>,
    /// Letter of each position element, indexed by element.
    letter: Vec<Option<LetterId>>,
    /// Position elements of each class, in order.
    class_positions: Vec<Vec<u32>>,
}

impl Structure {
    pub fn from_word(w: &DataWord) -> Self {
        let players: Vec<Player> = w.processes.iter().map(|p| p.player).collect();
        Structure::from_parts(players, w.events.iter().map(|e| (e.action, e.process)))
    }

    pub(crate) fn from_parts(
        players: Vec<Player>,
        events: impl ExactSizeIterator<Item = (LetterId, usize)>,
    ) -> Self {
        let np = players.len();
        let total = np + events.len();
        let mut class_of: Vec<u32> = (0..np as u32).collect();
        class_of.reserve(total - np);
        let mut letter = vec![None; np];
        letter.reserve(total - np);
        let mut class_positions = vec![Vec::new(); np];
        for (i, (a, p)) in events.enumerate() {
            class_of.push(p as u32);
            letter.push(Some(a));
            class_positions[p].push((np + i) as u32);
        }
        Structure {
            players,
            class_of,
            letter,
            class_positions,
        }
    }

    pub fn num_processes(&self) -> usize {
        self.players.len()
    }

    pub fn universe_size(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_process(&self, e: u32) -> bool {
        (e as usize) < self.players.len()
    }

    pub fn player(&self, e: u32) -> Option<Player> {
        self.players.get(e as usize).copied()
    }

    pub fn class_of(&self, e: u32) -> u32 {
        self.class_of[e as usize]
    }

    pub fn letter(&self, e: u32) -> Option<LetterId> {
        self.letter[e as usize]
    }

    /// `x ≲ y`: same class and strictly earlier position; false on process elements.
    pub fn pref_less(&self, x: u32, y: u32) -> bool {
        !self.is_process(x) && !self.is_process(y) && self.class_of(x) == self.class_of(y) && x < y
    }

    pub fn holds(&self, f: &Formula) -> bool {
        let mut env = vec![u32::MAX; f.vars().len()];
        Evaluator { s: self, f }.eval(f.root(), &mut env)
    }
}

struct Evaluator<'a> {
    s: &'a Structure,
    f: &'a Formula,
}

impl Evaluator<'_> {
    fn atom(&self, a: &Atom, env: &[u32]) -> bool {
        let s = self.s;
        let val = |v: &crate::logic::VarId| env[v.index()];
        match a {
            Atom::Equal(x, y) => val(x) == val(y),
            Atom::ProcS(x) => s.player(val(x)) == Some(Player::System),
            Atom::ProcE(x) => s.player(val(x)) == Some(Player::Environment),
            Atom::Letter(l, x) => s.letter(val(x)) == Some(*l),
            Atom::PrefLess(x, y) => s.pref_less(val(x), val(y)),
            Atom::SameClass(x, y) => s.class_of(val(x)) == s.class_of(val(y)),
        }
    }

    fn eval(&self, n: &Node, env: &mut [u32]) -> bool {
        match n {
            Node::Atom(a) => self.atom(a, env),
            Node::Not(a) => !self.eval(a, env),
            Node::And(a, b) => self.eval(a, env) && self.eval(b, env),
            Node::Or(a, b) => self.eval(a, env) || self.eval(b, env),
            Node::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Node::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Node::Exists(q) => {
                let s = self.s;
                let info = self.f.var(q.var);
                let slot = q.var.index();
                let test = |e: u32, env: &mut [u32]| {
                    env[slot] = e;
                    self.eval(&q.guard, env) && self.eval(&q.body, env)
                };
                // Candidates outside these ranges always falsify the guard
                // (or the hinted `~` conjunct), so skipping them is exact.
                let hinted = q.class_hint.map(|h| s.class_of(env[h.index()]) as usize);
                let found = match info.kind {
                    VarKind::Process => match hinted {
                        Some(c) => test(c as u32, env),
                        None => (0..s.num_processes() as u32).any(|e| test(e, env)),
                    },
                    VarKind::Bounding => match hinted {
                        Some(c) => s.class_positions[c].iter().any(|&e| test(e, env)),
                        None => (s.num_processes() as u32..s.universe_size() as u32)
                            .any(|e| test(e, env)),
                    },
                    VarKind::Prefix => {
                        let under = env[info.under.expect("prefix variable").index()];
                        let c = s.class_of(under) as usize;
                        s.class_positions[c]
                            .iter()
                            .take_while(|&&e| e < under)
                            .any(|&e| test(e, env))
                    }
                };
                env[slot] = u32::MAX;
                found
            }
        }
    }
}

/// Truth of a sentence on a data word.
pub fn evaluate(f: &Formula, w: &DataWord) -> Result<bool> {
    if f.alphabet() != w.alphabet() {
        return Err(Error::AlphabetMismatch(
            "formula and data word are over different alphabets".into(),
        ));
    }
    Ok(Structure::from_word(w).holds(f))
}
