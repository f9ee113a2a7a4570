//! Replaying a token strategy as a strategy on data words.
//!
//! Environment extends its classes; the mirrored token configuration follows
//! the class types. System looks up its token move and realizes each token
//! step by extending one of its classes from the source type to the target
//! type. Once Environment stops, System keeps answering until it passes.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::dataword::{evaluate, DataWord, Event};
use crate::logic::{Alphabet, Formula, LetterId, Player};
use crate::tokengame::{Configuration, Move, Step, Strategy};
use crate::typespace::TypeSpace;
use crate::{Error, Result};

/// One Environment round: letters appended to Environment processes.
pub type EnvRound = Vec<(LetterId, usize)>;

#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    pub env_events: Vec<String>,
    pub env_move: String,
    pub sys_move: String,
    pub sys_events: Vec<String>,
    pub configuration: String,
}

#[derive(Debug, Clone)]
pub struct Session<'a> {
    ts: &'a TypeSpace,
    strategy: &'a Strategy,
    word: DataWord,
    /// Automaton state of each process, indexed like the data word's processes.
    states: Vec<usize>,
    config: Configuration,
    transcript: Vec<RoundRecord>,
    strict_moves: usize,
}

/// Environment processes are `p1..`, System processes `q1..`.
pub fn process_name(p: Player, i: usize) -> String {
    match p {
        Player::Environment => format!("p{}", i + 1),
        Player::System => format!("q{}", i + 1),
    }
}

impl<'a> Session<'a> {
    pub fn new(ts: &'a TypeSpace, strategy: &'a Strategy) -> Result<Self> {
        strategy.check_compatible(ts, strategy.ns, strategy.ne)?;
        if strategy.winner != Player::System {
            return Err(Error::NotWinning(format!(
                "System loses with ({},{}) processes",
                strategy.ns, strategy.ne
            )));
        }
        let mut word = DataWord::empty(ts.alphabet().clone());
        for i in 0..strategy.ne {
            word.add_process(&process_name(Player::Environment, i), Player::Environment)?;
        }
        for i in 0..strategy.ns {
            word.add_process(&process_name(Player::System, i), Player::System)?;
        }
        let states = vec![0; strategy.ns + strategy.ne];
        Ok(Session {
            ts,
            strategy,
            word,
            states,
            config: Configuration::initial(ts, strategy.ns, strategy.ne),
            transcript: Vec::new(),
            strict_moves: 0,
        })
    }

    pub fn word(&self) -> &DataWord {
        &self.word
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn transcript(&self) -> &[RoundRecord] {
        &self.transcript
    }

    pub fn strict_moves(&self) -> usize {
        self.strict_moves
    }

    fn player_of(&self, proc: usize) -> Player {
        self.word.processes()[proc].player
    }

    fn node_of(&self, proc: usize) -> usize {
        let p = self.player_of(proc);
        self.ts.structure(p).state_node(self.states[proc])
    }

    fn append(&mut self, action: LetterId, proc: usize) -> Result<()> {
        let p = self.player_of(proc);
        self.states[proc] = self.ts.structure(p).step(self.states[proc], action)?;
        self.word.push(action, proc)
    }

    /// Parses `<action> <process>` pairs, or `pass` for an empty round.
    pub fn parse_round(&self, line: &str) -> Result<EnvRound> {
        let line = line.trim();
        if line == "pass" {
            return Ok(Vec::new());
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() || !tokens.len().is_multiple_of(2) {
            return Err(Error::Script(format!("expected `<action> <process>` pairs or `pass`: {line:?}")));
        }
        let a = self.ts.alphabet();
        tokens
            .chunks(2)
            .map(|pair| {
                let letter = a
                    .letter(pair[0])
                    .ok_or_else(|| Error::Script(format!("unknown action `{}`", pair[0])))?;
                let proc = self
                    .word
                    .process_index(pair[1])
                    .ok_or_else(|| Error::Script(format!("unknown process `{}`", pair[1])))?;
                Ok((letter, proc))
            })
            .collect()
    }

    fn check_round(&self, round: &[(LetterId, usize)]) -> Result<()> {
        let a = self.ts.alphabet();
        for &(letter, proc) in round {
            if proc >= self.states.len() || self.player_of(proc) != Player::Environment {
                return Err(Error::Script(format!("process {proc} is not an Environment process")));
            }
            if a.owner(letter) != Player::Environment {
                return Err(Error::Script(format!(
                    "`{}` is a System action",
                    a.name(letter)
                )));
            }
        }
        Ok(())
    }

    fn node_counts(&self) -> Configuration {
        let mut c = Configuration::initial(self.ts, 0, 0);
        for proc in 0..self.states.len() {
            let node = self.node_of(proc);
            match self.player_of(proc) {
                Player::System => c.sys[node] += 1,
                Player::Environment => c.env[node] += 1,
            }
        }
        c
    }

    /// Environment move implied by the class types, as steps between nodes.
    fn env_move(&self, before: &[usize]) -> Move {
        let mut steps: Vec<Step> = Vec::new();
        for (proc, &from) in before.iter().enumerate() {
            if self.player_of(proc) != Player::Environment {
                continue;
            }
            let to = self.node_of(proc);
            if to == from {
                continue;
            }
            match steps.iter_mut().find(|s| s.from == from && s.to == to) {
                Some(s) => s.count += 1,
                None => steps.push(Step { from, to, count: 1 }),
            }
        }
        steps.sort_by_key(|s| (s.from, s.to));
        Move {
            player: Player::Environment,
            steps,
        }
    }

    fn render_events(&self, events: &[Event]) -> Vec<String> {
        events
            .iter()
            .map(|e| {
                format!(
                    "{} {}",
                    self.ts.alphabet().name(e.action),
                    self.word.processes()[e.process].id
                )
            })
            .collect()
    }

    /// Plays one Environment round and System's answer.
    pub fn round(&mut self, env: &[(LetterId, usize)]) -> Result<&RoundRecord> {
        self.check_round(env)?;
        let before: Vec<usize> = (0..self.states.len()).map(|p| self.node_of(p)).collect();
        for &(a, proc) in env {
            self.append(a, proc)?;
        }
        let env_move = self.env_move(&before);
        if !env_move.is_pass() {
            self.strict_moves += 1;
        }
        self.config.apply(self.ts, &env_move)?;
        let env_events: Vec<Event> = env.iter().map(|&(action, process)| Event { action, process }).collect();

        let sys_move = self.strategy.move_at(&self.config).ok_or_else(|| {
            Error::Strategy(format!("no move stored for configuration {}", self.config))
        })?;
        let start = self.word.events().len();
        let mut used = vec![false; self.states.len()];
        let sys_nodes: Vec<usize> = (0..self.states.len()).map(|p| self.node_of(p)).collect();
        for step in &sys_move.steps {
            for _ in 0..step.count {
                // lowest-indexed unused System process at the source type
                let proc = (0..self.states.len())
                    .find(|&p| {
                        !used[p] && self.player_of(p) == Player::System && sys_nodes[p] == step.from
                    })
                    .ok_or_else(|| Error::Strategy(format!("no System process at type {}", step.from)))?;
                used[proc] = true;
                let current = self.word.class_words()[proc].clone();
                let ext = self.ts.realize_extension(Player::System, &current, step.to)?;
                for a in ext {
                    self.append(a, proc)?;
                }
            }
        }
        if !sys_move.is_pass() {
            self.strict_moves += 1;
        }
        self.config.apply(self.ts, &sys_move)?;
        let sys_events = self.word.events()[start..].to_vec();
        self.check_mirror()?;
        let record = RoundRecord {
            env_events: self.render_events(&env_events),
            env_move: env_move.to_string(),
            sys_move: sys_move.to_string(),
            sys_events: self.render_events(&sys_events),
            configuration: self.config.to_string(),
        };
        self.transcript.push(record);
        Ok(self.transcript.last().unwrap())
    }

    /// Environment passes until System passes as well.
    pub fn quiesce(&mut self) -> Result<()> {
        let limit = self.strategy.ns * self.ts.tree(Player::System).max_height() + 1;
        for _ in 0..=limit {
            let rec = self.round(&[])?;
            if rec.sys_events.is_empty() {
                return Ok(());
            }
        }
        Err(Error::Strategy("System kept moving after Environment stopped".into()))
    }

    /// Mirrored counts must equal the exact tagged collection of the word.
    pub fn check_mirror(&self) -> Result<()> {
        let exact = self.ts.tagged_collection(&self.word)?;
        let mirrored = self.config.tagged();
        if exact != mirrored || self.node_counts() != self.config {
            return Err(Error::Strategy(format!(
                "mirrored configuration {} differs from the data word",
                self.config
            )));
        }
        Ok(())
    }

    pub fn finish(self, f: &Formula) -> Result<Playout> {
        let satisfied = evaluate(f, &self.word)?;
        Ok(Playout {
            word: self.word,
            transcript: self.transcript,
            configuration: self.config,
            strict_moves: self.strict_moves,
            satisfied,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Playout {
    pub word: DataWord,
    pub transcript: Vec<RoundRecord>,
    pub configuration: Configuration,
    pub strict_moves: usize,
    pub satisfied: bool,
}

/// Plays the script, then lets the play quiesce.
pub fn playout(f: &Formula, ts: &TypeSpace, strategy: &Strategy, script: &[EnvRound]) -> Result<Playout> {
    let mut s = Session::new(ts, strategy)?;
    for round in script {
        s.round(round)?;
    }
    s.quiesce()?;
    s.finish(f)
}

/// Parses a script file: one round per line, `#` comments, blank lines skipped.
pub fn parse_script(text: &str, ts: &TypeSpace, strategy: &Strategy) -> Result<Vec<EnvRound>> {
    let s = Session::new(ts, strategy)?;
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap().trim();
            (!line.is_empty()).then(|| {
                s.parse_round(line)
                    .map_err(|e| Error::Script(format!("line {}: {e}", i + 1)))
            })
        })
        .collect()
}

/// A random script with at most `max_extensions` single-letter extensions.
pub fn random_script(alphabet: &Alphabet, ne: usize, max_extensions: usize, rng: &mut impl Rng) -> Vec<EnvRound> {
    let letters = alphabet.letters_of(Player::Environment);
    let mut out = Vec::new();
    if ne == 0 || letters.is_empty() {
        return out;
    }
    let total = rng.gen_range(0..=max_extensions);
    let mut used = 0;
    while used < total {
        if rng.gen_bool(0.2) {
            out.push(Vec::new());
            continue;
        }
        let n = rng.gen_range(1..=(total - used).min(3));
        let round = (0..n)
            .map(|_| (letters[rng.gen_range(0..letters.len())], rng.gen_range(0..ne)))
            .collect();
        used += n;
        out.push(round);
    }
    out
}

/// [`random_script`] from a seeded generator, for reproducible runs.
pub fn seeded_script(alphabet: &Alphabet, ne: usize, max_extensions: usize, seed: u64) -> Vec<EnvRound> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    random_script(alphabet, ne, max_extensions, &mut rng)
}

/// Reads Environment rounds from `input` until `pass`, `quit` or end of input,
/// then lets System finish.
pub fn interactive_play<R: BufRead, W: Write>(
    f: &Formula,
    ts: &TypeSpace,
    strategy: &Strategy,
    input: R,
    mut output: W,
) -> Result<Playout> {
    let mut s = Session::new(ts, strategy)?;
    let env_names: Vec<String> = (0..strategy.ne).map(|i| process_name(Player::Environment, i)).collect();
    writeln!(
        output,
        "Environment processes: {}. Enter `<action> <process>` pairs, or `pass` to stop.",
        if env_names.is_empty() { "none".to_string() } else { env_names.join(" ") }
    )?;
    let mut lines = input.lines();
    loop {
        write!(output, "env> ")?;
        output.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "pass" || line == "quit" {
            break;
        }
        let round = match s.parse_round(line).and_then(|r| s.check_round(&r).map(|_| r)) {
            Ok(r) => r,
            Err(e) => {
                writeln!(output, "rejected: {e}")?;
                continue;
            }
        };
        let rec = s.round(&round)?;
        let answer = if rec.sys_events.is_empty() {
            "pass".to_string()
        } else {
            rec.sys_events.join(", ")
        };
        writeln!(output, "system: {answer}\nconfiguration: {}", rec.configuration)?;
    }
    let before = s.transcript().len();
    s.quiesce()?;
    for rec in &s.transcript()[before..] {
        if !rec.sys_events.is_empty() {
            writeln!(output, "system: {}", rec.sys_events.join(", "))?;
        }
    }
    let p = s.finish(f)?;
    writeln!(
        output,
        "final word: {}\nformula {}",
        p.word.to_text().trim_end().replace('\n', "; "),
        if p.satisfied { "holds" } else { "fails" }
    )?;
    Ok(p)
}
