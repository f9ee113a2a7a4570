//! Sentences of prefix first-order logic on data words.
//!
//! Three kinds of variables exist: process variables range over process
//! elements, bounding variables pick a position in a class not yet bounded,
//! and prefix variables range over positions strictly before a bounding
//! variable of the same class. The parser materializes those restrictions as
//! explicit guards on every quantifier node.

mod ast;
pub mod corpus;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use ast::{Atom, Formula, Node, Quantifier, VarId, VarInfo, VarKind};
pub use parser::parse_formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "S")]
    System,
    #[serde(rename = "E")]
    Environment,
}

impl Player {
    pub fn tag(self) -> &'static str {
        match self {
            Player::System => "S",
            Player::Environment => "E",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Player> {
        match tag {
            "S" => Some(Player::System),
            "E" => Some(Player::Environment),
            _ => None,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::System => Player::Environment,
            Player::Environment => Player::System,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::System => f.write_str("System"),
            Player::Environment => f.write_str("Environment"),
        }
    }
}

/// Index of an action symbol inside an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LetterId(pub u16);

pub(crate) const RESERVED: &[&str] = &["Ep", "Ap", "Eb", "Ab", "Ex", "Ax", "ProcS", "ProcE"];

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The two disjoint action alphabets. System letters come first in id order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    letters: Vec<String>,
    owners: Vec<Player>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(sigma_s: &[S], sigma_e: &[T]) -> Result<Self> {
        if sigma_s.is_empty() && sigma_e.is_empty() {
            return Err(Error::Alphabet("both action alphabets are empty".into()));
        }
        let mut letters = Vec::new();
        let mut owners = Vec::new();
        let named = sigma_s
            .iter()
            .map(|s| (s.as_ref(), Player::System))
            .chain(sigma_e.iter().map(|s| (s.as_ref(), Player::Environment)));
        for (name, owner) in named {
            if !is_identifier(name) || RESERVED.contains(&name) {
                return Err(Error::Alphabet(format!("`{name}` is not a valid action symbol")));
            }
            if letters.iter().any(|l| l == name) {
                return Err(Error::Alphabet(format!("action symbol `{name}` declared twice")));
            }
            letters.push(name.to_string());
            owners.push(owner);
        }
        Ok(Alphabet { letters, owners })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, name: &str) -> Option<LetterId> {
        self.letters
            .iter()
            .position(|l| l == name)
            .map(|i| LetterId(i as u16))
    }

    pub fn name(&self, id: LetterId) -> &str {
        &self.letters[id.0 as usize]
    }

    pub fn owner(&self, id: LetterId) -> Player {
        self.owners[id.0 as usize]
    }

    pub fn all(&self) -> Vec<LetterId> {
        (0..self.letters.len()).map(|i| LetterId(i as u16)).collect()
    }

    pub fn letters_of(&self, player: Player) -> Vec<LetterId> {
        self.all()
            .into_iter()
            .filter(|&l| self.owner(l) == player)
            .collect()
    }

    pub fn names_of(&self, player: Player) -> Vec<&str> {
        self.letters_of(player)
            .into_iter()
            .map(|l| self.name(l))
            .collect()
    }

    /// Renders a word over this alphabet, separating multi-character symbols by spaces.
    pub fn render(&self, word: &[LetterId]) -> String {
        if word.is_empty() {
            return "ε".into();
        }
        let names: Vec<&str> = word.iter().map(|&l| self.name(l)).collect();
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    /// Parses a word: whitespace-separated symbols, or a run of single-character symbols.
    pub fn parse_word(&self, text: &str) -> Result<Vec<LetterId>> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "-" {
            return Ok(Vec::new());
        }
        let pieces: Vec<String> = if text.contains(char::is_whitespace) {
            text.split_whitespace().map(str::to_string).collect()
        } else if let Some(id) = self.letter(text) {
            return Ok(vec![id]);
        } else {
            text.chars().map(|c| c.to_string()).collect()
        };
        pieces
            .iter()
            .map(|p| {
                self.letter(p)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("unknown action `{p}`")))
            })
            .collect()
    }
}

/// Reads a formula file: `sys:` and `env:` lines list the action symbols,
/// `#` starts a comment, and all remaining text is the sentence.
pub fn parse_formula_file(text: &str) -> Result<Formula> {
    let mut sys = None;
    let mut env = None;
    let mut body = String::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("sys:") {
            sys = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
        } else if let Some(rest) = trimmed.strip_prefix("env:") {
            env = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let (Some(sys), Some(env)) = (sys, env) else {
        return Err(Error::Input("formula file needs `sys:` and `env:` lines".into()));
    };
    let alphabet = Alphabet::new(&sys, &env)?;
    parse_formula(&body, &alphabet)
}
