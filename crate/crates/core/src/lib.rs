//! Synthesis for prefix first-order logic on data words.
//!
//! The pipeline goes from a sentence to a decision about whether System can
//! win with a given number of processes:
//!
//! 1. [`logic`] parses and validates sentences, materializing quantifier guards.
//! 2. [`dataword`] evaluates sentences on finite data words.
//! 3. [`efgames`] decides logical equivalence by Ehrenfeucht–Fraïssé game search.
//! 4. [`typespace`] builds the per-player trees of prefix types.
//! 5. [`acceptance`] enumerates the counting functions satisfying a sentence.
//! 6. [`tokengame`] solves the token game on types as a Büchi game.
//! 7. [`synth`] searches process counts, computes cutoffs and replays strategies.

pub mod acceptance;
pub mod dataword;
pub mod efgames;
mod error;
pub mod logic;
pub mod synth;
pub mod tokengame;
pub mod typespace;

pub use error::{Error, Result};
pub use logic::{parse_formula, parse_formula_file, Alphabet, Formula, LetterId, Player};
