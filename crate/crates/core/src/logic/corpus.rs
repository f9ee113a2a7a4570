//! Built-in sentences used by tests, examples and the CLI.

use super::{parse_formula, Alphabet, Formula};

/// "Some process has exactly one `e`" iff "some process has exactly one `s`".
pub const PHI_EX: &str = "(Ep x. (Eb y. y ~ x & e(y)) & !(Eb y. y ~ x & e(y) & (Ex z < y. e(z)))) \
<-> (Ep x. (Eb y. y ~ x & s(y)) & !(Eb y. y ~ x & s(y) & (Ex z < y. s(z))))";

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub sigma_s: &'static [&'static str],
    pub sigma_e: &'static [&'static str],
    pub text: &'static str,
}

impl CorpusEntry {
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.sigma_s, self.sigma_e).expect("corpus alphabet")
    }

    pub fn formula(&self) -> Formula {
        parse_formula(self.text, &self.alphabet())
            .unwrap_or_else(|e| panic!("corpus entry {}: {e}", self.name))
    }
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry {
        name: "phi_ex",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: PHI_EX,
    },
    CorpusEntry {
        name: "exactly_one_e_somewhere",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "Ep x. (Eb y. y ~ x & e(y)) & !(Eb y. y ~ x & e(y) & (Ex z < y. e(z)))",
    },
    CorpusEntry {
        name: "some_e",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "Eb x. e(x)",
    },
    CorpusEntry {
        name: "valid",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "Ap x. x = x",
    },
    CorpusEntry {
        name: "answer_every_e",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "(Eb x. e(x)) -> (Eb y. s(y))",
    },
    CorpusEntry {
        name: "two_classes_with_e",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "Eb x. e(x) & (Eb y. e(y))",
    },
    CorpusEntry {
        name: "every_sys_process_acts",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "Ap x. ProcS(x) -> (Eb y. y ~ x & s(y))",
    },
    CorpusEntry {
        name: "env_doubles_then_sys_doubles",
        sigma_s: &["s"],
        sigma_e: &["e"],
        text: "(Eb x. e(x) & (Ex y < x. e(y))) -> (Eb x. s(x) & (Ex y < x. s(y)))",
    },
    CorpusEntry {
        name: "t_preceded_by_s",
        sigma_s: &["s", "t"],
        sigma_e: &["e"],
        text: "(Eb x. e(x)) -> (Eb y. t(y)) & (Ab y. t(y) -> (Ex z < y. s(z)))",
    },
    CorpusEntry {
        name: "ordered_pair_in_class",
        sigma_s: &["s", "t"],
        sigma_e: &["e"],
        text: "Eb x. (Ex y < x. Ex z < x. y < z & s(y) & t(z))",
    },
];

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

pub fn phi_ex() -> Formula {
    entry("phi_ex").unwrap().formula()
}
