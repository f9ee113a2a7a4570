#![allow(dead_code)]

use prefsynth::dataword::{DataWord, Event, ProcessDecl};
use prefsynth::logic::{Atom, Node, VarKind};
use prefsynth::{Alphabet, Formula, LetterId, Player};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn letters(n: u16) -> Vec<LetterId> {
    (0..n).map(LetterId).collect()
}

pub fn random_word(rng: &mut impl Rng, letters: &[LetterId], max_len: usize) -> Vec<LetterId> {
    if letters.is_empty() {
        return Vec::new();
    }
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| *letters.choose(rng).unwrap()).collect()
}

/// Every word of length at most `max_len`, shortest first.
pub fn all_words(letters: &[LetterId], max_len: usize) -> Vec<Vec<LetterId>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &a in letters {
                let mut x: Vec<LetterId> = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        if letters.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Interleaves the given classes at random, keeping each class in order.
pub fn interleave(rng: &mut impl Rng, alphabet: &Alphabet, classes: &[(Player, Vec<LetterId>)]) -> DataWord {
    let processes = classes
        .iter()
        .enumerate()
        .map(|(i, (p, _))| ProcessDecl {
            id: format!("p{i}"),
            player: *p,
        })
        .collect();
    let mut slots: Vec<usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, (_, w))| std::iter::repeat_n(i, w.len()))
        .collect();
    slots.shuffle(rng);
    let mut next = vec![0; classes.len()];
    let events = slots
        .into_iter()
        .map(|p| {
            let action = classes[p].1[next[p]];
            next[p] += 1;
            Event { action, process: p }
        })
        .collect();
    DataWord::new(alphabet.clone(), processes, events).unwrap()
}

pub fn random_classes(
    rng: &mut impl Rng,
    alphabet: &Alphabet,
    max_procs: usize,
    max_class_len: usize,
) -> Vec<(Player, Vec<LetterId>)> {
    let n = rng.gen_range(0..=max_procs);
    (0..n)
        .map(|_| {
            let p = if rng.gen_bool(0.5) { Player::System } else { Player::Environment };
            let w = random_word(rng, &alphabet.letters_of(p), max_class_len);
            (p, w)
        })
        .collect()
}

pub fn random_data_word(rng: &mut impl Rng, alphabet: &Alphabet, max_procs: usize, max_events: usize) -> DataWord {
    loop {
        let classes = random_classes(rng, alphabet, max_procs, max_events.min(4));
        if classes.iter().map(|(_, w)| w.len()).sum::<usize>() <= max_events {
            return interleave(rng, alphabet, &classes);
        }
    }
}

/// A class-preserving shuffle of `w`.
pub fn shuffle_classes(rng: &mut impl Rng, w: &DataWord) -> DataWord {
    let classes: Vec<(Player, Vec<LetterId>)> = w
        .processes()
        .iter()
        .zip(w.class_words())
        .map(|(d, c)| (d.player, c))
        .collect();
    let mut out = interleave(rng, w.alphabet(), &classes);
    // keep the original process ids
    let processes = w.processes().to_vec();
    out = DataWord::new(w.alphabet().clone(), processes, out.events().to_vec()).unwrap();
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Elem {
    Proc(usize),
    Pos(usize),
}

/// Direct evaluation from the definitions: quantifier domains come from
/// variable kinds, and the materialized guards are ignored.
pub fn naive_eval(f: &Formula, w: &DataWord) -> bool {
    let mut env = vec![None; f.vars().len()];
    eval(f, w, f.root(), &mut env)
}

fn class(w: &DataWord, e: Elem) -> usize {
    match e {
        Elem::Proc(p) => p,
        Elem::Pos(i) => w.events()[i].process,
    }
}

fn eval(f: &Formula, w: &DataWord, n: &Node, env: &mut Vec<Option<Elem>>) -> bool {
    match n {
        Node::Atom(a) => {
            let get = |v: prefsynth::logic::VarId| env[v.index()].expect("bound variable");
            match a {
                Atom::Equal(x, y) => get(*x) == get(*y),
                Atom::ProcS(x) => matches!(get(*x), Elem::Proc(p) if w.processes()[p].player == Player::System),
                Atom::ProcE(x) => {
                    matches!(get(*x), Elem::Proc(p) if w.processes()[p].player == Player::Environment)
                }
                Atom::Letter(l, x) => matches!(get(*x), Elem::Pos(i) if w.events()[i].action == *l),
                Atom::PrefLess(x, y) => match (get(*x), get(*y)) {
                    (Elem::Pos(i), Elem::Pos(j)) => i < j && class(w, Elem::Pos(i)) == class(w, Elem::Pos(j)),
                    _ => false,
                },
                Atom::SameClass(x, y) => class(w, get(*x)) == class(w, get(*y)),
            }
        }
        Node::Not(a) => !eval(f, w, a, env),
        Node::And(a, b) => eval(f, w, a, env) && eval(f, w, b, env),
        Node::Or(a, b) => eval(f, w, a, env) || eval(f, w, b, env),
        Node::Implies(a, b) => !eval(f, w, a, env) || eval(f, w, b, env),
        Node::Iff(a, b) => eval(f, w, a, env) == eval(f, w, b, env),
        Node::Exists(q) => {
            let info = f.var(q.var);
            let domain: Vec<Elem> = match info.kind {
                VarKind::Process => (0..w.processes().len()).map(Elem::Proc).collect(),
                VarKind::Bounding => (0..w.events().len())
                    .map(Elem::Pos)
                    .filter(|&e| {
                        f.vars().iter().enumerate().all(|(v, vi)| {
                            vi.kind != VarKind::Bounding
                                || env[v].is_none_or(|b| class(w, b) != class(w, e))
                        })
                    })
                    .collect(),
                VarKind::Prefix => {
                    let Some(Elem::Pos(b)) = env[info.under.unwrap().index()] else {
                        return false;
                    };
                    (0..b)
                        .filter(|&i| class(w, Elem::Pos(i)) == class(w, Elem::Pos(b)))
                        .map(Elem::Pos)
                        .collect()
                }
            };
            let mut found = false;
            for e in domain {
                env[q.var.index()] = Some(e);
                if eval(f, w, &q.body, env) {
                    found = true;
                    break;
                }
            }
            env[q.var.index()] = None;
            found
        }
    }
}

/// Random well-kinded sentences as text.
pub struct FormulaGen<'a> {
    pub alphabet: &'a Alphabet,
    scope: Vec<(String, VarKind, Option<String>)>,
    fresh: usize,
}

impl<'a> FormulaGen<'a> {
    pub fn new(alphabet: &'a Alphabet) -> Self {
        FormulaGen {
            alphabet,
            scope: Vec::new(),
            fresh: 0,
        }
    }

    pub fn sentence(&mut self, rng: &mut impl Rng, depth: usize) -> String {
        self.scope.clear();
        self.fresh = 0;
        self.quantifier(rng, depth.max(1))
    }

    fn quantifier(&mut self, rng: &mut impl Rng, depth: usize) -> String {
        let name = format!("v{}", self.fresh);
        self.fresh += 1;
        let bounds: Vec<String> = self
            .scope
            .iter()
            .filter(|(_, k, _)| *k == VarKind::Bounding)
            .map(|(n, _, _)| n.clone())
            .collect();
        let universal = rng.gen_bool(0.3);
        let choice = rng.gen_range(0..if bounds.is_empty() { 2 } else { 3 });
        let (head, kind, under) = match choice {
            0 => (if universal { "Ap" } else { "Ep" }.to_string(), VarKind::Process, None),
            1 => (if universal { "Ab" } else { "Eb" }.to_string(), VarKind::Bounding, None),
            _ => {
                let b = bounds.choose(rng).unwrap().clone();
                (if universal { "Ax" } else { "Ex" }.to_string(), VarKind::Prefix, Some(b))
            }
        };
        let binder = match &under {
            Some(b) => format!("{head} {name} < {b}."),
            None => format!("{head} {name}."),
        };
        self.scope.push((name, kind, under));
        let body = self.expr(rng, depth - 1);
        self.scope.pop();
        format!("({binder} {body})")
    }

    fn expr(&mut self, rng: &mut impl Rng, depth: usize) -> String {
        let r = rng.gen_range(0..10);
        match r {
            0..=3 => self.atom(rng),
            4 => format!("!({})", self.expr(rng, depth)),
            5..=6 => {
                let op = ["&", "|", "->", "<->"].choose(rng).unwrap();
                format!("({}) {op} ({})", self.expr(rng, depth), self.expr(rng, depth))
            }
            _ if depth > 0 => self.quantifier(rng, depth),
            _ => self.atom(rng),
        }
    }

    fn atom(&mut self, rng: &mut impl Rng) -> String {
        let (x, kx, ux) = self.scope.choose(rng).unwrap().clone();
        let (y, ky, uy) = self.scope.choose(rng).unwrap().clone();
        let mut options: Vec<String> = vec![format!("{x} = {y}")];
        match kx {
            VarKind::Process => {
                options.push(format!("ProcS({x})"));
                options.push(format!("ProcE({x})"));
            }
            _ => {
                for a in self.alphabet.all() {
                    options.push(format!("{}({x})", self.alphabet.name(a)));
                }
            }
        }
        if kx == VarKind::Process || ky == VarKind::Process {
            options.push(format!("{x} ~ {y}"));
        }
        let less_ok = match (kx, ky) {
            (VarKind::Prefix, VarKind::Prefix) => true,
            (VarKind::Prefix, VarKind::Bounding) => ux.as_deref() == Some(y.as_str()),
            (VarKind::Bounding, VarKind::Prefix) => uy.as_deref() == Some(x.as_str()),
            _ => false,
        };
        if less_ok {
            options.push(format!("{x} < {y}"));
        }
        options.choose(rng).unwrap().clone()
    }
}

pub fn unary() -> Alphabet {
    Alphabet::new(&["s"], &["e"]).unwrap()
}

pub fn binary_sys() -> Alphabet {
    Alphabet::new(&["s", "t"], &["e"]).unwrap()
}
