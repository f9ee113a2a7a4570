use std::collections::HashSet;

use super::ast::{Atom, Formula, Node, Quantifier, VarId, VarInfo, VarKind};
use super::{is_identifier, Alphabet, RESERVED};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Dot,
    Bang,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    Eq,
    Tilde,
    Lt,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'.' => Tok::Dot,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'=' => Tok::Eq,
            b'~' => Tok::Tilde,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes[i..].starts_with(b"<->") => {
                i += 2;
                Tok::DoubleArrow
            }
            b'<' => Tok::Lt,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Parses a sentence of the concrete grammar, resolving variables lexically
/// and materializing the guards of every quantifier.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let idents = tokens
        .iter()
        .filter_map(|(t, _)| match t {
            Tok::Ident(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    let mut p = Parser {
        tokens,
        at: 0,
        alphabet,
        vars: Vec::new(),
        scope: Vec::new(),
        idents,
    };
    let root = p.iff()?;
    if p.peek() != &Tok::End {
        return Err(p.syntax("trailing input"));
    }
    Ok(Formula {
        alphabet: alphabet.clone(),
        vars: p.vars,
        root,
    })
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    at: usize,
    alphabet: &'a Alphabet,
    vars: Vec<VarInfo>,
    /// (source name, resolved id) in binding order.
    scope: Vec<(String, VarId)>,
    idents: HashSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn syntax(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) => Ok((s, pos)),
            _ => {
                self.at = self.at.saturating_sub(1);
                Err(Error::Syntax {
                    pos,
                    msg: "expected identifier".into(),
                })
            }
        }
    }

    fn iff(&mut self) -> Result<Node> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.implies()?;
            lhs = Node::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Node> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Node::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Node> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            lhs = Node::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Node::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(word) => match word.as_str() {
                "Ep" | "Ap" | "Eb" | "Ab" | "Ex" | "Ax" => self.quantifier(&word),
                _ => self.atom(),
            },
            Tok::End => Err(self.syntax("unexpected end of input")),
            _ => Err(self.syntax("expected formula")),
        }
    }

    fn lookup(&self, name: &str, pos: usize) -> Result<VarId> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
            .ok_or_else(|| Error::FreeVariable {
                pos,
                name: name.to_string(),
            })
    }

    fn fresh_name(&self, base: &str) -> String {
        let taken = |s: &str| self.vars.iter().any(|v| v.name == s);
        if !taken(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|cand| !taken(cand) && !self.idents.contains(cand))
            .expect("unbounded name supply")
    }

    fn quantifier(&mut self, word: &str) -> Result<Node> {
        self.bump();
        let universal = word.starts_with('A');
        let kind = match &word[1..] {
            "p" => VarKind::Process,
            "b" => VarKind::Bounding,
            _ => VarKind::Prefix,
        };
        let (name, name_pos) = self.ident()?;
        if RESERVED.contains(&name.as_str()) || !is_identifier(&name) {
            return Err(Error::Syntax {
                pos: name_pos,
                msg: format!("`{name}` cannot be used as a variable"),
            });
        }
        let under = if kind == VarKind::Prefix {
            self.expect(Tok::Lt, "`<` after prefix variable")?;
            let (bname, bpos) = self.ident()?;
            let b = self.lookup(&bname, bpos)?;
            if self.vars[b.index()].kind != VarKind::Bounding {
                return Err(Error::Kind {
                    pos: bpos,
                    msg: format!("`{bname}` must be a bounding variable"),
                });
            }
            Some(b)
        } else {
            None
        };
        self.expect(Tok::Dot, "`.` after quantifier binder")?;

        let var = VarId(self.vars.len() as u32);
        let guard = self.guard(var, kind, under);
        self.vars.push(VarInfo {
            name: self.fresh_name(&name),
            kind,
            under,
        });
        self.scope.push((name, var));
        let body = self.iff();
        self.scope.pop();
        let body = body?;

        let body = if universal { Node::not(body) } else { body };
        let class_hint = body.conjuncts().into_iter().find_map(|c| match c {
            Node::Atom(Atom::SameClass(a, b)) if *a == var && *b != var => Some(*b),
            Node::Atom(Atom::SameClass(a, b)) if *b == var && *a != var => Some(*a),
            _ => None,
        });
        let node = Node::Exists(Box::new(Quantifier {
            var,
            guard,
            body,
            class_hint,
        }));
        Ok(if universal { Node::not(node) } else { node })
    }

    /// The restriction attached to a freshly bound variable.
    fn guard(&self, x: VarId, kind: VarKind, under: Option<VarId>) -> Node {
        match kind {
            VarKind::Process => Node::or(
                Node::Atom(Atom::ProcS(x)),
                Node::Atom(Atom::ProcE(x)),
            ),
            VarKind::Bounding => {
                let mut g = Node::and(
                    Node::not(Node::Atom(Atom::ProcS(x))),
                    Node::not(Node::Atom(Atom::ProcE(x))),
                );
                let mut seen = Vec::new();
                for &(_, y) in &self.scope {
                    if self.vars[y.index()].kind == VarKind::Bounding && !seen.contains(&y) {
                        seen.push(y);
                        g = Node::and(g, Node::not(Node::Atom(Atom::SameClass(x, y))));
                    }
                }
                g
            }
            VarKind::Prefix => Node::Atom(Atom::PrefLess(x, under.expect("prefix guard"))),
        }
    }

    fn atom(&mut self) -> Result<Node> {
        let (head, head_pos) = self.ident()?;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let (arg, arg_pos) = self.ident()?;
                self.expect(Tok::RParen, "`)`")?;
                let x = self.lookup(&arg, arg_pos)?;
                let kind = self.vars[x.index()].kind;
                match head.as_str() {
                    "ProcS" | "ProcE" => {
                        if kind != VarKind::Process {
                            return Err(Error::Kind {
                                pos: arg_pos,
                                msg: format!("{head} applies to process variables only"),
                            });
                        }
                        Ok(Node::Atom(if head == "ProcS" {
                            Atom::ProcS(x)
                        } else {
                            Atom::ProcE(x)
                        }))
                    }
                    _ => {
                        let letter = self.alphabet.letter(&head).ok_or(Error::UnknownLetter {
                            pos: head_pos,
                            letter: head.clone(),
                        })?;
                        if kind == VarKind::Process {
                            return Err(Error::Kind {
                                pos: arg_pos,
                                msg: format!("letter `{head}` applied to process variable `{arg}`"),
                            });
                        }
                        Ok(Node::Atom(Atom::Letter(letter, x)))
                    }
                }
            }
            op @ (Tok::Eq | Tok::Tilde | Tok::Lt) => {
                self.bump();
                let x = self.lookup(&head, head_pos)?;
                let (rhs, rhs_pos) = self.ident()?;
                let y = self.lookup(&rhs, rhs_pos)?;
                let kx = &self.vars[x.index()];
                let ky = &self.vars[y.index()];
                match op {
                    Tok::Eq => Ok(Node::Atom(Atom::Equal(x, y))),
                    Tok::Tilde => {
                        if kx.kind != VarKind::Process && ky.kind != VarKind::Process {
                            return Err(Error::Kind {
                                pos: head_pos,
                                msg: "`~` needs at least one process variable".into(),
                            });
                        }
                        Ok(Node::Atom(Atom::SameClass(x, y)))
                    }
                    _ => {
                        let ok = match (kx.kind, ky.kind) {
                            (VarKind::Prefix, VarKind::Prefix) => true,
                            (VarKind::Prefix, VarKind::Bounding) => kx.under == Some(y),
                            (VarKind::Bounding, VarKind::Prefix) => ky.under == Some(x),
                            _ => false,
                        };
                        if !ok {
                            return Err(Error::Kind {
                                pos: head_pos,
                                msg: "`<` relates prefix variables, or a prefix variable and its bounding variable".into(),
                            });
                        }
                        Ok(Node::Atom(Atom::PrefLess(x, y)))
                    }
                }
            }
            _ => Err(self.syntax("expected `(`, `=`, `~` or `<` after identifier")),
        }
    }
}
