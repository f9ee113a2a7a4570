use std::fmt;

use super::{Alphabet, LetterId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Process,
    Bounding,
    Prefix,
}

/// A bound variable after alpha-renaming. Names are unique within a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
    /// The bounding variable a prefix variable lives under.
    pub under: Option<VarId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Equal(VarId, VarId),
    ProcS(VarId),
    ProcE(VarId),
    Letter(LetterId, VarId),
    /// Same class and strictly earlier position.
    PrefLess(VarId, VarId),
    SameClass(VarId, VarId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Atom(Atom),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(Box<Quantifier>),
}

/// `∃ var. guard ∧ body`. The guard is quantifier-free and encodes the
/// restriction implied by the variable kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantifier {
    pub var: VarId,
    pub guard: Node,
    pub body: Node,
    /// A variable bound further out such that `var ~ hint` is a top-level
    /// conjunct of the body; lets the evaluator skip elements of other classes.
    pub class_hint: Option<VarId>,
}

impl Node {
    pub fn not(n: Node) -> Node {
        Node::Not(Box::new(n))
    }

    pub fn and(a: Node, b: Node) -> Node {
        Node::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Node, b: Node) -> Node {
        Node::Or(Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Atom(_) => 0,
            Node::Not(a) => a.depth(),
            Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                a.depth().max(b.depth())
            }
            Node::Exists(q) => 1 + q.body.depth(),
        }
    }

    /// Collects the top-level conjuncts of a node.
    pub(crate) fn conjuncts(&self) -> Vec<&Node> {
        match self {
            Node::And(a, b) => {
                let mut out = a.conjuncts();
                out.extend(b.conjuncts());
                out
            }
            other => vec![other],
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Iff(..) => 1,
            Node::Implies(..) => 2,
            Node::Or(..) => 3,
            Node::And(..) => 4,
            _ => 5,
        }
    }

    fn as_forall(&self) -> Option<&Quantifier> {
        if let Node::Not(inner) = self {
            if let Node::Exists(q) = inner.as_ref() {
                if matches!(q.body, Node::Not(_)) {
                    return Some(q);
                }
            }
        }
        None
    }

    fn is_quantifier_like(&self) -> bool {
        matches!(self, Node::Exists(_)) || self.as_forall().is_some()
    }
}

/// A validated sentence together with its variable table and alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub(crate) alphabet: Alphabet,
    pub(crate) vars: Vec<VarInfo>,
    pub(crate) root: Node,
}

impl Formula {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn var(&self, v: VarId) -> &VarInfo {
        &self.vars[v.index()]
    }

    /// Maximal quantifier nesting, counting all three kinds alike.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Letters used anywhere in the formula.
    pub fn letters(&self) -> Vec<LetterId> {
        fn walk(n: &Node, out: &mut Vec<LetterId>) {
            match n {
                Node::Atom(Atom::Letter(l, _)) => out.push(*l),
                Node::Atom(_) => {}
                Node::Not(a) => walk(a, out),
                Node::And(a, b) | Node::Or(a, b) | Node::Implies(a, b) | Node::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Node::Exists(q) => {
                    walk(&q.guard, out);
                    walk(&q.body, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Conjunction of two sentences over the same alphabet.
    pub fn conjoin(&self, other: &Formula) -> Formula {
        assert_eq!(self.alphabet, other.alphabet, "conjoined formulas must share an alphabet");
        let text = format!("({self}) & ({other})");
        super::parse_formula(&text, &self.alphabet).expect("conjunction of valid sentences")
    }

    fn write_node(&self, n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = n.as_forall() {
            let Node::Not(body) = &q.body else { unreachable!() };
            self.write_binder(q.var, true, f)?;
            return self.write_node(body, f);
        }
        match n {
            Node::Atom(a) => self.write_atom(a, f),
            Node::Not(a) => {
                f.write_str("!")?;
                self.write_child(a, a.precedence() < 5 || a.is_quantifier_like(), f)
            }
            Node::And(a, b) => self.write_binary(n, a, b, " & ", false, f),
            Node::Or(a, b) => self.write_binary(n, a, b, " | ", false, f),
            Node::Implies(a, b) => self.write_binary(n, a, b, " -> ", true, f),
            Node::Iff(a, b) => self.write_binary(n, a, b, " <-> ", false, f),
            Node::Exists(q) => {
                self.write_binder(q.var, false, f)?;
                self.write_node(&q.body, f)
            }
        }
    }

    fn write_binary(
        &self,
        parent: &Node,
        a: &Node,
        b: &Node,
        op: &str,
        right_assoc: bool,
        f: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        let p = parent.precedence();
        let left_parens = a.is_quantifier_like()
            || a.precedence() < p
            || (right_assoc && a.precedence() == p);
        let right_parens = b.is_quantifier_like()
            || b.precedence() < p
            || (!right_assoc && b.precedence() == p);
        self.write_child(a, left_parens, f)?;
        f.write_str(op)?;
        self.write_child(b, right_parens, f)
    }

    fn write_child(&self, n: &Node, parens: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if parens {
            f.write_str("(")?;
            self.write_node(n, f)?;
            f.write_str(")")
        } else {
            self.write_node(n, f)
        }
    }

    fn write_binder(&self, v: VarId, universal: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let info = self.var(v);
        let q = if universal { 'A' } else { 'E' };
        match info.kind {
            VarKind::Process => write!(f, "{q}p {}. ", info.name),
            VarKind::Bounding => write!(f, "{q}b {}. ", info.name),
            VarKind::Prefix => {
                let under = info.under.expect("prefix variable without bounding variable");
                write!(f, "{q}x {} < {}. ", info.name, self.var(under).name)
            }
        }
    }

    fn write_atom(&self, a: &Atom, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: &VarId| self.var(*v).name.as_str();
        match a {
            Atom::Equal(x, y) => write!(f, "{} = {}", name(x), name(y)),
            Atom::ProcS(x) => write!(f, "ProcS({})", name(x)),
            Atom::ProcE(x) => write!(f, "ProcE({})", name(x)),
            Atom::Letter(l, x) => write!(f, "{}({})", self.alphabet.name(*l), name(x)),
            Atom::PrefLess(x, y) => write!(f, "{} < {}", name(x), name(y)),
            Atom::SameClass(x, y) => write!(f, "{} ~ {}", name(x), name(y)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(&self.root, f)
    }
}
