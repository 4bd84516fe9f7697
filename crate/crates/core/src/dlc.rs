//! Decision lists over boolean features, compiled into reduced ordered BDDs.
//!
//! The compiled function is "the first rule whose antecedent fires predicts
//! class 1", built as the disjunction over class-1 rules of
//! `antecedent_k ∧ ¬antecedent_1 ∧ … ∧ ¬antecedent_{k-1}`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Admit, Atom, DecisionGraph, Edge, Feature, Literal, Node, NodeKind};

#[derive(Debug, Error)]
pub enum DlError {
    #[error("malformed decision list: {0}")]
    Malformed(String),
    #[error("decision list has no rules")]
    Empty,
    #[error("the last rule must be the default rule (empty antecedent)")]
    MissingDefault,
    #[error("rule {0} has an empty antecedent but is not last")]
    EarlyDefault(usize),
    #[error("rule {rule}: literal {literal} is out of range for {n} features")]
    BadLiteral { rule: usize, literal: i64, n: usize },
    #[error("class must be 0 or 1, got {0}")]
    BadClass(i64),
    #[error("variable order {0:?} is not a permutation of the features")]
    BadOrder(Vec<usize>),
}

/// `IF literals THEN class`. Literals are signed 1-based feature indices:
/// `3` means `x3 = 1`, `-3` means `x3 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub literals: Vec<i64>,
    pub class: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionList {
    num_features: usize,
    rules: Vec<Rule>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DlDoc {
    Rules(Vec<Rule>),
    Full { features: usize, rules: Vec<Rule> },
}

#[derive(Serialize)]
struct DlOut<'a> {
    features: usize,
    rules: &'a [Rule],
}

impl DecisionList {
    pub fn new(num_features: usize, rules: Vec<Rule>) -> Result<Self, DlError> {
        let last = rules.len().checked_sub(1).ok_or(DlError::Empty)?;
        for (k, rule) in rules.iter().enumerate() {
            if rule.class != 0 && rule.class != 1 {
                return Err(DlError::BadClass(rule.class));
            }
            if rule.literals.is_empty() && k != last {
                return Err(DlError::EarlyDefault(k));
            }
            for &l in &rule.literals {
                if l == 0 || l.unsigned_abs() as usize > num_features {
                    return Err(DlError::BadLiteral {
                        rule: k,
                        literal: l,
                        n: num_features,
                    });
                }
            }
        }
        if !rules[last].literals.is_empty() {
            return Err(DlError::MissingDefault);
        }
        Ok(DecisionList {
            num_features,
            rules,
        })
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Prediction of the first rule whose antecedent holds at `x`.
    pub fn eval(&self, x: &[bool]) -> bool {
        self.rules
            .iter()
            .find(|r| r.literals.iter().all(|&l| holds(l, x)))
            .map(|r| r.class == 1)
            .expect("the default rule always fires")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DlOut {
            features: self.num_features,
            rules: &self.rules,
        })
        .expect("decision lists serialize")
    }
}

fn holds(literal: i64, x: &[bool]) -> bool {
    x[literal.unsigned_abs() as usize - 1] == (literal > 0)
}

/// Parses either a bare JSON array of rules (feature count taken from the
/// largest literal) or `{"features": n, "rules": [...]}`.
pub fn parse_dl(text: &str) -> Result<DecisionList, DlError> {
    let doc: DlDoc = serde_json::from_str(text).map_err(|e| DlError::Malformed(e.to_string()))?;
    match doc {
        DlDoc::Rules(rules) => {
            let n = rules
                .iter()
                .flat_map(|r| &r.literals)
                .map(|l| l.unsigned_abs() as usize)
                .max()
                .unwrap_or(0);
            DecisionList::new(n, rules)
        }
        DlDoc::Full { features, rules } => DecisionList::new(features, rules),
    }
}

pub fn eval_dl(dl: &DecisionList, x: &[bool]) -> bool {
    dl.eval(x)
}

pub type BddRef = usize;
pub const FALSE: BddRef = 0;
pub const TRUE: BddRef = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BddNode {
    /// 0-based feature index.
    pub var: usize,
    pub lo: BddRef,
    pub hi: BddRef,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

/// Hash-consing BDD builder for one compilation session.
struct Manager {
    level: Vec<usize>,
    nodes: Vec<BddNode>,
    unique: HashMap<BddNode, BddRef>,
    apply_cache: HashMap<(Op, BddRef, BddRef), BddRef>,
    not_cache: HashMap<BddRef, BddRef>,
}

impl Manager {
    fn new(order: &[usize]) -> Self {
        let mut level = vec![0; order.len()];
        for (l, &v) in order.iter().enumerate() {
            level[v] = l;
        }
        let terminal = BddNode {
            var: usize::MAX,
            lo: 0,
            hi: 0,
        };
        Manager {
            level,
            nodes: vec![terminal, terminal],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
        }
    }

    fn mk(&mut self, var: usize, lo: BddRef, hi: BddRef) -> BddRef {
        if lo == hi {
            return lo;
        }
        let node = BddNode { var, lo, hi };
        if let Some(&r) = self.unique.get(&node) {
            return r;
        }
        let r = self.nodes.len();
        self.nodes.push(node);
        self.unique.insert(node, r);
        r
    }

    fn literal(&mut self, lit: i64) -> BddRef {
        let var = lit.unsigned_abs() as usize - 1;
        if lit > 0 {
            self.mk(var, FALSE, TRUE)
        } else {
            self.mk(var, TRUE, FALSE)
        }
    }

    fn top_level(&self, f: BddRef) -> usize {
        if f <= TRUE {
            usize::MAX
        } else {
            self.level[self.nodes[f].var]
        }
    }

    /// Cofactors of `f` with respect to the variable at `level`.
    fn cofactors(&self, f: BddRef, level: usize) -> (BddRef, BddRef) {
        if self.top_level(f) == level {
            (self.nodes[f].lo, self.nodes[f].hi)
        } else {
            (f, f)
        }
    }

    fn apply(&mut self, op: Op, a: BddRef, b: BddRef) -> BddRef {
        match (op, a, b) {
            (Op::And, FALSE, _) | (Op::And, _, FALSE) => return FALSE,
            (Op::And, TRUE, x) | (Op::And, x, TRUE) => return x,
            (Op::Or, TRUE, _) | (Op::Or, _, TRUE) => return TRUE,
            (Op::Or, FALSE, x) | (Op::Or, x, FALSE) => return x,
            _ if a == b => return a,
            _ => {}
        }
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let level = self.top_level(a).min(self.top_level(b));
        let var = if self.top_level(a) == level {
            self.nodes[a].var
        } else {
            self.nodes[b].var
        };
        let (a0, a1) = self.cofactors(a, level);
        let (b0, b1) = self.cofactors(b, level);
        let lo = self.apply(op, a0, b0);
        let hi = self.apply(op, a1, b1);
        let r = self.mk(var, lo, hi);
        self.apply_cache.insert(key, r);
        r
    }

    fn not(&mut self, a: BddRef) -> BddRef {
        match a {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let BddNode { var, lo, hi } = self.nodes[a];
        let lo = self.not(lo);
        let hi = self.not(hi);
        let r = self.mk(var, lo, hi);
        self.not_cache.insert(a, r);
        r
    }

    /// Copies the nodes reachable from `root` into a compact diagram,
    /// numbered in depth-first post-order (terminals stay 0 and 1).
    fn extract(&self, root: BddRef, order: Vec<usize>) -> Obdd {
        let mut map: HashMap<BddRef, BddRef> = HashMap::from([(FALSE, FALSE), (TRUE, TRUE)]);
        let mut nodes = vec![self.nodes[FALSE], self.nodes[TRUE]];
        let mut stack = vec![(root, false)];
        while let Some((f, expanded)) = stack.pop() {
            if map.contains_key(&f) {
                continue;
            }
            let n = self.nodes[f];
            if expanded {
                let node = BddNode {
                    var: n.var,
                    lo: map[&n.lo],
                    hi: map[&n.hi],
                };
                map.insert(f, nodes.len());
                nodes.push(node);
            } else {
                stack.push((f, true));
                stack.push((n.hi, false));
                stack.push((n.lo, false));
            }
        }
        Obdd {
            order,
            nodes,
            root: map[&root],
        }
    }
}

/// A reduced ordered BDD. Indices 0 and 1 are the terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obdd {
    order: Vec<usize>,
    nodes: Vec<BddNode>,
    root: BddRef,
}

impl Obdd {
    pub fn root(&self) -> BddRef {
        self.root
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Internal nodes, indexed from 2.
    pub fn node(&self, r: BddRef) -> Option<&BddNode> {
        (r > TRUE).then(|| &self.nodes[r])
    }

    pub fn num_internal(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        let mut f = self.root;
        while f > TRUE {
            let n = &self.nodes[f];
            f = if x[n.var] { n.hi } else { n.lo };
        }
        f == TRUE
    }

    /// No node with equal children and no two nodes with the same triple.
    pub fn is_reduced(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.nodes[2..]
            .iter()
            .all(|n| n.lo != n.hi && seen.insert(*n))
    }

    /// Variables strictly follow the order along every edge.
    pub fn is_ordered(&self) -> bool {
        let mut level = vec![usize::MAX; self.order.len()];
        for (l, &v) in self.order.iter().enumerate() {
            level[v] = l;
        }
        self.nodes[2..].iter().all(|n| {
            [n.lo, n.hi]
                .iter()
                .all(|&c| c <= TRUE || level[self.nodes[c].var] > level[n.var])
        })
    }

    /// The diagram as a decision graph over boolean features `x1..xn` with
    /// classes 0 and 1. Edges to `lo` admit `{0}`, edges to `hi` admit `{1}`.
    /// Terminal ids are 0 and 1; internal nodes keep their index.
    pub fn to_decision_graph(&self) -> DecisionGraph {
        let n = self.order.len();
        let features = (0..n)
            .map(|i| Feature::finite(format!("x{}", i + 1), [Atom::Int(0), Atom::Int(1)]))
            .collect();
        let mut keep: Vec<BddRef> = Vec::new();
        let mut index: HashMap<BddRef, usize> = HashMap::new();
        let mut stack = vec![self.root];
        while let Some(f) = stack.pop() {
            if index.contains_key(&f) {
                continue;
            }
            index.insert(f, keep.len());
            keep.push(f);
            if f > TRUE {
                stack.push(self.nodes[f].hi);
                stack.push(self.nodes[f].lo);
            }
        }
        let nodes = keep
            .iter()
            .map(|&f| Node {
                id: (f as i64).into(),
                kind: if f <= TRUE {
                    NodeKind::Terminal(f)
                } else {
                    NodeKind::Decision(self.nodes[f].var)
                },
            })
            .collect();
        let mut edges = Vec::new();
        for &f in keep.iter().filter(|&&f| f > TRUE) {
            let node = self.nodes[f];
            for (child, value) in [(node.lo, 0), (node.hi, 1)] {
                edges.push(Edge {
                    from: index[&f],
                    to: index[&child],
                    literal: Literal {
                        feature: node.var,
                        admit: Admit::values([value]),
                    },
                });
            }
        }
        DecisionGraph::new(
            features,
            vec![Atom::Int(0), Atom::Int(1)],
            nodes,
            edges,
            0,
        )
        .expect("a reduced OBDD is a well-formed decision graph")
    }
}

/// Compiles `dl` under the given variable order (feature-index order when
/// `None`).
pub fn compile_dl(dl: &DecisionList, order: Option<&[usize]>) -> Result<Obdd, DlError> {
    let n = dl.num_features();
    let order: Vec<usize> = match order {
        None => (0..n).collect(),
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(DlError::BadOrder(o.to_vec()));
            }
            o.to_vec()
        }
    };
    let mut mgr = Manager::new(&order);
    let mut f = FALSE;
    let mut fired = FALSE;
    for rule in dl.rules() {
        let mut antecedent = TRUE;
        for &l in &rule.literals {
            let lit = mgr.literal(l);
            antecedent = mgr.apply(Op::And, antecedent, lit);
        }
        if rule.class == 1 {
            let unfired = mgr.not(fired);
            let first = mgr.apply(Op::And, antecedent, unfired);
            f = mgr.apply(Op::Or, f, first);
        }
        fired = mgr.apply(Op::Or, fired, antecedent);
    }
    Ok(mgr.extract(f, order))
}
