//! Explanation graphs.
//!
//! An [`Xpg`] keeps the DAG of a decision graph but replaces every literal by
//! a single bit: 1 if the edge is consistent with the instance being
//! explained, 0 otherwise. Terminals are labeled 1 when they carry the
//! predicted class. Each decision node reads one selector variable `s_i`;
//! `s_i = 1` pins feature `i` to its instance value and `s_i = 0` lets it
//! range over its domain.
//!
//! The graph evaluates to 1 on a selector vector iff no 0-labeled terminal is
//! *activated*, where a node is activated if some activated parent either
//! follows a 1-edge into it or has its variable freed. This function is
//! monotone, and its prime implicants are exactly the abductive explanations
//! of the original prediction.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::features::FeatureSet;
use crate::model::{DecisionGraph, Instance, ModelError, NodeId, NodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XNode {
    /// Terminal with its 0/1 label.
    Terminal(bool),
    /// Decision node reading selector variable `var` (0-based feature index).
    Decision(usize),
}

#[derive(Debug, Error)]
pub enum XpgError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("node {0} is out of range")]
    BadNode(usize),
    #[error("selector variable {var} out of range for m = {m}")]
    BadVar { var: usize, m: usize },
    #[error("node {0} has more than one outgoing 1-edge")]
    SeveralOneEdges(usize),
    #[error("decision node {0} has no outgoing edges")]
    NoOutgoingEdges(usize),
    #[error("terminal node {0} has outgoing edges")]
    TerminalWithEdges(usize),
    #[error("the graph must have exactly one indegree-0 node, the root")]
    BadRoot,
    #[error("the graph has a cycle")]
    Cyclic,
    #[error("the 1-edge path from the root ends in a 0-labeled terminal")]
    NoOneTerminal,
}

/// Assignment to the selector variables; `true` fixes a feature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SVector(pub Vec<bool>);

impl SVector {
    pub fn ones(m: usize) -> Self {
        SVector(vec![true; m])
    }

    pub fn zeros(m: usize) -> Self {
        SVector(vec![false; m])
    }

    /// Features in `fixed` set to 1, all others 0.
    pub fn fixing(fixed: &FeatureSet, m: usize) -> Self {
        SVector(fixed.to_mask(m))
    }

    /// Features in `free` set to 0, all others 1.
    pub fn freeing(free: &FeatureSet, m: usize) -> Self {
        SVector(free.to_mask(m).into_iter().map(|b| !b).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fixed(&self) -> FeatureSet {
        FeatureSet::from_mask(&self.0)
    }

    pub fn free(&self) -> FeatureSet {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| (!b).then_some(i))
            .collect()
    }

    /// Componentwise `self ≤ other`.
    pub fn precedes(&self, other: &SVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| !a || *b)
    }
}

#[derive(Clone, Debug)]
pub struct Xpg {
    m: usize,
    root: usize,
    nodes: Vec<XNode>,
    children: Vec<Vec<(usize, bool)>>,
    ids: Vec<NodeId>,
    order: Vec<usize>,
    tree: bool,
    source_class: Option<usize>,
}

impl Xpg {
    /// Builds the explanation graph of `dg` for instance `v`. The class being
    /// explained is `dg.classify(v)`.
    pub fn build(dg: &DecisionGraph, v: &Instance) -> Result<Xpg, XpgError> {
        v.check(dg)?;
        let class = dg.classify(v)?;
        let nodes: Vec<XNode> = dg
            .nodes()
            .iter()
            .map(|n| match n.kind {
                NodeKind::Terminal(c) => XNode::Terminal(c == class),
                NodeKind::Decision(f) => XNode::Decision(f),
            })
            .collect();
        let children = (0..nodes.len())
            .map(|p| {
                dg.out_edges(p)
                    .iter()
                    .map(|&e| {
                        let edge = &dg.edges()[e];
                        let value = &v.values[edge.literal.feature];
                        (edge.to, edge.literal.admit.admits(value))
                    })
                    .collect()
            })
            .collect();
        let ids = dg.nodes().iter().map(|n| n.id.clone()).collect();
        let mut x = Xpg::from_parts(dg.num_features(), nodes, children, dg.root(), ids)?;
        x.source_class = Some(class);
        Ok(x)
    }

    /// Assembles an explanation graph directly and checks its invariants.
    pub fn from_parts(
        m: usize,
        nodes: Vec<XNode>,
        children: Vec<Vec<(usize, bool)>>,
        root: usize,
        ids: Vec<NodeId>,
    ) -> Result<Xpg, XpgError> {
        let n = nodes.len();
        if children.len() != n || root >= n || ids.len() != n {
            return Err(XpgError::BadNode(root.max(children.len()).max(ids.len())));
        }
        let mut indeg = vec![0usize; n];
        for (p, kids) in children.iter().enumerate() {
            match nodes[p] {
                XNode::Terminal(_) if !kids.is_empty() => {
                    return Err(XpgError::TerminalWithEdges(p))
                }
                XNode::Decision(_) if kids.is_empty() => return Err(XpgError::NoOutgoingEdges(p)),
                XNode::Decision(var) if var >= m => return Err(XpgError::BadVar { var, m }),
                _ => {}
            }
            if kids.iter().filter(|(_, one)| *one).count() > 1 {
                return Err(XpgError::SeveralOneEdges(p));
            }
            for &(r, _) in kids {
                if r >= n {
                    return Err(XpgError::BadNode(r));
                }
                indeg[r] += 1;
            }
        }
        if indeg[root] != 0 || indeg.iter().filter(|&&d| d == 0).count() != 1 {
            return Err(XpgError::BadRoot);
        }
        let tree = indeg.iter().all(|&d| d <= 1);
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            order.push(p);
            for &(r, _) in &children[p] {
                indeg[r] -= 1;
                if indeg[r] == 0 {
                    stack.push(r);
                }
            }
        }
        if order.len() != n {
            return Err(XpgError::Cyclic);
        }
        let x = Xpg {
            m,
            root,
            nodes,
            children,
            ids,
            order,
            tree,
            source_class: None,
        };
        // follow the 1-edges from the root
        let mut p = root;
        loop {
            match x.nodes[p] {
                XNode::Terminal(true) => break,
                XNode::Terminal(false) => return Err(XpgError::NoOneTerminal),
                XNode::Decision(_) => match x.children[p].iter().find(|(_, one)| *one) {
                    Some(&(r, _)) => p = r,
                    None => return Err(XpgError::NoOneTerminal),
                },
            }
        }
        Ok(x)
    }

    /// Number of selector variables (features).
    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[XNode] {
        &self.nodes
    }

    pub fn children(&self, p: usize) -> &[(usize, bool)] {
        &self.children[p]
    }

    pub fn node_id(&self, p: usize) -> &NodeId {
        &self.ids[p]
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub fn num_edges(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Class index of the source prediction, when built from a decision graph.
    pub fn source_class(&self) -> Option<usize> {
        self.source_class
    }

    pub fn is_tree(&self) -> bool {
        self.tree
    }

    pub fn has_zero_terminal(&self) -> bool {
        self.nodes.contains(&XNode::Terminal(false))
    }

    /// Selector variables read by some decision node.
    pub fn used_vars(&self) -> FeatureSet {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                XNode::Decision(v) => Some(*v),
                XNode::Terminal(_) => None,
            })
            .collect()
    }

    /// Activation of every node under `s`, in one topological pass.
    pub fn activation(&self, s: &SVector) -> Vec<bool> {
        assert_eq!(s.len(), self.m, "selector vector length");
        let mut active = vec![false; self.nodes.len()];
        active[self.root] = true;
        for &p in &self.order {
            if !active[p] {
                continue;
            }
            if let XNode::Decision(var) = self.nodes[p] {
                let free = !s.0[var];
                for &(r, one) in &self.children[p] {
                    if one || free {
                        active[r] = true;
                    }
                }
            }
        }
        active
    }

    /// The evaluation function: 1 iff no 0-labeled terminal is activated.
    pub fn evaluate(&self, s: &SVector) -> bool {
        let active = self.activation(s);
        !self
            .nodes
            .iter()
            .zip(&active)
            .any(|(n, &a)| a && *n == XNode::Terminal(false))
    }

    /// Whether a 0-labeled terminal is reachable when every variable in
    /// `free` is unset. Equals `!evaluate(freeing(free))`.
    pub fn reach_zero(&self, free: &FeatureSet) -> bool {
        self.reach_zero_mask(&free.to_mask(self.m))
    }

    /// [`reach_zero`](Self::reach_zero) with the free set as a mask of
    /// length `m`. Single depth-first traversal.
    pub fn reach_zero_mask(&self, free: &[bool]) -> bool {
        debug_assert_eq!(free.len(), self.m);
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(p) = stack.pop() {
            match self.nodes[p] {
                XNode::Terminal(false) => return true,
                XNode::Terminal(true) => {}
                XNode::Decision(var) => {
                    for &(r, one) in &self.children[p] {
                        if (one || free[var]) && !seen[r] {
                            seen[r] = true;
                            stack.push(r);
                        }
                    }
                }
            }
        }
        false
    }

    /// Graphviz rendering: decision nodes show their selector, terminals
    /// their 0/1 label, edges their 0/1 label.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph xpg {\n");
        for (p, node) in self.nodes.iter().enumerate() {
            let (label, shape) = match node {
                XNode::Decision(var) => (format!("s{}", var + 1), "circle"),
                XNode::Terminal(b) => (u8::from(*b).to_string(), "box"),
            };
            let _ = writeln!(
                out,
                "  n{p} [label=\"{}: {label}\", shape={shape}];",
                self.ids[p]
            );
        }
        for (p, kids) in self.children.iter().enumerate() {
            for &(r, one) in kids {
                let style = if one { "solid" } else { "dashed" };
                let _ = writeln!(
                    out,
                    "  n{p} -> n{r} [label=\"{}\", style={style}];",
                    u8::from(one)
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Xpg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "XpG(m={}, nodes={}, edges={})",
            self.m,
            self.nodes.len(),
            self.num_edges()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn hardware_xpg() -> Xpg {
        let dt = fixtures::hardware_tree();
        let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
        Xpg::build(&dt, &v).unwrap()
    }

    fn rgb_xpg() -> Xpg {
        let mdd = fixtures::rgb_omdd();
        let v = Instance::parse(&mdd, &["0", "1", "2"]).unwrap();
        Xpg::build(&mdd, &v).unwrap()
    }

    fn s(bits: &[u8]) -> SVector {
        SVector(bits.iter().map(|&b| b == 1).collect())
    }

    #[test]
    fn hardware_labels() {
        let x = hardware_xpg();
        let zero_terminals: Vec<String> = (0..x.nodes().len())
            .filter(|&p| x.nodes()[p] == XNode::Terminal(false))
            .map(|p| x.node_id(p).to_string())
            .collect();
        assert_eq!(zero_terminals, ["6", "9", "12", "13", "15"]);
        assert!(x.is_tree());
        // node 1 reads s3; its 1-edge leads to node 3
        let n1 = x.node_index(&1.into()).unwrap();
        assert_eq!(x.nodes()[n1], XNode::Decision(2));
        let one = x.children(n1).iter().find(|c| c.1).unwrap().0;
        assert_eq!(x.node_id(one), &NodeId::Int(3));
    }

    #[test]
    fn hardware_evaluation() {
        let x = hardware_xpg();
        assert!(x.evaluate(&s(&[1, 1, 1, 1])));
        assert!(!x.evaluate(&s(&[0, 0, 0, 0])));
        assert!(x.evaluate(&s(&[1, 0, 0, 1])));
        assert!(!x.evaluate(&s(&[0, 1, 1, 1])));
        assert!(!x.evaluate(&s(&[1, 1, 1, 0])));
    }

    #[test]
    fn hardware_reach_zero() {
        let x = hardware_xpg();
        assert!(!x.reach_zero(&FeatureSet::new()));
        assert!(x.reach_zero(&FeatureSet::from([3])));
        assert!(!x.reach_zero(&FeatureSet::from([1, 2])));
    }

    #[test]
    fn rgb_evaluation() {
        let x = rgb_xpg();
        assert!(x.evaluate(&s(&[1, 0, 0])));
        assert!(!x.evaluate(&s(&[0, 1, 1])));
        // x2 is tested but never decides anything
        assert!(x.used_vars().contains(1));
        assert_eq!(x.evaluate(&s(&[1, 0, 1])), x.evaluate(&s(&[1, 1, 1])));
        assert!(!x.is_tree());
    }

    #[test]
    fn one_path_matches_classification_path() {
        let dt = fixtures::hardware_tree();
        for row in [["W", "H", "N", "E"], ["T", "M", "Y", "F"], ["O", "L", "N", "P"]] {
            let v = Instance::parse(&dt, &row).unwrap();
            let x = Xpg::build(&dt, &v).unwrap();
            let mut p = x.root();
            while let XNode::Decision(_) = x.nodes()[p] {
                p = x.children(p).iter().find(|c| c.1).unwrap().0;
            }
            assert_eq!(p, dt.terminal_for(&v).unwrap());
        }
    }

    #[test]
    fn rejects_two_one_edges() {
        let err = Xpg::from_parts(
            1,
            vec![XNode::Decision(0), XNode::Terminal(true), XNode::Terminal(false)],
            vec![vec![(1, true), (2, true)], vec![], vec![]],
            0,
            (0..3).map(NodeId::Int).collect(),
        )
        .unwrap_err();
        assert!(matches!(err, XpgError::SeveralOneEdges(0)));
    }

    #[test]
    fn dot_dump_mentions_every_edge() {
        let x = rgb_xpg();
        let dot = x.to_dot();
        assert_eq!(dot.matches("->").count(), x.num_edges());
        assert!(dot.contains("s3"));
    }

    proptest! {
        #[test]
        fn complement_law_on_hardware(bits in proptest::collection::vec(any::<bool>(), 4)) {
            let x = hardware_xpg();
            let sv = SVector(bits);
            prop_assert_eq!(x.reach_zero(&sv.free()), !x.evaluate(&sv));
        }
    }
}
