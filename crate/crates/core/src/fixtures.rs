//! The two running-example classifiers plus a few small hand-built graphs.

use crate::interval::Interval;
use crate::model::{Admit, Atom, DecisionGraph, Edge, Feature, Literal, Node, NodeKind};
use crate::schema::parse_model;

/// Hardware-purchase decision tree over Age, Income, Student and
/// CreditRating, predicting N (no hardware), T (tablet) or L (laptop).
/// Node ids 1..=15.
pub const HARDWARE_TREE_JSON: &str = include_str!("../data/hardware_tree.json");

/// Ordered multi-valued decision diagram over x1, x2 ∈ {0,1} and
/// x3 ∈ {0,1,2}, predicting R, G or B. Node ids 1..=8.
pub const RGB_OMDD_JSON: &str = include_str!("../data/rgb_omdd.json");

pub fn hardware_tree() -> DecisionGraph {
    parse_model(HARDWARE_TREE_JSON).expect("bundled model parses")
}

pub fn rgb_omdd() -> DecisionGraph {
    parse_model(RGB_OMDD_JSON).expect("bundled model parses")
}

/// One numeric feature `x`: class 0 if `x < t`, class 1 otherwise.
pub fn threshold_stump(t: f64) -> DecisionGraph {
    DecisionGraph::new(
        vec![Feature::numeric("x")],
        vec![Atom::Int(0), Atom::Int(1)],
        vec![
            Node { id: 0.into(), kind: NodeKind::Decision(0) },
            Node { id: 1.into(), kind: NodeKind::Terminal(0) },
            Node { id: 2.into(), kind: NodeKind::Terminal(1) },
        ],
        vec![
            Edge {
                from: 0,
                to: 1,
                literal: Literal { feature: 0, admit: Admit::intervals([Interval::below(t)]) },
            },
            Edge {
                from: 0,
                to: 2,
                literal: Literal { feature: 0, admit: Admit::intervals([Interval::at_least(t)]) },
            },
        ],
        0,
    )
    .expect("stump is well formed")
}

/// A graph that is a single terminal: every point is classified `class`.
pub fn constant(num_features: usize, class: Atom) -> DecisionGraph {
    DecisionGraph::new(
        (0..num_features)
            .map(|i| Feature::finite(format!("x{}", i + 1), [Atom::Int(0), Atom::Int(1)]))
            .collect(),
        vec![class],
        vec![Node { id: 0.into(), kind: NodeKind::Terminal(0) }],
        vec![],
        0,
    )
    .expect("constant graph is well formed")
}
