//! Decision-graph classifiers.
//!
//! A [`DecisionGraph`] is a rooted DAG whose non-terminal nodes test one
//! feature each, whose edges carry set-membership literals on that feature,
//! and whose terminals carry class labels. Decision trees, OBDDs and OMDDs are
//! all special cases. Graphs are immutable once built.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{Interval, IntervalSet};

/// Atomic value of a finite domain or a class label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Atom {
    Int(i64),
    Str(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(i) => write!(f, "{i}"),
            Atom::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::Str(s.to_owned())
    }
}

impl From<i64> for Atom {
    fn from(i: i64) -> Self {
        Atom::Int(i)
    }
}

/// Node identifier as written in the model file.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Int(i64),
    Str(String),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Int(i) => write!(f, "{i}"),
            NodeId::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for NodeId {
    fn from(i: i64) -> Self {
        NodeId::Int(i)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::Str(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureDomain {
    /// Ordered, non-empty, duplicate-free values.
    Finite(Vec<Atom>),
    /// The real line.
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Feature {
    pub name: String,
    pub domain: FeatureDomain,
}

impl Feature {
    pub fn finite(name: impl Into<String>, values: impl IntoIterator<Item = Atom>) -> Self {
        Feature {
            name: name.into(),
            domain: FeatureDomain::Finite(values.into_iter().collect()),
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Feature {
            name: name.into(),
            domain: FeatureDomain::Numeric,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.domain, FeatureDomain::Numeric)
    }

    /// Domain size, `None` for numeric features.
    pub fn cardinality(&self) -> Option<usize> {
        match &self.domain {
            FeatureDomain::Finite(values) => Some(values.len()),
            FeatureDomain::Numeric => None,
        }
    }

    pub fn value_index(&self, atom: &Atom) -> Option<usize> {
        match &self.domain {
            FeatureDomain::Finite(values) => values
                .iter()
                .position(|v| v == atom)
                .or_else(|| {
                    let text = atom.to_string();
                    values.iter().position(|v| v.to_string() == text)
                }),
            FeatureDomain::Numeric => None,
        }
    }

    /// Parses a textual value against this feature's domain.
    pub fn parse_value(&self, text: &str) -> Option<FeatureValue> {
        let text = text.trim();
        match &self.domain {
            FeatureDomain::Finite(values) => values
                .iter()
                .position(|v| v.to_string() == text)
                .map(FeatureValue::Category),
            FeatureDomain::Numeric => text.parse::<f64>().ok().map(FeatureValue::Real),
        }
    }

    pub fn render_value(&self, value: &FeatureValue) -> String {
        match (&self.domain, value) {
            (FeatureDomain::Finite(values), FeatureValue::Category(k)) => values
                .get(*k)
                .map_or_else(|| format!("#{k}"), Atom::to_string),
            (_, FeatureValue::Real(x)) => x.to_string(),
            (FeatureDomain::Numeric, FeatureValue::Category(k)) => format!("#{k}"),
        }
    }
}

/// One coordinate of a point in feature space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeatureValue {
    /// Index into a finite domain.
    Category(usize),
    Real(f64),
}

/// The value set admitted by an edge literal `x_i ∈ E`.
#[derive(Clone, Debug, PartialEq)]
pub enum Admit {
    /// Sorted, duplicate-free domain indices.
    Values(Vec<usize>),
    Intervals(IntervalSet),
}

impl Admit {
    pub fn values(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Admit::Values(v)
    }

    pub fn intervals(parts: impl IntoIterator<Item = Interval>) -> Self {
        Admit::Intervals(IntervalSet::new(parts))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Admit::Values(v) => v.is_empty(),
            Admit::Intervals(s) => s.is_empty(),
        }
    }

    pub fn admits(&self, value: &FeatureValue) -> bool {
        match (self, value) {
            (Admit::Values(v), FeatureValue::Category(k)) => v.binary_search(k).is_ok(),
            (Admit::Intervals(s), FeatureValue::Real(x)) => s.contains(*x),
            _ => false,
        }
    }

    pub fn overlaps(&self, other: &Admit) -> bool {
        match (self, other) {
            (Admit::Values(a), Admit::Values(b)) => a.iter().any(|k| b.binary_search(k).is_ok()),
            (Admit::Intervals(a), Admit::Intervals(b)) => !a.intersect(b).is_empty(),
            _ => false,
        }
    }
}

/// Edge label `x_feature ∈ admit`.
#[derive(Clone, Debug, PartialEq)]
pub struct Literal {
    pub feature: usize,
    pub admit: Admit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Class index into [`DecisionGraph::classes`].
    Terminal(usize),
    /// Feature index into [`DecisionGraph::features`].
    Decision(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub literal: Literal,
}

/// A point in feature space, one value per feature.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub values: Vec<FeatureValue>,
}

impl Instance {
    pub fn new(values: Vec<FeatureValue>) -> Self {
        Instance { values }
    }

    /// Parses one textual value per feature, in feature order.
    pub fn parse<S: AsRef<str>>(dg: &DecisionGraph, fields: &[S]) -> Result<Self, ModelError> {
        if fields.len() != dg.num_features() {
            return Err(ModelError::InstanceArity {
                expected: dg.num_features(),
                got: fields.len(),
            });
        }
        let values = dg
            .features()
            .iter()
            .zip(fields)
            .map(|(feature, text)| {
                feature
                    .parse_value(text.as_ref())
                    .ok_or_else(|| ModelError::UnknownValue {
                        feature: feature.name.clone(),
                        value: text.as_ref().to_owned(),
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(Instance { values })
    }

    /// Checks arity and that each coordinate lies in its feature's domain.
    pub fn check(&self, dg: &DecisionGraph) -> Result<(), ModelError> {
        if self.values.len() != dg.num_features() {
            return Err(ModelError::InstanceArity {
                expected: dg.num_features(),
                got: self.values.len(),
            });
        }
        for (feature, value) in dg.features().iter().zip(&self.values) {
            let ok = match (&feature.domain, value) {
                (FeatureDomain::Finite(d), FeatureValue::Category(k)) => *k < d.len(),
                (FeatureDomain::Numeric, FeatureValue::Real(x)) => !x.is_nan(),
                _ => false,
            };
            if !ok {
                return Err(ModelError::UnknownValue {
                    feature: feature.name.clone(),
                    value: format!("{value:?}"),
                });
            }
        }
        Ok(())
    }

    pub fn render(&self, dg: &DecisionGraph) -> Vec<String> {
        dg.features()
            .iter()
            .zip(&self.values)
            .map(|(f, v)| f.render_value(v))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("classes must be non-empty")]
    NoClasses,
    #[error("duplicate class label {0}")]
    DuplicateClass(String),
    #[error("feature {0}: finite domain must be non-empty")]
    EmptyDomain(String),
    #[error("feature {feature}: duplicate domain value {value}")]
    DuplicateDomainValue { feature: String, value: String },
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("dangling node reference {0}")]
    DanglingNode(String),
    #[error("unknown feature {0}")]
    UnknownFeature(String),
    #[error("unknown class {0}")]
    UnknownClass(String),
    #[error("edge {from}->{to}: literal references feature {literal} but source node tests {node}")]
    LiteralFeatureMismatch {
        from: String,
        to: String,
        literal: String,
        node: String,
    },
    #[error("edge {from}->{to}: {reason}")]
    BadLiteral {
        from: String,
        to: String,
        reason: String,
    },
    #[error("terminal node {0} has outgoing edges")]
    TerminalWithEdges(String),
    #[error("multiple roots: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("declared root {0} has incoming edges")]
    RootHasParents(String),
    #[error("no root node")]
    NoRoot,
    #[error("instance has {got} values, model has {expected} features")]
    InstanceArity { expected: usize, got: usize },
    #[error("value {value:?} is not in the domain of feature {feature}")]
    UnknownValue { feature: String, value: String },
    #[error("no outgoing edge of node {0} admits the instance value")]
    NoAdmittingEdge(String),
    #[error("path exceeds node count; graph has a cycle")]
    Cyclic,
}

/// Rooted DAG classifier.
#[derive(Clone, Debug)]
pub struct DecisionGraph {
    features: Vec<Feature>,
    classes: Vec<Atom>,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    indegree: Vec<usize>,
    root: usize,
}

impl DecisionGraph {
    /// Assembles a graph from dense node indices and checks the structural
    /// contract: unique ids, in-range references, literals on the source
    /// node's feature and domain, no edges out of terminals, and exactly one
    /// indegree-0 node which must be `root`.
    ///
    /// Semantic checks (acyclicity, partitions, path consistency) live in
    /// [`crate::validate`].
    pub fn new(
        features: Vec<Feature>,
        classes: Vec<Atom>,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        root: usize,
    ) -> Result<Self, ModelError> {
        if classes.is_empty() {
            return Err(ModelError::NoClasses);
        }
        for (k, c) in classes.iter().enumerate() {
            if classes[..k].contains(c) {
                return Err(ModelError::DuplicateClass(c.to_string()));
            }
        }
        for f in &features {
            if let FeatureDomain::Finite(values) = &f.domain {
                if values.is_empty() {
                    return Err(ModelError::EmptyDomain(f.name.clone()));
                }
                for (k, v) in values.iter().enumerate() {
                    if values[..k].contains(v) {
                        return Err(ModelError::DuplicateDomainValue {
                            feature: f.name.clone(),
                            value: v.to_string(),
                        });
                    }
                }
            }
        }
        let mut seen = HashMap::new();
        for node in &nodes {
            if seen.insert(node.id.clone(), ()).is_some() {
                return Err(ModelError::DuplicateNode(node.id.to_string()));
            }
            match node.kind {
                NodeKind::Terminal(c) if c >= classes.len() => {
                    return Err(ModelError::UnknownClass(format!("#{c}")))
                }
                NodeKind::Decision(f) if f >= features.len() => {
                    return Err(ModelError::UnknownFeature(format!("#{}", f + 1)))
                }
                _ => {}
            }
        }
        if root >= nodes.len() {
            return Err(ModelError::NoRoot);
        }
        let mut out = vec![Vec::new(); nodes.len()];
        let mut indegree = vec![0; nodes.len()];
        for (e, edge) in edges.iter().enumerate() {
            let name = |i: usize| {
                nodes
                    .get(i)
                    .map_or_else(|| format!("#{i}"), |n| n.id.to_string())
            };
            if edge.from >= nodes.len() {
                return Err(ModelError::DanglingNode(name(edge.from)));
            }
            if edge.to >= nodes.len() {
                return Err(ModelError::DanglingNode(name(edge.to)));
            }
            let feature = match nodes[edge.from].kind {
                NodeKind::Terminal(_) => {
                    return Err(ModelError::TerminalWithEdges(name(edge.from)))
                }
                NodeKind::Decision(f) => f,
            };
            if edge.literal.feature != feature {
                return Err(ModelError::LiteralFeatureMismatch {
                    from: name(edge.from),
                    to: name(edge.to),
                    literal: features
                        .get(edge.literal.feature)
                        .map_or_else(|| format!("#{}", edge.literal.feature + 1), |f| f.name.clone()),
                    node: features[feature].name.clone(),
                });
            }
            let bad = |reason: &str| ModelError::BadLiteral {
                from: name(edge.from),
                to: name(edge.to),
                reason: reason.to_owned(),
            };
            match (&features[feature].domain, &edge.literal.admit) {
                (FeatureDomain::Finite(d), Admit::Values(v)) => {
                    if v.iter().any(|&k| k >= d.len()) {
                        return Err(bad("value outside the feature domain"));
                    }
                    if v.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(bad("value list is not normalized"));
                    }
                }
                (FeatureDomain::Numeric, Admit::Intervals(_)) => {}
                (FeatureDomain::Finite(_), Admit::Intervals(_)) => {
                    return Err(bad("interval literal on a finite feature"))
                }
                (FeatureDomain::Numeric, Admit::Values(_)) => {
                    return Err(bad("value-set literal on a numeric feature"))
                }
            }
            out[edge.from].push(e);
            indegree[edge.to] += 1;
        }
        let sources: Vec<String> = (0..nodes.len())
            .filter(|&i| indegree[i] == 0)
            .map(|i| nodes[i].id.to_string())
            .collect();
        if sources.len() > 1 {
            return Err(ModelError::MultipleRoots(sources));
        }
        if indegree[root] != 0 {
            return Err(ModelError::RootHasParents(nodes[root].id.to_string()));
        }
        Ok(DecisionGraph {
            features,
            classes,
            nodes,
            edges,
            out,
            indegree,
            root,
        })
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn classes(&self) -> &[Atom] {
        &self.classes
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Indices into [`edges`](Self::edges) leaving `node`.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out[node]
    }

    pub fn indegree(&self, node: usize) -> usize {
        self.indegree[node]
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| &n.id == id)
    }

    /// At most one path between any two nodes: every non-root node has a
    /// single parent.
    pub fn is_tree(&self) -> bool {
        (0..self.nodes.len()).all(|i| i == self.root || self.indegree[i] == 1)
    }

    /// Follows the unique admitting edge at each decision node and returns
    /// the terminal reached.
    pub fn terminal_for(&self, v: &Instance) -> Result<usize, ModelError> {
        let mut node = self.root;
        for _ in 0..=self.nodes.len() {
            let feature = match self.nodes[node].kind {
                NodeKind::Terminal(_) => return Ok(node),
                NodeKind::Decision(f) => f,
            };
            let value = &v.values[feature];
            node = self.out[node]
                .iter()
                .map(|&e| &self.edges[e])
                .find(|e| e.literal.admit.admits(value))
                .ok_or_else(|| ModelError::NoAdmittingEdge(self.nodes[node].id.to_string()))?
                .to;
        }
        Err(ModelError::Cyclic)
    }

    /// Class index predicted for `v`.
    pub fn classify(&self, v: &Instance) -> Result<usize, ModelError> {
        if v.values.len() != self.num_features() {
            return Err(ModelError::InstanceArity {
                expected: self.num_features(),
                got: v.values.len(),
            });
        }
        let t = self.terminal_for(v)?;
        match self.nodes[t].kind {
            NodeKind::Terminal(c) => Ok(c),
            NodeKind::Decision(_) => unreachable!("terminal_for returns terminals"),
        }
    }

    pub fn classify_label(&self, v: &Instance) -> Result<&Atom, ModelError> {
        Ok(&self.classes[self.classify(v)?])
    }

    /// Finite per-feature value lists covering every distinct edge behaviour.
    ///
    /// Finite features yield their whole domain. Numeric features yield each
    /// finite interval endpoint appearing in the graph's literals for that
    /// feature plus one interior point per open cell between consecutive
    /// endpoints (and beyond the extremes), so two points in the same cell
    /// are admitted by exactly the same literals.
    pub fn representative_points(&self) -> Vec<Vec<FeatureValue>> {
        (0..self.features.len())
            .map(|i| match &self.features[i].domain {
                FeatureDomain::Finite(values) => {
                    (0..values.len()).map(FeatureValue::Category).collect()
                }
                FeatureDomain::Numeric => {
                    let mut cuts: Vec<f64> = self
                        .edges
                        .iter()
                        .filter(|e| e.literal.feature == i)
                        .flat_map(|e| match &e.literal.admit {
                            Admit::Intervals(s) => s.endpoints().collect::<Vec<_>>(),
                            Admit::Values(_) => Vec::new(),
                        })
                        .collect();
                    cuts.sort_by(f64::total_cmp);
                    cuts.dedup();
                    numeric_representatives(&cuts)
                        .into_iter()
                        .map(FeatureValue::Real)
                        .collect()
                }
            })
            .collect()
    }
}

fn numeric_representatives(cuts: &[f64]) -> Vec<f64> {
    let (Some(&first), Some(&last)) = (cuts.first(), cuts.last()) else {
        return vec![0.0];
    };
    let mut reps = vec![first - 1.0];
    for (k, &c) in cuts.iter().enumerate() {
        reps.push(c);
        if let Some(&next) = cuts.get(k + 1) {
            reps.push(c + (next - c) / 2.0);
        }
    }
    reps.push(last + 1.0);
    reps
}
