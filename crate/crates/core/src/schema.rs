//! JSON model documents.
//!
//! ```json
//! {
//!   "features": [{"name": "Age", "domain": {"kind": "finite", "values": ["W", "T", "O"]}},
//!                {"name": "Income", "domain": {"kind": "numeric"}}],
//!   "classes": ["N", "T"],
//!   "root": 1,
//!   "nodes": [{"id": 1, "feature": 1}, {"id": 2, "class": "T"}, ...],
//!   "edges": [{"from": 1, "to": 2, "literal": {"values": ["O"]}},
//!             {"from": 3, "to": 4, "literal": {"intervals": [[null, 5.0, true, true]]}}, ...]
//! }
//! ```
//!
//! Node `feature` references are 1-based indices or feature names. Interval
//! endpoints are numbers, or `null` for an unbounded side.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::model::{
    Admit, Atom, DecisionGraph, Edge, Feature, FeatureDomain, Literal, ModelError, Node, NodeId,
    NodeKind,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub features: Vec<FeatureDoc>,
    pub classes: Vec<Atom>,
    pub root: NodeId,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureDoc {
    pub name: String,
    pub domain: DomainDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainDoc {
    Finite { values: Vec<Atom> },
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeDoc {
    Decision { id: NodeId, feature: FeatureRef },
    Terminal { id: NodeId, class: Atom },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: NodeId,
    pub to: NodeId,
    pub literal: LiteralDoc,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiteralDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature: Option<FeatureRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<IntervalDoc>>,
}

/// `[lo, hi, loOpen, hiOpen]`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntervalDoc(pub Endpoint, pub Endpoint, pub bool, pub bool);

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Num(f64),
    Text(String),
    Unbounded(()),
}

impl Endpoint {
    fn to_f64(&self, upper: bool) -> Option<f64> {
        let inf = if upper { f64::INFINITY } else { f64::NEG_INFINITY };
        match self {
            Endpoint::Num(x) => Some(*x),
            Endpoint::Unbounded(()) => Some(inf),
            Endpoint::Text(t) => match t.trim() {
                "-inf" | "-Infinity" if !upper => Some(inf),
                "inf" | "+inf" | "Infinity" if upper => Some(inf),
                other => other.parse().ok(),
            },
        }
    }

    fn from_f64(x: f64) -> Self {
        if x.is_infinite() {
            Endpoint::Unbounded(())
        } else {
            Endpoint::Num(x)
        }
    }
}

fn resolve_feature(features: &[Feature], r: &FeatureRef) -> Result<usize, ModelError> {
    match r {
        FeatureRef::Index(i) if (1..=features.len()).contains(i) => Ok(i - 1),
        FeatureRef::Index(i) => Err(ModelError::UnknownFeature(i.to_string())),
        FeatureRef::Name(n) => features
            .iter()
            .position(|f| &f.name == n)
            .ok_or_else(|| ModelError::UnknownFeature(n.clone())),
    }
}

/// Parses a JSON model document into a [`DecisionGraph`].
pub fn parse_model(text: &str) -> Result<DecisionGraph, ModelError> {
    let doc: ModelDoc =
        serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
    from_doc(&doc)
}

pub fn from_doc(doc: &ModelDoc) -> Result<DecisionGraph, ModelError> {
    let features: Vec<Feature> = doc
        .features
        .iter()
        .map(|f| Feature {
            name: f.name.clone(),
            domain: match &f.domain {
                DomainDoc::Finite { values } => FeatureDomain::Finite(values.clone()),
                DomainDoc::Numeric => FeatureDomain::Numeric,
            },
        })
        .collect();

    let mut index: HashMap<&NodeId, usize> = HashMap::new();
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (k, n) in doc.nodes.iter().enumerate() {
        let (id, kind) = match n {
            NodeDoc::Decision { id, feature } => {
                (id, NodeKind::Decision(resolve_feature(&features, feature)?))
            }
            NodeDoc::Terminal { id, class } => {
                let c = doc
                    .classes
                    .iter()
                    .position(|c| c == class)
                    .or_else(|| doc.classes.iter().position(|c| c.to_string() == class.to_string()))
                    .ok_or_else(|| ModelError::UnknownClass(class.to_string()))?;
                (id, NodeKind::Terminal(c))
            }
        };
        if index.insert(id, k).is_some() {
            return Err(ModelError::DuplicateNode(id.to_string()));
        }
        nodes.push(Node {
            id: id.clone(),
            kind,
        });
    }
    let lookup = |id: &NodeId| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| ModelError::DanglingNode(id.to_string()))
    };

    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        let from = lookup(&e.from)?;
        let to = lookup(&e.to)?;
        let node_feature = match nodes[from].kind {
            NodeKind::Decision(f) => f,
            NodeKind::Terminal(_) => return Err(ModelError::TerminalWithEdges(e.from.to_string())),
        };
        let bad = |reason: String| ModelError::BadLiteral {
            from: e.from.to_string(),
            to: e.to.to_string(),
            reason,
        };
        let feature = match &e.literal.feature {
            Some(r) => resolve_feature(&features, r)?,
            None => node_feature,
        };
        if feature != node_feature {
            return Err(ModelError::LiteralFeatureMismatch {
                from: e.from.to_string(),
                to: e.to.to_string(),
                literal: features[feature].name.clone(),
                node: features[node_feature].name.clone(),
            });
        }
        let admit = match (&e.literal.values, &e.literal.intervals) {
            (Some(values), None) => Admit::values(
                values
                    .iter()
                    .map(|v| {
                        features[feature].value_index(v).ok_or_else(|| {
                            bad(format!(
                                "value {v} is not in the domain of {}",
                                features[feature].name
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            (None, Some(parts)) => Admit::intervals(
                parts
                    .iter()
                    .map(|IntervalDoc(lo, hi, lo_open, hi_open)| {
                        match (lo.to_f64(false), hi.to_f64(true)) {
                            (Some(lo), Some(hi)) => Ok(Interval::new(lo, hi, *lo_open, *hi_open)),
                            _ => Err(bad("unreadable interval endpoint".into())),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            _ => return Err(bad("literal needs exactly one of `values` or `intervals`".into())),
        };
        edges.push(Edge {
            from,
            to,
            literal: Literal { feature, admit },
        });
    }

    let root = lookup(&doc.root)?;
    DecisionGraph::new(features, doc.classes.clone(), nodes, edges, root)
}

/// Inverse of [`from_doc`].
pub fn to_doc(dg: &DecisionGraph) -> ModelDoc {
    let features = dg.features();
    ModelDoc {
        features: features
            .iter()
            .map(|f| FeatureDoc {
                name: f.name.clone(),
                domain: match &f.domain {
                    FeatureDomain::Finite(values) => DomainDoc::Finite {
                        values: values.clone(),
                    },
                    FeatureDomain::Numeric => DomainDoc::Numeric,
                },
            })
            .collect(),
        classes: dg.classes().to_vec(),
        root: dg.nodes()[dg.root()].id.clone(),
        nodes: dg
            .nodes()
            .iter()
            .map(|n| match n.kind {
                NodeKind::Decision(f) => NodeDoc::Decision {
                    id: n.id.clone(),
                    feature: FeatureRef::Index(f + 1),
                },
                NodeKind::Terminal(c) => NodeDoc::Terminal {
                    id: n.id.clone(),
                    class: dg.classes()[c].clone(),
                },
            })
            .collect(),
        edges: dg
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                from: dg.nodes()[e.from].id.clone(),
                to: dg.nodes()[e.to].id.clone(),
                literal: match (&e.literal.admit, &features[e.literal.feature].domain) {
                    (Admit::Values(v), FeatureDomain::Finite(values)) => LiteralDoc {
                        values: Some(v.iter().map(|&k| values[k].clone()).collect()),
                        ..Default::default()
                    },
                    (Admit::Intervals(s), _) => LiteralDoc {
                        intervals: Some(
                            s.parts()
                                .iter()
                                .map(|p| {
                                    IntervalDoc(
                                        Endpoint::from_f64(p.lo),
                                        Endpoint::from_f64(p.hi),
                                        p.lo_open,
                                        p.hi_open,
                                    )
                                })
                                .collect(),
                        ),
                        ..Default::default()
                    },
                    (Admit::Values(_), FeatureDomain::Numeric) => {
                        unreachable!("DecisionGraph::new rejects value literals on numeric features")
                    }
                },
            })
            .collect(),
    }
}

pub fn model_to_json(dg: &DecisionGraph) -> String {
    serde_json::to_string_pretty(&to_doc(dg)).expect("model documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{FeatureValue, Instance};

    #[test]
    fn running_examples_parse() {
        let dt = parse_model(fixtures::HARDWARE_TREE_JSON).unwrap();
        assert_eq!(dt.num_features(), 4);
        assert_eq!(dt.classes(), &[Atom::from("N"), Atom::from("T"), Atom::from("L")]);
        assert_eq!(dt.nodes().len(), 15);
        assert!(dt.is_tree());

        let mdd = parse_model(fixtures::RGB_OMDD_JSON).unwrap();
        assert_eq!(mdd.num_features(), 3);
        assert_eq!(mdd.classes(), &[Atom::from("R"), Atom::from("G"), Atom::from("B")]);
        assert!(!mdd.is_tree());
    }

    #[test]
    fn two_sources_is_multiple_roots() {
        let text = r#"{"features":[{"name":"x","domain":{"kind":"finite","values":[0,1]}}],
            "classes":["a"],"root":1,
            "nodes":[{"id":1,"class":"a"},{"id":2,"class":"a"}],"edges":[]}"#;
        let err = parse_model(text).unwrap_err();
        assert!(err.to_string().contains("multiple roots"), "{err}");
    }

    #[test]
    fn dangling_edge_target() {
        let text = r#"{"features":[{"name":"x","domain":{"kind":"finite","values":[0,1]}}],
            "classes":["a"],"root":1,
            "nodes":[{"id":1,"feature":1}],"edges":[{"from":1,"to":9,"literal":{"values":[0]}}]}"#;
        assert!(matches!(parse_model(text), Err(ModelError::DanglingNode(id)) if id == "9"));
    }

    #[test]
    fn literal_feature_mismatch() {
        let text = r#"{"features":[{"name":"x","domain":{"kind":"finite","values":[0,1]}},
                                   {"name":"y","domain":{"kind":"finite","values":[0,1]}}],
            "classes":["a"],"root":1,
            "nodes":[{"id":1,"feature":"x"},{"id":2,"class":"a"}],
            "edges":[{"from":1,"to":2,"literal":{"feature":2,"values":[0]}}]}"#;
        assert!(matches!(
            parse_model(text),
            Err(ModelError::LiteralFeatureMismatch { .. })
        ));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(parse_model("{"), Err(ModelError::Malformed(_))));
        assert!(matches!(parse_model(r#"{"features":[]}"#), Err(ModelError::Malformed(_))));
    }

    #[test]
    fn numeric_literals_round_trip() {
        let dg = fixtures::threshold_stump(5.0);
        let text = model_to_json(&dg);
        assert!(text.contains("null"));
        let back = parse_model(&text).unwrap();
        assert_eq!(back.edges(), dg.edges());
        for x in [4.0, 5.0, 6.0] {
            let v = Instance::new(vec![FeatureValue::Real(x)]);
            assert_eq!(back.classify(&v).unwrap(), dg.classify(&v).unwrap());
        }
    }

    #[test]
    fn string_infinities_accepted() {
        let text = r#"{"features":[{"name":"x","domain":{"kind":"numeric"}}],
            "classes":[0,1],"root":"r",
            "nodes":[{"id":"r","feature":1},{"id":"a","class":0},{"id":"b","class":1}],
            "edges":[{"from":"r","to":"a","literal":{"intervals":[["-inf",2.5,true,false]]}},
                     {"from":"r","to":"b","literal":{"intervals":[[2.5,"inf",true,true]]}}]}"#;
        let dg = parse_model(text).unwrap();
        let v = Instance::new(vec![FeatureValue::Real(2.5)]);
        assert_eq!(dg.classify(&v).unwrap(), 0);
    }
}
