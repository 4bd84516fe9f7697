//! Seeded random models, instances and decision lists for tests, benches and
//! examples.
//!
//! Every generated graph is valid by construction. Trees split the values
//! still possible on the current path, so repeated tests of a feature only
//! ever refine earlier ones. DAGs are read-once: features are tested in a
//! fixed random order and never twice on a path.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dlc::{DecisionList, Rule};
use crate::interval::Interval;
use crate::model::{
    Admit, Atom, DecisionGraph, Edge, Feature, FeatureDomain, FeatureValue, Instance, Literal,
    Node, NodeKind,
};
use crate::xpg::SVector;

/// Shape of a random finite-domain model.
#[derive(Clone, Copy, Debug)]
pub struct ModelSpec {
    pub features: usize,
    /// Domain sizes are drawn from `2..=max_domain`.
    pub max_domain: usize,
    /// Upper bound on the node count (terminals included).
    pub max_nodes: usize,
    pub classes: usize,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            features: 6,
            max_domain: 3,
            max_nodes: 40,
            classes: 2,
        }
    }
}

fn finite_features<R: Rng>(rng: &mut R, spec: &ModelSpec) -> Vec<Feature> {
    (0..spec.features)
        .map(|i| {
            let d = rng.gen_range(2..=spec.max_domain.max(2));
            Feature::finite(format!("x{}", i + 1), (0..d as i64).map(Atom::Int))
        })
        .collect()
}

fn class_labels(k: usize) -> Vec<Atom> {
    (0..k.max(1) as i64).map(Atom::Int).collect()
}

/// Splits `values` into `k` non-empty random parts, each sorted.
fn partition<R: Rng>(rng: &mut R, values: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut shuffled = values.to_vec();
    shuffled.shuffle(rng);
    let mut cuts: Vec<usize> = (1..shuffled.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut start = 0;
    for c in cuts.into_iter().chain([shuffled.len()]) {
        let mut part = shuffled[start..c].to_vec();
        part.sort_unstable();
        parts.push(part);
        start = c;
    }
    parts
}

fn assemble(
    features: Vec<Feature>,
    classes: Vec<Atom>,
    kinds: Vec<NodeKind>,
    edges: Vec<Edge>,
) -> DecisionGraph {
    let nodes = kinds
        .into_iter()
        .enumerate()
        .map(|(k, kind)| Node {
            id: (k as i64 + 1).into(),
            kind,
        })
        .collect();
    DecisionGraph::new(features, classes, nodes, edges, 0).expect("generated graphs are well formed")
}

/// A random decision tree with at most `spec.max_nodes` nodes, grown by
/// repeatedly splitting a random leaf.
pub fn random_tree<R: Rng>(rng: &mut R, spec: &ModelSpec) -> DecisionGraph {
    let features = finite_features(rng, spec);
    let domains: Vec<Vec<usize>> = features
        .iter()
        .map(|f| (0..f.cardinality().unwrap_or(0)).collect())
        .collect();
    let mut states: Vec<Vec<Vec<usize>>> = vec![domains];
    let mut tested: Vec<Option<usize>> = vec![None];
    let mut edges = Vec::new();
    let mut leaves = vec![0usize];
    let target = spec.max_nodes.max(1);
    while states.len() + 2 <= target && !leaves.is_empty() {
        let pick = rng.gen_range(0..leaves.len());
        let leaf = leaves[pick];
        let open: Vec<usize> = (0..spec.features)
            .filter(|&i| states[leaf][i].len() >= 2)
            .collect();
        let Some(&f) = open.choose(rng) else {
            leaves.swap_remove(pick);
            continue;
        };
        leaves.swap_remove(pick);
        let max_k = states[leaf][f].len().min(target - states.len());
        let k = rng.gen_range(2..=max_k);
        tested[leaf] = Some(f);
        for part in partition(rng, &states[leaf][f], k) {
            let mut state = states[leaf].clone();
            state[f] = part.clone();
            let child = states.len();
            states.push(state);
            tested.push(None);
            leaves.push(child);
            edges.push(Edge {
                from: leaf,
                to: child,
                literal: Literal {
                    feature: f,
                    admit: Admit::Values(part),
                },
            });
        }
    }
    let kinds = tested
        .into_iter()
        .map(|t| match t {
            Some(f) => NodeKind::Decision(f),
            None => NodeKind::Terminal(rng.gen_range(0..spec.classes.max(1))),
        })
        .collect();
    assemble(features, class_labels(spec.classes), kinds, edges)
}

/// A random read-once decision DAG in the style of an OMDD: nodes are
/// arranged in one level per feature (in a random order), and each edge
/// jumps to a later level or to one of the shared class terminals.
pub fn random_dag<R: Rng>(rng: &mut R, spec: &ModelSpec) -> DecisionGraph {
    let features = finite_features(rng, spec);
    let m = spec.features;
    let classes = spec.classes.max(1);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let budget = spec.max_nodes.saturating_sub(classes).max(1);
    let width = (budget / m.max(1)).max(1);
    // levels[l] holds the node indices (into `kinds`) of level l
    let mut kinds: Vec<NodeKind> = Vec::new();
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for (l, &f) in order.iter().enumerate() {
        let w = if l == 0 { 1 } else { rng.gen_range(1..=2 * width - 1) };
        if kinds.len() + w > budget {
            break;
        }
        levels.push((kinds.len()..kinds.len() + w).collect());
        kinds.extend(std::iter::repeat_n(NodeKind::Decision(f), w));
    }
    let first_terminal = kinds.len();
    kinds.extend((0..classes).map(NodeKind::Terminal));

    let mut edges = Vec::new();
    for l in 0..levels.len() {
        for &node in &levels[l] {
            let f = order[l];
            let d = features[f].cardinality().unwrap_or(0);
            let k = rng.gen_range(2..=d);
            let mut targets: Vec<(usize, Vec<usize>)> = Vec::new();
            for part in partition(rng, &(0..d).collect::<Vec<_>>(), k) {
                let to = if l + 1 < levels.len() && rng.gen_bool(0.9) {
                    let next = if rng.gen_bool(0.7) {
                        l + 1
                    } else {
                        rng.gen_range(l + 1..levels.len())
                    };
                    *levels[next].choose(rng).expect("levels are non-empty")
                } else {
                    first_terminal + rng.gen_range(0..classes)
                };
                match targets.iter_mut().find(|(t, _)| *t == to) {
                    Some((_, values)) => values.extend(part),
                    None => targets.push((to, part)),
                }
            }
            for (to, values) in targets {
                edges.push(Edge {
                    from: node,
                    to,
                    literal: Literal {
                        feature: f,
                        admit: Admit::values(values),
                    },
                });
            }
        }
    }
    prune_unreachable(features, class_labels(classes), kinds, edges)
}

fn prune_unreachable(
    features: Vec<Feature>,
    classes: Vec<Atom>,
    kinds: Vec<NodeKind>,
    edges: Vec<Edge>,
) -> DecisionGraph {
    let mut out = vec![Vec::new(); kinds.len()];
    for (e, edge) in edges.iter().enumerate() {
        out[edge.from].push(e);
    }
    let mut index = vec![usize::MAX; kinds.len()];
    let mut keep = vec![0usize];
    index[0] = 0;
    let mut k = 0;
    while k < keep.len() {
        for &e in &out[keep[k]] {
            let to = edges[e].to;
            if index[to] == usize::MAX {
                index[to] = keep.len();
                keep.push(to);
            }
        }
        k += 1;
    }
    let new_kinds = keep.iter().map(|&n| kinds[n]).collect();
    let new_edges = edges
        .into_iter()
        .filter(|e| index[e.from] != usize::MAX)
        .map(|e| Edge {
            from: index[e.from],
            to: index[e.to],
            literal: e.literal,
        })
        .collect();
    assemble(features, classes, new_kinds, new_edges)
}

/// A random binary-split tree over numeric features with integer thresholds
/// in `0..=100`.
pub fn random_numeric_tree<R: Rng>(rng: &mut R, features: usize, max_nodes: usize) -> DecisionGraph {
    let feats: Vec<Feature> = (0..features)
        .map(|i| Feature::numeric(format!("x{}", i + 1)))
        .collect();
    // per-feature half-open integer window [lo, hi) still possible on the path
    let mut states: Vec<Vec<(i64, i64)>> = vec![vec![(-1, 102); features]];
    let mut tested: Vec<Option<usize>> = vec![None];
    let mut edges = Vec::new();
    let mut leaves = vec![0usize];
    while states.len() + 2 <= max_nodes && !leaves.is_empty() {
        let pick = rng.gen_range(0..leaves.len());
        let leaf = leaves.swap_remove(pick);
        let open: Vec<usize> = (0..features)
            .filter(|&i| states[leaf][i].1 - states[leaf][i].0 >= 2)
            .collect();
        let Some(&f) = open.choose(rng) else { continue };
        let (lo, hi) = states[leaf][f];
        let t = rng.gen_range(lo + 1..hi);
        tested[leaf] = Some(f);
        let bound = |x: i64| {
            if !(0..=101).contains(&x) {
                None
            } else {
                Some(x as f64)
            }
        };
        for (a, b) in [(lo, t), (t, hi)] {
            let interval = Interval::new(
                bound(a).unwrap_or(f64::NEG_INFINITY),
                bound(b).unwrap_or(f64::INFINITY),
                false,
                true,
            );
            let mut state = states[leaf].clone();
            state[f] = (a, b);
            let child = states.len();
            states.push(state);
            tested.push(None);
            leaves.push(child);
            edges.push(Edge {
                from: leaf,
                to: child,
                literal: Literal {
                    feature: f,
                    admit: Admit::intervals([interval]),
                },
            });
        }
    }
    let kinds = tested
        .into_iter()
        .map(|t| match t {
            Some(f) => NodeKind::Decision(f),
            None => NodeKind::Terminal(rng.gen_range(0..2)),
        })
        .collect();
    assemble(feats, class_labels(2), kinds, edges)
}

/// A uniformly random point: a random domain index per finite feature and
/// a random integer in `-5..=105` per numeric feature.
pub fn random_instance<R: Rng>(rng: &mut R, dg: &DecisionGraph) -> Instance {
    Instance::new(
        dg.features()
            .iter()
            .map(|f| match &f.domain {
                FeatureDomain::Finite(values) => FeatureValue::Category(rng.gen_range(0..values.len())),
                FeatureDomain::Numeric => FeatureValue::Real(rng.gen_range(-5..=105) as f64),
            })
            .collect(),
    )
}

pub fn random_svector<R: Rng>(rng: &mut R, m: usize) -> SVector {
    SVector((0..m).map(|_| rng.gen_bool(0.5)).collect())
}

/// `rules` random rules over `n` boolean features, each with 1 to
/// `max_len` literals on distinct features, followed by a random default.
pub fn random_dl<R: Rng>(rng: &mut R, n: usize, rules: usize, max_len: usize) -> DecisionList {
    let mut out = Vec::with_capacity(rules + 1);
    let vars: Vec<i64> = (1..=n as i64).collect();
    if n > 0 {
        for _ in 0..rules {
            let len = rng.gen_range(1..=max_len.clamp(1, n));
            let literals = vars
                .choose_multiple(rng, len)
                .map(|&v| if rng.gen_bool(0.5) { v } else { -v })
                .collect();
            out.push(Rule {
                literals,
                class: rng.gen_range(0..2),
            });
        }
    }
    out.push(Rule {
        literals: Vec::new(),
        class: rng.gen_range(0..2),
    });
    DecisionList::new(n, out).expect("generated decision lists are well formed")
}
