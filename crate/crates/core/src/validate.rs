//! Structural and semantic checks on decision graphs.
//!
//! Beyond the shape rules (acyclic, decision nodes have successors, literals
//! non-empty and pairwise disjoint among siblings) two assumptions are
//! checked: the outgoing literals of each decision node cover every value of
//! its feature that is consistent with some path reaching it, and no
//! root-to-terminal path is inconsistent.
//!
//! Both are decided by forward propagation of *path states*: the value sets
//! each feature is still restricted to along a path. States are projected onto
//! the features tested at or below the node they reach, so read-once diagrams
//! carry a single state per node and trees carry at most one per path. The
//! check is exact unless the state budget runs out, in which case a warning
//! is issued.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::features::FeatureSet;
use crate::interval::IntervalSet;
use crate::model::{Admit, DecisionGraph, FeatureDomain, NodeKind};

const STATE_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IssueKind {
    Cycle,
    NoOutgoingEdges,
    EmptyLiteral,
    OverlappingLiterals,
    IncompleteCoverage,
    InconsistentPath,
    Uncertified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.errors.iter().any(|i| i.kind == kind)
    }

    fn error(&mut self, kind: IssueKind, message: String) {
        self.errors.push(Issue { kind, message });
    }
}

/// Kahn order over all nodes; `None` if the graph has a cycle.
pub fn topological_order(dg: &DecisionGraph) -> Option<Vec<usize>> {
    let n = dg.nodes().len();
    let mut indeg: Vec<usize> = (0..n).map(|i| dg.indegree(i)).collect();
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    while let Some(p) = stack.pop() {
        order.push(p);
        for &e in dg.out_edges(p) {
            let r = dg.edges()[e].to;
            indeg[r] -= 1;
            if indeg[r] == 0 {
                stack.push(r);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ValueSet {
    Finite(FeatureSet),
    Real(IntervalSet),
}

impl ValueSet {
    fn full(domain: &FeatureDomain) -> Self {
        match domain {
            FeatureDomain::Finite(values) => ValueSet::Finite(FeatureSet::full(values.len())),
            FeatureDomain::Numeric => ValueSet::Real(IntervalSet::all()),
        }
    }

    fn of(admit: &Admit) -> Self {
        match admit {
            Admit::Values(v) => ValueSet::Finite(v.iter().copied().collect()),
            Admit::Intervals(s) => ValueSet::Real(s.clone()),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            ValueSet::Finite(s) => s.is_empty(),
            ValueSet::Real(s) => s.is_empty(),
        }
    }

    fn intersect(&self, other: &ValueSet) -> ValueSet {
        match (self, other) {
            (ValueSet::Finite(a), ValueSet::Finite(b)) => ValueSet::Finite(a.intersection(b)),
            (ValueSet::Real(a), ValueSet::Real(b)) => ValueSet::Real(a.intersect(b)),
            _ => unreachable!("literal kinds match feature domains"),
        }
    }

    fn union(&self, other: &ValueSet) -> ValueSet {
        match (self, other) {
            (ValueSet::Finite(a), ValueSet::Finite(b)) => ValueSet::Finite(a.union(b)),
            (ValueSet::Real(a), ValueSet::Real(b)) => ValueSet::Real(a.union(b)),
            _ => unreachable!("literal kinds match feature domains"),
        }
    }

    fn difference(&self, other: &ValueSet) -> ValueSet {
        match (self, other) {
            (ValueSet::Finite(a), ValueSet::Finite(b)) => ValueSet::Finite(a.difference(b)),
            (ValueSet::Real(a), ValueSet::Real(b)) => ValueSet::Real(a.difference(b)),
            _ => unreachable!("literal kinds match feature domains"),
        }
    }

    fn render(&self, domain: &FeatureDomain) -> String {
        match (self, domain) {
            (ValueSet::Finite(s), FeatureDomain::Finite(values)) => {
                let items: Vec<String> = s.iter().map(|k| values[k].to_string()).collect();
                format!("{{{}}}", items.join(", "))
            }
            (ValueSet::Real(s), _) => s.to_string(),
            _ => String::from("?"),
        }
    }
}

/// Restricted features only; a missing key means the full domain.
type PathState = BTreeMap<usize, ValueSet>;

pub fn validate(dg: &DecisionGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let name = |i: usize| dg.nodes()[i].id.to_string();

    let Some(order) = topological_order(dg) else {
        report.error(IssueKind::Cycle, "cycle: the graph is not acyclic".into());
        return report;
    };

    for (p, node) in dg.nodes().iter().enumerate() {
        if let NodeKind::Decision(_) = node.kind {
            let out = dg.out_edges(p);
            if out.is_empty() {
                report.error(
                    IssueKind::NoOutgoingEdges,
                    format!("non-terminal node {} has no outgoing edges", name(p)),
                );
            }
            for (k, &a) in out.iter().enumerate() {
                let ea = &dg.edges()[a];
                if ea.literal.admit.is_empty() {
                    report.error(
                        IssueKind::EmptyLiteral,
                        format!("empty literal on edge {}->{}", name(p), name(ea.to)),
                    );
                }
                for &b in &out[k + 1..] {
                    let eb = &dg.edges()[b];
                    if ea.literal.admit.overlaps(&eb.literal.admit) {
                        report.error(
                            IssueKind::OverlappingLiterals,
                            format!(
                                "overlapping literals at node {} (edges to {} and {})",
                                name(p),
                                name(ea.to),
                                name(eb.to)
                            ),
                        );
                    }
                }
            }
        }
    }

    check_paths(dg, &order, &mut report);
    report
}

fn check_paths(dg: &DecisionGraph, order: &[usize], report: &mut ValidationReport) {
    let n = dg.nodes().len();
    let features = dg.features();
    let name = |i: usize| dg.nodes()[i].id.to_string();

    let mut tested_below = vec![FeatureSet::new(); n];
    for &p in order.iter().rev() {
        if let NodeKind::Decision(i) = dg.nodes()[p].kind {
            let mut below = FeatureSet::singleton(i);
            for &e in dg.out_edges(p) {
                below = below.union(&tested_below[dg.edges()[e].to]);
            }
            tested_below[p] = below;
        }
    }

    let mut states: Vec<HashSet<PathState>> = vec![HashSet::new(); n];
    states[dg.root()].insert(PathState::new());
    let mut live = 1usize;
    let mut uncovered_reported = vec![false; n];
    let mut inconsistent_reported = vec![false; dg.edges().len()];

    for &p in order {
        let here = std::mem::take(&mut states[p]);
        live = live.saturating_sub(here.len());
        let NodeKind::Decision(i) = dg.nodes()[p].kind else {
            continue;
        };
        let full = ValueSet::full(&features[i].domain);
        let admits: Vec<(usize, ValueSet)> = dg
            .out_edges(p)
            .iter()
            .map(|&e| (e, ValueSet::of(&dg.edges()[e].literal.admit)))
            .collect();
        let covered = admits
            .iter()
            .fold(None::<ValueSet>, |acc, (_, a)| {
                Some(acc.map_or_else(|| a.clone(), |u| u.union(a)))
            });

        for state in &here {
            let consistent = state.get(&i).unwrap_or(&full);
            let missing = match &covered {
                Some(c) => consistent.difference(c),
                None => consistent.clone(),
            };
            if !missing.is_empty() && !uncovered_reported[p] && !admits.is_empty() {
                uncovered_reported[p] = true;
                report.error(
                    IssueKind::IncompleteCoverage,
                    format!(
                        "incomplete coverage at node {}: {} = {} is admitted by no outgoing edge",
                        name(p),
                        features[i].name,
                        missing.render(&features[i].domain)
                    ),
                );
            }
            for (e, admit) in &admits {
                let r = dg.edges()[*e].to;
                let narrowed = consistent.intersect(admit);
                if narrowed.is_empty() {
                    if !inconsistent_reported[*e] {
                        inconsistent_reported[*e] = true;
                        report.error(
                            IssueKind::InconsistentPath,
                            format!(
                                "inconsistent path: edge {}->{} requires {} ∈ {} but the path already restricts it to {}",
                                name(p),
                                name(r),
                                features[i].name,
                                admit.render(&features[i].domain),
                                consistent.render(&features[i].domain)
                            ),
                        );
                    }
                    continue;
                }
                let mut next: PathState = state
                    .iter()
                    .filter(|(f, _)| tested_below[r].contains(**f))
                    .map(|(f, s)| (*f, s.clone()))
                    .collect();
                if tested_below[r].contains(i) {
                    if narrowed == full {
                        next.remove(&i);
                    } else {
                        next.insert(i, narrowed);
                    }
                }
                if states[r].insert(next) {
                    live += 1;
                }
                if live > STATE_BUDGET {
                    report.warnings.push(Issue {
                        kind: IssueKind::Uncertified,
                        message: format!(
                            "path-consistency check stopped after {STATE_BUDGET} distinct path states; \
                             coverage and consistency below node {} are not certified",
                            name(p)
                        ),
                    });
                    return;
                }
            }
        }
    }
}
