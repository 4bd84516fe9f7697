//! Enumeration of all explanations, tree-specific CXp listing, and
//! feature-membership queries.
//!
//! [`XpEnumerator`] runs a MARCO-style loop over the clause database `H`:
//! each oracle model splits the selector variables into fixed and free.
//! If the free part cannot reach a 0-terminal the fixed part is shrunk to a
//! new AXp and blocked with a negative clause; otherwise the free part is
//! shrunk to a new CXp which every later model must hit (positive clause).
//! Each explanation costs exactly one oracle call, plus one final call that
//! reports unsatisfiability.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::explain::{find_axp, find_cxp, DeletionOrder, Explanation, XpKind};
use crate::features::FeatureSet;
use crate::satoracle::{Clause, ClauseDb, Oracle, Polarity};
use crate::xpg::Xpg;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("tree XpG required")]
    NotATree,
}

#[derive(Clone, Debug, Default)]
pub struct EnumerationConfig {
    pub hint: Polarity,
    pub order: DeletionOrder,
    /// Stop after this many explanations.
    pub limit: Option<usize>,
    /// Stop before the next oracle call once this much time has passed.
    pub budget: Option<Duration>,
}

/// One emitted explanation and the time spent producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XpRecord {
    pub explanation: Explanation,
    pub elapsed: Duration,
}

pub struct XpEnumerator<'a, O: Oracle = ClauseDb> {
    x: &'a Xpg,
    oracle: O,
    config: EnumerationConfig,
    order: Vec<usize>,
    started: Instant,
    last: Instant,
    emitted: usize,
    solve_calls: usize,
    exhausted: bool,
    truncated: bool,
}

impl<'a> XpEnumerator<'a, ClauseDb> {
    pub fn new(x: &'a Xpg, config: EnumerationConfig) -> Self {
        Self::with_oracle(x, ClauseDb::new(x.num_vars()), config)
    }
}

impl<'a, O: Oracle> XpEnumerator<'a, O> {
    /// Panics if `config.order` is not a permutation of the features.
    pub fn with_oracle(x: &'a Xpg, oracle: O, config: EnumerationConfig) -> Self {
        assert_eq!(oracle.num_vars(), x.num_vars(), "oracle variable count");
        let order = config
            .order
            .sequence(x.num_vars())
            .expect("deletion order must be a permutation of the features");
        let now = Instant::now();
        XpEnumerator {
            x,
            oracle,
            config: EnumerationConfig {
                order: DeletionOrder::Permutation(order.clone()),
                ..config
            },
            order,
            started: now,
            last: now,
            emitted: 0,
            solve_calls: 0,
            exhausted: false,
            truncated: false,
        }
    }

    pub fn solve_calls(&self) -> usize {
        self.solve_calls
    }

    /// The oracle reported unsatisfiability: every XP has been emitted.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Stopped early by the limit or the time budget.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    /// Total time since the enumerator was created.
    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }
}

impl<O: Oracle> Iterator for XpEnumerator<'_, O> {
    type Item = XpRecord;

    fn next(&mut self) -> Option<XpRecord> {
        if self.exhausted || self.truncated {
            return None;
        }
        if self.config.limit.is_some_and(|l| self.emitted >= l)
            || self
                .config
                .budget
                .is_some_and(|b| self.started.elapsed() >= b)
        {
            self.truncated = true;
            return None;
        }
        self.solve_calls += 1;
        let Some(model) = self.oracle.solve(self.config.hint) else {
            self.exhausted = true;
            return None;
        };
        let order = DeletionOrder::Permutation(self.order.clone());
        let free = model.free();
        let explanation = if !self.x.reach_zero(&free) {
            let axp = find_axp(self.x, &model.fixed(), &order)
                .expect("fixed part of the model is sufficient");
            self.oracle.add_clause(Clause::negative(axp.features.clone()));
            axp
        } else {
            let cxp = find_cxp(self.x, &free, &order)
                .expect("free part of the model reaches a 0-terminal");
            self.oracle.add_clause(Clause::positive(cxp.features.clone()));
            cxp
        };
        self.emitted += 1;
        let now = Instant::now();
        let elapsed = now - self.last;
        self.last = now;
        Some(XpRecord {
            explanation,
            elapsed,
        })
    }
}

/// Result of a full enumeration run.
#[derive(Clone, Debug, Default)]
pub struct Enumeration {
    pub records: Vec<XpRecord>,
    pub solve_calls: usize,
    pub complete: bool,
    pub elapsed: Duration,
}

impl Enumeration {
    pub fn of_kind(&self, kind: XpKind) -> impl Iterator<Item = &FeatureSet> {
        self.records
            .iter()
            .filter(move |r| r.explanation.kind == kind)
            .map(|r| &r.explanation.features)
    }

    /// AXps in lexicographic order.
    pub fn axps(&self) -> Vec<FeatureSet> {
        let mut v: Vec<FeatureSet> = self.of_kind(XpKind::AXp).cloned().collect();
        v.sort();
        v
    }

    /// CXps in lexicographic order.
    pub fn cxps(&self) -> Vec<FeatureSet> {
        let mut v: Vec<FeatureSet> = self.of_kind(XpKind::CXp).cloned().collect();
        v.sort();
        v
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn enumerate_with(x: &Xpg, config: EnumerationConfig) -> Enumeration {
    let mut it = XpEnumerator::new(x, config);
    let records: Vec<XpRecord> = it.by_ref().collect();
    Enumeration {
        records,
        solve_calls: it.solve_calls(),
        complete: it.is_exhausted(),
        elapsed: it.elapsed(),
    }
}

/// Every AXp and CXp of `x`.
pub fn enumerate_xps(x: &Xpg) -> Enumeration {
    enumerate_with(x, EnumerationConfig::default())
}

/// All CXps of a tree XpG, in lexicographic order.
///
/// Each path to a 0-terminal yields the candidate set of variables on its
/// 0-edges; candidates that strictly contain another are dropped.
pub fn enumerate_tree_cxps(x: &Xpg) -> Result<Vec<FeatureSet>, EnumerateError> {
    if !x.is_tree() {
        return Err(EnumerateError::NotATree);
    }
    let mut counts = vec![0u32; x.num_vars()];
    let mut current = FeatureSet::new();
    let mut candidates: HashSet<FeatureSet> = HashSet::new();

    // (node, var on the edge into it if that edge is labeled 0)
    enum Step {
        Enter(usize, Option<usize>),
        Leave(Option<usize>),
    }
    let mut stack = vec![Step::Enter(x.root(), None)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(p, via) => {
                if let Some(var) = via {
                    counts[var] += 1;
                    if counts[var] == 1 {
                        current.insert(var);
                    }
                }
                stack.push(Step::Leave(via));
                match x.nodes()[p] {
                    crate::xpg::XNode::Terminal(false) => {
                        debug_assert!(!current.is_empty(), "0-terminal on the all-ones path");
                        if !candidates.contains(&current) {
                            candidates.insert(current.clone());
                        }
                    }
                    crate::xpg::XNode::Terminal(true) => {}
                    crate::xpg::XNode::Decision(var) => {
                        for &(r, one) in x.children(p) {
                            stack.push(Step::Enter(r, (!one).then_some(var)));
                        }
                    }
                }
            }
            Step::Leave(via) => {
                if let Some(var) = via {
                    counts[var] -= 1;
                    if counts[var] == 0 {
                        current.remove(var);
                    }
                }
            }
        }
    }
    Ok(minimal_sets(candidates.into_iter().collect()))
}

/// Inclusion-minimal members of `sets`, deduplicated, in lexicographic order.
pub fn minimal_sets(mut sets: Vec<FeatureSet>) -> Vec<FeatureSet> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut kept: Vec<FeatureSet> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

/// Which kind of explanation a membership query asks about.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MembershipKind {
    AXp,
    CXp,
    #[default]
    Either,
}

/// Whether feature `i` occurs in some explanation.
///
/// AXp and CXp membership always agree (a feature is in some AXp iff it is
/// in some CXp), so all three query kinds share one answer. Tree XpGs are
/// answered in polynomial time from the full CXp list; general XpGs stream
/// the enumeration and stop at the first explanation containing `i`, which
/// may take exponentially many oracle calls in the worst case.
pub fn membership(x: &Xpg, i: usize, _kind: MembershipKind) -> bool {
    if i >= x.num_vars() || !x.used_vars().contains(i) {
        return false;
    }
    if let Ok(cxps) = enumerate_tree_cxps(x) {
        return cxps.iter().any(|c| c.contains(i));
    }
    XpEnumerator::new(x, EnumerationConfig::default())
        .any(|r| r.explanation.features.contains(i))
}

fn is_minimal_hitting_set(h: &FeatureSet, family: &[FeatureSet]) -> bool {
    if !family.iter().all(|s| s.intersects(h)) {
        return false;
    }
    h.iter().all(|e| {
        let mut smaller = h.clone();
        smaller.remove(e);
        family.iter().any(|s| !s.intersects(&smaller))
    })
}

/// Every AXp is a minimal hitting set of the CXps, and every CXp a minimal
/// hitting set of the AXps.
pub fn check_duality(axps: &[FeatureSet], cxps: &[FeatureSet]) -> bool {
    axps.iter().all(|a| is_minimal_hitting_set(a, cxps))
        && cxps.iter().all(|c| is_minimal_hitting_set(c, axps))
}

pub fn union_of(sets: &[FeatureSet]) -> FeatureSet {
    sets.iter().fold(FeatureSet::new(), |acc, s| acc.union(s))
}
