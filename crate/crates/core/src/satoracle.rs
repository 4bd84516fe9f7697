//! A small incremental satisfiability oracle for sets of purely positive and
//! purely negative clauses over the selector variables.
//!
//! Conflict-driven clause learning with two watched literals, first-UIP
//! learning, activity-based branching and geometric restarts. Open
//! decisions take the polarity of the caller's hint.

use std::fmt::Write as _;

use crate::features::FeatureSet;
use crate::xpg::SVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `s_i ∨ s_j ∨ ...`
    Positive,
    /// `¬s_i ∨ ¬s_j ∨ ...`
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub sign: Sign,
    pub vars: FeatureSet,
}

impl Clause {
    pub fn positive(vars: FeatureSet) -> Self {
        Clause { sign: Sign::Positive, vars }
    }

    pub fn negative(vars: FeatureSet) -> Self {
        Clause { sign: Sign::Negative, vars }
    }

    pub fn satisfied_by(&self, model: &SVector) -> bool {
        let want = self.sign == Sign::Positive;
        self.vars.iter().any(|i| model.0[i] == want)
    }
}

/// Value given to decision variables that propagation leaves open.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Polarity {
    #[default]
    PreferOne,
    PreferZero,
}

/// Behaviour an enumeration needs from its oracle.
pub trait Oracle {
    fn num_vars(&self) -> usize;
    fn add_clause(&mut self, clause: Clause);
    /// A model of every clause added so far, or `None` if there is none.
    fn solve(&mut self, hint: Polarity) -> Option<SVector>;
}

/// Append-only clause database with a built-in CDCL search.
///
/// Learned clauses are kept across calls: they are implied by the original
/// clauses, which are never removed.
#[derive(Clone, Debug)]
pub struct ClauseDb {
    m: usize,
    clauses: Vec<Clause>,
    has_empty: bool,
    solve_calls: usize,
    learned: Vec<Vec<Lit>>,
    activity: Vec<f64>,
}

/// `2 * var + 1` for a positive literal, `2 * var` for a negative one.
type Lit = usize;

fn lit(var: usize, positive: bool) -> Lit {
    2 * var + usize::from(positive)
}

fn var_of(l: Lit) -> usize {
    l / 2
}

fn sign_of(l: Lit) -> bool {
    l % 2 == 1
}

const UNASSIGNED: u8 = 2;

/// Search state of one solve call.
struct Search<'a> {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    head: usize,
    activity: &'a mut Vec<f64>,
    bump: f64,
    num_original: usize,
}

impl Search<'_> {
    fn lit_value(&self, l: Lit) -> u8 {
        match self.value[var_of(l)] {
            UNASSIGNED => UNASSIGNED,
            v => u8::from((v == 1) == sign_of(l)),
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = var_of(l);
        self.value[v] = u8::from(sign_of(l));
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause of length at least 2 and watches its first two literals.
    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let idx = self.clauses.len();
        self.watches[c[0] ^ 1].push(idx);
        self.watches[c[1] ^ 1].push(idx);
        self.clauses.push(c);
        idx
    }

    /// Returns a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.head < self.trail.len() {
            let p = self.trail[self.head];
            self.head += 1;
            // clauses watching the literal that just became false
            let watching = std::mem::take(&mut self.watches[p]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = None;
            let false_lit = p ^ 1;
            let mut it = watching.into_iter();
            for ci in it.by_ref() {
                let c = &mut self.clauses[ci];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.lit_value(first) == 1 {
                    keep.push(ci);
                    continue;
                }
                let replacement = (2..self.clauses[ci].len())
                    .find(|&k| self.lit_value(self.clauses[ci][k]) != 0);
                match replacement {
                    Some(k) => {
                        self.clauses[ci].swap(1, k);
                        let w = self.clauses[ci][1] ^ 1;
                        self.watches[w].push(ci);
                    }
                    None => {
                        keep.push(ci);
                        if self.lit_value(first) == 0 {
                            conflict = Some(ci);
                            break;
                        }
                        self.enqueue(first, Some(ci));
                    }
                }
            }
            keep.extend(it);
            self.watches[p] = keep;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP analysis: the learned clause (asserting literal first) and
    /// the level to jump back to.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, usize) {
        let mut seen = vec![false; self.value.len()];
        let mut learnt = vec![0];
        let mut pending = 0;
        let mut clause = conflict;
        let mut idx = self.trail.len();
        let mut p: Option<Lit> = None;
        loop {
            for &q in &self.clauses[clause] {
                if Some(q) == p {
                    continue;
                }
                let v = var_of(q);
                if !seen[v] && self.level[v] > 0 {
                    seen[v] = true;
                    self.activity[v] += self.bump;
                    if self.level[v] == self.decision_level() {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if seen[var_of(self.trail[idx])] {
                    break;
                }
            }
            let l = self.trail[idx];
            seen[var_of(l)] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = l ^ 1;
                break;
            }
            p = Some(l);
            clause = self.reason[var_of(l)].expect("implied literals have reasons");
        }
        self.bump /= 0.95;
        if self.bump > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
        }
        let back = if learnt.len() == 1 {
            0
        } else {
            let (k, lvl) = (1..learnt.len())
                .map(|k| (k, self.level[var_of(learnt[k])]))
                .max_by_key(|&(_, l)| l)
                .expect("non-unit clause");
            learnt.swap(1, k);
            lvl
        };
        (learnt, back)
    }

    fn backtrack(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl];
        for l in self.trail.drain(lim..) {
            self.value[var_of(l)] = UNASSIGNED;
            self.reason[var_of(l)] = None;
        }
        self.trail_lim.truncate(lvl);
        self.head = self.trail.len();
    }

    fn pick(&self) -> Option<usize> {
        (0..self.value.len())
            .filter(|&v| self.value[v] == UNASSIGNED)
            .max_by(|&a, &b| self.activity[a].total_cmp(&self.activity[b]).then(b.cmp(&a)))
    }

    fn run(&mut self, preferred: bool) -> Option<Vec<bool>> {
        let mut conflicts = 0usize;
        let mut restart_at = 100usize;
        loop {
            if let Some(conflict) = self.propagate() {
                if self.decision_level() == 0 {
                    return None;
                }
                conflicts += 1;
                let (learnt, back) = self.analyze(conflict);
                self.backtrack(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let ci = self.attach(learnt);
                    self.enqueue(first, Some(ci));
                }
                continue;
            }
            if conflicts >= restart_at {
                conflicts = 0;
                restart_at += restart_at / 2;
                self.backtrack(0);
                continue;
            }
            match self.pick() {
                None => return Some(self.value.iter().map(|&v| v == 1).collect()),
                Some(v) => {
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(lit(v, preferred), None);
                }
            }
        }
    }

    fn learned(&self) -> impl Iterator<Item = &Vec<Lit>> {
        self.clauses[self.num_original..].iter()
    }
}

impl ClauseDb {
    pub fn new(m: usize) -> Self {
        ClauseDb {
            m,
            clauses: Vec::new(),
            has_empty: false,
            solve_calls: 0,
            learned: Vec::new(),
            activity: vec![0.0; m],
        }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of [`solve`](Oracle::solve) invocations so far.
    pub fn solve_calls(&self) -> usize {
        self.solve_calls
    }

    /// Set once an empty clause has been added; every later solve is UNSAT.
    pub fn is_trivially_unsat(&self) -> bool {
        self.has_empty
    }

    /// DIMACS CNF of the added clauses: variable `i` is written as `i+1`.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.m, self.clauses.len());
        for c in &self.clauses {
            for i in c.vars.iter() {
                let lit = i as i64 + 1;
                let lit = if c.sign == Sign::Positive { lit } else { -lit };
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    fn search(&mut self, hint: Polarity) -> Option<SVector> {
        let m = self.m;
        let mut activity = std::mem::take(&mut self.activity);
        let mut s = Search {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * m],
            value: vec![UNASSIGNED; m],
            level: vec![0; m],
            reason: vec![None; m],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            head: 0,
            activity: &mut activity,
            bump: 1.0,
            num_original: 0,
        };
        let mut units = Vec::new();
        let originals = self.clauses.iter().map(|c| {
            let positive = c.sign == Sign::Positive;
            c.vars.iter().map(|v| lit(v, positive)).collect::<Vec<_>>()
        });
        for c in originals.chain(self.learned.iter().cloned()) {
            match c.len() {
                0 => unreachable!("empty clauses are caught before searching"),
                1 => units.push(c[0]),
                _ => {
                    s.attach(c);
                }
            }
        }
        s.num_original = s.clauses.len();
        let mut result = None;
        let mut consistent = true;
        for u in units {
            match s.lit_value(u) {
                0 => {
                    consistent = false;
                    break;
                }
                1 => {}
                _ => s.enqueue(u, None),
            }
        }
        if consistent {
            result = s.run(hint == Polarity::PreferOne);
        }
        let new_learned: Vec<Vec<Lit>> = s.learned().cloned().collect();
        // learned units live on the level-0 trail
        let level0: Vec<Lit> = s
            .trail
            .iter()
            .copied()
            .filter(|&l| s.level[var_of(l)] == 0 && s.reason[var_of(l)].is_none())
            .collect();
        drop(s);
        self.activity = activity;
        self.learned.extend(new_learned);
        for l in level0 {
            if !self.learned.iter().any(|c| c.len() == 1 && c[0] == l) {
                self.learned.push(vec![l]);
            }
        }
        result.map(SVector)
    }
}

impl Oracle for ClauseDb {
    fn num_vars(&self) -> usize {
        self.m
    }

    fn add_clause(&mut self, clause: Clause) {
        assert!(
            clause.vars.bound() <= self.m,
            "clause mentions variable beyond m = {}",
            self.m
        );
        if clause.vars.is_empty() {
            self.has_empty = true;
        }
        self.clauses.push(clause);
    }

    fn solve(&mut self, hint: Polarity) -> Option<SVector> {
        self.solve_calls += 1;
        if self.has_empty {
            return None;
        }
        let model = self.search(hint);
        if let Some(s) = &model {
            debug_assert!(self.clauses.iter().all(|c| c.satisfied_by(s)));
        }
        model
    }
}
