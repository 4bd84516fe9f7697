//! Finite unions of real intervals, used as literals on numeric features.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    /// Infinite endpoints are always treated as open.
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_open: lo_open || lo.is_infinite(),
            hi_open: hi_open || hi.is_infinite(),
        }
    }

    pub fn all() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY, true, true)
    }

    /// `(-inf, x)`
    pub fn below(x: f64) -> Self {
        Interval::new(f64::NEG_INFINITY, x, true, true)
    }

    /// `[x, +inf)`
    pub fn at_least(x: f64) -> Self {
        Interval::new(x, f64::INFINITY, false, true)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, false)
    }

    pub fn point(x: f64) -> Self {
        Interval::closed(x, x)
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan()
            || self.hi.is_nan()
            || self.lo > self.hi
            || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = match self.lo.partial_cmp(&other.lo) {
            Some(Ordering::Greater) => (self.lo, self.lo_open),
            Some(Ordering::Less) => (other.lo, other.lo_open),
            _ => (self.lo, self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Less) => (self.hi, self.hi_open),
            Some(Ordering::Greater) => (other.hi, other.hi_open),
            _ => (self.hi, self.hi_open || other.hi_open),
        };
        Interval::new(lo, hi, lo_open, hi_open)
    }

    /// Lower endpoint ordering: `[a` sorts before `(a`.
    fn cmp_lo(&self, other: &Interval) -> Ordering {
        self.lo
            .total_cmp(&other.lo)
            .then(self.lo_open.cmp(&other.lo_open))
    }

    /// Whether `next` (with `next.lo >= self.lo`) overlaps or touches `self`
    /// so that their union is a single interval.
    fn joins(&self, next: &Interval) -> bool {
        next.lo < self.hi || (next.lo == self.hi && !(self.hi_open && next.lo_open))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        let close = if self.hi_open { ')' } else { ']' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

/// A normalized union of intervals: sorted, non-empty members, pairwise
/// disjoint and never touching in a mergeable way.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        IntervalSet {
            parts: vec![Interval::all()],
        }
    }

    pub fn new(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|i| !i.is_empty()).collect();
        parts.sort_by(Interval::cmp_lo);
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for part in parts {
            match merged.last_mut() {
                Some(last) if last.joins(&part) => {
                    if part.hi > last.hi || (part.hi == last.hi && !part.hi_open) {
                        last.hi = part.hi;
                        last.hi_open = part.hi_open;
                    }
                }
                _ => merged.push(part),
            }
        }
        IntervalSet { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.parts == [Interval::all()]
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::new(self.parts.iter().chain(&other.parts).copied())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        IntervalSet::new(out)
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut lo = f64::NEG_INFINITY;
        let mut lo_open = true;
        for p in &self.parts {
            out.push(Interval::new(lo, p.lo, lo_open, !p.lo_open));
            lo = p.hi;
            lo_open = !p.hi_open;
        }
        out.push(Interval::new(lo, f64::INFINITY, lo_open, true));
        IntervalSet::new(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Finite endpoints, in ascending order with duplicates.
    pub fn endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.parts
            .iter()
            .flat_map(|p| [p.lo, p.hi])
            .filter(|x| x.is_finite())
    }
}

impl Eq for IntervalSet {}

impl Hash for IntervalSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for p in &self.parts {
            p.lo.to_bits().hash(state);
            p.hi.to_bits().hash(state);
            p.lo_open.hash(state);
            p.hi_open.hash(state);
        }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
