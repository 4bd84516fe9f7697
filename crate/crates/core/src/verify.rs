//! Brute-force reference checks straight from the definitions of abductive
//! and contrastive explanations, evaluated on the decision graph itself (no
//! explanation graph involved).
//!
//! Numeric features are swept over [`DecisionGraph::representative_points`].

use thiserror::Error;

use crate::features::FeatureSet;
use crate::model::{DecisionGraph, FeatureValue, Instance, ModelError};

pub const DEFAULT_POINT_CAP: u64 = 10_000_000;
pub const DEFAULT_FEATURE_CAP: usize = 16;
pub const CAP_ENV: &str = "XPG_BRUTE_FORCE_CAP";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("instance too large for brute force: {points} points exceed the cap of {cap}")]
    TooManyPoints { points: u128, cap: u64 },
    #[error("instance too large for brute force: {m} features exceed the cap of {cap}")]
    TooManyFeatures { m: usize, cap: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_points: u64,
    pub max_features: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_points: DEFAULT_POINT_CAP,
            max_features: DEFAULT_FEATURE_CAP,
        }
    }
}

impl Caps {
    /// Reads `XPG_BRUTE_FORCE_CAP` as `POINTS` or `POINTS:FEATURES`; unset or
    /// unparsable parts keep their defaults.
    pub fn from_env() -> Self {
        std::env::var(CAP_ENV)
            .map(|s| Caps::parse(&s))
            .unwrap_or_default()
    }

    pub fn parse(text: &str) -> Self {
        let mut caps = Caps::default();
        let mut parts = text.split(':');
        if let Some(p) = parts.next().and_then(|p| p.trim().parse().ok()) {
            caps.max_points = p;
        }
        if let Some(f) = parts.next().and_then(|f| f.trim().parse().ok()) {
            caps.max_features = f;
        }
        caps
    }
}

/// Sweeps the representative point grid of one `(dg, v)` pair.
pub struct BruteForce<'a> {
    dg: &'a DecisionGraph,
    v: &'a Instance,
    class: usize,
    reps: Vec<Vec<FeatureValue>>,
    caps: Caps,
}

impl<'a> BruteForce<'a> {
    pub fn new(dg: &'a DecisionGraph, v: &'a Instance) -> Result<Self, VerifyError> {
        Self::with_caps(dg, v, Caps::from_env())
    }

    pub fn with_caps(dg: &'a DecisionGraph, v: &'a Instance, caps: Caps) -> Result<Self, VerifyError> {
        v.check(dg)?;
        let class = dg.classify(v)?;
        Ok(BruteForce {
            dg,
            v,
            class,
            reps: dg.representative_points(),
            caps,
        })
    }

    pub fn class(&self) -> usize {
        self.class
    }

    fn grid_size(&self, free: &FeatureSet) -> u128 {
        free.iter().map(|i| self.reps[i].len() as u128).product()
    }

    /// Whether some point agreeing with `v` outside `free` is classified
    /// differently from `v`.
    fn exists_other_class(&self, free: &FeatureSet) -> Result<bool, VerifyError> {
        let points = self.grid_size(free);
        if points > self.caps.max_points as u128 {
            return Err(VerifyError::TooManyPoints {
                points,
                cap: self.caps.max_points,
            });
        }
        let axes: Vec<usize> = free.iter().collect();
        let mut digits = vec![0usize; axes.len()];
        let mut point = self.v.clone();
        loop {
            for (k, &i) in axes.iter().enumerate() {
                point.values[i] = self.reps[i][digits[k]];
            }
            if self.dg.classify(&point)? != self.class {
                return Ok(true);
            }
            // odometer increment
            let mut k = 0;
            loop {
                if k == axes.len() {
                    return Ok(false);
                }
                digits[k] += 1;
                if digits[k] < self.reps[axes[k]].len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    /// Fixing the features in `fixed` to their values in `v` forces the
    /// prediction of `v`.
    pub fn is_sufficient(&self, fixed: &FeatureSet) -> Result<bool, VerifyError> {
        let free = fixed.complement(self.dg.num_features());
        Ok(!self.exists_other_class(&free)?)
    }

    /// Letting the features in `free` vary (all others fixed to `v`) can
    /// change the prediction.
    pub fn can_change(&self, free: &FeatureSet) -> Result<bool, VerifyError> {
        self.exists_other_class(free)
    }

    fn check_caps(&self) -> Result<(), VerifyError> {
        let m = self.dg.num_features();
        if m > self.caps.max_features {
            return Err(VerifyError::TooManyFeatures {
                m,
                cap: self.caps.max_features,
            });
        }
        let points = self.grid_size(&FeatureSet::full(m));
        if points > self.caps.max_points as u128 {
            return Err(VerifyError::TooManyPoints {
                points,
                cap: self.caps.max_points,
            });
        }
        Ok(())
    }

    /// Subset-minimal sets satisfying a monotone predicate, by a sweep of the
    /// subset lattice in order of increasing cardinality. Supersets of sets
    /// already found are skipped without evaluating the predicate.
    fn minimal_sets(
        &self,
        pred: impl Fn(&FeatureSet) -> Result<bool, VerifyError>,
    ) -> Result<Vec<FeatureSet>, VerifyError> {
        self.check_caps()?;
        let m = self.dg.num_features();
        let mut masks: Vec<u32> = (0..1u32 << m).collect();
        masks.sort_by_key(|s| (s.count_ones(), *s));
        let mut found: Vec<u32> = Vec::new();
        for s in masks {
            if found.iter().any(|&f| f & !s == 0) {
                continue;
            }
            let set: FeatureSet = (0..m).filter(|i| s >> i & 1 == 1).collect();
            if pred(&set)? {
                found.push(s);
            }
        }
        let mut out: Vec<FeatureSet> = found
            .into_iter()
            .map(|s| (0..m).filter(|i| s >> i & 1 == 1).collect())
            .collect();
        out.sort();
        Ok(out)
    }

    /// All AXps, in lexicographic order.
    pub fn axps(&self) -> Result<Vec<FeatureSet>, VerifyError> {
        self.minimal_sets(|x| self.is_sufficient(x))
    }

    /// All CXps, in lexicographic order.
    pub fn cxps(&self) -> Result<Vec<FeatureSet>, VerifyError> {
        self.minimal_sets(|y| self.can_change(y))
    }
}

pub fn is_sufficient(dg: &DecisionGraph, v: &Instance, fixed: &FeatureSet) -> Result<bool, VerifyError> {
    BruteForce::new(dg, v)?.is_sufficient(fixed)
}

pub fn can_change(dg: &DecisionGraph, v: &Instance, free: &FeatureSet) -> Result<bool, VerifyError> {
    BruteForce::new(dg, v)?.can_change(free)
}

pub fn brute_force_axps(dg: &DecisionGraph, v: &Instance) -> Result<Vec<FeatureSet>, VerifyError> {
    BruteForce::new(dg, v)?.axps()
}

pub fn brute_force_cxps(dg: &DecisionGraph, v: &Instance) -> Result<Vec<FeatureSet>, VerifyError> {
    BruteForce::new(dg, v)?.cxps()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Atom;

    fn hardware() -> (DecisionGraph, Instance) {
        let dt = fixtures::hardware_tree();
        let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
        (dt, v)
    }

    #[test]
    fn hardware_sufficiency() {
        let (dt, v) = hardware();
        let bf = BruteForce::with_caps(&dt, &v, Caps::default()).unwrap();
        assert!(bf.is_sufficient(&FeatureSet::from([0, 3])).unwrap());
        assert!(bf.is_sufficient(&FeatureSet::full(4)).unwrap());
        assert!(!bf.is_sufficient(&FeatureSet::from([0])).unwrap());
        assert!(bf.can_change(&FeatureSet::from([3])).unwrap());
        assert!(!bf.can_change(&FeatureSet::new()).unwrap());
    }

    #[test]
    fn hardware_sets() {
        let (dt, v) = hardware();
        let bf = BruteForce::with_caps(&dt, &v, Caps::default()).unwrap();
        assert_eq!(bf.axps().unwrap(), vec![FeatureSet::from([0, 3])]);
        assert_eq!(bf.cxps().unwrap(), vec![FeatureSet::from([0]), FeatureSet::from([3])]);
    }

    #[test]
    fn rgb_sets() {
        let mdd = fixtures::rgb_omdd();
        let v = Instance::parse(&mdd, &["0", "1", "2"]).unwrap();
        let bf = BruteForce::with_caps(&mdd, &v, Caps::default()).unwrap();
        assert!(!bf.can_change(&FeatureSet::from([1])).unwrap());
        assert_eq!(bf.axps().unwrap(), vec![FeatureSet::from([0])]);
        assert_eq!(bf.cxps().unwrap(), vec![FeatureSet::from([0])]);
    }

    #[test]
    fn constant_model() {
        let dg = fixtures::constant(2, Atom::from("c"));
        let v = Instance::parse(&dg, &["0", "0"]).unwrap();
        let bf = BruteForce::with_caps(&dg, &v, Caps::default()).unwrap();
        assert_eq!(bf.axps().unwrap(), vec![FeatureSet::new()]);
        assert!(bf.cxps().unwrap().is_empty());
    }

    #[test]
    fn caps_enforced() {
        let (dt, v) = hardware();
        let tiny = Caps { max_points: 10, max_features: 16 };
        let bf = BruteForce::with_caps(&dt, &v, tiny).unwrap();
        assert!(matches!(bf.axps(), Err(VerifyError::TooManyPoints { points: 54, .. })));
        assert!(bf.is_sufficient(&FeatureSet::from([0, 1])).is_ok());
        let few = Caps { max_points: 1000, max_features: 3 };
        let bf = BruteForce::with_caps(&dt, &v, few).unwrap();
        assert!(matches!(bf.cxps(), Err(VerifyError::TooManyFeatures { m: 4, cap: 3 })));
    }

    #[test]
    fn cap_parsing() {
        assert_eq!(Caps::parse("500"), Caps { max_points: 500, max_features: 16 });
        assert_eq!(Caps::parse("500:8"), Caps { max_points: 500, max_features: 8 });
        assert_eq!(Caps::parse("junk"), Caps::default());
    }

    #[test]
    fn numeric_stump() {
        let dg = fixtures::threshold_stump(5.0);
        let v = Instance::new(vec![FeatureValue::Real(7.5)]);
        let bf = BruteForce::with_caps(&dg, &v, Caps::default()).unwrap();
        assert_eq!(bf.axps().unwrap(), vec![FeatureSet::from([0])]);
        assert_eq!(bf.cxps().unwrap(), vec![FeatureSet::from([0])]);
    }
}
