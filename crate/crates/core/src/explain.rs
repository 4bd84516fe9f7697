//! Deletion-based extraction of one abductive or one contrastive explanation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::FeatureSet;
use crate::xpg::Xpg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum XpKind {
    /// Abductive: fixing these features guarantees the prediction.
    AXp,
    /// Contrastive: freeing these features can change the prediction.
    CXp,
}

impl fmt::Display for XpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XpKind::AXp => f.write_str("AXp"),
            XpKind::CXp => f.write_str("CXp"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Explanation {
    pub kind: XpKind,
    pub features: FeatureSet,
}

impl Explanation {
    pub fn axp(features: FeatureSet) -> Self {
        Explanation { kind: XpKind::AXp, features }
    }

    pub fn cxp(features: FeatureSet) -> Self {
        Explanation { kind: XpKind::CXp, features }
    }

    /// Re-checks sufficiency (or the ability to change the prediction) and
    /// subset-minimality directly on `x`.
    pub fn is_valid_for(&self, x: &Xpg) -> bool {
        let m = x.num_vars();
        match self.kind {
            XpKind::AXp => {
                let free = self.features.complement(m);
                !x.reach_zero(&free)
                    && self.features.iter().all(|i| {
                        let mut f = free.clone();
                        f.insert(i);
                        x.reach_zero(&f)
                    })
            }
            XpKind::CXp => {
                x.reach_zero(&self.features)
                    && self.features.iter().all(|j| {
                        let mut f = self.features.clone();
                        f.remove(j);
                        !x.reach_zero(&f)
                    })
            }
        }
    }
}

/// The order in which seed members are tried for deletion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum DeletionOrder {
    #[default]
    Ascending,
    Descending,
    /// An explicit permutation of `0..m`.
    Permutation(Vec<usize>),
}

impl DeletionOrder {
    pub fn sequence(&self, m: usize) -> Result<Vec<usize>, ExplainError> {
        match self {
            DeletionOrder::Ascending => Ok((0..m).collect()),
            DeletionOrder::Descending => Ok((0..m).rev().collect()),
            DeletionOrder::Permutation(p) => {
                let mut seen = vec![false; m];
                for &i in p {
                    if i >= m || std::mem::replace(&mut seen[i], true) {
                        return Err(ExplainError::BadOrder(p.clone()));
                    }
                }
                if p.len() != m {
                    return Err(ExplainError::BadOrder(p.clone()));
                }
                Ok(p.clone())
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExplainError {
    #[error("seed is not an implicant: freeing its complement can change the prediction")]
    SeedNotImplicant,
    #[error("seed cannot change prediction")]
    SeedCannotChange,
    #[error("deletion order {0:?} is not a permutation of the features")]
    BadOrder(Vec<usize>),
}

/// Shrinks a sufficient set of fixed features `seed` to a subset-minimal one.
///
/// Features outside the seed stay free throughout.
pub fn find_axp(
    x: &Xpg,
    seed: &FeatureSet,
    order: &DeletionOrder,
) -> Result<Explanation, ExplainError> {
    let m = x.num_vars();
    let mut free: Vec<bool> = seed.to_mask(m).into_iter().map(|b| !b).collect();
    if x.reach_zero_mask(&free) {
        return Err(ExplainError::SeedNotImplicant);
    }
    for i in order.sequence(m)? {
        if free[i] {
            continue;
        }
        free[i] = true;
        if x.reach_zero_mask(&free) {
            free[i] = false;
        }
    }
    Ok(Explanation::axp(
        (0..m).filter(|&i| !free[i]).collect(),
    ))
}

/// Shrinks a set of free features `seed` that can change the prediction to a
/// subset-minimal one.
///
/// Features outside the seed stay fixed throughout.
pub fn find_cxp(
    x: &Xpg,
    seed: &FeatureSet,
    order: &DeletionOrder,
) -> Result<Explanation, ExplainError> {
    let m = x.num_vars();
    let mut free = seed.to_mask(m);
    if !x.reach_zero_mask(&free) {
        return Err(ExplainError::SeedCannotChange);
    }
    for j in order.sequence(m)? {
        if !free[j] {
            continue;
        }
        free[j] = false;
        if !x.reach_zero_mask(&free) {
            free[j] = true;
        }
    }
    Ok(Explanation::cxp(FeatureSet::from_mask(&free)))
}

/// One AXp seeded with every feature.
pub fn one_axp(x: &Xpg) -> Explanation {
    find_axp(x, &FeatureSet::full(x.num_vars()), &DeletionOrder::Ascending)
        .expect("fixing every feature always preserves the prediction")
}

/// One CXp seeded with every feature, or `None` when no assignment to the
/// features can change the prediction.
pub fn one_cxp(x: &Xpg) -> Option<Explanation> {
    find_cxp(x, &FeatureSet::full(x.num_vars()), &DeletionOrder::Ascending).ok()
}
