//! Formal abductive (AXp) and contrastive (CXp) explanations for decision
//! trees and decision diagrams.
//!
//! A classifier is loaded as a [`DecisionGraph`], specialised to one
//! instance as an explanation graph ([`Xpg`]) and queried:
//!
//! ```
//! use xpg::{fixtures, find_axp, DeletionOrder, FeatureSet, Instance, Xpg};
//!
//! let dt = fixtures::hardware_tree();
//! let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
//! let x = Xpg::build(&dt, &v).unwrap();
//! let axp = find_axp(&x, &FeatureSet::full(4), &DeletionOrder::Ascending).unwrap();
//! assert_eq!(axp.features, FeatureSet::from([0, 3]));
//! ```
//!
//! Feature indices are 0-based in the library and 1-based in every file
//! format and on the command line.

pub mod bench;
pub mod cli;
pub mod dlc;
pub mod enumerate;
pub mod explain;
pub mod features;
pub mod fixtures;
pub mod interval;
pub mod model;
pub mod satoracle;
pub mod schema;
pub mod synth;
pub mod validate;
pub mod verify;
pub mod xpg;

pub use dlc::{compile_dl, eval_dl, parse_dl, DecisionList, Obdd, Rule};
pub use enumerate::{
    check_duality, enumerate_tree_cxps, enumerate_with, enumerate_xps, membership, union_of,
    Enumeration, EnumerationConfig, MembershipKind, XpEnumerator,
};
pub use explain::{find_axp, find_cxp, one_axp, one_cxp, DeletionOrder, Explanation, XpKind};
pub use features::FeatureSet;
pub use interval::{Interval, IntervalSet};
pub use model::{Atom, DecisionGraph, Feature, FeatureValue, Instance, ModelError};
pub use satoracle::{ClauseDb, Oracle, Polarity};
pub use schema::{model_to_json, parse_model};
pub use validate::{validate, ValidationReport};
pub use verify::{brute_force_axps, brute_force_cxps, BruteForce, Caps};
pub use xpg::{SVector, Xpg};
