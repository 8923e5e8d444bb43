//! Exact decision procedures for the graph properties, plus brute-force
//! oracles used to cross-check them on small graphs.

mod connectivity;
mod hamilton;
mod matching;
pub mod oracle;
mod robust;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use connectivity::{is_k_connected, vertex_connectivity};
pub use hamilton::{find_hamilton_cycle, has_hamilton_cycle, is_hamilton_cycle};
pub use matching::{has_near_perfect_matching, max_matching_size, maximum_matching, Matching};
pub use oracle::{oracle_hamilton, oracle_k_connected, oracle_k_robust, oracle_matching};
pub use robust::{check_k_robust, is_k_robust, subset_fails, Robustness};

use crate::error::{invalid, Result};
use crate::graph::{min_degree, Graph};

/// The graph properties the library decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PropertyKind {
    /// Every node has degree at least `k`.
    MinDegreeAtLeast { k: usize },
    /// Vertex connectivity at least `k`.
    KConnected { k: usize },
    /// A matching covering all nodes but at most one.
    NearPerfectMatching,
    HamiltonCycle,
    /// k-robustness: every non-empty strict subset has a node with `k`
    /// neighbours across the cut, on one side or the other.
    KRobust { k: usize },
}

impl PropertyKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            PropertyKind::MinDegreeAtLeast { k } | PropertyKind::KConnected { k } | PropertyKind::KRobust { k } => {
                if *k == 0 {
                    return Err(invalid(format!("{self} needs k >= 1")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The `k` the property is parameterised by, if any.
    pub fn k(&self) -> Option<usize> {
        match *self {
            PropertyKind::MinDegreeAtLeast { k } | PropertyKind::KConnected { k } | PropertyKind::KRobust { k } => {
                Some(k)
            }
            _ => None,
        }
    }

    /// Whether deciding it is exponential in `n`.
    pub fn is_exponential(&self) -> bool {
        matches!(self, PropertyKind::KRobust { .. })
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyKind::MinDegreeAtLeast { k } => write!(f, "min-degree>={k}"),
            PropertyKind::KConnected { k } => write!(f, "{k}-connected"),
            PropertyKind::NearPerfectMatching => write!(f, "perfect-matching"),
            PropertyKind::HamiltonCycle => write!(f, "hamilton-cycle"),
            PropertyKind::KRobust { k } => write!(f, "{k}-robust"),
        }
    }
}

/// Limits for the exponential checkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionBudget {
    /// Largest node count the exhaustive searches accept.
    pub max_nodes: usize,
    /// Optional cap on search steps.
    #[serde(default)]
    pub step_limit: Option<u64>,
}

impl Default for DecisionBudget {
    fn default() -> Self {
        Self {
            max_nodes: 24,
            step_limit: None,
        }
    }
}

/// Decides `property` on `g`.
pub fn decide(g: &Graph, property: &PropertyKind, budget: &DecisionBudget) -> Result<bool> {
    property.validate()?;
    match *property {
        PropertyKind::MinDegreeAtLeast { k } => Ok(min_degree(g) >= k),
        PropertyKind::KConnected { k } => Ok(is_k_connected(g, k)),
        PropertyKind::NearPerfectMatching => Ok(has_near_perfect_matching(g)),
        PropertyKind::HamiltonCycle => has_hamilton_cycle(g, budget),
        PropertyKind::KRobust { k } => is_k_robust(g, k, budget),
    }
}
