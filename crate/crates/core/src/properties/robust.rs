//! k-robustness by exhaustive subset enumeration.
//!
//! A graph is k-robust when every non-empty strict subset `T` of the nodes
//! has a member with at least `k` neighbours outside `T`, or a non-member
//! with at least `k` neighbours inside `T`. The condition is symmetric under
//! `T <-> V \ T`, so only subsets avoiding the last node are visited. Subsets
//! are walked in Gray-code order; flipping one node updates the per-node
//! cross-edge counters of its neighbours in O(degree).

use super::DecisionBudget;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSubset};

/// Outcome of a robustness check; failures carry the offending subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Robustness {
    Robust,
    NotRobust { witness: NodeSubset },
}

impl Robustness {
    pub fn holds(&self) -> bool {
        matches!(self, Robustness::Robust)
    }
}

pub fn is_k_robust(g: &Graph, k: usize, budget: &DecisionBudget) -> Result<bool> {
    Ok(check_k_robust(g, k, budget)?.holds())
}

/// Decides k-robustness, returning a failing subset `T` when there is one.
pub fn check_k_robust(g: &Graph, k: usize, budget: &DecisionBudget) -> Result<Robustness> {
    let n = g.node_count();
    if n > budget.max_nodes || n > 63 {
        return Err(Error::BudgetExceeded(format!(
            "k-robustness enumerates 2^{} subsets; cap is {} nodes",
            n.saturating_sub(1),
            budget.max_nodes
        )));
    }
    if n <= 1 {
        return Ok(Robustness::Robust);
    }
    let free = n - 1;
    let mut in_t = vec![false; n];
    let mut inside = vec![0usize; n];
    let mut good = 0usize;
    let deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let satisfied = |v: usize, in_t: &[bool], inside: &[usize]| {
        if in_t[v] {
            deg[v] - inside[v] >= k
        } else {
            inside[v] >= k
        }
    };
    let total: u64 = 1u64 << free;
    let mut steps = 0u64;
    for i in 1..total {
        steps += 1;
        if let Some(limit) = budget.step_limit {
            if steps > limit {
                return Err(Error::BudgetExceeded(format!("step limit {limit} reached")));
            }
        }
        // node whose membership flips between gray(i-1) and gray(i)
        let x = i.trailing_zeros() as usize;
        let before = satisfied(x, &in_t, &inside) as usize;
        in_t[x] = !in_t[x];
        good = good + satisfied(x, &in_t, &inside) as usize - before;
        for &y in g.neighbors(x) {
            let y = y as usize;
            let before = satisfied(y, &in_t, &inside) as usize;
            if in_t[x] {
                inside[y] += 1;
            } else {
                inside[y] -= 1;
            }
            good = good + satisfied(y, &in_t, &inside) as usize - before;
        }
        if good == 0 {
            let witness = NodeSubset::from_nodes(n, (0..n).filter(|&v| in_t[v]));
            return Ok(Robustness::NotRobust { witness });
        }
    }
    Ok(Robustness::Robust)
}

/// Whether `t` violates both robustness clauses.
pub fn subset_fails(g: &Graph, t: &NodeSubset, k: usize) -> bool {
    let n = g.node_count();
    let cross = |v: usize, want_in: bool| {
        g.neighbors(v).iter().filter(|&&w| t.contains(w as usize) == want_in).count()
    };
    let a = (0..n).filter(|&v| t.contains(v)).any(|v| cross(v, false) >= k);
    let b = (0..n).filter(|&v| !t.contains(v)).any(|v| cross(v, true) >= k);
    !(a || b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> DecisionBudget {
        DecisionBudget::default()
    }

    #[test]
    fn examples() {
        assert!(is_k_robust(&Graph::complete(4), 2, &budget()).unwrap());
        assert!(!is_k_robust(&Graph::cycle(6), 2, &budget()).unwrap());
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!is_k_robust(&split, 1, &budget()).unwrap());
        assert!(is_k_robust(&Graph::path(5), 1, &budget()).unwrap());
    }

    #[test]
    fn witness_fails_both_clauses() {
        let g = Graph::cycle(6);
        match check_k_robust(&g, 2, &budget()).unwrap() {
            Robustness::NotRobust { witness } => {
                assert!(!witness.is_empty() && witness.len() < 6);
                assert!(subset_fails(&g, &witness, 2));
                assert!(subset_fails(&g, &witness.complement(), 2));
            }
            Robustness::Robust => panic!("C_6 is not 2-robust"),
        }
    }

    #[test]
    fn over_cap() {
        let b = DecisionBudget { max_nodes: 8, step_limit: None };
        assert!(matches!(is_k_robust(&Graph::cycle(9), 1, &b), Err(Error::BudgetExceeded(_))));
        let b = DecisionBudget { max_nodes: 24, step_limit: Some(3) };
        assert!(matches!(is_k_robust(&Graph::complete(9), 1, &b), Err(Error::BudgetExceeded(_))));
    }
}
