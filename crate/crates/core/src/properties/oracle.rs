//! Brute-force reference deciders for small graphs.
//!
//! These share no code with the production checkers: each one enumerates the
//! objects named in the property definition directly.

use crate::error::{Error, Result};
use crate::graph::{is_connected, Graph, NodeSubset};

pub const ORACLE_MAX_NODES: usize = 10;
pub const ORACLE_MATCHING_MAX_NODES: usize = 12;

fn cap(g: &Graph, max: usize) -> Result<()> {
    if g.node_count() > max {
        return Err(Error::BudgetExceeded(format!(
            "oracle limited to {max} nodes, got {}",
            g.node_count()
        )));
    }
    Ok(())
}

/// k-connected iff `n > k` and deleting any set of fewer than `k` nodes leaves
/// a connected graph (with the single-node graph counted as connected).
pub fn oracle_k_connected(g: &Graph, k: usize) -> Result<bool> {
    cap(g, ORACLE_MAX_NODES)?;
    let n = g.node_count();
    if k == 0 {
        return Ok(true);
    }
    if n == 1 {
        return Ok(k == 1);
    }
    if n <= k {
        return Ok(false);
    }
    for mask in 0u32..(1 << n) {
        if (mask.count_ones() as usize) < k {
            let removed = NodeSubset::from_nodes(n, (0..n).filter(|&v| mask >> v & 1 == 1));
            if !is_connected(&g.without_nodes(&removed)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Largest set of pairwise disjoint edges, by exhaustive search.
pub fn oracle_matching(g: &Graph) -> Result<usize> {
    cap(g, ORACLE_MATCHING_MAX_NODES)?;
    let edges: Vec<(usize, usize)> = g.edges().collect();
    fn best(edges: &[(usize, usize)], used: u32) -> usize {
        match edges.split_first() {
            None => 0,
            Some((&(u, v), rest)) => {
                let skip = best(rest, used);
                if used >> u & 1 == 0 && used >> v & 1 == 0 {
                    skip.max(1 + best(rest, used | 1 << u | 1 << v))
                } else {
                    skip
                }
            }
        }
    }
    Ok(best(&edges, 0))
}

/// Scans cyclic orderings with node 0 fixed first.
pub fn oracle_hamilton(g: &Graph) -> Result<bool> {
    cap(g, ORACLE_MAX_NODES)?;
    let n = g.node_count();
    if n < 3 {
        return Ok(false);
    }
    fn extend(g: &Graph, order: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = g.node_count();
        if order.len() == n {
            return g.has_edge(order[n - 1], order[0]);
        }
        for v in 1..n {
            if !used[v] && g.has_edge(*order.last().unwrap(), v) {
                used[v] = true;
                order.push(v);
                if extend(g, order, used) {
                    return true;
                }
                order.pop();
                used[v] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    Ok(extend(g, &mut vec![0], &mut used))
}

/// Checks the robustness condition on every non-empty strict subset.
pub fn oracle_k_robust(g: &Graph, k: usize) -> Result<bool> {
    cap(g, ORACLE_MATCHING_MAX_NODES)?;
    let n = g.node_count();
    for mask in 1u32..((1u32 << n) - 1) {
        let in_t = |v: usize| mask >> v & 1 == 1;
        let outside_nbrs = |v: usize| g.neighbors(v).iter().filter(|&&w| !in_t(w as usize)).count();
        let inside_nbrs = |v: usize| g.neighbors(v).iter().filter(|&&w| in_t(w as usize)).count();
        let a = (0..n).any(|v| in_t(v) && outside_nbrs(v) >= k);
        let b = (0..n).any(|v| !in_t(v) && inside_nbrs(v) >= k);
        if !a && !b {
            return Ok(false);
        }
    }
    Ok(true)
}
