//! Samplers for the random graph families.
//!
//! * uniform random s-intersection graphs `G_s(n, K, P)`,
//! * binomial random s-intersection graphs `H_s(n, t, P)`,
//! * Erdős–Rényi graphs `G(n, q)`,
//! * random geometric graphs on the unit torus or unit square,
//! * edge-wise intersections of any of the above on a shared node set.
//!
//! Every sampler is a pure function of its parameters and the generator it is
//! handed; callers obtain generators from [`RngStream`](crate::rng::RngStream).

use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{intersect_graphs, Graph};

/// Per-node item sets drawn from a pool `0..P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemAssignment {
    pool: u64,
    sets: Vec<Vec<u32>>,
}

impl ItemAssignment {
    /// Sets are sorted and deduplicated; ids must be below `pool`.
    pub fn new(pool: u64, sets: Vec<Vec<u32>>) -> Result<Self> {
        let mut sets = sets;
        for set in &mut sets {
            set.sort_unstable();
            set.dedup();
            if let Some(&max) = set.last() {
                if max as u64 >= pool {
                    return Err(invalid(format!("item {max} outside pool of size {pool}")));
                }
            }
        }
        Ok(Self { pool, sets })
    }

    pub fn node_count(&self) -> usize {
        self.sets.len()
    }

    pub fn pool(&self) -> u64 {
        self.pool
    }

    pub fn items(&self, node: usize) -> &[u32] {
        &self.sets[node]
    }

    /// Text export, one `node: item,item,...` line per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, set) in self.sets.iter().enumerate() {
            write!(out, "{v}:").unwrap();
            for (i, item) in set.iter().enumerate() {
                out.push(if i == 0 { ' ' } else { ',' });
                write!(out, "{item}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`ItemAssignment::to_text`] output. Nodes must appear in order.
    pub fn parse_text(text: &str, pool: u64) -> Result<Self> {
        let mut sets = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (node, rest) = line
                .split_once(':')
                .ok_or_else(|| err("expected `node: items`".into()))?;
            let node: usize = node.trim().parse().map_err(|_| err(format!("bad node id {node:?}")))?;
            if node != sets.len() {
                return Err(err(format!("expected node {}, found {node}", sets.len())));
            }
            let rest = rest.trim();
            let set = if rest.is_empty() {
                Vec::new()
            } else {
                rest.split(',')
                    .map(|s| s.trim().parse::<u32>().map_err(|_| err(format!("bad item {s:?}"))))
                    .collect::<Result<Vec<_>>>()?
            };
            sets.push(set);
        }
        Self::new(pool, sets)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformRigParams {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "P")]
    pub p: u64,
    pub s: u32,
}

impl UniformRigParams {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        if self.s < 1 || self.s as u64 > self.k || self.k > self.p {
            return Err(invalid(format!(
                "uniform RIG needs 1 <= s <= K <= P (s = {}, K = {}, P = {})",
                self.s, self.k, self.p
            )));
        }
        check_pool(self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinomialRigParams {
    pub n: usize,
    pub t: f64,
    #[serde(rename = "P")]
    pub p: u64,
    pub s: u32,
}

impl BinomialRigParams {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_probability("t", self.t)?;
        if self.s < 1 {
            return Err(invalid("binomial RIG needs s >= 1"));
        }
        if self.p < 1 {
            return Err(invalid("binomial RIG needs P >= 1"));
        }
        check_pool(self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErParams {
    pub n: usize,
    pub q: f64,
}

impl ErParams {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_probability("q", self.q)
    }
}

/// Deployment region of unit area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Unit torus, distances wrap per coordinate.
    Torus,
    /// Unit square with boundary.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RggParams {
    pub n: usize,
    pub r: f64,
    pub region: Region,
}

impl RggParams {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(invalid(format!("radius must be finite and >= 0, got {}", self.r)));
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > u32::MAX as usize {
        return Err(invalid(format!("node count must be in 1..=2^32-1, got {n}")));
    }
    Ok(())
}

fn check_pool(p: u64) -> Result<()> {
    if p > u32::MAX as u64 {
        return Err(invalid(format!("pool size {p} exceeds 2^32-1")));
    }
    Ok(())
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

/// Each node draws `K` distinct items uniformly from `0..P`.
pub fn sample_uniform_assignment<R: Rng + ?Sized>(
    params: &UniformRigParams,
    rng: &mut R,
) -> Result<ItemAssignment> {
    params.validate()?;
    let sets = (0..params.n)
        .map(|_| sorted_subset(rng, params.p, params.k))
        .collect();
    Ok(ItemAssignment {
        pool: params.p,
        sets,
    })
}

/// Each (node, item) pair is included independently with probability `t`.
///
/// Sampled as a Binomial(P, t) set size followed by a uniform subset of that
/// size, which has the same law and costs O(size) rather than O(P).
pub fn sample_binomial_assignment<R: Rng + ?Sized>(
    params: &BinomialRigParams,
    rng: &mut R,
) -> Result<ItemAssignment> {
    params.validate()?;
    let sizes = Binomial::new(params.p, params.t).map_err(|e| invalid(e.to_string()))?;
    let sets = (0..params.n)
        .map(|_| {
            let m = sizes.sample(rng);
            sorted_subset(rng, params.p, m)
        })
        .collect();
    Ok(ItemAssignment {
        pool: params.p,
        sets,
    })
}

fn sorted_subset<R: Rng + ?Sized>(rng: &mut R, pool: u64, size: u64) -> Vec<u32> {
    if size == pool {
        return (0..pool as u32).collect();
    }
    if size.saturating_mul(4) > pool {
        let mut set: Vec<u32> = index::sample(rng, pool as usize, size as usize)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        set.sort_unstable();
        return set;
    }
    // Sparse case: draw with replacement, dedup, top up. The result is a
    // uniform size-subset by symmetry of the procedure under relabelling.
    let size = size as usize;
    let mut set: Vec<u32> = Vec::with_capacity(size);
    while set.len() < size {
        let missing = size - set.len();
        set.extend((0..missing).map(|_| rng.random_range(0..pool) as u32));
        set.sort_unstable();
        set.dedup();
    }
    set
}

type HolderIndex<'a> = (Vec<usize>, Vec<u32>, Vec<std::borrow::Cow<'a, [u32]>>);

/// Holder lists per item (sorted by node) plus each node's items as indices
/// into those lists. Counting sort over raw item ids when the pool is small
/// enough to index directly; otherwise items are compressed through a sort.
fn holder_index(assignment: &ItemAssignment) -> HolderIndex<'_> {
    let total: usize = assignment.sets.iter().map(Vec::len).sum();
    let pool = assignment.pool as usize;
    if pool <= (1 << 22).max(4 * total) {
        let mut offsets = vec![0usize; pool + 1];
        for set in &assignment.sets {
            for &item in set {
                offsets[item as usize + 1] += 1;
            }
        }
        for i in 0..pool {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut holders = vec![0u32; total];
        for (v, set) in assignment.sets.iter().enumerate() {
            for &item in set {
                holders[fill[item as usize]] = v as u32;
                fill[item as usize] += 1;
            }
        }
        let groups = assignment.sets.iter().map(|set| std::borrow::Cow::Borrowed(set.as_slice())).collect();
        return (offsets, holders, groups);
    }
    let mut entries: Vec<(u32, u32)> = assignment
        .sets
        .iter()
        .enumerate()
        .flat_map(|(v, set)| set.iter().map(move |&item| (item, v as u32)))
        .collect();
    entries.sort_unstable();
    let mut offsets = Vec::new();
    let mut holders = Vec::with_capacity(entries.len());
    let mut groups: Vec<Vec<u32>> = assignment.sets.iter().map(|set| Vec::with_capacity(set.len())).collect();
    let mut last_item = None;
    for &(item, v) in &entries {
        if last_item != Some(item) {
            offsets.push(holders.len());
            last_item = Some(item);
        }
        groups[v as usize].push((offsets.len() - 1) as u32);
        holders.push(v);
    }
    offsets.push(holders.len());
    (offsets, holders, groups.into_iter().map(std::borrow::Cow::Owned).collect())
}

/// Edge `{u, v}` iff the two item sets share at least `s` items.
///
/// Candidate pairs come from an inverted index (item -> holders), so the cost
/// is proportional to the number of co-holding pairs rather than `n^2`.
pub fn build_rig(assignment: &ItemAssignment, s: u32) -> Graph {
    let n = assignment.node_count();
    let s = s.max(1);
    let (holder_offsets, holders, node_groups) = holder_index(assignment);
    let mut shared = vec![0u32; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (u, groups) in node_groups.iter().enumerate() {
        for &c in groups.iter() {
            let c = c as usize;
            let group = &holders[holder_offsets[c]..holder_offsets[c + 1]];
            // holders are sorted by node id; only look at v > u
            let start = group.partition_point(|&v| v as usize <= u);
            for &v in &group[start..] {
                let count = &mut shared[v as usize];
                if *count == 0 {
                    touched.push(v);
                }
                *count += 1;
                if *count == s {
                    pairs.push((u as u32, v));
                }
            }
        }
        for v in touched.drain(..) {
            shared[v as usize] = 0;
        }
    }
    Graph::from_valid_pairs(n, &pairs)
}

/// Erdős–Rényi `G(n, q)` by geometric skipping over the pair sequence.
pub fn sample_er<R: Rng + ?Sized>(params: &ErParams, rng: &mut R) -> Result<Graph> {
    params.validate()?;
    let n = params.n;
    if params.q == 0.0 {
        return Ok(Graph::empty(n));
    }
    if params.q == 1.0 {
        return Ok(Graph::complete(n));
    }
    let log_miss = (-params.q).ln_1p();
    let mut pairs = Vec::new();
    // pairs (w, v) with w < v enumerated row by row
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((-r).ln_1p() / log_miss).floor();
        w += 1 + if skip > n as f64 * n as f64 { (n * n) as i64 } else { skip as i64 };
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            pairs.push((w as u32, v as u32));
        }
    }
    Ok(Graph::from_valid_pairs(n, &pairs))
}

fn squared_distance(a: [f64; 2], b: [f64; 2], region: Region) -> f64 {
    let mut dx = (a[0] - b[0]).abs();
    let mut dy = (a[1] - b[1]).abs();
    if region == Region::Torus {
        dx = dx.min(1.0 - dx);
        dy = dy.min(1.0 - dy);
    }
    dx * dx + dy * dy
}

/// Geometric graph over fixed points: edge iff distance <= r.
pub fn rgg_from_points(points: &[[f64; 2]], r: f64, region: Region) -> Graph {
    let n = points.len();
    let r2 = r * r;
    let cells_per_side = if r > 0.0 { ((1.0 / r).floor() as usize).clamp(1, 1024) } else { 1024 };
    let mut pairs = Vec::new();
    if cells_per_side < 3 {
        for u in 0..n {
            for v in u + 1..n {
                if squared_distance(points[u], points[v], region) <= r2 {
                    pairs.push((u as u32, v as u32));
                }
            }
        }
        return Graph::from_valid_pairs(n, &pairs);
    }
    let m = cells_per_side;
    let cell_of = |p: [f64; 2]| -> (usize, usize) {
        let cx = ((p[0] * m as f64) as usize).min(m - 1);
        let cy = ((p[1] * m as f64) as usize).min(m - 1);
        (cx, cy)
    };
    let mut cell_nodes: Vec<Vec<u32>> = vec![Vec::new(); m * m];
    for (v, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        cell_nodes[cy * m + cx].push(v as u32);
    }
    for (u, &p) in points.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                let (nx, ny) = match region {
                    Region::Torus => (nx.rem_euclid(m as i64), ny.rem_euclid(m as i64)),
                    Region::Square => {
                        if nx < 0 || ny < 0 || nx >= m as i64 || ny >= m as i64 {
                            continue;
                        }
                        (nx, ny)
                    }
                };
                for &v in &cell_nodes[ny as usize * m + nx as usize] {
                    if (v as usize) > u && squared_distance(p, points[v as usize], region) <= r2 {
                        pairs.push((u as u32, v));
                    }
                }
            }
        }
    }
    Graph::from_valid_pairs(n, &pairs)
}

/// Random geometric graph; returns the graph and the sampled points.
pub fn sample_rgg<R: Rng + ?Sized>(params: &RggParams, rng: &mut R) -> Result<(Graph, Vec<[f64; 2]>)> {
    params.validate()?;
    let points: Vec<[f64; 2]> = (0..params.n).map(|_| [rng.random(), rng.random()]).collect();
    let g = rgg_from_points(&points, params.r, params.region);
    Ok((g, points))
}

/// A random graph family together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    UniformRig(UniformRigParams),
    BinomialRig(BinomialRigParams),
    Er(ErParams),
    Rgg(RggParams),
    /// Components sampled independently on the same node set, then intersected.
    Intersection(Vec<ModelSpec>),
}

impl ModelSpec {
    pub fn node_count(&self) -> usize {
        match self {
            ModelSpec::UniformRig(p) => p.n,
            ModelSpec::BinomialRig(p) => p.n,
            ModelSpec::Er(p) => p.n,
            ModelSpec::Rgg(p) => p.n,
            ModelSpec::Intersection(parts) => parts.first().map_or(0, |p| p.node_count()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::UniformRig(p) => p.validate(),
            ModelSpec::BinomialRig(p) => p.validate(),
            ModelSpec::Er(p) => p.validate(),
            ModelSpec::Rgg(p) => p.validate(),
            ModelSpec::Intersection(parts) => {
                if parts.len() < 2 {
                    return Err(invalid("an intersection needs at least two components"));
                }
                let n = parts[0].node_count();
                for part in parts {
                    part.validate()?;
                    if part.node_count() != n {
                        return Err(Error::NodeCountMismatch {
                            left: n,
                            right: part.node_count(),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Same family with a different node count.
    pub fn with_node_count(&self, n: usize) -> ModelSpec {
        let mut spec = self.clone();
        spec.set_node_count(n);
        spec
    }

    fn set_node_count(&mut self, n: usize) {
        match self {
            ModelSpec::UniformRig(p) => p.n = n,
            ModelSpec::BinomialRig(p) => p.n = n,
            ModelSpec::Er(p) => p.n = n,
            ModelSpec::Rgg(p) => p.n = n,
            ModelSpec::Intersection(parts) => parts.iter_mut().for_each(|p| p.set_node_count(n)),
        }
    }
}

/// Samples one graph from `spec`.
pub fn sample_model<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    match spec {
        ModelSpec::UniformRig(p) => Ok(build_rig(&sample_uniform_assignment(p, rng)?, p.s)),
        ModelSpec::BinomialRig(p) => Ok(build_rig(&sample_binomial_assignment(p, rng)?, p.s)),
        ModelSpec::Er(p) => sample_er(p, rng),
        ModelSpec::Rgg(p) => Ok(sample_rgg(p, rng)?.0),
        ModelSpec::Intersection(parts) => {
            let mut acc = sample_model(&parts[0], rng)?;
            for part in &parts[1..] {
                let next = sample_model(part, rng)?;
                acc = intersect_graphs(&acc, &next)?;
            }
            Ok(acc)
        }
    }
}
