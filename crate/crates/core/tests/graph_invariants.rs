use proptest::prelude::*;
use riglab::graph::{connected_components, intersect_graphs, is_connected, min_degree, Graph};
use riglab::models::{
    build_rig, sample_binomial_assignment, sample_model, sample_uniform_assignment, BinomialRigParams, ErParams,
    ModelSpec, Region, RggParams, UniformRigParams,
};
use riglab::properties::is_k_connected;
use riglab::rng::RngStream;
use riglab::scaling::{binomial_overlap_tail, uniform_overlap_tail};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

fn graph_pair(max_n: usize) -> impl Strategy<Value = (Graph, Graph)> {
    (1..=max_n).prop_flat_map(|n| {
        let m = n * (n - 1) / 2;
        (proptest::collection::vec(any::<bool>(), m), proptest::collection::vec(any::<bool>(), m)).prop_map(
            move |(a, b)| {
                let build = |bits: Vec<bool>| {
                    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
                    Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
                };
                (build(a), build(b))
            },
        )
    })
}

proptest! {
    #[test]
    fn intersection_is_commutative_idempotent_and_smaller((g, h) in graph_pair(12)) {
        let gh = intersect_graphs(&g, &h).unwrap();
        prop_assert_eq!(&gh, &intersect_graphs(&h, &g).unwrap());
        prop_assert_eq!(&intersect_graphs(&g, &g).unwrap(), &g);
        for (u, v) in gh.edges() {
            prop_assert!(g.has_edge(u, v) && h.has_edge(u, v));
        }
    }

    #[test]
    fn connectivity_views_agree(g in graph(12)) {
        let one_block = connected_components(&g).len() == 1;
        prop_assert_eq!(is_connected(&g), one_block);
        prop_assert_eq!(is_connected(&g), is_k_connected(&g, 1));
    }

    #[test]
    fn degree_sum_is_even(g in graph(14)) {
        let sum: usize = (0..g.node_count()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn edge_list_round_trips(g in graph(12)) {
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn same_seed_same_graph(seed in any::<u64>(), trial in 0u64..1000) {
        let spec = ModelSpec::Intersection(vec![
            ModelSpec::UniformRig(UniformRigParams { n: 40, k: 4, p: 60, s: 1 }),
            ModelSpec::Rgg(RggParams { n: 40, r: 0.4, region: Region::Torus }),
        ]);
        let a = sample_model(&spec, &mut RngStream::new(seed, trial).rng()).unwrap();
        let b = sample_model(&spec, &mut RngStream::new(seed, trial).rng()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn raising_s_never_adds_edges(seed in any::<u64>(), k in 1u64..8, extra in 0u64..20) {
        let params = UniformRigParams { n: 30, k, p: k + extra + 1, s: 1 };
        let assignment = sample_uniform_assignment(&params, &mut RngStream::new(seed, 0).rng()).unwrap();
        let mut prev = build_rig(&assignment, 1);
        for s in 2..=k as u32 {
            let next = build_rig(&assignment, s);
            for (u, v) in next.edges() {
                prop_assert!(prev.has_edge(u, v));
            }
            prev = next;
        }
    }

    #[test]
    fn rig_edges_are_overlaps(seed in any::<u64>(), t in 0.05f64..0.6, s in 1u32..3) {
        let params = BinomialRigParams { n: 25, t, p: 20, s };
        let a = sample_binomial_assignment(&params, &mut RngStream::new(seed, 0).rng()).unwrap();
        let g = build_rig(&a, s);
        for u in 0..25 {
            for v in u + 1..25 {
                let shared = a.items(u).iter().filter(|i| a.items(v).contains(i)).count();
                prop_assert_eq!(g.has_edge(u, v), shared >= s as usize);
            }
        }
    }

    #[test]
    fn er_min_degree_bounded_by_average(seed in any::<u64>(), q in 0.0f64..1.0) {
        let g = sample_model(&ModelSpec::Er(ErParams { n: 30, q }), &mut RngStream::new(seed, 0).rng()).unwrap();
        prop_assert!(min_degree(&g) * 30 <= 2 * g.edge_count());
    }
}

/// Fraction of seeds whose two-node graph has the edge, against `expected`,
/// within three standard errors.
fn pair_frequency_matches(spec: &ModelSpec, expected: f64, seeds: u64) {
    let hits = (0..seeds)
        .filter(|&i| sample_model(spec, &mut RngStream::new(0xED6E, i).rng()).unwrap().edge_count() == 1)
        .count();
    let freq = hits as f64 / seeds as f64;
    let se = (expected * (1.0 - expected) / seeds as f64).sqrt();
    assert!((freq - expected).abs() <= 3.0 * se, "{spec:?}: {freq} vs {expected} (se {se})");
}

#[test]
fn uniform_edge_frequency_matches_exact_tail() {
    for (k, p, s) in [(3, 20, 1), (6, 30, 2), (10, 40, 3), (2, 1000, 1)] {
        let spec = ModelSpec::UniformRig(UniformRigParams { n: 2, k, p, s });
        pair_frequency_matches(&spec, uniform_overlap_tail(k, p, s), 20_000);
    }
}

#[test]
fn binomial_edge_frequency_matches_exact_tail() {
    for (t, p, s) in [(0.2, 20, 1), (0.3, 40, 2), (0.05, 500, 1), (0.5, 12, 3)] {
        let spec = ModelSpec::BinomialRig(BinomialRigParams { n: 2, t, p, s });
        pair_frequency_matches(&spec, binomial_overlap_tail(t, p, s), 20_000);
    }
}

#[test]
fn rgg_edge_frequency_matches_distance_law() {
    use riglab::scaling::rgg_edge_probability;
    for region in [Region::Torus, Region::Square] {
        for r in [0.1, 0.45, 0.6, 1.1] {
            let spec = ModelSpec::Rgg(RggParams { n: 2, r, region });
            pair_frequency_matches(&spec, rgg_edge_probability(r, region), 20_000);
        }
    }
}

#[test]
fn sparse_subsets_are_uniform() {
    // 4K <= P takes the draw-and-dedup path
    let params = UniformRigParams { n: 1, k: 5, p: 40, s: 1 };
    let draws = 40_000u64;
    let mut item = vec![0u64; 40];
    let mut pair01 = 0u64;
    for i in 0..draws {
        let a = sample_uniform_assignment(&params, &mut RngStream::new(77, i).rng()).unwrap();
        let set = a.items(0);
        assert_eq!(set.len(), 5);
        assert!(set.windows(2).all(|w| w[0] < w[1]));
        for &x in set {
            item[x as usize] += 1;
        }
        pair01 += (set.contains(&0) && set.contains(&1)) as u64;
    }
    let p1 = 5.0 / 40.0;
    let se1 = (p1 * (1.0 - p1) / draws as f64).sqrt();
    for c in item {
        assert!((c as f64 / draws as f64 - p1).abs() <= 4.0 * se1);
    }
    let p2 = 5.0 * 4.0 / (40.0 * 39.0);
    let se2 = (p2 * (1.0 - p2) / draws as f64).sqrt();
    assert!((pair01 as f64 / draws as f64 - p2).abs() <= 4.0 * se2);
}
