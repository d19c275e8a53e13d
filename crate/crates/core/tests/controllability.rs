mod oracles;

use num_rational::BigRational;
use proptest::prelude::*;
use snapnet::controllability::{
    exact_rank, maximum_matching, rank_bareiss, state_driver_count, state_driver_placement,
    structural_driver_count, IntMatrix, StateMode,
};
use snapnet::generators::gen_chain;
use snapnet::{DirectedGraph, RngStream};

use oracles::*;

#[test]
fn matching_agrees_with_exhaustive_search() {
    let mut rng = RngStream::new(11);
    for case in 0..600 {
        let n = 1 + case % 8;
        let p = [0.1, 0.25, 0.4, 0.7][case % 4];
        let g = random_digraph(n, p, &mut rng);
        let m = maximum_matching(&g);
        assert_eq!(m.size(), brute_matching_size(&g), "case {case}");
        assert_eq!(structural_driver_count(&g).unwrap().drivers, brute_structural_nd(&g));
    }
}

#[test]
fn rank_agrees_with_rational_elimination() {
    let mut rng = RngStream::new(12);
    for case in 0..500 {
        let n = 1 + case % 12;
        let p = [0.1, 0.3, 0.5, 0.8][case % 4];
        let rows: Vec<Vec<i64>> =
            (0..n).map(|_| (0..n).map(|_| i64::from(rng.uniform() < p)).collect()).collect();
        let m = IntMatrix::from_rows(rows.clone()).unwrap();
        let expected = int_rank(&rows);
        assert_eq!(exact_rank(&m).unwrap(), expected, "case {case}");
        assert_eq!(rank_bareiss(&m), expected);
    }
}

#[test]
fn chain_and_cycle_need_one_input_by_kalman() {
    for n in 2..=6 {
        let chain = adjacency(&gen_chain(n).unwrap());
        let mut pin_root = vec![big(0); n];
        pin_root[0] = one();
        assert_eq!(kalman_rank(&chain, &[pin_root.clone()]), n);

        let cycle = DirectedGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        assert_eq!(kalman_rank(&adjacency(&cycle), &[pin_root]), n);
        assert_eq!(state_driver_count(&cycle, StateMode::ZeroEigenvalue).unwrap().drivers, 1);
    }
}

fn kalman_columns(placement: &snapnet::controllability::StatePlacement, g: &DirectedGraph, rng: &mut RngStream) -> Vec<Vec<BigRational>> {
    let nodes: Vec<usize> = g.active_nodes().collect();
    placement
        .inputs
        .iter()
        .map(|input| {
            let mut col = vec![big(0); nodes.len()];
            for &(u, _) in input {
                let k = nodes.iter().position(|&v| v == u).unwrap();
                col[k] = big(1 + rng.below(1_000_000) as i64);
            }
            col
        })
        .collect()
}

#[test]
fn exact_placement_passes_kalman_test() {
    let mut rng = RngStream::new(13);
    let mut weights = RngStream::new(14);
    for case in 0..200 {
        let n = 1 + case % 6;
        let p = [0.15, 0.3, 0.5, 0.8][case % 4];
        let g = random_digraph(n, p, &mut rng);
        let placed = state_driver_placement(&g, StateMode::Exact).unwrap();
        assert!(placed.controllable, "case {case}");
        let b = kalman_columns(&placed, &g, &mut weights);
        assert_eq!(kalman_rank(&adjacency(&g), &b), n, "case {case}: {:?}", placed.inputs);
        // No smaller input count can work: the count is at least the largest
        // integer-eigenvalue deficiency, which bounds it from below.
        let sweep = state_driver_count(&g, StateMode::IntegerSweep).unwrap().drivers;
        assert!(placed.count.drivers >= sweep);
    }
}

#[test]
fn zero_mode_is_a_lower_bound() {
    let mut rng = RngStream::new(15);
    for case in 0..200 {
        let g = random_digraph(2 + case % 7, 0.3, &mut rng);
        let zero = state_driver_count(&g, StateMode::ZeroEigenvalue).unwrap().drivers;
        let sweep = state_driver_count(&g, StateMode::IntegerSweep).unwrap().drivers;
        let exact = state_driver_count(&g, StateMode::Exact).unwrap().drivers;
        assert!(zero <= sweep && sweep <= exact);
    }
}

fn graph_strategy() -> impl Strategy<Value = DirectedGraph> {
    (2usize..12).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            DirectedGraph::from_edges(n, pairs.into_iter().filter(|(u, v)| u != v)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn matching_is_valid_and_bounded(g in graph_strategy()) {
        let m = maximum_matching(&g);
        let mut tails = std::collections::HashSet::new();
        let mut heads = std::collections::HashSet::new();
        for &(u, v) in &m.edges {
            prop_assert!(g.has_edge(u, v));
            prop_assert!(tails.insert(u));
            prop_assert!(heads.insert(v));
        }
        let d = structural_driver_count(&g).unwrap();
        prop_assert!(d.drivers >= 1 && d.drivers <= d.active_nodes);
        prop_assert!(d.density > 0.0 && d.density <= 1.0);
        if m.size() == g.active_node_count() {
            prop_assert_eq!(d.drivers, 1);
        }
    }

    #[test]
    fn one_edge_deletion_moves_matching_by_at_most_one(g in graph_strategy(), pick in any::<prop::sample::Index>()) {
        let edges: Vec<_> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v) = edges[pick.index(edges.len())];
        let before = maximum_matching(&g).size();
        let nd_before = structural_driver_count(&g).unwrap().drivers;
        let mut h = g.clone();
        h.remove_edge(u, v).unwrap();
        let after = maximum_matching(&h).size();
        prop_assert!(after == before || after + 1 == before);
        let nd_after = structural_driver_count(&h).unwrap().drivers;
        prop_assert!(nd_after.abs_diff(nd_before) <= 1);
    }

    #[test]
    fn relabelling_preserves_driver_counts(g in graph_strategy(), seed in any::<u64>()) {
        let n = g.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = RngStream::new(seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let h = DirectedGraph::from_edges(n, g.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap();
        prop_assert_eq!(structural_driver_count(&g).unwrap(), structural_driver_count(&h).unwrap());
        prop_assert_eq!(
            state_driver_count(&g, StateMode::ZeroEigenvalue).unwrap(),
            state_driver_count(&h, StateMode::ZeroEigenvalue).unwrap()
        );
    }
}
