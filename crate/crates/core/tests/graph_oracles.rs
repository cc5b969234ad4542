mod common;

use approx::assert_abs_diff_eq;
use perfal::graph::{betweenness, closeness, pagerank, Digraph, MetricVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn metric_vector_matches_brute_force_on_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..500 {
        let g = random_small_digraph(&mut rng);
        let got = MetricVector::compute(&g).to_vec();
        let want = metric_oracle(&g);
        for (i, name) in MetricVector::NAMES.iter().enumerate() {
            assert!(
                (got[i] - want[i]).abs() <= 1e-9,
                "case {case} slot {name}: got {}, oracle {}",
                got[i],
                want[i]
            );
        }
    }
}

#[test]
fn centralities_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let g = random_small_digraph(&mut rng);
        for (a, b) in betweenness(&g, true).iter().zip(betweenness_by_paths(&g)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
        for (a, b) in closeness(&g).iter().zip(closeness_oracle(&g)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
        for (a, b) in pagerank(&g).iter().zip(pagerank_oracle(&g, 0.85)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-7);
        }
    }
}

#[test]
fn undirected_betweenness_halves_the_symmetric_directed_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let n = rng.gen_range(2..8);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        let g = Digraph::from_undirected(n, pairs);
        for (u, d) in betweenness(&g, false).iter().zip(betweenness_by_paths(&g)) {
            assert_abs_diff_eq!(*u, d / 2.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn tree_sim_is_zero_on_trees_and_one_on_complete_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let n = rng.gen_range(3..=50);
        assert_eq!(MetricVector::compute(&random_tree(n, &mut rng)).tree_sim, 0.0, "tree n={n}");
        assert_eq!(MetricVector::compute(&complete(n)).tree_sim, 1.0, "complete n={n}");
    }
}

fn arb_digraph() -> impl Strategy<Value = Digraph> {
    (1usize..12).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..(n * n)).prop_map(move |es| Digraph::from_edges(n, es))
    })
}

fn arb_graph_and_perm() -> impl Strategy<Value = (Digraph, Vec<usize>)> {
    arb_digraph().prop_flat_map(|g| {
        let n = g.node_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn arb_connected() -> impl Strategy<Value = Digraph> {
    (2usize..12).prop_flat_map(|n| {
        let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n), 0..n * 2);
        (tree, extra).prop_map(move |(tree, extra)| {
            let mut g = Digraph::new(n);
            for (i, p) in tree.iter().enumerate() {
                g.add_edge(i + 1, p.index(i + 1));
            }
            for (u, v) in extra {
                g.add_edge(u, v);
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metrics_survive_relabeling((g, perm) in arb_graph_and_perm()) {
        let a = MetricVector::compute(&g).to_vec();
        let b = MetricVector::compute(&g.permuted(&perm)).to_vec();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn bounded_metrics_stay_in_range(g in arb_digraph()) {
        let m = MetricVector::compute(&g);
        for v in [m.edge_density, m.gcc, m.transitivity, m.tree_sim, m.global_efficiency, m.local_efficiency] {
            prop_assert!((0.0..=1.0).contains(&v), "{m:?}");
        }
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&m.assortativity));
    }

    #[test]
    fn diameter_bounds_path_length_on_connected_graphs(g in arb_connected()) {
        let m = MetricVector::compute(&g);
        prop_assert!(m.diameter + 1e-12 >= m.char_path_length);
    }

    #[test]
    fn transitivity_equals_gcc_on_regular_graphs(n in 3usize..40, full in any::<bool>()) {
        let g = if full { complete(n) } else { cycle(n) };
        let m = MetricVector::compute(&g);
        prop_assert!((m.transitivity - m.gcc).abs() < 1e-12);
    }
}
