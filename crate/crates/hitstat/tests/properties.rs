//! Randomized invariance properties: the edge-list format round-trips,
//! every reported quantity is invariant under vertex relabeling, graph
//! distance is a metric, the interval scan ignores padding, and the scalar
//! inequality behind the edge-entropy argument holds pointwise.

use proptest::prelude::*;

use hitstat::analysis::{entropy_sum, profile, Layer};
use hitstat::bounds::interval_ratio_scan;
use hitstat::chain::srw_chain;
use hitstat::graph::{self, parse_graph, serialize_graph, Graph};
use hitstat::linear::hitting_distribution;

/// Relative tolerance for quantities recomputed after a relabeling.
const RELABEL_TOL: f64 = 1e-10;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RELABEL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..=24, 0.1f64..0.9, any::<u64>())
        .prop_map(|(n, p, seed)| graph::random_connected(n, p, seed).unwrap())
}

fn tree_with_permutation() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (3usize..=24, any::<u64>()).prop_flat_map(|(n, seed)| {
        let g = graph::random_tree(n, seed).unwrap();
        let ids: Vec<usize> = (0..n).collect();
        (Just(g), Just(ids).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_serialization_round_trips(g in connected_graph()) {
        let text = serialize_graph(&g);
        let parsed = parse_graph(&text).expect("serialized graphs parse");
        prop_assert_eq!(parsed.vertex_count(), g.vertex_count());
        prop_assert_eq!(parsed.edges(), g.edges());
        prop_assert_eq!(serialize_graph(&parsed), text);
    }

    #[test]
    fn profiles_are_invariant_under_relabeling((g, perm) in tree_with_permutation()) {
        let n = g.vertex_count();
        let base = profile(&srw_chain(&g), 0, n - 1, Layer::Graph).unwrap();
        let relabeled = g.relabel(&perm);
        let moved = profile(&srw_chain(&relabeled), perm[0], perm[n - 1], Layer::Graph).unwrap();
        prop_assert!(close(base.mean, moved.mean), "mean {} vs {}", base.mean, moved.mean);
        prop_assert!(
            close(base.variance, moved.variance),
            "variance {} vs {}",
            base.variance,
            moved.variance
        );
        prop_assert!(
            close(base.effective_resistance, moved.effective_resistance),
            "resistance {} vs {}",
            base.effective_resistance,
            moved.effective_resistance
        );
        prop_assert!(
            close(base.escape_product, moved.escape_product),
            "escape product {} vs {}",
            base.escape_product,
            moved.escape_product
        );
        let e0 = entropy_sum(&base).value;
        let e1 = entropy_sum(&moved).value;
        prop_assert!(close(e0, e1), "entropy {e0} vs {e1}");
        for u in 0..n {
            prop_assert!(
                close(base.hit_mean[u], moved.hit_mean[perm[u]]),
                "hit mean at {u}: {} vs {}",
                base.hit_mean[u],
                moved.hit_mean[perm[u]]
            );
        }
    }

    #[test]
    fn graph_distance_is_a_metric(
        (g, x, y, z) in connected_graph().prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), 0..n, 0..n, 0..n)
        })
    ) {
        prop_assert_eq!(g.distance(x, y), g.distance(y, x));
        prop_assert_eq!(g.distance(x, x), 0);
        prop_assert!(g.distance(x, z) <= g.distance(x, y) + g.distance(y, z));
        if x != y {
            prop_assert!(g.distance(x, y) >= 1);
        }
    }

    #[test]
    fn interval_scan_ignores_trailing_zeros(
        n in 3usize..=14,
        seed in any::<u64>(),
        window in 1usize..=8,
        pad in 1usize..=50,
    ) {
        let g = graph::random_tree(n, seed).unwrap();
        let chain = srw_chain(&g);
        let d = hitting_distribution(&chain, 0, n - 1, 1e-12).unwrap();
        let base = interval_ratio_scan(&d, window);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let mut padded = d.clone();
        padded.probs.extend(std::iter::repeat(0.0).take(pad));
        let again = interval_ratio_scan(&padded, window).unwrap();
        prop_assert_eq!(base.t_star, again.t_star);
        prop_assert_eq!(base.value, again.value);
        prop_assert_eq!(base.ratio, again.ratio);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn chi_square_step_is_below_the_log_step(a in 1e-2f64..1e2, b in 1e-2f64..1e2) {
        let lhs = (a - b) * (a - b) / (a + b);
        let rhs = 0.5 * (a - b) * (a.ln() - b.ln());
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()), "lhs {lhs} rhs {rhs}");
    }
}
