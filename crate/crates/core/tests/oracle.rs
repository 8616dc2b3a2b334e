use contmean::aggregate::{continuous_mean, Backend};
use contmean::closed_forms::tree_mean;
use contmean::graph::{generate, GeneratorSpec, GraphKind, WeightSpec, WeightedGraph};
use contmean::oracle::{oracle_graph_mean, oracle_pair_mean, OracleConfig};
use contmean::paths::all_pairs_distances;

fn oracle(g: &WeightedGraph, n: usize) -> f64 {
    oracle_graph_mean(g, &all_pairs_distances(g), &OracleConfig::new(n).unwrap()).unwrap()
}

#[test]
fn error_shrinks_at_least_linearly() {
    let unit = WeightSpec::Uniform(1.0);
    let tree = generate(GraphKind::RandomTree, 6, &WeightSpec::Random { lo: 0.5, hi: 2.0 }, 9).unwrap();
    let tree_target = tree_mean(&tree).unwrap();
    let cases = [
        (generate(GraphKind::Complete, 4, &unit, 0).unwrap(), 17.0 / 18.0),
        (WeightedGraph::from_triples(4, &[(0, 1, 2.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap(), 4.0 / 3.0),
        (tree, tree_target),
    ];
    for (g, target) in cases {
        let errors: Vec<f64> = [64, 128, 256, 512].iter().map(|&n| (oracle(&g, n) - target).abs()).collect();
        for w in errors.windows(2) {
            assert!(w[0] / w[1] >= 2.0 / 1.5, "{errors:?}");
        }
    }
}

#[test]
fn cycles_are_reproduced_exactly() {
    let c = generate(GraphKind::Cycle, 5, &WeightSpec::Uniform(1.0), 0).unwrap();
    assert!((oracle(&c, 64) - 5.0 / 4.0).abs() < 1e-12);
}

#[test]
fn agrees_with_backends_on_random_graphs() {
    for seed in 0..10 {
        let g = GeneratorSpec::new(GraphKind::RandomConnected, 6, WeightSpec::Random { lo: 0.5, hi: 2.0 })
            .seed(seed)
            .edges(8)
            .build()
            .unwrap();
        let reference = oracle(&g, 256);
        for b in [Backend::Spt, Backend::Roof] {
            let got = continuous_mean(&g, b).unwrap().value;
            assert!((got - reference).abs() <= 5e-3 * reference);
        }
    }
}

#[test]
fn pair_values() {
    let g = generate(GraphKind::Path, 2, &WeightSpec::Uniform(3.0), 0).unwrap();
    let dm = all_pairs_distances(&g);
    let cfg = OracleConfig::new(100).unwrap();
    // Midpoint samples of |s - t| on a unit segment average (N² - 1) / (3N²).
    assert!((oracle_pair_mean(&g, &dm, 0, 0, &cfg) - 3.0 * (1e4 - 1.0) / 3e4).abs() < 1e-12);
}
