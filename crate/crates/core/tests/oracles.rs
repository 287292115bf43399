mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_triads, floyd_warshall_lcc, random_graph};
use smallworld::graph::{parse_edge_list, write_edge_list};
use smallworld::models::{generate_er, generate_null, generate_nw, NullFamily, NullModel, NwParams};
use smallworld::netstats::{average_path_length, clustering_coefficient, triad_census};
use smallworld::rng::substream;
use smallworld::sim::default_null_shape;
use smallworld::swtest::{asymptotic_cutoffs, lognormal_c_params, sigma_matrix};
use smallworld::Graph;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| random_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn triad_census_matches_triple_enumeration(g in graph_strategy(25)) {
        let tc = triad_census(&g);
        let (t, v) = brute_triads(&g);
        prop_assert_eq!(tc.triangles, t);
        prop_assert_eq!(tc.open, v);
        prop_assert_eq!(tc.connected, 3 * t + v);
        prop_assert_eq!(tc.edges, g.edge_count() as u64);
    }

    #[test]
    fn path_length_matches_floyd_warshall(g in graph_strategy(40)) {
        let pl = average_path_length(&g);
        let (sum, pairs, size) = floyd_warshall_lcc(&g);
        prop_assert_eq!(pl.distance_sum, sum);
        prop_assert_eq!(pl.pair_count, pairs);
        prop_assert_eq!(pl.lcc_size, size);
    }

    #[test]
    fn statistics_are_invariant_under_relabeling(g in graph_strategy(30), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.node_count()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = g.permuted(&perm).unwrap();
        prop_assert_eq!(triad_census(&g), triad_census(&h));
        let (a, b) = (average_path_length(&g), average_path_length(&h));
        prop_assert_eq!(a.lcc_size, b.lcc_size);
        // ties between equal-size components may pick a different one, but
        // the mean over a largest component is only invariant when it is unique
        let comps = smallworld::graph::connected_components(&g);
        let top = comps.sizes.values().filter(|&&s| s == a.lcc_size).count();
        if top == 1 {
            prop_assert_eq!(a.distance_sum, b.distance_sum);
            prop_assert_eq!(a.pair_count, b.pair_count);
        }
    }

    #[test]
    fn edge_list_round_trips(g in graph_strategy(30)) {
        let text = write_edge_list(&g, None);
        let parsed = parse_edge_list(&text).unwrap();
        let mut back: Vec<(usize, usize)> = parsed
            .graph
            .edges()
            .map(|(u, v)| {
                let a: usize = parsed.labels[u].parse().unwrap();
                let b: usize = parsed.labels[v].parse().unwrap();
                (a.min(b), a.max(b))
            })
            .collect();
        back.sort_unstable();
        let orig: Vec<(usize, usize)> = g.edges().collect();
        prop_assert_eq!(back, orig);
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>(), n in 5usize..60, p in 0.0f64..1.0) {
        let a = generate_er(n, p, &mut substream(seed, &[3])).unwrap();
        let b = generate_er(n, p, &mut substream(seed, &[3])).unwrap();
        prop_assert_eq!(a, b);
        let shape = default_null_shape(NullFamily::Dcsbm, n).unwrap();
        let m = shape.with_mean_degree(2.0).unwrap();
        let a = generate_null(&m, &mut substream(seed, &[4])).unwrap();
        let b = generate_null(&m, &mut substream(seed, &[4])).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn closing_a_triangle_changes_clustering_by_the_triple_identity(g in graph_strategy(25), pick in any::<u64>()) {
        // candidate edges (u, w) with a common neighbour and not yet present
        let n = g.node_count();
        let mut candidates = Vec::new();
        for u in 0..n {
            for w in u + 1..n {
                if !g.has_edge(u, w) && g.neighbors(u).iter().any(|&x| g.has_edge(x as usize, w)) {
                    candidates.push((u, w));
                }
            }
        }
        prop_assume!(!candidates.is_empty());
        let (u, w) = candidates[(pick % candidates.len() as u64) as usize];
        let h = Graph::from_edges(n, g.edges().chain(std::iter::once((u, w)))).unwrap();
        let (a, b) = (triad_census(&g), triad_census(&h));
        // the new edge closes one triangle per common neighbour and opens
        // deg(u) + deg(w) new connected triples
        let common = g.neighbors(u).iter().filter(|&&x| g.has_edge(x as usize, w)).count() as u64;
        let new_triples = (g.degree(u) + g.degree(w)) as u64;
        prop_assert_eq!(b.triangles, a.triangles + common);
        prop_assert_eq!(b.connected, a.connected + new_triples);
        // C rises exactly when common * S >= T * (deg u + deg w)
        let before = clustering_coefficient(&a).value;
        let after = clustering_coefficient(&b).value;
        let lhs = common as u128 * a.connected as u128;
        let rhs = a.triangles as u128 * new_triples as u128;
        if lhs != rhs {
            prop_assert_eq!(after > before, lhs > rhs, "C {} -> {}", before, after);
        }
    }

    #[test]
    fn sigma_entries_are_finite_and_symmetric(n in 3usize..5000, p in 1e-6f64..0.999_999) {
        let s = sigma_matrix(n, p).unwrap();
        prop_assert!(s.s11.is_finite() && s.s12.is_finite() && s.s22.is_finite());
        prop_assert!(s.s11 >= 0.0 && s.s22 >= 0.0);
        prop_assert_eq!(s.s12, s.s21());
        prop_assert!(lognormal_c_params(n, p).unwrap().s2 > 0.0);
    }

    #[test]
    fn nw_lattice_limit_ignores_seed(seed in any::<u64>(), delta in 1usize..8) {
        let n = 60;
        let params = NwParams::new(n, delta as f64, 1.0, NullModel::er(n, 0.5).unwrap()).unwrap();
        let g = generate_nw(&params, &mut substream(seed, &[])).unwrap();
        prop_assert_eq!(g, smallworld::models::generate_ring_lattice(n, delta).unwrap());
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    // enough precision for a 1e-12 relative check
    let scale = BigInt::from(10u64).pow(30);
    let scaled = (r * BigRational::from_integer(scale.clone())).round().to_integer();
    scaled.to_string().parse::<f64>().unwrap() / 1e30
}

#[test]
fn sigma_matches_exact_rational_evaluation() {
    let n = 100i64;
    let p = rat(1, 10);
    let one = rat(1, 1);
    let q = &one - &p;
    let nm2 = rat(n - 2, 1);
    let c3 = rat(n * (n - 1) * (n - 2) / 6, 1);
    let factor = rat(3, 1) * &nm2 * &c3 * &p * &q;
    let p2 = &p * &p;
    let p3 = &p2 * &p;
    let p4 = &p3 * &p;
    let s11 = &factor * (rat(4, 1) * &p2 + &p * &q / &nm2);
    let s12 = &factor * (rat(2, 1) * &p3 + &p2 * &q / &nm2);
    let s22 = &factor * (&p4 + &p2 * (&one + &p - rat(2, 1) * &p2) / (rat(3, 1) * &nm2));

    let s = sigma_matrix(100, 0.1).unwrap();
    for (got, want) in [(s.s11, &s11), (s.s12, &s12), (s.s22, &s22)] {
        let want = to_f64(want);
        assert!(((got - want) / want).abs() < 1e-12, "got {got}, exact {want}");
    }

    // s2 from the same exact entries
    let p5 = &p4 * &p;
    let p6 = &p5 * &p;
    let s2 = (&s22 / &p6 + &s11 / (rat(9, 1) * &p4) - rat(2, 1) * &s12 / (rat(3, 1) * &p5)) / (&c3 * &c3);
    let want = to_f64(&s2);
    let got = lognormal_c_params(100, 0.1).unwrap().s2;
    assert!(((got - want) / want).abs() < 1e-10, "s2 got {got}, exact {want}");
}

#[test]
fn k2_for_n1000_p001_is_6_0003() {
    let c = asymptotic_cutoffs(1000, 0.01, 0.05, 1e-4).unwrap();
    assert_eq!(format!("{:.11e}", c.k2), format!("{:.11e}", 6.0003));
}

#[test]
fn lattice_clustering_matches_enumeration() {
    let g = smallworld::models::generate_ring_lattice(20, 2).unwrap();
    let (t, v) = brute_triads(&g);
    let c = clustering_coefficient(&triad_census(&g)).value;
    assert_eq!(c, 3.0 * t as f64 / (3 * t + v) as f64);
    assert_eq!(c, 0.5);
}

#[test]
fn large_sparse_graph_matches_oracles() {
    // more than 64 nodes exercises several BFS batches
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let g = random_graph(150, 0.015, &mut rng);
        let pl = average_path_length(&g);
        let (sum, pairs, size) = floyd_warshall_lcc(&g);
        assert_eq!((pl.distance_sum, pl.pair_count, pl.lcc_size), (sum, pairs, size));
        let tc = triad_census(&g);
        assert_eq!((tc.triangles, tc.open), brute_triads(&g));
    }
}
