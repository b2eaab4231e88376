use proptest::prelude::*;
use qgraph_core::c64;
use qgraph_core::entropy::{entropy, maassen_uffink_bound, variance};
use qgraph_core::graph::{
    girth, nonbacktracking_counts_from, random_regular_graph, sample_lengths, BondIndex, Graph,
    LengthDistribution,
};
use qgraph_core::linalg::{self, cis};
use qgraph_core::quantum::{bond_scattering_matrix, markov_matrix, QuantumGraph};
use qgraph_core::scattering::{equitransmitting_smatrix, legendre_symbol, Boundary};

fn regular_params() -> impl Strategy<Value = (usize, usize, u64)> {
    (3usize..7, 0usize..12, any::<u64>()).prop_filter_map("n·d odd", |(d, extra, seed)| {
        let n = d + 1 + extra;
        ((n * d) % 2 == 0).then_some((n, d, seed))
    })
}

fn unit_vector(raw: &[(f64, f64)]) -> Vec<c64> {
    let mut v: Vec<c64> = raw.iter().map(|&(r, i)| c64::new(r, i)).collect();
    linalg::normalize(&mut v);
    v
}

// every bond sequence b2 -> ... -> b with t transitions, no immediate reversal
fn brute_force_paths(bonds: &BondIndex, b: usize, b2: usize, t: usize) -> u64 {
    fn go(bonds: &BondIndex, cur: usize, left: usize, target: usize) -> u64 {
        if left == 0 {
            return (cur == target) as u64;
        }
        let (_, j) = bonds.bond(cur);
        let mut n = 0;
        for (next, &(i2, k)) in bonds.bonds().iter().enumerate() {
            if i2 == j && k != bonds.bond(cur).0 {
                n += go(bonds, next, left - 1, target);
            }
        }
        n
    }
    go(bonds, b2, t, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn regular_graphs_are_simple_connected_regular((n, d, seed) in regular_params()) {
        let g = random_regular_graph(n, d, seed).unwrap();
        prop_assert_eq!(g.vertex_count(), n);
        prop_assert_eq!(g.edge_count(), n * d / 2);
        prop_assert!(g.degrees().iter().all(|&x| x == d));
        prop_assert!(g.is_connected());
        for &(a, b) in g.edges() {
            prop_assert!(a < b);
        }
        let mut e = g.edges().to_vec();
        e.dedup();
        prop_assert_eq!(e.len(), g.edge_count());
        prop_assert_eq!(&random_regular_graph(n, d, seed).unwrap(), &g);
    }

    #[test]
    fn bond_layout_is_consistent((n, d, seed) in regular_params()) {
        let g = random_regular_graph(n, d, seed).unwrap();
        let bonds = BondIndex::new(&g);
        prop_assert_eq!(bonds.len(), 2 * g.edge_count());
        for b in 0..bonds.len() {
            let (i, j) = bonds.bond(b);
            prop_assert_eq!(bonds.bond(bonds.reverse(b)), (j, i));
            prop_assert_eq!(bonds.edge_of(b), b / 2);
            prop_assert_eq!(g.neighbors(i)[bonds.port(b)], j);
            prop_assert_eq!(bonds.find(i, j), Some(b));
        }
    }

    #[test]
    fn path_counts_match_enumeration((n, d, seed) in regular_params(), t in 1usize..6) {
        prop_assume!(n <= 8);
        let g = random_regular_graph(n, d, seed).unwrap();
        let bonds = BondIndex::new(&g);
        for b2 in [0, bonds.len() - 1] {
            let counts = nonbacktracking_counts_from(&bonds, b2, t);
            for b in 0..bonds.len() {
                prop_assert_eq!(counts[b], brute_force_paths(&bonds, b, b2, t));
            }
            // every walk has (d - 1)^t continuations in total
            prop_assert_eq!(counts.iter().sum::<u64>(), ((d - 1) as u64).pow(t as u32));
        }
    }

    #[test]
    fn short_walks_are_unique_below_girth((n, seed) in (6usize..30, any::<u64>())) {
        let n = n + n % 2;
        let g = random_regular_graph(n, 3, seed).unwrap();
        let gg = girth(&g).finite().unwrap();
        let bonds = BondIndex::new(&g);
        // t < g/2 + 1 transitions cannot close two different routes
        for t in (1..).take_while(|&t| 2 * t < gg + 2) {
            for b2 in 0..bonds.len() {
                prop_assert!(nonbacktracking_counts_from(&bonds, b2, t).iter().all(|&c| c <= 1));
            }
        }
    }

    #[test]
    fn u_is_unitary_and_m_doubly_stochastic(
        (n, d, seed) in regular_params(),
        k in 0.0f64..200.0,
        et in any::<bool>(),
    ) {
        prop_assume!(!et || matches!(d, 4 | 6));
        let g = random_regular_graph(n, d, seed).unwrap();
        let lengths = sample_lengths(g.edge_count(), LengthDistribution::uniform(0.5, 3.0).unwrap(), seed).unwrap();
        let boundary = if et { Boundary::EquiTransmitting } else { Boundary::Neumann };
        let qg = QuantumGraph::new(g, lengths, boundary).unwrap();
        prop_assert!(bond_scattering_matrix(&qg, k).unitarity_deviation() < 1e-11);
        prop_assert!(markov_matrix(&qg).stochastic_deviation() < 1e-11);
    }

    #[test]
    fn legendre_is_multiplicative(a in -500i64..500, b in -500i64..500, pi in 0usize..8) {
        let p = [3u64, 5, 7, 11, 13, 17, 19, 23][pi];
        let ab = legendre_symbol(a * b, p).unwrap();
        prop_assert_eq!(ab, legendre_symbol(a, p).unwrap() * legendre_symbol(b, p).unwrap());
        prop_assert_eq!(legendre_symbol(a + p as i64, p).unwrap(), legendre_symbol(a, p).unwrap());
    }

    #[test]
    fn entropy_ignores_phases_and_order(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..40), shift in 0usize..40, phases in prop::collection::vec(0.0f64..6.3, 40)) {
        prop_assume!(raw.iter().any(|&(r, i)| r * r + i * i > 1e-6));
        let a = unit_vector(&raw);
        let s = entropy(&a).unwrap();
        let rotated: Vec<c64> = a.iter().zip(&phases).map(|(z, &p)| z * cis(p)).collect();
        let mut permuted = a.clone();
        permuted.rotate_left(shift % a.len());
        let scaled: Vec<c64> = a.iter().map(|z| z * 3.7).collect();
        prop_assert!((entropy(&rotated).unwrap() - s).abs() < 1e-12);
        prop_assert!((entropy(&permuted).unwrap() - s).abs() < 1e-12);
        prop_assert!((entropy(&scaled).unwrap() - s).abs() < 1e-12);
        prop_assert!(s >= -1e-15 && s <= (a.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn variance_identity(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..60)) {
        prop_assume!(raw.iter().any(|&(r, i)| r * r + i * i > 1e-6));
        let a = unit_vector(&raw);
        let b = a.len() as f64;
        let fourth: f64 = a.iter().map(|z| z.norm_sqr().powi(2)).sum();
        prop_assert!((variance(&a).unwrap() - (b * fourth - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn uncertainty_relation_for_graph_u((n, d, seed) in regular_params(), k in 0.1f64..50.0, raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 200)) {
        let g = random_regular_graph(n, d, seed).unwrap();
        let lengths = sample_lengths(g.edge_count(), LengthDistribution::uniform(1.0, 2.0).unwrap(), seed ^ 7).unwrap();
        let qg = QuantumGraph::new(g, lengths, Boundary::Neumann).unwrap();
        let u = bond_scattering_matrix(&qg, k).entries;
        let bound = maassen_uffink_bound(u.as_ref(), 1);
        let a = unit_vector(&raw[..qg.bond_count()]);
        let ua = linalg::mat_vec(u.as_ref(), &a);
        prop_assert!(entropy(&a).unwrap() + entropy(&ua).unwrap() >= 2.0 * bound.value - 1e-10);
    }
}

#[test]
fn equitransmitting_matrices_are_exact() {
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        let s = equitransmitting_smatrix(p).unwrap();
        let d = p as usize + 1;
        assert!(s.unitarity_deviation() < 1e-12);
        for i in 0..d {
            assert_eq!(s.get(i, i), c64::new(0.0, 0.0));
            for j in 0..d {
                assert_eq!(s.get(i, j).norm_sqr(), s.get(j, i).norm_sqr());
                if i != j {
                    assert!((s.get(i, j).norm_sqr() - 1.0 / p as f64).abs() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn cycle_u_eigenphases() {
    // on a cycle with Neumann degree 2 each wave runs round untouched
    let n = 7;
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
    let g = Graph::from_edges(n, &edges).unwrap();
    let lengths = sample_lengths(n, LengthDistribution::uniform(1.0, 2.0).unwrap(), 3).unwrap();
    let total = lengths.total();
    let qg = QuantumGraph::new(g, lengths, Boundary::Neumann).unwrap();
    let k = 2.3;
    let ut = linalg::mat_pow(bond_scattering_matrix(&qg, k).entries.as_ref(), n);
    for b in 0..2 * n {
        assert!((ut[(b, b)] - cis(k * total)).norm() < 1e-12);
    }
}
