use std::collections::BTreeSet;

use gql_core::cgt::{build_nonadaptive_design, cgt_solve, CgtBackend, GroupTest, NonadaptiveDesign};
use gql_core::fourier_learners::fourier_table;
use gql_core::or_learners::{greedy_coloring, peel_independent_sets, peel_probability};
use gql_core::oracles::BellSource;
use gql_core::parity_learners::{learn_arbitrary_parity, SampleBatch};
use gql_core::{BitVector, FamilyKind, FamilySpec, Graph, GraphOracle, TruthTable};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Plain hidden set with a test counter.
struct Hidden {
    n: usize,
    set: BTreeSet<usize>,
    charged: u64,
    quantum: u64,
}

impl GroupTest for Hidden {
    fn items(&self) -> usize {
        self.n
    }
    fn test(&mut self, pool: &[usize]) -> bool {
        self.charged += 1;
        pool.iter().any(|i| self.set.contains(i))
    }
    fn test_uncharged(&mut self, pool: &[usize]) -> bool {
        pool.iter().any(|i| self.set.contains(i))
    }
    fn charge_quantum(&mut self, amount: u64) {
        self.quantum += amount;
    }
}

fn graph(n: usize, m: usize, seed: u64) -> Graph {
    let m = m.min(n * (n - 1) / 2);
    FamilySpec::new(n, FamilyKind::FixedEdgeCount { m })
        .generate(&mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cgt_recovers_hidden_set(n in 1usize..80, picks in proptest::collection::vec(0usize..80, 0..8)) {
        let set: BTreeSet<usize> = picks.into_iter().filter(|&i| i < n).collect();
        let truth: Vec<usize> = set.iter().copied().collect();
        for backend in [CgtBackend::classical(), CgtBackend::quantum_ideal(), CgtBackend::quantum_time_efficient()] {
            for bound in [None, Some(set.len())] {
                let mut h = Hidden { n, set: set.clone(), charged: 0, quantum: 0 };
                prop_assert_eq!(cgt_solve(&backend, &mut h, bound).unwrap(), truth.clone());
            }
        }
    }

    #[test]
    fn sparse_adjacency_product_matches_matrix(n in 2usize..70, m in 0usize..120, seed in any::<u64>()) {
        let g = graph(n, m, seed);
        let s = BitVector::random(n, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        prop_assert_eq!(g.adjacency_times(&s), g.adjacency().matvec(&s).unwrap());
    }

    #[test]
    fn bell_batches_satisfy_y_equals_ab(n in 2usize..40, m in 0usize..60, seed in any::<u64>()) {
        let g = graph(n, m, seed);
        let mut h = GraphOracle::new(g.clone(), seed);
        let batch = SampleBatch::collect(&mut h, 12, BellSource::GraphState);
        prop_assert_eq!(g.adjacency().mul(&batch.b()).unwrap(), batch.y());
    }

    #[test]
    fn arbitrary_parity_is_exact(n in 1usize..50, m in 0usize..100, seed in any::<u64>()) {
        let g = if n < 2 { Graph::empty(n) } else { graph(n, m, seed) };
        let mut h = GraphOracle::new(g.clone(), seed);
        let learned = learn_arbitrary_parity(&mut h).unwrap();
        prop_assert_eq!(learned, g);
        prop_assert_eq!(h.ledger().parity_query(), 2 * n as u64);
    }

    #[test]
    fn coloring_is_proper_and_small(n in 2usize..40, m in 0usize..80, seed in any::<u64>()) {
        let g = graph(n, m, seed);
        let vertices: Vec<usize> = (0..n).collect();
        let c = greedy_coloring(&vertices, g.edges());
        let bound = ((2.0 * g.m() as f64).sqrt() + 1.0).floor() as usize;
        prop_assert!(c.q() <= bound.max(1));
        for class in c.classes() {
            let set = BitVector::from_indices(n, class.iter().copied());
            prop_assert!(!g.has_edge_within(&set));
        }
    }

    #[test]
    fn peeled_parts_partition_into_independent_sets(n in 2usize..50, m in 0usize..60, seed in any::<u64>()) {
        let g = graph(n, m, seed);
        let mut h = GraphOracle::new(g.clone(), seed);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let d = peel_independent_sets(&mut h, peel_probability(g.m()), &mut r).unwrap();
        prop_assert!(d.is_valid());
        let mut all: Vec<usize> = d.parts.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for part in &d.parts {
            prop_assert!(!g.has_edge_within(&BitVector::from_indices(n, part.iter().copied())));
        }
    }

    #[test]
    fn designs_decode_their_own_outcomes(n in 1usize..15, d in 1usize..3, seed in any::<u64>(), picks in proptest::collection::vec(0usize..15, 0..3)) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let design = if d == 1 {
            NonadaptiveDesign::binary_indexing(n)
        } else {
            build_nonadaptive_design(n, d, 2.0, &mut r).unwrap()
        };
        let support: Vec<usize> = picks.into_iter().filter(|&i| i < n).collect::<BTreeSet<_>>().into_iter().take(d).collect();
        prop_assert_eq!(design.decode(&design.outcomes(&support)).unwrap(), support);
    }

    #[test]
    fn parseval_holds(k in 0usize..10, seed in any::<u64>()) {
        let g = TruthTable::random(k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let t = fourier_table::<f64>(&g).unwrap();
        prop_assert!((t.total_weight() - 1.0).abs() < 1e-12);
    }
}
