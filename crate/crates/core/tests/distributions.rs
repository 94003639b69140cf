//! Samplers used by the oracles against the exact state-vector simulator.

use std::collections::HashMap;

use gql_core::quantum_sim::{bell_distribution, build_graph_state, fourier_sampling_distribution};
use gql_core::{
    BitVector, FamilyKind, FamilySpec, Graph, GraphOracle, Junta, JuntaOracle, Statevector64, TruthTable,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 40_000;

fn mask(v: &BitVector) -> usize {
    v.iter_ones().map(|i| 1usize << i).sum()
}

fn tv(empirical: &HashMap<usize, usize>, exact: &[f64], draws: usize) -> f64 {
    let mut dist = 0.0;
    for (i, &p) in exact.iter().enumerate() {
        let q = *empirical.get(&i).unwrap_or(&0) as f64 / draws as f64;
        dist += (p - q).abs();
    }
    let outside: usize = empirical
        .iter()
        .filter(|(&i, _)| i >= exact.len())
        .map(|(_, c)| c)
        .sum();
    0.5 * (dist + outside as f64 / draws as f64)
}

fn graphs(r: &mut ChaCha8Rng) -> Vec<Graph> {
    let mut out = vec![
        Graph::empty(3),
        Graph::complete(4),
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap(),
        Graph::star(5, 2, &[0, 1, 4]).unwrap(),
    ];
    for m in [3, 6, 9] {
        out.push(
            FamilySpec::new(6, FamilyKind::FixedEdgeCount { m })
                .generate(r)
                .unwrap(),
        );
    }
    out
}

#[test]
fn bell_samples_match_two_copy_measurement() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for (seed, g) in graphs(&mut r).into_iter().enumerate() {
        let n = g.n();
        let exact: Vec<f64> = bell_distribution(&build_graph_state::<f64>(&g).unwrap())
            .unwrap()
            .into_iter()
            .map(|o| o.probability)
            .collect();
        let mut h = GraphOracle::new(g.clone(), seed as u64);
        let mut counts = HashMap::new();
        for _ in 0..DRAWS {
            let (s, y) = h.bell_sample();
            *counts.entry((mask(&s) << n) | mask(&y)).or_insert(0) += 1;
        }
        assert!(tv(&counts, &exact, DRAWS) < 0.03, "{g:?}");
    }
}

#[test]
fn hadamard_samples_match_simulated_graph_state() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for (seed, g) in graphs(&mut r).into_iter().enumerate() {
        let mut psi: Statevector64 = build_graph_state(&g).unwrap();
        psi.apply_h_all();
        let exact = psi.probabilities();
        let mut h = GraphOracle::new(g.clone(), seed as u64);
        let mut counts = HashMap::new();
        for _ in 0..DRAWS {
            *counts
                .entry(mask(&h.graphstate_hadamard_sample().unwrap()))
                .or_insert(0) += 1;
        }
        assert!(tv(&counts, &exact, DRAWS) < 0.02, "{g:?}");
    }
}

#[test]
fn or_fourier_samples_match_simulation() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for (seed, g) in graphs(&mut r).into_iter().enumerate() {
        let n = g.n();
        let f = TruthTable::from_fn(n, |x| g.has_edge_within(&BitVector::from_u64(n, x as u64))).unwrap();
        let exact: Vec<f64> = fourier_sampling_distribution(&f).unwrap();
        let mut h = GraphOracle::new(g.clone(), seed as u64);
        let mut counts = HashMap::new();
        for _ in 0..DRAWS {
            *counts
                .entry(mask(&h.or_fourier_sample(&BitVector::ones(n)).unwrap()))
                .or_insert(0) += 1;
        }
        assert!(tv(&counts, &exact, DRAWS) < 0.02, "{g:?}");
    }
}

#[test]
fn junta_fourier_samples_match_simulation() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for (seed, k) in [2usize, 4, 6].into_iter().enumerate() {
        let g = TruthTable::random(k, &mut r).unwrap();
        let exact: Vec<f64> = fourier_sampling_distribution(&g).unwrap();
        let junta = Junta::new(k, (0..k).collect(), g).unwrap();
        let mut o = JuntaOracle::new(junta, seed as u64).unwrap();
        let mut counts = HashMap::new();
        for _ in 0..DRAWS {
            *counts.entry(mask(&o.fourier_sample())).or_insert(0) += 1;
        }
        assert!(tv(&counts, &exact, DRAWS) < 0.03, "k={k}");
    }
}
