//! One trial: draw a hidden instance, run the learner, compare.

use std::time::Instant;

use gql_core::cgt::{cgt_solve, JuntaGroupTest};
use gql_core::fourier_learners::{learn_high_influence_junta, learn_symmetric_junta};
use gql_core::or_learners::{
    learn_bipartite_edges, learn_clique_or, learn_graph_or, learn_star_or, OrGraphOptions,
};
use gql_core::parity_learners::{
    family_sample_count, learn_arbitrary_parity, learn_bounded_degree, learn_bounded_edges_parity,
    learn_clique_graphstate, learn_from_family_with, learn_star_graphstate, learn_subgraph_of,
    BoundedDegreeOptions, RowResult,
};
use gql_core::{FamilyKind, Graph, GraphOracle, Junta, JuntaOracle, QueryLedger, TruthTable};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, GridPoint, LearnerId};
use crate::{splitmix64, HarnessError};

/// One output row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub or_queries: u64,
    pub parity_queries: u64,
    pub copies: u64,
    pub charged_quantum: u64,
    pub success: bool,
    pub ms: f64,
}

struct Outcome {
    m: usize,
    d: usize,
    k: usize,
    or_queries: u64,
    parity_queries: u64,
    copies: u64,
    charged_quantum: u64,
    success: bool,
}

impl Outcome {
    fn from_graph(ledger: &QueryLedger, hidden: &Graph, d: usize, k: usize, success: bool) -> Self {
        Self {
            m: hidden.m(),
            d,
            k,
            or_queries: ledger.or_query(),
            parity_queries: ledger.parity_query(),
            copies: ledger.graph_state_copy(),
            charged_quantum: ledger.charged_quantum(),
            success,
        }
    }
}

fn instance_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Instance(e.to_string())
}

/// Runs trial `seed` at grid point `point` of `config`.
pub fn run_trial(config: &ExperimentConfig, point: usize, seed: u64) -> Result<TrialRecord, HarnessError> {
    let p = &config.grid[point];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle_seed = splitmix64(seed ^ 0x5851_F42D_4C95_7F2D);
    let start = Instant::now();
    let out = if config.learner.uses_junta() {
        junta_trial(config, p, &mut rng, oracle_seed)?
    } else {
        graph_trial(config, p, &mut rng, oracle_seed)?
    };
    let ms = if config.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(TrialRecord {
        seed,
        n: p.n,
        m: out.m,
        d: out.d,
        k: out.k,
        or_queries: out.or_queries,
        parity_queries: out.parity_queries,
        copies: out.copies,
        charged_quantum: out.charged_quantum,
        success: out.success,
        ms,
    })
}

fn graph_trial(
    config: &ExperimentConfig,
    p: &GridPoint,
    rng: &mut ChaCha8Rng,
    oracle_seed: u64,
) -> Result<Outcome, HarnessError> {
    use LearnerId::*;
    let backend = config.backend.backend(config.c);
    match config.learner {
        Cgt => return cgt_trial(config, p, rng, oracle_seed),
        FamilyParity => {
            let members = p.candidates.as_ref().expect("validated").members(p.n);
            let hidden = members[rng.gen_range(0..members.len())].clone();
            let k = p.samples.unwrap_or_else(|| family_sample_count(members.len()));
            let mut h = GraphOracle::new(hidden.clone(), oracle_seed);
            let ok = learn_from_family_with(&mut h, &members, k).ok() == Some(hidden.clone());
            return Ok(Outcome::from_graph(
                h.ledger(),
                &hidden,
                hidden.max_degree(),
                k,
                ok,
            ));
        }
        OrBipartite => {
            let half = p.n / 2;
            let prob = p.p.expect("validated");
            let edges: Vec<(usize, usize)> = (0..half)
                .flat_map(|a| (half..p.n).map(move |b| (a, b)))
                .filter(|_| rng.gen_bool(prob))
                .collect();
            let hidden = Graph::from_edges(p.n, edges).map_err(instance_err)?;
            let a: Vec<usize> = (0..half).collect();
            let b: Vec<usize> = (half..p.n).collect();
            let mut h = GraphOracle::new(hidden.clone(), oracle_seed);
            let ok = learn_bipartite_edges(&mut h, &a, &b, &backend).is_ok_and(|e| e == hidden.edges());
            return Ok(Outcome::from_graph(
                h.ledger(),
                &hidden,
                hidden.max_degree(),
                0,
                ok,
            ));
        }
        _ => {}
    }
    let spec = p.family_spec().expect("validated");
    let drawn = spec.generate(rng).map_err(instance_err)?;
    let (hidden, base) = match (config.learner, p.keep) {
        (SubgraphOf, Some(keep)) => {
            let kept = drawn
                .edges()
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(keep))
                .collect::<Vec<_>>();
            (Graph::from_edges(p.n, kept).map_err(instance_err)?, drawn)
        }
        _ => (drawn.clone(), drawn),
    };
    let mut h = GraphOracle::new(hidden.clone(), oracle_seed);
    let family_k = match spec.kind {
        FamilyKind::Clique { k } | FamilyKind::Matching { k } | FamilyKind::HamiltonianCycle { k } => k,
        _ => 0,
    };
    let d = p.d.unwrap_or_else(|| hidden.max_degree());
    let ok = match config.learner {
        OrGraph => {
            let hint = if config.m_hint { Some(hidden.m()) } else { p.m };
            let opts = OrGraphOptions {
                backend,
                m_hint: hint,
                degree_bound: p.d,
            };
            learn_graph_or(&mut h, &opts, rng).ok() == Some(hidden.clone())
        }
        OrStar => {
            learn_star_or(&mut h, &backend, rng)
                .ok()
                .and_then(|s| s.to_graph(p.n).ok())
                == Some(hidden.clone())
        }
        OrClique => learn_clique_or(&mut h, family_k, &backend, rng)
            .is_ok_and(|c| Graph::clique_on(p.n, &c) == hidden),
        BoundedDegree => {
            let opts = BoundedDegreeOptions {
                m_hint: if config.m_hint { Some(hidden.m()) } else { p.m },
                slack: config.slack,
                ..Default::default()
            };
            learn_bounded_degree(&mut h, d, &opts).is_ok_and(|res| {
                (0..p.n).all(|v| {
                    let expected = match hidden.degree(v) {
                        0 => RowResult::Isolated,
                        deg if deg > d => RowResult::OverDegree,
                        _ => RowResult::Neighbors(hidden.neighbors(v).to_vec()),
                    };
                    res.rows[v] == expected
                })
            })
        }
        SubgraphOf => learn_subgraph_of(&mut h, &base).ok() == Some(hidden.clone()),
        BoundedEdgesParity => {
            let m = p.m.unwrap_or(hidden.m());
            learn_bounded_edges_parity(&mut h, m).ok() == Some(hidden.clone())
        }
        ArbitraryParity => learn_arbitrary_parity(&mut h).ok() == Some(hidden.clone()),
        StarGraphstate => {
            learn_star_graphstate(&mut h)
                .ok()
                .and_then(|(c, leaves)| Graph::star(p.n, c, &leaves).ok())
                == Some(hidden.clone())
        }
        CliqueGraphstate => {
            learn_clique_graphstate(&mut h).is_ok_and(|c| Graph::clique_on(p.n, &c) == hidden)
        }
        Cgt | FamilyParity | OrBipartite | SymmetricJunta | HighInfluenceJunta => {
            unreachable!("handled elsewhere")
        }
    };
    Ok(Outcome::from_graph(h.ledger(), &hidden, d, family_k, ok))
}

/// Group testing for a uniformly random `m`-subset of `n` items, tested
/// through an OR junta.
fn cgt_trial(
    config: &ExperimentConfig,
    p: &GridPoint,
    rng: &mut ChaCha8Rng,
    oracle_seed: u64,
) -> Result<Outcome, HarnessError> {
    let m = p.m.expect("validated");
    let mut hidden: Vec<usize> = sample(rng, p.n, m).into_vec();
    hidden.sort_unstable();
    let junta = Junta::new(p.n, hidden.clone(), TruthTable::or(m)).map_err(instance_err)?;
    let mut o = JuntaOracle::new(junta, oracle_seed).map_err(instance_err)?;
    let bound = p.d.or(Some(m));
    let found = cgt_solve(
        &config.backend.backend(config.c),
        &mut JuntaGroupTest::new(&mut o),
        bound,
    );
    let ledger = o.ledger();
    Ok(Outcome {
        m,
        d: bound.unwrap_or(0),
        k: m,
        or_queries: ledger.junta_query(),
        parity_queries: 0,
        copies: 0,
        charged_quantum: ledger.charged_quantum(),
        success: found.ok() == Some(hidden),
    })
}

fn junta_trial(
    config: &ExperimentConfig,
    p: &GridPoint,
    rng: &mut ChaCha8Rng,
    oracle_seed: u64,
) -> Result<Outcome, HarnessError> {
    let f = p.function.as_ref().expect("validated");
    let g = f.build(rng)?;
    let junta = Junta::random(p.n, g.clone(), rng).map_err(instance_err)?;
    let truth = junta.sorted_vars();
    let mut o = JuntaOracle::new(junta, oracle_seed).map_err(instance_err)?;
    let delta = p.delta.unwrap_or(0.01);
    let (found, level) = match config.learner {
        LearnerId::SymmetricJunta => {
            let l = p.level.or(f.default_level()).expect("validated");
            (learn_symmetric_junta(&mut o, &g, l, delta), l)
        }
        _ => (
            learn_high_influence_junta(&mut o, &g, p.eps.expect("validated"), delta),
            0,
        ),
    };
    let ledger = o.ledger();
    Ok(Outcome {
        m: 0,
        d: level,
        k: g.arity(),
        or_queries: 0,
        parity_queries: 0,
        copies: 0,
        charged_quantum: ledger.charged_quantum() + ledger.junta_query(),
        success: found.ok() == Some(truth),
    })
}
