//! Metered oracle handles over a hidden graph or a hidden junta.
//!
//! Learners see only the query methods; every call is charged to a
//! [`QueryLedger`]. The `reveal` accessors and the uncharged OR query exist for
//! the idealized quantum cost model and for test assertions, and each use is
//! counted in `reveal_used`.

use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2core::BitVector;
use crate::fourier_learners::{fourier_table, walsh_hadamard, FourierTable};
use crate::graphs::Graph;
use crate::truth_table::TruthTable;

/// Largest support (non-isolated vertices) handled by brute-force transforms.
pub const MAX_BRUTE_FORCE_SUPPORT: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid junta: {0}")]
    InvalidJunta(String),
    #[error("no Fourier weight at levels >= {0}")]
    ZeroWeight(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    OrQuery,
    ParityQuery,
    GraphStateCopy,
    ChargedQuantum,
    JuntaQuery,
    BellSample,
    RevealUsed,
}

/// Per-kind query counts. Counts only grow, except through [`QueryLedger::reset`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryLedger {
    or_query: u64,
    parity_query: u64,
    graph_state_copy: u64,
    charged_quantum: u64,
    junta_query: u64,
    bell_samples: u64,
    reveal_used: u64,
}

impl QueryLedger {
    pub fn or_query(&self) -> u64 {
        self.or_query
    }

    pub fn parity_query(&self) -> u64 {
        self.parity_query
    }

    pub fn graph_state_copy(&self) -> u64 {
        self.graph_state_copy
    }

    pub fn charged_quantum(&self) -> u64 {
        self.charged_quantum
    }

    pub fn junta_query(&self) -> u64 {
        self.junta_query
    }

    pub fn bell_samples(&self) -> u64 {
        self.bell_samples
    }

    pub fn reveal_used(&self) -> u64 {
        self.reveal_used
    }

    /// Real OR queries plus charged quantum subroutine cost.
    pub fn or_cost(&self) -> u64 {
        self.or_query + self.charged_quantum
    }

    pub fn get(&self, kind: QueryKind) -> u64 {
        match kind {
            QueryKind::OrQuery => self.or_query,
            QueryKind::ParityQuery => self.parity_query,
            QueryKind::GraphStateCopy => self.graph_state_copy,
            QueryKind::ChargedQuantum => self.charged_quantum,
            QueryKind::JuntaQuery => self.junta_query,
            QueryKind::BellSample => self.bell_samples,
            QueryKind::RevealUsed => self.reveal_used,
        }
    }

    pub fn charge(&mut self, kind: QueryKind, amount: u64) {
        let slot = match kind {
            QueryKind::OrQuery => &mut self.or_query,
            QueryKind::ParityQuery => &mut self.parity_query,
            QueryKind::GraphStateCopy => &mut self.graph_state_copy,
            QueryKind::ChargedQuantum => &mut self.charged_quantum,
            QueryKind::JuntaQuery => &mut self.junta_query,
            QueryKind::BellSample => &mut self.bell_samples,
            QueryKind::RevealUsed => &mut self.reveal_used,
        };
        *slot += amount;
    }

    /// Totals of an audit log.
    pub fn from_log(log: &[(QueryKind, u64)]) -> Self {
        let mut ledger = Self::default();
        for &(kind, amount) in log {
            ledger.charge(kind, amount);
        }
        ledger
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

/// Where a Bell sample's cost is booked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellSource {
    /// Two copies of the graph state.
    #[default]
    GraphState,
    /// Two parity queries in uniform superposition.
    ParityQueries,
}

#[derive(Debug, Clone, Default)]
struct Meter {
    ledger: QueryLedger,
    audit: Option<Vec<(QueryKind, u64)>>,
}

impl Meter {
    fn charge(&mut self, kind: QueryKind, amount: u64) {
        self.ledger.charge(kind, amount);
        if let Some(log) = &mut self.audit {
            log.push((kind, amount));
        }
    }
}

macro_rules! meter_methods {
    () => {
        pub fn ledger(&self) -> &QueryLedger {
            &self.meter.ledger
        }

        /// Clears the ledger and any audit log.
        pub fn reset_ledger(&mut self) {
            self.meter.ledger.reset();
            if let Some(log) = &mut self.meter.audit {
                log.clear();
            }
        }

        /// Starts recording every individual charge.
        pub fn enable_audit(&mut self) {
            self.meter.audit.get_or_insert_with(Vec::new);
        }

        pub fn audit_log(&self) -> Option<&[(QueryKind, u64)]> {
            self.meter.audit.as_deref()
        }

        /// Books the cost of an idealized quantum subroutine.
        pub fn charge_quantum(&mut self, amount: u64) {
            self.meter.charge(QueryKind::ChargedQuantum, amount);
        }
    };
}

/// Oracle access to a hidden graph.
#[derive(Debug, Clone)]
pub struct GraphOracle {
    graph: Graph,
    meter: Meter,
    rng: ChaCha8Rng,
    hadamard: Option<WeightedIndex<f64>>,
}

impl GraphOracle {
    pub fn new(graph: Graph, seed: u64) -> Self {
        Self {
            graph,
            meter: Meter::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            hadamard: None,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    meter_methods!();

    fn check_len(&self, s: &BitVector) {
        assert_eq!(s.len(), self.graph.n(), "query set must have length n");
    }

    /// 1 iff some edge has both endpoints in `s`.
    pub fn or_query(&mut self, s: &BitVector) -> bool {
        self.check_len(s);
        self.meter.charge(QueryKind::OrQuery, 1);
        self.graph.has_edge_within(s)
    }

    /// Number of edges inside `s`, mod 2.
    pub fn parity_query(&mut self, s: &BitVector) -> bool {
        self.check_len(s);
        self.meter.charge(QueryKind::ParityQuery, 1);
        self.graph.edges_within(s) % 2 == 1
    }

    /// `(s, A s)` for uniform `s`, booked as two graph-state copies.
    pub fn bell_sample(&mut self) -> (BitVector, BitVector) {
        self.bell_sample_from(BellSource::GraphState)
    }

    pub fn bell_sample_from(&mut self, source: BellSource) -> (BitVector, BitVector) {
        match source {
            BellSource::GraphState => self.meter.charge(QueryKind::GraphStateCopy, 2),
            BellSource::ParityQueries => self.meter.charge(QueryKind::ParityQuery, 2),
        }
        self.meter.charge(QueryKind::BellSample, 1);
        let s = BitVector::random(self.graph.n(), &mut self.rng);
        let y = self.graph.adjacency_times(&s);
        (s, y)
    }

    /// `A v`, for two parity queries.
    pub fn parity_vector_query(&mut self, v: &BitVector) -> BitVector {
        self.check_len(v);
        self.meter.charge(QueryKind::ParityQuery, 2);
        self.graph.adjacency_times(v)
    }

    /// Measures one copy of the graph state in the Hadamard basis.
    ///
    /// Stars (and single edges) use the closed form: `0`, `e_c`, the leaf
    /// pattern and the leaf pattern plus `e_c`, each with probability 1/4.
    /// Other graphs are transformed exactly when at most
    /// [`MAX_BRUTE_FORCE_SUPPORT`] vertices are non-isolated.
    pub fn graphstate_hadamard_sample(&mut self) -> Result<BitVector, OracleError> {
        let n = self.graph.n();
        if self.graph.m() == 0 {
            self.meter.charge(QueryKind::GraphStateCopy, 1);
            return Ok(BitVector::zeros(n));
        }
        if let Some((center, leaves)) = self.graph.as_star() {
            self.meter.charge(QueryKind::GraphStateCopy, 1);
            let mut out = BitVector::zeros(n);
            if self.rng.gen::<bool>() {
                out.set(center, true);
            }
            if self.rng.gen::<bool>() {
                leaves.iter().for_each(|&l| out.set(l, true));
            }
            return Ok(out);
        }
        let support = self.graph.non_isolated();
        if self.hadamard.is_none() {
            if support.len() > MAX_BRUTE_FORCE_SUPPORT {
                return Err(OracleError::Unsupported(format!(
                    "Hadamard sampling of a non-star graph with {} non-isolated vertices",
                    support.len()
                )));
            }
            let edges = local_edges(&self.graph, &support);
            let table = TruthTable::from_fn(support.len(), |x| {
                edges
                    .iter()
                    .filter(|&&(a, b)| x >> a & 1 == 1 && x >> b & 1 == 1)
                    .count()
                    % 2
                    == 1
            })
            .expect("support within arity cap");
            self.hadamard = Some(squared_spectrum(&table));
        }
        self.meter.charge(QueryKind::GraphStateCopy, 1);
        let sampler = self.hadamard.as_ref().expect("initialized above");
        let local = sampler.sample(&mut self.rng);
        Ok(lift(n, &support, local))
    }

    /// One Fourier sample of `x -> OR(x restricted to s)`, for one OR query.
    ///
    /// The outcome is supported on the non-isolated vertices of the subgraph
    /// induced by `s`. Stars and cliques use closed forms at any size; other
    /// induced subgraphs are transformed exactly up to
    /// [`MAX_BRUTE_FORCE_SUPPORT`] vertices.
    pub fn or_fourier_sample(&mut self, s: &BitVector) -> Result<BitVector, OracleError> {
        self.check_len(s);
        let n = self.graph.n();
        let sub = Graph::from_edges(
            n,
            self.graph
                .edges()
                .iter()
                .copied()
                .filter(|&(i, j)| s.get(i) && s.get(j))
                .collect::<Vec<_>>(),
        )
        .expect("edges of the hidden graph");
        let support = sub.non_isolated();
        let j = support.len();
        if sub.m() == 0 {
            self.meter.charge(QueryKind::OrQuery, 1);
            return Ok(BitVector::zeros(n));
        }
        if let Some((center, leaves)) = sub.as_star() {
            self.meter.charge(QueryKind::OrQuery, 1);
            return Ok(star_or_sample(n, center, &leaves, &mut self.rng));
        }
        if sub.as_clique().is_some() {
            self.meter.charge(QueryKind::OrQuery, 1);
            // Thr_2 on j variables: level l has coefficient
            // -[l = 0] + 2^(1-j) (1 + j - 2l) on each of its C(j, l) subsets.
            let weights: Vec<f64> = (0..=j)
                .map(|l| {
                    let c = 2f64.powi(1 - j as i32) * (1.0 + j as f64 - 2.0 * l as f64)
                        - if l == 0 { 1.0 } else { 0.0 };
                    binomial_f64(j, l) * c * c
                })
                .collect();
            let level = WeightedIndex::new(&weights)
                .expect("weights sum to one")
                .sample(&mut self.rng);
            let picked = index::sample(&mut self.rng, j, level);
            return Ok(BitVector::from_indices(n, picked.iter().map(|i| support[i])));
        }
        if j > MAX_BRUTE_FORCE_SUPPORT {
            return Err(OracleError::Unsupported(format!(
                "OR Fourier sampling over {j} non-isolated vertices"
            )));
        }
        self.meter.charge(QueryKind::OrQuery, 1);
        let edges = local_edges(&sub, &support);
        let table = TruthTable::from_fn(j, |x| {
            edges.iter().any(|&(a, b)| x >> a & 1 == 1 && x >> b & 1 == 1)
        })
        .expect("support within arity cap");
        let local = squared_spectrum(&table).sample(&mut self.rng);
        Ok(lift(n, &support, local))
    }

    /// OR query that is not charged; counted as a reveal.
    pub fn or_query_uncharged(&mut self, s: &BitVector) -> bool {
        self.check_len(s);
        self.meter.charge(QueryKind::RevealUsed, 1);
        self.graph.has_edge_within(s)
    }

    /// The hidden graph; counted as a reveal.
    pub fn reveal(&mut self) -> &Graph {
        self.meter.charge(QueryKind::RevealUsed, 1);
        &self.graph
    }
}

/// A Boolean function of `n` bits equal to `g` applied to the bits in `vars`
/// (variable `i` of `g` reads bit `vars[i]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junta {
    n: usize,
    vars: Vec<usize>,
    g: TruthTable,
}

impl Junta {
    pub fn new(n: usize, vars: Vec<usize>, g: TruthTable) -> Result<Self, OracleError> {
        if vars.len() != g.arity() {
            return Err(OracleError::InvalidJunta(format!(
                "{} variables for a function of arity {}",
                vars.len(),
                g.arity()
            )));
        }
        let mut sorted = vars.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != vars.len() || sorted.last().is_some_and(|&v| v >= n) {
            return Err(OracleError::InvalidJunta(
                "variables must be distinct and below n".into(),
            ));
        }
        Ok(Self { n, vars, g })
    }

    /// `g` placed on a uniformly random ordered set of variables.
    pub fn random<R: Rng + ?Sized>(n: usize, g: TruthTable, rng: &mut R) -> Result<Self, OracleError> {
        if g.arity() > n {
            return Err(OracleError::InvalidJunta(format!(
                "arity {} exceeds n = {n}",
                g.arity()
            )));
        }
        let vars = index::sample(rng, n, g.arity()).into_vec();
        Self::new(n, vars, g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    /// Hidden variables in increasing order.
    pub fn sorted_vars(&self) -> Vec<usize> {
        let mut v = self.vars.clone();
        v.sort_unstable();
        v
    }

    pub fn function(&self) -> &TruthTable {
        &self.g
    }

    pub fn eval(&self, x: &BitVector) -> bool {
        let local = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, &v)| x.get(v))
            .fold(0usize, |acc, (i, _)| acc | 1 << i);
        self.g.eval(local)
    }

    fn lift(&self, local: usize) -> BitVector {
        BitVector::from_indices(
            self.n,
            self.vars
                .iter()
                .enumerate()
                .filter(|(i, _)| local >> i & 1 == 1)
                .map(|(_, &v)| v),
        )
    }
}

/// Oracle access to a hidden junta.
#[derive(Debug, Clone)]
pub struct JuntaOracle {
    junta: Junta,
    table: FourierTable<f64>,
    meter: Meter,
    rng: ChaCha8Rng,
    plain: Option<WeightedIndex<f64>>,
    tails: HashMap<usize, (f64, WeightedIndex<f64>)>,
}

impl JuntaOracle {
    pub fn new(junta: Junta, seed: u64) -> Result<Self, OracleError> {
        let table = fourier_table(junta.function()).map_err(|e| OracleError::Unsupported(e.to_string()))?;
        Ok(Self {
            junta,
            table,
            meter: Meter::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            plain: None,
            tails: HashMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.junta.n()
    }

    meter_methods!();

    /// `f(x)`, one junta query.
    pub fn junta_query(&mut self, x: &BitVector) -> bool {
        assert_eq!(x.len(), self.junta.n(), "input must have length n");
        self.meter.charge(QueryKind::JuntaQuery, 1);
        self.junta.eval(x)
    }

    /// One Fourier sample of `f`: `T` with probability `f^(T)^2`, one query.
    pub fn fourier_sample(&mut self) -> BitVector {
        self.meter.charge(QueryKind::JuntaQuery, 1);
        let sampler = self.plain.get_or_insert_with(|| {
            WeightedIndex::new(self.table.coefficients().iter().map(|c| c * c))
                .expect("Parseval: weights sum to one")
        });
        let local = sampler.sample(&mut self.rng);
        self.junta.lift(local)
    }

    /// One round of amplified Fourier sampling conditioned on `|T| >= l`.
    ///
    /// Charges `ceil(1/sqrt(W_{>=l}))` queries. Succeeds with probability
    /// `max(W, 1 - W)`, `W = W_{>=l}`, returning `T` drawn from the squared
    /// spectrum restricted to levels `>= l`; `None` on failure.
    pub fn amplified_fourier_sample(&mut self, l: usize) -> Result<Option<BitVector>, OracleError> {
        if !self.tails.contains_key(&l) {
            let weight = self.table.weight_at_least(l);
            if weight <= 0.0 {
                return Err(OracleError::ZeroWeight(l));
            }
            let sampler = WeightedIndex::new(self.table.coefficients().iter().enumerate().map(|(t, c)| {
                if t.count_ones() as usize >= l {
                    c * c
                } else {
                    0.0
                }
            }))
            .map_err(|_| OracleError::ZeroWeight(l))?;
            self.tails.insert(l, (weight, sampler));
        }
        let (weight, sampler) = &self.tails[&l];
        let cost = (1.0 / weight.sqrt()).ceil() as u64;
        self.meter.charge(QueryKind::JuntaQuery, cost);
        let success = self.rng.gen::<f64>() < weight.max(1.0 - weight);
        if !success {
            return Ok(None);
        }
        let local = sampler.sample(&mut self.rng);
        Ok(Some(self.junta.lift(local)))
    }

    /// `f(x)` without a charge; counted as a reveal.
    pub fn junta_query_uncharged(&mut self, x: &BitVector) -> bool {
        assert_eq!(x.len(), self.junta.n(), "input must have length n");
        self.meter.charge(QueryKind::RevealUsed, 1);
        self.junta.eval(x)
    }

    /// The hidden junta; counted as a reveal.
    pub fn reveal(&mut self) -> &Junta {
        self.meter.charge(QueryKind::RevealUsed, 1);
        &self.junta
    }
}

fn binomial_f64(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Edges re-indexed onto positions in `support`.
fn local_edges(g: &Graph, support: &[usize]) -> Vec<(usize, usize)> {
    let pos: HashMap<usize, usize> = support.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    g.edges().iter().map(|&(a, b)| (pos[&a], pos[&b])).collect()
}

fn lift(n: usize, support: &[usize], local: usize) -> BitVector {
    BitVector::from_indices(
        n,
        support
            .iter()
            .enumerate()
            .filter(|(i, _)| local >> i & 1 == 1)
            .map(|(_, &v)| v),
    )
}

fn squared_spectrum(g: &TruthTable) -> WeightedIndex<f64> {
    let mut values: Vec<f64> = (0..g.size())
        .map(|x| if g.eval(x) { -1.0 } else { 1.0 })
        .collect();
    walsh_hadamard(&mut values);
    let scale = 1.0 / g.size() as f64;
    WeightedIndex::new(values.iter().map(|v| (v * scale) * (v * scale))).expect("Parseval")
}

/// Fourier sample of `x_c AND OR(x_L)`: `{c}` with probability
/// `(1 - 2^-m)^2`, otherwise uniform over the `2^(m+1) - 1` remaining
/// outcomes (empty set, and every nonempty leaf pattern with or without `c`).
fn star_or_sample<R: Rng + ?Sized>(n: usize, center: usize, leaves: &[usize], rng: &mut R) -> BitVector {
    let m = leaves.len() as i32;
    let p_center = (1.0 - 2f64.powi(-m)).powi(2);
    let mut out = BitVector::zeros(n);
    if rng.gen::<f64>() < p_center {
        out.set(center, true);
        return out;
    }
    loop {
        let with_center = rng.gen::<bool>();
        let mut any = false;
        for &l in leaves {
            let bit = rng.gen::<bool>();
            out.set(l, bit);
            any |= bit;
        }
        if any || !with_center {
            out.set(center, with_center);
            return out;
        }
    }
}
