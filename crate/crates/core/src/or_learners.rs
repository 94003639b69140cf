//! Learning hidden graphs from OR queries.
//!
//! The general learner peels the vertex set into random independent sets,
//! then merges them pairwise in a binary tree, learning the cross edges of
//! each pair with group testing. Stars and cliques have dedicated learners
//! that locate one special vertex by Fourier sampling first.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::cgt::{
    build_nonadaptive_design, cgt_solve_with, CgtBackend, CgtError, NonadaptiveDesign, OrGroupTest,
    DEFAULT_DESIGN_CONSTANT,
};
use crate::f2core::BitVector;
use crate::graphs::{Graph, GraphError};
use crate::oracles::{GraphOracle, OracleError};

/// Failed-candidate budget factor for peeling: `100 log2 n` failures.
pub const PEEL_BUDGET_FACTOR: f64 = 100.0;
/// Positive rounds allowed to the star and clique learners.
pub const ATTEMPT_CAP: usize = 20;
/// Empty-pool draws allowed to the clique learner.
pub const EMPTY_DRAW_CAP: usize = 200;
/// Restarts of peeling with a smaller probability or a larger edge estimate.
pub const PEEL_RESTARTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrLearnError {
    #[error(transparent)]
    Cgt(#[from] CgtError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("peeling used up its budget of {0} failed candidates")]
    PeelBudget(usize),
    #[error("vertex sets are not disjoint")]
    Overlap,
    #[error("vertex {0} has no neighbours in the tests that flagged it")]
    EmptyNeighbourhood(usize),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("no usable sample within {0} attempts")]
    Exhausted(usize),
}

type Edge = (usize, usize);

fn edge(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

fn indicator(n: usize, vertices: &[usize]) -> BitVector {
    BitVector::from_indices(n, vertices.iter().copied())
}

/// Group testing over `items`, every query also containing `base`.
fn cgt_over(
    h: &mut GraphOracle,
    backend: &CgtBackend,
    items: &[usize],
    base: &BitVector,
    bound: Option<usize>,
    known_nonempty: bool,
) -> Result<Vec<usize>, OrLearnError> {
    let mut pool = OrGroupTest::new(h, items, base.clone());
    let found = cgt_solve_with(backend, &mut pool, bound, known_nonempty)?;
    Ok(found.into_iter().map(|i| items[i]).collect())
}

/// Vertices of `a` and of `b` with at least one neighbour across.
/// `a` and `b` must be disjoint independent sets.
pub fn find_nonisolated(
    h: &mut GraphOracle,
    a: &[usize],
    b: &[usize],
    backend: &CgtBackend,
) -> Result<(Vec<usize>, Vec<usize>), OrLearnError> {
    let n = h.n();
    let active_a = cgt_over(h, backend, a, &indicator(n, b), None, false)?;
    let active_b = cgt_over(h, backend, b, &indicator(n, a), None, false)?;
    Ok((active_a, active_b))
}

/// All edges between disjoint independent sets `a` and `b`.
///
/// One query checks for any cross edge; group testing with all of `b` present
/// finds the active side of `a`, then each active vertex's neighbourhood is
/// found by group testing over `b` with that vertex present.
pub fn learn_bipartite_edges(
    h: &mut GraphOracle,
    a: &[usize],
    b: &[usize],
    backend: &CgtBackend,
) -> Result<Vec<Edge>, OrLearnError> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let n = h.n();
    let mut both = indicator(n, a);
    both.or_assign(&indicator(n, b));
    if !h.or_query(&both) {
        return Ok(Vec::new());
    }
    let active = cgt_over(h, backend, a, &indicator(n, b), None, true)?;
    let mut edges = Vec::new();
    for &x in &active {
        let nbrs = cgt_over(h, backend, b, &indicator(n, &[x]), None, true)?;
        edges.extend(nbrs.into_iter().map(|y| edge(x, y)));
    }
    edges.sort_unstable();
    Ok(edges)
}

/// Edges between independent sets `a` and `b` when every vertex has at most
/// `d` neighbours across.
///
/// After isolating the active vertices, a nonadaptive design over the active
/// part of `b` is fixed (binary indexing for `d = 1`); for each test `T`,
/// group testing over `a` with `T` present finds which vertices see `T`, and
/// each vertex's neighbourhood is decoded from its row of outcomes.
pub fn learn_bipartite_bounded_degree<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    a: &[usize],
    b: &[usize],
    d: usize,
    backend: &CgtBackend,
    rng: &mut R,
) -> Result<Vec<Edge>, OrLearnError> {
    if a.is_empty() || b.is_empty() || d == 0 {
        return Ok(Vec::new());
    }
    let n = h.n();
    let mut both = indicator(n, a);
    both.or_assign(&indicator(n, b));
    if !h.or_query(&both) {
        return Ok(Vec::new());
    }
    let active_a = cgt_over(h, backend, a, &indicator(n, b), None, true)?;
    let active_b = cgt_over(h, backend, b, &indicator(n, &active_a), None, true)?;
    let design = if d == 1 {
        NonadaptiveDesign::binary_indexing(active_b.len())
    } else {
        build_nonadaptive_design(active_b.len(), d, DEFAULT_DESIGN_CONSTANT, rng)?
    };
    let mut rows = vec![BitVector::zeros(design.tests().len()); active_a.len()];
    for (j, test) in design.tests().iter().enumerate() {
        if test.is_empty() {
            continue;
        }
        let members: Vec<usize> = test.iter().map(|&i| active_b[i]).collect();
        let seen = cgt_over(h, backend, &active_a, &indicator(n, &members), None, false)?;
        for x in seen {
            let row = active_a.iter().position(|&v| v == x).expect("from active_a");
            rows[row].set(j, true);
        }
    }
    let mut edges = Vec::new();
    for (row, &x) in rows.iter().zip(&active_a) {
        let nbrs = design.decode(row)?;
        if nbrs.is_empty() {
            return Err(OrLearnError::EmptyNeighbourhood(x));
        }
        edges.extend(nbrs.into_iter().map(|i| edge(x, active_b[i])));
    }
    edges.sort_unstable();
    Ok(edges)
}

/// A proper coloring of a vertex set with respect to some known edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    classes: Vec<Vec<usize>>,
}

impl Coloring {
    /// Number of color classes.
    pub fn q(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn color_of(&self, v: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&v))
    }
}

/// Greedy coloring in order of decreasing degree. With `t` edges it uses at
/// most `floor(sqrt(2t) + 1)` colors.
pub fn greedy_coloring(vertices: &[usize], edges: &[Edge]) -> Coloring {
    let mut order: Vec<usize> = vertices.to_vec();
    let degree = |v: usize| edges.iter().filter(|&&(a, b)| a == v || b == v).count();
    order.sort_by_key(|&v| (std::cmp::Reverse(degree(v)), v));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in order {
        let clash = |class: &Vec<usize>| class.iter().any(|&u| edges.contains(&edge(u, v)));
        match classes.iter_mut().find(|c| !clash(c)) {
            Some(c) => c.push(v),
            None => classes.push(vec![v]),
        }
    }
    for c in &mut classes {
        c.sort_unstable();
    }
    Coloring { classes }
}

/// Cross edges between disjoint `a` and `b` whose internal edges are known:
/// each side is colored into independent classes and every pair of classes
/// is learned as a bipartite instance.
#[allow(clippy::too_many_arguments)]
pub fn learn_cross_edges_colored<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    a: &[usize],
    b: &[usize],
    known_a: &[Edge],
    known_b: &[Edge],
    backend: &CgtBackend,
    degree_bound: Option<usize>,
    rng: &mut R,
) -> Result<Vec<Edge>, OrLearnError> {
    let ca = greedy_coloring(a, known_a);
    let cb = greedy_coloring(b, known_b);
    let mut edges = Vec::new();
    for x in ca.classes() {
        for y in cb.classes() {
            let found = match degree_bound {
                Some(d) => learn_bipartite_bounded_degree(h, x, y, d, backend, rng)?,
                None => learn_bipartite_edges(h, x, y, backend)?,
            };
            edges.extend(found);
        }
    }
    edges.sort_unstable();
    Ok(edges)
}

/// Disjoint vertex sets with the edges already known inside each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub parts: Vec<Vec<usize>>,
    pub known: Vec<Vec<Edge>>,
}

impl Decomposition {
    /// Parts with no known edges.
    pub fn independent(parts: Vec<Vec<usize>>) -> Self {
        let known = vec![Vec::new(); parts.len()];
        Self { parts, known }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Parts are pairwise disjoint and every known edge lies inside its part.
    pub fn is_valid(&self) -> bool {
        let mut seen = BTreeSet::new();
        let disjoint = self.parts.iter().flatten().all(|&v| seen.insert(v));
        disjoint
            && self.parts.len() == self.known.len()
            && self
                .parts
                .iter()
                .zip(&self.known)
                .all(|(p, es)| es.iter().all(|&(a, b)| p.contains(&a) && p.contains(&b)))
    }
}

/// Merges parts pairwise up a binary tree (padded with empty parts to a power
/// of two), learning the cross edges of each merged pair.
pub fn learn_merge_tree<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    decomposition: &Decomposition,
    backend: &CgtBackend,
    degree_bound: Option<usize>,
    rng: &mut R,
) -> Result<Vec<Edge>, OrLearnError> {
    if !decomposition.is_valid() {
        return Err(OrLearnError::Overlap);
    }
    let mut level: Vec<(Vec<usize>, Vec<Edge>)> = decomposition
        .parts
        .iter()
        .cloned()
        .zip(decomposition.known.iter().cloned())
        .collect();
    let width = level.len().max(1).next_power_of_two();
    level.resize(width, (Vec::new(), Vec::new()));
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() / 2);
        let mut it = level.into_iter();
        while let (Some((mut pa, mut ea)), Some((pb, eb))) = (it.next(), it.next()) {
            if !pa.is_empty() && !pb.is_empty() {
                let cross = learn_cross_edges_colored(h, &pa, &pb, &ea, &eb, backend, degree_bound, rng)?;
                ea.extend(cross);
            }
            pa.extend(pb);
            ea.extend(eb);
            next.push((pa, ea));
        }
        level = next;
    }
    let mut edges = level.pop().map(|(_, e)| e).unwrap_or_default();
    edges.sort_unstable();
    Ok(edges)
}

/// Repeatedly draws a `p`-random subset of the remaining vertices and keeps it
/// when one OR query shows it is independent. Empty draws and singletons need
/// no query.
pub fn peel_independent_sets<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    p: f64,
    rng: &mut R,
) -> Result<Decomposition, OrLearnError> {
    let n = h.n();
    let budget = (PEEL_BUDGET_FACTOR * (n.max(2) as f64).log2()).ceil() as usize;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut parts = Vec::new();
    let mut failures = 0;
    while !remaining.is_empty() {
        let candidate: Vec<usize> = remaining.iter().copied().filter(|_| rng.gen_bool(p)).collect();
        if candidate.is_empty() {
            continue;
        }
        if candidate.len() > 1 && h.or_query(&indicator(n, &candidate)) {
            failures += 1;
            if failures > budget {
                return Err(OrLearnError::PeelBudget(budget));
            }
            continue;
        }
        remaining.retain(|v| !candidate.contains(v));
        parts.push(candidate);
    }
    Ok(Decomposition::independent(parts))
}

/// `min(1, 1/(10 sqrt m))`.
pub fn peel_probability(m: usize) -> f64 {
    if m == 0 {
        1.0
    } else {
        (1.0 / (10.0 * (m as f64).sqrt())).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrGraphOptions {
    pub backend: CgtBackend,
    /// Edge count, when known in advance.
    pub m_hint: Option<usize>,
    /// Promised maximum degree; switches cross-edge learning to
    /// nonadaptive designs.
    pub degree_bound: Option<usize>,
}

impl OrGraphOptions {
    pub fn new(backend: CgtBackend) -> Self {
        Self {
            backend,
            m_hint: None,
            degree_bound: None,
        }
    }
}

/// Learns an arbitrary graph: peel into independent sets, then merge.
///
/// With a known `m`, peeling uses `p = 1/(10 sqrt m)` and halves `p` after a
/// budget failure. Without it, one query on all vertices detects the empty
/// graph; otherwise an edge estimate starting at 1 is doubled after each
/// budget failure.
pub fn learn_graph_or<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    options: &OrGraphOptions,
    rng: &mut R,
) -> Result<Graph, OrLearnError> {
    let n = h.n();
    let mut p = match options.m_hint {
        Some(m) => peel_probability(m),
        None => {
            if !h.or_query(&BitVector::ones(n)) {
                return Ok(Graph::empty(n));
            }
            peel_probability(1)
        }
    };
    let mut estimate = 1usize;
    let mut decomposition = None;
    for _ in 0..PEEL_RESTARTS {
        match peel_independent_sets(h, p, rng) {
            Ok(d) => {
                decomposition = Some(d);
                break;
            }
            Err(OrLearnError::PeelBudget(_)) => {
                if options.m_hint.is_some() {
                    p /= 2.0;
                } else {
                    estimate *= 2;
                    p = peel_probability(estimate);
                }
            }
            Err(e) => return Err(e),
        }
    }
    let decomposition = decomposition.ok_or(OrLearnError::Exhausted(PEEL_RESTARTS))?;
    let edges = learn_merge_tree(h, &decomposition, &options.backend, options.degree_bound, rng)?;
    Ok(Graph::from_edges(n, edges)?)
}

/// Learns a hidden clique on `k` vertices.
///
/// Draws pools with per-vertex probability `1/k`; when a pool contains an
/// edge, one Fourier sample of OR restricted to the pool returns a set of
/// clique vertices. From one clique vertex `v`, group testing with `v`
/// present finds the rest. The result is checked by one query on the
/// complement.
pub fn learn_clique_or<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    k: usize,
    backend: &CgtBackend,
    rng: &mut R,
) -> Result<Vec<usize>, OrLearnError> {
    let n = h.n();
    if k < 2 {
        return Ok(Vec::new());
    }
    let p = 1.0 / k as f64;
    let (mut attempts, mut empty_draws) = (0, 0);
    while attempts < ATTEMPT_CAP && empty_draws < EMPTY_DRAW_CAP {
        let pool: Vec<usize> = (0..n).filter(|_| rng.gen_bool(p)).collect();
        let set = indicator(n, &pool);
        if pool.len() < 2 || !h.or_query(&set) {
            empty_draws += 1;
            continue;
        }
        attempts += 1;
        let sample: Vec<usize> = h.or_fourier_sample(&set)?.iter_ones().collect();
        let Some(&v) = sample.choose(rng) else {
            continue;
        };
        let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        let mut clique = cgt_over(h, backend, &others, &indicator(n, &[v]), Some(k - 1), true)?;
        clique.push(v);
        clique.sort_unstable();
        let rest: Vec<usize> = (0..n).filter(|u| clique.binary_search(u).is_err()).collect();
        if clique.len() != k || (rest.len() > 1 && h.or_query(&indicator(n, &rest))) {
            return Err(OrLearnError::Verification(format!(
                "found {} clique vertices, expected {k}, or edges outside them",
                clique.len()
            )));
        }
        return Ok(clique);
    }
    Err(OrLearnError::Exhausted(attempts + empty_draws))
}

/// A learned star. A single edge has no distinguishable center; it is
/// reported with `center = None` and both endpoints as `leaves`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarOutcome {
    pub center: Option<usize>,
    pub leaves: Vec<usize>,
}

impl StarOutcome {
    pub fn to_graph(&self, n: usize) -> Result<Graph, GraphError> {
        match self.center {
            Some(c) => Graph::star(n, c, &self.leaves),
            None => Graph::from_edges(n, self.leaves.chunks(2).map(|p| (p[0], p[1]))),
        }
    }
}

/// Learns a hidden star.
///
/// Fourier samples of OR on all vertices return the center alone with
/// probability `(1 - 2^-m)^2`. Group testing with the candidate present finds
/// its neighbours; a candidate with a single neighbour was a leaf, and the
/// search is repeated from that neighbour. One query on the complement of the
/// center checks the result.
pub fn learn_star_or<R: Rng + ?Sized>(
    h: &mut GraphOracle,
    backend: &CgtBackend,
    _rng: &mut R,
) -> Result<StarOutcome, OrLearnError> {
    let n = h.n();
    let all = BitVector::ones(n);
    for _ in 0..ATTEMPT_CAP {
        let sample = h.or_fourier_sample(&all)?;
        if sample.count_ones() != 1 {
            continue;
        }
        let candidate = sample.first_one().expect("one element");
        let mut center = candidate;
        let mut leaves = neighbours_by_cgt(h, backend, center)?;
        if leaves.len() == 1 {
            let other = leaves[0];
            let second = neighbours_by_cgt(h, backend, other)?;
            if second.len() == 1 {
                verify_no_edges_outside(h, center)?;
                let mut ends = vec![center, other];
                ends.sort_unstable();
                return Ok(StarOutcome {
                    center: None,
                    leaves: ends,
                });
            }
            center = other;
            leaves = second;
        }
        verify_no_edges_outside(h, center)?;
        return Ok(StarOutcome {
            center: Some(center),
            leaves,
        });
    }
    Err(OrLearnError::Exhausted(ATTEMPT_CAP))
}

fn neighbours_by_cgt(
    h: &mut GraphOracle,
    backend: &CgtBackend,
    v: usize,
) -> Result<Vec<usize>, OrLearnError> {
    let n = h.n();
    let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
    cgt_over(h, backend, &others, &indicator(n, &[v]), None, true)
}

fn verify_no_edges_outside(h: &mut GraphOracle, center: usize) -> Result<(), OrLearnError> {
    let n = h.n();
    let mut rest = BitVector::ones(n);
    rest.set(center, false);
    if h.or_query(&rest) {
        return Err(OrLearnError::Verification("edges avoid the center".into()));
    }
    Ok(())
}
