//! Learning hidden graphs from Bell samples and parity queries.
//!
//! A Bell sample is a pair `(s, A s)` for uniform `s`. Each vertex `v` sees
//! one linear equation `r_v . s = (A s)_v` about its adjacency row, so
//! enough samples pin down every row, either by Gaussian elimination over a
//! known candidate set or by a search for the unique sparse solution.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::f2core::{BitMatrix, BitVector, F2Error};
use crate::graphs::{Graph, GraphError};
use crate::oracles::{BellSource, GraphOracle, OracleError};

/// Extra samples on top of `d log2(n/d)` in the bounded-degree learner.
pub const DEFAULT_DEGREE_SLACK: usize = 10;
/// Largest affine solution space enumerated element by element.
pub const MAX_AFFINE_NULLITY: usize = 16;
/// Largest half-weight table built by the sparse-row search.
pub const MAX_SEARCH_TABLE: u128 = 20_000_000;
pub const STAR_SAMPLE_CAP: usize = 200;
pub const CLIQUE_SAMPLE_FLOOR: usize = 7;
pub const CLIQUE_SAMPLE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParityLearnError {
    #[error(transparent)]
    F2(#[from] F2Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0} family members are consistent with the samples")]
    Ambiguous(usize),
    #[error("row of vertex {0} is not determined by the samples")]
    AmbiguousRow(usize),
    #[error("row of vertex {0} has no consistent solution")]
    InconsistentRow(usize),
    #[error("learned rows are not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("found {found} edges, promised at most {bound}")]
    TooManyEdges { bound: usize, found: usize },
    #[error("sparse search over {0} candidates is too large")]
    SearchTooLarge(usize),
    #[error("no conclusive outcome within {0} samples")]
    Exhausted(usize),
}

/// Bell samples: the vectors `s` and the responses `A s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    n: usize,
    s: Vec<BitVector>,
    y: Vec<BitVector>,
}

impl SampleBatch {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            s: Vec::new(),
            y: Vec::new(),
        }
    }

    /// Draws `count` samples from `h`.
    pub fn collect(h: &mut GraphOracle, count: usize, source: BellSource) -> Self {
        let mut batch = Self::new(h.n());
        batch.extend_from(h, count, source);
        batch
    }

    pub fn extend_from(&mut self, h: &mut GraphOracle, count: usize, source: BellSource) {
        for _ in 0..count {
            let (s, y) = h.bell_sample_from(source);
            self.push(s, y);
        }
    }

    pub fn push(&mut self, s: BitVector, y: BitVector) {
        assert!(s.len() == self.n && y.len() == self.n, "sample length must be n");
        self.s.push(s);
        self.y.push(y);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (&BitVector, &BitVector)> {
        self.s.iter().zip(&self.y)
    }

    /// `n x k` matrix with the sample vectors as columns.
    pub fn b(&self) -> BitMatrix {
        BitMatrix::from_columns(self.n, &self.s).expect("columns have length n")
    }

    /// `n x k` matrix with the responses as columns.
    pub fn y(&self) -> BitMatrix {
        BitMatrix::from_columns(self.n, &self.y).expect("columns have length n")
    }

    /// Whether `g` explains every sample.
    pub fn consistent_with(&self, g: &Graph) -> bool {
        g.n() == self.n && self.samples().all(|(s, y)| &g.adjacency_times(s) == y)
    }

    /// Vertices with a nonzero response in some sample.
    pub fn responding(&self) -> BitVector {
        let mut acc = BitVector::zeros(self.n);
        for y in &self.y {
            acc.or_assign(y);
        }
        acc
    }

    /// Equations for row `v` over `coords`: one row per sample holding
    /// `s` restricted to `coords`, and the right-hand side `(A s)_v`.
    fn system(&self, v: usize, coords: &[usize]) -> (BitMatrix, BitVector) {
        let rows = self.s.iter().map(|s| s.select(coords)).collect();
        let m = BitMatrix::from_rows(coords.len(), rows).expect("uniform width");
        let rhs = BitVector::from_bools(&self.y.iter().map(|y| y.get(v)).collect::<Vec<_>>());
        (m, rhs)
    }
}

/// `ceil(2 log2 |S|) + 7`, or 0 for a family with at most one member.
pub fn family_sample_count(family_size: usize) -> usize {
    if family_size <= 1 {
        0
    } else {
        (2.0 * (family_size as f64).log2()).ceil() as usize + 7
    }
}

/// Identifies the hidden graph within `family` from
/// [`family_sample_count`] Bell samples.
pub fn learn_from_family(h: &mut GraphOracle, family: &[Graph]) -> Result<Graph, ParityLearnError> {
    learn_from_family_with(h, family, family_sample_count(family.len()))
}

/// As [`learn_from_family`] with an explicit number of samples.
pub fn learn_from_family_with(
    h: &mut GraphOracle,
    family: &[Graph],
    samples: usize,
) -> Result<Graph, ParityLearnError> {
    let batch = SampleBatch::collect(h, samples, BellSource::GraphState);
    let mut consistent = family.iter().filter(|g| batch.consistent_with(g));
    match (consistent.next(), consistent.next()) {
        (Some(g), None) => Ok(g.clone()),
        (None, _) => Err(ParityLearnError::Ambiguous(0)),
        (Some(_), Some(_)) => Err(ParityLearnError::Ambiguous(2 + consistent.count())),
    }
}

/// What the bounded-degree learner reports for one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowResult {
    Isolated,
    Neighbors(Vec<usize>),
    OverDegree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedDegreeResult {
    pub d: usize,
    pub rows: Vec<RowResult>,
}

impl BoundedDegreeResult {
    pub fn over_degree(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&v| self.rows[v] == RowResult::OverDegree)
            .collect()
    }

    /// The learned graph, when no vertex exceeded the bound.
    pub fn to_graph(&self) -> Result<Option<Graph>, ParityLearnError> {
        if !self.over_degree().is_empty() {
            return Ok(None);
        }
        let rows: Vec<Option<Vec<usize>>> = self
            .rows
            .iter()
            .map(|r| match r {
                RowResult::Neighbors(nb) => Some(nb.clone()),
                _ => Some(Vec::new()),
            })
            .collect();
        assemble(&rows).map(Some)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedDegreeOptions {
    /// Edge count estimate for phase one; `n(n-1)/2` when absent.
    pub m_hint: Option<usize>,
    pub slack: usize,
    pub source: BellSource,
}

impl Default for BoundedDegreeOptions {
    fn default() -> Self {
        Self {
            m_hint: None,
            slack: DEFAULT_DEGREE_SLACK,
            source: BellSource::GraphState,
        }
    }
}

/// Phase one sample count, `ceil(log2 m) + 7`.
pub fn support_sample_count(m: usize) -> usize {
    (m.max(1) as f64).log2().ceil() as usize + 7
}

/// Phase two sample count, `ceil(d log2(n/d)) + slack`.
pub fn degree_sample_count(n: usize, d: usize, slack: usize) -> usize {
    if d == 0 || n == 0 {
        return slack;
    }
    let ratio = (n as f64 / d as f64).max(1.0);
    (d as f64 * ratio.log2()).ceil() as usize + slack
}

/// Learns every row of weight at most `d` and flags the heavier ones.
///
/// Phase one stops early when no row responds. Phase two adds
/// [`degree_sample_count`] samples; the non-isolated vertices are the rows
/// that respond anywhere in the batch. For each such `v` the learner looks for the unique vector of weight at
/// most `d` over the other non-isolated vertices that explains all of `v`'s
/// responses.
pub fn learn_bounded_degree(
    h: &mut GraphOracle,
    d: usize,
    options: &BoundedDegreeOptions,
) -> Result<BoundedDegreeResult, ParityLearnError> {
    let n = h.n();
    let m_hat = options.m_hint.unwrap_or(n * n.saturating_sub(1) / 2);
    let mut batch = SampleBatch::collect(h, support_sample_count(m_hat), options.source);
    let mut rows = vec![RowResult::Isolated; n];
    if batch.responding().is_zero() {
        return Ok(BoundedDegreeResult { d, rows });
    }
    batch.extend_from(h, degree_sample_count(n, d, options.slack), options.source);
    let active: Vec<usize> = batch.responding().iter_ones().collect();
    let full = BitMatrix::from_rows(active.len(), batch.s.iter().map(|s| s.select(&active)).collect())?;
    if let Some(inverse) = left_inverse(&full) {
        for (pos, &v) in active.iter().enumerate() {
            let rhs = BitVector::from_bools(&batch.y.iter().map(|y| y.get(v)).collect::<Vec<_>>());
            let x = inverse.matvec(&rhs)?;
            let consistent = full.matvec(&x)? == rhs && !x.get(pos);
            rows[v] = if consistent && x.count_ones() <= d {
                RowResult::Neighbors(x.iter_ones().map(|i| active[i]).collect())
            } else {
                RowResult::OverDegree
            };
        }
        return Ok(BoundedDegreeResult { d, rows });
    }
    let mut search = SparseSearch::new(&batch, &active, d);
    for (pos, &v) in active.iter().enumerate() {
        let coords: Vec<usize> = active.iter().copied().filter(|&u| u != v).collect();
        let (m, rhs) = batch.system(v, &coords);
        let Some(sol) = m.solve(&rhs)? else {
            rows[v] = RowResult::OverDegree;
            continue;
        };
        let found = if sol.nullspace.len() <= MAX_AFFINE_NULLITY {
            light_affine_points(&sol, d)
        } else {
            search.solve(pos, &rhs)?
        };
        rows[v] = match found.as_slice() {
            [] => RowResult::OverDegree,
            [x] => RowResult::Neighbors(x.iter().map(|&i| coords[i]).collect()),
            _ => return Err(ParityLearnError::AmbiguousRow(v)),
        };
    }
    Ok(BoundedDegreeResult { d, rows })
}

/// `L` with `L M = I` when `M` has full column rank.
fn left_inverse(m: &BitMatrix) -> Option<BitMatrix> {
    let (k, u) = (m.rows(), m.cols());
    if k < u {
        return None;
    }
    let mut rows: Vec<BitVector> = (0..k)
        .map(|i| BitVector::from_indices(u + k, m.row(i).iter_ones().chain([u + i])))
        .collect();
    for col in 0..u {
        let p = (col..k).find(|&r| rows[r].get(col))?;
        rows.swap(col, p);
        let pivot = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row.get(col) {
                row.xor_assign_checked(&pivot).expect("same length");
            }
        }
    }
    let inverse = rows[..u]
        .iter()
        .map(|r| BitVector::from_indices(k, r.iter_ones().filter(|&c| c >= u).map(|c| c - u)))
        .collect();
    BitMatrix::from_rows(k, inverse).ok()
}

/// Points of weight at most `d` in the affine space of `sol` (at most two).
fn light_affine_points(sol: &crate::f2core::Solution, d: usize) -> Vec<Vec<usize>> {
    let t = sol.nullspace.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << t) {
        let mut x = sol.particular.clone();
        for (j, b) in sol.nullspace.iter().enumerate() {
            if mask >> j & 1 == 1 {
                x.xor_assign_checked(b).expect("same length");
            }
        }
        if x.count_ones() <= d {
            out.push(x.iter_ones().collect());
            if out.len() == 2 {
                break;
            }
        }
    }
    out
}

/// Meet-in-the-middle search for sparse rows over a fixed candidate set.
///
/// Every vector of weight `w <= d` splits into disjoint parts of weights
/// `ceil(w/2)` and `floor(w/2)`, so a table of syndromes of all subsets of
/// size at most `ceil(d/2)` plus a scan over subsets of size at most
/// `floor(d/2)` finds all of them. The table is built once and shared by
/// every vertex.
struct SparseSearch {
    d: usize,
    width: usize,
    columns: Vec<Vec<u64>>,
    table: Option<SubsetTable>,
}

/// Subsets of size at most `ceil(d/2)` keyed by syndrome fingerprint.
/// `heads` maps a fingerprint to its last subset, `next` chains to the
/// previous one with the same fingerprint. Members are stored flat, `hi`
/// slots per subset, padded with `u32::MAX`.
struct SubsetTable {
    hi: usize,
    heads: HashMap<u64, u32>,
    next: Vec<u32>,
    members: Vec<u32>,
}

fn fingerprint(words: &[u64]) -> u64 {
    words.iter().fold(0u64, |acc, &w| {
        (acc.rotate_left(29) ^ w).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    })
}

fn binomial_sum(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut term = 1u128;
    for i in 0..=k.min(n) {
        total += term;
        term = term * (n - i) as u128 / (i + 1) as u128;
    }
    total
}

fn for_each_subset(n: usize, max: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        f(cur);
        if left == 0 {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, f);
            cur.pop();
        }
    }
    rec(0, n, max, &mut Vec::new(), f);
}

impl SparseSearch {
    fn new(batch: &SampleBatch, active: &[usize], d: usize) -> Self {
        let columns: Vec<Vec<u64>> = active
            .iter()
            .map(|&u| {
                let bits: Vec<bool> = batch.s.iter().map(|s| s.get(u)).collect();
                BitVector::from_bools(&bits).words().to_vec()
            })
            .collect();
        Self {
            d,
            width: batch.len().div_ceil(64),
            columns,
            table: None,
        }
    }

    fn syndrome_into(&self, subset: &[usize], acc: &mut [u64]) {
        acc.fill(0);
        for &i in subset {
            for (a, c) in acc.iter_mut().zip(&self.columns[i]) {
                *a ^= c;
            }
        }
    }

    fn build_table(&self) -> SubsetTable {
        let hi = self.d.div_ceil(2);
        let mut heads = HashMap::new();
        let mut next = Vec::new();
        let mut members = Vec::new();
        let mut acc = vec![0u64; self.width];
        for_each_subset(self.columns.len(), hi, &mut |sub| {
            self.syndrome_into(sub, &mut acc);
            let idx = next.len() as u32;
            next.push(heads.insert(fingerprint(&acc), idx).unwrap_or(u32::MAX));
            members.extend(sub.iter().map(|&i| i as u32));
            members.extend(std::iter::repeat_n(u32::MAX, hi - sub.len()));
        });
        SubsetTable {
            hi,
            heads,
            next,
            members,
        }
    }

    /// Rows of weight at most `d` over all candidates except `skip`,
    /// in the coordinates of that reduced candidate list.
    fn solve(&mut self, skip: usize, rhs: &BitVector) -> Result<Vec<Vec<usize>>, ParityLearnError> {
        let total = self.columns.len();
        if binomial_sum(total, self.d.div_ceil(2)) > MAX_SEARCH_TABLE {
            return Err(ParityLearnError::SearchTooLarge(total));
        }
        if self.table.is_none() {
            self.table = Some(self.build_table());
        }
        let table = self.table.as_ref().expect("built above");
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut key = vec![0u64; self.width];
        let mut check = vec![0u64; self.width];
        for_each_subset(total, self.d / 2, &mut |sub| {
            if found.len() >= 2 || sub.contains(&skip) {
                return;
            }
            self.syndrome_into(sub, &mut key);
            for (k, r) in key.iter_mut().zip(rhs.words()) {
                *k ^= r;
            }
            let mut idx = table.heads.get(&fingerprint(&key)).copied().unwrap_or(u32::MAX);
            while idx != u32::MAX {
                let slot = idx as usize * table.hi;
                idx = table.next[idx as usize];
                let other: Vec<usize> = table.members[slot..slot + table.hi]
                    .iter()
                    .take_while(|&&i| i != u32::MAX)
                    .map(|&i| i as usize)
                    .collect();
                if other.contains(&skip) || other.iter().any(|i| sub.contains(i)) {
                    continue;
                }
                self.syndrome_into(&other, &mut check);
                if check != key {
                    continue;
                }
                let mut union: Vec<usize> = sub.iter().chain(&other).copied().collect();
                if union.len() > self.d {
                    continue;
                }
                union.sort_unstable();
                found.insert(union);
            }
        });
        Ok(found
            .into_iter()
            .map(|x| x.into_iter().map(|i| if i > skip { i - 1 } else { i }).collect())
            .collect())
    }
}

/// Builds a graph from per-vertex neighbour lists (`None` = unknown) and
/// checks that known rows agree with each other.
fn assemble(rows: &[Option<Vec<usize>>]) -> Result<Graph, ParityLearnError> {
    let n = rows.len();
    let mut edges = BTreeSet::new();
    for (v, row) in rows.iter().enumerate() {
        for &u in row.iter().flatten() {
            if let Some(back) = &rows[u] {
                if !back.contains(&v) {
                    return Err(ParityLearnError::Asymmetric(v, u));
                }
            }
            edges.insert((u.min(v), u.max(v)));
        }
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// Learns a subgraph of a known `gprime` from `d + ceil(log2 n) + 7` Bell
/// samples, `d` the maximum degree of `gprime`.
///
/// Each row is solved over the candidate neighbours of `v` in `gprime`.
/// Rows with a unique solution fix their edges; edges left open by
/// underdetermined rows are then solved jointly from those rows' equations,
/// using that an edge variable is shared by both endpoints.
pub fn learn_subgraph_of(h: &mut GraphOracle, gprime: &Graph) -> Result<Graph, ParityLearnError> {
    let n = h.n();
    if gprime.m() == 0 {
        return Ok(Graph::empty(n));
    }
    let k = gprime.max_degree() + (n.max(2) as f64).log2().ceil() as usize + 7;
    let batch = SampleBatch::collect(h, k, BellSource::GraphState);
    let mut known: HashMap<(usize, usize), bool> = HashMap::new();
    let mut open = Vec::new();
    for v in 0..n {
        let cand = gprime.neighbors(v);
        if cand.is_empty() {
            continue;
        }
        let (m, rhs) = batch.system(v, cand);
        let sol = m.solve(&rhs)?.ok_or(ParityLearnError::InconsistentRow(v))?;
        if !sol.is_unique() {
            open.push(v);
            continue;
        }
        for (i, &u) in cand.iter().enumerate() {
            let value = sol.particular.get(i);
            if *known.entry((u.min(v), u.max(v))).or_insert(value) != value {
                return Err(ParityLearnError::Asymmetric(v, u));
            }
        }
    }
    if !open.is_empty() {
        solve_open_edges(&batch, gprime, &open, &mut known)?;
    }
    let edges = known
        .into_iter()
        .filter(|&(_, on)| on)
        .map(|(e, _)| e)
        .collect::<Vec<_>>();
    Ok(Graph::from_edges(n, edges)?)
}

/// Joint system for the edges of `gprime` at `open` vertices that no unique
/// row has fixed.
fn solve_open_edges(
    batch: &SampleBatch,
    gprime: &Graph,
    open: &[usize],
    known: &mut HashMap<(usize, usize), bool>,
) -> Result<(), ParityLearnError> {
    let mut unknown: Vec<(usize, usize)> = open
        .iter()
        .flat_map(|&v| gprime.neighbors(v).iter().map(move |&u| (u.min(v), u.max(v))))
        .filter(|e| !known.contains_key(e))
        .collect();
    unknown.sort_unstable();
    unknown.dedup();
    let index: HashMap<(usize, usize), usize> = unknown.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &v in open {
        for (s, y) in batch.samples() {
            let mut row = BitVector::zeros(unknown.len());
            let mut bit = y.get(v);
            for &u in gprime.neighbors(v).iter().filter(|&&u| s.get(u)) {
                let e = (u.min(v), u.max(v));
                match index.get(&e) {
                    Some(&i) => row.flip(i),
                    None => bit ^= known[&e],
                }
            }
            rows.push(row);
            rhs.push(bit);
        }
    }
    let m = BitMatrix::from_rows(unknown.len(), rows)?;
    let sol = m
        .solve(&BitVector::from_bools(&rhs))?
        .ok_or(ParityLearnError::InconsistentRow(open[0]))?;
    if !sol.is_unique() {
        return Err(ParityLearnError::AmbiguousRow(open[0]));
    }
    for (i, e) in unknown.into_iter().enumerate() {
        known.insert(e, sol.particular.get(i));
    }
    Ok(())
}

/// Sparsity used by [`learn_bounded_edges_parity`]: `ceil(sqrt(m / log2(m + 2)))`.
pub fn bounded_edges_degree(m: usize) -> usize {
    (m as f64 / ((m + 2) as f64).log2()).sqrt().ceil() as usize
}

/// Learns a graph with at most `m` edges from parity queries.
///
/// Runs the bounded-degree learner with `d` from [`bounded_edges_degree`],
/// each Bell sample costing two parity queries, then reads every over-degree
/// row directly with one parity-vector query.
pub fn learn_bounded_edges_parity(h: &mut GraphOracle, m: usize) -> Result<Graph, ParityLearnError> {
    learn_bounded_edges_parity_with(h, m, DEFAULT_DEGREE_SLACK)
}

pub fn learn_bounded_edges_parity_with(
    h: &mut GraphOracle,
    m: usize,
    slack: usize,
) -> Result<Graph, ParityLearnError> {
    let n = h.n();
    if m == 0 {
        return Ok(Graph::empty(n));
    }
    let options = BoundedDegreeOptions {
        m_hint: Some(m),
        slack,
        source: BellSource::ParityQueries,
    };
    let result = learn_bounded_degree(h, bounded_edges_degree(m), &options)?;
    let mut rows: Vec<Option<Vec<usize>>> = Vec::with_capacity(n);
    for (v, r) in result.rows.iter().enumerate() {
        rows.push(Some(match r {
            RowResult::Isolated => Vec::new(),
            RowResult::Neighbors(nb) => nb.clone(),
            RowResult::OverDegree => h
                .parity_vector_query(&BitVector::unit(n, v))
                .iter_ones()
                .collect(),
        }));
    }
    let g = assemble(&rows)?;
    if g.m() > m {
        return Err(ParityLearnError::TooManyEdges {
            bound: m,
            found: g.m(),
        });
    }
    Ok(g)
}

/// Reads the whole adjacency matrix with `n` parity-vector queries.
pub fn learn_arbitrary_parity(h: &mut GraphOracle) -> Result<Graph, ParityLearnError> {
    let n = h.n();
    let rows = (0..n)
        .map(|i| h.parity_vector_query(&BitVector::unit(n, i)))
        .collect();
    let adj = BitMatrix::from_rows(n, rows)?;
    Ok(Graph::from_adjacency(&adj)?)
}

/// Learns a star with `m >= 2` leaves from single graph-state copies.
///
/// Hadamard-basis outcomes are `0`, the center alone, the leaf pattern, or
/// the leaf pattern plus the center, each with probability 1/4. A weight-one
/// outcome gives the center, any heavier one gives the leaves once the
/// center is removed.
pub fn learn_star_graphstate(h: &mut GraphOracle) -> Result<(usize, Vec<usize>), ParityLearnError> {
    let (mut center, mut pattern) = (None, None);
    for _ in 0..STAR_SAMPLE_CAP {
        let x = h.graphstate_hadamard_sample()?;
        match x.count_ones() {
            0 => {}
            1 => center = x.first_one(),
            _ => pattern = Some(x),
        }
        if let (Some(c), Some(p)) = (center, &pattern) {
            let leaves = p.iter_ones().filter(|&v| v != c).collect();
            return Ok((c, leaves));
        }
    }
    Err(ParityLearnError::Exhausted(STAR_SAMPLE_CAP))
}

/// Learns a clique from Bell samples: every nonzero response row lies in the
/// clique and each clique vertex responds with probability 1/2. After
/// [`CLIQUE_SAMPLE_FLOOR`] samples the union of responders is accepted as
/// soon as the clique on it explains every sample.
pub fn learn_clique_graphstate(h: &mut GraphOracle) -> Result<Vec<usize>, ParityLearnError> {
    let n = h.n();
    let mut batch = SampleBatch::new(n);
    for taken in 1..=CLIQUE_SAMPLE_CAP {
        let (s, y) = h.bell_sample();
        batch.push(s, y);
        if taken < CLIQUE_SAMPLE_FLOOR {
            continue;
        }
        let support: Vec<usize> = batch.responding().iter_ones().collect();
        if support.len() >= 2 && batch.consistent_with(&Graph::clique_on(n, &support)) {
            return Ok(support);
        }
    }
    Err(ParityLearnError::Exhausted(CLIQUE_SAMPLE_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{all_graphs, all_subgraphs, FamilyKind, FamilySpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn batch_matrices_match_adjacency() {
        let g = FamilySpec::new(12, FamilyKind::FixedEdgeCount { m: 15 })
            .generate(&mut rng(0))
            .unwrap();
        let mut h = GraphOracle::new(g.clone(), 1);
        let batch = SampleBatch::collect(&mut h, 9, BellSource::GraphState);
        assert_eq!(g.adjacency().mul(&batch.b()).unwrap(), batch.y());
        assert!(batch.consistent_with(&g));
        assert_eq!(h.ledger().graph_state_copy(), 18);
    }

    #[test]
    fn family_learning() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let mut h = GraphOracle::new(g.clone(), 0);
        assert_eq!(learn_from_family(&mut h, std::slice::from_ref(&g)).unwrap(), g);
        assert_eq!(h.ledger().bell_samples(), 0);

        let family = all_graphs(4);
        assert_eq!(family_sample_count(family.len()), 19);
        let mut r = rng(1);
        let mut ok = 0;
        for seed in 0..200 {
            let hidden = family[r.gen_range(0..family.len())].clone();
            let mut h = GraphOracle::new(hidden.clone(), seed);
            ok += (learn_from_family(&mut h, &family).ok() == Some(hidden)) as usize;
        }
        assert!(ok >= 196, "{ok}");

        let tri = all_subgraphs(&Graph::complete(3));
        let mut h = GraphOracle::new(tri[5].clone(), 3);
        assert!(matches!(
            learn_from_family_with(&mut h, &tri, 0),
            Err(ParityLearnError::Ambiguous(8))
        ));
    }

    #[test]
    fn bounded_degree_cycle() {
        let mut r = rng(2);
        let opts = BoundedDegreeOptions::default();
        for seed in 0..50 {
            let g = FamilySpec::new(32, FamilyKind::HamiltonianCycle { k: 8 })
                .generate(&mut r)
                .unwrap();
            let mut h = GraphOracle::new(g.clone(), seed);
            let res = learn_bounded_degree(&mut h, 2, &opts).unwrap();
            assert_eq!(res.to_graph().unwrap(), Some(g));
        }
        let mut h = GraphOracle::new(Graph::empty(10), 0);
        let res = learn_bounded_degree(&mut h, 2, &opts).unwrap();
        assert!(res.rows.iter().all(|r| *r == RowResult::Isolated));
    }

    #[test]
    fn bounded_degree_flags_heavy_vertex() {
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)];
        edges.extend([(10, 11), (11, 12), (20, 21)]);
        let g = Graph::from_edges(32, edges).unwrap();
        let mut h = GraphOracle::new(g.clone(), 4);
        let res = learn_bounded_degree(&mut h, 2, &BoundedDegreeOptions::default()).unwrap();
        assert_eq!(res.over_degree(), vec![0]);
        for v in 1..32 {
            match &res.rows[v] {
                RowResult::Neighbors(nb) => assert_eq!(nb.as_slice(), g.neighbors(v)),
                RowResult::Isolated => assert_eq!(g.degree(v), 0),
                RowResult::OverDegree => panic!("vertex {v}"),
            }
        }
        assert_eq!(res.to_graph().unwrap(), None);
    }

    #[test]
    fn sparse_search_matches_affine_enumeration() {
        let mut r = rng(5);
        for _ in 0..30 {
            let n = 40;
            let g = FamilySpec::new(
                n,
                FamilyKind::BoundedDegree {
                    d: 3,
                    m: 25,
                    support: None,
                },
            )
            .generate(&mut r)
            .unwrap();
            let mut h = GraphOracle::new(g.clone(), r.gen());
            let batch = SampleBatch::collect(&mut h, 22, BellSource::GraphState);
            let active: Vec<usize> = (0..n).collect();
            let mut search = SparseSearch::new(&batch, &active, 3);
            for v in [0, 7, 19] {
                let coords: Vec<usize> = active.iter().copied().filter(|&u| u != v).collect();
                let (m, rhs) = batch.system(v, &coords);
                let mut brute = BTreeSet::new();
                for_each_subset(coords.len(), 3, &mut |sub| {
                    let x = BitVector::from_indices(coords.len(), sub.iter().copied());
                    if m.matvec(&x).unwrap() == rhs {
                        brute.insert(sub.to_vec());
                    }
                });
                let found: BTreeSet<Vec<usize>> = search.solve(v, &rhs).unwrap().into_iter().collect();
                assert!(found.is_subset(&brute));
                assert_eq!(found.len(), brute.len().min(2));
                assert!(brute.contains(
                    &g.neighbors(v)
                        .iter()
                        .map(|&u| u - (u > v) as usize)
                        .collect::<Vec<_>>()
                ));
            }
        }
    }

    #[test]
    fn left_inverse_of_full_rank_matrix() {
        let mut r = rng(9);
        let m = BitMatrix::random(40, 25, &mut r);
        let l = left_inverse(&m).expect("random 40x25 has full column rank here");
        assert_eq!(l.mul(&m).unwrap(), BitMatrix::identity(25));
        let mut deficient = BitMatrix::zeros(30, 3);
        deficient.set(0, 0, true);
        deficient.set(1, 1, true);
        assert!(left_inverse(&deficient).is_none());
        assert!(left_inverse(&BitMatrix::zeros(2, 3)).is_none());
    }

    #[test]
    fn subgraph_learning() {
        let cycle = Graph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
        let alt = Graph::from_edges(8, (0..8).step_by(2).map(|i| (i, (i + 1) % 8))).unwrap();
        for seed in 0..50 {
            let mut h = GraphOracle::new(alt.clone(), seed);
            assert_eq!(learn_subgraph_of(&mut h, &cycle).unwrap(), alt);
        }
        let mut h = GraphOracle::new(Graph::empty(5), 0);
        assert_eq!(
            learn_subgraph_of(&mut h, &Graph::empty(5)).unwrap(),
            Graph::empty(5)
        );
        assert_eq!(h.ledger().bell_samples(), 0);
    }

    #[test]
    fn bounded_edges_parity() {
        let mut h = GraphOracle::new(Graph::empty(20), 0);
        assert_eq!(learn_bounded_edges_parity(&mut h, 0).unwrap(), Graph::empty(20));
        assert_eq!(h.ledger().parity_query(), 0);

        let star = Graph::star(200, 17, &(100..120).collect::<Vec<_>>()).unwrap();
        let mut h = GraphOracle::new(star.clone(), 1);
        assert_eq!(learn_bounded_edges_parity(&mut h, 20).unwrap(), star);
        assert_eq!(h.ledger().graph_state_copy(), 0);

        let mut r = rng(6);
        for seed in 0..10 {
            let g = FamilySpec::new(128, FamilyKind::FixedEdgeCount { m: 40 })
                .generate(&mut r)
                .unwrap();
            let mut h = GraphOracle::new(g.clone(), seed);
            assert_eq!(learn_bounded_edges_parity(&mut h, 40).unwrap(), g);
        }
    }

    #[test]
    fn arbitrary_parity() {
        let tri = Graph::complete(3);
        let mut h = GraphOracle::new(tri.clone(), 0);
        assert_eq!(learn_arbitrary_parity(&mut h).unwrap(), tri);
        assert_eq!(h.ledger().parity_query(), 6);
        let mut h = GraphOracle::new(Graph::empty(9), 0);
        assert_eq!(learn_arbitrary_parity(&mut h).unwrap(), Graph::empty(9));
        assert_eq!(h.ledger().parity_query(), 18);
    }

    #[test]
    fn star_graphstate() {
        let mut r = rng(7);
        for m in [2, 5, 9] {
            for seed in 0..50 {
                let g = FamilySpec::new(40, FamilyKind::Star { m })
                    .generate(&mut r)
                    .unwrap();
                let mut h = GraphOracle::new(g.clone(), seed);
                let (c, leaves) = learn_star_graphstate(&mut h).unwrap();
                assert_eq!(Graph::star(40, c, &leaves).unwrap(), g);
            }
        }
    }

    #[test]
    fn clique_graphstate() {
        let mut r = rng(8);
        for k in [2, 6] {
            for seed in 0..50 {
                let g = FamilySpec::new(64, FamilyKind::Clique { k })
                    .generate(&mut r)
                    .unwrap();
                let mut h = GraphOracle::new(g.clone(), seed);
                assert_eq!(Some(learn_clique_graphstate(&mut h).unwrap()), g.as_clique());
            }
        }
    }
}
