//! Hidden-graph instances and the structured families they are drawn from.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2core::{BitMatrix, BitVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid edge ({0}, {1}) for a graph on {2} vertices")]
    InvalidEdge(usize, usize, usize),
    #[error("infeasible family parameters: {0}")]
    Infeasible(String),
    #[error("edge list parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are kept as sorted `(i, j)` pairs with `i < j` alongside sorted
/// neighbor lists; the dense adjacency matrix is only materialized on request.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    nbrs: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            nbrs: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from unordered pairs; duplicates are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(GraphError::InvalidEdge(a, b, n));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut nbrs = vec![Vec::new(); n];
        for &(i, j) in &set {
            nbrs[i].push(j);
            nbrs[j].push(i);
        }
        for list in &mut nbrs {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
            nbrs,
        })
    }

    /// Reads the upper triangle of a symmetric zero-diagonal matrix.
    pub fn from_adjacency(adj: &BitMatrix) -> Result<Self, GraphError> {
        let n = adj.rows();
        if adj.cols() != n || !adj.is_symmetric() || (0..n).any(|i| adj.get(i, i)) {
            return Err(GraphError::Infeasible(
                "adjacency must be square, symmetric, zero-diagonal".into(),
            ));
        }
        let edges = (0..n).flat_map(|i| {
            adj.row(i)
                .iter_ones()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        });
        Self::from_edges(n, edges.collect::<Vec<_>>())
    }

    pub fn complete(n: usize) -> Self {
        Self::clique_on(n, &(0..n).collect::<Vec<_>>())
    }

    pub fn clique_on(n: usize, vertices: &[usize]) -> Self {
        let mut edges = Vec::new();
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, edges).expect("clique vertices in range")
    }

    pub fn star(n: usize, center: usize, leaves: &[usize]) -> Result<Self, GraphError> {
        Self::from_edges(n, leaves.iter().map(|&l| (center, l)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order, `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Dense `n x n` adjacency matrix over GF(2).
    pub fn adjacency(&self) -> BitMatrix {
        let rows = (0..self.n).map(|v| self.neighbor_set(v)).collect();
        BitMatrix::from_rows(self.n, rows).expect("rows have length n")
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    /// Row `v` of the adjacency matrix.
    pub fn neighbor_set(&self, v: usize) -> BitVector {
        BitVector::from_indices(self.n, self.nbrs[v].iter().copied())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.nbrs[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbrs[v].len()
    }

    /// `A s` over GF(2), computed from the edge list.
    ///
    /// # Panics
    /// If `s.len() != n`.
    pub fn adjacency_times(&self, s: &BitVector) -> BitVector {
        assert_eq!(s.len(), self.n, "vector length must equal vertex count");
        let mut y = BitVector::zeros(self.n);
        for &(i, j) in &self.edges {
            if s.get(j) {
                y.flip(i);
            }
            if s.get(i) {
                y.flip(j);
            }
        }
        y
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Vertices incident to at least one edge.
    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.nbrs[v].is_empty()).collect()
    }

    /// True if some edge has both endpoints in `set`.
    pub fn has_edge_within(&self, set: &BitVector) -> bool {
        self.edges.iter().any(|&(i, j)| set.get(i) && set.get(j))
    }

    /// Number of edges with both endpoints in `set`.
    pub fn edges_within(&self, set: &BitVector) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| set.get(i) && set.get(j))
            .count()
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges.iter().all(|&(i, j)| other.has_edge(i, j))
    }

    /// If the graph is a star with at least two leaves, its center and leaves.
    /// A single edge is reported with the lower endpoint as center.
    pub fn as_star(&self) -> Option<(usize, Vec<usize>)> {
        let first = *self.edges.first()?;
        let center = if self.edges.iter().all(|&(i, j)| i == first.0 || j == first.0) {
            first.0
        } else if self.edges.iter().all(|&(i, j)| i == first.1 || j == first.1) {
            first.1
        } else {
            return None;
        };
        let leaves = self.nbrs[center].clone();
        Some((center, leaves))
    }

    /// If the edges form a clique on the non-isolated vertices, those vertices.
    pub fn as_clique(&self) -> Option<Vec<usize>> {
        let support = self.non_isolated();
        let k = support.len();
        (k >= 2 && self.m() == k * (k - 1) / 2).then_some(support)
    }

    /// Text edge list: `"n m"` then one `"i j"` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for (i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_pair = |line: usize, s: &str| -> Result<(usize, usize), GraphError> {
            let mut it = s.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(GraphError::Parse {
                    line: line + 1,
                    msg: format!("expected two integers, got {s:?}"),
                }),
            }
        };
        let (hl, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m) = parse_pair(hl, header)?;
        let mut edges = Vec::with_capacity(m);
        for (ln, l) in lines {
            let (i, j) = parse_pair(ln, l)?;
            if i >= j {
                return Err(GraphError::Parse {
                    line: ln + 1,
                    msg: format!("expected i < j, got {i} {j}"),
                });
            }
            edges.push((i, j));
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, edges)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        Graph::from_edges(repr.n, repr.edges).map_err(serde::de::Error::custom)
    }
}

/// Graph families used as hidden instances. Structured families occupy a
/// uniformly random subset of the vertices; the rest stay isolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Perfect matching on `k` support vertices (`k` even).
    Matching {
        k: usize,
    },
    /// A single cycle through `k` support vertices.
    HamiltonianCycle {
        k: usize,
    },
    /// Star with `m` leaves.
    Star {
        m: usize,
    },
    Clique {
        k: usize,
    },
    /// Exactly `m` edges, max degree at most `d`, on `support` vertices
    /// (all `n` when absent).
    BoundedDegree {
        d: usize,
        m: usize,
        #[serde(default)]
        support: Option<usize>,
    },
    /// Uniform over graphs with exactly `m` edges.
    FixedEdgeCount {
        m: usize,
    },
    /// Each edge of `base` kept independently with probability `keep`.
    SubgraphOf {
        base: Graph,
        keep: f64,
    },
    /// Two cliques on `n/2` vertices joined by the cross pattern; uniformly
    /// random cross pattern when absent.
    TwoCliqueAdversary {
        #[serde(default)]
        cross: Option<BitMatrix>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    #[serde(flatten)]
    pub kind: FamilyKind,
}

impl FamilySpec {
    pub fn new(n: usize, kind: FamilyKind) -> Self {
        Self { n, kind }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.n;
        let bad = |msg: String| Err(GraphError::Infeasible(msg));
        match &self.kind {
            FamilyKind::Matching { k } if k % 2 != 0 || *k > n => {
                bad(format!("matching needs even support k <= n, got k={k}, n={n}"))
            }
            FamilyKind::HamiltonianCycle { k } if *k < 3 || *k > n => {
                bad(format!("cycle needs 3 <= k <= n, got k={k}, n={n}"))
            }
            FamilyKind::Star { m } if *m == 0 || m + 1 > n => {
                bad(format!("star needs 1 <= m < n, got m={m}, n={n}"))
            }
            FamilyKind::Clique { k } if *k > n => bad(format!("clique k={k} exceeds n={n}")),
            FamilyKind::BoundedDegree { d, m, support } => {
                let s = support.unwrap_or(n);
                if *d >= n || s > n {
                    bad(format!(
                        "bounded degree needs d < n and support <= n (d={d}, n={n})"
                    ))
                } else if m * 2 > s * d.min(&s.saturating_sub(1)) {
                    bad(format!("{m} edges impossible with degree <= {d} on {s} vertices"))
                } else {
                    Ok(())
                }
            }
            FamilyKind::FixedEdgeCount { m } if *m > n * n.saturating_sub(1) / 2 => bad(format!(
                "{m} edges exceed the {} possible pairs",
                n * (n.max(1) - 1) / 2
            )),
            FamilyKind::SubgraphOf { base, keep } => {
                if base.n() != n {
                    bad(format!("base graph has {} vertices, expected {n}", base.n()))
                } else if !(0.0..=1.0).contains(keep) {
                    bad(format!("keep probability {keep} outside [0, 1]"))
                } else {
                    Ok(())
                }
            }
            FamilyKind::TwoCliqueAdversary { cross } => {
                if !n.is_multiple_of(2) {
                    bad(format!("adversary family needs even n, got {n}"))
                } else if cross
                    .as_ref()
                    .is_some_and(|c| c.rows() != n / 2 || c.cols() != n / 2)
                {
                    bad("cross matrix must be (n/2) x (n/2)".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Draws a uniformly random member of the family.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph, GraphError> {
        self.validate()?;
        let n = self.n;
        match &self.kind {
            FamilyKind::Matching { k } => {
                let s = random_support(n, *k, rng);
                Graph::from_edges(n, s.chunks(2).map(|p| (p[0], p[1])))
            }
            FamilyKind::HamiltonianCycle { k } => {
                let s = random_support(n, *k, rng);
                Graph::from_edges(n, (0..*k).map(|i| (s[i], s[(i + 1) % k])))
            }
            FamilyKind::Star { m } => {
                let s = random_support(n, m + 1, rng);
                Graph::star(n, s[0], &s[1..])
            }
            FamilyKind::Clique { k } => Ok(Graph::clique_on(n, &random_support(n, *k, rng))),
            FamilyKind::BoundedDegree { d, m, support } => {
                bounded_degree(n, *d, *m, support.unwrap_or(n), rng)
            }
            FamilyKind::FixedEdgeCount { m } => {
                let total = n * n.saturating_sub(1) / 2;
                let picked = index::sample(rng, total, *m);
                Graph::from_edges(n, picked.into_iter().map(|t| pair_from_index(n, t)))
            }
            FamilyKind::SubgraphOf { base, keep } => Graph::from_edges(
                n,
                base.edges()
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(*keep))
                    .collect::<Vec<_>>(),
            ),
            FamilyKind::TwoCliqueAdversary { cross } => {
                let half = n / 2;
                let m = match cross {
                    Some(c) => c.clone(),
                    None => BitMatrix::random(half, half, rng),
                };
                Ok(adversary_instance(half, &m))
            }
        }
    }
}

fn random_support<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut s = index::sample(rng, n, k).into_vec();
    s.shuffle(rng);
    s
}

/// Maps `t` in `0..n(n-1)/2` to the `t`-th pair in lexicographic order.
fn pair_from_index(n: usize, mut t: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - 1 - i;
        if t < row {
            return (i, i + 1 + t);
        }
        t -= row;
    }
    unreachable!("pair index out of range")
}

fn bounded_degree<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    m: usize,
    support: usize,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    const ATTEMPTS: usize = 64;
    let verts = random_support(n, support, rng);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(support * support / 2);
    for a in 0..support {
        for b in a + 1..support {
            pairs.push((verts[a], verts[b]));
        }
    }
    for _ in 0..ATTEMPTS {
        pairs.shuffle(rng);
        let mut deg = vec![0usize; n];
        let mut chosen = Vec::with_capacity(m);
        for &(u, v) in &pairs {
            if chosen.len() == m {
                break;
            }
            if deg[u] < d && deg[v] < d {
                deg[u] += 1;
                deg[v] += 1;
                chosen.push((u, v));
            }
        }
        if chosen.len() == m {
            return Graph::from_edges(n, chosen);
        }
    }
    Err(GraphError::Infeasible(format!(
        "greedy sampler could not place {m} edges with degree <= {d} on {support} vertices"
    )))
}

/// Two `n`-cliques on `0..n` and `n..2n`, with cross edge `(i, n + j)` iff
/// `cross[i][j] = 1`.
pub fn adversary_instance(n: usize, cross: &BitMatrix) -> Graph {
    assert_eq!((cross.rows(), cross.cols()), (n, n), "cross block must be n x n");
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
            edges.push((n + i, n + j));
        }
        edges.extend(cross.row(i).iter_ones().map(|j| (i, n + j)));
    }
    Graph::from_edges(2 * n, edges).expect("adversary edges in range")
}

/// Every graph on `n` labelled vertices, ordered by edge bitmask.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    assert!(pairs.len() <= 20, "too many graphs to enumerate");
    (0u32..(1 << pairs.len()))
        .map(|mask| {
            Graph::from_edges(
                n,
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| mask >> t & 1 == 1)
                    .map(|(_, &p)| p),
            )
            .expect("valid pairs")
        })
        .collect()
}

/// Every subgraph (same vertex set) of `base`.
pub fn all_subgraphs(base: &Graph) -> Vec<Graph> {
    let e = base.edges();
    assert!(e.len() <= 20, "too many subgraphs to enumerate");
    (0u32..(1 << e.len()))
        .map(|mask| {
            Graph::from_edges(
                base.n(),
                e.iter()
                    .enumerate()
                    .filter(|(t, _)| mask >> t & 1 == 1)
                    .map(|(_, &p)| p),
            )
            .expect("valid pairs")
        })
        .collect()
}
