//! Experiment configuration, read from JSON.

use std::path::Path;

use gql_core::cgt::{CgtBackend, CgtKind};
use gql_core::graphs::{all_graphs, all_subgraphs};
use gql_core::truth_table::TruthTableError;
use gql_core::{FamilyKind, FamilySpec, Graph, TruthTable};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerId {
    OrGraph,
    OrStar,
    OrClique,
    OrBipartite,
    Cgt,
    FamilyParity,
    BoundedDegree,
    SubgraphOf,
    BoundedEdgesParity,
    ArbitraryParity,
    StarGraphstate,
    CliqueGraphstate,
    SymmetricJunta,
    HighInfluenceJunta,
}

impl LearnerId {
    /// Learners whose hidden instance is a junta rather than a graph.
    pub fn uses_junta(self) -> bool {
        matches!(self, Self::SymmetricJunta | Self::HighInfluenceJunta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendId {
    #[default]
    Classical,
    QuantumIdeal,
    QuantumTimeEfficient,
}

impl BackendId {
    pub fn backend(self, c: f64) -> CgtBackend {
        let kind = match self {
            Self::Classical => CgtKind::ClassicalAdaptive,
            Self::QuantumIdeal => CgtKind::QuantumIdeal,
            Self::QuantumTimeEfficient => CgtKind::QuantumTimeEfficient,
        };
        CgtBackend::new(kind).with_constant(c)
    }
}

/// A Boolean function on `k` bits hidden inside a junta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Majority {
        k: usize,
    },
    ExactHalf {
        k: usize,
    },
    Parity {
        k: usize,
    },
    Or {
        k: usize,
    },
    And {
        k: usize,
    },
    /// Uniform random table, redrawn until every influence is at least
    /// `min_influence`.
    Random {
        k: usize,
        #[serde(default)]
        min_influence: Option<f64>,
    },
    Hex {
        k: usize,
        hex: String,
    },
}

/// Draws before a `Random` function with an influence floor is given up.
const INFLUENCE_REDRAWS: usize = 10_000;

impl FunctionSpec {
    pub fn arity(&self) -> usize {
        match self {
            Self::Majority { k }
            | Self::ExactHalf { k }
            | Self::Parity { k }
            | Self::Or { k }
            | Self::And { k }
            | Self::Random { k, .. }
            | Self::Hex { k, .. } => *k,
        }
    }

    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TruthTable, HarnessError> {
        Ok(match self {
            Self::Majority { k } => TruthTable::majority(*k),
            Self::ExactHalf { k } => TruthTable::exact_half(*k),
            Self::Parity { k } => TruthTable::parity(*k),
            Self::Or { k } => TruthTable::or(*k),
            Self::And { k } => TruthTable::and(*k),
            Self::Hex { k, hex } => TruthTable::from_hex(*k, hex).map_err(bad_table)?,
            Self::Random { k, min_influence } => {
                let floor = min_influence.unwrap_or(0.0);
                for _ in 0..INFLUENCE_REDRAWS {
                    let g = TruthTable::random(*k, rng).map_err(bad_table)?;
                    let inf = gql_core::fourier_learners::InfluenceProfile::<f64>::by_flips(&g);
                    if inf.min().is_none_or(|(_, v)| v >= floor) {
                        return Ok(g);
                    }
                }
                return Err(HarnessError::Config(format!(
                    "no random {k}-bit function with influences >= {floor}"
                )));
            }
        })
    }

    /// Level used by the symmetric-junta learner when none is configured.
    pub fn default_level(&self) -> Option<usize> {
        match self {
            Self::Majority { k } => Some(k.div_ceil(2)),
            Self::ExactHalf { k } => Some(k / 2),
            Self::Parity { k } => Some(*k),
            _ => None,
        }
    }
}

fn bad_table(e: TruthTableError) -> HarnessError {
    HarnessError::Config(e.to_string())
}

/// Explicit candidate families for the family learner; the hidden graph is a
/// uniform member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateSet {
    /// Every graph on `n` vertices.
    AllGraphs,
    /// Every subgraph of `base`.
    Subgraphs { base: Graph },
}

impl CandidateSet {
    pub fn members(&self, n: usize) -> Vec<Graph> {
        match self {
            Self::AllGraphs => all_graphs(n),
            Self::Subgraphs { base } => all_subgraphs(base),
        }
    }
}

/// One point of the size grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub n: usize,
    /// Hidden-graph family.
    #[serde(default)]
    pub family: Option<FamilyKind>,
    /// Hidden function for junta learners.
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub candidates: Option<CandidateSet>,
    /// Degree bound given to the learner.
    #[serde(default)]
    pub d: Option<usize>,
    /// Edge count (or edge bound) given to the learner.
    #[serde(default)]
    pub m: Option<usize>,
    /// Explicit Bell sample count for the family learner.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Cross-edge probability for bipartite instances on the two halves.
    #[serde(default)]
    pub p: Option<f64>,
    /// Edge retention probability for subgraph instances: the family draws
    /// the known supergraph and each of its edges is kept independently.
    #[serde(default)]
    pub keep: Option<f64>,
    #[serde(default)]
    pub level: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
}

impl GridPoint {
    pub fn family_spec(&self) -> Option<FamilySpec> {
        self.family.clone().map(|kind| FamilySpec::new(self.n, kind))
    }
}

/// Parameter a scaling slope is fitted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    N,
    M,
    D,
    K,
}

/// Cost column a scaling slope is fitted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    OrQueries,
    /// OR queries plus charged quantum cost.
    OrCost,
    ParityQueries,
    Copies,
    ChargedQuantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub metric: Metric,
    pub param: Param,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Minimum success rate at every grid point.
    #[serde(default)]
    pub min_success: Option<f64>,
    #[serde(default)]
    pub slope: Option<SlopeCheck>,
}

fn default_trials() -> usize {
    100
}

fn default_c() -> f64 {
    1.0
}

fn default_slack() -> usize {
    gql_core::parity_learners::DEFAULT_DEGREE_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub learner: LearnerId,
    #[serde(default)]
    pub backend: BackendId,
    pub grid: Vec<GridPoint>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Cost constant of the quantum group-testing backends.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Extra samples of the bounded-degree learner.
    #[serde(default = "default_slack")]
    pub slack: usize,
    /// Give the OR graph learner the true edge count.
    #[serde(default)]
    pub m_hint: bool,
    /// Record wall time; off by default so output is reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn new(learner: LearnerId, grid: Vec<GridPoint>) -> Self {
        Self {
            name: String::new(),
            learner,
            backend: BackendId::default(),
            grid,
            trials: default_trials(),
            seed: 0,
            c: default_c(),
            slack: default_slack(),
            m_hint: false,
            timing: false,
            thresholds: Thresholds::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every grid point against the learner before anything runs.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.c.is_nan() || self.c <= 0.0 {
            return Err(HarnessError::Config(format!(
                "c must be positive, got {}",
                self.c
            )));
        }
        for (i, p) in self.grid.iter().enumerate() {
            self.validate_point(p)
                .map_err(|msg| HarnessError::Config(format!("grid point {i}: {msg}")))?;
        }
        Ok(())
    }

    fn validate_point(&self, p: &GridPoint) -> Result<(), String> {
        use LearnerId::*;
        let family = || p.family_spec().ok_or_else(|| "needs a family".to_string());
        if self.learner.uses_junta() {
            let f = p.function.as_ref().ok_or("needs a function")?;
            if f.arity() > p.n {
                return Err(format!("function arity {} exceeds n = {}", f.arity(), p.n));
            }
            if self.learner == SymmetricJunta && p.level.or(f.default_level()).is_none() {
                return Err("needs a level".into());
            }
            if self.learner == HighInfluenceJunta && p.eps.is_none() {
                return Err("needs eps".into());
            }
            return Ok(());
        }
        match self.learner {
            FamilyParity => {
                if p.candidates.is_none() {
                    return Err("needs candidates".into());
                }
                if let Some(CandidateSet::Subgraphs { base }) = &p.candidates {
                    if base.n() != p.n {
                        return Err("candidate base must have n vertices".into());
                    }
                }
                if matches!(p.candidates, Some(CandidateSet::AllGraphs)) && p.n > 6 {
                    return Err("all graphs is limited to n <= 6".into());
                }
            }
            OrBipartite => {
                if !p.p.is_some_and(|x| (0.0..=1.0).contains(&x)) {
                    return Err("needs a cross-edge probability p in [0, 1]".into());
                }
            }
            Cgt => {
                if p.m.is_none_or(|m| m > p.n) {
                    return Err("needs a hidden set size m <= n".into());
                }
            }
            OrStar | StarGraphstate => {
                if !matches!(p.family, Some(FamilyKind::Star { .. })) {
                    return Err("needs a star family".into());
                }
            }
            OrClique | CliqueGraphstate => {
                if !matches!(p.family, Some(FamilyKind::Clique { k }) if k >= 2) {
                    return Err("needs a clique family with k >= 2".into());
                }
            }
            SubgraphOf => {
                if !p.keep.is_some_and(|x| (0.0..=1.0).contains(&x)) {
                    return Err("needs a keep probability in [0, 1]".into());
                }
            }
            BoundedDegree if p.d.is_none() => return Err("needs d".into()),
            _ => {}
        }
        if !matches!(self.learner, FamilyParity | OrBipartite | Cgt) {
            family()?.validate().map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}
