//! Learning hidden graphs and juntas from OR, parity and quantum queries.
//!
//! The crate is organised bottom-up: GF(2) linear algebra and graph families,
//! a small exact quantum simulator, metered oracles, combinatorial group
//! testing, and the learners built on top of them.

pub mod cgt;
pub mod f2core;
pub mod fourier_learners;
pub mod graphs;
pub mod or_learners;
pub mod oracles;
pub mod parity_learners;
pub mod quantum_sim;
pub mod scalar;
pub mod truth_table;

pub use f2core::{BitMatrix, BitVector, F2Error};
pub use graphs::{FamilyKind, FamilySpec, Graph, GraphError};
pub use oracles::{GraphOracle, Junta, JuntaOracle, QueryLedger};
pub use scalar::Scalar;
pub use truth_table::TruthTable;

pub type Statevector64 = quantum_sim::Statevector<f64>;
pub type Statevector32 = quantum_sim::Statevector<f32>;
pub type FourierTable64 = fourier_learners::FourierTable<f64>;
pub type FourierTable32 = fourier_learners::FourierTable<f32>;
pub use fourier_learners::Rational;
