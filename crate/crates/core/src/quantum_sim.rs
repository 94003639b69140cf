//! Exact statevector simulation at desk scale.
//!
//! Used as the ground truth for Bell sampling, Fourier sampling and the
//! Bernstein-Vazirani reconstruction from a subset-size oracle. Amplitudes are
//! real: every state built here (graph states, phase-oracle states, the BV
//! register) has real amplitudes in the computational basis.

use rand::Rng;
use thiserror::Error;

use crate::graphs::Graph;
use crate::scalar::Scalar;
use crate::truth_table::TruthTable;

/// Largest register simulated as a full statevector.
pub const MAX_QUBITS: usize = 16;
/// Largest register for the exact Bell-outcome table (4^n entries).
pub const MAX_BELL_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumError {
    #[error("{n} qubits exceeds the simulation cap of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("expected {expected} amplitudes, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("function is not monotone")]
    NotMonotone,
}

fn check_qubits(n: usize, max: usize) -> Result<(), QuantumError> {
    if n > max {
        Err(QuantumError::TooManyQubits { n, max })
    } else {
        Ok(())
    }
}

/// Real amplitudes over `2^n` basis states; qubit `i` is bit `i` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector<T> {
    n: usize,
    amps: Vec<T>,
}

impl<T: Scalar> Statevector<T> {
    /// `|0...0>`.
    pub fn zero_state(n: usize) -> Result<Self, QuantumError> {
        check_qubits(n, MAX_QUBITS)?;
        let mut amps = vec![T::zero(); 1 << n];
        amps[0] = T::one();
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<T>) -> Result<Self, QuantumError> {
        check_qubits(n, MAX_QUBITS)?;
        if amps.len() != 1 << n {
            return Err(QuantumError::LengthMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    #[inline]
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|&a| a * a).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|&a| a * a).collect()
    }

    pub fn apply_h(&mut self, q: usize) {
        let bit = 1usize << q;
        let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = (a + b) * s;
                self.amps[i | bit] = (a - b) * s;
            }
        }
    }

    pub fn apply_h_all(&mut self) {
        for q in 0..self.n {
            self.apply_h(q);
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    pub fn apply_z(&mut self, q: usize) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a = -*a;
            }
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// `|x> -> (-1)^{f(x)} |x>`.
    pub fn apply_phase_oracle(&mut self, f: impl Fn(usize) -> bool) {
        for (x, amp) in self.amps.iter_mut().enumerate() {
            if f(x) {
                *amp = -*amp;
            }
        }
    }

    /// `X^x_mask Z^z_mask` applied to the state (Z first).
    pub fn apply_xz(&mut self, x_mask: usize, z_mask: usize) {
        for z in 0..self.n {
            if z_mask >> z & 1 == 1 {
                self.apply_z(z);
            }
        }
        for x in 0..self.n {
            if x_mask >> x & 1 == 1 {
                self.apply_x(x);
            }
        }
    }

    pub fn inner(&self, other: &Self) -> T {
        self.amps.iter().zip(&other.amps).map(|(&a, &b)| a * b).sum()
    }

    /// Computational-basis measurement.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probabilities(), rng)
    }
}

/// Draws an index with probability proportional to `weights`.
pub fn sample_index<T: Scalar, R: Rng + ?Sized>(weights: &[T], rng: &mut R) -> usize {
    let total: f64 = weights.iter().map(|w| w.to_f64_lossy()).sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        let w = w.to_f64_lossy();
        if u < w {
            return i;
        }
        u -= w;
    }
    // rounding fell off the end: last index with positive weight
    weights
        .iter()
        .rposition(|w| w.to_f64_lossy() > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// `|G>`: Hadamards on every qubit, then CZ on every edge.
pub fn build_graph_state<T: Scalar>(g: &Graph) -> Result<Statevector<T>, QuantumError> {
    let mut psi = Statevector::zero_state(g.n())?;
    psi.apply_h_all();
    for &(i, j) in g.edges() {
        psi.apply_cz(i, j);
    }
    Ok(psi)
}

/// A Pauli string `X^x Z^z` up to phase; qubits with both bits set carry `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub n: usize,
    pub x: usize,
    pub z: usize,
}

impl PauliString {
    pub fn parse(label: &str) -> Option<Self> {
        let (mut x, mut z) = (0usize, 0usize);
        for (i, c) in label.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << i,
                'Z' => z |= 1 << i,
                'Y' => {
                    x |= 1 << i;
                    z |= 1 << i;
                }
                _ => return None,
            }
        }
        Some(Self {
            n: label.chars().count(),
            x,
            z,
        })
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|i| match (self.x >> i & 1, self.z >> i & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliOutcome<T> {
    pub pauli: PauliString,
    pub probability: T,
}

/// Exact Bell-sampling outcome distribution on two copies of `psi`:
/// `Pr[s] = |<psi| sigma_s |psi*>|^2 / 2^n`, over all `4^n` Pauli strings,
/// ordered by `(x, z)`.
pub fn bell_distribution<T: Scalar>(psi: &Statevector<T>) -> Result<Vec<PauliOutcome<T>>, QuantumError> {
    let n = psi.qubits();
    check_qubits(n, MAX_BELL_QUBITS)?;
    let dim = 1usize << n;
    let amps = psi.amplitudes();
    let scale = T::one() / T::of(dim as f64);
    let mut out = Vec::with_capacity(dim * dim);
    for x in 0..dim {
        for z in 0..dim {
            // <psi| X^x Z^z |psi> for real psi; Y contributes only a phase.
            let overlap: T = (0..dim)
                .map(|b| {
                    let sign = ((z & (b ^ x)).count_ones() & 1) == 1;
                    let term = amps[b] * amps[b ^ x];
                    if sign {
                        -term
                    } else {
                        term
                    }
                })
                .sum();
            out.push(PauliOutcome {
                pauli: PauliString { n, x, z },
                probability: overlap * overlap * scale,
            });
        }
    }
    Ok(out)
}

/// Exact output distribution of Fourier sampling: `H^n`, phase oracle, `H^n`,
/// measure. Entry `s` equals `f^(s)^2`.
pub fn fourier_sampling_distribution<T: Scalar>(f: &TruthTable) -> Result<Vec<T>, QuantumError> {
    let mut psi = Statevector::<T>::zero_state(f.arity())?;
    psi.apply_h_all();
    psi.apply_phase_oracle(|x| f.eval(x));
    psi.apply_h_all();
    Ok(psi.probabilities())
}

/// Outcome law of the size-oracle Bernstein-Vazirani procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct BvDistribution<T> {
    /// Probability that the ancilla check reports failure.
    pub failure: T,
    /// Measurement distribution over subsets, conditioned on no failure.
    pub outcomes: Vec<T>,
}

/// Builds `2^{-n/2} sum_T (-1)^{|S cap T|} (1 - delta_T) |T>|0>` from a size
/// oracle, post-selects the ancilla on `|0>`, and applies `H^n`.
///
/// `size_of(t)` must return `|S cap T|` for the subset mask `t`; `delta(t)` is
/// the error amplitude of the size sub-routine on `T` (zero for exact mode).
pub fn bv_distribution<T: Scalar>(
    n: usize,
    size_of: impl Fn(usize) -> usize,
    delta: impl Fn(usize) -> f64,
) -> Result<BvDistribution<T>, QuantumError> {
    check_qubits(n, MAX_QUBITS)?;
    let dim = 1usize << n;
    let norm = T::inv_sqrt_pow2(n);
    let amps: Vec<T> = (0..dim)
        .map(|t| {
            let keep = T::of(1.0 - delta(t));
            let a = norm * keep;
            if size_of(t) % 2 == 1 {
                -a
            } else {
                a
            }
        })
        .collect();
    let mut psi = Statevector::from_amplitudes(n, amps)?;
    let kept = psi.norm_sqr();
    let failure = T::one() - kept;
    if kept > T::zero() {
        let inv = T::one() / kept.sqrt();
        psi.amps.iter_mut().for_each(|a| *a *= inv);
    }
    psi.apply_h_all();
    Ok(BvDistribution {
        failure,
        outcomes: psi.probabilities(),
    })
}

/// One run of the size-oracle BV procedure. `None` is the failure flag.
pub fn bv_with_size_oracle<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    size_of: impl Fn(usize) -> usize,
    delta: impl Fn(usize) -> f64,
    rng: &mut R,
) -> Result<Option<Vec<usize>>, QuantumError> {
    let dist = bv_distribution::<T>(n, size_of, delta)?;
    Ok(sample_bv(&dist, n, rng))
}

pub fn sample_bv<T: Scalar, R: Rng + ?Sized>(
    dist: &BvDistribution<T>,
    n: usize,
    rng: &mut R,
) -> Option<Vec<usize>> {
    if rng.gen::<f64>() < dist.failure.to_f64_lossy() {
        return None;
    }
    let s = sample_index(&dist.outcomes, rng);
    Some((0..n).filter(|i| s >> i & 1 == 1).collect())
}

/// Exact size oracle `T -> |S cap T|` for a monotone junta given by its truth
/// table, `S` being its relevant variables.
pub fn monotone_size_oracle(f: &TruthTable) -> Result<impl Fn(usize) -> usize, QuantumError> {
    if !f.is_monotone() {
        return Err(QuantumError::NotMonotone);
    }
    let s_mask: usize = f.relevant_variables().iter().map(|&i| 1usize << i).sum();
    Ok(move |t: usize| (t & s_mask).count_ones() as usize)
}
