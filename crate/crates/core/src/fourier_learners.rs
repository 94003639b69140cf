//! Fourier analysis of Boolean functions and the junta learners built on it.
//!
//! Coefficients use the `(-1)^g` convention,
//! `g^(T) = 2^-k sum_x (-1)^(g(x) + T.x)`, unless a function says otherwise.

use std::collections::BTreeSet;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::oracles::{JuntaOracle, OracleError};
use crate::scalar::Scalar;
use crate::truth_table::TruthTable;

/// Exact rational used for closed-form coefficients.
pub type Rational = Ratio<i128>;

/// Largest arity for a full coefficient table.
pub const MAX_TABLE_ARITY: usize = 20;
/// Largest arity for the exact rational formulas.
pub const MAX_EXACT_ARITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FourierError {
    #[error("arity {k} exceeds the limit {max}")]
    ArityTooLarge { k: usize, max: usize },
    #[error("majority coefficients need odd arity, got {0}")]
    EvenMajority(usize),
    #[error("exact-half needs even arity, got {0}")]
    OddExactHalf(usize),
    #[error("subset size {size} exceeds arity {k}")]
    SubsetTooLarge { size: usize, k: usize },
    #[error("function is not symmetric")]
    NotSymmetric,
    #[error("level {level} is out of range for arity {k}")]
    LevelOutOfRange { level: usize, k: usize },
    #[error("no Fourier weight at levels >= {0}")]
    ZeroWeight(usize),
    #[error("variable {var} has influence {influence} < {eps}")]
    LowInfluence { var: usize, influence: f64, eps: f64 },
    #[error("{successes} of {needed} amplified rounds succeeded within {rounds} attempts")]
    TooFewSuccesses {
        successes: usize,
        needed: usize,
        rounds: usize,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// In-place unnormalized Walsh-Hadamard transform; `values.len()` must be a
/// power of two.
pub fn walsh_hadamard<T: Scalar>(values: &mut [T]) {
    let n = values.len();
    assert!(n.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// All `2^k` coefficients of a function together with level weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable<T> {
    k: usize,
    coeffs: Vec<T>,
    levels: Vec<T>,
}

/// Exact transform of `g` in the `(-1)^g` convention.
pub fn fourier_table<T: Scalar>(g: &TruthTable) -> Result<FourierTable<T>, FourierError> {
    let k = g.arity();
    if k > MAX_TABLE_ARITY {
        return Err(FourierError::ArityTooLarge {
            k,
            max: MAX_TABLE_ARITY,
        });
    }
    let mut coeffs: Vec<T> = (0..g.size())
        .map(|x| if g.eval(x) { -T::one() } else { T::one() })
        .collect();
    walsh_hadamard(&mut coeffs);
    let scale = T::one() / T::of(g.size() as f64);
    coeffs.iter_mut().for_each(|c| *c *= scale);
    let mut levels = vec![T::zero(); k + 1];
    for (s, &c) in coeffs.iter().enumerate() {
        levels[s.count_ones() as usize] += c * c;
    }
    Ok(FourierTable { k, coeffs, levels })
}

impl<T: Scalar> FourierTable<T> {
    #[inline]
    pub fn arity(&self) -> usize {
        self.k
    }

    /// `g^(T)` for the subset with bit mask `t`.
    #[inline]
    pub fn coefficient(&self, t: usize) -> T {
        self.coeffs[t]
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    /// `W_l`: squared mass on subsets of size exactly `l`.
    pub fn level_weight(&self, l: usize) -> T {
        self.levels.get(l).copied().unwrap_or_else(T::zero)
    }

    pub fn level_weights(&self) -> &[T] {
        &self.levels
    }

    /// `W_{>=l}`.
    pub fn weight_at_least(&self, l: usize) -> T {
        self.levels.iter().skip(l).copied().sum()
    }

    /// Sum of all squared coefficients; 1 for every Boolean function.
    pub fn total_weight(&self) -> T {
        self.levels.iter().copied().sum()
    }

    /// `Inf_j = sum_{T contains j} g^(T)^2`.
    pub fn influences(&self) -> InfluenceProfile<T> {
        let mut values = vec![T::zero(); self.k];
        for (t, &c) in self.coeffs.iter().enumerate() {
            let w = c * c;
            for (j, v) in values.iter_mut().enumerate() {
                if t >> j & 1 == 1 {
                    *v += w;
                }
            }
        }
        InfluenceProfile { values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceProfile<T> {
    values: Vec<T>,
}

impl<T: Scalar> InfluenceProfile<T> {
    /// `Pr_x[g(x) != g(x ^ e_j)]` by direct enumeration.
    pub fn by_flips(g: &TruthTable) -> Self {
        let size = T::of(g.size() as f64);
        let values = (0..g.arity())
            .map(|j| {
                let flips = (0..g.size())
                    .filter(|&x| g.eval(x) != g.eval(x ^ (1 << j)))
                    .count();
                T::of(flips as f64) / size
            })
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, j: usize) -> T {
        self.values[j]
    }

    /// Smallest influence and the variable attaining it.
    pub fn min(&self) -> Option<(usize, T)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("influences are finite"))
    }
}

fn binomial(n: usize, r: usize) -> i128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn check_exact_arity(k: usize) -> Result<(), FourierError> {
    if k > MAX_EXACT_ARITY {
        Err(FourierError::ArityTooLarge {
            k,
            max: MAX_EXACT_ARITY,
        })
    } else {
        Ok(())
    }
}

/// Closed-form `MAJ_k^(S)` for `|S| = s`, `k` odd, in the `(-1)^g` convention:
/// zero for even `s`, otherwise
/// `(-1)^((s-1)/2) C((k-1)/2, (s-1)/2) / C(k-1, s-1) * 2^(1-k) * C(k-1, (k-1)/2)`.
pub fn maj_coefficient(k: usize, s: usize) -> Result<Rational, FourierError> {
    if k.is_multiple_of(2) {
        return Err(FourierError::EvenMajority(k));
    }
    check_exact_arity(k)?;
    if s > k {
        return Err(FourierError::SubsetTooLarge { size: s, k });
    }
    if s.is_multiple_of(2) {
        return Ok(Rational::zero());
    }
    let half = (k - 1) / 2;
    let magnitude = Rational::new(binomial(half, (s - 1) / 2), binomial(k - 1, s - 1))
        * Rational::new(2 * binomial(k - 1, half), 1i128 << k);
    Ok(if (s - 1) / 2 % 2 == 1 {
        -magnitude
    } else {
        magnitude
    })
}

/// `W_l(MAJ_k)` for `l = 0..=k`, exact.
pub fn maj_level_weights(k: usize) -> Result<Vec<Rational>, FourierError> {
    (0..=k)
        .map(|l| {
            let c = maj_coefficient(k, l)?;
            Ok(c * c * Rational::from_integer(binomial(k, l)))
        })
        .collect()
}

/// EXACT-HALF coefficient in the 0/1 convention
/// `g^(s) = 2^-k sum_x (-1)^(s.x) g(x)` for `|s| = w`, via the Krawtchouk sum
/// `2^-k sum_i (-1)^i C(w, i) C(k - w, k/2 - i)`.
pub fn exact_half_coefficient01(k: usize, w: usize) -> Result<Rational, FourierError> {
    if k % 2 == 1 {
        return Err(FourierError::OddExactHalf(k));
    }
    check_exact_arity(k)?;
    if w > k {
        return Err(FourierError::SubsetTooLarge { size: w, k });
    }
    let half = k / 2;
    let sum: i128 = (0..=half.min(w))
        .map(|i| {
            let term = binomial(w, i) * binomial(k - w, half - i);
            if i % 2 == 1 {
                -term
            } else {
                term
            }
        })
        .sum();
    Ok(Rational::new(sum, 1i128 << k))
}

/// Level weights of EXACT-HALF_k in the `(-1)^g` convention, exact.
///
/// The two conventions are related by `g^(s) = [s = 0] - 2 g01^(s)`.
pub fn exact_half_level_weights(k: usize) -> Result<Vec<Rational>, FourierError> {
    (0..=k)
        .map(|w| {
            let c01 = exact_half_coefficient01(k, w)?;
            let c = if w == 0 {
                Rational::one() - c01 * 2
            } else {
                -(c01 * 2)
            };
            Ok(c * c * Rational::from_integer(binomial(k, w)))
        })
        .collect()
}

/// Sum of `weights[l..]` as `f64`.
pub fn tail_weight(weights: &[Rational], l: usize) -> f64 {
    let tail: Rational = weights.iter().skip(l).copied().sum();
    *tail.numer() as f64 / *tail.denom() as f64
}

/// Successes needed by the amplified level sampler: `ceil((k/l) ln(k/delta)) + ceil(k/l)`.
pub fn amplified_success_target(k: usize, l: usize, delta: f64) -> usize {
    let ratio = k as f64 / l as f64;
    (ratio * (k as f64 / delta).ln()).ceil() as usize + ratio.ceil() as usize
}

/// Plain Fourier samples used by the influence learner:
/// `ceil(ln(k/delta)/eps) + ceil(1/eps)`.
pub fn influence_sample_count(k: usize, eps: f64, delta: f64) -> usize {
    ((k as f64 / delta).ln() / eps).ceil() as usize + (1.0 / eps).ceil() as usize
}

/// Rounds allowed for the `l = k` case before giving up.
const TOP_LEVEL_ROUNDS: usize = 20;

/// Learns the relevant variables of a symmetric junta by amplified Fourier
/// sampling above level `l`.
///
/// Each round costs `ceil(1/sqrt(W_{>=l}))` junta queries and, on success,
/// yields a subset of the hidden variables of size at least `l`. The union
/// over `r` successful rounds is returned; at most `4r` rounds are attempted.
pub fn learn_symmetric_junta(
    oracle: &mut JuntaOracle,
    g: &TruthTable,
    l: usize,
    delta: f64,
) -> Result<Vec<usize>, FourierError> {
    let k = g.arity();
    if !g.is_symmetric() {
        return Err(FourierError::NotSymmetric);
    }
    if l == 0 || l > k {
        return Err(FourierError::LevelOutOfRange { level: l, k });
    }
    let mut found = BTreeSet::new();
    if l == k {
        for _ in 0..TOP_LEVEL_ROUNDS {
            if let Some(t) = oracle.amplified_fourier_sample(l)? {
                return Ok(t.iter_ones().collect());
            }
        }
        return Err(FourierError::TooFewSuccesses {
            successes: 0,
            needed: 1,
            rounds: TOP_LEVEL_ROUNDS,
        });
    }
    let needed = amplified_success_target(k, l, delta);
    let cap = 4 * needed;
    let mut successes = 0;
    let mut rounds = 0;
    while successes < needed && rounds < cap {
        rounds += 1;
        if let Some(t) = oracle.amplified_fourier_sample(l)? {
            successes += 1;
            found.extend(t.iter_ones());
        }
    }
    if successes < needed && found.len() < k {
        return Err(FourierError::TooFewSuccesses {
            successes,
            needed,
            rounds,
        });
    }
    Ok(found.into_iter().collect())
}

/// Learns the relevant variables when every one has influence at least `eps`,
/// from `ceil(ln(k/delta)/eps) + ceil(1/eps)` plain Fourier samples.
pub fn learn_high_influence_junta(
    oracle: &mut JuntaOracle,
    g: &TruthTable,
    eps: f64,
    delta: f64,
) -> Result<Vec<usize>, FourierError> {
    let k = g.arity();
    let table = fourier_table::<f64>(g)?;
    if let Some((var, influence)) = table.influences().min() {
        if influence < eps {
            return Err(FourierError::LowInfluence { var, influence, eps });
        }
    }
    let q = influence_sample_count(k, eps, delta);
    let mut found = BTreeSet::new();
    for _ in 0..q {
        found.extend(oracle.fourier_sample().iter_ones());
    }
    Ok(found.into_iter().collect())
}

/// Nearest `f64` to an exact coefficient.
pub fn rational_to_f64(c: &Rational) -> f64 {
    let sign = if c.is_negative() { -1.0 } else { 1.0 };
    let a = c.abs();
    sign * (*a.numer() as f64 / *a.denom() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct `2^-k sum_x (-1)^(g(x) + s.x)`, no fast transform.
    fn naive_coefficient(g: &TruthTable, s: usize) -> f64 {
        let sum: i64 = (0..g.size())
            .map(|x| {
                let e = g.eval(x) as u32 + (s & x).count_ones();
                if e.is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            })
            .sum();
        sum as f64 / g.size() as f64
    }

    #[test]
    fn transform_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..=7 {
            let g = TruthTable::random(k, &mut rng).unwrap();
            let table = fourier_table::<f64>(&g).unwrap();
            for s in 0..g.size() {
                assert_abs_diff_eq!(table.coefficient(s), naive_coefficient(&g, s), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn constants_parity_and_majority() {
        let zero = fourier_table::<f64>(&TruthTable::constant(4, false)).unwrap();
        assert_abs_diff_eq!(zero.level_weight(0), 1.0);
        let par = fourier_table::<f64>(&TruthTable::parity(5)).unwrap();
        assert_abs_diff_eq!(par.level_weight(5), 1.0);
        assert_abs_diff_eq!(par.weight_at_least(1), 1.0);
        let maj = fourier_table::<f64>(&TruthTable::majority(3)).unwrap();
        assert_abs_diff_eq!(maj.level_weight(1), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(maj.level_weight(3), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(maj.level_weight(2), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_precision_table() {
        let t = fourier_table::<f32>(&TruthTable::majority(5)).unwrap();
        assert!((t.total_weight() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn arity_limit() {
        let g = TruthTable::constant(21, false);
        assert!(matches!(
            fourier_table::<f64>(&g),
            Err(FourierError::ArityTooLarge { k: 21, .. })
        ));
    }

    #[test]
    fn majority_formula_small_cases() {
        assert_eq!(maj_coefficient(3, 2).unwrap(), Rational::zero());
        assert_eq!(maj_coefficient(3, 1).unwrap(), Rational::new(1, 2));
        assert_eq!(maj_coefficient(3, 3).unwrap(), Rational::new(-1, 2));
        assert!(maj_coefficient(4, 1).is_err());
        let weights = maj_level_weights(5).unwrap();
        let total: Rational = weights.iter().copied().sum();
        assert_eq!(total, Rational::one());
    }

    #[test]
    fn majority_formula_matches_table_k9() {
        let table = fourier_table::<f64>(&TruthTable::majority(9)).unwrap();
        for s in 0..512usize {
            let c = maj_coefficient(9, s.count_ones() as usize).unwrap();
            assert_abs_diff_eq!(table.coefficient(s), rational_to_f64(&c), epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_half_small_cases() {
        // EXACT-HALF_2 is x1 xor x2: 0/1 coefficients 1/2, 0, -1/2 by weight
        assert_eq!(exact_half_coefficient01(2, 0).unwrap(), Rational::new(1, 2));
        assert_eq!(exact_half_coefficient01(2, 1).unwrap(), Rational::zero());
        assert_eq!(exact_half_coefficient01(2, 2).unwrap(), Rational::new(-1, 2));
        let w = exact_half_level_weights(2).unwrap();
        assert_eq!(w, vec![Rational::zero(), Rational::zero(), Rational::one()]);
        assert!(exact_half_coefficient01(3, 0).is_err());
    }

    #[test]
    fn exact_half_levels_symmetric() {
        for k in (2..=16).step_by(2) {
            let w = exact_half_level_weights(k).unwrap();
            for l in 1..k {
                assert_eq!(w[l], w[k - l], "k={k} l={l}");
            }
            assert_eq!(w.iter().copied().sum::<Rational>(), Rational::one());
        }
    }

    #[test]
    fn influence_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..=8 {
            let g = TruthTable::random(k, &mut rng).unwrap();
            let from_table = fourier_table::<f64>(&g).unwrap().influences();
            let direct = InfluenceProfile::<f64>::by_flips(&g);
            for j in 0..k {
                assert_abs_diff_eq!(from_table.get(j), direct.get(j), epsilon = 1e-12);
            }
        }
        let and = fourier_table::<f64>(&TruthTable::and(4)).unwrap().influences();
        assert_abs_diff_eq!(and.min().unwrap().1, 0.125, epsilon = 1e-12);
    }

    #[test]
    fn sample_counts() {
        // (9/5) ln(900) = 12.24..., ceil(9/5) = 2
        assert_eq!(amplified_success_target(9, 5, 0.01), 13 + 2);
        // ln(800)/0.3 = 22.28..., ceil(1/0.3) = 4
        assert_eq!(influence_sample_count(8, 0.3, 0.01), 23 + 4);
    }
}
