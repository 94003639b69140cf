//! Bit-packed linear algebra over GF(2).
//!
//! Vectors pack 64 bits per word, bit `i` living at `words[i / 64] >> (i % 64)`.
//! Matrices are row-major lists of vectors, so elimination and products work
//! on whole words.

use std::fmt;
use std::ops::{BitAnd, BitXor, BitXorAssign};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid bit string character {0:?}")]
    InvalidBitChar(char),
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

/// A dense vector over GF(2). Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        v.mask_tail();
        v
    }

    /// Standard basis vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    /// Low `len` bits of `value`, bit 0 first.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.mask_tail();
        }
        v
    }

    /// Parses a string such as `"1010"`; character `i` is bit `i`.
    pub fn parse(s: &str) -> Result<Self, F2Error> {
        let mut v = Self::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(F2Error::InvalidBitChar(other)),
            }
        }
        Ok(v)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            len,
            words: (0..word_count(len)).map(|_| rng.gen::<u64>()).collect(),
        };
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// First word, for vectors of at most 64 bits used as indices.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_len(&self, other: &Self) -> Result<(), F2Error> {
        if self.len != other.len {
            return Err(F2Error::DimensionMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &Self) -> Result<bool, F2Error> {
        self.check_len(other)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &Self) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// True if the two vectors share a set bit.
    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn xor_assign_checked(&mut self, other: &Self) -> Result<(), F2Error> {
        self.check_len(other)?;
        *self ^= other;
        Ok(())
    }

    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_not_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Bitwise complement within `len`.
    pub fn complement(&self) -> Self {
        let mut v = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.mask_tail();
        v
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Gathers the bits at `indices` into a new vector of length `indices.len()`.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self::from_indices(
            indices.len(),
            indices
                .iter()
                .enumerate()
                .filter(|(_, &i)| self.get(i))
                .map(|(j, _)| j),
        )
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl BitAnd for &BitVector {
    type Output = BitVector;
    fn bitand(self, rhs: &BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len);
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&rhs.words).map(|(a, b)| a & b).collect(),
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        BitVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

/// Result of [`BitMatrix::solve`] for a consistent system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// Solution with every free variable set to zero.
    pub particular: BitVector,
    pub nullspace: Vec<BitVector>,
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        self.nullspace.is_empty()
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows of equal length. `cols` is needed for the
    /// zero-row case.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, F2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(F2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Matrix with the given vectors as its columns.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self, F2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(F2Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            for i in c.iter_ones() {
                m.data[i].set(j, true);
            }
        }
        Ok(m)
    }

    /// Parses rows written as bit strings, e.g. `["110", "011"]`.
    pub fn parse_rows(rows: &[&str]) -> Result<Self, F2Error> {
        let parsed = rows
            .iter()
            .map(|r| BitVector::parse(r))
            .collect::<Result<Vec<_>, _>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(cols, parsed)
    }

    /// Uniformly random entries, deterministic for a seeded `rng`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows).map(|_| BitVector::random(cols, rng)).collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value)
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_indices(self.rows, (0..self.rows).filter(|&i| self.get(i, j)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.iter_ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// `M · v` over GF(2).
    pub fn matvec(&self, v: &BitVector) -> Result<BitVector, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(BitVector::from_indices(
            self.rows,
            (0..self.rows).filter(|&i| self.data[i].dot_unchecked(v)),
        ))
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if rhs.rows != self.cols {
            return Err(F2Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(rhs.cols);
                for j in row.iter_ones() {
                    acc ^= &rhs.data[j];
                }
                acc
            })
            .collect();
        Ok(BitMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for r in rows.iter_mut().skip(rank + 1) {
                if r.get(col) {
                    *r ^= &pivot;
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Solves `M x = b`. Returns `None` for an inconsistent system.
    pub fn solve(&self, b: &BitVector) -> Result<Option<Solution>, F2Error> {
        if b.len() != self.rows {
            return Err(F2Error::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        // Augmented rows: the right-hand side bit is kept separately.
        let mut rows = self.data.clone();
        let mut rhs: Vec<bool> = (0..self.rows).map(|i| b.get(i)).collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            rhs.swap(rank, p);
            let pivot = rows[rank].clone();
            let pivot_rhs = rhs[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    *row ^= &pivot;
                    rhs[r] ^= pivot_rhs;
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        if rhs[rank..].iter().any(|&bit| bit) {
            return Ok(None);
        }

        let mut particular = BitVector::zeros(self.cols);
        for (r, &col) in pivots.iter().enumerate() {
            particular.set(col, rhs[r]);
        }

        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let nullspace = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut z = BitVector::unit(self.cols, free);
                for (r, &col) in pivots.iter().enumerate() {
                    if rows[r].get(free) {
                        z.set(col, true);
                    }
                }
                z
            })
            .collect();
        Ok(Some(Solution {
            particular,
            nullspace,
        }))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.data.len() != repr.rows {
            return Err(serde::de::Error::custom("row count mismatch"));
        }
        BitMatrix::from_rows(repr.cols, repr.data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_matvec(m: &BitMatrix, v: &BitVector) -> BitVector {
        let bits: Vec<bool> = (0..m.rows())
            .map(|i| (0..m.cols()).filter(|&j| m.get(i, j) && v.get(j)).count() % 2 == 1)
            .collect();
        BitVector::from_bools(&bits)
    }

    /// Rank by enumerating row subsets: the largest independent subset.
    fn brute_rank(m: &BitMatrix) -> usize {
        let r = m.rows();
        let mut best = 0;
        for mask in 0u32..(1 << r) {
            let chosen: Vec<usize> = (0..r).filter(|&i| mask >> i & 1 == 1).collect();
            // independent iff no nonempty sub-subset sums to zero
            let k = chosen.len();
            let independent = (1u32..(1 << k)).all(|sub| {
                let mut acc = BitVector::zeros(m.cols());
                for (t, &i) in chosen.iter().enumerate() {
                    if sub >> t & 1 == 1 {
                        acc ^= m.row(i);
                    }
                }
                !acc.is_zero()
            });
            if independent {
                best = best.max(k);
            }
        }
        best
    }

    #[test]
    fn tail_bits_stay_zero() {
        let v = BitVector::ones(70);
        assert_eq!(v.count_ones(), 70);
        assert_eq!(v.words()[1], (1 << 6) - 1);
        let c = BitVector::zeros(70).complement();
        assert_eq!(c, v);
    }

    #[test]
    fn matvec_zero_and_identity() {
        let v = BitVector::parse("1010").unwrap();
        assert!(BitMatrix::zeros(4, 4).matvec(&v).unwrap().is_zero());
        assert_eq!(BitMatrix::identity(4).matvec(&v).unwrap(), v);
    }

    #[test]
    fn matvec_triangle() {
        let a = BitMatrix::parse_rows(&["011", "101", "110"]).unwrap();
        let v = BitVector::parse("110").unwrap();
        let got = a.matvec(&v).unwrap();
        assert_eq!(got, brute_matvec(&a, &v));
        assert_eq!(got.to_string(), "110");
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let err = BitMatrix::zeros(3, 4).matvec(&BitVector::zeros(3)).unwrap_err();
        assert_eq!(
            err,
            F2Error::DimensionMismatch {
                expected: 4,
                found: 3
            }
        );
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let b = BitVector::parse("1101").unwrap();
        let sol = BitMatrix::identity(4).solve(&b).unwrap().unwrap();
        assert_eq!(sol.particular, b);
        assert!(sol.is_unique());
        assert!(BitMatrix::zeros(4, 4).solve(&b).unwrap().is_none());
        assert!(BitMatrix::zeros(4, 4)
            .solve(&BitVector::zeros(4))
            .unwrap()
            .is_some());
    }

    #[test]
    fn solve_planted_full_rank_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 20 {
            let m = BitMatrix::random(8, 5, &mut rng);
            if m.rank() < 5 {
                continue;
            }
            let planted = BitVector::random(5, &mut rng);
            let b = m.matvec(&planted).unwrap();
            let candidates: Vec<u64> = (0u64..32)
                .filter(|&x| m.matvec(&BitVector::from_u64(5, x)).unwrap() == b)
                .collect();
            assert_eq!(candidates, vec![planted.to_u64()]);
            let sol = m.solve(&b).unwrap().unwrap();
            assert_eq!(sol.particular, planted);
            assert!(sol.is_unique());
            checked += 1;
        }
    }

    #[test]
    fn solve_reports_nullspace() {
        let m = BitMatrix::parse_rows(&["1100", "0011"]).unwrap();
        let b = BitVector::parse("11").unwrap();
        let sol = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.matvec(&sol.particular).unwrap(), b);
        assert_eq!(sol.nullspace.len(), 2);
        for z in &sol.nullspace {
            assert!(m.matvec(z).unwrap().is_zero());
        }
    }

    #[test]
    fn rank_matches_subset_enumeration() {
        assert_eq!(BitMatrix::identity(6).rank(), 6);
        assert_eq!(BitMatrix::zeros(6, 6).rank(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = BitMatrix::random(6, 6, &mut rng);
            assert_eq!(m.rank(), brute_rank(&m));
        }
    }

    #[test]
    fn random_matrix_is_deterministic_and_balanced() {
        assert_eq!(
            BitMatrix::random(0, 5, &mut ChaCha8Rng::seed_from_u64(1)).rows(),
            0
        );
        let a = BitMatrix::random(17, 90, &mut ChaCha8Rng::seed_from_u64(3));
        let b = BitMatrix::random(17, 90, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ones = (0..100_000)
            .filter(|_| BitMatrix::random(1, 1, &mut rng).get(0, 0))
            .count();
        let frac = ones as f64 / 100_000.0;
        assert!((0.497..=0.503).contains(&frac), "fraction {frac}");
    }

    #[test]
    fn random_tall_matrices_rarely_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trials = 10_000;
        for (k, d) in [(8usize, 6usize), (10, 6), (12, 8)] {
            let deficient = (0..trials)
                .filter(|_| BitMatrix::random(k, d, &mut rng).rank() < d)
                .count();
            let freq = deficient as f64 / trials as f64;
            let bound = 4.0 * 2f64.powi(-((k - d) as i32));
            assert!(freq <= bound, "k={k} d={d}: {freq} > {bound}");
        }
    }

    #[test]
    fn serde_round_trip() {
        let m = BitMatrix::parse_rows(&["101", "010"]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<BitMatrix>(&json).unwrap(), m);
    }

    fn arb_vec(len: usize) -> impl Strategy<Value = BitVector> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|b| BitVector::from_bools(&b))
    }

    proptest! {
        #[test]
        fn matvec_is_linear(seed in any::<u64>(), u in arb_vec(70), v in arb_vec(70)) {
            let m = BitMatrix::random(33, 70, &mut ChaCha8Rng::seed_from_u64(seed));
            let lhs = m.matvec(&(&u ^ &v)).unwrap();
            let rhs = &m.matvec(&u).unwrap() ^ &m.matvec(&v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn solve_inverts_full_rank_square(seed in any::<u64>(), probe in arb_vec(12)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = loop {
                let m = BitMatrix::random(12, 12, &mut rng);
                if m.rank() == 12 { break m; }
            };
            let b = m.matvec(&probe).unwrap();
            let sol = m.solve(&b).unwrap().unwrap();
            prop_assert!(sol.is_unique());
            prop_assert_eq!(&sol.particular, &probe);
            // and the other direction: M · solve(b) = b for arbitrary b
            let x = m.solve(&probe).unwrap().unwrap().particular;
            prop_assert_eq!(m.matvec(&x).unwrap(), probe);
        }
    }
}
