//! Boolean functions on `k` bits stored as packed truth tables.
//!
//! Input `x` is an index in `0..2^k` whose bit `i` is variable `i`.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::f2core::BitVector;

pub const MAX_ARITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruthTableError {
    #[error("arity {0} exceeds the supported maximum {MAX_ARITY}")]
    ArityTooLarge(usize),
    #[error("hex truth table for arity {arity} needs {expected} digits, got {found}")]
    HexLength {
        arity: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid hex digit {0:?}")]
    HexDigit(char),
    #[error("hex value sets bits beyond the 2^{0} table entries")]
    HexOverflow(usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    bits: BitVector,
}

impl TruthTable {
    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self, TruthTableError> {
        if arity > MAX_ARITY {
            return Err(TruthTableError::ArityTooLarge(arity));
        }
        let size = 1usize << arity;
        Ok(Self {
            arity,
            bits: BitVector::from_indices(size, (0..size).filter(|&x| f(x))),
        })
    }

    /// Symmetric function `g(x) = h(|x|)`.
    pub fn symmetric(arity: usize, h: impl Fn(usize) -> bool) -> Result<Self, TruthTableError> {
        Self::from_fn(arity, |x| h(x.count_ones() as usize))
    }

    pub fn constant(arity: usize, value: bool) -> Self {
        Self::symmetric(arity, |_| value).expect("arity checked by caller")
    }

    pub fn or(arity: usize) -> Self {
        Self::symmetric(arity, |w| w > 0).expect("arity")
    }

    pub fn and(arity: usize) -> Self {
        Self::symmetric(arity, |w| w == arity).expect("arity")
    }

    pub fn parity(arity: usize) -> Self {
        Self::symmetric(arity, |w| w % 2 == 1).expect("arity")
    }

    /// `1` iff at least half of the bits are set (`|x| >= k/2`).
    pub fn majority(arity: usize) -> Self {
        Self::symmetric(arity, |w| 2 * w >= arity).expect("arity")
    }

    /// `1` iff exactly half of the bits are set.
    pub fn exact_half(arity: usize) -> Self {
        Self::symmetric(arity, |w| 2 * w == arity).expect("arity")
    }

    pub fn threshold(arity: usize, t: usize) -> Self {
        Self::symmetric(arity, |w| w >= t).expect("arity")
    }

    pub fn random<R: Rng + ?Sized>(arity: usize, rng: &mut R) -> Result<Self, TruthTableError> {
        if arity > MAX_ARITY {
            return Err(TruthTableError::ArityTooLarge(arity));
        }
        Ok(Self {
            arity,
            bits: BitVector::random(1 << arity, rng),
        })
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn size(&self) -> usize {
        1 << self.arity
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        self.bits.get(x)
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    /// `h` with `g(x) = h(|x|)` when the function is symmetric.
    pub fn symmetric_profile(&self) -> Option<Vec<bool>> {
        let mut profile: Vec<Option<bool>> = vec![None; self.arity + 1];
        for x in 0..self.size() {
            let w = x.count_ones() as usize;
            let v = self.eval(x);
            match profile[w] {
                None => profile[w] = Some(v),
                Some(p) if p != v => return None,
                _ => {}
            }
        }
        Some(profile.into_iter().map(|p| p.unwrap_or(false)).collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_profile().is_some()
    }

    /// `x <= y` bitwise implies `g(x) <= g(y)`; checked on single-bit raises.
    pub fn is_monotone(&self) -> bool {
        (0..self.size()).all(|x| !self.eval(x) || (0..self.arity).all(|i| self.eval(x | (1 << i))))
    }

    /// Variables `i` with `g(x) != g(x ^ e_i)` for some `x`.
    pub fn relevant_variables(&self) -> Vec<usize> {
        (0..self.arity)
            .filter(|&i| (0..self.size()).any(|x| self.eval(x) != self.eval(x ^ (1 << i))))
            .collect()
    }

    fn hex_digits(arity: usize) -> usize {
        ((1usize << arity) / 4).max(1)
    }

    /// Hex of the integer `sum_x g(x) 2^x`, most significant digit first,
    /// zero-padded to `max(1, 2^k / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = Self::hex_digits(self.arity);
        (0..digits)
            .rev()
            .map(|p| {
                let nibble = (0..4)
                    .filter(|&b| {
                        let x = 4 * p + b;
                        x < self.size() && self.eval(x)
                    })
                    .fold(0u32, |acc, b| acc | (1 << b));
                char::from_digit(nibble, 16).expect("nibble < 16")
            })
            .collect()
    }

    pub fn from_hex(arity: usize, hex: &str) -> Result<Self, TruthTableError> {
        if arity > MAX_ARITY {
            return Err(TruthTableError::ArityTooLarge(arity));
        }
        let expected = Self::hex_digits(arity);
        let chars: Vec<char> = hex.trim().chars().collect();
        if chars.len() != expected {
            return Err(TruthTableError::HexLength {
                arity,
                expected,
                found: chars.len(),
            });
        }
        let size = 1usize << arity;
        let mut bits = BitVector::zeros(size);
        for (p, c) in chars.iter().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or(TruthTableError::HexDigit(*c))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let x = 4 * p + b;
                    if x >= size {
                        return Err(TruthTableError::HexOverflow(arity));
                    }
                    bits.set(x, true);
                }
            }
        }
        Ok(Self { arity, bits })
    }
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable(k={}, 0x{})", self.arity, self.to_hex())
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    arity: usize,
    hex: String,
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableRepr {
            arity: self.arity,
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(d)?;
        TruthTable::from_hex(repr.arity, &repr.hex).map_err(serde::de::Error::custom)
    }
}
