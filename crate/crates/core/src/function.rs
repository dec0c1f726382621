//! Total Boolean functions `{0,1}^m × {0,1}^n → {0,1}` stored as truth tables.
//!
//! Inputs are packed little-endian: bit `i` of the word is the party's
//! `i`-th input bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bit;
use crate::error::{Error, Result};

/// Largest arity accepted for either party.
pub const MAX_ARITY: u32 = 20;
/// Largest total table size, as `m + n`.
pub const MAX_TABLE_BITS: u32 = 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    alice_arity: u32,
    bob_arity: u32,
    words: Vec<u64>,
}

fn check_arity(m: u32, n: u32) -> Result<()> {
    for value in [m, n] {
        if value > MAX_ARITY {
            return Err(Error::ArityGuard {
                what: "input arity",
                value,
                max: MAX_ARITY,
            });
        }
    }
    if m + n > MAX_TABLE_BITS {
        return Err(Error::ArityGuard {
            what: "table size exponent",
            value: m + n,
            max: MAX_TABLE_BITS,
        });
    }
    Ok(())
}

impl BooleanFunction {
    /// Builds a function from a row-major table: entry `x * 2^n + y` is `f(x, y)`.
    pub fn from_table(table: &[Bit], alice_arity: u32, bob_arity: u32) -> Result<Self> {
        check_arity(alice_arity, bob_arity)?;
        let expected = 1usize << (alice_arity + bob_arity);
        if table.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: table.len(),
            });
        }
        let mut words = vec![0u64; expected.div_ceil(64)];
        for (i, bit) in table.iter().enumerate() {
            if bit.is_one() {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(BooleanFunction {
            alice_arity,
            bob_arity,
            words,
        })
    }

    pub fn from_fn(alice_arity: u32, bob_arity: u32, f: impl Fn(u64, u64) -> Bit) -> Result<Self> {
        check_arity(alice_arity, bob_arity)?;
        let rows = 1u64 << alice_arity;
        let cols = 1u64 << bob_arity;
        let mut words = vec![0u64; ((rows * cols) as usize).div_ceil(64)];
        for x in 0..rows {
            for y in 0..cols {
                if f(x, y).is_one() {
                    let i = (x * cols + y) as usize;
                    words[i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(BooleanFunction {
            alice_arity,
            bob_arity,
            words,
        })
    }

    pub fn alice_arity(&self) -> u32 {
        self.alice_arity
    }

    pub fn bob_arity(&self) -> u32 {
        self.bob_arity
    }

    #[inline]
    pub fn eval(&self, x: u64, y: u64) -> Bit {
        debug_assert!(x < 1 << self.alice_arity && y < 1 << self.bob_arity);
        let i = ((x << self.bob_arity) | y) as usize;
        Bit::new((self.words[i / 64] >> (i % 64)) & 1 == 1)
    }

    /// Row-major truth table.
    pub fn table(&self) -> Vec<Bit> {
        let len = 1usize << (self.alice_arity + self.bob_arity);
        (0..len)
            .map(|i| Bit::new((self.words[i / 64] >> (i % 64)) & 1 == 1))
            .collect()
    }
}

pub fn make_function(table: &[Bit], m: u32, n: u32) -> Result<BooleanFunction> {
    BooleanFunction::from_table(table, m, n)
}

/// `IP(x, y) = ⊕ᵢ xᵢ ∧ yᵢ`.
pub fn inner_product(n: u32) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, n, |x, y| Bit::new((x & y).count_ones() % 2 == 1))
}

pub fn equality(n: u32) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, n, |x, y| Bit::new(x == y))
}

pub fn and2() -> BooleanFunction {
    BooleanFunction::from_fn(1, 1, |x, y| Bit::new(x & y == 1)).expect("arity 1")
}

pub fn xor2() -> BooleanFunction {
    BooleanFunction::from_fn(1, 1, |x, y| Bit::new(x ^ y == 1)).expect("arity 1")
}

/// Uniformly random truth table, deterministic in `seed`.
pub fn random_function(m: u32, n: u32, seed: u64) -> Result<BooleanFunction> {
    check_arity(m, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 1usize << (m + n);
    let table: Vec<Bit> = (0..len).map(|_| Bit::new(rng.random())).collect();
    BooleanFunction::from_table(&table, m, n)
}

/// Packs bits (first element is bit 0) into an input word.
pub fn pack(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product_examples() {
        let ip2 = inner_product(2).unwrap();
        assert_eq!(ip2.eval(pack(&[1, 1]), pack(&[1, 0])), Bit::ONE);
        let ip3 = inner_product(3).unwrap();
        // Direct evaluation of ⊕ᵢ xᵢ∧yᵢ: three ones.
        let direct = (0..3).fold(0u8, |acc, _| acc ^ 1);
        assert_eq!(ip3.eval(pack(&[1, 1, 1]), pack(&[1, 1, 1])).as_u8(), direct);
    }

    #[test]
    fn equality_and_small_builders() {
        assert_eq!(equality(1).unwrap().eval(1, 1), Bit::ONE);
        assert_eq!(equality(1).unwrap().eval(1, 0), Bit::ZERO);
        assert_eq!(and2().eval(1, 1), Bit::ONE);
        assert_eq!(and2().eval(1, 0), Bit::ZERO);
        assert_eq!(xor2().eval(1, 0), Bit::ONE);
        assert_eq!(xor2().eval(1, 1), Bit::ZERO);
    }

    #[test]
    fn table_round_trips() {
        let f = random_function(3, 2, 7).unwrap();
        let g = make_function(&f.table(), 3, 2).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn random_function_is_deterministic_in_seed() {
        assert_eq!(random_function(4, 4, 11).unwrap(), random_function(4, 4, 11).unwrap());
        assert_ne!(random_function(4, 4, 11).unwrap(), random_function(4, 4, 12).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = make_function(&[Bit::ZERO; 3], 1, 1).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 4, actual: 3 });
    }

    #[test]
    fn arity_guard() {
        assert!(matches!(inner_product(21), Err(Error::ArityGuard { .. })));
        assert!(matches!(random_function(20, 20, 0), Err(Error::ArityGuard { .. })));
        assert!(inner_product(13).is_ok());
    }
}
