//! Bits and distributed bits.
//!
//! A [`DistributedBit`] is a logical bit held as two shares, one per party,
//! whose XOR is its value. NOT and XOR act locally on shares; AND needs
//! nonlocal boxes (see [`crate::protocols::distributed_and`]).

use std::fmt;
use std::ops::{BitAnd, BitXor, Not};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub const fn new(value: bool) -> Self {
        Bit(value)
    }

    pub const fn is_one(self) -> bool {
        self.0
    }

    pub const fn as_u8(self) -> u8 {
        self.0 as u8
    }

    /// Bit `i` of a packed input word.
    pub const fn of(word: u64, i: u32) -> Self {
        Bit((word >> i) & 1 == 1)
    }
}

impl From<bool> for Bit {
    fn from(value: bool) -> Self {
        Bit(value)
    }
}

impl From<Bit> for bool {
    fn from(bit: Bit) -> Self {
        bit.0
    }
}

impl TryFrom<u8> for Bit {
    type Error = u8;

    fn try_from(value: u8) -> Result<Self, u8> {
        match value {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            other => Err(other),
        }
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl BitAnd for Bit {
    type Output = Bit;
    fn bitand(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DistributedBit {
    pub alice_share: Bit,
    pub bob_share: Bit,
}

impl DistributedBit {
    pub const fn new(alice_share: Bit, bob_share: Bit) -> Self {
        DistributedBit {
            alice_share,
            bob_share,
        }
    }

    /// A degenerate sharing where Alice holds the whole value.
    pub const fn alice_held(value: Bit) -> Self {
        DistributedBit::new(value, Bit::ZERO)
    }

    /// A degenerate sharing where Bob holds the whole value.
    pub const fn bob_held(value: Bit) -> Self {
        DistributedBit::new(Bit::ZERO, value)
    }

    pub fn value(self) -> Bit {
        db_value(self)
    }
}

pub fn db_value(d: DistributedBit) -> Bit {
    d.alice_share ^ d.bob_share
}

/// Negation: Alice flips her share.
pub fn db_not(d: DistributedBit) -> DistributedBit {
    DistributedBit::new(!d.alice_share, d.bob_share)
}

pub fn db_xor(u: DistributedBit, v: DistributedBit) -> DistributedBit {
    DistributedBit::new(u.alice_share ^ v.alice_share, u.bob_share ^ v.bob_share)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn db(a: u8, b: u8) -> DistributedBit {
        DistributedBit::new(Bit::try_from(a).unwrap(), Bit::try_from(b).unwrap())
    }

    #[test]
    fn value_is_xor_of_shares() {
        assert_eq!(db_value(db(0, 0)), Bit::ZERO);
        assert_eq!(db_value(db(1, 0)), Bit::ONE);
        assert_eq!(db_value(db(1, 1)), Bit::ZERO);
    }

    #[test]
    fn not_flips_alice_share_only() {
        assert_eq!(db_not(db(0, 0)), db(1, 0));
        assert_eq!(db_not(db(0, 0)).value(), Bit::ONE);
        assert_eq!(db_not(db(1, 1)), db(0, 1));
        assert_eq!(db_not(db(1, 1)).value(), Bit::ONE);
        assert_eq!(db_not(db(1, 0)), db(0, 0));
        assert_eq!(db_not(db(1, 0)).value(), Bit::ZERO);
    }

    #[test]
    fn xor_is_sharewise() {
        assert_eq!(db_xor(db(1, 0), db(0, 1)), db(1, 1));
        assert_eq!(db_xor(db(1, 0), db(0, 1)).value(), Bit::ZERO);
        assert_eq!(db_xor(db(0, 0), db(0, 0)), db(0, 0));
        assert_eq!(db_xor(db(1, 1), db(1, 0)), db(0, 1));
        assert_eq!(db_xor(db(1, 1), db(1, 0)).value(), Bit::ONE);
    }

    #[test]
    fn rejects_non_binary_digits() {
        assert_eq!(Bit::try_from(2), Err(2));
    }

    proptest! {
        #[test]
        fn not_negates_value(a in 0u8..2, b in 0u8..2) {
            let d = db(a, b);
            prop_assert_eq!(db_not(d).value(), !d.value());
        }

        #[test]
        fn xor_is_homomorphic(a in 0u8..2, b in 0u8..2, c in 0u8..2, e in 0u8..2) {
            let (u, v) = (db(a, b), db(c, e));
            prop_assert_eq!(db_xor(u, v).value(), u.value() ^ v.value());
        }
    }
}
