//! Keyed randomness.
//!
//! Every random quantity a protocol consumes is an *atom* named by an
//! [`AtomKey`]. A [`RandomSource`] maps keys to values: the Monte Carlo
//! source hashes `(trial seed, key)`, the exact engine branches over every
//! value. Reading the same key twice yields the same value, which is how
//! both parties observe identical shared randomness without communicating.

use crate::bits::Bit;
use crate::party::PartyContext;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    Shared,
    AlicePrivate,
    BobPrivate,
    Box,
    /// Input selection in the sampling engine; never seen by protocols.
    Input,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomKey {
    pub kind: AtomKind,
    pub stream: u32,
    pub index: u32,
}

impl AtomKey {
    pub const fn new(kind: AtomKind, stream: u32, index: u32) -> Self {
        AtomKey {
            kind,
            stream,
            index,
        }
    }
}

/// Distribution of a single atom.
#[derive(Debug, Clone, PartialEq)]
pub enum Draw<S> {
    /// Uniform over `0..2^bits`.
    Bits(u32),
    /// `1` with the given probability, else `0`.
    Bernoulli(S),
}

pub trait RandomSource<S> {
    fn draw(&mut self, key: AtomKey, dist: &Draw<S>) -> u64;

    /// Number of distinct substreams (values of [`AtomKey::stream`]) available.
    fn stream_capacity(&self) -> u64 {
        u64::from(u32::MAX) + 1
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based derivation of a child seed from `(seed, counter)`.
#[inline]
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    splitmix64(seed ^ splitmix64(counter))
}

/// Stateless keyed generator used by the sampling engine.
///
/// The value of an atom is a pure function of `(seed, key)`, so draws are
/// independent of evaluation order and of how trials are split across
/// workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterSource {
    seed: u64,
}

impl CounterSource {
    pub const fn new(seed: u64) -> Self {
        CounterSource { seed }
    }

    /// Source for trial `trial` of an experiment seeded by `master_seed`.
    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        CounterSource::new(derive_seed(master_seed, trial))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn word(&self, key: AtomKey) -> u64 {
        let lane = ((key.kind as u64) << 32) | u64::from(key.stream);
        derive_seed(derive_seed(self.seed, lane), u64::from(key.index))
    }
}

impl<S: Scalar> RandomSource<S> for CounterSource {
    #[inline]
    fn draw(&mut self, key: AtomKey, dist: &Draw<S>) -> u64 {
        let w = self.word(key);
        match dist {
            Draw::Bits(0) => 0,
            Draw::Bits(b) => w >> (64 - (*b).min(64)),
            Draw::Bernoulli(p) => {
                let u = (w >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                u64::from(u < p.approx())
            }
        }
    }
}

/// One party's view of a counter-indexed shared stream.
///
/// Both parties build the view for the same substream and read it in the
/// same order; the keyed source guarantees they see identical words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedRandomness {
    stream: u32,
    consumed: u32,
}

impl SharedRandomness {
    pub fn substream(stream: u32) -> Self {
        SharedRandomness {
            stream,
            consumed: 0,
        }
    }

    pub fn stream(&self) -> u32 {
        self.stream
    }

    pub fn consumed(&self) -> u32 {
        self.consumed
    }

    /// Next uniformly distributed `bits`-bit word.
    pub fn next_word<S: Scalar>(&mut self, ctx: &mut PartyContext<'_, '_, S>, bits: u32) -> u64 {
        let w = ctx.shared_word(self.stream, self.consumed, bits);
        self.consumed += 1;
        w
    }

    pub fn next_bit<S: Scalar>(&mut self, ctx: &mut PartyContext<'_, '_, S>) -> Bit {
        Bit::new(self.next_word(ctx, 1) == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_draws_are_repeatable() {
        let mut src = CounterSource::new(42);
        let key = AtomKey::new(AtomKind::Shared, 3, 1);
        let a = RandomSource::<f64>::draw(&mut src, key, &Draw::Bits(16));
        let b = RandomSource::<f64>::draw(&mut src, key, &Draw::Bits(16));
        assert_eq!(a, b);
        assert!(a < 1 << 16);
    }

    #[test]
    fn distinct_keys_differ() {
        let src = CounterSource::new(42);
        let k1 = AtomKey::new(AtomKind::Shared, 0, 0);
        let k2 = AtomKey::new(AtomKind::AlicePrivate, 0, 0);
        let k3 = AtomKey::new(AtomKind::Shared, 0, 1);
        assert_ne!(src.word(k1), src.word(k2));
        assert_ne!(src.word(k1), src.word(k3));
    }

    #[test]
    fn bernoulli_extremes() {
        let mut src = CounterSource::new(9);
        for i in 0..1000 {
            let key = AtomKey::new(AtomKind::Box, i, 0);
            assert_eq!(src.draw(key, &Draw::Bernoulli(1.0)), 1);
            assert_eq!(src.draw(key, &Draw::Bernoulli(0.0)), 0);
        }
    }

    #[test]
    fn uniform_bits_are_balanced() {
        let mut src = CounterSource::new(1);
        let n = 200_000u32;
        let ones: u64 = (0..n)
            .map(|i| RandomSource::<f64>::draw(&mut src, AtomKey::new(AtomKind::Box, i, 0), &Draw::Bits(1)))
            .sum();
        let sigma = (f64::from(n) * 0.25).sqrt();
        assert!((ones as f64 - f64::from(n) / 2.0).abs() < 5.0 * sigma);
    }
}
