//! Party isolation and communication accounting.
//!
//! A protocol is two strategy procedures. Each one receives only its own
//! input and a [`PartyContext`], which exposes shared randomness, the
//! party's private coins and the party's ports of the box instances. There
//! is no channel between the strategies; the only cross-party effect is the
//! correlation produced inside the boxes.

use std::fmt;

use crate::bits::Bit;
use crate::boxes::BoxInstance;
use crate::error::{Error, Result};
use crate::random::{AtomKey, AtomKind, Draw, RandomSource};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    fn private_kind(self) -> AtomKind {
        match self {
            Party::Alice => AtomKind::AlicePrivate,
            Party::Bob => AtomKind::BobPrivate,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Alice => f.write_str("Alice"),
            Party::Bob => f.write_str("Bob"),
        }
    }
}

pub struct PartyContext<'r, 'm, S> {
    party: Party,
    source: &'r mut dyn RandomSource<S>,
    boxes: &'r mut [BoxInstance<'m, S>],
    shared_reads: u64,
}

impl<'r, 'm, S: Scalar> PartyContext<'r, 'm, S> {
    pub fn new(
        party: Party,
        source: &'r mut dyn RandomSource<S>,
        boxes: &'r mut [BoxInstance<'m, S>],
    ) -> Self {
        PartyContext {
            party,
            source,
            boxes,
            shared_reads: 0,
        }
    }

    pub fn party(&self) -> Party {
        self.party
    }

    /// Word `index` of shared substream `stream`, uniform over `bits` bits.
    pub fn shared_word(&mut self, stream: u32, index: u32, bits: u32) -> u64 {
        self.shared_reads += 1;
        let key = AtomKey::new(AtomKind::Shared, stream, index);
        self.source.draw(key, &Draw::Bits(bits))
    }

    /// A fair coin only this party can read.
    pub fn private_coin(&mut self, stream: u32, index: u32) -> Bit {
        let key = AtomKey::new(self.party.private_kind(), stream, index);
        Bit::new(self.source.draw(key, &Draw::Bits(1)) == 1)
    }

    /// Feeds `input` into this party's port of box `slot`.
    pub fn use_box(&mut self, slot: usize, input: Bit) -> Result<Bit> {
        let available = self.boxes.len() as u64;
        let instance = self.boxes.get_mut(slot).ok_or(Error::InsufficientBoxes {
            needed: slot as u64 + 1,
            available,
        })?;
        instance.port(self.party, input, &mut *self.source)
    }

    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }

    pub fn shared_reads(&self) -> u64 {
        self.shared_reads
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Distributed,
    Reveal,
}

/// Audit record of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    box_invocations: u64,
    shared_words_consumed: u64,
    bits_communicated: u64,
    phase: Phase,
}

impl Default for Transcript {
    fn default() -> Self {
        Transcript::new()
    }
}

impl Transcript {
    pub fn new() -> Self {
        Transcript {
            box_invocations: 0,
            shared_words_consumed: 0,
            bits_communicated: 0,
            phase: Phase::Distributed,
        }
    }

    pub(crate) fn record_distributed(&mut self, box_invocations: u64, shared_words: u64) {
        debug_assert_eq!(self.phase, Phase::Distributed);
        self.box_invocations += box_invocations;
        self.shared_words_consumed += shared_words;
    }

    /// Sends one bit to the other party. Ends the distributed phase.
    pub fn communicate(&mut self, bit: Bit) -> Bit {
        self.phase = Phase::Reveal;
        self.bits_communicated += 1;
        bit
    }

    pub fn box_invocations(&self) -> u64 {
        self.box_invocations
    }

    /// Shared words read by each party (both parties read the same words).
    pub fn shared_words_consumed(&self) -> u64 {
        self.shared_words_consumed
    }

    pub fn bits_communicated(&self) -> u64 {
        self.bits_communicated
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// True when the run stayed a distributed computation.
    pub fn is_communication_free(&self) -> bool {
        self.phase == Phase::Distributed && self.bits_communicated == 0
    }
}
