//! Two-party protocols built from nonlocal boxes and shared randomness.
//!
//! Every protocol implements [`Protocol`]: one strategy per party plus the
//! metadata the engines need (target function, box budget, size of the
//! randomness space). [`execute`] runs Alice's strategy to completion, then
//! Bob's, over the same box instances.

mod amplify;
mod bias;
mod gates;

pub use amplify::{
    amplify, trivial_protocol, Amplified, AmplificationSpec, LeafProtocol, TrivialRun, MAX_DEPTH,
};
pub use bias::{base_bias, base_bias_share, BaseBias};
pub use gates::{
    and_share, distributed_and, equality_share, majority, majority_share, nonlocal_equality,
    nonlocal_majority, DistributedAndGate, NonlocalEquality, NonlocalMajority,
};

use crate::bits::{Bit, DistributedBit};
use crate::boxes::{BoxInstance, BoxModel};
use crate::error::{Error, Result};
use crate::party::{Party, PartyContext, Transcript};
use crate::random::RandomSource;
use crate::scalar::Scalar;

pub trait Protocol<S: Scalar>: Sync {
    fn name(&self) -> String;

    /// Input bit counts `(m, n)` of Alice and Bob.
    fn arity(&self) -> (u32, u32);

    /// The value the protocol is supposed to compute.
    fn target(&self, x: u64, y: u64) -> Bit;

    fn box_model(&self) -> Option<&BoxModel<S>>;

    fn box_count(&self) -> usize;

    /// Randomness substreams the protocol keys its atoms by.
    fn stream_count(&self) -> u64 {
        1
    }

    /// Upper bound on `log2` of the number of randomness assignments for
    /// one input pair.
    fn randomness_bits(&self) -> u64;

    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit>;

    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit>;

    /// Whether Bob sends his final share to Alice after the distributed phase.
    fn reveals(&self) -> bool {
        false
    }

    /// Independence structure usable by the compositional exact engine.
    fn composition(&self) -> Option<Composition<'_, S>> {
        None
    }
}

/// Declared independence structure of a protocol.
pub enum Composition<'a, S: Scalar> {
    /// Complete ternary tree of majority gates of the given depth whose
    /// leaves are independent runs of `leaf` and whose gates err
    /// independently of everything else.
    MajorityTree {
        leaf: Box<dyn Protocol<S> + 'a>,
        gate: Box<dyn Protocol<S> + 'a>,
        depth: u32,
    },
    /// Output is the exact Boolean value XOR the independent errors of
    /// `count` copies of `gate`.
    XorOfGates {
        gate: Box<dyn Protocol<S> + 'a>,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolRun {
    pub output: DistributedBit,
    /// Alice's answer after the reveal phase, for protocols that communicate.
    pub guess: Option<Bit>,
    pub transcript: Transcript,
}

impl ProtocolRun {
    pub fn answer(&self) -> Bit {
        self.guess.unwrap_or_else(|| self.output.value())
    }
}

/// Runs both strategies on input `(x, y)`.
pub fn execute<S: Scalar, P: Protocol<S> + ?Sized>(
    protocol: &P,
    x: u64,
    y: u64,
    source: &mut dyn RandomSource<S>,
) -> Result<ProtocolRun> {
    let needed = protocol.stream_count();
    let available = source.stream_capacity();
    if needed > available {
        return Err(Error::InsufficientRandomness { needed, available });
    }
    let count = protocol.box_count();
    let mut boxes: Vec<BoxInstance<'_, S>> = match protocol.box_model() {
        Some(model) => (0..count).map(|i| BoxInstance::new(model, i as u32)).collect(),
        None if count == 0 => Vec::new(),
        None => {
            return Err(Error::InvalidConfig(format!(
                "{} declares {count} boxes but no box model",
                protocol.name()
            )))
        }
    };

    let (a, alice_reads) = {
        let mut ctx = PartyContext::new(Party::Alice, &mut *source, &mut boxes);
        (protocol.alice(x, &mut ctx)?, ctx.shared_reads())
    };
    let (b, bob_reads) = {
        let mut ctx = PartyContext::new(Party::Bob, &mut *source, &mut boxes);
        (protocol.bob(y, &mut ctx)?, ctx.shared_reads())
    };

    let mut transcript = Transcript::new();
    let fired = boxes.iter().filter(|b| b.is_fired()).count() as u64;
    transcript.record_distributed(fired, alice_reads.max(bob_reads));
    debug_assert!(transcript.is_communication_free());

    let output = DistributedBit::new(a, b);
    let guess = protocol
        .reveals()
        .then(|| a ^ transcript.communicate(b));
    Ok(ProtocolRun {
        output,
        guess,
        transcript,
    })
}

/// Wraps a distributed protocol with the one-bit reveal: Bob sends his
/// share and Alice outputs the XOR.
pub struct Revealed<P>(pub P);

impl<S: Scalar, P: Protocol<S>> Protocol<S> for Revealed<P> {
    fn name(&self) -> String {
        format!("revealed({})", self.0.name())
    }
    fn arity(&self) -> (u32, u32) {
        self.0.arity()
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        self.0.target(x, y)
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        self.0.box_model()
    }
    fn box_count(&self) -> usize {
        self.0.box_count()
    }
    fn stream_count(&self) -> u64 {
        self.0.stream_count()
    }
    fn randomness_bits(&self) -> u64 {
        self.0.randomness_bits()
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        self.0.alice(x, ctx)
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        self.0.bob(y, ctx)
    }
    fn reveals(&self) -> bool {
        true
    }
    fn composition(&self) -> Option<Composition<'_, S>> {
        self.0.composition()
    }
}
