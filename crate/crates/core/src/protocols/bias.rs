use crate::bits::{Bit, DistributedBit};
use crate::boxes::BoxModel;
use crate::error::Result;
use crate::function::BooleanFunction;
use crate::party::{Party, PartyContext};
use crate::random::{RandomSource, SharedRandomness};
use crate::scalar::Scalar;

use super::{execute, Protocol};

/// One party's half of the guess-Bob's-input protocol.
///
/// Both parties read a shared uniform word `z` of Bob's input length.
/// Alice answers `f(x, z)`. Bob answers 0 when `y = z` and a private fair
/// coin otherwise, so the shared bit is correct with probability
/// `1/2 + 2^-(n+1)` on every input.
pub fn base_bias_share<S: Scalar>(
    f: &BooleanFunction,
    shared: &mut SharedRandomness,
    input: u64,
    ctx: &mut PartyContext<'_, '_, S>,
) -> Bit {
    let z = shared.next_word(ctx, f.bob_arity());
    match ctx.party() {
        Party::Alice => f.eval(input, z),
        Party::Bob if input == z => Bit::ZERO,
        Party::Bob => ctx.private_coin(shared.stream(), 0),
    }
}

/// Runs the base-bias protocol on `(x, y)` drawing from the substream of `shared`.
pub fn base_bias<S: Scalar>(
    f: &BooleanFunction,
    x: u64,
    y: u64,
    shared: &SharedRandomness,
    source: &mut dyn RandomSource<S>,
) -> Result<DistributedBit> {
    let protocol = BaseBias {
        f,
        stream: shared.stream(),
    };
    Ok(execute(&protocol, x, y, source)?.output)
}

#[derive(Debug, Clone)]
pub struct BaseBias<'f> {
    pub f: &'f BooleanFunction,
    pub stream: u32,
}

impl<'f> BaseBias<'f> {
    pub fn new(f: &'f BooleanFunction) -> Self {
        BaseBias { f, stream: 0 }
    }
}

impl<S: Scalar> Protocol<S> for BaseBias<'_> {
    fn name(&self) -> String {
        "base-bias".into()
    }
    fn arity(&self) -> (u32, u32) {
        (self.f.alice_arity(), self.f.bob_arity())
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        self.f.eval(x, y)
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        None
    }
    fn box_count(&self) -> usize {
        0
    }
    fn randomness_bits(&self) -> u64 {
        u64::from(self.f.bob_arity()) + 1
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        Ok(base_bias_share(self.f, &mut SharedRandomness::substream(self.stream), x, ctx))
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        Ok(base_bias_share(self.f, &mut SharedRandomness::substream(self.stream), y, ctx))
    }
}
