use crate::bits::Bit;
use crate::boxes::BoxModel;
use crate::error::{Error, Result};
use crate::function::BooleanFunction;
use crate::party::{Party, PartyContext, Transcript};
use crate::random::{RandomSource, SharedRandomness};
use crate::scalar::Scalar;

use super::{base_bias_share, execute, majority_share, BaseBias, Composition, NonlocalMajority, Protocol, ProtocolRun, Revealed};

/// Deepest supported majority tree (`3^16` leaves).
pub const MAX_DEPTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeafProtocol {
    #[default]
    BaseBias,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationSpec<S = f64> {
    pub depth: u32,
    pub leaf: LeafProtocol,
    pub box_model: BoxModel<S>,
}

impl<S: Scalar> AmplificationSpec<S> {
    pub fn new(depth: u32, box_model: BoxModel<S>) -> Result<Self> {
        let spec = AmplificationSpec {
            depth,
            leaf: LeafProtocol::BaseBias,
            box_model,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > MAX_DEPTH {
            return Err(Error::ArityGuard {
                what: "amplification depth",
                value: self.depth,
                max: MAX_DEPTH,
            });
        }
        self.box_model.validate()
    }

    pub fn leaves(&self) -> u64 {
        3u64.pow(self.depth)
    }

    /// Majority nodes in the tree, `(3^depth − 1) / 2`.
    pub fn internal_nodes(&self) -> u64 {
        (self.leaves() - 1) / 2
    }

    pub fn boxes(&self) -> u64 {
        2 * self.internal_nodes()
    }
}

/// Complete ternary tree of nonlocal-majority gates over independent
/// base-bias leaves.
///
/// Nodes use heap numbering: the root is 0 and the children of `k` are
/// `3k + 1 ..= 3k + 3`. Internal node `k` owns boxes `2k` and `2k + 1`;
/// leaf `i` owns randomness substream `i`.
#[derive(Debug, Clone)]
pub struct Amplified<'a, S> {
    pub f: &'a BooleanFunction,
    pub spec: &'a AmplificationSpec<S>,
}

impl<S: Scalar> Amplified<'_, S> {
    fn share(&self, node: u64, input: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        let internal = self.spec.internal_nodes();
        if node >= internal {
            let mut shared = SharedRandomness::substream((node - internal) as u32);
            return Ok(base_bias_share(self.f, &mut shared, input, ctx));
        }
        let children = [
            self.share(3 * node + 1, input, ctx)?,
            self.share(3 * node + 2, input, ctx)?,
            self.share(3 * node + 3, input, ctx)?,
        ];
        let slot = 2 * node as usize;
        majority_share(ctx, children, [slot, slot + 1])
    }
}

impl<S: Scalar> Protocol<S> for Amplified<'_, S> {
    fn name(&self) -> String {
        format!("amplify(depth={})", self.spec.depth)
    }
    fn arity(&self) -> (u32, u32) {
        (self.f.alice_arity(), self.f.bob_arity())
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        self.f.eval(x, y)
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        Some(&self.spec.box_model)
    }
    fn box_count(&self) -> usize {
        self.spec.boxes() as usize
    }
    fn stream_count(&self) -> u64 {
        self.spec.leaves()
    }
    fn randomness_bits(&self) -> u64 {
        let leaf_bits = u64::from(self.f.bob_arity()) + 1;
        let box_bits = u64::from(self.spec.box_model.atom_bits());
        self.spec.leaves() * leaf_bits + self.spec.boxes() * box_bits
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        debug_assert_eq!(ctx.party(), Party::Alice);
        self.share(0, x, ctx)
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        self.share(0, y, ctx)
    }
    fn composition(&self) -> Option<Composition<'_, S>> {
        Some(Composition::MajorityTree {
            leaf: Box::new(BaseBias::new(self.f)),
            gate: Box::new(NonlocalMajority {
                model: &self.spec.box_model,
            }),
            depth: self.spec.depth,
        })
    }
}

/// Runs the amplification tree on `(x, y)`; no communication.
pub fn amplify<S: Scalar>(
    f: &BooleanFunction,
    x: u64,
    y: u64,
    spec: &AmplificationSpec<S>,
    source: &mut dyn RandomSource<S>,
) -> Result<ProtocolRun> {
    spec.validate()?;
    execute(&Amplified { f, spec }, x, y, source)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialRun {
    pub guess: Bit,
    pub transcript: Transcript,
}

/// Amplification followed by a single communicated bit: Bob sends his root
/// share and Alice outputs the XOR.
pub fn trivial_protocol<S: Scalar>(
    f: &BooleanFunction,
    x: u64,
    y: u64,
    spec: &AmplificationSpec<S>,
    source: &mut dyn RandomSource<S>,
) -> Result<TrivialRun> {
    spec.validate()?;
    let run = execute(&Revealed(Amplified { f, spec }), x, y, source)?;
    Ok(TrivialRun {
        guess: run.answer(),
        transcript: run.transcript,
    })
}
