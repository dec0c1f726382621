use crate::bits::{Bit, DistributedBit};
use crate::boxes::{BoxInstance, BoxModel};
use crate::error::{Error, Result};
use crate::party::{Party, PartyContext};
use crate::random::RandomSource;
use crate::scalar::Scalar;

use super::Protocol;

/// One party's half of the distributed AND of `u = x' ⊕ y'` and
/// `v = x'' ⊕ y''`.
///
/// Expanding `(x' ⊕ y') ∧ (x'' ⊕ y'')` leaves the two cross terms
/// `x' ∧ y''` (box `slots[0]`) and `x'' ∧ y'` (box `slots[1]`); the
/// remaining terms are local.
pub fn and_share<S: Scalar>(
    ctx: &mut PartyContext<'_, '_, S>,
    first: Bit,
    second: Bit,
    slots: [usize; 2],
) -> Result<Bit> {
    let (into_first_box, into_second_box) = match ctx.party() {
        Party::Alice => (first, second),
        Party::Bob => (second, first),
    };
    let o1 = ctx.use_box(slots[0], into_first_box)?;
    let o2 = ctx.use_box(slots[1], into_second_box)?;
    Ok((first & second) ^ o1 ^ o2)
}

/// One party's half of nonlocal equality of three distributed bits.
pub fn equality_share<S: Scalar>(
    ctx: &mut PartyContext<'_, '_, S>,
    bits: [Bit; 3],
    slots: [usize; 2],
) -> Result<Bit> {
    let (first, second) = match ctx.party() {
        Party::Alice => (!bits[0] ^ bits[1], !bits[1] ^ bits[2]),
        Party::Bob => (bits[0] ^ bits[1], bits[1] ^ bits[2]),
    };
    and_share(ctx, first, second, slots)
}

/// One party's half of nonlocal majority of three distributed bits.
pub fn majority_share<S: Scalar>(
    ctx: &mut PartyContext<'_, '_, S>,
    bits: [Bit; 3],
    slots: [usize; 2],
) -> Result<Bit> {
    let equal = equality_share(ctx, bits, slots)?;
    let parity = bits[0] ^ bits[1] ^ bits[2];
    Ok(match ctx.party() {
        Party::Alice => !equal ^ parity,
        Party::Bob => equal ^ parity,
    })
}

pub fn majority(bits: [Bit; 3]) -> Bit {
    let ones = bits.iter().filter(|b| b.is_one()).count();
    Bit::new(ones >= 2)
}

fn run_pair<S: Scalar>(
    boxes: &mut [BoxInstance<'_, S>],
    source: &mut dyn RandomSource<S>,
    mut half: impl FnMut(&mut PartyContext<'_, '_, S>) -> Result<Bit>,
) -> Result<DistributedBit> {
    if boxes.len() < 2 {
        return Err(Error::InsufficientBoxes {
            needed: 2,
            available: boxes.len() as u64,
        });
    }
    let a = half(&mut PartyContext::new(Party::Alice, &mut *source, &mut *boxes))?;
    let b = half(&mut PartyContext::new(Party::Bob, &mut *source, &mut *boxes))?;
    Ok(DistributedBit::new(a, b))
}

/// Distributed AND of two distributed bits using the first two boxes.
pub fn distributed_and<S: Scalar>(
    u: DistributedBit,
    v: DistributedBit,
    boxes: &mut [BoxInstance<'_, S>],
    source: &mut dyn RandomSource<S>,
) -> Result<DistributedBit> {
    run_pair(boxes, source, |ctx| {
        let (first, second) = match ctx.party() {
            Party::Alice => (u.alice_share, v.alice_share),
            Party::Bob => (u.bob_share, v.bob_share),
        };
        and_share(ctx, first, second, [0, 1])
    })
}

fn own(ctx: &PartyContext<'_, '_, impl Scalar>, x: [Bit; 3], y: [Bit; 3]) -> [Bit; 3] {
    match ctx.party() {
        Party::Alice => x,
        Party::Bob => y,
    }
}

pub fn nonlocal_equality<S: Scalar>(
    x: [Bit; 3],
    y: [Bit; 3],
    boxes: &mut [BoxInstance<'_, S>],
    source: &mut dyn RandomSource<S>,
) -> Result<DistributedBit> {
    run_pair(boxes, source, |ctx| {
        let bits = own(ctx, x, y);
        equality_share(ctx, bits, [0, 1])
    })
}

pub fn nonlocal_majority<S: Scalar>(
    x: [Bit; 3],
    y: [Bit; 3],
    boxes: &mut [BoxInstance<'_, S>],
    source: &mut dyn RandomSource<S>,
) -> Result<DistributedBit> {
    run_pair(boxes, source, |ctx| {
        let bits = own(ctx, x, y);
        majority_share(ctx, bits, [0, 1])
    })
}

fn unpack3(word: u64) -> [Bit; 3] {
    [Bit::of(word, 0), Bit::of(word, 1), Bit::of(word, 2)]
}

fn distributed_values(x: u64, y: u64) -> [Bit; 3] {
    unpack3(x ^ y)
}

/// Distributed AND as a protocol: Alice holds `(x', x'')` as bits 0 and 1
/// of her input, Bob holds `(y', y'')`.
#[derive(Debug, Clone)]
pub struct DistributedAndGate<'m, S> {
    pub model: &'m BoxModel<S>,
}

impl<S: Scalar> Protocol<S> for DistributedAndGate<'_, S> {
    fn name(&self) -> String {
        "distributed-and".into()
    }
    fn arity(&self) -> (u32, u32) {
        (2, 2)
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        let z = x ^ y;
        Bit::of(z, 0) & Bit::of(z, 1)
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        Some(self.model)
    }
    fn box_count(&self) -> usize {
        2
    }
    fn randomness_bits(&self) -> u64 {
        2 * u64::from(self.model.atom_bits())
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        and_share(ctx, Bit::of(x, 0), Bit::of(x, 1), [0, 1])
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        and_share(ctx, Bit::of(y, 0), Bit::of(y, 1), [0, 1])
    }
}

#[derive(Debug, Clone)]
pub struct NonlocalEquality<'m, S> {
    pub model: &'m BoxModel<S>,
}

impl<S: Scalar> Protocol<S> for NonlocalEquality<'_, S> {
    fn name(&self) -> String {
        "nonlocal-equality".into()
    }
    fn arity(&self) -> (u32, u32) {
        (3, 3)
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        let z = distributed_values(x, y);
        Bit::new(z[0] == z[1] && z[1] == z[2])
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        Some(self.model)
    }
    fn box_count(&self) -> usize {
        2
    }
    fn randomness_bits(&self) -> u64 {
        2 * u64::from(self.model.atom_bits())
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        equality_share(ctx, unpack3(x), [0, 1])
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        equality_share(ctx, unpack3(y), [0, 1])
    }
}

#[derive(Debug, Clone)]
pub struct NonlocalMajority<'m, S> {
    pub model: &'m BoxModel<S>,
}

impl<S: Scalar> Protocol<S> for NonlocalMajority<'_, S> {
    fn name(&self) -> String {
        "nonlocal-majority".into()
    }
    fn arity(&self) -> (u32, u32) {
        (3, 3)
    }
    fn target(&self, x: u64, y: u64) -> Bit {
        majority(distributed_values(x, y))
    }
    fn box_model(&self) -> Option<&BoxModel<S>> {
        Some(self.model)
    }
    fn box_count(&self) -> usize {
        2
    }
    fn randomness_bits(&self) -> u64 {
        2 * u64::from(self.model.atom_bits())
    }
    fn alice(&self, x: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        majority_share(ctx, unpack3(x), [0, 1])
    }
    fn bob(&self, y: u64, ctx: &mut PartyContext<'_, '_, S>) -> Result<Bit> {
        majority_share(ctx, unpack3(y), [0, 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::CounterSource;

    fn bits(v: [u8; 3]) -> [Bit; 3] {
        v.map(|b| Bit::try_from(b).unwrap())
    }

    fn db(a: u8, b: u8) -> DistributedBit {
        DistributedBit::new(Bit::try_from(a).unwrap(), Bit::try_from(b).unwrap())
    }

    fn fresh(model: &BoxModel<f64>) -> [BoxInstance<'_, f64>; 2] {
        [BoxInstance::new(model, 0), BoxInstance::new(model, 1)]
    }

    #[test]
    fn distributed_and_with_perfect_boxes() {
        let model = BoxModel::Perfect;
        for seed in 0..32 {
            let mut src = CounterSource::new(seed);
            let mut boxes = fresh(&model);
            let r = distributed_and(db(1, 0), db(1, 1), &mut boxes, &mut src).unwrap();
            assert_eq!(r.value(), Bit::ZERO);
            let mut boxes = fresh(&model);
            let r = distributed_and(db(1, 0), db(0, 1), &mut boxes, &mut src).unwrap();
            assert_eq!(r.value(), Bit::ONE);
        }
    }

    #[test]
    fn fired_boxes_are_rejected() {
        let model = BoxModel::Perfect;
        let mut src = CounterSource::new(0);
        let mut boxes = fresh(&model);
        distributed_and(db(1, 0), db(1, 1), &mut boxes, &mut src).unwrap();
        assert!(matches!(
            nonlocal_majority(bits([0, 0, 0]), bits([0, 0, 0]), &mut boxes, &mut src),
            Err(Error::BoxReused { .. })
        ));
        let mut one = [BoxInstance::new(&model, 0)];
        assert!(matches!(
            distributed_and(db(1, 0), db(1, 1), &mut one, &mut src),
            Err(Error::InsufficientBoxes { needed: 2, available: 1 })
        ));
    }

    #[test]
    fn equality_examples() {
        let model = BoxModel::Perfect;
        let mut src = CounterSource::new(1);
        let r = nonlocal_equality(bits([0, 0, 0]), bits([0, 0, 0]), &mut fresh(&model), &mut src).unwrap();
        assert_eq!(r.value(), Bit::ONE);
        let r = nonlocal_equality(bits([1, 0, 1]), bits([0, 0, 1]), &mut fresh(&model), &mut src).unwrap();
        assert_eq!(r.value(), Bit::ZERO);
    }

    #[test]
    fn majority_examples() {
        let model = BoxModel::Perfect;
        let mut src = CounterSource::new(2);
        let r = nonlocal_majority(bits([1, 1, 0]), bits([0, 1, 0]), &mut fresh(&model), &mut src).unwrap();
        assert_eq!(r.value(), Bit::ZERO);
        let r = nonlocal_majority(bits([1, 1, 1]), bits([0, 0, 1]), &mut fresh(&model), &mut src).unwrap();
        assert_eq!(r.value(), Bit::ONE);
    }

    #[test]
    fn majority_helper() {
        assert_eq!(majority(bits([1, 0, 0])), Bit::ZERO);
        assert_eq!(majority(bits([1, 0, 1])), Bit::ONE);
    }
}
