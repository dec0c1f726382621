use std::collections::BTreeMap;
use std::fmt;

use crate::analysis::{h_iterates, xor_chain_success};
use crate::boxes::PROBABILITY_TOLERANCE;
use crate::error::{Error, Result};
use crate::function::MAX_TABLE_BITS;
use crate::protocols::{execute, Composition, Protocol};
use crate::random::{AtomKey, Draw, RandomSource};
use crate::scalar::{max_of, min_of, Scalar};

/// Largest randomness space, as `log2` of the number of atoms assignments,
/// that full enumeration accepts.
pub const FULL_ENUMERATION_LIMIT_BITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExactMode {
    /// Sum probability mass over every assignment of every random atom.
    FullEnumeration,
    /// Evaluate components exactly and compose them with the amplification
    /// recurrence or the XOR-chain law.
    Compositional,
}

impl fmt::Display for ExactMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExactMode::FullEnumeration => "full-enumeration",
            ExactMode::Compositional => "compositional",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult<S> {
    /// Success probability for every input pair `(x, y)`.
    pub per_input: BTreeMap<(u64, u64), S>,
    pub worst_case: S,
    pub mode: ExactMode,
}

impl<S: Scalar> ExactResult<S> {
    fn from_map(per_input: BTreeMap<(u64, u64), S>, mode: ExactMode) -> Self {
        let worst_case = min_of(per_input.values().cloned()).unwrap_or_else(S::one);
        ExactResult {
            per_input,
            worst_case,
            mode,
        }
    }

    pub fn best_case(&self) -> S {
        max_of(self.per_input.values().cloned()).unwrap_or_else(S::one)
    }

    /// True when every input pair has the same success probability.
    pub fn is_input_independent(&self) -> bool {
        (self.best_case().approx() - self.worst_case.approx()).abs() <= PROBABILITY_TOLERANCE
    }

    pub fn to_f64(&self) -> ExactResult<f64> {
        ExactResult {
            per_input: self.per_input.iter().map(|(k, v)| (*k, v.approx())).collect(),
            worst_case: self.worst_case.approx(),
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone)]
struct Choice<S> {
    key: AtomKey,
    value: u64,
    dist: Draw<S>,
}

/// Depth-first walker over every assignment of the atoms a run consumes.
///
/// A run draws atoms in a deterministic order given earlier values, so the
/// walker records each draw on a tape, replays the tape prefix on the next
/// run, and advances the last choice that still has an untried value.
/// Atoms read again under the same key return the recorded value.
#[derive(Debug, Clone)]
pub struct Enumerator<S> {
    tape: Vec<Choice<S>>,
    pos: usize,
}

impl<S: Scalar> Default for Enumerator<S> {
    fn default() -> Self {
        Enumerator::new()
    }
}

impl<S: Scalar> Enumerator<S> {
    pub fn new() -> Self {
        Enumerator {
            tape: Vec::new(),
            pos: 0,
        }
    }

    fn first_value(dist: &Draw<S>) -> u64 {
        match dist {
            Draw::Bits(_) => 0,
            Draw::Bernoulli(p) => u64::from(*p >= S::one()),
        }
    }

    fn next_value(choice: &Choice<S>) -> Option<u64> {
        match &choice.dist {
            Draw::Bits(b) => (choice.value + 1 < 1u64 << b).then_some(choice.value + 1),
            Draw::Bernoulli(p) => (choice.value == 0 && *p > S::zero()).then_some(1),
        }
    }

    /// Probability of the assignment on the tape.
    pub fn weight(&self) -> S {
        self.tape.iter().fold(S::one(), |acc, c| {
            acc * match &c.dist {
                Draw::Bits(b) => S::dyadic(*b),
                Draw::Bernoulli(p) if c.value == 1 => p.clone(),
                Draw::Bernoulli(p) => p.complement(),
            }
        })
    }

    /// Moves to the next assignment; false once all have been visited.
    pub fn advance(&mut self) -> bool {
        self.pos = 0;
        while let Some(last) = self.tape.last_mut() {
            if let Some(next) = Self::next_value(last) {
                last.value = next;
                return true;
            }
            self.tape.pop();
        }
        false
    }
}

impl<S: Scalar> RandomSource<S> for Enumerator<S> {
    fn draw(&mut self, key: AtomKey, dist: &Draw<S>) -> u64 {
        if let Some(seen) = self.tape[..self.pos].iter().find(|c| c.key == key) {
            return seen.value;
        }
        if self.pos < self.tape.len() {
            debug_assert_eq!(self.tape[self.pos].key, key, "non-deterministic replay");
            self.pos += 1;
            return self.tape[self.pos - 1].value;
        }
        let value = Self::first_value(dist);
        self.tape.push(Choice {
            key,
            value,
            dist: dist.clone(),
        });
        self.pos += 1;
        value
    }
}

fn input_pairs(m: u32, n: u32) -> Result<impl Iterator<Item = (u64, u64)>> {
    if m + n > MAX_TABLE_BITS {
        return Err(Error::ArityGuard {
            what: "input space exponent",
            value: m + n,
            max: MAX_TABLE_BITS,
        });
    }
    Ok((0..1u64 << m).flat_map(move |x| (0..1u64 << n).map(move |y| (x, y))))
}

fn full_enumeration<S: Scalar, P: Protocol<S> + ?Sized>(protocol: &P) -> Result<ExactResult<S>> {
    let bits = protocol.randomness_bits();
    if bits > u64::from(FULL_ENUMERATION_LIMIT_BITS) {
        return Err(Error::RandomnessSpaceTooLarge {
            bits,
            max: FULL_ENUMERATION_LIMIT_BITS,
        });
    }
    let (m, n) = protocol.arity();
    let mut per_input = BTreeMap::new();
    for (x, y) in input_pairs(m, n)? {
        let target = protocol.target(x, y);
        let mut walker = Enumerator::<S>::new();
        let mut success = S::zero();
        loop {
            let run = execute(protocol, x, y, &mut walker)?;
            if run.answer() == target {
                success = success + walker.weight();
            }
            if !walker.advance() {
                break;
            }
        }
        per_input.insert((x, y), success);
    }
    Ok(ExactResult::from_map(per_input, ExactMode::FullEnumeration))
}

fn uniform_gate_success<S: Scalar>(gate: &dyn Protocol<S>) -> Result<S> {
    let exact = full_enumeration(gate)?;
    if !exact.is_input_independent() {
        return Err(Error::CompositionUnavailable(format!(
            "{}: gate success depends on its inputs",
            gate.name()
        )));
    }
    Ok(exact.worst_case)
}

fn compositional<S: Scalar, P: Protocol<S> + ?Sized>(protocol: &P) -> Result<ExactResult<S>> {
    let composition = protocol
        .composition()
        .ok_or_else(|| Error::CompositionUnavailable(protocol.name()))?;
    let per_input = match composition {
        Composition::MajorityTree { leaf, gate, depth } => {
            let q = uniform_gate_success(gate.as_ref())?;
            let leaves = full_enumeration(leaf.as_ref())?;
            leaves
                .per_input
                .into_iter()
                .map(|(xy, p)| {
                    let last = h_iterates(p, q.clone(), depth as usize).pop().expect("non-empty");
                    (xy, last)
                })
                .collect()
        }
        Composition::XorOfGates { gate, count } => {
            let g = uniform_gate_success(gate.as_ref())?;
            let success = xor_chain_success(g, count);
            let (m, n) = protocol.arity();
            input_pairs(m, n)?.map(|xy| (xy, success.clone())).collect()
        }
    };
    Ok(ExactResult::from_map(per_input, ExactMode::Compositional))
}

/// Exact success probability of `protocol` for every input pair.
pub fn exact_success<S: Scalar, P: Protocol<S> + ?Sized>(protocol: &P, mode: ExactMode) -> Result<ExactResult<S>> {
    if let Some(model) = protocol.box_model() {
        model.validate()?;
    }
    match mode {
        ExactMode::FullEnumeration => full_enumeration(protocol),
        ExactMode::Compositional => compositional(protocol),
    }
}
