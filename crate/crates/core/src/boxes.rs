//! Nonlocal-box models, their conditional behaviors and one-shot instances.
//!
//! A box has a port at each party. The contract of the ideal box is
//! `a ⊕ b = x ∧ y` with uniformly random local outputs. Every model here is
//! described by its behavior `P(a, b | x, y)`, and instances sample from
//! exactly that distribution one port at a time, so whichever party uses
//! the box first sees its marginal and the second party sees the matching
//! conditional.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bits::Bit;
use crate::error::{Error, Result};
use crate::party::Party;
use crate::random::{AtomKey, AtomKind, Draw, RandomSource};
use crate::scalar::{min_of, Scalar};

/// Absolute tolerance for comparing real-valued probabilities.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// A deterministic local response `{0,1} → {0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalRule {
    Zero,
    One,
    Identity,
    Negate,
}

impl LocalRule {
    pub const ALL: [LocalRule; 4] = [
        LocalRule::Zero,
        LocalRule::One,
        LocalRule::Identity,
        LocalRule::Negate,
    ];

    pub fn apply(self, input: Bit) -> Bit {
        match self {
            LocalRule::Zero => Bit::ZERO,
            LocalRule::One => Bit::ONE,
            LocalRule::Identity => input,
            LocalRule::Negate => !input,
        }
    }

    fn token(self) -> &'static str {
        match self {
            LocalRule::Zero => "0",
            LocalRule::One => "1",
            LocalRule::Identity => "id",
            LocalRule::Negate => "not",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token {
            "0" => Some(LocalRule::Zero),
            "1" => Some(LocalRule::One),
            "id" => Some(LocalRule::Identity),
            "not" => Some(LocalRule::Negate),
            _ => None,
        }
    }
}

fn input_index(x: Bit, y: Bit) -> usize {
    2 * x.as_u8() as usize + y.as_u8() as usize
}

const BITS: [Bit; 2] = [Bit::ZERO, Bit::ONE];

/// Conditional distribution `P(a, b | x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBehavior<S> {
    /// `table[2x + y][2a + b]`
    table: [[S; 4]; 4],
}

impl<S: Scalar> BoxBehavior<S> {
    /// Builds a behavior from `p(a, b, x, y)`.
    pub fn from_fn(p: impl Fn(Bit, Bit, Bit, Bit) -> S) -> Self {
        let table = std::array::from_fn(|xy| {
            let (x, y) = (Bit::new(xy >= 2), Bit::new(xy % 2 == 1));
            std::array::from_fn(|ab| p(Bit::new(ab >= 2), Bit::new(ab % 2 == 1), x, y))
        });
        BoxBehavior { table }
    }

    pub fn prob(&self, a: Bit, b: Bit, x: Bit, y: Bit) -> &S {
        &self.table[input_index(x, y)][input_index(a, b)]
    }

    /// `P(a ⊕ b = x ∧ y | x, y)`.
    pub fn success(&self, x: Bit, y: Bit) -> S {
        let target = x & y;
        let mut total = S::zero();
        for a in BITS {
            for b in BITS {
                if a ^ b == target {
                    total = total + self.prob(a, b, x, y).clone();
                }
            }
        }
        total
    }

    pub fn worst_success(&self) -> S {
        min_of(inputs().map(|(x, y)| self.success(x, y))).expect("four inputs")
    }

    /// Success with inputs drawn uniformly (the CHSH game value).
    pub fn average_success(&self) -> S {
        let sum = inputs().fold(S::zero(), |acc, (x, y)| acc + self.success(x, y));
        sum / S::from_u64(4).expect("4")
    }

    pub fn alice_marginal(&self, a: Bit, x: Bit, y: Bit) -> S {
        self.prob(a, Bit::ZERO, x, y).clone() + self.prob(a, Bit::ONE, x, y).clone()
    }

    pub fn bob_marginal(&self, b: Bit, x: Bit, y: Bit) -> S {
        self.prob(Bit::ZERO, b, x, y).clone() + self.prob(Bit::ONE, b, x, y).clone()
    }

    /// Checks non-negativity and that each column sums to one.
    pub fn is_valid(&self) -> bool {
        self.table.iter().all(|column| {
            let sum = column.iter().fold(S::zero(), |acc, p| acc + p.clone());
            column.iter().all(|p| p.approx() >= -PROBABILITY_TOLERANCE)
                && (sum.approx() - 1.0).abs() <= PROBABILITY_TOLERANCE
        })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BoxBehavior<T> {
        BoxBehavior {
            table: std::array::from_fn(|i| std::array::from_fn(|j| f(&self.table[i][j]))),
        }
    }
}

fn inputs() -> impl Iterator<Item = (Bit, Bit)> {
    BITS.into_iter()
        .flat_map(|x| BITS.into_iter().map(move |y| (x, y)))
}

/// Measurement angles for a maximally entangled pair plus the behavior
/// they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy<S> {
    alice_angles: [f64; 2],
    bob_angles: [f64; 2],
    behavior: BoxBehavior<S>,
}

/// Canonical CHSH measurement angles: Alice `(0, π/4)`, Bob `(π/8, −π/8)`.
pub const CANONICAL_ALICE_ANGLES: [f64; 2] = [0.0, FRAC_PI_4];
pub const CANONICAL_BOB_ANGLES: [f64; 2] = [FRAC_PI_8, -FRAC_PI_8];

impl<S: Scalar> QuantumStrategy<S> {
    pub fn new(alice_angles: [f64; 2], bob_angles: [f64; 2]) -> Result<Self> {
        let behavior = quantum_behavior(alice_angles, bob_angles)?;
        Ok(QuantumStrategy {
            alice_angles,
            bob_angles,
            behavior,
        })
    }

    pub fn canonical() -> Self {
        QuantumStrategy::new(CANONICAL_ALICE_ANGLES, CANONICAL_BOB_ANGLES).expect("finite angles")
    }

    pub fn alice_angles(&self) -> [f64; 2] {
        self.alice_angles
    }

    pub fn bob_angles(&self) -> [f64; 2] {
        self.bob_angles
    }

    pub fn behavior(&self) -> &BoxBehavior<S> {
        &self.behavior
    }

    pub fn is_canonical(&self) -> bool {
        self.alice_angles == CANONICAL_ALICE_ANGLES && self.bob_angles == CANONICAL_BOB_ANGLES
    }
}

/// Amplitude vector of measurement outcome `o` in the basis rotated by `theta`.
fn basis_vector(theta: f64, outcome: Bit) -> [Complex64; 2] {
    let (s, c) = theta.sin_cos();
    if outcome.is_one() {
        [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)]
    } else {
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)]
    }
}

/// Exact outcome distribution when Alice and Bob share `(|00⟩ + |11⟩)/√2`
/// and each measures in the basis rotated by the angle their input selects.
pub fn quantum_behavior<S: Scalar>(alice_angles: [f64; 2], bob_angles: [f64; 2]) -> Result<BoxBehavior<S>> {
    if !alice_angles.iter().chain(&bob_angles).all(|t| t.is_finite()) {
        return Err(Error::InvalidModel("measurement angles must be finite".into()));
    }
    // Basis order |00⟩, |01⟩, |10⟩, |11⟩ with Alice's qubit first.
    let state = [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
    ];
    Ok(BoxBehavior::from_fn(|a, b, x, y| {
        let u = basis_vector(alice_angles[x.as_u8() as usize], a);
        let v = basis_vector(bob_angles[y.as_u8() as usize], b);
        let mut amp = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                amp += u[i].conj() * v[j].conj() * state[2 * i + j];
            }
        }
        S::lift(amp.norm_sqr())
    }))
}

/// Behavioral description of a nonlocal-box variant.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxModel<S = f64> {
    /// `a` uniform, `b = a ⊕ (x ∧ y)`.
    Perfect,
    /// Perfect box whose correlation is flipped with probability `1 − p`.
    Noisy(S),
    LocalDeterministic { alice: LocalRule, bob: LocalRule },
    /// Shared-randomness mixture of the optimal local deterministic pairs.
    Classical,
    Quantum(QuantumStrategy<S>),
}

impl<S: Scalar> BoxModel<S> {
    pub fn noisy(p: S) -> Result<Self> {
        let model = BoxModel::Noisy(p);
        model.validate()?;
        Ok(model)
    }

    pub fn quantum(alice_angles: [f64; 2], bob_angles: [f64; 2]) -> Result<Self> {
        Ok(BoxModel::Quantum(QuantumStrategy::new(alice_angles, bob_angles)?))
    }

    pub fn canonical_quantum() -> Self {
        BoxModel::Quantum(QuantumStrategy::canonical())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BoxModel::Noisy(p) if !(S::half() <= *p && *p <= S::one()) => Err(Error::InvalidModel(
                format!("noisy correctness {} outside [1/2, 1]", p.approx()),
            )),
            _ => Ok(()),
        }
    }

    pub fn behavior(&self) -> BoxBehavior<S> {
        let half = S::half();
        match self {
            BoxModel::Perfect => BoxBehavior::from_fn(|a, b, x, y| {
                if a ^ b == x & y {
                    half.clone()
                } else {
                    S::zero()
                }
            }),
            BoxModel::Noisy(p) => {
                let hit = p.clone() * half.clone();
                let miss = p.complement() * half;
                BoxBehavior::from_fn(|a, b, x, y| {
                    if a ^ b == x & y {
                        hit.clone()
                    } else {
                        miss.clone()
                    }
                })
            }
            BoxModel::LocalDeterministic { alice, bob } => local_behavior(*alice, *bob),
            BoxModel::Classical => classical_behavior(),
            BoxModel::Quantum(q) => q.behavior.clone(),
        }
    }

    /// Upper bound on `log2` of the number of random atoms one box consumes.
    pub fn atom_bits(&self) -> u32 {
        match self {
            BoxModel::Perfect => 1,
            BoxModel::LocalDeterministic { .. } => 0,
            BoxModel::Noisy(_) | BoxModel::Classical | BoxModel::Quantum(_) => 2,
        }
    }

    /// Correctness probability when it is the same for every input pair.
    pub fn uniform_success(&self) -> Option<S> {
        let behavior = self.behavior();
        let worst = behavior.worst_success();
        let uniform = inputs().all(|(x, y)| {
            (behavior.success(x, y).approx() - worst.approx()).abs() <= PROBABILITY_TOLERANCE
        });
        uniform.then_some(worst)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BoxModel<T> {
        match self {
            BoxModel::Perfect => BoxModel::Perfect,
            BoxModel::Noisy(p) => BoxModel::Noisy(f(p)),
            BoxModel::LocalDeterministic { alice, bob } => BoxModel::LocalDeterministic {
                alice: *alice,
                bob: *bob,
            },
            BoxModel::Classical => BoxModel::Classical,
            BoxModel::Quantum(q) => BoxModel::Quantum(QuantumStrategy {
                alice_angles: q.alice_angles,
                bob_angles: q.bob_angles,
                behavior: q.behavior.map(f),
            }),
        }
    }
}

fn local_behavior<S: Scalar>(alice: LocalRule, bob: LocalRule) -> BoxBehavior<S> {
    BoxBehavior::from_fn(|a, b, x, y| {
        if alice.apply(x) == a && bob.apply(y) == b {
            S::one()
        } else {
            S::zero()
        }
    })
}

fn classical_behavior<S: Scalar>() -> BoxBehavior<S> {
    let maximizers = best_local_deterministic::<S>().maximizers;
    let weight = S::from_ratio(1, maximizers.len() as u64);
    let parts: Vec<BoxBehavior<S>> = maximizers
        .iter()
        .map(|&(alice, bob)| local_behavior(alice, bob))
        .collect();
    BoxBehavior::from_fn(|a, b, x, y| {
        parts.iter().fold(S::zero(), |acc, part| {
            acc + part.prob(a, b, x, y).clone() * weight.clone()
        })
    })
}

pub fn behavior<S: Scalar>(model: &BoxModel<S>) -> BoxBehavior<S> {
    model.behavior()
}

/// Minimum over input pairs of `P(a ⊕ b = x ∧ y)`.
pub fn box_success<S: Scalar>(model: &BoxModel<S>) -> S {
    model.behavior().worst_success()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoSignallingReport {
    pub pass: bool,
    pub valid_distribution: bool,
    /// Largest difference between a party's marginal under the two values
    /// of the other party's input.
    pub max_deviation: f64,
}

pub fn check_no_signalling_behavior<S: Scalar>(behavior: &BoxBehavior<S>) -> NoSignallingReport {
    let mut max_deviation = 0.0f64;
    for own in BITS {
        for out in BITS {
            let alice = behavior.alice_marginal(out, own, Bit::ZERO).approx()
                - behavior.alice_marginal(out, own, Bit::ONE).approx();
            let bob = behavior.bob_marginal(out, Bit::ZERO, own).approx()
                - behavior.bob_marginal(out, Bit::ONE, own).approx();
            max_deviation = max_deviation.max(alice.abs()).max(bob.abs());
        }
    }
    let valid_distribution = behavior.is_valid();
    NoSignallingReport {
        pass: valid_distribution && max_deviation <= PROBABILITY_TOLERANCE,
        valid_distribution,
        max_deviation,
    }
}

pub fn check_no_signalling<S: Scalar>(model: &BoxModel<S>) -> NoSignallingReport {
    check_no_signalling_behavior(&model.behavior())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalScore<S> {
    pub alice: LocalRule,
    pub bob: LocalRule,
    /// Success with uniformly drawn inputs.
    pub average: S,
    /// Minimum over input pairs.
    pub worst_case: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimum<S> {
    /// Best uniform-input success over all 16 deterministic pairs.
    pub max_success: S,
    pub maximizers: Vec<(LocalRule, LocalRule)>,
    pub scores: Vec<LocalScore<S>>,
    /// Worst-case success of the uniform shared-randomness mixture of the
    /// maximizers.
    pub mixture_worst_case: S,
}

/// Exhaustive search over the 16 local deterministic strategy pairs.
pub fn best_local_deterministic<S: Scalar>() -> LocalOptimum<S> {
    let scores: Vec<LocalScore<S>> = LocalRule::ALL
        .iter()
        .flat_map(|&alice| LocalRule::ALL.iter().map(move |&bob| (alice, bob)))
        .map(|(alice, bob)| {
            let behavior = local_behavior::<S>(alice, bob);
            LocalScore {
                alice,
                bob,
                average: behavior.average_success(),
                worst_case: behavior.worst_success(),
            }
        })
        .collect();
    let max_success = crate::scalar::max_of(scores.iter().map(|s| s.average.clone())).expect("16 pairs");
    let maximizers: Vec<_> = scores
        .iter()
        .filter(|s| s.average == max_success)
        .map(|s| (s.alice, s.bob))
        .collect();
    let weight = S::from_ratio(1, maximizers.len() as u64);
    let mixture_worst_case = min_of(inputs().map(|(x, y)| {
        maximizers.iter().fold(S::zero(), |acc, &(alice, bob)| {
            if alice.apply(x) ^ bob.apply(y) == x & y {
                acc + weight.clone()
            } else {
                acc
            }
        })
    }))
    .expect("four inputs");
    LocalOptimum {
        max_success,
        maximizers,
        scores,
        mixture_worst_case,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PortState {
    Idle,
    Half { party: Party, input: Bit, output: Bit },
    Fired,
}

/// A single-use box. Each party's port can be used once; the box is fired
/// once both ports have been used.
#[derive(Debug, Clone)]
pub struct BoxInstance<'m, S> {
    model: &'m BoxModel<S>,
    id: u32,
    state: PortState,
}

impl<'m, S: Scalar> BoxInstance<'m, S> {
    /// `id` names the box's randomness atoms; distinct boxes in one run
    /// must have distinct ids.
    pub fn new(model: &'m BoxModel<S>, id: u32) -> Self {
        BoxInstance {
            model,
            id,
            state: PortState::Idle,
        }
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn model(&self) -> &'m BoxModel<S> {
        self.model
    }

    pub fn is_fired(&self) -> bool {
        self.state == PortState::Fired
    }

    /// True once either party has used its port.
    pub fn is_touched(&self) -> bool {
        self.state != PortState::Idle
    }

    /// Feeds both inputs at once and returns `(a, b)`.
    pub fn invoke(&mut self, x: Bit, y: Bit, source: &mut dyn RandomSource<S>) -> Result<(Bit, Bit)> {
        let a = self.port(Party::Alice, x, source)?;
        let b = self.port(Party::Bob, y, source)?;
        Ok((a, b))
    }

    pub(crate) fn port(&mut self, party: Party, input: Bit, source: &mut dyn RandomSource<S>) -> Result<Bit> {
        match self.state {
            PortState::Fired => Err(Error::BoxReused { id: self.id, party }),
            PortState::Half { party: first, .. } if first == party => {
                Err(Error::BoxReused { id: self.id, party })
            }
            PortState::Idle => {
                let output = self.first_output(party, input, source);
                self.state = PortState::Half {
                    party,
                    input,
                    output,
                };
                Ok(output)
            }
            PortState::Half {
                input: first_input,
                output: first_output,
                ..
            } => {
                let output = self.second_output(party, input, first_input, first_output, source);
                self.state = PortState::Fired;
                Ok(output)
            }
        }
    }

    fn key(&self, index: u32) -> AtomKey {
        AtomKey::new(AtomKind::Box, self.id, index)
    }

    fn first_output(&self, party: Party, input: Bit, source: &mut dyn RandomSource<S>) -> Bit {
        match self.model {
            BoxModel::Perfect | BoxModel::Noisy(_) => {
                Bit::new(source.draw(self.key(0), &Draw::Bits(1)) == 1)
            }
            BoxModel::LocalDeterministic { alice, bob } => match party {
                Party::Alice => alice.apply(input),
                Party::Bob => bob.apply(input),
            },
            BoxModel::Classical | BoxModel::Quantum(_) => {
                let behavior = self.model.behavior();
                // No-signalling: the marginal does not depend on the other input.
                let p_one = match party {
                    Party::Alice => behavior.alice_marginal(Bit::ONE, input, Bit::ZERO),
                    Party::Bob => behavior.bob_marginal(Bit::ONE, Bit::ZERO, input),
                };
                Bit::new(source.draw(self.key(0), &Draw::Bernoulli(p_one)) == 1)
            }
        }
    }

    fn second_output(
        &self,
        party: Party,
        input: Bit,
        first_input: Bit,
        first_output: Bit,
        source: &mut dyn RandomSource<S>,
    ) -> Bit {
        let (x, y) = match party {
            Party::Bob => (first_input, input),
            Party::Alice => (input, first_input),
        };
        match self.model {
            BoxModel::Perfect => first_output ^ (x & y),
            BoxModel::Noisy(p) => {
                let correct = source.draw(self.key(1), &Draw::Bernoulli(p.clone())) == 1;
                first_output ^ (x & y) ^ Bit::new(!correct)
            }
            BoxModel::LocalDeterministic { alice, bob } => match party {
                Party::Alice => alice.apply(input),
                Party::Bob => bob.apply(input),
            },
            BoxModel::Classical | BoxModel::Quantum(_) => {
                let behavior = self.model.behavior();
                let (joint_one, first_marginal) = match party {
                    Party::Bob => (
                        behavior.prob(first_output, Bit::ONE, x, y).clone(),
                        behavior.alice_marginal(first_output, x, y),
                    ),
                    Party::Alice => (
                        behavior.prob(Bit::ONE, first_output, x, y).clone(),
                        behavior.bob_marginal(first_output, x, y),
                    ),
                };
                let p_one = if first_marginal == S::zero() {
                    S::zero()
                } else {
                    joint_one / first_marginal
                };
                Bit::new(source.draw(self.key(1), &Draw::Bernoulli(p_one)) == 1)
            }
        }
    }
}

impl fmt::Display for BoxModel<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxModel::Perfect => f.write_str("perfect"),
            BoxModel::Noisy(p) => write!(f, "noisy:{p}"),
            BoxModel::LocalDeterministic { alice, bob } => {
                write!(f, "local:{},{}", alice.token(), bob.token())
            }
            BoxModel::Classical => f.write_str("classical"),
            BoxModel::Quantum(q) if q.is_canonical() => f.write_str("quantum"),
            BoxModel::Quantum(q) => write!(
                f,
                "quantum:{},{},{},{}",
                q.alice_angles[0], q.alice_angles[1], q.bob_angles[0], q.bob_angles[1]
            ),
        }
    }
}

impl FromStr for BoxModel<f64> {
    type Err = Error;

    /// Accepts `perfect`, `noisy:<p>` (`<p>` may be `tsirelson`),
    /// `classical`, `local:<rule>,<rule>` and `quantum[:a0,a1,b0,b1]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidModel(format!("`{s}`: {msg}"));
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg.trim())),
            None => (s.trim(), None),
        };
        match (name, arg) {
            ("perfect", None) => Ok(BoxModel::Perfect),
            ("classical", None) => Ok(BoxModel::Classical),
            ("quantum", None) => Ok(BoxModel::canonical_quantum()),
            ("noisy", Some(p)) => {
                let p = match p {
                    "tsirelson" | "℘" => (2.0 + std::f64::consts::SQRT_2) / 4.0,
                    other => other.parse::<f64>().map_err(|_| bad("correctness is not a number"))?,
                };
                BoxModel::noisy(p)
            }
            ("local", Some(rules)) => {
                let (a, b) = rules.split_once(',').ok_or_else(|| bad("expected two rules"))?;
                let alice = LocalRule::parse(a.trim()).ok_or_else(|| bad("unknown rule"))?;
                let bob = LocalRule::parse(b.trim()).ok_or_else(|| bad("unknown rule"))?;
                Ok(BoxModel::LocalDeterministic { alice, bob })
            }
            ("quantum", Some(angles)) => {
                let values: Vec<f64> = angles
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("angles must be numbers"))?;
                let [a0, a1, b0, b1] = values[..] else {
                    return Err(bad("expected four angles"));
                };
                BoxModel::quantum([a0, a1], [b0, b1])
            }
            _ => Err(bad("unknown model")),
        }
    }
}
