//! Nonlocal boxes and the two-party protocols that use them.
//!
//! The crate simulates imperfect nonlocal boxes (perfect, noisy, classical,
//! quantum), builds distributed AND / equality / majority gates from pairs
//! of boxes, amplifies the bias of arbitrary Boolean functions with trees
//! of noisy majority gates, and checks every success probability three
//! ways: exact enumeration, Monte Carlo sampling and closed forms.
//!
//! Probabilities are generic over [`Scalar`]; [`Prob`] is the everyday
//! `f64` instantiation and [`ExactProb`] the rational one.

pub mod analysis;
pub mod bits;
pub mod boxes;
pub mod circuits;
pub mod engines;
pub mod error;
pub mod function;
pub mod party;
pub mod protocols;
pub mod random;
pub mod scalar;

pub use bits::{db_not, db_value, db_xor, Bit, DistributedBit};
pub use boxes::{
    behavior, best_local_deterministic, box_success, check_no_signalling, check_no_signalling_behavior,
    quantum_behavior, BoxBehavior, BoxInstance, BoxModel, LocalRule, NoSignallingReport, QuantumStrategy,
};
pub use circuits::{
    build_ip_circuit, eval_circuit, ip_decay_experiment, parse_circuit, CircuitProtocol, DecayConfig, DecayEngine, DecayMethod,
    DecayRow, DistributedCircuit, Gate, Source,
};
pub use engines::{
    cross_check, exact_success, sample_success, ExactMode, ExactResult, InputSelection, SampleConfig, SampleResult,
};
pub use error::{Error, Result};
pub use function::{and2, equality, inner_product, make_function, random_function, xor2, BooleanFunction};
pub use party::{Party, PartyContext, Phase, Transcript};
pub use protocols::{execute, AmplificationSpec, Protocol, ProtocolRun};
pub use random::{CounterSource, RandomSource, SharedRandomness};
pub use scalar::Scalar;

/// Floating-point probability.
pub type Prob = f64;
/// Exact rational probability.
pub type ExactProb = num_rational::BigRational;

pub type Model = BoxModel<Prob>;
pub type ExactModel = BoxModel<ExactProb>;
pub type Behavior = BoxBehavior<Prob>;
pub type ExactBehavior = BoxBehavior<ExactProb>;
pub type Exact = ExactResult<Prob>;
pub type RationalExact = ExactResult<ExactProb>;
pub type Spec = AmplificationSpec<Prob>;
