use thiserror::Error;

use crate::party::Party;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("box {id} has already been used by {party}")]
    BoxReused { id: u32, party: Party },

    #[error("truth table has {actual} entries, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} {value} exceeds the guard of {max}")]
    ArityGuard {
        what: &'static str,
        value: u32,
        max: u32,
    },

    #[error("randomness space of 2^{bits} atoms exceeds the full-enumeration limit of 2^{max}")]
    RandomnessSpaceTooLarge { bits: u64, max: u32 },

    #[error("protocol `{0}` declares no independence structure for compositional evaluation")]
    CompositionUnavailable(String),

    #[error("protocol needs {needed} randomness substreams but the source provides {available}")]
    InsufficientRandomness { needed: u64, available: u64 },

    #[error("protocol needs {needed} box instances but {available} were provided")]
    InsufficientBoxes { needed: u64, available: u64 },

    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{name} = {value} does not exceed the threshold {threshold}")]
    BelowThreshold {
        name: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("invalid box model: {0}")]
    InvalidModel(String),

    #[error("circuit line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
