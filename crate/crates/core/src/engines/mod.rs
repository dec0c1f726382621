//! Verification engines: exact enumeration and seeded Monte Carlo sampling
//! over the same [`Protocol`](crate::protocols::Protocol) interface.

mod cross;
mod exact;
mod sample;

pub use cross::{cross_check, cross_check_against, CrossCheckLine, CrossCheckReport, SIGMA_BOUND};
pub use exact::{exact_success, Enumerator, ExactMode, ExactResult, FULL_ENUMERATION_LIMIT_BITS};
pub use sample::{sample_success, InputSelection, SampleConfig, SampleResult};
