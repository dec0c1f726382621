use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Probability scalar shared by box models, behaviors and the exact engine.
///
/// Only ring operations and division are required, so exact rationals work
/// alongside `f32`/`f64`. Transcendental work (quantum amplitudes, square
/// roots in closed forms) happens in `f64` and is converted with
/// [`FromPrimitive::from_f64`].
pub trait Scalar:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_u64(num).expect("numerator representable")
            / Self::from_u64(den).expect("denominator representable")
    }

    /// `1 / 2^bits`.
    fn dyadic(bits: u32) -> Self {
        let mut w = Self::one();
        for _ in 0..bits {
            w = w * Self::half();
        }
        w
    }

    fn complement(&self) -> Self {
        Self::one() - self.clone()
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts an `f64` parameter, panicking only for non-finite input.
    fn lift(value: f64) -> Self {
        Self::from_f64(value).expect("finite value")
    }
}

impl<T> Scalar for T where
    T: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
}

pub(crate) fn min_of<S: Scalar>(values: impl IntoIterator<Item = S>) -> Option<S> {
    values.into_iter().fold(None, |acc, v| match acc {
        Some(m) if m <= v => Some(m),
        _ => Some(v),
    })
}

pub(crate) fn max_of<S: Scalar>(values: impl IntoIterator<Item = S>) -> Option<S> {
    values.into_iter().fold(None, |acc, v| match acc {
        Some(m) if m >= v => Some(m),
        _ => Some(v),
    })
}
