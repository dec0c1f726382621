//! Closed forms for box composition, majority amplification and the
//! triviality threshold.
//!
//! Ring-only formulas (`h`, the XOR-chain law) are generic over [`Scalar`]
//! so the exact engine can evaluate them in rational arithmetic. Formulas
//! with square roots are generic over [`Float`].

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn c<F: Float>(v: f64) -> F {
    F::from(v).expect("constant representable")
}

fn five_sixths<F: Float>() -> F {
    c::<F>(5.0) / c(6.0)
}

fn approx<F: Float>(v: F) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn domain<F: Float>(name: &'static str, value: F, domain: &'static str) -> Error {
    Error::Domain {
        name,
        value: approx(value),
        domain,
    }
}

/// `(3 + √6) / 6`: box correctness above which majority amplification works.
pub fn threshold<F: Float>() -> F {
    (c::<F>(3.0) + c::<F>(6.0).sqrt()) / c(6.0)
}

/// `cos²(π/8) = (2 + √2) / 4`.
pub fn tsirelson<F: Float>() -> F {
    (c::<F>(2.0) + c::<F>(2.0).sqrt()) / c(4.0)
}

pub fn classical_bound<F: Float>() -> F {
    c(0.75)
}

/// Success of a two-box gate whose boxes each work with probability `p`:
/// correct iff both or neither box errs, `p² + (1 − p)²`.
pub fn q_of_p<F: Float>(p: F) -> Result<F> {
    if !(p >= c(0.5) && p <= F::one()) {
        return Err(domain("p", p, "[1/2, 1]"));
    }
    Ok(p * p + (F::one() - p) * (F::one() - p))
}

/// One layer of noisy ternary majority over three independent copies
/// correct with probability `p`, with a gate correct with probability `q`.
pub fn h_unchecked<S: Scalar>(p: S, q: S) -> S {
    let three = S::from_u64(3).expect("3");
    let not_p = p.complement();
    let majority_right = p.clone() * p.clone() * p.clone() + three.clone() * p.clone() * p.clone() * not_p.clone();
    let majority_wrong = three * p * not_p.clone() * not_p.clone() + not_p.clone() * not_p.clone() * not_p;
    q.clone() * majority_right + q.complement() * majority_wrong
}

pub fn h<S: Scalar>(p: S, q: S) -> Result<S> {
    for (name, v) in [("p", &p), ("q", &q)] {
        if !(*v >= S::zero() && *v <= S::one()) {
            return Err(Error::Domain {
                name,
                value: v.approx(),
                domain: "[0, 1]",
            });
        }
    }
    Ok(h_unchecked(p, q))
}

/// `p0, h(p0), h(h(p0)), …` with `depth` applications, no preconditions.
pub fn h_iterates<S: Scalar>(p0: S, q: S, depth: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(depth + 1);
    let mut p = p0;
    out.push(p.clone());
    for _ in 0..depth {
        p = h_unchecked(p, q.clone());
        out.push(p.clone());
    }
    out
}

/// Limit of iterated amplification for a majority gate correct with
/// probability `q > 5/6`: `1/2 + 3√δ / (2√(1 + 3δ))` with `δ = q − 5/6`.
pub fn fixed_point_s<F: Float>(q: F) -> Result<F> {
    if q > F::one() || q.is_nan() {
        return Err(domain("q", q, "(5/6, 1]"));
    }
    if q <= five_sixths() {
        return Err(Error::BelowThreshold {
            name: "q",
            value: approx(q),
            threshold: 5.0 / 6.0,
        });
    }
    let delta = q - five_sixths();
    let three = c::<F>(3.0);
    Ok(c::<F>(0.5) + three * delta.sqrt() / (c::<F>(2.0) * (F::one() + three * delta).sqrt()))
}

/// Success reachable with one bit of communication when boxes work with
/// probability `p`: `1/2 + √(3p² − 3p + 1/4) / (2p − 1)`.
pub fn final_success<F: Float>(p: F) -> Result<F> {
    if p > F::one() || p.is_nan() {
        return Err(domain("p", p, "((3+√6)/6, 1]"));
    }
    if p <= threshold() {
        return Err(Error::BelowThreshold {
            name: "p",
            value: approx(p),
            threshold: approx(threshold::<F>()),
        });
    }
    let three = c::<F>(3.0);
    let radicand = three * p * p - three * p + c(0.25);
    Ok(c::<F>(0.5) + radicand.sqrt() / (c::<F>(2.0) * p - F::one()))
}

/// Iterates `h(·, q)` from `p0`, requiring `q > 5/6` and `1/2 < p0 ≤ s`.
/// The result has `depth + 1` entries.
pub fn iterate_h<F: Float + Scalar>(p0: F, q: F, depth: usize) -> Result<Vec<F>> {
    let s = fixed_point_s(q)?;
    if !(p0 > c(0.5) && p0 <= s) {
        return Err(domain("p0", p0, "(1/2, s]"));
    }
    Ok(h_iterates(p0, q, depth))
}

/// Bits any entanglement-assisted protocol must send to compute the
/// `n`-bit inner product with success `p`:
/// `max((2p − 1)²/2, (2p − 1)⁴)·n − 1/2`.
pub fn ip_lower_bound<F: Float>(p: F, n: u32) -> Result<F> {
    if !(p > c(0.5) && p <= F::one()) {
        return Err(domain("p", p, "(1/2, 1]"));
    }
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    let bias = c::<F>(2.0) * p - F::one();
    let b2 = bias * bias;
    let rate = (b2 / c(2.0)).max(b2 * b2);
    Ok(rate * c(f64::from(n)) - c(0.5))
}

/// Success of a value XORed with the independent errors of `count` gates,
/// each correct with probability `gate`: `1/2 + (2g − 1)^k / 2`.
pub fn xor_chain_success<S: Scalar>(gate: S, count: usize) -> S {
    let bias = gate.clone() + gate - S::one();
    let product = (0..count).fold(S::one(), |acc, _| acc * bias.clone());
    S::half() + S::half() * product
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationParams<F> {
    pub p: F,
    pub q: F,
    /// `q − 5/6`, present only above the threshold.
    pub delta: Option<F>,
    pub s: Option<F>,
}

impl<F: Float> AmplificationParams<F> {
    pub fn new(p: F, q: F) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v >= c(0.5) && v <= F::one()) {
                return Err(domain(name, v, "[1/2, 1]"));
            }
        }
        let s = fixed_point_s(q).ok();
        Ok(AmplificationParams {
            p,
            q,
            delta: s.map(|_| q - five_sixths()),
            s,
        })
    }

    /// Parameters when every box works with probability `p_box`.
    pub fn from_box(leaf: F, p_box: F) -> Result<Self> {
        AmplificationParams::new(leaf, q_of_p(p_box)?)
    }
}
