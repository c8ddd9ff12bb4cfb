//! Density bounds for sets with bounded representation functions.
//!
//! Each check reports the bound as a real number for display, but decides
//! `holds` in exact integer arithmetic by clearing the logarithms and square
//! roots, so a rounding error can never turn a violation into a pass:
//!
//! * `2 ln x / ln 5 + 2 (1 - ln 3 / ln 5) <= m`  iff  `x^2 <= 9 * 5^(m-2)`
//! * `m <= 2 ln x / ln 3 + 2`                    iff  `3^(m-2) <= x^2`
//! * `m <= sqrt(8 r x)`                          iff  `m^2 <= 8 r x`
//! * `2 sqrt(x) - 1 <= m`                        iff  `4x <= (m+1)^2`
//! * `m <= 2 sqrt(r x)`                          iff  `m^2 <= 4 r x`

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::construction::{greedy_envelope, BasisTrace, ConstructionError};
use crate::intset::ln_big;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("{name}: x = {x} is outside the range x >= {min}")]
    OutOfRange { name: &'static str, x: BigInt, min: BigInt },
    #[error("{name}: parameter {param} must be positive")]
    NonPositive { name: &'static str, param: &'static str },
    #[error("sample x = {x} is outside [{lo}, {hi}]")]
    SampleOutOfRange { x: BigInt, lo: BigInt, hi: BigInt },
    #[error("trace has no steps")]
    EmptyTrace,
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

/// Which inequality a [`BoundCheck`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Logarithmic envelope of the greedy basis on `A(-x, x)`.
    GreedyLog,
    /// `A(-x, x) <= sqrt(8 r x)`.
    SymmetricSqrt,
    /// `A(0, x) >= 2 sqrt(x) - 1` for asymptotic bases of the nonnegatives.
    HalfLineLower,
    /// `A(0, x) <= 2 sqrt(r x)`.
    HalfLineUpper,
    /// `(3^k - 1)/2 <= c_k <= (3 * 5^k + 5)/20`; here `x` is `k`.
    GreedyEnvelope,
    /// `A(-x, x) <= f(x)` for a growth function `f`.
    GrowthCap,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::GreedyLog => "greedy-log",
            BoundKind::SymmetricSqrt => "symmetric-sqrt",
            BoundKind::HalfLineLower => "half-line-lower",
            BoundKind::HalfLineUpper => "half-line-upper",
            BoundKind::GreedyEnvelope => "greedy-envelope",
            BoundKind::GrowthCap => "growth-cap",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub x: BigInt,
    pub observed: BigInt,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub holds: bool,
}

fn require_at_least(name: &'static str, x: &BigInt, min: &BigInt) -> Result<(), BoundError> {
    if x < min {
        return Err(BoundError::OutOfRange {
            name,
            x: x.clone(),
            min: min.clone(),
        });
    }
    Ok(())
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `2 ln x / ln 5 + 2 (1 - ln 3 / ln 5) <= A(-x,x) <= 2 ln x / ln 3 + 2`.
pub fn greedy_log_bounds(x: &BigInt, observed: u64) -> Result<BoundCheck, BoundError> {
    let name = BoundKind::GreedyLog.label();
    require_at_least(name, x, &BigInt::one())?;
    let (ln3, ln5) = (3f64.ln(), 5f64.ln());
    let lx = ln_big(x);
    let lower = 2.0 * lx / ln5 + 2.0 * (1.0 - ln3 / ln5);
    let upper = 2.0 * lx / ln3 + 2.0;

    let x2 = x * x;
    let lower_ok = if observed >= 2 {
        x2 <= BigInt::from(9) * BigInt::from(5).pow(observed as u32 - 2)
    } else {
        &x2 * BigInt::from(5).pow(2 - observed as u32) <= BigInt::from(9)
    };
    let upper_ok = observed < 2 || BigInt::from(3).pow(observed as u32 - 2) <= x2;
    Ok(BoundCheck {
        kind: BoundKind::GreedyLog,
        x: x.clone(),
        observed: observed.into(),
        lower: Some(lower),
        upper: Some(upper),
        holds: lower_ok && upper_ok,
    })
}

/// `A(-x, x) <= sqrt(8 r x)` for `x >= r`.
pub fn symmetric_sqrt_bound(r: u64, x: &BigInt, observed: u64) -> Result<BoundCheck, BoundError> {
    let name = BoundKind::SymmetricSqrt.label();
    if r == 0 {
        return Err(BoundError::NonPositive { name, param: "r" });
    }
    require_at_least(name, x, &BigInt::from(r))?;
    let limit = BigInt::from(8 * r) * x;
    let obs = BigInt::from(observed);
    Ok(BoundCheck {
        kind: BoundKind::SymmetricSqrt,
        x: x.clone(),
        upper: Some(sqrt_f64(&limit)),
        holds: &obs * &obs <= limit,
        observed: obs,
        lower: None,
    })
}

/// The two half-line bounds on `A(0, x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfLineMode {
    /// `A(0, x) >= 2 sqrt(x) - 1` for `x >= n0^2`, when every `n > n0` is
    /// represented.
    Lower { n0: BigInt },
    /// `A(0, x) <= 2 sqrt(r x)` for `x >= 1`, when `r(n) <= r`.
    Upper { r: u64 },
}

pub fn half_line_bounds(mode: &HalfLineMode, x: &BigInt, observed: u64) -> Result<BoundCheck, BoundError> {
    let obs = BigInt::from(observed);
    match mode {
        HalfLineMode::Lower { n0 } => {
            let name = BoundKind::HalfLineLower.label();
            require_at_least(name, x, &(n0 * n0))?;
            let plus_one = &obs + 1;
            Ok(BoundCheck {
                kind: BoundKind::HalfLineLower,
                x: x.clone(),
                lower: Some(2.0 * sqrt_f64(x) - 1.0),
                upper: None,
                holds: BigInt::from(4) * x <= &plus_one * &plus_one,
                observed: obs,
            })
        }
        HalfLineMode::Upper { r } => {
            let name = BoundKind::HalfLineUpper.label();
            if *r == 0 {
                return Err(BoundError::NonPositive { name, param: "r" });
            }
            require_at_least(name, x, &BigInt::one())?;
            let limit = BigInt::from(4 * r) * x;
            Ok(BoundCheck {
                kind: BoundKind::HalfLineUpper,
                x: x.clone(),
                lower: None,
                upper: Some(sqrt_f64(&limit)),
                holds: &obs * &obs <= limit,
                observed: obs,
            })
        }
    }
}

/// `(3^k - 1)/2 <= c <= (3 * 5^k + 5)/20` in exact arithmetic.
pub fn k_envelope(k: u64, c: &BigInt) -> Result<BoundCheck, BoundError> {
    let name = BoundKind::GreedyEnvelope.label();
    if k == 0 {
        return Err(BoundError::NonPositive { name, param: "k" });
    }
    if !c.is_positive() {
        return Err(BoundError::NonPositive { name, param: "c" });
    }
    let (lo, hi) = greedy_envelope(k as u32);
    Ok(BoundCheck {
        kind: BoundKind::GreedyEnvelope,
        x: k.into(),
        observed: c.clone(),
        lower: Some(to_f64(&lo)),
        upper: Some(to_f64(&hi)),
        holds: &lo <= c && c <= &hi,
    })
}

/// Relative tolerance subtracted from an inexact `f(x)` before comparing, so
/// that double-precision error in `f` cannot produce a spurious pass.
pub const GROWTH_CAP_TOLERANCE: f64 = 1e-12;

/// `A(-x, x) <= f(x)` where `f_at_x` is the growth function's value at `x`.
/// Pass `exact = true` when `f_at_x` carries no rounding error.
pub fn growth_cap(f_at_x: f64, x: &BigInt, observed: u64, exact: bool) -> BoundCheck {
    let slack = if exact {
        0.0
    } else {
        GROWTH_CAP_TOLERANCE * f_at_x.abs().max(1.0)
    };
    BoundCheck {
        kind: BoundKind::GrowthCap,
        x: x.clone(),
        observed: observed.into(),
        lower: None,
        upper: Some(f_at_x),
        holds: f_at_x.is_finite() && (observed as f64) <= f_at_x - slack,
    }
}

fn sqrt_f64(x: &BigInt) -> f64 {
    if x.is_zero() {
        0.0
    } else {
        (0.5 * ln_big(x)).exp()
    }
}

/// Evaluates the applicable bounds of a trace at each sample `x`.
///
/// Samples must lie in `[d_1, 2 d_K]`. Every trace gets a
/// [`BoundKind::SymmetricSqrt`] row with `r = 1`; greedy traces also get a
/// [`BoundKind::GreedyLog`] row.
pub fn growth_report(trace: &BasisTrace, xs: &[BigInt]) -> Result<Vec<BoundCheck>, BoundError> {
    let first = trace.first().ok_or(BoundError::EmptyTrace)?;
    let last = trace.last().expect("nonempty");
    let (lo, hi) = (first.d.clone(), 2 * &last.d);
    let greedy = trace.is_greedy();
    let mut rows = Vec::new();
    for x in xs {
        if x < &lo || x > &hi {
            return Err(BoundError::SampleOutOfRange {
                x: x.clone(),
                lo,
                hi,
            });
        }
        let observed = trace.counting_profile(x)? as u64;
        if greedy {
            rows.push(greedy_log_bounds(x, observed)?);
        }
        rows.push(symmetric_sqrt_bound(1, x, observed)?);
    }
    Ok(rows)
}
