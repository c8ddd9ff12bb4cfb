//! Policies for choosing the extension parameter `c_k`.
//!
//! A growth function `f` with `f(x) -> infinity` only enters the slow-growth
//! construction through its thresholds `t(m)`, the least `x0` with
//! `f(x) >= m` for all `x >= x0`. [`Threshold`] supplies those, either from a
//! table or from one of the built-in logarithmic families.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::intset::ln_big;

/// Thresholds beyond this many bits are refused.
pub const MAX_THRESHOLD_BITS: u64 = 1 << 16;

/// Relative safety margin applied when locating a threshold in double
/// precision: `t(m)` is the least integer with `f(t) >= m (1 + margin)`.
pub const THRESHOLD_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrowthError {
    #[error("threshold table has no entry for target {target}")]
    TableExhausted { target: u64 },
    #[error("threshold table is not nondecreasing at entry {index}")]
    TableNotMonotone { index: usize },
    #[error("threshold for target {target} exceeds {MAX_THRESHOLD_BITS} bits")]
    TooLarge { target: u64 },
    #[error("growth function scale must be positive and finite, got {0}")]
    BadScale(String),
    #[error("cannot parse growth spec {spec:?}: {reason}")]
    Parse { spec: String, reason: String },
}

/// A threshold map `m -> t(m)` for even targets `m = 2k + 2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    /// `t(2k + 2) = table[k - 1]`.
    Table(Vec<BigInt>),
    /// `f(x) = scale * ln(x + shift) + offset`.
    Log { scale: f64, offset: f64, shift: f64 },
    /// `f(x) = scale * ln(ln(x + shift)) + offset`, with `f = -inf` where the
    /// inner logarithm is not positive.
    LogLog { scale: f64, offset: f64, shift: f64 },
}

impl Threshold {
    pub fn table(entries: Vec<BigInt>) -> Result<Self, GrowthError> {
        if let Some(i) = entries.windows(2).position(|w| w[0] > w[1]) {
            return Err(GrowthError::TableNotMonotone { index: i + 1 });
        }
        Ok(Threshold::Table(entries))
    }

    pub fn log(scale: f64, offset: f64, shift: f64) -> Result<Self, GrowthError> {
        check_scale(scale)?;
        Ok(Threshold::Log { scale, offset, shift })
    }

    pub fn log_log(scale: f64, offset: f64, shift: f64) -> Result<Self, GrowthError> {
        check_scale(scale)?;
        Ok(Threshold::LogLog { scale, offset, shift })
    }

    /// Evaluates `f(x)`.
    ///
    /// For a table the value is the step function implied by the thresholds:
    /// the largest `2k + 2` whose threshold is at most `x`, and `0` below the
    /// first entry.
    pub fn eval(&self, x: &BigInt) -> f64 {
        match self {
            Threshold::Table(entries) => {
                let reached = entries.partition_point(|t| t <= x);
                if reached == 0 {
                    0.0
                } else {
                    (2 * reached + 2) as f64
                }
            }
            Threshold::Log { scale, offset, shift } => {
                scale * ln_shifted(x, *shift) + offset
            }
            Threshold::LogLog { scale, offset, shift } => {
                let inner = ln_shifted(x, *shift);
                if inner <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    scale * inner.ln() + offset
                }
            }
        }
    }

    /// True when [`Threshold::eval`] is exact (integer-valued).
    pub fn is_exact(&self) -> bool {
        matches!(self, Threshold::Table(_))
    }

    /// `t(target)`: the least nonnegative integer from which `f` stays at or
    /// above `target`.
    pub fn threshold(&self, target: u64) -> Result<BigInt, GrowthError> {
        match self {
            Threshold::Table(entries) => {
                let idx = (target.saturating_sub(2) / 2).checked_sub(1);
                idx.and_then(|i| entries.get(i as usize))
                    .cloned()
                    .ok_or(GrowthError::TableExhausted { target })
            }
            _ => {
                let goal = target as f64 * (1.0 + THRESHOLD_MARGIN);
                self.search(goal)
                    .ok_or(GrowthError::TooLarge { target })
            }
        }
    }

    fn search(&self, goal: f64) -> Option<BigInt> {
        let ok = |x: &BigInt| self.eval(x) >= goal;
        if ok(&BigInt::zero()) {
            return Some(BigInt::zero());
        }
        let pow2 = |p: u64| BigInt::one() << p;
        // least p with ok(2^p): gallop, then bisect on the exponent
        let (mut p_lo, mut p_hi) = (0u64, 0u64);
        while !ok(&pow2(p_hi)) {
            p_lo = p_hi;
            p_hi = if p_hi == 0 { 1 } else { p_hi * 2 };
            if p_hi >= MAX_THRESHOLD_BITS {
                if ok(&pow2(MAX_THRESHOLD_BITS - 1)) {
                    p_hi = MAX_THRESHOLD_BITS - 1;
                    break;
                }
                return None;
            }
        }
        while p_hi - p_lo > 1 {
            let mid = (p_lo + p_hi) / 2;
            if ok(&pow2(mid)) {
                p_hi = mid;
            } else {
                p_lo = mid;
            }
        }
        let mut hi = pow2(p_hi);
        if p_hi == 0 {
            return Some(hi);
        }
        let mut lo = pow2(p_lo);
        // invariant: !ok(lo), ok(hi)
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if ok(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

fn check_scale(scale: f64) -> Result<(), GrowthError> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(GrowthError::BadScale(scale.to_string()))
    }
}

/// `ln(x + shift)`, evaluated without losing the magnitude of `x`.
fn ln_shifted(x: &BigInt, shift: f64) -> f64 {
    if shift.fract() == 0.0 && shift.abs() < 1e15 {
        return ln_big(&(x + BigInt::from(shift as i64)));
    }
    if x.bits() > 60 {
        // shift is negligible at this magnitude
        return ln_big(x);
    }
    let v = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN) + shift;
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Table(entries) => {
                f.write_str("table:")?;
                write_list(f, entries)
            }
            Threshold::Log { scale, offset, shift } => {
                write!(f, "log:{scale},{offset},{shift}")
            }
            Threshold::LogLog { scale, offset, shift } => {
                write!(f, "loglog:{scale},{offset},{shift}")
            }
        }
    }
}

impl FromStr for Threshold {
    type Err = GrowthError;

    /// Accepts `table:T1,T2,...`, `log:SCALE[,OFFSET[,SHIFT]]` and
    /// `loglog:SCALE[,OFFSET[,SHIFT]]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| GrowthError::Parse {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let (family, params) = s.split_once(':').ok_or_else(|| err("missing ':'"))?;
        match family {
            "table" => Threshold::table(parse_int_list(params).map_err(|r| err(&r))?),
            "log" | "loglog" => {
                let nums = params
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| err(&e.to_string()))?;
                if nums.is_empty() || nums.len() > 3 || nums.iter().any(|v| !v.is_finite()) {
                    return Err(err("expected SCALE[,OFFSET[,SHIFT]]"));
                }
                let get = |i: usize| nums.get(i).copied().unwrap_or(0.0);
                if family == "log" {
                    Threshold::log(get(0), get(1), get(2))
                } else {
                    Threshold::log_log(get(0), get(1), get(2))
                }
            }
            _ => Err(err("unknown family")),
        }
    }
}

/// How the extension parameter `c_k` is chosen at each step.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthSpec {
    /// `c_k = d_k`.
    Greedy,
    /// `c_k` taken from the list, one entry per extension.
    ExplicitC(Vec<BigInt>),
    /// `c_k = max(d_k, t(2k + 2))`.
    Threshold(Threshold),
}

impl fmt::Display for GrowthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthSpec::Greedy => f.write_str("greedy"),
            GrowthSpec::ExplicitC(cs) => {
                f.write_str("c-list:")?;
                write_list(f, cs)
            }
            GrowthSpec::Threshold(t) => write!(f, "threshold:{t}"),
        }
    }
}

impl FromStr for GrowthSpec {
    type Err = GrowthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "greedy" {
            return Ok(GrowthSpec::Greedy);
        }
        if let Some(rest) = s.strip_prefix("c-list:") {
            return parse_int_list(rest)
                .map(GrowthSpec::ExplicitC)
                .map_err(|reason| GrowthError::Parse {
                    spec: s.to_string(),
                    reason,
                });
        }
        if let Some(rest) = s.strip_prefix("threshold:") {
            return rest.parse().map(GrowthSpec::Threshold);
        }
        Err(GrowthError::Parse {
            spec: s.to_string(),
            reason: "expected greedy, c-list:... or threshold:...".into(),
        })
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, values: &[BigInt]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Parses a comma- or whitespace-separated list of decimal integers,
/// optionally wrapped in brackets. The empty list is allowed.
pub fn parse_int_list(s: &str) -> Result<Vec<BigInt>, String> {
    let body = s.trim();
    let body = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .unwrap_or(body);
    body.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| format!("not an integer: {t:?}")))
        .collect()
}
