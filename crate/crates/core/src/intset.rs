//! Finite sets of arbitrary-precision integers and the additive operations
//! used by the basis constructions: sumsets, translations, representation
//! counts and counting functions.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("invalid range: lower end {lo} exceeds upper end {hi}")]
    InvalidRange { lo: BigInt, hi: BigInt },
    #[error("operation is undefined on the empty set")]
    Empty,
    #[error("elements are not strictly ascending at position {index}")]
    NotAscending { index: usize },
}

/// A finite set of integers stored as a strictly ascending vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntSet {
    elems: Vec<BigInt>,
}

/// Result of [`IntSet::min_abs_missing`]: the least `b >= 1` such that `b` or
/// `-b` is absent, and whether `+b` itself is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingAbs {
    pub value: BigInt,
    pub positive_missing: bool,
}

impl IntSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from a vector that must already be strictly ascending.
    pub fn from_ascending(elems: Vec<BigInt>) -> Result<Self, SetError> {
        if let Some(i) = elems.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SetError::NotAscending { index: i + 1 });
        }
        Ok(Self { elems })
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.elems.iter()
    }

    pub fn min(&self) -> Option<&BigInt> {
        self.elems.first()
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.elems.last()
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        self.elems.binary_search(n).is_ok()
    }

    /// `{a + b : a in self, b in other}`.
    pub fn sumset(&self, other: &IntSet) -> IntSet {
        let mut sums = Vec::with_capacity(self.len() * other.len());
        for a in &self.elems {
            for b in &other.elems {
                sums.push(a + b);
            }
        }
        sums.sort_unstable();
        sums.dedup();
        IntSet { elems: sums }
    }

    /// `{a + c : a in self}`; order is preserved.
    pub fn translate(&self, c: &BigInt) -> IntSet {
        IntSet {
            elems: self.elems.iter().map(|a| a + c).collect(),
        }
    }

    /// `{-a : a in self}`.
    pub fn negate(&self) -> IntSet {
        IntSet {
            elems: self.elems.iter().rev().map(|a| -a).collect(),
        }
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elems, &other.elems);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IntSet { elems: out }
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.elems.iter().all(|a| other.contains(a))
    }

    /// Number of pairs `a <= a'` from the set with `a + a' = n`.
    ///
    /// Two-pointer scan over the sorted elements.
    pub fn rep_count(&self, n: &BigInt) -> u64 {
        let e = &self.elems;
        if e.is_empty() {
            return 0;
        }
        let (mut i, mut j) = (0usize, e.len() - 1);
        let mut count = 0;
        while i <= j {
            let s = &e[i] + &e[j];
            match s.cmp(n) {
                std::cmp::Ordering::Equal => {
                    count += 1;
                    if j == 0 {
                        break;
                    }
                    i += 1;
                    j -= 1;
                }
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                }
            }
        }
        count
    }

    /// True iff every `n` has at most one representation, i.e. the number of
    /// distinct sums equals the number of pairs `a <= a'`.
    pub fn has_unique_sums(&self) -> bool {
        let n = self.len();
        self.sumset(self).len() == n * (n + 1) / 2
    }

    /// Number of elements in `[lo, hi]`.
    pub fn counting(&self, lo: &BigInt, hi: &BigInt) -> Result<usize, SetError> {
        if lo > hi {
            return Err(SetError::InvalidRange {
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        let start = self.elems.partition_point(|a| a < lo);
        let end = self.elems.partition_point(|a| a <= hi);
        Ok(end - start)
    }

    /// `A(-x, x)`: the number of elements with `|a| <= x`.
    pub fn counting_symmetric(&self, x: &BigInt) -> Result<usize, SetError> {
        self.counting(&-x, x)
    }

    pub fn max_abs(&self) -> Result<BigInt, SetError> {
        match (self.elems.first(), self.elems.last()) {
            (Some(lo), Some(hi)) => Ok(lo.abs().max(hi.abs())),
            _ => Err(SetError::Empty),
        }
    }

    /// Least `b >= 1` with `b` or `-b` not in the set.
    ///
    /// When both are missing the positive side is reported. The loop runs at
    /// most `len() + 1` times: every `v < b` with `v >= 1` contributes two
    /// members.
    pub fn min_abs_missing(&self) -> MissingAbs {
        let mut b = BigInt::one();
        loop {
            let pos = self.contains(&b);
            let neg = self.contains(&-&b);
            if !pos || !neg {
                return MissingAbs {
                    value: b,
                    positive_missing: !pos,
                };
            }
            b += 1;
        }
    }
}

impl FromIterator<BigInt> for IntSet {
    fn from_iter<T: IntoIterator<Item = BigInt>>(iter: T) -> Self {
        let mut elems: Vec<BigInt> = iter.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        IntSet { elems }
    }
}

impl<'a> IntoIterator for &'a IntSet {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// Natural logarithm of a positive big integer in double precision.
///
/// Returns negative infinity for `x <= 0`.
pub fn ln_big(x: &BigInt) -> f64 {
    if !x.is_positive() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(x).map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    let top = num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
