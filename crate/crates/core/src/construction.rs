//! The inductive construction of unique representation bases.
//!
//! Starting from `A_1 = {0, 1}`, each step picks `c_k >= d_k` and adds two
//! elements of absolute value greater than `d_k`: `{b_k + 3c_k, -3c_k}` when
//! `b_k` is missing from `2A_k`, otherwise `{-(b_k + 3c_k), 3c_k}`. Every
//! intermediate set has `r(n) <= 1` for all `n`, and `A_{2k}` represents every
//! `|n| <= k`.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::growth::{GrowthError, GrowthSpec};
use crate::intset::{IntSet, SetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("number of steps must be at least 1")]
    InvalidStepCount,
    #[error("step {k}: c = {c} is below d = {d}")]
    CBelowD { k: u64, c: BigInt, d: BigInt },
    #[error("explicit c-list has {got} entries but {needed} are required")]
    ExplicitTooShort { needed: usize, got: usize },
    #[error("step {k}: extension produced a repeated representation")]
    UniquenessViolated { k: u64 },
    #[error("trace has no steps")]
    EmptyTrace,
    #[error("x = {x} is below d_1 = {min}")]
    BelowRange { x: BigInt, min: BigInt },
    #[error("counting mismatch at x = {x}: direct {direct}, piecewise {formula}")]
    ProfileMismatch { x: BigInt, direct: usize, formula: usize },
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// One stage `(k, A_k, d_k, b_k, branch, c_k)` of the construction.
///
/// Fields are public so that traces read from disk can be represented as
/// found, valid or not; the oracle module checks them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionStep {
    pub k: u64,
    pub set: IntSet,
    /// `max |a|` over the set.
    pub d: BigInt,
    /// Least `b >= 1` with `b` or `-b` missing from the sumset.
    pub b: BigInt,
    /// True when `+b` is missing, so the step adds `{b + 3c, -3c}`.
    pub positive_branch: bool,
    /// Extension parameter; absent on a step that has not been extended.
    pub c: Option<BigInt>,
}

/// The two elements added by extending with parameter `c`.
pub fn new_elements(b: &BigInt, c: &BigInt, positive_branch: bool) -> (BigInt, BigInt) {
    let far: BigInt = b + 3 * c;
    let near: BigInt = 3 * c;
    if positive_branch {
        (far, -near)
    } else {
        (-far, near)
    }
}

impl ConstructionStep {
    /// `A_1 = {0, 1}` with `d_1 = b_1 = 1`.
    pub fn initial() -> Self {
        Self::from_set(1, IntSet::from_i64s(&[0, 1]), None)
            .expect("{0,1} is nonempty")
    }

    /// Derives `d`, `b` and the branch flag from the set itself.
    pub fn from_set(k: u64, set: IntSet, c: Option<BigInt>) -> Result<Self, SetError> {
        let d = set.max_abs()?;
        let missing = set.sumset(&set).min_abs_missing();
        Ok(Self {
            k,
            set,
            d,
            b: missing.value,
            positive_branch: missing.positive_missing,
            c,
        })
    }

    /// Extends with parameter `c`, checking uniqueness of the new sumset.
    pub fn extend(&self, c: &BigInt) -> Result<Self, ConstructionError> {
        self.extend_with(c, true)
    }

    /// Returns `A_{k+1}` built from this step with parameter `c`. The
    /// returned step has `c` unset; the caller records `c` on `self`.
    pub fn extend_with(&self, c: &BigInt, check_uniqueness: bool) -> Result<Self, ConstructionError> {
        if c < &self.d {
            return Err(ConstructionError::CBelowD {
                k: self.k,
                c: c.clone(),
                d: self.d.clone(),
            });
        }
        let (x, y) = new_elements(&self.b, c, self.positive_branch);
        let set = self.set.union(&[x, y].into_iter().collect());
        let k = self.k + 1;
        let sums = set.sumset(&set);
        let n = set.len();
        if check_uniqueness && sums.len() != n * (n + 1) / 2 {
            return Err(ConstructionError::UniquenessViolated { k });
        }
        let missing = sums.min_abs_missing();
        Ok(Self {
            k,
            d: &self.b + 3 * c,
            set,
            b: missing.value,
            positive_branch: missing.positive_missing,
            c: None,
        })
    }
}

/// The chain `A_1 ⊆ A_2 ⊆ ... ⊆ A_K` with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisTrace {
    pub steps: Vec<ConstructionStep>,
}

impl BasisTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first(&self) -> Option<&ConstructionStep> {
        self.steps.first()
    }

    pub fn last(&self) -> Option<&ConstructionStep> {
        self.steps.last()
    }

    /// The largest set in the trace.
    pub fn final_set(&self) -> Option<&IntSet> {
        self.steps.last().map(|s| &s.set)
    }

    /// True when every recorded `c_k` equals `d_k`.
    pub fn is_greedy(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.c.as_ref().is_none_or(|c| c == &s.d))
    }

    /// `A(-x, x)` for the final set, cross-checked against the piecewise
    /// formula: `2k` on `[d_k, 3c_k)` and `2k + 1` on `[3c_k, d_{k+1})`.
    pub fn counting_profile(&self, x: &BigInt) -> Result<usize, ConstructionError> {
        let first = self.first().ok_or(ConstructionError::EmptyTrace)?;
        if x < &first.d {
            return Err(ConstructionError::BelowRange {
                x: x.clone(),
                min: first.d.clone(),
            });
        }
        let last = self.last().expect("nonempty");
        let direct = last.set.counting_symmetric(x)?;
        if let Some(formula) = self.piecewise_count(x) {
            if formula != direct {
                return Err(ConstructionError::ProfileMismatch {
                    x: x.clone(),
                    direct,
                    formula,
                });
            }
        }
        Ok(direct)
    }

    /// The piecewise counting formula, when `x` lies in a range it covers.
    fn piecewise_count(&self, x: &BigInt) -> Option<usize> {
        let last = self.last()?;
        if x >= &last.d {
            return Some(last.set.len());
        }
        let pos = self.steps.partition_point(|s| &s.d <= x);
        let step = &self.steps[pos.checked_sub(1)?];
        let c = step.c.as_ref()?;
        let k = step.k as usize;
        Some(if x < &(3 * c) { 2 * k } else { 2 * k + 1 })
    }
}

/// Options for the drivers.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Re-check `r(n) <= 1` after every extension.
    pub check_uniqueness: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            check_uniqueness: true,
        }
    }
}

/// `K` steps of the greedy construction, `c_k = d_k`.
pub fn run_greedy(steps: usize) -> Result<BasisTrace, ConstructionError> {
    run_with_growth(&GrowthSpec::Greedy, steps)
}

pub fn run_with_growth(spec: &GrowthSpec, steps: usize) -> Result<BasisTrace, ConstructionError> {
    run_with_options(spec, steps, RunOptions::default())
}

/// Runs `steps` steps, choosing each `c_k` according to `spec`.
pub fn run_with_options(
    spec: &GrowthSpec,
    steps: usize,
    opts: RunOptions,
) -> Result<BasisTrace, ConstructionError> {
    if steps == 0 {
        return Err(ConstructionError::InvalidStepCount);
    }
    if let GrowthSpec::ExplicitC(cs) = spec {
        if cs.len() < steps - 1 {
            return Err(ConstructionError::ExplicitTooShort {
                needed: steps - 1,
                got: cs.len(),
            });
        }
    }
    let mut out = Vec::with_capacity(steps);
    let mut cur = ConstructionStep::initial();
    while out.len() + 1 < steps {
        let c = choose_c(spec, &cur)?;
        let next = cur.extend_with(&c, opts.check_uniqueness)?;
        cur.c = Some(c);
        out.push(cur);
        cur = next;
    }
    out.push(cur);
    Ok(BasisTrace { steps: out })
}

fn choose_c(spec: &GrowthSpec, step: &ConstructionStep) -> Result<BigInt, ConstructionError> {
    match spec {
        GrowthSpec::Greedy => Ok(step.d.clone()),
        GrowthSpec::ExplicitC(cs) => Ok(cs[(step.k - 1) as usize].clone()),
        GrowthSpec::Threshold(t) => {
            let target = 2 * step.k + 2;
            let floor = t.threshold(target)?;
            Ok(floor.max(step.d.clone()))
        }
    }
}

/// `(3^k - 1) / 2` and `(3 * 5^k + 5) / 20`, the exact envelope of greedy `c_k`.
pub fn greedy_envelope(k: u32) -> (BigInt, BigInt) {
    let three = BigInt::from(3);
    let lower = (three.pow(k) - BigInt::one()) / 2;
    let upper = (BigInt::from(3) * BigInt::from(5).pow(k) + 5) / 20;
    (lower, upper)
}
