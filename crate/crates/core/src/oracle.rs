//! Brute-force verification of constructed traces.
//!
//! Everything here works from exhaustive enumeration of the pairs `a <= a'`
//! and never calls the sumset or representation-count code in
//! [`crate::intset`], so a bug there cannot hide itself. The one exception is
//! [`cross_check`], whose job is to compare the two.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::construction::{new_elements, BasisTrace, ConstructionStep};
use crate::intset::IntSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("invalid window: {lo} > {hi}")]
    InvalidRange { lo: BigInt, hi: BigInt },
    #[error("step {k} records no extension parameter c")]
    MissingC { k: u64 },
    #[error("step {k}: c = {c} is below d = {d}; not a valid extension")]
    CBelowD { k: u64, c: BigInt, d: BigInt },
    #[error("steps {prev} and {next} are not consecutive")]
    NotConsecutive { prev: u64, next: u64 },
    #[error("trace needs at least {needed} steps, has {got}")]
    TooShort { needed: usize, got: usize },
}

/// Representation counts of a finite set over a window `[lo, hi]`.
///
/// Only nonzero counts are stored; `gaps` lists the maximal runs of zero
/// counts as inclusive ranges, so windows of any width stay small.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepReport {
    pub lo: BigInt,
    pub hi: BigInt,
    pub counts: BTreeMap<BigInt, u64>,
    pub violations: Vec<BigInt>,
    pub gaps: Vec<(BigInt, BigInt)>,
}

impl RepReport {
    pub fn count(&self, n: &BigInt) -> u64 {
        self.counts.get(n).copied().unwrap_or(0)
    }

    pub fn is_gap(&self, n: &BigInt) -> bool {
        n >= &self.lo && n <= &self.hi && self.count(n) == 0
    }

    /// Total number of integers in the window with count zero.
    pub fn gap_count(&self) -> BigInt {
        self.gaps.iter().map(|(a, b)| b - a + 1).sum()
    }
}

/// All pairs `(a, a')` with `a <= a'`, in enumeration order.
fn pairs(a: &IntSet) -> impl Iterator<Item = (&BigInt, &BigInt)> {
    let e = a.as_slice();
    (0..e.len()).flat_map(move |i| (i..e.len()).map(move |j| (&e[i], &e[j])))
}

/// Every pair `a <= a'` of the set with `a + a' = n`.
pub fn representations(a: &IntSet, n: &BigInt) -> Vec<(BigInt, BigInt)> {
    pairs(a)
        .filter(|(x, y)| &(*x + *y) == n)
        .map(|(x, y)| (x.clone(), y.clone()))
        .collect()
}

/// Number of representations of `n` by direct pair enumeration.
pub fn brute_count(a: &IntSet, n: &BigInt) -> u64 {
    pairs(a).filter(|(x, y)| &(*x + *y) == n).count() as u64
}

/// Sum multiplicities over all pairs.
fn pair_sums(a: &IntSet) -> BTreeMap<BigInt, u64> {
    let mut m = BTreeMap::new();
    for (x, y) in pairs(a) {
        *m.entry(x + y).or_insert(0) += 1;
    }
    m
}

fn brute_sumset(a: &IntSet) -> BTreeSet<BigInt> {
    pairs(a).map(|(x, y)| x + y).collect()
}

pub fn brute_rep_report(a: &IntSet, lo: &BigInt, hi: &BigInt) -> Result<RepReport, OracleError> {
    if lo > hi {
        return Err(OracleError::InvalidRange {
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    let counts: BTreeMap<BigInt, u64> = pair_sums(a)
        .into_iter()
        .filter(|(n, _)| n >= lo && n <= hi)
        .collect();
    let violations = counts
        .iter()
        .filter(|(_, &c)| c >= 2)
        .map(|(n, _)| n.clone())
        .collect();
    let mut gaps = Vec::new();
    let mut next = lo.clone();
    for n in counts.keys() {
        if n > &next {
            gaps.push((next.clone(), n - 1));
        }
        next = n + 1;
    }
    if &next <= hi {
        gaps.push((next, hi.clone()));
    }
    Ok(RepReport {
        lo: lo.clone(),
        hi: hi.clone(),
        counts,
        violations,
        gaps,
    })
}

/// A disagreement between the oracle and [`IntSet::rep_count`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub n: BigInt,
    pub oracle: u64,
    pub fast: u64,
}

/// Compares a report against the fast implementation on every represented
/// `n` in the window, on every gap endpoint, and on the window's sumset.
pub fn cross_check(a: &IntSet, report: &RepReport) -> Result<(), Disagreement> {
    let mut probes: BTreeSet<BigInt> = report.counts.keys().cloned().collect();
    for (g0, g1) in &report.gaps {
        probes.insert(g0.clone());
        probes.insert(g1.clone());
    }
    probes.extend(
        a.sumset(a)
            .iter()
            .filter(|n| *n >= &report.lo && *n <= &report.hi)
            .cloned(),
    );
    let mut bad: Vec<Disagreement> = probes
        .into_iter()
        .filter_map(|n| {
            let oracle = report.count(&n);
            let fast = a.rep_count(&n);
            (oracle != fast).then_some(Disagreement { n, oracle, fast })
        })
        .collect();
    bad.sort_by(|x, y| witness_order(&x.n, &y.n));
    match bad.into_iter().next() {
        Some(d) => Err(d),
        None => Ok(()),
    }
}

/// Orders by `|n|`, positive before negative.
pub fn witness_order(x: &BigInt, y: &BigInt) -> std::cmp::Ordering {
    (x.abs(), x.is_negative()).cmp(&(y.abs(), y.is_negative()))
}

fn min_witness(ns: impl IntoIterator<Item = BigInt>) -> Option<BigInt> {
    ns.into_iter().min_by(witness_order)
}

/// Which part of the four-set decomposition an element came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// `2A_k`
    OldSums,
    /// `A_k + (b + 3c)`; `A_k - (b + 3c)` on the negative branch
    FarShift,
    /// `A_k - 3c`; `A_k + 3c` on the negative branch
    NearShift,
    /// `{b, 2b + 6c, -6c}`, negated on the negative branch
    NewPairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BRule {
    /// `b_2 = 2`
    SecondIsTwo,
    /// `b_k <= b_{k+2}`
    EverySecondNondecreasing,
    /// `b_{2k} >= k + 1`
    EvenIndexFloor,
}

/// Evidence that a check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `n` has two or more representations in `A_step`.
    RepeatedSum {
        step: u64,
        n: BigInt,
        pairs: Vec<(BigInt, BigInt)>,
    },
    /// `|n| <= step / 2` has no representation in `A_step`.
    Uncovered { step: u64, n: BigInt },
    /// `n` lies in two parts of the decomposition.
    Overlap { step: u64, n: BigInt, parts: (Part, Part) },
    /// The union of the parts and `2A_{k+1}` differ at `n`.
    UnionMismatch { step: u64, n: BigInt, in_sumset: bool },
    /// The next set is not the previous one plus the two branch elements.
    NotAnExtension { step: u64 },
    BGrowth { rule: BRule, k: u64 },
    /// A recorded field disagrees with the value recomputed from the sets.
    Field {
        step: u64,
        field: &'static str,
        recorded: String,
        expected: String,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::RepeatedSum { step, n, pairs } => {
                write!(f, "step {step}: n = {n} has {} representations:", pairs.len())?;
                for (a, b) in pairs {
                    write!(f, " {a}+{b}")?;
                }
                Ok(())
            }
            Witness::Uncovered { step, n } => write!(f, "step {step}: n = {n} is not represented"),
            Witness::Overlap { step, n, parts } => {
                write!(f, "step {step}: n = {n} lies in both {:?} and {:?}", parts.0, parts.1)
            }
            Witness::UnionMismatch { step, n, in_sumset } => {
                if *in_sumset {
                    write!(f, "step {step}: n = {n} is in the sumset but in no part")
                } else {
                    write!(f, "step {step}: n = {n} is in a part but not in the sumset")
                }
            }
            Witness::NotAnExtension { step } => {
                write!(f, "step {step}: set is not the branch extension of step {}", step - 1)
            }
            Witness::BGrowth { rule, k } => write!(f, "b-sequence rule {rule:?} fails at k = {k}"),
            Witness::Field {
                step,
                field,
                recorded,
                expected,
            } => write!(f, "step {step}: {field} recorded {recorded}, expected {expected}"),
        }
    }
}

impl Witness {
    /// The integer the witness is about, when there is one.
    pub fn n(&self) -> Option<&BigInt> {
        match self {
            Witness::RepeatedSum { n, .. }
            | Witness::Uncovered { n, .. }
            | Witness::Overlap { n, .. }
            | Witness::UnionMismatch { n, .. } => Some(n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Witness),
}

impl Outcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Pass => None,
            Outcome::Fail(w) => Some(w),
        }
    }
}

/// Finds the minimal failure of the uniqueness/coverage claims for one set.
/// Coverage is required for `|n| <= cover`.
fn check_set(step: u64, a: &IntSet, cover: Option<&BigInt>) -> Option<Witness> {
    let sums = pair_sums(a);
    let repeated = sums.iter().filter(|(_, &c)| c >= 2).map(|(n, _)| n.clone());
    let mut candidates: Vec<BigInt> = repeated.collect();
    if let Some(k) = cover {
        let mut n = -k.clone();
        while &n <= k {
            if !sums.contains_key(&n) {
                candidates.push(n.clone());
            }
            n += 1;
        }
    }
    let n = min_witness(candidates)?;
    Some(if sums.contains_key(&n) {
        Witness::RepeatedSum {
            step,
            pairs: representations(a, &n),
            n,
        }
    } else {
        Witness::Uncovered { step, n }
    })
}

/// Checks `r(n) <= 1` everywhere for every set in the trace, and `r(n) = 1`
/// for `|n| <= k` in `A_{2k}`. Reports the first failing step, with the
/// minimal witness inside it.
pub fn verify_unique_window(trace: &BasisTrace) -> Outcome {
    for step in &trace.steps {
        let cover = (step.k % 2 == 0).then(|| BigInt::from(step.k / 2));
        if let Some(w) = check_set(step.k, &step.set, cover.as_ref()) {
            return Outcome::Fail(w);
        }
    }
    Outcome::Pass
}

/// Checks that `2A_{k+1}` is the disjoint union of `2A_k`, `A_k + b + 3c`,
/// `A_k - 3c` and `{b, 2b + 6c, -6c}`, using the parameters recorded on
/// `prev`. On the negative branch the shifts and the three new sums change
/// sign.
pub fn verify_decomposition(
    prev: &ConstructionStep,
    next: &ConstructionStep,
) -> Result<Outcome, OracleError> {
    let c = prev.c.as_ref().ok_or(OracleError::MissingC { k: prev.k })?;
    let d = prev.set.iter().map(|a| a.abs()).max().unwrap_or_default();
    if c < &d {
        return Err(OracleError::CBelowD {
            k: prev.k,
            c: c.clone(),
            d,
        });
    }
    if next.k != prev.k + 1 {
        return Err(OracleError::NotConsecutive {
            prev: prev.k,
            next: next.k,
        });
    }
    let step = next.k;
    let b = &prev.b;
    let (x, y) = new_elements(b, c, prev.positive_branch);
    let mut expected: BTreeSet<BigInt> = prev.set.iter().cloned().collect();
    expected.insert(x);
    expected.insert(y);
    let actual: BTreeSet<BigInt> = next.set.iter().cloned().collect();
    if expected != actual || expected.len() != prev.set.len() + 2 {
        return Ok(Outcome::Fail(Witness::NotAnExtension { step }));
    }

    // the negative branch mirrors the translation amounts and the new sums
    let sign = if prev.positive_branch { BigInt::one() } else { -BigInt::one() };
    let far = &sign * (b + 3 * c);
    let near = &sign * (3 * c);
    let parts: [(Part, BTreeSet<BigInt>); 4] = [
        (Part::OldSums, brute_sumset(&prev.set)),
        (Part::FarShift, prev.set.iter().map(|a| a + &far).collect()),
        (Part::NearShift, prev.set.iter().map(|a| a - &near).collect()),
        (
            Part::NewPairs,
            [b.clone(), 2 * b + 6 * c, -6 * c]
                .into_iter()
                .map(|v| &sign * v)
                .collect(),
        ),
    ];

    let mut overlaps: Vec<(BigInt, Part, Part)> = Vec::new();
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            for n in parts[i].1.intersection(&parts[j].1) {
                overlaps.push((n.clone(), parts[i].0, parts[j].0));
            }
        }
    }
    if let Some((n, p, q)) = overlaps.into_iter().min_by(|a, b| witness_order(&a.0, &b.0)) {
        return Ok(Outcome::Fail(Witness::Overlap {
            step,
            n,
            parts: (p, q),
        }));
    }

    let union: BTreeSet<BigInt> = parts.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
    let sumset = brute_sumset(&next.set);
    let diff = union.symmetric_difference(&sumset).cloned();
    if let Some(n) = min_witness(diff) {
        let in_sumset = sumset.contains(&n);
        return Ok(Outcome::Fail(Witness::UnionMismatch { step, n, in_sumset }));
    }
    Ok(Outcome::Pass)
}

/// Runs [`verify_decomposition`] over every consecutive pair of steps.
pub fn verify_all_decompositions(trace: &BasisTrace) -> Result<Outcome, OracleError> {
    for w in trace.steps.windows(2) {
        let out = verify_decomposition(&w[0], &w[1])?;
        if !out.is_pass() {
            return Ok(out);
        }
    }
    Ok(Outcome::Pass)
}

/// Checks the recorded b-sequence: `b_2 = 2`, `b_k <= b_{k+2}` and
/// `b_{2k} >= k + 1`.
pub fn verify_b_growth(trace: &BasisTrace) -> Result<Outcome, OracleError> {
    let steps = &trace.steps;
    if steps.len() < 2 {
        return Err(OracleError::TooShort {
            needed: 2,
            got: steps.len(),
        });
    }
    let b = |k: usize| &steps[k - 1].b;
    if b(2) != &BigInt::from(2) {
        return Ok(Outcome::Fail(Witness::BGrowth {
            rule: BRule::SecondIsTwo,
            k: 2,
        }));
    }
    let n = steps.len();
    for k in 1..=n {
        if k + 2 <= n && b(k) > b(k + 2) {
            return Ok(Outcome::Fail(Witness::BGrowth {
                rule: BRule::EverySecondNondecreasing,
                k: k as u64,
            }));
        }
        if 2 * k <= n && b(2 * k) < &BigInt::from(k + 1) {
            return Ok(Outcome::Fail(Witness::BGrowth {
                rule: BRule::EvenIndexFloor,
                k: k as u64,
            }));
        }
    }
    Ok(Outcome::Pass)
}

/// Recomputes every derived field of every step from the sets alone and
/// compares with what the trace records: `k`, `|A_k| = 2k`, `A_1 = {0,1}`,
/// `d`, `b`, branch, `c >= d`, the ascending chain and
/// `d_{k+1} = b_k + 3c_k`.
pub fn verify_step_fields(trace: &BasisTrace) -> Outcome {
    let field = |step: u64, field: &'static str, recorded: String, expected: String| {
        Outcome::Fail(Witness::Field {
            step,
            field,
            recorded,
            expected,
        })
    };
    for (i, s) in trace.steps.iter().enumerate() {
        let k = i as u64 + 1;
        if s.k != k {
            return field(k, "k", s.k.to_string(), k.to_string());
        }
        if s.set.len() as u64 != 2 * k {
            return field(k, "size", s.set.len().to_string(), (2 * k).to_string());
        }
        if k == 1 && s.set != IntSet::from_i64s(&[0, 1]) {
            return field(k, "set", s.set.to_string(), "{0,1}".into());
        }
        let d = s.set.iter().map(|a| a.abs()).max().unwrap_or_default();
        if s.d != d {
            return field(k, "d", s.d.to_string(), d.to_string());
        }
        let sums = brute_sumset(&s.set);
        let mut b = BigInt::one();
        while sums.contains(&b) && sums.contains(&-&b) {
            b += 1;
        }
        if s.b != b {
            return field(k, "b", s.b.to_string(), b.to_string());
        }
        let positive = !sums.contains(&b);
        if s.positive_branch != positive {
            return field(k, "branch", branch_name(s.positive_branch).into(), branch_name(positive).into());
        }
        match (&s.c, i + 1 < trace.steps.len()) {
            (None, true) => return field(k, "c", "absent".into(), format!(">= {d}")),
            (Some(c), _) if c < &d => return field(k, "c", c.to_string(), format!(">= {d}")),
            _ => {}
        }
        if let Some(prev) = i.checked_sub(1).map(|j| &trace.steps[j]) {
            if !prev.set.is_subset(&s.set) {
                return field(k, "chain", s.set.to_string(), format!("superset of {}", prev.set));
            }
            let c = prev.c.as_ref().expect("checked on previous step");
            let expected = &prev.b + 3 * c;
            if s.d != expected {
                return field(k, "d", s.d.to_string(), expected.to_string());
            }
        }
    }
    Outcome::Pass
}

pub fn branch_name(positive: bool) -> &'static str {
    if positive {
        "positive"
    } else {
        "negative"
    }
}
