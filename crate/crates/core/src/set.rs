//! Finite sets of exact rationals and the elementary set operations:
//! sumset, difference set, product set, ratio set, the composite AB+C and
//! the dilate identity check for well-spaced sets.
//!
//! Sets are strictly sorted, duplicate-free vectors. Operations are pure;
//! everything is safe to share read-only across threads. Integer inputs take
//! an i128 fast path whose output is identical to the rational path.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;

use crate::budget::MemoryBudget;
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Cached sign classification of a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignSummary {
    AllPositive,
    AllNegative,
    Mixed,
    ContainsZero,
}

/// Strictly increasing, duplicate-free set of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteSet {
    elems: Vec<ExactScalar>,
    signs: SignSummary,
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.elems).finish()
    }
}

fn classify(elems: &[ExactScalar]) -> SignSummary {
    if elems.iter().any(|e| e.is_zero()) {
        SignSummary::ContainsZero
    } else if elems.iter().all(|e| e.is_positive()) {
        SignSummary::AllPositive
    } else if elems.iter().all(|e| e.is_negative()) {
        SignSummary::AllNegative
    } else {
        SignSummary::Mixed
    }
}

impl FiniteSet {
    /// Sorts, deduplicates and classifies. Errors on empty input.
    pub fn new(mut values: Vec<ExactScalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySet);
        }
        values.sort_unstable();
        values.dedup();
        let signs = classify(&values);
        Ok(FiniteSet {
            elems: values,
            signs,
        })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| ExactScalar::from_int(v)).collect())
    }

    pub fn from_u64s(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| ExactScalar::from_u64(v)).collect())
    }

    pub fn singleton(value: ExactScalar) -> Self {
        let signs = classify(std::slice::from_ref(&value));
        FiniteSet {
            elems: vec![value],
            signs,
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    pub fn elements(&self) -> &[ExactScalar] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ExactScalar> {
        self.elems.iter()
    }

    pub fn min(&self) -> &ExactScalar {
        &self.elems[0]
    }

    pub fn max(&self) -> &ExactScalar {
        self.elems.last().unwrap()
    }

    pub fn contains(&self, v: &ExactScalar) -> bool {
        self.elems.binary_search(v).is_ok()
    }

    pub fn sign_summary(&self) -> SignSummary {
        self.signs
    }

    pub fn all_positive(&self) -> bool {
        self.signs == SignSummary::AllPositive
    }

    pub fn contains_zero(&self) -> bool {
        self.signs == SignSummary::ContainsZero
    }

    /// The elements as i64s, when every element is an integer in i64 range.
    pub fn as_i64s(&self) -> Option<Vec<i64>> {
        self.elems.iter().map(|e| e.to_i64()).collect()
    }

    /// The elements as u64s, when every element is a positive integer.
    pub fn as_u64s(&self) -> Option<Vec<u64>> {
        if !self.all_positive() {
            return None;
        }
        self.as_i64s()
            .map(|v| v.into_iter().map(|x| x as u64).collect())
    }

    /// Elementwise multiplication by a nonzero scalar.
    pub fn dilate(&self, alpha: &ExactScalar) -> Result<FiniteSet> {
        if alpha.is_zero() {
            return Err(Error::Degenerate);
        }
        FiniteSet::new(self.elems.iter().map(|e| e * alpha).collect())
    }

    /// Elementwise translation.
    pub fn translate(&self, shift: &ExactScalar) -> FiniteSet {
        // Order is preserved, so no re-sort is needed.
        let elems: Vec<ExactScalar> = self.elems.iter().map(|e| e + shift).collect();
        let signs = classify(&elems);
        FiniteSet { elems, signs }
    }

    /// The set -A.
    pub fn negate(&self) -> FiniteSet {
        let mut elems: Vec<ExactScalar> = self.elems.iter().map(|e| -e).collect();
        elems.reverse();
        let signs = classify(&elems);
        FiniteSet { elems, signs }
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a ExactScalar;
    type IntoIter = std::slice::Iter<'a, ExactScalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.elems.iter()
    }
}

/// The four pairwise set operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Sum,
    Difference,
    Product,
    Ratio,
}

fn from_i128s(mut values: Vec<i128>) -> FiniteSet {
    values.sort_unstable();
    values.dedup();
    let elems: Vec<ExactScalar> = values
        .into_iter()
        .map(|v| ExactScalar::from_bigint(BigInt::from(v)))
        .collect();
    let signs = classify(&elems);
    FiniteSet { elems, signs }
}

/// Exact set of all pairwise results `a op b`.
pub fn binary_op(op: BinaryOp, a: &FiniteSet, b: &FiniteSet) -> Result<FiniteSet> {
    if op == BinaryOp::Ratio && b.contains_zero() {
        return Err(Error::DivisorZero);
    }
    if op != BinaryOp::Ratio {
        if let (Some(xs), Some(ys)) = (a.as_i64s(), b.as_i64s()) {
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    let v = match op {
                        BinaryOp::Sum => x as i128 + y as i128,
                        BinaryOp::Difference => x as i128 - y as i128,
                        BinaryOp::Product => x as i128 * y as i128,
                        BinaryOp::Ratio => unreachable!(),
                    };
                    out.push(v);
                }
            }
            return Ok(from_i128s(out));
        }
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            out.push(match op {
                BinaryOp::Sum => x + y,
                BinaryOp::Difference => x - y,
                BinaryOp::Product => x * y,
                BinaryOp::Ratio => x / y,
            });
        }
    }
    FiniteSet::new(out)
}

/// Options for [`combine`]: the memory budget and whether exceeding it
/// degrades to exact counting instead of failing.
#[derive(Clone, Copy, Debug)]
pub struct CombineOptions {
    pub budget: MemoryBudget,
    pub count_only_fallback: bool,
}

impl Default for CombineOptions {
    fn default() -> Self {
        CombineOptions {
            budget: MemoryBudget::default(),
            count_only_fallback: true,
        }
    }
}

/// Result of [`combine`]: the materialized set, or just its exact
/// cardinality when the set would not fit in the budget.
#[derive(Clone, Debug)]
pub enum Combined {
    Set(FiniteSet),
    CountOnly(u64),
}

impl Combined {
    pub fn cardinality(&self) -> u64 {
        match self {
            Combined::Set(s) => s.len() as u64,
            Combined::CountOnly(n) => *n,
        }
    }

    pub fn into_set(self) -> Option<FiniteSet> {
        match self {
            Combined::Set(s) => Some(s),
            Combined::CountOnly(_) => None,
        }
    }
}

// Rough per-candidate working cost used for budget checks. Candidates are
// held once before dedup; small rationals cost two inline bigints plus vec
// slack.
const CANDIDATE_BYTES: u64 = 96;

/// The composite set AB+C = {ab + c}.
///
/// The product set is deduplicated before the sums are formed, so the
/// candidate count is |AB|*|C|, not |A||B||C|. Over budget, the exact
/// cardinality is still returned (unless disabled) via a partitioned count:
/// candidates are split by a deterministic value hash and each bucket is
/// deduplicated independently; bucket counts add up because the buckets
/// partition the value space.
pub fn combine(
    a: &FiniteSet,
    b: &FiniteSet,
    c: &FiniteSet,
    opts: &CombineOptions,
) -> Result<Combined> {
    let products = binary_op(BinaryOp::Product, a, b)?;
    let candidates = products.len() as u64 * c.len() as u64;
    if candidates.saturating_mul(CANDIDATE_BYTES) <= opts.budget.bytes {
        let set = binary_op(BinaryOp::Sum, &products, c)?;
        return Ok(Combined::Set(set));
    }
    if !opts.count_only_fallback {
        return Err(Error::ResourceLimit(format!(
            "materializing AB+C needs ~{} candidate values (budget {} bytes) and counting is disabled",
            candidates, opts.budget.bytes
        )));
    }
    Ok(Combined::CountOnly(partitioned_sum_count(
        &products,
        c,
        opts.budget,
    )))
}

fn mix64(mut v: u64) -> u64 {
    // splitmix64 finalizer; fixed so partition assignment never depends on
    // process-level hash seeds.
    v = (v ^ (v >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    v = (v ^ (v >> 27)).wrapping_mul(0x94d049bb133111eb);
    v ^ (v >> 31)
}

fn value_bucket(v: &ExactScalar, nbuckets: u64) -> u64 {
    let mut h = 0u64;
    for d in v.numer().to_u64_digits().1 {
        h = mix64(h ^ d);
    }
    if v.is_negative() {
        h = mix64(h ^ 0x5851f42d4c957f2d);
    }
    for d in v.denom().to_u64_digits().1 {
        h = mix64(h ^ d);
    }
    h % nbuckets
}

/// |P + C| by bucketed counting: each pass enumerates every pairwise sum but
/// only retains the values of one bucket, so peak memory stays near
/// budget while the merged count is exact.
fn partitioned_sum_count(products: &FiniteSet, c: &FiniteSet, budget: MemoryBudget) -> u64 {
    let candidates = products.len() as u64 * c.len() as u64;
    let per_bucket = (budget.bytes / CANDIDATE_BYTES).max(1);
    let nbuckets = candidates.div_ceil(per_bucket).max(2);
    let mut total = 0u64;
    for bucket in 0..nbuckets {
        let mut seen: HashSet<ExactScalar> = HashSet::new();
        for p in products.iter() {
            for x in c.iter() {
                let v = p + x;
                if value_bucket(&v, nbuckets) == bucket {
                    seen.insert(v);
                }
            }
        }
        total += seen.len() as u64;
    }
    total
}

/// Shortcut for the paper's central object AA+A.
pub fn aa_plus_a(a: &FiniteSet, opts: &CombineOptions) -> Result<Combined> {
    combine(a, a, a, opts)
}

/// Outcome of the well-spaced dilate identity |a_max A + A| = |A|^2.
#[derive(Clone, Copy, Debug)]
pub struct MaxDilateCheck {
    pub size: u64,
    pub holds: bool,
}

/// Computes |a_max A + A| and compares it with |A|^2 exactly.
///
/// Requires a positive well-spaced set: pairwise gaps of at least 1
/// (positive integer sets always qualify).
pub fn max_dilate_identity(a: &FiniteSet) -> Result<MaxDilateCheck> {
    if !a.all_positive() {
        return Err(Error::NotWellSpaced);
    }
    let one = ExactScalar::one();
    for w in a.elements().windows(2) {
        if &w[1] - &w[0] < one {
            return Err(Error::NotWellSpaced);
        }
    }
    let dilated = a.dilate(a.max())?;
    let sums = binary_op(BinaryOp::Sum, &dilated, a)?;
    let size = sums.len() as u64;
    Ok(MaxDilateCheck {
        size,
        holds: size == (a.len() as u64).pow(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vals: &[i64]) -> FiniteSet {
        FiniteSet::from_ints(vals).unwrap()
    }

    fn rat(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(BigInt::from(n), BigInt::from(d)).unwrap()
    }

    #[test]
    fn make_set_sorts_dedups_classifies() {
        let s = set(&[3, 1, 2, 2]);
        assert_eq!(s.len(), 3);
        assert_eq!(
            s.elements(),
            &[
                ExactScalar::from_int(1),
                ExactScalar::from_int(2),
                ExactScalar::from_int(3)
            ]
        );
        assert_eq!(s.sign_summary(), SignSummary::AllPositive);
        assert_eq!(set(&[-1, 1]).sign_summary(), SignSummary::Mixed);
        assert_eq!(set(&[0]).sign_summary(), SignSummary::ContainsZero);
        assert_eq!(set(&[-3, -1]).sign_summary(), SignSummary::AllNegative);
        assert!(matches!(FiniteSet::new(vec![]), Err(Error::EmptySet)));
    }

    #[test]
    fn sumset_of_progression_is_minimal() {
        let a = set(&[1, 2, 3]);
        let s = binary_op(BinaryOp::Sum, &a, &a).unwrap();
        assert_eq!(s, set(&[2, 3, 4, 5, 6]));
        assert_eq!(s.len(), 2 * a.len() - 1);
    }

    #[test]
    fn product_of_geometric_progression_is_minimal() {
        let a = set(&[2, 4, 8]);
        let p = binary_op(BinaryOp::Product, &a, &a).unwrap();
        assert_eq!(p, set(&[4, 8, 16, 32, 64]));
    }

    #[test]
    fn ratio_set_brute_force() {
        let a = set(&[1, 2, 4]);
        let r = binary_op(BinaryOp::Ratio, &a, &a).unwrap();
        let expect = FiniteSet::new(vec![rat(1, 4), rat(1, 2), rat(1, 1), rat(2, 1), rat(4, 1)])
            .unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn ratio_with_zero_divisor_rejected() {
        let a = set(&[1, 2]);
        let z = set(&[0, 1]);
        assert!(matches!(
            binary_op(BinaryOp::Ratio, &a, &z),
            Err(Error::DivisorZero)
        ));
    }

    #[test]
    fn integer_fast_path_matches_rational_path() {
        // Same values once as ints and once as unreduced rationals.
        let ints = set(&[-3, 1, 4, 7]);
        let rats = FiniteSet::new(
            [-3, 1, 4, 7]
                .iter()
                .map(|&v| rat(3 * v, 3))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(rats.as_i64s().is_some());
        for op in [BinaryOp::Sum, BinaryOp::Difference, BinaryOp::Product] {
            let fast = binary_op(op, &ints, &ints).unwrap();
            let mixed = FiniteSet::new(
                ints.iter()
                    .flat_map(|x| ints.iter().map(move |y| (x, y)))
                    .map(|(x, y)| match op {
                        BinaryOp::Sum => x + y,
                        BinaryOp::Difference => x - y,
                        BinaryOp::Product => x * y,
                        BinaryOp::Ratio => unreachable!(),
                    })
                    .collect(),
            )
            .unwrap();
            assert_eq!(fast, mixed);
        }
    }

    #[test]
    fn combine_examples() {
        let a = set(&[1, 2]);
        let got = combine(&a, &a, &a, &CombineOptions::default()).unwrap();
        assert_eq!(got.cardinality(), 5);
        assert_eq!(got.into_set().unwrap(), set(&[2, 3, 4, 5, 6]));

        let one = set(&[1]);
        let got = combine(&one, &one, &one, &CombineOptions::default()).unwrap();
        assert_eq!(got.into_set().unwrap(), set(&[2]));

        let a = set(&[1, 2, 4]);
        assert_eq!(aa_plus_a(&a, &CombineOptions::default()).unwrap().cardinality(), 12);
    }

    #[test]
    fn combine_count_only_matches_materialized() {
        let a = set(&[1, 2, 3, 5, 8]);
        let b = set(&[2, 3, 7]);
        let c = set(&[1, 4, 9, 11]);
        let full = combine(&a, &b, &c, &CombineOptions::default()).unwrap();
        let tiny = CombineOptions {
            budget: MemoryBudget::new(128),
            count_only_fallback: true,
        };
        match combine(&a, &b, &c, &tiny).unwrap() {
            Combined::CountOnly(n) => assert_eq!(n, full.cardinality()),
            Combined::Set(_) => panic!("expected count-only under tiny budget"),
        }
        let strict = CombineOptions {
            budget: MemoryBudget::new(128),
            count_only_fallback: false,
        };
        assert!(matches!(
            combine(&a, &b, &c, &strict),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn geometric_progression_closed_form() {
        // |AA+A| = (3n^2 - n)/2 for A = {1, 2, 4, ..., 2^(n-1)}.
        for n in 1u32..=24 {
            let a = FiniteSet::new((0..n).map(|k| ExactScalar::from_u64(1u64 << k)).collect())
                .unwrap();
            let size = aa_plus_a(&a, &CombineOptions::default())
                .unwrap()
                .cardinality();
            assert_eq!(size, (3 * (n as u64) * (n as u64) - n as u64) / 2, "n={n}");
        }
    }

    #[test]
    fn max_dilate_identity_examples() {
        let c = max_dilate_identity(&set(&[1, 2, 3])).unwrap();
        assert_eq!((c.size, c.holds), (9, true));

        let c = max_dilate_identity(&set(&[7])).unwrap();
        assert_eq!((c.size, c.holds), (1, true));

        // {2,3,5}: 5A+A = {12,13,15,17,18,20,27,28,30}
        let c = max_dilate_identity(&set(&[2, 3, 5])).unwrap();
        assert_eq!((c.size, c.holds), (9, true));
        let dilated = set(&[2, 3, 5]).dilate(&ExactScalar::from_int(5)).unwrap();
        let explicit = binary_op(BinaryOp::Sum, &dilated, &set(&[2, 3, 5])).unwrap();
        assert_eq!(explicit, set(&[12, 13, 15, 17, 18, 20, 27, 28, 30]));

        // Well-spaced non-integers qualify; dense or non-positive sets do not.
        let half_spaced =
            FiniteSet::new(vec![rat(1, 2), rat(3, 2), rat(7, 2)]).unwrap();
        assert!(max_dilate_identity(&half_spaced).is_ok());
        let dense = FiniteSet::new(vec![rat(1, 2), rat(3, 4)]).unwrap();
        assert!(matches!(
            max_dilate_identity(&dense),
            Err(Error::NotWellSpaced)
        ));
        assert!(matches!(
            max_dilate_identity(&set(&[-3, 1, 5])),
            Err(Error::NotWellSpaced)
        ));
    }

    #[test]
    fn negate_and_translate() {
        let a = set(&[1, 3, 4]);
        assert_eq!(a.negate(), set(&[-4, -3, -1]));
        assert_eq!(a.translate(&ExactScalar::from_int(-3)), set(&[-2, 0, 1]));
        assert_eq!(
            a.dilate(&rat(1, 2)).unwrap().elements(),
            &[rat(1, 2), rat(3, 2), rat(2, 1)]
        );
        assert!(a.dilate(&ExactScalar::zero()).is_err());
    }
}
