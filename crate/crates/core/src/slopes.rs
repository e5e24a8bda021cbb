//! Line-through-origin decomposition of A x A and the machinery built on it:
//! dyadic selection of slope classes, Solymosi line-pair sums, collision
//! counts between pairs of vector-sum families, per-cluster lower-bound
//! diagnostics, and the lemma-level size ratios.
//!
//! Everything here requires strictly positive sets: betweenness of vector
//! sums is only monotone in the positive quadrant. Callers with negative
//! sets pass -A.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::energy::{energy, EnergyKind};
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::set::{aa_plus_a, binary_op, BinaryOp, CombineOptions, FiniteSet};

/// One line y = slope * x with the x-projection of its points of A x A.
#[derive(Clone, Debug)]
pub struct SlopeLine {
    pub slope: ExactScalar,
    pub projection: FiniteSet,
}

impl SlopeLine {
    pub fn mass(&self) -> u64 {
        self.projection.len() as u64
    }
}

/// The family {(lambda, A_lambda)} covering A x A, sorted by slope.
#[derive(Clone, Debug)]
pub struct SlopeDecomposition {
    base: FiniteSet,
    entries: Vec<SlopeLine>,
}

impl SlopeDecomposition {
    /// Decomposes A x A by the lines through the origin. The slope set is
    /// exactly A/A and the projection masses sum to |A|^2.
    pub fn new(a: &FiniteSet) -> Result<Self> {
        if !a.all_positive() {
            return Err(Error::SignRestriction);
        }
        // (slope, f64 key, index of x in A). The f64 key accelerates the
        // sort: rounding is monotone, so unequal keys decide exactly and
        // equal keys fall back to the exact comparison.
        let elems = a.elements();
        let mut pairs: Vec<(ExactScalar, f64, u32)> = Vec::with_capacity(elems.len().pow(2));
        for (xi, x) in elems.iter().enumerate() {
            for y in elems {
                let slope = y / x;
                let approx = slope.to_f64();
                pairs.push((slope, approx, xi as u32));
            }
        }
        pairs.sort_unstable_by(|p, q| match p.1.partial_cmp(&q.1).unwrap() {
            Ordering::Equal => p.0.cmp(&q.0),
            o => o,
        });
        let mut entries: Vec<SlopeLine> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let mut j = i + 1;
            while j < pairs.len() && pairs[j].0 == pairs[i].0 {
                j += 1;
            }
            let projection = FiniteSet::new(
                pairs[i..j]
                    .iter()
                    .map(|p| elems[p.2 as usize].clone())
                    .collect(),
            )?;
            entries.push(SlopeLine {
                slope: pairs[i].0.clone(),
                projection,
            });
            i = j;
        }
        Ok(SlopeDecomposition {
            base: a.clone(),
            entries,
        })
    }

    pub fn base(&self) -> &FiniteSet {
        &self.base
    }

    pub fn entries(&self) -> &[SlopeLine] {
        &self.entries
    }

    pub fn slope_count(&self) -> usize {
        self.entries.len()
    }

    /// Total mass, which equals |A|^2 by the covering identity.
    pub fn mass(&self) -> u64 {
        self.entries.iter().map(|e| e.mass()).sum()
    }

    pub fn line(&self, slope: &ExactScalar) -> Option<&SlopeLine> {
        self.entries
            .binary_search_by(|e| e.slope.cmp(slope))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Pigeonholes the mass identity over dyadic classes
    /// tau <= |A_lambda| < 2 tau and returns the heaviest class
    /// (ties go to the larger tau).
    pub fn dyadic_select(&self) -> Result<DyadicLevel> {
        if self.base.len() < 2 {
            return Err(Error::Degenerate);
        }
        let mut classes: BTreeMap<u32, (u64, Vec<usize>)> = BTreeMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            let j = e.mass().ilog2(); // tau = 2^j <= |A_lambda| < 2^(j+1)
            let slot = classes.entry(j).or_default();
            slot.0 += e.mass();
            slot.1.push(i);
        }
        let (&best_j, _) = classes
            .iter()
            .max_by_key(|(&j, (mass, _))| (*mass, j))
            .expect("decomposition is nonempty");
        let (mass, members) = classes.remove(&best_j).unwrap();
        Ok(DyadicLevel {
            tau: 1u64 << best_j,
            mass,
            member_indices: members,
            refined: None,
        })
    }
}

/// A selected dyadic class of slopes, optionally refined by the dyadic
/// size class of the product sets A*A_lambda.
#[derive(Clone, Debug)]
pub struct DyadicLevel {
    pub tau: u64,
    pub mass: u64,
    member_indices: Vec<usize>,
    refined: Option<RefinedLevel>,
}

#[derive(Clone, Debug)]
pub struct RefinedLevel {
    pub t0: u64,
    pub member_indices: Vec<usize>,
}

impl DyadicLevel {
    pub fn member_count(&self) -> usize {
        self.member_indices.len()
    }

    pub fn slopes<'a>(&'a self, decomp: &'a SlopeDecomposition) -> Vec<&'a ExactScalar> {
        self.member_indices
            .iter()
            .map(|&i| &decomp.entries()[i].slope)
            .collect()
    }

    /// The pigeonhole guarantee mass >= |A|^2 / (2 log2 |A|).
    pub fn meets_mass_guarantee(&self, decomp: &SlopeDecomposition) -> bool {
        let n = decomp.base().len() as f64;
        (self.mass as f64) * 2.0 * n.log2() >= n * n
    }

    pub fn refined(&self) -> Option<&RefinedLevel> {
        self.refined.as_ref()
    }

    /// Second-stage pigeonholing: among the class members, selects the
    /// dyadic class t0 of |A*A_lambda| / |A| with the most slopes (ties go
    /// to the smaller t0). Computed on demand since it materializes a
    /// product set per slope.
    pub fn refine(&mut self, decomp: &SlopeDecomposition) -> Result<&RefinedLevel> {
        if self.refined.is_none() {
            let n = decomp.base().len() as u64;
            let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for &i in &self.member_indices {
                let line = &decomp.entries()[i];
                let prod_size = if line.projection.len() == 1 {
                    n // A * {x} has exactly |A| elements
                } else {
                    binary_op(BinaryOp::Product, decomp.base(), &line.projection)?.len() as u64
                };
                // t with t*n <= |A A_lambda| < 2*t*n; the ratio is >= 1.
                let t_exp = (prod_size / n).ilog2();
                classes.entry(t_exp).or_default().push(i);
            }
            let (&best_t, _) = classes
                .iter()
                .max_by_key(|(&t, members)| (members.len(), std::cmp::Reverse(t)))
                .expect("class is nonempty");
            let members = classes.remove(&best_t).unwrap();
            self.refined = Some(RefinedLevel {
                t0: 1u64 << best_t,
                member_indices: members,
            });
        }
        Ok(self.refined.as_ref().unwrap())
    }
}

/// A point of the plane with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlanarPoint {
    pub x: ExactScalar,
    pub y: ExactScalar,
}

/// Sorted, duplicate-free point family.
pub type PointSet = Vec<PlanarPoint>;

pub fn intersection_size(a: &PointSet, b: &PointSet) -> u64 {
    let mut i = 0;
    let mut j = 0;
    let mut n = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// The Solymosi vector-sum family A_lambda + (x', lambda' x') * Delta(A):
/// exactly |A_lambda| * |A| distinct points, each with slope strictly
/// between lambda and lambda', both coordinates in AA+A.
///
/// `fixed_x` is the x-coordinate of the chosen fixed point on the lambda'
/// line and must belong to A_lambda'.
pub fn line_pair_sum(
    decomp: &SlopeDecomposition,
    lambda: &ExactScalar,
    lambda_prime: &ExactScalar,
    fixed_x: &ExactScalar,
) -> Result<PointSet> {
    if lambda == lambda_prime {
        return Err(Error::InvalidPair("slopes must differ".into()));
    }
    let line = decomp
        .line(lambda)
        .ok_or_else(|| Error::InvalidPair(format!("slope {lambda} not in A/A")))?;
    let line_prime = decomp
        .line(lambda_prime)
        .ok_or_else(|| Error::InvalidPair(format!("slope {lambda_prime} not in A/A")))?;
    if !line_prime.projection.contains(fixed_x) {
        return Err(Error::InvalidPair(format!(
            "fixed point x={fixed_x} is not on the lambda'={lambda_prime} line"
        )));
    }
    let fixed_y = lambda_prime * fixed_x;
    let mut points = Vec::with_capacity(line.projection.len() * decomp.base().len());
    for a1 in line.projection.iter() {
        let y1 = lambda * a1;
        for a in decomp.base().iter() {
            points.push(PlanarPoint {
                x: a1 + &(fixed_x * a),
                y: &y1 + &(&fixed_y * a),
            });
        }
    }
    points.sort_unstable();
    points.dedup();
    Ok(points)
}

/// Outcome of the chain inequality |AA+A|^2 >= sum over consecutive slopes
/// of |A_lambda_i| * |A * A_lambda_(i+1)|.
#[derive(Clone, Debug)]
pub struct BalogChainCheck {
    pub lhs_squared: u128,
    pub rhs: u128,
    pub holds: bool,
}

/// Evaluates the chain inequality over all consecutive slope pairs of the
/// full decomposition. Disjointness of the wedges makes this a theorem, so
/// `holds` is expected true on every input.
pub fn balog_chain(a: &FiniteSet) -> Result<BalogChainCheck> {
    let decomp = SlopeDecomposition::new(a)?;
    let size = aa_plus_a(a, &CombineOptions::default())?.cardinality() as u128;
    let lhs_squared = size * size;
    let mut rhs = 0u128;
    for w in decomp.entries().windows(2) {
        let prod = binary_op(BinaryOp::Product, a, &w[1].projection)?;
        rhs += w[0].mass() as u128 * prod.len() as u128;
    }
    Ok(BalogChainCheck {
        lhs_squared,
        rhs,
        holds: lhs_squared >= rhs,
    })
}

/// Deterministic fixed-point choice: the minimal x-coordinate on each line.
/// A custom choice map can be supplied for randomized testing.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    by_slope: BTreeMap<ExactScalar, ExactScalar>,
}

impl FixedPoints {
    pub fn minimal(decomp: &SlopeDecomposition) -> Self {
        let by_slope = decomp
            .entries()
            .iter()
            .map(|e| (e.slope.clone(), e.projection.min().clone()))
            .collect();
        FixedPoints { by_slope }
    }

    /// Validates that every (slope, x) pair lies on the decomposition.
    pub fn custom(
        decomp: &SlopeDecomposition,
        choices: BTreeMap<ExactScalar, ExactScalar>,
    ) -> Result<Self> {
        for (slope, x) in &choices {
            let line = decomp
                .line(slope)
                .ok_or_else(|| Error::InvalidPair(format!("slope {slope} not in A/A")))?;
            if !line.projection.contains(x) {
                return Err(Error::InvalidPair(format!(
                    "x={x} is not on the {slope} line"
                )));
            }
        }
        Ok(FixedPoints { by_slope: choices })
    }

    pub fn get(&self, slope: &ExactScalar) -> Option<&ExactScalar> {
        self.by_slope.get(slope)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExactScalar, &ExactScalar)> {
        self.by_slope.iter()
    }
}

/// A quadruple of slopes (l1, l2, l3, l4) indexing the two families
/// F(l1, l2) and F(l3, l4) whose intersection is the collision count.
#[derive(Clone, Debug)]
pub struct SlopeQuadruple {
    pub l1: ExactScalar,
    pub l2: ExactScalar,
    pub l3: ExactScalar,
    pub l4: ExactScalar,
}

#[derive(Clone, Debug)]
pub struct CollisionCheck {
    /// Exact size of the intersection of the two vector-sum families.
    pub count: u64,
    /// Square of the Cauchy-Schwarz upper bound (an exact integer).
    pub bound_squared: u128,
    /// The bound itself, for display.
    pub bound: f64,
    pub holds: bool,
}

/// Collision count between the families of (l1, l2) and (l3, l4), with the
/// Cauchy-Schwarz upper bound.
///
/// For l4 != l2 the linearization 0 = a_l2 (l2-l4) a + (l1-l4) a1 + (l4-l3) a3
/// gives count^2 <= |A_l1| * E_+(A, alpha A_l3) with
/// alpha = (l4-l3) / (a_l2 (l2-l4)); for l4 == l2 it gives
/// count^2 <= |A| * E_+(A, gamma A_l1) with gamma = (l1-l3) / (a_l2 (l3-l2)).
pub fn collision_count(
    decomp: &SlopeDecomposition,
    quad: &SlopeQuadruple,
    fixed: &FixedPoints,
) -> Result<CollisionCheck> {
    let SlopeQuadruple { l1, l2, l3, l4 } = quad;
    for l in [l1, l2, l3, l4] {
        if decomp.line(l).is_none() {
            return Err(Error::InvalidQuadruple(format!("slope {l} not in A/A")));
        }
    }
    if l1 == l2 || l3 == l4 {
        return Err(Error::InvalidQuadruple(
            "family slopes must be distinct".into(),
        ));
    }
    if (l1, l2) == (l3, l4) {
        return Err(Error::InvalidQuadruple(
            "the two families must differ".into(),
        ));
    }
    if l4 != l2 && (l4 == l1 || l4 == l3) {
        return Err(Error::InvalidQuadruple(
            "l4 must avoid l1 and l3 when l4 != l2".into(),
        ));
    }
    if l4 == l2 && l3 == l2 {
        return Err(Error::InvalidQuadruple(
            "l3 must differ from l2 when l4 == l2".into(),
        ));
    }
    let a_l2 = fixed
        .get(l2)
        .ok_or_else(|| Error::InvalidQuadruple(format!("no fixed point for slope {l2}")))?;
    let a_l4 = fixed
        .get(l4)
        .ok_or_else(|| Error::InvalidQuadruple(format!("no fixed point for slope {l4}")))?;

    let f1 = line_pair_sum(decomp, l1, l2, a_l2)?;
    let f2 = line_pair_sum(decomp, l3, l4, a_l4)?;
    let count = intersection_size(&f1, &f2);

    let base = decomp.base();
    let bound_squared: u128 = if l4 != l2 {
        let alpha = (l4 - l3).checked_div(&(a_l2 * &(l2 - l4)))?;
        let proj3 = &decomp.line(l3).unwrap().projection;
        let dilated = proj3.dilate(&alpha)?;
        let e = energy(EnergyKind::Additive, base, &dilated)?;
        decomp.line(l1).unwrap().mass() as u128 * e
    } else {
        let gamma = (l1 - l3).checked_div(&(a_l2 * &(l3 - l2)))?;
        let proj1 = &decomp.line(l1).unwrap().projection;
        let dilated = proj1.dilate(&gamma)?;
        let e = energy(EnergyKind::Additive, base, &dilated)?;
        base.len() as u128 * e
    };
    Ok(CollisionCheck {
        count,
        bound_squared,
        bound: (bound_squared as f64).sqrt(),
        holds: (count as u128).pow(2) <= bound_squared,
    })
}

/// Diagnostic for one full cluster of 2M consecutive slopes.
#[derive(Clone, Debug)]
pub struct ClusterDiagnostic {
    pub index: usize,
    pub slope_lo: ExactScalar,
    pub slope_hi: ExactScalar,
    /// Points of (AA+A) x (AA+A) with slope strictly between the extremes.
    pub mu_actual: u128,
    /// tau * |A| * M^2.
    pub main_term: u128,
    /// Sum of collision counts over the quadruple ranges of the cluster.
    pub collision_sum: u128,
    /// mu_actual >= main_term - collision_sum.
    pub holds: bool,
}

/// Cluster analysis over the refined dyadic slope family.
#[derive(Clone, Debug)]
pub struct ClusterAnalysis {
    pub tau: u64,
    pub t0: u64,
    pub m: usize,
    /// Slopes in clustering order (steepest first).
    pub slopes: Vec<ExactScalar>,
    /// Chosen fixed point x-coordinate per slope.
    pub fixed_points: Vec<(ExactScalar, ExactScalar)>,
    pub clusters: Vec<ClusterDiagnostic>,
}

/// Splits the refined dyadic slope family into full clusters of 2M
/// consecutive slopes (steepest first; a trailing partial cluster is
/// dropped) and evaluates the cluster lower bound
/// mu >= tau |A| M^2 - sum of collisions for each one.
pub fn cluster_mu(a: &FiniteSet, m: usize) -> Result<ClusterAnalysis> {
    let decomp = SlopeDecomposition::new(a)?;
    let mut level = decomp.dyadic_select()?;
    let refined = level.refine(&decomp)?;
    let mut slope_ids = refined.member_indices.clone();
    // Steepest-to-shallowest clustering order.
    slope_ids.sort_unstable();
    slope_ids.reverse();
    let nslopes = slope_ids.len();
    if m < 1 || 2 * m > nslopes {
        return Err(Error::InvalidClusterWidth { m, slopes: nslopes });
    }
    let fixed = FixedPoints::minimal(&decomp);
    let aa_a = aa_plus_a(a, &CombineOptions::default())?
        .into_set()
        .ok_or_else(|| Error::ResourceLimit("AA+A too large to materialize".into()))?;

    let tau = level.tau;
    let n = a.len() as u128;
    let mut clusters = Vec::new();
    for (index, chunk) in slope_ids.chunks_exact(2 * m).enumerate() {
        let v_ids = &chunk[..m];
        let w_ids = &chunk[m..];
        // Families F(l1, l2) for l1 in V, l2 in W, cached per cluster.
        let mut families: Vec<Vec<PointSet>> = Vec::with_capacity(m);
        for &vi in v_ids {
            let mut row = Vec::with_capacity(m);
            for &wi in w_ids {
                let l1 = &decomp.entries()[vi].slope;
                let l2 = &decomp.entries()[wi].slope;
                row.push(line_pair_sum(&decomp, l1, l2, fixed.get(l2).unwrap())?);
            }
            families.push(row);
        }
        let mut collision_sum = 0u128;
        for v1 in 0..m {
            for w1 in 0..m {
                for v2 in 0..m {
                    for w2 in 0..m {
                        if (v1, w1) == (v2, w2) {
                            continue;
                        }
                        collision_sum +=
                            intersection_size(&families[v1][w1], &families[v2][w2]) as u128;
                    }
                }
            }
        }
        let slope_hi = decomp.entries()[chunk[0]].slope.clone();
        let slope_lo = decomp.entries()[*chunk.last().unwrap()].slope.clone();
        let mu_actual = count_pairs_strictly_between(&aa_a, &slope_lo, &slope_hi);
        let main_term = tau as u128 * n * (m as u128).pow(2);
        clusters.push(ClusterDiagnostic {
            index,
            slope_lo,
            slope_hi,
            mu_actual,
            main_term,
            collision_sum,
            holds: mu_actual + collision_sum >= main_term,
        });
    }
    Ok(ClusterAnalysis {
        tau,
        t0: level.refined().unwrap().t0,
        m,
        slopes: slope_ids
            .iter()
            .map(|&i| decomp.entries()[i].slope.clone())
            .collect(),
        fixed_points: slope_ids
            .iter()
            .map(|&i| {
                let s = &decomp.entries()[i].slope;
                (s.clone(), fixed.get(s).unwrap().clone())
            })
            .collect(),
        clusters,
    })
}

/// Number of points (u, v) of S x S (S positive, sorted) whose slope v/u is
/// strictly between lo and hi.
fn count_pairs_strictly_between(s: &FiniteSet, lo: &ExactScalar, hi: &ExactScalar) -> u128 {
    let elems = s.elements();
    let mut total = 0u128;
    for u in elems {
        // v in (u*lo, u*hi), exclusive on both ends.
        let vlo = u * lo;
        let vhi = u * hi;
        let start = elems.partition_point(|v| v <= &vlo);
        let end = elems.partition_point(|v| v < &vhi);
        total += (end - start) as u128;
    }
    total
}

/// The size ratios of the two lemma-level lower bounds for |AX+AX|:
/// against |X| |A/A|^(1/2) and against |X| |A/A|^(1/2) K^(1/8), where
/// E_+(X) = |X|^3 / K. Reported, not asserted: the lemmas carry
/// unspecified constants.
#[derive(Clone, Debug)]
pub struct BigratioDiagnostic {
    pub size_axax: u64,
    pub size_ratio_set: u64,
    pub e_plus_x: u128,
    /// K = |X|^3 / E_+(X), exact.
    pub k: ExactScalar,
    pub ratio_balog: f64,
    pub ratio_refined: f64,
}

pub fn bigratio_diagnostic(a: &FiniteSet, x: &FiniteSet) -> Result<BigratioDiagnostic> {
    if !a.all_positive() || !x.all_positive() {
        return Err(Error::SignRestriction);
    }
    let ax = binary_op(BinaryOp::Product, a, x)?;
    let axax = binary_op(BinaryOp::Sum, &ax, &ax)?;
    let ratio_set = binary_op(BinaryOp::Ratio, a, a)?;
    let e_plus_x = energy(EnergyKind::Additive, x, x)?;
    let xs = x.len() as u64;
    let k = ExactScalar::from_u64(xs.pow(3))
        .checked_div(&ExactScalar::from_bigint(num_bigint::BigInt::from(e_plus_x)))?;
    let denom = xs as f64 * (ratio_set.len() as f64).sqrt();
    let ratio_balog = axax.len() as f64 / denom;
    let ratio_refined = ratio_balog / k.to_f64().powf(0.125);
    Ok(BigratioDiagnostic {
        size_axax: axax.len() as u64,
        size_ratio_set: ratio_set.len() as u64,
        e_plus_x,
        k,
        ratio_balog,
        ratio_refined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn set(vals: &[i64]) -> FiniteSet {
        FiniteSet::from_ints(vals).unwrap()
    }

    fn rat(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(BigInt::from(n), BigInt::from(d)).unwrap()
    }

    fn masses(d: &SlopeDecomposition) -> Vec<(ExactScalar, u64)> {
        d.entries()
            .iter()
            .map(|e| (e.slope.clone(), e.mass()))
            .collect()
    }

    #[test]
    fn decomposition_examples() {
        let d = SlopeDecomposition::new(&set(&[1, 2])).unwrap();
        assert_eq!(
            masses(&d),
            vec![(rat(1, 2), 1), (rat(1, 1), 2), (rat(2, 1), 1)]
        );
        assert_eq!(d.mass(), 4);

        let d = SlopeDecomposition::new(&set(&[7])).unwrap();
        assert_eq!(masses(&d), vec![(rat(1, 1), 1)]);

        let d = SlopeDecomposition::new(&set(&[1, 2, 4])).unwrap();
        assert_eq!(
            masses(&d),
            vec![
                (rat(1, 4), 1),
                (rat(1, 2), 2),
                (rat(1, 1), 3),
                (rat(2, 1), 2),
                (rat(4, 1), 1)
            ]
        );
        assert_eq!(d.mass(), 9);
    }

    #[test]
    fn decomposition_requires_positivity() {
        assert!(matches!(
            SlopeDecomposition::new(&set(&[-1, 2])),
            Err(Error::SignRestriction)
        ));
        assert!(matches!(
            SlopeDecomposition::new(&set(&[0, 2])),
            Err(Error::SignRestriction)
        ));
        // Negative sets are handled by the caller passing -A.
        assert!(SlopeDecomposition::new(&set(&[-3, -1]).negate()).is_ok());
    }

    #[test]
    fn dyadic_select_examples() {
        let d = SlopeDecomposition::new(&set(&[1, 2, 4])).unwrap();
        let level = d.dyadic_select().unwrap();
        assert_eq!(level.tau, 2);
        assert_eq!(level.mass, 7);
        let slopes: Vec<_> = level.slopes(&d).into_iter().cloned().collect();
        assert_eq!(slopes, vec![rat(1, 2), rat(1, 1), rat(2, 1)]);
        assert!(level.meets_mass_guarantee(&d));

        // Tie on mass 2 between tau=1 and tau=2 resolves to tau=2.
        let d = SlopeDecomposition::new(&set(&[1, 2])).unwrap();
        let level = d.dyadic_select().unwrap();
        assert_eq!(level.tau, 2);
        assert_eq!(level.mass, 2);

        let d = SlopeDecomposition::new(&set(&[9])).unwrap();
        assert!(matches!(d.dyadic_select(), Err(Error::Degenerate)));
    }

    #[test]
    fn refine_selects_t0() {
        let d = SlopeDecomposition::new(&set(&[1, 2, 4])).unwrap();
        let mut level = d.dyadic_select().unwrap();
        let refined = level.refine(&d).unwrap();
        // |A A_lambda| is 4, 5, 4 for slopes 1/2, 1, 2: all in class t0 = 1.
        assert_eq!(refined.t0, 1);
        assert_eq!(refined.member_indices.len(), 3);
    }

    #[test]
    fn line_pair_sum_example() {
        let d = SlopeDecomposition::new(&set(&[1, 2])).unwrap();
        let pts = line_pair_sum(&d, &rat(1, 1), &rat(2, 1), &rat(1, 1)).unwrap();
        let expect: Vec<PlanarPoint> = [(2, 3), (3, 4), (3, 5), (4, 6)]
            .iter()
            .map(|&(x, y)| PlanarPoint {
                x: ExactScalar::from_int(x),
                y: ExactScalar::from_int(y),
            })
            .collect();
        assert_eq!(pts, expect);
        // 4 = |A_1| * |A| points, slopes strictly inside (1, 2).
        assert_eq!(pts.len(), 2 * 2);
        for p in &pts {
            let slope = &p.y / &p.x;
            assert!(slope > rat(1, 1) && slope < rat(2, 1));
        }
    }

    #[test]
    fn line_pair_sum_rejects_bad_input() {
        let d = SlopeDecomposition::new(&set(&[1, 2])).unwrap();
        assert!(matches!(
            line_pair_sum(&d, &rat(1, 1), &rat(1, 1), &rat(1, 1)),
            Err(Error::InvalidPair(_))
        ));
        assert!(matches!(
            line_pair_sum(&d, &rat(1, 1), &rat(3, 1), &rat(1, 1)),
            Err(Error::InvalidPair(_))
        ));
        // x=2 is not on the slope-2 line (A_2 = {1}).
        assert!(matches!(
            line_pair_sum(&d, &rat(1, 1), &rat(2, 1), &rat(2, 1)),
            Err(Error::InvalidPair(_))
        ));
    }

    #[test]
    fn balog_chain_example() {
        let c = balog_chain(&set(&[1, 2])).unwrap();
        assert_eq!(c.lhs_squared, 25);
        assert_eq!(c.rhs, 7); // 1*|{1,2,4}| + 2*|{1,2}| = 3 + 4
        assert!(c.holds);

        let c = balog_chain(&set(&[5])).unwrap();
        assert_eq!((c.lhs_squared, c.rhs), (1, 0));
        assert!(c.holds);
    }

    #[test]
    fn collision_disjoint_wedges_are_empty() {
        // Slopes of {1,2,4}: 1/4 < 1/2 < 1 < 2 < 4; wedges (1/4,1/2) and
        // (2,4) cannot intersect.
        let a = set(&[1, 2, 4]);
        let d = SlopeDecomposition::new(&a).unwrap();
        let fixed = FixedPoints::minimal(&d);
        let quad = SlopeQuadruple {
            l1: rat(1, 4),
            l2: rat(1, 2),
            l3: rat(2, 1),
            l4: rat(4, 1),
        };
        let c = collision_count(&d, &quad, &fixed).unwrap();
        assert_eq!(c.count, 0);
        assert!(c.holds);
    }

    #[test]
    fn collision_rejects_invalid_quadruples() {
        let a = set(&[1, 2, 4]);
        let d = SlopeDecomposition::new(&a).unwrap();
        let fixed = FixedPoints::minimal(&d);
        let bad = |l1, l2, l3, l4| {
            matches!(
                collision_count(
                    &d,
                    &SlopeQuadruple {
                        l1,
                        l2,
                        l3,
                        l4
                    },
                    &fixed
                ),
                Err(Error::InvalidQuadruple(_))
            )
        };
        assert!(bad(rat(1, 1), rat(1, 1), rat(2, 1), rat(4, 1))); // l1 == l2
        assert!(bad(rat(1, 1), rat(2, 1), rat(1, 1), rat(2, 1))); // same family
        assert!(bad(rat(1, 1), rat(2, 1), rat(1, 2), rat(1, 1))); // l4 == l1
        assert!(bad(rat(7, 1), rat(2, 1), rat(1, 2), rat(1, 1))); // not a slope
    }

    #[test]
    fn cluster_mu_example() {
        let analysis = cluster_mu(&set(&[1, 2, 4]), 1).unwrap();
        assert_eq!(analysis.tau, 2);
        assert_eq!(analysis.clusters.len(), 1);
        let c = &analysis.clusters[0];
        // Cluster is {2, 1} in steepest-first order; M=1 means no valid
        // quadruples, so the bound is tau*|A| = 6.
        assert_eq!(c.main_term, 6);
        assert_eq!(c.collision_sum, 0);
        assert_eq!(c.mu_actual, 26);
        assert!(c.holds);

        assert!(matches!(
            cluster_mu(&set(&[1, 2, 4]), 2),
            Err(Error::InvalidClusterWidth { .. })
        ));
    }

    #[test]
    fn bigratio_example() {
        let a = set(&[1, 2]);
        let diag = bigratio_diagnostic(&a, &a).unwrap();
        assert_eq!(diag.size_axax, 6);
        assert_eq!(diag.size_ratio_set, 3);
        assert_eq!(diag.e_plus_x, 6);
        assert_eq!(diag.k, rat(8, 6));
        assert!((diag.ratio_balog - 6.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
        let expect = 6.0 / (2.0 * 3f64.sqrt()) / (8f64 / 6.0).powf(0.125);
        assert!((diag.ratio_refined - expect).abs() < 1e-12);

        // Singleton X: K = 1, the refined ratio equals the plain one.
        let x = set(&[3]);
        let diag = bigratio_diagnostic(&a, &x).unwrap();
        assert_eq!(diag.k, rat(1, 1));
        assert!((diag.ratio_balog - diag.ratio_refined).abs() < 1e-12);
    }
}
