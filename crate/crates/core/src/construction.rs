//! The explicit family with small |AA + mA|.
//!
//! q is the largest primorial with q^2 < n, m = q^2, and A collects the
//! first n integers x whose count f(x) of distinct prime factors below y
//! clears a threshold. The companion function g caps each prime's
//! contribution at 2, satisfies g(ab) >= f(a) + f(b), and is periodic mod
//! q^2, which reduces the size of AA + mA to a residue-class count times a
//! block count. The exponential-moment identity for 2^g over one block and
//! the Markov bound over residue classes are both checked in exact rational
//! arithmetic.

use num_bigint::BigInt;

use crate::bitset::{union_of_ap_shifts, BitSet};
use crate::budget::MemoryBudget;
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::set::FiniteSet;

/// Logarithm base used in the thresholds. The moment estimates behind the
/// construction are natural-log statements; base 2 is available for
/// sensitivity runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Natural,
    Base2,
}

fn loglog(y: u64, base: LogBase) -> f64 {
    match base {
        LogBase::Natural => (y as f64).ln().ln(),
        LogBase::Base2 => (y as f64).log2().log2(),
    }
}

pub fn primes_below(y: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    for p in 2..y {
        if primes.iter().take_while(|&&q| q * q <= p).all(|&q| p % q != 0) {
            primes.push(p);
        }
    }
    primes
}

/// Count of distinct primes p < y dividing x; periodic with period q.
pub fn f_value(x: u64, y: u64) -> u64 {
    debug_assert!(x >= 1);
    primes_below(y).iter().filter(|&&p| x % p == 0).count() as u64
}

/// Sum over primes p < y of min(v_p(x), 2); periodic with period q^2.
pub fn g_value(x: u64, y: u64) -> u64 {
    debug_assert!(x >= 1);
    primes_below(y)
        .iter()
        .map(|&p| (x % p == 0) as u64 + (x % (p * p) == 0) as u64)
        .sum()
}

/// f(x) for x in 1..=limit, sieved in O(limit log log y).
pub fn f_table(y: u64, limit: u64) -> Vec<u8> {
    let mut f = vec![0u8; limit as usize];
    for p in primes_below(y) {
        let mut i = p;
        while i <= limit {
            f[(i - 1) as usize] += 1;
            i += p;
        }
    }
    f
}

/// g(x) for x in 1..=limit: min(v_p, 2) counts multiples of p and of p^2.
pub fn g_table_up_to(y: u64, limit: u64) -> Vec<u8> {
    let mut g = vec![0u8; limit as usize];
    for p in primes_below(y) {
        let mut i = p;
        while i <= limit {
            g[(i - 1) as usize] += 1;
            i += p;
        }
        let p2 = p * p;
        let mut i = p2;
        while i <= limit {
            g[(i - 1) as usize] += 1;
            i += p2;
        }
    }
    g
}

/// Parameters of the construction at cardinality n.
#[derive(Clone, Debug)]
pub struct ConstructionParams {
    pub n: u64,
    /// Prime bound: the smallest integer with prod(p < y) = q.
    pub y: u64,
    /// The largest primorial with q^2 < n.
    pub q: u64,
    /// The modulus m = q^2.
    pub m: u64,
    /// loglog y - 2 sqrt(loglog y) in the configured base.
    pub theta: f64,
    pub log_base: LogBase,
}

/// Selects the largest primorial q with q^2 < n and derives y, m and theta.
pub fn choose_parameters(n: u64) -> Result<ConstructionParams> {
    choose_parameters_with_base(n, LogBase::Natural)
}

pub fn choose_parameters_with_base(n: u64, log_base: LogBase) -> Result<ConstructionParams> {
    let mut q = 1u64;
    let mut last_prime = 0u64;
    // Primorials grow superexponentially; primes below 64 are more than
    // enough to exhaust the u64 range of q^2.
    for p in primes_below(64) {
        let next = match q.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
        if (next as u128) * (next as u128) >= n as u128 {
            break;
        }
        q = next;
        last_prime = p;
    }
    if last_prime == 0 {
        return Err(Error::NoValidPrimorial(n));
    }
    let y = last_prime + 1;
    let ll = loglog(y, log_base);
    let theta = ll - 2.0 * ll.max(0.0).sqrt();
    Ok(ConstructionParams {
        n,
        y,
        q,
        m: q * q,
        theta,
        log_base,
    })
}

/// The first n integers x with f(x, y) > theta, scanning from x = 1.
/// Fails with DensityFailure if [1, 3n] does not contain n qualifying
/// integers (cannot happen at the paper-value theta, where every block of
/// length q holds at least q/2 of them).
pub fn construct_set(
    params: &ConstructionParams,
    theta_override: Option<f64>,
) -> Result<FiniteSet> {
    let theta = theta_override.unwrap_or(params.theta);
    let n = params.n;
    let limit = 3 * n;
    let primes = primes_below(params.y);
    let mut picked: Vec<u64> = Vec::with_capacity(n as usize);
    for x in 1..=limit {
        let f = primes.iter().filter(|&&p| x % p == 0).count() as f64;
        if f > theta {
            picked.push(x);
            if picked.len() as u64 == n {
                break;
            }
        }
    }
    if (picked.len() as u64) < n {
        return Err(Error::DensityFailure {
            needed: n,
            limit,
            theta,
        });
    }
    FiniteSet::from_u64s(&picked)
}

/// Number of integers in one period (0, q] with f > theta. By periodicity
/// this is the qualifying count of every block (kq, (k+1)q].
pub fn qualifying_per_block(y: u64, theta: f64) -> u64 {
    let q: u64 = primes_below(y).iter().product();
    (1..=q).filter(|&x| f_value(x, y) as f64 > theta).count() as u64
}

/// Exact |AA| and |AA + mA| for a positive integer set.
#[derive(Clone, Copy, Debug)]
pub struct MeasureSizes {
    pub size_aa: u64,
    pub size_aa_plus_ma: u64,
}

/// Measures |AA| and |AA+mA| with bit vectors over the value range.
///
/// AA is marked directly; the union over shifts m*a of the AA indicator is
/// then counted. When A is an arithmetic progression (always the case for
/// the construction at its own theta, where A = {1..n}) the shifts form a
/// progression and the union collapses to O(log |A|) passes.
pub fn exact_measure(a: &FiniteSet, m: u64, budget: &MemoryBudget) -> Result<MeasureSizes> {
    let vals = a.as_u64s().ok_or(Error::SignRestriction)?;
    let amax = *vals.last().unwrap();
    let aa_span = amax as u128 * amax as u128;
    let union_span = aa_span + m as u128 * amax as u128;
    // Working state: the AA indicator plus up to two copies of the union
    // accumulator during the doubling passes.
    if (aa_span + 2 * union_span) / 8 > budget.bytes as u128 {
        return Err(Error::ResourceLimit(format!(
            "bit vectors over [1, {union_span}] exceed the budget; use residue_profile instead"
        )));
    }
    let aa_bits = aa_span as usize;
    let union_bits = union_span as usize;
    // Indicator of AA over values 1..=amax^2 (bit i <-> value i+1).
    let mut aa = BitSet::new(aa_bits);
    for (i, &x) in vals.iter().enumerate() {
        for &y in &vals[i..] {
            aa.set((x * y - 1) as usize);
        }
    }
    let size_aa = aa.count_ones();

    let union = if let Some(step) = common_difference(&vals) {
        // Shifts m*a for a in an AP: one shifted copy at m*a_min, then the
        // doubling union over the remaining progression.
        let base_shift = (m * vals[0]) as usize;
        let mut seed = BitSet::new(aa_bits + base_shift);
        seed.or_shifted(&aa, base_shift);
        if vals.len() == 1 {
            seed
        } else {
            union_of_ap_shifts(&seed, (m * step) as usize, vals.len())
        }
    } else {
        let mut acc = BitSet::new(union_bits);
        for &x in &vals {
            acc.or_shifted(&aa, (m * x) as usize);
        }
        acc
    };
    Ok(MeasureSizes {
        size_aa,
        size_aa_plus_ma: union.count_ones(),
    })
}

fn common_difference(vals: &[u64]) -> Option<u64> {
    if vals.len() < 2 {
        return None;
    }
    let d = vals[1] - vals[0];
    if d > 0 && vals.windows(2).all(|w| w[1] - w[0] == d) {
        Some(d)
    } else {
        None
    }
}

/// Residue classes mod `modulus` hit by AA, computed from the residue set
/// of A alone (at most modulus^2 products), with the exact hit proportion.
pub fn residue_profile(a: &FiniteSet, modulus: u64) -> Result<(u64, ExactScalar)> {
    let vals = a.as_u64s().ok_or(Error::SignRestriction)?;
    assert!(modulus >= 1);
    let mut residues = vec![false; modulus as usize];
    for &x in &vals {
        residues[(x % modulus) as usize] = true;
    }
    let rs: Vec<u64> = (0..modulus).filter(|&r| residues[r as usize]).collect();
    let mut hit = vec![false; modulus as usize];
    for &r in &rs {
        for &s in &rs {
            hit[((r * s) % modulus) as usize] = true;
        }
    }
    let count = hit.iter().filter(|&&h| h).count() as u64;
    let proportion = ExactScalar::from_u64(count)
        .checked_div(&ExactScalar::from_u64(modulus))
        .expect("modulus >= 1");
    Ok((count, proportion))
}

/// g over one full period [1, q^2].
fn g_period_table(y: u64, budget: &MemoryBudget) -> Result<(u64, Vec<u8>)> {
    let q: u64 = primes_below(y).iter().product();
    let len = q
        .checked_mul(q)
        .filter(|&l| l <= budget.bytes)
        .ok_or_else(|| {
            Error::ResourceLimit(format!("block of length q^2 = {}^2 exceeds the budget", q))
        })?;
    Ok((q, g_table_up_to(y, len)))
}

/// Exact identity between the closed product formula
/// prod_(p<y) (1 + 1/p + 2/p^2) and the block average of 2^g.
#[derive(Clone, Debug)]
pub struct MomentCheck {
    pub y: u64,
    pub q: u64,
    pub product_formula: ExactScalar,
    pub block_average: ExactScalar,
    pub equal: bool,
}

pub fn exponential_moment_check(y: u64, budget: &MemoryBudget) -> Result<MomentCheck> {
    let (q, g) = g_period_table(y, budget)?;
    let mut product = ExactScalar::one();
    for p in primes_below(y) {
        let term = ExactScalar::from_ratio(
            BigInt::from(p * p + p + 2),
            BigInt::from(p * p),
        )?;
        product = product * term;
    }
    let sum: u64 = g.iter().map(|&gv| 1u64 << gv).sum();
    let block_average = ExactScalar::from_u64(sum)
        .checked_div(&ExactScalar::from_u64(q * q))
        .expect("q >= 1");
    Ok(MomentCheck {
        y,
        q,
        equal: product == block_average,
        product_formula: product,
        block_average,
    })
}

/// Markov count of residue classes with large g, plus the inclusion check
/// that every class hit by AA at the paper-value theta clears the g
/// threshold (a consequence of g(ab) >= f(a) + f(b)).
#[derive(Clone, Debug)]
pub struct MarkovCheck {
    pub y: u64,
    pub q: u64,
    /// T = 2 loglog y - 4 sqrt(loglog y).
    pub threshold: f64,
    /// Classes r mod q^2 with g(r) > T.
    pub classes_above: u64,
    /// q^2 * product / 2^G with G the smallest integer above T; exact.
    pub markov_bound: ExactScalar,
    pub holds: bool,
    /// Every residue class hit by AA has g > T.
    pub hit_classes_above_threshold: bool,
}

pub fn markov_residue_bound(y: u64, budget: &MemoryBudget) -> Result<MarkovCheck> {
    let ll = loglog(y, LogBase::Natural);
    if ll <= 0.0 {
        return Err(Error::ResourceLimit(format!(
            "loglog {y} is not positive; thresholds need y >= 3"
        )));
    }
    let threshold = 2.0 * ll - 4.0 * ll.sqrt();
    let (q, g) = g_period_table(y, budget)?;
    let gate = threshold.floor() as i64 + 1; // smallest integer > T
    let classes_above = g.iter().filter(|&&gv| (gv as i64) >= gate).count() as u64;

    let product = exponential_moment_check(y, budget)?.product_formula;
    let m2 = ExactScalar::from_u64(q * q);
    let pow_gate = if gate >= 0 {
        ExactScalar::from_bigint(BigInt::from(1) << gate as usize)
    } else {
        ExactScalar::from_ratio(BigInt::from(1), BigInt::from(1) << (-gate) as usize)?
    };
    let markov_bound = (m2 * product)
        .checked_div(&pow_gate)
        .expect("power of two is nonzero");
    let holds = ExactScalar::from_u64(classes_above) <= markov_bound;

    // Inclusion: residues of AA at the paper's theta. A is a sample of the
    // qualifying integers; any qualifying a, b give g(ab) >= f(a)+f(b) > 2
    // theta = T, and g only depends on ab mod q^2. A desk-scale sample
    // suffices; the distinct-residue count stays small enough to square.
    let params = ConstructionParams {
        n: 2048,
        y,
        q,
        m: q * q,
        theta: ll - 2.0 * ll.sqrt(),
        log_base: LogBase::Natural,
    };
    let a = construct_set(&params, None)?;
    let modulus = q * q;
    let mut hit = vec![false; modulus as usize];
    let avals = a.as_u64s().expect("construction sets are positive integers");
    let residues: Vec<u64> = {
        let mut seen = vec![false; modulus as usize];
        for &x in &avals {
            seen[(x % modulus) as usize] = true;
        }
        (0..modulus).filter(|&r| seen[r as usize]).collect()
    };
    for &r in &residues {
        for &s in &residues {
            hit[((r * s) % modulus) as usize] = true;
        }
    }
    let hit_classes_above_threshold = (0..modulus).all(|r| {
        if !hit[r as usize] {
            return true;
        }
        // Representative of the class in [1, q^2].
        let rep = if r == 0 { modulus } else { r };
        (g[(rep - 1) as usize] as f64) > threshold
    });

    Ok(MarkovCheck {
        y,
        q,
        threshold,
        classes_above,
        markov_bound,
        holds,
        hit_classes_above_threshold,
    })
}

/// Full construction run: parameters, the set, and its measurements.
#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub params: ConstructionParams,
    pub set: FiniteSet,
    pub size_aa: u64,
    pub size_aa_plus_ma: u64,
    pub residues_hit: u64,
    pub residue_proportion: ExactScalar,
    /// |AA + mA| / n^2, exact.
    pub normalized: ExactScalar,
}

pub fn construction_report(
    n: u64,
    theta_override: Option<f64>,
    budget: &MemoryBudget,
) -> Result<ConstructionReport> {
    let params = choose_parameters(n)?;
    let set = construct_set(&params, theta_override)?;
    let sizes = exact_measure(&set, params.m, budget)?;
    let (residues_hit, residue_proportion) = residue_profile(&set, params.m)?;
    let normalized = ExactScalar::from_u64(sizes.size_aa_plus_ma)
        .checked_div(&ExactScalar::from_u64(n * n))
        .expect("n >= 1");
    Ok(ConstructionReport {
        params,
        set,
        size_aa: sizes.size_aa,
        size_aa_plus_ma: sizes.size_aa_plus_ma,
        residues_hit,
        residue_proportion,
        normalized,
    })
}

impl ConstructionReport {
    /// Flat key-value text block.
    pub fn to_kv_text(&self) -> String {
        let p = &self.params;
        format!(
            "n = {}\ny = {}\nq = {}\nm = {}\ntheta = {}\nsize_a = {}\na_min = {}\na_max = {}\nsize_aa = {}\nsize_aa_plus_ma = {}\nresidues_hit = {}\nresidue_proportion = {}\nnormalized = {}\n",
            p.n,
            p.y,
            p.q,
            p.m,
            p.theta,
            self.set.len(),
            self.set.min(),
            self.set.max(),
            self.size_aa,
            self.size_aa_plus_ma,
            self.residues_hit,
            self.residue_proportion,
            self.normalized,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_primorials() {
        assert_eq!(primes_below(2), Vec::<u64>::new());
        assert_eq!(primes_below(3), vec![2]);
        assert_eq!(primes_below(13), vec![2, 3, 5, 7, 11]);
        assert_eq!(primes_below(14), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_value(12, 5), 2);
        assert_eq!(f_value(1, 5), 0);
        assert_eq!(f_value(35, 5), 0); // 35 = 5*7, neither below 5
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_value(12, 5), 3); // v2=2 contributes 2, v3=1 contributes 1
        assert_eq!(g_value(1, 5), 0);
        assert_eq!(g_value(50, 5), 1); // v2=1; 5 is not below 5
    }

    #[test]
    fn parameter_selection() {
        let p = choose_parameters(100).unwrap();
        assert_eq!((p.q, p.m, p.y), (6, 36, 4));

        let p = choose_parameters(10).unwrap();
        assert_eq!((p.q, p.m, p.y), (2, 4, 3));
        // ln ln 3 - 2 sqrt(ln ln 3) is about -0.52.
        assert!((p.theta - (-0.519)).abs() < 0.01);

        assert!(matches!(choose_parameters(4), Err(Error::NoValidPrimorial(4))));
        assert!(choose_parameters(5).is_ok());
    }

    #[test]
    fn construct_examples() {
        let p = choose_parameters(10).unwrap();
        assert!(p.theta < 0.0);
        let a = construct_set(&p, None).unwrap();
        assert_eq!(a, FiniteSet::from_u64s(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).unwrap());

        // Override: multiples of 2 or 3 below the f > 1/2 gate.
        let p = ConstructionParams {
            n: 5,
            y: 5,
            q: 6,
            m: 36,
            theta: 0.0,
            log_base: LogBase::Natural,
        };
        let a = construct_set(&p, Some(0.5)).unwrap();
        assert_eq!(a, FiniteSet::from_u64s(&[2, 3, 4, 6, 8]).unwrap());
        assert!(a.max() <= &ExactScalar::from_u64(15)); // A in [1, 3n]

        // A threshold too high to satisfy inside [1, 3n].
        assert!(matches!(
            construct_set(&p, Some(10.0)),
            Err(Error::DensityFailure { .. })
        ));
    }

    #[test]
    fn measure_examples() {
        let b = MemoryBudget::default();
        let s = exact_measure(&FiniteSet::from_u64s(&[1, 2]).unwrap(), 4, &b).unwrap();
        assert_eq!((s.size_aa, s.size_aa_plus_ma), (3, 6));

        let s = exact_measure(&FiniteSet::from_u64s(&[1]).unwrap(), 1, &b).unwrap();
        assert_eq!((s.size_aa, s.size_aa_plus_ma), (1, 1));

        let s = exact_measure(&FiniteSet::from_u64s(&[1, 2, 3]).unwrap(), 2, &b).unwrap();
        assert_eq!((s.size_aa, s.size_aa_plus_ma), (6, 12));

        // Non-progression set takes the direct shift path; same answer as
        // brute force.
        let vals = [1u64, 2, 5, 11, 12];
        let a = FiniteSet::from_u64s(&vals).unwrap();
        let m = 7;
        let s = exact_measure(&a, m, &b).unwrap();
        let mut brute = std::collections::BTreeSet::new();
        let mut brute_aa = std::collections::BTreeSet::new();
        for &x in &vals {
            for &y in &vals {
                brute_aa.insert(x * y);
                for &z in &vals {
                    brute.insert(x * y + m * z);
                }
            }
        }
        assert_eq!(s.size_aa, brute_aa.len() as u64);
        assert_eq!(s.size_aa_plus_ma, brute.len() as u64);
    }

    #[test]
    fn measure_budget_limit() {
        let tiny = MemoryBudget::new(4);
        assert!(matches!(
            exact_measure(&FiniteSet::from_u64s(&[1, 1000]).unwrap(), 4, &tiny),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn residue_profile_examples() {
        let a = FiniteSet::from_u64s(&(1..=10).collect::<Vec<_>>()).unwrap();
        let (hit, prop) = residue_profile(&a, 4).unwrap();
        assert_eq!(hit, 4);
        assert_eq!(prop, ExactScalar::one());

        let (hit, _) = residue_profile(&FiniteSet::from_u64s(&[2, 4]).unwrap(), 4).unwrap();
        assert_eq!(hit, 1);

        let (hit, _) = residue_profile(&FiniteSet::from_u64s(&[1]).unwrap(), 4).unwrap();
        assert_eq!(hit, 1);
    }

    #[test]
    fn moment_check_examples() {
        let b = MemoryBudget::default();
        // y=3: product (1 + 1/2 + 2/4) = 2; g mod 4 is 0,1,0,2 giving
        // (1+2+1+4)/4 = 2.
        let c = exponential_moment_check(3, &b).unwrap();
        assert_eq!(c.product_formula, ExactScalar::from_int(2));
        assert_eq!(c.block_average, ExactScalar::from_int(2));
        assert!(c.equal);

        // y=2: empty product, g identically 0.
        let c = exponential_moment_check(2, &b).unwrap();
        assert_eq!(c.product_formula, ExactScalar::one());
        assert!(c.equal);

        // y=5: product 2 * 14/9 = 28/9 must match the 36-block average.
        let c = exponential_moment_check(5, &b).unwrap();
        assert_eq!(
            c.product_formula,
            ExactScalar::from_ratio(BigInt::from(28), BigInt::from(9)).unwrap()
        );
        assert!(c.equal);
    }

    #[test]
    fn markov_examples() {
        let b = MemoryBudget::default();
        // y=3: threshold is negative, so all 4 classes count and the bound
        // exceeds 4.
        let c = markov_residue_bound(3, &b).unwrap();
        assert!(c.threshold < 0.0);
        assert_eq!(c.classes_above, 4);
        assert!(c.holds);
        assert!(c.hit_classes_above_threshold);

        let c = markov_residue_bound(5, &b).unwrap();
        assert!(c.classes_above <= c.q * c.q);
        assert!(c.holds);
        assert!(c.hit_classes_above_threshold);
    }

    #[test]
    fn report_is_consistent() {
        let b = MemoryBudget::default();
        let r = construction_report(50, None, &b).unwrap();
        assert_eq!(r.params.q, 6);
        assert_eq!(r.set.len(), 50);
        // A in [1, 3n] and AA+mA in [1, 10 n^2].
        assert!(r.set.max() <= &ExactScalar::from_u64(150));
        let blocks = (10u64 * 50 * 50).div_ceil(r.params.m);
        assert!(r.size_aa_plus_ma <= r.residues_hit * blocks);
        let text = r.to_kv_text();
        assert!(text.contains("q = 6") && text.contains("size_aa_plus_ma"));
    }
}
