//! Additive and multiplicative energy and the standard Cauchy-Schwarz
//! lower bounds |A|^4/|A+A|, |A|^4/|A-A|, |A|^4/|AA|, |A|^4/|A/A|.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::set::{binary_op, BinaryOp, FiniteSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyKind {
    Additive,
    Multiplicative,
}

/// Number of quadruples (a, b, a', b') in AxBxAxB with a+b = a'+b'
/// (respectively ab = a'b'), computed as the sum of squared representation
/// counts of A+B (resp. AB).
pub fn energy(kind: EnergyKind, a: &FiniteSet, b: &FiniteSet) -> Result<u128> {
    if kind == EnergyKind::Multiplicative && (a.contains_zero() || b.contains_zero()) {
        return Err(Error::ZeroInMultiplicativeEnergy);
    }
    if let (Some(xs), Some(ys)) = (a.as_i64s(), b.as_i64s()) {
        let mut counts: HashMap<i128, u64> = HashMap::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                let v = match kind {
                    EnergyKind::Additive => x as i128 + y as i128,
                    EnergyKind::Multiplicative => x as i128 * y as i128,
                };
                *counts.entry(v).or_insert(0) += 1;
            }
        }
        return Ok(counts.values().map(|&c| (c as u128) * (c as u128)).sum());
    }
    let mut counts: HashMap<ExactScalar, u64> = HashMap::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            let v = match kind {
                EnergyKind::Additive => x + y,
                EnergyKind::Multiplicative => x * y,
            };
        *counts.entry(v).or_insert(0) += 1;
        }
    }
    Ok(counts.values().map(|&c| (c as u128) * (c as u128)).sum())
}

pub fn additive_energy(a: &FiniteSet) -> u128 {
    energy(EnergyKind::Additive, a, a).expect("additive energy is total")
}

/// Energies of a single set with the four Cauchy-Schwarz lower bounds.
#[derive(Clone, Debug)]
pub struct EnergyReport {
    pub size: u64,
    pub e_plus: u128,
    pub e_mult: u128,
    /// K with E_+(A) = |A|^3 / K, exact.
    pub k_ratio: ExactScalar,
    pub size_sum: u64,
    pub size_diff: u64,
    pub size_prod: u64,
    pub size_ratio: u64,
    pub lb_sum: ExactScalar,
    pub lb_diff: ExactScalar,
    pub lb_prod: ExactScalar,
    pub lb_ratio: ExactScalar,
}

impl EnergyReport {
    /// All four lower bounds hold (they always should; exposed for tests
    /// and report output).
    pub fn bounds_hold(&self) -> bool {
        let ep = ExactScalar::from_bigint(BigInt::from(self.e_plus));
        let em = ExactScalar::from_bigint(BigInt::from(self.e_mult));
        ep >= self.lb_sum && ep >= self.lb_diff && em >= self.lb_prod && em >= self.lb_ratio
    }
}

fn pow4(size: u64) -> ExactScalar {
    let n = BigInt::from(size);
    ExactScalar::from_bigint(&n * &n * &n * &n)
}

/// Both energies of A and the four lower bounds of the classical
/// Cauchy-Schwarz display. Multiplicative parts require 0 not in A.
pub fn energy_bounds_report(a: &FiniteSet) -> Result<EnergyReport> {
    if a.contains_zero() {
        return Err(Error::ZeroInMultiplicativeEnergy);
    }
    let e_plus = energy(EnergyKind::Additive, a, a)?;
    let e_mult = energy(EnergyKind::Multiplicative, a, a)?;
    let size = a.len() as u64;
    let size_sum = binary_op(BinaryOp::Sum, a, a)?.len() as u64;
    let size_diff = binary_op(BinaryOp::Difference, a, a)?.len() as u64;
    let size_prod = binary_op(BinaryOp::Product, a, a)?.len() as u64;
    let size_ratio = binary_op(BinaryOp::Ratio, a, a)?.len() as u64;
    let n4 = pow4(size);
    let div = |den: u64| {
        n4.checked_div(&ExactScalar::from_u64(den))
            .expect("set sizes are nonzero")
    };
    let n3 = ExactScalar::from_bigint(BigInt::from(size) * BigInt::from(size) * BigInt::from(size));
    let k_ratio = n3
        .checked_div(&ExactScalar::from_bigint(BigInt::from(e_plus)))
        .expect("energy is positive");
    Ok(EnergyReport {
        size,
        e_plus,
        e_mult,
        k_ratio,
        size_sum,
        size_diff,
        size_prod,
        size_ratio,
        lb_sum: div(size_sum),
        lb_diff: div(size_diff),
        lb_prod: div(size_prod),
        lb_ratio: div(size_ratio),
    })
}

/// Slack ratio (|A+C||B+C|)/(|A+B||C|) of the Ruzsa triangle inequality;
/// always >= 1.
pub fn ruzsa_ratio(a: &FiniteSet, b: &FiniteSet, c: &FiniteSet) -> ExactScalar {
    let ab = binary_op(BinaryOp::Sum, a, b).expect("sumset is total") .len() as u64;
    let ac = binary_op(BinaryOp::Sum, a, c).expect("sumset is total").len() as u64;
    let bc = binary_op(BinaryOp::Sum, b, c).expect("sumset is total").len() as u64;
    let num = ExactScalar::from_u64(ac) * ExactScalar::from_u64(bc);
    let den = ExactScalar::from_u64(ab) * ExactScalar::from_u64(c.len() as u64);
    num.checked_div(&den).expect("sizes are nonzero")
}
