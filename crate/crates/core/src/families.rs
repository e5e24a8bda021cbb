//! Set families for sweeps: deterministic generators for the structured
//! extremal examples (progressions, squares), seeded random subsets, the
//! primorial construction, and sets loaded from files.

use std::path::PathBuf;

use crate::budget::MemoryBudget;
use crate::construction;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::scalar::ExactScalar;
use crate::set::FiniteSet;
use crate::setfile;

#[derive(Clone, Debug)]
pub enum FamilyKind {
    /// {1, 2, ..., n}
    Interval,
    /// {start, start+step, ...}
    Arithmetic { start: ExactScalar, step: ExactScalar },
    /// {1, r, r^2, ...}
    Geometric { ratio: ExactScalar },
    /// {1, 4, 9, ..., n^2}
    ConvexSquares,
    /// n distinct values from [1, range], from the portable generator.
    RandomSubset { range: u64, seed: u64 },
    /// The primorial construction at its own threshold.
    BalogConstruction,
    /// A fixed set from a file (n is ignored).
    File { path: PathBuf },
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub id: String,
    pub kind: FamilyKind,
}

impl FamilySpec {
    pub fn new(id: impl Into<String>, kind: FamilyKind) -> Self {
        FamilySpec {
            id: id.into(),
            kind,
        }
    }
}

/// Generates the family member of cardinality n. Deterministic for a fixed
/// spec, seed included.
pub fn generate_family(spec: &FamilySpec, n: u64) -> Result<FiniteSet> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    match &spec.kind {
        FamilyKind::Interval => FiniteSet::from_u64s(&(1..=n).collect::<Vec<_>>()),
        FamilyKind::Arithmetic { start, step } => {
            if step.is_zero() {
                return Err(Error::InputFormat {
                    line: 0,
                    msg: format!("family {}: arithmetic step must be nonzero", spec.id),
                });
            }
            let mut values = Vec::with_capacity(n as usize);
            let mut v = start.clone();
            for _ in 0..n {
                values.push(v.clone());
                v = &v + step;
            }
            FiniteSet::new(values)
        }
        FamilyKind::Geometric { ratio } => {
            if ratio.is_zero() || ratio.abs() == ExactScalar::one() {
                return Err(Error::InputFormat {
                    line: 0,
                    msg: format!("family {}: geometric ratio must have |r| != 0, 1", spec.id),
                });
            }
            let mut values = Vec::with_capacity(n as usize);
            let mut v = ExactScalar::one();
            for _ in 0..n {
                values.push(v.clone());
                v = &v * ratio;
            }
            FiniteSet::new(values)
        }
        FamilyKind::ConvexSquares => {
            FiniteSet::from_u64s(&(1..=n).map(|k| k * k).collect::<Vec<_>>())
        }
        FamilyKind::RandomSubset { range, seed } => {
            if *range < n {
                return Err(Error::InputFormat {
                    line: 0,
                    msg: format!(
                        "family {}: range {} cannot hold {} distinct values",
                        spec.id, range, n
                    ),
                });
            }
            let mut rng = SplitMix64::new(*seed);
            FiniteSet::from_u64s(&rng.distinct_from_range(n, *range))
        }
        FamilyKind::BalogConstruction => {
            let params = construction::choose_parameters(n)?;
            construction::construct_set(&params, None)
        }
        FamilyKind::File { path } => setfile::read_set(path),
    }
}

/// Cardinality guard used by sweep cells: generating the member and then
/// measuring it must stay within the budget.
pub fn generate_for_sweep(spec: &FamilySpec, n: u64, _budget: &MemoryBudget) -> Result<FiniteSet> {
    generate_family(spec, n)
}
