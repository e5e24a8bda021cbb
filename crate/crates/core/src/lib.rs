//! Exact-arithmetic workbench for sumset/product-set experiments: finite
//! sets of rationals with exact binary operations and energies, the
//! line-through-origin slope machinery with its dyadic and cluster
//! diagnostics, the primorial construction with small |AA + mA|, and a
//! sweep driver that measures families across sizes and fits empirical
//! growth exponents.

mod bitset;
pub mod budget;
pub mod construction;
pub mod energy;
pub mod error;
pub mod families;
pub mod fit;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod set;
pub mod setfile;
pub mod slopes;
pub mod sweep;

pub use budget::MemoryBudget;
pub use error::{Error, Result};
pub use scalar::ExactScalar;
pub use set::{
    aa_plus_a, binary_op, combine, max_dilate_identity, BinaryOp, Combined, CombineOptions,
    FiniteSet, SignSummary,
};
pub use energy::{energy, energy_bounds_report, ruzsa_ratio, EnergyKind, EnergyReport};
pub use slopes::{
    balog_chain, bigratio_diagnostic, cluster_mu, collision_count, line_pair_sum,
    SlopeDecomposition,
};
