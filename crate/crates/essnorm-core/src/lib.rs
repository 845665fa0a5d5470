//! Commuting weighted shifts on the integer lattice: monomial submodules,
//! commutators, edge operators, Schatten shell sums, and the decomposition
//! machinery that splits a submodule into pieces with known compactness
//! mechanisms.
//!
//! The crate is organized around exact lattice-coefficient operator fields:
//! in the normalized monomial basis every operator of interest carries a
//! fixed lattice displacement and a small block per lattice point, so
//! singular values decompose over degree shells and are computed without
//! truncation. A dense brute-force truncation lives in [`oracle`] and
//! cross-checks every closed-form path.

pub mod error;
pub mod lattice;
pub mod linalg;
pub mod submodule;
pub mod weights;

pub mod decomp;
pub mod oracle;
pub mod samuel;
pub mod schatten;
pub mod shiftops;

pub use error::{Error, Result};
pub use lattice::{
    common_zero_coordinates, minimal_generators, shell_all, shell_size, AxisRange, Cell,
    CofiniteDifference, DegreeShell, MultiIndex, MultiSlice, ShiftInvariantSet,
};
pub use linalg::{CMat, C64};
pub use submodule::{FiberPair, Filtration, SubmoduleSpec, VectorSubmodule};
pub use weights::{ConditionVerdict, ExtendPolicy, WeightSet, WeightSpec, CONDITION_TOL};

pub use shiftops::{
    block_split, cross_commutator, edge_gram, edge_gram_on_slice, self_commutator, shift_op,
    BlockSplit, Domain, LatticeOperator, ModuleKind,
};

pub use decomp::{
    audit, corner_reduce, full_reduction, reduce_axis, split_axis, AuditReport, BlockTree,
    Mechanism,
};
pub use oracle::{DenseTruncation, OracleOp};
pub use samuel::{
    block_dimension, cumulative_counts, dimension, quotient_count, threshold_consistency,
    SamuelReport, ThresholdReport,
};
pub use schatten::{
    check_condition, critical_exponent, fit_decay, schatten_partial, shell_series,
    shell_singular_values, verdict, CompactnessVerdict, ConditionKind, ConditionReport, DecayFit,
    ShellEntry, ShellSumSeries, Verdict, DEFAULT_MARGIN, DEFAULT_MAX_DEGREE,
};
