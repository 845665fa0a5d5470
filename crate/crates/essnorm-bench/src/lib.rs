//! Shared fixtures for the criterion benches.

use essnorm_core::{MultiIndex, ShiftInvariantSet, VectorSubmodule, C64};

/// The planar staircase used across the benches.
pub fn staircase() -> ShiftInvariantSet {
    ShiftInvariantSet::closure(
        2,
        &[
            MultiIndex::new(vec![4, 0]),
            MultiIndex::new(vec![2, 2]),
            MultiIndex::new(vec![0, 5]),
        ],
    )
    .unwrap()
}

/// A multiplicity-3 submodule with mixed activation patterns.
pub fn multiplicity_example() -> VectorSubmodule {
    let gens = vec![
        (
            MultiIndex::new(vec![0, 2]),
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.5), C64::new(0.0, 0.0)],
        ),
        (
            MultiIndex::new(vec![1, 0]),
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.3, 0.0)],
        ),
        (
            MultiIndex::new(vec![3, 1]),
            vec![C64::new(0.2, 0.1), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ),
    ];
    VectorSubmodule::new(2, 3, gens).unwrap()
}
