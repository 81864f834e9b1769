//! Resource caps shared by the search-heavy operations.

/// Caps on the intentionally bounded searches.
///
/// Every operation that enumerates partitions, structures, or term sets takes
/// a `Limits` and reports an explicit error when a cap is hit, so a caller can
/// distinguish "too big" from "no".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest subterm-closed term set the eliminator will decompose.
    pub max_theta: usize,
    /// Ceiling on admissible partitions (and on realized decompositions)
    /// enumerated per elimination step.
    pub max_partitions: u64,
    /// Largest domain size for structure enumeration.
    pub max_model: usize,
    /// Ceiling on the total number of structures any exhaustive enumeration
    /// may visit.
    pub max_structures: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_theta: 12,
            max_partitions: 1_000_000,
            max_model: 6,
            max_structures: 5_000_000,
        }
    }
}
