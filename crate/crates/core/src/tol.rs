//! Shared numerical tolerances.
//!
//! Every tolerance-sensitive predicate in this crate is parameterized by a
//! single [`Tolerances`] record so that test suites can tighten or corrupt
//! thresholds in one place.

/// Tolerance configuration shared across the crate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Normalization tolerance: a vector is unit iff |‖v‖ − 1| ≤ `norm`.
    pub norm: f64,
    /// Hermiticity tolerance: max |H − H†| entrywise.
    pub herm: f64,
    /// Positive-semidefiniteness slack: smallest eigenvalue ≥ −`psd`.
    pub psd: f64,
    /// Classification tolerance for distinguishability verdicts.
    pub class: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm: 1e-10,
            herm: 1e-10,
            psd: 1e-9,
            class: 1e-8,
        }
    }
}

/// Maximum total Hilbert-space dimension for any constructed object.
///
/// Desk-scale verification only; products exceeding this are rejected.
pub const MAX_DIM: usize = 4096;
