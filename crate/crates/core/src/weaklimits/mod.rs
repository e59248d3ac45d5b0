//! Correlations `mu(T^-m A ∩ B)` on dyadic test families and the weighted
//! distances built from them.
//!
//! The distance of `T^m` to an operator `S` is
//! `sum_ij w_ij |<T^m 1_Ai, 1_Aj> - <S 1_Ai, 1_Aj>|` with geometric weights
//! `w_ij` on the ordered family. `S` is the projection onto constants
//! (`Theta`), the identity, or an admissible combination
//! `a Theta + sum_k a_k T^{i_k}`.

pub mod correlation;
pub mod distance;
pub mod family;
pub mod scan;

pub use correlation::{correlation, triple_correlation, triple_limit_values, Correlation, WeakOptions};
pub use distance::{
    dist_to_admissible, dist_to_identity, dist_to_theta, AdmissibleSpec, AdmissibleTerm, CorrelationTable, Distance,
    DistanceEngine, TableValues,
};
pub use family::{FamilyShape, TestFamily, TestSet, MAX_DYADIC_DEPTH};
pub use scan::{mixing_time_scan, rigidity_scan, ScanKind, ScanReport, ScanRow};
