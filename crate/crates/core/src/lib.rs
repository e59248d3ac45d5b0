//! Sequence entropy and weak-limit diagnostics for exactly represented
//! measure-preserving systems.
//!
//! The crate works with interval exchanges (rotations included), rectangle
//! exchanges of the unit square and Bernoulli shifts (with the baker's map as
//! planar model of the fair coin). All coordinates and measures are exact
//! rationals; floating point only appears when an entropy or a weighted
//! distance is finally reported.
//!
//! * [`seqentropy`]: `h_j(T, xi) = H(join of T^p xi over p in P_j) / |P_j|`
//!   along progression and geometric index families, exact joins for
//!   interval exchanges, independence identities for Bernoulli shifts,
//!   Monte Carlo estimates for planar maps and the boundary ledger of
//!   rectangle exchanges.
//! * [`weaklimits`]: correlations `mu(T^-m A ∩ B)` and the weighted
//!   distances of `T^m` to the projection onto constants, to the identity and
//!   to admissible combinations, plus mixing-time and rigidity scans.

pub mod entropy;
pub mod error;
pub mod geometry;
pub mod partition;
pub mod rational;
pub mod seqentropy;
pub mod systems;
pub mod weaklimits;

pub use entropy::{shannon_entropy, ProbabilityVector};
pub use error::{Error, Result};
pub use geometry::{Point, Rect, SegmentSet};
pub use partition::{partition_measures, IntervalPartition, Label, PartitionRef, RectanglePartition};
pub use rational::{parse_rational, ExactRational};
pub use systems::{
    BernoulliSystem, IntervalExchange, RectangleExchange, RotationSpec, SymbolicPoint, System,
};
