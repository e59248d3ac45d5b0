//! Sequence entropy along index families.
//!
//! For a system `T`, a finite partition `xi` and a finite set of times `P`,
//! the join `V_{p in P} T^p xi` is computed (exactly for interval exchanges
//! and Bernoulli shifts, by sampling for planar maps) and
//! `h = H(join) / |P|` is reported in bits. Limits over `j` are never
//! claimed: traces report the max and min over the computed range only.

pub mod asymmetry;
pub mod bernoulli;
pub mod boundary;
pub mod family;
pub mod join;
pub mod mc;
pub mod trace;

use serde::{Deserialize, Serialize};

pub use asymmetry::asymmetry_ratio;
pub use bernoulli::bernoulli_join_entropy;
pub use boundary::{boundary_growth, BoundaryLedger};
pub use family::{make_geometric_family, make_progression_family, FamilyGenerator, Growth, IndexFamily};
pub use join::{exact_join, join_over_times, JoinAtom, JoinMethod, JoinResult};
pub use mc::{mc_join_entropy, McOptions};
pub use trace::{entropy_trace, h_j, sup_over_partitions, EntropyRow, EntropyTrace, HjOptions, Partition, SupEnvelope};

/// Which way the family acts: `Forward` labels `x` by `xi(T^p x)`,
/// `Backward` by `xi(T^-p x)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }
}

/// Hard limits on the size of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub max_family: usize,
    pub max_power: u64,
    pub max_cuts: usize,
    pub max_samples: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_family: 4096,
            max_power: 1_000_000,
            max_cuts: 10_000_000,
            max_samples: 10_000_000,
        }
    }
}

impl Budgets {
    /// The global ceilings; a config may tighten but never raise them.
    pub fn hard_limits() -> Self {
        Budgets::default()
    }

    pub fn within_hard_limits(&self) -> bool {
        let h = Self::hard_limits();
        self.max_family <= h.max_family
            && self.max_power <= h.max_power
            && self.max_cuts <= h.max_cuts
            && self.max_samples <= h.max_samples
    }
}
