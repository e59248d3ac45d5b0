//! Entropy asymmetry ratio of a triple join.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::partition::IntervalPartition;
use crate::seqentropy::join::join_over_times;
use crate::seqentropy::{Budgets, Direction};
use crate::systems::IntervalExchange;

/// `H(xi^N ∨ T^m xi^N ∨ T^n xi^N) / H(xi^N)` with `xi^N = V_{k<N} T^k xi`.
///
/// Times follow the join convention of this crate (a point is labeled by
/// `xi(T^t x)`), so the three blocks read times `0..N`, `s m + (0..N)` and
/// `s n + (0..N)` with `s = +1` forward and `-1` backward.
pub fn asymmetry_ratio(
    t: &IntervalExchange,
    xi: &IntervalPartition,
    n_block: u64,
    m: u64,
    n: u64,
    direction: Direction,
    budgets: &Budgets,
) -> Result<f64> {
    if n_block == 0 {
        return Err(Error::validation("block length N must be positive"));
    }
    let block: Vec<i64> = (0..n_block as i64).collect();
    let base = join_over_times(t, xi, &block, budgets)?;
    if base.entropy_bits == 0.0 {
        return Err(Error::Degenerate(
            "H(xi^N) = 0; the ratio is undefined for a one-atom partition".into(),
        ));
    }
    let s = direction.sign();
    let mut times: BTreeSet<i64> = block.iter().copied().collect();
    for shift in [m as i64, n as i64] {
        times.extend(block.iter().map(|k| s * shift + k));
    }
    let times: Vec<i64> = times.into_iter().collect();
    let triple = join_over_times(t, xi, &times, budgets)?;
    Ok(triple.entropy_bits / base.entropy_bits)
}
