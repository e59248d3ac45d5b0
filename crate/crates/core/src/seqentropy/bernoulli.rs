//! Joins for Bernoulli shifts, from the independence of distinct coordinates.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::entropy;
use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::seqentropy::family::IndexFamily;
use crate::seqentropy::join::{JoinAtom, JoinMethod, JoinResult};
use crate::seqentropy::Direction;
use crate::systems::BernoulliSystem;

/// Atoms are listed only when there are at most this many.
pub const MAX_LISTED_ATOMS: usize = 1 << 14;

/// Coordinates read by the join of `T^{±p} xi_w` over `p` in `times`, where
/// `xi_w` is the partition by the symbols at coordinates `0..window`.
pub fn covered_coordinates(times: &[i64], window: u32) -> BTreeSet<i64> {
    times
        .iter()
        .flat_map(|&t| (0..window as i64).map(move |c| t + c))
        .collect()
}

/// Join of the cylinder partition `xi_w` (symbols at `0..window`; `window =
/// 1` is the generating partition) along a family.
///
/// `xi_w(T^p w)` reads coordinates `p..p+window`, so the join is the
/// partition by the symbols on the union `U` of those windows. Distinct
/// coordinates are independent, hence `H = |U| * H(masses)` and every atom
/// has the product measure of its symbols.
pub fn bernoulli_join_entropy(
    b: &BernoulliSystem,
    family: &IndexFamily,
    window: u32,
    direction: Direction,
) -> Result<JoinResult> {
    let times: Vec<i64> = family.members().iter().map(|&p| direction.sign() * p as i64).collect();
    bernoulli_join_over_times(b, &times, window)
}

pub fn bernoulli_join_over_times(b: &BernoulliSystem, times: &[i64], window: u32) -> Result<JoinResult> {
    if window == 0 {
        return Err(Error::validation("cylinder window must be at least 1"));
    }
    if times.is_empty() {
        return Err(Error::validation("join over an empty set of times"));
    }
    let coords: Vec<i64> = covered_coordinates(times, window).into_iter().collect();
    let support: Vec<(u32, &ExactRational)> = b
        .masses()
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(s, p)| (s as u32, p))
        .collect();
    let k = support.len();
    let atom_count = BigUint::from(k).pow(coords.len() as u32);
    let entropy_bits = coords.len() as f64 * b.symbol_entropy();

    let atoms = if atom_count <= BigUint::from(MAX_LISTED_ATOMS) {
        let n = coords.len();
        let total = k.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            let symbol_at = |c: i64| -> u32 {
                let i = coords.binary_search(&c).expect("covered");
                support[digits[i]].0
            };
            let labels = times
                .iter()
                .map(|&t| {
                    (0..window as i64).fold(0u32, |acc, c| acc * b.symbol_count() as u32 + symbol_at(t + c))
                })
                .collect();
            let measure = digits.iter().fold(rational::one(), |acc, &d| acc * support[d].1);
            out.push(JoinAtom { labels, measure });
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < k {
                    break;
                }
                *d = 0;
            }
        }
        Some(out)
    } else {
        None
    };

    Ok(JoinResult {
        method: JoinMethod::Symbolic,
        family_size: times.len(),
        entropy_bits,
        atom_count,
        ci_half_width: 0.0,
        samples: None,
        atoms,
        partition: None,
    })
}

/// `H` recomputed from the listed atom measures; used to check the
/// closed form.
pub fn entropy_from_atoms(j: &JoinResult) -> Option<f64> {
    let atoms = j.atoms.as_ref()?;
    let masses: Vec<ExactRational> = atoms.iter().map(|a| a.measure.clone()).collect();
    debug_assert!(masses.iter().sum::<ExactRational>().is_one());
    Some(entropy::entropy_of_masses(&masses))
}
