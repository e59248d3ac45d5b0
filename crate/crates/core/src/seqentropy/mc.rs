//! Monte Carlo join entropy for planar maps.
//!
//! Sample points have exact dyadic coordinates, so every label vector is
//! exact and the only error is statistical. Samples are drawn in fixed-size
//! blocks, block `b` from its own ChaCha stream, so results do not depend on
//! how blocks are scheduled.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::partition::{Label, RectanglePartition};
use crate::rational::ExactRational;
use crate::seqentropy::family::IndexFamily;
use crate::seqentropy::join::{JoinAtom, JoinMethod, JoinResult};
use crate::seqentropy::{Budgets, Direction};
use crate::systems::PlanarMap;

const BOOTSTRAP_STREAM_BASE: u64 = 1 << 40;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    pub bootstrap: usize,
    pub block: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            samples: 10_000,
            seed: 0,
            bootstrap: 200,
            block: 1024,
        }
    }
}

/// Estimate of `H(V_{p in F} T^{±p} xi)` from uniformly sampled points.
///
/// The plug-in entropy gets the Miller–Madow term `(K-1) / (2 n ln 2)`
/// (`K` the observed support); the half-width is `1.96` times the standard
/// deviation of the same estimator over multinomial bootstrap resamples.
pub fn mc_join_entropy<M: PlanarMap>(
    map: &M,
    xi: &RectanglePartition,
    family: &IndexFamily,
    direction: Direction,
    opts: &McOptions,
    budgets: &Budgets,
) -> Result<JoinResult> {
    let times = family.members();
    match direction {
        Direction::Forward => mc_join_over_steps(map, xi, times, opts, budgets),
        Direction::Backward => mc_join_over_steps(&map.inverse_map(), xi, times, opts, budgets),
    }
}

/// Same, for nonnegative step counts given in any order (repeats allowed).
pub fn mc_join_over_steps<M: PlanarMap>(
    map: &M,
    xi: &RectanglePartition,
    steps: &[u64],
    opts: &McOptions,
    budgets: &Budgets,
) -> Result<JoinResult> {
    if steps.is_empty() {
        return Err(Error::validation("join over an empty set of times"));
    }
    if opts.samples < 1000 {
        return Err(Error::validation(format!(
            "Monte Carlo joins need at least 1000 samples, got {}",
            opts.samples
        )));
    }
    if opts.samples > budgets.max_samples {
        return Err(Error::budget("samples", opts.samples as u64, budgets.max_samples as u64));
    }
    if steps.len() > budgets.max_family {
        return Err(Error::budget("family size", steps.len() as u64, budgets.max_family as u64));
    }
    if opts.block == 0 || opts.bootstrap < 2 {
        return Err(Error::validation("block size must be positive and bootstrap at least 2"));
    }
    let max_t = *steps.iter().max().expect("nonempty");
    if max_t > budgets.max_power {
        return Err(Error::budget("largest power", max_t, budgets.max_power));
    }
    let bits = map.sample_bits(max_t);

    let n = opts.samples;
    let blocks = n.div_ceil(opts.block);
    let vectors: Vec<Vec<Label>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(b as u64);
            let count = opts.block.min(n - b * opts.block);
            (0..count)
                .map(|_| {
                    let p = (dyadic_coordinate(&mut rng, bits), dyadic_coordinate(&mut rng, bits));
                    label_vector(map, xi, &p, steps, max_t)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    // atom ids by first appearance
    let mut index: HashMap<&[Label], usize> = HashMap::new();
    let mut ids = Vec::with_capacity(n);
    let mut counts: Vec<u64> = Vec::new();
    let mut firsts: Vec<usize> = Vec::new();
    for (s, v) in vectors.iter().enumerate() {
        let next = index.len();
        let id = *index.entry(v.as_slice()).or_insert(next);
        if id == counts.len() {
            counts.push(0);
            firsts.push(s);
        }
        counts[id] += 1;
        ids.push(id as u32);
    }
    let estimate = miller_madow(&counts, n as u64);

    let k = counts.len();
    let replicates: Vec<f64> = (0..opts.bootstrap)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(BOOTSTRAP_STREAM_BASE + r as u64);
            let mut c = vec![0u64; k];
            for _ in 0..n {
                c[ids[rng.gen_range(0..n)] as usize] += 1;
            }
            miller_madow(&c, n as u64)
        })
        .collect();
    let mean = replicates.iter().sum::<f64>() / replicates.len() as f64;
    let var = replicates.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / (replicates.len() - 1) as f64;

    let atoms = (k * steps.len() <= super::join::MAX_MATERIALIZED_LABELS).then(|| {
        counts
            .iter()
            .zip(&firsts)
            .map(|(&c, &s)| JoinAtom {
                labels: vectors[s].clone(),
                measure: ExactRational::new(BigInt::from(c), BigInt::from(n)),
            })
            .collect()
    });

    Ok(JoinResult {
        method: JoinMethod::MonteCarlo,
        family_size: steps.len(),
        entropy_bits: estimate,
        atom_count: BigUint::from(k),
        ci_half_width: Z95 * var.sqrt(),
        samples: Some(n),
        atoms,
        partition: None,
    })
}

fn miller_madow(counts: &[u64], n: u64) -> f64 {
    let support = counts.iter().filter(|&&c| c > 0).count();
    entropy::entropy_of_counts_f64(counts, n) + (support as f64 - 1.0) / (2.0 * n as f64 * std::f64::consts::LN_2)
}

/// Uniform point of the grid `2^-bits Z` in `[0,1)`.
fn dyadic_coordinate(rng: &mut ChaCha8Rng, bits: u32) -> ExactRational {
    let words = bits.div_ceil(64) as usize;
    let mut digits = Vec::with_capacity(words * 2);
    for _ in 0..words {
        let w = rng.next_u64();
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    let num = BigUint::new(digits);
    let den = BigUint::from(1u8) << (64 * words);
    ExactRational::new(num.into(), den.into())
}

fn label_vector<M: PlanarMap>(
    map: &M,
    xi: &RectanglePartition,
    p: &Point,
    steps: &[u64],
    max_t: u64,
) -> Result<Vec<Label>> {
    let mut at: Vec<Option<Label>> = vec![None; max_t as usize + 1];
    let mut q = p.clone();
    for t in 0..=max_t {
        at[t as usize] = Some(xi.label_at(&q)?);
        if t < max_t {
            q = map.apply(&q)?;
        }
    }
    Ok(steps.iter().map(|&s| at[s as usize].expect("filled")).collect())
}

/// Empirical atom measures of a Monte Carlo join, as exact frequencies.
pub fn empirical_masses(j: &JoinResult) -> Option<Vec<ExactRational>> {
    j.atoms.as_ref().map(|a| a.iter().map(|x| x.measure.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqentropy::family::{make_progression_family, Growth};
    use crate::systems::{Baker, RectangleExchange};

    fn opts(seed: u64) -> McOptions {
        McOptions {
            seed,
            samples: 4000,
            ..McOptions::default()
        }
    }

    #[test]
    fn identity_quadrants_two_bits() {
        let f = make_progression_family(1, Growth::Constant(5), &Budgets::default()).unwrap();
        let j = mc_join_entropy(
            &RectangleExchange::identity(),
            &RectanglePartition::quadrants(),
            &f,
            Direction::Forward,
            &opts(7),
            &Budgets::default(),
        )
        .unwrap();
        assert_eq!(j.atom_count, BigUint::from(4u32));
        assert!((j.entropy_bits - 2.0).abs() < 0.01);
    }

    #[test]
    fn deterministic_for_seed() {
        let f = make_progression_family(1, Growth::Constant(4), &Budgets::default()).unwrap();
        let run = |s| {
            mc_join_entropy(
                &Baker::default(),
                &RectanglePartition::vertical_halves(),
                &f,
                Direction::Forward,
                &opts(s),
                &Budgets::default(),
            )
            .unwrap()
        };
        let (a, b, c) = (run(3), run(3), run(4));
        assert_eq!(a.entropy_bits, b.entropy_bits);
        assert_eq!(a.ci_half_width, b.ci_half_width);
        assert_ne!(a.entropy_bits, c.entropy_bits);
        assert!((a.entropy_bits - 4.0).abs() < 4.0 * a.ci_half_width + 0.05);
    }

    #[test]
    fn baker_sampling_precision_covers_long_families() {
        let f = IndexFamily::explicit(vec![70, 130], &Budgets::default()).unwrap();
        let j = mc_join_entropy(
            &Baker::default(),
            &RectanglePartition::vertical_halves(),
            &f,
            Direction::Forward,
            &opts(1),
            &Budgets::default(),
        )
        .unwrap();
        assert_eq!(j.atom_count, BigUint::from(4u32));
    }

    #[test]
    fn rejects_small_samples() {
        let f = IndexFamily::explicit(vec![1], &Budgets::default()).unwrap();
        let o = McOptions {
            samples: 10,
            ..McOptions::default()
        };
        assert!(mc_join_entropy(
            &Baker::default(),
            &RectanglePartition::vertical_halves(),
            &f,
            Direction::Forward,
            &o,
            &Budgets::default()
        )
        .is_err());
    }
}
