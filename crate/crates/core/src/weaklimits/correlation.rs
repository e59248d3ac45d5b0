//! Correlations `mu(T^-m A ∩ B)` and triple correlations.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::rational::{self, ExactRational};
use crate::seqentropy::Budgets;
use crate::systems::bernoulli::{dyadic_rect_cylinder, Symbol};
use crate::systems::{BernoulliSystem, IntervalExchange, RectangleExchange, System};
use crate::weaklimits::family::TestSet;

const Z95: f64 = 1.959_963_984_540_054;
const SAMPLE_BLOCK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Correlation {
    Exact {
        #[serde(with = "rational::serde_str")]
        value: ExactRational,
    },
    Estimate {
        value: f64,
        half_width: f64,
        samples: usize,
    },
}

impl Correlation {
    pub fn exact(&self) -> Option<&ExactRational> {
        match self {
            Correlation::Exact { value } => Some(value),
            Correlation::Estimate { .. } => None,
        }
    }

    pub fn value_f64(&self) -> f64 {
        match self {
            Correlation::Exact { value } => rational::to_f64(value),
            Correlation::Estimate { value, .. } => *value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeakOptions {
    pub budgets: Budgets,
    /// Sample count for rectangle exchanges.
    pub samples: usize,
    pub seed: u64,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions {
            budgets: Budgets::default(),
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Sorted disjoint half-open intervals.
pub(crate) type IntervalSet = Vec<(ExactRational, ExactRational)>;

pub(crate) fn intersect(a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = (&a[i].0).max(&b[j].0);
        let hi = (&a[i].1).min(&b[j].1);
        if lo < hi {
            out.push((lo.clone(), hi.clone()));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

pub(crate) fn total(s: &IntervalSet) -> ExactRational {
    s.iter().map(|(a, b)| b - a).sum()
}

fn interval_of(set: &TestSet) -> Result<(ExactRational, ExactRational)> {
    match set {
        TestSet::Interval { a, b } => Ok((a.clone(), b.clone())),
        TestSet::Rect(_) => Err(Error::Unsupported("interval exchanges take interval test sets".into())),
    }
}

/// `T^-m A` for an interval exchange `p = T^m`.
fn iet_preimage(p: &IntervalExchange, set: &TestSet) -> Result<IntervalSet> {
    let (a, b) = interval_of(set)?;
    Ok(p.preimage_interval(&a, &b))
}

/// Cylinder constraints of a dyadic test set in the shift model.
pub(crate) fn cylinder_of(set: &TestSet) -> Result<Vec<(i64, Symbol)>> {
    dyadic_rect_cylinder(&set.as_rect())
        .ok_or_else(|| Error::Unsupported("Bernoulli correlations need dyadic test sets".into()))
}

fn shifted(c: &[(i64, Symbol)], m: i64) -> impl Iterator<Item = (i64, Symbol)> + '_ {
    c.iter().map(move |&(k, s)| (k + m, s))
}

fn check_binary(b: &BernoulliSystem) -> Result<()> {
    if b.symbol_count() != 2 {
        return Err(Error::Unsupported(
            "dyadic test sets read binary digits; use a two-symbol Bernoulli system".into(),
        ));
    }
    Ok(())
}

/// `mu(T^-m A ∩ B)`: exact for interval exchanges and Bernoulli shifts
/// (dyadic sets read as cylinders), estimated by sampling for rectangle
/// exchanges.
pub fn correlation(system: &System, a: &TestSet, b: &TestSet, m: i64, opts: &WeakOptions) -> Result<Correlation> {
    match system {
        System::Interval(t) => {
            let p = t.power(m)?;
            let (b0, b1) = interval_of(b)?;
            let v = total(&intersect(&iet_preimage(&p, a)?, &vec![(b0, b1)]));
            Ok(Correlation::Exact { value: v })
        }
        System::Bernoulli(s) => {
            check_binary(s)?;
            let ca = cylinder_of(a)?;
            let cb = cylinder_of(b)?;
            let all: Vec<(i64, Symbol)> = shifted(&ca, m).chain(cb.iter().copied()).collect();
            Ok(Correlation::Exact {
                value: s.cylinder_measure(&all),
            })
        }
        System::Rectangle(t) => {
            let (ra, rb) = (a.as_rect(), b.as_rect());
            sample_fraction(t, m, opts, |p, q| rb.contains(p) && ra.contains(q))
        }
    }
}

/// `mu(A ∩ T^-m A ∩ T^-n A)`.
pub fn triple_correlation(system: &System, a: &TestSet, m: i64, n: i64, opts: &WeakOptions) -> Result<Correlation> {
    if m == n {
        return Err(Error::validation("triple correlation needs m != n"));
    }
    match system {
        System::Interval(t) => {
            let (a0, a1) = interval_of(a)?;
            let base = vec![(a0, a1)];
            let pm = iet_preimage(&t.power(m)?, a)?;
            let pn = iet_preimage(&t.power(n)?, a)?;
            Ok(Correlation::Exact {
                value: total(&intersect(&intersect(&base, &pm), &pn)),
            })
        }
        System::Bernoulli(s) => {
            check_binary(s)?;
            let c = cylinder_of(a)?;
            let all: Vec<(i64, Symbol)> = c.iter().copied().chain(shifted(&c, m)).chain(shifted(&c, n)).collect();
            Ok(Correlation::Exact {
                value: s.cylinder_measure(&all),
            })
        }
        System::Rectangle(t) => {
            let ra = a.as_rect();
            let (tm, tn) = (rect_power_steps(t, m), rect_power_steps(t, n));
            sample_with(opts, move |p| {
                if !ra.contains(p) {
                    return Ok(false);
                }
                Ok(ra.contains(&tm.run(p)?) && ra.contains(&tn.run(p)?))
            })
        }
    }
}

/// Forward and backward limits of `mu(A ∩ T^m A ∩ T^n A)`: `(mu + 2 mu^3) / 3`
/// and `mu^2`.
pub fn triple_limit_values(mu: &ExactRational) -> (ExactRational, ExactRational) {
    let cube = mu * mu * mu;
    ((mu + rational::int(2) * cube) / rational::int(3), mu * mu)
}

/// `m` applications of `T` (or `|m|` of `T^-1`).
pub(crate) struct RectSteps {
    map: RectangleExchange,
    steps: u64,
}

impl RectSteps {
    pub(crate) fn run(&self, p: &Point) -> Result<Point> {
        let mut q = p.clone();
        for _ in 0..self.steps {
            q = self.map.apply(&q)?;
        }
        Ok(q)
    }
}

pub(crate) fn rect_power_steps(t: &RectangleExchange, m: i64) -> RectSteps {
    RectSteps {
        map: if m >= 0 { t.clone() } else { t.inverse() },
        steps: m.unsigned_abs(),
    }
}

fn sample_fraction<F>(t: &RectangleExchange, m: i64, opts: &WeakOptions, hit: F) -> Result<Correlation>
where
    F: Fn(&Point, &Point) -> bool + Sync,
{
    if m.unsigned_abs() > opts.budgets.max_power {
        return Err(Error::budget("power", m.unsigned_abs(), opts.budgets.max_power));
    }
    let steps = rect_power_steps(t, m);
    sample_with(opts, move |p| Ok(hit(p, &steps.run(p)?)))
}

/// Uniform points of the grid `2^-64 Z^2`, block `b` from ChaCha stream `b`.
pub(crate) fn sample_points(opts: &WeakOptions) -> Vec<Vec<Point>> {
    let blocks = opts.samples.div_ceil(SAMPLE_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(blk as u64);
            let count = SAMPLE_BLOCK.min(opts.samples - blk * SAMPLE_BLOCK);
            (0..count)
                .map(|_| (grid64(rng.next_u64()), grid64(rng.next_u64())))
                .collect()
        })
        .collect()
}

fn grid64(u: u64) -> ExactRational {
    ExactRational::new(u.into(), num_bigint::BigInt::from(1u8) << 64usize)
}

fn sample_with<F>(opts: &WeakOptions, hit: F) -> Result<Correlation>
where
    F: Fn(&Point) -> Result<bool> + Sync,
{
    if opts.samples == 0 || opts.samples > opts.budgets.max_samples {
        return Err(Error::budget("samples", opts.samples as u64, opts.budgets.max_samples as u64));
    }
    let blocks = sample_points(opts);
    let hits: usize = blocks
        .par_iter()
        .map(|blk| -> Result<usize> {
            let mut c = 0;
            for p in blk {
                if hit(p)? {
                    c += 1;
                }
            }
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let n = opts.samples as f64;
    let v = hits as f64 / n;
    Ok(Correlation::Estimate {
        value: v,
        half_width: Z95 * (v * (1.0 - v) / n).sqrt(),
        samples: opts.samples,
    })
}
