//! Rational rotations standing in for irrational ones.
//!
//! A rotation number is given by its continued-fraction coefficients
//! `[0; a1, a2, ..., an]`; the last convergent `p/q` is the angle actually
//! used and the earlier denominators are the expected rigidity times.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};
use crate::systems::iet::{AliasGuard, IntervalExchange, ALIAS_SAFETY_FACTOR};

/// Default lower bound on the convergent denominator.
pub const MIN_DENOMINATOR: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationSpec {
    coefficients: Vec<u64>,
    alpha: ExactRational,
    /// `(p_k, q_k)` for every convergent, the last one equal to `alpha`.
    convergents: Vec<(BigInt, BigInt)>,
}

/// Convergents `p_k / q_k` of `[a0; a1, ..., an]`.
pub fn convergents(coefficients: &[u64]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(coefficients.len());
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    for &a in coefficients {
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Continued-fraction coefficients of a nonnegative rational.
pub fn continued_fraction(x: &ExactRational) -> Vec<u64> {
    let mut out = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while !den.is_zero() {
        let a = &num / &den;
        out.push(u64::try_from(a.clone()).unwrap_or(u64::MAX));
        let r = &num - &a * &den;
        num = std::mem::replace(&mut den, r);
    }
    out
}

impl RotationSpec {
    /// From coefficients `[0; a1, ..., an]`; requires `a0 = 0`, every later
    /// coefficient positive, and a final denominator of at least
    /// [`MIN_DENOMINATOR`].
    pub fn from_continued_fraction(coefficients: Vec<u64>) -> Result<Self> {
        Self::with_min_denominator(coefficients, MIN_DENOMINATOR)
    }

    pub fn with_min_denominator(coefficients: Vec<u64>, min_denominator: u64) -> Result<Self> {
        if coefficients.len() < 2 || coefficients[0] != 0 {
            return Err(Error::validation(
                "rotation continued fraction must look like [0; a1, ...] with at least one term after 0",
            ));
        }
        if coefficients[1..].contains(&0) {
            return Err(Error::validation("continued-fraction coefficients after a0 must be positive"));
        }
        let convergents = convergents(&coefficients);
        let (p, q) = convergents.last().cloned().expect("nonempty");
        let alpha = ExactRational::new(p, q.clone());
        if alpha >= rational::one() {
            return Err(Error::validation("rotation number must lie in (0,1)"));
        }
        if q < BigInt::from(min_denominator) {
            return Err(Error::validation(format!(
                "convergent denominator {q} is below the aliasing threshold {min_denominator}"
            )));
        }
        Ok(RotationSpec {
            coefficients,
            alpha,
            convergents,
        })
    }

    /// `[0; 1, 1, ..., 1]` with `ones` ones, i.e. `F_ones / F_{ones+1}`.
    pub fn golden(ones: usize) -> Result<Self> {
        let mut c = vec![0];
        c.extend(std::iter::repeat_n(1, ones));
        Self::from_continued_fraction(c)
    }

    /// From an explicit angle; its own expansion supplies the convergents.
    pub fn from_alpha(alpha: ExactRational) -> Result<Self> {
        Self::from_continued_fraction(continued_fraction(&alpha))
    }

    pub fn alpha(&self) -> &ExactRational {
        &self.alpha
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn denominator(&self) -> &BigInt {
        self.alpha.denom()
    }

    /// Distinct convergent denominators `q_1 < q_2 < ...` (the leading
    /// duplicate `1` of `[0; 1, ...]` is dropped).
    pub fn convergent_denominators(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = Vec::new();
        for (_, q) in &self.convergents {
            if out.last().is_none_or(|l| q > l) {
                out.push(q.clone());
            }
        }
        out
    }

    /// Largest iteration time allowed by the aliasing guard.
    pub fn horizon(&self) -> BigInt {
        self.denominator() / BigInt::from(2 * ALIAS_SAFETY_FACTOR)
    }

    pub fn to_iet(&self) -> IntervalExchange {
        IntervalExchange::rotation(&self.alpha)
            .expect("alpha in (0,1)")
            .with_guard(AliasGuard {
                denominator: self.denominator().clone(),
                base_intervals: 2,
                time: 1,
            })
    }
}
