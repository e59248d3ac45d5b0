//! Bernoulli shifts, realized symbolically, and the baker's map as the
//! planar model of the fair two-symbol shift.
//!
//! Coordinates follow the shift convention `(T w)_i = w_{i+1}`. In the baker
//! model a point `(x, y)` with binary digits `x = 0.b1 b2 ...` and
//! `y = 0.c1 c2 ...` corresponds to `w_i = b_{i+1}` for `i >= 0` and
//! `w_{-i} = c_i` for `i >= 1`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entropy::{shannon_entropy, ProbabilityVector};
use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::rational::{self, ExactRational};

pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliSystem {
    masses: ProbabilityVector,
}

impl BernoulliSystem {
    pub fn new(masses: ProbabilityVector) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::validation("a Bernoulli system needs at least two symbols"));
        }
        Ok(BernoulliSystem { masses })
    }

    pub fn fair() -> Self {
        BernoulliSystem {
            masses: ProbabilityVector::uniform(2).expect("k=2"),
        }
    }

    pub fn masses(&self) -> &ProbabilityVector {
        &self.masses
    }

    pub fn symbol_count(&self) -> usize {
        self.masses.len()
    }

    pub fn mass(&self, s: Symbol) -> &ExactRational {
        &self.masses.entries()[s as usize]
    }

    /// Entropy of one coordinate, in bits.
    pub fn symbol_entropy(&self) -> f64 {
        shannon_entropy(&self.masses)
    }

    /// The baker's map is available only for the fair coin.
    pub fn has_planar_realization(&self) -> bool {
        self.masses.len() == 2 && self.masses.entries().iter().all(|p| p == &rational::ratio(1, 2))
    }

    /// Product measure of a cylinder given as `(coordinate, symbol)` pairs;
    /// zero if the same coordinate is pinned to two symbols.
    pub fn cylinder_measure(&self, constraints: &[(i64, Symbol)]) -> ExactRational {
        let mut sorted: Vec<(i64, Symbol)> = constraints.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return rational::zero();
        }
        sorted.iter().map(|&(_, s)| self.mass(s).clone()).product()
    }

    fn thresholds(&self) -> Vec<u128> {
        // symbol s is drawn when u < ceil(cum_s * 2^64)
        let scale: BigInt = BigInt::one() << 64usize;
        let mut cum = rational::zero();
        self.masses
            .entries()
            .iter()
            .map(|p| {
                cum += p;
                let v = (&cum * ExactRational::from_integer(scale.clone())).ceil();
                v.to_integer().to_u128().expect("at most 2^64")
            })
            .collect()
    }
}

/// A point of the two-sided shift space, materialized lazily.
///
/// `Random` points draw coordinates from two seeded streams (one per
/// direction), so the symbol at a coordinate never depends on the order in
/// which coordinates are requested.
#[derive(Debug, Clone)]
pub enum SymbolicPoint {
    Constant(Symbol),
    Random(RandomPoint),
}

#[derive(Debug, Clone)]
pub struct RandomPoint {
    forward: Vec<Symbol>,
    backward: Vec<Symbol>,
    forward_rng: ChaCha8Rng,
    backward_rng: ChaCha8Rng,
    thresholds: Vec<u128>,
}

impl SymbolicPoint {
    pub fn constant(s: Symbol) -> Self {
        SymbolicPoint::Constant(s)
    }

    pub fn random(system: &BernoulliSystem, seed: u64) -> Self {
        let mut forward_rng = ChaCha8Rng::seed_from_u64(seed);
        forward_rng.set_stream(0);
        let mut backward_rng = ChaCha8Rng::seed_from_u64(seed);
        backward_rng.set_stream(1);
        SymbolicPoint::Random(RandomPoint {
            forward: Vec::new(),
            backward: Vec::new(),
            forward_rng,
            backward_rng,
            thresholds: system.thresholds(),
        })
    }

    /// Symbol at coordinate `t`; the materialized window grows as needed.
    pub fn symbol(&mut self, t: i64) -> Symbol {
        match self {
            SymbolicPoint::Constant(s) => *s,
            SymbolicPoint::Random(p) => {
                let (buf, rng, idx) = if t >= 0 {
                    (&mut p.forward, &mut p.forward_rng, t as usize)
                } else {
                    (&mut p.backward, &mut p.backward_rng, (-t - 1) as usize)
                };
                while buf.len() <= idx {
                    let u = rng.next_u64() as u128;
                    let s = p.thresholds.partition_point(|&th| th <= u) as Symbol;
                    buf.push(s);
                }
                buf[idx]
            }
        }
    }

    pub fn window(&self) -> (usize, usize) {
        match self {
            SymbolicPoint::Constant(_) => (0, 0),
            SymbolicPoint::Random(p) => (p.backward.len(), p.forward.len()),
        }
    }
}

/// Label of the generating partition (symbol at coordinate 0) at time `t`,
/// i.e. the coordinate-`t` symbol of the point.
pub fn bernoulli_label(point: &mut SymbolicPoint, t: i64) -> Symbol {
    point.symbol(t)
}

/// Baker's map `(x, y) -> (2x mod 1, (y + floor(2x)) / 2)`.
pub fn baker_apply(p: &Point) -> Result<Point> {
    check_square(p)?;
    let two = rational::int(2);
    let x2 = &p.0 * &two;
    let bit = x2.floor();
    Ok((x2 - &bit, (&p.1 + bit) / two))
}

/// Inverse baker map `(x, y) -> ((x + floor(2y)) / 2, 2y mod 1)`.
pub fn baker_inverse(p: &Point) -> Result<Point> {
    check_square(p)?;
    let two = rational::int(2);
    let y2 = &p.1 * &two;
    let bit = y2.floor();
    Ok(((&p.0 + &bit) / two, y2 - bit))
}

fn check_square(p: &Point) -> Result<()> {
    if rational::in_unit_interval(&p.0) && rational::in_unit_interval(&p.1) {
        Ok(())
    } else {
        Err(Error::Domain("point outside the unit square".into()))
    }
}

/// Vertical-halves label of `B^t(p)`: 0 on `x < 1/2`, 1 otherwise.
pub fn baker_label(p: &Point, t: i64) -> Result<Symbol> {
    let mut q = p.clone();
    for _ in 0..t.unsigned_abs() {
        q = if t >= 0 { baker_apply(&q)? } else { baker_inverse(&q)? };
    }
    Ok(if q.0 < rational::ratio(1, 2) { 0 } else { 1 })
}

/// The cylinder that a dyadic rectangle corresponds to in the baker model.
///
/// `[k/2^a, (k+1)/2^a) x [l/2^b, (l+1)/2^b)` pins coordinates `0..a` to the
/// binary digits of `k` and `-1..=-b` to those of `l`. Returns `None` for
/// rectangles that are not dyadic.
pub fn dyadic_rect_cylinder(r: &Rect) -> Option<Vec<(i64, Symbol)>> {
    let (k, a) = dyadic_cell(&r.x0, &r.x1)?;
    let (l, b) = dyadic_cell(&r.y0, &r.y1)?;
    let mut out = Vec::with_capacity((a + b) as usize);
    for i in 0..a {
        out.push((i as i64, ((k >> (a - 1 - i)) & 1) as Symbol));
    }
    for i in 0..b {
        out.push((-(i as i64) - 1, ((l >> (b - 1 - i)) & 1) as Symbol));
    }
    Some(out)
}

/// `[k/2^a, (k+1)/2^a)` -> `(k, a)`.
pub(crate) fn dyadic_cell(lo: &ExactRational, hi: &ExactRational) -> Option<(u64, u32)> {
    let w = hi - lo;
    if !w.numer().is_one() {
        return None;
    }
    let d = w.denom();
    if !(d & (d - BigInt::one())).is_zero() {
        return None;
    }
    let a = (d.bits() - 1) as u32;
    if a > 62 {
        return None;
    }
    let k = lo * ExactRational::from_integer(d.clone());
    if !k.is_integer() {
        return None;
    }
    Some((k.to_integer().to_u64()?, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn constant_point() {
        let mut p = SymbolicPoint::constant(0);
        for t in [-5, 0, 3, 100] {
            assert_eq!(bernoulli_label(&mut p, t), 0);
        }
    }

    #[test]
    fn random_point_is_order_independent() {
        let b = BernoulliSystem::fair();
        let mut p = SymbolicPoint::random(&b, 42);
        let mut q = SymbolicPoint::random(&b, 42);
        let a: Vec<Symbol> = (-20..20).map(|t| p.symbol(t)).collect();
        let c: Vec<Symbol> = (-20..20).rev().map(|t| q.symbol(t)).rev().collect();
        assert_eq!(a, c);
        assert_eq!(p.window(), (20, 20));
    }

    #[test]
    fn baker_label_reads_binary_digits() {
        // x = 0.1011001 in binary
        let x = ratio(0b1011001, 1 << 7);
        let p = (x, ratio(1, 3));
        let bits = [1, 0, 1, 1, 0, 0, 1];
        for (t, &b) in bits.iter().enumerate() {
            assert_eq!(baker_label(&p, t as i64).unwrap(), b);
        }
    }

    #[test]
    fn baker_inverse_round_trip() {
        let p = (ratio(5, 13), ratio(7, 9));
        assert_eq!(baker_inverse(&baker_apply(&p).unwrap()).unwrap(), p);
        assert_eq!(baker_apply(&baker_inverse(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn cylinder_measures() {
        let b = BernoulliSystem::new(ProbabilityVector::new(vec![ratio(1, 4), ratio(3, 4)]).unwrap()).unwrap();
        assert_eq!(b.cylinder_measure(&[(0, 0), (3, 1)]), ratio(3, 16));
        assert_eq!(b.cylinder_measure(&[(0, 0), (0, 1)]), ratio(0, 1));
        assert_eq!(b.cylinder_measure(&[(2, 1), (2, 1)]), ratio(3, 4));
        assert!(!b.has_planar_realization());
        assert!(BernoulliSystem::fair().has_planar_realization());
    }

    #[test]
    fn dyadic_rect_to_cylinder() {
        let r = Rect::new(ratio(1, 4), ratio(2, 4), ratio(1, 2), ratio(1, 1));
        assert_eq!(dyadic_rect_cylinder(&r), Some(vec![(0, 0), (1, 1), (-1, 1)]));
        let bad = Rect::new(ratio(0, 1), ratio(1, 3), ratio(0, 1), ratio(1, 1));
        assert_eq!(dyadic_rect_cylinder(&bad), None);
        assert_eq!(dyadic_rect_cylinder(&Rect::unit()), Some(vec![]));
    }

    #[test]
    fn skewed_thresholds() {
        let b = BernoulliSystem::new(ProbabilityVector::new(vec![ratio(1, 4), ratio(3, 4)]).unwrap()).unwrap();
        let th = b.thresholds();
        assert_eq!(th, vec![1u128 << 62, 1u128 << 64]);
    }
}
