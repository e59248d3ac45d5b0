//! Interval exchange transformations of `[0,1)` with exact rational data.
//!
//! An exchange is stored both as the user-facing `(lengths, permutation)`
//! pair and as pieces `[start, end) -> [start + shift, end + shift)` in
//! domain order. `permutation[i]` is the slot that interval `i` occupies in
//! the image, so `[1, 0]` swaps two intervals.
//!
//! Adjacent pieces that translate by the same amount are always merged, which
//! makes the representation canonical: two exchanges are equal iff they agree
//! as maps off a finite set.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};

/// Iteration horizon divisor for rational stand-ins of irrational rotations.
pub const ALIAS_SAFETY_FACTOR: u64 = 1000;

/// Hard cap on `|m|` for [`IntervalExchange::power`].
pub const MAX_POWER: u64 = 1_000_000;

/// Tracks how many base iterations an exchange represents (`time`, 1 for the
/// base map), so that powers of a convergent rotation cannot run past
/// `denominator / ALIAS_SAFETY_FACTOR`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasGuard {
    pub denominator: BigInt,
    pub base_intervals: usize,
    pub time: u64,
}

impl AliasGuard {
    pub fn check(&self, time: u64) -> Result<()> {
        let load = BigInt::from(time) * BigInt::from(self.base_intervals) * BigInt::from(ALIAS_SAFETY_FACTOR);
        if load > self.denominator {
            return Err(Error::Aliasing {
                time,
                intervals: self.base_intervals,
                denominator: self.denominator.to_string(),
                safety_factor: ALIAS_SAFETY_FACTOR,
            });
        }
        Ok(())
    }

    /// Largest iteration time the guard admits.
    pub fn horizon(&self) -> BigInt {
        &self.denominator / (BigInt::from(self.base_intervals) * BigInt::from(ALIAS_SAFETY_FACTOR))
    }
}

#[derive(Debug, Clone)]
pub struct IntervalExchange {
    lengths: Vec<ExactRational>,
    permutation: Vec<usize>,
    starts: Vec<ExactRational>,
    shifts: Vec<ExactRational>,
    guard: Option<AliasGuard>,
}

impl PartialEq for IntervalExchange {
    fn eq(&self, other: &Self) -> bool {
        self.lengths == other.lengths && self.permutation == other.permutation
    }
}

impl Eq for IntervalExchange {}

impl IntervalExchange {
    pub fn new(lengths: Vec<ExactRational>, permutation: Vec<usize>) -> Result<Self> {
        let n = lengths.len();
        if n == 0 {
            return Err(Error::validation("interval exchange needs at least one interval"));
        }
        if permutation.len() != n {
            return Err(Error::validation(format!(
                "{n} lengths but permutation of size {}",
                permutation.len()
            )));
        }
        if let Some(i) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(Error::validation(format!("length {i} is not positive")));
        }
        let total: ExactRational = lengths.iter().sum();
        if total != rational::one() {
            return Err(Error::validation(format!(
                "lengths sum to {}, not 1",
                rational::format_rational(&total)
            )));
        }
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p >= n || seen[p] {
                return Err(Error::validation(format!(
                    "permutation {permutation:?} is not a bijection on 0..{n}"
                )));
            }
            seen[p] = true;
        }

        let mut slot_owner = vec![0; n];
        for (i, &s) in permutation.iter().enumerate() {
            slot_owner[s] = i;
        }
        let mut image_start = vec![rational::zero(); n];
        let mut acc = rational::zero();
        for &i in &slot_owner {
            image_start[i] = acc.clone();
            acc += &lengths[i];
        }
        let mut starts = Vec::with_capacity(n);
        let mut acc = rational::zero();
        for l in &lengths {
            starts.push(acc.clone());
            acc += l;
        }
        let shifts: Vec<ExactRational> = image_start.iter().zip(&starts).map(|(im, s)| im - s).collect();
        let ends: Vec<ExactRational> = starts.iter().skip(1).cloned().chain([rational::one()]).collect();
        Ok(Self::from_pieces(starts, ends, shifts, None))
    }

    pub fn identity() -> Self {
        Self::new(vec![rational::one()], vec![0]).expect("identity is valid")
    }

    /// Circle rotation `x -> x + alpha mod 1` as a 2-interval exchange.
    pub fn rotation(alpha: &ExactRational) -> Result<Self> {
        if !alpha.is_positive() || alpha >= &rational::one() {
            return Err(Error::validation("rotation angle must lie in (0,1)"));
        }
        Self::new(vec![rational::one() - alpha, alpha.clone()], vec![1, 0])
    }

    pub fn with_guard(mut self, guard: AliasGuard) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn guard(&self) -> Option<&AliasGuard> {
        self.guard.as_ref()
    }

    /// Pieces in domain order; merges equal-shift neighbours and rebuilds
    /// lengths and permutation.
    fn from_pieces(
        starts: Vec<ExactRational>,
        ends: Vec<ExactRational>,
        shifts: Vec<ExactRational>,
        guard: Option<AliasGuard>,
    ) -> Self {
        let mut ms: Vec<ExactRational> = Vec::with_capacity(starts.len());
        let mut me: Vec<ExactRational> = Vec::with_capacity(starts.len());
        let mut mt: Vec<ExactRational> = Vec::with_capacity(starts.len());
        for ((s, e), t) in starts.into_iter().zip(ends).zip(shifts) {
            if s >= e {
                continue;
            }
            if mt.last() == Some(&t) {
                *me.last_mut().unwrap() = e;
            } else {
                ms.push(s);
                me.push(e);
                mt.push(t);
            }
        }
        let lengths: Vec<ExactRational> = ms.iter().zip(&me).map(|(s, e)| e - s).collect();
        let mut order: Vec<usize> = (0..ms.len()).collect();
        order.sort_by(|&a, &b| (&ms[a] + &mt[a]).cmp(&(&ms[b] + &mt[b])));
        let mut permutation = vec![0; ms.len()];
        for (slot, &i) in order.iter().enumerate() {
            permutation[i] = slot;
        }
        IntervalExchange {
            lengths,
            permutation,
            starts: ms,
            shifts: mt,
            guard,
        }
    }

    pub fn lengths(&self) -> &[ExactRational] {
        &self.lengths
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn interval_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_identity(&self) -> bool {
        self.lengths.len() == 1
    }

    /// Discontinuities (left endpoints of the pieces, including 0).
    pub fn cut_points(&self) -> &[ExactRational] {
        &self.starts
    }

    /// `(start, end, shift)` per piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&ExactRational, ExactRational, &ExactRational)> + '_ {
        (0..self.starts.len()).map(move |i| {
            let end = self.starts.get(i + 1).cloned().unwrap_or_else(rational::one);
            (&self.starts[i], end, &self.shifts[i])
        })
    }

    fn piece_index(&self, x: &ExactRational) -> usize {
        self.starts.partition_point(|s| s <= x) - 1
    }

    pub fn apply(&self, x: &ExactRational) -> Result<ExactRational> {
        if !rational::in_unit_interval(x) {
            return Err(Error::Domain(format!(
                "{} is outside [0,1)",
                rational::format_rational(x)
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &ExactRational) -> ExactRational {
        x + &self.shifts[self.piece_index(x)]
    }

    pub fn inverse(&self) -> Self {
        let mut pieces: Vec<(ExactRational, ExactRational, ExactRational)> = self
            .pieces()
            .map(|(s, e, t)| (s + t, e + t, -t.clone()))
            .collect();
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        let (starts, rest): (Vec<_>, Vec<_>) = pieces.into_iter().map(|(s, e, t)| (s, (e, t))).unzip();
        let (ends, shifts) = rest.into_iter().unzip();
        Self::from_pieces(starts, ends, shifts, self.guard.clone())
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &IntervalExchange) -> Self {
        let mut starts = Vec::new();
        let mut ends = Vec::new();
        let mut shifts = Vec::new();
        for (s, e, tb) in inner.pieces() {
            let img_s = s + tb;
            let img_e = &e + tb;
            // outer pieces meeting [img_s, img_e)
            let mut k = self.piece_index(&img_s);
            let mut cur = img_s;
            while cur < img_e {
                let outer_end = self.starts.get(k + 1).cloned().unwrap_or_else(rational::one);
                let stop = if outer_end < img_e { outer_end } else { img_e.clone() };
                starts.push(&cur - tb);
                ends.push(&stop - tb);
                shifts.push(tb + &self.shifts[k]);
                cur = stop;
                k += 1;
            }
        }
        Self::from_pieces(starts, ends, shifts, combine_guards(&self.guard, &inner.guard))
    }

    /// `m`-fold iterate by repeated composition with the base map (or its
    /// inverse for negative `m`).
    pub fn power(&self, m: i64) -> Result<Self> {
        let steps = m.unsigned_abs();
        if steps > MAX_POWER {
            return Err(Error::budget("power", steps, MAX_POWER));
        }
        if let Some(g) = &self.guard {
            g.check(g.time * steps)?;
        }
        let step = if m >= 0 { self.clone() } else { self.inverse() };
        let mut acc = IntervalExchange::identity();
        for _ in 0..steps {
            acc = step.compose(&acc);
        }
        acc.guard = self.guard.as_ref().map(|g| AliasGuard {
            time: g.time * steps,
            ..g.clone()
        });
        Ok(acc)
    }

    /// Points `x` with `T(x) = c`; exactly one for `c` in `[0,1)`.
    pub fn preimage(&self, c: &ExactRational) -> ExactRational {
        self.inverse().apply_unchecked(c)
    }

    /// `T^{-1}` of a half-open interval `[a,b)`, as disjoint intervals sorted
    /// by left endpoint.
    pub fn preimage_interval(&self, a: &ExactRational, b: &ExactRational) -> Vec<(ExactRational, ExactRational)> {
        let mut out: Vec<(ExactRational, ExactRational)> = Vec::new();
        for (s, e, t) in self.pieces() {
            let lo = (a - t).max(s.clone());
            let hi = (b - t).min(e);
            if lo < hi {
                out.push((lo, hi));
            }
        }
        out.sort();
        out
    }
}

fn combine_guards(a: &Option<AliasGuard>, b: &Option<AliasGuard>) -> Option<AliasGuard> {
    match (a, b) {
        (Some(x), Some(y)) if x.denominator == y.denominator => Some(AliasGuard {
            time: x.time + y.time,
            ..x.clone()
        }),
        (Some(x), _) => Some(x.clone()),
        (None, y) => y.clone(),
    }
}

/// Iterates `T^0, T^1, T^2, ...` by composing one step at a time, honouring
/// the alias guard of `T`.
pub struct PowerIter {
    step: IntervalExchange,
    current: IntervalExchange,
    next_time: u64,
    end: u64,
}

impl PowerIter {
    /// Powers `0..=max_time`, of `T^{-1}` when `backward`.
    pub fn new(t: &IntervalExchange, max_time: u64, backward: bool) -> Result<Self> {
        if max_time > MAX_POWER {
            return Err(Error::budget("power", max_time, MAX_POWER));
        }
        if let Some(g) = &t.guard {
            g.check(g.time * max_time)?;
        }
        let step = if backward { t.inverse() } else { t.clone() };
        Ok(PowerIter {
            step,
            current: IntervalExchange::identity(),
            next_time: 0,
            end: max_time,
        })
    }
}

impl Iterator for PowerIter {
    type Item = (u64, IntervalExchange);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_time > self.end {
            return None;
        }
        let out = (self.next_time, self.current.clone());
        if self.next_time < self.end {
            self.current = self.step.compose(&self.current);
        }
        self.next_time += 1;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn three_iet() -> IntervalExchange {
        IntervalExchange::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)], vec![2, 1, 0]).unwrap()
    }

    #[test]
    fn identity_apply() {
        assert_eq!(IntervalExchange::identity().apply(&ratio(1, 3)).unwrap(), ratio(1, 3));
    }

    #[test]
    fn rotation_as_two_iet() {
        let a = ratio(2, 7);
        let r = IntervalExchange::rotation(&a).unwrap();
        assert_eq!(r.apply(&ratio(0, 1)).unwrap(), a);
        assert_eq!(r.apply(&ratio(6, 7)).unwrap(), ratio(1, 7));
    }

    #[test]
    fn reversing_three_iet() {
        let t = three_iet();
        assert_eq!(t.apply(&ratio(0, 1)).unwrap(), ratio(1, 2));
        assert_eq!(t.apply(&ratio(1, 2)).unwrap(), ratio(1, 6));
        assert_eq!(t.apply(&ratio(5, 6)).unwrap(), ratio(0, 1));
    }

    #[test]
    fn domain_errors() {
        let t = three_iet();
        assert!(t.apply(&ratio(1, 1)).is_err());
        assert!(t.apply(&ratio(-1, 5)).is_err());
    }

    #[test]
    fn validation() {
        assert!(IntervalExchange::new(vec![ratio(1, 2), ratio(1, 3)], vec![1, 0]).is_err());
        assert!(IntervalExchange::new(vec![ratio(1, 2), ratio(1, 2)], vec![1, 1]).is_err());
        assert!(IntervalExchange::new(vec![ratio(1, 1), ratio(0, 1)], vec![1, 0]).is_err());
        assert!(IntervalExchange::rotation(&ratio(0, 1)).is_err());
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let t = three_iet();
        let id = IntervalExchange::identity();
        assert_eq!(t.compose(&id), t);
        assert_eq!(id.compose(&t), t);
        assert!(t.compose(&t.inverse()).is_identity());
        assert!(t.inverse().compose(&t).is_identity());
    }

    #[test]
    fn rotation_group_law() {
        let a = ratio(1, 5);
        let b = ratio(9, 10);
        let ra = IntervalExchange::rotation(&a).unwrap();
        let rb = IntervalExchange::rotation(&b).unwrap();
        let sum = IntervalExchange::rotation(&rational::frac(&(a + b))).unwrap();
        assert_eq!(ra.compose(&rb), sum);
    }

    #[test]
    fn powers() {
        let t = three_iet();
        assert!(t.power(0).unwrap().is_identity());
        let a = ratio(3, 11);
        let r = IntervalExchange::rotation(&a).unwrap();
        let r5 = r.power(5).unwrap();
        assert_eq!(r5, IntervalExchange::rotation(&rational::frac(&(a.clone() * rational::int(5)))).unwrap());
        let rm = r.power(-2).unwrap();
        assert_eq!(rm.apply(&ratio(0, 1)).unwrap(), rational::frac(&(-a * rational::int(2))));
    }

    #[test]
    fn interval_count_bound() {
        let t = IntervalExchange::new(
            vec![ratio(1, 7), ratio(2, 7), ratio(1, 11), ratio(37, 77)],
            vec![3, 0, 2, 1],
        )
        .unwrap();
        for m in 1..12 {
            let p = t.power(m).unwrap();
            assert!(p.interval_count() <= (m as usize) * 3 + 1);
        }
    }

    #[test]
    fn guard_fires() {
        let g = AliasGuard {
            denominator: BigInt::from(100_000),
            base_intervals: 2,
            time: 1,
        };
        let r = IntervalExchange::rotation(&ratio(3, 100_000)).unwrap().with_guard(g);
        assert!(r.power(50).is_ok());
        assert!(matches!(r.power(51), Err(Error::Aliasing { .. })));
        assert!(PowerIter::new(&r, 51, false).is_err());
    }

    #[test]
    fn power_iter_matches_power() {
        let t = three_iet();
        for (k, p) in PowerIter::new(&t, 7, true).unwrap() {
            assert_eq!(p, t.power(-(k as i64)).unwrap());
        }
    }

    #[test]
    fn preimage_interval_measure() {
        let t = three_iet();
        let pre = t.preimage_interval(&ratio(1, 4), &ratio(3, 4));
        let m: ExactRational = pre.iter().map(|(a, b)| b - a).sum();
        assert_eq!(m, ratio(1, 2));
    }
}
