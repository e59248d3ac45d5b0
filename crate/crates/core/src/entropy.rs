//! Shannon entropy of exact probability vectors.
//!
//! Masses stay rational; only the logarithms are evaluated numerically, in
//! double-double arithmetic (about 106 bits), and the sum is rounded to `f64`
//! once at the end.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    #[serde(with = "rational::serde_str_vec")]
    entries: Vec<ExactRational>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<ExactRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation("probability vector is empty"));
        }
        if let Some(i) = entries.iter().position(|p| p.is_negative()) {
            return Err(Error::validation(format!("entry {i} is negative")));
        }
        let total: ExactRational = entries.iter().sum();
        if total != rational::one() {
            return Err(Error::validation(format!(
                "entries sum to {}, not 1",
                rational::format_rational(&total)
            )));
        }
        Ok(ProbabilityVector { entries })
    }

    /// Normalizes nonnegative integer counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u128 = counts.iter().map(|&c| c as u128).sum();
        if total == 0 {
            return Err(Error::validation("all counts are zero"));
        }
        let total = BigInt::from(total);
        Self::new(
            counts
                .iter()
                .map(|&c| ExactRational::new(BigInt::from(c), total.clone()))
                .collect(),
        )
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::validation("uniform vector over zero atoms"));
        }
        Self::new(vec![rational::ratio(1, k as i64); k])
    }

    pub fn entries(&self) -> &[ExactRational] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> usize {
        self.entries.iter().filter(|p| !p.is_zero()).count()
    }
}

/// `-sum p log2 p` in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    entropy_of_masses(p.entries())
}

/// Entropy of rational masses that are already known to form a probability
/// vector. Terms are summed in a canonical (sorted) order so that equal
/// multisets of masses give bit-identical results.
pub(crate) fn entropy_of_masses(masses: &[ExactRational]) -> f64 {
    let mut sorted: Vec<&ExactRational> = masses.iter().filter(|p| !p.is_zero()).collect();
    sorted.sort();
    let mut acc = Dd::ZERO;
    for p in sorted {
        // -p log2 p = p * (log2 den - log2 num)
        let l = log2_int(p.denom()).sub(log2_int(p.numer()));
        acc = acc.add(ratio_dd(p).mul(l));
    }
    let h = acc.to_f64();
    if h < 0.0 {
        0.0
    } else {
        h
    }
}

/// Plug-in entropy of integer counts, in `f64` only. Used inside bootstrap
/// loops where exact masses would be wasted work.
pub(crate) fn entropy_of_counts_f64(counts: &[u64], total: u64) -> f64 {
    let n = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

// ---------------------------------------------------------------------------
// double-double

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

const LN2: Dd = Dd {
    hi: 6.931_471_805_599_453e-1,
    lo: 2.319_046_813_846_299_6e-17,
};

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let s = Dd::quick_two_sum(s.hi, s.lo + t.hi);
        Dd::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Dd::quick_two_sum(p, e)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r.hi / o.hi;
        Dd::quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }

    fn scale(self, e: i32) -> Dd {
        let f = 2f64.powi(e);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `n = m * 2^e` with `m` a double-double in `[1, 2)`.
fn split_int(n: &BigInt) -> (Dd, i64) {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    let shift = bits.saturating_sub(106);
    let top: BigInt = n >> shift;
    let m = top.to_u128().expect("top bits fit in u128");
    let hi = m as f64;
    let lo = (m as i128 - hi as u128 as i128) as f64;
    let mbits = 128 - m.leading_zeros() as i32;
    let mant = Dd { hi, lo }.scale(-(mbits - 1));
    (mant, shift as i64 + (mbits as i64 - 1))
}

/// ln of `m` in `[1, 2)` via `2 atanh((m-1)/(m+1))`.
fn ln_mantissa(m: Dd) -> Dd {
    let one = Dd::from_f64(1.0);
    let s = m.sub(one).div(m.add(one));
    let s2 = s.mul(s);
    let mut term = s;
    let mut acc = Dd::ZERO;
    let mut k = 1.0;
    loop {
        let t = term.div(Dd::from_f64(k));
        acc = acc.add(t);
        if t.hi.abs() < 1e-34 {
            break;
        }
        term = term.mul(s2);
        k += 2.0;
    }
    acc.add(acc)
}

fn log2_int(n: &BigInt) -> Dd {
    let (m, e) = split_int(n);
    ln_mantissa(m).div(LN2).add(Dd::from_f64(e as f64))
}

fn ratio_dd(p: &ExactRational) -> Dd {
    let (mn, en) = split_int(p.numer());
    let (md, ed) = split_int(p.denom());
    mn.div(md).scale((en - ed) as i32)
}
