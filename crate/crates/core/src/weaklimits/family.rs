//! Test families of dyadic sets and their pair weights.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::rational::{self, ExactRational};

/// A test set: an interval of `[0,1)` or a rectangle of the unit square.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TestSet {
    Interval {
        #[serde(with = "rational::serde_str")]
        a: ExactRational,
        #[serde(with = "rational::serde_str")]
        b: ExactRational,
    },
    Rect(Rect),
}

impl TestSet {
    pub fn interval(a: ExactRational, b: ExactRational) -> Self {
        TestSet::Interval { a, b }
    }

    /// Lebesgue measure.
    pub fn lebesgue(&self) -> ExactRational {
        match self {
            TestSet::Interval { a, b } => b - a,
            TestSet::Rect(r) => r.area(),
        }
    }

    /// The set as a rectangle (intervals become vertical strips).
    pub fn as_rect(&self) -> Rect {
        match self {
            TestSet::Interval { a, b } => Rect::new(a.clone(), b.clone(), rational::zero(), rational::one()),
            TestSet::Rect(r) => r.clone(),
        }
    }

    pub fn is_full(&self) -> bool {
        match self {
            TestSet::Interval { a, b } => a == &rational::zero() && b == &rational::one(),
            TestSet::Rect(r) => r == &Rect::unit(),
        }
    }

    fn valid(&self) -> bool {
        match self {
            TestSet::Interval { a, b } => a < b && a >= &rational::zero() && b <= &rational::one(),
            TestSet::Rect(r) => !r.is_degenerate() && r.within_unit_square(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "shape")]
pub enum FamilyShape {
    /// Dyadic intervals of depth `1..=depth`, then `[0,1)`.
    Dyadic1d { depth: u32 },
    /// Dyadic rectangles with `a <= ax` x-digits and `b <= ay` y-digits,
    /// `a + b >= 1`, then the square.
    Dyadic2d { ax: u32, ay: u32 },
    FullSpace,
    Custom,
}

/// Ordered test sets `A_1, ..., A_n` with pair weights
/// `w_ij = 2^-(i+j) / (1 - 2^-n)^2`, which sum to 1.
///
/// Dyadic families list sets coarse to fine with the full space last, so
/// the heaviest weights sit on the coarsest nontrivial sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestFamily {
    pub shape: FamilyShape,
    sets: Vec<TestSet>,
}

pub const MAX_DYADIC_DEPTH: u32 = 12;

impl TestFamily {
    pub fn dyadic_1d(depth: u32) -> Result<Self> {
        if depth == 0 || depth > MAX_DYADIC_DEPTH {
            return Err(Error::validation(format!(
                "test family depth must be in 1..={MAX_DYADIC_DEPTH}, got {depth}"
            )));
        }
        let mut sets = Vec::with_capacity((2usize << depth) - 1);
        for d in 1..=depth {
            for k in 0..(1u64 << d) {
                sets.push(TestSet::interval(rational::dyadic(k, d), rational::dyadic(k + 1, d)));
            }
        }
        sets.push(TestSet::interval(rational::zero(), rational::one()));
        Ok(TestFamily {
            shape: FamilyShape::Dyadic1d { depth },
            sets,
        })
    }

    /// Depth split as `ceil(depth/2)` x-digits and `floor(depth/2)` y-digits.
    pub fn dyadic_2d(depth: u32) -> Result<Self> {
        if depth == 0 || depth > MAX_DYADIC_DEPTH {
            return Err(Error::validation(format!(
                "test family depth must be in 1..={MAX_DYADIC_DEPTH}, got {depth}"
            )));
        }
        let ax = depth.div_ceil(2);
        let ay = depth / 2;
        let mut sets = Vec::new();
        for level in 1..=ax + ay {
            for a in 0..=ax.min(level) {
                let b = level - a;
                if b > ay {
                    continue;
                }
                for l in 0..(1u64 << b) {
                    for k in 0..(1u64 << a) {
                        sets.push(TestSet::Rect(Rect::new(
                            rational::dyadic(k, a),
                            rational::dyadic(k + 1, a),
                            rational::dyadic(l, b),
                            rational::dyadic(l + 1, b),
                        )));
                    }
                }
            }
        }
        sets.push(TestSet::Rect(Rect::unit()));
        Ok(TestFamily {
            shape: FamilyShape::Dyadic2d { ax, ay },
            sets,
        })
    }

    pub fn full_space_only(planar: bool) -> Self {
        let set = if planar {
            TestSet::Rect(Rect::unit())
        } else {
            TestSet::interval(rational::zero(), rational::one())
        };
        TestFamily {
            shape: FamilyShape::FullSpace,
            sets: vec![set],
        }
    }

    /// Caller-chosen sets; the full space must be among them.
    pub fn custom(sets: Vec<TestSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::validation("test family is empty"));
        }
        if let Some(i) = sets.iter().position(|s| !s.valid()) {
            return Err(Error::validation(format!("test set {i} is empty or leaves the unit square")));
        }
        if !sets.iter().any(TestSet::is_full) {
            return Err(Error::validation("test family must contain the full space"));
        }
        let planar = matches!(sets[0], TestSet::Rect(_));
        if sets.iter().any(|s| matches!(s, TestSet::Rect(_)) != planar) {
            return Err(Error::validation("test family mixes intervals and rectangles"));
        }
        Ok(TestFamily {
            shape: FamilyShape::Custom,
            sets,
        })
    }

    pub fn sets(&self) -> &[TestSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.sets[0], TestSet::Rect(_))
    }

    /// Index of the full space.
    pub fn full_index(&self) -> usize {
        self.sets.iter().position(TestSet::is_full).expect("validated")
    }

    /// `(2^n - 1)^2`: `w_ij = 2^(2n - i - j) / (2^n - 1)^2` for 1-based
    /// `i, j`.
    pub fn weight_denominator(&self) -> BigInt {
        let t = (BigInt::one() << self.len()) - 1;
        &t * &t
    }

    /// Exact `w_ij` for 0-based indices.
    pub fn weight(&self, i: usize, j: usize) -> ExactRational {
        let n = self.len();
        let num = BigInt::one() << (2 * n - 2 - i - j);
        ExactRational::new(num, self.weight_denominator())
    }

    pub fn describe(&self) -> String {
        match self.shape {
            FamilyShape::Dyadic1d { depth } => format!("dyadic intervals, depth {depth}, {} sets", self.len()),
            FamilyShape::Dyadic2d { ax, ay } => {
                format!("dyadic rectangles, {ax} x-digits and {ay} y-digits, {} sets", self.len())
            }
            FamilyShape::FullSpace => "full space only".into(),
            FamilyShape::Custom => format!("custom, {} sets", self.len()),
        }
    }
}
