//! Measure-preserving systems with exact data.

pub mod bernoulli;
pub mod iet;
pub mod rect;
pub mod rotation;

pub use bernoulli::{baker_apply, baker_inverse, baker_label, bernoulli_label, BernoulliSystem, Symbol, SymbolicPoint};
pub use iet::{AliasGuard, IntervalExchange, PowerIter};
pub use rect::{rect_validate, RectangleExchange, TilingError};
pub use rotation::RotationSpec;

use crate::error::Result;
use crate::geometry::Point;

/// Any of the supported systems.
#[derive(Debug, Clone)]
pub enum System {
    Interval(IntervalExchange),
    Rectangle(RectangleExchange),
    Bernoulli(BernoulliSystem),
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::Interval(t) if t.is_identity() => "identity",
            System::Interval(_) => "interval-exchange",
            System::Rectangle(_) => "rectangle-exchange",
            System::Bernoulli(b) if b.has_planar_realization() => "baker",
            System::Bernoulli(_) => "bernoulli",
        }
    }
}

impl From<IntervalExchange> for System {
    fn from(t: IntervalExchange) -> Self {
        System::Interval(t)
    }
}

impl From<RectangleExchange> for System {
    fn from(t: RectangleExchange) -> Self {
        System::Rectangle(t)
    }
}

impl From<BernoulliSystem> for System {
    fn from(b: BernoulliSystem) -> Self {
        System::Bernoulli(b)
    }
}

/// A map of the unit square that can be iterated pointwise.
pub trait PlanarMap: Sync {
    fn apply(&self, p: &Point) -> Result<Point>;

    /// The inverse map.
    fn inverse_map(&self) -> Self
    where
        Self: Sized;

    /// Binary digits per coordinate a uniformly sampled point needs so that
    /// `steps` iterations still see fresh digits.
    fn sample_bits(&self, _steps: u64) -> u32 {
        64
    }
}

impl PlanarMap for RectangleExchange {
    fn apply(&self, p: &Point) -> Result<Point> {
        RectangleExchange::apply(self, p)
    }

    fn inverse_map(&self) -> Self {
        self.inverse()
    }
}

/// The baker's map (or its inverse), planar model of the fair two-symbol
/// shift.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Baker {
    pub inverted: bool,
}

impl PlanarMap for Baker {
    fn apply(&self, p: &Point) -> Result<Point> {
        if self.inverted {
            baker_inverse(p)
        } else {
            baker_apply(p)
        }
    }

    fn inverse_map(&self) -> Self {
        Baker {
            inverted: !self.inverted,
        }
    }

    // each step consumes one binary digit of x (or y for the inverse)
    fn sample_bits(&self, steps: u64) -> u32 {
        let words = steps / 64 + 1;
        (64 * words).min(u32::MAX as u64) as u32
    }
}
