//! Fixtures shared by the benchmarks.

use seqent_core::rational::ratio;
use seqent_core::{IntervalExchange, RotationSpec, System};

pub fn golden_rotation() -> System {
    System::Interval(RotationSpec::golden(40).expect("valid").to_iet())
}

pub fn three_iet() -> IntervalExchange {
    IntervalExchange::new(vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)], vec![2, 1, 0]).expect("valid")
}

/// A 5-interval exchange with unrelated lengths.
pub fn five_iet() -> IntervalExchange {
    IntervalExchange::new(
        vec![ratio(3, 17), ratio(5, 23), ratio(2, 11), ratio(7, 31), ratio(1, 1) - ratio(3, 17) - ratio(5, 23) - ratio(2, 11) - ratio(7, 31)],
        vec![4, 2, 0, 3, 1],
    )
    .expect("valid")
}
