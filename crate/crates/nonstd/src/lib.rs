//! Exact arithmetic over a single symbolic huge parameter `tau`, the
//! collapse of its monads onto the extended rationals, and the two temporal
//! views (perspective and bird's eye) used to evaluate huge whole histories.

pub mod num;
pub mod views;

pub use num::{
    geometric_sum, geometric_tail, parse_rational, rat, ExtReal, NonStdError, NonStdNum, Rational,
    Residue,
};
pub use views::{
    birdseye_choice_point, birdseye_measure, perspective_choice_point, perspective_class_of,
    perspective_measure, PositionClass, Segment, Segmented, ViewError, ViewKind,
};
