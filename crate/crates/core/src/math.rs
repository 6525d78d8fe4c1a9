//! Scalar math that works with or without `std` linked.

use num_traits::Float;

pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    Float::exp(x)
}

pub(crate) fn exp_m1(x: f64) -> f64 {
    Float::exp_m1(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    Float::ln(x)
}

pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    Float::sin_cos(x)
}

pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    Float::atan2(y, x)
}
