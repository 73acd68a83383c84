//! Angle reduction helpers. Everything is in radians.

use std::f64::consts::{PI, TAU};

/// Reduces `x` into `[0, period)`.
pub fn wrap_positive(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    // rem_euclid can round up to `period` for tiny negative inputs
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Reduces `x` into `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = wrap_positive(x + PI, TAU) - PI;
    if r <= -PI {
        PI
    } else {
        r
    }
}

/// Signed circular difference `x - y` reduced into `[-period/2, period/2)`.
pub fn circular_diff(x: f64, y: f64, period: f64) -> f64 {
    wrap_positive(x - y + 0.5 * period, period) - 0.5 * period
}

/// Unwraps a sequence of angles known modulo `period`, so that consecutive
/// values differ by less than `period / 2`.
pub fn unwrap(values: &[f64], period: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<f64> = None;
    for &v in values {
        let next = match prev {
            None => v,
            Some(p) => p + circular_diff(v, p, period),
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps() {
        assert_eq!(wrap_positive(-1e-20, TAU), 0.0);
        assert!((wrap_positive(-1.0, TAU) - (TAU - 1.0)).abs() < 1e-15);
        assert_eq!(wrap_pi(-PI), PI);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((circular_diff(0.1, PI - 0.1, PI) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let raw = [3.0, 3.1, 0.05, 0.2];
        let u = unwrap(&raw, PI);
        assert!((u[2] - (PI + 0.05)).abs() < 1e-15);
        assert!((u[3] - (PI + 0.2)).abs() < 1e-15);
    }
}
