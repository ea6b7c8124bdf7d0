//! The centered cardinal cubic B-spline `B = hat ∗ hat` and its derivatives.

use crate::scalar::Scalar;

/// `B^{(order)}(t)` for `order ≤ 3`.
///
/// The third derivative jumps at the integers; there the limit from the left
/// is returned, matching the tie-break used for nodal gradients.
pub fn cubic_bspline<T: Scalar>(t: T, order: usize) -> T {
    let two = T::of(2.0);
    let a = t.abs();
    if order < 3 && a >= two {
        return T::zero();
    }
    // Sign of t as seen from the left: at t = 0 the left neighbourhood is negative.
    let s = if t > T::zero() { T::one() } else { -T::one() };
    match order {
        0 => {
            if a <= T::one() {
                T::of(2.0 / 3.0) - a * a + a * a * a * T::of(0.5)
            } else {
                let r = two - a;
                r * r * r / T::of(6.0)
            }
        }
        1 => {
            if a <= T::one() {
                -two * t + T::of(1.5) * t * a
            } else {
                let r = two - a;
                -s * r * r * T::of(0.5)
            }
        }
        2 => {
            if a <= T::one() {
                -two + T::of(3.0) * a
            } else {
                two - a
            }
        }
        3 => {
            // Left-limit: classify by the open interval just left of t.
            let in_inner = t > -T::one() && t <= T::one();
            let in_outer = (t > -two && t <= -T::one()) || (t > T::one() && t <= two);
            if in_inner {
                T::of(3.0) * s
            } else if in_outer {
                -s
            } else {
                T::zero()
            }
        }
        _ => T::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knot_values() {
        assert!((cubic_bspline(0.0f64, 0) - 2.0 / 3.0).abs() < 1e-16);
        assert!((cubic_bspline(1.0f64, 0) - 1.0 / 6.0).abs() < 1e-16);
        assert!((cubic_bspline(-1.0f64, 0) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(cubic_bspline(2.0f64, 0), 0.0);
        assert_eq!(cubic_bspline(-2.5f64, 0), 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for i in 0..400 {
            let t = -2.3 + 4.6 * (i as f64 + 0.37) / 400.0;
            if (t.round() - t).abs() < 1e-3 {
                continue;
            }
            for order in 0..3 {
                let fd = (cubic_bspline(t + h, order) - cubic_bspline(t - h, order)) / (2.0 * h);
                let an = cubic_bspline(t, order + 1);
                assert!(
                    (fd - an).abs() < 1e-6,
                    "t={t} order={order} fd={fd} an={an}"
                );
            }
        }
    }

    #[test]
    fn third_derivative_takes_left_limits() {
        assert_eq!(cubic_bspline(0.0f64, 3), -3.0);
        assert_eq!(cubic_bspline(1.0f64, 3), 3.0);
        assert_eq!(cubic_bspline(-1.0f64, 3), 1.0);
        assert_eq!(cubic_bspline(2.0f64, 3), -1.0);
        assert_eq!(cubic_bspline(-2.0f64, 3), 0.0);
    }

    #[test]
    fn partition_of_unity_and_moments() {
        for i in 0..50 {
            let x = i as f64 / 50.0;
            let s0: f64 = (-3..=3).map(|k| cubic_bspline(x - k as f64, 0)).sum();
            let s1: f64 = (-3..=3)
                .map(|k| k as f64 * cubic_bspline(x - k as f64, 0))
                .sum();
            assert!((s0 - 1.0).abs() < 1e-15);
            assert!((s1 - x).abs() < 1e-14);
        }
    }
}
