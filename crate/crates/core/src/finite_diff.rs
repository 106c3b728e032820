//! Central finite differences.
//!
//! Fourth-order stencils are used wherever a derivative feeds another
//! computation; second-order ones only where a check is stated at `O(h^2)`.

use std::ops::{Add, Mul, Sub};

/// Default step for fourth-order stencils on O(1)-scaled fields.
pub const FD_STEP: f64 = 1e-3;

/// Fourth-order central difference of `f` at `x` with step `h`.
pub fn derivative4<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let f1 = f(x + h) - f(x - h);
    let f2 = f(x + 2.0 * h) - f(x - 2.0 * h);
    (f1 * 8.0 - f2) * (1.0 / (12.0 * h))
}

/// Second-order central difference.
pub fn derivative2<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Copy + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    (f(x + h) - f(x - h)) * (1.0 / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_is_accurate_for_smooth_functions() {
        let d = derivative4(|x: f64| x.sin(), 0.7, FD_STEP);
        assert!((d - 0.7f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn second_order_error_scales_as_h_squared() {
        let e1 = (derivative2(|x: f64| x.exp(), 0.0, 1e-2) - 1.0).abs();
        let e2 = (derivative2(|x: f64| x.exp(), 0.0, 5e-3) - 1.0).abs();
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }
}
