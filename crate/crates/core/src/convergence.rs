//! Observed convergence orders under uniform refinement.

/// `log(e_k / e_{k+1}) / log(ratio)` for consecutive errors.
pub fn observed_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).ln() / ratio.ln())
        .collect()
}

/// Smallest observed order, or NaN with fewer than two errors.
pub fn worst_order(errors: &[f64], ratio: f64) -> f64 {
    observed_orders(errors, ratio)
        .into_iter()
        .fold(f64::NAN, f64::min)
}

/// Smallest and largest observed orders.
pub fn order_range(errors: &[f64], ratio: f64) -> (f64, f64) {
    let o = observed_orders(errors, ratio);
    (
        o.iter().copied().fold(f64::NAN, f64::min),
        o.iter().copied().fold(f64::NAN, f64::max),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sequence() {
        let e = [1.0, 0.25, 0.0625];
        assert_eq!(observed_orders(&e, 2.0), vec![2.0, 2.0]);
        assert_eq!(worst_order(&e, 2.0), 2.0);
        assert!(worst_order(&[1.0], 2.0).is_nan());
        let (lo, hi) = order_range(&[1.0, 0.5, 0.0625], 2.0);
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }
}
