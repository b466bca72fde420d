//! Small order-statistics helpers shared by the benchmark summaries.

/// Interpolated quantile (the "linear" convention: the sample at fractional
/// rank `q * (n - 1)` with linear interpolation between neighbors). The
/// input must be sorted and non-empty, `q` in `[0, 1]`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q), "quantile fraction {q} outside [0, 1]");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Median of an unsorted sample.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of an empty sample");
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quartiles_interpolate_between_order_statistics() {
        // Reference values from the linear-interpolation convention on
        // [1, 2, 3, 4]: rank 0.25 * 3 = 0.75 -> 1.75, rank 2.25 -> 3.25.
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_abs_diff_eq!(quantile(&v, 0.25), 1.75, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&v, 0.5), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&v, 0.75), 3.25, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&v, 0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(quantile(&v, 1.0), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn median_handles_odd_even_and_unsorted_input() {
        assert_abs_diff_eq!(median(&[3.0, 1.0, 2.0]), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(median(&[7.5]), 7.5, epsilon = 1e-15);
    }

    #[test]
    fn mean_matches_hand_sum() {
        assert_abs_diff_eq!(mean(&[1.0, 2.0, 6.0]), 3.0, epsilon = 1e-15);
    }
}
