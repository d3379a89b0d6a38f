//! Scalar special functions shared by the distribution catalog.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// ln(sqrt(2 pi)).
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF, accurate in the lower tail.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function, accurate in the upper tail.
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// ln Phi(z) without underflow for very negative z.
pub fn std_normal_ln_cdf(z: f64) -> f64 {
    if z > 0.0 {
        (-std_normal_sf(z)).ln_1p()
    } else if z > -30.0 {
        std_normal_cdf(z).ln()
    } else {
        // Mills-ratio asymptotic series; truncation error below 1e-12 for z <= -30.
        let z2 = z * z;
        let inv = 1.0 / z2;
        let series = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv.powi(3) + 105.0 * inv.powi(4);
        -0.5 * z2 - (-z).ln() - LN_SQRT_2PI + series.ln()
    }
}

/// ln(1 + e^x) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// ln(sum_i exp(terms_i)).
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}

/// ln|e^a - e^b| together with the sign of e^a - e^b.
///
/// Returns `(f64::NEG_INFINITY, 0.0)` when the two are equal.
pub fn log_abs_diff_exp(a: f64, b: f64) -> (f64, f64) {
    if a == b {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (hi, lo, sign) = if a > b { (a, b, 1.0) } else { (b, a, -1.0) };
    if hi == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    (hi + (-(lo - hi).exp_m1()).ln(), sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_cdf_matches_direct_evaluation_in_overlap() {
        for &z in &[-29.0, -10.0, -1.0, 0.0, 0.5, 4.0, 9.0] {
            let direct = std_normal_cdf(z).ln();
            let got = std_normal_ln_cdf(z);
            assert!((got - direct).abs() <= 1e-12 * direct.abs() + 1e-18, "z={z}");
        }
    }

    #[test]
    fn ln_cdf_asymptotic_branch_is_continuous() {
        let left = std_normal_ln_cdf(-30.0 - 1e-9);
        let right = std_normal_ln_cdf(-30.0 + 1e-9);
        assert!((left - right).abs() < 1e-6);
        assert!(std_normal_ln_cdf(-100.0).is_finite());
    }

    #[test]
    fn log_abs_diff_exp_signs() {
        let (l, s) = log_abs_diff_exp(0.0, (0.5f64).ln());
        assert!((l - (0.5f64).ln()).abs() < 1e-15);
        assert_eq!(s, 1.0);
        let (_, s) = log_abs_diff_exp(-3.0, -2.0);
        assert_eq!(s, -1.0);
        assert_eq!(log_abs_diff_exp(1.0, 1.0).1, 0.0);
    }

    #[test]
    fn softplus_extremes() {
        assert_eq!(softplus(800.0), 800.0);
        assert!(softplus(-800.0) >= 0.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-16);
    }
}
