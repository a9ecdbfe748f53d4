//! Complementary error function, its inverse and the standard normal
//! quantile.

use crate::error::{domain, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// `erfc(x)`, from `libm` (a few ulp across the real line).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse of [`erfc`] on `(0, 2)`.
///
/// A rational tail approximation gives about four digits, then Newton steps
/// on `erfc` polish to round-off. For `y > 1` the reflection
/// `erfc⁻¹(y) = −erfc⁻¹(2 − y)` is used (`2 − y` is exact there).
pub fn erfc_inv(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 2.0) {
        return Err(domain(format!("erfc_inv needs y in (0, 2), got {y}")));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    if y > 1.0 {
        return Ok(-erfc_inv_lower(2.0 - y));
    }
    Ok(erfc_inv_lower(y))
}

/// `y ∈ (0, 1)`, result positive.
fn erfc_inv_lower(y: f64) -> f64 {
    // upper-tail normal quantile z with Q(z) = y/2, then x = z/√2
    let p = 0.5 * y;
    let t = (-2.0 * p.ln()).sqrt();
    let num = 2.515517 + t * (0.802853 + t * 0.010328);
    let den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308));
    let mut x = (t - num / den) * std::f64::consts::FRAC_1_SQRT_2;

    for _ in 0..50 {
        let slope = FRAC_2_SQRT_PI * (-x * x).exp();
        let step = (erfc(x) - y) / slope;
        x += step;
        if step.abs() <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Standard normal quantile `Φ⁻¹(p) = −√2 · erfc⁻¹(2p)`.
pub fn norm_ppf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)?;
    // avoid a signed zero at the median
    Ok(if z == 0.0 { 0.0 } else { z })
}

/// Standard normal survival function `Q(z) = ½ erfc(z/√2)`.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z * std::f64::consts::FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent inverse by bisection on the monotone erfc.
    fn bisect(y: f64) -> f64 {
        let (mut lo, mut hi) = (-30.0f64, 30.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if erfc(mid) > y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn reference_values() {
        assert_eq!(erfc_inv(1.0).unwrap(), 0.0);
        let x = erfc_inv(0.5).unwrap();
        assert!((x - 0.476_936_276_204_469_9).abs() < 1e-15, "{x}");
        assert!((x - bisect(0.5)).abs() < 1e-15);
        assert!((0.5 * erfc(1.0) - 0.078_649_603_525_142_6).abs() < 1e-16);
    }

    #[test]
    fn extreme_arguments_round_trip() {
        for y in [1e-12, 1e-300, 2.0 - 1e-12, 1.0 - 1e-15, 1.0 + 1e-15] {
            let x = erfc_inv(y).unwrap();
            let back = erfc(x);
            assert!(((back - y) / y).abs() <= 1e-12, "y = {y}: {back}");
        }
        assert!(erfc_inv(2.0 - 1e-12).unwrap() < -5.0);
    }

    #[test]
    fn rejects_outside_domain() {
        for y in [0.0, 2.0, -1.0, f64::NAN] {
            assert!(erfc_inv(y).is_err());
        }
        assert!(norm_ppf(0.0).is_err());
        assert!(norm_ppf(1.0).is_err());
    }

    #[test]
    fn normal_quantile() {
        let z = norm_ppf(0.5).unwrap();
        assert_eq!(z, 0.0);
        assert!(z.is_sign_positive());
        assert!((norm_ppf(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-13);
        assert!((norm_ppf(1e-3).unwrap() + 3.090_232_306_167_813_5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn round_trip_log_uniform(e in -12.0f64..0.0, upper in any::<bool>()) {
            let small = 10f64.powf(e);
            let y = if upper { 2.0 - small } else { small };
            let x = erfc_inv(y).unwrap();
            prop_assert!(((erfc(x) - y) / y).abs() <= 1e-12);
        }

        #[test]
        fn quantile_inverts_survival(p in 1e-9f64..(1.0 - 1e-9)) {
            let z = norm_ppf(p).unwrap();
            let back = 1.0 - norm_sf(z);
            prop_assert!((back - p).abs() <= 1e-12 * p.max(1e-3));
        }
    }
}
