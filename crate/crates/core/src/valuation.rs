//! Valuation distributions and the first-auction participation threshold.

use crate::channel::RadioParams;
use crate::error::{ConfigError, Error, Result};

const MAX_BISECTIONS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-12;
/// Probability mass left above `support_max`.
const TAIL_MASS: f64 = 1e-9;

/// CDF of a single SU's valuation.
pub trait ValuationCdf {
    fn cdf(&self, theta: f64) -> f64;

    /// Finite upper end used to bracket roots; `cdf(support_max) >= 1 - 1e-9`.
    fn support_max(&self) -> f64;
}

/// Distribution of the rate `W log2(1 + G h snr)` when `h` is unit-mean
/// exponential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighRateCdf {
    bandwidth: f64,
    mean_snr: f64,
}

impl RayleighRateCdf {
    pub fn new(gain: f64, params: &RadioParams) -> Self {
        Self {
            bandwidth: params.bandwidth,
            mean_snr: gain * params.snr_scale(),
        }
    }
}

impl ValuationCdf for RayleighRateCdf {
    fn cdf(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return 0.0;
        }
        let snr_needed = (theta / self.bandwidth).exp2() - 1.0;
        -(-snr_needed / self.mean_snr).exp_m1()
    }

    fn support_max(&self) -> f64 {
        self.bandwidth * (self.mean_snr * -TAIL_MASS.ln()).ln_1p() / std::f64::consts::LN_2
    }
}

pub fn rayleigh_rate_cdf(theta: f64, gain: f64, params: &RadioParams) -> f64 {
    RayleighRateCdf::new(gain, params).cdf(theta)
}

/// Uniform valuations on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformCdf {
    pub lo: f64,
    pub hi: f64,
}

impl ValuationCdf for UniformCdf {
    fn cdf(&self, theta: f64) -> f64 {
        ((theta - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn support_max(&self) -> f64 {
        self.hi
    }
}

/// CDF of the largest of `n - 1` i.i.d. opponent valuations, `F^(n-1)`.
pub fn highest_opponent_cdf(f_value: f64, num_users: usize) -> Result<f64> {
    if num_users < 2 {
        return Err(Error::InvalidPopulation {
            min: 2,
            got: num_users,
        });
    }
    Ok(f_value.powi((num_users - 1) as i32))
}

/// Solves `t * F(t)^(n-1) = monitor_fee / (1 + entry_fee)` for the
/// first-slot participation threshold `t`.
///
/// The left side is nondecreasing, so bisection on `[0, support_max]`
/// brackets the root. When the target is beyond reach the SU never
/// enters in the first slot and `support_max` is returned.
pub fn initial_threshold(
    entry_fee: f64,
    monitor_fee: f64,
    num_users: usize,
    cdf: &impl ValuationCdf,
) -> Result<f64> {
    if !(entry_fee.is_finite() && monitor_fee.is_finite()) {
        return Err(ConfigError::new("fees must be finite").into());
    }
    if entry_fee < 0.0 || monitor_fee < 0.0 {
        return Err(ConfigError::new("fees must be nonnegative").into());
    }
    let exponent = num_users
        .checked_sub(1)
        .filter(|&e| e >= 1)
        .ok_or(Error::InvalidPopulation {
            min: 2,
            got: num_users,
        })? as i32;
    let target = monitor_fee / (1.0 + entry_fee);
    if target == 0.0 {
        return Ok(0.0);
    }
    let lhs = |t: f64| t * cdf.cdf(t).powi(exponent);

    let (mut lo, mut hi) = (0.0, cdf.support_max());
    if lhs(hi) < target {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let value = lhs(mid);
        if (value - target).abs() <= RESIDUAL_TOL {
            return Ok(mid);
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: UniformCdf = UniformCdf { lo: 0.0, hi: 1.0 };

    #[test]
    fn highest_opponent_examples() {
        assert_eq!(highest_opponent_cdf(0.5, 2).unwrap(), 0.5);
        assert_eq!(highest_opponent_cdf(1.0, 16).unwrap(), 1.0);
        assert_eq!(highest_opponent_cdf(0.5, 3).unwrap(), 0.25);
        assert!(matches!(
            highest_opponent_cdf(0.5, 1),
            Err(Error::InvalidPopulation { min: 2, got: 1 })
        ));
    }

    #[test]
    fn threshold_uniform_fixtures() {
        // t^2 = 0.25 and t^3 = 0.125.
        let t = initial_threshold(0.0, 0.25, 2, &UNIT).unwrap();
        assert!((t - 0.5).abs() < 1e-8, "{t}");
        let t = initial_threshold(1.0, 0.25, 3, &UNIT).unwrap();
        assert!((t - 0.5).abs() < 1e-8, "{t}");
        assert_eq!(initial_threshold(10.0, 0.0, 4, &UNIT).unwrap(), 0.0);
    }

    #[test]
    fn unreachable_target_returns_support_max() {
        assert_eq!(initial_threshold(0.0, 5.0, 2, &UNIT).unwrap(), 1.0);
    }

    #[test]
    fn threshold_errors() {
        assert!(matches!(
            initial_threshold(f64::NAN, 1.0, 2, &UNIT),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            initial_threshold(1.0, f64::INFINITY, 2, &UNIT),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            initial_threshold(1.0, 1.0, 1, &UNIT),
            Err(Error::InvalidPopulation { .. })
        ));
    }

    #[test]
    fn rayleigh_cdf_closed_form() {
        let params = RadioParams {
            bandwidth: 2.0,
            tx_power: 1.0,
            noise_power: 1.0,
            ..RadioParams::default()
        };
        assert_eq!(rayleigh_rate_cdf(0.0, 1.0, &params), 0.0);
        let v = rayleigh_rate_cdf(2.0, 1.0, &params);
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!(rayleigh_rate_cdf(200.0, 1.0, &params) > 1.0 - 1e-12);
        let cdf = RayleighRateCdf::new(1.0, &params);
        assert!(cdf.cdf(cdf.support_max()) >= 1.0 - 1e-9 - 1e-15);
    }

    #[test]
    fn rayleigh_threshold_has_small_residual() {
        let params = RadioParams::default();
        let gain = 1000f64.powi(-3);
        let cdf = RayleighRateCdf::new(gain, &params);
        for (c, e, n) in [(10.0, 1.0, 2), (5.0, 5.0, 16), (1.0, 10.0, 4)] {
            let t = initial_threshold(c, e, n, &cdf).unwrap();
            let residual = t * cdf.cdf(t).powi(n as i32 - 1) - e / (1.0 + c);
            assert!(residual.abs() <= 1e-9, "{c} {e} {n}: {residual}");
        }
    }
}
