//! Closed-form query budget of the one-shot Klein cutting-plane method.
//!
//! With `s = kappa r` and target accuracy `eps`,
//!
//! ```text
//! l(s, eps) = log(16 sinh(s) cosh(s) / (s eps))
//! N(d, s, eps) = ceil(2 d (d+1) l(s, eps))
//! ```
//!
//! Ceilings are applied to the raw double without any nudging.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Below this radius `sinh(s) cosh(s) / s` is replaced by its Taylor series.
const SMALL_S: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityInputs {
    pub d: usize,
    pub s: f64,
    pub eps: f64,
}

impl ComplexityInputs {
    pub fn new(d: usize, s: f64, eps: f64) -> Result<Self> {
        if d < 1 {
            return Err(usage("dimension must be at least 1"));
        }
        check_s(s)?;
        check_eps(eps)?;
        Ok(Self { d, s, eps })
    }

    fn multiplier(&self) -> f64 {
        let d = self.d as f64;
        2.0 * d * (d + 1.0)
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(usage(format!("radius s must be positive and finite, got {s}")));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(usage(format!("accuracy eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// `log(sinh(s) cosh(s) / s)`; stays finite for large `s`.
fn log_sinh_cosh_ratio(s: f64) -> f64 {
    if s < SMALL_S {
        let s2 = s * s;
        (2.0 * s2 / 3.0 + 2.0 * s2 * s2 / 15.0).ln_1p()
    } else {
        // sinh(s) cosh(s) = sinh(2s)/2 = e^{2s} (1 - e^{-4s}) / 4
        2.0 * s + (-(-4.0 * s).exp_m1()).ln() - 4f64.ln() - s.ln()
    }
}

/// The exact logarithmic factor `l(s, eps)`.
pub fn log_factor(s: f64, eps: f64) -> Result<f64> {
    check_s(s)?;
    check_eps(eps)?;
    Ok(16f64.ln() + log_sinh_cosh_ratio(s) - eps.ln())
}

/// `N(d, s, eps) = ceil(2 d (d+1) l(s, eps))`.
pub fn query_bound(inp: &ComplexityInputs) -> Result<u64> {
    let l = log_factor(inp.s, inp.eps)?;
    Ok((inp.multiplier() * l).ceil() as u64)
}

/// `ceil(2 d (d+1) (2s + log(16/eps)))`, never below [`query_bound`].
pub fn simple_upper_bound(inp: &ComplexityInputs) -> Result<u64> {
    check_s(inp.s)?;
    check_eps(inp.eps)?;
    Ok((inp.multiplier() * (2.0 * inp.s + (16.0 / inp.eps).ln())).ceil() as u64)
}

/// `log(1/eps) + 2s - log(4s) + log 16`; exceeds [`log_factor`] by
/// `-log(1 - e^{-4s})`.
pub fn large_s_expansion(s: f64, eps: f64) -> Result<f64> {
    check_s(s)?;
    check_eps(eps)?;
    Ok(-eps.ln() + 2.0 * s - (4.0 * s).ln() + 16f64.ln())
}

/// `sinh(s) cosh(s) / s` evaluated directly.
pub fn sinh_cosh_ratio(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(log_sinh_cosh_ratio(s).exp())
}

/// `1 + 2s^2/3 + 2s^4/15`, valid for `0 < s <= 0.5`.
pub fn small_s_expansion(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 0.5) {
        return Err(usage(format!("small-s expansion needs 0 < s <= 0.5, got {s}")));
    }
    let s2 = s * s;
    Ok(1.0 + 2.0 * s2 / 3.0 + 2.0 * s2 * s2 / 15.0)
}

/// `ceil(2 d (d+1) log(16/eps))`, the `s -> 0` limit of [`query_bound`].
pub fn euclidean_limit_bound(d: usize, eps: f64) -> Result<u64> {
    if d < 1 {
        return Err(usage("dimension must be at least 1"));
    }
    check_eps(eps)?;
    let df = d as f64;
    Ok((2.0 * df * (df + 1.0) * (16.0 / eps).ln()).ceil() as u64)
}

/// `zeta_s = s / tanh(s)`, with `zeta_0 = 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(usage(format!("zeta needs s >= 0, got {s}")));
    }
    if s < SMALL_S {
        return Ok(1.0 + s * s / 3.0);
    }
    Ok(s / s.tanh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn n(d: usize, s: f64, eps: f64) -> u64 {
        query_bound(&ComplexityInputs::new(d, s, eps).unwrap()).unwrap()
    }

    #[test]
    fn log_factor_examples() {
        // 16 sinh(2) cosh(2) / (2 * 1e-3), sinh 2 cosh 2 = 13.645139...
        assert_abs_diff_eq!(log_factor(2.0, 1e-3).unwrap(), 11.600566940634, epsilon = 1e-9);
        assert_abs_diff_eq!(log_factor(2.0, 1e-1).unwrap(), 6.995396754646, epsilon = 1e-9);
        assert_abs_diff_eq!(log_factor(1e-8, 0.99).unwrap(), (16.0f64 / 0.99).ln(), epsilon = 1e-12);
    }

    #[test]
    fn log_factor_is_continuous_across_series_switch() {
        let below = log_factor(SMALL_S * (1.0 - 1e-12), 0.5).unwrap();
        let above = log_factor(SMALL_S, 0.5).unwrap();
        assert_abs_diff_eq!(below, above, epsilon = 1e-14);
    }

    #[test]
    fn log_factor_survives_large_radius() {
        let l = log_factor(400.0, 1e-3).unwrap();
        assert!(l.is_finite());
        assert_abs_diff_eq!(l, large_s_expansion(400.0, 1e-3).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn query_bound_table_rows() {
        assert_eq!(n(4, 2.0, 1e-3), 465);
        assert_eq!(n(16, 2.0, 1e-3), 6311);
        assert_eq!(n(4, 0.1, 1e-3), 388);
        assert_eq!(n(4, 2.0, 1e-4), 557);
    }

    #[test]
    fn simple_bound_examples() {
        let b = simple_upper_bound(&ComplexityInputs::new(4, 2.0, 1e-3).unwrap()).unwrap();
        assert_eq!(b, 548);
        assert!(b >= 465);
        let b = simple_upper_bound(&ComplexityInputs::new(1, 1.0, 0.5).unwrap()).unwrap();
        assert_eq!(b, 22);
    }

    #[test]
    fn simple_bound_dominates_on_grid() {
        for i in 0..10 {
            for j in 0..10 {
                let s = 0.01 * 1.8f64.powi(i);
                let eps = 0.9 * 0.3f64.powi(j);
                for d in [1, 3, 8] {
                    let inp = ComplexityInputs::new(d, s, eps).unwrap();
                    assert!(simple_upper_bound(&inp).unwrap() >= query_bound(&inp).unwrap());
                }
            }
        }
    }

    #[test]
    fn large_s_examples() {
        let gap = |s: f64| large_s_expansion(s, 1e-3).unwrap() - log_factor(s, 1e-3).unwrap();
        assert!(gap(2.0) >= 0.0 && gap(2.0) <= 2.0 * (-8.0f64).exp());
        assert!(gap(4.0) >= 0.0 && gap(4.0) <= 2.0 * (-16.0f64).exp());
        assert_abs_diff_eq!(gap(0.5), -(1.0 - (-2.0f64).exp()).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(gap(0.5), 0.1454, epsilon = 1e-4);
    }

    #[test]
    fn small_s_examples() {
        let exact = |s: f64| s.sinh() * s.cosh() / s;
        assert_abs_diff_eq!(small_s_expansion(0.1).unwrap(), 1.00668, epsilon = 1e-9);
        assert!((small_s_expansion(0.1).unwrap() - exact(0.1)).abs() <= 2e-8);
        assert_abs_diff_eq!(small_s_expansion(0.5).unwrap(), 1.175, epsilon = 1e-3);
        assert!((small_s_expansion(0.5).unwrap() - exact(0.5)).abs() <= 3.2e-4);
        assert_abs_diff_eq!(small_s_expansion(1e-9).unwrap(), 1.0, epsilon = 1e-15);
        assert!(small_s_expansion(0.6).is_err());
        assert!(small_s_expansion(0.0).is_err());
    }

    #[test]
    fn euclidean_limit_examples() {
        assert_eq!(euclidean_limit_bound(4, 1e-3).unwrap(), 388);
        assert_eq!(euclidean_limit_bound(2, 1e-2).unwrap(), 89);
        assert_eq!(euclidean_limit_bound(1, 0.5).unwrap(), 14);
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(zeta(2.0).unwrap(), 2.074629441, epsilon = 1e-8);
        for k in 1..=200 {
            let s = 0.1 * k as f64;
            assert!(1.0 + s <= 2.0 * zeta(s).unwrap());
            assert!(zeta(s).unwrap() >= 1.0);
        }
    }

    #[test]
    fn input_validation() {
        assert!(ComplexityInputs::new(0, 1.0, 0.1).is_err());
        assert!(ComplexityInputs::new(1, 0.0, 0.1).is_err());
        assert!(ComplexityInputs::new(1, 1.0, 1.0).is_err());
        assert!(log_factor(1.0, 0.0).is_err());
    }

    #[test]
    fn monotone_in_s_and_eps() {
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=400 {
            let l = log_factor(0.02 * k as f64, 1e-3).unwrap();
            assert!(l > prev);
            prev = l;
        }
        let mut prev = f64::INFINITY;
        for k in 1..=99 {
            let l = log_factor(1.0, 0.01 * k as f64).unwrap();
            assert!(l < prev);
            prev = l;
        }
    }
}
