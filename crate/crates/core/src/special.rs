//! Log-gamma, digamma, and the function `κ(ν) = ψ((ν+d)/2) − ψ(ν/2)` that
//! links the heavy-tailed prior's expectation `c` to its degrees of freedom.
//!
//! Both special functions shift their argument upward with the recurrence
//! until it is at least [`ASYMPTOTIC_FROM`], then apply a Stirling-type
//! expansion.

use alloc::format;

use libm::log;

use crate::error::{invalid, Error, Result};

const ASYMPTOTIC_FROM: f64 = 8.0;

/// `½ log(2π)`.
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B₂ₖ / (2k(2k−1))` for k = 1..8.
const LGAMMA_SERIES: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `B₂ₖ / 2k` for k = 1..8.
const DIGAMMA_SERIES: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "{what} requires a positive finite argument, got {x}"
        )))
    }
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(mut x: f64) -> f64 {
    // Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
    let mut shift = 1.0;
    while x < ASYMPTOTIC_FROM {
        shift *= x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in LGAMMA_SERIES {
        series += c * power;
        power *= inv2;
    }
    (x - 0.5) * log(x) - x + HALF_LN_2PI + series - log(shift)
}

/// The digamma function `ψ(x) = d/dx log Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < ASYMPTOTIC_FROM {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut power = inv2;
    for c in DIGAMMA_SERIES {
        series += c * power;
        power *= inv2;
    }
    acc + log(x) - 0.5 / x - series
}

/// `κ(ν) = ψ((ν+d)/2) − ψ(ν/2)`, strictly decreasing from `+∞` to `0`.
pub fn kappa(nu: f64, d: usize) -> Result<f64> {
    check_positive(nu, "kappa")?;
    if d == 0 {
        return Err(invalid("kappa needs a dimension d >= 1"));
    }
    Ok(kappa_unchecked(nu, d))
}

fn kappa_unchecked(nu: f64, d: usize) -> f64 {
    digamma_unchecked(0.5 * (nu + d as f64)) - digamma_unchecked(0.5 * nu)
}

const NU_MIN: f64 = 1e-300;
const NU_MAX: f64 = 1e300;

/// Solves `κ(ν) = c` for `ν` by bisection in `log ν`.
///
/// The bracket starts at `[1e-6, 1e8]` and widens by factors of ten until it
/// contains the root. Bisection runs until the bracket cannot shrink any
/// further in floating point, so the result is as accurate as `κ` itself.
pub fn kappa_inverse(c: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(invalid("kappa_inverse needs a dimension d >= 1"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::OutOfRange(format!(
            "kappa takes values in (0, inf), cannot invert c = {c}"
        )));
    }

    let mut lo = 1e-6;
    let mut hi = 1e8;
    while kappa_unchecked(lo, d) < c {
        if lo <= NU_MIN {
            return Err(Error::OutOfRange(format!(
                "c = {c} needs nu below {NU_MIN:e}"
            )));
        }
        hi = lo;
        lo = (lo * 0.1).max(NU_MIN);
    }
    while kappa_unchecked(hi, d) > c {
        if hi >= NU_MAX {
            return Err(Error::OutOfRange(format!(
                "c = {c} needs nu above {NU_MAX:e}"
            )));
        }
        lo = hi;
        hi = (hi * 10.0).min(NU_MAX);
    }

    // invariant: κ(lo) ≥ c ≥ κ(hi)
    for _ in 0..2000 {
        let mid = libm::sqrt(lo) * libm::sqrt(hi);
        let mid = if mid > lo && mid < hi {
            mid
        } else {
            let arith = 0.5 * (lo + hi);
            if arith > lo && arith < hi {
                arith
            } else {
                break;
            }
        };
        if kappa_unchecked(mid, d) >= c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let err_lo = (kappa_unchecked(lo, d) - c).abs();
    let err_hi = (kappa_unchecked(hi, d) - c).abs();
    Ok(if err_lo <= err_hi { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn rejects_non_positive() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(kappa(1.0, 0).is_err());
        assert!(matches!(kappa_inverse(0.0, 2), Err(Error::OutOfRange(_))));
        assert!(matches!(kappa_inverse(-3.0, 2), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn log_gamma_half() {
        assert!((log_gamma(0.5).unwrap() - 0.5 * log(PI)).abs() < 1e-14);
    }

    #[test]
    fn digamma_recurrence() {
        for x in [0.5, 1.0, 2.0, 10.0] {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn kappa_closed_forms() {
        for nu in [0.3, 1.0, 4.0, 77.0] {
            assert!((kappa(nu, 2).unwrap() - 2.0 / nu).abs() < 1e-12 * (1.0 + 2.0 / nu));
            let four = 2.0 / nu + 2.0 / (nu + 2.0);
            assert!((kappa(nu, 4).unwrap() - four).abs() < 1e-12 * (1.0 + four));
        }
    }

    #[test]
    fn kappa_inverse_d2_is_two_over_c() {
        for c in [0.01, 0.05, 0.5, 1.0, 2.0, 10.0, 1000.0] {
            let nu = kappa_inverse(c, 2).unwrap();
            assert!((nu - 2.0 / c).abs() <= 1e-8, "c = {c}: {nu}");
        }
    }

    #[test]
    fn kappa_round_trip() {
        for d in [1, 2, 10] {
            for nu in [0.5, 1.0, 5.0, 50.0] {
                let c = kappa(nu, d).unwrap();
                let back = kappa_inverse(c, d).unwrap();
                assert!((back - nu).abs() <= 1e-7, "d={d} nu={nu} back={back}");
                assert!((kappa(back, d).unwrap() - c).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn kappa_inverse_expands_bracket() {
        // ν ≈ 2e-8 and ν ≈ 2e8 both lie outside [1e-6, 1e8]
        let small = kappa_inverse(1e8, 2).unwrap();
        assert!((small - 2e-8).abs() / 2e-8 < 1e-9);
        // κ is a difference of two nearly equal logs out here
        let large = kappa_inverse(1e-8, 2).unwrap();
        assert!((large - 2e8).abs() / 2e8 < 1e-5);
    }
}
