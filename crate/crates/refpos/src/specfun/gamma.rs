//! Log-gamma and digamma, self-contained.
//!
//! Both use the classical shift-then-asymptotic scheme: the argument is pushed
//! above a threshold with the recurrences ln G(x) = ln G(x+1) - ln x and
//! psi(x+1) = psi(x) + 1/x, then a Stirling/Bernoulli tail series is applied.

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_8;

/// Stirling series coefficients B_{2k} / (2k (2k-1)) for ln Gamma.
const LNGAMMA_STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// B_{2k} / (2k) for the digamma asymptotic series.
const DIGAMMA_ASYMP: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

fn ln_gamma_raw(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    let mut z = x;
    while z < 12.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let mut tail = 0.0;
    let inv2 = 1.0 / (z * z);
    let mut pw = 1.0 / z;
    for c in LNGAMMA_STIRLING {
        tail += c * pw;
        pw *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + tail + shift
}

/// ln Gamma(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_raw(x))
}

/// ln |Gamma(x)| together with the sign of Gamma(x), valid for any non-pole x.
/// Negative arguments go through the reflection formula
/// Gamma(x) Gamma(1-x) = pi / sin(pi x).
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x > 0.0 {
        return Ok((ln_gamma_raw(x), 1.0));
    }
    if x == x.floor() {
        return Err(Error::InvalidParameter(format!("Gamma pole at x = {x}")));
    }
    // |sin(pi x)| via the fractional part for accuracy at large |x|;
    // sin(pi x) = (-1)^{floor(x)} sin(pi frac(x)) with sin(pi frac(x)) >= 0
    let fracx = x - x.floor();
    let sin_pi = (std::f64::consts::PI * fracx).sin();
    let ln_abs = std::f64::consts::PI.ln() - sin_pi.ln() - ln_gamma_raw(1.0 - x);
    // Gamma(1-x) > 0 here, so the sign comes from sin(pi x) alone.
    let sign = if (x.floor() as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok((ln_abs, sign))
}

/// Pochhammer product x (x+1) ... (x+n-1) = Gamma(x+n)/Gamma(x), computed
/// directly so that poles of Gamma at non-positive arguments never appear.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    let mut p = 1.0;
    for i in 0..n {
        p *= x + i as f64;
    }
    p
}

/// (ln |Poch(x, n)|, sign), overflow-safe for large n; sign 0 when a factor
/// vanishes exactly.
pub fn log_pochhammer_signed(x: f64, n: usize) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for i in 0..n {
        let v = x + i as f64;
        if v == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln += v.abs().ln();
        if v < 0.0 {
            sign = -sign;
        }
    }
    (ln, sign)
}

/// psi(x) = (ln Gamma)'(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("digamma requires x > 0, got {x}")));
    }
    let mut result = 0.0;
    let mut z = x;
    while z < 10.0 {
        result -= 1.0 / z;
        z += 1.0;
    }
    result += z.ln() - 0.5 / z;
    let inv2 = 1.0 / (z * z);
    let mut pw = inv2;
    for c in DIGAMMA_ASYMP {
        result -= c * pw;
        pw *= inv2;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

    #[test]
    fn log_gamma_reference_points() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-13);
        assert!((log_gamma(4.0).unwrap() - 6.0f64.ln()).abs() < 1e-13);
        // Gamma(1/4) = 3.6256099082219083119...
        assert!((log_gamma(0.25).unwrap() - 3.625_609_908_221_908_3_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_accuracy_sweep() {
        // recurrence check: ln G(x+1) - ln G(x) = ln x across the stated domain
        let mut x = 1e-3;
        while x < 1e3 {
            let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
            let scale = log_gamma(x).unwrap().abs().max(1.0);
            assert!(
                (lhs - x.ln()).abs() < 1e-12 * scale.max(x.ln().abs()),
                "recurrence violated at x = {x}"
            );
            x *= 1.7;
        }
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn signed_gamma_negative_arguments() {
        // Gamma(-1/4) = Gamma(3/4) / (-1/4) = -4 Gamma(3/4) ~ -4.901667
        let (ln_abs, sign) = log_gamma_signed(-0.25).unwrap();
        assert_eq!(sign, -1.0);
        assert!((ln_abs.exp() - 4.901_666_809_860_711).abs() < 1e-10);
        // Gamma(-1.5) = 4 sqrt(pi) / 3 > 0
        let (ln_abs, sign) = log_gamma_signed(-1.5).unwrap();
        assert_eq!(sign, 1.0);
        assert!((ln_abs.exp() - 4.0 * std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-10);
        assert!(log_gamma_signed(-2.0).is_err());
    }

    #[test]
    fn pochhammer_matches_gamma_ratio() {
        // Gamma(n + x)/Gamma(x) for x = 2.5, n = 4: 2.5 * 3.5 * 4.5 * 5.5
        assert!((pochhammer(2.5, 4) - 2.5 * 3.5 * 4.5 * 5.5).abs() < 1e-12);
        assert_eq!(pochhammer(-1.0, 3), 0.0); // hits the zero factor
        assert_eq!(pochhammer(7.3, 0), 1.0);
    }

    #[test]
    fn digamma_reference_points() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        let half = -2.0 * 2.0f64.ln() - EULER_GAMMA;
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-12);
        assert!(digamma(0.0).is_err());
    }

    #[test]
    fn digamma_recurrence_sweep() {
        let mut x = 1e-2;
        while x < 1e3 {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-10 * (1.0 / x).max(1.0), "at x = {x}");
            x *= 1.9;
        }
    }
}
