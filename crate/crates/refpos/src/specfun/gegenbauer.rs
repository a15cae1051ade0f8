//! Gegenbauer polynomials C_k^(alpha), including the alpha = 0 limit family.
//!
//! The limit family is normalized by the log generating function
//! 1 - log(1 - 2 r tau + r^2) = sum_k C_k^(0)(tau) r^k, which gives
//! C_0^(0) = 1 and C_k^(0) = (2/k) T_k for k >= 1 (Chebyshev T). It is the
//! rescaled limit lim_{alpha->0} C_k^(alpha)/alpha for k >= 1.

use crate::error::{Error, Result};

/// Degree and order of a Gegenbauer polynomial. `alpha = 0` selects the
/// limit family described in the module docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerIndex {
    pub k: usize,
    pub alpha: f64,
}

impl GegenbauerIndex {
    pub fn new(k: usize, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Gegenbauer order must be >= 0, got {alpha}"
            )));
        }
        Ok(GegenbauerIndex { k, alpha })
    }
}

/// Evaluate C_k^(alpha)(tau) by the three-term recurrence
/// (k+1) C_{k+1} = 2 (k+alpha) tau C_k - (k + 2 alpha - 1) C_{k-1}.
pub fn gegenbauer(idx: GegenbauerIndex, tau: f64) -> Result<f64> {
    if tau.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("|tau| <= 1 required, got {tau}")));
    }
    let GegenbauerIndex { k, alpha } = idx;
    if alpha == 0.0 {
        return Ok(gegenbauer_limit(k, tau));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * alpha * tau;
    for j in 1..k {
        let jf = j as f64;
        let next = (2.0 * (jf + alpha) * tau * cur - (jf + 2.0 * alpha - 1.0) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// The alpha = 0 family: C_0 = 1, C_k = (2/k) T_k for k >= 1.
fn gegenbauer_limit(k: usize, tau: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // Chebyshev T_k by recurrence
    let mut prev = 1.0;
    let mut cur = tau;
    for _ in 1..k {
        let next = 2.0 * tau * cur - prev;
        prev = cur;
        cur = next;
    }
    2.0 / k as f64 * cur
}

/// Value of C_k^(alpha)(1), the maximum on [-1, 1] for alpha > 0. Used for
/// truncation bounds. Equals Pochhammer(2 alpha, k)/k!.
pub fn gegenbauer_at_one(k: usize, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return if k == 0 { 1.0 } else { 2.0 / k as f64 };
    }
    let mut v = 1.0;
    for i in 0..k {
        v *= (2.0 * alpha + i as f64) / (i as f64 + 1.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: coefficient of r^k in the generating function, by expanding
    /// (1 - 2 r tau + r^2)^(-alpha) (alpha > 0) or 1 - log(1 - 2 r tau + r^2)
    /// (alpha = 0) with the recurrence for the series coefficients of
    /// log/power of (1 + u) where u = r(r - 2 tau).
    ///
    /// Both series are generated from scratch here: write
    /// 1 - 2 r tau + r^2 = (1 - r e) (1 - r ebar) with e = tau + i sqrt(1-tau^2),
    /// so the power series follow from the binomial/log series of each factor.
    fn generating_series_coeff(k: usize, alpha: f64, tau: f64) -> f64 {
        use num_complex::Complex64;
        let e = Complex64::new(tau, (1.0 - tau * tau).max(0.0).sqrt());
        if alpha == 0.0 {
            // 1 - log((1-re)(1-r ebar)) : coeff of r^k for k >= 1 is
            // (e^k + ebar^k)/k = 2 Re(e^k)/k
            if k == 0 {
                return 1.0;
            }
            return 2.0 * e.powu(k as u32).re / k as f64;
        }
        // (1-re)^{-alpha} = sum binom(alpha+j-1, j) (re)^j ; convolve the two factors
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        let mut b = 1.0;
        for (j, cj) in c.iter_mut().enumerate() {
            *cj = e.powu(j as u32) * b;
            b *= (alpha + j as f64) / (j as f64 + 1.0);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            total += c[j] * c[k - j].conj();
        }
        total.re
    }

    #[test]
    fn spec_point_values() {
        // constant term of both generating functions
        for &alpha in &[0.0, 0.3, 1.0, 2.5] {
            for &tau in &[-1.0, -0.2, 0.7] {
                assert_eq!(gegenbauer(GegenbauerIndex { k: 0, alpha }, tau).unwrap(), 1.0);
            }
        }
        // C_1^(1)(0.3) = 2 * 1 * 0.3
        let v = gegenbauer(GegenbauerIndex { k: 1, alpha: 1.0 }, 0.3).unwrap();
        assert!((v - 0.6).abs() < 1e-15);
        // C_2^(0)(0) = 2 tau^2 - 1 at tau = 0
        let v = gegenbauer(GegenbauerIndex { k: 2, alpha: 0.0 }, 0.0).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_generating_series() {
        let alphas = [0.25, 0.5, 1.0, 1.5];
        for &alpha in &alphas {
            for k in 0..=12 {
                for i in 0..=20 {
                    let tau = -1.0 + 0.1 * i as f64;
                    let rec = gegenbauer(GegenbauerIndex { k, alpha }, tau).unwrap();
                    let ser = generating_series_coeff(k, alpha, tau);
                    assert!(
                        (rec - ser).abs() < 1e-10 * rec.abs().max(1.0),
                        "k={k} alpha={alpha} tau={tau}: {rec} vs {ser}"
                    );
                }
            }
        }
    }

    #[test]
    fn limit_family_matches_log_series() {
        for k in 0..=12 {
            for i in 0..=20 {
                let tau = -1.0 + 0.1 * i as f64;
                let rec = gegenbauer(GegenbauerIndex { k, alpha: 0.0 }, tau).unwrap();
                let ser = generating_series_coeff(k, 0.0, tau);
                assert!((rec - ser).abs() < 1e-12, "k={k} tau={tau}: {rec} vs {ser}");
            }
        }
    }

    #[test]
    fn limit_family_is_rescaled_limit() {
        // alpha^{-1} C_k^(alpha) -> C_k^(0) for k >= 1
        let alpha = 1e-7;
        for k in 1..=8 {
            for &tau in &[-0.9, -0.3, 0.0, 0.4, 1.0] {
                let scaled = gegenbauer(GegenbauerIndex { k, alpha }, tau).unwrap() / alpha;
                let limit = gegenbauer(GegenbauerIndex { k, alpha: 0.0 }, tau).unwrap();
                assert!((scaled - limit).abs() < 1e-5, "k={k} tau={tau}");
            }
        }
    }

    #[test]
    fn value_at_one() {
        for &alpha in &[0.25, 0.5, 1.0, 2.0] {
            for k in 0..=10 {
                let direct = gegenbauer(GegenbauerIndex { k, alpha }, 1.0).unwrap();
                assert!((direct - gegenbauer_at_one(k, alpha)).abs() < 1e-10 * direct.abs().max(1.0));
            }
        }
    }
}
