//! The coupling coefficients c^{alpha,beta}_{k,l} =
//! int_{-1}^{1} C_k^(alpha) C_l^(beta) (1-tau^2)^{beta-1/2} dtau,
//! by quadrature and in closed form, plus the Funk-Hecke constants kappa_{N,l}.
//!
//! Two independent routes exist on purpose: the closed form (a product of
//! Gamma factors) is checked against direct quadrature everywhere it is used.

use super::gamma::{log_gamma_signed, log_pochhammer_signed};
use super::gegenbauer::{gegenbauer, GegenbauerIndex};
use crate::error::{Error, Result};
use crate::quad::{integrate_split, QuadResult, Tol};
use std::f64::consts::PI;

/// Direct quadrature of the coupling integral. The endpoint weight
/// singularity for beta < 1/2 is removed by the substitution tau = sin(theta).
pub fn coupling_quadrature(k: usize, l: usize, alpha: f64, beta: f64) -> Result<QuadResult> {
    if alpha <= -0.5 || beta <= -0.5 {
        return Err(Error::InvalidParameter(format!(
            "coupling orders must exceed -1/2, got alpha={alpha}, beta={beta}"
        )));
    }
    let ck = GegenbauerIndex::new(k, alpha.max(0.0))?;
    let cl = GegenbauerIndex::new(l, beta.max(0.0))?;
    let f = move |theta: f64| {
        let tau = theta.sin();
        let w = theta.cos().powf(2.0 * beta);
        gegenbauer(ck, tau).unwrap() * gegenbauer(cl, tau).unwrap() * w
    };
    let half_pi = 0.5 * PI;
    Ok(integrate_split(f, &[-half_pi, 0.0, half_pi], Tol::absolute(1e-11)))
}

/// Closed-form coupling coefficient.
///
/// Conventions for the zero-order families: C_0^(0) = C_0^(alpha) = 1 and
/// C_k^(0) = lim_{a->0} a^{-1} C_k^(a) for k >= 1; the formulas below are the
/// corresponding limits of Gegenbauer's product formula. The ratio
/// Gamma(n+alpha-beta)/Gamma(alpha-beta) is evaluated as a Pochhammer product
/// so poles of Gamma at non-positive arguments never appear; the remaining
/// Gamma factors are computed in log space with explicit sign tracking.
pub fn coupling_closed(k: usize, l: usize, alpha: f64, beta: f64) -> Result<f64> {
    if alpha <= -0.5 || beta <= -0.5 {
        return Err(Error::InvalidParameter(format!(
            "coupling orders must exceed -1/2, got alpha={alpha}, beta={beta}"
        )));
    }
    if k < l || (k - l) % 2 == 1 {
        return Ok(0.0);
    }
    let n = (k - l) / 2;
    let a0 = alpha == 0.0;
    let b0 = beta == 0.0;

    if a0 && b0 {
        // Chebyshev weight: C_k^(0) = (2/k) T_k, orthogonality of T_k
        return Ok(if k == 0 && l == 0 {
            PI
        } else if k == l {
            2.0 * PI / (k * k) as f64
        } else {
            0.0
        });
    }

    if (alpha - beta).abs() < 1e-14 {
        // diagonal family: delta_{k,l} 2^{1-2a} pi Gamma(k+2a) / (k! (k+a) Gamma(a)^2)
        if k != l {
            return Ok(0.0);
        }
        let a = alpha;
        let (lg_k2a, s1) = log_gamma_signed(k as f64 + 2.0 * a)?;
        let (lg_a, _) = log_gamma_signed(a)?;
        let (lg_kf, _) = log_gamma_signed(k as f64 + 1.0)?;
        let ln = (1.0 - 2.0 * a) * 2.0f64.ln() + PI.ln() + lg_k2a - lg_kf - 2.0 * lg_a
            - (k as f64 + a).ln();
        return Ok(s1 * ln.exp());
    }

    // Off-diagonal Gegenbauer formula and its alpha->0 / beta->0 limits.
    // Base case (alpha, beta != 0):
    //   2^{1-2b} pi G(l+n+a) G(l+2b) Poch(a-b, n) / (l! n! G(a) G(b) G(l+n+b+1))
    let lf = ln_factorial(l);
    let nf = ln_factorial(n);
    let (poch_ln, poch_sign) = log_pochhammer_signed(alpha - beta, n);
    if poch_sign == 0.0 {
        return Ok(0.0);
    }
    let mut sign = poch_sign;
    let mut ln = PI.ln() + poch_ln - lf - nf;

    if !a0 && !b0 {
        ln += (1.0 - 2.0 * beta) * 2.0f64.ln();
        let (g1, s1) = log_gamma_signed(l as f64 + n as f64 + alpha)?;
        let (g2, s2) = log_gamma_signed(l as f64 + 2.0 * beta)?;
        let (g3, s3) = log_gamma_signed(alpha)?;
        let (g4, s4) = log_gamma_signed(beta)?;
        let (g5, s5) = log_gamma_signed(l as f64 + n as f64 + beta + 1.0)?;
        ln += g1 + g2 - g3 - g4 - g5;
        sign *= s1 * s2 * s3 * s4 * s5;
    } else if a0 {
        // k >= 1 here (k = l = 0 was handled above via the diagonal branch
        // when alpha = beta; for alpha=0 != beta, k=l=0 means n=0, l=0):
        if k == 0 {
            // c_{0,0} = int (1-t^2)^{b-1/2} = sqrt(pi) G(b+1/2)/G(b+1)
            let (gb1, _) = log_gamma_signed(beta + 0.5)?;
            let (gb2, _) = log_gamma_signed(beta + 1.0)?;
            return Ok((0.5 * PI.ln() + gb1 - gb2).exp());
        }
        // limit alpha -> 0 of alpha^{-1} c: 1/Gamma(alpha) ~ alpha
        ln += (1.0 - 2.0 * beta) * 2.0f64.ln();
        let (g1, s1) = log_gamma_signed((l + n) as f64)?; // l + n >= 1 since k >= 1
        let (g2, s2) = log_gamma_signed(l as f64 + 2.0 * beta)?;
        let (g4, s4) = log_gamma_signed(beta)?;
        let (g5, s5) = log_gamma_signed(l as f64 + n as f64 + beta + 1.0)?;
        ln += g1 + g2 - g4 - g5;
        sign *= s1 * s2 * s4 * s5;
    } else {
        // beta = 0, alpha != 0
        ln += 2.0f64.ln();
        let (g1, s1) = log_gamma_signed(l as f64 + n as f64 + alpha)?;
        let (g3, s3) = log_gamma_signed(alpha)?;
        ln += g1 - g3;
        sign *= s1 * s3;
        if l >= 1 {
            // limit beta -> 0 of beta^{-1} c: Gamma(l+2b) -> Gamma(l), 1/Gamma(b) ~ b
            let (g2, s2) = log_gamma_signed(l as f64)?;
            let (g5, s5) = log_gamma_signed((l + n + 1) as f64)?;
            ln += g2 - g5;
            sign *= s2 * s5;
        } else {
            // l = 0: C_0^(0) = 1, plain limit; Gamma(2b)/Gamma(b) -> 1/2
            let (g5, s5) = log_gamma_signed((n + 1) as f64)?;
            ln += -(2.0f64.ln()) - g5;
            sign *= s5;
        }
    }
    Ok(sign * ln.exp())
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// The Funk-Hecke constant kappa_{N,l}.
pub fn kappa(dim: usize, l: usize) -> Result<f64> {
    match dim {
        0 => Err(Error::InvalidParameter("dimension must be >= 1".into())),
        1 => {
            if l > 1 {
                return Err(Error::InvalidParameter(format!(
                    "for N=1 the harmonic degree is 0 or 1, got {l}"
                )));
            }
            Ok(1.0)
        }
        2 => Ok(if l == 0 { 2.0 } else { l as f64 }),
        n => {
            // (4 pi)^{(N-2)/2} l! Gamma((N-2)/2) / (l + N - 3)!
            let nf = n as f64;
            let (g, _) = log_gamma_signed((nf - 2.0) / 2.0)?;
            let ln = 0.5 * (nf - 2.0) * (4.0 * PI).ln() + ln_factorial(l) + g
                - ln_factorial(l + n - 3);
            Ok(ln.exp())
        }
    }
}

/// Table of coupling coefficients for fixed (alpha, beta), truncated at
/// (kmax, lmax). Entries with k - l odd or k < l are exact zeros.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CouplingTable {
    pub alpha: f64,
    pub beta: f64,
    pub kmax: usize,
    pub lmax: usize,
    entries: Vec<f64>, // row-major (k, l)
}

impl CouplingTable {
    pub fn build(alpha: f64, beta: f64, kmax: usize, lmax: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity((kmax + 1) * (lmax + 1));
        for k in 0..=kmax {
            for l in 0..=lmax {
                entries.push(coupling_closed(k, l, alpha, beta)?);
            }
        }
        Ok(CouplingTable { alpha, beta, kmax, lmax, entries })
    }

    pub fn entry(&self, k: usize, l: usize) -> f64 {
        self.entries[k * (self.lmax + 1) + l]
    }

    /// CSV dump with columns k, l, alpha, beta, value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,alpha,beta,value\n");
        for k in 0..=self.kmax {
            for l in 0..=self.lmax {
                out.push_str(&format!(
                    "{},{},{},{},{:.17e}\n",
                    k,
                    l,
                    self.alpha,
                    self.beta,
                    self.entry(k, l)
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_difference_vanishes() {
        let q = coupling_quadrature(1, 0, 0.7, 0.4).unwrap();
        assert!(q.value.abs() < 1e-12);
        assert_eq!(coupling_closed(1, 0, 0.7, 0.4).unwrap(), 0.0);
        assert_eq!(coupling_closed(2, 5, 1.0, 0.5).unwrap(), 0.0); // k < l
    }

    #[test]
    fn legendre_normalization() {
        // alpha = beta = 1/2 is the Legendre family: int P_k^2 = 2/(2k+1)
        let q = coupling_quadrature(0, 0, 0.5, 0.5).unwrap();
        assert!((q.value - 2.0).abs() < 1e-10);
        let q = coupling_quadrature(1, 1, 0.5, 0.5).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-10);
        for k in 0..=10 {
            let c = coupling_closed(k, k, 0.5, 0.5).unwrap();
            assert!((c - 2.0 / (2.0 * k as f64 + 1.0)).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn diagonal_family_kills_off_diagonal() {
        assert_eq!(coupling_closed(3, 1, 1.0, 1.0).unwrap(), 0.0);
        let q = coupling_quadrature(3, 1, 1.0, 1.0).unwrap();
        assert!(q.value.abs() < 1e-11);
    }

    #[test]
    fn gegenbauer_sign_below_diagonal_order() {
        // alpha < beta makes Poch(alpha-beta, 1) < 0
        let c = coupling_closed(2, 0, 0.25, 0.5).unwrap();
        assert!(c < 0.0, "expected negative, got {c}");
        let q = coupling_quadrature(2, 0, 0.25, 0.5).unwrap();
        assert!((c - q.value).abs() < 1e-9, "closed {c} vs quad {}", q.value);
    }

    #[test]
    fn sign_law_alpha_above_beta() {
        for &(alpha, beta) in &[(1.0, 0.5), (1.5, 1.0), (0.5, 0.0), (2.0, 0.0)] {
            for l in 0..=6 {
                for n in 0..=4 {
                    let c = coupling_closed(l + 2 * n, l, alpha, beta).unwrap();
                    assert!(c > 0.0, "alpha={alpha} beta={beta} l={l} n={n}: {c}");
                }
            }
        }
    }

    #[test]
    fn closed_matches_quadrature_across_orders() {
        for &(alpha, beta) in &[(0.5, 0.5), (1.0, 0.5), (0.25, 0.5), (1.5, 1.0)] {
            for k in 0..=10 {
                for l in 0..=10 {
                    let c = coupling_closed(k, l, alpha, beta).unwrap();
                    let q = coupling_quadrature(k, l, alpha, beta).unwrap();
                    assert!(
                        (c - q.value).abs() < 1e-8,
                        "({alpha},{beta}) k={k} l={l}: closed {c} vs quad {}",
                        q.value
                    );
                }
            }
        }
    }

    #[test]
    fn zero_order_limits_match_quadrature() {
        // alpha = 0 family (second factor weight beta)
        for &(alpha, beta) in &[(0.0, 0.5), (0.0, 1.0), (0.7, 0.0), (1.5, 0.0), (0.0, 0.0)] {
            for k in 0..=8 {
                for l in 0..=8 {
                    let c = coupling_closed(k, l, alpha, beta).unwrap();
                    let q = coupling_quadrature(k, l, alpha, beta).unwrap();
                    assert!(
                        (c - q.value).abs() < 1e-8,
                        "({alpha},{beta}) k={k} l={l}: closed {c} vs quad {}",
                        q.value
                    );
                }
            }
        }
    }

    #[test]
    fn kappa_reference_values() {
        assert_eq!(kappa(2, 0).unwrap(), 2.0);
        assert_eq!(kappa(1, 1).unwrap(), 1.0);
        assert!((kappa(3, 1).unwrap() - 2.0 * PI).abs() < 1e-12);
        // N = 3: kappa is 2 pi for every degree
        for l in 0..6 {
            assert!((kappa(3, l).unwrap() - 2.0 * PI).abs() < 1e-11);
        }
        // N = 4: 4 pi / (l + 1)
        for l in 0..6 {
            assert!((kappa(4, l).unwrap() - 4.0 * PI / (l as f64 + 1.0)).abs() < 1e-11);
        }
        assert!(kappa(1, 2).is_err());
    }

    #[test]
    fn table_zero_pattern_is_exact() {
        let t = CouplingTable::build(1.0, 0.5, 8, 8).unwrap();
        for k in 0..=8 {
            for l in 0..=8 {
                if k < l || (k as i64 - l as i64) % 2 != 0 {
                    assert_eq!(t.entry(k, l), 0.0, "k={k} l={l} must be exactly zero");
                }
            }
        }
        let csv = t.to_csv();
        assert!(csv.starts_with("k,l,alpha,beta,value\n"));
        assert_eq!(csv.lines().count(), 1 + 81);
    }
}
