//! Real spherical harmonics for N in {1, 2, 3} and the Funk-Hecke transform.
//!
//! Conventions:
//! - N = 1: S^0 = {-1, +1}, Y_{l,0}(w) = 2^{-1/2} w^l for l in {0, 1}.
//! - N = 2: Y_{0,0} = (2 pi)^{-1/2}; for l >= 1, m = +1 is pi^{-1/2} cos(l t)
//!   and m = -1 is pi^{-1/2} sin(l t), t the polar angle.
//! - N = 3: real harmonics built from associated Legendre functions,
//!   orthonormal with respect to the surface measure.

use super::coupling::kappa;
use super::gegenbauer::{gegenbauer, GegenbauerIndex};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate_split, QuadResult, Tol};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct HarmonicIndex {
    pub dim: usize,
    pub l: usize,
    pub m: i32,
}

impl HarmonicIndex {
    pub fn new(dim: usize, l: usize, m: i32) -> Result<Self> {
        let idx = HarmonicIndex { dim, l, m };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        match self.dim {
            1 => {
                if self.l > 1 || self.m != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "N=1 harmonics: l in {{0,1}}, m = 0; got l={}, m={}",
                        self.l, self.m
                    )));
                }
            }
            2 => {
                let ok = (self.l == 0 && self.m == 0) || (self.l >= 1 && self.m.abs() == 1);
                if !ok {
                    return Err(Error::InvalidParameter(format!(
                        "N=2 harmonics: m=0 for l=0, m=+-1 for l>=1; got l={}, m={}",
                        self.l, self.m
                    )));
                }
            }
            3 => {
                if self.m.unsigned_abs() as usize > self.l {
                    return Err(Error::InvalidParameter(format!(
                        "N=3 harmonics require |m| <= l; got l={}, m={}",
                        self.l, self.m
                    )));
                }
            }
            _ => {
                // only the constant harmonic exists beyond the pointwise
                // N <= 3 implementation
                if self.l != 0 || self.m != 0 {
                    return Err(Error::Unsupported(format!(
                        "pointwise spherical harmonics implemented for N <= 3, got N={} l={}",
                        self.dim, self.l
                    )));
                }
            }
        }
        Ok(())
    }

    /// All valid m for the given (dim, l).
    pub fn m_values(dim: usize, l: usize) -> Vec<i32> {
        match dim {
            1 => vec![0],
            2 => {
                if l == 0 {
                    vec![0]
                } else {
                    vec![-1, 1]
                }
            }
            3 => (-(l as i32)..=l as i32).collect(),
            _ => {
                if l == 0 {
                    vec![0]
                } else {
                    vec![]
                }
            }
        }
    }
}

/// Associated Legendre P_l^m(x) for m >= 0, without the Condon-Shortley phase.
fn assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    debug_assert!(m <= l);
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        pll = ((2.0 * llf - 1.0) * x * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Evaluate the real spherical harmonic at a unit vector.
pub fn spherical_harmonic(idx: HarmonicIndex, omega: &[f64]) -> Result<f64> {
    idx.validate()?;
    if omega.len() != idx.dim {
        return Err(Error::InvalidParameter(format!(
            "omega has dimension {}, expected {}",
            omega.len(),
            idx.dim
        )));
    }
    let norm2: f64 = omega.iter().map(|c| c * c).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "omega must be a unit vector, |omega| = {}",
            norm2.sqrt()
        )));
    }
    if idx.dim > 3 {
        // constant harmonic only (l = 0 was enforced by validate)
        return Ok(1.0 / crate::functional::sphere_surface(idx.dim).sqrt());
    }
    Ok(match idx.dim {
        1 => {
            let w = omega[0];
            std::f64::consts::FRAC_1_SQRT_2 * if idx.l == 1 { w } else { 1.0 }
        }
        2 => {
            if idx.l == 0 {
                1.0 / (2.0 * PI).sqrt()
            } else {
                let theta = omega[1].atan2(omega[0]);
                let lt = idx.l as f64 * theta;
                let base = 1.0 / PI.sqrt();
                if idx.m > 0 {
                    base * lt.cos()
                } else {
                    base * lt.sin()
                }
            }
        }
        3 => {
            let ct = omega[2];
            let phi = omega[1].atan2(omega[0]);
            let l = idx.l;
            let ma = idx.m.unsigned_abs() as usize;
            let mut nrm = (2.0 * l as f64 + 1.0) / (4.0 * PI);
            for i in (l - ma + 1)..=(l + ma) {
                nrm /= i as f64;
            }
            let nrm = nrm.sqrt();
            let p = assoc_legendre(l, ma, ct);
            if idx.m == 0 {
                nrm * p
            } else if idx.m > 0 {
                std::f64::consts::SQRT_2 * nrm * p * (ma as f64 * phi).cos()
            } else {
                std::f64::consts::SQRT_2 * nrm * p * (ma as f64 * phi).sin()
            }
        }
        _ => unreachable!(),
    })
}

/// Funk-Hecke eigenvalue of the kernel profile `K` on degree-l harmonics:
/// kappa_{N,l} int_{-1}^{1} K(tau) C_l^{((N-2)/2)}(tau) (1-tau^2)^{(N-3)/2} dtau.
/// The substitution tau = sin(theta) removes the endpoint weight singularity
/// at N = 2.
pub fn funk_hecke_eigenvalue(
    kernel: impl Fn(f64) -> f64,
    l: usize,
    dim: usize,
) -> Result<QuadResult> {
    if dim < 2 {
        return Err(Error::Unsupported(
            "Funk-Hecke integral form requires N >= 2 (N=1 is a two-point sum)".into(),
        ));
    }
    let alpha = (dim as f64 - 2.0) / 2.0;
    let idx = GegenbauerIndex::new(l, alpha)?;
    let kap = kappa(dim, l)?;
    let f = move |theta: f64| {
        let tau = theta.sin();
        let w = theta.cos().powi(dim as i32 - 2);
        kernel(tau) * gegenbauer(idx, tau).unwrap() * w
    };
    let half_pi = 0.5 * PI;
    let q = integrate_split(f, &[-half_pi, 0.0, half_pi], Tol::absolute(1e-11));
    Ok(q.scale(kap))
}

/// Quadrature rule over the unit sphere S^{N-1}, N in {1, 2, 3}; returns
/// (points, weights) summing to the surface measure. Exact for harmonics of
/// degree up to roughly `order`.
pub fn surface_quadrature(dim: usize, order: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    match dim {
        1 => Ok((vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0])),
        2 => {
            let n = (2 * order + 4).max(8);
            let w = 2.0 * PI / n as f64;
            let mut pts = Vec::with_capacity(n);
            for i in 0..n {
                let t = w * i as f64 / (2.0 * PI) * 2.0 * PI;
                pts.push(vec![t.cos(), t.sin()]);
            }
            Ok((pts, vec![w; n]))
        }
        3 => {
            let nt = order + 2;
            let np = 2 * order + 4;
            let (ct, wt) = gauss_legendre(nt);
            let wp = 2.0 * PI / np as f64;
            let mut pts = Vec::with_capacity(nt * np);
            let mut wts = Vec::with_capacity(nt * np);
            for (c, w) in ct.iter().zip(&wt) {
                let st = (1.0 - c * c).max(0.0).sqrt();
                for j in 0..np {
                    let phi = wp * j as f64;
                    pts.push(vec![st * phi.cos(), st * phi.sin(), *c]);
                    wts.push(w * wp);
                }
            }
            Ok((pts, wts))
        }
        _ => Err(Error::Unsupported(format!("surface quadrature implemented for N <= 3, got {dim}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_points() {
        let y = spherical_harmonic(HarmonicIndex::new(1, 0, 0).unwrap(), &[1.0]).unwrap();
        assert!((y - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let y = spherical_harmonic(HarmonicIndex::new(2, 0, 0).unwrap(), &[0.6, 0.8]).unwrap();
        assert!((y - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let y = spherical_harmonic(HarmonicIndex::new(3, 0, 0).unwrap(), &[0.0, 0.0, 1.0]).unwrap();
        assert!((y - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(HarmonicIndex::new(4, 1, 0).is_err());
        assert!(HarmonicIndex::new(4, 0, 0).is_ok());
        assert!(HarmonicIndex::new(1, 2, 0).is_err());
        assert!(spherical_harmonic(HarmonicIndex::new(3, 1, 0).unwrap(), &[0.0, 0.0, 1.1]).is_err());
    }

    #[test]
    fn orthonormality_under_surface_quadrature() {
        for dim in 1..=3usize {
            let lmax = if dim == 1 { 1 } else { 4 };
            let (pts, wts) = surface_quadrature(dim, 2 * lmax + 2).unwrap();
            let mut basis: Vec<(HarmonicIndex, Vec<f64>)> = Vec::new();
            for l in 0..=lmax {
                for m in HarmonicIndex::m_values(dim, l) {
                    let idx = HarmonicIndex::new(dim, l, m).unwrap();
                    let vals: Vec<f64> = pts
                        .iter()
                        .map(|p| spherical_harmonic(idx, p).unwrap())
                        .collect();
                    basis.push((idx, vals));
                }
            }
            for (i, (idx_a, va)) in basis.iter().enumerate() {
                for (j, (idx_b, vb)) in basis.iter().enumerate() {
                    let inner: f64 = va
                        .iter()
                        .zip(vb.iter())
                        .zip(wts.iter())
                        .map(|((a, b), w)| a * b * w)
                        .sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (inner - expected).abs() < 1e-10,
                        "dim={dim} {idx_a:?} vs {idx_b:?}: {inner}"
                    );
                }
            }
        }
    }

    #[test]
    fn funk_hecke_reference_values() {
        // K = 1, l = 0, N = 3: surface measure of S^2
        let q = funk_hecke_eigenvalue(|_| 1.0, 0, 3).unwrap();
        assert!((q.value - 4.0 * PI).abs() < 1e-9);
        // K = tau, l = 0, N = 3: orthogonality kills it
        let q = funk_hecke_eigenvalue(|t| t, 0, 3).unwrap();
        assert!(q.value.abs() < 1e-10);
        // K = tau, l = 1, N = 3: kappa * int tau^2 = 2 pi * 2/3
        let q = funk_hecke_eigenvalue(|t| t, 1, 3).unwrap();
        assert!((q.value - 4.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn funk_hecke_matches_surface_action() {
        // kernel acting on sample harmonics by direct surface quadrature
        for dim in 2..=3usize {
            let (pts, wts) = surface_quadrature(dim, 16).unwrap();
            let kernels: Vec<(&str, Box<dyn Fn(f64) -> f64>)> = vec![
                ("one", Box::new(|_| 1.0)),
                ("tau", Box::new(|t| t)),
                ("tau2", Box::new(|t: f64| t * t)),
                ("exp", Box::new(|t: f64| t.exp())),
            ];
            let lmax = 3;
            for (name, kern) in &kernels {
                for l in 0..=lmax {
                    let eig = funk_hecke_eigenvalue(kern, l, dim).unwrap();
                    for m in HarmonicIndex::m_values(dim, l) {
                        let idx = HarmonicIndex::new(dim, l, m).unwrap();
                        // pick a test direction away from the poles
                        let omega: Vec<f64> = match dim {
                            2 => vec![0.6, 0.8],
                            _ => vec![0.48, 0.6, 0.64],
                        };
                        let lhs: f64 = pts
                            .iter()
                            .zip(&wts)
                            .map(|(p, w)| {
                                let dot: f64 =
                                    p.iter().zip(&omega).map(|(a, b)| a * b).sum();
                                kern(dot.clamp(-1.0, 1.0))
                                    * spherical_harmonic(idx, p).unwrap()
                                    * w
                            })
                            .sum();
                        let rhs = eig.value * spherical_harmonic(idx, &omega).unwrap();
                        assert!(
                            (lhs - rhs).abs() < 1e-7,
                            "dim={dim} K={name} l={l} m={m}: {lhs} vs {rhs}"
                        );
                    }
                }
            }
        }
    }
}
