//! Radial profiles: the 1D building blocks of every expression.

use crate::error::{Error, Result};
use crate::quad::{integrate_split, integrate_to_inf, QuadResult, Tol};
use serde::{Deserialize, Serialize};

/// One polynomial piece sum_j coeffs[j] r^j on [lo, hi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl PolyPiece {
    pub fn eval(&self, r: f64) -> f64 {
        let mut v = 0.0;
        for c in self.coeffs.iter().rev() {
            v = v * r + c;
        }
        v
    }
}

/// Closed family of radial profiles on [0, infinity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadialProfile {
    /// Compactly supported piecewise polynomial; pieces must be ascending
    /// and non-overlapping.
    PiecewisePolynomial { pieces: Vec<PolyPiece> },
    /// (b^2 + r^2)^{-p} with scale b > 0.
    PowerLaw { b: f64, p: f64 },
    /// exp(-c r) with c > 0.
    Exponential { c: f64 },
    /// exp(-c r^2) with c > 0.
    Gaussian { c: f64 },
}

impl RadialProfile {
    /// Indicator of [lo, hi).
    pub fn indicator(lo: f64, hi: f64) -> Self {
        RadialProfile::PiecewisePolynomial {
            pieces: vec![PolyPiece { lo, hi, coeffs: vec![1.0] }],
        }
    }

    /// Smooth compact bump c0 (1 - ((r-center)/width)^2)^2 on |r-center| < width.
    pub fn bump(center: f64, width: f64, amplitude: f64) -> Self {
        // expand a (1 - u^2)^2 with u = (r - c)/w into powers of r
        let (c, w) = (center, width);
        let w2 = w * w;
        let w4 = w2 * w2;
        // (1 - (r-c)^2/w^2)^2 = 1 - 2 (r-c)^2 / w^2 + (r-c)^4 / w^4
        // (r-c)^2 = r^2 - 2cr + c^2
        // (r-c)^4 = r^4 - 4cr^3 + 6c^2 r^2 - 4c^3 r + c^4
        let a0 = 1.0 - 2.0 * c * c / w2 + c * c * c * c / w4;
        let a1 = 4.0 * c / w2 - 4.0 * c * c * c / w4;
        let a2 = -2.0 / w2 + 6.0 * c * c / w4;
        let a3 = -4.0 * c / w4;
        let a4 = 1.0 / w4;
        RadialProfile::PiecewisePolynomial {
            pieces: vec![PolyPiece {
                lo: (c - w).max(0.0),
                hi: c + w,
                coeffs: vec![
                    amplitude * a0,
                    amplitude * a1,
                    amplitude * a2,
                    amplitude * a3,
                    amplitude * a4,
                ],
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::InvalidParameter("empty piecewise profile".into()));
                }
                let mut prev = 0.0f64;
                for p in pieces {
                    if p.lo < 0.0 || p.hi <= p.lo || p.lo < prev {
                        return Err(Error::InvalidParameter(
                            "piecewise profile pieces must be ascending with lo >= 0".into(),
                        ));
                    }
                    prev = p.hi;
                }
                Ok(())
            }
            RadialProfile::PowerLaw { b, .. } if !(*b > 0.0) => {
                Err(Error::InvalidParameter("power-law scale must be > 0".into()))
            }
            RadialProfile::Exponential { c } | RadialProfile::Gaussian { c } if !(*c > 0.0) => {
                Err(Error::InvalidParameter("decay rate must be > 0".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                for p in pieces {
                    if r >= p.lo && r < p.hi {
                        return p.eval(r);
                    }
                }
                0.0
            }
            RadialProfile::PowerLaw { b, p } => (b * b + r * r).powf(-p),
            RadialProfile::Exponential { c } => (-c * r).exp(),
            RadialProfile::Gaussian { c } => (-c * r * r).exp(),
        }
    }

    /// Support as (lo, hi); hi = f64::INFINITY for decaying profiles.
    pub fn support(&self) -> (f64, f64) {
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                (pieces.first().unwrap().lo, pieces.last().unwrap().hi)
            }
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Finite radii where the profile can kink; quadratures split here.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                let mut v: Vec<f64> = pieces.iter().map(|p| p.lo).collect();
                v.push(pieces.last().unwrap().hi);
                v
            }
            RadialProfile::PowerLaw { b, .. } => vec![*b],
            RadialProfile::Exponential { c } | RadialProfile::Gaussian { c } => vec![1.0 / c],
        }
    }

    /// Polynomial decay rate q such that |phi(r)| <~ r^{-q} at infinity
    /// (infinite for super-polynomial decay, 0 for compact support).
    pub fn decay_exponent(&self) -> f64 {
        match self {
            RadialProfile::PowerLaw { p, .. } => 2.0 * p,
            RadialProfile::PiecewisePolynomial { .. } => f64::INFINITY,
            _ => f64::INFINITY,
        }
    }

    /// phi(s * r) expressed in the same family, with a scalar multiplier:
    /// returns (profile, mult) with phi(s r) = mult * profile(r).
    pub fn scale_argument(&self, s: f64) -> (RadialProfile, f64) {
        assert!(s > 0.0);
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                let new = pieces
                    .iter()
                    .map(|p| {
                        let mut coeffs = p.coeffs.clone();
                        let mut pw = 1.0;
                        for c in coeffs.iter_mut() {
                            *c *= pw;
                            pw *= s;
                        }
                        PolyPiece { lo: p.lo / s, hi: p.hi / s, coeffs }
                    })
                    .collect();
                (RadialProfile::PiecewisePolynomial { pieces: new }, 1.0)
            }
            RadialProfile::PowerLaw { b, p } => {
                // (b^2 + s^2 r^2)^{-p} = s^{-2p} ((b/s)^2 + r^2)^{-p}
                (RadialProfile::PowerLaw { b: b / s, p: *p }, s.powf(-2.0 * p))
            }
            RadialProfile::Exponential { c } => (RadialProfile::Exponential { c: c * s }, 1.0),
            RadialProfile::Gaussian { c } => (RadialProfile::Gaussian { c: c * s * s }, 1.0),
        }
    }

    /// Moment integral M_q = int phi(r) r^q dr over the support.
    /// Closed form for piecewise polynomials, quadrature otherwise.
    pub fn moment(&self, q: f64) -> QuadResult {
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                let mut total = 0.0;
                for p in pieces {
                    for (j, c) in p.coeffs.iter().enumerate() {
                        let e = q + j as f64 + 1.0;
                        total += c * (p.hi.powf(e) - p.lo.powf(e)) / e;
                    }
                }
                QuadResult { value: total, abs_error: 1e-15 * total.abs(), converged: true }
            }
            _ => {
                let f = |r: f64| self.eval(r) * r.powf(q);
                if let RadialProfile::PowerLaw { p, .. } = self {
                    if q + 1.0 >= 2.0 * p {
                        return QuadResult { value: f64::INFINITY, abs_error: f64::INFINITY, converged: false };
                    }
                }
                integrate_to_inf(f, 0.0, Tol::absolute(1e-13))
            }
        }
    }

    /// Laplace transform int_0^inf phi(r) e^{-tau r} dr, tau > 0.
    /// Closed forms: piecewise polynomials (stable small-tau series switch)
    /// and exponentials; quadrature for the rest.
    pub fn laplace(&self, tau: f64) -> f64 {
        match self {
            RadialProfile::PiecewisePolynomial { pieces } => {
                let mut total = 0.0;
                for p in pieces {
                    if tau * p.hi < 1e-3 {
                        // series: int r^j e^{-tau r} = sum_n (-tau)^n/n! M_{j+n}
                        for (j, c) in p.coeffs.iter().enumerate() {
                            let mut term = 0.0;
                            let mut fact = 1.0;
                            for n in 0..12 {
                                let e = (j + n) as f64 + 1.0;
                                term += fact * (p.hi.powf(e) - p.lo.powf(e)) / e;
                                fact *= -tau / (n as f64 + 1.0);
                            }
                            total += c * term;
                        }
                    } else {
                        // int_lo^hi r^j e^{-tau r} dr by upward recurrence in j:
                        // I_j = (j I_{j-1} + lo^j e^{-tau lo} - hi^j e^{-tau hi}) / tau
                        let elo = (-tau * p.lo).exp();
                        let ehi = (-tau * p.hi).exp();
                        let mut ij = (elo - ehi) / tau;
                        let mut plo = 1.0;
                        let mut phi_ = 1.0;
                        for (j, c) in p.coeffs.iter().enumerate() {
                            if j > 0 {
                                plo *= p.lo;
                                phi_ *= p.hi;
                                ij = (j as f64 * ij + plo * elo - phi_ * ehi) / tau;
                            }
                            total += c * ij;
                        }
                    }
                }
                total
            }
            RadialProfile::Exponential { c } => 1.0 / (c + tau),
            _ => {
                integrate_to_inf(|r| self.eval(r) * (-tau * r).exp(), 0.0, Tol::absolute(1e-13))
                    .value
            }
        }
    }

    /// int_0^inf |phi(r)| r^q dr, used for truncation bounds.
    pub fn abs_moment(&self, q: f64) -> f64 {
        let f = |r: f64| self.eval(r).abs() * r.powf(q);
        let (lo, hi) = self.support();
        if hi.is_finite() {
            let mut pts = self.breakpoints();
            pts.insert(0, lo);
            pts.push(hi);
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            integrate_split(f, &pts, Tol::absolute(1e-12)).value
        } else {
            integrate_to_inf(f, 0.0, Tol::absolute(1e-12)).value
        }
    }
}
