//! Reduction of expressions to radial components about a common center.
//!
//! When every term of an expression is centered at one point, energies,
//! masses and moments collapse to 1D/2D radial quadratures. The compiled
//! [`RadialFn`] tree keeps pullbacks and restrictions symbolic so the
//! reduction is exact.

use super::profile::RadialProfile;
use super::{FuncExpr, SpliceSide};
use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use num_complex::Complex64;

/// A 1D radial function, closed under inversion images and windowing.
#[derive(Debug, Clone)]
pub enum RadialFn {
    Base(RadialProfile),
    /// (radius/rho)^{weight_pow} inner(radius^2 / rho)
    Inverted { inner: Box<RadialFn>, radius: f64, weight_pow: f64 },
    /// inner restricted to lo <= rho < hi
    Window { inner: Box<RadialFn>, lo: f64, hi: f64 },
}

impl RadialFn {
    pub fn eval(&self, rho: f64) -> f64 {
        match self {
            RadialFn::Base(p) => p.eval(rho),
            RadialFn::Inverted { inner, radius, weight_pow } => {
                if rho <= 0.0 {
                    return 0.0;
                }
                (radius / rho).powf(*weight_pow) * inner.eval(radius * radius / rho)
            }
            RadialFn::Window { inner, lo, hi } => {
                if rho >= *lo && rho < *hi {
                    inner.eval(rho)
                } else {
                    0.0
                }
            }
        }
    }

    /// Support interval (lo, hi); hi may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            RadialFn::Base(p) => p.support(),
            RadialFn::Inverted { inner, radius, .. } => {
                let (a, b) = inner.support();
                let r2 = radius * radius;
                let lo = if b.is_infinite() { 0.0 } else { r2 / b };
                let hi = if a <= 0.0 { f64::INFINITY } else { r2 / a };
                (lo, hi)
            }
            RadialFn::Window { inner, lo, hi } => {
                let (a, b) = inner.support();
                (a.max(*lo), b.min(*hi))
            }
        }
    }

    /// Finite radii where evaluation can kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = match self {
            RadialFn::Base(p) => p.breakpoints(),
            RadialFn::Inverted { inner, radius, .. } => {
                let r2 = radius * radius;
                inner
                    .breakpoints()
                    .into_iter()
                    .filter(|&t| t > 1e-300)
                    .map(|t| r2 / t)
                    .collect()
            }
            RadialFn::Window { inner, lo, hi } => {
                let mut v = inner.breakpoints();
                v.push(*lo);
                v.push(*hi);
                v
            }
        };
        pts.retain(|t| t.is_finite() && *t >= 0.0);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    pub fn windowed(self, lo: f64, hi: f64) -> RadialFn {
        RadialFn::Window { inner: Box::new(self), lo, hi }
    }

    /// int_lo^{min(hi, cut)} f(rho) rho^q drho. Closed form for plain
    /// piecewise-polynomial bases, quadrature otherwise.
    pub fn moment(&self, q: f64, cut: Option<f64>) -> crate::quad::QuadResult {
        use crate::quad::{integrate_split, integrate_to_inf, QuadResult, Tol};
        if let RadialFn::Base(p) = self {
            let (_, hi) = p.support();
            let within = match cut {
                Some(c) => hi <= c + 1e-15,
                None => true,
            };
            if within {
                return p.moment(q);
            }
        }
        let (lo, hi) = self.support();
        let hi = match cut {
            Some(c) => hi.min(c),
            None => hi,
        };
        if hi <= lo {
            return QuadResult::exact(0.0);
        }
        let f = |rho: f64| self.eval(rho) * rho.powf(q);
        let mut pts: Vec<f64> =
            self.breakpoints().into_iter().filter(|&t| t > lo && t < hi).collect();
        pts.insert(0, lo);
        if hi.is_finite() {
            pts.push(hi);
            integrate_split(f, &pts, Tol::absolute(1e-13))
        } else {
            let last = pts.last().copied().unwrap_or(lo) + 1.0;
            pts.push(last);
            let head = integrate_split(&f, &pts, Tol::absolute(1e-13));
            head.combine(integrate_to_inf(f, last, Tol::absolute(1e-13)))
        }
    }
}

/// One spherical-harmonic component phi(rho) Y_{l,m}(omega) with amplitude.
#[derive(Debug, Clone)]
pub struct RadialComponent {
    pub l: usize,
    pub m: i32,
    pub coeff: Complex64,
    pub f: RadialFn,
}

/// Try to express the whole expression as radial components about `center`.
/// Fails with `Unsupported` whenever any part is anchored elsewhere.
pub fn radialize(expr: &FuncExpr, center: &Point) -> Result<Vec<RadialComponent>> {
    let mut out = Vec::new();
    collect(expr, center, Complex64::new(1.0, 0.0), &mut out)?;
    out.retain(|c| c.coeff.norm() > 0.0);
    Ok(out)
}

fn collect(
    expr: &FuncExpr,
    center: &Point,
    scale: Complex64,
    out: &mut Vec<RadialComponent>,
) -> Result<()> {
    match expr {
        FuncExpr::Terms(terms) => {
            for t in terms {
                if t.center.dist(center) > 1e-12 * (1.0 + center.norm()) {
                    return Err(Error::Unsupported(format!(
                        "term centered at {:?} is not concentric with {:?}",
                        t.center.0, center.0
                    )));
                }
                out.push(RadialComponent {
                    l: t.harmonic.l,
                    m: t.harmonic.m,
                    coeff: scale * t.coeff,
                    f: RadialFn::Base(t.profile.clone()),
                });
            }
            Ok(())
        }
        FuncExpr::Sum(parts) => {
            for p in parts {
                collect(p, center, scale, out)?;
            }
            Ok(())
        }
        FuncExpr::Scaled(c, inner) => collect(inner, center, scale * c, out),
        FuncExpr::BallPullback { ball, spec, inner } => {
            if ball.center.dist(center) > 1e-12 * (1.0 + center.norm()) {
                return Err(Error::Unsupported(
                    "ball pullback is not concentric with the requested center".into(),
                ));
            }
            let mut comps = Vec::new();
            collect(inner, center, scale, &mut comps)?;
            for c in comps {
                out.push(RadialComponent {
                    l: c.l,
                    m: c.m,
                    coeff: c.coeff,
                    f: RadialFn::Inverted {
                        inner: Box::new(c.f),
                        radius: ball.radius,
                        weight_pow: spec.weight_pow(),
                    },
                });
            }
            Ok(())
        }
        FuncExpr::HalfSpacePullback { hs, inner } => {
            // supported only in 1D with the boundary at the center
            if center.dim() != 1 {
                return Err(Error::Unsupported(
                    "half-space pullback radializes only in dimension 1".into(),
                ));
            }
            if (hs.offset - center.0[0]).abs() > 1e-12 * (1.0 + center.norm()) {
                return Err(Error::Unsupported(
                    "half-space boundary does not pass through the requested center".into(),
                ));
            }
            let mut comps = Vec::new();
            collect(inner, center, scale, &mut comps)?;
            for c in comps {
                // reflection about the center flips odd components
                let sign = if c.l % 2 == 1 { -1.0 } else { 1.0 };
                out.push(RadialComponent { l: c.l, m: c.m, coeff: c.coeff * sign, f: c.f });
            }
            Ok(())
        }
        FuncExpr::Splice { region, spec, side, inner } => {
            let (inner_part, outer_part) = match side {
                SpliceSide::Inner => (
                    FuncExpr::Restrict {
                        region: region.clone(),
                        inside: true,
                        inner: inner.clone(),
                    },
                    FuncExpr::Restrict {
                        region: region.clone(),
                        inside: false,
                        inner: Box::new(crate::geometry::pullback_region(inner, region, spec)),
                    },
                ),
                SpliceSide::Outer => (
                    FuncExpr::Restrict {
                        region: region.clone(),
                        inside: true,
                        inner: Box::new(crate::geometry::pullback_region(inner, region, spec)),
                    },
                    FuncExpr::Restrict {
                        region: region.clone(),
                        inside: false,
                        inner: inner.clone(),
                    },
                ),
            };
            collect(&inner_part, center, scale, out)?;
            collect(&outer_part, center, scale, out)
        }
        FuncExpr::Restrict { region, inside, inner } => match region {
            Region::Ball(b) => {
                if b.center.dist(center) > 1e-12 * (1.0 + center.norm()) {
                    return Err(Error::Unsupported(
                        "restriction ball is not concentric with the requested center".into(),
                    ));
                }
                let mut comps = Vec::new();
                collect(inner, center, scale, &mut comps)?;
                for c in comps {
                    let (lo, hi) =
                        if *inside { (0.0, b.radius) } else { (b.radius, f64::INFINITY) };
                    out.push(RadialComponent {
                        l: c.l,
                        m: c.m,
                        coeff: c.coeff,
                        f: c.f.windowed(lo, hi),
                    });
                }
                Ok(())
            }
            Region::HalfSpace(hs) => {
                if center.dim() != 1 {
                    return Err(Error::Unsupported(
                        "half-space restriction radializes only in dimension 1".into(),
                    ));
                }
                if (hs.offset - center.0[0]).abs() > 1e-12 * (1.0 + center.norm()) {
                    return Err(Error::Unsupported(
                        "half-space boundary does not pass through the requested center".into(),
                    ));
                }
                let mut comps = Vec::new();
                collect(inner, center, scale, &mut comps)?;
                // keep the side of positive (normal-aligned) omega when
                // inside == (normal points positive)
                let positive_side = (hs.normal.0[0] > 0.0) == *inside;
                for c in comps {
                    // restriction of phi Y_l to one ray mixes parities:
                    // positive side: 1/2 phi (Y_0 + Y_1)
                    // negative side: (-1)^l/2 phi (Y_0 - Y_1)
                    let par = if c.l % 2 == 1 { -1.0 } else { 1.0 };
                    let (c0, c1) = if positive_side {
                        (c.coeff * 0.5, c.coeff * 0.5)
                    } else {
                        (c.coeff * par * 0.5, -c.coeff * par * 0.5)
                    };
                    out.push(RadialComponent { l: 0, m: 0, coeff: c0, f: c.f.clone() });
                    out.push(RadialComponent { l: 1, m: 0, coeff: c1, f: c.f });
                }
                Ok(())
            }
        },
        FuncExpr::Separable2D { .. } => {
            Err(Error::Unsupported("separable products have no radial reduction".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::Term;
    use crate::geometry::{Ball, KernelSpec};
    use crate::specfun::HarmonicIndex;

    #[test]
    fn inverted_profile_matches_pointwise_identity() {
        // optimizer with b = 1 about the unit ball center is a fixed point:
        // (1/rho)^{2N-l} (1 + (1/rho)^2)^{-(2N-l)/2} = (1 + rho^2)^{-(2N-l)/2}
        let spec = KernelSpec::new(2, 0.5).unwrap();
        let p = (2.0 * 2.0 - 0.5) / 2.0;
        let base = RadialFn::Base(RadialProfile::PowerLaw { b: 1.0, p });
        let inv = RadialFn::Inverted {
            inner: Box::new(base.clone()),
            radius: 1.0,
            weight_pow: spec.weight_pow(),
        };
        for &rho in &[0.2, 0.5, 1.0, 2.0, 7.0] {
            assert!(
                (inv.eval(rho) - base.eval(rho)).abs() < 1e-13 * base.eval(rho),
                "rho={rho}"
            );
        }
    }

    #[test]
    fn window_and_breakpoints() {
        let f = RadialFn::Base(RadialProfile::indicator(0.0, 2.0)).windowed(1.0, f64::INFINITY);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(1.5), 1.0);
        let (lo, hi) = f.support();
        assert_eq!((lo, hi), (1.0, 2.0));
        assert!(f.breakpoints().contains(&1.0));
    }

    #[test]
    fn radialize_rejects_off_center_terms() {
        let t = Term {
            center: Point(vec![1.0, 0.0]),
            harmonic: HarmonicIndex::new(2, 0, 0).unwrap(),
            profile: RadialProfile::indicator(0.0, 1.0),
            coeff: Complex64::new(1.0, 0.0),
        };
        let f = FuncExpr::Terms(vec![t]);
        assert!(radialize(&f, &Point(vec![0.0, 0.0])).is_err());
        assert!(radialize(&f, &Point(vec![1.0, 0.0])).is_ok());
    }

    #[test]
    fn ball_pullback_support_inverts() {
        let spec = KernelSpec::new(1, 0.5).unwrap();
        let ball = Ball::unit(1);
        let t = Term {
            center: Point(vec![0.0]),
            harmonic: HarmonicIndex::new(1, 0, 0).unwrap(),
            profile: RadialProfile::indicator(0.0, 1.0),
            coeff: Complex64::new(1.0, 0.0),
        };
        let f = FuncExpr::Terms(vec![t]);
        let theta_f = crate::geometry::pullback_ball(&f, &ball, &spec);
        let comps = radialize(&theta_f, &Point(vec![0.0])).unwrap();
        assert_eq!(comps.len(), 1);
        let (lo, hi) = comps[0].f.support();
        assert_eq!(lo, 1.0);
        assert!(hi.is_infinite());
    }
}
