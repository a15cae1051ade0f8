//! The closed function algebra and the functionals evaluated on it:
//! masses, L^p norms, entropies, Riesz and logarithmic pair energies.

mod energy;
mod profile;
mod radial;
mod sexpr;

pub use energy::{
    angular_kernel_probe, flatten_terms, log_energy, loghls_functional, pair_energy,
    radial_inner_integral, riesz_energy, two_center_radial_energy, PairKernel,
};
pub use profile::{PolyPiece, RadialProfile};
pub use radial::{radialize, RadialComponent, RadialFn};
pub use sexpr::{parse_expr, print_expr};

use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::quad::{integrate_split, integrate_to_inf, QuadResult, Tol};
use crate::specfun::{spherical_harmonic, surface_quadrature, HarmonicIndex, log_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Surface measure of the unit sphere S^{N-1}; N = 1 uses counting measure
/// on {-1, +1}, so the value is 2.
pub fn sphere_surface(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        n => {
            let nf = n as f64;
            2.0 * PI.powf(nf / 2.0) / log_gamma(nf / 2.0).map(f64::exp).unwrap()
        }
    }
}

/// A single radial-profile x spherical-harmonic term about a center.
/// The pointwise value is coeff * profile(|x - center|) * Y_{l,m}(omega).
#[derive(Debug, Clone)]
pub struct Term {
    pub center: Point,
    pub harmonic: HarmonicIndex,
    pub profile: RadialProfile,
    pub coeff: Complex64,
}

impl Term {
    /// Plain radial term evaluating to `amplitude * profile(|x - center|)`.
    pub fn radial(dim: usize, center: Point, profile: RadialProfile, amplitude: f64) -> Result<Self> {
        profile.validate()?;
        Ok(Term {
            center,
            harmonic: HarmonicIndex::new(dim, 0, 0)?,
            profile,
            coeff: Complex64::new(amplitude * sphere_surface(dim).sqrt(), 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.harmonic.dim
    }
}

/// Which side of a splice an expression represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpliceSide {
    Inner,
    Outer,
}

/// The closed symbolic function algebra. All operators return new
/// expressions; nothing is mutated.
#[derive(Debug, Clone)]
pub enum FuncExpr {
    Terms(Vec<Term>),
    Sum(Vec<FuncExpr>),
    Scaled(Complex64, Box<FuncExpr>),
    BallPullback { ball: crate::geometry::Ball, spec: crate::geometry::KernelSpec, inner: Box<FuncExpr> },
    HalfSpacePullback { hs: crate::geometry::HalfSpace, inner: Box<FuncExpr> },
    Splice { region: Region, spec: crate::geometry::KernelSpec, side: SpliceSide, inner: Box<FuncExpr> },
    Restrict { region: Region, inside: bool, inner: Box<FuncExpr> },
    /// u(x_1) w(x_2) with both factors una-dimensional expressions.
    Separable2D { u: Box<FuncExpr>, w: Box<FuncExpr> },
}

/// Exclusion radius around inversion centers; evaluation inside is rejected.
const SINGULAR_RADIUS: f64 = 1e-14;

impl FuncExpr {
    pub fn radial_term(dim: usize, center: Point, profile: RadialProfile, amplitude: f64) -> Result<Self> {
        Ok(FuncExpr::Terms(vec![Term::radial(dim, center, profile, amplitude)?]))
    }

    pub fn scaled(&self, c: Complex64) -> FuncExpr {
        FuncExpr::Scaled(c, Box::new(self.clone()))
    }

    pub fn plus(&self, other: &FuncExpr) -> FuncExpr {
        FuncExpr::Sum(vec![self.clone(), other.clone()])
    }

    pub fn minus(&self, other: &FuncExpr) -> FuncExpr {
        FuncExpr::Sum(vec![self.clone(), other.scaled(Complex64::new(-1.0, 0.0))])
    }

    pub fn dim(&self) -> usize {
        match self {
            FuncExpr::Terms(ts) => ts.first().map(|t| t.dim()).unwrap_or(1),
            FuncExpr::Sum(ps) => ps.first().map(|p| p.dim()).unwrap_or(1),
            FuncExpr::Scaled(_, inner) => inner.dim(),
            FuncExpr::BallPullback { inner, .. } => inner.dim(),
            FuncExpr::HalfSpacePullback { inner, .. } => inner.dim(),
            FuncExpr::Splice { inner, .. } => inner.dim(),
            FuncExpr::Restrict { inner, .. } => inner.dim(),
            FuncExpr::Separable2D { .. } => 2,
        }
    }

    /// Candidate common centers for radial reduction.
    pub fn candidate_centers(&self) -> Vec<Point> {
        let mut out = Vec::new();
        self.collect_centers(&mut out);
        out.dedup_by(|a, b| a.dist(b) < 1e-12);
        out
    }

    fn collect_centers(&self, out: &mut Vec<Point>) {
        match self {
            FuncExpr::Terms(ts) => out.extend(ts.iter().map(|t| t.center.clone())),
            FuncExpr::Sum(ps) => ps.iter().for_each(|p| p.collect_centers(out)),
            FuncExpr::Scaled(_, inner) => inner.collect_centers(out),
            FuncExpr::BallPullback { ball, inner, .. } => {
                out.push(ball.center.clone());
                inner.collect_centers(out);
            }
            FuncExpr::HalfSpacePullback { inner, .. } => inner.collect_centers(out),
            FuncExpr::Splice { region, inner, .. } | FuncExpr::Restrict { region, inner, .. } => {
                if let Region::Ball(b) = region {
                    out.push(b.center.clone());
                }
                inner.collect_centers(out);
            }
            FuncExpr::Separable2D { .. } => {}
        }
    }

    /// Pointwise evaluation. Deterministic; rejects points within the
    /// exclusion radius of an inversion center.
    pub fn evaluate(&self, x: &Point) -> Result<Complex64> {
        match self {
            FuncExpr::Terms(terms) => {
                let mut v = Complex64::new(0.0, 0.0);
                for t in terms {
                    let d = x.sub(&t.center);
                    let rho = d.norm();
                    if rho < 1e-300 {
                        if t.harmonic.l == 0 {
                            let y00 = 1.0 / sphere_surface(t.dim()).sqrt();
                            v += t.coeff * t.profile.eval(0.0) * y00;
                        }
                        continue;
                    }
                    let omega = d.scale(1.0 / rho);
                    let y = spherical_harmonic(t.harmonic, &omega.0)?;
                    v += t.coeff * t.profile.eval(rho) * y;
                }
                Ok(v)
            }
            FuncExpr::Sum(parts) => {
                let mut v = Complex64::new(0.0, 0.0);
                for p in parts {
                    v += p.evaluate(x)?;
                }
                Ok(v)
            }
            FuncExpr::Scaled(c, inner) => Ok(c * inner.evaluate(x)?),
            FuncExpr::BallPullback { ball, spec, inner } => {
                let rho = x.dist(&ball.center);
                if rho < SINGULAR_RADIUS * ball.radius.max(1.0) {
                    return Err(Error::SingularPoint(
                        "evaluation at an inversion center".into(),
                    ));
                }
                let y = crate::geometry::invert_point(ball, x)?;
                let w = (ball.radius / rho).powf(spec.weight_pow());
                Ok(inner.evaluate(&y)? * w)
            }
            FuncExpr::HalfSpacePullback { hs, inner } => {
                inner.evaluate(&crate::geometry::reflect_point(hs, x))
            }
            FuncExpr::Splice { region, spec, side, inner } => {
                let inside = region.contains(x);
                let use_plain = match side {
                    SpliceSide::Inner => inside,
                    SpliceSide::Outer => !inside,
                };
                if use_plain {
                    inner.evaluate(x)
                } else {
                    crate::geometry::pullback_region(inner, region, spec).evaluate(x)
                }
            }
            FuncExpr::Restrict { region, inside, inner } => {
                if region.contains(x) == *inside {
                    inner.evaluate(x)
                } else {
                    Ok(Complex64::new(0.0, 0.0))
                }
            }
            FuncExpr::Separable2D { u, w } => {
                if x.dim() != 2 {
                    return Err(Error::InvalidParameter(
                        "separable products live in dimension 2".into(),
                    ));
                }
                let a = u.evaluate(&Point(vec![x.0[0]]))?;
                let b = w.evaluate(&Point(vec![x.0[1]]))?;
                Ok(a * b)
            }
        }
    }

    /// The expression x -> f(a + s x); exact on the whole algebra.
    /// Regions and profiles transform in closed form.
    pub fn affine(&self, a: &Point, s: f64) -> FuncExpr {
        assert!(s > 0.0, "affine scale must be positive");
        let map_region = |r: &Region| -> Region {
            match r {
                Region::Ball(b) => Region::Ball(crate::geometry::Ball {
                    center: b.center.sub(a).scale(1.0 / s),
                    radius: b.radius / s,
                }),
                Region::HalfSpace(h) => Region::HalfSpace(crate::geometry::HalfSpace {
                    normal: h.normal.clone(),
                    offset: (h.offset - a.dot(&h.normal)) / s,
                }),
            }
        };
        match self {
            FuncExpr::Terms(terms) => FuncExpr::Terms(
                terms
                    .iter()
                    .map(|t| {
                        let (profile, mult) = t.profile.scale_argument(s);
                        Term {
                            center: t.center.sub(a).scale(1.0 / s),
                            harmonic: t.harmonic,
                            profile,
                            coeff: t.coeff * mult,
                        }
                    })
                    .collect(),
            ),
            FuncExpr::Sum(ps) => FuncExpr::Sum(ps.iter().map(|p| p.affine(a, s)).collect()),
            FuncExpr::Scaled(c, inner) => FuncExpr::Scaled(*c, Box::new(inner.affine(a, s))),
            FuncExpr::BallPullback { ball, spec, inner } => {
                let Region::Ball(b) = map_region(&Region::Ball(ball.clone())) else {
                    unreachable!()
                };
                FuncExpr::BallPullback { ball: b, spec: *spec, inner: Box::new(inner.affine(a, s)) }
            }
            FuncExpr::HalfSpacePullback { hs, inner } => {
                let Region::HalfSpace(h) = map_region(&Region::HalfSpace(hs.clone())) else {
                    unreachable!()
                };
                FuncExpr::HalfSpacePullback { hs: h, inner: Box::new(inner.affine(a, s)) }
            }
            FuncExpr::Splice { region, spec, side, inner } => FuncExpr::Splice {
                region: map_region(region),
                spec: *spec,
                side: *side,
                inner: Box::new(inner.affine(a, s)),
            },
            FuncExpr::Restrict { region, inside, inner } => FuncExpr::Restrict {
                region: map_region(region),
                inside: *inside,
                inner: Box::new(inner.affine(a, s)),
            },
            FuncExpr::Separable2D { .. } => {
                // separable products only participate in the dedicated
                // half-space machinery, which never rescales them
                self.clone()
            }
        }
    }

    /// For 1D expressions: finite points where the function may kink.
    pub fn breakpoints_1d(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        self.collect_breaks_1d(&mut pts);
        pts.retain(|t| t.is_finite());
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    fn collect_breaks_1d(&self, out: &mut Vec<f64>) {
        match self {
            FuncExpr::Terms(terms) => {
                for t in terms {
                    let c = t.center.0[0];
                    for b in t.profile.breakpoints() {
                        out.push(c + b);
                        out.push(c - b);
                    }
                    out.push(c);
                }
            }
            FuncExpr::Sum(ps) => ps.iter().for_each(|p| p.collect_breaks_1d(out)),
            FuncExpr::Scaled(_, inner) => inner.collect_breaks_1d(out),
            FuncExpr::BallPullback { ball, inner, .. } => {
                let a = ball.center.0[0];
                let r2 = ball.radius * ball.radius;
                let mut pts = Vec::new();
                inner.collect_breaks_1d(&mut pts);
                for t in pts {
                    if (t - a).abs() > 1e-300 {
                        out.push(a + r2 / (t - a));
                    }
                }
                out.push(a);
            }
            FuncExpr::HalfSpacePullback { hs, inner } => {
                let mut pts = Vec::new();
                inner.collect_breaks_1d(&mut pts);
                let e = hs.normal.0[0];
                for t in pts {
                    out.push(t + 2.0 * (hs.offset - t * e) * e);
                }
            }
            FuncExpr::Splice { region, spec, side: _, inner } => {
                inner.collect_breaks_1d(out);
                crate::geometry::pullback_region(inner, region, spec).collect_breaks_1d(out);
                match region {
                    Region::Ball(b) => {
                        out.push(b.center.0[0] - b.radius);
                        out.push(b.center.0[0] + b.radius);
                        out.push(b.center.0[0]);
                    }
                    Region::HalfSpace(h) => out.push(h.offset / h.normal.0[0]),
                }
            }
            FuncExpr::Restrict { region, inner, .. } => {
                inner.collect_breaks_1d(out);
                match region {
                    Region::Ball(b) => {
                        out.push(b.center.0[0] - b.radius);
                        out.push(b.center.0[0] + b.radius);
                    }
                    Region::HalfSpace(h) => out.push(h.offset / h.normal.0[0]),
                }
            }
            FuncExpr::Separable2D { .. } => {}
        }
    }

    /// Conservative support interval for 1D expressions (may be infinite).
    pub fn support_1d(&self) -> (f64, f64) {
        match self {
            FuncExpr::Terms(terms) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for t in terms {
                    let c = t.center.0[0];
                    let (_, b) = t.profile.support();
                    lo = lo.min(c - b);
                    hi = hi.max(c + b);
                }
                (lo, hi)
            }
            FuncExpr::Sum(ps) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for p in ps {
                    let (a, b) = p.support_1d();
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
                (lo, hi)
            }
            FuncExpr::Scaled(_, inner) => inner.support_1d(),
            FuncExpr::BallPullback { ball, inner, .. } => {
                let (a, b) = inner.support_1d();
                let c = ball.center.0[0];
                let r2 = ball.radius * ball.radius;
                if a.is_infinite() || b.is_infinite() || (a - c) * (b - c) <= 0.0 {
                    // support straddles the center: image is unbounded
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else {
                    let ia = c + r2 / (a - c);
                    let ib = c + r2 / (b - c);
                    (ia.min(ib), ia.max(ib))
                }
            }
            FuncExpr::HalfSpacePullback { hs, inner } => {
                let (a, b) = inner.support_1d();
                let e = hs.normal.0[0];
                let ra = a + 2.0 * (hs.offset - a * e) * e;
                let rb = b + 2.0 * (hs.offset - b * e) * e;
                (ra.min(rb), ra.max(rb))
            }
            FuncExpr::Splice { .. } => {
                // splices mix f and its image; keep the conservative answer
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            FuncExpr::Restrict { region, inside, inner } => {
                let (a, b) = inner.support_1d();
                match (region, inside) {
                    (Region::Ball(bl), true) => {
                        let c = bl.center.0[0];
                        (a.max(c - bl.radius), b.min(c + bl.radius))
                    }
                    (Region::HalfSpace(h), ins) => {
                        let t = h.offset / h.normal.0[0];
                        if (h.normal.0[0] > 0.0) == *ins {
                            (a.max(t), b)
                        } else {
                            (a, b.min(t))
                        }
                    }
                    (Region::Ball(_), false) => (a, b),
                }
            }
            FuncExpr::Separable2D { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Total mass of the expression. Linear in the terms, so multi-center
/// expressions are fine; wrapped expressions reduce radially or, in 1D,
/// integrate directly.
pub fn mass(f: &FuncExpr) -> Result<QuadResult> {
    if let Some(terms) = energy::flatten_terms(f) {
        let mut total = QuadResult::exact(0.0);
        for t in &terms {
            if t.harmonic.l != 0 {
                continue; // harmonics integrate to zero
            }
            if t.coeff.im.abs() > 1e-12 * t.coeff.norm() {
                return Err(Error::MassViolation("mass of a complex-amplitude term".into()));
            }
            let dim = t.dim();
            let m = t.profile.moment(dim as f64 - 1.0);
            total = total.combine(m.scale(t.coeff.re * sphere_surface(dim).sqrt()));
        }
        return Ok(total);
    }
    for center in f.candidate_centers() {
        if let Ok(comps) = radialize(f, &center) {
            return mass_of_components(&comps, f.dim(), None);
        }
    }
    if f.dim() == 1 {
        return line_integral(f, |v| v.re, Tol::absolute(1e-11));
    }
    Err(Error::Unsupported("mass: expression has no radial reduction and N > 1".into()))
}

/// Mass restricted to a region.
pub fn mass_in_region(f: &FuncExpr, region: &Region) -> Result<QuadResult> {
    if let Region::Ball(ball) = region {
        if let Ok(comps) = radialize(f, &ball.center) {
            return mass_of_components(&comps, f.dim(), Some(ball.radius));
        }
    }
    if let Some(terms) = energy::flatten_terms(f) {
        let mut total = QuadResult::exact(0.0);
        for t in &terms {
            total = total.combine(term_mass_in_region(t, region)?);
        }
        return Ok(total);
    }
    if f.dim() == 1 {
        let g = FuncExpr::Restrict { region: region.clone(), inside: true, inner: Box::new(f.clone()) };
        return line_integral(&g, |v| v.re, Tol::absolute(1e-11));
    }
    Err(Error::Unsupported("mass_in_region: no reduction available".into()))
}

fn mass_of_components(comps: &[RadialComponent], dim: usize, radius: Option<f64>) -> Result<QuadResult> {
    let surf = sphere_surface(dim).sqrt();
    let mut total = QuadResult::exact(0.0);
    for c in comps {
        if c.l != 0 {
            continue;
        }
        if c.coeff.im.abs() > 1e-12 * c.coeff.norm() {
            return Err(Error::MassViolation("mass of a complex-amplitude component".into()));
        }
        let m = radial_integral(&c.f, dim as f64 - 1.0, radius)?;
        total = total.combine(m.scale(c.coeff.re * surf));
    }
    Ok(total)
}

/// int_0^{cut} f(rho) rho^q drho with breakpoint splits and tail handling.
fn radial_integral(f: &RadialFn, q: f64, cut: Option<f64>) -> Result<QuadResult> {
    let (lo, hi) = f.support();
    let hi = match cut {
        Some(c) => hi.min(c),
        None => hi,
    };
    if hi <= lo {
        return Ok(QuadResult::exact(0.0));
    }
    let integrand = |rho: f64| f.eval(rho) * rho.powf(q);
    let mut pts: Vec<f64> = f.breakpoints().into_iter().filter(|&t| t > lo && t < hi).collect();
    pts.insert(0, lo);
    if hi.is_finite() {
        pts.push(hi);
        Ok(integrate_split(integrand, &pts, Tol::absolute(1e-12)))
    } else {
        let finite_end = pts.last().copied().unwrap_or(lo).max(lo + 1.0);
        pts.push(finite_end + 1.0);
        let head = integrate_split(&integrand, &pts, Tol::absolute(1e-12));
        let tail = integrate_to_inf(integrand, finite_end + 1.0, Tol::absolute(1e-12));
        Ok(head.combine(tail))
    }
}

/// Spherical-cap measure: the surface measure of {omega : omega . u >= c}.
fn cap_above(dim: usize, c: f64) -> f64 {
    match dim {
        1 => {
            if c <= -1.0 {
                2.0
            } else if c <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        2 => 2.0 * c.clamp(-1.0, 1.0).acos(),
        3 => 2.0 * PI * (1.0 - c.clamp(-1.0, 1.0)),
        _ => unreachable!("caps used only for N <= 3"),
    }
}

fn term_mass_in_region(t: &Term, region: &Region) -> Result<QuadResult> {
    let dim = t.dim();
    if dim > 3 {
        return Err(Error::Unsupported("region masses implemented for N <= 3".into()));
    }
    if t.coeff.im.abs() > 1e-12 * t.coeff.norm() {
        return Err(Error::MassViolation("mass of a complex-amplitude term".into()));
    }
    let y00 = 1.0 / sphere_surface(dim).sqrt();
    let amp = t.coeff.re * y00;
    match region {
        Region::Ball(ball) => {
            let d = t.center.dist(&ball.center);
            if d < 1e-13 {
                if t.harmonic.l != 0 {
                    return Ok(QuadResult::exact(0.0));
                }
                let m = radial_integral(&RadialFn::Base(t.profile.clone()), dim as f64 - 1.0, Some(ball.radius))?;
                return Ok(m.scale(t.coeff.re * sphere_surface(dim).sqrt()));
            }
            if t.harmonic.l != 0 {
                return Err(Error::Unsupported(
                    "off-center region mass of a non-radial term".into(),
                ));
            }
            let r = ball.radius;
            // angular measure of the sphere of radius rho around the term
            // center that falls inside the ball: {w : w . u <= c*} has
            // measure total - cap_above(c*)
            let ang = move |rho: f64| {
                if rho <= 0.0 {
                    return if d < r { sphere_surface(dim) } else { 0.0 };
                }
                let cstar = (r * r - d * d - rho * rho) / (2.0 * rho * d);
                sphere_surface(dim) - cap_above(dim, cstar)
            };
            let profile = t.profile.clone();
            let integrand = move |rho: f64| profile.eval(rho) * rho.powf(dim as f64 - 1.0) * ang(rho);
            let (slo, shi) = t.profile.support();
            let hi_cut = (d + r).min(shi);
            if hi_cut <= slo {
                return Ok(QuadResult::exact(0.0));
            }
            let mut pts = vec![slo];
            for b in t.profile.breakpoints() {
                if b > slo && b < hi_cut {
                    pts.push(b);
                }
            }
            let kink = (d - r).abs();
            if kink > slo && kink < hi_cut {
                pts.push(kink);
            }
            pts.push(hi_cut);
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            Ok(integrate_split(integrand, &pts, Tol::absolute(1e-12)).scale(amp))
        }
        Region::HalfSpace(hs) => {
            if t.harmonic.l != 0 {
                return Err(Error::Unsupported(
                    "half-space mass of a non-radial term".into(),
                ));
            }
            let gap = hs.offset - t.center.dot(&hs.normal);
            let profile = t.profile.clone();
            let ang = move |rho: f64| {
                if rho <= 0.0 {
                    return if gap < 0.0 { sphere_surface(dim) } else { 0.0 };
                }
                cap_above(dim, gap / rho)
            };
            let integrand = move |rho: f64| profile.eval(rho) * rho.powf(dim as f64 - 1.0) * ang(rho);
            let (slo, shi) = t.profile.support();
            let mut pts = vec![slo];
            for b in t.profile.breakpoints() {
                if b > slo && (shi.is_infinite() || b < shi) {
                    pts.push(b);
                }
            }
            let kink = gap.abs();
            if kink > slo && (shi.is_infinite() || kink < shi) {
                pts.push(kink);
            }
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            let q = if shi.is_finite() {
                pts.push(shi);
                pts.dedup();
                integrate_split(integrand, &pts, Tol::absolute(1e-12))
            } else {
                let last = *pts.last().unwrap() + 1.0;
                pts.push(last);
                let head = integrate_split(&integrand, &pts, Tol::absolute(1e-12));
                head.combine(integrate_to_inf(integrand, last, Tol::absolute(1e-12)))
            };
            Ok(q.scale(amp))
        }
    }
}

/// Whole-line integral of a scalar functional of a 1D expression.
fn line_integral(
    f: &FuncExpr,
    map: impl Fn(Complex64) -> f64,
    tol: Tol,
) -> Result<QuadResult> {
    let (lo, hi) = f.support_1d();
    let breaks = f.breakpoints_1d();
    let eval = |x: f64| map(f.evaluate(&Point(vec![x])).unwrap_or(Complex64::new(0.0, 0.0)));
    let lo_f = if lo.is_finite() { lo } else { breaks.first().copied().unwrap_or(-1.0) - 1.0 };
    let hi_f = if hi.is_finite() { hi } else { breaks.last().copied().unwrap_or(1.0) + 1.0 };
    let mut pts = vec![lo_f];
    pts.extend(breaks.iter().filter(|&&t| t > lo_f && t < hi_f));
    pts.push(hi_f);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut result = integrate_split(&eval, &pts, tol);
    if !hi.is_finite() {
        result = result.combine(integrate_to_inf(&eval, hi_f, tol));
    }
    if !lo.is_finite() {
        result = result.combine(integrate_to_inf(|u| eval(lo_f - u), 0.0, tol));
    }
    Ok(result)
}

/// L^p norm, p >= 1.
pub fn lp_norm(f: &FuncExpr, p: f64) -> Result<QuadResult> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    let dim = f.dim();
    let pth = |q: QuadResult| -> QuadResult {
        let v = q.value.max(0.0).powf(1.0 / p);
        let deriv = if q.value > 0.0 { v / (p * q.value) } else { 1.0 };
        QuadResult { value: v, abs_error: q.abs_error * deriv, converged: q.converged }
    };
    // radial route about a common center
    for center in f.candidate_centers() {
        if let Ok(comps) = radialize(f, &center) {
            let q = lp_power_of_components(&comps, dim, p)?;
            return Ok(pth(q));
        }
    }
    if dim == 1 {
        let q = line_integral(f, |v| v.norm().powf(p), Tol::absolute(1e-11))?;
        return Ok(pth(q));
    }
    Err(Error::Unsupported("lp_norm: no reduction available".into()))
}

fn lp_power_of_components(comps: &[RadialComponent], dim: usize, p: f64) -> Result<QuadResult> {
    if comps.is_empty() {
        return Ok(QuadResult::exact(0.0));
    }
    let max_l = comps.iter().map(|c| c.l).max().unwrap();
    let (spts, swts) = surface_quadrature(dim, (2 * max_l + 6).max(16))?;
    let yvals: Vec<Vec<f64>> = comps
        .iter()
        .map(|c| {
            spts.iter()
                .map(|pt| {
                    spherical_harmonic(
                        HarmonicIndex { dim, l: c.l, m: c.m },
                        pt,
                    )
                    .unwrap_or(0.0)
                })
                .collect()
        })
        .collect();
    let angular = |rho: f64| -> f64 {
        let mut acc = 0.0;
        for (i, w) in swts.iter().enumerate() {
            let mut v = Complex64::new(0.0, 0.0);
            for (c, ys) in comps.iter().zip(&yvals) {
                v += c.coeff * c.f.eval(rho) * ys[i];
            }
            acc += v.norm().powf(p) * w;
        }
        acc
    };
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut pts = Vec::new();
    for c in comps {
        let (a, b) = c.f.support();
        lo = lo.min(a);
        hi = hi.max(b);
        pts.extend(c.f.breakpoints());
    }
    let integrand = |rho: f64| angular(rho) * rho.powf(dim as f64 - 1.0);
    pts.retain(|&t| t > lo && (hi.is_infinite() || t < hi));
    pts.push(lo);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if hi.is_finite() {
        pts.push(hi);
        Ok(integrate_split(integrand, &pts, Tol::absolute(1e-11)))
    } else {
        let last = pts.last().copied().unwrap_or(lo) + 1.0;
        pts.push(last);
        let head = integrate_split(&integrand, &pts, Tol::absolute(1e-11));
        Ok(head.combine(integrate_to_inf(integrand, last, Tol::absolute(1e-11))))
    }
}

/// int f log f with the convention 0 log 0 = 0. Requires f >= 0; negative
/// samples beyond rounding are rejected.
pub fn entropy(f: &FuncExpr) -> Result<QuadResult> {
    let dim = f.dim();
    let xlogx = |v: f64| -> Result<f64> {
        if v < -1e-10 {
            return Err(Error::InvalidParameter(format!(
                "entropy of a sign-changing function (sample value {v})"
            )));
        }
        Ok(if v > 0.0 { v * v.ln() } else { 0.0 })
    };
    for center in f.candidate_centers() {
        if let Ok(comps) = radialize(f, &center) {
            if comps.iter().any(|c| c.l != 0) {
                continue;
            }
            let surf = sphere_surface(dim);
            let y00 = 1.0 / surf.sqrt();
            let value = move |rho: f64| -> f64 {
                let mut v = 0.0;
                for c in &comps {
                    v += c.coeff.re * c.f.eval(rho) * y00;
                }
                v
            };
            let bad = std::cell::Cell::new(false);
            let integrand = |rho: f64| match xlogx(value(rho)) {
                Ok(v) => v * rho.powf(dim as f64 - 1.0),
                Err(_) => {
                    bad.set(true);
                    0.0
                }
            };
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            let mut pts = Vec::new();
            for c in radialize(f, &center)? {
                let (a, b) = c.f.support();
                lo = lo.min(a);
                hi = hi.max(b);
                pts.extend(c.f.breakpoints());
            }
            pts.retain(|&t| t > lo && (hi.is_infinite() || t < hi));
            pts.push(lo);
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            let q = if hi.is_finite() {
                pts.push(hi);
                integrate_split(&integrand, &pts, Tol::absolute(1e-11))
            } else {
                let last = pts.last().copied().unwrap_or(lo) + 1.0;
                pts.push(last);
                let head = integrate_split(&integrand, &pts, Tol::absolute(1e-11));
                head.combine(integrate_to_inf(&integrand, last, Tol::absolute(1e-11)))
            };
            if bad.get() {
                return Err(Error::InvalidParameter(
                    "entropy of a sign-changing function".into(),
                ));
            }
            return Ok(q.scale(surf));
        }
    }
    if dim == 1 {
        let bad = std::cell::Cell::new(false);
        let q = line_integral(
            f,
            |v| {
                if v.re < -1e-10 {
                    bad.set(true);
                }
                if v.re > 0.0 {
                    v.re * v.re.ln()
                } else {
                    0.0
                }
            },
            Tol::absolute(1e-11),
        )?;
        if bad.get() {
            return Err(Error::InvalidParameter("entropy of a sign-changing function".into()));
        }
        return Ok(q);
    }
    Err(Error::Unsupported("entropy: no reduction available".into()))
}
