//! Regions (balls, half-spaces), the point maps through their boundaries,
//! the lambda-weighted pullback operators on functions, mass-halving
//! searches, and the inner/outer splice constructions.

use crate::error::{Error, Result};
use crate::functional::{mass, mass_in_region, FuncExpr, SpliceSide};
use serde::{Deserialize, Serialize};

/// A point of R^N, N <= 3 in all pointwise-evaluated paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.sub(other).norm()
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Kernel selector: dimension N >= 1 and exponent lambda in [0, N).
/// lambda = 0 selects the log kernel and the J functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub dim: usize,
    pub lambda: f64,
}

impl KernelSpec {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(0.0..(dim as f64)).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0, N), got lambda={lambda}, N={dim}"
            )));
        }
        Ok(KernelSpec { dim, lambda })
    }

    pub fn is_log(&self) -> bool {
        self.lambda == 0.0
    }

    /// Exponent of the inversion Jacobian weight, 2N - lambda.
    pub fn weight_pow(&self) -> f64 {
        2.0 * self.dim as f64 - self.lambda
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be > 0, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn unit(dim: usize) -> Self {
        Ball { center: Point::zeros(dim), radius: 1.0 }
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dist(&self.center) < self.radius
    }
}

/// The open region { x : x . e > t } with unit interior normal e.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Point,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        if (normal.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "half-space normal must be a unit vector, |e| = {}",
                normal.norm()
            )));
        }
        Ok(HalfSpace { normal, offset })
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.dot(&self.normal) > self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Ball(Ball),
    HalfSpace(HalfSpace),
}

impl Region {
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Region::Ball(b) => b.contains(x),
            Region::HalfSpace(h) => h.contains(x),
        }
    }

    /// The point map through the region boundary.
    pub fn map_point(&self, x: &Point) -> Result<Point> {
        match self {
            Region::Ball(b) => invert_point(b, x),
            Region::HalfSpace(h) => Ok(reflect_point(h, x)),
        }
    }
}

/// Inversion of x != a through the boundary of the ball:
/// x -> r^2 (x - a)/|x - a|^2 + a. Boundary points are fixed.
pub fn invert_point(ball: &Ball, x: &Point) -> Result<Point> {
    let d = x.sub(&ball.center);
    let n2 = d.dot(&d);
    if n2 < 1e-28 * ball.radius * ball.radius {
        return Err(Error::SingularPoint("inversion undefined at the ball center".into()));
    }
    Ok(d.scale(ball.radius * ball.radius / n2).add(&ball.center))
}

/// Reflection of x across the hyperplane x . e = t: x -> x + 2 (t - x . e) e.
pub fn reflect_point(hs: &HalfSpace, x: &Point) -> Point {
    let gap = hs.offset - x.dot(&hs.normal);
    x.add(&hs.normal.scale(2.0 * gap))
}

/// The operator Theta_B lifted to functions: (r/|x-a|)^{2N-lambda} f(Theta_B x).
pub fn pullback_ball(f: &FuncExpr, ball: &Ball, spec: &KernelSpec) -> FuncExpr {
    FuncExpr::BallPullback {
        ball: ball.clone(),
        spec: *spec,
        inner: Box::new(f.clone()),
    }
}

/// The reflection operator on functions: f(Theta_H x), no Jacobian weight.
pub fn pullback_halfspace(f: &FuncExpr, hs: &HalfSpace) -> FuncExpr {
    FuncExpr::HalfSpacePullback { hs: hs.clone(), inner: Box::new(f.clone()) }
}

/// The pullback through either kind of region boundary.
pub fn pullback_region(f: &FuncExpr, region: &Region, spec: &KernelSpec) -> FuncExpr {
    match region {
        Region::Ball(b) => pullback_ball(f, b, spec),
        Region::HalfSpace(h) => pullback_halfspace(f, h),
    }
}

/// The splice pair (f^i, f^o): f^i agrees with f inside the region and with
/// the pulled-back image outside; f^o is the complementary splice.
pub fn splice(f: &FuncExpr, region: &Region, spec: &KernelSpec) -> (FuncExpr, FuncExpr) {
    let inner = FuncExpr::Splice {
        region: region.clone(),
        spec: *spec,
        side: SpliceSide::Inner,
        inner: Box::new(f.clone()),
    };
    let outer = FuncExpr::Splice {
        region: region.clone(),
        spec: *spec,
        side: SpliceSide::Outer,
        inner: Box::new(f.clone()),
    };
    (inner, outer)
}

/// Search tolerance of the mass-halving bisections, relative to total mass.
const HALVING_REL_TOL: f64 = 5e-12;
const HALVING_MAX_ITER: usize = 200;

/// Find the ball centered at `a` holding exactly half the mass of `f`.
pub fn halve_ball(f: &FuncExpr, a: &Point) -> Result<Ball> {
    let total = mass(f)?;
    if !(total.value > 0.0) || !total.value.is_finite() {
        return Err(Error::ZeroMass(format!("total mass {} cannot be halved", total.value)));
    }
    let half = 0.5 * total.value;
    let m = |r: f64| -> Result<f64> {
        let ball = Ball::new(a.clone(), r)?;
        Ok(mass_in_region(f, &Region::Ball(ball))?.value)
    };
    // bracket the halving radius
    let mut lo = 1e-8;
    let mut hi = 1.0;
    let mut grow = 0;
    while m(hi)? < half {
        hi *= 2.0;
        grow += 1;
        if grow > 80 {
            return Err(Error::MassViolation("halving radius bracket did not close".into()));
        }
    }
    while m(lo)? > half {
        lo *= 0.5;
        grow += 1;
        if grow > 160 {
            return Err(Error::MassViolation("halving radius bracket did not close".into()));
        }
    }
    for _ in 0..HALVING_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let v = m(mid)?;
        if (v - half).abs() <= HALVING_REL_TOL * total.value {
            return Ball::new(a.clone(), mid);
        }
        if v < half {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ball::new(a.clone(), 0.5 * (lo + hi))
}

/// Find the half-space with interior normal `e` holding half the mass of `f`.
pub fn halve_halfspace(f: &FuncExpr, e: &Point) -> Result<HalfSpace> {
    let total = mass(f)?;
    if !(total.value > 0.0) || !total.value.is_finite() {
        return Err(Error::ZeroMass(format!("total mass {} cannot be halved", total.value)));
    }
    let half = 0.5 * total.value;
    let m = |t: f64| -> Result<f64> {
        let hs = HalfSpace::new(e.clone(), t)?;
        Ok(mass_in_region(f, &Region::HalfSpace(hs))?.value)
    };
    // mass is decreasing in t; bracket
    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut grow = 0;
    while m(lo)? < half {
        lo *= 2.0;
        grow += 1;
        if grow > 80 {
            return Err(Error::MassViolation("halving offset bracket did not close".into()));
        }
    }
    while m(hi)? > half {
        hi *= 2.0;
        grow += 1;
        if grow > 160 {
            return Err(Error::MassViolation("halving offset bracket did not close".into()));
        }
    }
    for _ in 0..HALVING_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let v = m(mid)?;
        if (v - half).abs() <= HALVING_REL_TOL * total.value {
            return HalfSpace::new(e.clone(), mid);
        }
        if v > half {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    HalfSpace::new(e.clone(), 0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_point_values() {
        let b = Ball::unit(2);
        let x = Point(vec![2.0, 0.0]);
        let y = invert_point(&b, &x).unwrap();
        assert!((y.0[0] - 0.5).abs() < 1e-15 && y.0[1].abs() < 1e-15);
        // boundary fixed
        let x = Point(vec![0.6, 0.8]);
        let y = invert_point(&b, &x).unwrap();
        assert!(y.dist(&x) < 1e-15);
        // off-center ball: center (1,0), r=2, x=(5,0) -> 4*(4,0)/16 + (1,0) = (2,0)
        let b = Ball::new(Point(vec![1.0, 0.0]), 2.0).unwrap();
        let y = invert_point(&b, &Point(vec![5.0, 0.0])).unwrap();
        assert!((y.0[0] - 2.0).abs() < 1e-14 && y.0[1].abs() < 1e-15);
        assert!(invert_point(&b, &b.center).is_err());
    }

    #[test]
    fn inversion_is_involutive() {
        let b = Ball::new(Point(vec![0.3, -0.7, 0.1]), 1.7).unwrap();
        for x in [
            Point(vec![1.0, 2.0, -0.5]),
            Point(vec![0.31, -0.69, 0.11]),
            Point(vec![-4.0, 0.0, 8.0]),
        ] {
            let y = invert_point(&b, &invert_point(&b, &x).unwrap()).unwrap();
            assert!(y.dist(&x) < 1e-12 * x.norm().max(1.0));
        }
    }

    #[test]
    fn reflection_point_values() {
        // x_N > 0 half-space, mirror
        let h = HalfSpace::new(Point(vec![0.0, 1.0]), 0.0).unwrap();
        let y = reflect_point(&h, &Point(vec![1.5, 3.0]));
        assert_eq!(y.0, vec![1.5, -3.0]);
        // fixed plane
        let y = reflect_point(&h, &Point(vec![2.0, 0.0]));
        assert_eq!(y.0, vec![2.0, 0.0]);
        // e=(0,1), t=1, x=(0,4) -> (0,-2)
        let h = HalfSpace::new(Point(vec![0.0, 1.0]), 1.0).unwrap();
        let y = reflect_point(&h, &Point(vec![0.0, 4.0]));
        assert!((y.0[1] + 2.0).abs() < 1e-15);
        // involution
        let h = HalfSpace::new(Point(vec![0.6, 0.8]), -0.4).unwrap();
        let x = Point(vec![0.2, 5.0]);
        let y = reflect_point(&h, &reflect_point(&h, &x));
        assert!(y.dist(&x) < 1e-14);
    }

    #[test]
    fn halfspace_requires_unit_normal() {
        assert!(HalfSpace::new(Point(vec![1.0, 1.0]), 0.0).is_err());
        assert!(KernelSpec::new(2, 2.0).is_err());
        assert!(KernelSpec::new(2, -0.1).is_err());
    }
}
