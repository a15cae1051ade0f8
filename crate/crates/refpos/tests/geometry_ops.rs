//! Mass-halving searches and splice constructions against the stated values.

use num_complex::Complex64;
use refpos::functional::{mass, FuncExpr, RadialProfile};
use refpos::geometry::{
    halve_ball, halve_halfspace, pullback_ball, splice, Ball, HalfSpace, KernelSpec, Point,
    Region,
};
use std::f64::consts::PI;

fn cauchy_density(center: f64, b: f64) -> FuncExpr {
    FuncExpr::radial_term(1, Point(vec![center]), RadialProfile::PowerLaw { b, p: 1.0 }, b / PI)
        .unwrap()
}

#[test]
fn halve_ball_reference_values() {
    // Cauchy about its center: int_{-1}^{1} = 1/2 exactly
    let f = cauchy_density(0.0, 1.0);
    let b = halve_ball(&f, &Point(vec![0.0])).unwrap();
    assert!((b.radius - 1.0).abs() < 1e-8, "radius {}", b.radius);

    // uniform density on [0, 1], centered at 0: r = 1/2
    let u = FuncExpr::radial_term(
        1,
        Point(vec![0.5]),
        RadialProfile::indicator(0.0, 0.5),
        1.0,
    )
    .unwrap();
    let b = halve_ball(&u, &Point(vec![0.0])).unwrap();
    assert!((b.radius - 0.5).abs() < 1e-9, "radius {}", b.radius);

    // N = 2 log-HLS optimizer: the radial mass function crosses 1/2 at rho = b
    for bb in [1.0, 2.5] {
        let amp = bb * bb / PI;
        let f2 = FuncExpr::radial_term(
            2,
            Point::zeros(2),
            RadialProfile::PowerLaw { b: bb, p: 2.0 },
            amp,
        )
        .unwrap();
        let ball = halve_ball(&f2, &Point::zeros(2)).unwrap();
        assert!((ball.radius - bb).abs() < 1e-8 * bb, "radius {} vs {bb}", ball.radius);
    }

    // zero mass fails
    let z = u.scaled(Complex64::new(0.0, 0.0));
    assert!(halve_ball(&z, &Point(vec![0.0])).is_err());
}

#[test]
fn halve_ball_off_center() {
    // off-center halving of the 2D optimizer; mass condition must hold
    let f2 = FuncExpr::radial_term(
        2,
        Point::zeros(2),
        RadialProfile::PowerLaw { b: 1.0, p: 2.0 },
        1.0 / PI,
    )
    .unwrap();
    let a = Point(vec![0.7, -0.2]);
    let ball = halve_ball(&f2, &a).unwrap();
    let inside = refpos::functional::mass_in_region(&f2, &Region::Ball(ball.clone())).unwrap();
    let total = mass(&f2).unwrap();
    assert!(
        (inside.value - 0.5 * total.value).abs() <= 1e-9 * total.value,
        "mass inside {} of {}",
        inside.value,
        total.value
    );
}

#[test]
fn halve_halfspace_reference_values() {
    // even density: t = 0
    let f = cauchy_density(0.0, 1.0);
    let h = halve_halfspace(&f, &Point(vec![1.0])).unwrap();
    assert!(h.offset.abs() < 1e-9, "offset {}", h.offset);

    // uniform on [0,1]: t = 1/2
    let u = FuncExpr::radial_term(
        1,
        Point(vec![0.5]),
        RadialProfile::indicator(0.0, 0.5),
        1.0,
    )
    .unwrap();
    let h = halve_halfspace(&u, &Point(vec![1.0])).unwrap();
    assert!((h.offset - 0.5).abs() < 1e-9, "offset {}", h.offset);

    // Cauchy centered at 3: t = 3 by symmetry
    let f3 = cauchy_density(3.0, 1.0);
    let h = halve_halfspace(&f3, &Point(vec![1.0])).unwrap();
    assert!((h.offset - 3.0).abs() < 1e-8, "offset {}", h.offset);

    // 2D: two bumps, normal e1; halving condition verified numerically
    let g = FuncExpr::radial_term(2, Point(vec![-1.0, 0.3]), RadialProfile::bump(0.0, 0.4, 1.0), 1.0)
        .unwrap()
        .plus(
            &FuncExpr::radial_term(
                2,
                Point(vec![1.2, -0.5]),
                RadialProfile::bump(0.0, 0.5, 0.8),
                1.0,
            )
            .unwrap(),
        );
    let e = Point(vec![1.0, 0.0]);
    let h = halve_halfspace(&g, &e).unwrap();
    let inside =
        refpos::functional::mass_in_region(&g, &Region::HalfSpace(h.clone())).unwrap();
    let total = mass(&g).unwrap();
    assert!(
        (inside.value - 0.5 * total.value).abs() <= 1e-9 * total.value,
        "mass inside {} of {}",
        inside.value,
        total.value
    );
}

#[test]
fn splice_of_symmetric_function_is_identity() {
    // f invariant under the reflection: f^i = f^o = f pointwise
    let spec = KernelSpec::new(1, 0.5).unwrap();
    let f = cauchy_density(0.0, 1.0);
    let hs = Region::HalfSpace(HalfSpace::new(Point(vec![1.0]), 0.0).unwrap());
    let (fi, fo) = splice(&f, &hs, &spec);
    for &x in &[-2.0, -0.5, 0.3, 1.7] {
        let p = Point(vec![x]);
        let v = f.evaluate(&p).unwrap();
        assert!((fi.evaluate(&p).unwrap() - v).norm() < 1e-13);
        assert!((fo.evaluate(&p).unwrap() - v).norm() < 1e-13);
    }
}

#[test]
fn splice_of_inside_supported_function() {
    // f supported inside the ball: f^i = f + pullback(f), f^o = 0
    let spec = KernelSpec::new(2, 0.7).unwrap();
    let ball = Ball::unit(2);
    let f = FuncExpr::radial_term(2, Point::zeros(2), RadialProfile::bump(0.4, 0.3, 1.0), 1.0)
        .unwrap();
    let region = Region::Ball(ball.clone());
    let (fi, fo) = splice(&f, &region, &spec);
    let theta_f = pullback_ball(&f, &ball, &spec);
    for &xy in &[[0.2, 0.3], [0.5, -0.1], [1.5, 0.2], [0.0, 2.5]] {
        let p = Point(xy.to_vec());
        let expect = f.evaluate(&p).unwrap() + theta_f.evaluate(&p).unwrap();
        assert!((fi.evaluate(&p).unwrap() - expect).norm() < 1e-13, "at {xy:?}");
        assert!(fo.evaluate(&p).unwrap().norm() < 1e-13, "at {xy:?}");
    }
}

#[test]
fn splice_mass_preservation_at_lambda_zero() {
    // with the ball halving the mass and lambda = 0 weights,
    // |f^i|_1 = |f^o|_1 = |f|_1
    let spec = KernelSpec::new(2, 0.0).unwrap();
    let f = FuncExpr::radial_term(
        2,
        Point::zeros(2),
        RadialProfile::PowerLaw { b: 1.0, p: 2.0 },
        1.0 / PI,
    )
    .unwrap();
    let ball = halve_ball(&f, &Point::zeros(2)).unwrap();
    let region = Region::Ball(ball);
    let (fi, fo) = splice(&f, &region, &spec);
    let m = mass(&f).unwrap();
    let mi = mass(&fi).unwrap();
    let mo = mass(&fo).unwrap();
    assert!((mi.value - m.value).abs() < 1e-8, "{} vs {}", mi.value, m.value);
    assert!((mo.value - m.value).abs() < 1e-8, "{} vs {}", mo.value, m.value);
}

#[test]
fn halfspace_pullback_examples() {
    // f = 1_[0,1], H = {x > 0}: reflected indicator lives on [-1, 0]
    let f = FuncExpr::radial_term(
        1,
        Point(vec![0.5]),
        RadialProfile::indicator(0.0, 0.5),
        1.0,
    )
    .unwrap();
    let hs = HalfSpace::new(Point(vec![1.0]), 0.0).unwrap();
    let rf = refpos::geometry::pullback_halfspace(&f, &hs);
    assert!((rf.evaluate(&Point(vec![-0.5])).unwrap().re - 1.0).abs() < 1e-14);
    assert!(rf.evaluate(&Point(vec![0.5])).unwrap().norm() < 1e-14);
    // f(x) = e^{-x} 1_{x>0} reflects to e^{x} 1_{x<0}
    let g = FuncExpr::Restrict {
        region: Region::HalfSpace(hs.clone()),
        inside: true,
        inner: Box::new(
            FuncExpr::radial_term(1, Point(vec![0.0]), RadialProfile::Exponential { c: 1.0 }, 1.0)
                .unwrap(),
        ),
    };
    let rg = refpos::geometry::pullback_halfspace(&g, &hs);
    let x = Point(vec![-1.3]);
    assert!((rg.evaluate(&x).unwrap().re - (-1.3f64).exp()).abs() < 1e-13);
    assert!(rg.evaluate(&Point(vec![1.3])).unwrap().norm() < 1e-16);
}
