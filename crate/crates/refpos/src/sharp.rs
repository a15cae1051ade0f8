//! Sharp constants of the (logarithmic) HLS inequality, the extremal family,
//! variational residuals, the endpoint-derivative link between the two
//! constants, and the inversion-invariance residual characterizing the
//! extremal densities.

use crate::error::{Error, Result};
use crate::functional::{
    self, loghls_functional, lp_norm, mass, riesz_energy, FuncExpr, RadialProfile,
};
use crate::geometry::{halve_ball, invert_point, Ball, KernelSpec, Point};
use crate::quad::{integrate_split, integrate_to_inf, QuadResult, Tol};
use crate::specfun::{digamma, log_gamma};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Parameters of the extremal family c (b^2 + |x-a|^2)^{-(2N-lambda)/2}.
#[derive(Debug, Clone)]
pub struct OptimizerParams {
    pub spec: KernelSpec,
    pub center: Point,
    pub scale: f64,
    pub amplitude: Complex64,
}

impl OptimizerParams {
    pub fn new(spec: KernelSpec, center: Point, scale: f64, amplitude: Complex64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter("optimizer scale must be positive".into()));
        }
        if center.dim() != spec.dim {
            return Err(Error::InvalidParameter("center dimension mismatch".into()));
        }
        Ok(OptimizerParams { spec, center, scale, amplitude })
    }
}

/// The sharp diagonal HLS constant
/// pi^{lambda/2} Gamma((N-lambda)/2)/Gamma(N-lambda/2)
/// (Gamma(N)/Gamma(N/2))^{1-lambda/N}.
pub fn hls_sharp_constant(dim: usize, lambda: f64) -> Result<f64> {
    let n = dim as f64;
    if !(0.0..n).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [0, N), got {lambda} at N={dim}"
        )));
    }
    let ln = 0.5 * lambda * PI.ln() + log_gamma((n - lambda) / 2.0)?
        - log_gamma(n - lambda / 2.0)?
        + (1.0 - lambda / n) * (log_gamma(n)? - log_gamma(n / 2.0)?);
    Ok(ln.exp())
}

/// The sharp log-HLS constant
/// (1/2) log pi + (1/2)(psi(N) - psi(N/2)) - (1/N) log(Gamma(N)/Gamma(N/2)).
pub fn loghls_sharp_constant(dim: usize) -> Result<f64> {
    let n = dim as f64;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    Ok(0.5 * PI.ln() + 0.5 * (digamma(n)? - digamma(n / 2.0)?)
        - (log_gamma(n)? - log_gamma(n / 2.0)?) / n)
}

/// Amplitude of the unit-mass extremal density at lambda = 0:
/// 2^{N-1} Gamma((N+1)/2) / pi^{(N+1)/2} * b^N.
fn log_optimizer_amplitude(dim: usize, b: f64) -> Result<f64> {
    let n = dim as f64;
    let ln = (n - 1.0) * 2.0f64.ln() + log_gamma((n + 1.0) / 2.0)? - 0.5 * (n + 1.0) * PI.ln();
    Ok(ln.exp() * b.powf(n))
}

/// The extremal function as an expression: a power-law profile
/// (b^2 + |x-a|^2)^{-(2N-lambda)/2}. For lambda = 0 the amplitude is forced
/// to the unit-mass normalization; the given amplitude is ignored there.
pub fn optimizer(params: &OptimizerParams) -> Result<FuncExpr> {
    let spec = params.spec;
    let p = (2.0 * spec.dim as f64 - spec.lambda) / 2.0;
    let profile = RadialProfile::PowerLaw { b: params.scale, p };
    if spec.is_log() {
        let amp = log_optimizer_amplitude(spec.dim, params.scale)?;
        FuncExpr::radial_term(spec.dim, params.center.clone(), profile, amp)
    } else {
        let base = FuncExpr::radial_term(spec.dim, params.center.clone(), profile, 1.0)?;
        Ok(if (params.amplitude - Complex64::new(1.0, 0.0)).norm() > 0.0 {
            base.scaled(params.amplitude)
        } else {
            base
        })
    }
}

/// The HLS quotient I_lambda[f, f] / |f|_p^2 at the diagonal exponent
/// p = 2N/(2N - lambda).
pub fn hls_ratio(f: &FuncExpr, spec: &KernelSpec) -> Result<QuadResult> {
    if !(spec.lambda > 0.0) {
        return Err(Error::InvalidParameter("hls_ratio needs lambda > 0".into()));
    }
    let p = 2.0 * spec.dim as f64 / (2.0 * spec.dim as f64 - spec.lambda);
    let norm = lp_norm(f, p)?;
    if !(norm.value > 0.0) {
        return Err(Error::ZeroMass("hls_ratio of the zero function".into()));
    }
    let energy = riesz_energy(f, f, spec, 1e-8)?;
    let denom = norm.value * norm.value;
    let value = energy.value.re / denom;
    let abs_error = energy.abs_error / denom
        + 2.0 * energy.value.re.abs() * norm.abs_error / (denom * norm.value);
    Ok(QuadResult { value, abs_error, converged: energy.converged && norm.converged })
}

/// Deficit H_N - J[f, g] of the logarithmic inequality for unit-mass data.
pub fn loghls_deficit(f: &FuncExpr, g: &FuncExpr) -> Result<QuadResult> {
    let h = loghls_sharp_constant(f.dim())?;
    let j = loghls_functional(f, g, 1e-8)?;
    Ok(QuadResult { value: h - j.value, abs_error: j.abs_error, converged: j.converged })
}

/// Finite difference (H_{N,h} - 1)/h against the log-HLS constant, probing
/// the endpoint-derivative identity between the two sharp constants.
pub fn derivative_limit_check(dim: usize, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidParameter("step must lie in (0, 1e-3]".into()));
    }
    let fd = (hls_sharp_constant(dim, h)? - 1.0) / h;
    Ok((fd, loghls_sharp_constant(dim)?))
}

/// Halton low-discrepancy points in the ball of given radius around the
/// center (deterministic).
pub fn sample_points_in_ball(dim: usize, center: &Point, radius: f64, count: usize) -> Vec<Point> {
    fn halton(mut i: usize, base: usize) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    let bases = [2usize, 3, 5];
    let mut out = Vec::with_capacity(count);
    let mut i = 1;
    while out.len() < count {
        let coords: Vec<f64> =
            (0..dim).map(|d| 2.0 * halton(i, bases[d]) - 1.0).collect();
        i += 1;
        let norm2: f64 = coords.iter().map(|c| c * c).sum();
        if norm2 > 1.0 || norm2 < 1e-6 {
            continue;
        }
        out.push(Point(
            coords.iter().zip(&center.0).map(|(c, a)| a + radius * c).collect(),
        ));
    }
    out
}

/// The log-kernel potential int f(y) log(1/|x-y|) dy of a radial function
/// in the plane, through the circular mean-value identity.
fn log_potential_radial_2d(
    radial_value: &dyn Fn(f64) -> f64,
    support_hi: f64,
    breaks: &[f64],
    rho: f64,
) -> f64 {
    // U(rho) = -2 pi [ log(rho) int_0^rho F s ds + int_rho^inf F(s) s log s ds ]
    let f_in = |s: f64| radial_value(s) * s;
    let f_out = |s: f64| radial_value(s) * s * s.ln();
    let mut pts_in = vec![0.0];
    for &b in breaks {
        if b > 0.0 && b < rho {
            pts_in.push(b);
        }
    }
    pts_in.push(rho);
    pts_in.dedup();
    let inner = integrate_split(f_in, &pts_in, Tol::absolute(1e-12));
    let outer = if support_hi.is_finite() {
        let mut pts = vec![rho];
        for &b in breaks {
            if b > rho && b < support_hi {
                pts.push(b);
            }
        }
        pts.push(support_hi.max(rho));
        pts.dedup();
        integrate_split(f_out, &pts, Tol::absolute(1e-12))
    } else {
        integrate_to_inf(f_out, rho, Tol::absolute(1e-12))
    };
    -2.0 * PI * (rho.ln() * inner.value + outer.value)
}

/// Euler-Lagrange residual of the planar log-HLS functional at unit mass:
/// the variation int f(y) log(1/|x-y|) dy - (1/4) log f(x) must be constant
/// at an extremal; the residual is the maximum deviation from its value at
/// the first sample. Restricted to radial f about a common center.
pub fn euler_lagrange_residual(f: &FuncExpr, samples: &[Point]) -> Result<f64> {
    if f.dim() != 2 {
        return Err(Error::InvalidParameter("Euler-Lagrange residual is planar".into()));
    }
    let m = mass(f)?;
    if (m.value - 1.0).abs() > 1e-6 {
        return Err(Error::MassViolation(format!("unit mass required, got {}", m.value)));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    // extract the radial profile about the common center
    let centers = f.candidate_centers();
    let center = centers
        .first()
        .ok_or_else(|| Error::Unsupported("no center candidates".into()))?
        .clone();
    let comps = functional::radialize(f, &center)?;
    if comps.iter().any(|c| c.l != 0) {
        return Err(Error::Unsupported("radial data required".into()));
    }
    let y00 = 1.0 / functional::sphere_surface(2).sqrt();
    let radial_value = move |s: f64| -> f64 {
        comps.iter().map(|c| c.coeff.re * c.f.eval(s) * y00).sum()
    };
    let mut support_hi: f64 = 0.0;
    let mut breaks = Vec::new();
    for c in functional::radialize(f, &center)? {
        let (_, hi) = c.f.support();
        support_hi = support_hi.max(hi);
        breaks.extend(c.f.breakpoints());
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let lagrange = |x: &Point| -> Result<f64> {
        let rho = x.dist(&center);
        let fx = radial_value(rho);
        if !(fx > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sample at distance {rho} where f is not positive"
            )));
        }
        let u = log_potential_radial_2d(&radial_value, support_hi, &breaks, rho.max(1e-12));
        Ok(u - 0.25 * fx.ln())
    };
    let base = lagrange(&samples[0])?;
    let mut worst: f64 = 0.0;
    for x in &samples[1..] {
        worst = worst.max((lagrange(x)? - base).abs());
    }
    Ok(worst)
}

/// Finite-difference residual of the Liouville equation -Delta u = e^u for
/// u = log(8 / (1 + |x|^2)^2) + perturb * |x|^2 on the grid |x| <= extent,
/// centered differences at step h. The unperturbed residual converges at
/// second order in h.
pub fn liouville_residual(h: f64, extent: f64, grid: usize, perturb: f64) -> f64 {
    let u = |x: f64, y: f64| -> f64 {
        let r2 = x * x + y * y;
        (8.0 / ((1.0 + r2) * (1.0 + r2))).ln() + perturb * r2
    };
    let mut worst: f64 = 0.0;
    for i in 0..=grid {
        for j in 0..=grid {
            let x = -extent + 2.0 * extent * i as f64 / grid as f64;
            let y = -extent + 2.0 * extent * j as f64 / grid as f64;
            let lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h)
                - 4.0 * u(x, y))
                / (h * h);
            let residual = (-lap - u(x, y).exp()).abs();
            worst = worst.max(residual);
        }
    }
    worst
}

/// Pointwise inversion-invariance residual: with r_a the mass-halving radius
/// about `a`, the extremal densities satisfy
/// v(x) = (r_a/|x-a|)^{2N} v(r_a^2 (x-a)/|x-a|^2 + a) everywhere. Returns the
/// maximum relative deviation over the samples.
pub fn lizhu_residual(v: &FuncExpr, a: &Point, samples: &[Point]) -> Result<f64> {
    let ball = halve_ball(v, a)?;
    lizhu_residual_with_radius(v, &ball, samples)
}

pub fn lizhu_residual_with_radius(
    v: &FuncExpr,
    ball: &Ball,
    samples: &[Point],
) -> Result<f64> {
    let a = &ball.center;
    let dim = v.dim();
    let mut worst: f64 = 0.0;
    for x in samples {
        let rho = x.dist(a);
        if rho < 1e-12 {
            return Err(Error::SingularPoint("sample at the inversion center".into()));
        }
        let vx = v.evaluate(x)?.re;
        let y = invert_point(ball, x)?;
        let w = (ball.radius / rho).powf(2.0 * dim as f64);
        let vy = v.evaluate(&y)?.re;
        let denom = vx.abs().max(1e-300);
        worst = worst.max((vx - w * vy).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hls_constant_reference_values() {
        // lambda = 0 collapses to 1
        for dim in 1..=4 {
            assert!((hls_sharp_constant(dim, 0.0).unwrap() - 1.0).abs() < 1e-13);
        }
        // N = 1, lambda = 1/2: Gamma(1/4)/Gamma(3/4)
        let expect = (log_gamma(0.25).unwrap() - log_gamma(0.75).unwrap()).exp();
        let got = hls_sharp_constant(1, 0.5).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 2.958_675).abs() < 1e-5, "{got}");
        // N = 3, lambda = 1: (4/3)(4/sqrt(pi))^{2/3}
        let expect = 4.0 / 3.0 * (4.0 / PI.sqrt()).powf(2.0 / 3.0);
        let got = hls_sharp_constant(3, 1.0).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        assert!(hls_sharp_constant(2, 2.0).is_err());
    }

    #[test]
    fn loghls_constant_reference_values() {
        assert!((loghls_sharp_constant(1).unwrap() - (2.0 * PI).ln()).abs() < 1e-12);
        assert!((loghls_sharp_constant(2).unwrap() - 0.5 * (1.0 + PI.ln())).abs() < 1e-12);
    }

    #[test]
    fn derivative_link() {
        for dim in 1..=4 {
            let (fd, target) = derivative_limit_check(dim, 1e-5).unwrap();
            assert!(
                (fd - target).abs() < 10.0 * 1e-5,
                "N={dim}: finite difference {fd} vs {target}"
            );
        }
        assert!(derivative_limit_check(2, 0.1).is_err());
    }

    #[test]
    fn optimizers_have_unit_mass_at_log() {
        for dim in 1..=2 {
            for b in [1.0, 2.0, 5.0] {
                let spec = KernelSpec::new(dim, 0.0).unwrap();
                let params = OptimizerParams::new(
                    spec,
                    Point::zeros(dim),
                    b,
                    Complex64::new(1.0, 0.0),
                )
                .unwrap();
                let f = optimizer(&params).unwrap();
                let m = mass(&f).unwrap();
                assert!((m.value - 1.0).abs() < 1e-9, "N={dim} b={b}: mass {}", m.value);
            }
        }
        // N = 1 value at the origin is 1/pi for b = 1
        let spec = KernelSpec::new(1, 0.0).unwrap();
        let f = optimizer(
            &OptimizerParams::new(spec, Point::zeros(1), 1.0, Complex64::new(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let v = f.evaluate(&Point(vec![0.0])).unwrap().re;
        assert!((v - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn liouville_residual_orders() {
        let r1 = liouville_residual(1e-3, 2.0, 40, 0.0);
        assert!(r1 < 1e-4, "residual {r1}");
        // halving the step quarters the residual
        let r2 = liouville_residual(5e-4, 2.0, 40, 0.0);
        assert!(r2 < 0.35 * r1, "r1 = {r1}, r2 = {r2}");
        // an explicit perturbation leaves a visible residual:
        // -Delta(0.01 |x|^2) = -0.04 plus the e^u change
        let rp = liouville_residual(1e-3, 2.0, 40, 0.01);
        assert!(rp > 0.03, "perturbed residual {rp}");
    }

    #[test]
    fn sample_points_stay_in_ball() {
        let c = Point(vec![1.0, -2.0]);
        let pts = sample_points_in_ball(2, &c, 3.0, 50);
        assert_eq!(pts.len(), 50);
        for p in &pts {
            assert!(p.dist(&c) <= 3.0 + 1e-12);
            assert!(p.dist(&c) > 1e-4);
        }
        // deterministic
        let pts2 = sample_points_in_ball(2, &c, 3.0, 50);
        assert_eq!(pts[0].0, pts2[0].0);
    }
}
