//! Riesz and logarithmic pair energies.
//!
//! Three evaluation routes, in priority order:
//! 1. common-center radial reduction via Funk-Hecke (any N, all wrappers
//!    that radialize),
//! 2. direct 2D quadrature for N = 1 (any expression, via pointwise
//!    evaluation and a correlation transform),
//! 3. pairwise two-center multipole series for plain radial terms with
//!    separated compact supports (N >= 2).
//!
//! The two-center series and the common-center reduction are cross-checked
//! against the direct route in tests.

use super::radial::{radialize, RadialComponent, RadialFn};
use super::{sphere_surface, FuncExpr, Term};
use crate::error::{Error, Result};
use crate::geometry::KernelSpec;
use crate::quad::{
    integrate_complex_left_singular, integrate_complex_split, integrate_left_singular,
    integrate_split, integrate_to_inf, QuadResult, QuadResultC, Tol,
};
use crate::specfun::{coupling_closed, gegenbauer, kappa, GegenbauerIndex};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Kernel of the pair energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairKernel {
    /// |x - y|^{-lambda}, 0 < lambda < N
    Riesz { lambda: f64 },
    /// log(1/|x - y|)
    Log,
}

impl PairKernel {
    fn eval(&self, dist: f64) -> f64 {
        match self {
            PairKernel::Riesz { lambda } => dist.powf(-lambda),
            PairKernel::Log => -dist.ln(),
        }
    }

}

/// I_lambda[f, g] = intint conj(f(x)) g(y) |x-y|^{-lambda} dx dy.
pub fn riesz_energy(f: &FuncExpr, g: &FuncExpr, spec: &KernelSpec, tol: f64) -> Result<QuadResultC> {
    if !(spec.lambda > 0.0) {
        return Err(Error::InvalidParameter(
            "riesz_energy requires lambda > 0; use log_energy for lambda = 0".into(),
        ));
    }
    pair_energy(f, g, spec.dim, PairKernel::Riesz { lambda: spec.lambda }, tol)
}

/// I_0[f, g] = intint conj(f(x)) log(1/|x-y|) g(y) dx dy.
pub fn log_energy(f: &FuncExpr, g: &FuncExpr, tol: f64) -> Result<QuadResultC> {
    let dim = f.dim();
    pair_energy(f, g, dim, PairKernel::Log, tol)
}

/// The dispatcher over evaluation routes.
pub fn pair_energy(
    f: &FuncExpr,
    g: &FuncExpr,
    dim: usize,
    kernel: PairKernel,
    tol: f64,
) -> Result<QuadResultC> {
    // route 1: common center
    let mut centers = f.candidate_centers();
    centers.extend(g.candidate_centers());
    centers.dedup_by(|a, b| a.dist(b) < 1e-12);
    for c in &centers {
        if let (Ok(cf), Ok(cg)) = (radialize(f, c), radialize(g, c)) {
            return common_center_energy(&cf, &cg, dim, kernel, tol);
        }
    }
    // route 2: direct in 1D
    if dim == 1 {
        return direct_energy_1d(f, g, kernel, tol);
    }
    // route 3: multi-center radial terms
    if let (Some(tf), Some(tg)) = (flatten_terms(f), flatten_terms(g)) {
        return multi_center_energy(&tf, &tg, dim, kernel, tol);
    }
    Err(Error::Unsupported(
        "energy: no common center, N > 1, and no plain multi-center radial structure".into(),
    ))
}

/// Flatten Sum/Scaled/Terms into a plain term list; None for any wrapper.
pub fn flatten_terms(expr: &FuncExpr) -> Option<Vec<Term>> {
    fn go(e: &FuncExpr, scale: Complex64, out: &mut Vec<Term>) -> bool {
        match e {
            FuncExpr::Terms(ts) => {
                for t in ts {
                    let mut t = t.clone();
                    t.coeff *= scale;
                    out.push(t);
                }
                true
            }
            FuncExpr::Sum(ps) => ps.iter().all(|p| go(p, scale, out)),
            FuncExpr::Scaled(c, inner) => go(inner, scale * c, out),
            _ => false,
        }
    }
    let mut out = Vec::new();
    go(expr, Complex64::new(1.0, 0.0), &mut out).then_some(out)
}

// ---------------------------------------------------------------------------
// route 1: common center
// ---------------------------------------------------------------------------

fn common_center_energy(
    cf: &[RadialComponent],
    cg: &[RadialComponent],
    dim: usize,
    kernel: PairKernel,
    tol: f64,
) -> Result<QuadResultC> {
    let mut total = QuadResultC::exact(Complex64::new(0.0, 0.0));
    for a in cf {
        for b in cg {
            if a.l != b.l || a.m != b.m {
                continue;
            }
            let amp = a.coeff.conj() * b.coeff;
            if amp.norm() == 0.0 {
                continue;
            }
            let i = radial_pair_integral(&a.f, &b.f, a.l, dim, kernel, tol)?;
            total = total.combine(QuadResultC {
                value: amp * i.value,
                abs_error: amp.norm() * i.abs_error,
                converged: i.converged,
            });
        }
    }
    Ok(total)
}

/// intint phiF(r) phiG(s) A_l(r, s) r^{N-1} s^{N-1} dr ds
fn radial_pair_integral(
    phi_f: &RadialFn,
    phi_g: &RadialFn,
    l: usize,
    dim: usize,
    kernel: PairKernel,
    tol: f64,
) -> Result<QuadResult> {
    let inner_tol = Tol { abs: tol * 0.05, rel: 3e-9, max_segments: 2600 };
    let outer_tol = Tol { abs: tol * 0.45, rel: 1e-9, max_segments: 2600 };

    let (glo, ghi) = phi_g.support();
    if ghi <= glo {
        return Ok(QuadResult::exact(0.0));
    }
    let mut inner_err_budget: f64 = 0.0;
    let mut inner_ok = true;
    let mut inner = |s: f64| -> f64 {
        let w = phi_g.eval(s) * s.powf(dim as f64 - 1.0);
        // w can be 0 * inf = NaN at the extreme nodes of the semi-infinite
        // transform, where the profile has long underflowed
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        // inner tolerance scaled so the integrated inner error stays
        // bounded over an infinite outer range: the (1 + s^2) envelope
        // makes int T(s) |w(s)| ds <= pi * inner_tol.abs
        let scaled = Tol {
            abs: (inner_tol.abs / (w.abs() * (1.0 + s * s))).min(1e6),
            ..inner_tol
        };
        let q = radial_inner_integral(phi_f, l, dim, kernel, s, scaled);
        inner_err_budget = inner_err_budget
            .max(q.abs_error * w.abs() * (1.0 + s * s))
            .max(1e-9 * q.value.abs() * w.abs() * (1.0 + s * s));
        inner_ok &= q.converged;
        q.value * w
    };
    let mut pts: Vec<f64> = phi_g.breakpoints().into_iter().filter(|&t| t > glo && t < ghi).collect();
    pts.push(glo);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let (head, tail) = if ghi.is_finite() {
        pts.push(ghi);
        pts.dedup();
        (integrate_split(&mut inner, &pts, outer_tol), QuadResult::exact(0.0))
    } else {
        let last = pts.last().copied().unwrap_or(glo) + 1.0;
        pts.push(last);
        let head = integrate_split(&mut inner, &pts, outer_tol);
        let tail = integrate_to_inf(&mut inner, last, outer_tol);
        (head, tail)
    };
    // integrated inner-error bound: int budget/(1+s^2) ds <= pi * budget
    let mut q = head.combine(tail);
    q.abs_error += std::f64::consts::PI * inner_err_budget;
    q.converged &= inner_ok;
    Ok(q)
}

/// int phiF(r) A_l(r, s) r^{N-1} dr with the diagonal split at r = s.
/// Near the diagonal the squared distance is carried explicitly (d2 = u^2
/// for the offset u), so the kernel never sees a rounded-to-zero r - s.
#[doc(hidden)]
pub fn radial_inner_integral(
    phi: &RadialFn,
    l: usize,
    dim: usize,
    kernel: PairKernel,
    s: f64,
    tol: Tol,
) -> QuadResult {
    let (lo, hi) = phi.support();
    if hi <= lo {
        return QuadResult::exact(0.0);
    }
    let fd = |r: f64, d2: f64| {
        phi.eval(r) * angular_kernel_d2(dim, kernel, l, r, s, d2) * r.powf(dim as f64 - 1.0)
    };
    let f = |r: f64| {
        let d = r - s;
        fd(r, d * d)
    };
    let mut pts: Vec<f64> = phi.breakpoints().into_iter().filter(|&t| t > lo && t < hi).collect();
    pts.push(lo);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let hi_f = if hi.is_finite() {
        hi
    } else {
        (pts.last().copied().unwrap_or(lo) + 1.0).max(2.0 * s + 1.0)
    };
    if !pts.contains(&hi_f) {
        pts.push(hi_f);
    }

    // the singular substitution is confined to a neighborhood of the
    // diagonal; far parts keep their breakpoint structure visible to the
    // plain adaptive pass
    let delta = (0.1 * s.abs()).max(0.5);
    let mut total = QuadResult::exact(0.0);
    let mut sing_left = |lo: f64, tol: Tol| -> QuadResult {
        if s - lo <= 0.0 {
            return QuadResult::exact(0.0);
        }
        let cut = (s - delta).max(lo);
        let near = integrate_left_singular(|u| fd(s - u, u * u), s - cut, tol);
        let far = if cut > lo {
            integrate_split(f, &[lo, cut], tol)
        } else {
            QuadResult::exact(0.0)
        };
        near.combine(far)
    };
    let mut sing_right = |hi: f64, tol: Tol| -> QuadResult {
        if hi - s <= 0.0 {
            return QuadResult::exact(0.0);
        }
        let cut = (s + delta).min(hi);
        let near = integrate_left_singular(|u| fd(s + u, u * u), cut - s, tol);
        let far = if cut < hi {
            integrate_split(f, &[cut, hi], tol)
        } else {
            QuadResult::exact(0.0)
        };
        near.combine(far)
    };
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if s > a && s < b {
            total = total.combine(sing_left(a, tol)).combine(sing_right(b, tol));
        } else if (s - a).abs() < 1e-13 {
            total = total.combine(sing_right(b, tol));
        } else if (s - b).abs() < 1e-13 {
            total = total.combine(sing_left(a, tol));
        } else {
            total = total.combine(integrate_split(f, &[a, b], tol));
        }
    }
    if !hi.is_finite() {
        total = total.combine(integrate_to_inf(f, hi_f, tol));
    }
    total
}

/// One-variable reduction of the angular kernel: by scale invariance,
/// the tau-integral of (q - u tau)^{-lambda/2}-type kernels against the
/// Gegenbauer weight depends on u = 2 r s / (r^2 + s^2) alone (after
/// factoring (r^2+s^2)^{-lambda/2}; the log kernel splits additively).
/// G_l is tabulated on a grid geometric in (1 - u) and interpolated
/// quadratically in the log coordinate; the table is filled once per
/// (dim, l, kernel) per thread.
mod gtable {
    use super::PairKernel;
    use crate::quad::{integrate_split, Tol};
    use crate::specfun::{gegenbauer, GegenbauerIndex};
    use std::cell::RefCell;
    use std::collections::HashMap;

    /// Chebyshev panels on [1 - 2^{-k}, 1 - 2^{-k-1}], k = 0..NPANEL-1,
    /// preceded by the base panel [0, 1/2]; the factor-2 geometry keeps the
    /// singularity at u = 1 a fixed conformal distance from every panel.
    /// Below 1 - u = 2^{-NPANEL} the tabulated values hand over to the exact
    /// endpoint asymptotics (see `deep`).
    const NPANEL: usize = 40;
    const NNODE: usize = 25;

    fn panel_bounds(k: usize) -> (f64, f64) {
        if k == 0 {
            (0.0, 0.5)
        } else {
            (1.0 - 2f64.powi(-(k as i32)), 1.0 - 2f64.powi(-(k as i32) - 1))
        }
    }

    /// Chebyshev-Gauss-Lobatto nodes on [-1, 1].
    fn cgl_node(j: usize) -> f64 {
        -(std::f64::consts::PI * j as f64 / (NNODE - 1) as f64).cos()
    }

    /// G_l(u) by direct quadrature of the tau-integral with the kernel
    /// argument (1 + u) - u (1 + tau) kept cancellation-free via 1 - u.
    fn g_exact(dim: usize, kernel: PairKernel, l: usize, u: f64) -> f64 {
        let one_minus_u = 1.0 - u;
        let alpha = (dim as f64 - 2.0) / 2.0;
        let idx = GegenbauerIndex { k: l, alpha };
        // integrand in theta with tau = sin(theta):
        // arg = (1-u) + u * (1 - sin theta) = (1-u) + 2 u sin^2(pi/4 - theta/2)
        let f = |theta: f64| {
            let tau = theta.sin();
            let sh = (0.25 * std::f64::consts::PI - 0.5 * theta).sin();
            let arg = one_minus_u + 2.0 * u * sh * sh;
            let w = if dim == 2 {
                1.0
            } else {
                theta.cos().powi(dim as i32 - 2)
            };
            let c = if dim == 2 {
                // C_l^(0)(sin theta) via the explicit Chebyshev form
                if l == 0 {
                    1.0
                } else {
                    gegenbauer(GegenbauerIndex { k: l, alpha: 0.0 }, tau).unwrap()
                }
            } else {
                gegenbauer(idx, tau).unwrap()
            };
            let ker = match kernel {
                PairKernel::Riesz { lambda } => arg.powf(-0.5 * lambda),
                PairKernel::Log => -0.5 * arg.ln(),
            };
            ker * c * w
        };
        let hp = 0.5 * std::f64::consts::PI;
        integrate_split(
            f,
            &[-hp, 0.0, hp * (1.0 - 1e-8), hp],
            Tol { abs: 1e-13, rel: 3e-11, max_segments: 1200 },
        )
        .value
    }

    /// Endpoint behavior of G as eps = 1 - u -> 0: the weight concentrates
    /// at tau = 1, where
    /// int_0^2 (eps + v)^{-lambda/2} v^{(N-3)/2} dv gives
    ///   A eps^{-beta} + B  with beta = (lambda - N + 1)/2 > 0,
    ///   A log(1/eps) + B   at lambda = N - 1,
    ///   a finite limit     for lambda < N - 1,
    /// with the exact A = C_l(1) 2^{(N-3)/2} Beta((N-1)/2, beta) (power case)
    /// or C_l(1) 2^{(N-3)/2} (log case). B is matched at the handover point.
    #[derive(Clone, Copy, Debug)]
    enum Deep {
        Bounded(f64),
        Power { a: f64, beta: f64, b: f64 },
        Log { a: f64, b: f64 },
    }

    fn deep_form(dim: usize, kernel: PairKernel, l: usize, g_at_eps0: f64, eps0: f64) -> Deep {
        let n = dim as f64;
        let cl1 = crate::specfun::gegenbauer_at_one(l, (n - 2.0) / 2.0);
        let front = cl1 * 2f64.powf((n - 3.0) / 2.0);
        match kernel {
            PairKernel::Riesz { lambda } => {
                let beta = (lambda - n + 1.0) / 2.0;
                if beta > 1e-9 {
                    let a = front
                        * ((crate::specfun::log_gamma((n - 1.0) / 2.0).unwrap()
                            + crate::specfun::log_gamma(beta).unwrap()
                            - crate::specfun::log_gamma(lambda / 2.0).unwrap())
                        .exp());
                    let b = g_at_eps0 - a * eps0.powf(-beta);
                    Deep::Power { a, beta, b }
                } else if beta.abs() <= 1e-9 {
                    let a = front;
                    let b = g_at_eps0 - a * (1.0 / eps0).ln();
                    Deep::Log { a, b }
                } else {
                    Deep::Bounded(g_at_eps0)
                }
            }
            PairKernel::Log => Deep::Bounded(g_at_eps0),
        }
    }

    thread_local! {
        static CACHE: RefCell<HashMap<(usize, usize, u64), (Vec<[f64; NNODE]>, Deep)>> =
            RefCell::new(HashMap::new());
    }

    fn kernel_key(kernel: PairKernel) -> u64 {
        match kernel {
            PairKernel::Riesz { lambda } => lambda.to_bits(),
            PairKernel::Log => u64::MAX,
        }
    }

    /// Barycentric interpolation at the CGL nodes of one panel.
    fn bary_eval(vals: &[f64; NNODE], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, v) in vals.iter().enumerate() {
            let xj = cgl_node(j);
            let dx = x - xj;
            if dx.abs() < 1e-14 {
                return *v;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == NNODE - 1 {
                w *= 0.5;
            }
            num += w / dx * v;
            den += w / dx;
        }
        num / den
    }

    /// Interpolated G_l at 1 - u = eps; `eps` is carried directly so deep
    /// near-diagonal evaluations never round through u itself.
    pub fn g_value_eps(dim: usize, kernel: PairKernel, l: usize, eps: f64) -> f64 {
        debug_assert!(eps >= 0.0);
        let key = (dim * 64 + l, dim, kernel_key(kernel));
        CACHE.with(|c| {
            let mut map = c.borrow_mut();
            let (table, deep) = map.entry(key).or_insert_with(|| {
                let panels: Vec<[f64; NNODE]> = (0..NPANEL)
                    .map(|k| {
                        let (lo, hi) = panel_bounds(k);
                        let mut vals = [0.0; NNODE];
                        for (j, v) in vals.iter_mut().enumerate() {
                            let x = cgl_node(j);
                            let uu = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                            *v = g_exact(dim, kernel, l, uu);
                        }
                        vals
                    })
                    .collect();
                let eps0 = 2f64.powi(-(NPANEL as i32));
                let g0 = g_exact(dim, kernel, l, 1.0 - eps0);
                let deep = deep_form(dim, kernel, l, g0, eps0);
                (panels, deep)
            });
            let eps0 = 2f64.powi(-(NPANEL as i32));
            if eps < eps0 {
                return match *deep {
                    Deep::Bounded(v) => v,
                    Deep::Power { a, beta, b } => a * eps.max(1e-300).powf(-beta) + b,
                    Deep::Log { a, b } => a * (1.0 / eps.max(1e-300)).ln() + b,
                };
            }
            let u = 1.0 - eps;
            let k = if u < 0.5 { 0 } else { ((-eps.log2()).floor() as usize).min(NPANEL - 1) };
            let (lo, hi) = panel_bounds(k);
            let x = ((u - 0.5 * (lo + hi)) / (0.5 * (hi - lo))).clamp(-1.0, 1.0);
            bary_eval(&table[k], x)
        })
    }
}

/// A_l(r, s) = kappa_{N,l} int_{-1}^{1} Ker(sqrt(r^2+s^2-2 r s tau))
/// C_l^{((N-2)/2)}(tau) (1-tau^2)^{(N-3)/2} dtau, with closed forms where
/// available. For N = 1 this is Ker(|r-s|) + (-1)^l Ker(r+s).
///
/// `d2` is (r - s)^2, passed explicitly so callers integrating across the
/// diagonal can supply the exact offset square without cancellation; the
/// kernel argument is assembled as d2 + 2 r s (1 - tau).
pub(crate) fn angular_kernel_d2(
    dim: usize,
    kernel: PairKernel,
    l: usize,
    r: f64,
    s: f64,
    d2: f64,
) -> f64 {
    // fast path: tabulated one-variable reduction for the quadrature-backed
    // cases (dim 2 both kernels except the closed log forms; dim 3, l >= 1)
    let q = r * r + s * s;
    if q > 0.0 && dim >= 2 && dim <= 3 {
        let closed_log_2d = dim == 2 && matches!(kernel, PairKernel::Log);
        let closed_l0_3d = dim == 3 && l == 0;
        if !closed_log_2d && !closed_l0_3d {
            // 1 - u = d2 / q, carried as the exact ratio near the diagonal
            let eps = (d2 / q).clamp(0.0, 1.0);
            let kap = kappa(dim, l).unwrap();
            return match kernel {
                PairKernel::Riesz { lambda } => {
                    kap * q.powf(-0.5 * lambda) * gtable::g_value_eps(dim, kernel, l, eps)
                }
                PairKernel::Log => {
                    // l >= 1 here (dim 3): the -1/2 ln(q) part integrates to 0
                    // against nonconstant harmonics
                    kap * gtable::g_value_eps(dim, kernel, l, eps)
                }
            };
        }
    }
    angular_kernel_exact(dim, kernel, l, r, s, d2)
}

/// Test shim exposing the angular kernel (table-backed path included).
#[doc(hidden)]
pub fn angular_kernel_probe(dim: usize, kernel: PairKernel, l: usize, r: f64, s: f64, d2: f64) -> f64 {
    angular_kernel_d2(dim, kernel, l, r, s, d2)
}

fn angular_kernel_exact(
    dim: usize,
    kernel: PairKernel,
    l: usize,
    r: f64,
    s: f64,
    d2: f64,
) -> f64 {
    let b = 2.0 * r * s;
    match dim {
        1 => {
            let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
            kernel.eval(d2.sqrt()) + sign * kernel.eval(r + s)
        }
        2 => match kernel {
            PairKernel::Log => {
                let (mn, mx) = if r < s { (r, s) } else { (s, r) };
                if mx <= 0.0 {
                    return 0.0;
                }
                if l == 0 {
                    -2.0 * PI * mx.ln()
                } else {
                    PI / l as f64 * (mn / mx).powi(l as i32)
                }
            }
            PairKernel::Riesz { lambda } => {
                // kappa_{2,l} k_l with tau = cos t; C_l^(0)(cos t) = (2/l) cos(l t)
                let kap = if l == 0 { 2.0 } else { l as f64 };
                let cl = |t: f64| {
                    if l == 0 {
                        1.0
                    } else {
                        2.0 / l as f64 * (l as f64 * t).cos()
                    }
                };
                let f = |t: f64| {
                    let st = (0.5 * t).sin();
                    (d2 + 2.0 * b * st * st).powf(-0.5 * lambda) * cl(t)
                };
                // concentration scale near t = 0 when r ~ s
                let eps = (d2.sqrt() / (r * s).sqrt().max(1e-300)).min(1.0);
                let mut pts = vec![0.0];
                let mut t = (eps * 0.5).max(1e-8);
                while t < PI {
                    pts.push(t);
                    t *= 4.0;
                }
                pts.push(PI);
                pts.dedup();
                kap * integrate_split(f, &pts, Tol { abs: 1e-13, rel: 1e-10, max_segments: 600 })
                    .value
            }
        },
        3 => {
            let kap = 2.0 * PI; // kappa_{3,l} for every l
            if l == 0 {
                return kap * k0_closed_dim3(kernel, b, r, s, d2);
            }
            // weight 1, C_l^(1/2) = Legendre P_l
            let idx = GegenbauerIndex { k: l, alpha: 0.5 };
            let f = |tau: f64| {
                let arg = d2 + b * (1.0 - tau);
                let ker = match kernel {
                    PairKernel::Riesz { lambda } => arg.powf(-0.5 * lambda),
                    PairKernel::Log => -0.5 * arg.ln(),
                };
                ker * gegenbauer(idx, tau).unwrap()
            };
            kap * integrate_split(
                f,
                &[-1.0, 0.0, 1.0 - 1e-12, 1.0],
                Tol { abs: 1e-13, rel: 1e-10, max_segments: 600 },
            )
            .value
        }
        _ => {
            // generic N: tau = sin(theta) with weight cos^{N-2}(theta);
            // 1 - sin(theta) = 2 sin^2(pi/4 - theta/2) avoids cancellation
            let alpha = (dim as f64 - 2.0) / 2.0;
            let idx = GegenbauerIndex { k: l, alpha };
            let kap = kappa(dim, l).unwrap();
            let f = |theta: f64| {
                let tau = theta.sin();
                let sh = (0.25 * PI - 0.5 * theta).sin();
                let arg = d2 + 2.0 * b * sh * sh;
                let w = theta.cos().powi(dim as i32 - 2);
                let ker = match kernel {
                    PairKernel::Riesz { lambda } => arg.powf(-0.5 * lambda),
                    PairKernel::Log => -0.5 * arg.ln(),
                };
                ker * gegenbauer(idx, tau).unwrap() * w
            };
            let hp = 0.5 * PI;
            kap * integrate_split(
                f,
                &[-hp, 0.0, hp - 1e-9, hp],
                Tol { abs: 1e-13, rel: 1e-10, max_segments: 600 },
            )
            .value
        }
    }
}

/// Closed radial kernels for N = 3, l = 0; d2 = (r - s)^2.
fn k0_closed_dim3(kernel: PairKernel, b: f64, r: f64, s: f64, d2: f64) -> f64 {
    if b < 1e-300 {
        // one radius vanishes: kernel is constant over the sphere
        let a = r * r + s * s + d2 - d2; // = r^2 + s^2
        return match kernel {
            PairKernel::Riesz { lambda } => 2.0 * a.powf(-0.5 * lambda),
            PairKernel::Log => -a.ln(),
        };
    }
    let ap = (r + s) * (r + s);
    match kernel {
        PairKernel::Riesz { lambda } => {
            if (lambda - 2.0).abs() < 1e-12 {
                (ap / d2).ln() / b
            } else {
                let e = 1.0 - 0.5 * lambda;
                (ap.powf(e) - d2.powf(e)) / (b * e)
            }
        }
        PairKernel::Log => {
            // -1/2 int ln(d2 + b(1 - tau)) dtau
            let tm = if d2 > 0.0 { d2 * (d2.ln() - 1.0) } else { 0.0 };
            let tp = ap * (ap.ln() - 1.0);
            -0.5 * (tp - tm) / b
        }
    }
}

// ---------------------------------------------------------------------------
// route 2: direct 1D quadrature
// ---------------------------------------------------------------------------

fn direct_energy_1d(
    f: &FuncExpr,
    g: &FuncExpr,
    kernel: PairKernel,
    tol: f64,
) -> Result<QuadResultC> {
    let (flo, fhi) = f.support_1d();
    let (glo, ghi) = g.support_1d();
    let fb = f.breakpoints_1d();
    let gb = g.breakpoints_1d();
    if fhi <= flo || ghi <= glo {
        return Ok(QuadResultC::exact(Complex64::new(0.0, 0.0)));
    }

    let fval = |x: f64| f.evaluate(&crate::geometry::Point(vec![x])).unwrap_or_default();
    let gval = |x: f64| g.evaluate(&crate::geometry::Point(vec![x])).unwrap_or_default();

    let inner_tol = Tol { abs: tol * 0.05, rel: 1e-9, max_segments: 800 };
    let outer_tol = Tol { abs: tol * 0.4, rel: 1e-9, max_segments: 1200 };
    let tail_tol = Tol { abs: tol * 0.05, rel: 1e-9, max_segments: 1200 };

    // when both supports are unbounded on a side, the inner correlation
    // window must be cut somewhere; the built-in decaying profiles make the
    // remainder negligible at the requested tolerances
    let pad = 80.0;
    let finite = |v: f64, fallback: f64| if v.is_finite() { v } else { fallback };
    let brk_lo = fb.iter().chain(gb.iter()).copied().fold(0.0f64, f64::min) - pad;
    let brk_hi = fb.iter().chain(gb.iter()).copied().fold(0.0f64, f64::max) + pad;

    // correlation C(u) = int conj(f(x)) g(x + u) dx; the (1 + u^2) envelope
    // keeps the integrated correlation error bounded over infinite u-ranges
    let mut inner_err_budget: f64 = 0.0;
    let mut inner_ok = true;
    let mut corr = |u: f64| -> Complex64 {
        let lo = finite(flo, finite(glo - u, brk_lo)).max(finite(glo - u, brk_lo));
        let hi = finite(fhi, finite(ghi - u, brk_hi)).min(finite(ghi - u, brk_hi));
        if hi <= lo {
            return Complex64::new(0.0, 0.0);
        }
        let mut pts = vec![lo, hi];
        for &t in &fb {
            if t > lo && t < hi {
                pts.push(t);
            }
        }
        for &t in &gb {
            let t = t - u;
            if t > lo && t < hi {
                pts.push(t);
            }
        }
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup();
        let scaled = Tol { abs: inner_tol.abs / (1.0 + u * u), ..inner_tol };
        let q = integrate_complex_split(|x| fval(x).conj() * gval(x + u), &pts, scaled);
        inner_err_budget = inner_err_budget.max(q.abs_error * (1.0 + u * u));
        inner_ok &= q.converged;
        q.value
    };

    // outer: int K(|u|) C(u) du over [glo - fhi, ghi - flo], singular at
    // u = 0, with honest tail transforms when the range is unbounded
    let ulo = glo - fhi;
    let uhi = ghi - flo;
    let ulo_f = finite(ulo, (brk_lo - brk_hi).min(-1.0));
    let uhi_f = finite(uhi, (brk_hi - brk_lo).max(1.0));
    // kinks of C at differences of breakpoints
    let mut upts: Vec<f64> = Vec::new();
    for &tf in fb.iter() {
        for &tg in gb.iter() {
            let d = tg - tf;
            if d > ulo_f && d < uhi_f {
                upts.push(d);
            }
        }
    }
    upts.push(ulo_f);
    upts.push(uhi_f);
    upts.push(0.0f64.clamp(ulo_f, uhi_f));
    upts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    upts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    let mut total = QuadResultC::exact(Complex64::new(0.0, 0.0));
    let mut integrand = |u: f64| corr(u) * kernel.eval(u.abs());
    for w in upts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let piece = if a < 0.0 && b > 0.0 {
            let left = integrate_complex_left_singular(|u| integrand(-u), -a, outer_tol);
            let right = integrate_complex_left_singular(&mut integrand, b, outer_tol);
            left.combine(right)
        } else if a.abs() < 1e-13 {
            integrate_complex_left_singular(&mut integrand, b, outer_tol)
        } else if b.abs() < 1e-13 {
            integrate_complex_left_singular(|u| integrand(-u), -a, outer_tol)
        } else {
            integrate_complex_split(&mut integrand, &[a, b], outer_tol)
        };
        total = total.combine(piece);
    }
    if !uhi.is_finite() {
        total = total.combine(crate::quad::integrate_complex_to_inf(
            &mut integrand,
            uhi_f,
            tail_tol,
        ));
    }
    if !ulo.is_finite() {
        total = total.combine(crate::quad::integrate_complex_to_inf(
            |u| integrand(ulo_f - u),
            0.0,
            tail_tol,
        ));
    }
    // the kernel is integrable against (1 + u^2)^{-1}, so the integrated
    // correlation error stays a small multiple of the budget
    total.abs_error += 8.0 * inner_err_budget;
    total.converged &= inner_ok;
    Ok(total)
}

// ---------------------------------------------------------------------------
// route 3: two-center multipole series
// ---------------------------------------------------------------------------

fn multi_center_energy(
    tf: &[Term],
    tg: &[Term],
    dim: usize,
    kernel: PairKernel,
    tol: f64,
) -> Result<QuadResultC> {
    let mut total = QuadResultC::exact(Complex64::new(0.0, 0.0));
    let inv_surf = 1.0 / sphere_surface(dim);
    for a in tf {
        for b in tg {
            if a.harmonic.l != 0 || b.harmonic.l != 0 {
                return Err(Error::Unsupported(
                    "multi-center energies support radial terms only".into(),
                ));
            }
            let d = a.center.dist(&b.center);
            let amp = a.coeff.conj() * b.coeff * inv_surf;
            let pair = if d < 1e-13 {
                radial_pair_integral(
                    &RadialFn::Base(a.profile.clone()),
                    &RadialFn::Base(b.profile.clone()),
                    0,
                    dim,
                    kernel,
                    tol,
                )?
            } else {
                two_center_radial_energy(&a.profile, &b.profile, d, dim, kernel)?
            };
            total = total.combine(QuadResultC {
                value: amp * pair.value,
                abs_error: amp.norm() * pair.abs_error,
                converged: pair.converged,
            });
        }
    }
    Ok(total)
}

/// Energy intint phi(|x|) psi(|y - d e|) Ker(|x - y|) dx dy for plain radial
/// profiles with separated supports, by the bipolar multipole expansion in
/// Gegenbauer coupling coefficients. Requires R_phi + R_psi <= 0.8 d.
pub fn two_center_radial_energy(
    phi: &super::profile::RadialProfile,
    psi: &super::profile::RadialProfile,
    d: f64,
    dim: usize,
    kernel: PairKernel,
) -> Result<QuadResult> {
    if dim < 2 {
        return Err(Error::Unsupported("two-center series applies for N >= 2".into()));
    }
    let (_, r_phi) = phi.support();
    let (_, r_psi) = psi.support();
    if !r_phi.is_finite() || !r_psi.is_finite() || r_phi + r_psi > 0.8 * d {
        return Err(Error::Unsupported(format!(
            "two-center series requires compact supports with R1 + R2 <= 0.8 d (R1={r_phi}, R2={r_psi}, d={d})"
        )));
    }
    let beta = (dim as f64 - 2.0) / 2.0;
    let kap = kappa_n0(dim);
    let nm1 = dim as f64 - 1.0;
    let kmax = 120usize;
    // moments
    let mk: Vec<f64> = (0..=kmax).map(|k| phi.moment(k as f64 + nm1).value).collect();
    let mj: Vec<f64> = (0..=kmax).map(|j| psi.moment(j as f64 + nm1).value).collect();
    let ratio = (r_phi + r_psi) / d;

    let inner_sum = |mu: f64| -> Result<f64> {
        // sum_j c^{mu/2, beta}_{j,0} M_j(psi) d^{-j}
        let mut s = 0.0;
        let mut last = f64::INFINITY;
        for j in (0..=kmax).step_by(2) {
            let c = coupling_closed(j, 0, mu / 2.0, beta)?;
            let term = c * mj[j] * d.powi(-(j as i32));
            s += term;
            last = term.abs();
            if last < 1e-16 * s.abs().max(1e-300) && j > 4 {
                break;
            }
        }
        let _ = last;
        Ok(s)
    };

    match kernel {
        PairKernel::Riesz { lambda } => {
            let mut total = 0.0;
            let mut tail = 0.0;
            for k in (0..=kmax).step_by(2) {
                let ck = coupling_closed(k, 0, lambda / 2.0, beta)?;
                let inner = inner_sum(lambda + k as f64)?;
                let term = ck * mk[k] * d.powf(-(lambda + k as f64)) * inner;
                total += term;
                tail = term.abs();
                if tail < 1e-15 * total.abs().max(1e-300) && k > 6 {
                    break;
                }
            }
            let err = tail * ratio / (1.0 - ratio).max(0.05) + 1e-14 * total.abs();
            Ok(QuadResult { value: kap * kap * total, abs_error: kap * kap * err, converged: true })
        }
        PairKernel::Log => {
            // W = int (1 - tau^2)^{(N-3)/2} dtau
            let w0 = coupling_closed(0, 0, beta.max(0.5), beta)?;
            let mut total = mk[0] * (w0 * w0 * (-d.ln()) * mj[0]);
            // k = 0, j >= 2 block
            let mut acc = 0.0;
            for j in (2..=kmax).step_by(2) {
                let c = coupling_closed(j, 0, 0.0, beta)?;
                let term = c * mj[j] * d.powi(-(j as i32));
                acc += term;
                if term.abs() < 1e-16 * acc.abs().max(1e-300) {
                    break;
                }
            }
            total += mk[0] * w0 * 0.5 * acc;
            // k >= 2 blocks: h contributes (1/2) c^{0,b}_{k,0} M_k |z|^{-k},
            // whose angular transport is the mu = k expansion
            let mut tail = 0.0;
            for k in (2..=kmax).step_by(2) {
                let ck = coupling_closed(k, 0, 0.0, beta)?;
                let inner = inner_sum(k as f64)?;
                let term = 0.5 * ck * mk[k] * d.powi(-(k as i32)) * inner;
                total += term;
                tail = term.abs();
                if tail < 1e-15 * total.abs().max(1e-300) && k > 6 {
                    break;
                }
            }
            let err = tail * ratio / (1.0 - ratio).max(0.05) + 1e-14 * total.abs();
            Ok(QuadResult { value: kap * kap * total, abs_error: kap * kap * err, converged: true })
        }
    }
}

/// kappa_{N,0} = |S^{N-2}| for N >= 2.
fn kappa_n0(dim: usize) -> f64 {
    kappa(dim, 0).unwrap()
}

/// J[f, g] = I_0[f, g] - (1/2N)(int f log f + int g log g) for unit-mass
/// non-negative f, g.
pub fn loghls_functional(f: &FuncExpr, g: &FuncExpr, tol: f64) -> Result<QuadResult> {
    let dim = f.dim();
    let mf = super::mass(f)?;
    let mg = super::mass(g)?;
    if (mf.value - 1.0).abs() > 1e-8 || (mg.value - 1.0).abs() > 1e-8 {
        return Err(Error::MassViolation(format!(
            "loghls_functional requires unit masses, got {} and {}",
            mf.value, mg.value
        )));
    }
    let i0 = log_energy(f, g, tol)?;
    if i0.value.im.abs() > 1e-7 {
        return Err(Error::InvalidParameter("log-HLS functional of complex data".into()));
    }
    let sf = super::entropy(f)?;
    let sg = super::entropy(g)?;
    let c = 1.0 / (2.0 * dim as f64);
    Ok(QuadResult {
        value: i0.value.re - c * (sf.value + sg.value),
        abs_error: i0.abs_error + c * (sf.abs_error + sg.abs_error),
        converged: i0.converged && sf.converged && sg.converged,
    })
}
