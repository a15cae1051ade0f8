//! Seeded randomized sweeps: reflection-positivity defects over ball and
//! half-space regions, quotient upper bounds, and reflected-pair
//! Cauchy-Schwarz chains. The seed fully determines every trial; parallel
//! execution preserves the per-trial results and their order.

use crate::error::{Error, Result};
use crate::functional::{FuncExpr, RadialProfile, Term};
use crate::geometry::{
    halve_ball, halve_halfspace, Ball, HalfSpace, KernelSpec, Point, Region,
};
use crate::quad::QuadResult;
use crate::spectral::{rp_defect_with, DefectReport};
use crate::specfun::HarmonicIndex;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RegionKind {
    Ball,
    HalfSpace,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RpTrial {
    pub index: u64,
    pub direct_defect: QuadResult,
    pub spectral_value: QuadResult,
    pub agreement_gap: f64,
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Random expression concentric with the unit ball: a few bump terms with
/// random harmonic content for lambda > 0, non-negative radial data for the
/// log case.
fn random_ball_input(spec: &KernelSpec, rng: &mut ChaCha8Rng) -> FuncExpr {
    let dim = spec.dim;
    let max_l = if dim == 1 { 1 } else { 2 };
    let nterms = rng.gen_range(1..=3);
    let mut terms = Vec::new();
    for _ in 0..nterms {
        let (l, m) = if spec.is_log() {
            (0usize, 0i32)
        } else {
            let l = rng.gen_range(0..=max_l);
            let ms = HarmonicIndex::m_values(dim, l);
            (l, ms[rng.gen_range(0..ms.len())])
        };
        let center = rng.gen_range(0.25..1.55);
        let width = rng.gen_range(0.15..0.45);
        let amp = if spec.is_log() {
            rng.gen_range(0.2..1.0)
        } else {
            let a: f64 = rng.gen_range(0.2..1.0);
            if rng.gen_bool(0.5) {
                a
            } else {
                -a
            }
        };
        terms.push(Term {
            center: Point::zeros(dim),
            harmonic: HarmonicIndex::new(dim, l, m).unwrap(),
            profile: RadialProfile::bump(center, width, 1.0),
            coeff: Complex64::new(amp * crate::functional::sphere_surface(dim).sqrt(), 0.0),
        });
    }
    if spec.is_log() {
        // a slowly decaying floor guarantees mass on both sides of the
        // halving sphere
        let b = rng.gen_range(0.6..1.4);
        let p = dim as f64 * rng.gen_range(1.05..1.6);
        terms.push(
            Term::radial(dim, Point::zeros(dim), RadialProfile::PowerLaw { b, p }, 0.3).unwrap(),
        );
    }
    FuncExpr::Terms(terms)
}

/// Random multi-center radial bumps on a slot grid clear of the hyperplane
/// x_1 = 0, jittered; slot spacing keeps every pairwise and reflected
/// distance inside the two-center series region.
fn random_halfspace_input(spec: &KernelSpec, rng: &mut ChaCha8Rng) -> FuncExpr {
    let dim = spec.dim;
    let axial: [f64; 6] = [-2.4, -1.5, -0.6, 0.6, 1.5, 2.4];
    let cross: [f64; 3] = [-1.2, 0.0, 1.2];
    let nterms = rng.gen_range(2..=4);
    let mut used: Vec<(usize, usize, usize)> = Vec::new();
    let mut terms = Vec::new();
    for _ in 0..nterms {
        let slot = loop {
            let s = (
                rng.gen_range(0..axial.len()),
                rng.gen_range(0..cross.len()),
                if dim >= 3 { rng.gen_range(0..cross.len()) } else { 0 },
            );
            if !used.contains(&s) {
                used.push(s);
                break s;
            }
        };
        let mut center = vec![axial[slot.0] + rng.gen_range(-0.05..0.05)];
        if dim >= 2 {
            center.push(cross[slot.1] + rng.gen_range(-0.05..0.05));
        }
        if dim >= 3 {
            center.push(cross[slot.2] + rng.gen_range(-0.05..0.05));
        }
        let width = rng.gen_range(0.15..0.28);
        let amp = if spec.is_log() {
            rng.gen_range(0.2..1.0)
        } else {
            let a: f64 = rng.gen_range(0.2..1.0);
            if rng.gen_bool(0.5) {
                a
            } else {
                -a
            }
        };
        terms
            .push(Term::radial(dim, Point(center), RadialProfile::bump(0.0, width, 1.0), amp).unwrap());
    }
    FuncExpr::Terms(terms)
}

/// One reflection-positivity trial; the region halves the mass for the log
/// kernel and is the unit ball / coordinate half-space otherwise.
pub fn rp_trial(spec: &KernelSpec, kind: RegionKind, seed: u64, index: u64) -> Result<RpTrial> {
    let mut rng = trial_rng(seed, index);
    let (f, region) = match kind {
        RegionKind::Ball => {
            let f = random_ball_input(spec, &mut rng);
            let region = if spec.is_log() {
                Region::Ball(halve_ball(&f, &Point::zeros(spec.dim))?)
            } else {
                Region::Ball(Ball::new(Point::zeros(spec.dim), rng.gen_range(0.7..1.3))?)
            };
            (f, region)
        }
        RegionKind::HalfSpace => {
            let mut normal = Point::zeros(spec.dim);
            normal.0[0] = 1.0;
            // resample until the halving plane is clear of every support
            let mut attempt = 0;
            loop {
                let f = random_halfspace_input(spec, &mut rng);
                let hs = if spec.is_log() {
                    halve_halfspace(&f, &normal)?
                } else {
                    HalfSpace::new(normal.clone(), 0.0)?
                };
                let clear = match &f {
                    FuncExpr::Terms(ts) => ts.iter().all(|t| {
                        let gap = t.center.dot(&hs.normal) - hs.offset;
                        let (_, r) = t.profile.support();
                        gap.abs() > r + 0.02
                    }),
                    _ => false,
                };
                if clear {
                    break (f, Region::HalfSpace(hs));
                }
                attempt += 1;
                if attempt > 40 {
                    return Err(Error::Unsupported(
                        "could not place a mass-halving plane clear of the supports".into(),
                    ));
                }
            }
        }
    };
    let report: DefectReport = rp_defect_with(&f, &region, spec, 1e-7, 40, 6)?;
    Ok(RpTrial {
        index,
        direct_defect: report.direct_defect,
        spectral_value: report.spectral_value,
        agreement_gap: report.agreement_gap,
    })
}

/// Run `trials` independent defect trials in parallel (deterministic order).
pub fn rp_sweep(
    spec: &KernelSpec,
    kind: RegionKind,
    trials: u64,
    seed: u64,
) -> Result<Vec<RpTrial>> {
    (0..trials)
        .into_par_iter()
        .map(|i| rp_trial(spec, kind, seed, i))
        .collect()
}

/// Random compactly supported asymmetric input on the line together with a
/// mass-halving half-space, for strictness probes.
pub fn random_asymmetric_1d(seed: u64, index: u64) -> Result<(FuncExpr, Region)> {
    let mut rng = trial_rng(seed, index);
    let left = Term::radial(
        1,
        Point(vec![-rng.gen_range(0.5..1.5)]),
        RadialProfile::bump(0.0, rng.gen_range(0.25..0.45), 1.0),
        rng.gen_range(0.4..1.0),
    )?;
    let right = Term::radial(
        1,
        Point(vec![rng.gen_range(0.5..1.8)]),
        RadialProfile::bump(0.0, rng.gen_range(0.25..0.45), 1.0),
        rng.gen_range(0.4..1.0),
    )?;
    let f = FuncExpr::Terms(vec![left, right]);
    let hs = halve_halfspace(&f, &Point(vec![1.0]))?;
    Ok((f, Region::HalfSpace(hs)))
}

/// Random pair (f, g) of non-negative bumps supported in {x_1 > 0}, for the
/// reflected-pair Cauchy-Schwarz chain.
pub fn random_halfline_pair(dim: usize, seed: u64, index: u64) -> Result<(FuncExpr, FuncExpr)> {
    let mut rng = trial_rng(seed, index);
    let mut mk = |rng: &mut ChaCha8Rng| -> Result<FuncExpr> {
        let axial: [f64; 3] = [0.6, 1.5, 2.4];
        let cross: [f64; 3] = [-1.2, 0.0, 1.2];
        let nterms = rng.gen_range(1..=2);
        let mut used: Vec<(usize, usize)> = Vec::new();
        let mut terms = Vec::new();
        for _ in 0..nterms {
            let slot = loop {
                let s = (rng.gen_range(0..axial.len()), rng.gen_range(0..cross.len()));
                if !used.contains(&s) {
                    used.push(s);
                    break s;
                }
            };
            let mut center = vec![axial[slot.0] + rng.gen_range(-0.05..0.05)];
            if dim >= 2 {
                center.push(cross[slot.1] + rng.gen_range(-0.05..0.05));
            }
            if dim >= 3 {
                center.push(rng.gen_range(-0.5..0.5));
            }
            terms.push(Term::radial(
                dim,
                Point(center),
                RadialProfile::bump(0.0, rng.gen_range(0.15..0.25), 1.0),
                rng.gen_range(0.3..1.0),
            )?);
        }
        Ok(FuncExpr::Terms(terms))
    };
    Ok((mk(&mut rng)?, mk(&mut rng)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_are_deterministic() {
        let spec = KernelSpec::new(1, 0.5).unwrap();
        let a = rp_sweep(&spec, RegionKind::HalfSpace, 4, 42).unwrap();
        let b = rp_sweep(&spec, RegionKind::HalfSpace, 4, 42).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.direct_defect.value, y.direct_defect.value);
            assert_eq!(x.spectral_value.value, y.spectral_value.value);
        }
        let c = rp_sweep(&spec, RegionKind::HalfSpace, 4, 43).unwrap();
        assert!(a[0].direct_defect.value != c[0].direct_defect.value);
    }

    #[test]
    fn small_ball_sweep_is_nonnegative() {
        for (dim, lambda) in [(1usize, 0.5), (2, 1.5), (1, 0.0)] {
            let spec = KernelSpec::new(dim, lambda).unwrap();
            let trials = rp_sweep(&spec, RegionKind::Ball, 3, 7).unwrap();
            for t in &trials {
                assert!(
                    t.direct_defect.value >= -1e-7,
                    "N={dim} lambda={lambda} trial {}: direct {}",
                    t.index,
                    t.direct_defect.value
                );
                assert!(t.spectral_value.value >= -1e-7);
            }
        }
    }

    #[test]
    fn small_halfspace_sweep_is_nonnegative() {
        for (dim, lambda) in [(2usize, 1.0), (3, 1.9), (2, 0.0)] {
            let spec = KernelSpec::new(dim, lambda).unwrap();
            let trials = rp_sweep(&spec, RegionKind::HalfSpace, 3, 11).unwrap();
            for t in &trials {
                assert!(
                    t.direct_defect.value >= -1e-7,
                    "N={dim} lambda={lambda} trial {}: direct {}",
                    t.index,
                    t.direct_defect.value
                );
            }
        }
    }
}
