//! Sub-Riemannian distance from the identity and the inverse geodesic problem.
//!
//! For a target `(alpha, beta)` with `beta != 0` the minimizing geodesic has
//! `t < 2 pi / w`, `w = sqrt(1 + c^2)`, and satisfies
//!
//! ```text
//!   sin(w t / 2) / w = |beta|
//!   alpha = e^{-i c t/2} (cos(w t/2) + i (c/w) sin(w t/2))
//! ```
//!
//! The first equation gives `t` as a two-valued function of `c` (the two
//! arcsin branches), defined for `|c| <= |alpha| / |beta|`. Walking the short
//! branch from `-c_max` to `c_max` and the long branch back closes a loop on
//! which the phase of `alpha(c, t(c)) * conj(alpha_target)` is continuous up
//! to `2 pi` wraps. Its zero is bracketed on a scan, bisected, and polished by
//! Newton on `(c, t)`.
//!
//! Targets with `beta = 0` lie on the cut locus `e^{s k}`. There the distance
//! is `2 sqrt(arg(alpha) (2 pi - arg(alpha)))` and the minimizers form a
//! one-parameter family in `theta`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_positive;
use crate::error::{Error, Result};
use crate::geodesic::{cut_time, exp_map, Covector};
use crate::su2::{inverse, multiply, GroupElement};

/// `|beta|` below which a target is treated as a cut point.
pub const BETA_EPS: f64 = 1e-10;
/// `|alpha|` below which `arg(alpha)` is taken as 0.
pub const ALPHA_ZERO: f64 = 1e-12;
/// Chord to the identity below which a target is the identity.
pub const IDENTITY_EPS: f64 = 1e-12;
/// Largest acceptable `|Exp(theta, c, t) - g|` for a returned solution.
pub const RESIDUAL_TOL: f64 = 1e-9;

const SCAN_POINTS: usize = 96;
const SCAN_POINTS_FINE: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    /// The only minimizing geodesic.
    Unique,
    /// One member of a one-parameter family of minimizers (cut points).
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSolution {
    pub cov: Covector,
    /// Arclength, equal to the distance.
    pub t: f64,
    pub multiplicity: Multiplicity,
}

/// `arg(z)` in `[0, 2 pi)`, with `arg(0) = 0`.
fn arg_positive(z: Complex64) -> f64 {
    if z.norm() < ALPHA_ZERO {
        0.0
    } else {
        wrap_positive(z.im.atan2(z.re), TAU)
    }
}

/// Distance from the identity to a point of `e^{s k}` with `alpha = e^{i phi}`.
pub fn vertical_distance(alpha: Complex64) -> f64 {
    let phi = arg_positive(alpha);
    2.0 * (phi * (TAU - phi)).max(0.0).sqrt()
}

pub fn distance_from_id(g: &GroupElement) -> Result<f64> {
    let g = g.normalized();
    if g.beta.norm() < BETA_EPS {
        return Ok(vertical_distance(g.alpha));
    }
    Ok(solve_regular(&g)?.t)
}

/// Left-invariant distance `d(g, h) = d(Id, g^{-1} h)`.
pub fn distance(g: &GroupElement, h: &GroupElement) -> Result<f64> {
    distance_from_id(&multiply(&inverse(g), h))
}

/// All minimizing geodesics from the identity to `g`.
///
/// A regular target has exactly one. A cut point (`beta = 0`) is reached by
/// the family `theta in [0, 2pi)`; two representatives `theta = 0, pi` are
/// returned, both marked [`Multiplicity::Family`].
pub fn solve_geodesic(g: &GroupElement) -> Result<Vec<GeodesicSolution>> {
    let g = g.normalized();
    if g.chord(&GroupElement::IDENTITY) < IDENTITY_EPS {
        return Err(Error::IdentityTarget);
    }
    if g.beta.norm() < BETA_EPS {
        let phi = arg_positive(g.alpha);
        // alpha = -e^{-i c pi / w}  =>  c / w = 1 - phi / pi
        let s = 1.0 - phi / PI;
        let c = s / (1.0 - s * s).sqrt();
        let w = c.hypot(1.0);
        let t = TAU / w;
        return Ok([0.0, PI]
            .iter()
            .map(|&theta| GeodesicSolution {
                cov: Covector::new(theta, c),
                t,
                multiplicity: Multiplicity::Family,
            })
            .collect());
    }
    Ok(vec![solve_regular(&g)?])
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// `w t / 2 = asin(w |beta|)`
    Short,
    /// `w t / 2 = pi - asin(w |beta|)`
    Long,
}

struct RegularProblem {
    target: Complex64,
    alpha_abs: f64,
    beta_abs: f64,
    u_max: f64,
    c_max: f64,
}

impl RegularProblem {
    fn new(g: &GroupElement) -> Self {
        let beta_abs = g.beta.norm();
        let alpha_abs = g.alpha.norm();
        let c_max = alpha_abs / beta_abs;
        Self {
            target: g.alpha,
            alpha_abs,
            beta_abs,
            u_max: c_max.asinh(),
            c_max,
        }
    }

    fn c_of(&self, u: f64) -> f64 {
        u.sinh().clamp(-self.c_max, self.c_max)
    }

    fn t_of(&self, c: f64, branch: Branch) -> f64 {
        let w = c.hypot(1.0);
        // cos(x)^2 = 1 - w^2 |beta|^2 = |alpha|^2 - c^2 |beta|^2, which keeps
        // the two branches apart when |alpha| is tiny
        let cb = c * self.beta_abs;
        let cos_x = ((self.alpha_abs - cb) * (self.alpha_abs + cb)).max(0.0).sqrt();
        let x = (w * self.beta_abs).atan2(cos_x);
        let x = match branch {
            Branch::Short => x,
            Branch::Long => PI - x,
        };
        2.0 * x / w
    }

    /// Phase of `alpha(c, t) * conj(target)`, in `(-pi, pi]`.
    fn residual(&self, c: f64, t: f64) -> f64 {
        let z = alpha_of(c, t) * self.target.conj();
        z.im.atan2(z.re)
    }

    fn residual_at(&self, u: f64, branch: Branch) -> f64 {
        let c = self.c_of(u);
        self.residual(c, self.t_of(c, branch))
    }
}

/// `alpha` of `Exp(theta, c, t)`; independent of `theta`.
fn alpha_of(c: f64, t: f64) -> Complex64 {
    let w = c.hypot(1.0);
    let x = 0.5 * w * t;
    let (sx, cx) = x.sin_cos();
    Complex64::from_polar(1.0, -0.5 * c * t) * Complex64::new(cx, c / w * sx)
}

/// Partial derivatives of [`alpha_of`] with respect to `c` and `t`.
fn alpha_jacobian(c: f64, t: f64) -> (Complex64, Complex64) {
    let w = c.hypot(1.0);
    let q = c / w;
    let x = 0.5 * w * t;
    let (sx, cx) = x.sin_cos();
    let e = Complex64::from_polar(1.0, -0.5 * c * t);
    let p = Complex64::new(cx, q * sx);
    let dp_dx = Complex64::new(-sx, q * cx);
    let i = Complex64::i();
    let d_dt = e * (-i * (0.5 * c) * p + dp_dx * (0.5 * w));
    let d_dc = e * (-i * (0.5 * t) * p + dp_dx * (0.5 * q * t) + i * (sx / (w * w * w)));
    (d_dc, d_dt)
}

fn bisect(problem: &RegularProblem, branch: Branch, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = problem.residual_at(lo, branch);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let f_mid = problem.residual_at(mid, branch);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton on `alpha(c, t) = target`. A step is kept only while it reduces
/// the mismatch of the whole element, `|beta|` included; near the cut the
/// `alpha` equations alone are nearly singular.
fn polish(problem: &RegularProblem, mut c: f64, mut t: f64) -> (f64, f64) {
    let target = problem.target;
    let mismatch = |c: f64, t: f64| {
        let w = c.hypot(1.0);
        let db = (0.5 * w * t).sin() / w - problem.beta_abs;
        ((alpha_of(c, t) - target).norm_sqr() + db * db).sqrt()
    };
    let mut err = mismatch(c, t);
    for _ in 0..8 {
        if err < 1e-16 {
            break;
        }
        let f = alpha_of(c, t) - target;
        let (jc, jt) = alpha_jacobian(c, t);
        let det = jc.re * jt.im - jt.re * jc.im;
        if det.abs() < 1e-300 {
            break;
        }
        let dc = -(f.re * jt.im - jt.re * f.im) / det;
        let dt = -(jc.re * f.im - f.re * jc.im) / det;
        let (nc, nt) = (c + dc, t + dt);
        let nerr = mismatch(nc, nt);
        if !(nerr < err) {
            break;
        }
        c = nc;
        t = nt;
        err = nerr;
    }
    (c, t)
}

fn scan_roots(problem: &RegularProblem, points: usize) -> Vec<(f64, f64)> {
    let mut roots = Vec::new();
    for branch in [Branch::Short, Branch::Long] {
        let us: Vec<f64> = (0..=points)
            .map(|i| -problem.u_max + 2.0 * problem.u_max * i as f64 / points as f64)
            .collect();
        let rs: Vec<f64> = us.iter().map(|&u| problem.residual_at(u, branch)).collect();
        for i in 0..points {
            let (r0, r1) = (rs[i], rs[i + 1]);
            let u = if r0 == 0.0 {
                us[i]
            } else if (r0 > 0.0) != (r1 > 0.0) && r1 != 0.0 && (r0 - r1).abs() < PI {
                bisect(problem, branch, us[i], us[i + 1])
            } else {
                continue;
            };
            let c = problem.c_of(u);
            roots.push((c, problem.t_of(c, branch)));
        }
        if rs[points] == 0.0 && branch == Branch::Long {
            let c = problem.c_of(us[points]);
            roots.push((c, problem.t_of(c, branch)));
        }
    }
    roots
}

fn finish(g: &GroupElement, c: f64, t: f64) -> Option<GeodesicSolution> {
    let theta = wrap_positive(g.beta.im.atan2(g.beta.re) - 0.5 * c * t, TAU);
    let cov = Covector::new(theta, c);
    if !(t > 0.0) || t > cut_time(&cov) + 1e-9 {
        return None;
    }
    if exp_map(&cov, t).chord(g) > RESIDUAL_TOL {
        return None;
    }
    Some(GeodesicSolution {
        cov,
        t,
        multiplicity: Multiplicity::Unique,
    })
}

/// Minimizer for a target with `beta != 0`.
fn solve_regular(g: &GroupElement) -> Result<GeodesicSolution> {
    if g.alpha.norm() < ALPHA_ZERO {
        // |alpha| = 0 forces c = 0, t = pi
        return finish(g, 0.0, PI).ok_or_else(|| {
            Error::SolverFailure("alpha = 0 target not reached by c = 0, t = pi".into())
        });
    }
    let problem = RegularProblem::new(g);
    for points in [SCAN_POINTS, SCAN_POINTS_FINE] {
        let mut found: Vec<GeodesicSolution> = scan_roots(&problem, points)
            .into_iter()
            .filter_map(|(c, t)| {
                let (c, t) = polish(&problem, c, t);
                finish(g, c, t)
            })
            .collect();
        if found.is_empty() {
            continue;
        }
        found.sort_by(|x, y| x.t.total_cmp(&y.t));
        found.dedup_by(|x, y| (x.t - y.t).abs() < 1e-9 && (x.cov.c - y.cov.c).abs() < 1e-6);
        if found.len() > 1 {
            log::warn!(
                "distance solver found {} roots for {:?}; keeping t = {}",
                found.len(),
                g,
                found[0].t
            );
        }
        return Ok(found[0]);
    }
    Err(Error::SolverFailure(format!(
        "no root of the phase equation for target {g:?}"
    )))
}

/// Checks that the distance depends on `beta` only through `|beta|` and is
/// unchanged by conjugating `alpha`.
pub fn distance_symmetry_check(alpha: Complex64, beta1: Complex64, beta2: Complex64) -> Result<bool> {
    if (alpha.norm_sqr() + beta1.norm_sqr() - 1.0).abs() > 1e-9
        || (beta1.norm() - beta2.norm()).abs() > 1e-9
    {
        return Err(Error::InvalidInput(
            "need |alpha|^2 + |beta1|^2 = 1 and |beta1| = |beta2|".into(),
        ));
    }
    let d1 = distance_from_id(&GroupElement::new(alpha, beta1))?;
    let d2 = distance_from_id(&GroupElement::new(alpha, beta2))?;
    let d3 = distance_from_id(&GroupElement::new(alpha.conj(), beta1))?;
    Ok((d1 - d2).abs() <= 1e-9 && (d1 - d3).abs() <= 1e-9)
}
