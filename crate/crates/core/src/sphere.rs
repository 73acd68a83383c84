//! Curves on S^2 with an unoriented direction, minimizing length plus squared
//! geodesic curvature.
//!
//! A pose `(a, b, xi)` is the point of S^2 at spherical coordinates `(a, b)`
//! with tangent direction `xi` (mod pi). It corresponds to the class of
//! `from_abc(a, b, -xi)` in L(4,1), and optimal curves are Hopf projections
//! of sub-Riemannian geodesics of SU(2). The structure is left-invariant and
//! the quotient is by a right action, so a problem starting at `g` is solved
//! by moving it to the identity.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angle::{unwrap, wrap_positive};
use crate::distance::{solve_geodesic, IDENTITY_EPS};
use crate::error::{Error, Result};
use crate::geodesic::{body_controls, exp_map, Covector};
use crate::lens::{canonicalize, LensPoint};
use crate::su2::{from_abc, inverse, multiply, to_abc, AbcCoords, GroupElement};

/// Samples closer than this to `a = 0` or `a = pi` are flagged.
pub const POLE_EPS: f64 = 1e-6;
/// Two candidate lengths closer than this count as a tie.
pub const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePose {
    pub a: f64,
    pub b: f64,
    /// Direction angle, in `[0, pi)`.
    pub xi: f64,
}

impl SpherePose {
    /// Reduces `b` into `[0, 2 pi)` and `xi` into `[0, pi)`.
    pub fn new(a: f64, b: f64, xi: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && xi.is_finite()) || !(0.0..=PI).contains(&a) {
            return Err(Error::InvalidInput(format!(
                "pose needs a in [0, pi] and finite angles, got ({a}, {b}, {xi})"
            )));
        }
        Ok(Self {
            a,
            b: wrap_positive(b, TAU),
            xi: wrap_positive(xi, PI),
        })
    }

    pub fn at_pole(&self) -> bool {
        self.a < POLE_EPS || PI - self.a < POLE_EPS
    }

    fn element(&self, shift: f64) -> GroupElement {
        from_abc(&AbcCoords::new(self.a, self.b, -self.xi + shift))
    }
}

pub fn pose_to_lens(p: &SpherePose) -> LensPoint {
    canonicalize(&p.element(0.0))
}

pub fn lens_to_pose(q: &LensPoint) -> SpherePose {
    SpherePose {
        a: q.abc.a,
        b: q.abc.b,
        xi: wrap_positive(-q.abc.c, PI),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanSample {
    pub s: f64,
    pub pose: SpherePose,
    /// `xi` followed continuously along the curve, modulo `2 pi`.
    pub xi_lift: f64,
    /// `b` followed continuously along the curve.
    pub b_lift: f64,
    pub u1: f64,
    pub u2: f64,
    pub cusp: bool,
    pub at_pole: bool,
    pub g: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub samples: Vec<PlanSample>,
    pub length: f64,
    /// Number of minimizing geodesics found among the target representatives.
    pub solutions_found: usize,
    /// `k` of the target representative `from_abc(a1, b1, -xi1 + k pi)`.
    pub chosen_rep: usize,
    /// Arclengths of interior sign changes of `u1`.
    pub cusps: Vec<f64>,
    pub start: GroupElement,
    pub cov: Covector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    /// Minimum number of samples.
    pub samples: usize,
    /// Largest arclength step away from the poles; the step shrinks near them.
    pub max_step: f64,
    pub cusp_tol: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            samples: 1001,
            max_step: 1e-3,
            cusp_tol: 1e-6,
        }
    }
}

pub fn plan(from: &SpherePose, to: &SpherePose) -> Result<PlanResult> {
    plan_with(from, to, &PlanOptions::default())
}

/// Zeros of `u1 = cos(theta + c s)` strictly inside `(0, t)`.
fn cusp_times(cov: &Covector, t: f64) -> Vec<f64> {
    if cov.c == 0.0 {
        return Vec::new();
    }
    let phase0 = cov.theta;
    let phase1 = cov.theta + cov.c * t;
    let (lo, hi) = (phase0.min(phase1), phase0.max(phase1));
    let first = ((lo - FRAC_PI_2) / PI).ceil() as i64;
    let last = ((hi - FRAC_PI_2) / PI).floor() as i64;
    let mut out: Vec<f64> = (first..=last)
        .map(|n| (FRAC_PI_2 + n as f64 * PI - cov.theta) / cov.c)
        .filter(|&s| s > 0.0 && s < t)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Pole distance below which sampling is refined.
const POLE_REFINE: f64 = 0.2;
/// Refinement stops growing below this pole distance.
const POLE_REFINE_FLOOR: f64 = 1e-3;

fn pole_distance(g: &GroupElement) -> f64 {
    let a = to_abc(g).a;
    a.min(PI - a).max(POLE_EPS)
}

/// Arclengths on `[0, t]`: a uniform grid, subdivided near the chart poles
/// where `b` and `xi` turn quickly, with the cusp times placed exactly. A cusp
/// replaces a grid point within a quarter of the local step, otherwise it is
/// inserted.
fn sample_times(start: &GroupElement, cov: &Covector, t: f64, n: usize, max_step: f64, cusps: &[f64]) -> Vec<f64> {
    let steps = (n.max(2) - 1).max((t / max_step).ceil() as usize);
    let h = t / steps as f64;
    let base: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { t } else { t * i as f64 / steps as f64 })
        .collect();
    let r: Vec<f64> = base
        .iter()
        .map(|&s| pole_distance(&multiply(start, &exp_map(cov, s))))
        .collect();
    let mut times = Vec::with_capacity(base.len());
    for i in 0..steps {
        // the projected curve has speed at most 1, so r drops by at most h
        let r_lo = (r[i].min(r[i + 1]) - h).max(POLE_REFINE_FLOOR);
        let local = max_step * (r_lo / POLE_REFINE).min(1.0).powf(1.5);
        let pieces = ((h / local).ceil() as usize).max(1);
        for m in 0..pieces {
            times.push(base[i] + (base[i + 1] - base[i]) * m as f64 / pieces as f64);
        }
    }
    times.push(t);
    for &s in cusps {
        let i = times.partition_point(|&x| x < s);
        let (lo, hi) = (times[i - 1], times[i]);
        let spacing = hi - lo;
        if hi < t && hi - s < 0.25 * spacing {
            times[i] = s;
        } else if lo > 0.0 && s - lo < 0.25 * spacing {
            times[i - 1] = s;
        } else {
            times.insert(i, s);
        }
    }
    times
}

/// Shortest curve from `from` to `to`, sampled in arclength.
pub fn plan_with(from: &SpherePose, to: &SpherePose, opts: &PlanOptions) -> Result<PlanResult> {
    if !(opts.cusp_tol > 0.0 && opts.max_step > 0.0) {
        return Err(Error::InvalidInput("plan tolerances must be positive".into()));
    }
    let start = from.element(0.0);
    let start_inv = inverse(&start);

    // (k, covector, t) for every minimizer to every target representative
    let mut candidates: Vec<(usize, Covector, f64)> = Vec::new();
    for k in 0..4 {
        let w = multiply(&start_inv, &to.element(k as f64 * PI));
        if w.chord(&GroupElement::IDENTITY) < IDENTITY_EPS {
            candidates.push((k, Covector::new(0.0, 0.0), 0.0));
            continue;
        }
        for sol in solve_geodesic(&w)? {
            candidates.push((k, sol.cov, sol.t));
        }
    }
    let best = candidates
        .iter()
        .map(|c| c.2)
        .fold(f64::INFINITY, f64::min);
    let solutions_found = candidates.iter().filter(|c| c.2 - best <= TIE_EPS).count();
    let &(chosen_rep, cov, length) = candidates
        .iter()
        .find(|c| c.2 - best <= TIE_EPS)
        .ok_or_else(|| Error::SolverFailure("no candidate geodesic".into()))?;

    if length == 0.0 {
        let sample = build_samples(&start, &cov, &[0.0], opts.cusp_tol).remove(0);
        return Ok(PlanResult {
            samples: vec![sample],
            length,
            solutions_found,
            chosen_rep,
            cusps: Vec::new(),
            start,
            cov,
        });
    }
    let cusps = cusp_times(&cov, length);
    let times = sample_times(&start, &cov, length, opts.samples, opts.max_step, &cusps);
    let samples = build_samples(&start, &cov, &times, opts.cusp_tol);
    Ok(PlanResult {
        samples,
        length,
        solutions_found,
        chosen_rep,
        cusps,
        start,
        cov,
    })
}

fn build_samples(start: &GroupElement, cov: &Covector, times: &[f64], cusp_tol: f64) -> Vec<PlanSample> {
    let elements: Vec<GroupElement> = times
        .iter()
        .map(|&s| multiply(start, &exp_map(cov, s)))
        .collect();
    let coords: Vec<AbcCoords> = elements.iter().map(to_abc).collect();
    // xi = -c is well defined mod 2 pi, since (b, c) ~ (b + 2pi, c + 2pi)
    let xi_raw: Vec<f64> = coords.iter().map(|x| -x.c).collect();
    let xi_lift = unwrap(&xi_raw, TAU);
    let b_raw: Vec<f64> = coords.iter().map(|x| x.b).collect();
    let b_lift = unwrap(&b_raw, TAU);
    times
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let (u1, body_u2) = body_controls(cov, s);
            let x = coords[i];
            let pose = SpherePose {
                a: x.a,
                b: x.b,
                xi: wrap_positive(xi_lift[i], PI),
            };
            PlanSample {
                s,
                pose,
                xi_lift: xi_lift[i],
                b_lift: b_lift[i],
                u1,
                u2: -body_u2,
                cusp: u1.abs() < cusp_tol,
                at_pole: pose.at_pole(),
                g: elements[i],
            }
        })
        .collect()
}

/// Derivatives of `f` at the sample arclengths: three-point formulas on the
/// non-uniform grid, one-sided at the ends.
fn derivative(s: &[f64], f: &[f64]) -> Vec<f64> {
    let n = s.len();
    let three = |x: [f64; 3], y: [f64; 3], at: usize| {
        // derivative of the interpolating parabola at x[at]
        let mut d = 0.0;
        for j in 0..3 {
            let mut num = 0.0;
            let mut den = 1.0;
            for m in 0..3 {
                if m == j {
                    continue;
                }
                den *= x[j] - x[m];
                let mut prod = 1.0;
                for q in 0..3 {
                    if q != j && q != m {
                        prod *= x[at] - x[q];
                    }
                }
                num += prod;
            }
            d += y[j] * num / den;
        }
        d
    };
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1).min(n - 3);
            let x = [s[lo], s[lo + 1], s[lo + 2]];
            let y = [f[lo], f[lo + 1], f[lo + 2]];
            three(x, y, i - lo)
        })
        .collect()
}

fn check_track(samples: &[PlanSample]) -> Result<()> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 samples".into()));
    }
    if let Some(index) = samples.iter().position(|p| p.at_pole) {
        return Err(Error::DegenerateSegment {
            index,
            a: samples[index].pose.a,
        });
    }
    Ok(())
}

/// `int sqrt(a'^2 + sin(a)^2 b'^2 + (cos(a) b' + xi')^2) ds`, the length plus
/// curvature cost of the projected curve, by finite differences and the
/// trapezoid rule.
pub fn evaluate_cost(samples: &[PlanSample]) -> Result<f64> {
    check_track(samples)?;
    let s: Vec<f64> = samples.iter().map(|p| p.s).collect();
    let a: Vec<f64> = samples.iter().map(|p| p.pose.a).collect();
    let b: Vec<f64> = samples.iter().map(|p| p.b_lift).collect();
    let xi: Vec<f64> = samples.iter().map(|p| p.xi_lift).collect();
    let (da, db, dxi) = (derivative(&s, &a), derivative(&s, &b), derivative(&s, &xi));
    let integrand: Vec<f64> = (0..s.len())
        .map(|i| {
            let (sa, ca) = a[i].sin_cos();
            let k = ca * db[i] + dxi[i];
            (da[i] * da[i] + sa * sa * db[i] * db[i] + k * k).sqrt()
        })
        .collect();
    Ok(s.windows(2)
        .zip(integrand.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum())
}

/// Largest `|xi' + u1 cot(a) sin(xi) - u2|` over samples away from the poles.
pub fn horizontality_check(samples: &[PlanSample]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidInput("need at least 3 samples".into()));
    }
    let s: Vec<f64> = samples.iter().map(|p| p.s).collect();
    let xi: Vec<f64> = samples.iter().map(|p| p.xi_lift).collect();
    let dxi = derivative(&s, &xi);
    Ok(samples
        .iter()
        .zip(&dxi)
        .filter(|(p, _)| !p.at_pole)
        .map(|(p, d)| {
            let (sa, ca) = p.pose.a.sin_cos();
            (d + p.u1 * ca / sa * p.xi_lift.sin() - p.u2).abs()
        })
        .fold(0.0, f64::max))
}
