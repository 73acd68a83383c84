//! The lens space L(4,1) as the quotient of SU(2) by `g ~ g e^{k pi p2}`,
//! `k = 0..3`.
//!
//! In (a, b, c) coordinates the relation reads `c1 = c2 mod pi`. Right
//! multiplication by `e^{pi p2}` preserves the horizontal distribution and
//! its metric, so the sub-Riemannian structure descends to the quotient and
//! `d([g], [h]) = min_k d(g, h e^{k pi p2})` for any representative `g`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_positive;
use crate::distance::distance;
use crate::error::{Error, Result};
use crate::su2::{multiply, to_abc, AbcCoords, GroupElement};

/// Tolerance for deciding that two elements coincide.
pub const SAME_POINT_TOL: f64 = 1e-9;
/// Largest chord between consecutive lifted samples.
pub const LIFT_STEP_BOUND: f64 = 0.5;

/// `e^{k pi p2}` for `k mod 4`: `Id, (0, i), -Id, (0, -i)`.
pub fn quarter_turn(k: usize) -> GroupElement {
    match k % 4 {
        0 => GroupElement::from_parts(1.0, 0.0, 0.0, 0.0),
        1 => GroupElement::from_parts(0.0, 0.0, 0.0, 1.0),
        2 => GroupElement::from_parts(-1.0, 0.0, 0.0, 0.0),
        _ => GroupElement::from_parts(0.0, 0.0, 0.0, -1.0),
    }
}

/// The four elements `g e^{k pi p2}` of the class of `g`, indexed by `k`.
pub fn translates(g: &GroupElement) -> [GroupElement; 4] {
    std::array::from_fn(|k| multiply(g, &quarter_turn(k)))
}

/// The class of the identity, `{Id, e^{pi p2}, -Id, -e^{pi p2}}`.
pub fn id_class_representatives() -> [GroupElement; 4] {
    std::array::from_fn(quarter_turn)
}

/// A point of L(4,1): one representative plus its (a, b, c mod pi) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensPoint {
    pub rep: GroupElement,
    pub abc: AbcCoords,
}

impl LensPoint {
    /// Builds the point from a representative, keeping that representative.
    pub fn from_rep(rep: GroupElement) -> Self {
        let abc = to_abc(&rep);
        Self {
            rep,
            abc: AbcCoords::new(abc.a, abc.b, wrap_positive(abc.c, PI)),
        }
    }

    pub fn representatives(&self) -> [GroupElement; 4] {
        translates(&self.rep)
    }

    /// Whether both points name the same class.
    pub fn same_class(&self, other: &LensPoint, tol: f64) -> bool {
        orbit_index(&self.rep, &other.rep, tol).is_some()
    }

    pub fn canonical(&self) -> LensPoint {
        canonicalize(&self.rep)
    }
}

/// The `k` with `g1 = g2 e^{k pi p2}`, if any.
pub fn orbit_index(g1: &GroupElement, g2: &GroupElement, tol: f64) -> Option<usize> {
    translates(g2)
        .iter()
        .position(|h| h.approx_eq(g1, tol))
}

/// Canonical point together with the shift `k` such that the stored
/// representative is `g e^{k pi p2}`.
pub fn canonicalize_with_shift(g: &GroupElement) -> (LensPoint, usize) {
    let c = to_abc(g).c;
    let m = c / PI;
    let r = m.round();
    // snap values sitting on a multiple of pi so the choice is idempotent
    let k0 = if (m - r).abs() < 1e-12 { r } else { m.floor() } as i64;
    let k = (4 - k0).rem_euclid(4) as usize;
    let rep = multiply(g, &quarter_turn(k));
    let abc = to_abc(&rep);
    let mut c_red = c - k0 as f64 * PI;
    if !(0.0..PI).contains(&c_red) {
        c_red = wrap_positive(c_red, PI);
        if c_red > PI - 1e-12 {
            c_red = 0.0;
        }
    }
    (
        LensPoint {
            rep,
            abc: AbcCoords::new(abc.a, abc.b, c_red),
        },
        k,
    )
}

/// Picks the translate whose c-coordinate lies in `[0, pi)`.
pub fn canonicalize(g: &GroupElement) -> LensPoint {
    canonicalize_with_shift(g).0
}

/// Quotient distance, measured from `g1`, which must lie in the class of `p`.
pub fn lens_distance_from(g1: &GroupElement, q: &LensPoint) -> Result<f64> {
    let mut best = f64::INFINITY;
    for h in q.representatives() {
        best = best.min(distance(g1, &h)?);
    }
    Ok(best)
}

pub fn lens_distance(p: &LensPoint, q: &LensPoint) -> Result<f64> {
    lens_distance_from(&p.rep, q)
}

fn nearest_translate(g: &GroupElement, target: &GroupElement) -> (GroupElement, f64) {
    translates(g)
        .into_iter()
        .map(|h| {
            let d = h.chord(target);
            (h, d)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("four translates")
}

/// Projects a sampled curve, tracking the representative continuously so the
/// c-coordinate does not jump at the `c = pi` seam.
pub fn project_curve(samples: &[GroupElement]) -> Vec<LensPoint> {
    let mut out: Vec<LensPoint> = Vec::with_capacity(samples.len());
    for g in samples {
        let rep = match out.last() {
            None => canonicalize(g).rep,
            Some(prev) => nearest_translate(g, &prev.rep).0,
        };
        out.push(LensPoint::from_rep(rep));
    }
    out
}

/// The continuous lift of a sampled curve starting at `start`.
pub fn lift_curve(samples: &[LensPoint], start: GroupElement) -> Result<Vec<GroupElement>> {
    let Some(first) = samples.first() else {
        return Ok(Vec::new());
    };
    if orbit_index(&start, &first.rep, SAME_POINT_TOL).is_none() {
        return Err(Error::InvalidInput(
            "lift start does not project to the first sample".into(),
        ));
    }
    let mut out = Vec::with_capacity(samples.len());
    out.push(start);
    for (index, p) in samples.iter().enumerate().skip(1) {
        let prev = out[index - 1];
        let (next, gap) = nearest_translate(&p.rep, &prev);
        if gap > LIFT_STEP_BOUND {
            return Err(Error::DiscontinuousInput { index, gap });
        }
        out.push(next);
    }
    Ok(out)
}

/// The isomorphism SU(2) -> S^3 under which the relation becomes the
/// standard L(4,1) action `(x1, x2) ~ (w x1, w x2)`, `w^4 = 1`.
pub fn s3_embedding(g: &GroupElement) -> (Complex64, Complex64) {
    let (a, b) = (g.alpha, g.beta);
    let x1 = (a + b) * FRAC_1_SQRT_2;
    let x2 = Complex64::new(a.re - b.re, b.im - a.im) * FRAC_1_SQRT_2;
    (x1, x2)
}

fn s3_related(g1: &GroupElement, g2: &GroupElement, tol: f64) -> bool {
    let (x1, x2) = s3_embedding(g1);
    let (y1, y2) = s3_embedding(g2);
    let roots = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    // q = 1: both coordinates rotate by the same root
    roots
        .iter()
        .any(|w| ((x1 - w * y1).norm_sqr() + (x2 - w * y2).norm_sqr()).sqrt() <= tol)
}

/// Whether `g1` and `g2` are in the same class. The orbit test is checked
/// against the S^3 lens relation; disagreement is an error.
pub fn lens_relation_check(g1: &GroupElement, g2: &GroupElement) -> Result<bool> {
    let orbit = orbit_index(g1, g2, SAME_POINT_TOL).is_some();
    let s3 = s3_related(g1, g2, SAME_POINT_TOL);
    if orbit != s3 {
        return Err(Error::RelationMismatch);
    }
    Ok(orbit)
}
