//! Arclength geodesics from the identity.
//!
//! With the initial covector `lambda = cos(theta) p1 + sin(theta) p2 + c k`,
//! the geodesic is `g(t) = e^{lambda t} e^{-c k t}`. Its body velocity
//! `g^{-1} g'` is `cos(theta + c t) p1 + sin(theta + c t) p2`, so the curve is
//! horizontal and has unit speed. Optimality is lost at `t = 2 pi / sqrt(1 + c^2)`,
//! where the curve meets the one-parameter subgroup `e^{s k}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::su2::{inverse, raw_product, AlgebraVector, GroupElement};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector {
    pub theta: f64,
    pub c: f64,
}

impl Covector {
    pub const fn new(theta: f64, c: f64) -> Self {
        Self { theta, c }
    }

    /// `cos(theta) p1 + sin(theta) p2 + c k`.
    pub fn to_algebra(&self) -> AlgebraVector {
        AlgebraVector::new(self.theta.cos(), self.theta.sin(), self.c)
    }

    /// `sqrt(1 + c^2)`
    pub fn frequency(&self) -> f64 {
        self.c.hypot(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub t: f64,
    pub g: GroupElement,
    pub u1: f64,
    pub u2: f64,
}

/// Closed-form `Exp(theta, c, t)`.
///
/// `alpha = e^{-i c t/2} (cos(w t/2) + i (c/w) sin(w t/2))` and
/// `beta = (sin(w t/2) / w) e^{i (c t/2 + theta)}` with `w = sqrt(1 + c^2)`.
pub fn exp_map(cov: &Covector, t: f64) -> GroupElement {
    let c = cov.c;
    let w = cov.frequency();
    let (sin_ct, cos_ct) = (0.5 * c * t).sin_cos();
    let (sin_wt, cos_wt) = (0.5 * w * t).sin_cos();
    let ratio = c / w;
    let amp = sin_wt / w;
    let alpha = Complex64::new(
        ratio * sin_ct * sin_wt + cos_ct * cos_wt,
        ratio * cos_ct * sin_wt - sin_ct * cos_wt,
    );
    let (sin_ph, cos_ph) = (0.5 * c * t + cov.theta).sin_cos();
    let beta = Complex64::new(amp * cos_ph, amp * sin_ph);
    GroupElement::new(alpha, beta)
}

/// Body-frame controls `(u1, u2) = (cos(theta + c t), sin(theta + c t))`.
pub fn body_controls(cov: &Covector, t: f64) -> (f64, f64) {
    let (s, c) = (cov.theta + cov.c * t).sin_cos();
    (c, s)
}

/// `g^{-1} g'` at `t` from central differences of [`exp_map`].
pub fn body_velocity_fd(cov: &Covector, t: f64, h: f64) -> AlgebraVector {
    let g = exp_map(cov, t);
    let fwd = exp_map(cov, t + h);
    let back = exp_map(cov, t - h);
    let inv_2h = 0.5 / h;
    let deriv = GroupElement::new(
        (fwd.alpha - back.alpha) * inv_2h,
        (fwd.beta - back.beta) * inv_2h,
    );
    // g^{-1} g' has the matrix form [[i mk/2, (m1 + i m2)/2], ...]
    let x = raw_product(&inverse(&g), &deriv);
    AlgebraVector::new(2.0 * x.beta.re, 2.0 * x.beta.im, 2.0 * x.alpha.im)
}

/// `n` samples at uniform arclength on `[0, t_max]`.
pub fn sample_geodesic(cov: &Covector, t_max: f64, n: usize) -> Vec<GeodesicSample> {
    let steps = n.max(2) - 1;
    (0..=steps)
        .map(|i| {
            let t = if i == steps {
                t_max
            } else {
                t_max * i as f64 / steps as f64
            };
            let (u1, u2) = body_controls(cov, t);
            GeodesicSample {
                t,
                g: exp_map(cov, t),
                u1,
                u2,
            }
        })
        .collect()
}

/// `2 pi / sqrt(1 + c^2)`.
pub fn cut_time(cov: &Covector) -> f64 {
    TAU / cov.frequency()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{algebra_exp, multiply};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// `e^{(A_k + A_p) t} e^{-A_k t}` composed from two algebra exponentials.
    fn two_exponentials(cov: &Covector, t: f64) -> GroupElement {
        let first = algebra_exp(&cov.to_algebra().scale(t));
        let second = algebra_exp(&AlgebraVector::k(-cov.c * t));
        multiply(&first, &second)
    }

    #[test]
    fn starts_at_identity() {
        for &(theta, c) in &[(0.0, 0.0), (1.0, 2.0), (5.0, -3.0)] {
            let g = exp_map(&Covector::new(theta, c), 0.0);
            assert!(g.approx_eq(&GroupElement::IDENTITY, 0.0));
        }
    }

    #[test]
    fn zero_c_collapses() {
        for &(theta, t) in &[(0.3, 1.0), (2.0, 4.0), (-1.0, 6.0)] {
            let g = exp_map(&Covector::new(theta, 0.0), t);
            let beta = Complex64::from_polar((t / 2.0).sin(), theta);
            assert!((g.alpha - Complex64::new((t / 2.0).cos(), 0.0)).norm() < 1e-15);
            assert!((g.beta - beta).norm() < 1e-15);
        }
    }

    #[test]
    fn arrives_on_vertical_subgroup_at_cut_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let cov = Covector::new(rng.gen_range(0.0..TAU), rng.gen_range(-5.0..5.0));
            let w = cov.frequency();
            let t = cut_time(&cov);
            assert!((t - TAU / w).abs() < 1e-15);
            let g = exp_map(&cov, t);
            assert!(g.beta.norm() < 1e-10);
            let want = -Complex64::from_polar(1.0, -cov.c * PI / w);
            assert!((g.alpha - want).norm() < 1e-12);
        }
    }

    #[test]
    fn cut_time_examples() {
        assert_eq!(cut_time(&Covector::new(0.0, 0.0)), TAU);
        assert!((cut_time(&Covector::new(1.0, 3.0_f64.sqrt())) - PI).abs() < 1e-15);
    }

    #[test]
    fn matches_two_exponential_product_on_grid() {
        let mut count = 0;
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..4 {
                    let cov = Covector::new(TAU * i as f64 / 5.0, -5.0 + 10.0 * j as f64 / 4.0);
                    let t = TAU * k as f64 / 3.0;
                    let g = exp_map(&cov, t);
                    assert!(g.approx_eq(&two_exponentials(&cov, t), 1e-10), "{cov:?} t={t}");
                    count += 1;
                }
            }
        }
        assert_eq!(count, 100);
    }

    #[test]
    fn midpoint_sample_with_constant_controls() {
        let cov = Covector::new(0.0, 0.0);
        let s = sample_geodesic(&cov, PI, 3);
        assert_eq!(s.len(), 3);
        assert!((s[1].t - PI / 2.0).abs() < 1e-15);
        assert!(s[1].g.approx_eq(&exp_map(&cov, PI / 2.0), 0.0));
        assert!((s[1].u1 - 1.0).abs() < 1e-15 && s[1].u2.abs() < 1e-15);
        assert_eq!(s[2].t, PI);
    }

    #[test]
    fn finite_difference_body_velocity_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let cov = Covector::new(rng.gen_range(0.0..TAU), rng.gen_range(-5.0..5.0));
            for s in sample_geodesic(&cov, 4.0, 9) {
                let v = body_velocity_fd(&cov, s.t, 1e-5);
                assert!((v.m1 - s.u1).abs() < 1e-6, "{cov:?} {s:?} {v:?}");
                assert!((v.m2 - s.u2).abs() < 1e-6);
                // horizontal: no k component
                assert!(v.mk.abs() < 1e-6);
                assert!((s.u1 * s.u1 + s.u2 * s.u2 - 1.0).abs() < 1e-10);
            }
        }
    }
}
