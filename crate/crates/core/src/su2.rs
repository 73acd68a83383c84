//! SU(2) as pairs (alpha, beta) of complex numbers.
//!
//! The element `(alpha, beta)` stands for the unitary matrix
//!
//! ```text
//!   |  alpha      beta     |
//!   | -conj(beta) conj(alpha) |
//! ```
//!
//! with `|alpha|^2 + |beta|^2 = 1`. The same pair is a point of the unit
//! sphere S^3 in C^2. The Lie algebra su(2) is spanned by
//!
//! ```text
//!   p1 = 1/2 [[0, 1], [-1, 0]],  p2 = 1/2 [[0, i], [i, 0]],  k = 1/2 [[i, 0], [0, -i]]
//! ```
//!
//! with `[p1, p2] = k`, `[p2, k] = p1`, `[k, p1] = p2`.

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_positive;
use crate::error::{Error, Result};

/// Drift above which `multiply` renormalizes its output.
pub const RENORM_DRIFT: f64 = 1e-9;
/// Drift above which `try_multiply` refuses its inputs.
pub const MAX_DRIFT: f64 = 1e-6;
/// Distance from the chart poles a = 0, a = pi below which (b, c) are not separable.
pub const CHART_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl GroupElement {
    pub const IDENTITY: Self = Self {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
    };

    /// Builds an element without touching the norm.
    pub const fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    pub fn from_parts(alpha_re: f64, alpha_im: f64, beta_re: f64, beta_im: f64) -> Self {
        Self::new(
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(beta_re, beta_im),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// `| |alpha|^2 + |beta|^2 - 1 |`.
    pub fn drift(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.alpha / n, self.beta / n)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.alpha, -self.beta)
    }

    /// Euclidean distance of the two points of S^3 in C^2.
    pub fn chord(&self, other: &Self) -> f64 {
        ((self.alpha - other.alpha).norm_sqr() + (self.beta - other.beta).norm_sqr()).sqrt()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.chord(other) <= tol
    }

    /// Components as `[Re alpha, Im alpha, Re beta, Im beta]`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
    }

    /// Uniformly distributed on S^3.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if (1e-6..=1.0).contains(&n2) {
                let n = n2.sqrt();
                return Self::from_parts(v[0] / n, v[1] / n, v[2] / n, v[3] / n);
            }
        }
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        multiply(&self, &rhs)
    }
}

pub(crate) fn raw_product(g: &GroupElement, h: &GroupElement) -> GroupElement {
    GroupElement::new(
        g.alpha * h.alpha - g.beta * h.beta.conj(),
        g.alpha * h.beta + g.beta * h.alpha.conj(),
    )
}

/// Group product `g * h`; the result is renormalized if it drifts by more
/// than [`RENORM_DRIFT`].
pub fn multiply(g: &GroupElement, h: &GroupElement) -> GroupElement {
    let p = raw_product(g, h);
    if p.drift() > RENORM_DRIFT {
        p.normalized()
    } else {
        p
    }
}

/// Like [`multiply`], but reports inputs that are off the group by more than
/// [`MAX_DRIFT`].
pub fn try_multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    let drift = g.drift().max(h.drift());
    if drift > MAX_DRIFT {
        return Err(Error::NormDrift { drift });
    }
    Ok(multiply(g, h))
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    GroupElement::new(g.alpha.conj(), -g.beta)
}

/// Running product that renormalizes every 16 factors, or earlier when the
/// drift exceeds [`RENORM_DRIFT`].
#[derive(Debug, Clone, Copy)]
pub struct ProductChain {
    value: GroupElement,
    since_renorm: u32,
}

impl ProductChain {
    const RENORM_EVERY: u32 = 16;

    pub fn new(start: GroupElement) -> Self {
        Self {
            value: start,
            since_renorm: 0,
        }
    }

    pub fn push(&mut self, h: &GroupElement) -> GroupElement {
        self.value = raw_product(&self.value, h);
        self.since_renorm += 1;
        if self.since_renorm >= Self::RENORM_EVERY || self.value.drift() > RENORM_DRIFT {
            self.value = self.value.normalized();
            self.since_renorm = 0;
        }
        self.value
    }

    pub fn value(&self) -> GroupElement {
        self.value
    }
}

/// Coefficients of `m1 p1 + m2 p2 + mk k`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraVector {
    pub m1: f64,
    pub m2: f64,
    pub mk: f64,
}

impl AlgebraVector {
    pub const fn new(m1: f64, m2: f64, mk: f64) -> Self {
        Self { m1, m2, mk }
    }

    pub const fn p1(s: f64) -> Self {
        Self::new(s, 0.0, 0.0)
    }

    pub const fn p2(s: f64) -> Self {
        Self::new(0.0, s, 0.0)
    }

    pub const fn k(s: f64) -> Self {
        Self::new(0.0, 0.0, s)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.m1 * s, self.m2 * s, self.mk * s)
    }

    pub fn norm(&self) -> f64 {
        (self.m1 * self.m1 + self.m2 * self.m2 + self.mk * self.mk).sqrt()
    }
}

impl std::ops::Neg for AlgebraVector {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// `sin(x / 2) / x`, finite at `x = 0`.
pub(crate) fn half_sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        0.5 - x2 / 48.0 + x2 * x2 / 3840.0
    } else {
        (0.5 * x).sin() / x
    }
}

/// Matrix exponential of `m1 p1 + m2 p2 + mk k`:
/// `cos(r/2) Id + (sin(r/2)/r) * 2v`, with `r` the coefficient norm.
pub fn algebra_exp(v: &AlgebraVector) -> GroupElement {
    let r = v.norm();
    let s = half_sinc(r);
    GroupElement::new(
        Complex64::new((0.5 * r).cos(), s * v.mk),
        Complex64::new(s * v.m1, s * v.m2),
    )
}

/// Coordinates with `g = e^{-b p2} e^{a p1} e^{c p2}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AbcCoords {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AbcCoords {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a < CHART_EPS || PI - self.a < CHART_EPS
    }
}

/// Reads (a, b, c) off `g`, using b = 0 at the chart poles.
///
/// The component formulas are
/// `alpha = cos(a/2) cos((c-b)/2) + i sin(a/2) sin((c+b)/2)` and
/// `beta = sin(a/2) cos((c+b)/2) + i cos(a/2) sin((c-b)/2)`.
/// Output ranges: `a` in [0, pi], `b` in [0, 2pi), `c` in [0, 4pi).
pub fn to_abc(g: &GroupElement) -> AbcCoords {
    let (re_a, im_a, re_b, im_b) = (g.alpha.re, g.alpha.im, g.beta.re, g.beta.im);
    let sin_half = im_a.hypot(re_b);
    let cos_half = re_a.hypot(im_b);
    let a = 2.0 * sin_half.atan2(cos_half);
    // half-sum (c+b)/2 and half-difference (c-b)/2
    let sum = im_a.atan2(re_b);
    let diff = im_b.atan2(re_a);

    if a < CHART_EPS {
        return AbcCoords::new(a, 0.0, wrap_positive(2.0 * diff, 2.0 * TAU));
    }
    if PI - a < CHART_EPS {
        return AbcCoords::new(a, 0.0, wrap_positive(2.0 * sum, 2.0 * TAU));
    }

    let mut b = sum - diff;
    let mut c = sum + diff;
    // (b, c) and (b + 2pi, c + 2pi) name the same element
    let shift = (b / TAU).floor() * TAU;
    b -= shift;
    c -= shift;
    if b >= TAU {
        b -= TAU;
        c -= TAU;
    }
    AbcCoords::new(a, b, wrap_positive(c, 2.0 * TAU))
}

/// [`to_abc`] that reports the chart poles as [`Error::DegenerateChart`].
pub fn to_abc_checked(g: &GroupElement) -> Result<AbcCoords> {
    let coords = to_abc(g);
    if coords.is_degenerate() {
        Err(Error::DegenerateChart { fallback: coords })
    } else {
        Ok(coords)
    }
}

/// `e^{-b p2} e^{a p1} e^{c p2}`.
pub fn from_abc(coords: &AbcCoords) -> GroupElement {
    let left = algebra_exp(&AlgebraVector::p2(-coords.b));
    let mid = algebra_exp(&AlgebraVector::p1(coords.a));
    let right = algebra_exp(&AlgebraVector::p2(coords.c));
    multiply(&multiply(&left, &mid), &right)
}

/// Hopf projection S^3 -> S^2 as a unit 3-vector.
pub fn hopf_project(g: &GroupElement) -> [f64; 3] {
    let (re_a, im_a, re_b, im_b) = (g.alpha.re, g.alpha.im, g.beta.re, g.beta.im);
    [
        2.0 * (re_a * re_b + im_a * im_b),
        2.0 * (re_a * im_a - re_b * im_b),
        re_a * re_a + im_b * im_b - re_b * re_b - im_a * im_a,
    ]
}

/// Point of S^2 at spherical coordinates (a, b): `(sin a cos b, sin a sin b, cos a)`.
pub fn sphere_point(a: f64, b: f64) -> [f64; 3] {
    [a.sin() * b.cos(), a.sin() * b.sin(), a.cos()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    type Mat = [[Complex64; 2]; 2];

    fn as_matrix(g: &GroupElement) -> Mat {
        [[g.alpha, g.beta], [-g.beta.conj(), g.alpha.conj()]]
    }

    fn matmul(x: &Mat, y: &Mat) -> Mat {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += x[i][k] * y[k][j];
                }
            }
        }
        out
    }

    fn basis_matrix(v: &AlgebraVector) -> Mat {
        // m1 p1 + m2 p2 + mk k written out entrywise
        [
            [c(0.0, 0.5 * v.mk), c(0.5 * v.m1, 0.5 * v.m2)],
            [c(-0.5 * v.m1, 0.5 * v.m2), c(0.0, -0.5 * v.mk)],
        ]
    }

    fn series_exp(v: &AlgebraVector) -> Mat {
        let x = basis_matrix(v);
        let mut term = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let mut sum = term;
        for n in 1..60 {
            term = matmul(&term, &x);
            for row in term.iter_mut() {
                for e in row.iter_mut() {
                    *e /= n as f64;
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += term[i][j];
                }
            }
        }
        sum
    }

    #[test]
    fn identity_and_inverse_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = GroupElement::random(&mut rng);
            assert!(multiply(&GroupElement::IDENTITY, &g).approx_eq(&g, 1e-15));
            assert!(multiply(&g, &inverse(&g)).approx_eq(&GroupElement::IDENTITY, 1e-12));
        }
        assert_eq!(inverse(&GroupElement::IDENTITY), GroupElement::IDENTITY);
        let diag = GroupElement::new(c(0.0, 1.0), c(0.0, 0.0));
        assert_eq!(inverse(&diag), GroupElement::new(c(0.0, -1.0), c(0.0, 0.0)));
    }

    #[test]
    fn product_matches_matrix_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let g = GroupElement::random(&mut rng);
            let h = GroupElement::random(&mut rng);
            let m = matmul(&as_matrix(&g), &as_matrix(&h));
            let p = multiply(&g, &h);
            assert!((m[0][0] - p.alpha).norm() < 1e-14);
            assert!((m[0][1] - p.beta).norm() < 1e-14);
            assert!((m[1][0] + p.beta.conj()).norm() < 1e-14);
            assert!((m[1][1] - p.alpha.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn multiply_renormalizes_and_try_multiply_signals() {
        let off = GroupElement::from_parts(1.0 + 1e-8, 0.0, 0.0, 0.0);
        let p = multiply(&off, &GroupElement::IDENTITY);
        assert!(p.drift() < 1e-15);
        let far = GroupElement::from_parts(1.0 + 1e-5, 0.0, 0.0, 0.0);
        assert!(matches!(
            try_multiply(&far, &GroupElement::IDENTITY),
            Err(Error::NormDrift { .. })
        ));
    }

    #[test]
    fn product_chain_stays_on_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let step = GroupElement::random(&mut rng);
        let mut chain = ProductChain::new(GroupElement::IDENTITY);
        for _ in 0..10_000 {
            chain.push(&step);
        }
        assert!(chain.value().drift() < 1e-13);
    }

    #[test]
    fn algebra_exp_closed_forms() {
        assert_eq!(algebra_exp(&AlgebraVector::default()), GroupElement::IDENTITY);
        let g = algebra_exp(&AlgebraVector::p2(PI));
        assert!(g.approx_eq(&GroupElement::from_parts(0.0, 0.0, 0.0, 1.0), 1e-15));
        for &s in &[0.3, -2.0, 5.5] {
            let g = algebra_exp(&AlgebraVector::k(s));
            let want = GroupElement::new(Complex64::from_polar(1.0, s / 2.0), c(0.0, 0.0));
            assert!(g.approx_eq(&want, 1e-15));
        }
    }

    #[test]
    fn algebra_exp_matches_power_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let v = AlgebraVector::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            );
            let m = series_exp(&v);
            let g = algebra_exp(&v);
            assert!((m[0][0] - g.alpha).norm() < 1e-12);
            assert!((m[0][1] - g.beta).norm() < 1e-12);
        }
        // tiny vectors go through the series branch of half_sinc
        let v = AlgebraVector::new(1e-6, -2e-6, 3e-7);
        let m = series_exp(&v);
        let g = algebra_exp(&v);
        assert!((m[0][1] - g.beta).norm() < 1e-18);
    }

    #[test]
    fn abc_examples() {
        let id = to_abc(&GroupElement::IDENTITY);
        assert_eq!(id, AbcCoords::new(0.0, 0.0, 0.0));
        assert!(matches!(
            to_abc_checked(&GroupElement::IDENTITY),
            Err(Error::DegenerateChart { .. })
        ));
        for &a0 in &[0.1, 1.0, 2.5, 3.1] {
            let g = algebra_exp(&AlgebraVector::p1(a0));
            let abc = to_abc(&g);
            assert!((abc.a - a0).abs() < 1e-14);
            assert!(abc.b.abs() < 1e-14);
            assert!(abc.c.abs() < 1e-14);
        }
        assert_eq!(from_abc(&AbcCoords::default()), GroupElement::IDENTITY);
        let g = from_abc(&AbcCoords::new(PI, 0.0, 0.0));
        assert!(g.approx_eq(&GroupElement::from_parts(0.0, 0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn from_abc_matches_component_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let (a, b, cc) = (
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..TAU),
                rng.gen_range(0.0..2.0 * TAU),
            );
            let g = from_abc(&AbcCoords::new(a, b, cc));
            let alpha = c(
                (a / 2.0).cos() * ((cc - b) / 2.0).cos(),
                (a / 2.0).sin() * ((cc + b) / 2.0).sin(),
            );
            let beta = c(
                (a / 2.0).sin() * ((cc + b) / 2.0).cos(),
                (a / 2.0).cos() * ((cc - b) / 2.0).sin(),
            );
            assert!((g.alpha - alpha).norm() < 1e-14);
            assert!((g.beta - beta).norm() < 1e-14);
        }
    }

    #[test]
    fn abc_round_trip_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let g = GroupElement::random(&mut rng);
            let abc = to_abc(&g);
            assert!((0.0..=PI).contains(&abc.a));
            assert!((0.0..TAU).contains(&abc.b));
            assert!((0.0..2.0 * TAU).contains(&abc.c));
            assert!(from_abc(&abc).approx_eq(&g, 1e-12));
            let again = to_abc(&from_abc(&abc));
            assert!((again.a - abc.a).abs() < 1e-10);
            assert!((again.b - abc.b).abs() < 1e-10);
            assert!((again.c - abc.c).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_chart_uses_b_zero() {
        // a = 0: only c - b matters
        let g = from_abc(&AbcCoords::new(0.0, 1.2, 3.0));
        let abc = to_abc(&g);
        assert_eq!(abc.b, 0.0);
        assert!((abc.c - 1.8).abs() < 1e-12);
        assert!(from_abc(&abc).approx_eq(&g, 1e-12));
        // a = pi: only c + b matters
        let g = from_abc(&AbcCoords::new(PI, 1.2, 3.0));
        let abc = to_abc(&g);
        assert_eq!(abc.b, 0.0);
        assert!((abc.c - 4.2).abs() < 1e-12);
        assert!(from_abc(&abc).approx_eq(&g, 1e-12));
    }

    #[test]
    fn hopf_examples() {
        assert_eq!(hopf_project(&GroupElement::IDENTITY), [0.0, 0.0, 1.0]);
        let y = hopf_project(&algebra_exp(&AlgebraVector::p1(PI / 2.0)));
        assert!((y[0] - 1.0).abs() < 1e-15 && y[1].abs() < 1e-15 && y[2].abs() < 1e-15);
    }

    #[test]
    fn hopf_component_formula_matches_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = GroupElement::random(&mut rng);
            let abc = to_abc(&g);
            let y = hopf_project(&g);
            let z = sphere_point(abc.a, abc.b);
            for i in 0..3 {
                assert!((y[i] - z[i]).abs() < 1e-10);
            }
            let n: f64 = y.iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
