//! Sampling the cut locus of `[Id]` in L(4,1).
//!
//! Distances to `[Id]` from a class `[g]` are `min_m d(x_m, g)` over the four
//! representatives `x_m = e^{m pi p2}` of `[Id]`. The cut locus splits into
//! `Kloc`, the classes of the vertical subgroup `e^{s k}` (minus `[Id]`), and
//! `Ksym`, where two different `x_m` are both closest.
//!
//! `Ksym` is found as an isosurface: the grid is swept in `(a, b, c)` without
//! canonicalizing, so every `d_m` is continuous on the box, and each edge
//! whose endpoints have different closest representatives is searched for the
//! zero of `d_i - d_j`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::distance_from_id;
use crate::error::{Error, Result};
use crate::lens::{canonicalize, quarter_turn, LensPoint};
use crate::su2::{from_abc, multiply, to_abc, AbcCoords, GroupElement};

pub const DEFAULT_TIE_TOL: f64 = 1e-3;
/// Violation threshold of the `Re beta = 0` containment audit.
pub const CONTAINMENT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutGrid {
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
}

impl Default for CutGrid {
    fn default() -> Self {
        Self::cube(64)
    }
}

impl CutGrid {
    pub const fn cube(n: usize) -> Self {
        Self { n_a: n, n_b: n, n_c: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_a < 2 || self.n_b < 2 || self.n_c < 2 {
            return Err(Error::InvalidInput("cut-locus grid counts must be >= 2".into()));
        }
        Ok(())
    }

    // a is cell-centred so no vertex sits on a chart pole; b and c include
    // their upper ends so edges across the seams are swept too
    fn vertex(&self, i: usize, j: usize, l: usize) -> [f64; 3] {
        [
            PI * (i as f64 + 0.5) / self.n_a as f64,
            TAU * j as f64 / self.n_b as f64,
            PI * l as f64 / self.n_c as f64,
        ]
    }

    fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * (self.n_b + 1) + j) * (self.n_c + 1) + l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    Kloc,
    Ksym,
}

impl Stratum {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stratum::Kloc => "kloc",
            Stratum::Ksym => "ksym",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutSample {
    pub point: LensPoint,
    pub stratum: Stratum,
    /// Indices `m` of the two closest `x_m`, measured from `point.rep`.
    pub witness_pair: [usize; 2],
    /// Second smallest minus smallest of the four distances.
    pub gap: f64,
}

/// `d(x_m, g)` for `m = 0..3`.
pub fn id_class_distances(g: &GroupElement) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (m, d) in out.iter_mut().enumerate() {
        // x_m^{-1} = x_{-m}
        *d = distance_from_id(&multiply(&quarter_turn(4 - m), g))?;
    }
    Ok(out)
}

/// Indices of the smallest and second smallest entries (ties by index).
fn two_smallest(d: &[f64; 4]) -> (usize, usize) {
    let mut order = [0, 1, 2, 3];
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]).then(x.cmp(&y)));
    (order[0], order[1])
}

fn sample_at(g: &GroupElement, stratum: Stratum) -> Result<CutSample> {
    let point = canonicalize(g);
    let d = id_class_distances(&point.rep)?;
    let (i, j) = two_smallest(&d);
    Ok(CutSample {
        point,
        stratum,
        witness_pair: [i, j],
        gap: d[j] - d[i],
    })
}

/// `Kloc`: the classes `[e^{s k}]`, `s in (0, 2 pi)`, at `n` uniform values.
/// `e^{(s + 2 pi) k} = -e^{s k}` lies in the same class, so this covers the
/// stratum once.
pub fn sample_kloc(n: usize) -> Result<Vec<CutSample>> {
    (1..=n)
        .into_par_iter()
        .map(|m| {
            let s = TAU * m as f64 / (n + 1) as f64;
            let (sin, cos) = (0.5 * s).sin_cos();
            sample_at(&GroupElement::from_parts(cos, sin, 0.0, 0.0), Stratum::Kloc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Vertex {
    d: [f64; 4],
    first: usize,
    second: usize,
}

fn lerp(p: &[f64; 3], q: &[f64; 3], s: f64) -> [f64; 3] {
    [
        p[0] + s * (q[0] - p[0]),
        p[1] + s * (q[1] - p[1]),
        p[2] + s * (q[2] - p[2]),
    ]
}

fn element(x: &[f64; 3]) -> GroupElement {
    from_abc(&AbcCoords::new(x[0], x[1], x[2]))
}

/// Zero of `d_i - d_j` on the segment `p -> q` by the Illinois variant of
/// regula falsi; `f(p) < 0 < f(q)` is assumed.
fn edge_root(p: &[f64; 3], q: &[f64; 3], i: usize, j: usize, f_p: f64, f_q: f64) -> Result<[f64; 3]> {
    let f = |s: f64| -> Result<f64> {
        let d = id_class_distances(&element(&lerp(p, q, s)))?;
        Ok(d[i] - d[j])
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (mut f_lo, mut f_hi) = (f_p, f_q);
    let mut side = 0i8;
    for _ in 0..100 {
        let s = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let s = if s > lo && s < hi { s } else { 0.5 * (lo + hi) };
        let v = f(s)?;
        if v.abs() < 1e-14 || hi - lo < 1e-15 {
            return Ok(lerp(p, q, s));
        }
        if v < 0.0 {
            lo = s;
            f_lo = v;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            f_hi = v;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(lerp(p, q, 0.5 * (lo + hi)))
}

/// `Ksym` samples on the grid. Every edge along which the closest
/// representative changes contributes the refined point where the two
/// distances agree; vertices already tied within `tie_tol` but not touching
/// such an edge are emitted as they are.
pub fn sample_ksym(grid: &CutGrid, tie_tol: f64) -> Result<Vec<CutSample>> {
    grid.validate()?;
    if !(tie_tol > 0.0) {
        return Err(Error::InvalidInput("tie tolerance must be positive".into()));
    }
    let (na, nb, nc) = (grid.n_a, grid.n_b, grid.n_c);
    let coords: Vec<(usize, usize, usize)> = (0..na)
        .flat_map(|i| (0..=nb).flat_map(move |j| (0..=nc).map(move |l| (i, j, l))))
        .collect();
    let vertices: Vec<Vertex> = coords
        .par_iter()
        .map(|&(i, j, l)| {
            let d = id_class_distances(&element(&grid.vertex(i, j, l)))?;
            let (first, second) = two_smallest(&d);
            Ok(Vertex { d, first, second })
        })
        .collect::<Result<_>>()?;

    // the b = 2 pi and c = pi layers repeat classes of the opposite faces, so
    // edges lying inside them and their vertices are skipped
    let owned: Vec<(usize, usize, usize)> = coords
        .into_iter()
        .filter(|&(_, j, l)| j < nb && l < nc)
        .collect();
    let per_vertex: Vec<Vec<CutSample>> = owned
        .par_iter()
        .map(|&(i, j, l)| {
            let v = vertices[grid.index(i, j, l)];
            let here = grid.vertex(i, j, l);
            let mut out = Vec::new();
            let neighbours = [
                (i + 1 < na).then(|| (i + 1, j, l)),
                Some((i, j + 1, l)),
                Some((i, j, l + 1)),
            ];
            for (ni, nj, nl) in neighbours.into_iter().flatten() {
                let w = vertices[grid.index(ni, nj, nl)];
                if w.first == v.first {
                    continue;
                }
                let (a, b) = (v.first, w.first);
                let there = grid.vertex(ni, nj, nl);
                let x = edge_root(&here, &there, a, b, v.d[a] - v.d[b], w.d[a] - w.d[b])?;
                let s = sample_at(&element(&x), Stratum::Ksym)?;
                if s.gap <= tie_tol {
                    out.push(s);
                }
            }
            let touches_crossing = [
                (i > 0).then(|| (i - 1, j, l)),
                (i + 1 < na).then(|| (i + 1, j, l)),
                (j > 0).then(|| (i, j - 1, l)),
                Some((i, j + 1, l)),
                (l > 0).then(|| (i, j, l - 1)),
                Some((i, j, l + 1)),
            ]
            .into_iter()
            .flatten()
            .any(|(ni, nj, nl)| vertices[grid.index(ni, nj, nl)].first != v.first);
            if !touches_crossing && v.d[v.second] - v.d[v.first] <= tie_tol {
                out.push(sample_at(&element(&here), Stratum::Ksym)?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_vertex.into_iter().flatten().collect())
}

/// `Kloc` with `2 n_c` samples followed by `Ksym` on the grid.
pub fn sample_cut_locus(grid: &CutGrid, tie_tol: f64) -> Result<Vec<CutSample>> {
    grid.validate()?;
    let mut out = sample_kloc(2 * grid.n_c)?;
    out.extend(sample_ksym(grid, tie_tol)?);
    Ok(out)
}

/// Whether the class contains an element of `e^{s k}`.
pub fn in_vertical_class(p: &LensPoint, tol: f64) -> bool {
    // the class of (alpha, 0) also holds (0, i alpha)
    p.rep.alpha.norm().min(p.rep.beta.norm()) <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TieAudit {
    /// `|d_i - d_j|` for the sample's witnesses after local refinement.
    pub refined_gap: f64,
    /// Chart distance travelled by the refinement.
    pub moved: f64,
    /// Whether the witnesses are still the two closest representatives.
    pub still_closest: bool,
}

/// Re-evaluates a `Ksym` sample from scratch and pushes it onto the
/// equidistance surface by Newton steps along the gradient of `d_i - d_j`.
pub fn refine_tie(sample: &CutSample) -> Result<TieAudit> {
    let [i, j] = sample.witness_pair;
    // chart of the representative itself; the stored abc has c reduced mod pi
    let rep_abc = to_abc(&sample.point.rep);
    let offset = [rep_abc.a, rep_abc.b, rep_abc.c];
    let f = |x: &[f64; 3]| -> Result<f64> {
        let d = id_class_distances(&element(x))?;
        Ok(d[i] - d[j])
    };
    let mut x = offset;
    let mut v = f(&x)?;
    let h = 1e-6;
    for _ in 0..20 {
        if v.abs() < 1e-13 {
            break;
        }
        let mut grad = [0.0; 3];
        for (axis, gk) in grad.iter_mut().enumerate() {
            let (mut up, mut down) = (x, x);
            up[axis] += h;
            down[axis] -= h;
            *gk = (f(&up)? - f(&down)?) / (2.0 * h);
        }
        let norm_sq: f64 = grad.iter().map(|g| g * g).sum();
        if norm_sq < 1e-24 {
            break;
        }
        let trial: [f64; 3] = std::array::from_fn(|k| x[k] - v * grad[k] / norm_sq);
        let tv = f(&trial)?;
        if !(tv.abs() < v.abs()) {
            break;
        }
        x = trial;
        v = tv;
    }
    let d = id_class_distances(&element(&x))?;
    let nearest = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let moved = ((x[0] - offset[0]).powi(2) + (x[1] - offset[1]).powi(2) + (x[2] - offset[2]).powi(2)).sqrt();
    Ok(TieAudit {
        refined_gap: v.abs(),
        moved,
        still_closest: d[i].max(d[j]) - nearest <= 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContainmentAudit {
    /// `Ksym` samples whose witnesses are antipodal, `{x_m, -x_m}`.
    pub antipodal_samples: usize,
    /// Fraction with `|Re beta| > CONTAINMENT_TOL` for the representative
    /// `rep e^{k pi p2}`, indexed by `k`.
    pub per_representative: [f64; 4],
    /// The same fraction for the representative whose witnesses are `{Id, -Id}`.
    pub aligned: f64,
}

/// How far antipodal-witness `Ksym` samples stray from `{Re beta = 0}`.
/// Reported only; which representative the condition refers to is not fixed.
pub fn containment_audit(samples: &[CutSample]) -> ContainmentAudit {
    let antipodal: Vec<&CutSample> = samples
        .iter()
        .filter(|s| s.stratum == Stratum::Ksym)
        .filter(|s| (s.witness_pair[0] + 2) % 4 == s.witness_pair[1])
        .collect();
    let n = antipodal.len();
    let fraction = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let mut per_rep = [0usize; 4];
    let mut aligned = 0usize;
    for s in &antipodal {
        for (k, count) in per_rep.iter_mut().enumerate() {
            let g = multiply(&s.point.rep, &quarter_turn(k));
            if g.beta.re.abs() > CONTAINMENT_TOL {
                *count += 1;
            }
        }
        // d_m(g x_k) = d_{m-k}(g), so x_{-m} moves witness m to Id
        let g = multiply(&s.point.rep, &quarter_turn(4 - s.witness_pair[0]));
        if g.beta.re.abs() > CONTAINMENT_TOL {
            aligned += 1;
        }
    }
    ContainmentAudit {
        antipodal_samples: n,
        per_representative: per_rep.map(fraction),
        aligned: fraction(aligned),
    }
}

/// Fraction of `Ksym` samples whose class is also in `Kloc` within `tol`.
pub fn stratum_overlap(samples: &[CutSample], tol: f64) -> f64 {
    let sym: Vec<&CutSample> = samples.iter().filter(|s| s.stratum == Stratum::Ksym).collect();
    if sym.is_empty() {
        return 0.0;
    }
    let both = sym.iter().filter(|s| in_vertical_class(&s.point, tol)).count();
    both as f64 / sym.len() as f64
}
