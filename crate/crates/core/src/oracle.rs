//! Brute-force distance oracle.
//!
//! Sweeps `Exp(theta, c, t)` over a dense grid, seeds a local least-squares
//! refinement from every grid local minimum of the mismatch `|Exp - g|`, and
//! returns the smallest arclength among refined hits. It never uses the
//! inverse solver in [`crate::distance`] or the cut time, so the two can be
//! cross-checked.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{exp_map, Covector};
use crate::su2::GroupElement;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub n_theta: usize,
    pub n_c: usize,
    pub n_t: usize,
    pub c_max: f64,
    pub t_max: f64,
    /// A refined candidate counts as reaching the target below this mismatch.
    pub eps_hit: f64,
    pub refine_iters: usize,
    /// Grid local minima above this mismatch are not refined.
    pub seed_radius: f64,
    pub max_seeds: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self {
            n_theta: 128,
            n_c: 129,
            n_t: 256,
            c_max: 20.0,
            t_max: TAU,
            eps_hit: 5e-3,
            refine_iters: 30,
            seed_radius: 0.5,
            max_seeds: 48,
        }
    }
}

impl OracleGrid {
    pub fn with_counts(n_theta: usize, n_c: usize, n_t: usize) -> Self {
        Self {
            n_theta,
            n_c,
            n_t,
            ..Self::default()
        }
    }

    fn theta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_theta as f64
    }

    fn c(&self, j: usize) -> f64 {
        -self.c_max + 2.0 * self.c_max * j as f64 / (self.n_c - 1) as f64
    }

    fn t(&self, k: usize) -> f64 {
        self.t_max * (k + 1) as f64 / self.n_t as f64
    }

    fn validate(&self) -> Result<()> {
        if self.n_theta < 2 || self.n_c < 2 || self.n_t < 2 {
            return Err(Error::InvalidInput("oracle grid counts must be >= 2".into()));
        }
        if !(self.c_max > 0.0 && self.t_max > 0.0 && self.eps_hit > 0.0) {
            return Err(Error::InvalidInput("oracle grid ranges must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Seed {
    mismatch: f64,
    theta: f64,
    c: f64,
    t: f64,
}

/// Squared mismatch on the whole grid, laid out as `[c][t][theta]`.
fn mismatch_grid(g: &GroupElement, grid: &OracleGrid) -> Vec<f64> {
    let rot: Vec<Complex64> = (0..grid.n_theta)
        .map(|i| Complex64::from_polar(1.0, grid.theta(i)))
        .collect();
    let beta_sq = g.beta.norm_sqr();
    let plane = grid.n_t * grid.n_theta;
    let mut out = vec![0.0; grid.n_c * plane];
    out.par_chunks_mut(plane).enumerate().for_each(|(j, slab)| {
        let c = grid.c(j);
        for k in 0..grid.n_t {
            // theta only rotates beta, so alpha and |beta| are shared by the row
            let base = exp_map(&Covector::new(0.0, c), grid.t(k));
            let da = (base.alpha - g.alpha).norm_sqr();
            let z = base.beta * g.beta.conj();
            let fixed = da + base.beta.norm_sqr() + beta_sq;
            let row = &mut slab[k * grid.n_theta..(k + 1) * grid.n_theta];
            for (slot, r) in row.iter_mut().zip(&rot) {
                *slot = (fixed - 2.0 * (z * r).re).max(0.0);
            }
        }
    });
    out
}

fn local_minima(values: &[f64], grid: &OracleGrid) -> Vec<Seed> {
    let (nth, nt, nc) = (grid.n_theta, grid.n_t, grid.n_c);
    let idx = |j: usize, k: usize, i: usize| (j * nt + k) * nth + i;
    let radius_sq = grid.seed_radius * grid.seed_radius;
    let mut seeds: Vec<Seed> = (0..nc)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut local = Vec::new();
            for k in 0..nt {
                for i in 0..nth {
                    let v = values[idx(j, k, i)];
                    if v > radius_sq {
                        continue;
                    }
                    let mut is_min = v <= values[idx(j, k, (i + 1) % nth)]
                        && v <= values[idx(j, k, (i + nth - 1) % nth)];
                    if is_min && k > 0 {
                        is_min = v <= values[idx(j, k - 1, i)];
                    }
                    if is_min && k + 1 < nt {
                        is_min = v <= values[idx(j, k + 1, i)];
                    }
                    if is_min && j > 0 {
                        is_min = v <= values[idx(j - 1, k, i)];
                    }
                    if is_min && j + 1 < nc {
                        is_min = v <= values[idx(j + 1, k, i)];
                    }
                    if is_min {
                        local.push(Seed {
                            mismatch: v.sqrt(),
                            theta: grid.theta(i),
                            c: grid.c(j),
                            t: grid.t(k),
                        });
                    }
                }
            }
            local
        })
        .collect();
    seeds.sort_by(|a, b| a.mismatch.total_cmp(&b.mismatch).then(a.t.total_cmp(&b.t)));
    seeds.truncate(grid.max_seeds);
    seeds
}

fn residual(g: &GroupElement, p: [f64; 3]) -> [f64; 4] {
    let e = exp_map(&Covector::new(p[0], p[1]), p[2]).to_array();
    let t = g.to_array();
    [e[0] - t[0], e[1] - t[1], e[2] - t[2], e[3] - t[3]]
}

fn norm4(r: &[f64; 4]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xc = det(&m) / d;
    }
    Some(x)
}

/// Levenberg-Marquardt on `Exp(theta, c, t) - g` with a central-difference
/// Jacobian, keeping `(c, t)` inside the grid box.
fn refine(g: &GroupElement, seed: &Seed, grid: &OracleGrid) -> (f64, f64) {
    let clamp = |p: [f64; 3]| {
        [
            p[0],
            p[1].clamp(-grid.c_max, grid.c_max),
            p[2].clamp(0.0, grid.t_max),
        ]
    };
    let mut p = [seed.theta, seed.c, seed.t];
    let mut r = residual(g, p);
    let mut err = norm4(&r);
    let mut lambda = 1e-3;
    let h = 1e-7;
    for _ in 0..grid.refine_iters {
        if err < 1e-15 {
            break;
        }
        let mut jac = [[0.0; 3]; 4];
        for v in 0..3 {
            let mut hi = p;
            let mut lo = p;
            hi[v] += h;
            lo[v] -= h;
            let (rh, rl) = (residual(g, hi), residual(g, lo));
            for row in 0..4 {
                jac[row][v] = (rh[row] - rl[row]) / (2.0 * h);
            }
        }
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for a in 0..3 {
            for b in 0..3 {
                jtj[a][b] = (0..4).map(|row| jac[row][a] * jac[row][b]).sum();
            }
            jtr[a] = (0..4).map(|row| jac[row][a] * r[row]).sum();
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj;
            for d in 0..3 {
                damped[d][d] += lambda * (1.0 + jtj[d][d]);
            }
            let Some(step) = solve3(damped, [-jtr[0], -jtr[1], -jtr[2]]) else {
                lambda *= 10.0;
                continue;
            };
            let trial = clamp([p[0] + step[0], p[1] + step[1], p[2] + step[2]]);
            let tr = residual(g, trial);
            let terr = norm4(&tr);
            if terr < err {
                p = trial;
                r = tr;
                err = terr;
                lambda = (lambda * 0.1).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (err, p[2])
}

/// Smallest arclength `t` on the grid box whose geodesic reaches `g`.
pub fn brute_force_distance(g: &GroupElement, grid: &OracleGrid) -> Result<f64> {
    grid.validate()?;
    let g = g.normalized();
    if g.chord(&GroupElement::IDENTITY) < 1e-12 {
        return Ok(0.0);
    }
    let values = mismatch_grid(&g, grid);
    let seeds = local_minima(&values, grid);
    let best_grid = values.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
    let refined: Vec<(f64, f64)> = seeds.par_iter().map(|s| refine(&g, s, grid)).collect();
    let best_mismatch = refined
        .iter()
        .map(|r| r.0)
        .fold(best_grid, f64::min);
    refined
        .iter()
        .filter(|(err, _)| *err < grid.eps_hit)
        .map(|&(_, t)| t)
        .min_by(f64::total_cmp)
        .ok_or(Error::NotReached { best_mismatch })
}
