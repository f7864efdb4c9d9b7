//! Exact free paths in the plane perforated by the holes
//! `{x : dist(x, εZ²) <= r}`.
//!
//! Work is done in rescaled coordinates `y = x/ε`, where the holes are disks
//! of radius `r/ε` at the integer points. A ray is walked cell by cell
//! (Amanatides–Woo); since `r/ε < 1/2`, a disk can meet only the four cells
//! around its centre, so each visited cell tests its four corner disks.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp_dist::PathDistribution;
use crate::rng::stream;

pub const DEFAULT_T_CAP: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub epsilon: f64,
    pub hole_radius: f64,
    /// Longest traced path, in the same units as `epsilon`.
    pub t_cap: f64,
}

impl LatticeConfig {
    /// Boltzmann–Grad holes: radius `ε²`.
    pub fn new(epsilon: f64) -> Result<Self> {
        Self::with_radius(epsilon, epsilon * epsilon, DEFAULT_T_CAP)
    }

    pub fn with_radius(epsilon: f64, hole_radius: f64, t_cap: f64) -> Result<Self> {
        let c = LatticeConfig {
            epsilon,
            hole_radius,
            t_cap,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::config(format!("lattice period must be positive, got {}", self.epsilon)));
        }
        if !(self.hole_radius > 0.0 && self.hole_radius < 0.5 * self.epsilon) {
            return Err(Error::config(format!(
                "hole radius {} must lie in (0, ε/2) for ε = {}",
                self.hole_radius, self.epsilon
            )));
        }
        if !(self.t_cap.is_finite() && self.t_cap > 0.0) {
            return Err(Error::config(format!("t_cap must be positive, got {}", self.t_cap)));
        }
        Ok(())
    }

    /// Hole radius in cell units.
    pub fn scaled_radius(&self) -> f64 {
        self.hole_radius / self.epsilon
    }

    /// Fraction of the fundamental cell outside the hole.
    pub fn free_fraction(&self) -> f64 {
        let r = self.scaled_radius();
        1.0 - PI * r * r
    }

    /// Rejection sampling of starting points is refused below one half.
    pub fn check_sampling(&self) -> Result<()> {
        self.validate()?;
        let a = self.free_fraction();
        if a < 0.5 {
            return Err(Error::config(format!(
                "holes too large: rejection acceptance {a:.3} is below 1/2"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreePathSample {
    /// Start in the fundamental cell `[0, ε)²`.
    pub start_position: [f64; 2],
    /// Direction angle in `[0, 2π)`.
    pub direction: f64,
    /// Distance to the first hole, or `t_cap`.
    pub path_length: f64,
    pub capped: bool,
}

/// Outcome of tracing in cell units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Trace {
    Hit(f64),
    Capped,
}

/// Squared distance from `y` to the nearest integer point.
fn nearest_center_dist2(y: [f64; 2]) -> f64 {
    let dx = y[0] - y[0].round();
    let dy = y[1] - y[1].round();
    dx * dx + dy * dy
}

/// First `t >= 0` with `|y + t v - c| = r`, for `y` outside the disk.
#[inline]
fn disk_hit(y: [f64; 2], v: [f64; 2], c: [f64; 2], r: f64) -> Option<f64> {
    let d = [y[0] - c[0], y[1] - c[1]];
    let b = d[0] * v[0] + d[1] * v[1];
    if b >= 0.0 {
        return None;
    }
    // The discriminant comes from the perpendicular offset rather than
    // b² - cc, which cancels catastrophically for grazing rays far away.
    let h = d[0] * v[1] - d[1] * v[0];
    let disc = (r - h) * (r + h);
    if disc < 0.0 {
        return None;
    }
    let cc = d[0] * d[0] + d[1] * d[1] - r * r;
    let root = disc.sqrt();
    // Root of t² + 2bt + cc = 0 nearest zero. Close to the disk the quotient
    // form avoids cancellation; a start a rounding error inside the disk
    // counts as an immediate hit.
    Some(if cc < 16.0 { cc / (-b + root) } else { -b - root }.max(0.0))
}

/// Ray walk in cell units. `y` must lie outside every disk and `v` must be
/// a unit vector.
pub(crate) fn trace_scaled(y: [f64; 2], v: [f64; 2], r: f64, cap: f64) -> Result<Trace> {
    // Periodicity: only the position within the cell matters.
    let y = [y[0] - y[0].floor(), y[1] - y[1].floor()];
    let mut cell = [0i64, 0i64];
    let step = [
        if v[0] >= 0.0 { 1i64 } else { -1 },
        if v[1] >= 0.0 { 1i64 } else { -1 },
    ];
    let inv = [1.0 / v[0].abs(), 1.0 / v[1].abs()];
    let first = |a: usize| {
        if v[a] == 0.0 {
            f64::INFINITY
        } else if v[a] > 0.0 {
            (1.0 - y[a]) * inv[a]
        } else {
            y[a] * inv[a]
        }
    };
    let mut t_next = [first(0), first(1)];

    let max_steps = (10.0 * cap).ceil() as u64 + 16;
    let mut best = f64::INFINITY;
    for _ in 0..max_steps {
        let (i, j) = (cell[0] as f64, cell[1] as f64);
        for c in [[i, j], [i + 1.0, j], [i, j + 1.0], [i + 1.0, j + 1.0]] {
            if let Some(t) = disk_hit(y, v, c, r) {
                best = best.min(t);
            }
        }
        let t_exit = t_next[0].min(t_next[1]);
        if best <= t_exit {
            return Ok(if best <= cap { Trace::Hit(best) } else { Trace::Capped });
        }
        if t_exit >= cap {
            return Ok(Trace::Capped);
        }
        let axis = if t_next[0] < t_next[1] { 0 } else { 1 };
        cell[axis] += step[axis];
        t_next[axis] += inv[axis];
    }
    Err(Error::Invariant(format!(
        "cell traversal exceeded {max_steps} steps (cap {cap} cells)"
    )))
}

fn check_direction(v: [f64; 2]) -> Result<()> {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if !((n - 1.0).abs() <= 1e-12) {
        return Err(Error::domain(format!("direction must be a unit vector, |v| = {n}")));
    }
    Ok(())
}

/// Distance from `x` along `v` to the first hole, or `t_cap`.
pub fn free_path(x: [f64; 2], v: [f64; 2], config: &LatticeConfig) -> Result<f64> {
    Ok(trace(x, v, config)?.0)
}

/// [`free_path`] plus whether the cap was reached.
pub fn trace(x: [f64; 2], v: [f64; 2], config: &LatticeConfig) -> Result<(f64, bool)> {
    config.validate()?;
    check_direction(v)?;
    let eps = config.epsilon;
    let r = config.scaled_radius();
    let y = [x[0] / eps, x[1] / eps];
    if nearest_center_dist2(y) < r * r {
        return Err(Error::domain(format!("start point ({}, {}) lies inside a hole", x[0], x[1])));
    }
    Ok(match trace_scaled(y, v, r, config.t_cap / eps)? {
        Trace::Hit(t) => (t * eps, false),
        Trace::Capped => (config.t_cap, true),
    })
}

/// A start point uniform on the free part of the cell (cell units) and a
/// uniform direction, drawn in this order.
pub(crate) fn draw_start<R: Rng + ?Sized>(rng: &mut R, r: f64) -> ([f64; 2], f64) {
    let y = loop {
        let y = [rng.gen::<f64>(), rng.gen::<f64>()];
        if nearest_center_dist2(y) >= r * r {
            break y;
        }
    };
    let angle = 2.0 * PI * rng.gen::<f64>();
    (y, angle)
}

/// One free-path sample from the stream `(seed, index)`.
pub fn sample_one(config: &LatticeConfig, seed: u64, index: u64) -> Result<FreePathSample> {
    let mut rng = stream(seed, index);
    let r = config.scaled_radius();
    let (y, angle) = draw_start(&mut rng, r);
    let v = [angle.cos(), angle.sin()];
    let (path_length, capped) = match trace_scaled(y, v, r, config.t_cap / config.epsilon)? {
        Trace::Hit(t) => (t * config.epsilon, false),
        Trace::Capped => (config.t_cap, true),
    };
    Ok(FreePathSample {
        start_position: [y[0] * config.epsilon, y[1] * config.epsilon],
        direction: angle,
        path_length,
        capped,
    })
}

/// `n` independent free paths, sample `i` drawn from stream `i`.
pub fn sample_paths(config: &LatticeConfig, n: usize, seed: u64) -> Result<Vec<FreePathSample>> {
    config.check_sampling()?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| sample_one(config, seed, i))
        .collect()
}

/// Empirical survival function `Φ̂(t) = #{τ > t}/n` of rescaled free paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTail {
    pub grid: Vec<f64>,
    pub phi_hat: Vec<f64>,
    pub n_samples: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl EmpiricalTail {
    /// Builds `Φ̂` on `grid` from path lengths.
    pub fn from_lengths(lengths: &[f64], grid: &[f64], epsilon: f64, seed: u64) -> Self {
        let mut sorted = lengths.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let phi_hat = grid
            .iter()
            .map(|&t| {
                let at_most = sorted.partition_point(|&x| x <= t);
                (n - at_most) as f64 / n as f64
            })
            .collect();
        EmpiricalTail {
            grid: grid.to_vec(),
            phi_hat,
            n_samples: n,
            epsilon,
            seed,
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,phi_hat,n_samples,epsilon,seed")?;
        for (t, f) in self.grid.iter().zip(&self.phi_hat) {
            writeln!(out, "{:.16e},{:.16e},{},{:.16e},{}", t, f, self.n_samples, self.epsilon, self.seed)?;
        }
        Ok(())
    }
}

/// Empirical tail of `n` free paths on `grid`.
pub fn sample_empirical(
    config: &LatticeConfig,
    n: usize,
    seed: u64,
    grid: &[f64],
) -> Result<EmpiricalTail> {
    if n == 0 {
        return Err(Error::config("at least one sample is required"));
    }
    let lengths: Vec<f64> = sample_paths(config, n, seed)?
        .iter()
        .map(|s| s.path_length)
        .collect();
    Ok(EmpiricalTail::from_lengths(&lengths, grid, config.epsilon, seed))
}

/// `sup |Φ̂(t) - p(t)|` over the grid points of `tail` inside `t_range`.
pub fn ks_distance(tail: &EmpiricalTail, distribution: &PathDistribution, t_range: (f64, f64)) -> f64 {
    tail.grid
        .iter()
        .zip(&tail.phi_hat)
        .filter(|(t, _)| **t >= t_range.0 && **t <= t_range.1)
        .map(|(t, f)| (f - distribution.p(*t)).abs())
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Uniform grid on `[a, b]` with `n` points.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}
