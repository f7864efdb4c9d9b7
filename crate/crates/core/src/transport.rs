//! Monte Carlo for the pre-limit problem: particles fly at unit speed
//! through the perforated plane, change direction at rate `σ` with a
//! scattering kernel `k`, and die on the first hole they touch.
//!
//! Absorption times come from the exact ray walk in [`crate::lattice`], so
//! there is no time stepping. Particle `i` draws from the stream
//! `(seed, i)`: start point, then direction, then initial age, then flights.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{draw_start, trace_scaled, LatticeConfig, Trace};
use crate::quadrature::{integrate, Tolerance};
use crate::renewal::InitialAgeLaw;
use crate::rng::{stream, StreamRng};

/// Transition density `k(v, w)` on the circle, normalized so that
/// `(1/2π)∫k(v,w)dw = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScatterKernel {
    /// `k ≡ 1`.
    Isotropic,
    /// `k(v,w) = c(1 + (v·w)²)`.
    PolynomialCosine { c: f64 },
}

impl ScatterKernel {
    /// The polynomial kernel with `c` fixed by quadrature of the
    /// normalization.
    pub fn polynomial_cosine() -> Result<Self> {
        let tol = Tolerance { abs: 0.0, rel: 1e-13 };
        let est = integrate(|th: f64| 1.0 + th.cos().powi(2), &[0.0, PI, 2.0 * PI], tol, 200)
            .map_err(|e| Error::Quadrature {
                t: 0.0,
                abs_error: e.best.abs_error,
                intervals: e.best.intervals,
            })?;
        let kernel = ScatterKernel::PolynomialCosine {
            c: 2.0 * PI / est.value,
        };
        kernel.check_normalization()?;
        Ok(kernel)
    }

    /// `k` as a function of the relative angle `θ` between `v` and `w`.
    pub fn density(&self, theta: f64) -> f64 {
        match *self {
            ScatterKernel::Isotropic => 1.0,
            ScatterKernel::PolynomialCosine { c } => c * (1.0 + theta.cos().powi(2)),
        }
    }

    /// `(1/2π)∫k = 1` within `1e-12`, by quadrature.
    pub fn check_normalization(&self) -> Result<()> {
        if let ScatterKernel::PolynomialCosine { c } = *self {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::config(format!("kernel constant must be positive, got {c}")));
            }
        }
        let tol = Tolerance { abs: 0.0, rel: 1e-13 };
        let est = integrate(|th| self.density(th), &[0.0, PI, 2.0 * PI], tol, 200).map_err(
            |e| Error::Quadrature {
                t: 0.0,
                abs_error: e.best.abs_error,
                intervals: e.best.intervals,
            },
        )?;
        let mass = est.value / (2.0 * PI);
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!(
                "scattering kernel integrates to {mass} instead of 1"
            )));
        }
        Ok(())
    }
}

/// Outgoing direction angle for an incoming angle, distributed with density
/// `k(v,·)/2π`. The polynomial kernel is sampled by rejection from the
/// uniform law; the acceptance probability is `3/4`.
pub fn sample_scatter<R: Rng + ?Sized>(kernel: &ScatterKernel, incoming: f64, rng: &mut R) -> f64 {
    let theta = match kernel {
        ScatterKernel::Isotropic => 2.0 * PI * rng.gen::<f64>(),
        ScatterKernel::PolynomialCosine { .. } => loop {
            let th = 2.0 * PI * rng.gen::<f64>();
            let c = th.cos();
            if rng.gen::<f64>() * 2.0 < 1.0 + c * c {
                break th;
            }
        },
    };
    (incoming + theta).rem_euclid(2.0 * PI)
}

/// Where particles start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    /// Uniform on one fundamental cell, equivalently uniform on the torus.
    #[default]
    Torus,
    /// Uniform on `[-half_width, half_width]²` outside the holes, with free
    /// flight into the surrounding lattice. For qualitative runs only.
    Box { half_width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub sigma: f64,
    pub lattice: LatticeConfig,
    pub n_particles: usize,
    pub horizon: f64,
    /// Survival is reported at `k·horizon/n_bins`, `k = 0..=n_bins`.
    pub n_bins: usize,
    pub kernel: ScatterKernel,
    pub initial_age: InitialAgeLaw,
    pub placement: Placement,
    /// Times at which age histograms are recorded.
    pub checkpoints: Vec<f64>,
    pub age_bin_width: f64,
    pub seed: u64,
}

impl SimulationConfig {
    /// Isotropic scattering, stationary exponential initial ages (a point
    /// mass when `σ = 0`), 200 bins, no checkpoints.
    pub fn new(sigma: f64, lattice: LatticeConfig, n_particles: usize, horizon: f64, seed: u64) -> Self {
        let initial_age = if sigma > 0.0 {
            InitialAgeLaw::Exponential { rate: sigma }
        } else {
            InitialAgeLaw::PointMass
        };
        SimulationConfig {
            sigma,
            lattice,
            n_particles,
            horizon,
            n_bins: 200,
            kernel: ScatterKernel::Isotropic,
            initial_age,
            placement: Placement::Torus,
            checkpoints: Vec::new(),
            age_bin_width: 0.05,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::config(format!("σ must be non-negative, got {}", self.sigma)));
        }
        if self.n_particles == 0 {
            return Err(Error::config("at least one particle is required"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.n_bins == 0 {
            return Err(Error::config("at least one output bin is required"));
        }
        if !(self.age_bin_width > 0.0) {
            return Err(Error::config("age bin width must be positive"));
        }
        if let Some(c) = self.checkpoints.iter().find(|c| !(**c >= 0.0 && **c <= self.horizon)) {
            return Err(Error::config(format!("checkpoint {c} outside [0, {}]", self.horizon)));
        }
        if let Placement::Box { half_width } = self.placement {
            if !(half_width > 0.0) {
                return Err(Error::config("box half-width must be positive"));
            }
        }
        self.kernel.check_normalization()?;
        self.initial_age.validate()?;
        self.lattice.check_sampling()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_bins)
            .map(|k| self.horizon * k as f64 / self.n_bins as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    /// Binomial standard error `sqrt(S(1-S)/n)`.
    pub stderr: Vec<f64>,
    pub survivors: Vec<u64>,
    pub n_particles: usize,
    pub seed: u64,
    pub config: SimulationConfig,
}

impl SurvivalCurve {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,survival,stderr")?;
        for i in 0..self.times.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.times[i], self.survival[i], self.stderr[i]
            )?;
        }
        Ok(())
    }
}

/// Age histogram of the surviving particles at one checkpoint, scaled so
/// that it integrates to the surviving fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgeHistogram {
    pub t_checkpoint: f64,
    pub bin_width: f64,
    /// Left bin edges.
    pub s: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    /// Survivors older than the last bin.
    pub overflow: u64,
}

pub fn write_histograms_csv<W: Write>(histograms: &[AgeHistogram], mut out: W) -> Result<()> {
    writeln!(out, "t_checkpoint,s,density")?;
    for h in histograms {
        for (s, d) in h.s.iter().zip(&h.density) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", h.t_checkpoint, s, d)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutput {
    pub curve: SurvivalCurve,
    pub histograms: Vec<AgeHistogram>,
}

struct ParticleResult {
    death: f64,
    /// Age at each checkpoint the particle lives through, `NaN` otherwise.
    ages: Vec<f64>,
}

fn exp_sample(rng: &mut StreamRng, rate: f64) -> f64 {
    if rate == 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = rng.gen();
    -(1.0 - u).ln() / rate
}

fn run_particle(cfg: &SimulationConfig, index: u64) -> Result<ParticleResult> {
    let mut rng = stream(cfg.seed, index);
    let eps = cfg.lattice.epsilon;
    let r = cfg.lattice.scaled_radius();
    let (mut y, mut angle) = match cfg.placement {
        Placement::Torus => draw_start(&mut rng, r),
        Placement::Box { half_width } => {
            let w = half_width / eps;
            let y = loop {
                let y = [w * (2.0 * rng.gen::<f64>() - 1.0), w * (2.0 * rng.gen::<f64>() - 1.0)];
                let dx = y[0] - y[0].round();
                let dy = y[1] - y[1].round();
                if dx * dx + dy * dy >= r * r {
                    break y;
                }
            };
            (y, 2.0 * PI * rng.gen::<f64>())
        }
    };
    let mut age = cfg.initial_age.sample(&mut rng);
    let mut ages = vec![f64::NAN; cfg.checkpoints.len()];
    let mut t = 0.0;
    let horizon = cfg.horizon;

    let mark = |ages: &mut Vec<f64>, from: f64, to: f64, age: f64| {
        for (a, &c) in ages.iter_mut().zip(&cfg.checkpoints) {
            if c >= from && c < to {
                *a = age + (c - from);
            }
        }
    };

    loop {
        let left = horizon - t;
        let ell = exp_sample(&mut rng, cfg.sigma);
        let flight = ell.min(left);
        let v = [angle.cos(), angle.sin()];
        match trace_scaled(y, v, r, flight / eps)? {
            Trace::Hit(d) => {
                let death = t + d * eps;
                mark(&mut ages, t, death, age);
                return Ok(ParticleResult { death, ages });
            }
            Trace::Capped if ell < left => {
                mark(&mut ages, t, t + ell, age);
                let s = ell / eps;
                y = [y[0] + s * v[0], y[1] + s * v[1]];
                y = [y[0] - y[0].floor(), y[1] - y[1].floor()];
                t += ell;
                age = 0.0;
                angle = sample_scatter(&cfg.kernel, angle, &mut rng);
            }
            Trace::Capped => {
                // Survives to the horizon; checkpoints at the horizon count.
                mark(&mut ages, t, f64::INFINITY, age);
                return Ok(ParticleResult {
                    death: f64::INFINITY,
                    ages,
                });
            }
        }
    }
}

/// Ages above this are pooled into the overflow count of a histogram.
fn age_range(cfg: &SimulationConfig, checkpoint: f64) -> f64 {
    let initial = match cfg.initial_age {
        InitialAgeLaw::Exponential { rate } => 15.0 / rate,
        InitialAgeLaw::Uniform { width } => width,
        InitialAgeLaw::PointMass => 0.0,
    };
    checkpoint + initial + cfg.age_bin_width
}

/// Integer tallies, merged by addition so the result does not depend on the
/// order in which particles are reduced.
#[derive(Clone)]
struct Tally {
    /// `deaths[k]`: deaths in `(t_{k-1}, t_k]`; the last slot holds survivors.
    deaths: Vec<u64>,
    ages: Vec<Vec<u64>>,
    overflow: Vec<u64>,
}

impl Tally {
    fn new(n_times: usize, age_bins: &[usize]) -> Self {
        Tally {
            deaths: vec![0; n_times + 1],
            ages: age_bins.iter().map(|&m| vec![0; m]).collect(),
            overflow: vec![0; age_bins.len()],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.deaths.iter_mut().zip(&other.deaths) {
            *a += b;
        }
        for (ha, hb) in self.ages.iter_mut().zip(&other.ages) {
            for (a, b) in ha.iter_mut().zip(hb) {
                *a += b;
            }
        }
        for (a, b) in self.overflow.iter_mut().zip(&other.overflow) {
            *a += b;
        }
        self
    }
}

/// Runs the simulation described by `cfg`.
pub fn simulate(cfg: &SimulationConfig) -> Result<SimulationOutput> {
    cfg.validate()?;
    let times = cfg.times();
    let dt = cfg.horizon / cfg.n_bins as f64;
    let w = cfg.age_bin_width;
    let age_bins: Vec<usize> = cfg
        .checkpoints
        .iter()
        .map(|&c| (age_range(cfg, c) / w).ceil() as usize)
        .collect();

    let tally = (0..cfg.n_particles as u64)
        .into_par_iter()
        .try_fold(
            || Tally::new(times.len(), &age_bins),
            |mut acc, i| -> Result<Tally> {
                let p = run_particle(cfg, i)?;
                // First grid time at or after the death.
                let k = if p.death.is_finite() {
                    let mut k = ((p.death / dt).ceil() as usize).min(times.len());
                    while k > 0 && times[k - 1] >= p.death {
                        k -= 1;
                    }
                    while k < times.len() && times[k] < p.death {
                        k += 1;
                    }
                    k
                } else {
                    times.len()
                };
                acc.deaths[k] += 1;
                for (h, &a) in p.ages.iter().enumerate() {
                    if a.is_nan() {
                        continue;
                    }
                    let b = (a / w) as usize;
                    match acc.ages[h].get_mut(b) {
                        Some(slot) => *slot += 1,
                        None => acc.overflow[h] += 1,
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(|| Tally::new(times.len(), &age_bins), |a, b| Ok(a.merge(b)))?;

    let n = cfg.n_particles;
    let nf = n as f64;
    let mut dead = 0u64;
    let survivors: Vec<u64> = (0..times.len())
        .map(|k| {
            dead += tally.deaths[k];
            n as u64 - dead
        })
        .collect();
    let survival: Vec<f64> = survivors.iter().map(|&c| c as f64 / nf).collect();
    let stderr = survival.iter().map(|&s| (s * (1.0 - s) / nf).sqrt()).collect();

    let histograms = cfg
        .checkpoints
        .iter()
        .zip(tally.ages)
        .zip(tally.overflow)
        .map(|((&c, counts), overflow)| AgeHistogram {
            t_checkpoint: c,
            bin_width: w,
            s: (0..counts.len()).map(|i| i as f64 * w).collect(),
            density: counts.iter().map(|&q| q as f64 / (nf * w)).collect(),
            counts,
            overflow,
        })
        .collect();

    Ok(SimulationOutput {
        curve: SurvivalCurve {
            times,
            survival,
            stderr,
            survivors,
            n_particles: n,
            seed: cfg.seed,
            config: cfg.clone(),
        },
        histograms,
    })
}

/// Least-squares fit of `ln S(t) = a + b t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Root-mean-square residual of `ln S`.
    pub rms_residual: f64,
    pub points: usize,
}

/// Minimum surviving count per point entering [`fit_rate`].
pub const MIN_SURVIVORS: u64 = 100;

/// Fits the decay exponent on the curve points inside `window`.
pub fn fit_rate(curve: &SurvivalCurve, window: (f64, f64)) -> Result<RateFit> {
    let (a, b) = window;
    let last = *curve.times.last().unwrap_or(&0.0);
    if !(a < b && a >= 0.0 && b <= last * (1.0 + 1e-12)) {
        return Err(Error::config(format!(
            "fit window [{a}, {b}] outside the curve support [0, {last}]"
        )));
    }
    let pts: Vec<(f64, f64, u64)> = curve
        .times
        .iter()
        .zip(&curve.survival)
        .zip(&curve.survivors)
        .filter(|((t, _), _)| **t >= a - 1e-12 && **t <= b + 1e-12)
        .map(|((t, s), c)| (*t, *s, *c))
        .collect();
    if let Some(&(t, _, c)) = pts.iter().find(|p| p.2 < MIN_SURVIVORS) {
        return Err(Error::Statistics(format!(
            "only {c} survivors at t = {t}; at least {MIN_SURVIVORS} are needed"
        )));
    }
    fit_log_linear(&pts.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>())
}

/// Ordinary least squares of `ln y` on `t`.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<RateFit> {
    let m = points.len();
    if m < 3 {
        return Err(Error::Statistics(format!("{m} points are too few for a fit")));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Statistics(format!("non-positive value {} at t = {}", p.1, p.0)));
    }
    let mf = m as f64;
    let tm = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let ym = points.iter().map(|p| p.1.ln()).sum::<f64>() / mf;
    let sxx: f64 = points.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - tm) * (p.1.ln() - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1.ln() - intercept - slope * p.0).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        stderr: (ss / (mf - 2.0) / sxx).sqrt(),
        rms_residual: (ss / mf).sqrt(),
        points: m,
    })
}

/// Relative `L¹` distance `∫|a-b| / ∫|b|` of two curves sampled on the same
/// uniform grid (trapezoid rule).
pub fn relative_l1(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let trap = |f: &dyn Fn(usize) -> f64| {
        (0..n).map(f).sum::<f64>() - 0.5 * (f(0) + f(n - 1))
    };
    let num = trap(&|i| (a[i] - b[i]).abs());
    let den = trap(&|i| b[i].abs());
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_constant_is_two_thirds() {
        match ScatterKernel::polynomial_cosine().unwrap() {
            ScatterKernel::PolynomialCosine { c } => assert!((c - 2.0 / 3.0).abs() < 1e-14),
            _ => unreachable!(),
        }
        assert!(ScatterKernel::PolynomialCosine { c: 0.7 }.check_normalization().is_err());
    }

    #[test]
    fn exact_exponential_fit() {
        let pts: Vec<(f64, f64)> = (0..50).map(|k| {
            let t = k as f64 * 0.1;
            (t, (-2.0 * t).exp())
        }).collect();
        let f = fit_log_linear(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn relative_l1_basics() {
        let a = [1.0, 0.5, 0.25];
        assert_eq!(relative_l1(&a, &a), 0.0);
        let b = [2.0, 1.0, 0.5];
        assert!((relative_l1(&a, &b) - 0.5).abs() < 1e-15);
    }
}
