//! Renewal description of the homogenized mass.
//!
//! Between scatterings a particle flies in a straight line; it survives a
//! flight of length `t` with probability `p(t)` and scatters at rate `σ`.
//! The mass density `ψ` of particles whose current flight started at the
//! origin solves the Volterra equation `ψ = κ + κ∗ψ` with kernel
//! `κ(t) = σ e^{-σt} p(t)`, and the surviving fraction is `ψ/σ`.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp_dist::{default_distribution, PathDistribution};

/// Default initial-mass multiplier: with `2π` the mass curve is the
/// surviving fraction `ψ/σ`.
pub const DEFAULT_SCALE: f64 = 2.0 * PI;

/// `κ(t) = σ e^{-σt} p(t)` for a tabulated free-path law.
#[derive(Debug, Clone)]
pub struct RenewalKernel {
    sigma: f64,
    distribution: Arc<PathDistribution>,
}

impl RenewalKernel {
    pub fn new(sigma: f64, distribution: Arc<PathDistribution>) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::domain(format!("scattering rate must be positive, got {sigma}")));
        }
        Ok(RenewalKernel { sigma, distribution })
    }

    /// Kernel over the shared default tabulation.
    pub fn with_default_distribution(sigma: f64) -> Result<Self> {
        Self::new(sigma, Arc::new(default_distribution().clone()))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn distribution(&self) -> &PathDistribution {
        &self.distribution
    }

    pub fn shared_distribution(&self) -> Arc<PathDistribution> {
        Arc::clone(&self.distribution)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.sigma * (-self.sigma * t).exp() * self.distribution.p(t)
    }

    /// Samples `κ(kh)` for `k = 0..n`.
    pub fn samples(&self, h: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.eval(k as f64 * h)).collect()
    }

    /// `∫_0^∞ κ`, the probability that a flight ends in a scattering rather
    /// than in a hole.
    pub fn total_integral(&self) -> f64 {
        self.sigma * self.distribution.laplace_moments(self.sigma.ln()).p
    }

    /// `1 + ∫_0^∞ ṗ e^{-σt}`, equal to [`total_integral`](Self::total_integral)
    /// after integrating by parts.
    pub fn total_integral_by_parts(&self) -> f64 {
        1.0 + self.distribution.laplace_moments(self.sigma.ln()).pdot
    }
}

/// Free-function form of [`RenewalKernel::eval`].
pub fn kernel_eval(kernel: &RenewalKernel, t: f64) -> f64 {
    kernel.eval(t)
}

/// `ψ` on a uniform grid `t_k = k·h`, with the derived mass
/// `M = scale·ψ/(2πσ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassCurve {
    pub sigma: f64,
    pub step: f64,
    pub scale: f64,
    pub psi: Vec<f64>,
}

impl MassCurve {
    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        (self.psi.len() - 1) as f64 * self.step
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.psi.len()).map(|k| self.time(k)).collect()
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn mass(&self) -> Vec<f64> {
        let f = self.scale / (2.0 * PI * self.sigma);
        self.psi.iter().map(|v| v * f).collect()
    }

    /// Surviving fraction `ψ/σ`, independent of `scale`.
    pub fn survival(&self) -> Vec<f64> {
        self.psi.iter().map(|v| v / self.sigma).collect()
    }

    /// Linear interpolation of `ψ`.
    pub fn psi_at(&self, t: f64) -> Result<f64> {
        let horizon = self.horizon();
        if !(0.0..=horizon * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::Range { t, horizon });
        }
        let x = t / self.step;
        let i = (x.floor() as usize).min(self.psi.len().saturating_sub(2));
        if self.psi.len() == 1 {
            return Ok(self.psi[0]);
        }
        let w = (x - i as f64).clamp(0.0, 1.0);
        Ok(self.psi[i] * (1.0 - w) + self.psi[i + 1] * w)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,psi")?;
        for (k, v) in self.psi.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.time(k), v)?;
        }
        Ok(())
    }

    pub fn write_mass_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,mass")?;
        for (k, v) in self.mass().iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.time(k), v)?;
        }
        Ok(())
    }
}

fn grid_size(kernel: &RenewalKernel, h: f64, horizon: f64) -> Result<usize> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    if !(horizon.is_finite() && horizon >= h) {
        return Err(Error::domain(format!("horizon {horizon} shorter than step {h}")));
    }
    let limit = 1.0 / kernel.sigma();
    if h >= limit {
        return Err(Error::UnderResolved { step: h, limit });
    }
    Ok((horizon / h).round() as usize + 1)
}

/// Solves `ψ = κ + κ∗ψ` on `[0, horizon]` with the trapezoid rule.
///
/// The step must resolve the scattering time (`h < 1/σ`); otherwise the
/// solve is refused with [`Error::UnderResolved`].
pub fn solve_volterra(kernel: &RenewalKernel, h: f64, horizon: f64) -> Result<MassCurve> {
    let n = grid_size(kernel, h, horizon)?;
    let kappa = kernel.samples(h, n);
    let mut psi = vec![0.0; n];
    psi[0] = kappa[0];
    let denom = 1.0 - 0.5 * h * kappa[0];
    for k in 1..n {
        let mut acc = 0.5 * kappa[k] * psi[0];
        for j in 1..k {
            acc += kappa[k - j] * psi[j];
        }
        psi[k] = (kappa[k] + h * acc) / denom;
    }
    Ok(MassCurve {
        sigma: kernel.sigma(),
        step: h,
        scale: DEFAULT_SCALE,
        psi,
    })
}

/// How discrete convolutions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionMethod {
    Direct,
    #[default]
    Fft,
}

/// Partial sum `Σ_{n=1}^{N} κ^{∗n}` together with per-term norms.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    pub curve: MassCurve,
    /// Trapezoid `L¹` norm of `κ^{∗n}` on the grid.
    pub term_l1: Vec<f64>,
    pub term_sup: Vec<f64>,
    /// Trapezoid integral of `κ` on the grid.
    pub kernel_l1: f64,
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Trapezoid convolution `(a⊛b)_k = h[Σ_j a_j b_{k-j} - ½a_0 b_k - ½a_k b_0]`.
fn correct_endpoints(raw: &mut [f64], a: &[f64], b: &[f64], h: f64) {
    for k in 0..raw.len() {
        raw[k] = h * (raw[k] - 0.5 * (a[0] * b[k] + a[k] * b[0]));
    }
}

struct FftConvolver {
    len: usize,
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
    kernel_hat: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl FftConvolver {
    fn new(kernel: &[f64]) -> Self {
        let len = (2 * kernel.len()).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut kernel_hat = vec![Complex::new(0.0, 0.0); len];
        for (z, &v) in kernel_hat.iter_mut().zip(kernel) {
            z.re = v;
        }
        forward.process(&mut kernel_hat);
        FftConvolver {
            len,
            forward,
            inverse,
            kernel_hat,
            scratch: vec![Complex::new(0.0, 0.0); len],
        }
    }

    /// Raw linear convolution `Σ_j κ_j f_{k-j}` for `k < f.len()`.
    fn raw(&mut self, f: &[f64]) -> Vec<f64> {
        self.scratch.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
        for (z, &v) in self.scratch.iter_mut().zip(f) {
            z.re = v;
        }
        self.forward.process(&mut self.scratch);
        for (z, k) in self.scratch.iter_mut().zip(&self.kernel_hat) {
            *z *= k;
        }
        self.inverse.process(&mut self.scratch);
        let norm = 1.0 / self.len as f64;
        self.scratch[..f.len()].iter().map(|z| z.re * norm).collect()
    }
}

fn raw_direct(kappa: &[f64], f: &[f64]) -> Vec<f64> {
    (0..f.len())
        .map(|k| (0..=k).map(|j| kappa[j] * f[k - j]).sum())
        .collect()
}

/// Sum of the first `n_max` convolution powers of `κ` on `[0, horizon]`.
pub fn convolution_powers(
    kernel: &RenewalKernel,
    n_max: usize,
    h: f64,
    horizon: f64,
) -> Result<MassCurve> {
    convolution_power_series(kernel, n_max, h, horizon, ConvolutionMethod::Fft).map(|s| s.curve)
}

/// [`convolution_powers`] with a selectable method and per-term diagnostics.
///
/// Terms are clamped at zero so that round-off in the transform path cannot
/// make the partial sums decrease.
pub fn convolution_power_series(
    kernel: &RenewalKernel,
    n_max: usize,
    h: f64,
    horizon: f64,
    method: ConvolutionMethod,
) -> Result<PowerSeries> {
    if n_max == 0 {
        return Err(Error::config("at least one convolution power is required"));
    }
    let n = grid_size(kernel, h, horizon)?;
    let kappa = kernel.samples(h, n);
    let kernel_l1 = trapezoid(&kappa, h);
    let mut fft = match method {
        ConvolutionMethod::Fft => Some(FftConvolver::new(&kappa)),
        ConvolutionMethod::Direct => None,
    };

    let mut sum = kappa.clone();
    let mut term = kappa.clone();
    let mut term_l1 = vec![kernel_l1];
    let mut term_sup = vec![kappa.iter().cloned().fold(0.0, f64::max)];
    for _ in 1..n_max {
        let mut next = match fft.as_mut() {
            Some(c) => c.raw(&term),
            None => raw_direct(&kappa, &term),
        };
        correct_endpoints(&mut next, &kappa, &term, h);
        next.iter_mut().for_each(|v| *v = v.max(0.0));
        for (s, v) in sum.iter_mut().zip(&next) {
            *s += v;
        }
        term_l1.push(trapezoid(&next, h));
        term_sup.push(next.iter().cloned().fold(0.0, f64::max));
        term = next;
    }
    Ok(PowerSeries {
        curve: MassCurve {
            sigma: kernel.sigma(),
            step: h,
            scale: DEFAULT_SCALE,
            psi: sum,
        },
        term_l1,
        term_sup,
        kernel_l1,
    })
}

/// Law of the age `s` (time since the last scattering) at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialAgeLaw {
    /// `Π(s) = rate·e^{-rate·s}`; with `rate = σ` this is the stationary
    /// age law of the scattering process.
    Exponential { rate: f64 },
    /// Uniform on `[0, width]`.
    Uniform { width: f64 },
    /// Every particle starts a fresh flight.
    PointMass,
}

impl InitialAgeLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialAgeLaw::Exponential { rate } if !(rate.is_finite() && rate > 0.0) => {
                Err(Error::config(format!("exponential age rate must be positive, got {rate}")))
            }
            InitialAgeLaw::Uniform { width } if !(width.is_finite() && width > 0.0) => {
                Err(Error::config(format!("uniform age width must be positive, got {width}")))
            }
            _ => Ok(()),
        }
    }

    /// Density at `s`, or `None` for the point mass.
    pub fn density(&self, s: f64) -> Option<f64> {
        match *self {
            InitialAgeLaw::Exponential { rate } => {
                Some(if s < 0.0 { 0.0 } else { rate * (-rate * s).exp() })
            }
            InitialAgeLaw::Uniform { width } => {
                Some(if (0.0..=width).contains(&s) { 1.0 / width } else { 0.0 })
            }
            InitialAgeLaw::PointMass => None,
        }
    }

    /// Draws one age. Every law consumes exactly one uniform variate, so
    /// runs that differ only in the age law share all other random draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match *self {
            InitialAgeLaw::Exponential { rate } => -(1.0 - u).ln() / rate,
            InitialAgeLaw::Uniform { width } => u * width,
            InitialAgeLaw::PointMass => 0.0,
        }
    }
}

/// Closed-form age density built from a solved mass curve:
/// `m(t,s) = scale/(2π)·e^{-σs}p(min(t,s))·(1_{s<t}ψ(t-s) + 1_{t≤s}σ)`,
/// which is the exponential-start solution.
pub fn age_density_closed_form(
    kernel: &RenewalKernel,
    curve: &MassCurve,
    t: f64,
    s: f64,
) -> Result<f64> {
    if t < 0.0 || s < 0.0 {
        return Err(Error::domain(format!("age density needs t, s >= 0, got ({t}, {s})")));
    }
    let sigma = kernel.sigma();
    let d = kernel.distribution();
    let f = curve.scale / (2.0 * PI);
    if s < t {
        Ok(f * (-sigma * s).exp() * d.p(s) * curve.psi_at(t - s)?)
    } else {
        if t > curve.horizon() * (1.0 + 1e-12) {
            return Err(Error::Range { t, horizon: curve.horizon() });
        }
        Ok(f * sigma * (-sigma * s).exp() * d.p(t))
    }
}

/// Options for [`mu_solver_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuOptions {
    pub initial: InitialAgeLaw,
    /// Keep every `stride`-th node in `t` and `s`.
    pub output_stride: usize,
    /// Age cutoff; defaults to `horizon + 20/σ`.
    pub s_max: Option<f64>,
}

impl MuOptions {
    pub fn exponential(sigma: f64) -> Self {
        MuOptions {
            initial: InitialAgeLaw::Exponential { rate: sigma },
            output_stride: 1,
            s_max: None,
        }
    }
}

/// `μ(t, s)` on a (possibly subsampled) grid, plus the full-resolution
/// marginal `Q(t) = ∫μ(t,s) ds`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgeDensityGrid {
    pub sigma: f64,
    pub step: f64,
    pub output_stride: usize,
    pub initial: InitialAgeLaw,
    pub t_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    /// Row-major: `values[i * s_grid.len() + j] = μ(t_i, s_j)`.
    pub values: Vec<f64>,
    /// `Q` at every step `k·h`.
    pub marginal: Vec<f64>,
}

impl AgeDensityGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.s_grid.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.s_grid.len();
        &self.values[i * m..(i + 1) * m]
    }

    /// `Q(t_i)` for the stored row `i`.
    pub fn row_marginal(&self, i: usize) -> f64 {
        self.marginal[i * self.output_stride]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,s,mu")?;
        for (i, t) in self.t_grid.iter().enumerate() {
            for (j, s) in self.s_grid.iter().enumerate() {
                writeln!(out, "{:.10e},{:.10e},{:.10e}", t, s, self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// Small JSON description of the grid layout.
    pub fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({
            "sigma": self.sigma,
            "step": self.step,
            "output_stride": self.output_stride,
            "initial": self.initial,
            "t_points": self.t_grid.len(),
            "s_points": self.s_grid.len(),
            "t_max": self.t_grid.last(),
            "s_max": self.s_grid.last(),
        })
    }
}

/// Age-structured density with the stationary exponential start.
pub fn mu_solver(kernel: &RenewalKernel, h: f64, horizon: f64) -> Result<AgeDensityGrid> {
    mu_solver_with(kernel, h, horizon, &MuOptions::exponential(kernel.sigma()))
}

/// Solves the age-structured transport problem
/// `∂_t μ + ∂_s μ = -b(t,s) μ`, `μ(t,0) = σ∫μ(t,s')ds'`,
/// with `b(t,s) = σ - ṗ(min(t,s))/p(min(t,s))`, along characteristics:
///
/// * `s ≥ t`: `μ(t,s) = Π(s-t) e^{-σt} p(t)`,
/// * `s < t`: `μ(t,s) = σ e^{-σs} p(s) Q(t-s)`,
///
/// where `Q(t) = ∫μ(t,·)` is marched in time with the trapezoid rule in `s`
/// (implicit in the boundary node).
pub fn mu_solver_with(
    kernel: &RenewalKernel,
    h: f64,
    horizon: f64,
    options: &MuOptions,
) -> Result<AgeDensityGrid> {
    options.initial.validate()?;
    if options.output_stride == 0 {
        return Err(Error::config("output stride must be at least 1"));
    }
    if matches!(options.initial, InitialAgeLaw::PointMass) {
        return Err(Error::config(
            "the age-density solver needs an initial density; use the renewal solve for a point mass",
        ));
    }
    let n = grid_size(kernel, h, horizon)?;
    let sigma = kernel.sigma();
    let d = kernel.distribution();
    let s_max = options.s_max.unwrap_or(horizon + 20.0 / sigma);
    if s_max < horizon {
        return Err(Error::config(format!("age cutoff {s_max} below horizon {horizon}")));
    }
    let n_s = (s_max / h).ceil() as usize + 1;

    let pi: Vec<f64> = (0..n_s)
        .map(|j| options.initial.density(j as f64 * h).unwrap_or(0.0))
        .collect();
    // prefix[i] = Σ_{j<i} Π_j
    let mut prefix = vec![0.0; n_s + 1];
    for j in 0..n_s {
        prefix[j + 1] = prefix[j] + pi[j];
    }
    let kappa = kernel.samples(h, n.max(1));
    let survive: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 * h;
            (-sigma * t).exp() * d.p(t)
        })
        .collect();

    let last = n_s - 1;
    let weight = |j: usize| if j == 0 || j == last { 0.5 * h } else { h };
    let denom = 1.0 - 0.5 * h * sigma;
    let mut q = vec![0.0; n];
    q[0] = (0..n_s).map(|j| weight(j) * pi[j]).sum();
    for k in 1..n {
        // The rule is split at s = t_k, where μ may jump when Π(0) ≠ σ:
        // [0, t_k] uses the left limit κ_k Q_0, [t_k, s_max] holds Π(s - t_k).
        let m = last - k;
        let upper = if m == 0 {
            0.0
        } else {
            h * (prefix[m + 1] - 0.5 * (pi[0] + pi[m]))
        };
        let mut acc = 0.5 * kappa[k] * q[0];
        for j in 1..k {
            acc += kappa[j] * q[k - j];
        }
        q[k] = (h * acc + survive[k] * upper) / denom;
    }

    let stride = options.output_stride;
    let t_idx: Vec<usize> = (0..n).step_by(stride).collect();
    let s_idx: Vec<usize> = (0..n_s).step_by(stride).collect();
    let mut values = Vec::with_capacity(t_idx.len() * s_idx.len());
    for &k in &t_idx {
        for &j in &s_idx {
            let v = if j == 0 && k > 0 {
                sigma * q[k]
            } else if j >= k {
                pi[j - k] * survive[k]
            } else {
                kappa[j] * q[k - j]
            };
            values.push(v);
        }
    }
    Ok(AgeDensityGrid {
        sigma,
        step: h,
        output_stride: stride,
        initial: options.initial,
        t_grid: t_idx.iter().map(|&k| k as f64 * h).collect(),
        s_grid: s_idx.iter().map(|&j| j as f64 * h).collect(),
        values,
        marginal: q,
    })
}

/// Loss rate `b(t,s) = σ - ṗ(m)/p(m)`, `m = min(t, s)`.
pub fn b_coefficient(distribution: &PathDistribution, sigma: f64, t: f64, s: f64) -> f64 {
    let (p, pd) = distribution.p_and_pdot(t.min(s));
    sigma - pd / p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(sigma: f64) -> RenewalKernel {
        RenewalKernel::with_default_distribution(sigma).unwrap()
    }

    #[test]
    fn kernel_integral_identity() {
        for &sigma in &[0.05, 1.0, 10.0] {
            let k = kernel(sigma);
            let a = k.total_integral();
            let b = k.total_integral_by_parts();
            assert!((a - b).abs() < 1e-10, "σ={sigma}: {a} vs {b}");
            assert!(a < 1.0 && a > 0.0);
        }
    }

    #[test]
    fn coarse_step_is_refused() {
        let k = kernel(10.0);
        assert!(matches!(
            solve_volterra(&k, 0.1, 1.0),
            Err(Error::UnderResolved { .. })
        ));
    }

    #[test]
    fn volterra_starts_at_sigma() {
        let k = kernel(2.0);
        let c = solve_volterra(&k, 0.01, 1.0).unwrap();
        assert!((c.psi[0] - 2.0).abs() < 1e-12);
        assert!((c.survival()[0] - 1.0).abs() < 1e-12);
        assert!(c.psi.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn fft_and_direct_powers_agree() {
        let k = kernel(1.0);
        let a = convolution_power_series(&k, 12, 0.01, 5.0, ConvolutionMethod::Direct).unwrap();
        let b = convolution_power_series(&k, 12, 0.01, 5.0, ConvolutionMethod::Fft).unwrap();
        for (x, y) in a.curve.psi.iter().zip(&b.curve.psi) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn power_series_matches_volterra() {
        let k = kernel(1.0);
        let h = 0.01;
        let v = solve_volterra(&k, h, 4.0).unwrap();
        let s = convolution_powers(&k, 80, h, 4.0).unwrap();
        for (x, y) in v.psi.iter().zip(&s.psi) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn closed_form_boundary_and_range() {
        let k = kernel(1.0);
        let c = solve_volterra(&k, 0.01, 2.0).unwrap();
        let m = age_density_closed_form(&k, &c, 0.0, 0.3).unwrap();
        assert!((m - (-0.3f64).exp()).abs() < 1e-12);
        assert!(matches!(
            age_density_closed_form(&k, &c, 3.0, 0.1),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn mu_initial_row_and_marginal() {
        let k = kernel(1.0);
        let g = mu_solver(&k, 0.01, 3.0).unwrap();
        for (j, s) in g.s_grid.iter().enumerate() {
            assert!((g.value(0, j) - (-s).exp()).abs() < 1e-14);
        }
        let c = solve_volterra(&k, 0.01, 3.0).unwrap();
        for (q, psi) in g.marginal.iter().zip(&c.psi) {
            // Trapezoid error of the initial mass, h²/12 relative.
            assert!((q - psi).abs() < 1e-5, "{q} vs {psi}");
        }
    }

    #[test]
    fn marginal_needs_only_unit_mass() {
        let k = kernel(1.0);
        let opts = MuOptions {
            initial: InitialAgeLaw::Exponential { rate: 3.0 },
            output_stride: 10,
            s_max: None,
        };
        let g = mu_solver_with(&k, 0.005, 3.0, &opts).unwrap();
        let e = mu_solver(&k, 0.005, 3.0).unwrap();
        for (a, b) in g.marginal.iter().zip(&e.marginal).step_by(20) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }

    #[test]
    fn b_is_sigma_plus_hazard() {
        let d = default_distribution();
        let b = b_coefficient(d, 1.0, 0.25, 3.0);
        let p = 1.0 - 0.5 + 12.0 * 0.0625 / (PI * PI);
        let pd = -2.0 + 24.0 * 0.25 / (PI * PI);
        assert!((b - (1.0 - pd / p)).abs() < 1e-8);
    }
}
