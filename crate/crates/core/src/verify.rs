//! The acceptance suite: eleven end-to-end checks of the library against
//! closed forms and independent numerical oracles.
//!
//! Each check returns a [`CriterionResult`] with a pass flag and the measured
//! numbers. [`Mode::Quick`] shrinks the large tail-fit simulation (and its
//! window accordingly) so the whole suite fits in well under a minute. The
//! other Monte Carlo checks keep their sample sizes: below about 10⁶ their
//! ε-trends drown in sampling noise.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp_dist::{default_distribution, default_law, PathDistribution};
use crate::lattice::{ks_distance, sample_empirical, uniform_grid, LatticeConfig};
use crate::quadrature::{integrate, Tolerance};
use crate::renewal::{
    age_density_closed_form, convolution_powers, mu_solver_with, solve_volterra, InitialAgeLaw,
    MuOptions, RenewalKernel,
};
use crate::special::exp_integral_e1_from_ln;
use crate::spectral::{c_sigma, feller_limit, find_xi};
use crate::transport::{fit_log_linear, fit_rate, relative_l1, simulate, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Full,
    Quick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub mode: Mode,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Full,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl CriterionResult {
    /// One-line summary: `criterion N [PASS] name: detail; detail`.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {} ({:.1} s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.details.join("; ")
        )
    }
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "free-path identities"),
    (2, "tail law"),
    (3, "kernel subcriticality"),
    (4, "root contract"),
    (5, "asymptotic trends"),
    (6, "solver oracle equivalence"),
    (7, "Feller limit"),
    (8, "age-structure consistency"),
    (9, "geometry oracle"),
    (10, "free-path homogenization"),
    (11, "end-to-end decay"),
];

/// Accumulates sub-checks of one criterion.
struct Checks {
    passed: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if !ok {
            self.passed = false;
        }
        self.details.push(if ok { detail } else { format!("FAILED {detail}") });
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }
}

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .ok_or_else(|| Error::config(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let mut c = Checks::new();
    match id {
        1 => free_path_identities(&mut c)?,
        2 => tail_law(&mut c)?,
        3 => subcriticality(&mut c)?,
        4 => root_contract(&mut c)?,
        5 => asymptotic_trends(&mut c)?,
        6 => solver_equivalence(&mut c)?,
        7 => feller(&mut c)?,
        8 => age_structure(&mut c)?,
        9 => geometry(&mut c, opts)?,
        10 => homogenization(&mut c, opts)?,
        _ => end_to_end(&mut c, opts)?,
    }
    Ok(CriterionResult {
        id,
        name,
        passed: c.passed,
        details: c.details,
        elapsed: start.elapsed(),
    })
}

/// Runs every criterion; a criterion that errors is reported as failed.
pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&(id, name)| {
            let start = Instant::now();
            run_criterion(id, opts).unwrap_or_else(|e| CriterionResult {
                id,
                name,
                passed: false,
                details: vec![format!("error: {e}")],
                elapsed: start.elapsed(),
            })
        })
        .collect()
}

fn kernel(sigma: f64) -> Result<RenewalKernel> {
    RenewalKernel::with_default_distribution(sigma)
}

/// One-sided limit of `f` at `c` from the side `dir = ±1`, by linear
/// extrapolation from `c + dir·δ` and `c + 2·dir·δ`.
fn one_sided<F: Fn(f64) -> Result<f64>>(f: &F, c: f64, dir: f64, delta: f64) -> Result<f64> {
    Ok(2.0 * f(c + dir * delta)? - f(c + 2.0 * dir * delta)?)
}

fn free_path_identities(c: &mut Checks) -> Result<()> {
    let law = default_law();
    let p0 = law.p_of_t(0.0)?;
    c.check((p0 - 1.0).abs() <= 1e-6, format!("p(0) = {p0:.12}"));
    let pd0 = law.p_dot(0.0)?;
    c.check((pd0 + 2.0).abs() <= 1e-4, format!("ṗ(0) = {pd0:.12}"));
    let total = law.upsilon_integral()?;
    c.check((total - 2.0).abs() <= 1e-4, format!("∫Υ = {total:.12}"));
    let u = |t: f64| law.upsilon(t);
    let raw = (u(0.5 - 1e-5)? - u(0.5 + 1e-5)?).abs();
    c.check(raw <= 1e-6, format!("|Υ(1/2-δ) - Υ(1/2+δ)| = {raw:.2e} at δ = 1e-5"));
    for &at in &[0.5, 1.0] {
        let jump = (one_sided(&u, at, -1.0, 1e-5)? - one_sided(&u, at, 1.0, 1e-5)?).abs();
        c.check(jump <= 1e-6, format!("one-sided limits of Υ at {at} differ by {jump:.2e}"));
    }
    Ok(())
}

fn tail_law(c: &mut Checks) -> Result<()> {
    let p = default_law().p_of_t(100.0)?;
    let dev = (100.0 * p * PI * PI - 1.0).abs();
    c.check(dev <= 0.05, format!("|100·p(100)·π² - 1| = {dev:.4e}"));
    Ok(())
}

/// `∫_0^∞ e^{-λt} f(t) dt` for `f = p` or `ṗ` of the tabulated law, by
/// adaptive Gauss–Kronrod over the table plus the closed-form continuation
/// tail. Independent of the per-cell rule used inside the library.
fn adaptive_laplace(d: &PathDistribution, ln_lambda: f64, derivative: bool) -> Result<f64> {
    let lambda = ln_lambda.exp();
    let t_max = d.t_max();
    let cutoff = if lambda > 0.0 { t_max.min(745.0 / lambda) } else { t_max };
    let n = (cutoff * 2.0).ceil().max(1.0) as usize;
    let pts: Vec<f64> = (0..=n).map(|k| cutoff * k as f64 / n as f64).collect();
    let tol = Tolerance { abs: 1e-13, rel: 1e-13 };
    let body = integrate(
        |t| {
            let (p, pd) = d.p_and_pdot(t);
            (-lambda * t).exp() * if derivative { pd } else { p }
        },
        &pts,
        tol,
        200_000,
    )
    .map_err(|e| Error::Quadrature {
        t: cutoff,
        abs_error: e.best.abs_error,
        intervals: e.best.intervals,
    })?
    .value;
    if cutoff < t_max {
        return Ok(body);
    }
    let a = d.continuation_coefficient();
    let e1 = exp_integral_e1_from_ln(ln_lambda + t_max.ln());
    let tail = if derivative {
        -a * ((-lambda * t_max).exp() / t_max - lambda * e1)
    } else {
        a * e1
    };
    Ok(body + tail)
}

fn subcriticality(c: &mut Checks) -> Result<()> {
    let d = default_distribution();
    for &sigma in &[0.01, 0.1, 1.0, 10.0, 100.0] {
        let k = kernel(sigma)?;
        let lhs = k.total_integral();
        let rhs = k.total_integral_by_parts();
        let lhs_q = sigma * adaptive_laplace(d, sigma.ln(), false)?;
        let rhs_q = 1.0 + adaptive_laplace(d, sigma.ln(), true)?;
        c.check(lhs < 1.0, format!("σ={sigma}: ∫κ = {lhs:.10}"));
        c.check(
            (lhs - rhs).abs() <= 1e-8 && (lhs_q - rhs_q).abs() <= 1e-8 && (lhs - lhs_q).abs() <= 1e-8,
            format!(
                "σ={sigma}: by parts {:.1e}, adaptive by parts {:.1e}, rule vs adaptive {:.1e}",
                (lhs - rhs).abs(),
                (lhs_q - rhs_q).abs(),
                (lhs - lhs_q).abs()
            ),
        );
    }
    Ok(())
}

fn root_contract(c: &mut Checks) -> Result<()> {
    let d = default_distribution();
    for &sigma in &[0.1, 1.0, 10.0] {
        let k = kernel(sigma)?;
        let r = find_xi(&k)?;
        // ξ > -σ is carried by ln λ: for small σ, λ is below f64 resolution
        // relative to σ and ξ itself rounds to -σ.
        let inside = r.ln_lambda.is_finite() && r.ln_lambda < sigma.ln() && r.xi < 0.0;
        c.check(inside, format!("σ={sigma}: ξ = {:.12}, ln λ = {:.6}", r.xi, r.ln_lambda));
        // Independent residual by adaptive quadrature, also in ln λ.
        let residual = (sigma * adaptive_laplace(d, r.ln_lambda, false)? - 1.0).abs();
        c.check(
            r.residual <= 1e-10 && residual <= 1e-10,
            format!("σ={sigma}: residual {:.1e}, adaptive residual {residual:.1e}", r.residual),
        );
        let m = d.laplace_moments(r.ln_lambda);
        let q = m.pdot / m.p;
        c.check((q - r.xi).abs() <= 1e-6, format!("σ={sigma}: quotient formula off by {:.1e}", (q - r.xi).abs()));
    }
    Ok(())
}

fn asymptotic_trends(c: &mut Checks) -> Result<()> {
    let mut small = Vec::new();
    for &sigma in &[1.0, 0.1, 0.01] {
        let r = find_xi(&kernel(sigma)?)?;
        small.push((sigma, r.ln_lambda - f64::ln(sigma)));
    }
    let dec = small.windows(2).all(|w| w[1].1 < w[0].1);
    c.check(
        dec,
        format!(
            "ln(λ/σ) at σ = 1, 0.1, 0.01: {}",
            small.iter().map(|s| format!("{:.4}", s.1)).collect::<Vec<_>>().join(", ")
        ),
    );
    let mut large = Vec::new();
    for &sigma in &[10.0, 100.0, 1000.0] {
        let r = find_xi(&kernel(sigma)?)?;
        large.push((r.xi + 2.0).abs());
    }
    let dec = large.windows(2).all(|w| w[1] < w[0]);
    c.check(
        dec && large[2] <= 0.1,
        format!(
            "|ξ+2| at σ = 10, 100, 1000: {}",
            large.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    );
    Ok(())
}

fn solver_equivalence(c: &mut Checks) -> Result<()> {
    for &sigma in &[0.5, 1.0, 2.0] {
        let k = kernel(sigma)?;
        let v = solve_volterra(&k, 1e-3, 20.0)?;
        let s = convolution_powers(&k, 200, 1e-3, 20.0)?;
        let sup = v
            .psi
            .iter()
            .zip(&s.psi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c.check(sup <= 1e-6, format!("σ={sigma}: sup|Volterra - Σκ^{{*n}}| = {sup:.2e}"));
    }
    Ok(())
}

fn feller(c: &mut Checks) -> Result<()> {
    // The horizon 40/|ξ| reaches the renewal limit only when λ·40/|ξ| is
    // large; at σ = 1, λ ≈ 1.6e-3 and the limit needs t ≫ 600.
    for &(sigma, gating) in &[(2.0, true), (10.0, true), (1.0, false)] {
        let k = kernel(sigma)?;
        let r = find_xi(&k)?;
        let horizon = 40.0 / r.xi.abs();
        let h = 1e-3;
        let curve = solve_volterra(&k, h, horizon)?;
        let t_end = curve.horizon();
        let value = curve.psi.last().copied().unwrap_or(0.0) * (-r.xi * t_end).exp();
        let limit = feller_limit(&k, &r);
        let rel = (value / limit - 1.0).abs();
        let detail = format!(
            "σ={sigma}: ψe^{{-ξt}} at t = {t_end:.3} is {value:.6e}, limit {limit:.6e}, off by {:.3}%",
            100.0 * rel
        );
        if gating {
            c.check(rel <= 0.01, detail);
            let amp = 2.0 * PI * sigma * c_sigma(&k, &r, 1.0);
            c.check(
                (amp / limit - 1.0).abs() <= 1e-12,
                format!("σ={sigma}: 2πσ·C_σ = {amp:.6e}"),
            );
        } else {
            c.note(format!("informational, {detail}"));
        }
    }
    Ok(())
}

fn age_structure(c: &mut Checks) -> Result<()> {
    let sigma = 1.0;
    let (h, horizon) = (1e-3, 10.0);
    let k = kernel(sigma)?;
    let curve = solve_volterra(&k, h, horizon)?;
    let opts = MuOptions {
        initial: InitialAgeLaw::Exponential { rate: sigma },
        output_stride: 10,
        s_max: None,
    };
    let grid = mu_solver_with(&k, h, horizon, &opts)?;

    let marginal = grid
        .marginal
        .iter()
        .zip(&curve.psi)
        .map(|(q, psi)| (q - psi / sigma).abs())
        .fold(0.0, f64::max);
    c.check(marginal <= 1e-5, format!("sup|∫μ ds - ψ/σ| = {marginal:.2e}"));

    let mut gap: f64 = 0.0;
    let mut positive = true;
    let mut bounded = true;
    let cap = sigma * (sigma * horizon).exp();
    for (i, &t) in grid.t_grid.iter().enumerate() {
        for (j, &s) in grid.s_grid.iter().enumerate() {
            let mu = grid.value(i, j);
            positive &= mu >= 0.0;
            bounded &= mu <= cap * (-sigma * s).exp() * (1.0 + 1e-12);
            let m = age_density_closed_form(&k, &curve, t, s)?;
            gap = gap.max((m - mu).abs());
        }
    }
    c.check(gap <= 1e-5, format!("sup|m - μ| on {}×{} nodes = {gap:.2e}", grid.t_grid.len(), grid.s_grid.len()));
    c.check(positive && bounded, "0 <= μ <= σe^{σT}e^{-σs} at every node".to_string());
    let first = grid
        .s_grid
        .iter()
        .enumerate()
        .map(|(j, &s)| (grid.value(0, j) - sigma * (-sigma * s).exp()).abs())
        .fold(0.0, f64::max);
    c.check(first <= 1e-14, format!("sup|μ(0,s) - σe^{{-σs}}| = {first:.1e}"));
    Ok(())
}

/// Sphere tracing on the distance field `|y - round(y)| - r` (cell units):
/// an oracle for the ray walk that shares none of its logic.
pub fn sphere_traced_free_path(x: [f64; 2], v: [f64; 2], config: &LatticeConfig) -> f64 {
    let eps = config.epsilon;
    let r = config.scaled_radius();
    let cap = config.t_cap / eps;
    // Position is advanced incrementally and kept in the unit cell, and the
    // travelled distance is summed with compensation, so tiny steps along
    // grazing rays far from the start are neither lost nor stalled.
    let mut y = [x[0] / eps, x[1] / eps];
    let (mut t, mut carry) = (0.0f64, 0.0f64);
    while t < cap {
        y = [y[0] - y[0].floor(), y[1] - y[1].floor()];
        let dx = y[0] - y[0].round();
        let dy = y[1] - y[1].round();
        let d = (dx * dx + dy * dy).sqrt() - r;
        if d < 1e-13 {
            return t * eps;
        }
        y = [y[0] + d * v[0], y[1] + d * v[1]];
        let step = d - carry;
        let next = t + step;
        carry = (next - t) - step;
        t = next;
    }
    config.t_cap
}

fn geometry(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    use rand::Rng;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut rng = crate::rng::stream(opts.seed, u64::MAX);
    for &eps in &[0.1, 0.05, 0.02, 0.01] {
        let cfg = LatticeConfig::new(eps)?;
        let r = cfg.scaled_radius();
        for _ in 0..250 {
            let y = loop {
                let y = [rng.gen::<f64>(), rng.gen::<f64>()];
                let (dx, dy) = (y[0] - y[0].round(), y[1] - y[1].round());
                if dx * dx + dy * dy > r * r {
                    break y;
                }
            };
            let a = 2.0 * PI * rng.gen::<f64>();
            let x = [y[0] * eps, y[1] * eps];
            let v = [a.cos(), a.sin()];
            let fast = crate::lattice::free_path(x, v, &cfg)?;
            let slow = sphere_traced_free_path(x, v, &cfg);
            worst = worst.max((fast - slow).abs() / eps);
            cases += 1;
        }
    }
    c.check(worst <= 1e-6, format!("{cases} cases, max |Δ|/ε = {worst:.2e}"));
    let cfg = LatticeConfig::new(0.1)?;
    let mut channels = true;
    for (x, v) in [
        ([0.05, 0.0], [0.0, 1.0]),
        ([0.0, 0.05], [1.0, 0.0]),
        ([0.05, 0.03], [0.0, -1.0]),
    ] {
        let (t, capped) = crate::lattice::trace(x, v, &cfg)?;
        channels &= capped && t == cfg.t_cap;
    }
    c.check(channels, "channel directions return t_cap".to_string());
    let head_on = crate::lattice::free_path([0.05, 0.0], [-1.0, 0.0], &cfg)?;
    c.check((head_on - 0.04).abs() <= 1e-14, format!("head-on path {head_on}"));
    Ok(())
}

fn homogenization(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    let d = default_distribution();
    let n = match opts.mode {
        Mode::Full | Mode::Quick => 1_000_000,
    };
    let grid = uniform_grid(0.1, 10.0, 991);
    let mut gaps = Vec::new();
    for &eps in &[1e-2, 1e-3] {
        let tail = sample_empirical(&LatticeConfig::new(eps)?, n, opts.seed, &grid)?;
        gaps.push(ks_distance(&tail, d, (0.1, 10.0)));
    }
    c.check(gaps[1] <= 0.02, format!("n={n}: sup|Φ̂ - p| at ε=1e-3 is {:.3e}", gaps[1]));
    c.check(
        gaps[1] < gaps[0],
        format!("gap shrinks from ε=1e-2 ({:.3e}) to ε=1e-3 ({:.3e})", gaps[0], gaps[1]),
    );
    // Where the bias is above the sampling noise the ε-trend is visible.
    let mut coarse = Vec::new();
    for &eps in &[0.1, 0.05, 0.02] {
        let tail = sample_empirical(&LatticeConfig::new(eps)?, n, opts.seed, &grid)?;
        coarse.push(ks_distance(&tail, d, (0.1, 10.0)));
    }
    c.note(format!(
        "informational, gap at ε = 0.1, 0.05, 0.02: {:.3e}, {:.3e}, {:.3e}",
        coarse[0], coarse[1], coarse[2]
    ));
    Ok(())
}

fn end_to_end(c: &mut Checks, opts: &VerifyOptions) -> Result<()> {
    let sigma = 1.0;
    let horizon = 10.0;
    let (n, n_fit, window) = match opts.mode {
        Mode::Full => (1_000_000, 50_000_000, (4.0, 10.0)),
        Mode::Quick => (1_000_000, 5_000_000, (4.0, 8.0)),
    };
    let k = Arc::new(kernel(sigma)?);
    let renewal = solve_volterra(&k, 1e-3, horizon)?.survival();
    let on_grid = |cfg: &SimulationConfig| -> Vec<f64> {
        cfg.times()
            .iter()
            .map(|t| renewal[(t / 1e-3).round() as usize])
            .collect()
    };

    // (a) relative L¹ against the renewal mass, at two lattice spacings.
    let mut l1 = Vec::new();
    for &eps in &[1e-2, 5e-3] {
        let cfg = SimulationConfig::new(sigma, LatticeConfig::new(eps)?, n, horizon, opts.seed);
        let out = simulate(&cfg)?;
        l1.push(relative_l1(&out.curve.survival, &on_grid(&cfg)));
    }
    c.check(l1[1] <= 0.15, format!("(a) n={n}: relative L¹ at ε=5e-3 is {:.3e}", l1[1]));
    c.check(
        l1[1] < l1[0],
        format!("(a) L¹ improves from ε=1e-2 ({:.3e}) to ε=5e-3 ({:.3e})", l1[0], l1[1]),
    );

    // (b) tail slope against ξ_1.
    let xi = find_xi(&k)?.xi;
    let lattice = LatticeConfig::new(5e-3)?;
    let mut cfg = SimulationConfig::new(sigma, lattice, n_fit, horizon, opts.seed);
    cfg.n_bins = 100;
    let big = simulate(&cfg)?;
    let fit = fit_rate(&big.curve, window)?;
    let tol = (3.0 * fit.stderr).max(0.15 * xi.abs());
    c.check(
        (fit.slope - xi).abs() <= tol,
        format!(
            "(b) n={n_fit}: slope on [{}, {}] is {:.4} ± {:.4}, ξ_1 = {xi:.6}, |Δ| = {:.4} <= {tol:.4}",
            window.0,
            window.1,
            fit.slope,
            fit.stderr,
            (fit.slope - xi).abs()
        ),
    );

    // (c) initial ages do not affect survival.
    let base = SimulationConfig::new(sigma, lattice, n, horizon, opts.seed);
    let mut point = base.clone();
    point.initial_age = InitialAgeLaw::PointMass;
    let a = simulate(&base)?.curve;
    let same_stream = simulate(&point)?.curve;
    let within = a
        .survival
        .iter()
        .zip(&same_stream.survival)
        .zip(&a.stderr)
        .all(|((x, y), e)| (x - y).abs() <= 3.0 * e);
    c.check(
        within,
        format!(
            "(c) same streams, Exp(σ) vs point-mass ages: within 3 binomial SE (identical: {})",
            a.survival == same_stream.survival
        ),
    );
    // Independent streams: S is one minus the empirical law of the death
    // time, so the two curves are compared with a two-sample KS test at
    // level 0.001. The largest pointwise z-score is reported only, since its
    // maximum over a whole grid of bins is not a calibrated statistic.
    point.seed = opts.seed.wrapping_add(1);
    let b = simulate(&point)?.curve;
    let ks = a
        .survival
        .iter()
        .zip(&b.survival)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let crit = 1.95 * (2.0 / n as f64).sqrt();
    let worst = a
        .survival
        .iter()
        .zip(&b.survival)
        .zip(a.stderr.iter().zip(&b.stderr))
        .filter(|(_, (ea, eb))| **ea > 0.0 || **eb > 0.0)
        .map(|((x, y), (ea, eb))| (x - y).abs() / (ea * ea + eb * eb).sqrt())
        .fold(0.0, f64::max);
    c.check(
        ks <= crit,
        format!("(c) independent streams: sup|ΔS| = {ks:.3e} <= KS critical {crit:.3e}"),
    );
    c.note(format!("(c) informational, largest pointwise |ΔS|/SE = {worst:.2}"));

    // (d) collisionless decay is algebraic.
    let free = simulate(&SimulationConfig::new(0.0, lattice, n, horizon, opts.seed))?.curve;
    let lin0 = fit_rate(&free, (2.0, 10.0))?;
    let pts: Vec<(f64, f64)> = free
        .times
        .iter()
        .zip(&free.survival)
        .filter(|(t, _)| **t >= 2.0)
        .map(|(t, s)| (t.ln(), *s))
        .collect();
    let loglog = fit_log_linear(&pts)?;
    c.check(
        lin0.rms_residual >= 3.0 * fit.rms_residual
            && loglog.rms_residual <= 0.2 * lin0.rms_residual
            && (loglog.slope + 1.0).abs() <= 0.25,
        format!(
            "(d) σ=0 on [2,10]: exponential-fit residual {:.4} vs σ=1 {:.4}; power-law fit residual {:.4}, exponent {:.3}",
            lin0.rms_residual, fit.rms_residual, loglog.rms_residual, loglog.slope
        ),
    );
    Ok(())
}
