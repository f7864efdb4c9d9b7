//! The limiting free-path-length law of the periodic Lorentz gas.
//!
//! `Υ` is the piecewise-logarithmic density with `Υ ≡ 24/π²` on `(0, 1/2]`;
//! the survival function is `p(t) = ∫_t^∞ (τ - t) Υ(τ) dτ` and its derivative
//! `ṗ(t) = -∫_t^∞ Υ(τ) dτ`. Both integrals run through adaptive quadrature on
//! `[t, T_cut]` followed by an analytic `A_Υ/τ³` tail.
//!
//! [`PathDistribution`] tabulates `p` and `ṗ` on a uniform grid and
//! interpolates with monotone cubic Hermite splines; it is what the renewal
//! and spectral solvers consume.

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre10_nodes, integrate, Tolerance, DEFAULT_MAX_INTERVALS};

/// `Υ` on its constant branch.
pub const UPSILON_PLATEAU: f64 = 24.0 / (PI * PI);

pub const DEFAULT_SWITCH_WIDTH: f64 = 1e-4;
pub const DEFAULT_T_CUT: f64 = 1e4;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_T_MAX: f64 = 100.0;
pub const DEFAULT_POINTS: usize = 20_001;

/// Above this time the closed form is summed as a power series in `1/t`;
/// the direct expression cancels its first two orders against each other.
const SERIES_FROM: f64 = 2.0;

/// Evaluates `Υ(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsilonEvaluator {
    /// Half-width around `t = 1/2` and `t = 1` inside which the analytic
    /// logarithm factors switch to truncated series.
    pub singular_switch_width: f64,
}

impl Default for UpsilonEvaluator {
    fn default() -> Self {
        UpsilonEvaluator {
            singular_switch_width: DEFAULT_SWITCH_WIDTH,
        }
    }
}

impl UpsilonEvaluator {
    pub fn new(singular_switch_width: f64) -> Result<Self> {
        if !(singular_switch_width > 0.0 && singular_switch_width < 0.1) {
            return Err(Error::config(format!(
                "singular_switch_width must lie in (0, 0.1), got {singular_switch_width}"
            )));
        }
        Ok(UpsilonEvaluator {
            singular_switch_width,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("upsilon requires t > 0, got {t}")));
        }
        Ok(self.value(t))
    }

    /// Unchecked evaluation; `t > 0` is the caller's responsibility.
    pub(crate) fn value(&self, t: f64) -> f64 {
        if t <= 0.5 {
            return UPSILON_PLATEAU;
        }
        if t >= SERIES_FROM {
            return UPSILON_PLATEAU * large_t_series(1.0 / t);
        }
        let width = self.singular_switch_width;
        let shape = if t - 0.5 < width {
            near_half(t)
        } else if (t - 1.0).abs() < width {
            near_one(t)
        } else {
            direct(t)
        };
        UPSILON_PLATEAU * shape.max(0.0)
    }
}

/// `x² ln|x|`, continuously extended by 0 at the origin.
fn x2_ln_abs(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x * x.abs().ln()
    }
}

fn direct(t: f64) -> f64 {
    let a = 1.0 - 0.5 / t;
    let b = 1.0 - 1.0 / t;
    0.5 / t + 2.0 * a * a * (-0.5 / t).ln_1p() - 0.5 * x2_ln_abs(b)
}

/// `t = 1/2 + small`: with `w = 1 - 1/(2t)`, `|1 - 1/t| = 1 - 2w` and its
/// logarithm is expanded to four terms.
fn near_half(t: f64) -> f64 {
    let w = 1.0 - 0.5 / t;
    let y = 2.0 * w;
    let ln_1m_y = -(y + y * y / 2.0 + y * y * y / 3.0 + y * y * y * y / 4.0);
    (1.0 - w) + 2.0 * x2_ln_abs(w) - 0.5 * (1.0 - y) * (1.0 - y) * ln_1m_y
}

/// `t = 1 + small`: with `z = 1 - 1/t`, `1 - 1/(2t) = (1+z)/2` and
/// `ln(1+z)` is expanded to four terms.
fn near_one(t: f64) -> f64 {
    let z = 1.0 - 1.0 / t;
    let a = 0.5 * (1.0 + z);
    let ln_a = -LN_2 + z - z * z / 2.0 + z * z * z / 3.0 - z * z * z * z / 4.0;
    0.5 * (1.0 - z) + 2.0 * a * a * ln_a - 0.5 * x2_ln_abs(z)
}

/// `Σ_{n≥3} x^n (1 - 2^{2-n}) / (n(n-1)(n-2))` with `x = 1/t`; the
/// Taylor expansion of the second closed-form branch, convergent for `t > 1`.
fn large_t_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut xn = x * x * x;
    let mut two_pow = 0.5; // 2^{2-n} at n = 3
    for n in 3..200u32 {
        let nf = n as f64;
        let term = xn * (1.0 - two_pow) / (nf * (nf - 1.0) * (nf - 2.0));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        xn *= x;
        two_pow *= 0.5;
    }
    sum
}

/// Quadrature-backed evaluation of `Υ`, `p` and `ṗ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreePathLaw {
    upsilon: UpsilonEvaluator,
    t_cut: f64,
    tolerance: f64,
    /// `A_Υ` in `Υ(τ) ≈ A_Υ / τ³` beyond `t_cut`.
    tail_amplitude: f64,
}

impl Default for FreePathLaw {
    fn default() -> Self {
        FreePathLaw::new(UpsilonEvaluator::default(), DEFAULT_T_CUT, DEFAULT_TOLERANCE)
            .expect("default parameters are valid")
    }
}

impl FreePathLaw {
    pub fn new(upsilon: UpsilonEvaluator, t_cut: f64, tolerance: f64) -> Result<Self> {
        if !(t_cut >= 4.0) || !t_cut.is_finite() {
            return Err(Error::config(format!("t_cut must be >= 4, got {t_cut}")));
        }
        if !(tolerance > 0.0) {
            return Err(Error::config(format!("tolerance must be positive, got {tolerance}")));
        }
        // Least-squares fit of A in Υ ≈ A/τ³ on [t_cut/2, t_cut].
        const SAMPLES: usize = 65;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..SAMPLES {
            let tau = 0.5 * t_cut * (1.0 + i as f64 / (SAMPLES - 1) as f64);
            let basis = tau.powi(-3);
            num += upsilon.value(tau) * basis;
            den += basis * basis;
        }
        Ok(FreePathLaw {
            upsilon,
            t_cut,
            tolerance,
            tail_amplitude: num / den,
        })
    }

    pub fn upsilon_evaluator(&self) -> &UpsilonEvaluator {
        &self.upsilon
    }

    pub fn t_cut(&self) -> f64 {
        self.t_cut
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn tail_amplitude(&self) -> f64 {
        self.tail_amplitude
    }

    pub fn upsilon(&self, t: f64) -> Result<f64> {
        self.upsilon.eval(t)
    }

    /// Quadrature break points: `t`, the kinks of `Υ`, then a dyadic ladder to `t_cut`.
    fn break_points(&self, t: f64) -> Vec<f64> {
        let mut pts = vec![t];
        let mut knot = 0.5;
        while knot < self.t_cut {
            if knot > t {
                pts.push(knot);
            }
            knot *= 2.0;
        }
        pts.push(self.t_cut);
        pts
    }

    fn quad<F: Fn(f64) -> f64>(&self, t: f64, f: F) -> Result<f64> {
        let pts = self.break_points(t);
        integrate(
            f,
            &pts,
            Tolerance::absolute(self.tolerance),
            DEFAULT_MAX_INTERVALS,
        )
        .map(|e| e.value)
        .map_err(|nc| Error::Quadrature {
            t,
            abs_error: nc.best.abs_error,
            intervals: nc.best.intervals,
        })
    }

    /// `p(t) = ∫_t^∞ (τ - t) Υ(τ) dτ`.
    pub fn p_of_t(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("p requires t >= 0, got {t}")));
        }
        let a = self.tail_amplitude;
        if t >= self.t_cut {
            return Ok(a / (2.0 * t));
        }
        let body = self.quad(t, |tau| (tau - t) * self.upsilon.value(tau))?;
        let tail = a * (1.0 / self.t_cut - t / (2.0 * self.t_cut * self.t_cut));
        Ok((body + tail).min(1.0))
    }

    /// `ṗ(t) = -∫_t^∞ Υ(τ) dτ`.
    pub fn p_dot(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("p_dot requires t >= 0, got {t}")));
        }
        let a = self.tail_amplitude;
        if t >= self.t_cut {
            return Ok(-a / (2.0 * t * t));
        }
        let body = self.quad(t, |tau| self.upsilon.value(tau))?;
        Ok(-(body + a / (2.0 * self.t_cut * self.t_cut)))
    }

    /// `∫_0^∞ Υ`, which equals `-ṗ(0)`.
    pub fn upsilon_integral(&self) -> Result<f64> {
        self.p_dot(0.0).map(|v| -v)
    }

    /// Tabulates `p`, `ṗ` and `Υ` on `n_points` uniform nodes over `[0, t_max]`.
    pub fn tabulate(&self, t_max: f64, n_points: usize) -> Result<PathDistribution> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::config(format!("t_max must be positive, got {t_max}")));
        }
        if n_points < 2 {
            return Err(Error::config(format!("n_points must be >= 2, got {n_points}")));
        }
        let step = t_max / (n_points - 1) as f64;
        let grid: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
        let mut p_values = Vec::with_capacity(n_points);
        let mut pdot_values = Vec::with_capacity(n_points);
        let mut upsilon_values = Vec::with_capacity(n_points);
        for &t in &grid {
            p_values.push(self.p_of_t(t)?);
            pdot_values.push(self.p_dot(t)?);
            upsilon_values.push(if t > 0.0 {
                self.upsilon.value(t)
            } else {
                UPSILON_PLATEAU
            });
        }
        let params = TabulationParams {
            t_max,
            n_points,
            t_cut: self.t_cut,
            tolerance: self.tolerance,
            singular_switch_width: self.upsilon.singular_switch_width,
        };
        let dist = PathDistribution::from_samples(params, grid, p_values, pdot_values, upsilon_values);
        dist.check_invariants()?;
        Ok(dist)
    }
}

/// Shared default law (`T_cut = 10⁴`, tolerance `1e-10`).
pub fn default_law() -> &'static FreePathLaw {
    static LAW: OnceLock<FreePathLaw> = OnceLock::new();
    LAW.get_or_init(FreePathLaw::default)
}

/// Shared default tabulation on `[0, 100]` with 20001 nodes.
pub fn default_distribution() -> &'static PathDistribution {
    static DIST: OnceLock<PathDistribution> = OnceLock::new();
    DIST.get_or_init(|| {
        default_law()
            .tabulate(DEFAULT_T_MAX, DEFAULT_POINTS)
            .expect("default tabulation satisfies its invariants")
    })
}

pub fn upsilon(t: f64) -> Result<f64> {
    default_law().upsilon(t)
}

pub fn p_of_t(t: f64) -> Result<f64> {
    default_law().p_of_t(t)
}

pub fn p_dot(t: f64) -> Result<f64> {
    default_law().p_dot(t)
}

pub fn tabulate(t_max: f64, n_points: usize) -> Result<PathDistribution> {
    default_law().tabulate(t_max, n_points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TabulationParams {
    pub t_max: f64,
    pub n_points: usize,
    pub t_cut: f64,
    pub tolerance: f64,
    pub singular_switch_width: f64,
}

/// Tabulated `p`, `ṗ`, `Υ` with a monotone Hermite interpolant.
///
/// Beyond `t_max` the interpolant continues as `p(t) = t_max·p(t_max)/t`,
/// which keeps the model continuous; `tail_coefficient` is the separately
/// fitted `A` in `p ≈ A/t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDistribution {
    params: TabulationParams,
    step: f64,
    grid: Vec<f64>,
    p_values: Vec<f64>,
    pdot_values: Vec<f64>,
    upsilon_values: Vec<f64>,
    /// Interpolation slopes: `pdot_values` after the Fritsch–Carlson limiter.
    slopes: Vec<f64>,
    tail_coefficient: f64,
    continuation: f64,
}

impl PathDistribution {
    fn from_samples(
        params: TabulationParams,
        grid: Vec<f64>,
        p_values: Vec<f64>,
        pdot_values: Vec<f64>,
        upsilon_values: Vec<f64>,
    ) -> Self {
        let n = grid.len();
        let step = params.t_max / (n - 1) as f64;
        let slopes = fritsch_carlson(&p_values, &pdot_values, step);

        let lo = 0.5 * params.t_max;
        let (sum, count) = grid
            .iter()
            .zip(&p_values)
            .filter(|(t, _)| **t >= lo)
            .fold((0.0, 0usize), |(s, c), (t, p)| (s + t * p, c + 1));
        let tail_coefficient = sum / count as f64;
        let continuation = params.t_max * p_values[n - 1];

        PathDistribution {
            params,
            step,
            grid,
            p_values,
            pdot_values,
            upsilon_values,
            slopes,
            tail_coefficient,
            continuation,
        }
    }

    pub fn params(&self) -> &TabulationParams {
        &self.params
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn pdot_values(&self) -> &[f64] {
        &self.pdot_values
    }

    pub fn upsilon_values(&self) -> &[f64] {
        &self.upsilon_values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_max(&self) -> f64 {
        self.params.t_max
    }

    pub fn tail_coefficient(&self) -> f64 {
        self.tail_coefficient
    }

    /// Coefficient of the `1/t` continuation used beyond `t_max`.
    pub fn continuation_coefficient(&self) -> f64 {
        self.continuation
    }

    /// Interpolated `p(t)`; `t <= 0` returns `p(0)`.
    pub fn p(&self, t: f64) -> f64 {
        self.p_and_pdot(t).0
    }

    /// Derivative of the interpolant.
    pub fn pdot(&self, t: f64) -> f64 {
        self.p_and_pdot(t).1
    }

    pub fn p_and_pdot(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (self.p_values[0], self.slopes[0]);
        }
        if t >= self.params.t_max {
            let c = self.continuation;
            return (c / t, -c / (t * t));
        }
        let n = self.grid.len();
        let h = self.step;
        let i = ((t / h) as usize).min(n - 2);
        let s = (t - self.grid[i]) / h;
        let (p0, p1) = (self.p_values[i], self.p_values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * h * m1;
        let deriv = (6.0 * s2 - 6.0 * s) / h * (p0 - p1)
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (3.0 * s2 - 2.0 * s) * m1;
        (value, deriv)
    }

    /// `(C, C')` with `C/t <= p(t) <= C'/t` on the grid nodes with `t >= t_from`.
    pub fn hyperbolic_bounds(&self, t_from: f64) -> (f64, f64) {
        self.grid
            .iter()
            .zip(&self.p_values)
            .filter(|(t, _)| **t >= t_from && **t > 0.0)
            .map(|(t, p)| t * p)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn check_invariants(&self) -> Result<()> {
        let p = &self.p_values;
        if (p[0] - 1.0).abs() > 1e-6 {
            return Err(Error::Invariant(format!("p(0) = {} differs from 1", p[0])));
        }
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::Invariant(format!("p = {v} outside (0, 1] at t = {}", self.grid[i])));
        }
        if let Some(i) = (1..p.len()).find(|&i| p[i] >= p[i - 1]) {
            return Err(Error::Invariant(format!(
                "p not strictly decreasing at t = {}",
                self.grid[i]
            )));
        }
        if let Some(i) = (1..p.len() - 1).find(|&i| p[i + 1] - 2.0 * p[i] + p[i - 1] < -1e-9) {
            return Err(Error::Invariant(format!("p not convex at t = {}", self.grid[i])));
        }
        if let Some((i, v)) = self.pdot_values.iter().enumerate().find(|(_, v)| **v > 0.0) {
            return Err(Error::Invariant(format!("pdot = {v} > 0 at t = {}", self.grid[i])));
        }
        if (self.pdot_values[0] + 2.0).abs() > 1e-4 {
            return Err(Error::Invariant(format!(
                "pdot(0) = {} differs from -2",
                self.pdot_values[0]
            )));
        }
        Ok(())
    }

    /// Writes `t,p,pdot,upsilon` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,p,pdot,upsilon")?;
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid[i], self.p_values[i], self.pdot_values[i], self.upsilon_values[i]
            )?;
        }
        Ok(())
    }
}

/// Exponentially weighted integrals of the tabulated law over `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceMoments {
    /// `∫ e^{-λt} p(t) dt`
    pub p: f64,
    /// `∫ t e^{-λt} p(t) dt`
    pub tp: f64,
    /// `∫ e^{-λt} ṗ(t) dt`
    pub pdot: f64,
}

impl PathDistribution {
    /// Laplace-type moments at rate `λ = exp(ln_lambda)`.
    ///
    /// Each interpolation cell is integrated with 10-point Gauss–Legendre
    /// panels, subdivided so that `λ·panel <= 1/2`; the `c/t` continuation
    /// past `t_max` is integrated in closed form through `E1`. Taking
    /// `ln λ` keeps the result meaningful when `λ` underflows.
    pub fn laplace_moments(&self, ln_lambda: f64) -> LaplaceMoments {
        let lambda = ln_lambda.exp();
        let h = self.step;
        let n_cells = self.grid.len() - 1;
        let panels = ((lambda * h / 0.5).ceil() as usize).max(1);
        let width = h / panels as f64;

        let (mut sp, mut stp, mut sd) = (0.0, 0.0, 0.0);
        let mut underflow = false;
        'cells: for i in 0..n_cells {
            let t0 = self.grid[i];
            for k in 0..panels {
                let a = t0 + k as f64 * width;
                if lambda * a > 745.0 {
                    underflow = true;
                    break 'cells;
                }
                gauss_legendre10_nodes(a, a + width, |t, w| {
                    let w = w * (-lambda * t).exp();
                    let (p, pd) = self.p_and_pdot(t);
                    sp += w * p;
                    stp += w * t * p;
                    sd += w * pd;
                });
            }
        }

        if !underflow {
            let t_max = self.params.t_max;
            let c = self.continuation;
            let ln_x = ln_lambda + t_max.ln();
            let e1 = crate::special::exp_integral_e1_from_ln(ln_x);
            let decay = (-lambda * t_max).exp();
            sp += c * e1;
            stp += c * (-lambda * t_max - ln_lambda).exp();
            sd -= c * (decay / t_max - lambda * e1);
        }
        LaplaceMoments { p: sp, tp: stp, pdot: sd }
    }
}

/// Limits Hermite slopes so the interpolant is monotone between nodes.
fn fritsch_carlson(values: &[f64], slopes: &[f64], h: f64) -> Vec<f64> {
    let mut m = slopes.to_vec();
    for i in 0..values.len() - 1 {
        let delta = (values[i + 1] - values[i]) / h;
        if delta == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let alpha = m[i] / delta;
        let beta = m[i + 1] / delta;
        if alpha < 0.0 {
            m[i] = 0.0;
        }
        if beta < 0.0 {
            m[i + 1] = 0.0;
        }
        let r2 = alpha * alpha + beta * beta;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m[i] = tau * alpha * delta;
            m[i + 1] = tau * beta * delta;
        }
    }
    m
}

/// One parsed row of a `t,p,pdot,upsilon` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub t: f64,
    pub p: f64,
    pub pdot: f64,
    pub upsilon: f64,
}

/// Checks an exported table against the identities the law must satisfy.
/// Returns the list of failed checks (empty when the table passes).
pub fn verify_table(rows: &[TableRow]) -> Vec<String> {
    let mut failures = Vec::new();
    let Some(first) = rows.first() else {
        return vec!["table is empty".into()];
    };
    if first.t != 0.0 {
        failures.push(format!("first row has t = {}, expected 0", first.t));
    } else {
        if (first.p - 1.0).abs() > 1e-6 {
            failures.push(format!("p(0) = {}", first.p));
        }
        if (first.pdot + 2.0).abs() > 1e-4 {
            failures.push(format!("pdot(0) = {}", first.pdot));
        }
    }
    for w in rows.windows(2) {
        if w[1].t <= w[0].t {
            failures.push(format!("grid not increasing at t = {}", w[1].t));
            break;
        }
        if w[1].p >= w[0].p {
            failures.push(format!("p not decreasing at t = {}", w[1].t));
            break;
        }
    }
    for r in rows {
        if r.t > 0.0 && r.t <= 0.5 && (r.upsilon - UPSILON_PLATEAU).abs() > 1e-12 {
            failures.push(format!("upsilon({}) = {} off the plateau", r.t, r.upsilon));
            break;
        }
        if r.pdot > 0.0 || r.upsilon < 0.0 || !(r.p > 0.0 && r.p <= 1.0) {
            failures.push(format!("sign/range violation at t = {}", r.t));
            break;
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Termwise integration of the large-t series: independent of the
    /// quadrature path, valid for t > 1.
    fn p_series(t: f64) -> f64 {
        let mut sum = 0.0;
        for n in 3..400 {
            let nf = n as f64;
            let a = (1.0 - 2f64.powi(2 - n)) / (nf * (nf - 1.0) * (nf - 2.0));
            sum += a * t.powi(2 - n) / ((nf - 1.0) * (nf - 2.0));
        }
        UPSILON_PLATEAU * sum
    }

    fn pdot_series(t: f64) -> f64 {
        let mut sum = 0.0;
        for n in 3..400 {
            let nf = n as f64;
            let a = (1.0 - 2f64.powi(2 - n)) / (nf * (nf - 1.0) * (nf - 2.0));
            sum += a * t.powi(1 - n) / (nf - 1.0);
        }
        -UPSILON_PLATEAU * sum
    }

    #[test]
    fn plateau_value() {
        let v = upsilon(0.25).unwrap();
        assert!((v - 2.431_708_407_416_107).abs() < 1e-12, "{v}");
        assert_eq!(upsilon(0.5).unwrap(), UPSILON_PLATEAU);
    }

    #[test]
    fn nonpositive_time_is_a_domain_error() {
        assert!(matches!(upsilon(0.0), Err(Error::Domain(_))));
        assert!(matches!(upsilon(-1.0), Err(Error::Domain(_))));
        assert!(matches!(p_of_t(-1e-3), Err(Error::Domain(_))));
        assert!(matches!(p_dot(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn continuity_at_singular_points() {
        let ev = UpsilonEvaluator::default();
        let l = ev.value(0.5 - 1e-5);
        let r = ev.value(0.5 + 1e-5);
        assert!((l - r).abs() <= 1e-6, "jump at 1/2: {l} vs {r}");
        // Υ has a nonzero slope at t = 1, so compare linearly extrapolated
        // one-sided limits.
        for &c in &[0.5, 1.0] {
            let d = 1e-5;
            let left = 2.0 * ev.value(c - d) - ev.value(c - 2.0 * d);
            let right = 2.0 * ev.value(c + d) - ev.value(c + 2.0 * d);
            assert!((left - right).abs() <= 1e-6, "jump at {c}: {left} vs {right}");
        }
        // switch boundaries: series and direct branches agree
        for &c in &[0.5, 1.0] {
            for &side in &[-1.0, 1.0] {
                let t = c + side * DEFAULT_SWITCH_WIDTH;
                if t <= 0.5 {
                    continue;
                }
                let a = ev.value(t * (1.0 - 1e-14));
                let b = ev.value(t * (1.0 + 1e-14));
                assert!((a - b).abs() < 1e-9, "branch seam at {t}: {a} vs {b}");
            }
        }
        assert!(ev.value(1.0).is_finite());
        // the large-t series and the direct form agree at the seam
        let seam = direct(SERIES_FROM) - large_t_series(1.0 / SERIES_FROM);
        assert!(seam.abs() < 1e-14, "{seam}");
    }

    #[test]
    fn density_is_nonnegative() {
        let ev = UpsilonEvaluator::default();
        let mut t = 1e-3;
        while t < 1e5 {
            assert!(ev.value(t) >= 0.0, "negative at {t}");
            t *= 1.01;
        }
    }

    #[test]
    fn tail_amplitude_matches_asymptotics() {
        // Υ ~ (24/π²)(1/12) τ^{-3} = 2/π² τ^{-3}
        let a = default_law().tail_amplitude();
        assert!((a - 2.0 / (PI * PI)).abs() / a < 1e-4, "{a}");
    }

    #[test]
    fn p_closed_form_on_plateau() {
        // p(t) = 1 - 2t + (12/π²) t² for t <= 1/2
        for &t in &[0.0, 0.1, 0.25, 0.5] {
            let exact = 1.0 - 2.0 * t + 12.0 / (PI * PI) * t * t;
            assert!((p_of_t(t).unwrap() - exact).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn normalization_chain() {
        assert!((p_of_t(0.0).unwrap() - 1.0).abs() < 1e-6);
        assert!((p_dot(0.0).unwrap() + 2.0).abs() < 1e-4);
        assert!((default_law().upsilon_integral().unwrap() - 2.0).abs() < 1e-4);
    }

    #[test]
    fn pdot_on_constant_branch() {
        let expected = -2.0 + 0.25 * UPSILON_PLATEAU;
        assert!((p_dot(0.25).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_termwise_series() {
        // The fitted A/τ³ tail carries an O(1/T_cut²) bias of about 1e-9
        // into p; ṗ sees it only at O(1/T_cut³).
        for &t in &[1.5, 2.0, 3.0, 10.0, 100.0, 5000.0] {
            let p = p_of_t(t).unwrap();
            let q = p_series(t);
            assert!((p - q).abs() < 3e-9, "p({t}): {p} vs {q}");
            let pd = p_dot(t).unwrap();
            let qd = pdot_series(t);
            assert!((pd - qd).abs() < 1e-10, "pdot({t}): {pd} vs {qd}");
        }
    }

    #[test]
    fn tail_law_at_100() {
        let v = 100.0 * p_of_t(100.0).unwrap() * PI * PI;
        assert!((v - 1.0).abs() < 0.05, "{v}");
        assert!(p_dot(100.0).unwrap().abs() <= 2e-3);
    }

    #[test]
    fn beyond_cut_uses_tail() {
        let law = default_law();
        let t = 2.0 * law.t_cut();
        let a = law.tail_amplitude();
        assert_eq!(law.p_of_t(t).unwrap(), a / (2.0 * t));
    }

    #[test]
    fn tabulate_small() {
        let d = tabulate(20.0, 2001).unwrap();
        assert_eq!(d.grid().len(), 2001);
        assert!((d.p_values()[0] - 1.0).abs() < 1e-6);
        for (t, p) in d.grid().iter().zip(d.p_values()).step_by(97) {
            assert!((p_of_t(*t).unwrap() - p).abs() < 1e-10);
        }
        let (c, c2) = d.hyperbolic_bounds(1.0);
        assert!(c > 0.0 && c2 < f64::INFINITY && c <= c2);
        let v = p_of_t(10.0).unwrap();
        assert!(c / 10.0 <= v && v <= c2 / 10.0);
    }

    #[test]
    fn tabulate_rejects_bad_arguments() {
        assert!(matches!(tabulate(0.0, 10), Err(Error::Config(_))));
        assert!(matches!(tabulate(1.0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn interpolant_is_monotone_and_consistent() {
        let d = tabulate(5.0, 101).unwrap();
        let mut prev = d.p(0.0);
        let mut t = 0.0;
        while t < 6.0 {
            t += 0.0137;
            let v = d.p(t);
            assert!(v <= prev && v > 0.0 && v <= 1.0);
            prev = v;
            // derivative of interpolant vs central difference of interpolant
            let e = 1e-6;
            if t > e {
                let fd = (d.p(t + e) - d.p(t - e)) / (2.0 * e);
                assert!((fd - d.pdot(t)).abs() < 1e-5, "t={t}");
            }
        }
        // Hermite interpolant against direct evaluation between nodes
        for &t in &[0.123, 0.77, 1.0013, 2.345, 4.99] {
            assert!((d.p(t) - p_of_t(t).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_export_round_trips_through_verifier() {
        let d = tabulate(5.0, 501).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,p,pdot,upsilon"));
        let rows: Vec<TableRow> = lines
            .map(|l| {
                let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
                TableRow { t: v[0], p: v[1], pdot: v[2], upsilon: v[3] }
            })
            .collect();
        assert_eq!(rows.len(), 501);
        // full precision: parsing recovers the stored doubles exactly
        assert_eq!(rows[37].p, d.p_values()[37]);
        assert!(verify_table(&rows).is_empty());
    }

    #[test]
    fn laplace_moments_against_adaptive_quadrature() {
        let d = tabulate(20.0, 2001).unwrap();
        for &lambda in &[0.3, 1.0, 7.0] {
            let m = d.laplace_moments(f64::ln(lambda));
            let tol = Tolerance { abs: 1e-13, rel: 1e-12 };
            let pts: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
            let body = integrate(|t| (-lambda * t).exp() * d.p(t), &pts, tol, 5000)
                .unwrap()
                .value;
            let tail = integrate(
                |s: f64| {
                    if s >= 1.0 {
                        return 0.0;
                    }
                    let t = 20.0 + s / (1.0 - s);
                    (-lambda * t).exp() * d.p(t) / ((1.0 - s) * (1.0 - s))
                },
                &[0.0, 0.5, 0.9, 1.0],
                tol,
                5000,
            )
            .unwrap()
            .value;
            assert!((m.p - body - tail).abs() < 1e-11, "λ={lambda}");
        }
    }

    #[test]
    fn laplace_moments_integrate_by_parts() {
        let d = default_distribution();
        for &lambda in &[1e-3, 0.05, 1.0, 30.0, 900.0] {
            let m = d.laplace_moments(f64::ln(lambda));
            // ∫ e^{-λt} ṗ = -p(0) + λ ∫ e^{-λt} p
            let rhs = -1.0 + lambda * m.p;
            assert!((m.pdot - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "λ={lambda}");
            assert!(m.tp > 0.0 && m.p > 0.0);
        }
    }

    #[test]
    fn laplace_moments_with_underflowing_rate() {
        let d = default_distribution();
        let m = d.laplace_moments(-2000.0);
        assert!(m.p.is_finite() && m.p > 100.0);
        assert!((m.pdot + 1.0).abs() < 1e-12);
    }
}
