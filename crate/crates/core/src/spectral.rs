//! Exponential decay rate of the homogenized mass.
//!
//! The mass decays like `C_σ e^{ξ_σ t}` where `ξ_σ ∈ (-σ, 0)` is the root of
//! `L(ξ) = ∫_0^∞ e^{-ξt} κ(t) dt = σ ∫_0^∞ e^{-λt} p(t) dt = 1`, with
//! `λ = σ + ξ`. For small `σ` the root sits extremely close to `-σ` (`λ`
//! falls below the smallest `f64` near `σ = 0.01`), so the search runs in
//! `q = ln λ` and reports `ln λ` alongside `ξ`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::renewal::RenewalKernel;

/// Default lower offset of the initial bracket, relative to `σ`.
pub const DEFAULT_BRACKET_OFFSET: f64 = 1e-6;
/// Bisection stops once the bracket in `ln λ` is this narrow.
pub const BISECTION_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub sigma: f64,
    /// `λ - σ`. Rounds to exactly `-σ` once `λ < σ·2^{-53}`.
    pub xi: f64,
    pub lambda: f64,
    pub ln_lambda: f64,
    /// `C_σ` per unit initial mass.
    pub c_multiplier: f64,
    /// `|L(ξ) - 1|` at the returned root.
    pub residual: f64,
    pub iterations: usize,
}

/// `L(ξ) = ∫ e^{-ξt} κ(t) dt` for `ξ > -σ`.
pub fn laplace_kappa(kernel: &RenewalKernel, xi: f64) -> Result<f64> {
    let lambda = kernel.sigma() + xi;
    if !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "Laplace transform needs ξ > -σ, got ξ = {xi}, σ = {}",
            kernel.sigma()
        )));
    }
    Ok(laplace_kappa_ln(kernel, lambda.ln()))
}

/// `L` as a function of `ln λ`.
pub fn laplace_kappa_ln(kernel: &RenewalKernel, ln_lambda: f64) -> f64 {
    kernel.sigma() * kernel.distribution().laplace_moments(ln_lambda).p
}

/// Root of `L(ξ) = 1` with the default bracket.
pub fn find_xi(kernel: &RenewalKernel) -> Result<RateResult> {
    find_xi_with(kernel, DEFAULT_BRACKET_OFFSET)
}

/// Root of `L(ξ) = 1`, bracketing `λ` in `[δσ, σ]`.
///
/// `L` decreases in `λ` and is below one at `λ = σ` (some flights end in a
/// hole). If `L(δσ) <= 1` the lower end is pushed down in `ln λ` until the
/// sign changes. Bisection narrows the bracket to [`BISECTION_WIDTH`], and a
/// secant step through its ends gives the final root.
pub fn find_xi_with(kernel: &RenewalKernel, bracket_offset: f64) -> Result<RateResult> {
    let sigma = kernel.sigma();
    if !(bracket_offset > 0.0 && bracket_offset < 1.0) {
        return Err(Error::config(format!(
            "bracket offset must lie in (0, 1), got {bracket_offset}"
        )));
    }
    let f = |q: f64| laplace_kappa_ln(kernel, q) - 1.0;
    let mut hi = sigma.ln();
    let mut f_hi = f(hi);
    let mut lo = (bracket_offset * sigma).ln();
    let mut f_lo = f(lo);
    let bracket_error = |lo: f64, hi: f64, f_lo: f64, f_hi: f64| Error::Bracket {
        sigma,
        lo: lo.exp() - sigma,
        hi: hi.exp() - sigma,
        f_lo,
        f_hi,
    };
    if !(f_hi < 0.0) {
        return Err(bracket_error(lo, hi, f_lo, f_hi));
    }
    let mut expansions = 0;
    while !(f_lo > 0.0) {
        if expansions >= 60 || lo < -1e5 {
            return Err(bracket_error(lo, hi, f_lo, f_hi));
        }
        hi = lo;
        f_hi = f_lo;
        lo = 2.0 * lo - 10.0;
        f_lo = f(lo);
        expansions += 1;
    }

    let mut iterations = 0;
    while hi - lo > BISECTION_WIDTH * lo.abs().max(1.0) && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            f_lo = 0.0;
            f_hi = 0.0;
            break;
        }
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let mut q = if f_lo != f_hi {
        lo - f_lo * (hi - lo) / (f_hi - f_lo)
    } else {
        lo
    };
    if !(lo..=hi).contains(&q) {
        q = 0.5 * (lo + hi);
    }
    let residual = f(q).abs();

    let lambda = q.exp();
    let xi = lambda - sigma;
    let mut result = RateResult {
        sigma,
        xi,
        lambda,
        ln_lambda: q,
        c_multiplier: 0.0,
        residual,
        iterations,
    };
    result.c_multiplier = c_sigma(kernel, &result, 1.0);
    Ok(result)
}

/// `∫ t p(t) e^{-λt} dt` at the root.
pub fn first_moment(kernel: &RenewalKernel, rate: &RateResult) -> f64 {
    kernel.distribution().laplace_moments(rate.ln_lambda).tp
}

/// Limit of `ψ(t) e^{-ξt}`, i.e. `1/∫ t e^{-ξt} κ(t) dt`.
pub fn feller_limit(kernel: &RenewalKernel, rate: &RateResult) -> f64 {
    1.0 / (kernel.sigma() * first_moment(kernel, rate))
}

/// Amplitude `C_σ` of `M(t) ~ C_σ e^{ξt}` for initial mass `m0`, with
/// `M = m0·ψ/(2πσ)`: `C_σ = m0 / (2π σ² ∫ t p e^{-λt})`.
pub fn c_sigma(kernel: &RenewalKernel, rate: &RateResult, m0: f64) -> f64 {
    let sigma = kernel.sigma();
    m0 / (2.0 * PI * sigma * sigma * first_moment(kernel, rate))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub sigma: f64,
    pub xi: f64,
    pub ln_lambda: f64,
    /// `ln(λ/σ)`.
    pub ln_lambda_over_sigma: f64,
    pub distance_to_minus_two: f64,
    /// `|σ ∫ e^{-λt} p - 1|`.
    pub unit_mass_error: f64,
    /// `∫ e^{-λt} ṗ / ∫ e^{-λt} p`.
    pub quotient_xi: f64,
    pub quotient_error: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub rows: Vec<DiagnosticRow>,
    /// `ln(λ/σ)` strictly decreases as `σ` decreases over the entries with
    /// `σ <= 1`.
    pub small_sigma_trend: bool,
    /// `|ξ + 2|` strictly decreases as `σ` increases over the entries with
    /// `σ >= 10`.
    pub large_sigma_trend: bool,
}

/// Root and identity checks across a list of scattering rates.
///
/// At the root `σ∫e^{-λt}p = 1`, and integrating by parts gives
/// `ξ = ∫e^{-λt}ṗ / ∫e^{-λt}p`; both are reported as errors.
pub fn asymptotic_diagnostics(
    kernel_for: impl Fn(f64) -> Result<RenewalKernel>,
    sigmas: &[f64],
) -> Result<TrendReport> {
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let kernel = kernel_for(sigma)?;
        let rate = find_xi(&kernel)?;
        let m = kernel.distribution().laplace_moments(rate.ln_lambda);
        let quotient_xi = m.pdot / m.p;
        rows.push(DiagnosticRow {
            sigma,
            xi: rate.xi,
            ln_lambda: rate.ln_lambda,
            ln_lambda_over_sigma: rate.ln_lambda - sigma.ln(),
            distance_to_minus_two: (rate.xi + 2.0).abs(),
            unit_mass_error: (sigma * m.p - 1.0).abs(),
            quotient_xi,
            quotient_error: (quotient_xi - rate.xi).abs(),
            residual: rate.residual,
        });
    }
    let mut by_sigma = rows.clone();
    by_sigma.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
    let small: Vec<_> = by_sigma.iter().filter(|r| r.sigma <= 1.0).collect();
    let large: Vec<_> = by_sigma.iter().filter(|r| r.sigma >= 10.0).collect();
    let small_sigma_trend = small
        .windows(2)
        .all(|w| w[0].ln_lambda_over_sigma < w[1].ln_lambda_over_sigma);
    let large_sigma_trend = large
        .windows(2)
        .all(|w| w[1].distance_to_minus_two < w[0].distance_to_minus_two);
    Ok(TrendReport {
        rows,
        small_sigma_trend,
        large_sigma_trend,
    })
}

pub fn write_rates_csv<W: Write>(rates: &[RateResult], mut out: W) -> Result<()> {
    writeln!(out, "sigma,xi,lambda,residual,c_multiplier")?;
    for r in rates {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.3e},{:.16e}",
            r.sigma, r.xi, r.lambda, r.residual, r.c_multiplier
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(sigma: f64) -> RenewalKernel {
        RenewalKernel::with_default_distribution(sigma).unwrap()
    }

    #[test]
    fn root_is_inside_the_strip() {
        for &sigma in &[0.1, 1.0, 10.0] {
            let k = kernel(sigma);
            let r = find_xi(&k).unwrap();
            assert!(r.residual <= 1e-10, "{r:?}");
            assert!(r.ln_lambda < sigma.ln());
            assert!(r.xi < 0.0 && r.xi >= -sigma);
        }
    }

    #[test]
    fn laplace_kappa_is_decreasing() {
        let k = kernel(1.0);
        let a = laplace_kappa(&k, -0.9).unwrap();
        let b = laplace_kappa(&k, -0.5).unwrap();
        let c = laplace_kappa(&k, 0.0).unwrap();
        assert!(a > b && b > c);
        assert!((c - k.total_integral()).abs() < 1e-15);
        assert!(laplace_kappa(&k, -1.0).is_err());
    }

    #[test]
    fn tiny_sigma_needs_log_bracket() {
        let k = kernel(0.01);
        let r = find_xi(&k).unwrap();
        assert!(r.ln_lambda < -700.0, "{r:?}");
        assert!(r.residual <= 1e-10);
        assert_eq!(r.lambda, 0.0);
    }

    #[test]
    fn identities_hold_at_the_root() {
        let rep = asymptotic_diagnostics(
            |s| Ok(kernel(s)),
            &[0.3, 2.0, 50.0],
        )
        .unwrap();
        for row in &rep.rows {
            assert!(row.unit_mass_error < 1e-8, "{row:?}");
            assert!(row.quotient_error < 1e-6, "{row:?}");
        }
    }
}
