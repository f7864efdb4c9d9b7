use perforated::fp_dist::UPSILON_PLATEAU;
use perforated::renewal::{solve_volterra, RenewalKernel};
use perforated::spectral::{c_sigma, feller_limit, find_xi, laplace_kappa};
use perforated::transport::fit_log_linear;

fn kernel(sigma: f64) -> RenewalKernel {
    RenewalKernel::with_default_distribution(sigma).unwrap()
}

#[test]
fn laplace_transform_bounds_and_monotonicity() {
    for sigma in [1.0, 10.0] {
        let v = laplace_kappa(&kernel(sigma), 100.0).unwrap();
        assert!(v > 0.0 && v <= sigma / (sigma + 100.0));
    }
    let k = kernel(1.0);
    let at_zero = laplace_kappa(&k, 0.0).unwrap();
    assert!(at_zero < 1.0);
    assert!((at_zero - k.total_integral()).abs() <= 1e-14);
    assert!(laplace_kappa(&k, -0.5).unwrap() > laplace_kappa(&k, -0.25).unwrap());
    let samples: Vec<f64> = (1..100)
        .map(|i| laplace_kappa(&k, -1.0 + i as f64 * 0.01).unwrap())
        .collect();
    assert!(samples.windows(2).all(|w| w[1] < w[0]));
    assert!(laplace_kappa(&k, -1.0).is_err());
}

#[test]
fn unit_rate_regression() {
    let r = find_xi(&kernel(1.0)).unwrap();
    assert!(r.xi > -1.0 && r.xi < 0.0);
    assert!(r.residual <= 1e-10);
    assert!((r.xi - -0.998373335040).abs() <= 1e-10, "ξ_1 = {}", r.xi);
}

/// ξ_σ falls from -σ towards a minimum and then rises back to -2 from
/// below, where `ξ ≈ -2 + (Υ(0) - 4)/σ`.
#[test]
fn exponent_shape_over_sigma() {
    let xi: Vec<f64> = [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
        .iter()
        .map(|&s| find_xi(&kernel(s)).unwrap().xi)
        .collect();
    assert!(xi[..4].windows(2).all(|w| w[1] < w[0]), "{xi:?}");
    assert!(xi[3..].windows(2).all(|w| w[1] > w[0]), "{xi:?}");
    for (sigma, x) in [(100.0, xi[4]), (1000.0, xi[5])] {
        let expansion = -2.0 + (UPSILON_PLATEAU - 4.0) / sigma;
        assert!((x - expansion).abs() <= 10.0 / (sigma * sigma), "σ={sigma}: {x} vs {expansion}");
    }
}

#[test]
fn amplitude_is_linear_in_initial_mass() {
    let k = kernel(2.0);
    let r = find_xi(&k).unwrap();
    let one = c_sigma(&k, &r, 1.0);
    assert!(one > 0.0);
    assert!((c_sigma(&k, &r, 3.5) - 3.5 * one).abs() <= 1e-15 * one.max(1.0) * 4.0);
    assert!((r.c_multiplier - one).abs() <= 1e-15);
    assert!((2.0 * std::f64::consts::PI * 2.0 * one - feller_limit(&k, &r)).abs() <= 1e-12);
}

#[test]
fn renewal_tail_follows_the_exponent() {
    for sigma in [2.0, 10.0] {
        let k = kernel(sigma);
        let xi = find_xi(&k).unwrap().xi;
        let horizon = 40.0 / xi.abs();
        let c = solve_volterra(&k, 1e-3, horizon).unwrap();
        let pts: Vec<(f64, f64)> = (0..c.len())
            .filter(|&i| c.time(i) >= horizon / 2.0)
            .step_by(10)
            .map(|i| (c.time(i), c.psi[i]))
            .collect();
        let slope = fit_log_linear(&pts).unwrap().slope;
        assert!((slope - xi).abs() <= 5e-3 * xi.abs(), "σ={sigma}: slope {slope} vs ξ {xi}");

        let flat = |t: f64| c.psi_at(t).unwrap() * (-xi * t).exp();
        let end = c.horizon();
        let ratio = flat(end) / flat(end / 2.0);
        assert!((ratio - 1.0).abs() <= 0.01, "σ={sigma}: ratio {ratio}");
    }
}
