use std::f64::consts::PI;

use perforated::lattice::{sample_empirical, two_sample_ks, LatticeConfig};
use perforated::renewal::{age_density_closed_form, solve_volterra, RenewalKernel};
use perforated::rng::stream;
use perforated::transport::{fit_rate, sample_scatter, simulate, ScatterKernel, SimulationConfig};
use perforated::Error;

/// Upper 0.001 quantile of χ² with 35 degrees of freedom.
const CHI2_35_999: f64 = 66.619;
const BINS: usize = 36;

fn chi_square(counts: &[u64], probs: &[f64], n: usize) -> f64 {
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

/// Relative angles in `[0, 2π)` from a fixed incoming direction.
fn relative_angles(kernel: &ScatterKernel, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0);
    let incoming = 0.7;
    (0..n)
        .map(|_| (sample_scatter(kernel, incoming, &mut rng) - incoming).rem_euclid(2.0 * PI))
        .collect()
}

fn histogram(angles: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; BINS];
    for a in angles {
        let k = ((a / (2.0 * PI)) * BINS as f64) as usize;
        counts[k.min(BINS - 1)] += 1;
    }
    counts
}

#[test]
fn isotropic_scattering_is_uniform() {
    let n = 1_000_000;
    let counts = histogram(&relative_angles(&ScatterKernel::Isotropic, n, 1));
    let chi2 = chi_square(&counts, &[1.0 / BINS as f64; BINS], n);
    assert!(chi2 < CHI2_35_999, "χ² = {chi2}");
}

#[test]
fn polynomial_scattering_matches_its_density() {
    let kernel = ScatterKernel::polynomial_cosine().unwrap();
    let ScatterKernel::PolynomialCosine { c } = kernel else { unreachable!() };
    assert!((c - 2.0 / 3.0).abs() <= 1e-12);
    let n = 1_000_000;
    let counts = histogram(&relative_angles(&kernel, n, 2));
    // Antiderivative of (1 + cos²θ)/(3π).
    let cdf = |t: f64| (1.5 * t + (2.0 * t).sin() / 4.0) / (3.0 * PI);
    let w = 2.0 * PI / BINS as f64;
    let probs: Vec<f64> = (0..BINS).map(|k| cdf((k + 1) as f64 * w) - cdf(k as f64 * w)).collect();
    let chi2 = chi_square(&counts, &probs, n);
    assert!(chi2 < CHI2_35_999, "χ² = {chi2}");
}

#[test]
fn relative_angle_law_is_even() {
    let kernel = ScatterKernel::polynomial_cosine().unwrap();
    let n = 20_000;
    let centred = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|a| if a > PI { a - 2.0 * PI } else { a }).collect() };
    let a = centred(relative_angles(&kernel, n, 3));
    let b: Vec<f64> = centred(relative_angles(&kernel, n, 4)).into_iter().map(|x| -x).collect();
    assert!(two_sample_ks(&a, &b) < 1.95 * (2.0 / n as f64).sqrt());
}

#[test]
fn simulation_is_deterministic_across_thread_counts() {
    let mut cfg = SimulationConfig::new(1.0, LatticeConfig::new(0.02).unwrap(), 20_000, 5.0, 3);
    cfg.checkpoints = vec![1.0, 2.5];
    let a = simulate(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| simulate(&cfg)).unwrap();
    assert_eq!(a, b);
    let s = &a.curve.survival;
    assert_eq!(s[0], 1.0);
    assert!(s.windows(2).all(|w| w[1] <= w[0]));
    assert!(s.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn collisionless_survival_is_the_free_path_tail() {
    let eps = 1e-2;
    let n = 100_000;
    let lattice = LatticeConfig::new(eps).unwrap();
    let curve = simulate(&SimulationConfig::new(0.0, lattice, n, 10.0, 5)).unwrap().curve;
    let tail = sample_empirical(&lattice, n, 6, &curve.times).unwrap();
    let gap = curve
        .survival
        .iter()
        .zip(&tail.phi_hat)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap < 1.95 * (2.0 / n as f64).sqrt(), "gap {gap}");
}

#[test]
fn age_histogram_matches_the_renewal_age_density() {
    let sigma = 1.0;
    let t_check = 2.0;
    let mut cfg = SimulationConfig::new(sigma, LatticeConfig::new(5e-3).unwrap(), 400_000, t_check, 7);
    cfg.checkpoints = vec![t_check];
    cfg.age_bin_width = 0.1;
    let out = simulate(&cfg).unwrap();
    let h = &out.histograms[0];
    let k = RenewalKernel::with_default_distribution(sigma).unwrap();
    let curve = solve_volterra(&k, 1e-3, t_check).unwrap();
    let n = cfg.n_particles as f64;
    let (mut chi2, mut dof) = (0.0, 0usize);
    for (i, &s) in h.s.iter().enumerate() {
        if s + h.bin_width > t_check {
            break;
        }
        // Bin mass by Simpson's rule on the closed-form density.
        let f = |x: f64| age_density_closed_form(&k, &curve, t_check, x).unwrap();
        let w = h.bin_width;
        let mass = w / 6.0 * (f(s) + 4.0 * f(s + w / 2.0) + f(s + w));
        let expected = mass * n;
        chi2 += (h.counts[i] as f64 - expected).powi(2) / expected;
        dof += 1;
    }
    assert_eq!(dof, 20);
    // Upper 0.001 quantile of χ² with 20 degrees of freedom.
    assert!(chi2 < 45.315, "χ² = {chi2} over {dof} bins");
}

#[test]
fn scattering_curve_crosses_below_the_collisionless_one() {
    let lattice = LatticeConfig::new(1e-2).unwrap();
    let n = 100_000;
    let with = simulate(&SimulationConfig::new(1.0, lattice, n, 20.0, 8)).unwrap().curve;
    let without = simulate(&SimulationConfig::new(0.0, lattice, n, 20.0, 8)).unwrap().curve;
    let crossing = with
        .times
        .iter()
        .zip(with.survival.iter().zip(&without.survival))
        .find(|(t, (a, b))| **t > 0.0 && a < b)
        .map(|(t, _)| *t);
    assert!(crossing.is_some_and(|t| t < 20.0), "no crossing: {crossing:?}");
}

#[test]
fn fitting_needs_survivors() {
    let lattice = LatticeConfig::new(0.05).unwrap();
    let curve = simulate(&SimulationConfig::new(1.0, lattice, 200, 10.0, 9)).unwrap().curve;
    assert!(matches!(fit_rate(&curve, (4.0, 10.0)), Err(Error::Statistics(_))));
}
