use perforated::fp_dist::default_distribution;
use perforated::renewal::{
    b_coefficient, convolution_power_series, kernel_eval, solve_volterra, ConvolutionMethod,
    RenewalKernel,
};

fn kernel(sigma: f64) -> RenewalKernel {
    RenewalKernel::with_default_distribution(sigma).unwrap()
}

#[test]
fn kernel_values() {
    assert_eq!(kernel_eval(&kernel(1.0), 0.0), 1.0);
    assert_eq!(kernel_eval(&kernel(2.0), -0.5), 0.0);
    let k = kernel(1.0);
    let total = k.total_integral();
    assert!(total > 0.0 && total < 1.0);
    assert!((total - k.total_integral_by_parts()).abs() <= 1e-8);
}

#[test]
fn psi_is_nonnegative_and_below_sigma() {
    for sigma in [0.5, 1.0, 2.0] {
        let c = solve_volterra(&kernel(sigma), 1e-3, 20.0).unwrap();
        assert_eq!(c.psi[0], sigma);
        assert!(c.psi.iter().all(|&v| v >= 0.0 && v <= sigma), "σ={sigma}");
    }
}

#[test]
fn refinement_is_second_order() {
    let k = kernel(1.0);
    let h = 0.02;
    let curves: Vec<_> = (0..3)
        .map(|j| solve_volterra(&k, h / f64::powi(2.0, j), 8.0).unwrap())
        .collect();
    // Differences on the coarse nodes of [1, 8].
    let diff = |a: usize, b: usize| {
        let r = 1usize << (b - a);
        (0..curves[a].len())
            .filter(|&i| curves[a].time(i) >= 1.0)
            .map(|i| (curves[a].psi[i] - curves[b].psi[i * r]).abs())
            .fold(0.0, f64::max)
    };
    let ratio = diff(0, 1) / diff(1, 2);
    assert!((3.5..=4.5).contains(&ratio), "Richardson ratio {ratio}");
}

#[test]
fn first_power_is_the_kernel() {
    let k = kernel(1.5);
    let s = convolution_power_series(&k, 1, 1e-2, 5.0, ConvolutionMethod::Fft).unwrap();
    assert_eq!(s.curve.psi, k.samples(1e-2, s.curve.len()));
}

#[test]
fn powers_decay_geometrically() {
    let k = kernel(1.0);
    let s = convolution_power_series(&k, 200, 1e-3, 20.0, ConvolutionMethod::Fft).unwrap();
    let a = s.kernel_l1;
    assert!(a < 1.0);
    for (n, l1) in s.term_l1.iter().enumerate() {
        let bound = a.powi(n as i32 + 1);
        assert!(*l1 <= bound * (1.0 + 1e-9) + 1e-300, "term {}: {l1} > {bound}", n + 1);
    }
}

#[test]
fn partial_sums_meet_the_geometric_tail_bound() {
    let k = kernel(1.0);
    let s200 = convolution_power_series(&k, 200, 1e-3, 20.0, ConvolutionMethod::Fft).unwrap();
    let s100 = convolution_power_series(&k, 100, 1e-3, 20.0, ConvolutionMethod::Fft).unwrap();
    let a = s200.kernel_l1;
    let max_kappa = k.sigma();
    let bound = a.powi(100) / (1.0 - a) * max_kappa;
    let sup = s200
        .curve
        .psi
        .iter()
        .zip(&s100.curve.psi)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(sup <= bound, "{sup} > {bound}");
}

#[test]
fn b_coefficient_properties() {
    let d = default_distribution();
    for sigma in [0.3, 1.0, 4.0] {
        for s in [0.0, 0.2, 1.0, 7.5] {
            assert!((b_coefficient(d, sigma, 0.0, s) - (sigma + 2.0)).abs() <= 1e-10);
        }
        for (t, s) in [(0.1, 0.7), (2.0, 0.4), (3.0, 9.0)] {
            assert_eq!(b_coefficient(d, sigma, t, s), b_coefficient(d, sigma, s, t));
            assert!(b_coefficient(d, sigma, t, s) >= sigma);
        }
    }
}
