//! Exponential integral `E1(x) = ∫_x^∞ e^{-u}/u du`.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E1(x)` for `x > 0`. Power series below 1, Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires x > 0, got {x}");
    if x <= 1.0 {
        series_part(x) - x.ln()
    } else {
        continued_fraction(x)
    }
}

/// `E1(x)` given `ln x`, usable when `x` itself underflows.
pub fn exp_integral_e1_from_ln(ln_x: f64) -> f64 {
    if ln_x <= 0.0 {
        let x = ln_x.exp();
        series_part(x) - ln_x
    } else {
        continued_fraction(ln_x.exp())
    }
}

/// `-γ - Σ_{k≥1} (-x)^k / (k·k!)`, i.e. `E1(x) + ln x`.
fn series_part(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - sum
}

fn continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}
