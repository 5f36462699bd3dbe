//! Simple linear regression with a two-sided t test on the slope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub t_stat: f64,
    pub df: usize,
    pub p_value: f64,
    /// Number of observations used.
    pub n: usize,
    /// Residuals are all zero; the t statistic is then infinite (or zero
    /// for a constant response).
    pub exact_fit: bool,
}

/// Ordinary least squares fit of `y` on `x` with the slope's two-sided
/// p-value under the t distribution with `n - 2` degrees of freedom.
pub fn linreg(x: &[f64], y: &[f64]) -> Result<RegressionResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "x has {} values but y has {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "regression inputs must be finite".into(),
        ));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::NoVariance);
    }
    let df = n - 2;
    let nf = n as f64;

    if y.iter().all(|&v| v == y[0]) {
        return Ok(RegressionResult {
            slope: 0.0,
            intercept: y[0],
            t_stat: 0.0,
            df,
            p_value: 1.0,
            n,
            exact_fit: true,
        });
    }

    let x_mean = x.iter().sum::<f64>() / nf;
    let y_mean = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - x_mean;
        let dy = yi - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = (y_mean * sxx - x_mean * sxy) / sxx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();

    // residuals at rounding level relative to the spread of y
    if rss <= 1e-24 * syy {
        return Ok(RegressionResult {
            slope,
            intercept,
            t_stat: if slope == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(slope)
            },
            df,
            p_value: if slope == 0.0 { 1.0 } else { 0.0 },
            n,
            exact_fit: true,
        });
    }

    let se = (rss / df as f64 / sxx).sqrt();
    let t_stat = slope / se;
    Ok(RegressionResult {
        slope,
        intercept,
        t_stat,
        df,
        p_value: student_t_two_sided(t_stat, df as f64),
        n,
        exact_fit: false,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    // I_x(df/2, 1/2) with x = df / (df + t^2); pass 1 - x separately to
    // avoid cancellation for small |t|
    let x = df / (df + t2);
    let one_minus_x = t2 / (df + t2);
    regularized_beta(x, one_minus_x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// Regularized incomplete beta `I_x(a, b)`, with `y = 1 - x` supplied by
/// the caller.
pub fn regularized_beta(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(y, b, a) / b
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lanczos approximation (g = 7, 9 terms), relative error near 1e-15.
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
