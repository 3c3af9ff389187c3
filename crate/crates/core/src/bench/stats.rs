//! Two-sided paired Student t-test.
//!
//! The p-value is `I_{df/(df+t²)}(df/2, 1/2)`, the regularized incomplete
//! beta function evaluated by its continued fraction (modified Lentz).

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

const CF_TOLERANCE: f64 = 1e-10;
const CF_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    pub p_value: f64,
    pub significant: bool,
    pub mean_diff: f64,
    pub df: usize,
}

/// Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
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
        if (delta - 1.0).abs() < CF_TOLERANCE {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Paired test on `a − b`. Zero-variance differences give `p = 0` when the
/// mean is nonzero and `p = 1` when all differences are zero.
pub fn paired_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<TTestResult> {
    check_len("paired samples", a.len(), b.len())?;
    if a.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "paired t-test needs at least 2 pairs, got {}",
            a.len()
        )));
    }
    let r = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / r;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (r - 1.0);
    let df = a.len() - 1;
    let (t_stat, p_value) = if var == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (mean.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = mean / (var / r).sqrt();
        let dff = df as f64;
        (
            t,
            regularized_incomplete_beta(dff / 2.0, 0.5, dff / (dff + t * t)),
        )
    };
    Ok(TTestResult {
        t_stat,
        p_value,
        significant: p_value < alpha,
        mean_diff: mean,
        df,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_samples() {
        let a = [1.0, 2.0, 3.0];
        let r = paired_t_test(&a, &a, 0.05).unwrap();
        assert_eq!((r.t_stat, r.p_value, r.significant), (0.0, 1.0, false));
    }

    #[test]
    fn constant_nonzero_difference() {
        let r = paired_t_test(&[2.0; 4], &[1.0; 4], 0.05).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert!(r.significant);
        assert_eq!(r.t_stat, f64::INFINITY);
    }

    #[test]
    fn reference_value() {
        let a = [1.8, 2.2, 1.9, 2.1, 2.0];
        let b = [1.0; 5];
        let r = paired_t_test(&a, &b, 0.05).unwrap();
        // mean 1, sample variance 0.025: t = 1 / sqrt(0.005)
        assert!((r.t_stat - 14.142135623730951).abs() < 1e-9);
        assert!((r.p_value - 1.451281706131975e-4).abs() < 1e-12);
        assert!(r.significant);
    }

    #[test]
    fn too_few_pairs() {
        assert!(paired_t_test(&[1.0], &[2.0], 0.05).is_err());
        assert!(paired_t_test(&[1.0, 2.0], &[2.0], 0.05).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362880f64.ln()).abs() < 1e-12);
    }
}
