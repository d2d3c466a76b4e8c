//! Sample statistics. Every summary sorts its input first, so the result
//! does not depend on the order in which replicates finished.

use crate::error::{Error, Result};
pub use crate::special::normal_cdf;

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn mean(sample: &[f64]) -> f64 {
    sorted(sample).iter().sum::<f64>() / sample.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two values.
pub fn variance(sample: &[f64]) -> f64 {
    if sample.len() < 2 {
        return 0.0;
    }
    let m = mean(sample);
    let ss: f64 = sorted(sample).iter().map(|x| (x - m) * (x - m)).sum();
    ss / (sample.len() - 1) as f64
}

pub fn median(sample: &[f64]) -> f64 {
    let v = sorted(sample);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn max(sample: &[f64]) -> f64 {
    sample.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// One-sample Kolmogorov-Smirnov distance to a continuous distribution.
pub fn ks_against(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::invalid("KS statistic of an empty sample"));
    }
    let v = sorted(sample);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Kolmogorov-Smirnov distance to the standard normal law.
pub fn ks_statistic(sample: &[f64]) -> Result<f64> {
    ks_against(sample, normal_cdf)
}
