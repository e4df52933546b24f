//! Normalization and autocorrelation diagnostics.
//!
//! All moments use the population convention (divide by `N`).

use crate::error::{Error, Result};

/// A series rescaled to zero mean and unit population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    values: Vec<f64>,
    source_mean: f64,
    source_std: f64,
}

impl NormalizedSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_mean(&self) -> f64 {
        self.source_mean
    }

    pub fn source_std(&self) -> f64 {
        self.source_std
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Autocorrelation function together with the autocorrelation time.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfSummary {
    pub acf: Vec<f64>,
    pub tau_c: usize,
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

// Relative to the data scale, a spread this small is rounding noise.
fn is_degenerate(mean: f64, std: f64) -> bool {
    !(std > 0.0) || std <= 1e-13 * mean.abs()
}

pub fn normalize(values: &[f64]) -> Result<NormalizedSeries> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: values.len(),
        });
    }
    let (mean, std) = mean_std(values);
    if is_degenerate(mean, std) {
        return Err(Error::ZeroVariance);
    }
    Ok(NormalizedSeries {
        values: values.iter().map(|v| (v - mean) / std).collect(),
        source_mean: mean,
        source_std: std,
    })
}

/// Biased (divide-by-`N`) sample autocorrelation for lags `0..=max_lag`.
pub fn autocorrelation(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if max_lag >= n {
        return Err(Error::InvalidParameter(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    let (mean, std) = mean_std(values);
    if is_degenerate(mean, std) {
        return Err(Error::ZeroVariance);
    }
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0: f64 = centered.iter().map(|v| v * v).sum();
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let ck: f64 = centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum();
            ck / c0
        })
        .collect())
}

/// Smallest lag at which the ACF drops strictly below `1/e`, searched over
/// lags up to `N/2`.
pub fn autocorrelation_time(values: &[f64]) -> Result<usize> {
    autocorrelation_time_within(values, values.len() / 2)
}

/// As [`autocorrelation_time`], searching lags `1..=max_lag` only. Lags are
/// evaluated one at a time and the scan stops at the first crossing.
pub fn autocorrelation_time_within(values: &[f64], max_lag: usize) -> Result<usize> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    if max_lag >= n {
        return Err(Error::InvalidParameter(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    let (mean, std) = mean_std(values);
    if is_degenerate(mean, std) {
        return Err(Error::ZeroVariance);
    }
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0: f64 = centered.iter().map(|v| v * v).sum();
    let threshold = (-1.0f64).exp();
    (1..=max_lag)
        .find(|&k| {
            let ck: f64 = centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum();
            ck / c0 < threshold
        })
        .ok_or(Error::NoDecorrelation { max_lag })
}

/// ACF up to `N/2` together with the autocorrelation time.
pub fn autocorrelation_summary(values: &[f64]) -> Result<AcfSummary> {
    let tau_c = autocorrelation_time(values)?;
    let acf = autocorrelation(values, values.len() / 2)?;
    Ok(AcfSummary { acf, tau_c })
}

/// Number of equiprobable bins used by [`mutual_information`].
pub const MI_BINS: usize = 16;

/// Minimum series length accepted by [`mutual_information`].
pub const MI_MIN_LEN: usize = 64;

/// Histogram estimate of mutual information, in nats, over
/// [`MI_BINS`] equiprobable (rank-quantile) bins per variable.
pub fn mutual_information(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < MI_MIN_LEN {
        return Err(Error::TooShort {
            needed: MI_MIN_LEN,
            got: x.len(),
        });
    }
    let bx = quantile_bins(x, MI_BINS)?;
    let by = quantile_bins(y, MI_BINS)?;
    let n = x.len() as f64;
    let mut joint = vec![0usize; MI_BINS * MI_BINS];
    let mut mx = [0usize; MI_BINS];
    let mut my = [0usize; MI_BINS];
    for (&a, &b) in bx.iter().zip(&by) {
        joint[a * MI_BINS + b] += 1;
        mx[a] += 1;
        my[b] += 1;
    }
    let mut mi = 0.0;
    for a in 0..MI_BINS {
        for b in 0..MI_BINS {
            let c = joint[a * MI_BINS + b];
            if c > 0 {
                let pxy = c as f64 / n;
                mi += pxy * (pxy * n * n / (mx[a] as f64 * my[b] as f64)).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Assigns each sample to one of `bins` rank-quantile bins. Ties are broken
/// by position so bin occupancy stays balanced.
pub(crate) fn quantile_bins(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::ZeroVariance);
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank * bins / n;
    }
    Ok(out)
}
