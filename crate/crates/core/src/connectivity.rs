//! Pairwise connectivity: correlation of probability of recurrence (CPR)
//! and Pearson's ρ.

use crate::error::{Error, Result};
use crate::preprocess::{mean_std, normalize, NormalizedSeries};
use crate::recurrence::TauRecurrenceProfile;

/// Minimum number of lags beyond `τ_c` required to evaluate CPR.
pub const MIN_CPR_LAGS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Cpr,
    Pearson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub kind: MeasureKind,
    /// Cut-off lag applied to the profiles; `None` for Pearson.
    pub tau_c_used: Option<usize>,
}

/// CPR restricted to lags strictly above `max(tau_c_x, tau_c_y)`.
///
/// Both restricted segments are normalized and the mean of their product
/// is returned. Profile entries at or below the cut-off never enter the
/// computation.
pub fn cpr(
    px: &TauRecurrenceProfile,
    py: &TauRecurrenceProfile,
    tau_c_x: usize,
    tau_c_y: usize,
) -> Result<MeasureValue> {
    let tau_c = tau_c_x.max(tau_c_y);
    let value = correlate_tail(px, py, tau_c + 1)?;
    Ok(MeasureValue {
        value,
        kind: MeasureKind::Cpr,
        tau_c_used: Some(tau_c),
    })
}

/// CPR over the whole profile including `τ = 0`. Biased towards high values
/// by the shared `p(0) = 1` head.
pub fn cpr_uncorrected(px: &TauRecurrenceProfile, py: &TauRecurrenceProfile) -> Result<MeasureValue> {
    let value = correlate_tail(px, py, 0)?;
    Ok(MeasureValue {
        value,
        kind: MeasureKind::Cpr,
        tau_c_used: Some(0),
    })
}

fn correlate_tail(px: &TauRecurrenceProfile, py: &TauRecurrenceProfile, first: usize) -> Result<f64> {
    if px.tau_max() != py.tau_max() {
        return Err(Error::InvalidParameter(format!(
            "profiles differ in tau_max: {} vs {}",
            px.tau_max(),
            py.tau_max()
        )));
    }
    let len = px.p().len();
    let available = len.saturating_sub(first);
    // The uncorrected form keeps its full range; only the cut-off form
    // enforces the lag floor.
    let needed = if first == 0 { 2 } else { MIN_CPR_LAGS };
    if available < needed {
        return Err(Error::TooFewLags {
            tau_c: first.saturating_sub(1),
            available,
            needed,
        });
    }
    let a = standardize(&px.p()[first..])?;
    let b = standardize(&py.p()[first..])?;
    Ok(mean_product(&a, &b))
}

fn standardize(segment: &[f64]) -> Result<Vec<f64>> {
    let (mean, std) = mean_std(segment);
    // Profile values live in [0, 1]; anything this flat is constant.
    if !(std > 1e-15) {
        return Err(Error::ZeroVariance);
    }
    Ok(segment.iter().map(|v| (v - mean) / std).collect())
}

fn mean_product(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Pearson's ρ as the mean product of two normalized series.
pub fn pearson(x: &NormalizedSeries, y: &NormalizedSeries) -> Result<MeasureValue> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    Ok(MeasureValue {
        value: mean_product(x.values(), y.values()),
        kind: MeasureKind::Pearson,
        tau_c_used: None,
    })
}

/// Normalizes both raw series and returns Pearson's ρ.
pub fn pearson_raw(x: &[f64], y: &[f64]) -> Result<MeasureValue> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    pearson(&normalize(x)?, &normalize(y)?)
}
