//! Recurrence-based connectivity between scalar time series.
//!
//! The crate computes recurrence matrices and τ-recurrence profiles,
//! the correlation of probability of recurrence (CPR) restricted to lags
//! beyond the autocorrelation time, Pearson's ρ, and tests both against
//! twin surrogates. On top of that sit the sliding-window trend, binning
//! and peak-alignment analyses.
//!
//! ```
//! use recurconnect::prelude::*;
//!
//! let x: Vec<f64> = (0..300).map(|t| (t as f64 * 0.21).sin()).collect();
//! let z = normalize(&x).unwrap();
//! let traj = Trajectory::from_scalar(z.values()).unwrap();
//! let profile = tau_recurrence_rate_direct(&traj, &RecurrenceConfig::default(), 150).unwrap();
//! let tau_c = autocorrelation_time(z.values()).unwrap();
//! let m = cpr(&profile, &profile, tau_c, tau_c).unwrap();
//! assert!((m.value - 1.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod connectivity;
pub mod error;
pub mod ingest;
pub mod preprocess;
pub mod recurrence;
pub mod seed;
pub mod surrogate;
pub mod synthdata;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        bin_connectivity, evaluate_window, peak_align, sliding_pairwise, window_span_stats, BinThresholds,
        ConnectivityBins, PairTrend, PeakAlignment, TestConfig, WindowOutcome, WindowSpec, WindowStatus,
    };
    pub use crate::connectivity::{cpr, cpr_uncorrected, pearson, pearson_raw, MeasureKind, MeasureValue};
    pub use crate::error::{Error, Result};
    pub use crate::ingest::{align, parse_csv, AlignedDataset, TimeSeries};
    pub use crate::preprocess::{
        autocorrelation, autocorrelation_time, mutual_information, normalize, NormalizedSeries,
    };
    pub use crate::recurrence::{
        find_twins, recurrence_matrix, tau_recurrence_rate, tau_recurrence_rate_direct, Norm, RecurrenceConfig,
        RecurrenceMatrix, TauRecurrenceProfile, Trajectory, TwinClasses,
    };
    pub use crate::surrogate::{generate_ensemble, significance_test, twin_surrogate, SignificanceResult};
    pub use crate::synthdata::{lorenz, white_noise, LorenzParams};
}
