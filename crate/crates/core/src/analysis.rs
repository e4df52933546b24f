//! Sliding-window connectivity trends, connectivity binning, peak alignment
//! and window-span statistics.

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::connectivity::{cpr, pearson};
use crate::error::{Error, Result};
use crate::ingest::{AlignedDataset, TimeSeries};
use crate::preprocess::{autocorrelation_time, mean_std, normalize, NormalizedSeries};
use crate::recurrence::{
    find_twins, recurrence_matrix, tau_recurrence_rate_direct, RecurrenceConfig, TauRecurrenceProfile,
    Trajectory,
};
use crate::seed;
use crate::surrogate::{significance_test, twin_surrogate_indices, SignificanceResult, DEFAULT_ALPHA, DEFAULT_SURROGATES};

pub const DEFAULT_WINDOW: usize = 250;
pub const DEFAULT_STEP: usize = 10;
pub const MIN_WINDOW: usize = 50;
pub const DEFAULT_STRONG: f64 = 0.8;
pub const DEFAULT_MODERATE: f64 = 0.5;
/// Peak-aligned windows start this many points before the peak...
pub const PEAK_OFFSET_BEFORE: usize = 500;
/// ...up to this many points after it.
pub const PEAK_OFFSET_AFTER: usize = 250;

// Stream-address tags keeping the RNG domains of different analyses apart.
const DOMAIN_TRENDS: u64 = 1;
const DOMAIN_PEAK: u64 = 2;
const REVERSE_ROLE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    size: usize,
    step: usize,
}

impl WindowSpec {
    pub fn new(size: usize, step: usize) -> Result<Self> {
        if size < MIN_WINDOW {
            return Err(Error::InvalidParameter(format!(
                "window size must be >= {MIN_WINDOW}, got {size}"
            )));
        }
        if step == 0 || step > size {
            return Err(Error::InvalidParameter(format!(
                "window step must lie in 1..={size}, got {step}"
            )));
        }
        Ok(Self { size, step })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Start indices of all complete windows over `n` points.
    pub fn starts(&self, n: usize) -> Vec<usize> {
        if n < self.size {
            return Vec::new();
        }
        (0..=(n - self.size) / self.step).map(|w| w * self.step).collect()
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            size: DEFAULT_WINDOW,
            step: DEFAULT_STEP,
        }
    }
}

/// Parameters of one CPR/ρ significance evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub recurrence: RecurrenceConfig,
    pub n_surrogates: usize,
    pub alpha: f64,
    /// Profiles run to `τ_max = floor(fraction · (N − 1))`.
    pub tau_max_fraction: f64,
    /// Also test with surrogates of the first series and keep the larger p.
    pub symmetric: bool,
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_surrogates < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 surrogates, got {}",
                self.n_surrogates
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.tau_max_fraction > 0.0 && self.tau_max_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau_max fraction must lie in (0, 1], got {}",
                self.tau_max_fraction
            )));
        }
        Ok(())
    }

    pub fn tau_max(&self, n: usize) -> usize {
        (((n - 1) as f64 * self.tau_max_fraction).floor() as usize).clamp(1, n - 1)
    }
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            recurrence: RecurrenceConfig::default(),
            n_surrogates: DEFAULT_SURROGATES,
            alpha: DEFAULT_ALPHA,
            tau_max_fraction: 1.0,
            symmetric: false,
        }
    }
}

/// Why a window carries no (or only partial) results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowStatus {
    Ok,
    ConstantSegment,
    TooFewLags,
    NoDecorrelation,
    DegenerateSurrogates,
}

impl WindowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            WindowStatus::Ok => "ok",
            WindowStatus::ConstantSegment => "constant_segment",
            WindowStatus::TooFewLags => "too_few_lags",
            WindowStatus::NoDecorrelation => "no_decorrelation",
            WindowStatus::DegenerateSurrogates => "degenerate_surrogates",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::ZeroVariance => WindowStatus::ConstantSegment,
            Error::TooFewLags { .. } => WindowStatus::TooFewLags,
            Error::NoDecorrelation { .. } => WindowStatus::NoDecorrelation,
            _ => WindowStatus::DegenerateSurrogates,
        }
    }
}

/// A measure value and, when the surrogate test could be run, its test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestedMeasure {
    pub value: f64,
    pub test: Option<SignificanceResult>,
}

impl TestedMeasure {
    pub fn is_significant(&self) -> bool {
        self.test.is_some_and(|t| t.significant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOutcome {
    pub cpr: Option<TestedMeasure>,
    pub rho: Option<TestedMeasure>,
    pub tau_c: Option<usize>,
    pub status: WindowStatus,
}

impl WindowOutcome {
    fn failed(status: WindowStatus) -> Self {
        Self {
            cpr: None,
            rho: None,
            tau_c: None,
            status,
        }
    }
}

/// Per-segment quantities reused across surrogate comparisons.
struct Segment {
    values: NormalizedSeries,
    cpr_input: std::result::Result<(TauRecurrenceProfile, usize), Error>,
}

impl Segment {
    fn new(raw: &[f64], cfg: &TestConfig) -> Result<Self> {
        let values = normalize(raw)?;
        let cpr_input = profile_and_tau_c(values.values(), cfg);
        Ok(Self { values, cpr_input })
    }
}

fn profile_and_tau_c(values: &[f64], cfg: &TestConfig) -> Result<(TauRecurrenceProfile, usize)> {
    let tau_c = autocorrelation_time(values)?;
    let traj = Trajectory::from_scalar(values)?;
    let profile = tau_recurrence_rate_direct(&traj, &cfg.recurrence, cfg.tau_max(values.len()))?;
    Ok((profile, tau_c))
}

/// Measures of `fixed` against each twin surrogate of `source`.
fn surrogate_measures(
    fixed: &Segment,
    source: &Segment,
    cfg: &TestConfig,
    seed: u64,
    path: &[u64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let traj = Trajectory::from_scalar(source.values.values())?;
    let twins = find_twins(&recurrence_matrix(&traj, &cfg.recurrence)?);
    let fixed_cpr = fixed.cpr_input.as_ref().ok();
    let mut cprs = Vec::with_capacity(cfg.n_surrogates);
    let mut rhos = Vec::with_capacity(cfg.n_surrogates);
    let mut address = path.to_vec();
    address.push(0);
    for i in 0..cfg.n_surrogates as u64 {
        *address.last_mut().unwrap() = i;
        let mut rng = seed::stream(seed, &address);
        let idx = twin_surrogate_indices(&twins, &mut rng);
        let raw: Vec<f64> = idx.iter().map(|&k| source.values.values()[k]).collect();
        // A surrogate stuck on one value has no defined measures; skip it.
        let Ok(surrogate) = normalize(&raw) else {
            continue;
        };
        rhos.push(pearson(&fixed.values, &surrogate)?.value);
        if let Some((fixed_profile, fixed_tau)) = fixed_cpr {
            if let Ok((profile, tau)) = profile_and_tau_c(surrogate.values(), cfg) {
                if let Ok(m) = cpr(fixed_profile, &profile, *fixed_tau, tau) {
                    cprs.push(m.value);
                }
            }
        }
    }
    Ok((cprs, rhos))
}

fn pick_larger_p(a: Result<SignificanceResult>, b: Result<SignificanceResult>) -> Result<SignificanceResult> {
    match (a, b) {
        (Ok(a), Ok(b)) => Ok(if b.p_value > a.p_value { b } else { a }),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Corrected CPR and ρ between two equal-length segments, each tested
/// against twin surrogates of `b` (and of `a` too when `cfg.symmetric`).
///
/// Surrogate `i` draws from the stream `(seed, path.., i)`.
pub fn evaluate_window(a: &[f64], b: &[f64], cfg: &TestConfig, seed: u64, path: &[u64]) -> Result<WindowOutcome> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let (sa, sb) = match (Segment::new(a, cfg), Segment::new(b, cfg)) {
        (Ok(sa), Ok(sb)) => (sa, sb),
        (Err(Error::ZeroVariance), _) | (_, Err(Error::ZeroVariance)) => {
            return Ok(WindowOutcome::failed(WindowStatus::ConstantSegment))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let rho_value = pearson(&sa.values, &sb.values)?.value;
    let observed_cpr = match (&sa.cpr_input, &sb.cpr_input) {
        (Ok((pa, ta)), Ok((pb, tb))) => cpr(pa, pb, *ta, *tb),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };

    let mut status = WindowStatus::Ok;
    let (cprs, rhos) = surrogate_measures(&sa, &sb, cfg, seed, path)?;
    let mut rho_test = significance_test(rho_value, &rhos, cfg.alpha);
    let mut cpr_test = observed_cpr
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|m| significance_test(m.value, &cprs, cfg.alpha));
    if cfg.symmetric {
        let mut reverse = path.to_vec();
        reverse.push(REVERSE_ROLE);
        let (cprs_r, rhos_r) = surrogate_measures(&sb, &sa, cfg, seed, &reverse)?;
        rho_test = pick_larger_p(rho_test, significance_test(rho_value, &rhos_r, cfg.alpha));
        if let Ok(m) = &observed_cpr {
            cpr_test = pick_larger_p(cpr_test, significance_test(m.value, &cprs_r, cfg.alpha));
        }
    }

    let cpr_measure = match &observed_cpr {
        Ok(m) => {
            if let Err(e) = &cpr_test {
                status = WindowStatus::from_error(e);
            }
            Some(TestedMeasure {
                value: m.value,
                test: cpr_test.ok(),
            })
        }
        Err(e) => {
            status = WindowStatus::from_error(e);
            None
        }
    };
    if rho_test.is_err() && status == WindowStatus::Ok {
        status = WindowStatus::DegenerateSurrogates;
    }
    Ok(WindowOutcome {
        cpr: cpr_measure,
        rho: Some(TestedMeasure {
            value: rho_value,
            test: rho_test.ok(),
        }),
        tau_c: observed_cpr.ok().and_then(|m| m.tau_c_used),
        status,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowRecord {
    pub start: usize,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub outcome: WindowOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTrend {
    pub pair: (String, String),
    pub records: Vec<WindowRecord>,
}

/// All unordered pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_indices(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Slides a window along every pair of series and evaluates CPR and ρ with
/// twin-surrogate significance in each window.
///
/// Pair `k` (in [`pair_indices`] order), window `w` uses surrogate streams
/// `(seed, 1, k, w, i)`. Results do not depend on the thread count.
pub fn sliding_pairwise(data: &AlignedDataset, spec: &WindowSpec, cfg: &TestConfig, seed: u64) -> Result<Vec<PairTrend>> {
    cfg.validate()?;
    let n = data.len();
    if n < spec.size {
        return Err(Error::TooShort {
            needed: spec.size,
            got: n,
        });
    }
    let series = data.series();
    let pairs = pair_indices(series.len());
    let starts = spec.starts(n);
    let tasks: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|p| (0..starts.len()).map(move |w| (p, w)))
        .collect();

    let outcomes = tasks
        .par_iter()
        .map(|&(p, w)| {
            let (i, j) = pairs[p];
            let range = starts[w]..starts[w] + spec.size;
            evaluate_window(
                &series[i].values()[range.clone()],
                &series[j].values()[range],
                cfg,
                seed,
                &[DOMAIN_TRENDS, p as u64, w as u64],
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let dates = data.dates();
    let mut outcomes = outcomes.into_iter();
    Ok(pairs
        .iter()
        .map(|&(i, j)| PairTrend {
            pair: (series[i].label().to_string(), series[j].label().to_string()),
            records: starts
                .iter()
                .map(|&s| WindowRecord {
                    start: s,
                    start_date: dates[s],
                    end_date: dates[s + spec.size - 1],
                    outcome: outcomes.next().expect("one outcome per task"),
                })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinThresholds {
    pub strong: f64,
    pub moderate: f64,
}

impl BinThresholds {
    pub fn new(strong: f64, moderate: f64) -> Result<Self> {
        if !(0.0 < moderate && moderate < strong && strong <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < moderate < strong <= 1, got moderate {moderate}, strong {strong}"
            )));
        }
        Ok(Self { strong, moderate })
    }

    /// Half-open bins: strong `[strong, 1]`, moderate `[moderate, strong)`,
    /// weak `[0, moderate)`.
    pub fn classify(&self, value: f64) -> Connectedness {
        let v = value.abs();
        if v >= self.strong {
            Connectedness::Strong
        } else if v >= self.moderate {
            Connectedness::Moderate
        } else {
            Connectedness::Weak
        }
    }
}

impl Default for BinThresholds {
    fn default() -> Self {
        Self {
            strong: DEFAULT_STRONG,
            moderate: DEFAULT_MODERATE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectedness {
    Strong,
    Moderate,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinCount {
    /// Pairs in the bin whose CPR passed the significance test.
    pub significant: usize,
    pub all: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowBins {
    pub start: usize,
    pub strong: BinCount,
    pub moderate: BinCount,
    pub weak: BinCount,
}

impl WindowBins {
    pub fn total(&self) -> usize {
        self.strong.all + self.moderate.all + self.weak.all
    }

    /// `(strong, moderate, weak)`, either significant-only or all counts.
    pub fn counts(&self, significant_only: bool) -> (usize, usize, usize) {
        let pick = |c: BinCount| if significant_only { c.significant } else { c.all };
        (pick(self.strong), pick(self.moderate), pick(self.weak))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityBins {
    pub pair_count: usize,
    pub windows: Vec<WindowBins>,
}

/// Counts pairs per |CPR| bin in every window. Windows without a CPR value
/// count as weak and never as significant.
pub fn bin_connectivity(trends: &[PairTrend], thresholds: &BinThresholds) -> Result<ConnectivityBins> {
    let Some(first) = trends.first() else {
        return Ok(ConnectivityBins {
            pair_count: 0,
            windows: Vec::new(),
        });
    };
    let grid: Vec<usize> = first.records.iter().map(|r| r.start).collect();
    if trends
        .iter()
        .any(|t| t.records.len() != grid.len() || t.records.iter().zip(&grid).any(|(r, &s)| r.start != s))
    {
        return Err(Error::InconsistentGrid);
    }
    let windows = grid
        .iter()
        .enumerate()
        .map(|(w, &start)| {
            let mut bins = WindowBins {
                start,
                strong: BinCount::default(),
                moderate: BinCount::default(),
                weak: BinCount::default(),
            };
            for t in trends {
                let cpr = t.records[w].outcome.cpr;
                let class = cpr.map_or(Connectedness::Weak, |m| thresholds.classify(m.value));
                let slot = match class {
                    Connectedness::Strong => &mut bins.strong,
                    Connectedness::Moderate => &mut bins.moderate,
                    Connectedness::Weak => &mut bins.weak,
                };
                slot.all += 1;
                if cpr.is_some_and(|m| m.is_significant()) {
                    slot.significant += 1;
                }
            }
            assert_eq!(bins.total(), trends.len(), "bin counts must conserve the pair count");
            bins
        })
        .collect();
    Ok(ConnectivityBins {
        pair_count: trends.len(),
        windows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakRecord {
    /// Window start relative to each series' own peak.
    pub offset: i64,
    pub x_start_date: NaiveDate,
    pub y_start_date: NaiveDate,
    pub outcome: WindowOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakAlignment {
    pub pair: (String, String),
    pub peak_dates: (NaiveDate, NaiveDate),
    pub peak_indices: (usize, usize),
    pub records: Vec<PeakRecord>,
}

/// Index of the maximum value within `[from, to]`, earliest on ties.
pub fn find_peak(series: &TimeSeries, from: NaiveDate, to: NaiveDate) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, (d, v)) in series.dates().iter().zip(series.values()).enumerate() {
        if *d < from || *d > to {
            continue;
        }
        if best.is_none_or(|b| *v > series.values()[b]) {
            best = Some(i);
        }
    }
    best.ok_or_else(|| Error::EmptySearchInterval(series.label().to_string()))
}

/// Window-start offsets `-500, -500 + step, ..., <= +250`.
pub fn peak_offsets(step: usize) -> Vec<i64> {
    (-(PEAK_OFFSET_BEFORE as i64)..=PEAK_OFFSET_AFTER as i64)
        .step_by(step)
        .collect()
}

/// Aligns both series at their maxima inside `search` and evaluates CPR and
/// ρ in windows starting at each offset from [`peak_offsets`].
///
/// Offset number `k` uses surrogate streams `(seed, 2, k, i)`.
pub fn peak_align(
    x: &TimeSeries,
    y: &TimeSeries,
    search: (NaiveDate, NaiveDate),
    spec: &WindowSpec,
    cfg: &TestConfig,
    seed: u64,
) -> Result<PeakAlignment> {
    cfg.validate()?;
    let px = find_peak(x, search.0, search.1)?;
    let py = find_peak(y, search.0, search.1)?;
    let offsets = peak_offsets(spec.step);
    for (series, peak) in [(x, px), (y, py)] {
        if let Some(&offset) = offsets.iter().find(|&&o| {
            let start = peak as i64 + o;
            start < 0 || start as usize + spec.size > series.len()
        }) {
            return Err(Error::InsufficientHistory {
                label: series.label().to_string(),
                peak,
                offset,
            });
        }
    }
    let records = offsets
        .par_iter()
        .enumerate()
        .map(|(k, &o)| {
            let sx = (px as i64 + o) as usize;
            let sy = (py as i64 + o) as usize;
            let outcome = evaluate_window(
                &x.values()[sx..sx + spec.size],
                &y.values()[sy..sy + spec.size],
                cfg,
                seed,
                &[DOMAIN_PEAK, k as u64],
            )?;
            Ok(PeakRecord {
                offset: o,
                x_start_date: x.dates()[sx],
                y_start_date: y.dates()[sy],
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PeakAlignment {
        pair: (x.label().to_string(), y.label().to_string()),
        peak_dates: (x.dates()[px], y.dates()[py]),
        peak_indices: (px, py),
        records,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanStats {
    pub size: usize,
    /// Calendar days between first and last date of each window.
    pub spans: Vec<i64>,
    pub mean: f64,
    pub std: f64,
}

/// Distribution of calendar-day ranges covered by sliding windows of each
/// size in `sizes`.
pub fn window_span_stats(
    dates: &[NaiveDate],
    sizes: impl IntoIterator<Item = usize>,
    step: usize,
) -> Result<Vec<SpanStats>> {
    if step == 0 {
        return Err(Error::InvalidParameter("step must be >= 1".into()));
    }
    let n = dates.len();
    sizes
        .into_iter()
        .map(|size| {
            if size == 0 || size >= n {
                return Err(Error::InvalidParameter(format!(
                    "window size must lie in 1..{n}, got {size}"
                )));
            }
            let spans: Vec<i64> = (0..=(n - size) / step)
                .map(|w| (dates[w * step + size - 1] - dates[w * step]).num_days())
                .collect();
            let as_f64: Vec<f64> = spans.iter().map(|&s| s as f64).collect();
            let (mean, std) = mean_std(&as_f64);
            Ok(SpanStats { size, spans, mean, std })
        })
        .collect()
}
