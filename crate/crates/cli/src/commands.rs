use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use chrono::{Days, NaiveDate};
use log::{info, warn};
use recurconnect::analysis::{bin_connectivity, peak_align, sliding_pairwise, WindowStatus};
use recurconnect::ingest::{align, parse_csv, AlignedDataset, TimeSeries};
use recurconnect::preprocess::{autocorrelation, autocorrelation_time, mutual_information, normalize, MI_MIN_LEN};
use recurconnect::recurrence::{recurrence_matrix, tau_recurrence_rate, Norm, RecurrenceConfig, Trajectory};
use recurconnect::synthdata::{lorenz, white_noise, LorenzParams};

use crate::args::{Component, DiagnoseArgs, LorenzArgs, SynthArgs, SynthKind};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_g, write_bins, write_peak, write_trend, Staging};

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load_series(path: &Path) -> Result<TimeSeries, CliError> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_csv(BufReader::new(file), &label_of(path))
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Runtime)
}

fn load_aligned(inputs: &[PathBuf]) -> Result<AlignedDataset, CliError> {
    let mut labels: Vec<String> = inputs.iter().map(|p| label_of(p)).collect();
    labels.sort();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Usage("input files must have distinct names".into()));
    }
    let series = inputs.iter().map(|p| load_series(p)).collect::<Result<Vec<_>, _>>()?;
    let data = align(&series).context("aligning inputs")?;
    info!("{} series share {} dates", data.series().len(), data.len());
    Ok(data)
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
    }
}

/// Sliding-window trends for every pair plus the per-window bin counts.
/// Writes `trend_<A>__<B>.csv` per pair and `bins.csv`.
pub fn cmd_trends(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    if cfg.inputs.len() < 2 {
        return Err(CliError::Usage(format!(
            "trends needs at least 2 input files, got {}",
            cfg.inputs.len()
        )));
    }
    let data = load_aligned(&cfg.inputs)?;
    let trends = with_workers(cfg.workers, || sliding_pairwise(&data, &cfg.window, &cfg.test, cfg.seed))??;
    let bins = bin_connectivity(&trends, &cfg.thresholds)?;
    for t in &trends {
        let skipped = t.records.iter().filter(|r| r.outcome.status != WindowStatus::Ok).count();
        if skipped > 0 {
            warn!("{} vs {}: {skipped} windows without a full result", t.pair.0, t.pair.1);
        }
    }

    let mut staging = Staging::new(&cfg.out)?;
    for t in &trends {
        write_trend(staging.create(&format!("trend_{}__{}.csv", t.pair.0, t.pair.1))?, t)?;
    }
    write_bins(staging.create("bins.csv")?, &bins)?;
    Ok(staging.commit()?)
}

/// Peak-aligned CPR and ρ for exactly two series. Writes
/// `peak_<X>__<Y>.csv`.
pub fn cmd_peak(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    if cfg.inputs.len() != 2 {
        return Err(CliError::Usage(format!(
            "peak needs exactly 2 input files, got {}",
            cfg.inputs.len()
        )));
    }
    let data = load_aligned(&cfg.inputs)?;
    let dates = data.dates();
    let (from, to) = cfg.search;
    if dates.is_empty() || to < dates[0] || from > dates[dates.len() - 1] {
        return Err(CliError::Usage(format!(
            "search interval {from}..{to} lies outside the data"
        )));
    }
    let [x, y] = data.series() else { unreachable!() };
    let peak = with_workers(cfg.workers, || peak_align(x, y, cfg.search, &cfg.window, &cfg.test, cfg.seed))??;
    info!("peaks at {} and {}", peak.peak_dates.0, peak.peak_dates.1);

    let mut staging = Staging::new(&cfg.out)?;
    write_peak(staging.create(&format!("peak_{}__{}.csv", x.label(), y.label()))?, &peak)?;
    Ok(staging.commit()?)
}

fn synth_dates(n: usize) -> impl Iterator<Item = NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
    (0..n as u64).map(move |i| start + Days::new(i))
}

pub fn lorenz_params(a: &LorenzArgs) -> LorenzParams {
    let base = if a.classic {
        LorenzParams::classic()
    } else {
        LorenzParams::demo()
    };
    LorenzParams {
        sigma: a.sigma.unwrap_or(base.sigma),
        rho: a.rho.unwrap_or(base.rho),
        beta: a.beta.unwrap_or(base.beta),
        dt: a.dt,
        n: a.n,
        transient: a.transient,
        ..base
    }
}

/// Writes `white_noise.csv` (`date,close`) or `lorenz.csv` (`date,x,y,z`, or
/// `date,close` for a single component). Values keep full precision.
pub fn cmd_synth(args: &SynthArgs) -> Result<Vec<PathBuf>, CliError> {
    let mut staging = Staging::new(&args.out)?;
    match &args.kind {
        SynthKind::White { n } => {
            let x = white_noise(*n, args.seed)?;
            let mut w = staging.create("white_noise.csv")?;
            writeln!(w, "date,close")?;
            for (d, v) in synth_dates(x.len()).zip(&x) {
                writeln!(w, "{d},{v}")?;
            }
            w.flush()?;
        }
        SynthKind::Lorenz(a) => {
            let traj = lorenz(&lorenz_params(a))?;
            let mut w = staging.create("lorenz.csv")?;
            match a.component {
                None => {
                    writeln!(w, "date,x,y,z")?;
                    for (d, s) in synth_dates(traj.len()).zip(&traj) {
                        writeln!(w, "{d},{},{},{}", s[0], s[1], s[2])?;
                    }
                }
                Some(c) => {
                    let k = match c {
                        Component::X => 0,
                        Component::Y => 1,
                        Component::Z => 2,
                    };
                    writeln!(w, "date,close")?;
                    for (d, s) in synth_dates(traj.len()).zip(&traj) {
                        writeln!(w, "{d},{}", s[k])?;
                    }
                }
            }
            w.flush()?;
        }
    }
    Ok(staging.commit()?)
}

/// ε values of the sweep, as fractions of the maximum distance.
pub const SWEEP_FRACTIONS: [f64; 3] = [0.01, 0.02, 0.03];

/// Diagnostics of one normalized series (or a segment of it): `rp.pbm`,
/// `p_tau.csv`, `acf.csv`, `auto_mi.csv`, `summary.csv`, and with `sweep`
/// also `p_tau_sweep.csv`.
pub fn cmd_diagnose(cfg: &RunConfig, args: &DiagnoseArgs) -> Result<Vec<PathBuf>, CliError> {
    let series = load_series(&args.input)?;
    let n_all = series.len();
    let end = args.length.map_or(n_all, |l| args.start.saturating_add(l));
    if args.start >= end || end > n_all {
        return Err(CliError::Usage(format!(
            "segment {}..{end} does not fit a series of {n_all} points",
            args.start
        )));
    }
    let z = normalize(&series.values()[args.start..end])?;
    let n = z.len();
    let traj = Trajectory::from_scalar(z.values())?;
    let r = recurrence_matrix(&traj, &cfg.test.recurrence)?;
    let tau_max = (n / 2).max(1);
    let profile = tau_recurrence_rate(&r, tau_max)?;
    let acf = autocorrelation(z.values(), n / 2)?;
    let tau_c = autocorrelation_time(z.values());
    if let Err(e) = &tau_c {
        warn!("autocorrelation time: {e}");
    }

    let mut staging = Staging::new(&cfg.out)?;
    r.write_pbm(staging.create("rp.pbm")?)?;

    let mut w = staging.create("p_tau.csv")?;
    writeln!(w, "tau,p")?;
    for (t, p) in profile.p().iter().enumerate() {
        writeln!(w, "{t},{}", fmt_g(*p))?;
    }
    w.flush()?;

    let mut w = staging.create("acf.csv")?;
    writeln!(w, "lag,acf")?;
    for (k, a) in acf.iter().enumerate() {
        writeln!(w, "{k},{}", fmt_g(*a))?;
    }
    w.flush()?;

    let mut w = staging.create("auto_mi.csv")?;
    writeln!(w, "lag,mi")?;
    let vals = z.values();
    for lag in 0..=args.mi_lags.min(n.saturating_sub(MI_MIN_LEN)) {
        let mi = mutual_information(&vals[..n - lag], &vals[lag..])?;
        writeln!(w, "{lag},{}", fmt_g(mi))?;
    }
    w.flush()?;

    let mut w = staging.create("summary.csv")?;
    writeln!(w, "key,value")?;
    writeln!(w, "label,{}", series.label())?;
    writeln!(w, "start_date,{}", series.dates()[args.start])?;
    writeln!(w, "end_date,{}", series.dates()[end - 1])?;
    writeln!(w, "n,{n}")?;
    writeln!(w, "epsilon,{}", fmt_g(cfg.test.recurrence.epsilon()))?;
    writeln!(w, "recurrence_rate,{}", fmt_g(r.recurrence_rate()))?;
    writeln!(w, "tau_c,{}", tau_c.map(|t| t.to_string()).unwrap_or_default())?;
    w.flush()?;

    if args.sweep {
        let norm = Norm::Absolute;
        let max_d = traj.max_distance(norm);
        let profiles = SWEEP_FRACTIONS
            .iter()
            .map(|f| {
                let rc = RecurrenceConfig::new(f * max_d, norm)?;
                tau_recurrence_rate(&recurrence_matrix(&traj, &rc)?, tau_max)
            })
            .collect::<recurconnect::Result<Vec<_>>>()?;
        let mut w = staging.create("p_tau_sweep.csv")?;
        writeln!(w, "tau,eps_1pct,eps_2pct,eps_3pct")?;
        for t in 0..=tau_max {
            writeln!(
                w,
                "{t},{},{},{}",
                fmt_g(profiles[0].p()[t]),
                fmt_g(profiles[1].p()[t]),
                fmt_g(profiles[2].p()[t])
            )?;
        }
        w.flush()?;
    }
    Ok(staging.commit()?)
}
