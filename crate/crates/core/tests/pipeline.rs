use chrono::{Datelike, Days, NaiveDate, Weekday};
use recurconnect::analysis::{window_span_stats, WindowSpec};
use recurconnect::prelude::*;
use recurconnect::preprocess::mean_std;

fn day0() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).unwrap()
}

fn daily(n: usize) -> Vec<NaiveDate> {
    (0..n).map(|i| day0() + Days::new(i as u64)).collect()
}

fn business_days(n: usize) -> Vec<NaiveDate> {
    let mut d = day0();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = white_noise(n + 200, seed).unwrap();
    let mut x = 0.0;
    e.iter()
        .map(|u| {
            x = phi * x + u - 0.5;
            x
        })
        .skip(200)
        .collect()
}

#[test]
fn white_noise_profile_is_flat() {
    let z = normalize(&white_noise(2000, 4).unwrap()).unwrap();
    let traj = Trajectory::from_scalar(z.values()).unwrap();
    let p = tau_recurrence_rate_direct(&traj, &RecurrenceConfig::default(), 500).unwrap();
    let (m, s) = mean_std(&p.p()[1..]);
    assert!(s / m < 0.2, "cv {}", s / m);
}

#[test]
fn lorenz_profile_has_decaying_periodic_maxima() {
    let traj = lorenz(&LorenzParams {
        n: 2000,
        ..LorenzParams::demo()
    })
    .unwrap();
    let cols: Vec<Vec<f64>> = (0..3)
        .map(|k| normalize(&traj.iter().map(|s| s[k]).collect::<Vec<_>>()).unwrap().into_values())
        .collect();
    let points: Vec<Vec<f64>> = (0..2000).map(|i| vec![cols[0][i], cols[1][i], cols[2][i]]).collect();
    let traj = Trajectory::from_points(&points).unwrap();
    let eps = 0.05 * traj.max_distance(Norm::Euclidean);
    let p = tau_recurrence_rate_direct(&traj, &RecurrenceConfig::new(eps, Norm::Euclidean).unwrap(), 1000).unwrap();
    let p = p.p();

    let argmax = |lo: usize, hi: usize| (lo..=hi).max_by(|&a, &b| p[a].total_cmp(&p[b]).then(b.cmp(&a))).unwrap();
    let first = argmax(20, 120);
    let period = first as f64;
    let mut peaks = vec![first];
    for k in 2..=5 {
        let centre = (k as f64 * period) as usize;
        let half = (period / 4.0) as usize;
        peaks.push(argmax(centre - half, centre + half));
    }
    for w in peaks.windows(2) {
        let gap = (w[1] - w[0]) as f64;
        assert!((gap - period).abs() <= 0.15 * period, "peaks {peaks:?}");
        assert!(p[w[1]] < p[w[0]], "peak heights {:?}", peaks.iter().map(|&t| p[t]).collect::<Vec<_>>());
    }
    for &t in &peaks {
        assert!(p[t] > p[t - 10] && p[t] > p[t + 10], "no local maximum at {t}");
    }
}

fn dataset(series: &[Vec<f64>]) -> AlignedDataset {
    let dates = business_days(series[0].len());
    let list: Vec<TimeSeries> = series
        .iter()
        .enumerate()
        .map(|(k, v)| TimeSeries::new(format!("S{k}"), dates.clone(), v.clone()).unwrap())
        .collect();
    align(&list).unwrap()
}

fn quick_config() -> TestConfig {
    TestConfig {
        n_surrogates: 20,
        ..TestConfig::default()
    }
}

#[test]
fn self_pair_trend_is_perfect() {
    let x = ar1(0.8, 600, 1);
    let data = dataset(&[x.clone(), x]);
    let spec = WindowSpec::new(250, 50).unwrap();
    let trends = sliding_pairwise(&data, &spec, &quick_config(), 3).unwrap();
    assert_eq!(trends.len(), 1);
    assert_eq!(trends[0].records.len(), 8);
    for r in &trends[0].records {
        assert_eq!(r.outcome.status, WindowStatus::Ok);
        assert!((r.outcome.cpr.unwrap().value - 1.0).abs() < 1e-12);
        assert!((r.outcome.rho.unwrap().value - 1.0).abs() < 1e-12);
    }
}

#[test]
fn nine_series_give_thirty_six_trends() {
    let series: Vec<Vec<f64>> = (0..9).map(|k| ar1(0.7, 320, 10 + k)).collect();
    let data = dataset(&series);
    let spec = WindowSpec::new(250, 35).unwrap();
    let cfg = TestConfig {
        n_surrogates: 5,
        ..TestConfig::default()
    };
    let trends = sliding_pairwise(&data, &spec, &cfg, 1).unwrap();
    assert_eq!(trends.len(), 36);
    assert_eq!(trends[0].pair, ("S0".to_string(), "S1".to_string()));
    assert_eq!(trends[35].pair, ("S7".to_string(), "S8".to_string()));
    let bins = bin_connectivity(&trends, &Default::default()).unwrap();
    assert_eq!(bins.windows.len(), 3);
    assert!(bins.windows.iter().all(|w| w.total() == 36));
    assert_eq!(trends, sliding_pairwise(&data, &spec, &cfg, 1).unwrap());
}

#[test]
fn peak_alignment_of_identical_pair() {
    let mut x = ar1(0.9, 1400, 8);
    x[700] = 50.0;
    let dates = business_days(x.len());
    let a = TimeSeries::new("A", dates.clone(), x.clone()).unwrap();
    let b = TimeSeries::new("B", dates.clone(), x).unwrap();
    let spec = WindowSpec::new(250, 25).unwrap();
    let out = peak_align(&a, &b, (dates[600], dates[800]), &spec, &quick_config(), 2).unwrap();
    assert_eq!(out.peak_indices, (700, 700));
    assert_eq!(out.records.len(), 31);
    for r in &out.records {
        assert!((r.outcome.cpr.unwrap().value - 1.0).abs() < 1e-12);
    }
}

#[test]
fn span_of_gap_free_and_business_calendars() {
    let stats = window_span_stats(&daily(1000), [250], 10).unwrap();
    assert!(stats[0].spans.iter().all(|&s| s == 249));
    assert_eq!(stats[0].std, 0.0);

    let stats = window_span_stats(&business_days(2000), [250], 10).unwrap();
    // 250 business days run 49 or 50 weeks plus a few days
    assert!((347.0..=350.0).contains(&stats[0].mean), "{}", stats[0].mean);
    assert!(stats[0].std < 2.0);
}

#[test]
fn span_std_grows_on_gapped_calendar() {
    let mut dates = business_days(3000);
    let drop = white_noise(dates.len(), 77).unwrap();
    let mut k = 0;
    dates.retain(|_| {
        k += 1;
        drop[k - 1] > 0.05
    });
    let stats = window_span_stats(&dates, (150..=350).step_by(50), 10).unwrap();
    assert!(stats.last().unwrap().std > stats[0].std);
}
