use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use clap::{CommandFactory, Parser};
use recurconnect::synthdata::white_noise;

use super::*;

fn invoke(args: &[&str]) -> Result<Vec<PathBuf>, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("recurconnect").chain(args.iter().copied()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli)
}

fn is_usage(r: &Result<Vec<PathBuf>, CliError>) -> bool {
    matches!(r, Err(CliError::Usage(_)))
}

fn write_series(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let start = NaiveDate::from_ymd_opt(1998, 1, 1).unwrap();
    let mut text = String::from("date,close\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{},{v}\n", start + Days::new(i as u64)));
    }
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn noise_walk(n: usize, seed: u64) -> Vec<f64> {
    let e = white_noise(n, seed).unwrap();
    let mut x = 0.0;
    e.iter()
        .map(|u| {
            x = 0.8 * x + u - 0.5;
            x
        })
        .collect()
}

fn read_column(path: &Path, col: usize) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn one_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_series(dir.path(), "a.csv", &noise_walk(300, 1));
    let r = invoke(&["trends", s(&a), "--out", s(&dir.path().join("o"))]);
    assert!(is_usage(&r));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn trends_write_pair_files_and_bins() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<PathBuf> = (0..3)
        .map(|k| write_series(dir.path(), &format!("s{k}.csv"), &noise_walk(400, k)))
        .collect();
    let out_dir = dir.path().join("out");
    let mut args = vec!["trends", "--window", "200", "--step", "50", "--surrogates", "10", "--out", s(&out_dir)];
    args.extend(inputs.iter().map(|p| s(p)));
    invoke(&args).unwrap();

    let mut names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["bins.csv", "trend_s0__s1.csv", "trend_s0__s2.csv", "trend_s1__s2.csv"]);

    let trend = fs::read_to_string(out_dir.join("trend_s0__s1.csv")).unwrap();
    let mut lines = trend.lines();
    assert_eq!(
        lines.next().unwrap(),
        "window_start_index,start_date,end_date,cpr,cpr_p,cpr_significant,rho,rho_p,rho_significant,status"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..3], ["0", "1998-01-01", "1998-07-19"]);
    assert_eq!(trend.lines().count(), 1 + 5);

    let bins = fs::read_to_string(out_dir.join("bins.csv")).unwrap();
    assert!(bins.starts_with("window_start_index,strong_sig,strong_all,moderate_sig,moderate_all,weak_sig,weak_all\n"));
    for line in bins.lines().skip(1) {
        let v: Vec<usize> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(v[2] + v[4] + v[6], 3);
    }
}

#[test]
fn peak_on_identical_pair_gives_unit_cpr() {
    let dir = tempfile::tempdir().unwrap();
    let mut x = noise_walk(1300, 5);
    x[650] = 40.0;
    let a = write_series(dir.path(), "a.csv", &x);
    let b = write_series(dir.path(), "b.csv", &x);
    let out_dir = dir.path().join("out");
    invoke(&[
        "peak", "--from", "1999-06-01", "--to", "1999-12-31", "--step", "50", "--surrogates", "10", "--out",
        s(&out_dir), s(&a), s(&b),
    ])
    .unwrap();
    let path = out_dir.join("peak_a__b.csv");
    let offsets = read_column(&path, 0);
    assert_eq!(offsets.first(), Some(&-500.0));
    assert_eq!(offsets.last(), Some(&250.0));
    assert!(read_column(&path, 3).iter().all(|&c| c == 1.0));
}

#[test]
fn peak_search_outside_data_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_series(dir.path(), "a.csv", &noise_walk(1300, 1));
    let b = write_series(dir.path(), "b.csv", &noise_walk(1300, 2));
    let out = dir.path().join("out");
    let r = invoke(&["peak", "--from", "2010-01-01", "--to", "2011-01-01", "--out", s(&out), s(&a), s(&b)]);
    assert!(is_usage(&r));
}

#[test]
fn peak_without_history_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let ramp: Vec<f64> = (0..1300).map(|i| i as f64).collect();
    let a = write_series(dir.path(), "a.csv", &ramp);
    let b = write_series(dir.path(), "b.csv", &ramp);
    let out_dir = dir.path().join("out");
    let r = invoke(&["peak", "--from", "1998-01-01", "--to", "2005-01-01", "--out", s(&out_dir), s(&a), s(&b)]);
    let Err(e @ CliError::Runtime(_)) = r else { panic!("expected a runtime error") };
    let msg = format!("{e:#}");
    assert!(msg.contains("offset"), "{msg}");
    assert!(!out_dir.join("peak_a__b.csv").exists());
}

#[test]
fn bad_flag_value_is_rejected_by_the_parser() {
    let e = Cli::try_parse_from(["recurconnect", "trends", "--window", "many", "a.csv", "b.csv"]).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn synth_lorenz_has_three_value_columns() {
    let dir = tempfile::tempdir().unwrap();
    invoke(&["synth", "lorenz", "--n", "500", "--out", s(dir.path())]).unwrap();
    let text = fs::read_to_string(dir.path().join("lorenz.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("date,x,y,z"));
    assert!(lines.next().unwrap().starts_with("2000-01-01,"));
    assert_eq!(text.lines().count(), 501);
    assert!(text.lines().all(|l| l.split(',').count() == 4));
}

#[test]
fn diagnose_white_noise_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    invoke(&["synth", "white", "--n", "2000", "--seed", "3", "--out", s(dir.path())]).unwrap();
    let input = dir.path().join("white_noise.csv");
    let out_dir = dir.path().join("diag");
    invoke(&["diagnose", "--sweep", "--out", s(&out_dir), s(&input)]).unwrap();

    let p = read_column(&out_dir.join("p_tau.csv"), 1);
    assert_eq!(p.len(), 1001);
    let tail = &p[1..=500];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tail.len() as f64;
    assert!(var.sqrt() / mean < 0.2);

    let sweep = out_dir.join("p_tau_sweep.csv");
    let (e1, e2, e3) = (read_column(&sweep, 1), read_column(&sweep, 2), read_column(&sweep, 3));
    for t in 0..e1.len() {
        assert!(e1[t] <= e2[t] && e2[t] <= e3[t], "tau {t}");
    }
    for f in ["rp.pbm", "acf.csv", "auto_mi.csv", "summary.csv"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.contains("tau_c,1\n"), "{summary}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    write_series(dir.path(), "a.csv", &noise_walk(300, 1));
    write_series(dir.path(), "b.csv", &noise_walk(300, 2));
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "inputs = [\"a.csv\", \"b.csv\"]\nwindow = 100\nstep = 100\nsurrogates = 5\nout = \"from_file\"\n",
    )
    .unwrap();
    invoke(&["trends", "--config", s(&cfg), "--step", "50"]).unwrap();
    let trend = dir.path().join("from_file").join("trend_a__b.csv");
    assert_eq!(read_column(&trend, 0), [0.0, 50.0, 100.0, 150.0, 200.0]);
}

#[test]
fn every_common_flag_reads_the_environment() {
    let cmd = Cli::command();
    let trends = cmd.find_subcommand("trends").unwrap();
    for arg in trends.get_arguments() {
        let id = arg.get_id().as_str();
        if id == "inputs" || id == "verbose" {
            continue;
        }
        let env = arg.get_env().unwrap_or_else(|| panic!("{id} has no environment variable"));
        assert_eq!(env.to_str().unwrap(), format!("RECURCONNECT_{}", id.to_uppercase()));
    }
}
