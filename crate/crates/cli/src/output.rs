//! CSV formatting and all-or-nothing output staging.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use recurconnect::analysis::{ConnectivityBins, PeakAlignment, PairTrend, TestedMeasure, WindowOutcome};
use tempfile::TempDir;

pub const TREND_HEADER: &str =
    "window_start_index,start_date,end_date,cpr,cpr_p,cpr_significant,rho,rho_p,rho_significant,status";
pub const BINS_HEADER: &str = "window_start_index,strong_sig,strong_all,moderate_sig,moderate_all,weak_sig,weak_all";
pub const PEAK_HEADER: &str =
    "offset,x_start_date,y_start_date,cpr,cpr_p,cpr_significant,rho,rho_p,rho_significant,status";

/// `%g` with 6 significant digits. Ties round to even on the exact binary
/// value.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan" } else if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        strip_zeros(&format!("{v:.*}", (5 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn measure_fields(m: Option<TestedMeasure>) -> [String; 3] {
    match m {
        None => Default::default(),
        Some(m) => match m.test {
            None => [fmt_g(m.value), String::new(), String::new()],
            Some(t) => [fmt_g(m.value), fmt_g(t.p_value), t.significant.to_string()],
        },
    }
}

fn outcome_fields(o: &WindowOutcome) -> String {
    let [c, cp, cs] = measure_fields(o.cpr);
    let [r, rp, rs] = measure_fields(o.rho);
    format!("{c},{cp},{cs},{r},{rp},{rs},{}", o.status.as_str())
}

pub fn write_trend<W: Write>(mut w: W, trend: &PairTrend) -> io::Result<()> {
    writeln!(w, "{TREND_HEADER}")?;
    for r in &trend.records {
        writeln!(w, "{},{},{},{}", r.start, r.start_date, r.end_date, outcome_fields(&r.outcome))?;
    }
    w.flush()
}

pub fn write_bins<W: Write>(mut w: W, bins: &ConnectivityBins) -> io::Result<()> {
    writeln!(w, "{BINS_HEADER}")?;
    for b in &bins.windows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            b.start, b.strong.significant, b.strong.all, b.moderate.significant, b.moderate.all, b.weak.significant, b.weak.all
        )?;
    }
    w.flush()
}

pub fn write_peak<W: Write>(mut w: W, peak: &PeakAlignment) -> io::Result<()> {
    writeln!(w, "{PEAK_HEADER}")?;
    for r in &peak.records {
        writeln!(w, "{},{},{},{}", r.offset, r.x_start_date, r.y_start_date, outcome_fields(&r.outcome))?;
    }
    w.flush()
}

/// Collects output files in a hidden directory next to their destination
/// and moves them into place only on [`Staging::commit`]. Dropping an
/// uncommitted staging area deletes everything written to it.
pub struct Staging {
    dir: TempDir,
    out: PathBuf,
    names: Vec<String>,
}

impl Staging {
    pub fn new(out: &Path) -> io::Result<Self> {
        fs::create_dir_all(out)?;
        Ok(Self {
            dir: tempfile::Builder::new().prefix(".recurconnect-").tempdir_in(out)?,
            out: out.to_path_buf(),
            names: Vec::new(),
        })
    }

    pub fn create(&mut self, name: &str) -> io::Result<BufWriter<File>> {
        self.names.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.path().join(name))?))
    }

    /// Moves staged files into the output directory. On failure, files
    /// already moved are removed again.
    pub fn commit(self) -> io::Result<Vec<PathBuf>> {
        let mut done = Vec::with_capacity(self.names.len());
        for name in &self.names {
            let dest = self.out.join(name);
            if let Err(e) = fs::rename(self.dir.path().join(name), &dest) {
                for p in &done {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
            done.push(dest);
        }
        Ok(done)
    }
}
