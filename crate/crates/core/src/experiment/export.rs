//! CSV output of sweeps: one summary file and one per-episode file.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::sweep::SweepRow;
use crate::sim::{Algorithm, EpisodeResult};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const EPISODES_FILE: &str = "episodes.csv";

const SUMMARY_HEADER: [&str; 8] = [
    "delta",
    "algo",
    "n_trials",
    "mean_tau",
    "std_tau",
    "error_rate",
    "d_bernoulli",
    "lower_bound",
];
const EPISODE_HEADER: [&str; 7] = ["seed", "delta", "algo", "tau", "recommended", "correct", "capped"];

/// Formats a float with 12 significant digits, `%.12g` style.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn writer<W: Write>(inner: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(inner)
}

/// Writes the summary CSV to any sink.
pub fn write_summary<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_float(r.delta),
            r.algo.to_string(),
            r.n_trials.to_string(),
            fmt_float(r.mean_tau),
            fmt_float(r.std_tau),
            fmt_float(r.error_rate),
            fmt_float(r.d_bernoulli),
            fmt_float(r.lower_bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the per-episode CSV to any sink.
pub fn write_episodes<W: Write>(episodes: &[EpisodeResult], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(EPISODE_HEADER)?;
    for e in episodes {
        w.write_record([
            e.seed.to_string(),
            fmt_float(e.delta),
            e.algo.to_string(),
            e.tau.to_string(),
            e.recommended.to_string(),
            e.correct.to_string(),
            e.capped.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `summary.csv` and `episodes.csv` into `dir`, creating it if
/// needed. Returns both paths.
pub fn export_csv(rows: &[SweepRow], episodes: &[EpisodeResult], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let summary = dir.join(SUMMARY_FILE);
    let per_episode = dir.join(EPISODES_FILE);
    write_summary(rows, fs::File::create(&summary)?)?;
    write_episodes(episodes, fs::File::create(&per_episode)?)?;
    Ok((summary, per_episode))
}

/// One line of the per-episode CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub delta: f64,
    pub algo: Algorithm,
    pub tau: u64,
    pub recommended: usize,
    pub correct: bool,
    pub capped: bool,
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or_default();
    raw.parse()
        .map_err(|_| Error::Config(format!("bad CSV field {i}: {raw:?}")))
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    Ok(())
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &SUMMARY_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(SweepRow {
                delta: field(&rec, 0)?,
                algo: field(&rec, 1)?,
                n_trials: field(&rec, 2)?,
                mean_tau: field(&rec, 3)?,
                std_tau: field(&rec, 4)?,
                error_rate: field(&rec, 5)?,
                d_bernoulli: field(&rec, 6)?,
                lower_bound: field(&rec, 7)?,
            })
        })
        .collect()
}

pub fn read_episodes_csv<R: Read>(input: R) -> Result<Vec<EpisodeRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &EPISODE_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            Ok(EpisodeRecord {
                seed: field(&rec, 0)?,
                delta: field(&rec, 1)?,
                algo: field(&rec, 2)?,
                tau: field(&rec, 3)?,
                recommended: field(&rec, 4)?,
                correct: field(&rec, 5)?,
                capped: field(&rec, 6)?,
            })
        })
        .collect()
}
