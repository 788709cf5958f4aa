//! CSV and gnuplot artifacts of a trial battery.
//!
//! All numbers are written with six significant digits; NPVs are in
//! dollars. `summary.csv` is computed from the rounded finals, so it can be
//! regenerated byte for byte from `finals.csv` alone.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::trials::{summarize, TrialSummary};
use crate::error::{Error, Result};
use crate::format::sig6;

/// Convergence curves are written every this many evaluations, plus the
/// last one.
pub const CONVERGENCE_STRIDE: usize = 50;

pub const FINALS_FILE: &str = "finals.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const GNUPLOT_FILE: &str = "convergence.dat";

const SUMMARY_HEADER: &str =
    "case,config,trials,failed_trials,best_usd,worst_usd,mean_usd,sd_usd,median_usd";

/// Paths of the files written by [`export_results`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportedFiles {
    pub finals: PathBuf,
    pub convergence: PathBuf,
    pub summary: PathBuf,
    pub gnuplot: PathBuf,
}

impl ExportedFiles {
    pub fn in_dir(dir: &Path) -> Self {
        ExportedFiles {
            finals: dir.join(FINALS_FILE),
            convergence: dir.join(CONVERGENCE_FILE),
            summary: dir.join(SUMMARY_FILE),
            gnuplot: dir.join(GNUPLOT_FILE),
        }
    }
}

/// `case,config,trial,seed,npv_usd,<well>_i,<well>_j,...`, one row per trial.
pub fn finals_csv(summary: &TrialSummary, case: &str, config: &str, well_ids: &[String]) -> String {
    let mut out = String::from("case,config,trial,seed,npv_usd");
    for id in well_ids {
        write!(out, ",{id}_i,{id}_j").unwrap();
    }
    out.push('\n');
    for t in &summary.trials {
        write!(
            out,
            "{case},{config},{},{},{}",
            t.trial,
            t.seed,
            sig6(t.best.0)
        )
        .unwrap();
        for (i, j) in &t.cells {
            write!(out, ",{i},{j}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Rows of the convergence table: 1-based evaluation index, mean
/// best-so-far over trials, then each trial's best-so-far.
fn convergence_rows(summary: &TrialSummary) -> Vec<(usize, Option<f64>, Vec<f64>)> {
    let mean = summary.mean_best_so_far();
    let len = mean.len();
    let mut indices: Vec<usize> = (CONVERGENCE_STRIDE..=len)
        .step_by(CONVERGENCE_STRIDE)
        .collect();
    if len > 0 && indices.last() != Some(&len) {
        indices.push(len);
    }
    indices
        .into_iter()
        .map(|k| {
            let per_trial = summary
                .trials
                .iter()
                .map(|t| {
                    t.best_so_far
                        .get(k - 1)
                        .or(t.best_so_far.last())
                        .map_or(f64::NEG_INFINITY, |m| m.0)
                })
                .collect();
            (k, mean[k - 1], per_trial)
        })
        .collect()
}

/// `eval_index,mean_best_usd,trial_1,...`; the mean is empty while no trial
/// has a feasible layout.
pub fn convergence_csv(summary: &TrialSummary) -> String {
    let mut out = String::from("eval_index,mean_best_usd");
    for t in &summary.trials {
        write!(out, ",trial_{}", t.trial).unwrap();
    }
    out.push('\n');
    for (k, mean, per_trial) in convergence_rows(summary) {
        write!(out, "{k},{}", mean.map(sig6).unwrap_or_default()).unwrap();
        for v in per_trial {
            write!(out, ",{}", sig6(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Whitespace-separated version of the convergence table; missing values
/// are `NaN` so gnuplot skips them.
pub fn convergence_dat(summary: &TrialSummary, case: &str, config: &str) -> String {
    let mut out = format!("# {case} config {config}: best-so-far NPV (USD) vs evaluations\n");
    out.push_str("# eval_index mean_best_usd");
    for t in &summary.trials {
        write!(out, " trial_{}", t.trial).unwrap();
    }
    out.push('\n');
    let num = |v: f64| {
        if v.is_finite() {
            sig6(v)
        } else {
            "NaN".to_string()
        }
    };
    for (k, mean, per_trial) in convergence_rows(summary) {
        write!(out, "{k} {}", num(mean.unwrap_or(f64::NAN))).unwrap();
        for v in per_trial {
            write!(out, " {}", num(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// The summary table: header plus one row.
pub fn summary_csv(case: &str, config: &str, finals: &[f64]) -> Result<String> {
    let rounded: Vec<f64> = finals
        .iter()
        .map(|v| sig6(*v).parse::<f64>().expect("sig6 output parses"))
        .collect();
    let feasible: Vec<f64> = rounded.iter().copied().filter(|v| v.is_finite()).collect();
    let failed = rounded.len() - feasible.len();
    let stats = if feasible.is_empty() {
        String::from(",,,,")
    } else {
        let s = summarize(&feasible)?;
        [s.best, s.worst, s.mean, s.sd, s.median]
            .map(sig6)
            .join(",")
    };
    Ok(format!(
        "{SUMMARY_HEADER}\n{case},{config},{},{failed},{stats}\n",
        rounded.len()
    ))
}

/// Writes `finals.csv`, `convergence.csv`, `summary.csv` and
/// `convergence.dat` into `dir`, creating it if needed.
pub fn export_results(
    summary: &TrialSummary,
    case: &str,
    config: &str,
    well_ids: &[String],
    dir: &Path,
) -> Result<ExportedFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ExportedFiles::in_dir(dir);
    let finals: Vec<f64> = summary.finals().iter().map(|m| m.0).collect();
    let contents = [
        (&files.finals, finals_csv(summary, case, config, well_ids)),
        (&files.convergence, convergence_csv(summary)),
        (&files.summary, summary_csv(case, config, &finals)?),
        (&files.gnuplot, convergence_dat(summary, case, config)),
    ];
    for (path, text) in contents {
        fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(files)
}

/// One data row of `finals.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalRow {
    pub case: String,
    pub config: String,
    pub trial: usize,
    pub seed: u64,
    pub npv_usd: f64,
    pub cells: Vec<(usize, usize)>,
}

/// Reads back a `finals.csv` written by [`export_results`].
pub fn read_finals(path: &Path) -> Result<Vec<FinalRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_finals(&text)
}

pub fn parse_finals(text: &str) -> Result<Vec<FinalRow>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(format!("finals table: {e}")))?
        .clone();
    let expected = ["case", "config", "trial", "seed", "npv_usd"];
    if headers.len() < expected.len()
        || headers.iter().zip(expected).any(|(h, e)| h != e)
        || !(headers.len() - expected.len()).is_multiple_of(2)
    {
        return Err(Error::Config(format!(
            "finals table header must start with {}, followed by well i/j pairs",
            expected.join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Config(format!("finals table: {e}")))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |k: usize| record.get(k).unwrap_or("");
        let parse_err = |k: usize| Error::Parse {
            line,
            column: k + 1,
            token: field(k).to_string(),
        };
        let int = |k: usize| field(k).parse::<u64>().map_err(|_| parse_err(k));
        let npv_usd = field(4).parse::<f64>().map_err(|_| parse_err(4))?;
        if npv_usd.is_nan() || npv_usd == f64::INFINITY {
            return Err(parse_err(4));
        }
        let mut cells = Vec::new();
        for k in (5..record.len()).step_by(2) {
            cells.push((int(k)? as usize, int(k + 1)? as usize));
        }
        rows.push(FinalRow {
            case: field(0).to_string(),
            config: field(1).to_string(),
            trial: int(2)? as usize,
            seed: int(3)?,
            npv_usd,
            cells,
        });
    }
    if rows.is_empty() {
        return Err(Error::Config("finals table has no data rows".into()));
    }
    Ok(rows)
}

/// Recomputes `summary.csv` contents from the rows of a `finals.csv`.
pub fn summary_from_finals(rows: &[FinalRow]) -> Result<String> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Config("finals table has no data rows".into()))?;
    if let Some(r) = rows
        .iter()
        .find(|r| r.case != first.case || r.config != first.config)
    {
        return Err(Error::Config(format!(
            "finals table mixes {}/{} with {}/{}",
            first.case, first.config, r.case, r.config
        )));
    }
    let finals: Vec<f64> = rows.iter().map(|r| r.npv_usd).collect();
    summary_csv(&first.case, &first.config, &finals)
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::economics::Money;
    use crate::harness::builtin_config;
    use crate::harness::trials::TrialRecord;

    fn summary(n_evals: usize) -> TrialSummary {
        let trials = (1..=3)
            .map(|t| TrialRecord {
                trial: t,
                seed: 42 + t as u64,
                best: Money(1.0e8 * t as f64 + 0.123456789),
                best_x: vec![1.0, 2.0, 3.0, 4.0],
                cells: vec![(1, 2), (3, 4)],
                best_so_far: (0..n_evals)
                    .map(|k| {
                        if k < t {
                            Money::NEG_INFINITY
                        } else {
                            Money(1.0e8 * t as f64 * (k + 1) as f64 / n_evals as f64 + 0.123456789)
                        }
                    })
                    .collect(),
                evaluations: n_evals,
                invocations: n_evals,
                wall_time: Duration::from_millis(5),
            })
            .collect();
        TrialSummary::from_trials(builtin_config(6).unwrap(), trials).unwrap()
    }

    #[test]
    fn finals_rows_and_round_trip() {
        let s = summary(120);
        let ids = vec!["I1".to_string(), "P1".to_string()];
        let text = finals_csv(&s, "case1-mini", "6", &ids);
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("case,config,trial,seed,npv_usd,I1_i,I1_j,P1_i,P1_j")
        );
        assert_eq!(lines.next(), Some("case1-mini,6,1,43,1e+08,1,2,3,4"));
        assert_eq!(text.lines().count(), 4);
        let rows = parse_finals(&text).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].cells, vec![(1, 2), (3, 4)]);
        let finals: Vec<f64> = s.finals().iter().map(|m| m.0).collect();
        assert_eq!(
            summary_from_finals(&rows).unwrap(),
            summary_csv("case1-mini", "6", &finals).unwrap()
        );
    }

    #[test]
    fn convergence_is_decimated() {
        let s = summary(120);
        let text = convergence_csv(&s);
        let index: Vec<&str> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(index, ["50", "100", "120"]);
        let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
        assert_eq!(last[1], sig6(s.stats.unwrap().mean));
        let dat = convergence_dat(&s, "case1", "6");
        assert!(dat
            .lines()
            .all(|l| l.starts_with('#') || l.split(' ').count() == 5));
    }

    #[test]
    fn early_rows_mark_missing_values() {
        let s = summary(3);
        let text = convergence_csv(&s);
        assert_eq!(text.lines().nth(1).unwrap().split(',').nth(4), Some("-inf"));
        assert!(convergence_dat(&s, "c", "6").contains("NaN"));
    }

    #[test]
    fn summary_with_failures() {
        let text = summary_csv("case3", "1", &[f64::NEG_INFINITY, 2.0, 4.0]).unwrap();
        assert_eq!(text.lines().nth(1), Some("case3,1,3,1,4,2,3,1.41421,3"));
        let none = summary_csv("case3", "1", &[f64::NEG_INFINITY]).unwrap();
        assert_eq!(none.lines().nth(1), Some("case3,1,1,1,,,,,"));
    }

    #[test]
    fn export_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let s = summary(120);
        let ids = vec!["I1".to_string(), "P1".to_string()];
        let a = export_results(&s, "case1", "6", &ids, &dir.path().join("a")).unwrap();
        let b = export_results(&s, "case1", "6", &ids, &dir.path().join("b")).unwrap();
        for (x, y) in [
            (a.finals, b.finals),
            (a.convergence, b.convergence),
            (a.summary, b.summary),
            (a.gnuplot, b.gnuplot),
        ] {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
    }

    #[test]
    fn malformed_finals_are_rejected() {
        assert!(parse_finals("a,b\n1,2\n").is_err());
        assert!(parse_finals("case,config,trial,seed,npv_usd\n").is_err());
        let err = parse_finals("case,config,trial,seed,npv_usd\nc,1,1,2,abc\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 5,
                    ..
                }
            ),
            "{err:?}"
        );
    }
}
