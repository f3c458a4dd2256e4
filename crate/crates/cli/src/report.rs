//! `runs.csv` and `summary.json` writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use linsep_core::RunRecord;
use serde::Serialize;

use crate::error::{io_err, CliError, Result};

pub const CSV_HEADER: &str =
    "run_id,seed,k,eta,alpha,activation,epochs,nonzero_updates,final_train_loss,final_train_err,final_test_err,status";

/// A finished run and the settings that produced it.
#[derive(Debug, Clone)]
pub struct RunMeta {
    pub run_id: u64,
    pub seed: u64,
    pub k: usize,
    pub eta: f64,
    /// `0` for ReLU.
    pub alpha: f64,
    pub activation: String,
    pub record: RunRecord,
}

#[derive(Serialize)]
struct Row<'a> {
    run_id: u64,
    seed: u64,
    k: usize,
    eta: f64,
    alpha: f64,
    activation: &'a str,
    epochs: usize,
    nonzero_updates: u64,
    final_train_loss: f64,
    final_train_err: f64,
    final_test_err: Option<f64>,
    status: &'static str,
}

/// Writes one row per run, sorted by `run_id`.
pub fn emit_csv(path: &Path, runs: &[RunMeta]) -> Result<()> {
    if runs.is_empty() {
        return Err(CliError::Config("no runs to write".into()));
    }
    let mut sorted: Vec<&RunMeta> = runs.iter().collect();
    sorted.sort_by_key(|r| r.run_id);
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for r in sorted {
        let last = r.record.final_stats();
        w.serialize(Row {
            run_id: r.run_id,
            seed: r.seed,
            k: r.k,
            eta: r.eta,
            alpha: r.alpha,
            activation: &r.activation,
            epochs: r.record.epochs(),
            nonzero_updates: r.record.nonzero_updates,
            final_train_loss: last.hinge_loss,
            final_train_err: last.train_error,
            final_test_err: last.test_error,
            status: r.record.status.as_str(),
        })?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use linsep_core::{EpochStats, RunStatus};

    fn meta(run_id: u64, activation: &str, test: Option<f64>) -> RunMeta {
        RunMeta {
            run_id,
            seed: 100 + run_id,
            k: 3,
            eta: 0.1,
            alpha: 0.25,
            activation: activation.into(),
            record: RunRecord {
                nonzero_updates: 7,
                total_steps: 20,
                status: RunStatus::GlobalMin,
                epoch_stats: vec![EpochStats {
                    epoch: 2,
                    hinge_loss: 0.0,
                    train_error: 0.0,
                    test_error: test,
                    nonzero_updates: 7,
                }],
                trajectory: None,
            },
        }
    }

    #[test]
    fn one_record_gives_header_and_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("runs.csv");
        emit_csv(&p, &[meta(0, "leaky_relu", Some(0.125))]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, [CSV_HEADER, "0,100,3,0.1,0.25,leaky_relu,2,7,0.0,0.0,0.125,global_min"]);
    }

    #[test]
    fn rows_sorted_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        let runs = [meta(2, "relu", None), meta(0, "relu", None), meta(1, "relu", None)];
        emit_csv(&a, &runs).unwrap();
        emit_csv(&b, &runs).unwrap();
        let text = std::fs::read(&a).unwrap();
        assert_eq!(text, std::fs::read(&b).unwrap());
        let ids: Vec<String> = String::from_utf8(text)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().to_string())
            .collect();
        assert_eq!(ids, ["0", "1", "2"]);
    }

    #[test]
    fn fields_are_quoted_when_needed() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("q.csv");
        emit_csv(&p, &[meta(0, "odd,\"name\"", None)]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"odd,\"\"name\"\"\""));
        let mut r = csv::Reader::from_path(&p).unwrap();
        let rec = r.records().next().unwrap().unwrap();
        assert_eq!(&rec[5], "odd,\"name\"");
        assert_eq!(&rec[10], "");
    }

    #[test]
    fn empty_input_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_csv(&dir.path().join("x.csv"), &[]).is_err());
    }

    #[test]
    fn mean_std() {
        let m = MeanStd::of([1.0, 3.0]).unwrap();
        assert_eq!((m.mean, m.std), (2.0, 1.0));
        assert!(MeanStd::of([]).is_none());
    }
}
