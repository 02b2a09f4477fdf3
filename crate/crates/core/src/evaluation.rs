//! Repeated split-fit-evaluate runs shared by the CLI, the curves and the
//! examples. Run `r` uses seed `base_seed + r`.

use serde::{Deserialize, Serialize};

use crate::classify::GnbModel;
use crate::data::{split, DiscreteTable};
use crate::error::{GnbError, Result};
use crate::learn::{learn, Algorithm, Learned};
use crate::metrics::{fmt_metric, EvalReport};
use crate::structure::ModelStructure;
use crate::SCHEMA_VERSION;

/// Class code of `label`, or of code 1 when no label is given.
pub fn positive_code(table: &DiscreteTable, label: Option<&str>) -> Result<u32> {
    match label {
        Some(l) => table.class_code(l).ok_or_else(|| {
            GnbError::InvalidArgument(format!(
                "positive class {l:?} not among class labels {:?}",
                table.code_labels[table.class_column]
            ))
        }),
        None => Ok(1),
    }
}

/// Scores a fitted model on `test`.
pub fn evaluate_model(model: &GnbModel, test: &DiscreteTable, positive: u32, seed: u64) -> Result<EvalReport> {
    let posteriors = model.classify_table(test);
    let predicted: Vec<u32> = posteriors.iter().map(|p| p.predicted).collect();
    let scores: Vec<f64> = posteriors
        .iter()
        .map(|p| p.probabilities.get(positive as usize).copied().unwrap_or(0.0))
        .collect();
    EvalReport::new(seed, &predicted, &scores, test.class_codes(), &positive)
}

/// Fits `structure` on `train` and scores it on `test`.
pub fn fit_and_evaluate(
    train: &DiscreteTable,
    test: &DiscreteTable,
    structure: &ModelStructure,
    positive: u32,
    seed: u64,
) -> Result<EvalReport> {
    let model = GnbModel::fit(train, structure)?;
    evaluate_model(&model, test, positive, seed)
}

/// One seeded run: split, learn on the train side, evaluate on the test side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub learned: Learned,
    pub report: EvalReport,
}

pub fn run_once(
    table: &DiscreteTable,
    algorithm: Algorithm,
    test_fraction: f64,
    seed: u64,
    positive: u32,
) -> Result<RunResult> {
    let (train, test) = split(table, test_fraction, seed)?;
    let learned = learn(&train, algorithm)?;
    let report = fit_and_evaluate(&train, &test, &learned.structure, positive, seed)?;
    Ok(RunResult { learned, report })
}

/// Metrics averaged over runs. The AUC mean skips runs where it is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: Option<f64>,
}

impl MeanMetrics {
    pub fn of(reports: &[EvalReport]) -> Result<MeanMetrics> {
        if reports.is_empty() {
            return Err(GnbError::EmptyInput);
        }
        let n = reports.len() as f64;
        let mean = |f: fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        let aucs: Vec<f64> = reports.iter().filter_map(|r| r.auc).collect();
        Ok(MeanMetrics {
            accuracy: mean(|r| r.accuracy),
            precision: mean(|r| r.precision),
            recall: mean(|r| r.recall),
            f1: mean(|r| r.f1),
            auc: (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64),
        })
    }
}

/// Every run of one algorithm plus the averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub test_fraction: f64,
    pub base_seed: u64,
    pub runs: Vec<RunResult>,
    pub mean: MeanMetrics,
}

impl Evaluation {
    pub const CSV_HEADER: &'static str =
        "algorithm,seed,n_test,tp,fp,fn,tn,accuracy,precision,recall,f1,auc";

    /// Per-run rows followed by a `mean` row.
    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows: Vec<String> = self
            .runs
            .iter()
            .map(|r| format!("{},{}", self.algorithm, r.report.csv_row()))
            .collect();
        let m = &self.mean;
        rows.push(format!(
            "{},mean,,,,,,{},{},{},{},{}",
            self.algorithm,
            fmt_metric(m.accuracy),
            fmt_metric(m.precision),
            fmt_metric(m.recall),
            fmt_metric(m.f1),
            m.auc.map(fmt_metric).unwrap_or_default()
        ));
        rows
    }
}

pub fn evaluate_runs(
    table: &DiscreteTable,
    algorithm: Algorithm,
    n_runs: usize,
    test_fraction: f64,
    base_seed: u64,
    positive: u32,
) -> Result<Evaluation> {
    if n_runs == 0 {
        return Err(GnbError::InvalidArgument("need at least one run".into()));
    }
    let runs = (0..n_runs as u64)
        .map(|r| run_once(table, algorithm, test_fraction, base_seed + r, positive))
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<EvalReport> = runs.iter().map(|r| r.report.clone()).collect();
    Ok(Evaluation {
        schema_version: SCHEMA_VERSION,
        algorithm,
        test_fraction,
        base_seed,
        mean: MeanMetrics::of(&reports)?,
        runs,
    })
}
