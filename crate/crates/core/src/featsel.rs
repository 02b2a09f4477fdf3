//! Attribute importance from structure growth, and accuracy curves over
//! structure prefixes.
//!
//! The first two attributes enter together through the first triplet, so the
//! importance table reports them as one joint row.

use serde::{Deserialize, Serialize};

use crate::data::{split, DiscreteTable};
use crate::error::{GnbError, Result};
use crate::evaluation::{fit_and_evaluate, MeanMetrics};
use crate::learn::{learn, Algorithm, LearnTrace};
use crate::metrics::{fmt_metric, EvalReport};
use crate::structure::{GnbStructure, ModelStructure};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub rank: usize,
    /// Two attributes for the first row, one afterwards.
    pub attributes: Vec<usize>,
    pub mother: Option<usize>,
    pub increment: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceTable {
    pub schema_version: u32,
    pub rows: Vec<ImportanceRow>,
}

impl ImportanceTable {
    pub const CSV_HEADER: &'static str = "rank,attribute,mother,increment_bits,cumulative_bits";

    /// CSV text naming attributes by `column_names`; the joint first row
    /// joins its two names with `+`.
    pub fn to_csv(&self, column_names: &[String]) -> String {
        let name = |c: usize| column_names.get(c).cloned().unwrap_or_else(|| c.to_string());
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let attrs: Vec<String> = r.attributes.iter().map(|&a| name(a)).collect();
            out.push_str(&format!(
                "{},{},{},{:.9},{:.9}\n",
                r.rank,
                attrs.join("+"),
                r.mother.map(name).unwrap_or_default(),
                r.increment,
                r.cumulative
            ));
        }
        out
    }
}

/// Tabulates a learner's trace.
pub fn stage1_scores(trace: &LearnTrace) -> Result<ImportanceTable> {
    let (first, rest) = trace.steps.split_first().ok_or(GnbError::EmptyInput)?;
    let mut rows = vec![ImportanceRow {
        rank: 1,
        attributes: vec![first.mother, first.attribute],
        mother: None,
        increment: first.increment,
        cumulative: first.cumulative,
    }];
    for (k, s) in rest.iter().enumerate() {
        rows.push(ImportanceRow {
            rank: k + 2,
            attributes: vec![s.attribute],
            mother: Some(s.mother),
            increment: s.increment,
            cumulative: s.cumulative,
        });
    }
    Ok(ImportanceTable {
        schema_version: SCHEMA_VERSION,
        rows,
    })
}

/// Metrics of the prefix with `n_triplets` triplets on one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n_triplets: usize,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n_triplets: usize,
    pub mean: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub schema_version: u32,
    pub seeds: Vec<u64>,
    pub rows: Vec<CurveRow>,
    /// Ordered by run, then by prefix length.
    pub per_run: Vec<CurvePoint>,
}

impl CurveTable {
    pub const CSV_HEADER: &'static str = "n_triplets,runs,accuracy,precision,recall,f1,auc,seeds";

    pub fn to_csv(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let seeds = seeds.join(" ");
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let m = &r.mean;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n_triplets,
                self.seeds.len(),
                fmt_metric(m.accuracy),
                fmt_metric(m.precision),
                fmt_metric(m.recall),
                fmt_metric(m.f1),
                m.auc.map(fmt_metric).unwrap_or_default(),
                seeds
            ));
        }
        out
    }

    fn from_points(seeds: Vec<u64>, per_run: Vec<CurvePoint>) -> Result<CurveTable> {
        let max_k = per_run.iter().map(|p| p.n_triplets).max().ok_or(GnbError::EmptyInput)?;
        let rows = (1..=max_k)
            .map(|k| {
                let reports: Vec<EvalReport> = per_run
                    .iter()
                    .filter(|p| p.n_triplets == k)
                    .map(|p| p.report.clone())
                    .collect();
                Ok(CurveRow {
                    n_triplets: k,
                    mean: MeanMetrics::of(&reports)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CurveTable {
            schema_version: SCHEMA_VERSION,
            seeds,
            rows,
            per_run,
        })
    }
}

fn prefix_points(
    train: &DiscreteTable,
    test: &DiscreteTable,
    structure: &GnbStructure,
    positive: u32,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    (2..=structure.order().len())
        .map(|k| {
            let prefix = ModelStructure::Gnb(structure.prefix(k)?);
            Ok(CurvePoint {
                n_triplets: k - 1,
                report: fit_and_evaluate(train, test, &prefix, positive, seed)?,
            })
        })
        .collect()
}

fn check_runs(n_runs: usize) -> Result<()> {
    if n_runs == 0 {
        return Err(GnbError::InvalidArgument("need at least one run".into()));
    }
    Ok(())
}

/// Metrics of every prefix of a fixed structure, averaged over seeded runs.
pub fn stage2_curve(
    table: &DiscreteTable,
    structure: &GnbStructure,
    n_runs: usize,
    test_fraction: f64,
    base_seed: u64,
    positive: u32,
) -> Result<CurveTable> {
    check_runs(n_runs)?;
    let seeds: Vec<u64> = (0..n_runs as u64).map(|r| base_seed + r).collect();
    let mut points = Vec::new();
    for &seed in &seeds {
        let (train, test) = split(table, test_fraction, seed)?;
        points.extend(prefix_points(&train, &test, structure, positive, seed)?);
    }
    CurveTable::from_points(seeds, points)
}

/// Like [`stage2_curve`], but the structure is relearned on each run's train
/// side, so the test rows never influence it.
pub fn stage2_curve_learned(
    table: &DiscreteTable,
    algorithm: Algorithm,
    n_runs: usize,
    test_fraction: f64,
    base_seed: u64,
    positive: u32,
) -> Result<CurveTable> {
    check_runs(n_runs)?;
    let seeds: Vec<u64> = (0..n_runs as u64).map(|r| base_seed + r).collect();
    let mut points = Vec::new();
    for &seed in &seeds {
        let (train, test) = split(table, test_fraction, seed)?;
        let structure = match learn(&train, algorithm)?.structure {
            ModelStructure::Gnb(s) => s,
            ModelStructure::Nb(_) => {
                return Err(GnbError::InvalidArgument(format!(
                    "{algorithm} does not produce a tree structure with prefixes"
                )))
            }
        };
        points.extend(prefix_points(&train, &test, &structure, positive, seed)?);
    }
    CurveTable::from_points(seeds, points)
}
