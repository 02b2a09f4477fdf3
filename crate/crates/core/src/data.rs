//! CSV ingestion, quantile discretization and seeded train/test splits.
//!
//! Continuous columns with more than [`MAX_BINS`] distinct values are cut at
//! the 20/40/60/80% nearest-rank order statistics. Duplicate cut points are
//! merged, and each interval is represented by the mean of its members.
//! Intervals are half-open `[lo, hi)` except the last, which is closed at
//! the column maximum.
//!
//! Splits shuffle row indices with `ChaCha8Rng::seed_from_u64(seed)` and a
//! Fisher-Yates pass that draws `j = (next_u64() * (i + 1)) >> 64` for
//! `i = n-1 .. 1`. The first `round(n * test_fraction)` shuffled rows form the
//! test set; both sides are returned in ascending row order.

use std::collections::BTreeSet;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GnbError, Result};
use crate::SCHEMA_VERSION;

/// Maximum number of values a discretized column may take.
pub const MAX_BINS: usize = 5;

/// Cell markers treated as missing unless overridden.
pub const DEFAULT_MISSING: [&str; 3] = ["", "?", "NA"];

/// Code used for values never seen when a model was fitted. Every lookup with
/// it misses, so it behaves as a zero-probability value.
pub const UNSEEN: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum RawColumn {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match self {
            RawColumn::Numeric(v) => v.len(),
            RawColumn::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A parsed CSV with incomplete rows removed. The class column is always kept
/// as text.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub column_names: Vec<String>,
    pub columns: Vec<RawColumn>,
    pub n_rows: usize,
    pub class_column: String,
    /// Rows dropped because some cell held a missing marker.
    pub dropped_rows: usize,
}

impl RawTable {
    /// Builds a table from already-split columns, checking shape invariants.
    pub fn new(
        column_names: Vec<String>,
        columns: Vec<RawColumn>,
        class_column: &str,
    ) -> Result<Self> {
        if column_names.len() != columns.len() {
            return Err(GnbError::LengthMismatch(column_names.len(), columns.len()));
        }
        let mut seen = BTreeSet::new();
        for name in &column_names {
            if name.is_empty() || !seen.insert(name.as_str()) {
                return Err(GnbError::Schema(format!(
                    "column names must be unique and non-empty, got {name:?}"
                )));
            }
        }
        let n_rows = columns.first().map_or(0, RawColumn::len);
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(GnbError::Schema("columns have different lengths".into()));
        }
        if n_rows == 0 {
            return Err(GnbError::NoRows);
        }
        let class_idx = column_names
            .iter()
            .position(|n| n == class_column)
            .ok_or_else(|| GnbError::ClassColumnNotFound(class_column.to_string()))?;
        let mut columns = columns;
        if let RawColumn::Numeric(values) = &columns[class_idx] {
            let labels = values.iter().map(|v| format_value(*v)).collect();
            columns[class_idx] = RawColumn::Categorical(labels);
        }
        Ok(RawTable {
            column_names,
            columns,
            n_rows,
            class_column: class_column.to_string(),
            dropped_rows: 0,
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|n| n == name)
    }

    /// Relabels class values, e.g. to binarize a multi-valued class column.
    pub fn join_classes(&mut self, join: &ClassJoin) {
        let idx = self
            .column_index(&self.class_column)
            .expect("class column present by construction");
        if let RawColumn::Categorical(labels) = &mut self.columns[idx] {
            for label in labels.iter_mut() {
                if let Some(target) = join.target_of(label) {
                    *label = target.to_string();
                }
            }
        }
    }
}

/// Class relabeling rules parsed from `"1,2,3,4=1"`; several groups may be
/// separated by `;`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassJoin {
    groups: Vec<(Vec<String>, String)>,
}

impl ClassJoin {
    pub fn parse(text: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for group in text.split(';').map(str::trim).filter(|g| !g.is_empty()) {
            let (sources, target) = group.split_once('=').ok_or_else(|| {
                GnbError::InvalidArgument(format!("class join {group:?} lacks '='"))
            })?;
            let sources: Vec<String> = sources
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            let target = target.trim().to_string();
            if sources.is_empty() || target.is_empty() {
                return Err(GnbError::InvalidArgument(format!(
                    "class join {group:?} needs labels on both sides"
                )));
            }
            groups.push((sources, target));
        }
        Ok(ClassJoin { groups })
    }

    fn target_of(&self, label: &str) -> Option<&str> {
        self.groups
            .iter()
            .find(|(sources, _)| sources.iter().any(|s| labels_equal(s, label)))
            .map(|(_, t)| t.as_str())
    }
}

/// Compares class labels textually, falling back to numeric equality so that
/// `"1"` matches `"1.0"`.
pub fn labels_equal(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn format_value(v: f64) -> String {
    format!("{v}")
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a headed, comma-separated file. Rows with a missing marker in any
/// cell are dropped; a column is numeric when every remaining cell parses as a
/// finite number.
pub fn load_csv(
    path: impl AsRef<Path>,
    class_column: &str,
    missing_markers: &[String],
) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| GnbError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if !header.iter().any(|h| h == class_column) {
        return Err(GnbError::ClassColumnNotFound(class_column.to_string()));
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut dropped = 0;
    for record in reader.records() {
        let record = record?;
        let incomplete = record
            .iter()
            .any(|c| missing_markers.iter().any(|m| m == c.trim()));
        if incomplete {
            dropped += 1;
            continue;
        }
        for (col, cell) in cells.iter_mut().zip(record.iter()) {
            col.push(cell.trim().to_string());
        }
    }
    if cells.first().is_none_or(Vec::is_empty) {
        return Err(GnbError::NoRows);
    }

    let columns = cells
        .into_iter()
        .zip(&header)
        .map(|(col, name)| {
            if name != class_column {
                if let Some(values) = col.iter().map(|c| parse_number(c)).collect::<Option<Vec<_>>>() {
                    return RawColumn::Numeric(values);
                }
            }
            RawColumn::Categorical(col)
        })
        .collect();

    let mut table = RawTable::new(header, columns, class_column)?;
    table.dropped_rows = dropped;
    Ok(table)
}

/// Quantile bins for one continuous column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bins {
    /// Interior cut points, strictly increasing.
    pub boundaries: Vec<f64>,
    /// One representative per interval; `boundaries.len() + 1` entries.
    pub representatives: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl Bins {
    /// Interval index of `x` and whether it had to be clamped into range.
    pub fn interval(&self, x: f64) -> (u32, bool) {
        let code = self.boundaries.partition_point(|b| *b <= x) as u32;
        (code, x < self.min || x > self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ColumnRule {
    /// Text column; codes follow first appearance.
    Categorical { labels: Vec<String> },
    /// Numeric column with few distinct values; codes follow ascending value.
    PassThrough { values: Vec<f64> },
    Binned(Bins),
}

/// Result of encoding one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoded {
    pub code: u32,
    pub clamped: bool,
}

impl ColumnRule {
    pub fn cardinality(&self) -> usize {
        match self {
            ColumnRule::Categorical { labels } => labels.len(),
            ColumnRule::PassThrough { values } => values.len(),
            ColumnRule::Binned(bins) => bins.representatives.len(),
        }
    }

    /// Human-readable value of each code.
    pub fn code_labels(&self) -> Vec<String> {
        match self {
            ColumnRule::Categorical { labels } => labels.clone(),
            ColumnRule::PassThrough { values } => values.iter().map(|v| format_value(*v)).collect(),
            ColumnRule::Binned(bins) => bins.representatives.iter().map(|v| format_value(*v)).collect(),
        }
    }

    /// Encodes a raw text cell. Values outside the fitted domain get
    /// [`UNSEEN`], except binned numbers, which are clamped.
    pub fn encode_text(&self, cell: &str) -> Encoded {
        let cell = cell.trim();
        match self {
            ColumnRule::Categorical { labels } => Encoded {
                code: labels
                    .iter()
                    .position(|l| l == cell)
                    .or_else(|| labels.iter().position(|l| labels_equal(l, cell)))
                    .map_or(UNSEEN, |p| p as u32),
                clamped: false,
            },
            _ => match parse_number(cell) {
                Some(x) => self.encode_number(x),
                None => Encoded {
                    code: UNSEEN,
                    clamped: false,
                },
            },
        }
    }

    pub fn encode_number(&self, x: f64) -> Encoded {
        match self {
            ColumnRule::Categorical { .. } => self.encode_text(&format_value(x)),
            ColumnRule::PassThrough { values } => Encoded {
                code: values.iter().position(|v| *v == x).map_or(UNSEEN, |p| p as u32),
                clamped: false,
            },
            ColumnRule::Binned(bins) => {
                let (code, clamped) = bins.interval(x);
                Encoded { code, clamped }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    #[serde(flatten)]
    pub rule: ColumnRule,
}

/// Per-column discretization rules fitted on a [`RawTable`]. Serializes to
/// JSON so the same rules can be applied to new data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationSpec {
    pub schema_version: u32,
    pub class_column: String,
    pub columns: Vec<ColumnSpec>,
}

impl DiscretizationSpec {
    pub fn column(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }
}

/// Fits quantile bins for a single numeric column.
pub fn fit_numeric_column(values: &[f64]) -> ColumnRule {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() <= MAX_BINS {
        return ColumnRule::PassThrough { values: distinct };
    }

    let n = sorted.len();
    let min = sorted[0];
    let max = sorted[n - 1];
    let mut boundaries: Vec<f64> = Vec::with_capacity(MAX_BINS - 1);
    for j in 1..MAX_BINS {
        // 1-based nearest rank, clamped to [1, n]
        let rank = (n * j / MAX_BINS).clamp(1, n);
        let q = sorted[rank - 1];
        if q > min && boundaries.last().is_none_or(|last| q > *last) {
            boundaries.push(q);
        }
    }

    let mut sums = vec![0.0; boundaries.len() + 1];
    let mut counts = vec![0usize; boundaries.len() + 1];
    let bins = Bins {
        boundaries,
        representatives: Vec::new(),
        min,
        max,
    };
    for &x in &sorted {
        let (code, _) = bins.interval(x);
        sums[code as usize] += x;
        counts[code as usize] += 1;
    }
    let representatives = sums
        .iter()
        .zip(&counts)
        .map(|(s, c)| s / *c as f64)
        .collect();
    ColumnRule::Binned(Bins {
        representatives,
        ..bins
    })
}

/// Fits one rule per column. The class column is never binned.
pub fn fit_discretization(table: &RawTable) -> DiscretizationSpec {
    let columns = table
        .column_names
        .iter()
        .zip(&table.columns)
        .map(|(name, column)| {
            let rule = match column {
                RawColumn::Numeric(values) if *name != table.class_column => {
                    fit_numeric_column(values)
                }
                RawColumn::Numeric(values) => {
                    let labels = values.iter().map(|v| format_value(*v)).collect::<Vec<_>>();
                    ColumnRule::Categorical {
                        labels: first_appearance(&labels),
                    }
                }
                RawColumn::Categorical(labels) => ColumnRule::Categorical {
                    labels: first_appearance(labels),
                },
            };
            ColumnSpec {
                name: name.clone(),
                rule,
            }
        })
        .collect();
    DiscretizationSpec {
        schema_version: SCHEMA_VERSION,
        class_column: table.class_column.clone(),
        columns,
    }
}

fn first_appearance(labels: &[String]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    labels
        .iter()
        .filter(|l| seen.insert(l.as_str()))
        .cloned()
        .collect()
}

/// Categorical data encoded as small integer codes, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTable {
    pub column_names: Vec<String>,
    pub codes: Vec<Vec<u32>>,
    pub cardinalities: Vec<usize>,
    pub class_column: usize,
    pub code_labels: Vec<Vec<String>>,
    /// Numeric cells that fell outside the fitted range and were clamped.
    pub clamped_cells: usize,
}

impl DiscreteTable {
    /// Builds a table from codes, labelling each code by its number.
    pub fn from_codes(
        column_names: Vec<String>,
        codes: Vec<Vec<u32>>,
        cardinalities: Vec<usize>,
        class_column: usize,
    ) -> Result<Self> {
        let code_labels = cardinalities
            .iter()
            .map(|&c| (0..c).map(|v| v.to_string()).collect())
            .collect();
        let table = DiscreteTable {
            column_names,
            codes,
            cardinalities,
            class_column,
            code_labels,
            clamped_cells: 0,
        };
        table.check()?;
        Ok(table)
    }

    /// Row-major convenience constructor, mostly for tests and examples.
    /// Cardinalities are taken as `max code + 1` per column.
    pub fn from_rows(column_names: Vec<String>, rows: &[Vec<u32>], class_column: usize) -> Result<Self> {
        let n_cols = column_names.len();
        let mut codes = vec![Vec::with_capacity(rows.len()); n_cols];
        for row in rows {
            if row.len() != n_cols {
                return Err(GnbError::LengthMismatch(row.len(), n_cols));
            }
            for (col, &v) in codes.iter_mut().zip(row) {
                col.push(v);
            }
        }
        let cardinalities = codes
            .iter()
            .map(|c| c.iter().max().map_or(1, |m| *m as usize + 1))
            .collect();
        Self::from_codes(column_names, codes, cardinalities, class_column)
    }

    fn check(&self) -> Result<()> {
        let n_cols = self.column_names.len();
        if self.codes.len() != n_cols || self.cardinalities.len() != n_cols {
            return Err(GnbError::Schema("column count mismatch".into()));
        }
        if self.class_column >= n_cols {
            return Err(GnbError::UnknownColumn(self.class_column));
        }
        let n = self.n_rows();
        for (i, col) in self.codes.iter().enumerate() {
            if col.len() != n {
                return Err(GnbError::Schema("columns have different lengths".into()));
            }
            if let Some(bad) = col.iter().find(|&&c| c as usize >= self.cardinalities[i]) {
                return Err(GnbError::Schema(format!(
                    "code {bad} out of range in column {}",
                    self.column_names[i]
                )));
            }
        }
        if self.cardinalities[self.class_column] < 2 {
            return Err(GnbError::Schema("class column needs at least 2 values".into()));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.codes.first().map_or(0, Vec::len)
    }

    pub fn n_columns(&self) -> usize {
        self.codes.len()
    }

    pub fn column(&self, idx: usize) -> &[u32] {
        &self.codes[idx]
    }

    pub fn class_codes(&self) -> &[u32] {
        &self.codes[self.class_column]
    }

    pub fn n_classes(&self) -> usize {
        self.cardinalities[self.class_column]
    }

    /// Attribute column indices, ascending, excluding the class column.
    pub fn attributes(&self) -> Vec<usize> {
        (0..self.n_columns()).filter(|&c| c != self.class_column).collect()
    }

    pub fn row(&self, r: usize) -> Vec<u32> {
        self.codes.iter().map(|c| c[r]).collect()
    }

    /// Code of a class label, comparing numerically where possible.
    pub fn class_code(&self, label: &str) -> Option<u32> {
        let labels = &self.code_labels[self.class_column];
        labels
            .iter()
            .position(|l| l == label)
            .or_else(|| labels.iter().position(|l| labels_equal(l, label)))
            .map(|p| p as u32)
    }

    /// Subset of rows, keeping the full code domain of every column.
    pub fn select_rows(&self, rows: &[usize]) -> DiscreteTable {
        DiscreteTable {
            codes: self
                .codes
                .iter()
                .map(|col| rows.iter().map(|&r| col[r]).collect())
                .collect(),
            clamped_cells: 0,
            ..self.clone()
        }
    }

    /// Copy with one column's codes replaced.
    pub fn with_column(&self, idx: usize, codes: Vec<u32>) -> Result<DiscreteTable> {
        let mut out = self.clone();
        out.codes[idx] = codes;
        out.check()?;
        Ok(out)
    }
}

/// Encodes `table` with the rules in `spec`. Columns are matched by name.
pub fn apply_discretization(
    table: &RawTable,
    spec: &DiscretizationSpec,
    class_column: &str,
) -> Result<DiscreteTable> {
    let class_idx = table
        .column_index(class_column)
        .ok_or_else(|| GnbError::ClassColumnNotFound(class_column.to_string()))?;
    let mut codes = Vec::with_capacity(table.columns.len());
    let mut cardinalities = Vec::with_capacity(table.columns.len());
    let mut code_labels = Vec::with_capacity(table.columns.len());
    let mut clamped_cells = 0;

    for (name, column) in table.column_names.iter().zip(&table.columns) {
        let col_spec = spec
            .column(name)
            .ok_or_else(|| GnbError::Schema(format!("no discretization rule for column {name}")))?;
        let rule = &col_spec.rule;
        let encoded: Vec<Encoded> = match (column, rule) {
            (RawColumn::Numeric(values), ColumnRule::PassThrough { .. } | ColumnRule::Binned(_)) => {
                values.iter().map(|&x| rule.encode_number(x)).collect()
            }
            (RawColumn::Categorical(labels), ColumnRule::Categorical { .. }) => {
                labels.iter().map(|l| rule.encode_text(l)).collect()
            }
            _ => {
                return Err(GnbError::Schema(format!(
                    "column {name} does not match the kind of its fitted rule"
                )))
            }
        };
        if encoded.iter().any(|e| e.code == UNSEEN) {
            return Err(GnbError::Schema(format!(
                "column {name} holds a value outside the fitted domain"
            )));
        }
        clamped_cells += encoded.iter().filter(|e| e.clamped).count();
        codes.push(encoded.iter().map(|e| e.code).collect());
        cardinalities.push(rule.cardinality());
        code_labels.push(rule.code_labels());
    }

    let table = DiscreteTable {
        column_names: table.column_names.clone(),
        codes,
        cardinalities,
        class_column: class_idx,
        code_labels,
        clamped_cells,
    };
    table.check()?;
    Ok(table)
}

/// Seeded permutation of `0..n`; see the module docs for the exact recipe.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = ((rng.next_u64() as u128 * (i as u128 + 1)) >> 64) as usize;
        idx.swap(i, j);
    }
    idx
}

/// Row indices of the (train, test) sides of a split, each ascending.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(GnbError::InvalidArgument(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    if n < 2 {
        return Err(GnbError::InvalidArgument("need at least 2 rows to split".into()));
    }
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(GnbError::InvalidArgument(format!(
            "fraction {test_fraction} of {n} rows leaves an empty side"
        )));
    }
    let perm = shuffled_indices(n, seed);
    let mut test = perm[..n_test].to_vec();
    let mut train = perm[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Splits into (train, test) tables.
pub fn split(
    table: &DiscreteTable,
    test_fraction: f64,
    seed: u64,
) -> Result<(DiscreteTable, DiscreteTable)> {
    let (train, test) = split_indices(table.n_rows(), test_fraction, seed)?;
    Ok((table.select_rows(&train), table.select_rows(&test)))
}

/// Loads, relabels and discretizes a dataset in one go.
pub fn prepare(
    path: impl AsRef<Path>,
    class_column: &str,
    missing_markers: &[String],
    join: Option<&ClassJoin>,
) -> Result<(DiscreteTable, DiscretizationSpec)> {
    let mut raw = load_csv(path, class_column, missing_markers)?;
    if let Some(join) = join {
        raw.join_classes(join);
    }
    let spec = fit_discretization(&raw);
    let table = apply_discretization(&raw, &spec, class_column)?;
    Ok((table, spec))
}

pub fn default_missing() -> Vec<String> {
    DEFAULT_MISSING.iter().map(|s| s.to_string()).collect()
}
