//! The `gnb` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
//! Human-readable summaries go to stdout; data files are written only to the
//! `--out` directory.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classify::GnbModel;
use crate::data::{
    apply_discretization, fit_discretization, load_csv, ClassJoin, DiscreteTable, DiscretizationSpec, DEFAULT_MISSING,
    UNSEEN,
};
use crate::error::{GnbError, Result};
use crate::evaluation::{evaluate_runs, positive_code, Evaluation};
use crate::featsel::{stage1_scores, stage2_curve_learned};
use crate::learn::{learn, Algorithm};
use crate::metrics::fmt_metric;
use crate::structure::ModelStructure;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gnb", version, about = "Generalized Naive Bayes structure learning and classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit quantile discretization and write the rules and the encoded data.
    Discretize(DataArgs),
    /// Learn a structure on the whole dataset and write the fitted model.
    Train(TrainArgs),
    /// Repeated seeded train/test evaluation of one or more algorithms.
    Evaluate(EvaluateArgs),
    /// Metrics of every structure prefix, averaged over runs.
    Curves(CurvesArgs),
    /// Classify the rows of a CSV file with a saved model.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the class column.
    #[arg(long = "class-col")]
    pub class_col: String,
    /// Cell values marking a missing entry (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_MISSING.map(String::from))]
    pub missing: Vec<String>,
    /// Relabel class values before training, e.g. "1,2,3,4=1".
    #[arg(long = "join-classes")]
    pub join_classes: Option<String>,
    /// Output directory for data files.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    /// Class label treated as positive for precision, recall, F1 and AUC
    /// (default: the second class label in order of appearance).
    #[arg(long)]
    pub positive: Option<String>,
    #[arg(long = "test-frac", default_value_t = 0.15)]
    pub test_frac: f64,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    /// Seed of the first run; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "gnb-o", value_parser = parse_algorithm)]
    pub algo: Algorithm,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Algorithms to compare (comma separated); all four by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm,
          default_values_t = Algorithm::ALL)]
    pub algo: Vec<Algorithm>,
}

#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[arg(long, default_value = "gnb-o", value_parser = parse_algorithm)]
    pub algo: Algorithm,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// CSV whose header names every attribute the model uses.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: GnbError| e.to_string())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = write!(stdout, "{text}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &GnbError) -> i32 {
    match e {
        GnbError::InvalidArgument(_) => EXIT_USAGE,
        GnbError::Io { .. }
        | GnbError::Csv(_)
        | GnbError::Json(_)
        | GnbError::ClassColumnNotFound(_)
        | GnbError::NoRows
        | GnbError::Schema(_)
        | GnbError::TooFewVariables { .. }
        | GnbError::UnknownColumn(_)
        | GnbError::EmptyInput
        | GnbError::SingleClass => EXIT_DATA,
        _ => EXIT_INTERNAL,
    }
}

/// Runs one command, returning the text meant for stdout.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Discretize(a) => cmd_discretize(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Predict(a) => cmd_predict(a),
    }
}

fn check_split(s: &SplitArgs) -> Result<()> {
    if !(s.test_frac > 0.0 && s.test_frac < 1.0) {
        return Err(GnbError::InvalidArgument(format!(
            "--test-frac must lie in (0, 1), got {}",
            s.test_frac
        )));
    }
    if s.runs == 0 {
        return Err(GnbError::InvalidArgument("--runs must be at least 1".into()));
    }
    Ok(())
}

struct Loaded {
    table: DiscreteTable,
    spec: DiscretizationSpec,
    dropped_rows: usize,
}

fn load(a: &DataArgs) -> Result<Loaded> {
    let join = a
        .join_classes
        .as_deref()
        .map(ClassJoin::parse)
        .transpose()
        .map_err(|e| GnbError::InvalidArgument(format!("--join-classes: {e}")))?;
    let mut raw = load_csv(&a.data, &a.class_col, &a.missing)?;
    if let Some(j) = &join {
        raw.join_classes(j);
    }
    let spec = fit_discretization(&raw);
    let table = apply_discretization(&raw, &spec, &a.class_col)?;
    Ok(Loaded {
        table,
        spec,
        dropped_rows: raw.dropped_rows,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| GnbError::io(dir, e))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    create_dir(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| GnbError::io(&path, e))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn dataset_line(out: &mut String, a: &DataArgs, l: &Loaded) {
    let t = &l.table;
    let _ = writeln!(
        out,
        "dataset {}: {} rows ({} dropped as incomplete), {} attributes, classes [{}]",
        a.data.display(),
        t.n_rows(),
        l.dropped_rows,
        t.attributes().len(),
        t.code_labels[t.class_column].join(", ")
    );
    if t.clamped_cells > 0 {
        let _ = writeln!(out, "warning: {} cells clamped into the fitted range", t.clamped_cells);
    }
}

fn cmd_discretize(a: &DataArgs) -> Result<String> {
    let l = load(a)?;
    let t = &l.table;
    let mut csv = t.column_names.iter().map(|n| csv_field(n)).collect::<Vec<_>>().join(",");
    csv.push('\n');
    for r in 0..t.n_rows() {
        let cells: Vec<String> = (0..t.n_columns())
            .map(|c| csv_field(&t.code_labels[c][t.column(c)[r] as usize]))
            .collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let spec_path = write_file(&a.out, "discretization.json", &to_json(&l.spec)?)?;
    let data_path = write_file(&a.out, "discretized.csv", &csv)?;

    let mut out = String::new();
    dataset_line(&mut out, a, &l);
    for (c, name) in t.column_names.iter().enumerate() {
        let _ = writeln!(out, "  {name}: {} values", t.cardinalities[c]);
    }
    let _ = writeln!(out, "wrote {}", spec_path.display());
    let _ = writeln!(out, "wrote {}", data_path.display());
    Ok(out)
}

const GNB_O_NOTE: &str = "note: gnb-o is optimal among structures that contain the most informative \
first triplet (Y, X_i1, X_i2); that triplet is forced into the result.";

fn cmd_train(a: &TrainArgs) -> Result<String> {
    let l = load(&a.data)?;
    let t = &l.table;
    let learned = learn(t, a.algo)?;
    let model = GnbModel::fit(t, &learned.structure)?.with_discretization(l.spec.clone());

    let mut out = String::new();
    dataset_line(&mut out, &a.data, &l);
    let name = |c: usize| t.column_names[c].as_str();
    let class = name(t.class_column);
    let _ = writeln!(out, "algorithm {}", a.algo);
    match &learned.structure {
        ModelStructure::Gnb(s) => {
            let _ = writeln!(out, "triplets in construction order:");
            for (k, (m, c)) in s.clusters().into_iter().enumerate() {
                let _ = writeln!(out, "  {:>3}. ({class}, {}, {})", k + 1, name(m), name(c));
            }
        }
        ModelStructure::Nb(s) => {
            let _ = writeln!(out, "pairs:");
            for (k, &x) in s.attributes.iter().enumerate() {
                let _ = writeln!(out, "  {:>3}. ({class}, {})", k + 1, name(x));
            }
        }
    }
    let _ = writeln!(out, "total weight: {:.6} bits", learned.weight);
    if a.algo == Algorithm::GnbO {
        let _ = writeln!(out, "{GNB_O_NOTE}");
    }

    let model_path = write_file(&a.data.out, "model.json", &to_json(&model)?)?;
    let _ = writeln!(out, "wrote {}", model_path.display());
    if let Some(trace) = &learned.trace {
        let imp = stage1_scores(trace)?;
        let p = write_file(&a.data.out, "importance.csv", &imp.to_csv(&t.column_names))?;
        let _ = writeln!(out, "wrote {}", p.display());
        let p = write_file(&a.data.out, "importance.json", &to_json(&imp)?)?;
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(out)
}

const ZERO_NOTE: &str = "note: precision, recall and F1 are reported as 0 when their denominator is 0; \
AUC is left empty when a test set holds a single class.";

fn cmd_evaluate(a: &EvaluateArgs) -> Result<String> {
    check_split(&a.split)?;
    let l = load(&a.data)?;
    let t = &l.table;
    let positive = positive_code(t, a.split.positive.as_deref())?;

    let mut algos = a.algo.clone();
    algos.dedup();
    let evaluations = algos
        .iter()
        .map(|&algo| evaluate_runs(t, algo, a.split.runs, a.split.test_frac, a.split.seed, positive))
        .collect::<Result<Vec<Evaluation>>>()?;

    let mut csv = String::from(Evaluation::CSV_HEADER);
    csv.push('\n');
    for e in &evaluations {
        for row in e.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
    }

    let mut out = String::new();
    dataset_line(&mut out, &a.data, &l);
    let _ = writeln!(
        out,
        "{} runs, test fraction {}, seeds {}..={}, positive class {}",
        a.split.runs,
        a.split.test_frac,
        a.split.seed,
        a.split.seed + a.split.runs as u64 - 1,
        t.code_labels[t.class_column][positive as usize]
    );
    let _ = writeln!(out, "{:<8}{:>10}{:>11}{:>10}{:>10}{:>10}", "algo", "accuracy", "precision", "recall", "f1", "auc");
    for e in &evaluations {
        let m = &e.mean;
        let _ = writeln!(
            out,
            "{:<8}{:>10}{:>11}{:>10}{:>10}{:>10}",
            e.algorithm.name(),
            fmt_metric(m.accuracy),
            fmt_metric(m.precision),
            fmt_metric(m.recall),
            fmt_metric(m.f1),
            m.auc.map(fmt_metric).unwrap_or_else(|| "-".into())
        );
    }
    let _ = writeln!(out, "{ZERO_NOTE}");
    if algos.contains(&Algorithm::GnbO) {
        let _ = writeln!(out, "{GNB_O_NOTE}");
    }
    let p = write_file(&a.data.out, "evaluation.csv", &csv)?;
    let _ = writeln!(out, "wrote {}", p.display());
    let p = write_file(&a.data.out, "evaluation.json", &to_json(&evaluations)?)?;
    let _ = writeln!(out, "wrote {}", p.display());
    Ok(out)
}

fn cmd_curves(a: &CurvesArgs) -> Result<String> {
    check_split(&a.split)?;
    if !matches!(a.algo, Algorithm::GnbA | Algorithm::GnbO) {
        return Err(GnbError::InvalidArgument(format!(
            "curves need --algo gnb-a or gnb-o, got {}",
            a.algo
        )));
    }
    let l = load(&a.data)?;
    let t = &l.table;
    let positive = positive_code(t, a.split.positive.as_deref())?;
    let curve = stage2_curve_learned(t, a.algo, a.split.runs, a.split.test_frac, a.split.seed, positive)?;

    let mut out = String::new();
    dataset_line(&mut out, &a.data, &l);
    let _ = writeln!(out, "algorithm {}, structure relearned on each run's training rows", a.algo);
    let _ = writeln!(out, "{:>10}{:>10}{:>10}", "triplets", "accuracy", "f1");
    for r in &curve.rows {
        let _ = writeln!(
            out,
            "{:>10}{:>10}{:>10}",
            r.n_triplets,
            fmt_metric(r.mean.accuracy),
            fmt_metric(r.mean.f1)
        );
    }
    let _ = writeln!(out, "{ZERO_NOTE}");
    let stem = format!("curves_{}", a.algo);
    let p = write_file(&a.data.out, &format!("{stem}.csv"), &curve.to_csv())?;
    let _ = writeln!(out, "wrote {}", p.display());
    let p = write_file(&a.data.out, &format!("{stem}.json"), &to_json(&curve)?)?;
    let _ = writeln!(out, "wrote {}", p.display());
    Ok(out)
}

/// Encodes the rows of a headed CSV for `model`. Cells outside the fitted
/// domain, including missing markers, become unseen codes.
pub fn encode_input(model: &GnbModel, path: &Path) -> Result<Vec<Vec<u32>>> {
    let spec = model
        .discretization
        .as_ref()
        .ok_or_else(|| GnbError::Schema("model has no discretization rules".into()))?;
    let file = std::fs::File::open(path).map_err(|e| GnbError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();

    let attributes = model.structure.attributes();
    let mut sources = Vec::with_capacity(attributes.len());
    let mut problems = Vec::new();
    for &a in &attributes {
        let name = &model.column_names[a];
        let rule = spec.column(name).map(|c| &c.rule);
        match (header.iter().position(|h| h == name), rule) {
            (Some(i), Some(rule)) => sources.push((a, i, rule)),
            (None, _) => problems.push(format!("column {name}: missing from input")),
            (_, None) => problems.push(format!("column {name}: no discretization rule in model")),
        }
    }
    if !problems.is_empty() {
        return Err(GnbError::Schema(problems.join("; ")));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut row = vec![UNSEEN; model.column_names.len()];
        for &(a, i, rule) in &sources {
            row[a] = record.get(i).map_or(UNSEEN, |cell| rule.encode_text(cell).code);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_predict(a: &PredictArgs) -> Result<String> {
    let text = std::fs::read_to_string(&a.model).map_err(|e| GnbError::io(&a.model, e))?;
    let model = GnbModel::from_json(&text)?;
    let rows = encode_input(&model, &a.input)?;

    let mut csv = String::from("row,predicted");
    for l in &model.class_labels {
        csv.push_str(&format!(",{}", csv_field(&format!("p_{l}"))));
    }
    csv.push_str(",fallback\n");
    let mut n_fallback = 0;
    for (r, row) in rows.iter().enumerate() {
        let p = model.classify(row);
        n_fallback += p.used_fallback as usize;
        csv.push_str(&format!("{r},{}", csv_field(&model.class_labels[p.predicted as usize])));
        for q in &p.probabilities {
            csv.push_str(&format!(",{q}"));
        }
        csv.push_str(&format!(",{}\n", p.used_fallback));
    }
    let path = write_file(&a.out, "predictions.csv", &csv)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "classified {} rows from {} ({} used the zero-probability fallback)",
        rows.len(),
        a.input.display(),
        n_fallback
    );
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(out)
}
