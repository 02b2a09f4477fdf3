//! Quantile discretization of a CSV file.
//!
//!     cargo run --example discretize -- data/heart_cleveland.csv num

mod common;

use gnb::data::ColumnRule;

fn main() {
    let loaded = common::load();
    let t = &loaded.table;
    println!("{} rows, {} columns, class `{}`", t.n_rows(), t.n_columns(), loaded.spec.class_column);
    for col in &loaded.spec.columns {
        let kind = match &col.rule {
            ColumnRule::Categorical { .. } => "categorical".to_string(),
            ColumnRule::PassThrough { .. } => "pass-through".to_string(),
            ColumnRule::Binned(b) => format!("binned at {:?}", b.boundaries),
        };
        println!("  {:<24} {} codes, {kind}", col.name, col.rule.cardinality());
    }
    println!("\nrules as JSON:\n{}", serde_json::to_string_pretty(&loaded.spec).unwrap());
}
