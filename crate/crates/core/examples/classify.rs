//! Fit a model on a train split, classify the test rows and save the model.

mod common;

use gnb::data::split;
use gnb::evaluation::{evaluate_model, positive_code};
use gnb::learn::{learn, Algorithm};
use gnb::GnbModel;

fn main() {
    let loaded = common::load();
    let (train, test) = split(&loaded.table, 0.15, 0).unwrap();
    let learned = learn(&train, Algorithm::GnbO).unwrap();
    let model = GnbModel::fit(&train, &learned.structure).unwrap().with_discretization(loaded.spec.clone());

    for (r, p) in model.classify_table(&test).iter().enumerate().take(8) {
        let probs: Vec<String> = p.probabilities.iter().map(|x| format!("{x:.3}")).collect();
        println!(
            "row {r:>3}: predicted {:<4} actual {:<4} p = [{}]{}",
            model.class_labels[p.predicted as usize],
            model.class_labels[test.class_codes()[r] as usize],
            probs.join(", "),
            if p.used_fallback { format!("  fallback depth {}", p.fallback_depth) } else { String::new() }
        );
    }
    let positive = positive_code(&loaded.table, loaded.positive.as_deref()).unwrap();
    let report = evaluate_model(&model, &test, positive, 0).unwrap();
    println!("\n{}\n{}", gnb::EvalReport::CSV_HEADER, report.csv_row());

    let json = model.to_json().unwrap();
    let back = GnbModel::from_json(&json).unwrap();
    assert_eq!(back.classify_table(&test), model.classify_table(&test));
    println!("model JSON: {} bytes, reloads to identical predictions", json.len());
}
