//! All four learners on the same seeded splits.

mod common;

use gnb::evaluation::{evaluate_runs, positive_code};
use gnb::metrics::fmt_metric;
use gnb::Algorithm;

fn main() {
    let loaded = common::load();
    let t = &loaded.table;
    let positive = positive_code(t, loaded.positive.as_deref()).unwrap();
    println!("{:<6} {:>9} {:>9} {:>9} {:>9} {:>9}", "algo", "accuracy", "precision", "recall", "f1", "auc");
    for algo in Algorithm::ALL {
        let e = evaluate_runs(t, algo, 5, 0.15, 0, positive).unwrap();
        let m = e.mean;
        println!(
            "{:<6} {:>9} {:>9} {:>9} {:>9} {:>9}",
            algo.name(),
            fmt_metric(m.accuracy),
            fmt_metric(m.precision),
            fmt_metric(m.recall),
            fmt_metric(m.f1),
            m.auc.map_or("n/a".into(), fmt_metric)
        );
    }
}
