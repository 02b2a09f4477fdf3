//! Attribute importance from the learning trace, then accuracy as triplets
//! are added one at a time.

mod common;

use gnb::evaluation::positive_code;
use gnb::featsel::{stage1_scores, stage2_curve_learned};
use gnb::learn::learn_gnb_o;
use gnb::Algorithm;

fn main() {
    let loaded = common::load();
    let t = &loaded.table;
    let (_, trace, _) = learn_gnb_o(t).unwrap();
    let importance = stage1_scores(&trace).unwrap();
    print!("{}", importance.to_csv(&t.column_names));

    let positive = positive_code(t, loaded.positive.as_deref()).unwrap();
    let curve = stage2_curve_learned(t, Algorithm::GnbO, 5, 0.15, 0, positive).unwrap();
    println!();
    for row in &curve.rows {
        let bar = "#".repeat((row.mean.accuracy * 40.0).round() as usize);
        println!("{:>3} triplets  {:.4}  {bar}", row.n_triplets, row.mean.accuracy);
    }
}
