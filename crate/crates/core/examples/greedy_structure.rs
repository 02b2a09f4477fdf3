//! Greedy structure learning, printing how much each attached attribute adds.

mod common;

use gnb::empirical::structure_weight_nb;
use gnb::learn::learn_gnb_a;

fn main() {
    let loaded = common::load();
    let t = &loaded.table;
    let (structure, trace) = learn_gnb_a(t).unwrap();
    let first = &structure.order()[..2];
    println!(
        "first triplet: ({}, {}, {})",
        common::name(t, t.class_column),
        common::name(t, first[0]),
        common::name(t, first[1])
    );
    for step in &trace.steps[1..] {
        println!(
            "  + {:<24} mother {:<24} {:>8.4} bits  (total {:.4})",
            common::name(t, step.attribute),
            common::name(t, step.mother),
            step.increment,
            step.cumulative
        );
    }
    println!("weight {:.4} bits, naive Bayes {:.4} bits", trace.total(), structure_weight_nb(t));
}
