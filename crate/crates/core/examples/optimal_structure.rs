//! Optimal structure through a maximum arborescence of the auxiliary graph.

mod common;

use gnb::empirical::structure_weight_gnb;
use gnb::learn::{learn_gnb_a, learn_gnb_o_detailed};

fn main() {
    let loaded = common::load();
    let t = &loaded.table;
    let r = learn_gnb_o_detailed(t).unwrap();
    let (i1, i2) = r.scores.first;
    println!(
        "auxiliary graph: {} vertices, forced edges Y -> {} -> {}",
        r.scores.n_vertices(),
        common::name(t, i1),
        common::name(t, i2)
    );
    println!("arborescence weight {:.4}, structure weight {:.4} bits", r.arborescence.weight, r.weight);
    println!("construction order:");
    for &a in r.structure.order() {
        match r.structure.mother_of(a) {
            Some(m) => println!("  {:<24} <- {}", common::name(t, a), common::name(t, m)),
            None => println!("  {}", common::name(t, a)),
        }
    }
    let (greedy, _) = learn_gnb_a(t).unwrap();
    println!("greedy structure weight {:.4} bits", structure_weight_gnb(t, &greedy).unwrap());
}
