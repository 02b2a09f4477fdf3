//! KL divergence of the naive Bayes and generalized approximations, computed
//! directly and through the structure weights.

mod common;

use std::collections::BTreeMap;

use gnb::empirical::{estimate, kl_divergence, structure_weight_gnb, structure_weight_nb, EntropyCache};
use gnb::learn::learn_gnb_o;
use gnb::{DiscreteTable, VarSet};

fn main() {
    let loaded = common::load();
    // a handful of columns keeps the full joint small
    let keep: Vec<usize> = std::iter::once(loaded.table.class_column).chain(loaded.table.attributes().into_iter().take(5)).collect();
    let rows: Vec<Vec<u32>> = (0..loaded.table.n_rows())
        .map(|r| keep.iter().map(|&c| loaded.table.column(c)[r]).collect())
        .collect();
    let names = keep.iter().map(|&c| loaded.table.column_names[c].clone()).collect();
    let t = DiscreteTable::from_rows(names, &rows, 0).unwrap();

    let all: Vec<usize> = (0..t.n_columns()).collect();
    let mut cache = EntropyCache::new(&t);
    let base: f64 = all.iter().map(|&v| cache.entropy(&[v])).sum::<f64>() - cache.entropy(&all);
    let joint = estimate(&t, &VarSet::new(all.clone()).unwrap()).unwrap();

    let marg = |vars: &[usize]| -> BTreeMap<Vec<u32>, f64> {
        estimate(&t, &VarSet::new(vars.to_vec()).unwrap()).unwrap().iter().map(|(k, p)| (k.to_vec(), p)).collect()
    };
    let py = marg(&[0]);
    let pairs: Vec<_> = (1..t.n_columns()).map(|a| marg(&[0, a])).collect();
    let d = pairs.len() as i32;
    let nb = |x: &[u32]| pairs.iter().enumerate().map(|(a, m)| m[&vec![x[0], x[a + 1]]]).product::<f64>() / py[&vec![x[0]]].powi(d - 1);
    println!("naive Bayes: direct KL {:.9}, via weight {:.9}", kl_divergence(&joint, nb).unwrap(), base - structure_weight_nb(&t));

    let (s, _, w) = learn_gnb_o(&t).unwrap();
    let first = s.order()[..2].to_vec();
    let m_first = marg(&[0, first[0], first[1]]);
    let rest: Vec<_> = s.order()[2..]
        .iter()
        .map(|&k| {
            let m = s.mother_of(k).unwrap();
            ((m, k), marg(&[0, m, k]), marg(&[0, m]))
        })
        .collect();
    let gnb_q = |x: &[u32]| {
        rest.iter().fold(m_first[&vec![x[0], x[first[0]], x[first[1]]]], |acc, ((m, k), tri, sep)| {
            acc * tri[&vec![x[0], x[*m], x[*k]]] / sep[&vec![x[0], x[*m]]]
        })
    };
    println!("optimal GNB: direct KL {:.9}, via weight {:.9}", kl_divergence(&joint, gnb_q).unwrap(), base - w);
    assert!((w - structure_weight_gnb(&t, &s).unwrap()).abs() < 1e-9);
}
