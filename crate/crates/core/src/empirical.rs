//! Maximum-likelihood distributions over column subsets and the information
//! quantities built from them.
//!
//! Everything is in bits. Cells with zero count are never stored, so the
//! `0 log 0 = 0` convention holds by construction.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::data::DiscreteTable;
use crate::error::{GnbError, Result};
use crate::structure::GnbStructure;

/// Ordered set of distinct column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VarSet(Vec<usize>);

impl VarSet {
    pub fn new(vars: impl Into<Vec<usize>>) -> Result<Self> {
        let vars = vars.into();
        if vars.is_empty() {
            return Err(GnbError::EmptyVarSet);
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(GnbError::InvalidArgument(format!("variable {v} repeated")));
            }
        }
        Ok(VarSet(vars))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, var: usize) -> Option<usize> {
        self.0.iter().position(|&v| v == var)
    }
}

impl TryFrom<Vec<usize>> for VarSet {
    type Error = GnbError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        VarSet::new(v)
    }
}

impl From<VarSet> for Vec<usize> {
    fn from(v: VarSet) -> Self {
        v.0
    }
}

/// Sparse joint distribution over `vars`; keys hold one code per variable, in
/// the order of `vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    vars: VarSet,
    cells: BTreeMap<Vec<u32>, f64>,
    n_source_rows: usize,
}

impl EmpiricalDist {
    /// Builds a distribution from raw cell weights, normalizing them and
    /// dropping zero cells.
    pub fn from_weights(vars: VarSet, weights: BTreeMap<Vec<u32>, f64>, n_source_rows: usize) -> Result<Self> {
        let total: f64 = weights.values().sum();
        if !(total > 0.0) {
            return Err(GnbError::EmptyInput);
        }
        let mut cells = BTreeMap::new();
        for (key, w) in weights {
            if key.len() != vars.len() {
                return Err(GnbError::LengthMismatch(key.len(), vars.len()));
            }
            if w < 0.0 {
                return Err(GnbError::InvalidArgument("negative cell weight".into()));
            }
            if w > 0.0 {
                cells.insert(key, w / total);
            }
        }
        Ok(EmpiricalDist {
            vars,
            cells,
            n_source_rows,
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn n_source_rows(&self) -> usize {
        self.n_source_rows
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Probability of an assignment; zero when the cell was never observed.
    pub fn prob(&self, key: &[u32]) -> f64 {
        self.cells.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.cells.iter().map(|(k, p)| (k.as_slice(), *p))
    }
}

#[derive(Serialize, Deserialize)]
struct DistRepr {
    vars: Vec<usize>,
    n_source_rows: usize,
    /// `[code, code, ..., probability]`
    cells: Vec<Vec<serde_json::Value>>,
}

impl Serialize for EmpiricalDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cells = self
            .cells
            .iter()
            .map(|(k, p)| {
                let mut row: Vec<serde_json::Value> = k.iter().map(|&c| c.into()).collect();
                row.push((*p).into());
                row
            })
            .collect();
        DistRepr {
            vars: self.vars.0.clone(),
            n_source_rows: self.n_source_rows,
            cells,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EmpiricalDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = DistRepr::deserialize(d)?;
        let vars = VarSet::new(repr.vars).map_err(D::Error::custom)?;
        let mut cells = BTreeMap::new();
        for row in repr.cells {
            if row.len() != vars.len() + 1 {
                return Err(D::Error::custom("cell arity does not match vars"));
            }
            let key = row[..vars.len()]
                .iter()
                .map(|v| v.as_u64().map(|c| c as u32))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| D::Error::custom("cell codes must be unsigned integers"))?;
            let p = row[vars.len()]
                .as_f64()
                .ok_or_else(|| D::Error::custom("cell probability must be a number"))?;
            cells.insert(key, p);
        }
        Ok(EmpiricalDist {
            vars,
            cells,
            n_source_rows: repr.n_source_rows,
        })
    }
}

fn check_columns(table: &DiscreteTable, vars: &[usize]) -> Result<()> {
    match vars.iter().find(|&&v| v >= table.n_columns()) {
        Some(&v) => Err(GnbError::UnknownColumn(v)),
        None => Ok(()),
    }
}

/// Relative frequencies of every observed assignment of `vars`.
pub fn estimate(table: &DiscreteTable, vars: &VarSet) -> Result<EmpiricalDist> {
    check_columns(table, vars.as_slice())?;
    let n = table.n_rows();
    if n == 0 {
        return Err(GnbError::EmptyInput);
    }
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let columns: Vec<&[u32]> = vars.as_slice().iter().map(|&v| table.column(v)).collect();
    for r in 0..n {
        let key: Vec<u32> = columns.iter().map(|c| c[r]).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    let cells = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / n as f64))
        .collect();
    Ok(EmpiricalDist {
        vars: vars.clone(),
        cells,
        n_source_rows: n,
    })
}

/// Sums out every variable not in `sub`. The result's variables follow the
/// order given in `sub`.
pub fn marginalize(dist: &EmpiricalDist, sub: &VarSet) -> Result<EmpiricalDist> {
    let positions = sub
        .as_slice()
        .iter()
        .map(|&v| dist.vars.position(v))
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| GnbError::NotSubset {
            sub: sub.0.clone(),
            vars: dist.vars.0.clone(),
        })?;
    let mut cells: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (key, p) in &dist.cells {
        let sub_key = positions.iter().map(|&i| key[i]).collect();
        *cells.entry(sub_key).or_insert(0.0) += p;
    }
    Ok(EmpiricalDist {
        vars: sub.clone(),
        cells,
        n_source_rows: dist.n_source_rows,
    })
}

/// Shannon entropy in bits.
pub fn entropy(dist: &EmpiricalDist) -> f64 {
    -dist.cells.values().map(|&p| p * p.log2()).sum::<f64>()
}

/// Multivariate information content `sum p log(p / prod p_j)` over the
/// stored cells, where `p_j` are the single-variable marginals.
pub fn info_content(dist: &EmpiricalDist) -> Result<f64> {
    let k = dist.vars.len();
    if k < 2 {
        return Err(GnbError::TooFewVariables { needed: 2, got: k });
    }
    let marginals: Vec<HashMap<u32, f64>> = (0..k)
        .map(|j| {
            let mut m = HashMap::new();
            for (key, p) in &dist.cells {
                *m.entry(key[j]).or_insert(0.0) += p;
            }
            m
        })
        .collect();
    Ok(dist
        .cells
        .iter()
        .map(|(key, &p)| {
            let indep: f64 = key.iter().zip(&marginals).map(|(c, m)| m[c]).product();
            p * (p / indep).log2()
        })
        .sum())
}

/// `sum p log(p / q)` over the support of `p`. `q` receives assignments in the
/// order of `p.vars()`.
pub fn kl_divergence<F>(p: &EmpiricalDist, q: F) -> Result<f64>
where
    F: Fn(&[u32]) -> f64,
{
    let mut kl = 0.0;
    for (key, &pk) in &p.cells {
        let qk = q(key);
        if !(qk > 0.0) {
            return Err(GnbError::AbsoluteContinuity);
        }
        kl += pk * (pk / qk).log2();
    }
    Ok(kl)
}

/// Memoized entropies of column subsets of one table.
///
/// Learners evaluate the same pair and triplet information contents many
/// times; this computes each joint entropy once, from dense counts when the
/// joint code space is small.
pub struct EntropyCache<'a> {
    table: &'a DiscreteTable,
    cache: HashMap<Vec<usize>, f64>,
}

const DENSE_LIMIT: usize = 1 << 20;

impl<'a> EntropyCache<'a> {
    pub fn new(table: &'a DiscreteTable) -> Self {
        EntropyCache {
            table,
            cache: HashMap::new(),
        }
    }

    pub fn table(&self) -> &'a DiscreteTable {
        self.table
    }

    /// Joint entropy of `vars` (order irrelevant).
    pub fn entropy(&mut self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&h) = self.cache.get(&key) {
            return h;
        }
        let h = joint_entropy(self.table, &key);
        self.cache.insert(key, h);
        h
    }

    /// `sum_j H(X_j) - H(X_1..X_k)`.
    pub fn info(&mut self, vars: &[usize]) -> f64 {
        let marginal: f64 = vars.iter().map(|&v| self.entropy(&[v])).sum();
        marginal - self.entropy(vars)
    }

    /// `I(Y, X_a)` with `Y` the class column.
    pub fn info_pair(&mut self, a: usize) -> f64 {
        let y = self.table.class_column;
        self.info(&[y, a])
    }

    /// `I(Y, X_a, X_b)`.
    pub fn info_triplet(&mut self, a: usize, b: usize) -> f64 {
        let y = self.table.class_column;
        self.info(&[y, a, b])
    }

    /// Information added by attaching `child` under `mother`:
    /// `I(Y, X_mother, X_child) - I(Y, X_mother)`.
    pub fn attach_gain(&mut self, mother: usize, child: usize) -> f64 {
        self.info_triplet(mother, child) - self.info_pair(mother)
    }

    /// Conditional mutual information `I(X_a; X_b | Y)`.
    pub fn cond_mutual_info(&mut self, a: usize, b: usize) -> f64 {
        let y = self.table.class_column;
        self.entropy(&[a, y]) + self.entropy(&[b, y]) - self.entropy(&[y]) - self.entropy(&[a, b, y])
    }
}

fn joint_entropy(table: &DiscreteTable, vars: &[usize]) -> f64 {
    let n = table.n_rows();
    if n == 0 || vars.is_empty() {
        return 0.0;
    }
    let columns: Vec<&[u32]> = vars.iter().map(|&v| table.column(v)).collect();
    let radix: Vec<usize> = vars.iter().map(|&v| table.cardinalities[v].max(1)).collect();
    let space = radix
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .filter(|&s| s <= DENSE_LIMIT);

    let key_of = |r: usize| -> usize {
        columns
            .iter()
            .zip(&radix)
            .fold(0usize, |acc, (c, &base)| acc * base + c[r] as usize)
    };
    let counts: Vec<usize> = match space {
        Some(space) => {
            let mut dense = vec![0usize; space];
            for r in 0..n {
                dense[key_of(r)] += 1;
            }
            dense.into_iter().filter(|&c| c > 0).collect()
        }
        None => {
            let mut sparse: HashMap<Vec<u32>, usize> = HashMap::new();
            for r in 0..n {
                *sparse.entry(columns.iter().map(|c| c[r]).collect()).or_insert(0) += 1;
            }
            sparse.into_values().collect()
        }
    };
    let n = n as f64;
    let sum: f64 = counts.iter().map(|&c| (c as f64) * (c as f64).log2()).sum();
    (n.log2() - sum / n).max(0.0)
}

/// Weight of the Naive Bayes approximation: `sum_i I(Y, X_i)`.
pub fn structure_weight_nb(table: &DiscreteTable) -> f64 {
    let mut cache = EntropyCache::new(table);
    table.attributes().into_iter().map(|a| cache.info_pair(a)).sum()
}

/// Weight of a GNB approximation: the first triplet's information content
/// plus, for every later attribute, the gain of attaching it to its mother.
pub fn structure_weight_gnb(table: &DiscreteTable, structure: &GnbStructure) -> Result<f64> {
    let mut cache = EntropyCache::new(table);
    structure_weight_gnb_cached(&mut cache, structure)
}

pub(crate) fn structure_weight_gnb_cached(cache: &mut EntropyCache<'_>, structure: &GnbStructure) -> Result<f64> {
    let table = cache.table();
    if structure.class_index() != table.class_column {
        return Err(GnbError::Schema("structure class differs from table class".into()));
    }
    check_columns(table, structure.order())?;
    let clusters = structure.clusters();
    let Some(&(first_mother, first_child)) = clusters.first() else {
        return Err(GnbError::TooFewVariables {
            needed: 2,
            got: structure.order().len(),
        });
    };
    let mut w = cache.info_triplet(first_mother, first_child);
    for &(mother, child) in &clusters[1..] {
        w += cache.attach_gain(mother, child);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn table(rows: &[Vec<u32>]) -> DiscreteTable {
        let names = (0..rows[0].len()).map(|i| format!("c{i}")).collect();
        DiscreteTable::from_rows(names, rows, 0).unwrap()
    }

    fn random_table(seed: u64, n: usize, cards: &[u32]) -> DiscreteTable {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| cards.iter().map(|&c| rng.gen_range(0..c)).collect())
            .collect();
        let names = (0..cards.len()).map(|i| format!("c{i}")).collect();
        let mut codes = vec![Vec::new(); cards.len()];
        for row in &rows {
            for (c, v) in codes.iter_mut().zip(row) {
                c.push(*v);
            }
        }
        DiscreteTable::from_codes(names, codes, cards.iter().map(|&c| c as usize).collect(), 0).unwrap()
    }

    fn vs(v: &[usize]) -> VarSet {
        VarSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn estimate_counts_cells() {
        let t = table(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let d = estimate(&t, &vs(&[1])).unwrap();
        assert_eq!(d.prob(&[0]), 0.5);
        assert_eq!(d.prob(&[1]), 0.5);

        let t = table(&[vec![0, 0, 0], vec![1, 1, 1]]);
        let d = estimate(&t, &vs(&[1, 2])).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.prob(&[0, 0]), 0.5);
        assert_eq!(d.prob(&[1, 1]), 0.5);
        assert_eq!(d.prob(&[0, 1]), 0.0);
    }

    #[test]
    fn estimate_matches_nested_loop_recount() {
        let t = random_table(11, 50, &[2, 3, 3]);
        let d = estimate(&t, &vs(&[0, 1, 2])).unwrap();
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..3 {
                    let mut count = 0;
                    for r in 0..50 {
                        if t.codes[0][r] == a && t.codes[1][r] == b && t.codes[2][r] == c {
                            count += 1;
                        }
                    }
                    assert_eq!(d.prob(&[a, b, c]), count as f64 / 50.0);
                }
            }
        }
    }

    #[test]
    fn estimate_rejects_bad_input() {
        let t = table(&[vec![0, 1], vec![1, 0]]);
        assert!(matches!(VarSet::new(vec![]), Err(GnbError::EmptyVarSet)));
        assert!(matches!(estimate(&t, &vs(&[5])), Err(GnbError::UnknownColumn(5))));
    }

    #[test]
    fn marginalize_sums_and_checks_subset() {
        let t = table(&[vec![0, 0], vec![1, 1]]);
        let d = estimate(&t, &vs(&[0, 1])).unwrap();
        let m = marginalize(&d, &vs(&[0])).unwrap();
        assert_eq!(m.prob(&[0]), 0.5);
        assert_eq!(m.prob(&[1]), 0.5);
        assert_eq!(marginalize(&d, &vs(&[0, 1])).unwrap(), d);
        assert!(matches!(marginalize(&d, &vs(&[2])), Err(GnbError::NotSubset { .. })));

        let t = random_table(3, 60, &[2, 3, 2]);
        let d = estimate(&t, &vs(&[0, 1, 2])).unwrap();
        let m = marginalize(&d, &vs(&[2, 0])).unwrap();
        let direct = estimate(&t, &vs(&[2, 0])).unwrap();
        for (k, p) in direct.iter() {
            assert!((m.prob(k) - p).abs() < 1e-12);
        }
        assert_eq!(m.len(), direct.len());
    }

    #[test]
    fn entropy_closed_forms() {
        let coin = estimate(&table(&[vec![0, 0], vec![1, 1]]), &vs(&[0])).unwrap();
        assert!((entropy(&coin) - 1.0).abs() < TOL);
        let point = estimate(&table(&[vec![0, 1], vec![1, 1]]), &vs(&[1])).unwrap();
        assert_eq!(entropy(&point), 0.0);
        let dyadic = estimate(
            &table(&[vec![0, 0], vec![1, 1], vec![0, 2], vec![1, 2]]),
            &vs(&[1]),
        )
        .unwrap();
        assert!((entropy(&dyadic) - 1.5).abs() < TOL);
    }

    #[test]
    fn info_content_closed_forms() {
        // product table of two fair coins
        let t = table(&[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let d = estimate(&t, &vs(&[0, 1])).unwrap();
        assert!(info_content(&d).unwrap().abs() < TOL);

        // Y = X1 = X2 uniform binary: each cell 0.5 * log2(0.5 / 0.125)
        let t = table(&[vec![0, 0, 0], vec![1, 1, 1]]);
        let d = estimate(&t, &vs(&[0, 1, 2])).unwrap();
        assert!((info_content(&d).unwrap() - 2.0).abs() < TOL);

        let single = estimate(&t, &vs(&[0])).unwrap();
        assert!(matches!(info_content(&single), Err(GnbError::TooFewVariables { .. })));
    }

    #[test]
    fn info_content_matches_entropy_identity() {
        for seed in 0..20 {
            let t = random_table(seed, 80, &[2, 3, 3]);
            let joint = estimate(&t, &vs(&[0, 1, 2])).unwrap();
            let sum_h: f64 = (0..3)
                .map(|v| entropy(&marginalize(&joint, &vs(&[v])).unwrap()))
                .sum();
            let via_cells = info_content(&joint).unwrap();
            assert!((via_cells - (sum_h - entropy(&joint))).abs() < TOL);
            let mut cache = EntropyCache::new(&t);
            assert!((cache.info(&[0, 1, 2]) - via_cells).abs() < TOL);
        }
    }

    #[test]
    fn kl_closed_forms() {
        let coin = estimate(&table(&[vec![0, 0], vec![1, 1]]), &vs(&[0])).unwrap();
        assert_eq!(kl_divergence(&coin, |k| coin.prob(k)).unwrap(), 0.0);
        let q = |k: &[u32]| if k[0] == 0 { 0.25 } else { 0.75 };
        let want = 0.5 * 2f64.log2() + 0.5 * (2.0f64 / 3.0).log2();
        assert!((kl_divergence(&coin, q).unwrap() - want).abs() < TOL);
        assert!((want - 0.2075).abs() < 1e-4);
        assert!(matches!(
            kl_divergence(&coin, |k| if k[0] == 0 { 1.0 } else { 0.0 }),
            Err(GnbError::AbsoluteContinuity)
        ));
    }

    #[test]
    fn nb_weight_cases() {
        let t = table(&[vec![0, 0], vec![1, 1], vec![0, 0], vec![1, 1]]);
        assert!((structure_weight_nb(&t) - 1.0).abs() < TOL);
        // attributes independent of Y
        let t = table(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 1], vec![1, 1, 0]]);
        assert!(structure_weight_nb(&t).abs() < TOL);
    }

    #[test]
    fn single_triplet_weight_is_its_information() {
        let t = random_table(5, 100, &[2, 3, 2]);
        let s = GnbStructure::chain(0, vec![1, 2]);
        let joint = estimate(&t, &vs(&[0, 1, 2])).unwrap();
        let w = structure_weight_gnb(&t, &s).unwrap();
        assert!((w - info_content(&joint).unwrap()).abs() < TOL);
    }

    #[test]
    fn gnb_weight_rejects_unknown_columns() {
        let t = random_table(5, 20, &[2, 2, 2]);
        let s = GnbStructure::chain(0, vec![1, 7]);
        assert!(matches!(structure_weight_gnb(&t, &s), Err(GnbError::UnknownColumn(7))));
    }

    #[test]
    fn varset_serializes_as_list() {
        let v = vs(&[3, 1]);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[3,1]");
        assert!(serde_json::from_str::<VarSet>("[1,1]").is_err());
    }

    #[test]
    fn dist_json_cells_are_code_arrays() {
        let t = table(&[vec![0, 1], vec![1, 0], vec![1, 0], vec![0, 0]]);
        let d = estimate(&t, &vs(&[0, 1])).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("[1,0,0.5]"), "{json}");
        let back: EmpiricalDist = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn quantities_are_nonnegative(seed in any::<u64>(), n in 1usize..60) {
                let t = random_table(seed, n, &[3, 2, 3]);
                let d = estimate(&t, &vs(&[0, 1, 2])).unwrap();
                let total: f64 = d.iter().map(|(_, p)| p).sum();
                prop_assert!((total - 1.0).abs() < 1e-9);
                prop_assert!(entropy(&d) >= -1e-12);
                prop_assert!(info_content(&d).unwrap() >= -1e-12);
                let uniform = |_: &[u32]| 1.0 / 18.0;
                prop_assert!(kl_divergence(&d, uniform).unwrap() >= -1e-12);
            }
        }
    }
}
