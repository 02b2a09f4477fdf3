//! Structure learners: greedy GNB (GNB-A), optimal GNB via a maximum-weight
//! arborescence (GNB-O), and the Naive Bayes and TAN baselines.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arborescence::maximum_arborescence;
use crate::data::DiscreteTable;
use crate::empirical::{structure_weight_gnb_cached, EntropyCache};
use crate::error::{GnbError, Result};
use crate::structure::{chain_ordering, Arborescence, GnbStructure, ModelStructure, NbStructure};

/// Score differences below this are treated as ties.
const TIE_EPS: f64 = 1e-12;

/// Which structure learner to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    GnbA,
    GnbO,
    Nb,
    Tan,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::GnbA, Algorithm::GnbO, Algorithm::Nb, Algorithm::Tan];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GnbA => "gnb-a",
            Algorithm::GnbO => "gnb-o",
            Algorithm::Nb => "nb",
            Algorithm::Tan => "tan",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = GnbError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| GnbError::InvalidArgument(format!("unknown algorithm {s:?} (gnb-a, gnb-o, nb, tan)")))
    }
}

/// One step of structure growth: `attribute` joined the triplet
/// `(Y, mother, attribute)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub attribute: usize,
    pub mother: usize,
    pub increment: f64,
    pub cumulative: f64,
}

/// Weight increments in construction order. The first step is the first
/// triplet, its increment being that triplet's information content.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LearnTrace {
    pub steps: Vec<TraceStep>,
}

impl LearnTrace {
    /// Increments of an existing structure, in its construction order.
    pub fn from_structure(table: &DiscreteTable, structure: &GnbStructure) -> Result<Self> {
        let mut cache = EntropyCache::new(table);
        trace_of(&mut cache, structure)
    }

    pub fn total(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cumulative)
    }

    fn push(&mut self, mother: usize, attribute: usize, increment: f64) {
        let cumulative = self.total() + increment;
        self.steps.push(TraceStep {
            attribute,
            mother,
            increment,
            cumulative,
        });
    }
}

fn trace_of(cache: &mut EntropyCache<'_>, structure: &GnbStructure) -> Result<LearnTrace> {
    structure_weight_gnb_cached(cache, structure)?;
    let mut trace = LearnTrace::default();
    for (k, (mother, child)) in structure.clusters().into_iter().enumerate() {
        let inc = if k == 0 {
            cache.info_triplet(mother, child)
        } else {
            cache.attach_gain(mother, child)
        };
        trace.push(mother, child, inc);
    }
    Ok(trace)
}

fn require_attributes(table: &DiscreteTable, needed: usize) -> Result<Vec<usize>> {
    let attrs = table.attributes();
    if attrs.len() < needed {
        return Err(GnbError::TooFewVariables {
            needed,
            got: attrs.len(),
        });
    }
    if table.n_rows() == 0 {
        return Err(GnbError::EmptyInput);
    }
    Ok(attrs)
}

/// Pair `(i, j)`, `i < j`, maximizing `I(Y, X_i, X_j)`.
fn best_first_pair(cache: &mut EntropyCache<'_>, attrs: &[usize]) -> (usize, usize) {
    let mut best: Option<(f64, usize, usize)> = None;
    for (p, &i) in attrs.iter().enumerate() {
        for &j in &attrs[p + 1..] {
            let s = cache.info_triplet(i, j);
            if best.is_none_or(|(b, _, _)| s > b + TIE_EPS) {
                best = Some((s, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("at least two attributes");
    (i, j)
}

/// Greedy GNB learner.
///
/// Starts from the most informative triplet `(Y, X_i, X_j)` and repeatedly
/// attaches the unconnected attribute whose triplet with some connected
/// mother adds the most information, `I(Y, X_mother, X_new) - I(Y, X_mother)`.
pub fn learn_gnb_a(table: &DiscreteTable) -> Result<(GnbStructure, LearnTrace)> {
    let attrs = require_attributes(table, 2)?;
    let mut cache = EntropyCache::new(table);
    let (i1, i2) = best_first_pair(&mut cache, &attrs);

    let mut order = vec![i1, i2];
    let mut mother = BTreeMap::from([(i2, i1)]);
    let mut trace = LearnTrace::default();
    let first = cache.info_triplet(i1, i2);
    trace.push(i1, i2, first);

    let mut connected = vec![i1, i2];
    let mut open: Vec<usize> = attrs.iter().copied().filter(|a| *a != i1 && *a != i2).collect();
    while !open.is_empty() {
        connected.sort_unstable();
        let mut best: Option<(f64, usize, usize)> = None;
        for &m in &connected {
            for &x in &open {
                let g = cache.attach_gain(m, x);
                if best.is_none_or(|(b, _, _)| g > b + TIE_EPS) {
                    best = Some((g, m, x));
                }
            }
        }
        let (g, m, x) = best.expect("non-empty candidate set");
        order.push(x);
        mother.insert(x, m);
        trace.push(m, x, g);
        connected.push(x);
        open.retain(|&a| a != x);
    }
    Ok((GnbStructure::from_parts(table.class_column, order, mother), trace))
}

/// Edge scores of the auxiliary graph over `{Y} ∪ attributes`.
///
/// Vertex 0 is the class and vertex `v >= 1` is column `attributes[v - 1]`.
/// `scores[i][j]` is the weight of the edge `j -> i`, `None` for no edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub class_index: usize,
    pub attributes: Vec<usize>,
    /// Columns of the most informative triplet, forced as `0 -> i1 -> i2`.
    pub first: (usize, usize),
    pub scores: Vec<Vec<Option<f64>>>,
}

impl ScoreMatrix {
    pub fn n_vertices(&self) -> usize {
        self.scores.len()
    }

    pub fn vertex_of(&self, column: usize) -> Option<usize> {
        self.attributes.iter().position(|&a| a == column).map(|p| p + 1)
    }

    pub fn column_of(&self, vertex: usize) -> Option<usize> {
        vertex.checked_sub(1).and_then(|i| self.attributes.get(i).copied())
    }

    /// Weight of the edge `parent -> child`, by vertex.
    pub fn edge(&self, parent: usize, child: usize) -> Option<f64> {
        self.scores.get(child).and_then(|r| r.get(parent)).copied().flatten()
    }
}

/// Builds the auxiliary graph whose maximum arborescence is the optimal GNB.
///
/// Forced edges: `0 -> i1` weighted `I(Y, X_i1)` and `i1 -> i2` weighted
/// `I(X_i1, X_i2)`. Every other attribute `j1` may hang under any attribute
/// `j2` with weight `I(Y, X_j1, X_j2) - I(Y, X_j2)`.
pub fn build_aux_graph(table: &DiscreteTable) -> Result<ScoreMatrix> {
    let attrs = require_attributes(table, 2)?;
    let mut cache = EntropyCache::new(table);
    build_aux_graph_cached(&mut cache, &attrs)
}

fn build_aux_graph_cached(cache: &mut EntropyCache<'_>, attrs: &[usize]) -> Result<ScoreMatrix> {
    let (i1, i2) = best_first_pair(cache, attrs);
    let n = attrs.len() + 1;
    let mut scores = vec![vec![None; n]; n];
    let vertex = |c: usize| attrs.iter().position(|&a| a == c).unwrap() + 1;
    let (v1, v2) = (vertex(i1), vertex(i2));
    scores[v1][0] = Some(cache.info_pair(i1));
    scores[v2][v1] = Some(cache.info(&[i1, i2]));
    for (p1, &j1) in attrs.iter().enumerate() {
        if j1 == i1 || j1 == i2 {
            continue;
        }
        for (p2, &j2) in attrs.iter().enumerate() {
            if j2 != j1 {
                scores[p1 + 1][p2 + 1] = Some(cache.attach_gain(j2, j1));
            }
        }
    }
    Ok(ScoreMatrix {
        class_index: cache.table().class_column,
        attributes: attrs.to_vec(),
        first: (i1, i2),
        scores,
    })
}

/// Maximum-weight arborescence of the auxiliary graph, rooted at the class.
pub fn max_arborescence(s: &ScoreMatrix) -> Result<Arborescence> {
    maximum_arborescence(&s.scores)
}

/// Everything GNB-O produces besides the structure itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbOResult {
    pub structure: GnbStructure,
    pub trace: LearnTrace,
    /// GNB weight in bits, derived from the arborescence weight.
    pub weight: f64,
    pub arborescence: Arborescence,
    pub scores: ScoreMatrix,
}

/// Optimal GNB among structures containing the most informative triplet.
pub fn learn_gnb_o(table: &DiscreteTable) -> Result<(GnbStructure, LearnTrace, f64)> {
    let r = learn_gnb_o_detailed(table)?;
    Ok((r.structure, r.trace, r.weight))
}

pub fn learn_gnb_o_detailed(table: &DiscreteTable) -> Result<GnbOResult> {
    let attrs = require_attributes(table, 2)?;
    let mut cache = EntropyCache::new(table);
    let scores = build_aux_graph_cached(&mut cache, &attrs)?;
    let arb = max_arborescence(&scores)?;

    let (i1, i2) = scores.first;
    let (v1, v2) = (scores.vertex_of(i1).unwrap(), scores.vertex_of(i2).unwrap());
    if arb.parent.get(&v1) != Some(&0) || arb.parent.get(&v2) != Some(&v1) {
        return Err(GnbError::MalformedArborescence(
            "forced edges missing from the optimum".into(),
        ));
    }
    let structure = chain_ordering(
        &arb,
        |p, c| scores.edge(p, c).unwrap_or(f64::NEG_INFINITY),
        table.class_column,
        &scores.attributes,
    )?;
    let w01 = scores.edge(0, v1).unwrap();
    let w12 = scores.edge(v1, v2).unwrap();
    let weight = arb.weight - w01 - w12 + cache.info_triplet(i1, i2);
    let trace = trace_of(&mut cache, &structure)?;
    Ok(GnbOResult {
        structure,
        trace,
        weight,
        arborescence: arb,
        scores,
    })
}

/// Naive Bayes over every attribute.
pub fn learn_nb(table: &DiscreteTable) -> Result<NbStructure> {
    let attributes = table.attributes();
    if attributes.is_empty() {
        return Err(GnbError::TooFewVariables { needed: 1, got: 0 });
    }
    Ok(NbStructure {
        class_index: table.class_column,
        attributes,
    })
}

/// Tree-augmented Naive Bayes: maximum spanning tree on `I(X_i; X_j | Y)`,
/// rooted at the smallest attribute, expressed as a GNB.
pub fn learn_tan(table: &DiscreteTable) -> Result<GnbStructure> {
    let attrs = require_attributes(table, 2)?;
    let mut cache = EntropyCache::new(table);
    let mut order = vec![attrs[0]];
    let mut mother = BTreeMap::new();
    let mut open: Vec<usize> = attrs[1..].to_vec();
    // best[x] = (weight, tree vertex) of x's heaviest edge into the tree
    let mut best: BTreeMap<usize, (f64, usize)> = open
        .iter()
        .map(|&x| (x, (cache.cond_mutual_info(attrs[0], x), attrs[0])))
        .collect();
    while !open.is_empty() {
        let mut pick: Option<(f64, usize)> = None;
        for &x in &open {
            let w = best[&x].0;
            if pick.is_none_or(|(b, _)| w > b + TIE_EPS) {
                pick = Some((w, x));
            }
        }
        let (_, x) = pick.unwrap();
        let (_, m) = best.remove(&x).unwrap();
        order.push(x);
        mother.insert(x, m);
        open.retain(|&a| a != x);
        for &y in &open {
            let w = cache.cond_mutual_info(x, y);
            let cur = best[&y];
            if w > cur.0 + TIE_EPS || ((w - cur.0).abs() <= TIE_EPS && x < cur.1) {
                best.insert(y, (w, x));
            }
        }
    }
    Ok(GnbStructure::from_parts(table.class_column, order, mother))
}

/// Learned structure together with its information weight in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Learned {
    pub algorithm: Algorithm,
    pub structure: ModelStructure,
    /// Present for the tree-shaped learners.
    pub trace: Option<LearnTrace>,
    pub weight: f64,
}

/// Runs one learner on `table`.
pub fn learn(table: &DiscreteTable, algorithm: Algorithm) -> Result<Learned> {
    let (structure, trace, weight) = match algorithm {
        Algorithm::GnbA => {
            let (s, t) = learn_gnb_a(table)?;
            let w = t.total();
            (ModelStructure::Gnb(s), Some(t), w)
        }
        Algorithm::GnbO => {
            let (s, t, w) = learn_gnb_o(table)?;
            (ModelStructure::Gnb(s), Some(t), w)
        }
        Algorithm::Tan => {
            let s = learn_tan(table)?;
            let t = LearnTrace::from_structure(table, &s)?;
            let w = t.total();
            (ModelStructure::Gnb(s), Some(t), w)
        }
        Algorithm::Nb => {
            let s = learn_nb(table)?;
            (ModelStructure::Nb(s), None, crate::empirical::structure_weight_nb(table))
        }
    };
    Ok(Learned {
        algorithm,
        structure,
        trace,
        weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::{structure_weight_gnb, structure_weight_nb};
    use crate::structure::validate;
    use rand::{Rng, SeedableRng};

    fn random_table(seed: u64, n: usize, cards: &[u32]) -> DiscreteTable {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| cards.iter().map(|&c| rng.gen_range(0..c)).collect())
            .collect();
        let names = (0..cards.len()).map(|i| format!("c{i}")).collect();
        DiscreteTable::from_rows(names, &rows, 0).unwrap()
    }

    /// Random table whose attributes are noisy copies of the class and of
    /// each other, so that structure actually matters.
    fn correlated_table(seed: u64, n: usize, d: usize) -> DiscreteTable {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| {
                let mut row = vec![rng.gen_range(0..2u32)];
                for k in 1..=d {
                    let src = row[rng.gen_range(0..k)];
                    let v = if rng.gen_bool(0.3) { rng.gen_range(0..3) } else { src.min(2) };
                    row.push(v);
                }
                row
            })
            .collect();
        let names = (0..=d).map(|i| format!("c{i}")).collect();
        DiscreteTable::from_rows(names, &rows, 0).unwrap()
    }

    /// Brute-force information content computed from raw counts.
    fn info_oracle(t: &DiscreteTable, vars: &[usize]) -> f64 {
        let n = t.n_rows() as f64;
        let h = |vs: &[usize]| -> f64 {
            let mut c: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
            for r in 0..t.n_rows() {
                *c.entry(vs.iter().map(|&v| t.column(v)[r]).collect()).or_default() += 1.0;
            }
            -c.values().map(|&k| k / n * (k / n).log2()).sum::<f64>()
        };
        vars.iter().map(|&v| h(&[v])).sum::<f64>() - h(vars)
    }

    /// All labeled trees on `labels` via Prüfer sequences, as edge lists.
    pub(crate) fn labeled_trees(labels: &[usize]) -> Vec<Vec<(usize, usize)>> {
        let m = labels.len();
        if m == 2 {
            return vec![vec![(labels[0], labels[1])]];
        }
        let mut out = Vec::new();
        let total = m.pow(m as u32 - 2);
        for code in 0..total {
            let mut seq = Vec::with_capacity(m - 2);
            let mut c = code;
            for _ in 0..m - 2 {
                seq.push(c % m);
                c /= m;
            }
            let mut degree = vec![1usize; m];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut edges = Vec::new();
            for &s in &seq {
                let leaf = (0..m).find(|&i| degree[i] == 1).unwrap();
                edges.push((labels[leaf], labels[s]));
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let rest: Vec<usize> = (0..m).filter(|&i| degree[i] == 1).collect();
            edges.push((labels[rest[0]], labels[rest[1]]));
            out.push(edges);
        }
        out
    }

    /// Roots an undirected tree at `root`, yielding a GNB structure.
    fn rooted(class: usize, root: usize, edges: &[(usize, usize)]) -> GnbStructure {
        let mut order = vec![root];
        let mut mother = BTreeMap::new();
        let mut k = 0;
        while k < order.len() {
            let v = order[k];
            for &(a, b) in edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !order.contains(&y) {
                        order.push(y);
                        mother.insert(y, x);
                    }
                }
            }
            k += 1;
        }
        GnbStructure::from_parts(class, order, mother)
    }

    #[test]
    fn two_attributes_force_one_triplet() {
        let t = random_table(1, 60, &[2, 3, 2]);
        let (s, trace) = learn_gnb_a(&t).unwrap();
        assert_eq!(s.order(), &[1, 2]);
        assert_eq!(trace.steps.len(), 1);
        assert!((trace.total() - info_oracle(&t, &[0, 1, 2])).abs() < 1e-9);
        let (so, _, w) = learn_gnb_o(&t).unwrap();
        assert_eq!(so, s);
        assert!((w - trace.total()).abs() < 1e-9);
        let aux = build_aux_graph(&t).unwrap();
        let present: usize = aux.scores.iter().flatten().filter(|c| c.is_some()).count();
        assert_eq!(present, 2);
    }

    #[test]
    fn class_copy_enters_first_triplet() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<u32>> = (0..200)
            .map(|_| {
                let y = rng.gen_range(0..2);
                vec![y, rng.gen_range(0..2), rng.gen_range(0..2), y]
            })
            .collect();
        let t = DiscreteTable::from_rows((0..4).map(|i| format!("c{i}")).collect(), &rows, 0).unwrap();
        let (s, _) = learn_gnb_a(&t).unwrap();
        assert!(s.order()[..2].contains(&3));
    }

    #[test]
    fn greedy_step_attains_the_true_maximum() {
        for seed in 0..10 {
            let t = correlated_table(seed, 200, 5);
            let (s, trace) = learn_gnb_a(&t).unwrap();
            let attrs = t.attributes();
            let first = trace.steps[0].increment;
            let best_first = attrs
                .iter()
                .flat_map(|&i| attrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
                .map(|(i, j)| info_oracle(&t, &[0, i, j]))
                .fold(f64::MIN, f64::max);
            assert!((first - best_first).abs() < 1e-9);
            for k in 2..s.order().len() {
                let connected = &s.order()[..k];
                let best = connected
                    .iter()
                    .flat_map(|&m| {
                        attrs
                            .iter()
                            .filter(|a| !connected.contains(a))
                            .map(move |&x| (m, x))
                    })
                    .map(|(m, x)| info_oracle(&t, &[0, m, x]) - info_oracle(&t, &[0, m]))
                    .fold(f64::MIN, f64::max);
                let step = &trace.steps[k - 1];
                assert!((step.increment - best).abs() < 1e-9, "seed {seed} step {k}");
                assert!(step.increment >= -1e-9);
            }
        }
    }

    #[test]
    fn aux_graph_entries_match_recomputation() {
        let t = correlated_table(11, 150, 5);
        let s = build_aux_graph(&t).unwrap();
        let (i1, i2) = s.first;
        let (v1, v2) = (s.vertex_of(i1).unwrap(), s.vertex_of(i2).unwrap());
        for child in 0..s.n_vertices() {
            for parent in 0..s.n_vertices() {
                let got = s.edge(parent, child);
                let want = match (s.column_of(parent), s.column_of(child)) {
                    (_, None) => None,
                    (None, Some(_)) if child == v1 => Some(info_oracle(&t, &[0, i1])),
                    (None, Some(_)) => None,
                    (Some(_), Some(_)) if child == v2 => {
                        (parent == v1).then(|| info_oracle(&t, &[i1, i2]))
                    }
                    (Some(_), Some(_)) if child == v1 || parent == child => None,
                    (Some(p), Some(c)) => Some(info_oracle(&t, &[0, c, p]) - info_oracle(&t, &[0, p])),
                };
                match (got, want) {
                    (None, None) => {}
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9),
                    other => panic!("edge {parent}->{child}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn gnb_o_weight_identity_and_optimality() {
        for seed in 0..25 {
            let d = 3 + (seed as usize % 3);
            let t = correlated_table(100 + seed, 120, d);
            let r = learn_gnb_o_detailed(&t).unwrap();
            assert_eq!(validate(&r.structure, t.n_columns()), Ok(()));
            let recomputed = structure_weight_gnb(&t, &r.structure).unwrap();
            assert!((r.weight - recomputed).abs() < 1e-9, "seed {seed}");
            assert!((r.trace.total() - recomputed).abs() < 1e-9);

            let (i1, i2) = r.scores.first;
            let attrs = t.attributes();
            let best = labeled_trees(&attrs)
                .into_iter()
                .filter(|e| e.contains(&(i1, i2)) || e.contains(&(i2, i1)))
                .map(|e| structure_weight_gnb(&t, &rooted(0, i1, &e)).unwrap())
                .fold(f64::MIN, f64::max);
            assert!(r.weight >= best - 1e-9, "seed {seed}: {} < {best}", r.weight);
            assert!((r.weight - best).abs() < 1e-9);

            let (sa, _) = learn_gnb_a(&t).unwrap();
            let wa = structure_weight_gnb(&t, &sa).unwrap();
            assert!(r.weight >= wa - 1e-9);
            assert!(wa >= structure_weight_nb(&t) - 1e-9);
            for k in 2..=r.structure.order().len() {
                assert_eq!(validate(&r.structure.prefix(k).unwrap(), t.n_columns()), Ok(()));
            }
        }
    }

    #[test]
    fn tan_is_a_maximum_spanning_tree() {
        for seed in 0..10 {
            let t = correlated_table(200 + seed, 150, 5);
            let s = learn_tan(&t).unwrap();
            assert_eq!(validate(&s, t.n_columns()), Ok(()));
            assert_eq!(s.order()[0], 1);
            let mut cache = EntropyCache::new(&t);
            let tree_weight = |edges: &[(usize, usize)], c: &mut EntropyCache<'_>| -> f64 {
                edges.iter().map(|&(a, b)| c.cond_mutual_info(a, b)).sum()
            };
            let ours: Vec<(usize, usize)> = s.clusters();
            let w = tree_weight(&ours, &mut cache);
            let best = labeled_trees(&t.attributes())
                .iter()
                .map(|e| tree_weight(e, &mut cache))
                .fold(f64::MIN, f64::max);
            assert!((w - best).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn tan_on_two_attributes_and_independence() {
        let t = random_table(5, 50, &[2, 2, 2]);
        let s = learn_tan(&t).unwrap();
        assert_eq!(s.clusters(), vec![(1, 2)]);

        // product table: every (y, x1, x2, x3) cell once, so CMI is exactly 0
        let mut rows = Vec::new();
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        rows.push(vec![y, a, b, c]);
                    }
                }
            }
        }
        let t = DiscreteTable::from_rows((0..4).map(|i| format!("c{i}")).collect(), &rows, 0).unwrap();
        let s = learn_tan(&t).unwrap();
        assert_eq!(s.order(), &[1, 2, 3]);
        assert_eq!(s.clusters(), vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn nb_lists_every_attribute() {
        let t = random_table(7, 40, &[2, 2, 3, 2]);
        let nb = learn_nb(&t).unwrap();
        assert_eq!(nb.clusters(), vec![1, 2, 3]);
        assert_eq!(nb.separator_multiplicity(), 2);
        let l = learn(&t, Algorithm::Nb).unwrap();
        assert!((l.weight - structure_weight_nb(&t)).abs() < 1e-12);
    }

    #[test]
    fn learners_are_deterministic() {
        let t = correlated_table(42, 300, 6);
        for algo in Algorithm::ALL {
            let a = serde_json::to_string(&learn(&t, algo).unwrap()).unwrap();
            let b = serde_json::to_string(&learn(&t, algo).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn too_few_attributes() {
        let t = random_table(1, 10, &[2, 2]);
        assert!(learn_gnb_a(&t).is_err());
        assert!(learn_gnb_o(&t).is_err());
        assert!(learn_tan(&t).is_err());
        assert!(learn_nb(&t).is_ok());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("gnb".parse::<Algorithm>().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]
            #[test]
            fn weight_ordering(seed in any::<u64>(), d in 2usize..6, n in 20usize..120) {
                let t = correlated_table(seed, n, d);
                let (sa, ta) = learn_gnb_a(&t).unwrap();
                let (so, _, wo) = learn_gnb_o(&t).unwrap();
                let wa = structure_weight_gnb(&t, &sa).unwrap();
                prop_assert!((wa - ta.total()).abs() < 1e-9);
                prop_assert!((wo - structure_weight_gnb(&t, &so).unwrap()).abs() < 1e-9);
                prop_assert!(wo >= wa - 1e-9);
                prop_assert!(wa >= structure_weight_nb(&t) - 1e-9);
                prop_assert!(ta.steps.iter().all(|s| s.increment >= -1e-9));
            }
        }
    }
}
