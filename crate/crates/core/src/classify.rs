//! Maximum-likelihood parameterization of a learned structure and
//! classification through the junction-tree joint.
//!
//! The joint of a row and class is the product of cluster probabilities
//! divided by separator probabilities, each separator raised to the number of
//! clusters sharing it minus one. When every class gets joint 0, zero cluster
//! cells are replaced once, `P(y, a, b) := P(y, a) P(y, b) / P(y)`, with zero
//! pairs first repaired as `P(y, a) := P(y) P(a)`. If that still leaves every
//! class at 0 the class prior is returned as the posterior.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{DiscreteTable, DiscretizationSpec, UNSEEN};
use crate::empirical::{estimate, EmpiricalDist, VarSet};
use crate::error::{GnbError, Result};
use crate::structure::{validate, ModelStructure};
use crate::SCHEMA_VERSION;

/// A separator table and how many times it divides the joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorTable {
    pub table: EmpiricalDist,
    pub multiplicity: usize,
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub schema_version: u32,
    pub structure: ModelStructure,
    pub column_names: Vec<String>,
    pub class_labels: Vec<String>,
    /// `(Y, X_mother, X_child)` per triplet, or `(Y, X_i)` for Naive Bayes.
    pub cluster_tables: Vec<EmpiricalDist>,
    pub separator_tables: Vec<SeparatorTable>,
    /// `(Y, X_i)` for every attribute the structure uses.
    pub pair_tables: Vec<EmpiricalDist>,
    pub univariate_tables: Vec<EmpiricalDist>,
    pub class_prior: EmpiricalDist,
    /// Rules that turn raw cells into the codes this model was fitted on.
    pub discretization: Option<DiscretizationSpec>,
}

/// Classification result for one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    /// Indexed by class code.
    pub probabilities: Vec<f64>,
    pub predicted: u32,
    pub used_fallback: bool,
    /// Number of cells substituted, plus one when the prior had to be used.
    pub fallback_depth: usize,
}

fn var_set(vars: Vec<usize>) -> VarSet {
    VarSet::new(vars).expect("structure variables are distinct")
}

impl GnbModel {
    /// Estimates every table of `structure` from `table`.
    pub fn fit(table: &DiscreteTable, structure: &ModelStructure) -> Result<GnbModel> {
        let y = table.class_column;
        if structure.class_index() != y {
            return Err(GnbError::Schema(format!(
                "structure class column {} differs from table class column {y}",
                structure.class_index()
            )));
        }
        let (clusters, separators) = match structure {
            ModelStructure::Gnb(s) => {
                validate(s, table.n_columns()).map_err(GnbError::InvalidStructure)?;
                let clusters = s.clusters().into_iter().map(|(m, c)| vec![y, m, c]).collect::<Vec<_>>();
                let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
                for m in s.separators() {
                    *mult.entry(m).or_default() += 1;
                }
                let separators = mult.into_iter().map(|(m, k)| (vec![y, m], k)).collect::<Vec<_>>();
                (clusters, separators)
            }
            ModelStructure::Nb(s) => {
                if s.attributes.is_empty() {
                    return Err(GnbError::TooFewVariables { needed: 1, got: 0 });
                }
                if let Some(&bad) = s.attributes.iter().find(|&&a| a >= table.n_columns() || a == y) {
                    return Err(GnbError::UnknownColumn(bad));
                }
                let clusters = s.attributes.iter().map(|&a| vec![y, a]).collect::<Vec<_>>();
                let k = s.separator_multiplicity();
                let separators = if k > 0 { vec![(vec![y], k)] } else { Vec::new() };
                (clusters, separators)
            }
        };
        let attributes = structure.attributes();
        let est = |vars: Vec<usize>| estimate(table, &var_set(vars));
        Ok(GnbModel {
            schema_version: SCHEMA_VERSION,
            structure: structure.clone(),
            column_names: table.column_names.clone(),
            class_labels: table.code_labels[y].clone(),
            cluster_tables: clusters.into_iter().map(est).collect::<Result<_>>()?,
            separator_tables: separators
                .into_iter()
                .map(|(v, multiplicity)| Ok(SeparatorTable { table: est(v)?, multiplicity }))
                .collect::<Result<_>>()?,
            pair_tables: attributes.iter().map(|&a| est(vec![y, a])).collect::<Result<_>>()?,
            univariate_tables: attributes.iter().map(|&a| est(vec![a])).collect::<Result<_>>()?,
            class_prior: est(vec![y])?,
            discretization: None,
        })
    }

    pub fn with_discretization(mut self, spec: DiscretizationSpec) -> Self {
        self.discretization = Some(spec);
        self
    }

    pub fn class_index(&self) -> usize {
        self.structure.class_index()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    fn lookup(&self, dist: &EmpiricalDist, row: &[u32], y: u32) -> f64 {
        let class = self.class_index();
        let key: Vec<u32> = dist
            .vars()
            .as_slice()
            .iter()
            .map(|&v| if v == class { y } else { row.get(v).copied().unwrap_or(UNSEEN) })
            .collect();
        dist.prob(&key)
    }

    fn prior(&self, y: u32) -> f64 {
        self.class_prior.prob(&[y])
    }

    /// `P(y, x_a)`, repaired to `P(y) P(x_a)` when zero.
    fn pair_or_repair(&self, a: usize, row: &[u32], y: u32, depth: &mut usize) -> f64 {
        let pair = self
            .pair_tables
            .iter()
            .find(|t| t.vars().as_slice()[1] == a)
            .map_or(0.0, |t| self.lookup(t, row, y));
        if pair > 0.0 {
            return pair;
        }
        *depth += 1;
        let marginal = self
            .univariate_tables
            .iter()
            .find(|t| t.vars().as_slice()[0] == a)
            .map_or(0.0, |t| self.lookup(t, row, y));
        self.prior(y) * marginal
    }

    /// Approximate joint probability of `row` (indexed by column) with class
    /// `y`. Codes the model never saw make the corresponding factor 0.
    pub fn joint(&self, row: &[u32], y: u32) -> f64 {
        let mut num = 1.0;
        for c in &self.cluster_tables {
            num *= self.lookup(c, row, y);
            if num == 0.0 {
                return 0.0;
            }
        }
        let mut den = 1.0;
        for s in &self.separator_tables {
            den *= self.lookup(&s.table, row, y).powi(s.multiplicity as i32);
        }
        num / den
    }

    /// Joint with every zero cluster or separator cell substituted.
    fn substituted_joint(&self, row: &[u32], y: u32, depth: &mut usize) -> f64 {
        let py = self.prior(y);
        if py == 0.0 {
            return 0.0;
        }
        let mut num = 1.0;
        for c in &self.cluster_tables {
            let mut p = self.lookup(c, row, y);
            if p == 0.0 {
                let vars = &c.vars().as_slice()[1..];
                p = match *vars {
                    [a, b] => {
                        *depth += 1;
                        self.pair_or_repair(a, row, y, depth) * self.pair_or_repair(b, row, y, depth) / py
                    }
                    [a] => self.pair_or_repair(a, row, y, depth),
                    _ => 0.0,
                };
            }
            num *= p;
            if num == 0.0 {
                return 0.0;
            }
        }
        let mut den = 1.0;
        for s in &self.separator_tables {
            let vars = s.table.vars().as_slice();
            let p = match vars {
                [_] => py,
                [_, m] => self.pair_or_repair(*m, row, y, depth),
                _ => 0.0,
            };
            den *= p.powi(s.multiplicity as i32);
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    pub fn classify(&self, row: &[u32]) -> Posterior {
        let k = self.n_classes() as u32;
        let mut joints: Vec<f64> = (0..k).map(|y| self.joint(row, y)).collect();
        let mut depth = 0;
        if joints.iter().all(|&j| j == 0.0) {
            joints = (0..k).map(|y| self.substituted_joint(row, y, &mut depth)).collect();
        }
        let used_fallback = depth > 0 || joints.iter().all(|&j| j == 0.0);
        let total: f64 = joints.iter().sum();
        let probabilities = if total > 0.0 {
            joints.iter().map(|j| j / total).collect()
        } else {
            depth += 1;
            (0..k).map(|y| self.prior(y)).collect::<Vec<_>>()
        };
        Posterior {
            predicted: argmax(&probabilities),
            probabilities,
            used_fallback,
            fallback_depth: depth,
        }
    }

    /// Posterior probability of `positive`, the score fed to ROC AUC.
    pub fn score_class_probability(&self, row: &[u32], positive: u32) -> f64 {
        self.classify(row)
            .probabilities
            .get(positive as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// Classifies every row of `table`.
    pub fn classify_table(&self, table: &DiscreteTable) -> Vec<Posterior> {
        (0..table.n_rows()).map(|r| self.classify(&table.row(r))).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<GnbModel> {
        let model: GnbModel = serde_json::from_str(text)?;
        if model.schema_version != SCHEMA_VERSION {
            return Err(GnbError::Schema(format!(
                "model schema version {} is not supported (expected {SCHEMA_VERSION})",
                model.schema_version
            )));
        }
        Ok(model)
    }
}

/// Index of the largest value, the first one on ties.
fn argmax(values: &[f64]) -> u32 {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best as u32
}
