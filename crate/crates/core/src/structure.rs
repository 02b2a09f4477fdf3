//! GNB skeletons: a construction order of attributes plus each attribute's
//! mother. Clusters and separators are derived from that.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{GnbError, Result};

/// One reason a [`GnbStructure`] is not a valid GNB.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    TooFewAttributes(usize),
    OutOfRange(usize),
    ClassInOrder(usize),
    DuplicateAttribute(usize),
    /// The first attribute must not have a mother.
    RootHasMother(usize),
    MissingMother(usize),
    /// A mother entry for something that is not a later attribute.
    StrayMother(usize),
    MotherNotYetConnected { attribute: usize, mother: usize },
    Cycle(Vec<usize>),
}

/// Order-3 cherry junction tree in which every cluster contains the class.
///
/// `order` lists attributes (column indices) in construction order
/// `i_1, ..., i_m`; `mother` maps each `i_k` with `k >= 2` to an attribute
/// that appears earlier. Cluster `k - 1` is `(Y, X_mother(i_k), X_i_k)` and,
/// for `k >= 3`, it hangs off the rest of the tree through the separator
/// `(Y, X_mother(i_k))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnbStructure {
    class_index: usize,
    order: Vec<usize>,
    #[serde(with = "string_keys")]
    mother: BTreeMap<usize, usize>,
}

/// JSON object keys are strings; parse them back explicitly so the map also
/// round-trips inside tagged enums.
mod string_keys {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, usize>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), *v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, usize>, D::Error> {
        BTreeMap::<String, usize>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(D::Error::custom))
            .collect()
    }
}

impl GnbStructure {
    /// Unchecked constructor; see [`validate`].
    pub fn from_parts(class_index: usize, order: Vec<usize>, mother: BTreeMap<usize, usize>) -> Self {
        GnbStructure {
            class_index,
            order,
            mother,
        }
    }

    /// Constructor that rejects anything [`validate`] would flag.
    pub fn new(
        class_index: usize,
        order: Vec<usize>,
        mother: BTreeMap<usize, usize>,
        n_columns: usize,
    ) -> Result<Self> {
        let s = Self::from_parts(class_index, order, mother);
        validate(&s, n_columns).map_err(GnbError::InvalidStructure)?;
        Ok(s)
    }

    /// Chain `order[0] - order[1] - ...`, each attribute's mother being its
    /// predecessor.
    pub fn chain(class_index: usize, order: Vec<usize>) -> Self {
        let mother = order.windows(2).map(|w| (w[1], w[0])).collect();
        Self::from_parts(class_index, order, mother)
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn mother_of(&self, attribute: usize) -> Option<usize> {
        self.mother.get(&attribute).copied()
    }

    pub fn mothers(&self) -> &BTreeMap<usize, usize> {
        &self.mother
    }

    /// `(mother, child)` pairs in construction order, one per triplet
    /// `(Y, X_mother, X_child)`.
    pub fn clusters(&self) -> Vec<(usize, usize)> {
        self.order
            .iter()
            .skip(1)
            .filter_map(|&c| self.mother.get(&c).map(|&m| (m, c)))
            .collect()
    }

    /// Mother attribute of each separator `(Y, X_mother)`, one per cluster
    /// after the first.
    pub fn separators(&self) -> Vec<usize> {
        self.clusters().iter().skip(1).map(|&(m, _)| m).collect()
    }

    pub fn n_triplets(&self) -> usize {
        self.order.len().saturating_sub(1)
    }

    /// The first `k` attributes with their mothers.
    pub fn prefix(&self, k: usize) -> Result<GnbStructure> {
        if k < 2 || k > self.order.len() {
            return Err(GnbError::InvalidArgument(format!(
                "prefix length {k} outside 2..={}",
                self.order.len()
            )));
        }
        let order = self.order[..k].to_vec();
        let mother = order
            .iter()
            .filter_map(|a| self.mother.get(a).map(|m| (*a, *m)))
            .collect();
        Ok(Self::from_parts(self.class_index, order, mother))
    }
}

/// Checks every GNB invariant, returning all violations found.
pub fn validate(s: &GnbStructure, n_columns: usize) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if s.order.len() < 2 {
        out.push(Violation::TooFewAttributes(s.order.len()));
    }
    let mut position = BTreeMap::new();
    for (i, &a) in s.order.iter().enumerate() {
        if a >= n_columns {
            out.push(Violation::OutOfRange(a));
        }
        if a == s.class_index {
            out.push(Violation::ClassInOrder(a));
        }
        if position.insert(a, i).is_some() {
            out.push(Violation::DuplicateAttribute(a));
        }
    }
    if let Some(&first) = s.order.first() {
        if s.mother.contains_key(&first) {
            out.push(Violation::RootHasMother(first));
        }
    }
    for (i, &a) in s.order.iter().enumerate().skip(1) {
        match s.mother.get(&a) {
            None => out.push(Violation::MissingMother(a)),
            Some(&m) => match s.order.iter().position(|&x| x == m) {
                Some(p) if p < i => {}
                _ => out.push(Violation::MotherNotYetConnected { attribute: a, mother: m }),
            },
        }
    }
    for &child in s.mother.keys() {
        if !position.contains_key(&child) {
            out.push(Violation::StrayMother(child));
        }
    }
    // Forward references can close a loop; report it explicitly.
    let mut reported: BTreeSet<usize> = BTreeSet::new();
    for &start in s.mother.keys() {
        let mut path = vec![start];
        let mut cur = start;
        while let Some(&m) = s.mother.get(&cur) {
            if let Some(p) = path.iter().position(|&x| x == m) {
                let cycle: Vec<usize> = path[p..].to_vec();
                if cycle.iter().all(|c| reported.insert(*c)) {
                    out.push(Violation::Cycle(cycle));
                }
                break;
            }
            path.push(m);
            cur = m;
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Naive Bayes skeleton: clusters `(Y, X_i)` joined through `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NbStructure {
    pub class_index: usize,
    pub attributes: Vec<usize>,
}

impl NbStructure {
    pub fn clusters(&self) -> Vec<usize> {
        self.attributes.clone()
    }

    /// How many times the separator `Y` divides the joint.
    pub fn separator_multiplicity(&self) -> usize {
        self.attributes.len().saturating_sub(1)
    }
}

/// Any skeleton a [`crate::GnbModel`] can be fitted to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelStructure {
    Gnb(GnbStructure),
    Nb(NbStructure),
}

impl ModelStructure {
    pub fn class_index(&self) -> usize {
        match self {
            ModelStructure::Gnb(s) => s.class_index(),
            ModelStructure::Nb(s) => s.class_index,
        }
    }

    /// Attributes the model reads.
    pub fn attributes(&self) -> Vec<usize> {
        match self {
            ModelStructure::Gnb(s) => s.order().to_vec(),
            ModelStructure::Nb(s) => s.attributes.clone(),
        }
    }
}

/// Directed spanning tree rooted at vertex 0; `parent` maps every other vertex
/// to its unique parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arborescence {
    pub root: usize,
    pub parent: BTreeMap<usize, usize>,
    pub weight: f64,
}

impl Arborescence {
    pub fn children(&self, v: usize) -> Vec<usize> {
        self.parent
            .iter()
            .filter(|&(_, &p)| p == v)
            .map(|(&c, _)| c)
            .collect()
    }

    /// Checks that following parents from every vertex reaches the root.
    pub fn check(&self) -> Result<()> {
        if self.parent.contains_key(&self.root) {
            return Err(GnbError::MalformedArborescence("root has a parent".into()));
        }
        for &v in self.parent.keys() {
            let mut cur = v;
            let mut steps = 0;
            while cur != self.root {
                cur = *self.parent.get(&cur).ok_or_else(|| {
                    GnbError::MalformedArborescence(format!("vertex {cur} has no parent"))
                })?;
                steps += 1;
                if steps > self.parent.len() {
                    return Err(GnbError::MalformedArborescence(format!(
                        "vertex {v} does not reach the root"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Leaf-deletion ordering of an arborescence over the class root and
/// attribute vertices.
///
/// Repeatedly removes the leaf (a non-root vertex that is nobody's parent)
/// whose incoming edge has the smallest `score(parent, child)`, ties going to
/// the smaller column. Reversing the deletion order yields a construction
/// order in which every mother precedes its children, so each prefix is a GNB.
///
/// `columns[v - 1]` is the column index of vertex `v`; the root must have
/// exactly one child, which becomes `i_1`.
pub fn chain_ordering<F>(
    arb: &Arborescence,
    score: F,
    class_index: usize,
    columns: &[usize],
) -> Result<GnbStructure>
where
    F: Fn(usize, usize) -> f64,
{
    arb.check()?;
    let column_of = |v: usize| -> Result<usize> {
        v.checked_sub(1)
            .and_then(|i| columns.get(i).copied())
            .ok_or_else(|| GnbError::MalformedArborescence(format!("vertex {v} has no column")))
    };
    let root_children = arb.children(arb.root);
    if root_children.len() != 1 {
        return Err(GnbError::MalformedArborescence(format!(
            "root must have exactly one child, has {}",
            root_children.len()
        )));
    }

    let mut remaining: BTreeMap<usize, usize> = arb.parent.clone();
    let mut deleted = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let parents: BTreeSet<usize> = remaining.values().copied().collect();
        let mut best: Option<(f64, usize, usize)> = None;
        for (&v, &p) in &remaining {
            if parents.contains(&v) {
                continue;
            }
            let s = score(p, v);
            let col = column_of(v)?;
            let better = match best {
                None => true,
                Some((bs, bcol, _)) => s < bs || (s == bs && col < bcol),
            };
            if better {
                best = Some((s, col, v));
            }
        }
        let (_, _, leaf) = best.ok_or_else(|| GnbError::MalformedArborescence("no leaf found".into()))?;
        remaining.remove(&leaf);
        deleted.push(leaf);
    }

    let order_vertices: Vec<usize> = deleted.into_iter().rev().collect();
    let mut order = Vec::with_capacity(order_vertices.len());
    let mut mother = BTreeMap::new();
    for &v in &order_vertices {
        let col = column_of(v)?;
        order.push(col);
        let p = arb.parent[&v];
        if p != arb.root {
            mother.insert(col, column_of(p)?);
        }
    }
    Ok(GnbStructure::from_parts(class_index, order, mother))
}
