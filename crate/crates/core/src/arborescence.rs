//! Maximum-weight spanning arborescence (Chu-Liu-Edmonds).

use std::collections::{BTreeMap, VecDeque};

use crate::error::{GnbError, Result};
use crate::structure::Arborescence;

#[derive(Debug, Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    weight: f64,
}

/// Maximum-weight arborescence rooted at vertex 0.
///
/// `scores[i][j]` is the weight of the edge `j -> i`, `None` where there is
/// no edge. Among edges of equal weight into a vertex the one from the smaller
/// vertex is preferred.
pub fn maximum_arborescence(scores: &[Vec<Option<f64>>]) -> Result<Arborescence> {
    let n = scores.len();
    if n == 0 {
        return Err(GnbError::EmptyInput);
    }
    let mut edges = Vec::new();
    for (to, row) in scores.iter().enumerate() {
        if row.len() != n {
            return Err(GnbError::LengthMismatch(row.len(), n));
        }
        for (from, w) in row.iter().enumerate() {
            if let Some(w) = *w {
                if from != to && to != 0 {
                    if !w.is_finite() {
                        return Err(GnbError::InvalidArgument(format!(
                            "edge {from} -> {to} has non-finite weight"
                        )));
                    }
                    edges.push(Edge { from, to, weight: w });
                }
            }
        }
    }
    if !all_reachable(n, &edges) {
        return Err(GnbError::NoArborescence);
    }
    let chosen = solve(n, 0, &edges).ok_or(GnbError::NoArborescence)?;

    let mut parent = BTreeMap::new();
    let mut weight = 0.0;
    for &e in &chosen {
        let edge = edges[e];
        parent.insert(edge.to, edge.from);
        weight += edge.weight;
    }
    let arb = Arborescence {
        root: 0,
        parent,
        weight,
    };
    arb.check()?;
    Ok(arb)
}

fn all_reachable(n: usize, edges: &[Edge]) -> bool {
    let mut out = vec![Vec::new(); n];
    for e in edges {
        out[e.from].push(e.to);
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in &out[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Returns indices into `edges` of an optimal arborescence, one per non-root
/// vertex.
fn solve(n: usize, root: usize, edges: &[Edge]) -> Option<Vec<usize>> {
    let mut best_in: Vec<Option<usize>> = vec![None; n];
    for (i, e) in edges.iter().enumerate() {
        if e.to == root || e.from == e.to {
            continue;
        }
        let better = match best_in[e.to] {
            None => true,
            Some(b) => {
                let cur = &edges[b];
                e.weight > cur.weight || (e.weight == cur.weight && e.from < cur.from)
            }
        };
        if better {
            best_in[e.to] = Some(i);
        }
    }
    if (0..n).any(|v| v != root && best_in[v].is_none()) {
        return None;
    }

    let Some(cycle) = find_cycle(n, root, edges, &best_in) else {
        return Some((0..n).filter(|&v| v != root).map(|v| best_in[v].unwrap()).collect());
    };

    // Contract the cycle into one vertex and re-weight edges entering it.
    let mut in_cycle = vec![false; n];
    for &v in &cycle {
        in_cycle[v] = true;
    }
    let mut id = vec![0usize; n];
    let mut next = 0;
    for v in 0..n {
        if !in_cycle[v] {
            id[v] = next;
            next += 1;
        }
    }
    let contracted = next;
    for &v in &cycle {
        id[v] = contracted;
    }
    let mut new_edges = Vec::new();
    let mut origin = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        let (u, v) = (id[e.from], id[e.to]);
        if u == v {
            continue;
        }
        let weight = if in_cycle[e.to] {
            e.weight - edges[best_in[e.to].unwrap()].weight
        } else {
            e.weight
        };
        new_edges.push(Edge { from: u, to: v, weight });
        origin.push(i);
    }

    let sub = solve(contracted + 1, id[root], &new_edges)?;
    let mut chosen: Vec<usize> = sub.into_iter().map(|i| origin[i]).collect();
    let entering = chosen.iter().map(|&i| edges[i].to).find(|&v| in_cycle[v])?;
    for &v in &cycle {
        if v != entering {
            chosen.push(best_in[v].unwrap());
        }
    }
    Some(chosen)
}

fn find_cycle(n: usize, root: usize, edges: &[Edge], best_in: &[Option<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on the current walk, 2 = finished
    let mut state = vec![0u8; n];
    state[root] = 2;
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            v = edges[best_in[v].unwrap()].from;
        }
        if state[v] == 1 {
            let pos = walk.iter().position(|&w| w == v).unwrap();
            return Some(walk[pos..].to_vec());
        }
        for w in walk {
            state[w] = 2;
        }
    }
    None
}
