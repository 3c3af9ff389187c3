//! Symmetric TSP on a complete graph: Held–Karp for the optimum, exhaustive
//! canonical-tour enumeration for the k best tours.
//!
//! Edge sets are kept as `u128` masks (at most 120 edges for 16 nodes).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::types::Decision;

pub const TSP_SOLVE_LIMIT: usize = 16;
pub const TSP_TOPK_LIMIT: usize = 10;

pub(crate) fn edge_index(nodes: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * nodes - i * (i + 1) / 2 + (j - i - 1)
}

fn mask_tie_cmp(a: u128, b: u128) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    if (a >> diff.trailing_zeros()) & 1 == 1 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn mask_to_decision(nodes: usize, mask: u128) -> Decision {
    let n = nodes * (nodes - 1) / 2;
    Decision((0..n).map(|e| (mask >> e) & 1 == 1).collect())
}

fn better(cost: f64, mask: u128, best_cost: f64, best_mask: u128) -> bool {
    match cost.partial_cmp(&best_cost) {
        Some(Ordering::Less) => true,
        Some(Ordering::Equal) => mask_tie_cmp(mask, best_mask).is_lt(),
        _ => false,
    }
}

/// Held–Karp over subsets of `{1, .., nodes-1}`, tours anchored at node 0.
pub(super) fn held_karp(nodes: usize, c: &[f64]) -> Result<Decision> {
    if nodes > TSP_SOLVE_LIMIT {
        return Err(Error::TooManyNodes {
            nodes,
            limit: TSP_SOLVE_LIMIT,
            op: "solve",
        });
    }
    let k = nodes - 1;
    let full = (1usize << k) - 1;
    let idx = |mask: usize, j: usize| mask * k + j;
    let mut cost = vec![f64::INFINITY; (full + 1) * k];
    let mut edges = vec![0u128; (full + 1) * k];
    for j in 0..k {
        let e = edge_index(nodes, 0, j + 1);
        cost[idx(1 << j, j)] = c[e];
        edges[idx(1 << j, j)] = 1u128 << e;
    }
    for mask in 1..=full {
        for j in 0..k {
            if mask & (1 << j) == 0 {
                continue;
            }
            let base = cost[idx(mask, j)];
            if base == f64::INFINITY {
                continue;
            }
            let base_edges = edges[idx(mask, j)];
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let e = edge_index(nodes, j + 1, next + 1);
                let cand = base + c[e];
                let cand_edges = base_edges | (1u128 << e);
                let slot = idx(mask | (1 << next), next);
                if better(cand, cand_edges, cost[slot], edges[slot]) {
                    cost[slot] = cand;
                    edges[slot] = cand_edges;
                }
            }
        }
    }
    let mut best = (f64::INFINITY, 0u128);
    for j in 0..k {
        let e = edge_index(nodes, j + 1, 0);
        let cand = cost[idx(full, j)] + c[e];
        let cand_edges = edges[idx(full, j)] | (1u128 << e);
        if best.1 == 0 || better(cand, cand_edges, best.0, best.1) {
            best = (cand, cand_edges);
        }
    }
    Ok(mask_to_decision(nodes, best.1))
}

/// Calls `visit` with the edge mask of every canonical tour: anchored at 0,
/// second node smaller than the last.
fn for_each_tour(nodes: usize, mut visit: impl FnMut(u128)) {
    fn rec(
        nodes: usize,
        path: &mut Vec<usize>,
        used: &mut [bool],
        mask: u128,
        visit: &mut dyn FnMut(u128),
    ) {
        let last = *path.last().expect("path starts at 0");
        if path.len() == nodes {
            if path[1] < last {
                visit(mask | (1u128 << edge_index(nodes, last, 0)));
            }
            return;
        }
        for next in 1..nodes {
            if used[next] {
                continue;
            }
            used[next] = true;
            path.push(next);
            rec(
                nodes,
                path,
                used,
                mask | (1u128 << edge_index(nodes, last, next)),
                visit,
            );
            path.pop();
            used[next] = false;
        }
    }
    let mut used = vec![false; nodes];
    used[0] = true;
    rec(nodes, &mut vec![0], &mut used, 0, &mut visit);
}

#[derive(PartialEq)]
struct Ranked(f64, u128);

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| mask_tie_cmp(self.1, other.1))
    }
}

/// k best tours by exhaustive enumeration; tour cost is summed in edge-index
/// order, matching [`crate::types::dot`].
pub(super) fn top_k(nodes: usize, c: &[f64], k: usize) -> Result<Vec<Decision>> {
    if nodes > TSP_TOPK_LIMIT {
        return Err(Error::TooManyNodes {
            nodes,
            limit: TSP_TOPK_LIMIT,
            op: "top_k",
        });
    }
    let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(k + 1);
    for_each_tour(nodes, |mask| {
        let mut cost = 0.0;
        let mut m = mask;
        while m != 0 {
            let e = m.trailing_zeros() as usize;
            cost += c[e];
            m &= m - 1;
        }
        let cand = Ranked(cost, mask);
        if heap.len() < k {
            heap.push(cand);
        } else if cand < *heap.peek().expect("k >= 1") {
            heap.pop();
            heap.push(cand);
        }
    });
    Ok(heap
        .into_sorted_vec()
        .into_iter()
        .map(|r| mask_to_decision(nodes, r.1))
        .collect())
}

fn adjacency(nodes: usize, x: &Decision) -> Option<Vec<[usize; 2]>> {
    let mut adj = vec![Vec::with_capacity(2); nodes];
    for i in 0..nodes {
        for j in i + 1..nodes {
            if x.0[edge_index(nodes, i, j)] {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj.into_iter()
        .map(|a| (a.len() == 2).then(|| [a[0], a[1]]))
        .collect()
}

pub(super) fn is_feasible(nodes: usize, x: &Decision) -> bool {
    tour_order(nodes, x).is_some()
}

/// Canonical node sequence of a tour decision: starts at 0 and walks towards
/// the smaller-indexed neighbour. `None` if `x` is not a Hamiltonian cycle.
pub fn tour_order(nodes: usize, x: &Decision) -> Option<Vec<usize>> {
    if x.len() != nodes * (nodes - 1) / 2 {
        return None;
    }
    let adj = adjacency(nodes, x)?;
    let mut order = vec![0];
    let (mut prev, mut cur) = (0, adj[0][0].min(adj[0][1]));
    while cur != 0 {
        if order.len() == nodes {
            return None;
        }
        order.push(cur);
        let next = if adj[cur][0] == prev {
            adj[cur][1]
        } else {
            adj[cur][0]
        };
        prev = cur;
        cur = next;
    }
    (order.len() == nodes).then_some(order)
}
