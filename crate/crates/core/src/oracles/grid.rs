//! Shortest NW→SE paths on a directed grid.
//!
//! Node `(r, c)` has id `r * cols + c`, which is a topological order, and the
//! anti-diagonal `r + c` is the path's step index: every path visits exactly
//! one node per anti-diagonal. Forcing an edge therefore reduces to pinning
//! the nodes allowed on two consecutive anti-diagonals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::types::Decision;

/// Dense bitset over edge indices used as the DP tie-break key.
#[derive(Debug, Clone, PartialEq, Eq)]
struct EdgeBits(Vec<u64>);

impl EdgeBits {
    fn new(n: usize) -> Self {
        EdgeBits(vec![0; n.div_ceil(64)])
    }

    fn with(&self, e: usize) -> Self {
        let mut b = self.clone();
        b.0[e / 64] |= 1 << (e % 64);
        b
    }

    /// `Less` when `self` holds the lowest differing edge.
    fn tie_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff.trailing_zeros();
                return if (a >> low) & 1 == 1 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

struct Layout {
    rows: usize,
    cols: usize,
    horizontal: usize,
}

impl Layout {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            horizontal: rows * (cols - 1),
        }
    }

    fn n(&self) -> usize {
        self.horizontal + self.cols * (self.rows - 1)
    }

    fn nodes(&self) -> usize {
        self.rows * self.cols
    }

    fn level(&self, node: usize) -> usize {
        node / self.cols + node % self.cols
    }

    /// `(tail, head)` of edge `e`.
    fn endpoints(&self, e: usize) -> (usize, usize) {
        if e < self.horizontal {
            let (r, c) = (e / (self.cols - 1), e % (self.cols - 1));
            let u = r * self.cols + c;
            (u, u + 1)
        } else {
            let u = e - self.horizontal;
            (u, u + self.cols)
        }
    }

    /// Incoming `(edge, tail)` pairs of `node`.
    fn incoming(&self, node: usize) -> impl Iterator<Item = (usize, usize)> {
        let (r, c) = (node / self.cols, node % self.cols);
        let left = (c > 0).then(|| (r * (self.cols - 1) + c - 1, node - 1));
        let up = (r > 0).then(|| (self.horizontal + node - self.cols, node - self.cols));
        left.into_iter().chain(up)
    }

    /// Outgoing `(edge, head)` pairs of `node`.
    fn outgoing(&self, node: usize) -> impl Iterator<Item = (usize, usize)> {
        let (r, c) = (node / self.cols, node % self.cols);
        let right = (c + 1 < self.cols).then(|| (r * (self.cols - 1) + c, node + 1));
        let down = (r + 1 < self.rows).then(|| (self.horizontal + node, node + self.cols));
        right.into_iter().chain(down)
    }
}

/// Best path under `forced` / `excluded` edge constraints, or `None` when
/// the constraints admit no path. Returns `(cost, decision)`.
pub(super) fn solve_constrained(
    rows: usize,
    cols: usize,
    c: &[f64],
    forced: &[usize],
    excluded: &[bool],
) -> Result<Option<(f64, Decision)>> {
    let g = Layout::new(rows, cols);
    let n = g.n();
    let levels = rows + cols - 1;
    let mut pinned: Vec<Option<usize>> = vec![None; levels];
    for &e in forced {
        let (u, v) = g.endpoints(e);
        for node in [u, v] {
            let lvl = g.level(node);
            match pinned[lvl] {
                Some(p) if p != node => return Ok(None),
                _ => pinned[lvl] = Some(node),
            }
        }
    }
    let allowed = |node: usize| pinned[g.level(node)].is_none_or(|p| p == node);
    let is_excluded = |e: usize| excluded.get(e).copied().unwrap_or(false);

    let mut best: Vec<Option<(f64, EdgeBits)>> = vec![None; g.nodes()];
    best[0] = Some((0.0, EdgeBits::new(n)));
    for node in 1..g.nodes() {
        if !allowed(node) {
            continue;
        }
        let mut here: Option<(f64, EdgeBits)> = None;
        for (e, tail) in g.incoming(node) {
            if is_excluded(e) {
                continue;
            }
            let Some((cost, bits)) = &best[tail] else {
                continue;
            };
            let cand_cost = cost + c[e];
            let better = match &here {
                None => true,
                Some((hc, hb)) => match cand_cost.partial_cmp(hc) {
                    Some(Ordering::Less) => true,
                    Some(Ordering::Equal) => bits.with(e).tie_cmp(hb).is_lt(),
                    _ => false,
                },
            };
            if better {
                here = Some((cand_cost, bits.with(e)));
            }
        }
        best[node] = here;
    }
    Ok(best[g.nodes() - 1].take().map(|(cost, bits)| {
        let x = Decision(
            (0..n)
                .map(|e| (bits.0[e / 64] >> (e % 64)) & 1 == 1)
                .collect(),
        );
        (cost, x)
    }))
}

/// Edges of a feasible path in source→sink order.
fn path_edges(g: &Layout, x: &Decision) -> Vec<usize> {
    let mut out = Vec::new();
    let mut node = 0;
    while node != g.nodes() - 1 {
        let Some((e, head)) = g.outgoing(node).find(|(e, _)| x.0[*e]) else {
            break;
        };
        out.push(e);
        node = head;
    }
    out
}

pub(super) fn is_feasible(rows: usize, cols: usize, x: &Decision) -> bool {
    let g = Layout::new(rows, cols);
    let mut node = 0;
    let mut steps = 0;
    while node != g.nodes() - 1 {
        let mut used = g.outgoing(node).filter(|(e, _)| x.0[*e]);
        match (used.next(), used.next()) {
            (Some((_, head)), None) => node = head,
            _ => return false,
        }
        steps += 1;
    }
    steps == x.ones().count()
}

struct Branch {
    cost: f64,
    x: Decision,
    forced: Vec<usize>,
    excluded: Vec<bool>,
}

impl PartialEq for Branch {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Branch {}

impl PartialOrd for Branch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Branch {
    // Reversed so the max-heap pops the best branch.
    fn cmp(&self, other: &Self) -> Ordering {
        crate::types::rank_cmp(other.cost, &other.x, self.cost, &self.x)
    }
}

/// Lawler partitioning over constrained solves. Returns the decisions and the
/// number of constrained solves issued.
pub(super) fn top_k(rows: usize, cols: usize, c: &[f64], k: usize) -> Result<(Vec<Decision>, u64)> {
    let g = Layout::new(rows, cols);
    let n = g.n();
    let mut solves = 1u64;
    let mut heap = BinaryHeap::new();
    if let Some((cost, x)) = solve_constrained(rows, cols, c, &[], &[])? {
        heap.push(Branch {
            cost,
            x,
            forced: Vec::new(),
            excluded: vec![false; n],
        });
    }
    let mut out = Vec::with_capacity(k);
    while let Some(branch) = heap.pop() {
        out.push(branch.x.clone());
        if out.len() == k {
            break;
        }
        let mut forced = branch.forced.clone();
        for e in path_edges(&g, &branch.x) {
            if branch.forced.contains(&e) {
                continue;
            }
            let mut excluded = branch.excluded.clone();
            excluded[e] = true;
            solves += 1;
            if let Some((cost, x)) = solve_constrained(rows, cols, c, &forced, &excluded)? {
                heap.push(Branch {
                    cost,
                    x,
                    forced: forced.clone(),
                    excluded,
                });
            }
            forced.push(e);
        }
    }
    Ok((out, solves))
}
