//! Exhaustive reference oracles shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;

use robust_dfl::rng::RngStream;
use robust_dfl::{CostVector, Decision, ProblemInstance};

/// Every monotone NW→SE path as an edge-incidence vector. Horizontal edge
/// `(r, c) → (r, c + 1)` has index `r (cols − 1) + c`; vertical edge
/// `(r, c) → (r + 1, c)` has index `rows (cols − 1) + r cols + c`.
pub fn grid_paths(rows: usize, cols: usize) -> Vec<Decision> {
    let horizontal = rows * (cols - 1);
    let n = horizontal + cols * (rows - 1);
    let mut out = Vec::new();
    let mut stack = vec![(0usize, 0usize, Vec::<usize>::new())];
    while let Some((r, c, edges)) = stack.pop() {
        if r == rows - 1 && c == cols - 1 {
            out.push(Decision::from_indices(n, edges));
            continue;
        }
        if c + 1 < cols {
            let mut e = edges.clone();
            e.push(r * (cols - 1) + c);
            stack.push((r, c + 1, e));
        }
        if r + 1 < rows {
            let mut e = edges;
            e.push(horizontal + r * cols + c);
            stack.push((r + 1, c, e));
        }
    }
    out
}

fn tsp_edge(n: usize, a: usize, b: usize) -> usize {
    let (i, j) = if a < b { (a, b) } else { (b, a) };
    // position of (i, j) in the row-major upper triangle
    (0..i).map(|r| n - 1 - r).sum::<usize>() + (j - i - 1)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

/// Every Hamiltonian cycle once, as an edge-incidence vector.
pub fn tsp_tours(n: usize) -> Vec<Decision> {
    let m = n * (n - 1) / 2;
    let rest: Vec<usize> = (1..n).collect();
    permutations(&rest)
        .into_iter()
        .filter(|p| p[0] < p[p.len() - 1])
        .map(|p| {
            let mut cycle = vec![0];
            cycle.extend(p);
            let edges: Vec<usize> = (0..n)
                .map(|i| tsp_edge(n, cycle[i], cycle[(i + 1) % n]))
                .collect();
            Decision::from_indices(m, edges)
        })
        .collect()
}

pub fn all_decisions(inst: &ProblemInstance) -> Vec<Decision> {
    match inst {
        ProblemInstance::Grid { rows, cols } => grid_paths(*rows, *cols),
        ProblemInstance::Tsp { nodes, .. } => tsp_tours(*nodes),
        ProblemInstance::Select { n } => (0..*n).map(|i| Decision::from_indices(*n, [i])).collect(),
    }
}

pub fn cost_of(c: &[f64], x: &Decision) -> f64 {
    x.0.iter().zip(c).filter(|(b, _)| **b).map(|(_, v)| v).sum()
}

fn indices(x: &Decision) -> Vec<usize> {
    x.0.iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(i, _)| i)
        .collect()
}

/// Ascending value, then the smaller sorted index list (all decisions of one
/// instance have the same cardinality).
pub fn reference_order(a: &(f64, Decision), b: &(f64, Decision)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap()
        .then_with(|| indices(&a.1).cmp(&indices(&b.1)))
}

pub fn ranked(inst: &ProblemInstance, c: &[f64]) -> Vec<(f64, Decision)> {
    let mut all: Vec<(f64, Decision)> = all_decisions(inst)
        .into_iter()
        .map(|x| (cost_of(c, &x), x))
        .collect();
    all.sort_by(reference_order);
    all
}

/// Worst case over the budget set by enumerating its vertices: a set `S` of
/// fully deviated coefficients with `|S| ρ ≤ Γ` plus at most one partially
/// deviated coefficient taking the remaining budget.
pub fn worst_case(c: &[f64], x: &Decision, rho: f64, gamma: f64) -> f64 {
    let support = indices(x);
    let base = cost_of(c, x);
    let s = support.len();
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << s) {
        let full = mask.count_ones() as f64;
        if full * rho > gamma {
            continue;
        }
        let dev: f64 = (0..s)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| rho * c[support[b]].abs())
            .sum();
        best = best.max(dev);
        let left = (gamma - full * rho).min(rho);
        for b in (0..s).filter(|b| mask >> b & 1 == 0) {
            best = best.max(dev + left * c[support[b]].abs());
        }
    }
    base + best
}

pub fn robust_reference(
    inst: &ProblemInstance,
    c: &[f64],
    rho: f64,
    gamma: f64,
) -> (f64, Decision) {
    let mut all: Vec<(f64, Decision)> = all_decisions(inst)
        .into_iter()
        .map(|x| (worst_case(c, &x, rho, gamma), x))
        .collect();
    all.sort_by(reference_order);
    all.swap_remove(0)
}

/// Small integers so that sums are exact and ties are frequent.
pub fn integer_costs(rng: &mut RngStream, n: usize, lo: i64, hi: i64) -> CostVector {
    let span = (hi - lo + 1) as usize;
    CostVector(
        (0..n)
            .map(|_| (lo + rng.below(span) as i64) as f64)
            .collect(),
    )
}

pub fn uniform_costs(rng: &mut RngStream, n: usize) -> CostVector {
    CostVector((0..n).map(|_| rng.uniform(0.0, 10.0)).collect())
}
