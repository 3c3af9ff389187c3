//! Pick exactly one of `n` items.

use crate::types::Decision;

fn ranked(c: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..c.len()).collect();
    // stable sort keeps smaller indices first among ties
    idx.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).expect("finite costs"));
    idx
}

pub(super) fn solve(c: &[f64]) -> Decision {
    let mut best = 0;
    for (i, &v) in c.iter().enumerate().skip(1) {
        if v < c[best] {
            best = i;
        }
    }
    Decision::from_indices(c.len(), [best])
}

pub(super) fn top_k(c: &[f64], k: usize) -> Vec<Decision> {
    ranked(c)
        .into_iter()
        .take(k)
        .map(|i| Decision::from_indices(c.len(), [i]))
        .collect()
}
