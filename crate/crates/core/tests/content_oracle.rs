//! Independent covering oracle for the content estimator: membership is
//! recomputed from cell geometry and the minimal per-generation cover is
//! found by exhaustive subset search whenever that is tractable.

use smallprop::geometry::{hausdorff_content, Cube, PointSet};
use smallprop::rng::SplitMix64;

/// Minimum per-generation covering total, computed independently of the
/// estimator: geometric membership, set-cover by enumeration when the
/// candidate count allows it.
fn oracle_content(set: &PointSet, d: f64, max_depth: usize) -> f64 {
    let n = set.dim();
    let bound = set.bounding_cube();
    let side = bound.side();
    let min = bound.min_corner();
    let nodes = set.masked_positions();
    if nodes.is_empty() {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for g in 0..=max_depth {
        let cells = 1usize << g;
        let cell_side = side / cells as f64;
        let total_cells = cells.pow(n as u32);
        // geometric membership: half-open boxes, last cell closed per axis
        let mut node_sets: Vec<Vec<usize>> = vec![Vec::new(); total_cells];
        for (ni, p) in nodes.iter().enumerate() {
            for (flat, slots) in node_sets.iter_mut().enumerate() {
                let mut rem = flat;
                let mut inside = true;
                for ax in (0..n).rev() {
                    let j = rem % cells;
                    rem /= cells;
                    let lo = min[ax] + j as f64 * cell_side;
                    let hi = lo + cell_side;
                    let last = j == cells - 1;
                    let ok = p[ax] >= lo && (p[ax] < hi || (last && p[ax] <= hi));
                    if !ok {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    slots.push(ni);
                }
            }
        }
        let candidates: Vec<usize> = (0..total_cells)
            .filter(|&c| !node_sets[c].is_empty())
            .collect();
        let weight = (cell_side * (n as f64).sqrt() / 2.0).powf(d);
        let count = if candidates.len() <= 16 {
            // true minimum set cover by subset enumeration
            let full: u64 = (1u64 << nodes.len()) - 1;
            let masks: Vec<u64> = candidates
                .iter()
                .map(|&c| node_sets[c].iter().fold(0u64, |m, &ni| m | (1u64 << ni)))
                .collect();
            let mut best_count = candidates.len();
            for subset in 0u32..(1u32 << candidates.len()) {
                let mut covered = 0u64;
                for (ci, mask) in masks.iter().enumerate() {
                    if subset >> ci & 1 == 1 {
                        covered |= mask;
                    }
                }
                if covered == full {
                    best_count = best_count.min(subset.count_ones() as usize);
                }
            }
            best_count
        } else {
            // with unique assignment every occupied cell is forced
            candidates.len()
        };
        best = best.min(count as f64 * weight);
    }
    best
}

#[test]
fn slab_masks_match_the_exhaustive_cover() {
    let q = Cube::unit(2);
    for &w in &[0.05, 0.11, 0.2, 0.35] {
        let set = PointSet::from_predicate(&q, 8, |x| x[0].abs() <= w).unwrap();
        for &d in &[0.8, 1.0, 1.5, 2.0] {
            let est = hausdorff_content(&set, d, 3).unwrap();
            let oracle = oracle_content(&set, d, 3);
            assert!(
                (est.value - oracle).abs() <= 1e-12 * oracle.max(1.0),
                "w={w} d={d}: {} vs {oracle}",
                est.value
            );
        }
    }
}

#[test]
fn sparse_random_masks_match_the_exhaustive_cover() {
    let q = Cube::unit(2);
    let mut rng = SplitMix64::new(2024);
    for trial in 0..40 {
        // at most 10 nodes so the subset search stays exact
        let mut picks = Vec::new();
        for _ in 0..(2 + rng.below(9)) {
            picks.push((rng.below(8), rng.below(8)));
        }
        let set = PointSet::from_predicate(&q, 8, |x| {
            picks.iter().any(|&(i, j)| {
                let xi = -0.5 + i as f64 / 7.0;
                let xj = -0.5 + j as f64 / 7.0;
                (x[0] - xi).abs() < 1e-9 && (x[1] - xj).abs() < 1e-9
            })
        })
        .unwrap();
        let d = 1.3;
        let est = hausdorff_content(&set, d, 3).unwrap();
        let oracle = oracle_content(&set, d, 3);
        assert!(
            (est.value - oracle).abs() <= 1e-12 * oracle.max(1.0),
            "trial {trial}: {} vs {oracle}",
            est.value
        );
    }
}

#[test]
fn dense_random_masks_match_the_forced_cover() {
    let mut rng = SplitMix64::new(7);
    for _ in 0..20 {
        let bits: Vec<bool> = (0..64).map(|_| rng.next_bool()).collect();
        let set = PointSet::from_mask(vec![8, 8], 1.0 / 7.0, vec![0.0, 0.0], bits).unwrap();
        if set.is_empty() {
            continue;
        }
        let d = 1.5;
        let est = hausdorff_content(&set, d, 3).unwrap();
        let oracle = oracle_content(&set, d, 3);
        assert!((est.value - oracle).abs() <= 1e-12 * oracle.max(1.0));
    }
}
