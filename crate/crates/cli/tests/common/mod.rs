//! Oracles shared by the acceptance criteria: re-implementations that stay
//! independent of the library's computation paths.

use smallprop::geometry::PointSet;

/// Minimum dyadic covering total per generation, minimized over
/// generations: membership is recomputed from cell geometry (half-open
/// boxes, last cell closed) and the minimal cover found by exhaustive
/// subset enumeration.
pub fn exhaustive_content(set: &PointSet, d: f64, max_depth: usize) -> f64 {
    let n = set.dim();
    let bound = set.bounding_cube();
    let side = bound.side();
    let min = bound.min_corner();
    let nodes = set.masked_positions();
    if nodes.is_empty() {
        return 0.0;
    }
    assert!(nodes.len() <= 16, "oracle is exhaustive; keep masks small");
    let mut best = f64::INFINITY;
    for g in 0..=max_depth {
        let cells = 1usize << g;
        let total_cells = cells.pow(n as u32);
        let cell_side = side / cells as f64;
        let mut masks: Vec<u64> = Vec::new();
        for flat in 0..total_cells {
            let mut covered = 0u64;
            for (ni, p) in nodes.iter().enumerate() {
                let mut rem = flat;
                let mut inside = true;
                for ax in (0..n).rev() {
                    let j = rem % cells;
                    rem /= cells;
                    let lo = min[ax] + j as f64 * cell_side;
                    let hi = lo + cell_side;
                    let last = j == cells - 1;
                    if !(p[ax] >= lo && (p[ax] < hi || (last && p[ax] <= hi))) {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    covered |= 1 << ni;
                }
            }
            if covered != 0 {
                masks.push(covered);
            }
        }
        let full: u64 = (1u64 << nodes.len()) - 1;
        let weight = (cell_side * (n as f64).sqrt() / 2.0).powf(d);
        let mut best_count = usize::MAX;
        for subset in 0u32..(1u32 << masks.len()) {
            let mut covered = 0u64;
            for (ci, m) in masks.iter().enumerate() {
                if subset >> ci & 1 == 1 {
                    covered |= m;
                }
            }
            if covered == full {
                best_count = best_count.min(subset.count_ones() as usize);
            }
        }
        best = best.min(best_count as f64 * weight);
    }
    best
}

/// Exact total length of the `k` equiangular zero lines of Re(x+iy)^k
/// clipped to the unit square.
pub fn equiangular_chord_length(k: u32) -> f64 {
    let mut total = 0.0;
    for j in 0..k {
        let theta = (2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * k as f64);
        total += 1.0 / theta.cos().abs().max(theta.sin().abs());
    }
    total
}
