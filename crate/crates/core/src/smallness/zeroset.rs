//! Measure estimates of zero sets by linear interpolation on simplices.
//!
//! Cells are split into simplices deterministically (lexicographic
//! diagonal in 2d, the six coordinate-order tetrahedra in 3d); inside a
//! simplex the field is linear in its corner values, so the zero set cuts
//! out a segment, a triangle or a quadrilateral. Corners with value
//! exactly 0 are classed as negative, which measures a node-aligned zero
//! hyperplane exactly once.

use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::Cube;
use crate::solver::GridFunction;

/// H^{n-1} estimate of the zero set with a degeneracy diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSetEstimate {
    pub measure: f64,
    /// Cells where every corner value is exactly zero; the interpolant
    /// carries no orientation there and the cell is skipped.
    pub degenerate_cells: usize,
}

fn positive(v: f64) -> bool {
    v > 0.0
}

/// Zero crossing on the segment between corners with values va, vb of
/// opposite sign class.
fn crossing(pa: &[f64], va: f64, pb: &[f64], vb: f64) -> Vec<f64> {
    let t = if va == vb { 0.5 } else { va / (va - vb) };
    pa.iter().zip(pb).map(|(&a, &b)| a + t * (b - a)).collect()
}

fn segment_length(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn triangle_area(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let cx = u[1] * v[2] - u[2] * v[1];
    let cy = u[2] * v[0] - u[0] * v[2];
    let cz = u[0] * v[1] - u[1] * v[0];
    0.5 * (cx * cx + cy * cy + cz * cz).sqrt()
}

/// Zero-set length/area contributed by one simplex (corner positions and
/// values; 3 corners in 2d, 4 in 3d).
fn simplex_contribution(pts: &[Vec<f64>], vals: &[f64]) -> f64 {
    let pos: Vec<usize> = (0..vals.len()).filter(|&i| positive(vals[i])).collect();
    let neg: Vec<usize> = (0..vals.len()).filter(|&i| !positive(vals[i])).collect();
    if pos.is_empty() || neg.is_empty() {
        return 0.0;
    }
    match vals.len() {
        3 => {
            // one corner against two: crossings on the two mixed edges
            let (lone, pair) = if pos.len() == 1 {
                (pos[0], neg)
            } else {
                (neg[0], pos)
            };
            let a = crossing(&pts[lone], vals[lone], &pts[pair[0]], vals[pair[0]]);
            let b = crossing(&pts[lone], vals[lone], &pts[pair[1]], vals[pair[1]]);
            segment_length(&a, &b)
        }
        4 => {
            if pos.len() == 1 || neg.len() == 1 {
                let (lone, rest) = if pos.len() == 1 {
                    (pos[0], neg)
                } else {
                    (neg[0], pos)
                };
                let a = crossing(&pts[lone], vals[lone], &pts[rest[0]], vals[rest[0]]);
                let b = crossing(&pts[lone], vals[lone], &pts[rest[1]], vals[rest[1]]);
                let c = crossing(&pts[lone], vals[lone], &pts[rest[2]], vals[rest[2]]);
                triangle_area(&a, &b, &c)
            } else {
                // 2-2 split: quadrilateral ac-ad-bd-bc, two triangles with
                // the diagonal anchored at the lexicographically first
                // crossing
                let (a, b) = (pos[0], pos[1]);
                let (c, d) = (neg[0], neg[1]);
                let ac = crossing(&pts[a], vals[a], &pts[c], vals[c]);
                let ad = crossing(&pts[a], vals[a], &pts[d], vals[d]);
                let bd = crossing(&pts[b], vals[b], &pts[d], vals[d]);
                let bc = crossing(&pts[b], vals[b], &pts[c], vals[c]);
                triangle_area(&ac, &ad, &bd) + triangle_area(&ac, &bd, &bc)
            }
        }
        _ => unreachable!("simplices have 3 or 4 corners"),
    }
}

/// H^{n-1} estimate of `{u = 0}` inside the cube, for n in {2, 3}.
///
/// The grid is resampled onto a vertex lattice over the cube at the
/// grid's own resolution; when the cube coincides with the grid's box the
/// resampling reproduces the node values exactly.
pub fn zero_set_measure(u: &GridFunction, cube: &Cube) -> Result<ZeroSetEstimate> {
    let n = u.dim();
    if n != 2 && n != 3 {
        return Err(Error::InvalidParameter(
            "zero-set measurement supports dimensions 2 and 3".into(),
        ));
    }
    if cube.dim() != n {
        return Err(Error::InvalidParameter("cube dimension mismatch".into()));
    }
    let res = u.shape().iter().copied().max().unwrap();
    let grid = GridFunction::sample(cube, res, |x| u.value(x))?;
    let shape = grid.shape().to_vec();
    let strides = grid.strides();
    let h = grid.spacing();
    let min = grid.min_corner();
    let mut measure = 0.0;
    let mut degenerate = 0usize;

    let corner_pos =
        |multi: &[usize]| -> Vec<f64> { (0..n).map(|ax| min[ax] + multi[ax] as f64 * h).collect() };

    let mut cell = vec![0usize; n];
    'cells: loop {
        // gather the 2^n corners of the cell
        let mut pts = Vec::with_capacity(1 << n);
        let mut vals = Vec::with_capacity(1 << n);
        for corner in 0..(1usize << n) {
            let mut multi = cell.clone();
            let mut flat = 0usize;
            for ax in 0..n {
                multi[ax] += (corner >> ax) & 1;
                flat += strides[ax] * multi[ax];
            }
            pts.push(corner_pos(&multi));
            vals.push(grid.values()[flat]);
        }
        if vals.iter().all(|&v| v == 0.0) {
            degenerate += 1;
        } else if n == 2 {
            // lexicographic diagonal from corner 00 to corner 11
            // corner bit layout: bit0 = axis0, bit1 = axis1
            for tri in [[0usize, 1, 3], [0, 3, 2]] {
                let p: Vec<Vec<f64>> = tri.iter().map(|&i| pts[i].clone()).collect();
                let v: Vec<f64> = tri.iter().map(|&i| vals[i]).collect();
                measure += simplex_contribution(&p, &v);
            }
        } else {
            // the six coordinate-order tetrahedra 0 -> e_p0 -> +e_p1 -> 111
            const PERMS: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            for perm in PERMS {
                let mut corner_bits = [0usize; 4];
                corner_bits[1] = 1 << perm[0];
                corner_bits[2] = corner_bits[1] | (1 << perm[1]);
                corner_bits[3] = 7;
                let p: Vec<Vec<f64>> = corner_bits.iter().map(|&b| pts[b].clone()).collect();
                let v: Vec<f64> = corner_bits.iter().map(|&b| vals[b]).collect();
                measure += simplex_contribution(&p, &v);
            }
        }
        for ax in (0..n).rev() {
            cell[ax] += 1;
            if cell[ax] < shape[ax] - 1 {
                continue 'cells;
            }
            cell[ax] = 0;
            if ax == 0 {
                break 'cells;
            }
        }
    }
    Ok(ZeroSetEstimate {
        measure,
        degenerate_cells: degenerate,
    })
}

/// Per-subcube lower-bound survey: for every subcube carrying a sign
/// change, the zero set inside the doubled subcube should fill at least
/// `c s(q)^{n-1}`; the smallest observed quotient is the certified c.
#[derive(Debug, Clone)]
pub struct ZeroSetLowerBound {
    /// min over checked subcubes of measure(2q) / s(q)^{n-1}.
    pub fitted_c: f64,
    pub sign_changing: usize,
    /// Subcubes skipped because their doubled cube exits the grid.
    pub skipped: usize,
}

pub fn zero_set_lower_bound(
    u: &GridFunction,
    cube: &Cube,
    subdivision: usize,
) -> Result<ZeroSetLowerBound> {
    if subdivision < 2 {
        return Err(Error::InvalidParameter(
            "subdivision factor must be at least 2".into(),
        ));
    }
    let n = u.dim();
    let domain = u.bounding_cube();
    let mut fitted = f64::INFINITY;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    for q in cube.subdivide(subdivision)? {
        if u.inf_abs_cube(&q) > 0.0 {
            continue; // no zero inside
        }
        let doubled = q.scale(2.0)?;
        let fits = doubled
            .center()
            .iter()
            .zip(domain.center())
            .all(|(&a, &b)| {
                (a - b).abs() + 0.5 * doubled.side() <= 0.5 * domain.side() + 1e-12 * domain.side()
            });
        if !fits {
            skipped += 1;
            continue;
        }
        let est = zero_set_measure(u, &doubled)?;
        fitted = fitted.min(est.measure / q.side().powi(n as i32 - 1));
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::DegenerateField(
            "no sign-changing subcube with its double inside the grid".into(),
        ));
    }
    Ok(ZeroSetLowerBound {
        fitted_c: fitted,
        sign_changing: checked,
        skipped,
    })
}
