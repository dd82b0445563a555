//! Counts of subcubes with large doubling index and of effectively
//! critical subcubes of the gradient.

use crate::doubling::{doubling_index_cube, nested_cube_index, CubeIndexParams, FieldTarget};
use crate::error::{Error, Result};
use crate::fields::ScalarField;
use crate::geometry::Cube;

/// Census of subcubes whose doubling index stays large after subdivision.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub subdivision: usize,
    /// Threshold `max(parent_index / 2, n_floor)` applied to the subcubes.
    pub threshold: f64,
    pub parent_index: f64,
    pub count: usize,
    /// Row-major indices of the bad subcubes.
    pub bad_indices: Vec<usize>,
    pub total_subcubes: usize,
    /// `ln(count) / ln(B)`; -inf when the census is empty.
    pub empirical_exponent: f64,
}

/// Subdivides the cube into `B^n` subcubes and counts those with
/// `N(f, q) >= max(N(f, Q)/2, n_floor)`.
///
/// Subcube indices are evaluated on the parent's sampling lattice
/// restricted to each subcube, so every subcube index is bounded by the
/// parent index exactly as computed.
pub fn bad_cube_census<F: ScalarField + ?Sized>(
    f: &F,
    cube: &Cube,
    subdivision: usize,
    n_floor: f64,
    params: &CubeIndexParams,
    target: FieldTarget,
) -> Result<CensusReport> {
    if subdivision < 2 {
        return Err(Error::InvalidParameter(format!(
            "subdivision factor must be at least 2, got {subdivision}"
        )));
    }
    let parent = doubling_index_cube(f, cube, params, target)?;
    let threshold = (0.5 * parent.cube_index).max(n_floor);
    let subcubes = cube.subdivide(subdivision)?;
    let mut bad = Vec::new();
    for (i, q) in subcubes.iter().enumerate() {
        let rep = nested_cube_index(f, cube, q, params, target)?;
        if rep.cube_index >= threshold {
            bad.push(i);
        }
    }
    let count = bad.len();
    let exponent = if count == 0 {
        f64::NEG_INFINITY
    } else {
        (count as f64).ln() / (subdivision as f64).ln()
    };
    Ok(CensusReport {
        subdivision,
        threshold,
        parent_index: parent.cube_index,
        count,
        bad_indices: bad,
        total_subcubes: subcubes.len(),
        empirical_exponent: exponent,
    })
}

/// Census of effectively critical subcubes of the gradient.
#[derive(Debug, Clone)]
pub struct CriticalCensus {
    pub split: usize,
    pub smallness_constant: f64,
    pub count: usize,
    pub bad_indices: Vec<usize>,
    /// Subcubes whose doubled cube left the field's domain; their suprema
    /// were taken over the clipped intersection.
    pub clipped: usize,
    pub total_subcubes: usize,
    /// `ln(count) / ln(K)`; -inf when no subcube is critical.
    pub empirical_exponent: f64,
}

/// Splits the cube into `K^n` subcubes and counts those where
/// `inf_q |grad u| < c sup_{2q} |grad u|`.
///
/// Pass the gradient magnitude as the field. For grid-backed fields the
/// supremum over a doubled cube that exits the domain is evaluated over
/// the clipped intersection and the subcube is counted in `clipped`.
pub fn critical_census<F: ScalarField + ?Sized>(
    grad: &F,
    cube: &Cube,
    split: usize,
    smallness: f64,
) -> Result<CriticalCensus> {
    if split < 2 {
        return Err(Error::InvalidParameter(format!(
            "split factor must be at least 2, got {split}"
        )));
    }
    if !(smallness > 0.0 && smallness < 1.0) {
        return Err(Error::InvalidParameter(
            "smallness constant must lie in (0, 1)".into(),
        ));
    }
    let subcubes = cube.subdivide(split)?;
    let domain = grad.domain();
    let mut bad = Vec::new();
    let mut clipped = 0usize;
    for (i, q) in subcubes.iter().enumerate() {
        let doubled = q.scale(2.0)?;
        if let Some(dom) = &domain {
            let fits = doubled.center().iter().zip(dom.center()).all(|(&a, &b)| {
                (a - b).abs() + 0.5 * doubled.side() <= 0.5 * dom.side() + 1e-12 * dom.side()
            });
            if !fits {
                clipped += 1;
            }
        }
        let inf = grad.inf_abs_cube(q);
        let sup = grad.sup_abs_cube(&doubled);
        if inf < smallness * sup {
            bad.push(i);
        }
    }
    let count = bad.len();
    let exponent = if count == 0 {
        f64::NEG_INFINITY
    } else {
        (count as f64).ln() / (split as f64).ln()
    };
    Ok(CriticalCensus {
        split,
        smallness_constant: smallness,
        count,
        bad_indices: bad,
        clipped,
        total_subcubes: subcubes.len(),
        empirical_exponent: exponent,
    })
}
