//! Sublevel sets, decay profiles, Remez-type checks, bad-cube censuses and
//! the recursive bound propagator.
//!
//! Everything here is scalar invariant: masks, slopes, counts and fitted
//! exponents are unchanged under `f -> λ f` because thresholds are always
//! relative to a supremum of the same field.

pub mod census;
pub mod recursion;
pub mod zeroset;

pub use census::{bad_cube_census, critical_census, CensusReport, CriticalCensus};
pub use recursion::{feasible_exponents, recursive_bound_propagator, BoundTable, RecursionParams};
pub use zeroset::{zero_set_lower_bound, zero_set_measure, ZeroSetEstimate, ZeroSetLowerBound};

use crate::doubling::{doubling_index_cube, CubeIndexParams, FieldTarget};
use crate::error::{Error, Result, ZERO_FLOOR};
use crate::fields::{EigenRegion, Eigenfunction, ScalarField};
use crate::fit::linear_fit;
use crate::geometry::{hausdorff_content, Cube, PointSet};

/// Relative sublevel set `{x in ½Q : |f(x)| < e^{-a} sup_Q |f|}` sampled on
/// a lattice over ½Q.
#[derive(Debug, Clone)]
pub struct SublevelSet {
    pub threshold_exponent: f64,
    pub mask: PointSet,
    pub cube: Cube,
    pub sup_q: f64,
}

pub fn sublevel_set<F: ScalarField + ?Sized>(
    f: &F,
    cube: &Cube,
    a: f64,
    nodes_per_axis: usize,
) -> Result<SublevelSet> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold exponent must be positive, got {a}"
        )));
    }
    let sup_q = f.sup_abs_cube(cube);
    if sup_q < ZERO_FLOOR {
        return Err(Error::DegenerateField(
            "cube supremum below the zero floor".into(),
        ));
    }
    let threshold = (-a).exp() * sup_q;
    let half = cube.scale(0.5)?;
    let mask = PointSet::from_predicate(&half, nodes_per_axis, |x| f.value(x).abs() < threshold)?;
    Ok(SublevelSet {
        threshold_exponent: a,
        mask,
        cube: cube.clone(),
        sup_q,
    })
}

/// Exponential decay fit of sublevel contents against the threshold
/// exponent.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub order: f64,
    /// (a, content) for the thresholds that produced nonempty masks.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Intercept lifted so the fitted line upper-bounds every sample.
    pub certified_intercept: f64,
    /// Cube doubling index of the instance, for slope-vs-index scaling.
    pub doubling_index: f64,
    pub empty_masks: usize,
}

/// Hausdorff content of the sublevel sets over an increasing `a` grid and
/// the least-squares slope of `log content` against `a`.
///
/// Thresholds whose masks come out empty sit below the lattice's
/// resolution floor and are excluded from the fit.
pub fn decay_profile<F: ScalarField + ?Sized>(
    f: &F,
    cube: &Cube,
    order: f64,
    a_grid: &[f64],
    nodes_per_axis: usize,
    index_params: &CubeIndexParams,
    target: FieldTarget,
) -> Result<DecayFit> {
    if a_grid.len() < 2 || a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "threshold grid must be increasing with at least two entries".into(),
        ));
    }
    let mut samples = Vec::new();
    let mut empty = 0usize;
    for &a in a_grid {
        let level = sublevel_set(f, cube, a, nodes_per_axis)?;
        if level.mask.is_empty() {
            empty += 1;
            continue;
        }
        let est = hausdorff_content(&level.mask, order, level.mask.default_depth())?;
        if est.value > 0.0 {
            samples.push((a, est.value));
        } else {
            empty += 1;
        }
    }
    if samples.len() < 2 {
        return Err(Error::DegenerateField(
            "decay profile has fewer than two nonempty sublevel masks".into(),
        ));
    }
    let xs: Vec<f64> = samples.iter().map(|&(a, _)| a).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, m)| m.ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    let certified = xs
        .iter()
        .zip(&ys)
        .map(|(&a, &y)| y - slope * a)
        .fold(f64::NEG_INFINITY, f64::max);
    let report = doubling_index_cube(f, cube, index_params, target)?;
    Ok(DecayFit {
        order,
        samples,
        slope,
        intercept,
        certified_intercept: certified,
        doubling_index: report.cube_index,
        empty_masks: empty,
    })
}

/// Measured quantities of the Remez-type comparison
/// `sup_Q |f| <= C sup_E |f| (C |Q|/|E|)^{C N}` and the least feasible C.
#[derive(Debug, Clone)]
pub struct RemezReport {
    pub c_fit: f64,
    pub sup_q: f64,
    pub sup_e: f64,
    /// Node-count ratio |Q|/|E| >= 1.
    pub measure_ratio: f64,
    pub doubling_index: f64,
}

/// Least constant making the Remez-type inequality hold on the instance.
///
/// Both suprema are lattice maxima over the same vertex lattice on Q, and
/// the measures are node counts, so `E = Q` gives both sides equal at
/// C = 1 exactly.
pub fn remez_check<F: ScalarField + ?Sized>(
    f: &F,
    cube: &Cube,
    small_set: &PointSet,
    index_params: &CubeIndexParams,
) -> Result<RemezReport> {
    if small_set.is_empty() {
        return Err(Error::InvalidParameter("empty Remez set".into()));
    }
    let res = small_set.shape()[0];
    if small_set.shape().iter().any(|&k| k != res) {
        return Err(Error::InvalidParameter(
            "Remez set must live on a square lattice".into(),
        ));
    }
    let expected_spacing = cube.side() / (res - 1) as f64;
    let centered = small_set
        .center()
        .iter()
        .zip(cube.center())
        .all(|(&a, &b)| (a - b).abs() <= 1e-12 * cube.side());
    if !centered || (small_set.spacing() - expected_spacing).abs() > 1e-12 * expected_spacing {
        return Err(Error::InvalidParameter(
            "Remez set lattice does not match the cube".into(),
        ));
    }
    let full = PointSet::from_predicate(cube, res, |_| true)?;
    let node_sup = |set: &PointSet| -> f64 {
        set.masked_positions()
            .iter()
            .map(|p| f.value(p).abs())
            .fold(0.0f64, f64::max)
    };
    let sup_q = node_sup(&full);
    let sup_e = node_sup(small_set);
    if sup_q < ZERO_FLOOR {
        return Err(Error::DegenerateField("cube supremum below floor".into()));
    }
    let ratio = full.node_count() as f64 / small_set.node_count() as f64;
    let report = doubling_index_cube(f, cube, index_params, FieldTarget::U)?;
    let n = report.cube_index.max(0.0);
    // rhs(C) = C sup_e (C ratio)^{C N} is not monotone for small C, so
    // bracket the first crossing on a log-spaced sweep and bisect
    let rhs = |c: f64| c * sup_e * (c * ratio).powf(c * n);
    let mut c_fit = None;
    let mut prev = 1e-6f64;
    if rhs(prev) >= sup_q {
        c_fit = Some(prev);
    } else {
        let steps = 4000;
        let factor = (1e8f64 / prev).powf(1.0 / steps as f64);
        let mut cur = prev;
        for _ in 0..steps {
            cur *= factor;
            if rhs(cur) >= sup_q {
                let mut lo = prev;
                let mut hi = cur;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if rhs(mid) >= sup_q {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                c_fit = Some(hi);
                break;
            }
            prev = cur;
        }
    }
    let c_fit = c_fit
        .ok_or_else(|| Error::InvalidParameter("no feasible Remez constant below 1e8".into()))?;
    Ok(RemezReport {
        c_fit,
        sup_q,
        sup_e,
        measure_ratio: ratio,
        doubling_index: n,
    })
}

/// Fit of `log(sup_E |φ| / sup_M |φ|)` against the degree and against √λ
/// across an eigenfunction family.
#[derive(Debug, Clone)]
pub struct EigenRemezFit {
    pub degrees: Vec<f64>,
    pub sqrt_eigenvalues: Vec<f64>,
    pub log_ratios: Vec<f64>,
    pub slope_vs_degree: f64,
    pub intercept_vs_degree: f64,
    pub slope_vs_sqrt_lambda: f64,
}

pub fn eigen_remez_check(family: &[Eigenfunction], region: &EigenRegion) -> Result<EigenRemezFit> {
    if family.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two eigenfunctions for a fit".into(),
        ));
    }
    let mut degrees = Vec::new();
    let mut sqrt_lams = Vec::new();
    let mut logs = Vec::new();
    for phi in family {
        let sup_e = phi.sup_abs_region(region)?;
        let sup_m = phi.sup_abs_global();
        if sup_e <= 0.0 {
            return Err(Error::DegenerateField(
                "eigenfunction vanishes on the region".into(),
            ));
        }
        let degree = match phi {
            Eigenfunction::SphericalSectoral { degree } => *degree as f64,
            Eigenfunction::TorusCosine { freqs } => {
                freqs.iter().map(|&m| (m * m) as f64).sum::<f64>().sqrt()
            }
        };
        degrees.push(degree);
        sqrt_lams.push(phi.eigenvalue().sqrt());
        logs.push((sup_e / sup_m).ln());
    }
    let (slope_deg, intercept_deg) = linear_fit(&degrees, &logs);
    let (slope_sqrt, _) = linear_fit(&sqrt_lams, &logs);
    Ok(EigenRemezFit {
        degrees,
        sqrt_eigenvalues: sqrt_lams,
        log_ratios: logs,
        slope_vs_degree: slope_deg,
        intercept_vs_degree: intercept_deg,
        slope_vs_sqrt_lambda: slope_sqrt,
    })
}
