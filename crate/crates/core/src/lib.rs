//! Numerical laboratory for growth and smallness measurements of solutions
//! to divergence-form elliptic equations `div(A grad u) = 0`.
//!
//! The crate provides the measurable objects — doubling indices, dyadic
//! Hausdorff-content estimates, sublevel/zero/critical sets — together with
//! a finite-difference Dirichlet solver and closed-form reference solutions,
//! so that the classical quantitative inequalities (three spheres, Remez
//! type bounds, exponential sublevel decay, bad-cube counts, the recursive
//! bound table) can be checked experimentally at desk scale.

// `!(x > 0.0)` style guards are deliberate: they reject NaN along with
// the out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod doubling;
pub mod error;
pub mod fields;
pub mod fit;
pub mod geometry;
pub mod rng;
pub mod smallness;
pub mod solver;

pub use doubling::{
    check_monotonicity, doubling_index_ball, doubling_index_cube, nested_cube_index,
    propagation_fit, subcube_lower_bound_check, three_spheres_check, CubeIndexParams,
    DoublingReport, FieldTarget, MonotonicityFit, PropagationFit, SubcubeBound, ThreeSpheresCheck,
};
pub use error::{Error, Result};
pub use fields::{
    check_ellipticity, concentrating_spherical_harmonic, eigenfunction_lift, harmonic_polynomial,
    parse_coefficient, parse_field, AnalyticSolution, CoefficientField, EigenRegion, Eigenfunction,
    GradientMagnitude, ScalarField,
};
pub use geometry::{
    hausdorff_content, hausdorff_content_default, read_mask, scale_set, write_mask, Ball,
    ContentEstimate, Cube, PointSet,
};
pub use rng::SplitMix64;
pub use smallness::{
    bad_cube_census, critical_census, decay_profile, eigen_remez_check, feasible_exponents,
    recursive_bound_propagator, remez_check, sublevel_set, zero_set_lower_bound, zero_set_measure,
    BoundTable, CensusReport, CriticalCensus, DecayFit, EigenRemezFit, RecursionParams,
    RemezReport, SublevelSet, ZeroSetEstimate, ZeroSetLowerBound,
};
pub use solver::{
    discretize, gradient, read_grid, solve_dirichlet, write_grid, DiscreteOperator, GridFunction,
    SolveReport, VectorGridFunction,
};
