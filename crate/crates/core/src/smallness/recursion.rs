//! Executable form of the two-variable recursive bound
//!
//! ```text
//! M(N, a) <= B^{1-δ} M(N/2, ã) + B^{-δ-c} M(N, ã),   ã = a - C₁ N log B
//! ```
//!
//! filled row by row over a dyadic N-grid, together with the sufficient
//! condition `B^{1-δ+2C₁β-C₀β} + B^{-δ-c+C₁β} <= 1` under which the table
//! is dominated by `C e^{-β a / N}`.

use crate::error::{Error, Result};

/// Parameters of the recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionParams {
    /// Subdivision factor B > 2.
    pub subdivision: f64,
    /// Census-hole exponent c > 0.
    pub hole_exponent: f64,
    /// Content-order excess δ in (0, 1].
    pub delta: f64,
    /// Shift constant C₁ > 0 of ã = a - C₁ N log B.
    pub shift: f64,
    /// Small-a constant C₀ of the sufficient condition.
    pub small_a: f64,
}

impl RecursionParams {
    fn validate(&self) -> Result<()> {
        if !(self.subdivision > 2.0) {
            return Err(Error::InvalidParameter("subdivision must exceed 2".into()));
        }
        if !(self.hole_exponent > 0.0) {
            return Err(Error::InvalidParameter(
                "hole exponent must be positive".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidParameter("delta must lie in (0, 1]".into()));
        }
        if !(self.shift > 0.0) || !(self.small_a > 0.0) {
            return Err(Error::InvalidParameter(
                "shift constants must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Left-hand side of the sufficient condition at decay rate β.
    pub fn sufficient_condition(&self, beta: f64) -> f64 {
        let b = self.subdivision;
        b.powf(1.0 - self.delta + 2.0 * self.shift * beta - self.small_a * beta)
            + b.powf(-self.delta - self.hole_exponent + self.shift * beta)
    }
}

/// Searches a decay rate β and small-a constant C₀ satisfying the
/// sufficient condition for the given (B, c, δ, C₁).
///
/// β starts at (δ+c)/(2 C₁), which keeps the second term strictly below
/// one, and C₀ is then solved from the first term; β is halved until the
/// combined condition holds.
pub fn feasible_exponents(
    subdivision: f64,
    hole_exponent: f64,
    delta: f64,
    shift: f64,
) -> Result<(f64, f64)> {
    let probe = RecursionParams {
        subdivision,
        hole_exponent,
        delta,
        shift,
        small_a: 1.0,
    };
    probe.validate()?;
    let b = subdivision;
    let mut beta = (delta + hole_exponent) / (2.0 * shift);
    for _ in 0..64 {
        let second = b.powf(-delta - hole_exponent + shift * beta);
        if second < 1.0 {
            let margin = 1.0 - second;
            // B^{1-δ+2C₁β-C₀β} <= margin
            let c0 = (1.0 - delta + 2.0 * shift * beta - margin.ln() / b.ln()) / beta;
            let c0 = (c0.max(shift) * 2.0).ceil() / 2.0; // round up to halves
            let total = RecursionParams {
                small_a: c0,
                ..probe.clone()
            }
            .sufficient_condition(beta);
            if total <= 1.0 {
                return Ok((beta, c0));
            }
        }
        beta *= 0.5;
    }
    Err(Error::InvalidParameter(
        "no feasible decay rate found for these parameters".into(),
    ))
}

/// Certified table of bounds M(N, a) over a dyadic N-grid.
#[derive(Debug, Clone)]
pub struct BoundTable {
    pub a_grid: Vec<f64>,
    /// N levels N₀, 2N₀, 4N₀, ...
    pub n_levels: Vec<f64>,
    /// rows[level][i] = M(n_levels[level], a_grid[i]).
    pub rows: Vec<Vec<f64>>,
    pub params: RecursionParams,
    /// Value used whenever ã falls below the grid.
    pub cap: f64,
}

fn interp(a_grid: &[f64], row: &[f64], a: f64) -> f64 {
    if a <= a_grid[0] {
        return row[0];
    }
    if a >= *a_grid.last().unwrap() {
        return *row.last().unwrap();
    }
    let mut hi = 1;
    while a_grid[hi] < a {
        hi += 1;
    }
    let lo = hi - 1;
    let t = (a - a_grid[lo]) / (a_grid[hi] - a_grid[lo]);
    row[lo] + t * (row[hi] - row[lo])
}

impl BoundTable {
    /// Shift ã = a - C₁ N log B for a level.
    fn shift_at(&self, level: usize) -> f64 {
        self.params.shift * self.n_levels[level] * self.params.subdivision.ln()
    }

    /// Re-evaluates the recursion on the finished table; returns the worst
    /// slack `M(N,a) - rhs` over all entries whose ã stays on the grid
    /// (non-positive means every entry is certified).
    pub fn verify_recursion(&self) -> f64 {
        let b = self.params.subdivision;
        let good_weight = b.powf(1.0 - self.delta());
        let bad_weight = b.powf(-self.delta() - self.params.hole_exponent);
        let mut worst = f64::NEG_INFINITY;
        for level in 1..self.rows.len() {
            let shift = self.shift_at(level);
            for (i, &a) in self.a_grid.iter().enumerate() {
                let shifted = a - shift;
                if shifted < self.a_grid[0] {
                    continue;
                }
                let rhs = good_weight * interp(&self.a_grid, &self.rows[level - 1], shifted)
                    + bad_weight * interp(&self.a_grid, &self.rows[level], shifted);
                worst = worst.max(self.rows[level][i] - rhs);
            }
        }
        worst
    }

    /// Smallest C with `M(N, a) <= C e^{-β a / N}` across the table.
    pub fn envelope_constant(&self, beta: f64) -> f64 {
        let mut c: f64 = 0.0;
        for (level, row) in self.rows.iter().enumerate() {
            let n = self.n_levels[level];
            for (i, &m) in row.iter().enumerate() {
                c = c.max(m * (beta * self.a_grid[i] / n).exp());
            }
        }
        c
    }

    fn delta(&self) -> f64 {
        self.params.delta
    }
}

/// Fills the bound table from a base row at N = N₀.
///
/// Rows fill in increasing N; within a row entries fill in increasing a so
/// that every self-referencing interpolation reads already-final values
/// (the grid-step precondition below guarantees ã lands left of the entry
/// being written). Entries are `min(cap, recursion right-hand side)`, with
/// `cap` used outright where ã drops off the grid.
pub fn recursive_bound_propagator<B: Fn(f64) -> f64>(
    base: B,
    n0: f64,
    doublings: usize,
    a_grid: &[f64],
    params: &RecursionParams,
    beta: f64,
    cap: f64,
) -> Result<BoundTable> {
    params.validate()?;
    if a_grid.len() < 2 || a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "a grid must be increasing with at least two entries".into(),
        ));
    }
    if !(n0 > 0.0) || !(cap > 0.0) {
        return Err(Error::InvalidParameter(
            "base level and cap must be positive".into(),
        ));
    }
    if params.sufficient_condition(beta) > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "parameters fail the sufficient condition at beta = {beta}"
        )));
    }
    // every gap must stay below the smallest shift so ascending fills
    // only read finished entries
    let min_shift = params.shift * (2.0 * n0) * params.subdivision.ln();
    let max_gap = a_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    if max_gap > min_shift {
        return Err(Error::InvalidParameter(format!(
            "a-grid step {max_gap} exceeds the smallest shift {min_shift}; \
             the grid cannot host the ã shifts"
        )));
    }
    let mut n_levels = Vec::with_capacity(doublings + 1);
    let mut n = n0;
    for _ in 0..=doublings {
        n_levels.push(n);
        n *= 2.0;
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_levels.len());
    rows.push(a_grid.iter().map(|&a| base(a)).collect());
    let b = params.subdivision;
    let good_weight = b.powf(1.0 - params.delta);
    let bad_weight = b.powf(-params.delta - params.hole_exponent);
    for level in 1..n_levels.len() {
        let shift = params.shift * n_levels[level] * b.ln();
        let mut row = vec![cap; a_grid.len()];
        for (i, &a) in a_grid.iter().enumerate() {
            let shifted = a - shift;
            if shifted < a_grid[0] {
                continue; // stays at the cap
            }
            let candidate = good_weight * interp(a_grid, &rows[level - 1], shifted)
                + bad_weight * interp(a_grid, &row, shifted);
            row[i] = candidate.min(cap);
        }
        rows.push(row);
    }
    Ok(BoundTable {
        a_grid: a_grid.to_vec(),
        n_levels,
        rows,
        params: params.clone(),
        cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_params() -> (RecursionParams, f64) {
        let (beta, c0) = feasible_exponents(10.0, 0.25, 0.5, 1.0).unwrap();
        (
            RecursionParams {
                subdivision: 10.0,
                hole_exponent: 0.25,
                delta: 0.5,
                shift: 1.0,
                small_a: c0,
            },
            beta,
        )
    }

    #[test]
    fn feasibility_at_the_reference_parameters() {
        let (params, beta) = default_params();
        assert!(params.sufficient_condition(beta) <= 1.0);
        assert!(beta > 0.0 && beta <= 0.375);
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        let (params, _) = default_params();
        // a huge decay rate blows up the first term
        assert!(params.sufficient_condition(50.0) > 1.0);
        let grid: Vec<f64> = (0..100).map(|i| 1.0 + i as f64).collect();
        assert!(recursive_bound_propagator(
            |a| (-0.375 * a).exp(),
            1.0,
            3,
            &grid,
            &params,
            50.0,
            1.0
        )
        .is_err());
    }

    #[test]
    fn base_row_is_unchanged() {
        let (params, beta) = default_params();
        let grid: Vec<f64> = (0..=400).map(|i| 1.0 + 0.5 * i as f64).collect();
        let table =
            recursive_bound_propagator(|a| (-beta * a).exp(), 1.0, 4, &grid, &params, beta, 1.0)
                .unwrap();
        for (i, &a) in grid.iter().enumerate() {
            assert_eq!(table.rows[0][i], (-beta * a).exp());
        }
        assert_eq!(table.n_levels, vec![1.0, 2.0, 4.0, 8.0, 16.0]);
    }

    #[test]
    fn one_step_matches_hand_evaluation() {
        let (params, beta) = default_params();
        let grid: Vec<f64> = (0..=400).map(|i| 1.0 + 0.5 * i as f64).collect();
        let table =
            recursive_bound_propagator(|a| (-beta * a).exp(), 1.0, 1, &grid, &params, beta, 1.0)
                .unwrap();
        let b = params.subdivision;
        let shift = params.shift * 2.0 * b.ln();
        // pick an interior entry and recompute the right-hand side by hand
        let i = 300;
        let a = grid[i];
        let shifted = a - shift;
        let hand = b.powf(1.0 - params.delta) * interp(&grid, &table.rows[0], shifted)
            + b.powf(-params.delta - params.hole_exponent) * interp(&grid, &table.rows[1], shifted);
        let got = table.rows[1][i];
        assert!(got == hand.min(1.0), "entry {got} vs hand-evaluated {hand}");
    }

    #[test]
    fn table_recursion_certificate() {
        let (params, beta) = default_params();
        let grid: Vec<f64> = (0..=400).map(|i| 1.0 + 0.5 * i as f64).collect();
        let table =
            recursive_bound_propagator(|a| (-beta * a).exp(), 1.0, 4, &grid, &params, beta, 1.0)
                .unwrap();
        let worst = table.verify_recursion();
        assert!(worst <= 1e-12, "worst recursion slack {worst}");
        let c = table.envelope_constant(beta);
        assert!(c.is_finite() && c >= 1.0);
        // the envelope really dominates
        for (level, row) in table.rows.iter().enumerate() {
            let n = table.n_levels[level];
            for (i, &m) in row.iter().enumerate() {
                assert!(m <= c * (-beta * grid[i] / n).exp() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let (params, beta) = default_params();
        let grid: Vec<f64> = (0..=20).map(|i| 1.0 + 10.0 * i as f64).collect();
        assert!(recursive_bound_propagator(
            |a| (-beta * a).exp(),
            1.0,
            2,
            &grid,
            &params,
            beta,
            1.0
        )
        .is_err());
    }
}
