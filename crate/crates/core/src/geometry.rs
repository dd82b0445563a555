//! Cubes, balls, dyadic subdivision, lattice point sets and the dyadic
//! Hausdorff-content estimator used by every experiment.
//!
//! Content conventions: a set is represented by the lattice nodes it
//! contains. A dyadic generation `g` splits the bounding cube into `2^g`
//! cells per axis; every node is assigned to exactly one cell (half-open
//! boxes, the last cell per axis closed), and a generation's cover is the
//! set of occupied cells, each charged the radius of its circumscribed
//! ball, `(side * sqrt(n) / 2)^d`. The estimate is the minimum over
//! generations; mixed-generation covers are deliberately not searched, so
//! the value is a reproducible upper estimate of the true content.

use crate::error::{Error, Result};

/// Axis-aligned closed cube described by its center and side length.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    center: Vec<f64>,
    side: f64,
}

impl Cube {
    pub fn new(center: Vec<f64>, side: f64) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "cube dimension must be at least 2, got {}",
                center.len()
            )));
        }
        if !(side > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cube side must be positive, got {side}"
            )));
        }
        Ok(Cube { center, side })
    }

    /// Unit cube centered at the origin.
    pub fn unit(dim: usize) -> Self {
        Cube::new(vec![0.0; dim], 1.0).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn diameter(&self) -> f64 {
        self.side * (self.dim() as f64).sqrt()
    }

    /// Concentric cube with side `t * s(Q)`.
    pub fn scale(&self, t: f64) -> Result<Cube> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {t}"
            )));
        }
        Ok(Cube {
            center: self.center.clone(),
            side: self.side * t,
        })
    }

    pub fn min_corner(&self) -> Vec<f64> {
        self.center.iter().map(|c| c - 0.5 * self.side).collect()
    }

    pub fn max_corner(&self) -> Vec<f64> {
        self.center.iter().map(|c| c + 0.5 * self.side).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        let half = 0.5 * self.side;
        x.iter()
            .zip(&self.center)
            .all(|(&xi, &ci)| (xi - ci).abs() <= half)
    }

    /// Splits into `b^n` equal closed subcubes tiling the cube.
    ///
    /// Order is row-major over the per-axis cell indices (first axis
    /// slowest) and deterministic.
    pub fn subdivide(&self, b: usize) -> Result<Vec<Cube>> {
        if b < 2 {
            return Err(Error::InvalidParameter(format!(
                "subdivision factor must be at least 2, got {b}"
            )));
        }
        let n = self.dim();
        let sub_side = self.side / b as f64;
        let min = self.min_corner();
        let total = b.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let center: Vec<f64> = (0..n)
                .map(|ax| min[ax] + (idx[ax] as f64 + 0.5) * sub_side)
                .collect();
            out.push(Cube {
                center,
                side: sub_side,
            });
            // row-major increment, last axis fastest
            for ax in (0..n).rev() {
                idx[ax] += 1;
                if idx[ax] < b {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Ok(out)
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Concentric ball with radius multiplied by `t`.
    pub fn scale(&self, t: f64) -> Result<Ball> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {t}"
            )));
        }
        Ok(Ball {
            center: self.center.clone(),
            radius: self.radius * t,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let mut d2 = 0.0;
        for (xi, ci) in x.iter().zip(&self.center) {
            d2 += (xi - ci) * (xi - ci);
        }
        d2 <= self.radius * self.radius
    }
}

/// Immutable boolean mask over a regular lattice.
///
/// Nodes per axis may differ; the spacing is uniform. Node `(j_1,..,j_n)`
/// sits at `center_i + (j_i - (k_i-1)/2) * h` and the mask is stored
/// row-major (first axis slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    shape: Vec<usize>,
    spacing: f64,
    center: Vec<f64>,
    mask: Vec<bool>,
}

impl PointSet {
    pub fn from_mask(
        shape: Vec<usize>,
        spacing: f64,
        center: Vec<f64>,
        mask: Vec<bool>,
    ) -> Result<Self> {
        if shape.len() != center.len() || shape.len() < 2 {
            return Err(Error::InvalidParameter(
                "point set needs matching shape/center of dimension >= 2".into(),
            ));
        }
        if shape.iter().any(|&k| k < 2) {
            return Err(Error::InvalidParameter(
                "point set needs at least 2 nodes per axis".into(),
            ));
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidParameter(
                "lattice spacing must be positive".into(),
            ));
        }
        let total: usize = shape.iter().product();
        if mask.len() != total {
            return Err(Error::InvalidParameter(format!(
                "mask length {} does not match lattice size {total}",
                mask.len()
            )));
        }
        Ok(PointSet {
            shape,
            spacing,
            center,
            mask,
        })
    }

    /// Masks the nodes of a vertex lattice over `cube` (`nodes_per_axis`
    /// per axis, boundary included) where `pred` holds.
    pub fn from_predicate<F: Fn(&[f64]) -> bool>(
        cube: &Cube,
        nodes_per_axis: usize,
        pred: F,
    ) -> Result<Self> {
        if nodes_per_axis < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 nodes per axis".into(),
            ));
        }
        let n = cube.dim();
        let shape = vec![nodes_per_axis; n];
        let spacing = cube.side() / (nodes_per_axis - 1) as f64;
        let total: usize = shape.iter().product();
        let mut mask = vec![false; total];
        let mut idx = vec![0usize; n];
        let mut pos = vec![0.0f64; n];
        let half = (nodes_per_axis - 1) as f64 / 2.0;
        for slot in mask.iter_mut() {
            for ax in 0..n {
                pos[ax] = cube.center()[ax] + (idx[ax] as f64 - half) * spacing;
            }
            *slot = pred(&pos);
            for ax in (0..n).rev() {
                idx[ax] += 1;
                if idx[ax] < nodes_per_axis {
                    break;
                }
                idx[ax] = 0;
            }
        }
        PointSet::from_mask(shape, spacing, cube.center().to_vec(), mask)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of masked nodes.
    pub fn node_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn total_nodes(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Smallest cube centered with the lattice covering every node.
    pub fn bounding_cube(&self) -> Cube {
        let side = self
            .shape
            .iter()
            .map(|&k| (k - 1) as f64 * self.spacing)
            .fold(0.0f64, f64::max);
        Cube::new(self.center.clone(), side).expect("positive side")
    }

    fn same_lattice(&self, other: &PointSet) -> bool {
        self.shape == other.shape
            && self.spacing == other.spacing
            && self
                .center
                .iter()
                .zip(&other.center)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * self.spacing)
    }

    /// Union of two masks on the same lattice.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if !self.same_lattice(other) {
            return Err(Error::InvalidParameter(
                "union requires identical lattices".into(),
            ));
        }
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(&a, &b)| a || b)
            .collect();
        PointSet::from_mask(self.shape.clone(), self.spacing, self.center.clone(), mask)
    }

    /// True if every masked node of `self` is masked in `other`.
    pub fn subset_of(&self, other: &PointSet) -> bool {
        self.same_lattice(other) && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn position_of(&self, flat: usize) -> Vec<f64> {
        let n = self.dim();
        let mut pos = vec![0.0; n];
        let mut rem = flat;
        for ax in (0..n).rev() {
            let j = rem % self.shape[ax];
            rem /= self.shape[ax];
            pos[ax] =
                self.center[ax] + (j as f64 - (self.shape[ax] - 1) as f64 / 2.0) * self.spacing;
        }
        pos
    }

    /// Positions of the masked nodes, in row-major index order.
    pub fn masked_positions(&self) -> Vec<Vec<f64>> {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| self.position_of(i))
            .collect()
    }

    /// Default dyadic cover depth: the generation whose cells match the
    /// lattice spacing; deeper covers cannot resolve below `h`.
    pub fn default_depth(&self) -> usize {
        let intervals = self.shape.iter().map(|&k| k - 1).max().unwrap_or(1);
        let mut d = 0usize;
        while (1usize << d) < intervals {
            d += 1;
        }
        d
    }
}

/// Homothety with coefficient `t`: positions, spacing and the bounding cube
/// all scale by `t`; the mask is unchanged.
pub fn scale_set(set: &PointSet, t: f64) -> Result<PointSet> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "homothety coefficient must be positive and finite, got {t}"
        )));
    }
    PointSet::from_mask(
        set.shape.to_vec(),
        set.spacing * t,
        set.center.iter().map(|c| c * t).collect(),
        set.mask.clone(),
    )
}

/// Dyadic upper estimate of the Hausdorff content of order `d`.
#[derive(Debug, Clone)]
pub struct ContentEstimate {
    pub order: f64,
    pub value: f64,
    /// Dyadic cubes of the winning generation that contain masked nodes.
    pub cover: Vec<Cube>,
    /// Generation that achieved the minimum (0 = bounding cube itself).
    pub depth: usize,
}

/// Per-axis dyadic cell index of a node at generation `g`.
#[inline]
fn cell_index(frac: f64, cells: usize) -> usize {
    let j = (frac * cells as f64).floor();
    if j < 0.0 {
        0
    } else {
        (j as usize).min(cells - 1)
    }
}

/// Occupied-cell count per generation for a mask; cells are addressed by
/// flat row-major keys into `marks`, which is cleared incrementally.
fn occupied_cells(set: &PointSet, g: usize, marks: &mut Vec<bool>, keys: &mut Vec<usize>) -> usize {
    let n = set.dim();
    let cells = 1usize << g;
    let total = cells.pow(n as u32);
    if marks.len() < total {
        marks.resize(total, false);
    }
    keys.clear();
    let bound = set.bounding_cube();
    let side = bound.side();
    let min = bound.min_corner();
    for (flat, _) in set.mask.iter().enumerate().filter(|(_, &m)| m) {
        let pos = set.position_of(flat);
        let mut key = 0usize;
        for ax in 0..n {
            let frac = (pos[ax] - min[ax]) / side;
            key = key * cells + cell_index(frac, cells);
        }
        if !marks[key] {
            marks[key] = true;
            keys.push(key);
        }
    }
    let count = keys.len();
    for &k in keys.iter() {
        marks[k] = false;
    }
    count
}

/// Minimum over dyadic generations `0..=max_depth` of the generation's
/// total `(circumscribed radius)^d`; an upper estimate of the Hausdorff
/// content of order `d`, monotone non-increasing in `max_depth`.
///
/// Ties between generations resolve to the coarsest one. An empty mask
/// yields value 0 with an empty cover.
pub fn hausdorff_content(set: &PointSet, d: f64, max_depth: usize) -> Result<ContentEstimate> {
    let n = set.dim();
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "content order must be positive, got {d}"
        )));
    }
    if d > n as f64 {
        return Err(Error::InvalidParameter(format!(
            "content order {d} exceeds the ambient dimension {n}"
        )));
    }
    if set.is_empty() {
        return Ok(ContentEstimate {
            order: d,
            value: 0.0,
            cover: Vec::new(),
            depth: 0,
        });
    }
    let bound = set.bounding_cube();
    let side = bound.side();
    let half_diag = (n as f64).sqrt() / 2.0;
    // Keep the flat cell table addressable.
    let mut depth_cap = max_depth;
    while depth_cap > 0 && (n as u32) * (depth_cap as u32) > 28 {
        depth_cap -= 1;
    }
    let mut marks: Vec<bool> = Vec::new();
    let mut keys: Vec<usize> = Vec::new();
    let mut best_g = 0usize;
    let mut best_total = f64::INFINITY;
    for g in 0..=depth_cap {
        let count = occupied_cells(set, g, &mut marks, &mut keys);
        let cell_side = side / (1usize << g) as f64;
        let weight = (cell_side * half_diag).powf(d);
        let total = count as f64 * weight;
        if total < best_total {
            best_total = total;
            best_g = g;
        }
    }
    // Rebuild the winning cover.
    let cells = 1usize << best_g;
    let cell_side = side / cells as f64;
    let min = bound.min_corner();
    occupied_cells(set, best_g, &mut marks, &mut keys);
    keys.sort_unstable();
    let cover = keys
        .iter()
        .map(|&key| {
            let mut rem = key;
            let mut center = vec![0.0; n];
            for ax in (0..n).rev() {
                let j = rem % cells;
                rem /= cells;
                center[ax] = min[ax] + (j as f64 + 0.5) * cell_side;
            }
            Cube::new(center, cell_side).expect("positive side")
        })
        .collect();
    Ok(ContentEstimate {
        order: d,
        value: best_total,
        cover,
        depth: best_g,
    })
}

/// Content estimate at the mask's default depth.
pub fn hausdorff_content_default(set: &PointSet, d: f64) -> Result<ContentEstimate> {
    hausdorff_content(set, d, set.default_depth())
}

// ---------------------------------------------------------------------------
// Mask file format: ASCII `mask n k1 .. kn h cx1 .. cxn` then 0/1 tokens
// row-major, whitespace separated.
// ---------------------------------------------------------------------------

pub fn write_mask(set: &PointSet) -> String {
    let mut out = String::from("mask");
    out.push_str(&format!(" {}", set.dim()));
    for k in set.shape() {
        out.push_str(&format!(" {k}"));
    }
    out.push_str(&format!(" {}", set.spacing()));
    for c in set.center() {
        out.push_str(&format!(" {c}"));
    }
    out.push('\n');
    let per_row = *set.shape().last().unwrap();
    for (i, &m) in set.mask().iter().enumerate() {
        out.push(if m { '1' } else { '0' });
        out.push(if (i + 1) % per_row == 0 { '\n' } else { ' ' });
    }
    out
}

pub fn read_mask(text: &str) -> Result<PointSet> {
    let mut tokens = text.split_whitespace();
    let magic = tokens
        .next()
        .ok_or_else(|| Error::Format("empty mask file".into()))?;
    if magic != "mask" {
        return Err(Error::Format(format!(
            "expected `mask` header, got `{magic}`"
        )));
    }
    let n: usize = next_parsed(&mut tokens, "dimension")?;
    let mut shape = Vec::with_capacity(n);
    for _ in 0..n {
        shape.push(next_parsed(&mut tokens, "nodes per axis")?);
    }
    let spacing: f64 = next_parsed(&mut tokens, "spacing")?;
    let mut center = Vec::with_capacity(n);
    for _ in 0..n {
        center.push(next_parsed(&mut tokens, "center coordinate")?);
    }
    let total: usize = shape.iter().product();
    let mut mask = Vec::with_capacity(total);
    for _ in 0..total {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::Format("mask data truncated".into()))?;
        match tok {
            "0" => mask.push(false),
            "1" => mask.push(true),
            other => return Err(Error::Format(format!("expected 0/1 token, got `{other}`"))),
        }
    }
    if tokens.next().is_some() {
        return Err(Error::Format("trailing tokens after mask data".into()));
    }
    PointSet::from_mask(shape, spacing, center, mask)
}

pub(crate) fn next_parsed<'a, T: std::str::FromStr>(
    tokens: &mut impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<T> {
    let tok = tokens
        .next()
        .ok_or_else(|| Error::Format(format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::Format(format!("bad {what}: `{tok}`")))
}
