//! Coefficient fields of the uniformly elliptic class and closed-form
//! reference solutions used as oracles by the measurement modules.
//!
//! Every evaluator here is pure; suprema over balls and cubes are computed
//! per variant, reducing to one-dimensional boundary scans (the reference
//! solutions are harmonic, so |u| attains its maximum on the boundary of
//! any compact set).

use crate::error::{Error, Result};
use crate::fit::{scan_max, scan_max_periodic};
use crate::geometry::{Ball, Cube};

/// Scalar field on a box-shaped domain, the common interface of analytic
/// solutions, their gradient magnitudes and sampled grid functions.
pub trait ScalarField {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Supremum of |f| over a closed ball.
    fn sup_abs_ball(&self, ball: &Ball) -> f64;
    /// Supremum of |f| over a closed cube.
    fn sup_abs_cube(&self, cube: &Cube) -> f64;
    /// Infimum of |f| over a closed cube.
    fn inf_abs_cube(&self, cube: &Cube) -> f64;
    /// Box the field is defined on; `None` means all of R^n.
    fn domain(&self) -> Option<Cube> {
        None
    }
    /// Smallest length scale the field resolves (the lattice spacing for
    /// sampled fields); suprema over balls below this scale are
    /// unreliable.
    fn resolution(&self) -> Option<f64> {
        None
    }
}

// ---------------------------------------------------------------------------
// Coefficient fields
// ---------------------------------------------------------------------------

/// Built-in symmetric uniformly elliptic coefficient families with declared
/// ellipticity constant Λ₁ and entrywise Lipschitz constant Λ₂.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientField {
    Identity {
        dim: usize,
    },
    /// Constant diagonal matrix.
    Diagonal {
        entries: Vec<f64>,
    },
    /// `(1 + eps * sin(x_1)) * I`.
    ScalarPerturbation {
        dim: usize,
        eps: f64,
    },
    /// Constant `R(angle) diag(d1, d2) R(angle)^T` in the (x1, x2)-plane,
    /// identity on the remaining axes.
    Rotated {
        dim: usize,
        d1: f64,
        d2: f64,
        angle: f64,
    },
}

impl CoefficientField {
    pub fn identity(dim: usize) -> Self {
        CoefficientField::Identity { dim }
    }

    pub fn diagonal(entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::BadCoefficient(
                "diagonal entries must be positive".into(),
            ));
        }
        Ok(CoefficientField::Diagonal { entries })
    }

    pub fn scalar_perturbation(dim: usize, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::BadCoefficient(format!(
                "perturbation amplitude must lie in [0, 1), got {eps}"
            )));
        }
        Ok(CoefficientField::ScalarPerturbation { dim, eps })
    }

    pub fn rotated(dim: usize, d1: f64, d2: f64, angle: f64) -> Result<Self> {
        if !(d1 > 0.0) || !(d2 > 0.0) {
            return Err(Error::BadCoefficient(
                "rotated diagonal entries must be positive".into(),
            ));
        }
        Ok(CoefficientField::Rotated { dim, d1, d2, angle })
    }

    pub fn dim(&self) -> usize {
        match self {
            CoefficientField::Identity { dim } => *dim,
            CoefficientField::Diagonal { entries } => entries.len(),
            CoefficientField::ScalarPerturbation { dim, .. } => *dim,
            CoefficientField::Rotated { dim, .. } => *dim,
        }
    }

    /// Matrix A(x), row-major n*n.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut m = vec![0.0; n * n];
        match self {
            CoefficientField::Identity { .. } => {
                for i in 0..n {
                    m[i * n + i] = 1.0;
                }
            }
            CoefficientField::Diagonal { entries } => {
                for i in 0..n {
                    m[i * n + i] = entries[i];
                }
            }
            CoefficientField::ScalarPerturbation { eps, .. } => {
                let s = 1.0 + eps * x[0].sin();
                for i in 0..n {
                    m[i * n + i] = s;
                }
            }
            CoefficientField::Rotated { d1, d2, angle, .. } => {
                let (s, c) = angle.sin_cos();
                m[0] = c * c * d1 + s * s * d2;
                m[1] = s * c * (d1 - d2);
                m[n] = m[1];
                m[n + 1] = s * s * d1 + c * c * d2;
                for i in 2..n {
                    m[i * n + i] = 1.0;
                }
            }
        }
        m
    }

    /// Declared ellipticity constant Λ₁ (so Λ₁⁻¹|ζ|² ≤ ⟨Aζ,ζ⟩ ≤ Λ₁|ζ|²).
    pub fn lambda1(&self) -> f64 {
        match self {
            CoefficientField::Identity { .. } => 1.0,
            CoefficientField::Diagonal { entries } => {
                entries.iter().map(|&d| d.max(1.0 / d)).fold(1.0, f64::max)
            }
            CoefficientField::ScalarPerturbation { eps, .. } => 1.0 / (1.0 - eps),
            CoefficientField::Rotated { d1, d2, .. } => [*d1, *d2, 1.0 / d1, 1.0 / d2]
                .into_iter()
                .fold(1.0, f64::max),
        }
    }

    /// Declared entrywise Lipschitz constant Λ₂.
    pub fn lambda2(&self) -> f64 {
        match self {
            CoefficientField::ScalarPerturbation { eps, .. } => *eps,
            _ => 0.0,
        }
    }

    /// Whether every off-diagonal entry vanishes identically (the
    /// discretization is then an M-matrix and the discrete maximum
    /// principle is guaranteed).
    pub fn is_diagonal(&self) -> bool {
        !matches!(self, CoefficientField::Rotated { angle, d1, d2, .. }
            if angle.sin() * angle.cos() * (d1 - d2) != 0.0)
    }
}

/// Largest and smallest eigenvalue of a symmetric matrix by cyclic Jacobi
/// rotations; n is tiny here so a fixed sweep budget is plenty.
fn symmetric_eigen_range(mat: &[f64], n: usize) -> (f64, f64) {
    let mut a = mat.to_vec();
    for _ in 0..32 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.min(a[i * n + i]);
        hi = hi.max(a[i * n + i]);
    }
    (lo, hi)
}

/// Sampled estimates of (Λ₁, Λ₂): eigenvalue bounds over all samples and
/// entrywise difference quotients over consecutive sample pairs.
///
/// The Lipschitz estimate is a lower estimate of the true constant; it can
/// only approach Λ₂ when the sample list contains close, well-aligned
/// pairs. Fails on any sample that is not symmetric to 1e-12 or has a
/// non-positive eigenvalue.
pub fn check_ellipticity(a: &CoefficientField, samples: &[Vec<f64>]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("empty sample list".into()));
    }
    let n = a.dim();
    let mut lambda1_est: f64 = 1.0;
    let mut mats = Vec::with_capacity(samples.len());
    for x in samples {
        let m = a.evaluate(x);
        let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for p in 0..n {
            for q in (p + 1)..n {
                if (m[p * n + q] - m[q * n + p]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::BadCoefficient(format!(
                        "asymmetric sample at entry ({p},{q})"
                    )));
                }
            }
        }
        let (lo, hi) = symmetric_eigen_range(&m, n);
        if !(lo > 0.0) {
            return Err(Error::BadCoefficient(format!(
                "non-positive eigenvalue {lo}"
            )));
        }
        lambda1_est = lambda1_est.max(hi).max(1.0 / lo);
        mats.push(m);
    }
    let mut lambda2_est: f64 = 0.0;
    for w in samples.windows(2) {
        let dist: f64 = w[0]
            .iter()
            .zip(&w[1])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if dist < 1e-14 {
            continue;
        }
        let i = samples.iter().position(|s| std::ptr::eq(s, &w[0])).unwrap();
        let (ma, mb) = (&mats[i], &mats[i + 1]);
        for e in 0..n * n {
            lambda2_est = lambda2_est.max((ma[e] - mb[e]).abs() / dist);
        }
    }
    Ok((lambda1_est, lambda2_est))
}

// ---------------------------------------------------------------------------
// Analytic reference solutions
// ---------------------------------------------------------------------------

/// (re + i*im)^k by repeated multiplication.
fn cpow(re: f64, im: f64, k: u32) -> (f64, f64) {
    let mut ar = 1.0;
    let mut ai = 0.0;
    for _ in 0..k {
        let nr = ar * re - ai * im;
        let ni = ar * im + ai * re;
        ar = nr;
        ai = ni;
    }
    (ar, ai)
}

/// Closed-form solutions of `div(A grad u) = 0` (for A = I, harmonic
/// functions), with exact gradients.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSolution {
    Constant {
        dim: usize,
        value: f64,
    },
    /// `Re` or `Im` of `((x_p - c_p) + i (x_q - c_q))^k`, extended
    /// constantly in the remaining coordinates. Homogeneous of degree k
    /// about its center.
    HarmonicPoly {
        dim: usize,
        degree: u32,
        pair: (usize, usize),
        imaginary: bool,
        center: Vec<f64>,
    },
    /// `cos(2π m·x) e^{√λ t}` on R^{n+1} with λ = 4π²|m|²; the harmonic
    /// lift of a torus eigenfunction, the last coordinate is t.
    TorusLift {
        base_dim: usize,
        freqs: Vec<i64>,
    },
}

/// Homogeneous harmonic polynomial of degree `k` in n ≥ 2 variables.
///
/// Variants enumerate the coordinate pair and the real/imaginary part;
/// degree 0 is the constant 1 for every variant.
pub fn harmonic_polynomial(dim: usize, degree: u32, variant: usize) -> Result<AnalyticSolution> {
    if dim < 2 {
        return Err(Error::InvalidParameter(
            "harmonic polynomials need dimension >= 2".into(),
        ));
    }
    if degree == 0 {
        return Ok(AnalyticSolution::Constant { dim, value: 1.0 });
    }
    let mut pairs = Vec::new();
    for p in 0..dim {
        for q in (p + 1)..dim {
            pairs.push((p, q));
        }
    }
    let pair = pairs[(variant / 2) % pairs.len()];
    Ok(AnalyticSolution::HarmonicPoly {
        dim,
        degree,
        pair,
        imaginary: variant % 2 == 1,
        center: vec![0.0; dim],
    })
}

/// Number of distinct variants served by `harmonic_polynomial` per degree.
pub fn harmonic_variant_count(dim: usize) -> usize {
    dim * (dim - 1)
}

impl AnalyticSolution {
    pub fn constant(dim: usize, value: f64) -> Self {
        AnalyticSolution::Constant { dim, value }
    }

    /// Same polynomial translated so it is homogeneous about `center`.
    pub fn with_center(self, center: Vec<f64>) -> Result<Self> {
        match self {
            AnalyticSolution::HarmonicPoly {
                dim,
                degree,
                pair,
                imaginary,
                ..
            } => {
                if center.len() != dim {
                    return Err(Error::InvalidParameter("center dimension mismatch".into()));
                }
                Ok(AnalyticSolution::HarmonicPoly {
                    dim,
                    degree,
                    pair,
                    imaginary,
                    center,
                })
            }
            other => Ok(other),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AnalyticSolution::Constant { value, .. } => format!("constant {value}"),
            AnalyticSolution::HarmonicPoly {
                dim,
                degree,
                pair,
                imaginary,
                ..
            } => format!(
                "harmonic polynomial n={dim} k={degree} {}({},{})",
                if *imaginary { "im" } else { "re" },
                pair.0,
                pair.1
            ),
            AnalyticSolution::TorusLift { freqs, .. } => {
                format!("torus lift m={freqs:?}")
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            AnalyticSolution::Constant { dim, .. } => vec![0.0; *dim],
            AnalyticSolution::HarmonicPoly {
                dim,
                degree,
                pair,
                imaginary,
                center,
            } => {
                let mut g = vec![0.0; *dim];
                if *degree == 0 {
                    return g;
                }
                let w_re = x[pair.0] - center[pair.0];
                let w_im = x[pair.1] - center[pair.1];
                let (dr, di) = cpow(w_re, w_im, degree - 1);
                let k = *degree as f64;
                if *imaginary {
                    g[pair.0] = k * di;
                    g[pair.1] = k * dr;
                } else {
                    g[pair.0] = k * dr;
                    g[pair.1] = -k * di;
                }
                g
            }
            AnalyticSolution::TorusLift { base_dim, freqs } => {
                let sqrt_lambda = self.lift_rate();
                let s: f64 = freqs
                    .iter()
                    .zip(x.iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                let t = x[*base_dim];
                let growth = (sqrt_lambda * t).exp();
                let mut g = vec![0.0; base_dim + 1];
                let phase = std::f64::consts::TAU * s;
                for i in 0..*base_dim {
                    g[i] = -std::f64::consts::TAU * freqs[i] as f64 * phase.sin() * growth;
                }
                g[*base_dim] = sqrt_lambda * phase.cos() * growth;
                g
            }
        }
    }

    /// √λ of the lifted eigenfunction (0 for the other variants).
    pub fn lift_rate(&self) -> f64 {
        match self {
            AnalyticSolution::TorusLift { freqs, .. } => {
                let norm2: f64 = freqs.iter().map(|&m| (m * m) as f64).sum();
                std::f64::consts::TAU * norm2.sqrt()
            }
            _ => 0.0,
        }
    }

    /// |grad| as a measurable field of its own.
    pub fn gradient_magnitude(&self) -> GradientMagnitude<'_> {
        GradientMagnitude(self)
    }

    fn rect_in_plane(&self, cube: &Cube, pair: (usize, usize), center: &[f64]) -> [f64; 4] {
        let lo = cube.min_corner();
        let hi = cube.max_corner();
        [
            lo[pair.0] - center[pair.0],
            hi[pair.0] - center[pair.0],
            lo[pair.1] - center[pair.1],
            hi[pair.1] - center[pair.1],
        ]
    }
}

const SCAN_COARSE: usize = 512;

/// Max of |Re or Im(w^k)| on the circle of radius r about (w0r, w0i).
fn harmonic_circle_max(w0r: f64, w0i: f64, r: f64, k: u32, imag: bool) -> f64 {
    let eval = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let (re, im) = cpow(w0r + r * c, w0i + r * s, k);
        if imag {
            im.abs()
        } else {
            re.abs()
        }
    };
    scan_max_periodic(eval, SCAN_COARSE.max(64 * k as usize)).1
}

/// Max of |Re or Im(w^k)| along a segment in the plane.
fn harmonic_segment_max(a: (f64, f64), b: (f64, f64), k: u32, imag: bool) -> f64 {
    let eval = |t: f64| {
        let re = a.0 + t * (b.0 - a.0);
        let im = a.1 + t * (b.1 - a.1);
        let (vr, vi) = cpow(re, im, k);
        if imag {
            vi.abs()
        } else {
            vr.abs()
        }
    };
    scan_max(eval, 0.0, 1.0, SCAN_COARSE.max(64 * k as usize)).1
}

/// Extremum of |Re or Im(w^k)| over the boundary of the rectangle
/// [xlo,xhi]x[ylo,yhi]; `maximize` picks max or min.
fn harmonic_rect_boundary(rect: [f64; 4], k: u32, imag: bool, maximize: bool) -> f64 {
    let [xlo, xhi, ylo, yhi] = rect;
    let corners = [
        ((xlo, ylo), (xhi, ylo)),
        ((xhi, ylo), (xhi, yhi)),
        ((xhi, yhi), (xlo, yhi)),
        ((xlo, yhi), (xlo, ylo)),
    ];
    let mut best = if maximize {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    for (a, b) in corners {
        let v = if maximize {
            harmonic_segment_max(a, b, k, imag)
        } else {
            // min |f| = -max(-|f|)
            -scan_max(
                |t| {
                    let re = a.0 + t * (b.0 - a.0);
                    let im = a.1 + t * (b.1 - a.1);
                    let (vr, vi) = cpow(re, im, k);
                    -(if imag { vi.abs() } else { vr.abs() })
                },
                0.0,
                1.0,
                SCAN_COARSE.max(64 * k as usize),
            )
            .1
        };
        best = if maximize { best.max(v) } else { best.min(v) };
    }
    best
}

/// Does Re/Im(w^k) change sign on the rectangle? Sampled on a lattice; the
/// zero set is a union of k lines through the origin so a 65x65 scan is
/// reliable away from degenerate hairline cases.
fn harmonic_rect_sign_change(rect: [f64; 4], k: u32, imag: bool) -> bool {
    let [xlo, xhi, ylo, yhi] = rect;
    let m = 64;
    let mut saw_pos = false;
    let mut saw_neg = false;
    for i in 0..=m {
        for j in 0..=m {
            let re = xlo + (xhi - xlo) * i as f64 / m as f64;
            let im = ylo + (yhi - ylo) * j as f64 / m as f64;
            let (vr, vi) = cpow(re, im, k);
            let v = if imag { vi } else { vr };
            saw_pos |= v > 0.0;
            saw_neg |= v < 0.0;
            if saw_pos && saw_neg {
                return true;
            }
        }
    }
    false
}

/// Max of |cos(2πs)| for s in [lo, hi] (closed form: 1 when the interval
/// contains a half-integer, else the larger endpoint value).
fn cos_interval_max(lo: f64, hi: f64) -> f64 {
    let first = (2.0 * lo).ceil();
    if first <= 2.0 * hi {
        return 1.0;
    }
    (std::f64::consts::TAU * lo)
        .cos()
        .abs()
        .max((std::f64::consts::TAU * hi).cos().abs())
}

/// Min of |cos(2πs)| for s in [lo, hi] (0 when the interval contains an
/// odd multiple of 1/4).
fn cos_interval_min(lo: f64, hi: f64) -> f64 {
    let mut m = (4.0 * lo).ceil();
    while m <= 4.0 * hi {
        if (m as i64).rem_euclid(2) == 1 {
            return 0.0;
        }
        m += 1.0;
    }
    (std::f64::consts::TAU * lo)
        .cos()
        .abs()
        .min((std::f64::consts::TAU * hi).cos().abs())
}

impl ScalarField for AnalyticSolution {
    fn dim(&self) -> usize {
        match self {
            AnalyticSolution::Constant { dim, .. } => *dim,
            AnalyticSolution::HarmonicPoly { dim, .. } => *dim,
            AnalyticSolution::TorusLift { base_dim, .. } => base_dim + 1,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            AnalyticSolution::Constant { value, .. } => *value,
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                imaginary,
                center,
                ..
            } => {
                let (re, im) = cpow(
                    x[pair.0] - center[pair.0],
                    x[pair.1] - center[pair.1],
                    *degree,
                );
                if *imaginary {
                    im
                } else {
                    re
                }
            }
            AnalyticSolution::TorusLift { base_dim, freqs } => {
                let s: f64 = freqs
                    .iter()
                    .zip(x.iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                (std::f64::consts::TAU * s).cos() * (self.lift_rate() * x[*base_dim]).exp()
            }
        }
    }

    fn sup_abs_ball(&self, ball: &Ball) -> f64 {
        match self {
            AnalyticSolution::Constant { value, .. } => value.abs(),
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                imaginary,
                center,
                ..
            } => harmonic_circle_max(
                ball.center()[pair.0] - center[pair.0],
                ball.center()[pair.1] - center[pair.1],
                ball.radius(),
                *degree,
                *imaginary,
            ),
            AnalyticSolution::TorusLift { base_dim, freqs } => {
                // |u| depends on (m·x, t) only; over the ball that pair
                // ranges over a disc, and u is harmonic in the rescaled
                // disc coordinates, so the max sits on the circle.
                let norm: f64 = freqs.iter().map(|&m| (m * m) as f64).sum::<f64>().sqrt();
                let s0: f64 = freqs
                    .iter()
                    .zip(ball.center().iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                let t0 = ball.center()[*base_dim];
                let rate = self.lift_rate();
                let r = ball.radius();
                scan_max_periodic(
                    |phi| {
                        let (sp, cp) = phi.sin_cos();
                        let s = s0 + norm * r * sp;
                        let t = t0 + r * cp;
                        (std::f64::consts::TAU * s).cos().abs() * (rate * t).exp()
                    },
                    SCAN_COARSE.max(64 * (norm.ceil() as usize + 1)),
                )
                .1
            }
        }
    }

    fn sup_abs_cube(&self, cube: &Cube) -> f64 {
        match self {
            AnalyticSolution::Constant { value, .. } => value.abs(),
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                imaginary,
                center,
                ..
            } => {
                let rect = self.rect_in_plane(cube, *pair, center);
                harmonic_rect_boundary(rect, *degree, *imaginary, true)
            }
            AnalyticSolution::TorusLift { base_dim, freqs } => {
                let hi = cube.max_corner();
                let s0: f64 = freqs
                    .iter()
                    .zip(cube.center().iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                let span: f64 =
                    freqs.iter().map(|&m| m.unsigned_abs() as f64).sum::<f64>() * 0.5 * cube.side();
                cos_interval_max(s0 - span, s0 + span) * (self.lift_rate() * hi[*base_dim]).exp()
            }
        }
    }

    fn inf_abs_cube(&self, cube: &Cube) -> f64 {
        match self {
            AnalyticSolution::Constant { value, .. } => value.abs(),
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                imaginary,
                center,
                ..
            } => {
                let rect = self.rect_in_plane(cube, *pair, center);
                if harmonic_rect_sign_change(rect, *degree, *imaginary) {
                    return 0.0;
                }
                // one-signed harmonic: |u| attains its minimum on the boundary
                harmonic_rect_boundary(rect, *degree, *imaginary, false)
            }
            AnalyticSolution::TorusLift { base_dim, freqs } => {
                let lo = cube.min_corner();
                let s0: f64 = freqs
                    .iter()
                    .zip(cube.center().iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                let span: f64 =
                    freqs.iter().map(|&m| m.unsigned_abs() as f64).sum::<f64>() * 0.5 * cube.side();
                cos_interval_min(s0 - span, s0 + span) * (self.lift_rate() * lo[*base_dim]).exp()
            }
        }
    }
}

/// |grad u| of an analytic solution, with closed-form extrema: for the
/// harmonic pair polynomials |grad| = k |w|^{k-1} is radial in its plane,
/// for the torus lift |grad| = √λ e^{√λ t}.
#[derive(Debug, Clone)]
pub struct GradientMagnitude<'a>(pub &'a AnalyticSolution);

impl GradientMagnitude<'_> {
    /// In-plane distance from the polynomial's axis to the nearest /
    /// farthest point of the cube's (p,q)-rectangle.
    fn rect_radial_range(rect: [f64; 4]) -> (f64, f64) {
        let [xlo, xhi, ylo, yhi] = rect;
        let nearest = |lo: f64, hi: f64| {
            if lo > 0.0 {
                lo
            } else if hi < 0.0 {
                -hi
            } else {
                0.0
            }
        };
        let near = nearest(xlo, xhi).hypot(nearest(ylo, yhi));
        let far = xlo.abs().max(xhi.abs()).hypot(ylo.abs().max(yhi.abs()));
        (near, far)
    }
}

impl ScalarField for GradientMagnitude<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.0.gradient(x).iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    fn sup_abs_ball(&self, ball: &Ball) -> f64 {
        match self.0 {
            AnalyticSolution::Constant { .. } => 0.0,
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                center,
                ..
            } => {
                if *degree == 0 {
                    return 0.0;
                }
                let rho0 = (ball.center()[pair.0] - center[pair.0])
                    .hypot(ball.center()[pair.1] - center[pair.1]);
                let k = *degree as f64;
                k * (rho0 + ball.radius()).powi(*degree as i32 - 1)
            }
            AnalyticSolution::TorusLift { base_dim, .. } => {
                let rate = self.0.lift_rate();
                rate * (rate * (ball.center()[*base_dim] + ball.radius())).exp()
            }
        }
    }

    fn sup_abs_cube(&self, cube: &Cube) -> f64 {
        match self.0 {
            AnalyticSolution::Constant { .. } => 0.0,
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                center,
                ..
            } => {
                if *degree == 0 {
                    return 0.0;
                }
                let rect = self.0.rect_in_plane(cube, *pair, center);
                let (_, far) = Self::rect_radial_range(rect);
                *degree as f64 * far.powi(*degree as i32 - 1)
            }
            AnalyticSolution::TorusLift { base_dim, .. } => {
                let rate = self.0.lift_rate();
                rate * (rate * cube.max_corner()[*base_dim]).exp()
            }
        }
    }

    fn inf_abs_cube(&self, cube: &Cube) -> f64 {
        match self.0 {
            AnalyticSolution::Constant { .. } => 0.0,
            AnalyticSolution::HarmonicPoly {
                degree,
                pair,
                center,
                ..
            } => {
                if *degree == 0 {
                    return 0.0;
                }
                let rect = self.0.rect_in_plane(cube, *pair, center);
                let (near, _) = Self::rect_radial_range(rect);
                *degree as f64 * near.powi(*degree as i32 - 1)
            }
            AnalyticSolution::TorusLift { base_dim, .. } => {
                let rate = self.0.lift_rate();
                rate * (rate * cube.min_corner()[*base_dim]).exp()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Eigenfunctions on the flat torus and the round sphere
// ---------------------------------------------------------------------------

/// Closed-form Laplace eigenfunctions on the flat torus T^n = R^n/Z^n or
/// the round sphere S².
#[derive(Debug, Clone, PartialEq)]
pub enum Eigenfunction {
    /// cos(2π m·x); eigenvalue 4π²|m|².
    TorusCosine { freqs: Vec<i64> },
    /// Restriction of Re(x+iy)^k to the unit sphere; eigenvalue k(k+1).
    /// In colatitude θ and azimuth φ the value is sin^k(θ) cos(kφ).
    SphericalSectoral { degree: u32 },
}

/// The spherical harmonic Re(x+iy)^k on S², which concentrates near the
/// equator as the degree grows.
pub fn concentrating_spherical_harmonic(degree: u32) -> Result<Eigenfunction> {
    if degree == 0 {
        return Err(Error::InvalidParameter(
            "concentration needs degree >= 1".into(),
        ));
    }
    Ok(Eigenfunction::SphericalSectoral { degree })
}

/// Region of the manifold over which eigenfunction suprema are taken.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenRegion {
    /// Sphere: polar cap of the given colatitude.
    PolarCap { colatitude: f64 },
    /// Torus: metric ball.
    TorusBall { center: Vec<f64>, radius: f64 },
    /// The entire manifold.
    Whole,
}

impl Eigenfunction {
    pub fn eigenvalue(&self) -> f64 {
        match self {
            Eigenfunction::TorusCosine { freqs } => {
                let norm2: f64 = freqs.iter().map(|&m| (m * m) as f64).sum();
                std::f64::consts::TAU * std::f64::consts::TAU * norm2
            }
            Eigenfunction::SphericalSectoral { degree } => {
                (*degree as f64) * (*degree as f64 + 1.0)
            }
        }
    }

    /// Torus value at a point of R^n (periodic).
    pub fn value_torus(&self, x: &[f64]) -> Result<f64> {
        match self {
            Eigenfunction::TorusCosine { freqs } => {
                let s: f64 = freqs
                    .iter()
                    .zip(x.iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                Ok((std::f64::consts::TAU * s).cos())
            }
            _ => Err(Error::InvalidParameter("not a torus eigenfunction".into())),
        }
    }

    /// Sphere value at colatitude θ ∈ [0, π], azimuth φ.
    pub fn value_sphere(&self, colatitude: f64, azimuth: f64) -> Result<f64> {
        match self {
            Eigenfunction::SphericalSectoral { degree } => {
                let k = *degree;
                Ok(colatitude.sin().powi(k as i32) * (k as f64 * azimuth).cos())
            }
            _ => Err(Error::InvalidParameter("not a sphere eigenfunction".into())),
        }
    }

    /// sup |φ| over the whole manifold: 1 for every member of both
    /// families (the constant mode included).
    pub fn sup_abs_global(&self) -> f64 {
        1.0
    }

    /// sup |φ| over a region, in closed form.
    pub fn sup_abs_region(&self, region: &EigenRegion) -> Result<f64> {
        match (self, region) {
            (_, EigenRegion::Whole) => Ok(self.sup_abs_global()),
            (Eigenfunction::SphericalSectoral { degree }, EigenRegion::PolarCap { colatitude }) => {
                if !(*colatitude > 0.0) || *colatitude > std::f64::consts::PI {
                    return Err(Error::InvalidParameter(
                        "cap colatitude must lie in (0, π]".into(),
                    ));
                }
                // every azimuth occurs inside the cap, so the azimuthal
                // factor contributes its maximum 1
                let theta = colatitude.min(std::f64::consts::FRAC_PI_2);
                Ok(theta.sin().powi(*degree as i32))
            }
            (Eigenfunction::TorusCosine { freqs }, EigenRegion::TorusBall { center, radius }) => {
                let norm: f64 = freqs.iter().map(|&m| (m * m) as f64).sum::<f64>().sqrt();
                let s0: f64 = freqs
                    .iter()
                    .zip(center.iter())
                    .map(|(&m, &xi)| m as f64 * xi)
                    .sum();
                Ok(cos_interval_max(s0 - norm * radius, s0 + norm * radius))
            }
            _ => Err(Error::InvalidParameter(
                "region does not match the eigenfunction's manifold".into(),
            )),
        }
    }
}

/// Harmonic lift `u(x,t) = φ(x) e^{√λ t}` onto the product with a line.
///
/// Only the torus family lifts to a field evaluable on a flat lattice;
/// sphere quantities are measured in closed form on the sphere itself.
pub fn eigenfunction_lift(phi: &Eigenfunction) -> Result<AnalyticSolution> {
    match phi {
        Eigenfunction::TorusCosine { freqs } => Ok(AnalyticSolution::TorusLift {
            base_dim: freqs.len(),
            freqs: freqs.clone(),
        }),
        Eigenfunction::SphericalSectoral { .. } => Err(Error::InvalidParameter(
            "sphere eigenfunctions are evaluated in closed form, not lifted onto a lattice".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Registry: string-addressed fields for experiment configs
// ---------------------------------------------------------------------------

fn parse_kv(spec: &str) -> Result<(&str, Vec<(String, String)>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n, r),
        None => (spec, ""),
    };
    let mut kv = Vec::new();
    if !rest.is_empty() {
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad field option `{part}`")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok((name, kv))
}

fn kv_get<T: std::str::FromStr>(kv: &[(String, String)], key: &str) -> Result<Option<T>> {
    for (k, v) in kv {
        if k == key {
            return v
                .parse()
                .map(Some)
                .map_err(|_| Error::Format(format!("bad value for `{key}`: `{v}`")));
        }
    }
    Ok(None)
}

/// Parses a field spec like `harmonic_poly:n=2,k=3` or `affine` or
/// `torus_lift:n=2,m1=1,m2=0` or `constant:n=2,v=7`.
pub fn parse_field(spec: &str) -> Result<AnalyticSolution> {
    let (name, kv) = parse_kv(spec)?;
    match name {
        "affine" => {
            let n = kv_get(&kv, "n")?.unwrap_or(2);
            harmonic_polynomial(n, 1, 0)
        }
        "harmonic_poly" => {
            let n = kv_get(&kv, "n")?.unwrap_or(2);
            let k: u32 = kv_get(&kv, "k")?.unwrap_or(1);
            let variant = kv_get(&kv, "variant")?.unwrap_or(0);
            harmonic_polynomial(n, k, variant)
        }
        "constant" => {
            let n = kv_get(&kv, "n")?.unwrap_or(2);
            let v = kv_get(&kv, "v")?.unwrap_or(1.0);
            Ok(AnalyticSolution::constant(n, v))
        }
        "torus_lift" => {
            let n: usize = kv_get(&kv, "n")?.unwrap_or(1);
            let mut freqs = Vec::with_capacity(n);
            for i in 1..=n {
                freqs.push(kv_get(&kv, &format!("m{i}"))?.unwrap_or(0i64));
            }
            Ok(AnalyticSolution::TorusLift { base_dim: n, freqs })
        }
        other => Err(Error::Format(format!("unknown field `{other}`"))),
    }
}

/// Parses a coefficient spec like `identity:n=2`, `diag:n=2,d1=2,d2=0.5`,
/// `perturb:n=2,eps=0.1` or `rotated:n=2,d1=2,d2=1,angle=0.5236`.
pub fn parse_coefficient(spec: &str) -> Result<CoefficientField> {
    let (name, kv) = parse_kv(spec)?;
    match name {
        "identity" => {
            let n = kv_get(&kv, "n")?.unwrap_or(2);
            Ok(CoefficientField::identity(n))
        }
        "diag" => {
            let n: usize = kv_get(&kv, "n")?.unwrap_or(2);
            let mut entries = Vec::with_capacity(n);
            for i in 1..=n {
                entries.push(kv_get(&kv, &format!("d{i}"))?.unwrap_or(1.0));
            }
            CoefficientField::diagonal(entries)
        }
        "perturb" => {
            let n = kv_get(&kv, "n")?.unwrap_or(2);
            let eps = kv_get(&kv, "eps")?.unwrap_or(0.1);
            CoefficientField::scalar_perturbation(n, eps)
        }
        "rotated" => {
            let n = kv_get(&kv, "n")?.unwrap_or(2);
            let d1 = kv_get(&kv, "d1")?.unwrap_or(2.0);
            let d2 = kv_get(&kv, "d2")?.unwrap_or(1.0);
            let angle = kv_get(&kv, "angle")?.unwrap_or(std::f64::consts::FRAC_PI_6);
            CoefficientField::rotated(n, d1, d2, angle)
        }
        other => Err(Error::Format(format!(
            "unknown coefficient field `{other}`"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    /// Second-difference Laplacian, the oracle for "this really solves the
    /// equation".
    fn fd_laplacian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> f64 {
        let mut acc = 0.0;
        let center = f(x);
        let mut y = x.to_vec();
        for ax in 0..x.len() {
            y[ax] = x[ax] + h;
            let plus = f(&y);
            y[ax] = x[ax] - h;
            let minus = f(&y);
            y[ax] = x[ax];
            acc += (plus - 2.0 * center + minus) / (h * h);
        }
        acc
    }

    #[test]
    fn identity_ellipticity() {
        let a = CoefficientField::identity(2);
        let samples = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-0.3, 0.7]];
        let (l1, l2) = check_ellipticity(&a, &samples).unwrap();
        assert!((l1 - 1.0).abs() < 1e-12);
        assert_eq!(l2, 0.0);
    }

    #[test]
    fn diagonal_ellipticity() {
        let a = CoefficientField::diagonal(vec![2.0, 0.5]).unwrap();
        let samples = vec![vec![0.0, 0.0], vec![0.5, -0.5]];
        let (l1, l2) = check_ellipticity(&a, &samples).unwrap();
        assert!((l1 - 2.0).abs() < 1e-12);
        assert_eq!(l2, 0.0);
        assert!((a.lambda1() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_lipschitz_estimate() {
        // pairs aligned with x1 near the maximal slope of sin recover the
        // amplitude; 10^4 seeded random pairs get within 5%
        let eps = 0.1;
        let a = CoefficientField::scalar_perturbation(2, eps).unwrap();
        let mut rng = SplitMix64::new(31);
        let mut samples = Vec::new();
        for _ in 0..10_000 {
            let x = vec![rng.range_f64(-1.0, 1.0), rng.range_f64(-1.0, 1.0)];
            let angle = rng.range_f64(0.0, std::f64::consts::TAU);
            let d = 1e-4;
            let y = vec![x[0] + d * angle.cos(), x[1] + d * angle.sin()];
            samples.push(x);
            samples.push(y);
        }
        let (l1, l2) = check_ellipticity(&a, &samples).unwrap();
        assert!(l2 <= eps * (1.0 + 1e-9), "estimate {l2} exceeds amplitude");
        assert!((l2 - eps).abs() / eps < 0.05, "estimate {l2} not within 5%");
        assert!(l1 <= a.lambda1() * (1.0 + 1e-12));
    }

    #[test]
    fn rotated_matrix_is_symmetric_with_right_range() {
        let a = CoefficientField::rotated(3, 2.0, 1.0, std::f64::consts::FRAC_PI_6).unwrap();
        let samples = vec![vec![0.1, 0.2, -0.3]];
        let (l1, l2) = check_ellipticity(&a, &samples).unwrap();
        assert!((l1 - 2.0).abs() < 1e-9);
        assert_eq!(l2, 0.0);
        assert!(!a.is_diagonal());
        assert!(CoefficientField::identity(2).is_diagonal());
    }

    #[test]
    fn degree_one_is_coordinate() {
        let u = harmonic_polynomial(2, 1, 0).unwrap();
        assert_eq!(u.value(&[0.7, -0.3]), 0.7);
        let g = u.gradient(&[0.7, -0.3]);
        assert_eq!(g, vec![1.0, 0.0]);
    }

    #[test]
    fn degree_three_closed_form() {
        // Re(x+iy)^3 = x^3 - 3xy^2
        let u = harmonic_polynomial(2, 3, 0).unwrap();
        for (x, y) in [(0.5, 0.2), (-1.0, 0.7), (0.0, 1.0)] {
            let expect = x * x * x - 3.0 * x * y * y;
            assert!((u.value(&[x, y]) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonic_variants_have_small_laplacian() {
        // degree 2 makes the second differences exact up to roundoff; the
        // roundoff amplifies like eps/h^2 ~ 1e-8 at h = 1e-4
        let mut rng = SplitMix64::new(5);
        for variant in 0..harmonic_variant_count(3) {
            let u = harmonic_polynomial(3, 2, variant).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..3).map(|_| rng.range_f64(-1.0, 1.0)).collect();
                let res = fd_laplacian(&|p| u.value(p), &x, 1e-4);
                assert!(res.abs() < 1e-7, "variant {variant}: residual {res}");
            }
        }
    }

    #[test]
    fn laplacian_residual_decays_at_second_order() {
        // degree 4 has a nonzero fourth derivative, so the second
        // difference residual halves twice per halving of h
        let u = harmonic_polynomial(2, 4, 0).unwrap();
        let x = [0.31, 0.17];
        let r1 = fd_laplacian(&|p| u.value(p), &x, 1e-2);
        let r2 = fd_laplacian(&|p| u.value(p), &x, 5e-3);
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "residual ratio {ratio}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = SplitMix64::new(9);
        let fields = [
            harmonic_polynomial(2, 4, 1).unwrap(),
            harmonic_polynomial(3, 3, 2).unwrap(),
            AnalyticSolution::TorusLift {
                base_dim: 2,
                freqs: vec![1, 2],
            },
        ];
        for u in &fields {
            for _ in 0..10 {
                let x: Vec<f64> = (0..u.dim()).map(|_| rng.range_f64(-0.8, 0.8)).collect();
                let g = u.gradient(&x);
                for ax in 0..u.dim() {
                    let h = 1e-6;
                    let mut y = x.clone();
                    y[ax] = x[ax] + h;
                    let plus = u.value(&y);
                    y[ax] = x[ax] - h;
                    let minus = u.value(&y);
                    let fd = (plus - minus) / (2.0 * h);
                    assert!(
                        (g[ax] - fd).abs() < 1e-6 * (1.0 + g[ax].abs()),
                        "{}: axis {ax}",
                        u.label()
                    );
                }
            }
        }
    }

    #[test]
    fn homogeneity_of_degree_k() {
        let u = harmonic_polynomial(2, 5, 0).unwrap();
        let x = [0.3, -0.2];
        let lam: f64 = 1.7;
        let scaled = [lam * x[0], lam * x[1]];
        assert!((u.value(&scaled) - lam.powi(5) * u.value(&x)).abs() < 1e-12);
    }

    #[test]
    fn harmonic_sup_over_centered_ball_is_radius_power() {
        for k in 1..=8u32 {
            let u = harmonic_polynomial(2, k, 0).unwrap();
            let b = Ball::new(vec![0.0, 0.0], 0.3).unwrap();
            let sup = u.sup_abs_ball(&b);
            assert!((sup - 0.3f64.powi(k as i32)).abs() < 1e-12, "k={k}: {sup}");
        }
    }

    #[test]
    fn affine_sup_over_ball_closed_form() {
        // sup |x1| over B((a,b), r) = |a| + r
        let u = harmonic_polynomial(2, 1, 0).unwrap();
        let b = Ball::new(vec![10.0, 0.0], 1.0).unwrap();
        assert!((u.sup_abs_ball(&b) - 11.0).abs() < 1e-9);
        let q = Cube::new(vec![10.0, 0.0], 2.0).unwrap();
        assert!((u.sup_abs_cube(&q) - 11.0).abs() < 1e-9);
        assert!((u.inf_abs_cube(&q) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_inf_detects_sign_change() {
        let u = harmonic_polynomial(2, 1, 0).unwrap();
        let q = Cube::unit(2);
        assert_eq!(u.inf_abs_cube(&q), 0.0);
    }

    #[test]
    fn gradient_magnitude_is_radial() {
        // |grad Re(x+iy)^k| = k (x^2+y^2)^{(k-1)/2}
        let u = harmonic_polynomial(2, 4, 0).unwrap();
        let g = u.gradient_magnitude();
        let x = [0.3, 0.4];
        assert!((g.value(&x) - 4.0 * 0.5f64.powi(3)).abs() < 1e-12);
        let b = Ball::new(vec![0.3, 0.4], 0.5).unwrap();
        assert!((g.sup_abs_ball(&b) - 4.0 * 1.0).abs() < 1e-12);
        let q = Cube::new(vec![0.0, 0.0], 1.0).unwrap();
        let far: f64 = 0.5f64.hypot(0.5);
        assert!((g.sup_abs_cube(&q) - 4.0 * far.powi(3)).abs() < 1e-12);
        assert_eq!(g.inf_abs_cube(&q), 4.0 * 0.0);
    }

    #[test]
    fn concentrating_harmonic_values() {
        let phi = concentrating_spherical_harmonic(1).unwrap();
        assert!((phi.value_sphere(std::f64::consts::FRAC_PI_2, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let phi10 = concentrating_spherical_harmonic(10).unwrap();
        let v = phi10
            .value_sphere(std::f64::consts::FRAC_PI_4, 0.0)
            .unwrap();
        assert!((v - 2f64.powi(-5)).abs() < 1e-12);
        assert_eq!(phi10.value_sphere(0.0, 1.2).unwrap(), 0.0);
        assert!((phi10.eigenvalue() - 110.0).abs() < 1e-12);
    }

    #[test]
    fn cap_supremum_closed_form() {
        let phi = concentrating_spherical_harmonic(6).unwrap();
        let cap = EigenRegion::PolarCap {
            colatitude: std::f64::consts::FRAC_PI_6,
        };
        let sup = phi.sup_abs_region(&cap).unwrap();
        assert!((sup - 0.5f64.powi(6)).abs() < 1e-12);
        assert_eq!(phi.sup_abs_region(&EigenRegion::Whole).unwrap(), 1.0);
    }

    #[test]
    fn torus_ball_supremum_saturates_past_one_period() {
        for k in 1..=8i64 {
            let phi = Eigenfunction::TorusCosine { freqs: vec![k, 0] };
            let ball = EigenRegion::TorusBall {
                center: vec![0.37, 0.2],
                radius: 0.1,
            };
            let sup = phi.sup_abs_region(&ball).unwrap();
            if k >= 5 {
                assert_eq!(sup, 1.0, "k={k} spans a half period");
            } else {
                assert!(sup <= 1.0);
            }
        }
    }

    #[test]
    fn constant_lift_is_constant() {
        let phi = Eigenfunction::TorusCosine { freqs: vec![0, 0] };
        assert_eq!(phi.eigenvalue(), 0.0);
        let u = eigenfunction_lift(&phi).unwrap();
        assert_eq!(u.value(&[0.3, 0.4, 2.0]), 1.0);
        assert_eq!(u.value(&[-1.0, 0.0, -3.0]), 1.0);
    }

    #[test]
    fn lift_solves_the_product_equation() {
        // second differences with h = 1e-3 leave an O(h^2 (2π)^4 u)
        // truncation residual, a few 1e-4 at these points
        let phi = Eigenfunction::TorusCosine { freqs: vec![1, 0] };
        let u = eigenfunction_lift(&phi).unwrap();
        let res = fd_laplacian(&|p| u.value(p), &[0.3, 0.2, 0.1], 1e-3);
        assert!(res.abs() < 1e-3, "residual {res}");
        assert!(
            res.abs() > 1e-8,
            "suspiciously exact for a second difference"
        );
    }

    #[test]
    fn sphere_lift_is_refused() {
        let phi = concentrating_spherical_harmonic(3).unwrap();
        assert!(eigenfunction_lift(&phi).is_err());
    }

    #[test]
    fn sphere_eigen_equation_in_angles() {
        // Δ_{S²} φ + λ φ = 0 with the angular Laplacian
        // 1/sinθ ∂θ(sinθ ∂θ φ) + 1/sin²θ ∂φφ φ
        let k = 5u32;
        let phi = concentrating_spherical_harmonic(k).unwrap();
        let lambda = phi.eigenvalue();
        let h = 1e-4;
        for (theta, az) in [(1.1, 0.3), (0.8, 2.0), (1.9, 4.4)] {
            let f = |t: f64, p: f64| phi.value_sphere(t, p).unwrap();
            let ft = (f(theta + h, az) - f(theta - h, az)) / (2.0 * h);
            let ftt = (f(theta + h, az) - 2.0 * f(theta, az) + f(theta - h, az)) / (h * h);
            let fpp = (f(theta, az + h) - 2.0 * f(theta, az) + f(theta, az - h)) / (h * h);
            let lap = ftt + theta.cos() / theta.sin() * ft + fpp / (theta.sin() * theta.sin());
            let res = lap + lambda * f(theta, az);
            assert!(res.abs() < 1e-4 * lambda, "θ={theta}: residual {res}");
        }
    }

    #[test]
    fn registry_round_trip() {
        let u = parse_field("harmonic_poly:n=2,k=3").unwrap();
        assert!((u.value(&[0.5, 0.2]) - (0.125 - 3.0 * 0.5 * 0.04)).abs() < 1e-14);
        assert_eq!(parse_field("affine").unwrap().value(&[0.3, 0.9]), 0.3);
        assert_eq!(
            parse_field("constant:n=2,v=7").unwrap().value(&[1.0, 2.0]),
            7.0
        );
        let lift = parse_field("torus_lift:n=2,m1=1,m2=0").unwrap();
        assert_eq!(lift.dim(), 3);
        assert!(parse_field("nope").is_err());
        assert!(parse_field("harmonic_poly:k").is_err());
        assert!(parse_coefficient("diag:n=2,d1=2,d2=0.5").is_ok());
        assert!(parse_coefficient("galaxy").is_err());
    }
}
