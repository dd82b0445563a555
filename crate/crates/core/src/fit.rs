//! Small fitting and 1-D search helpers shared by the measurement modules.

/// Least-squares line through (x, y) pairs; returns (slope, intercept).
///
/// Sums run in input order so repeated calls are bit-identical.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line");
    let n = xs.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Maximum of `f` over [lo, hi]: coarse uniform scan followed by golden
/// section refinement around the best sample. Returns (argmax, max).
///
/// Deterministic; accuracy is limited by the smoothness of `f`, for the
/// smooth profiles used here the refinement reaches ~1e-12 relative.
pub fn scan_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, coarse: usize) -> (f64, f64) {
    debug_assert!(coarse >= 2);
    let step = (hi - lo) / coarse as f64;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=coarse {
        let x = if i == coarse {
            hi
        } else {
            lo + step * i as f64
        };
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // Golden-section on the bracket around the best coarse sample.
    let mut a = lo + step * (best_i.saturating_sub(1)) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    if fm >= best {
        (xm, fm)
    } else {
        (lo + step * best_i as f64, best)
    }
}

/// Maximum of a periodic `f` over one period [0, 2π); same scheme as
/// `scan_max` but the bracket wraps.
pub fn scan_max_periodic<F: Fn(f64) -> f64>(f: F, coarse: usize) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let step = tau / coarse as f64;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..coarse {
        let v = f(step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = step * best_i as f64 - step;
    let b = step * best_i as f64 + step;
    let (x, v) = scan_max(&f, a, b, 2);
    if v >= best {
        (x.rem_euclid(tau), v)
    } else {
        (step * best_i as f64, best)
    }
}
