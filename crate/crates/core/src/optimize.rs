//! Scalar maximization helpers: uniform interior grids, local-maximum
//! detection and golden-section refinement.

use alloc::vec::Vec;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// `count` equally spaced interior points of `(0, 1)`: `p_j = (j + 1) / (count + 1)`.
pub fn interior_grid(count: usize) -> Vec<f64> {
    let denom = (count + 1) as f64;
    (1..=count).map(|j| j as f64 / denom).collect()
}

/// Indices whose value is at least as large as both neighbours (a missing
/// neighbour at either end counts as lower).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (0..values.len())
        .filter(|&j| {
            let left = j == 0 || values[j] >= values[j - 1];
            let right = j + 1 == values.len() || values[j] >= values[j + 1];
            left && right
        })
        .collect()
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    if fm >= best.1 {
        (mid, fm)
    } else {
        best
    }
}
