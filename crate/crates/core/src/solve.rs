//! One-dimensional maximization of concave functions on an interval.

/// Maximizer of a concave function on `[lo, hi]` from its derivative.
///
/// Returns a boundary when the derivative has the same sign at both ends,
/// otherwise bisects on the sign change until the bracket is narrower than
/// `tol`. `None` if the derivative is not finite at a probe.
pub fn bisect_on_gradient<F: Fn(f64) -> f64>(grad: F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let g_lo = grad(lo);
    if !g_lo.is_finite() {
        return None;
    }
    if g_lo <= 0.0 {
        return Some(lo);
    }
    let g_hi = grad(hi);
    if !g_hi.is_finite() {
        return None;
    }
    if g_hi >= 0.0 {
        return Some(hi);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let g = grad(mid);
        if !g.is_finite() {
            return None;
        }
        if g > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // The ends are never probed in the loop; keep them if they win.
    let mid = 0.5 * (a + b);
    [lo, mid, hi]
        .into_iter()
        .max_by(|&u, &v| f(u).partial_cmp(&f(v)).unwrap_or(std::cmp::Ordering::Less))
        .unwrap_or(mid)
}
