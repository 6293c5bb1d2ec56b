//! Scalar root finding and one-dimensional maximization.

/// Bisection on a sign change of `f` over `[a, b]`. Returns `None` when the
/// endpoints do not bracket a root.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Newton iteration kept inside a bracket `[a, b]` with a sign change,
/// falling back to bisection when a step leaves the bracket or stalls.
pub fn newton_bracketed<F>(mut fdf: F, mut a: f64, mut b: f64, x0: f64, xtol: f64) -> Option<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (fa, _) = fdf(a);
    let (fb, _) = fdf(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    if fa > 0.0 {
        std::mem::swap(&mut a, &mut b);
    }
    // now f(a) < 0 < f(b), a and b in either order
    let mut x = if x0 > a.min(b) && x0 < a.max(b) { x0 } else { 0.5 * (a + b) };
    let mut dx_old = (b - a).abs();
    for _ in 0..200 {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let lo = a.min(b);
        let hi = a.max(b);
        let newton = x - fx / dfx;
        let step_ok = dfx != 0.0 && newton > lo && newton < hi && (fx / dfx).abs() < 0.5 * dx_old;
        let xn = if step_ok { newton } else { 0.5 * (lo + hi) };
        dx_old = (xn - x).abs();
        x = xn;
        if dx_old <= xtol || hi - lo <= xtol {
            return Some(x);
        }
    }
    Some(x)
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_none());
    }

    #[test]
    fn newton_bracketed_converges_either_orientation() {
        let r = newton_bracketed(|x| (x.cos() - x, -x.sin() - 1.0), 0.0, 1.0, 0.5, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
        let r = newton_bracketed(|x| (x - x.cos(), 1.0 + x.sin()), 0.0, 1.0, 0.9, 1e-15).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }

    #[test]
    fn golden_quadratic() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }
}
