use crate::error::{Error, Result};

/// Newton's method safeguarded by a sign-change bracket `[lo, hi]`.
///
/// `f` returns `(value, derivative)`. A Newton step that leaves the bracket,
/// or fails to halve the bracket often enough, is replaced by bisection.
/// Stops when `|f| <= ftol` or the bracket width drops below `xtol`.
pub fn bracketed_newton<F>(f: F, mut lo: f64, mut hi: f64, ftol: f64, xtol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    const MAX_ITER: usize = 300;
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Root(format!("no sign change on [{lo}, {hi}] (f = {flo:.3e}, {fhi:.3e})")));
    }
    // orient so that f(lo) < 0 < f(hi)
    let increasing = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    let mut width_old = (hi - lo).abs();
    let mut width = width_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..MAX_ITER {
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if (fx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let newton_ok = dfx != 0.0 && {
            let xn = x - fx / dfx;
            let inside = (xn - lo) * (xn - hi) < 0.0;
            inside && (2.0 * fx).abs() <= (width_old * dfx).abs()
        };
        width_old = width;
        let x_new = if newton_ok { x - fx / dfx } else { 0.5 * (lo + hi) };
        width = (x_new - x).abs();
        x = x_new;
        if (hi - lo).abs() <= xtol || width <= xtol * 0.5 {
            let (v, _) = f(x);
            if v.abs() <= ftol.max(1e3 * f64::EPSILON * v.abs()) || (hi - lo).abs() <= xtol {
                return Ok(x);
            }
        }
        (fx, dfx) = f(x);
    }
    if fx.abs() <= ftol {
        Ok(x)
    } else {
        Err(Error::Root(format!("no convergence, last residual {fx:.3e}")))
    }
}

/// Plain bisection for a continuous sign change on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Root(format!("no sign change on [{lo}, {hi}]")));
    }
    let neg_lo = flo < 0.0;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let x = bracketed_newton(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-14, 1e-16).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn decreasing_function() {
        let x = bracketed_newton(|x| (1.0 - x.exp(), -x.exp()), -1.0, 3.0, 1e-15, 0.0).unwrap();
        assert!(x.abs() < 1e-14);
    }

    #[test]
    fn flat_newton_falls_back_to_bisection() {
        // derivative vanishes at the start point; bisection must take over
        let x = bracketed_newton(|x| ((x - 0.3).powi(3), 3.0 * (x - 0.3).powi(2)), 0.0, 1.0, 1e-30, 1e-14).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_missing_bracket() {
        assert!(bracketed_newton(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12, 1e-12).is_err());
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 50).is_err());
    }

    #[test]
    fn bisect_converges() {
        let x = bisect(|x| x.cos() - x, 0.0, 1.0, 200).unwrap();
        assert!((x.cos() - x).abs() < 1e-15);
    }
}
