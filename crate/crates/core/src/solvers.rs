//! Small numeric toolbox: scalar root finding and minimization (Brent),
//! composite Simpson quadrature, dense linear solve, and a fixed-step RK4
//! driver over `[f64; N]` states.
//!
//! Callbacks are fallible so integrands that hit a domain edge (for example a
//! polar singularity) can abort the enclosing solve with a real error instead
//! of smuggling NaN through the arithmetic.

use crate::error::{Error, Result};

/// Root of `f` inside a bracketing interval `[a, b]` (Brent's method).
pub(crate) fn brent_root(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
    context: &'static str,
) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketFailed { context, lo: a, hi: b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = b - a;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, falling back to secant when
            // only two distinct points are available.
            let s = fb / fa;
            let mut p;
            let mut q;
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b)?;
    }
    Err(Error::MaxIterations {
        context,
        iterations: max_iter,
        residual: fb.abs(),
    })
}

/// Minimum of `f` on `[a, b]` (Brent's parabolic/golden-section method).
/// Returns `(x_min, f(x_min))`.
pub(crate) fn brent_min(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
    context: &'static str,
) -> Result<(f64, f64)> {
    const GOLD: f64 = 0.381_966_011_250_105;
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut x = lo + GOLD * (hi - lo);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x)?;
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let xm = 0.5 * (lo + hi);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            return Ok((x, fx));
        }
        let mut take_golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::MaxIterations {
        context,
        iterations: max_iter,
        residual: hi - lo,
    })
}

/// Scans `[lo, hi]` in `subdivisions` equal steps and returns the first
/// subinterval across which `f` changes sign.
pub(crate) fn bracket_sign_change(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    subdivisions: usize,
    context: &'static str,
) -> Result<(f64, f64)> {
    let n = subdivisions.max(1);
    let mut x_prev = lo;
    let mut f_prev = f(lo)?;
    for i in 1..=n {
        let x = lo + (hi - lo) * (i as f64) / (n as f64);
        let fx = f(x)?;
        if f_prev == 0.0 {
            return Ok((x_prev, x_prev));
        }
        if f_prev.signum() != fx.signum() {
            return Ok((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    Err(Error::BracketFailed { context, lo, hi })
}

/// Composite Simpson rule with `intervals` panels (rounded up to even).
pub(crate) fn simpson(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    intervals: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut n = intervals.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut sum = f(a)? + f(b)?;
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + h * i as f64)?;
    }
    Ok(sum * h / 3.0)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_linear_system<const N: usize>(
    mut a: [[f64; N]; N],
    mut b: [f64; N],
) -> Result<[f64; N]> {
    for col in 0..N {
        let mut pivot_row = col;
        for row in col + 1..N {
            if a[row][col].abs() > a[pivot_row][col].abs() {
                pivot_row = row;
            }
        }
        let pivot = a[pivot_row][col];
        if !pivot.is_finite() || pivot.abs() < 1e-300 {
            return Err(Error::SingularJacobian(pivot));
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            b.swap(pivot_row, col);
        }
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..N {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; N];
    for col in (0..N).rev() {
        let mut acc = b[col];
        for k in col + 1..N {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

fn add_scaled<const N: usize>(y: &[f64; N], d: &[f64; N], s: f64) -> [f64; N] {
    std::array::from_fn(|i| y[i] + s * d[i])
}

/// Classic fixed-step RK4 from `t0` to `t1` (forward only), calling `observe`
/// at every node including both endpoints. The step is shrunk so the span
/// divides evenly; `max_step` is an upper bound.
pub(crate) fn rk4_path<const N: usize>(
    y0: [f64; N],
    t0: f64,
    t1: f64,
    max_step: f64,
    mut deriv: impl FnMut(f64, &[f64; N]) -> [f64; N],
    mut observe: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    if !(max_step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "integrator step must be positive, got {max_step}"
        )));
    }
    observe(t0, &y0);
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    if !(span > 0.0) {
        return Err(Error::InvalidInput(format!(
            "integration span must be forward in time, got [{t0}, {t1}]"
        )));
    }
    let n = (span / max_step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut y = y0;
    for i in 0..n {
        let t = t0 + span * (i as f64) / (n as f64);
        let k1 = deriv(t, &y);
        let k2 = deriv(t + 0.5 * h, &add_scaled(&y, &k1, 0.5 * h));
        let k3 = deriv(t + 0.5 * h, &add_scaled(&y, &k2, 0.5 * h));
        let t_next = t0 + span * ((i + 1) as f64) / (n as f64);
        let k4 = deriv(t_next, &add_scaled(&y, &k3, h));
        for j in 0..N {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState("fixed-step integration"));
        }
        observe(t_next, &y);
    }
    Ok(y)
}
