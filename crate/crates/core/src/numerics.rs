//! Small numerical kernels shared by the wave-curve, profile and harness code:
//! adaptive Simpson quadrature, a bracketed Newton iteration, a tridiagonal
//! solver, cubic Hermite interpolation and least-squares line fits.

use crate::error::{Error, Result};

const MAX_SIMPSON_DEPTH: u32 = 48;
const MAX_SIMPSON_EVALUATIONS: usize = 2_000_000;

struct SimpsonBudget {
    worst: f64,
    evaluations: usize,
}

/// Integrates `f` over `[a, b]` with adaptive Simpson refinement until the
/// estimated absolute error is below `tol`. Reversed limits give the negated
/// integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let mut budget = SimpsonBudget { worst: 0.0, evaluations: 3 };
    let value = simpson_step(&f, lo, hi, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH, &mut budget);
    let worst = budget.worst;
    if !value.is_finite() {
        return Err(Error::Quadrature { achieved: f64::INFINITY, wanted: tol });
    }
    if worst > tol {
        return Err(Error::Quadrature { achieved: worst, wanted: tol });
    }
    Ok(sign * value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut SimpsonBudget,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    budget.evaluations += 2;
    let delta = left + right - whole;
    if !delta.is_finite() {
        budget.worst = f64::INFINITY;
        return left + right;
    }
    let exhausted = depth == 0 || budget.evaluations >= MAX_SIMPSON_EVALUATIONS;
    if exhausted || delta.abs() <= 15.0 * tol {
        if exhausted && delta.abs() > 15.0 * tol {
            budget.worst = budget.worst.max(delta.abs() / 15.0);
        }
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)
}

/// Newton iteration safeguarded by a sign-change bracket. `f` returns the
/// value and derivative. The bracket `[lo, hi]` must contain a sign change;
/// any Newton step leaving the current bracket (or failing to shrink it fast
/// enough) is replaced by bisection.
pub fn newton_bisect<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    seed: Option<f64>,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo:.6e}, {hi:.6e}]: f = {flo:.3e}, {fhi:.3e}"
        )));
    }
    let lo_negative = flo < 0.0;
    let mut x = match seed {
        Some(s) if s > lo && s < hi => s,
        _ => 0.5 * (lo + hi),
    };
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let inside = dfx != 0.0 && newton.is_finite() && newton > lo && newton < hi;
        if !inside || (2.0 * fx).abs() > (dx_old * dfx).abs() {
            dx_old = dx;
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x = newton;
        }
        if dx.abs() <= x_tol * (1.0 + x.abs()) || hi - lo <= x_tol * (1.0 + x.abs()) {
            return Ok(x);
        }
    }
    Err(Error::RootFinding(format!(
        "no convergence after {max_iter} iterations, bracket [{lo:.16e}, {hi:.16e}]"
    )))
}

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored. Returns `None` on a zero pivot.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Option<()> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return None;
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        if beta == 0.0 {
            return None;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i + 1] * rhs[i + 1];
    }
    Some(())
}

/// Cubic Hermite interpolation on a single interval of width `h`, from values
/// and slopes at both ends. Returns the value and derivative at offset `t` in
/// `[0, 1]`.
#[inline]
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -6.0 * t2 + 6.0 * t;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, slope)
}

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination.
    pub r2: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LineFit { slope, intercept: my - slope * mx, r2 })
}
