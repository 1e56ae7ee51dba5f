//! Inviscid Burgers rarefactions: the exact centred fan and the smooth
//! solution grown from `tanh` initial data by the method of characteristics.

use crate::numerics::newton_bisect;

/// Centred rarefaction of Burgers' equation with `w_minus < w_plus`.
pub fn burgers_exact(w_minus: f64, w_plus: f64, tau: f64, y: f64) -> f64 {
    let xi = y / tau;
    if xi <= w_minus {
        w_minus
    } else if xi >= w_plus {
        w_plus
    } else {
        xi
    }
}

/// Smooth Burgers solution and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersPoint {
    pub w: f64,
    pub w_y: f64,
    pub w_yy: f64,
    pub w_tau: f64,
    /// `w - w_minus`, computed without cancellation.
    pub above_minus: f64,
    /// `w_plus - w`, computed without cancellation.
    pub below_plus: f64,
    /// Foot of the characteristic through `(tau, y)`.
    pub x0: f64,
}

/// Solves `w_tau + w w_y = 0` with `w(0, y) = (w_+ + w_-)/2 + (w_+ - w_-)/2 tanh y`.
///
/// The characteristic foot `x0` solves `y = x0 + w0(x0) tau`; the map is
/// strictly increasing for `tau >= 0`, so the root is bracketed by
/// `[y - w_+ tau, y - w_- tau]`.
pub fn burgers_smooth(w_minus: f64, w_plus: f64, tau: f64, y: f64) -> BurgersPoint {
    debug_assert!(tau >= 0.0);
    let jump = w_plus - w_minus;
    let half = 0.5 * jump;
    let mid = 0.5 * (w_plus + w_minus);
    let slope0 = |x: f64| {
        // half * sech^2(x), written to stay finite for large |x|
        let e = (-2.0 * x.abs()).exp();
        half * 4.0 * e / ((1.0 + e) * (1.0 + e))
    };
    let w0 = |x: f64| mid + half * x.tanh();

    let x0 = if tau == 0.0 || jump == 0.0 {
        y - w_minus * tau
    } else {
        // Widened by one unit so rounding cannot hide the sign change.
        let lo = y - w_plus * tau - 1.0;
        let hi = y - w_minus * tau + 1.0;
        let g = |x: f64| (x + w0(x) * tau - y, 1.0 + slope0(x) * tau);
        // Tight enough that the residual in y stays below 1e-12 (1 + |y|) where
        // the map is steep, but never below the rounding floor of x0.
        let scale = 1.0 + y.abs() + tau * w_minus.abs().max(w_plus.abs());
        // The root finder's tolerance is relative to 1 + |x0|.
        let x_tol = (1e-13 * (1.0 + y.abs()) / ((1.0 + jump * tau) * scale)).max(2.0 * f64::EPSILON);
        let root = newton_bisect(g, lo, hi, Some(y - mid * tau), x_tol, 300)
            .expect("characteristic map is monotone and bracketed");
        debug_assert!(g(root).0.abs() <= 1e-12 * (1.0 + y.abs()));
        root
    };

    let d1 = slope0(x0);
    let d2 = -2.0 * x0.tanh() * d1;
    let jac = 1.0 / (1.0 + d1 * tau);
    // Logistic weights in the form that cannot overflow and keeps the tails
    // below their exponential envelopes after rounding.
    let logistic = |x: f64| {
        if x < 0.0 {
            let e = (2.0 * x).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + (-2.0 * x).exp())
        }
    };
    let above_minus = jump * logistic(x0);
    let below_plus = jump * logistic(-x0);
    // Rounding in tanh must not push the value outside [w_-, w_+].
    let w = w0(x0).clamp(w_minus, w_plus);
    let w_y = d1 * jac;
    BurgersPoint {
        w,
        w_y,
        w_yy: d2 * jac * jac * jac,
        w_tau: -w * w_y,
        above_minus,
        below_plus,
        x0,
    }
}
