//! Wave curves of the Lagrangian Euler system and the exact Riemann solution
//! made of a 1-rarefaction, a contact discontinuity and a 3-rarefaction.
//!
//! The two intermediate states are found from the common contact pressure:
//! each rarefaction curve is parametrised by pressure along its isentrope and
//! the velocity mismatch `u_*(p) - u^*(p)` is driven to zero. Velocities along
//! the curves come from adaptive quadrature of the characteristic speed.

use crate::error::{Error, Result};
use crate::gas::{Family, GasParams, State};
use crate::numerics::{adaptive_simpson, newton_bisect};

/// Absolute tolerance of the velocity integral along a wave curve.
pub const CURVE_QUADRATURE_TOL: f64 = 1e-11;
/// Required residual of the contact-velocity equation.
pub const CONTACT_RESIDUAL_TOL: f64 = 1e-10;
/// Waves whose volume interval is shorter than this are collapsed to constants.
pub const ZERO_WAVE_WIDTH: f64 = 1e-13;

/// Characteristic speed of `family` at volume `v` on the isentrope through `anchor`.
#[inline]
pub fn speed_on_isentrope(g: &GasParams, anchor: &State, v: f64, family: Family) -> f64 {
    let theta = g.theta_on_isentrope(anchor, v);
    family.sign() * g.sound_speed(v, theta)
}

/// Velocity increment `-∫_{v_ref}^{v} λ_family(η, s_ref) dη` along the
/// rarefaction curve of `family` through `reference`.
pub fn velocity_change_along_curve(g: &GasParams, reference: &State, v: f64, family: Family) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::param("v", format!("must be finite and > 0, got {v}")));
    }
    if family == Family::Two {
        return Ok(0.0);
    }
    let integral = adaptive_simpson(
        |eta| speed_on_isentrope(g, reference, eta, family),
        reference.v,
        v,
        CURVE_QUADRATURE_TOL,
    )?;
    Ok(-integral)
}

/// Finds the volume on the isentrope through `anchor` at which the speed of
/// `family` equals `speed`. The root is bracketed by `[v_a, v_b]`; `seed`
/// warm-starts the Newton iteration.
pub fn invert_speed(
    g: &GasParams,
    anchor: &State,
    family: Family,
    speed: f64,
    v_a: f64,
    v_b: f64,
    seed: Option<f64>,
) -> Result<f64> {
    let (lo, hi) = if v_a <= v_b { (v_a, v_b) } else { (v_b, v_a) };
    if hi - lo < ZERO_WAVE_WIDTH {
        return Ok(0.5 * (lo + hi));
    }
    let k = 0.5 * (g.gamma() + 1.0);
    let f = |v: f64| {
        let lam = speed_on_isentrope(g, anchor, v, family);
        (lam - speed, -k * lam / v)
    };
    // Rounding can leave the target a hair outside the bracket at the fan edges.
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo.signum() == fhi.signum() {
        return Ok(if flo.abs() < fhi.abs() { lo } else { hi });
    }
    newton_bisect(f, lo, hi, seed, 1e-15, 200)
}

/// Speeds bounding a rarefaction fan, head first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fan {
    pub head: f64,
    pub tail: f64,
}

impl Fan {
    pub fn width(&self) -> f64 {
        self.tail - self.head
    }
}

/// Left and right data together with the two intermediate states and the fan
/// speeds of the R1-CD-R3 solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannPattern {
    pub gas: GasParams,
    pub left: State,
    pub right: State,
    /// State between the 1-fan and the contact.
    pub star: State,
    /// State between the contact and the 3-fan.
    pub star_upper: State,
    pub fan1: Fan,
    pub fan3: Fan,
    /// Common pressure on both sides of the contact.
    pub p_contact: f64,
    /// `u_*(p) - u^*(p)` at the returned contact pressure.
    pub residual: f64,
}

/// Solves the Riemann problem for data in the R1-CD-R3 class.
pub fn solve_pattern(g: &GasParams, left: &State, right: &State) -> Result<RiemannPattern> {
    let p_left = g.pressure(left);
    let p_right = g.pressure(right);
    let p_max = p_left.min(p_right);

    let mismatch = |p: f64| -> Result<(f64, f64)> {
        let vl = g.volume_at_pressure(left, p);
        let vr = g.volume_at_pressure(right, p);
        let ul = left.u + velocity_change_along_curve(g, left, vl, Family::One)?;
        let ur = right.u + velocity_change_along_curve(g, right, vr, Family::Three)?;
        let dul = speed_on_isentrope(g, left, vl, Family::One) * vl / (g.gamma() * p);
        let dur = speed_on_isentrope(g, right, vr, Family::Three) * vr / (g.gamma() * p);
        Ok((ul - ur, dul - dur))
    };

    let (f_max, _) = mismatch(p_max)?;
    let p_contact = if f_max.abs() <= 1e-14 {
        p_max
    } else if f_max > 0.0 {
        let violated = if p_left < p_right {
            "u_- < u_* (1-wave would be a shock)"
        } else if p_right < p_left {
            "u^* < u_+ (3-wave would be a shock)"
        } else {
            "u_- < u_* and u^* < u_+ (both waves would be shocks)"
        };
        return Err(Error::NotR1CdR3 { violated, p_contact: p_max });
    } else {
        let mut p_lo = 0.5 * p_max;
        loop {
            let (f_lo, _) = mismatch(p_lo)?;
            if f_lo >= 0.0 {
                break;
            }
            p_lo *= 0.5;
            if p_lo < 1e-12 * p_max {
                return Err(Error::NoBracket { p_max });
            }
        }
        let mut failure = None;
        let root = newton_bisect(
            |p| match mismatch(p) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    (f64::NAN, f64::NAN)
                }
            },
            p_lo,
            p_max,
            None,
            1e-15,
            300,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        root?
    };

    let (residual, _) = mismatch(p_contact)?;
    if residual.abs() >= CONTACT_RESIDUAL_TOL {
        return Err(Error::RootFinding(format!(
            "contact velocity residual {residual:.3e} above {CONTACT_RESIDUAL_TOL:.1e}"
        )));
    }

    let v_star = g.volume_at_pressure(left, p_contact);
    let v_upper = g.volume_at_pressure(right, p_contact);
    let star = if (v_star - left.v).abs() < ZERO_WAVE_WIDTH {
        *left
    } else {
        State {
            v: v_star,
            u: left.u + velocity_change_along_curve(g, left, v_star, Family::One)?,
            theta: g.theta_on_isentrope(left, v_star),
        }
    };
    let star_upper = if (v_upper - right.v).abs() < ZERO_WAVE_WIDTH {
        *right
    } else {
        State {
            v: v_upper,
            u: right.u + velocity_change_along_curve(g, right, v_upper, Family::Three)?,
            theta: g.theta_on_isentrope(right, v_upper),
        }
    };

    let fan1 = Fan { head: g.lambda(left, Family::One), tail: g.lambda(&star, Family::One) };
    let fan3 = Fan { head: g.lambda(&star_upper, Family::Three), tail: g.lambda(right, Family::Three) };

    Ok(RiemannPattern { gas: *g, left: *left, right: *right, star, star_upper, fan1, fan3, p_contact, residual })
}

impl RiemannPattern {
    /// Pressure on the left of the contact.
    pub fn p_star(&self) -> f64 {
        self.gas.pressure(&self.star)
    }

    /// Pressure on the right of the contact.
    pub fn p_star_upper(&self) -> f64 {
        self.gas.pressure(&self.star_upper)
    }

    /// Exact Euler solution at `(t, x)`, `t > 0`. The contact sits at `x = 0`.
    pub fn eval_exact(&self, t: f64, x: f64) -> State {
        ExactEvaluator::new(self).eval(t, x)
    }

    /// The state reached at fan speed `xi` inside the given rarefaction.
    fn fan_state(&self, family: Family, xi: f64, seed: Option<f64>) -> State {
        let g = &self.gas;
        let (anchor, other) = match family {
            Family::One => (&self.left, &self.star),
            _ => (&self.right, &self.star_upper),
        };
        let v = invert_speed(g, anchor, family, xi, anchor.v, other.v, seed)
            .expect("fan speed lies between the fan's end speeds");
        let du = velocity_change_along_curve(g, anchor, v, family)
            .expect("velocity integral of a power law converges");
        State { v, u: anchor.u + du, theta: g.theta_on_isentrope(anchor, v) }
    }
}

/// Pointwise evaluator of the exact solution that warm-starts fan inversion
/// from the previous query. Cheap to create; keep one per thread.
#[derive(Debug)]
pub struct ExactEvaluator<'a> {
    pattern: &'a RiemannPattern,
    seed1: Option<f64>,
    seed3: Option<f64>,
}

impl<'a> ExactEvaluator<'a> {
    pub fn new(pattern: &'a RiemannPattern) -> Self {
        ExactEvaluator { pattern, seed1: None, seed3: None }
    }

    pub fn eval(&mut self, t: f64, x: f64) -> State {
        debug_assert!(t > 0.0);
        let p = self.pattern;
        let xi = x / t;
        if xi < 0.0 {
            if xi <= p.fan1.head {
                p.left
            } else if xi < p.fan1.tail {
                let s = p.fan_state(Family::One, xi, self.seed1);
                self.seed1 = Some(s.v);
                s
            } else {
                p.star
            }
        } else if xi <= p.fan3.head {
            p.star_upper
        } else if xi < p.fan3.tail {
            let s = p.fan_state(Family::Three, xi, self.seed3);
            self.seed3 = Some(s.v);
            s
        } else {
            p.right
        }
    }
}
