//! Smooth wave profiles of the viscous system: the viscous contact wave, the
//! approximate rarefactions built on smoothed Burgers fans, their
//! superposition, and the residuals they leave in the scaled equations
//!
//! ```text
//! V_τ - U_y = 0
//! U_τ + P_y = (U_y / V)_y
//! cv Θ_τ + P U_y = ν (Θ_y / V)_y + U_y² / V
//! ```
//!
//! Every evaluator returns [`Jet`]s (value, `∂_y`, `∂_yy`, `∂_τ`) computed by
//! chain rules, so residuals are exact up to interpolation of the tabulated
//! self-similar contact profile.

mod burgers;
mod self_similar;

pub use burgers::{burgers_exact, burgers_smooth, BurgersPoint};
pub use self_similar::{half_width_for, solve_self_similar, SelfSimilarProfile, DEFAULT_HALF_WIDTH, DEFAULT_POINTS};

use crate::error::{Error, Result};
use crate::gas::{Family, GasParams, State};
use crate::riemann::{invert_speed, velocity_change_along_curve, RiemannPattern, ZERO_WAVE_WIDTH};

/// Admissible range of the scaled heat conductivity `ν = κ/ε`.
pub const NU_MIN: f64 = 1e-3;
pub const NU_MAX: f64 = 1e3;

/// A scalar field with its first and second `y` derivatives and its `τ` derivative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub val: f64,
    pub y: f64,
    pub yy: f64,
    pub t: f64,
}

impl Jet {
    pub fn constant(val: f64) -> Self {
        Jet { val, y: 0.0, yy: 0.0, t: 0.0 }
    }

    fn scale(self, k: f64) -> Self {
        Jet { val: k * self.val, y: k * self.y, yy: k * self.yy, t: k * self.t }
    }

    fn add(self, o: Jet) -> Self {
        Jet { val: self.val + o.val, y: self.y + o.y, yy: self.yy + o.yy, t: self.t + o.t }
    }
}

/// `(V, U, Θ)` jets at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub v: Jet,
    pub u: Jet,
    pub theta: Jet,
}

impl ProfilePoint {
    pub fn constant(s: &State) -> Self {
        ProfilePoint { v: Jet::constant(s.v), u: Jet::constant(s.u), theta: Jet::constant(s.theta) }
    }

    pub fn state(&self) -> State {
        State { v: self.v.val, u: self.u.val, theta: self.theta.val }
    }
}

/// Defects left by a profile in the mass, momentum and energy equations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Defects {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

/// Residuals of the superposed profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// `V_τ - U_y`; zero up to interpolation error.
    pub mass: f64,
    pub q1: f64,
    pub q2: f64,
    /// Energy defect of the viscous contact wave alone.
    pub q_cd: f64,
}

/// Everything needed to evaluate the approximate wave pattern of one set of
/// Riemann data at a given heat conductivity.
#[derive(Debug, Clone)]
pub struct WaveProfileSet {
    pub gas: GasParams,
    pub nu: f64,
    pub pattern: RiemannPattern,
    pub contact: SelfSimilarProfile,
    /// End speeds `(λ₁(left), λ₁(star))` of the 1-fan.
    pub burgers1: (f64, f64),
    /// End speeds `(λ₃(star_upper), λ₃(right))` of the 3-fan.
    pub burgers3: (f64, f64),
}

impl WaveProfileSet {
    pub fn new(pattern: &RiemannPattern, nu: f64) -> Result<Self> {
        Self::with_resolution(pattern, nu, DEFAULT_POINTS)
    }

    /// Like [`WaveProfileSet::new`] with an explicit number of contact-profile grid points.
    pub fn with_resolution(pattern: &RiemannPattern, nu: f64, n_points: usize) -> Result<Self> {
        if !(NU_MIN..=NU_MAX).contains(&nu) {
            return Err(Error::param("nu", format!("must lie in [{NU_MIN}, {NU_MAX}], got {nu}")));
        }
        let g = pattern.gas;
        let a = nu * pattern.p_contact * (g.gamma() - 1.0) / (g.r() * g.r() * g.gamma());
        let (tl, tr) = (pattern.star.theta, pattern.star_upper.theta);
        let contact = if tl == tr {
            SelfSimilarProfile::constant(tl, a)
        } else {
            solve_self_similar(tl, tr, a, half_width_for(tl, tr, a), n_points)?
        };
        let burgers1 = (g.lambda(&pattern.left, Family::One), g.lambda(&pattern.star, Family::One));
        let burgers3 = (g.lambda(&pattern.star_upper, Family::Three), g.lambda(&pattern.right, Family::Three));
        Ok(WaveProfileSet { gas: g, nu, pattern: pattern.clone(), contact, burgers1, burgers3 })
    }

    /// Diffusion coefficient `ν p (γ-1) / (R² γ)` of the contact problem.
    pub fn diffusion_coefficient(&self) -> f64 {
        self.contact.a
    }

    /// Viscous contact wave between the two intermediate states.
    pub fn viscous_contact_eval(&self, tau: f64, y: f64) -> ProfilePoint {
        let g = &self.gas;
        let p = self.pattern.p_contact;
        let u_c = self.pattern.star_upper.u;
        if self.contact.is_constant() {
            let th = self.contact.theta_left;
            return ProfilePoint::constant(&State { v: g.r() * th / p, u: u_c, theta: th });
        }
        let s = 1.0 + tau;
        let rs = s.sqrt();
        let xi = y / rs;
        let [t0, t1, t2, t3] = self.contact.eval(xi);

        let hat = Jet { val: t0, y: t1 / rs, yy: t2 / s, t: -xi * t1 / (2.0 * s) };

        // q = Θ̂_y / Θ̂ = r(ξ) / sqrt(s) with r = Θ̂'/Θ̂
        let r0 = t1 / t0;
        let r1 = t2 / t0 - r0 * r0;
        let r2 = t3 / t0 - 3.0 * t1 * t2 / (t0 * t0) + 2.0 * r0 * r0 * r0;
        let s32 = s * rs;
        let q = Jet { val: r0 / rs, y: r1 / s, yy: r2 / s32, t: -(r0 + xi * r1) / (2.0 * s32) };

        // g = Θ̂_τ = -h(ξ) / (2s) with h = ξ Θ̂'
        let h0 = xi * t1;
        let h1 = t1 + xi * t2;
        let h2 = 2.0 * t2 + xi * t3;
        let s2 = s * s;
        let gt = Jet {
            val: -h0 / (2.0 * s),
            y: -h1 / (2.0 * s32),
            yy: -h2 / (2.0 * s2),
            t: (h0 + 0.5 * xi * h1) / (2.0 * s2),
        };

        let (gm, r) = (g.gamma(), g.r());
        let c_u = self.nu * (gm - 1.0) / (r * gm);
        let k = (r * gm - self.nu * (gm - 1.0)) / (r * gm * p);
        let mut u = q.scale(c_u);
        u.val += u_c;
        ProfilePoint { v: hat.scale(r / p), u, theta: hat.add(gt.scale(k)) }
    }

    /// Approximate rarefaction of the given family (1 or 3), built from the
    /// smoothed Burgers solution at time `1 + τ`.
    pub fn approx_rarefaction_eval(&self, family: Family, tau: f64, y: f64) -> ProfilePoint {
        let g = &self.gas;
        let pat = &self.pattern;
        let ((w_minus, w_plus), anchor, other) = match family {
            Family::One => (self.burgers1, &pat.star, &pat.left),
            Family::Three => (self.burgers3, &pat.right, &pat.star_upper),
            Family::Two => panic!("the contact family has no rarefaction profile"),
        };
        if (anchor.v - other.v).abs() < ZERO_WAVE_WIDTH || w_plus <= w_minus {
            return ProfilePoint::constant(anchor);
        }
        let b = burgers_smooth(w_minus, w_plus, 1.0 + tau, y);
        // Far enough out the Burgers value rounds to an end speed; use the end
        // state. Both anchors sit on the `w_plus` side.
        let (near_anchor, near_other) = (b.below_plus, b.above_minus);
        let v = if near_anchor == 0.0 {
            anchor.v
        } else if near_other == 0.0 {
            other.v
        } else {
            invert_speed(g, anchor, family, b.w, anchor.v, other.v, None)
                .expect("Burgers value lies between the fan end speeds")
        };
        let theta = g.theta_on_isentrope(anchor, v);
        let du = velocity_change_along_curve(g, anchor, v, family)
            .expect("velocity integral of a power law converges");

        let gm = g.gamma();
        let lam = b.w;
        let lam_v = -0.5 * (gm + 1.0) * lam / v;
        let lam_vv = 0.25 * (gm + 1.0) * (gm + 3.0) * lam / (v * v);
        let v_y = b.w_y / lam_v;
        let v_t = b.w_tau / lam_v;
        let v_yy = (b.w_yy - lam_vv * v_y * v_y) / lam_v;
        let th_v = -(gm - 1.0) * theta / v;
        let th_vv = gm * (gm - 1.0) * theta / (v * v);
        ProfilePoint {
            v: Jet { val: v, y: v_y, yy: v_yy, t: v_t },
            u: Jet { val: anchor.u + du, y: -lam * v_y, yy: -(b.w_y * v_y + lam * v_yy), t: -lam * v_t },
            theta: Jet { val: theta, y: th_v * v_y, yy: th_vv * v_y * v_y + th_v * v_yy, t: th_v * v_t },
        }
    }

    /// The three single-wave profiles at `(τ, y)`: 1-rarefaction, contact, 3-rarefaction.
    pub fn components(&self, tau: f64, y: f64) -> [ProfilePoint; 3] {
        [
            self.approx_rarefaction_eval(Family::One, tau, y),
            self.viscous_contact_eval(tau, y),
            self.approx_rarefaction_eval(Family::Three, tau, y),
        ]
    }

    fn superpose(&self, parts: &[ProfilePoint; 3]) -> ProfilePoint {
        let (a, b) = (&self.pattern.star, &self.pattern.star_upper);
        let sum = |f: fn(&ProfilePoint) -> Jet, c: f64| {
            let mut j = f(&parts[0]).add(f(&parts[1])).add(f(&parts[2]));
            j.val -= c;
            j
        };
        ProfilePoint {
            v: sum(|p| p.v, a.v + b.v),
            u: sum(|p| p.u, a.u + b.u),
            theta: sum(|p| p.theta, a.theta + b.theta),
        }
    }

    /// Superposed wave pattern. Fails if the sum loses positivity, which
    /// signals waves too strong for the ansatz.
    pub fn superposition_eval(&self, tau: f64, y: f64) -> Result<ProfilePoint> {
        let p = self.superpose(&self.components(tau, y));
        if !(p.v.val > 0.0 && p.theta.val > 0.0) {
            return Err(Error::ProfilePositivity { tau, y });
        }
        Ok(p)
    }

    /// Defects of an arbitrary profile in the scaled viscous system.
    pub fn defects(&self, p: &ProfilePoint) -> Defects {
        let r = self.gas.r();
        let (v, u, th) = (&p.v, &p.u, &p.theta);
        let pres = r * th.val / v.val;
        let p_y = r * (th.y / v.val - th.val * v.y / (v.val * v.val));
        let visc_y = u.yy / v.val - u.y * v.y / (v.val * v.val);
        let heat_y = th.yy / v.val - th.y * v.y / (v.val * v.val);
        Defects {
            mass: v.t - u.y,
            momentum: u.t + p_y - visc_y,
            energy: self.gas.cv() * th.t + pres * u.y - self.nu * heat_y - u.y * u.y / v.val,
        }
    }

    /// `Q^CD`: energy defect of the viscous contact wave alone.
    pub fn contact_defect(&self, tau: f64, y: f64) -> f64 {
        self.defects(&self.viscous_contact_eval(tau, y)).energy
    }

    /// Residuals of the superposed pattern from analytic derivatives.
    pub fn residuals(&self, tau: f64, y: f64) -> Residuals {
        let parts = self.components(tau, y);
        let d = self.defects(&self.superpose(&parts));
        Residuals { mass: d.mass, q1: d.momentum, q2: d.energy, q_cd: self.defects(&parts[1]).energy }
    }

    /// Residuals recomputed with central differences (step `1e-5 (1 + |y|)` in
    /// `y`, `1e-5 (1 + τ)` in `τ`) applied to the profile values only.
    pub fn residuals_fd(&self, tau: f64, y: f64) -> Residuals {
        let hy = 1e-5 * (1.0 + y.abs());
        let ht = 1e-5 * (1.0 + tau);
        let vals = |t: f64, x: f64| {
            let parts = self.components(t, x);
            (self.superpose(&parts).state(), parts[1].state())
        };
        let fd = |which: fn(&(State, State)) -> State| {
            let c = which(&vals(tau, y));
            let yp = which(&vals(tau, y + hy));
            let ym = which(&vals(tau, y - hy));
            let tp = which(&vals(tau + ht, y));
            let tm = which(&vals(tau - ht, y));
            let jet = |f: fn(&State) -> f64| Jet {
                val: f(&c),
                y: (f(&yp) - f(&ym)) / (2.0 * hy),
                yy: (f(&yp) - 2.0 * f(&c) + f(&ym)) / (hy * hy),
                t: (f(&tp) - f(&tm)) / (2.0 * ht),
            };
            ProfilePoint { v: jet(|s| s.v), u: jet(|s| s.u), theta: jet(|s| s.theta) }
        };
        let d = self.defects(&fd(|p| p.0));
        let dc = self.defects(&fd(|p| p.1));
        Residuals { mass: d.mass, q1: d.momentum, q2: d.energy, q_cd: dc.energy }
    }

    /// Momentum and energy residuals of the superposition minus those of the
    /// three waves taken separately: the wave-interaction parts.
    pub fn interaction_parts(&self, tau: f64, y: f64) -> (f64, f64) {
        let parts = self.components(tau, y);
        let total = self.defects(&self.superpose(&parts));
        let single: Vec<Defects> = parts.iter().map(|p| self.defects(p)).collect();
        let m: f64 = single.iter().map(|d| d.momentum).sum();
        let e: f64 = single.iter().map(|d| d.energy).sum();
        (total.momentum - m, total.energy - e)
    }
}
