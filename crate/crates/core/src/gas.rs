//! Ideal polytropic gas: equation of state, entropy, and the characteristic
//! speeds of the Lagrangian Euler system.

use crate::error::{Error, Result};

/// Adiabatic exponent and gas constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    gamma: f64,
    r: f64,
}

impl GasParams {
    pub fn new(gamma: f64, r: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::param("gamma", format!("must be finite and > 1, got {gamma}")));
        }
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::param("R", format!("must be finite and > 0, got {r}")));
        }
        Ok(GasParams { gamma, r })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Specific heat at constant volume, `R / (gamma - 1)`.
    pub fn cv(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }

    pub fn pressure(&self, s: &State) -> f64 {
        self.r * s.theta / s.v
    }

    pub fn internal_energy(&self, s: &State) -> f64 {
        self.cv() * s.theta
    }

    /// `R/(gamma-1) ln theta + R ln v`, normalised so the unit state has zero entropy.
    pub fn entropy(&self, s: &State) -> f64 {
        self.cv() * s.theta.ln() + self.r * s.v.ln()
    }

    /// Characteristic speed of the given family; family 2 is the contact.
    pub fn lambda(&self, s: &State, family: Family) -> f64 {
        match family {
            Family::One => -self.sound_speed(s.v, s.theta),
            Family::Two => 0.0,
            Family::Three => self.sound_speed(s.v, s.theta),
        }
    }

    /// Lagrangian sound speed `sqrt(gamma p / v)`.
    #[inline]
    pub fn sound_speed(&self, v: f64, theta: f64) -> f64 {
        (self.gamma * self.r * theta).sqrt() / v
    }

    /// Temperature at volume `v` on the isentrope through `reference`.
    pub fn theta_on_isentrope(&self, reference: &State, v: f64) -> f64 {
        reference.theta * (reference.v / v).powf(self.gamma - 1.0)
    }

    /// Volume at pressure `p` on the isentrope through `reference`.
    pub fn volume_at_pressure(&self, reference: &State, p: f64) -> f64 {
        reference.v * (self.pressure(reference) / p).powf(1.0 / self.gamma)
    }
}

/// Characteristic family of the Euler system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    One,
    Two,
    Three,
}

impl Family {
    /// Sign of the characteristic speed: -1, 0 or +1.
    pub fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Two => 0.0,
            Family::Three => 1.0,
        }
    }
}

/// A point `(v, u, theta)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl State {
    /// Checked constructor: `v` and `theta` positive, all components finite.
    pub fn new(v: f64, u: f64, theta: f64) -> Result<Self> {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::param("v", format!("specific volume must be finite and > 0, got {v}")));
        }
        if !u.is_finite() {
            return Err(Error::param("u", format!("velocity must be finite, got {u}")));
        }
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::param("theta", format!("temperature must be finite and > 0, got {theta}")));
        }
        Ok(State { v, u, theta })
    }

    /// Mirror image under `x -> -x`, `u -> -u`.
    pub fn reflect(&self) -> State {
        State { v: self.v, u: -self.u, theta: self.theta }
    }

    pub fn max_abs_diff(&self, other: &State) -> f64 {
        (self.v - other.v).abs().max((self.u - other.u).abs()).max((self.theta - other.theta).abs())
    }
}

/// Euclidean size of the jump between two states.
pub fn wave_strength(left: &State, right: &State) -> f64 {
    let dv = right.v - left.v;
    let du = right.u - left.u;
    let dt = right.theta - left.theta;
    (dv * dv + du * du + dt * dt).sqrt()
}
