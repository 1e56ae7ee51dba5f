//! Shared oracles for the integration and acceptance tests.
#![allow(dead_code)]

use visclimit::riemann::velocity_change_along_curve;
use visclimit::solver::{stable_dt, Field, Forcing, Grid1D, Mode, SolverConfig, Stepper};
use visclimit::{wave_strength, Family, GasParams, State};

pub fn monatomic() -> GasParams {
    GasParams::new(5.0 / 3.0, 1.0).unwrap()
}

/// Riemann data built outwards from the state left of the contact: the left
/// state is reached along the 1-rarefaction curve by shrinking the volume by
/// the factor `1 - d1`, the state right of the contact has temperature
/// `θ_*(1 + dtheta)` at the same pressure, and the right state follows along
/// the 3-rarefaction curve with volume factor `1 - d3`.
pub fn forward_data(g: &GasParams, star: &State, d1: f64, dtheta: f64, d3: f64) -> (State, State) {
    let p = g.pressure(star);
    let lv = star.v * (1.0 - d1);
    let left = State {
        v: lv,
        u: star.u + velocity_change_along_curve(g, star, lv, Family::One).unwrap(),
        theta: g.theta_on_isentrope(star, lv),
    };
    let th = star.theta * (1.0 + dtheta);
    let upper = State { v: g.r() * th / p, u: star.u, theta: th };
    let rv = upper.v * (1.0 - d3);
    let right = State {
        v: rv,
        u: upper.u + velocity_change_along_curve(g, &upper, rv, Family::Three).unwrap(),
        theta: g.theta_on_isentrope(&upper, rv),
    };
    (left, right)
}

/// Scales the three wave sizes by a common factor so that the total jump
/// `|right - left|` equals `delta`.
pub fn data_with_strength(g: &GasParams, star: &State, shape: (f64, f64, f64), delta: f64) -> (State, State) {
    let make = |k: f64| forward_data(g, star, k * shape.0, k * shape.1, k * shape.2);
    // Volume factors must stay positive; at 0.9 of the way the jump is far above any test strength.
    let largest = shape.0.abs().max(shape.1.abs()).max(shape.2.abs());
    let (mut lo, mut hi) = (0.0, 0.9 / largest);
    assert!(wave_strength(&make(hi).0, &make(hi).1) >= delta, "strength {delta} unreachable for {shape:?}");
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let (l, r) = make(mid);
        if wave_strength(&l, &r) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    make(0.5 * (lo + hi))
}

/// Smooth manufactured solution: a constant state plus Gaussian bumps
/// oscillating in time, negligible at `|y| = 8`.
#[derive(Clone, Copy)]
pub struct Manufactured {
    pub gas: GasParams,
    pub mu: f64,
    pub kappa: f64,
}

/// `(value, ∂_y, ∂_yy, ∂_τ)`.
type Jet4 = (f64, f64, f64, f64);

impl Manufactured {
    const V0: f64 = 1.0;
    const U0: f64 = 0.2;
    const T0: f64 = 1.0;

    fn gauss(y: f64) -> (f64, f64, f64) {
        let g = (-y * y).exp();
        (g, -2.0 * y * g, (4.0 * y * y - 2.0) * g)
    }

    pub fn v(&self, t: f64, y: f64) -> Jet4 {
        let (g, g1, g2) = Self::gauss(y);
        let a = 0.1 * (1.0 + 0.5 * t.sin());
        let at = 0.05 * t.cos();
        (Self::V0 + a * g, a * g1, a * g2, at * g)
    }

    pub fn u(&self, t: f64, y: f64) -> Jet4 {
        let (g, ..) = Self::gauss(y);
        let h = y * g;
        let h1 = (1.0 - 2.0 * y * y) * g;
        let h2 = (4.0 * y * y * y - 6.0 * y) * g;
        let b = 0.1 * t.cos();
        let bt = -0.1 * t.sin();
        (Self::U0 + b * h, b * h1, b * h2, bt * h)
    }

    pub fn theta(&self, t: f64, y: f64) -> Jet4 {
        let (g, g1, g2) = Self::gauss(y);
        let c = 0.1 * (1.0 - 0.3 * t.sin());
        let ct = -0.03 * t.cos();
        (Self::T0 + c * g, c * g1, c * g2, ct * g)
    }

    pub fn far_field(&self) -> State {
        State { v: Self::V0, u: Self::U0, theta: Self::T0 }
    }

    pub fn mass_source(&self, t: f64, y: f64) -> f64 {
        self.v(t, y).3 - self.u(t, y).1
    }

    pub fn momentum_source(&self, t: f64, y: f64) -> f64 {
        let (v, vy, _, _) = self.v(t, y);
        let (_, uy, uyy, ut) = self.u(t, y);
        let (th, thy, _, _) = self.theta(t, y);
        let r = self.gas.r();
        let py = r * (thy / v - th * vy / (v * v));
        ut + py - self.mu * (uyy / v - uy * vy / (v * v))
    }

    pub fn energy_source(&self, t: f64, y: f64) -> f64 {
        let (v, vy, _, _) = self.v(t, y);
        let (_, uy, _, _) = self.u(t, y);
        let (th, thy, thyy, tht) = self.theta(t, y);
        let p = self.gas.r() * th / v;
        self.gas.cv() * tht + p * uy - self.kappa * (thyy / v - thy * vy / (v * v)) - self.mu * uy * uy / v
    }

    /// Integrates the forced system on `[-8, 8]` with `n` cells to `t_end`
    /// and returns the largest `L²` error over the three fields.
    pub fn l2_error(&self, n: usize, t_end: f64) -> f64 {
        let grid = Grid1D::new(8.0, n).unwrap();
        let mut field = Field::from_fn(&grid, 0.0, |y| self.v(0.0, y).0, |y| self.u(0.0, y).0, |y| self.theta(0.0, y).0);
        let config = SolverConfig {
            mode: Mode::Physical { epsilon: self.mu, kappa: self.kappa },
            cfl: 0.4,
            smoothing_cells: 0,
            tau_end: t_end,
            snapshot_times: vec![],
        };
        let dt0 = stable_dt(&grid, &self.gas, &field, &config);
        let steps = (t_end / dt0).ceil() as usize;
        let dt = t_end / steps as f64;
        let far = self.far_field();
        let mut stepper = Stepper::new(grid, self.gas, config.mode, far, far);
        let (m, q, e) = (|t, y| self.mass_source(t, y), |t, y| self.momentum_source(t, y), |t, y| self.energy_source(t, y));
        let forcing = Forcing { mass: &m, momentum: &q, energy: &e };
        for _ in 0..steps {
            stepper.step_with_forcing(&mut field, dt, &forcing).unwrap();
        }
        let t = field.tau;
        let l2 = |e: f64| (e * grid.dy).sqrt();
        let ev = l2((0..n).map(|j| (field.v[j] - self.v(t, grid.cell_center(j)).0).powi(2)).sum());
        let et = l2((0..n).map(|j| (field.theta[j] - self.theta(t, grid.cell_center(j)).0).powi(2)).sum());
        let eu = l2((0..=n).map(|i| (field.u[i] - self.u(t, grid.node(i)).0).powi(2)).sum());
        ev.max(et).max(eu)
    }
}

/// Observed orders of the manufactured-solution errors over two grid doublings.
pub fn mms_orders(cells: [usize; 3], t_end: f64) -> ([f64; 3], [f64; 2]) {
    let m = Manufactured { gas: monatomic(), mu: 1.0, kappa: 1.0 };
    let e = cells.map(|n| m.l2_error(n, t_end));
    (e, [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()])
}
