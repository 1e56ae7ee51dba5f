//! Explicit staggered-grid integrator for the viscous, heat-conducting gas in
//! Lagrangian coordinates:
//!
//! ```text
//! v_τ - u_y = 0
//! u_τ + p_y = (μ u_y / v)_y
//! cv θ_τ + p u_y = κ (θ_y / v)_y + μ u_y² / v
//! ```
//!
//! with `(μ, κ) = (1, ν)` in scaled variables and `(ε, κ)` in physical ones.
//! Velocities live on nodes, volume and temperature on cells. Time stepping
//! is Heun's method; far-field values are frozen at the Riemann data.

use crate::error::{Error, Result};
use crate::gas::{Family, GasParams, State};
use crate::profiles::{NU_MAX, NU_MIN};

/// Width of the boundary strip watched for arriving waves.
pub const MONITOR_CELLS: usize = 5;
/// Largest admissible deviation from the far-field state inside the strip.
pub const MONITOR_TOL: f64 = 1e-6;

/// Uniform grid on `[-L, L]` with an even number of cells, so `y = 0` is a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub half_width: f64,
    pub n_cells: usize,
    pub dy: f64,
}

impl Grid1D {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::param("half_width", format!("must be finite and > 0, got {half_width}")));
        }
        if n_cells < 2 || n_cells % 2 != 0 {
            return Err(Error::param("n_cells", format!("must be even and >= 2, got {n_cells}")));
        }
        Ok(Grid1D { half_width, n_cells, dy: 2.0 * half_width / n_cells as f64 })
    }

    /// Centre of cell `j`, `0 <= j < n_cells`.
    #[inline]
    pub fn cell_center(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.dy
    }

    /// Position of node `i`, `0 <= i <= n_cells`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dy
    }

    /// Index of the node at `y = 0`.
    pub fn interface_index(&self) -> usize {
        self.n_cells / 2
    }
}

/// Solution at one time level. In physical mode `tau` holds the physical time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field {
    pub tau: f64,
    /// Specific volume per cell.
    pub v: Vec<f64>,
    /// Velocity per node (`n_cells + 1` values).
    pub u: Vec<f64>,
    /// Temperature per cell.
    pub theta: Vec<f64>,
}

impl Field {
    /// Samples the given functions at cell centres (`v`, `theta`) and nodes (`u`).
    pub fn from_fn(
        grid: &Grid1D,
        tau: f64,
        v: impl Fn(f64) -> f64,
        u: impl Fn(f64) -> f64,
        theta: impl Fn(f64) -> f64,
    ) -> Self {
        let n = grid.n_cells;
        Field {
            tau,
            v: (0..n).map(|j| v(grid.cell_center(j))).collect(),
            u: (0..=n).map(|i| u(grid.node(i))).collect(),
            theta: (0..n).map(|j| theta(grid.cell_center(j))).collect(),
        }
    }
}

/// Scaled or physical form of the equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Viscosity 1, heat conductivity `nu`.
    Scaled { nu: f64 },
    /// Viscosity `epsilon`, heat conductivity `kappa`.
    Physical { epsilon: f64, kappa: f64 },
}

impl Mode {
    /// `(viscosity, heat conductivity)`.
    pub fn coefficients(&self) -> (f64, f64) {
        match *self {
            Mode::Scaled { nu } => (1.0, nu),
            Mode::Physical { epsilon, kappa } => (epsilon, kappa),
        }
    }

    /// The ratio `κ/ε`, which equals `ν` in both forms.
    pub fn nu(&self) -> f64 {
        match *self {
            Mode::Scaled { nu } => nu,
            Mode::Physical { epsilon, kappa } => kappa / epsilon,
        }
    }

    /// Length and time unit: 1 in scaled variables, `ε` in physical ones.
    pub fn unit(&self) -> f64 {
        match *self {
            Mode::Scaled { .. } => 1.0,
            Mode::Physical { epsilon, .. } => epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    pub cfl: f64,
    /// Number of cells over which the initial jump is smoothed by a `tanh` ramp; 0 keeps it sharp.
    pub smoothing_cells: usize,
    pub tau_end: f64,
    /// Times at which to store the field, within `[0, tau_end]`.
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::Scaled { nu } => {
                if !(NU_MIN..=NU_MAX).contains(&nu) {
                    return Err(Error::param("nu", format!("must lie in [{NU_MIN}, {NU_MAX}], got {nu}")));
                }
            }
            Mode::Physical { epsilon, kappa } => {
                if !(epsilon > 0.0) || !epsilon.is_finite() {
                    return Err(Error::param("epsilon", format!("must be finite and > 0, got {epsilon}")));
                }
                if !(kappa > 0.0) || !kappa.is_finite() {
                    return Err(Error::param("kappa", format!("must be finite and > 0, got {kappa}")));
                }
                let nu = kappa / epsilon;
                if !(NU_MIN..=NU_MAX).contains(&nu) {
                    return Err(Error::param("kappa", format!("kappa/epsilon = {nu} outside [{NU_MIN}, {NU_MAX}]")));
                }
            }
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::param("cfl", format!("must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.tau_end > 0.0) || !self.tau_end.is_finite() {
            return Err(Error::param("tau_end", format!("must be finite and > 0, got {}", self.tau_end)));
        }
        if self.snapshot_times.iter().any(|&t| !(0.0..=self.tau_end).contains(&t)) {
            return Err(Error::param("snapshot_times", "every snapshot time must lie in [0, tau_end]"));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("snapshot_times", "must be strictly increasing"));
        }
        Ok(())
    }
}

/// Riemann data on the grid: left state in cells left of `y = 0`, right
/// state right of it. With `smoothing_cells > 0` the jump is replaced by a
/// `tanh` ramp of half-width `smoothing_cells * dy / 2`.
pub fn init_riemann(grid: &Grid1D, left: &State, right: &State, smoothing_cells: usize) -> Field {
    let blend = |a: f64, b: f64, y: f64| {
        if smoothing_cells == 0 {
            if y < 0.0 {
                a
            } else if y > 0.0 {
                b
            } else {
                0.5 * (a + b)
            }
        } else {
            let width = 0.5 * smoothing_cells as f64 * grid.dy;
            a + 0.5 * (b - a) * (1.0 + (y / width).tanh())
        }
    };
    Field::from_fn(
        grid,
        0.0,
        |y| blend(left.v, right.v, y),
        |y| blend(left.u, right.u, y),
        |y| blend(left.theta, right.theta, y),
    )
}

/// Largest time step allowed by the acoustic and the two parabolic limits.
pub fn stable_dt(grid: &Grid1D, gas: &GasParams, field: &Field, config: &SolverConfig) -> f64 {
    let (mu, kappa) = config.mode.coefficients();
    let mut lam_max = 0.0_f64;
    let mut v_min = f64::INFINITY;
    for (&v, &th) in field.v.iter().zip(&field.theta) {
        lam_max = lam_max.max(gas.sound_speed(v, th));
        v_min = v_min.min(v);
    }
    let dy = grid.dy;
    let acoustic = dy / lam_max;
    let momentum = dy * dy * v_min / (2.0 * mu);
    let energy = dy * dy * v_min * gas.r() / (2.0 * kappa * (gas.gamma() - 1.0));
    config.cfl * acoustic.min(momentum).min(energy)
}

/// Source terms added to the right-hand sides, as functions of `(τ, y)`.
/// The energy source enters `cv θ_τ`.
pub struct Forcing<'a> {
    pub mass: &'a dyn Fn(f64, f64) -> f64,
    pub momentum: &'a dyn Fn(f64, f64) -> f64,
    pub energy: &'a dyn Fn(f64, f64) -> f64,
}

/// Relative changes of the discrete totals over one step, net of boundary fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepDrift {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

#[derive(Debug, Default)]
struct Rates {
    v: Vec<f64>,
    u: Vec<f64>,
    theta: Vec<f64>,
    /// `σ_{N-1} - σ_0`: net momentum flux through the boundaries.
    momentum_flux: f64,
    /// Net total-energy flux through the boundaries.
    energy_flux: f64,
}

/// One Heun integrator bound to a grid, gas, coefficients and far-field data.
#[derive(Debug)]
pub struct Stepper {
    grid: Grid1D,
    gas: GasParams,
    mu: f64,
    kappa: f64,
    left: State,
    right: State,
    k1: Rates,
    k2: Rates,
    stage: Field,
    sigma: Vec<f64>,
    flux: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: Grid1D, gas: GasParams, mode: Mode, left: State, right: State) -> Self {
        let (mu, kappa) = mode.coefficients();
        let n = grid.n_cells;
        let rates = || Rates { v: vec![0.0; n], u: vec![0.0; n + 1], theta: vec![0.0; n], ..Default::default() };
        Stepper {
            grid,
            gas,
            mu,
            kappa,
            left,
            right,
            k1: rates(),
            k2: rates(),
            stage: Field { tau: 0.0, v: vec![0.0; n], u: vec![0.0; n + 1], theta: vec![0.0; n] },
            sigma: vec![0.0; n],
            flux: vec![0.0; n + 1],
        }
    }

    fn rates(&mut self, f: &Field, forcing: Option<&Forcing>, which: usize) {
        let n = self.grid.n_cells;
        let dy = self.grid.dy;
        let r = self.gas.r();
        let cv = self.gas.cv();
        let (mu, kappa) = (self.mu, self.kappa);
        let out = if which == 1 { &mut self.k1 } else { &mut self.k2 };
        let sigma = &mut self.sigma;
        let flux = &mut self.flux;

        for j in 0..n {
            let uy = (f.u[j + 1] - f.u[j]) / dy;
            sigma[j] = mu * uy / f.v[j] - r * f.theta[j] / f.v[j];
            out.v[j] = uy;
        }
        out.u[0] = 0.0;
        out.u[n] = 0.0;
        for i in 1..n {
            out.u[i] = (sigma[i] - sigma[i - 1]) / dy;
        }
        for i in 0..=n {
            let (th_l, v_l) = if i == 0 { (self.left.theta, self.left.v) } else { (f.theta[i - 1], f.v[i - 1]) };
            let (th_r, v_r) = if i == n { (self.right.theta, self.right.v) } else { (f.theta[i], f.v[i]) };
            flux[i] = kappa * (th_r - th_l) / (dy * 0.5 * (v_l + v_r));
        }
        for j in 0..n {
            let uy = out.v[j];
            let p = r * f.theta[j] / f.v[j];
            out.theta[j] = ((flux[j + 1] - flux[j]) / dy - p * uy + mu * uy * uy / f.v[j]) / cv;
        }
        out.momentum_flux = sigma[n - 1] - sigma[0];
        out.energy_flux = sigma[n - 1] * f.u[n] + flux[n] - sigma[0] * f.u[0] - flux[0];

        if let Some(src) = forcing {
            for j in 0..n {
                let y = self.grid.cell_center(j);
                out.v[j] += (src.mass)(f.tau, y);
                out.theta[j] += (src.energy)(f.tau, y) / cv;
            }
            for i in 1..n {
                out.u[i] += (src.momentum)(f.tau, self.grid.node(i));
            }
        }
    }

    fn totals(&self, f: &Field) -> ([f64; 3], [f64; 3]) {
        let dy = self.grid.dy;
        let cv = self.gas.cv();
        let n = self.grid.n_cells;
        let (mut m, mut mabs, mut q, mut qabs, mut e, mut eabs) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for j in 0..n {
            m += f.v[j];
            mabs += f.v[j].abs();
            let ke = 0.25 * (f.u[j] * f.u[j] + f.u[j + 1] * f.u[j + 1]);
            e += cv * f.theta[j] + ke;
            eabs += cv * f.theta[j] + ke;
        }
        for i in 1..n {
            q += f.u[i];
            qabs += f.u[i].abs();
        }
        ([m * dy, q * dy, e * dy], [mabs * dy, qabs * dy, eabs * dy])
    }

    /// Advances `field` by `dt`. Positivity is checked after both stages.
    pub fn step(&mut self, field: &mut Field, dt: f64) -> Result<StepDrift> {
        self.advance(field, dt, None)
    }

    /// As [`Stepper::step`] with source terms; drift is not meaningful and reported as zero.
    pub fn step_with_forcing(&mut self, field: &mut Field, dt: f64, forcing: &Forcing) -> Result<()> {
        self.advance(field, dt, Some(forcing)).map(|_| ())
    }

    fn advance(&mut self, field: &mut Field, dt: f64, forcing: Option<&Forcing>) -> Result<StepDrift> {
        let (before, scale) = self.totals(field);
        self.rates(field, forcing, 1);
        {
            let s = &mut self.stage;
            s.tau = field.tau + dt;
            for j in 0..field.v.len() {
                s.v[j] = field.v[j] + dt * self.k1.v[j];
                s.theta[j] = field.theta[j] + dt * self.k1.theta[j];
            }
            for i in 0..field.u.len() {
                s.u[i] = field.u[i] + dt * self.k1.u[i];
            }
        }
        check_positive(&self.grid, &self.stage)?;
        let stage = std::mem::take(&mut self.stage);
        self.rates(&stage, forcing, 2);
        self.stage = stage;
        for j in 0..field.v.len() {
            field.v[j] = 0.5 * (field.v[j] + self.stage.v[j] + dt * self.k2.v[j]);
            field.theta[j] = 0.5 * (field.theta[j] + self.stage.theta[j] + dt * self.k2.theta[j]);
        }
        for i in 0..field.u.len() {
            field.u[i] = 0.5 * (field.u[i] + self.stage.u[i] + dt * self.k2.u[i]);
        }
        field.tau += dt;
        check_positive(&self.grid, field)?;

        if forcing.is_some() {
            return Ok(StepDrift::default());
        }
        let n = self.grid.n_cells;
        let (after, _) = self.totals(field);
        let mass_flux = dt * (field.u[n] - field.u[0]);
        let momentum_flux = 0.5 * dt * (self.k1.momentum_flux + self.k2.momentum_flux);
        let energy_flux = 0.5 * dt * (self.k1.energy_flux + self.k2.energy_flux);
        let rel = |d: f64, s: f64| if s > 0.0 { d.abs() / s } else { d.abs() };
        Ok(StepDrift {
            mass: rel(after[0] - before[0] - mass_flux, scale[0]),
            momentum: rel(after[1] - before[1] - momentum_flux, scale[1] + momentum_flux.abs()),
            energy: rel(after[2] - before[2] - energy_flux, scale[2]),
        })
    }

    /// Fails if the outermost cells or nodes have left the far-field state.
    pub fn check_boundaries(&self, field: &Field) -> Result<()> {
        let n = self.grid.n_cells;
        let m = MONITOR_CELLS.min(n / 2);
        let sides = [(0..m, &self.left), (n - m..n, &self.right)];
        for (range, far) in sides {
            for j in range {
                let dev = (field.v[j] - far.v).abs().max((field.theta[j] - far.theta).abs());
                let i = if j < n / 2 { j } else { j + 1 };
                let dev = dev.max((field.u[i] - far.u).abs());
                if dev > MONITOR_TOL {
                    return Err(Error::BoundaryReached { tau: field.tau, y: self.grid.cell_center(j), deviation: dev });
                }
            }
        }
        Ok(())
    }
}

fn check_positive(grid: &Grid1D, f: &Field) -> Result<()> {
    for j in 0..f.v.len() {
        if !(f.v[j] > 0.0) {
            return Err(Error::Positivity { tau: f.tau, y: grid.cell_center(j), what: "v", value: f.v[j] });
        }
        if !(f.theta[j] > 0.0) {
            return Err(Error::Positivity { tau: f.tau, y: grid.cell_center(j), what: "theta", value: f.theta[j] });
        }
    }
    if let Some(i) = f.u.iter().position(|x| !x.is_finite()) {
        return Err(Error::Positivity { tau: f.tau, y: grid.node(i), what: "u", value: f.u[i] });
    }
    Ok(())
}

/// Bookkeeping of a run, kept even when the run aborts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunStats {
    pub steps: usize,
    pub tau_reached: f64,
    pub max_mass_drift: f64,
    pub max_momentum_drift: f64,
    /// Reported only: the temperature equation is not in conservation form.
    pub max_energy_drift: f64,
}

impl RunStats {
    /// Largest per-step drift of the exactly conserved quantities (mass, momentum).
    pub fn conservation_drift(&self) -> f64 {
        self.max_mass_drift.max(self.max_momentum_drift)
    }
}

#[derive(Debug)]
pub struct Run {
    pub grid: Grid1D,
    pub snapshots: Vec<Field>,
    pub stats: RunStats,
    /// Why the run stopped early, if it did.
    pub abort: Option<Error>,
}

/// Half-width the waves need by `tau_end`: `max|λ| (1 + τ_end) + 10` in scaled
/// units, `max|λ| (ε + t_end) + 10 ε` in physical ones.
pub fn required_half_width(gas: &GasParams, left: &State, right: &State, config: &SolverConfig) -> f64 {
    let lam = gas.lambda(left, Family::Three).max(gas.lambda(right, Family::Three));
    let unit = config.mode.unit();
    lam * (unit + config.tau_end) + 10.0 * unit
}

/// Integrates from Riemann data to `tau_end`, landing exactly on each
/// snapshot time. Invalid configuration is an `Err`; runtime aborts are
/// recorded in [`Run::abort`] together with the snapshots taken so far.
pub fn run(grid: &Grid1D, gas: &GasParams, config: &SolverConfig, left: &State, right: &State) -> Result<Run> {
    config.validate()?;
    let needed = required_half_width(gas, left, right, config);
    if needed >= grid.half_width {
        return Err(Error::DomainTooSmall { needed, have: grid.half_width });
    }
    let mut field = init_riemann(grid, left, right, config.smoothing_cells);
    let mut stepper = Stepper::new(*grid, *gas, config.mode, *left, *right);
    let mut out = Run { grid: *grid, snapshots: Vec::new(), stats: RunStats::default(), abort: None };
    let mut targets = config.snapshot_times.iter().copied().peekable();
    while targets.peek() == Some(&0.0) {
        out.snapshots.push(field.clone());
        targets.next();
    }
    while field.tau < config.tau_end {
        let next = targets.peek().copied().unwrap_or(config.tau_end);
        let mut dt = stable_dt(grid, gas, &field, config);
        let landing = field.tau + dt >= next - 1e-9 * dt;
        if landing {
            dt = next - field.tau;
        }
        match stepper.step(&mut field, dt).and_then(|d| stepper.check_boundaries(&field).map(|_| d)) {
            Ok(d) => {
                let s = &mut out.stats;
                s.steps += 1;
                s.max_mass_drift = s.max_mass_drift.max(d.mass);
                s.max_momentum_drift = s.max_momentum_drift.max(d.momentum);
                s.max_energy_drift = s.max_energy_drift.max(d.energy);
            }
            Err(e) => {
                out.stats.tau_reached = field.tau;
                out.abort = Some(e);
                return Ok(out);
            }
        }
        if landing {
            field.tau = next;
            if targets.peek() == Some(&next) {
                out.snapshots.push(field.clone());
                targets.next();
            }
        }
    }
    out.stats.tau_reached = field.tau;
    Ok(out)
}

/// Like [`run`], but any abort becomes the error.
pub fn integrate(grid: &Grid1D, gas: &GasParams, config: &SolverConfig, left: &State, right: &State) -> Result<Vec<Field>> {
    let r = run(grid, gas, config, left, right)?;
    match r.abort {
        Some(e) => Err(e),
        None => Ok(r.snapshots),
    }
}
