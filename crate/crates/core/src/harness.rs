//! Experiments comparing solver output with the exact inviscid solution and
//! with the smooth wave profiles.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gas::{GasParams, State};
use crate::numerics::fit_line;
use crate::profiles::WaveProfileSet;
use crate::riemann::{solve_pattern, ExactEvaluator, RiemannPattern};
use crate::solver::{run, Field, Grid1D, Mode, SolverConfig};

/// Fits ignore snapshots earlier than this.
pub const FIT_START: f64 = 5.0;
/// Interface jumps below this are treated as zero.
pub const JUMP_FLOOR: f64 = 1e-12;
/// Environment variable capping the number of sweep threads.
pub const THREADS_ENV: &str = "VISCLIMIT_THREADS";

/// The set `t >= h`, `|x| / sqrt(ε + t) >= h ε^α` (or `x` instead of `|x|`
/// when `one_sided`), which stays away from the initial time and the contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRegion {
    pub h: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub one_sided: bool,
}

impl SigmaRegion {
    pub fn new(h: f64, alpha: f64, epsilon: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::param("h", format!("must be finite and > 0, got {h}")));
        }
        if !(0.0..0.5).contains(&alpha) {
            return Err(Error::param("alpha", format!("must lie in [0, 1/2), got {alpha}")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::param("epsilon", format!("must be finite and > 0, got {epsilon}")));
        }
        Ok(SigmaRegion { h, alpha, epsilon, one_sided: false })
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        let d = if self.one_sided { x } else { x.abs() };
        t >= self.h && d / (self.epsilon + t).sqrt() >= self.h * self.epsilon.powf(self.alpha)
    }
}

/// How a [`DecaySeries`] is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    /// `ln value` against `ln τ`; the rate is the exponent.
    Power,
    /// `ln value` against `τ`; the rate is the exponential rate.
    Exponential,
}

/// A nonnegative quantity sampled at increasing times, with a log fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: FitKind,
    /// Slope of the fit; NaN when fewer than two points fall in the window.
    pub fitted_rate: f64,
    /// Coefficient of determination of the fit; NaN without a fit.
    pub fit_quality: f64,
    /// Set when the series was cut at [`JUMP_FLOOR`].
    pub hit_floor: bool,
}

impl DecaySeries {
    /// Fits the points with `lo <= τ <= hi` and positive values.
    pub fn fitted(times: Vec<f64>, values: Vec<f64>, kind: FitKind, lo: f64, hi: f64) -> Self {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (&t, &v) in times.iter().zip(&values) {
            if t >= lo && t <= hi && v > 0.0 {
                xs.push(match kind {
                    FitKind::Power => t.ln(),
                    FitKind::Exponential => t,
                });
                ys.push(v.ln());
            }
        }
        let (fitted_rate, fit_quality) = match fit_line(&xs, &ys) {
            Some(f) => (f.slope, f.r2),
            None => (f64::NAN, f64::NAN),
        };
        DecaySeries { times, values, kind, fitted_rate, fit_quality, hit_floor: false }
    }

    /// Value at the given time, if sampled.
    pub fn at(&self, tau: f64) -> Option<f64> {
        self.times.iter().position(|&t| t == tau).map(|i| self.values[i])
    }
}

/// Largest componentwise distance to the exact solution over grid points
/// (cells for `v`, `θ`; nodes for `u`) inside the region. Snapshots must come
/// from a physical-mode run at the region's `ε`.
pub fn sup_error_sigma(grid: &Grid1D, snapshots: &[Field], pattern: &RiemannPattern, region: &SigmaRegion) -> Result<f64> {
    let mut eval = ExactEvaluator::new(pattern);
    let mut worst: Option<f64> = None;
    for f in snapshots {
        let t = f.tau;
        if !(t >= region.h) {
            continue;
        }
        for j in 0..grid.n_cells {
            let x = grid.cell_center(j);
            if region.contains(t, x) {
                let e = eval.eval(t, x);
                let d = (f.v[j] - e.v).abs().max((f.theta[j] - e.theta).abs());
                worst = Some(worst.map_or(d, |w| w.max(d)));
            }
        }
        for i in 0..=grid.n_cells {
            let x = grid.node(i);
            if region.contains(t, x) {
                let d = (f.u[i] - eval.eval(t, x).u).abs();
                worst = Some(worst.map_or(d, |w| w.max(d)));
            }
        }
    }
    worst.ok_or(Error::EmptyRegion)
}

/// Sup-norm distance from each scaled-mode snapshot to the superposed
/// profile, with a power-law fit of the later half of the snapshots at `τ >= 5`.
pub fn asymptotic_gap(grid: &Grid1D, snapshots: &[Field], set: &WaveProfileSet) -> Result<DecaySeries> {
    let mut times = Vec::with_capacity(snapshots.len());
    let mut values = Vec::with_capacity(snapshots.len());
    for f in snapshots {
        times.push(f.tau);
        values.push(sup_gap(grid, f, set)?);
    }
    let window: Vec<f64> = times.iter().copied().filter(|&t| t >= FIT_START).collect();
    let lo = window.get(window.len() / 2).copied().unwrap_or(f64::INFINITY);
    Ok(DecaySeries::fitted(times, values, FitKind::Power, lo, f64::INFINITY))
}

fn sup_gap(grid: &Grid1D, f: &Field, set: &WaveProfileSet) -> Result<f64> {
    let mut worst = 0.0_f64;
    for j in 0..grid.n_cells {
        let p = set.superposition_eval(f.tau, grid.cell_center(j))?;
        worst = worst.max((f.v[j] - p.v.val).abs()).max((f.theta[j] - p.theta.val).abs());
    }
    for i in 0..=grid.n_cells {
        let p = set.superposition_eval(f.tau, grid.node(i))?;
        worst = worst.max((f.u[i] - p.u.val).abs());
    }
    Ok(worst)
}

/// Interface jumps of `v`, `u_y` and `θ_y` at `y = 0`, each with an
/// exponential fit over `5 <= τ <= τ_last / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSeries {
    pub v: DecaySeries,
    pub u_y: DecaySeries,
    pub theta_y: DecaySeries,
}

/// The jump across `y = 0` is read from the two cells adjacent to the
/// interface node; a grid smears the true discontinuity, so this is a proxy.
pub fn jump_series(grid: &Grid1D, snapshots: &[Field]) -> JumpSeries {
    let k = grid.interface_index();
    let dy = grid.dy;
    let mut raw: [Vec<f64>; 3] = Default::default();
    let times: Vec<f64> = snapshots.iter().map(|f| f.tau).collect();
    for f in snapshots {
        raw[0].push((f.v[k] - f.v[k - 1]).abs());
        let uy_r = (f.u[k + 1] - f.u[k]) / dy;
        let uy_l = (f.u[k] - f.u[k - 1]) / dy;
        raw[1].push((uy_r - uy_l).abs());
        let ty_r = if k + 1 < grid.n_cells { (f.theta[k + 1] - f.theta[k]) / dy } else { 0.0 };
        let ty_l = if k >= 2 { (f.theta[k - 1] - f.theta[k - 2]) / dy } else { 0.0 };
        raw[2].push((ty_r - ty_l).abs());
    }
    let hi = 0.5 * times.last().copied().unwrap_or(0.0);
    let [v, u_y, theta_y] = raw.map(|values| {
        let cut = values.iter().position(|&x| x < JUMP_FLOOR);
        let (t, mut vals) = match cut {
            Some(c) => (times[..=c].to_vec(), values[..=c].to_vec()),
            None => (times.clone(), values),
        };
        if cut.is_some() {
            *vals.last_mut().unwrap() = JUMP_FLOOR;
        }
        let mut s = DecaySeries::fitted(t, vals, FitKind::Exponential, FIT_START, hi);
        s.hit_floor = cut.is_some();
        s
    });
    JumpSeries { v, u_y, theta_y }
}

/// Discrete norms of the perturbation `(φ, ψ, ζ) = (v, u, θ) - (V, U, Θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationNorms {
    pub l2: f64,
    /// `L²` norm of the difference quotients, skipping the cell pair astride `y = 0`.
    pub l2_deriv: f64,
    pub linf: f64,
}

pub fn perturbation_norms(grid: &Grid1D, f: &Field, set: &WaveProfileSet) -> Result<PerturbationNorms> {
    let n = grid.n_cells;
    let dy = grid.dy;
    let mut phi = Vec::with_capacity(n);
    let mut zeta = Vec::with_capacity(n);
    for j in 0..n {
        let p = set.superposition_eval(f.tau, grid.cell_center(j))?;
        phi.push(f.v[j] - p.v.val);
        zeta.push(f.theta[j] - p.theta.val);
    }
    let mut psi = Vec::with_capacity(n + 1);
    for i in 0..=n {
        psi.push(f.u[i] - set.superposition_eval(f.tau, grid.node(i))?.u.val);
    }
    let sq = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>();
    let l2 = ((sq(&phi) + sq(&psi) + sq(&zeta)) * dy).sqrt();
    let k = grid.interface_index();
    let mut d2 = 0.0;
    for j in 0..n - 1 {
        if j + 1 == k {
            continue;
        }
        d2 += (phi[j + 1] - phi[j]).powi(2) + (zeta[j + 1] - zeta[j]).powi(2);
    }
    d2 += psi.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>();
    let linf = phi.iter().chain(&psi).chain(&zeta).fold(0.0_f64, |m, x| m.max(x.abs()));
    Ok(PerturbationNorms { l2, l2_deriv: (d2 / dy).sqrt(), linf })
}

/// Fixed part of a zero-dissipation sweep; `ε` varies per row with `κ = ν ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepBase {
    pub gas: GasParams,
    pub left: State,
    pub right: State,
    pub nu: f64,
    pub cfl: f64,
    pub smoothing_cells: usize,
    /// Physical half-width of the domain.
    pub half_width: f64,
    /// Grid spacing in scaled units; the physical spacing is `ε` times this.
    pub dy_scaled: f64,
    pub t_end: f64,
    /// Physical snapshot times.
    pub snapshot_times: Vec<f64>,
    pub h: f64,
    pub alpha: f64,
    pub one_sided: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub kappa: f64,
    pub nu: f64,
    pub h: f64,
    pub alpha: f64,
    /// NaN when the row failed.
    pub sup_error: f64,
    pub n_cells: usize,
    pub steps: usize,
    pub drift: f64,
    pub wall_seconds: f64,
    /// `ok`, or the reason the row failed.
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Number of cells for a given `ε`: the smallest even count with spacing at most `ε dy_scaled`.
pub fn sweep_cells(base: &SweepBase, epsilon: f64) -> usize {
    let n = (2.0 * base.half_width / (epsilon * base.dy_scaled)).ceil() as usize;
    n + n % 2
}

/// Runs one physical-mode integration per `ε`, concurrently, and returns the
/// rows in input order. A failing row is flagged; the others go on.
pub fn limit_sweep(base: &SweepBase, epsilons: &[f64]) -> Result<Vec<SweepRow>> {
    if epsilons.is_empty() {
        return Err(Error::param("epsilons", "need at least one value"));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::param("epsilons", format!("must be finite and > 0, got {e}")));
    }
    let pattern = solve_pattern(&base.gas, &base.left, &base.right)?;
    let threads = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    Ok(pool.install(|| epsilons.par_iter().map(|&eps| sweep_row(base, &pattern, eps)).collect()))
}

fn sweep_row(base: &SweepBase, pattern: &RiemannPattern, epsilon: f64) -> SweepRow {
    let start = Instant::now();
    let kappa = base.nu * epsilon;
    let n_cells = sweep_cells(base, epsilon);
    let mut row = SweepRow {
        epsilon,
        kappa,
        nu: base.nu,
        h: base.h,
        alpha: base.alpha,
        sup_error: f64::NAN,
        n_cells,
        steps: 0,
        drift: f64::NAN,
        wall_seconds: 0.0,
        status: String::from("ok"),
    };
    let outcome = (|| -> Result<f64> {
        let grid = Grid1D::new(base.half_width, n_cells)?;
        let config = SolverConfig {
            mode: Mode::Physical { epsilon, kappa },
            cfl: base.cfl,
            smoothing_cells: base.smoothing_cells,
            tau_end: base.t_end,
            snapshot_times: base.snapshot_times.clone(),
        };
        let r = run(&grid, &base.gas, &config, &base.left, &base.right)?;
        row.steps = r.stats.steps;
        row.drift = r.stats.conservation_drift();
        if let Some(e) = r.abort {
            return Err(e);
        }
        let mut region = SigmaRegion::new(base.h, base.alpha, epsilon)?;
        region.one_sided = base.one_sided;
        sup_error_sigma(&grid, &r.snapshots, pattern, &region)
    })();
    match outcome {
        Ok(e) => row.sup_error = e,
        Err(e) => row.status = e.to_string(),
    }
    row.wall_seconds = start.elapsed().as_secs_f64();
    row
}
