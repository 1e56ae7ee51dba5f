//! Command-line front end: configuration parsing, subcommand dispatch and
//! CSV / report output.
//!
//! A run is described by a flat `key = value` file. Lines starting with `#`
//! are comments. `--override key=value` flags are applied after the file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::harness::{
    asymptotic_gap, jump_series, limit_sweep, DecaySeries, FitKind, SweepBase, SweepRow, FIT_START,
};
use crate::profiles::WaveProfileSet;
use crate::riemann::{solve_pattern, RiemannPattern};
use crate::solver::{run, Field, Grid1D, Mode, Run, SolverConfig};
use crate::{Error, GasParams, Result, State};

#[derive(Debug, Parser)]
#[command(name = "visclimit", version, about = "Viscous wave patterns and the zero-dissipation limit for 1-D gas dynamics")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run description in `key = value` form.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override a configuration key; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the inviscid Riemann problem and print the wave pattern.
    Riemann,
    /// Evaluate the approximate wave pattern and its residuals.
    Profile {
        /// Evaluation times (overrides `profile_taus`); repeatable.
        #[arg(long = "tau")]
        taus: Vec<f64>,
    },
    /// Integrate the viscous equations from the Riemann data.
    Solve,
    /// Sweep the dissipation strength in physical variables.
    Limit {
        /// Viscosities (overrides `epsilons`); repeatable.
        #[arg(long = "eps")]
        epsilons: Vec<f64>,
    },
}

/// Where a configuration value came from, for error messages.
#[derive(Debug, Clone)]
struct Source {
    path: String,
    line: usize,
    value: String,
}

/// Raw `key = value` pairs before typing.
#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    entries: BTreeMap<String, Source>,
}

impl ConfigMap {
    /// Parses configuration text; `path` only labels error messages.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut map = ConfigMap::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            map.insert(line, path, i + 1)?;
        }
        Ok(map)
    }

    fn insert(&mut self, line: &str, path: &str, lineno: usize) -> Result<()> {
        let err = |field: &str, reason: &str| Error::Config {
            path: path.to_string(),
            line: lineno,
            field: field.to_string(),
            reason: reason.to_string(),
        };
        let (key, value) = line.split_once('=').ok_or_else(|| err(line, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(err(key, "empty key"));
        }
        if !KEYS.contains(&key) {
            return Err(err(key, "unknown key"));
        }
        let value = value.split('#').next().unwrap_or("").trim().to_string();
        self.entries.insert(key.to_string(), Source { path: path.to_string(), line: lineno, value });
        Ok(())
    }

    /// Applies `key=value` overrides; their line number is the flag position.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for (i, o) in overrides.iter().enumerate() {
            self.insert(o, "--override", i + 1)?;
        }
        Ok(())
    }

    fn error(&self, key: &str, reason: impl Into<String>) -> Error {
        let (path, line) = match self.entries.get(key) {
            Some(s) => (s.path.clone(), s.line),
            None => ("<defaults>".to_string(), 0),
        };
        Error::Config { path, line, field: key.to_string(), reason: reason.into() }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.value.as_str())
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse::<f64>().map(Some).map_err(|_| self.error(key, format!("`{v}` is not a number"))),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn f64_req(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| self.error(key, "required"))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.error(key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(self.error(key, format!("`{v}` is not a boolean"))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| self.error(key, format!("`{s}` is not a number"))))
                .collect(),
        }
    }
}

const KEYS: &[&str] = &[
    "gamma",
    "r",
    "left.v",
    "left.u",
    "left.theta",
    "right.v",
    "right.u",
    "right.theta",
    "mode",
    "nu",
    "epsilon",
    "kappa",
    "cfl",
    "smoothing_cells",
    "tau_end",
    "snapshot_times",
    "half_width",
    "n_cells",
    "h",
    "alpha",
    "one_sided",
    "dy_scaled",
    "epsilons",
    "profile_taus",
    "profile_points",
    "exact_times",
    "exact_x_min",
    "exact_x_max",
    "exact_points",
    "output_dir",
];

/// A fully typed and validated run description.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub gas: GasParams,
    pub left: State,
    pub right: State,
    pub solver: SolverConfig,
    pub half_width: f64,
    pub n_cells: usize,
    pub h: f64,
    pub alpha: f64,
    pub one_sided: bool,
    /// Scaled grid spacing used by the sweep; physical spacing is `ε` times this.
    pub dy_scaled: f64,
    pub epsilons: Vec<f64>,
    pub profile_taus: Vec<f64>,
    pub profile_points: usize,
    pub exact_times: Vec<f64>,
    pub exact_x: (f64, f64, usize),
    pub output_dir: PathBuf,
}

impl RunSpec {
    pub fn from_map(m: &ConfigMap) -> Result<Self> {
        let nested = |key: &str, e: Error| match e {
            Error::InvalidParameter { reason, .. } => m.error(key, reason),
            other => other,
        };
        let gas = GasParams::new(m.f64_or("gamma", 1.4)?, m.f64_or("r", 1.0)?)
            .map_err(|e| nested(if m.raw("gamma").is_some() { "gamma" } else { "r" }, e))?;
        let state = |side: &str| -> Result<State> {
            let k = |f: &str| format!("{side}.{f}");
            let (v, u, t) = (m.f64_req(&k("v"))?, m.f64_req(&k("u"))?, m.f64_req(&k("theta"))?);
            State::new(v, u, t).map_err(|e| match e {
                Error::InvalidParameter { name, .. } => nested(&k(name), e),
                other => other,
            })
        };
        let left = state("left")?;
        let right = state("right")?;

        let nu = m.f64_or("nu", 1.0)?;
        let mode = match m.raw("mode").unwrap_or("scaled") {
            "scaled" => Mode::Scaled { nu },
            "physical" => {
                let epsilon = m.f64_req("epsilon")?;
                Mode::Physical { epsilon, kappa: m.f64_or("kappa", nu * epsilon)? }
            }
            other => return Err(m.error("mode", format!("`{other}` is neither `scaled` nor `physical`"))),
        };
        let tau_end = m.f64_or("tau_end", 10.0)?;
        let mut snapshot_times = m.list("snapshot_times")?;
        if snapshot_times.is_empty() {
            snapshot_times.push(tau_end);
        }
        let solver = SolverConfig {
            mode,
            cfl: m.f64_or("cfl", 0.4)?,
            smoothing_cells: m.usize_or("smoothing_cells", 0)?,
            tau_end,
            snapshot_times,
        };
        solver.validate().map_err(|e| match &e {
            Error::InvalidParameter { name, .. } => nested(name, e),
            _ => e,
        })?;

        let spec = RunSpec {
            gas,
            left,
            right,
            solver,
            half_width: m.f64_or("half_width", 50.0)?,
            n_cells: m.usize_or("n_cells", 1000)?,
            h: m.f64_or("h", 0.5)?,
            alpha: m.f64_or("alpha", 0.25)?,
            one_sided: m.bool_or("one_sided", false)?,
            dy_scaled: m.f64_or("dy_scaled", 0.05)?,
            epsilons: m.list("epsilons")?,
            profile_taus: m.list("profile_taus")?,
            profile_points: m.usize_or("profile_points", 2001)?,
            exact_times: m.list("exact_times")?,
            exact_x: (m.f64_or("exact_x_min", -5.0)?, m.f64_or("exact_x_max", 5.0)?, m.usize_or("exact_points", 201)?),
            output_dir: PathBuf::from(m.raw("output_dir").unwrap_or(".")),
        };
        if !(spec.half_width > 0.0) || !spec.half_width.is_finite() {
            return Err(m.error("half_width", "must be finite and > 0"));
        }
        if spec.n_cells < 2 || spec.n_cells % 2 != 0 {
            return Err(m.error("n_cells", "must be even and at least 2"));
        }
        if !(spec.dy_scaled > 0.0) || !spec.dy_scaled.is_finite() {
            return Err(m.error("dy_scaled", "must be finite and > 0"));
        }
        if spec.profile_points < 2 {
            return Err(m.error("profile_points", "need at least 2"));
        }
        if spec.exact_x.2 < 2 || !(spec.exact_x.1 > spec.exact_x.0) {
            return Err(m.error("exact_points", "need at least 2 points on a non-empty interval"));
        }
        Ok(spec)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.half_width, self.n_cells)
    }

    pub fn sweep_base(&self) -> SweepBase {
        SweepBase {
            gas: self.gas,
            left: self.left,
            right: self.right,
            nu: self.solver.mode.nu(),
            cfl: self.solver.cfl,
            smoothing_cells: self.solver.smoothing_cells,
            half_width: self.half_width,
            dy_scaled: self.dy_scaled,
            t_end: self.solver.tau_end,
            snapshot_times: self.solver.snapshot_times.clone(),
            h: self.h,
            alpha: self.alpha,
            one_sided: self.one_sided,
        }
    }
}

/// Reads the configuration file (if any), applies overrides and `--out`.
pub fn load_spec(common: &CommonArgs) -> Result<RunSpec> {
    let mut map = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            ConfigMap::parse(&text, &path.display().to_string())?
        }
        None => ConfigMap::default(),
    };
    map.apply_overrides(&common.overrides)?;
    let mut spec = RunSpec::from_map(&map)?;
    if let Some(out) = &common.out {
        spec.output_dir = out.clone();
    }
    Ok(spec)
}

/// Full-precision float text: 17 significant digits, round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// File name of a snapshot: `snapshot_tau_<τ to 6 decimals>.csv`.
pub fn snapshot_file_name(tau: f64) -> String {
    format!("snapshot_tau_{tau:.6}.csv")
}

/// One row per cell: `u` is averaged from the two bounding nodes to the cell center.
pub fn write_snapshot(path: &Path, grid: &Grid1D, f: &Field) -> Result<()> {
    let rows = (0..grid.n_cells).map(|j| {
        let u = 0.5 * (f.u[j] + f.u[j + 1]);
        vec![fmt_f64(f.tau), fmt_f64(grid.cell_center(j)), fmt_f64(f.v[j]), fmt_f64(u), fmt_f64(f.theta[j])]
    });
    write_rows(path, &["tau", "y", "v", "u", "theta"], rows)
}

/// `tau,value` rows followed by a `rate=…,r2=…` footer.
pub fn write_decay_series(path: &Path, s: &DecaySeries) -> Result<()> {
    let mut text = String::from("tau,value\n");
    for (t, v) in s.times.iter().zip(&s.values) {
        let _ = writeln!(text, "{},{}", fmt_f64(*t), fmt_f64(*v));
    }
    let _ = writeln!(text, "rate={},r2={}", fmt_f64(s.fitted_rate), fmt_f64(s.fit_quality));
    write_text(path, &text)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let header = ["epsilon", "kappa", "nu", "h", "alpha", "sup_error", "n_cells", "steps", "drift", "status"];
    let out = rows.iter().map(|r| {
        vec![
            fmt_f64(r.epsilon),
            fmt_f64(r.kappa),
            fmt_f64(r.nu),
            fmt_f64(r.h),
            fmt_f64(r.alpha),
            fmt_f64(r.sup_error),
            r.n_cells.to_string(),
            r.steps.to_string(),
            fmt_f64(r.drift),
            r.status.clone(),
        ]
    });
    write_rows(path, &header, out)
}

fn print_state(label: &str, s: &State, g: &GasParams) {
    println!(
        "{label:<12} v = {}  u = {}  theta = {}  p = {}",
        fmt_f64(s.v),
        fmt_f64(s.u),
        fmt_f64(s.theta),
        fmt_f64(g.pressure(s))
    );
}

pub fn cmd_riemann(spec: &RunSpec) -> Result<i32> {
    let pat = solve_pattern(&spec.gas, &spec.left, &spec.right)?;
    print_state("left", &pat.left, &spec.gas);
    print_state("star (1)", &pat.star, &spec.gas);
    print_state("star (3)", &pat.star_upper, &spec.gas);
    print_state("right", &pat.right, &spec.gas);
    println!("p_contact    = {}", fmt_f64(pat.p_contact));
    println!("|p* - p^*|   = {:.3e}", (pat.p_star() - pat.p_star_upper()).abs());
    println!("|u* - u^*|   = {:.3e}", (pat.star.u - pat.star_upper.u).abs());
    println!("fan 1        = [{}, {}]", fmt_f64(pat.fan1.head), fmt_f64(pat.fan1.tail));
    println!("fan 3        = [{}, {}]", fmt_f64(pat.fan3.head), fmt_f64(pat.fan3.tail));
    if !spec.exact_times.is_empty() {
        create_dir(&spec.output_dir)?;
        let (x0, x1, n) = spec.exact_x;
        let path = spec.output_dir.join("exact.csv");
        let rows = spec.exact_times.iter().flat_map(|&t| {
            let pat = &pat;
            (0..n).map(move |k| {
                let x = x0 + (x1 - x0) * k as f64 / (n - 1) as f64;
                let s = pat.eval_exact(t, x);
                vec![fmt_f64(t), fmt_f64(x), fmt_f64(s.v), fmt_f64(s.u), fmt_f64(s.theta)]
            })
        });
        write_rows(&path, &["t", "x", "v", "u", "theta"], rows)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

/// Half-width of the profile window at `tau`: both fans plus a margin for the layers.
fn profile_extent(pat: &RiemannPattern, tau: f64) -> f64 {
    let lam = pat.fan1.head.abs().max(pat.fan3.head.abs());
    lam * (1.0 + tau) + 10.0 * (1.0 + tau).sqrt() + 10.0
}

pub fn cmd_profile(spec: &RunSpec, taus: &[f64]) -> Result<i32> {
    let taus = if taus.is_empty() { spec.profile_taus.as_slice() } else { taus };
    if taus.is_empty() {
        return Err(Error::param("profile_taus", "need at least one time"));
    }
    if let Some(t) = taus.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::param("profile_taus", format!("times must be finite and >= 0, got {t}")));
    }
    let pat = solve_pattern(&spec.gas, &spec.left, &spec.right)?;
    let set = WaveProfileSet::new(&pat, spec.solver.mode.nu())?;
    create_dir(&spec.output_dir)?;
    let n = spec.profile_points;
    let mut sup_q = Vec::with_capacity(taus.len());
    for &tau in taus {
        let half = profile_extent(&pat, tau);
        let mut rows = Vec::with_capacity(n);
        let mut worst = 0.0_f64;
        for k in 0..n {
            let y = -half + 2.0 * half * k as f64 / (n - 1) as f64;
            let p = set.superposition_eval(tau, y)?;
            let r = set.residuals(tau, y);
            worst = worst.max(r.q1.abs()).max(r.q2.abs()).max(r.q_cd.abs());
            rows.push(
                [tau, y, p.v.val, p.u.val, p.theta.val, p.v.y, p.u.y, p.theta.y, r.q1, r.q2, r.q_cd]
                    .iter()
                    .map(|x| fmt_f64(*x))
                    .collect(),
            );
        }
        let path = spec.output_dir.join(format!("profile_tau_{tau:.6}.csv"));
        write_rows(&path, &["tau", "y", "V", "U", "Theta", "Vy", "Uy", "Thetay", "Q1", "Q2", "Qcd"], rows)?;
        println!("wrote {}", path.display());
        sup_q.push(worst);
    }
    if taus.len() >= 2 {
        let series = DecaySeries::fitted(taus.to_vec(), sup_q, FitKind::Power, 0.0, f64::INFINITY);
        let path = spec.output_dir.join("residual_decay.csv");
        write_decay_series(&path, &series)?;
        println!("sup residual rate {:.4} (r2 {:.4}), wrote {}", series.fitted_rate, series.fit_quality, path.display());
    }
    Ok(0)
}

/// `key = value` summary of a run, written whether or not it finished.
pub fn run_report(spec: &RunSpec, out: &Run) -> String {
    let mut s = String::new();
    let g = &out.grid;
    let (mu, kappa) = spec.solver.mode.coefficients();
    let mode = match spec.solver.mode {
        Mode::Scaled { .. } => "scaled",
        Mode::Physical { .. } => "physical",
    };
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("gamma", fmt_f64(spec.gas.gamma()));
    kv("r", fmt_f64(spec.gas.r()));
    kv("mode", mode.to_string());
    kv("viscosity", fmt_f64(mu));
    kv("heat_conductivity", fmt_f64(kappa));
    kv("half_width", fmt_f64(g.half_width));
    kv("n_cells", g.n_cells.to_string());
    kv("dy", fmt_f64(g.dy));
    kv("cfl", fmt_f64(spec.solver.cfl));
    kv("smoothing_cells", spec.solver.smoothing_cells.to_string());
    kv("tau_end", fmt_f64(spec.solver.tau_end));
    kv("tau_reached", fmt_f64(out.stats.tau_reached));
    kv("steps", out.stats.steps.to_string());
    kv("snapshots", out.snapshots.len().to_string());
    kv("max_mass_drift", fmt_f64(out.stats.max_mass_drift));
    kv("max_momentum_drift", fmt_f64(out.stats.max_momentum_drift));
    kv("max_energy_drift", fmt_f64(out.stats.max_energy_drift));
    kv("status", out.abort.as_ref().map_or("ok".to_string(), |e| format!("aborted: {e}")));
    s
}

pub fn cmd_solve(spec: &RunSpec) -> Result<i32> {
    let grid = spec.grid()?;
    let out = run(&grid, &spec.gas, &spec.solver, &spec.left, &spec.right)?;
    create_dir(&spec.output_dir)?;
    for f in &out.snapshots {
        write_snapshot(&spec.output_dir.join(snapshot_file_name(f.tau)), &grid, f)?;
    }
    let mut report = run_report(spec, &out);
    // Long-time diagnostics need scaled variables and a few snapshots past the transient.
    let late = out.snapshots.iter().filter(|f| f.tau >= FIT_START).count();
    if matches!(spec.solver.mode, Mode::Scaled { .. }) && late >= 2 {
        let jumps = jump_series(&grid, &out.snapshots);
        write_decay_series(&spec.output_dir.join("jump_v.csv"), &jumps.v)?;
        write_decay_series(&spec.output_dir.join("jump_uy.csv"), &jumps.u_y)?;
        write_decay_series(&spec.output_dir.join("jump_thetay.csv"), &jumps.theta_y)?;
        let gap = solve_pattern(&spec.gas, &spec.left, &spec.right)
            .and_then(|p| WaveProfileSet::new(&p, spec.solver.mode.nu()))
            .and_then(|set| asymptotic_gap(&grid, &out.snapshots, &set));
        match gap {
            Ok(series) => write_decay_series(&spec.output_dir.join("gap.csv"), &series)?,
            Err(e) => {
                let _ = writeln!(report, "gap = unavailable ({e})");
            }
        }
    }
    write_text(&spec.output_dir.join("report.txt"), &report)?;
    print!("{report}");
    match out.abort {
        Some(e) => Err(e),
        None => Ok(0),
    }
}

/// Drops repeated values, keeping first occurrences; returns the duplicates removed.
pub fn dedup_epsilons(eps: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut kept: Vec<f64> = Vec::with_capacity(eps.len());
    let mut dropped = Vec::new();
    for &e in eps {
        if kept.contains(&e) {
            dropped.push(e);
        } else {
            kept.push(e);
        }
    }
    (kept, dropped)
}

pub fn cmd_limit(spec: &RunSpec, epsilons: &[f64]) -> Result<i32> {
    let eps = if epsilons.is_empty() { spec.epsilons.as_slice() } else { epsilons };
    let (eps, dropped) = dedup_epsilons(eps);
    for d in dropped {
        eprintln!("warning: epsilon {d} given more than once; running it once");
    }
    let rows = limit_sweep(&spec.sweep_base(), &eps)?;
    create_dir(&spec.output_dir)?;
    let path = spec.output_dir.join("sweep.csv");
    write_sweep(&path, &rows)?;
    for r in &rows {
        println!("epsilon = {:.6e}  sup_error = {:.6e}  cells = {}  {}", r.epsilon, r.sup_error, r.n_cells, r.status);
    }
    println!("wrote {}", path.display());
    Ok(if rows.iter().any(SweepRow::ok) { 0 } else { 3 })
}

/// Runs the tool and returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    let result = load_spec(&cli.common).and_then(|spec| match &cli.command {
        Command::Riemann => cmd_riemann(&spec),
        Command::Profile { taus } => cmd_profile(&spec, taus),
        Command::Solve => cmd_solve(&spec),
        Command::Limit { epsilons } => cmd_limit(&spec, epsilons),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
