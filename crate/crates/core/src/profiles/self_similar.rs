//! Self-similar solution of the nonlinear diffusion problem
//! `Θ_τ = a (Θ_y / Θ)_y`, `Θ(τ, ±∞) = θ_±`, reduced in `ξ = y / sqrt(1 + τ)`
//! to the two-point problem `-(ξ/2) Θ' = a (Θ'/Θ)'` on `[-Ξ, Ξ]`.

use crate::error::{Error, Result};
use crate::numerics::{hermite, solve_tridiagonal};

pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_POINTS: usize = 4001;
const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 50;
const TAIL_TARGET: f64 = 1e-9;

/// Smallest half-width with `gap * exp(-Ξ²/(8a)) < 1e-9`, but never below the default.
pub fn half_width_for(theta_left: f64, theta_right: f64, a: f64) -> f64 {
    let gap = (theta_right - theta_left).abs();
    if gap <= TAIL_TARGET {
        return DEFAULT_HALF_WIDTH;
    }
    let needed = (8.0 * a * (gap / TAIL_TARGET).ln()).sqrt();
    needed.max(DEFAULT_HALF_WIDTH)
}

/// Tabulated `Θ̂(ξ)` with its derivative on a uniform grid.
#[derive(Debug, Clone)]
pub struct SelfSimilarProfile {
    pub theta_left: f64,
    pub theta_right: f64,
    pub a: f64,
    pub half_width: f64,
    pub spacing: f64,
    pub theta_hat: Vec<f64>,
    pub theta_hat_prime: Vec<f64>,
    /// Sup norm of the discrete residual at convergence.
    pub residual: f64,
    pub iterations: usize,
}

/// Discrete residual `a (ln Θ)'' + (ξ/2) Θ'` on interior nodes.
fn residual(theta: &[f64], xi0: f64, h: f64, a: f64, out: &mut [f64]) {
    let n = theta.len();
    let inv_h2 = a / (h * h);
    let inv_2h = 1.0 / (2.0 * h);
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for i in 1..n - 1 {
        let xi = xi0 + i as f64 * h;
        let lm = theta[i - 1].ln();
        let l0 = theta[i].ln();
        let lp = theta[i + 1].ln();
        out[i] = inv_h2 * (lp - 2.0 * l0 + lm) + 0.5 * xi * (theta[i + 1] - theta[i - 1]) * inv_2h;
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Solves the self-similar problem by central differences and damped Newton
/// iteration, starting from the linear interpolant of the end values.
pub fn solve_self_similar(
    theta_left: f64,
    theta_right: f64,
    a: f64,
    half_width: f64,
    n_points: usize,
) -> Result<SelfSimilarProfile> {
    if !(theta_left > 0.0 && theta_right > 0.0) {
        return Err(Error::param("theta", "end temperatures must be positive"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::param("a", format!("diffusion coefficient must be positive, got {a}")));
    }
    if !(half_width > 0.0) || n_points < 5 {
        return Err(Error::param("n_points", "need a positive half width and at least 5 points"));
    }
    let n = n_points;
    let h = 2.0 * half_width / (n - 1) as f64;
    let xi0 = -half_width;
    let mut theta: Vec<f64> =
        (0..n).map(|i| theta_left + (theta_right - theta_left) * i as f64 / (n - 1) as f64).collect();

    let mut res = vec![0.0; n];
    residual(&theta, xi0, h, a, &mut res);
    let mut norm = sup(&res);
    let mut trace = vec![norm];
    let mut iterations = 0;

    let mut lower = vec![0.0; n - 2];
    let mut diag = vec![0.0; n - 2];
    let mut upper = vec![0.0; n - 2];
    let mut rhs = vec![0.0; n - 2];
    let mut trial = theta.clone();
    let mut trial_res = vec![0.0; n];

    while norm >= NEWTON_TOL {
        if iterations == NEWTON_MAX_ITER {
            return Err(Error::NewtonDiverged { trace });
        }
        iterations += 1;
        let c2 = a / (h * h);
        for k in 0..n - 2 {
            let i = k + 1;
            let xi = xi0 + i as f64 * h;
            lower[k] = c2 / theta[i - 1] - xi / (4.0 * h);
            diag[k] = -2.0 * c2 / theta[i];
            upper[k] = c2 / theta[i + 1] + xi / (4.0 * h);
            rhs[k] = -res[i];
        }
        if solve_tridiagonal(&lower, &diag, &upper, &mut rhs).is_none() {
            return Err(Error::NewtonDiverged { trace });
        }
        let mut damping = 1.0;
        loop {
            trial.copy_from_slice(&theta);
            let mut positive = true;
            for k in 0..n - 2 {
                trial[k + 1] += damping * rhs[k];
                positive &= trial[k + 1] > 0.0;
            }
            if positive {
                residual(&trial, xi0, h, a, &mut trial_res);
                let trial_norm = sup(&trial_res);
                if trial_norm < norm || trial_norm < NEWTON_TOL {
                    std::mem::swap(&mut theta, &mut trial);
                    std::mem::swap(&mut res, &mut trial_res);
                    norm = trial_norm;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-6 {
                trace.push(norm);
                return Err(Error::NewtonDiverged { trace });
            }
        }
        trace.push(norm);
    }

    let prime = differentiate(&theta, h);
    Ok(SelfSimilarProfile {
        theta_left,
        theta_right,
        a,
        half_width,
        spacing: h,
        theta_hat: theta,
        theta_hat_prime: prime,
        residual: norm,
        iterations,
    })
}

/// Fourth-order central differences inside, second-order one-sided at the ends.
fn differentiate(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    d
}

impl SelfSimilarProfile {
    /// Constant profile for equal end temperatures.
    pub fn constant(theta: f64, a: f64) -> Self {
        let n = 5;
        SelfSimilarProfile {
            theta_left: theta,
            theta_right: theta,
            a,
            half_width: DEFAULT_HALF_WIDTH,
            spacing: 2.0 * DEFAULT_HALF_WIDTH / (n - 1) as f64,
            theta_hat: vec![theta; n],
            theta_hat_prime: vec![0.0; n],
            residual: 0.0,
            iterations: 0,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.theta_left == self.theta_right
    }

    pub fn xi_grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.theta_hat.len()).map(move |i| -self.half_width + i as f64 * self.spacing)
    }

    /// Second derivative implied by the ODE at a point where `Θ̂`, `Θ̂'` are known.
    #[inline]
    fn second(&self, xi: f64, t0: f64, t1: f64) -> f64 {
        t1 * t1 / t0 - xi * t0 * t1 / (2.0 * self.a)
    }

    /// `[Θ̂, Θ̂', Θ̂'', Θ̂''']` at `ξ`. Values and slopes come from Hermite
    /// interpolation of the table; higher derivatives from the ODE itself, so
    /// the returned jet satisfies the ODE pointwise. Outside `[-Ξ, Ξ]` the
    /// far-field constants are returned.
    pub fn eval(&self, xi: f64) -> [f64; 4] {
        if self.is_constant() {
            return [self.theta_left, 0.0, 0.0, 0.0];
        }
        if xi <= -self.half_width {
            return [self.theta_left, 0.0, 0.0, 0.0];
        }
        if xi >= self.half_width {
            return [self.theta_right, 0.0, 0.0, 0.0];
        }
        let n = self.theta_hat.len();
        let s = (xi + self.half_width) / self.spacing;
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        let (x0, x1) = (-self.half_width + i as f64 * self.spacing, -self.half_width + (i + 1) as f64 * self.spacing);
        let (f0, f1) = (self.theta_hat[i], self.theta_hat[i + 1]);
        let (d0, d1) = (self.theta_hat_prime[i], self.theta_hat_prime[i + 1]);
        let (t0, _) = hermite(f0, d0, f1, d1, self.spacing, t);
        let (t1, _) = hermite(d0, self.second(x0, f0, d0), d1, self.second(x1, f1, d1), self.spacing, t);
        let t2 = self.second(xi, t0, t1);
        let a = self.a;
        let t3 = 2.0 * t1 * t2 / t0 - t1 * t1 * t1 / (t0 * t0)
            - (t0 * t1 + xi * t1 * t1 + xi * t0 * t2) / (2.0 * a);
        [t0, t1, t2, t3]
    }

    /// Sup norm of the discrete ODE residual on interior nodes of the table.
    pub fn ode_residual(&self) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let mut out = vec![0.0; self.theta_hat.len()];
        residual(&self.theta_hat, -self.half_width, self.spacing, self.a, &mut out);
        sup(&out)
    }
}
