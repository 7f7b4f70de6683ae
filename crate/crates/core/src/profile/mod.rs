//! Viscous self-similar profiles.
//!
//! For fixed `ε > 0` the similarity reduction of the viscous system reads
//!
//! ```text
//! ((U^k - ξ) v)' = -v,          ε u'' = v (U^k - ξ) u',
//! ```
//!
//! on `[-R, R]` with `u(∓R) = u_∓`, where `U` is the velocity the density is
//! transported with. At a fixed point `U = u`. Given `U`, both equations are
//! solvable in closed form (see [`model`]); the profile is obtained by damped
//! Picard iteration on the resulting map `T`.

pub mod grid;
pub mod model;
mod residual;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_float;
use crate::riemann::{solve_delta_shock, RiemannProblem};
use crate::scalar::{pow, Scalar};

pub use grid::{interpolate, GridSpec};
pub use model::{
    apply_t, density_from_velocity, density_log_derivative, velocity_from_potential, xi_sigma_root, CellRule, Density,
    Layer,
};
pub use residual::{ode_residual_pointwise, profile_ode_residual, OdeResidual};

mod defaults {
    use crate::scalar::Scalar;

    pub fn fp_tol<S: Scalar>() -> S {
        S::lit(1e-10)
    }
    pub fn fp_max_iter() -> usize {
        20_000
    }
    pub fn theta<S: Scalar>() -> S {
        S::lit(0.5)
    }
    pub fn max_regrids() -> usize {
        3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct ProfileConfig<S> {
    pub epsilon: S,
    /// Domain half-width; defaults to `4 max(|u_-|^k, |u_+|^k) + 1`.
    #[serde(default, rename = "R")]
    pub r: Option<S>,
    #[serde(default)]
    pub grid: GridSpec<S>,
    #[serde(default = "defaults::fp_tol")]
    pub fp_tol: S,
    #[serde(default = "defaults::fp_max_iter")]
    pub fp_max_iter: usize,
    #[serde(default = "defaults::theta")]
    pub theta: S,
    #[serde(default)]
    pub cell_rule: CellRule,
    /// Optional acceptance bound on the finite-difference ODE residual.
    #[serde(default)]
    pub ode_tol: Option<S>,
    /// Recentering passes allowed when the layer drifts off the grid cluster.
    #[serde(default = "defaults::max_regrids")]
    pub max_regrids: usize,
}

impl<S: Scalar> ProfileConfig<S> {
    pub fn new(epsilon: S) -> Self {
        Self {
            epsilon,
            r: None,
            grid: GridSpec::default(),
            fp_tol: defaults::fp_tol(),
            fp_max_iter: defaults::fp_max_iter(),
            theta: defaults::theta(),
            cell_rule: CellRule::default(),
            ode_tol: None,
            max_regrids: defaults::max_regrids(),
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.grid = match self.grid {
            GridSpec::Uniform { .. } => GridSpec::Uniform { nodes },
            GridSpec::Graded { center, scale, .. } => GridSpec::Graded { nodes, center, scale },
        };
        self
    }

    pub fn half_width(&self, problem: &RiemannProblem<S>) -> S {
        self.r.unwrap_or_else(|| default_half_width(problem))
    }

    pub fn validate(&self, problem: &RiemannProblem<S>) -> Result<()> {
        if !(self.epsilon > S::zero()) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive (got {})",
                self.epsilon
            )));
        }
        if !(self.theta > S::zero() && self.theta <= S::one()) {
            return Err(Error::InvalidConfig(format!(
                "theta must lie in (0, 1] (got {})",
                self.theta
            )));
        }
        if !(self.fp_tol > S::zero()) {
            return Err(Error::InvalidConfig(format!(
                "fp_tol must be positive (got {})",
                self.fp_tol
            )));
        }
        let (left, right) = problem.wave_fan();
        let r = self.half_width(problem);
        if !(r > left.abs().max(right.abs())) || !r.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "R = {r} must exceed max(|u_-|^k, |u_+|^k) = {}",
                left.abs().max(right.abs())
            )));
        }
        self.grid.validate()
    }
}

/// The parts of [`ProfileConfig`] that do not depend on `ε`; shared by the
/// members of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct ProfileSettings<S> {
    #[serde(default, rename = "R")]
    pub r: Option<S>,
    #[serde(default)]
    pub grid: GridSpec<S>,
    #[serde(default = "defaults::fp_tol")]
    pub fp_tol: S,
    #[serde(default = "defaults::fp_max_iter")]
    pub fp_max_iter: usize,
    #[serde(default = "defaults::theta")]
    pub theta: S,
    #[serde(default)]
    pub cell_rule: CellRule,
    #[serde(default)]
    pub ode_tol: Option<S>,
    #[serde(default = "defaults::max_regrids")]
    pub max_regrids: usize,
}

impl<S: Scalar> Default for ProfileSettings<S> {
    fn default() -> Self {
        let c = ProfileConfig::new(S::one());
        c.settings()
    }
}

impl<S: Scalar> ProfileConfig<S> {
    pub fn from_settings(epsilon: S, s: &ProfileSettings<S>) -> Self {
        Self {
            epsilon,
            r: s.r,
            grid: s.grid,
            fp_tol: s.fp_tol,
            fp_max_iter: s.fp_max_iter,
            theta: s.theta,
            cell_rule: s.cell_rule,
            ode_tol: s.ode_tol,
            max_regrids: s.max_regrids,
        }
    }

    pub fn settings(&self) -> ProfileSettings<S> {
        ProfileSettings {
            r: self.r,
            grid: self.grid,
            fp_tol: self.fp_tol,
            fp_max_iter: self.fp_max_iter,
            theta: self.theta,
            cell_rule: self.cell_rule,
            ode_tol: self.ode_tol,
            max_regrids: self.max_regrids,
        }
    }
}

pub fn default_half_width<S: Scalar>(problem: &RiemannProblem<S>) -> S {
    let (left, right) = problem.wave_fan();
    S::lit(4.0) * left.abs().max(right.abs()) + S::one()
}

#[derive(Debug, Clone)]
pub struct ViscousProfile<S> {
    pub problem: RiemannProblem<S>,
    pub epsilon: S,
    pub r: S,
    pub xi: Vec<S>,
    pub u: Vec<S>,
    pub v: Vec<S>,
    /// `v (u^k - ξ)` at the nodes.
    pub flux: Vec<S>,
    pub xi_sigma: S,
    pub iterations: usize,
    pub converged: bool,
    /// Last damped update `sup |U_{n+1} - U_n|`.
    pub residual: S,
    /// `sup |T(u) - u|` for the returned profile.
    pub defect: S,
    pub regrids: usize,
    /// Model quantities on the grid augmented with `ξσ`.
    pub layer: Layer<S>,
}

impl<S: Scalar> ViscousProfile<S> {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn u_at(&self, x: S) -> S {
        interpolate(&self.xi, &self.u, x)
    }

    pub fn v_at(&self, x: S) -> S {
        interpolate(&self.xi, &self.v, x)
    }

    /// Checks `0 < v(u^k - ξ) ≤ v_-(u_-^k + R)` left of `ξσ` and
    /// `v_+(u_+^k - R) ≤ v(u^k - ξ) < 0` right of it. Equality is attained
    /// only at the end nodes.
    pub fn check_bounds(&self) -> Result<()> {
        let p = &self.problem;
        let (left, right) = p.wave_fan();
        let upper = p.v_minus * (left + self.r);
        let lower = p.v_plus * (right - self.r);
        for (i, (&x, &h)) in self.xi.iter().zip(&self.flux).enumerate() {
            let ok = if x < self.xi_sigma {
                h > S::zero() && h <= upper
            } else if x > self.xi_sigma {
                h < S::zero() && h >= lower
            } else {
                true
            };
            if !ok {
                return Err(Error::InvariantViolation {
                    iteration: self.iterations,
                    what: format!("flux bound fails at node {i} (xi = {x}, v(u^k - xi) = {h})"),
                });
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "xi,u,v")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{}",
                fmt_float(self.xi[i]),
                fmt_float(self.u[i]),
                fmt_float(self.v[i])
            )?;
        }
        Ok(())
    }
}

fn ramp<S: Scalar>(xi: &[S], center: S, width: S, u_minus: S, u_plus: S) -> Vec<S> {
    let n = xi.len();
    let t0 = ((xi[0] - center) / width).tanh();
    let t1 = ((xi[n - 1] - center) / width).tanh();
    let mut u: Vec<S> = xi
        .iter()
        .map(|&x| u_minus + (u_plus - u_minus) * ((((x - center) / width).tanh() - t0) / (t1 - t0)))
        .collect();
    u[0] = u_minus;
    u[n - 1] = u_plus;
    u
}

fn sup_diff<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

fn during(iteration: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::NonMonotone { index } => Error::InvariantViolation {
            iteration,
            what: format!("iterate not monotone at node {index}"),
        },
        Error::InvalidArgument(what) => Error::InvariantViolation { iteration, what },
        other => other,
    }
}

/// Solves for the profile starting from a monotone ramp centered at the exact
/// shock speed.
pub fn solve_profile<S: Scalar>(problem: &RiemannProblem<S>, config: &ProfileConfig<S>) -> Result<ViscousProfile<S>> {
    solve(problem, config, None)
}

/// Solves for the profile warm-started from another profile (typically the
/// previous, larger `ε` of a continuation sweep).
pub fn solve_profile_from<S: Scalar>(
    problem: &RiemannProblem<S>,
    config: &ProfileConfig<S>,
    initial: &ViscousProfile<S>,
) -> Result<ViscousProfile<S>> {
    solve(problem, config, Some(initial))
}

fn solve<S: Scalar>(
    problem: &RiemannProblem<S>,
    config: &ProfileConfig<S>,
    initial: Option<&ViscousProfile<S>>,
) -> Result<ViscousProfile<S>> {
    problem.require_delta_shock()?;
    config.validate(problem)?;
    let eps = config.epsilon;
    let rule = config.cell_rule;
    let r = config.half_width(problem);
    let sigma = solve_delta_shock(problem)?.sigma;
    let tol = config.fp_tol.max(S::lit(16.0) * S::epsilon());
    let theta_min = config.theta.min(S::lit(0.125));
    let pinned = matches!(config.grid, GridSpec::Graded { center: Some(_), .. });
    let cluster = config.grid.scale_for(eps);

    let mut center = initial.map_or(sigma, |p| p.xi_sigma);
    if !(center > -r && center < r) {
        center = sigma;
    }
    let mut xi = config.grid.build(r, center, eps)?;
    let mut u = match initial {
        Some(p) => {
            let mut u: Vec<S> = xi.iter().map(|&x| p.u_at(x)).collect();
            let n = u.len();
            u[0] = problem.u_minus;
            u[n - 1] = problem.u_plus;
            u
        }
        None => ramp(&xi, sigma, eps.sqrt(), problem.u_minus, problem.u_plus),
    };

    let mut theta = config.theta;
    let mut prev = S::infinity();
    let mut change = S::infinity();
    let mut iterations = 0;
    let mut regrids = 0;
    loop {
        if iterations >= config.fp_max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: change.to_f64_lossy(),
            });
        }
        let layer = Layer::build(&xi, &u, problem, None, rule).map_err(during(iterations))?;
        let t = layer.transport(problem, eps, rule).map_err(during(iterations))?;
        let diff = sup_diff(&t, &u);
        if !diff.is_finite() {
            return Err(Error::InvariantViolation {
                iteration: iterations,
                what: "non-finite iterate".into(),
            });
        }
        if diff > prev {
            theta = (theta / S::lit(2.0)).max(theta_min);
        }
        prev = diff;
        for (w, &tw) in u.iter_mut().zip(&t) {
            *w = (S::one() - theta) * *w + theta * tw;
        }
        iterations += 1;
        change = theta * diff;
        if change >= tol {
            continue;
        }
        let xs = layer.xi_sigma();
        match cluster {
            Some(a) if !pinned && regrids < config.max_regrids && (xs - center).abs() > a / S::lit(4.0) => {
                center = xs;
                let fresh = config.grid.build(r, center, eps)?;
                u = fresh.iter().map(|&x| interpolate(&xi, &u, x)).collect();
                xi = fresh;
                regrids += 1;
                prev = S::infinity();
                theta = config.theta;
            }
            _ => break,
        }
    }

    let layer = Layer::build(&xi, &u, problem, None, rule).map_err(during(iterations))?;
    let t = layer.transport(problem, eps, rule)?;
    let defect = sup_diff(&t, &u);
    let profile = ViscousProfile {
        problem: *problem,
        epsilon: eps,
        r,
        v: layer.density(),
        flux: layer.nodal(&layer.h),
        xi_sigma: layer.xi_sigma(),
        xi,
        u,
        iterations,
        converged: true,
        residual: change,
        defect,
        regrids,
        layer,
    };
    model::check_monotone(&profile.u).map_err(during(iterations))?;
    profile.check_bounds()?;
    if let Some(bound) = config.ode_tol {
        let report = profile_ode_residual(&profile, eps, None)?;
        if !(report.sup <= bound) {
            return Err(Error::InvariantViolation {
                iteration: iterations,
                what: format!("ODE residual {} exceeds {bound} at xi = {}", report.sup, report.at),
            });
        }
    }
    Ok(profile)
}

/// Far-field characteristic speeds bracket; used by callers to check the
/// viscous `ξσ` against the entropy condition.
pub fn entropy_bracket_holds<S: Scalar>(problem: &RiemannProblem<S>, xi_sigma: S) -> bool {
    pow(problem.u_plus, problem.k) < xi_sigma && xi_sigma < pow(problem.u_minus, problem.k)
}
