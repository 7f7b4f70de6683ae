//! Distributional identities for measure-valued candidates
//! `v = ṽ + w δ_L`, `u = ũ` off `L`, `u|_L = u_δ`, checked by quadrature
//! against smooth test functions supported in `t > 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite_points, GaussLegendre};
use crate::riemann::{shock_state, DeltaShockParams, RiemannProblem};
use crate::scalar::{decay_time, pow, Scalar};
use crate::test_function::{Jet, SpaceTimeTestFunction, TestFunction};

type Field<S> = Box<dyn Fn(S, S) -> (S, S) + Send + Sync>;
type Curve<S> = Box<dyn Fn(S) -> S + Send + Sync>;

/// Classical parts on either side of a curve plus a weighted delta on it.
pub struct MeasureSolution<S> {
    /// `(ṽ, ũ)(x, t)` for `x < x(t)`.
    pub left: Field<S>,
    /// `(ṽ, ũ)(x, t)` for `x > x(t)`.
    pub right: Field<S>,
    pub position: Curve<S>,
    pub weight: Curve<S>,
    pub front_velocity: Curve<S>,
}

impl<S: Scalar> MeasureSolution<S> {
    /// The delta-shock solution built from `params`; with exact parameters
    /// this is the entropy solution of the Riemann problem.
    pub fn from_delta_shock(problem: &RiemannProblem<S>, params: &DeltaShockParams<S>) -> Self {
        Self::with_speed_factor(problem, params, S::one())
    }

    /// Same as [`Self::from_delta_shock`] with the trajectory `x(t)` scaled
    /// by `factor`; weight and front velocity are left alone.
    pub fn with_speed_factor(problem: &RiemannProblem<S>, params: &DeltaShockParams<S>, factor: S) -> Self {
        let (vm, vp, um, up, alpha) = (
            problem.v_minus,
            problem.v_plus,
            problem.u_minus,
            problem.u_plus,
            problem.alpha,
        );
        let rate = problem.trajectory_rate();
        let (sigma, w0, ud) = (params.sigma, params.w0, params.u_delta);
        Self {
            left: Box::new(move |_, t| (vm, um * (-alpha * t).exp())),
            right: Box::new(move |_, t| (vp, up * (-alpha * t).exp())),
            position: Box::new(move |t| factor * sigma * decay_time(rate, t)),
            weight: Box::new(move |t| w0 * decay_time(rate, t)),
            front_velocity: Box::new(move |t| ud * (-alpha * t).exp()),
        }
    }

    /// `(ṽ, ũ)` at `(x, t)`, taking the left trace on the curve.
    pub fn classical(&self, x: S, t: S) -> (S, S) {
        if x <= (self.position)(t) {
            (self.left)(x, t)
        } else {
            (self.right)(x, t)
        }
    }
}

/// Tensor-product Gauss–Legendre settings: `panels` equal panels of `order`
/// points in `t` and on each side of the curve in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadrature {
    pub order: usize,
    pub panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { order: 8, panels: 32 }
    }
}

impl Quadrature {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.panels == 0 {
            return Err(Error::InvalidConfig(
                "quadrature order and panels must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn refined(self) -> Self {
        Self {
            panels: 2 * self.panels,
            ..self
        }
    }
}

/// `∫∫ ṽ c(ũ, x, ∇φ) dx dt + ∫ w l(u_δ, t, ∇φ(x(t), t)) dt`.
///
/// Each separable term is integrated over its own support box, with the `x`
/// integral split at `x(t)`; the pairing is therefore exactly linear in the
/// terms of `phi`.
fn pair_generic<S: Scalar>(
    sol: &MeasureSolution<S>,
    phi: &SpaceTimeTestFunction<S>,
    quad: Quadrature,
    classical: impl Fn(S, S, Jet<S>) -> S,
    line: impl Fn(S, S, Jet<S>) -> S,
) -> Result<S> {
    phi.validate()?;
    quad.validate()?;
    let rule = GaussLegendre::<S>::new(quad.order);
    let mut total = S::zero();
    for term in phi.terms.iter().filter(|t| t.amplitude != S::zero()) {
        let single = SpaceTimeTestFunction { terms: vec![*term] };
        let ((x0, x1), (t0, t1)) = single.bounding_box().expect("nonzero term has a support");
        for (t, wt) in composite_points(&rule, t0, t1, quad.panels) {
            let xs = (sol.position)(t);
            let mut strip = S::zero();
            let mut side = |a: S, b: S, field: &Field<S>| {
                if b > a {
                    for (x, wx) in composite_points(&rule, a, b, quad.panels) {
                        let (v, u) = field(x, t);
                        strip = strip + wx * v * classical(u, x, single.jet(x, t));
                    }
                }
            };
            side(x0, xs.min(x1), &sol.left);
            side(xs.max(x0), x1, &sol.right);
            if xs >= x0 && xs <= x1 {
                let (w, ud) = ((sol.weight)(t), (sol.front_velocity)(t));
                strip = strip + w * line(ud, t, single.jet(xs, t));
            }
            total = total + wt * strip;
        }
    }
    Ok(total)
}

/// `⟨v G(u), φ⟩ = ∫∫ ṽ G(ũ) φ + ∫ w G(u_δ) φ(x(t), t) dt`.
pub fn pair_with_measure<S: Scalar>(
    sol: &MeasureSolution<S>,
    g: impl Fn(S) -> S,
    phi: &SpaceTimeTestFunction<S>,
    quad: Quadrature,
) -> Result<S> {
    pair_generic(sol, phi, quad, |u, _, j| g(u) * j.value, |u, _, j| g(u) * j.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct WeakResidual<S> {
    /// `⟨v, φ_t⟩ + ⟨v u^k, φ_x⟩`.
    pub mass: S,
    /// `⟨v u, φ_t⟩ + ⟨v u^{k+1}, φ_x⟩ - ⟨α v u, φ⟩`.
    pub momentum: S,
    /// `∫∫ |φ|`, by the same quadrature.
    pub phi_l1: S,
}

impl<S: Scalar> WeakResidual<S> {
    pub fn mass_normalized(&self) -> S {
        self.mass / self.phi_l1
    }

    pub fn momentum_normalized(&self) -> S {
        self.momentum / self.phi_l1
    }

    /// Larger of the two normalized magnitudes.
    pub fn max_normalized(&self) -> S {
        self.mass_normalized().abs().max(self.momentum_normalized().abs())
    }
}

pub fn weak_residual<S: Scalar>(
    sol: &MeasureSolution<S>,
    problem: &RiemannProblem<S>,
    phi: &SpaceTimeTestFunction<S>,
    quad: Quadrature,
) -> Result<WeakResidual<S>> {
    problem.validate()?;
    if phi.is_zero() {
        phi.validate()?;
        return Ok(WeakResidual {
            mass: S::zero(),
            momentum: S::zero(),
            phi_l1: S::zero(),
        });
    }
    let k = problem.k;
    let alpha = problem.alpha;
    let transport = |u: S, j: Jet<S>| j.dt + pow(u, k) * j.dx;
    let mass = pair_generic(sol, phi, quad, |u, _, j| transport(u, j), |u, _, j| transport(u, j))?;
    let momentum = pair_generic(
        sol,
        phi,
        quad,
        |u, _, j| u * (transport(u, j) - alpha * j.value),
        |u, _, j| u * (transport(u, j) - alpha * j.value),
    )?;
    let ((x0, x1), (t0, t1)) = phi.bounding_box().expect("nonzero test function has a support");
    let rule = GaussLegendre::<S>::new(quad.order);
    let mut phi_l1 = S::zero();
    for (t, wt) in composite_points(&rule, t0, t1, quad.panels) {
        for (x, wx) in composite_points(&rule, x0, x1, quad.panels) {
            phi_l1 = phi_l1 + wt * wx * phi.value(x, t).abs();
        }
    }
    Ok(WeakResidual { mass, momentum, phi_l1 })
}

/// Seeded family of admissible test functions, each a separable bump whose
/// support straddles the trajectory of `params`, optionally plus a second,
/// smaller term centered off the curve.
pub fn random_test_functions<S: Scalar>(
    problem: &RiemannProblem<S>,
    params: &DeltaShockParams<S>,
    count: usize,
    seed: u64,
) -> Result<Vec<SpaceTimeTestFunction<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let tc: f64 = rng.gen_range(0.6..2.0);
        let tw: f64 = rng.gen_range(0.2..0.5);
        let xs = shock_state(params, problem.alpha, problem.k, S::lit(tc))?
            .x
            .to_f64_lossy();
        let xw: f64 = rng.gen_range(0.3..1.0);
        let xc = xs + rng.gen_range(-0.4..0.4) * xw;
        let kind = |center: f64, width: f64, sloping: bool| {
            if sloping {
                TestFunction::sloping(S::lit(center), S::lit(width), S::lit(0.4 * width))
            } else {
                TestFunction::bump(S::lit(center), S::lit(width))
            }
        };
        let mut phi = SpaceTimeTestFunction::separable(kind(xc, xw, rng.gen_bool(0.5)), kind(tc, tw, false))
            .scaled(S::lit(rng.gen_range(0.5..2.0)));
        if rng.gen_bool(0.5) {
            let extra = SpaceTimeTestFunction::separable(
                kind(xc + rng.gen_range(-1.0..1.0), rng.gen_range(0.2..0.6), false),
                kind(tc, 0.8 * tw, false),
            )
            .scaled(S::lit(rng.gen_range(-0.5..0.5)));
            phi = phi.plus(&extra);
        }
        phi.validate()?;
        out.push(phi);
    }
    Ok(out)
}
