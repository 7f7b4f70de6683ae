//! The `ε → 0` limit of the viscous profiles: pointwise convergence to the
//! far-field states, extraction of the delta weight, the limiting shock speed,
//! and the change of variables between `ξ` and `(x, t)`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_float;
use crate::profile::{
    interpolate, profile_ode_residual, solve_profile, solve_profile_from, Layer, ProfileConfig, ProfileSettings,
    ViscousProfile,
};
use crate::quadrature::GaussLegendre;
use crate::riemann::{solve_delta_shock, DeltaShockParams, RiemannProblem};
use crate::scalar::{decay_time, pow, Scalar};
use crate::test_function::TestFunction;

fn check_time<S: Scalar>(t: S) -> Result<()> {
    if !(t > S::zero()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be positive (t = {t})")));
    }
    Ok(())
}

/// `ξ = αk x / (1 - e^{-αkt})`, reducing to `x/t` when `α = 0`.
pub fn similarity_map<S: Scalar>(x: S, t: S, alpha: S, k: u32) -> Result<S> {
    check_time(t)?;
    Ok(x / decay_time(alpha * S::from_u32(k).unwrap(), t))
}

/// Inverse of [`similarity_map`] at fixed `t`.
pub fn similarity_inverse<S: Scalar>(xi: S, t: S, alpha: S, k: u32) -> Result<S> {
    check_time(t)?;
    Ok(xi * decay_time(alpha * S::from_u32(k).unwrap(), t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TimeSample<S> {
    pub xi: S,
    pub v: S,
    pub u: S,
    /// `ξ` fell outside `[-R, R]` and the far-field state was returned.
    pub far_field: bool,
}

/// `(v, u)(x, t) = (v̂(ξ), û(ξ) e^{-αt})` from a profile.
pub fn map_to_time_domain<S: Scalar>(profile: &ViscousProfile<S>, x: S, t: S) -> Result<TimeSample<S>> {
    let p = &profile.problem;
    let xi = similarity_map(x, t, p.alpha, p.k)?;
    let decay = (-p.alpha * t).exp();
    Ok(if xi < -profile.r {
        TimeSample {
            xi,
            v: p.v_minus,
            u: p.u_minus * decay,
            far_field: true,
        }
    } else if xi > profile.r {
        TimeSample {
            xi,
            v: p.v_plus,
            u: p.u_plus * decay,
            far_field: true,
        }
    } else {
        TimeSample {
            xi,
            v: profile.v_at(xi),
            u: profile.u_at(xi) * decay,
            far_field: false,
        }
    })
}

/// Sup-norm distances from the far-field states outside `|ξ - σ| < η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Deviation<S> {
    pub u_left: S,
    pub v_left: S,
    pub u_right: S,
    pub v_right: S,
    /// `sup |u'|` over cells entirely outside the band.
    pub slope: S,
}

impl<S: Scalar> Deviation<S> {
    /// `sup|u - u_-| + sup|v - v_-|` left of the band.
    pub fn left(&self) -> S {
        self.u_left + self.v_left
    }

    pub fn right(&self) -> S {
        self.u_right + self.v_right
    }
}

/// [`pointwise_deviation`] on raw arrays.
pub fn deviation_of<S: Scalar>(
    xi: &[S],
    u: &[S],
    v: &[S],
    problem: &RiemannProblem<S>,
    sigma: S,
    eta: S,
) -> Result<Deviation<S>> {
    let n = xi.len();
    if n < 2 || u.len() != n || v.len() != n {
        return Err(Error::InvalidArgument(
            "profile arrays must have equal length >= 2".into(),
        ));
    }
    if !(eta > S::zero()) {
        return Err(Error::InvalidArgument(format!("eta must be positive (got {eta})")));
    }
    if !(sigma - eta > xi[0] && sigma + eta < xi[n - 1]) {
        return Err(Error::InvalidArgument(format!(
            "exclusion band [{}, {}] leaves no room inside [{}, {}]",
            sigma - eta,
            sigma + eta,
            xi[0],
            xi[n - 1]
        )));
    }
    let mut d = Deviation {
        u_left: S::zero(),
        v_left: S::zero(),
        u_right: S::zero(),
        v_right: S::zero(),
        slope: S::zero(),
    };
    for i in 0..n {
        if xi[i] <= sigma - eta {
            d.u_left = d.u_left.max((u[i] - problem.u_minus).abs());
            d.v_left = d.v_left.max((v[i] - problem.v_minus).abs());
        } else if xi[i] >= sigma + eta {
            d.u_right = d.u_right.max((u[i] - problem.u_plus).abs());
            d.v_right = d.v_right.max((v[i] - problem.v_plus).abs());
        }
    }
    let outside = |x: S| (x - sigma).abs() >= eta;
    for i in 0..n - 1 {
        if outside(xi[i]) && outside(xi[i + 1]) && (xi[i] - sigma) * (xi[i + 1] - sigma) > S::zero() {
            d.slope = d.slope.max(((u[i + 1] - u[i]) / (xi[i + 1] - xi[i])).abs());
        }
    }
    Ok(d)
}

pub fn pointwise_deviation<S: Scalar>(profile: &ViscousProfile<S>, sigma: S, eta: S) -> Result<Deviation<S>> {
    deviation_of(&profile.xi, &profile.u, &profile.v, &profile.problem, sigma, eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Mass,
    Momentum,
}

/// `∫ h f'` over the augmented grid, with `∫_cell h` taken from `Φ` and `f'`
/// from the cell difference. Since `h' = -v` this is `∫ v f` for any `f`
/// vanishing at `±R`, and never resolves the concentrated density directly.
fn flux_pairing<S: Scalar>(layer: &Layer<S>, f: &[S]) -> S {
    (0..layer.xi.len() - 1)
        .map(|i| {
            let dx = layer.xi[i + 1] - layer.xi[i];
            if dx == S::zero() {
                S::zero()
            } else {
                (layer.phi[i + 1] - layer.phi[i]) * (f[i + 1] - f[i]) / dx
            }
        })
        .sum()
}

/// Integral of `ψ` over `[a, b] ∩ support`.
fn psi_integral<S: Scalar>(psi: &TestFunction<S>, a: S, b: S) -> S {
    let (lo, hi) = psi.support();
    let (a, b) = (a.max(lo), b.min(hi));
    if !(b > a) {
        return S::zero();
    }
    GaussLegendre::new(16).composite(a, b, 64, |x| psi.value(x))
}

/// `[∫ (v - J(ξ - σ)) ψ] / ψ(σ)` (mass) or `[∫ (v u - J̃(ξ - σ)) ψ] / ψ(σ)`
/// (momentum), where `J`, `J̃` are the step backgrounds `v_∓`, `v_∓ u_∓`.
pub fn delta_weight_estimate<S: Scalar>(
    profile: &ViscousProfile<S>,
    sigma: S,
    psi: &TestFunction<S>,
    moment: Moment,
) -> Result<S> {
    psi.validate()?;
    let (lo, hi) = psi.support();
    if !(lo > -profile.r && hi < profile.r) {
        return Err(Error::TestFunction(format!(
            "support [{lo}, {hi}] is clipped by the domain [-{r}, {r}]",
            r = profile.r
        )));
    }
    let norm = psi.value(sigma);
    if !(norm.abs() > S::lit(1e-8)) {
        return Err(Error::TestFunction(format!(
            "psi(sigma) = {norm} is too small to normalize by"
        )));
    }
    let layer = &profile.layer;
    let p = &profile.problem;
    let (left_bg, right_bg, f): (S, S, Vec<S>) = match moment {
        Moment::Mass => (p.v_minus, p.v_plus, layer.xi.iter().map(|&x| psi.value(x)).collect()),
        Moment::Momentum => (
            p.v_minus * p.u_minus,
            p.v_plus * p.u_plus,
            layer.xi.iter().zip(&layer.u).map(|(&x, &u)| u * psi.value(x)).collect(),
        ),
    };
    let total = flux_pairing(layer, &f);
    let background = left_bg * psi_integral(psi, lo, sigma) + right_bg * psi_integral(psi, sigma, hi);
    Ok((total - background) / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SigmaEstimate<S> {
    /// `ξσ` at the smallest `ε`.
    pub last: S,
    /// Linear-in-`ε` extrapolation from the two smallest `ε`.
    pub richardson: Option<S>,
    pub extrapolated: bool,
    /// Whether the reported estimate lies strictly between `u_+^k` and `u_-^k`.
    pub in_bracket: Option<bool>,
}

impl<S: Scalar> SigmaEstimate<S> {
    pub fn best(&self) -> S {
        self.richardson.unwrap_or(self.last)
    }
}

/// Estimates `σ = lim ξσ^ε` from `(ε, ξσ^ε)` pairs.
pub fn extrapolate_sigma<S: Scalar>(samples: &[(S, S)]) -> Result<SigmaEstimate<S>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no records to extrapolate from".into()));
    }
    if let Some((e, _)) = samples.iter().find(|(e, x)| !x.is_finite() || !e.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "record for epsilon = {e} has no finite xi_sigma"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let (e2, x2) = sorted[sorted.len() - 1];
    let richardson = if sorted.len() >= 2 {
        let (e1, x1) = sorted[sorted.len() - 2];
        (e1 != e2).then(|| x2 - e2 * (x1 - x2) / (e1 - e2))
    } else {
        None
    };
    Ok(SigmaEstimate {
        last: x2,
        richardson,
        extrapolated: richardson.is_some(),
        in_bracket: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct SweepConfig<S> {
    /// Strictly decreasing viscosities.
    pub epsilons: Vec<S>,
    #[serde(default)]
    pub profile: ProfileSettings<S>,
    /// Exclusion half-width; defaults to a quarter of `u_-^k - u_+^k`.
    #[serde(default)]
    pub eta: Option<S>,
    /// Test function for the weight estimates; defaults to a sloping
    /// function centered at `σ` with support `η` and plateau `η/2`.
    #[serde(default)]
    pub test_function: Option<TestFunction<S>>,
    /// Warm-start each `ε` from the previous profile.
    #[serde(default = "yes")]
    pub continuation: bool,
}

fn yes() -> bool {
    true
}

impl<S: Scalar> SweepConfig<S> {
    pub fn new(epsilons: Vec<S>) -> Self {
        Self {
            epsilons,
            profile: ProfileSettings::default(),
            eta: None,
            test_function: None,
            continuation: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one epsilon".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > S::zero())) {
            return Err(Error::InvalidConfig(format!("epsilons must be positive (got {e})")));
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidConfig("epsilons must be strictly decreasing".into()));
        }
        if let Some(eta) = self.eta {
            if !(eta > S::zero()) {
                return Err(Error::InvalidConfig(format!("eta must be positive (got {eta})")));
            }
        }
        Ok(())
    }
}

pub fn default_eta<S: Scalar>(problem: &RiemannProblem<S>) -> S {
    let (left, right) = problem.wave_fan();
    S::lit(0.25) * (left - right)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct SweepRecord<S> {
    pub epsilon: S,
    pub xi_sigma: S,
    pub sup_dev_left: S,
    pub sup_dev_right: S,
    pub slope_dev: S,
    pub weight_estimate: S,
    pub momentum_weight_estimate: S,
    pub iterations: usize,
    pub ode_residual: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct SweepReport<S> {
    pub problem: RiemannProblem<S>,
    pub exact: DeltaShockParams<S>,
    pub eta: S,
    pub test_function: TestFunction<S>,
    pub records: Vec<SweepRecord<S>>,
    pub sigma_estimate: SigmaEstimate<S>,
    /// `|weight - w0| / w0` at the smallest `ε`.
    pub weight_relative_error: S,
    /// `|momentum weight - w0 u_δ| / max(w0 |u_δ|, w0)` at the smallest `ε`.
    pub momentum_relative_error: S,
}

impl<S: Scalar> SweepReport<S> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "epsilon,xi_sigma,dev_left,dev_right,weight,momentum_weight")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_float(r.epsilon),
                fmt_float(r.xi_sigma),
                fmt_float(r.sup_dev_left),
                fmt_float(r.sup_dev_right),
                fmt_float(r.weight_estimate),
                fmt_float(r.momentum_weight_estimate)
            )?;
        }
        Ok(())
    }
}

pub struct Sweep<S> {
    pub report: SweepReport<S>,
    pub profiles: Vec<ViscousProfile<S>>,
}

/// Solves the profiles for each `ε` (largest first) and assembles the
/// convergence report.
pub fn run_sweep<S: Scalar>(problem: &RiemannProblem<S>, config: &SweepConfig<S>) -> Result<Sweep<S>> {
    problem.require_delta_shock()?;
    config.validate()?;
    let exact = solve_delta_shock(problem)?;
    let eta = config.eta.unwrap_or_else(|| default_eta(problem));
    let psi = config
        .test_function
        .unwrap_or_else(|| TestFunction::sloping(exact.sigma, eta, eta / S::lit(2.0)));

    let mut profiles: Vec<ViscousProfile<S>> = Vec::with_capacity(config.epsilons.len());
    let mut records = Vec::with_capacity(config.epsilons.len());
    for &eps in &config.epsilons {
        let pc = ProfileConfig::from_settings(eps, &config.profile);
        let profile = match profiles.last() {
            Some(prev) if config.continuation => solve_profile_from(problem, &pc, prev)?,
            _ => solve_profile(problem, &pc)?,
        };
        let dev = pointwise_deviation(&profile, exact.sigma, eta)?;
        records.push(SweepRecord {
            epsilon: eps,
            xi_sigma: profile.xi_sigma,
            sup_dev_left: dev.left(),
            sup_dev_right: dev.right(),
            slope_dev: dev.slope,
            weight_estimate: delta_weight_estimate(&profile, exact.sigma, &psi, Moment::Mass)?,
            momentum_weight_estimate: delta_weight_estimate(&profile, exact.sigma, &psi, Moment::Momentum)?,
            iterations: profile.iterations,
            ode_residual: profile_ode_residual(&profile, eps, None)?.sup,
        });
        profiles.push(profile);
    }

    let samples: Vec<(S, S)> = records.iter().map(|r| (r.epsilon, r.xi_sigma)).collect();
    let mut sigma_estimate = extrapolate_sigma(&samples)?;
    let (left, right) = problem.wave_fan();
    let best = sigma_estimate.best();
    sigma_estimate.in_bracket = Some(right < best && best < left);

    let last = records[records.len() - 1];
    let w0 = exact.w0;
    let mw = w0 * exact.u_delta;
    Ok(Sweep {
        report: SweepReport {
            problem: *problem,
            exact,
            eta,
            test_function: psi,
            records,
            sigma_estimate,
            weight_relative_error: (last.weight_estimate - w0).abs() / w0,
            momentum_relative_error: (last.momentum_weight_estimate - mw).abs() / mw.abs().max(w0),
        },
        profiles,
    })
}

/// `u_-^k`, `u_+^k` bracket membership for a single value.
pub fn in_entropy_bracket<S: Scalar>(problem: &RiemannProblem<S>, s: S) -> bool {
    pow(problem.u_plus, problem.k) < s && s < pow(problem.u_minus, problem.k)
}

/// Profile values interpolated at `ξ`.
pub fn profile_at<S: Scalar>(profile: &ViscousProfile<S>, xi: S) -> (S, S) {
    (
        interpolate(&profile.xi, &profile.u, xi),
        interpolate(&profile.xi, &profile.v, xi),
    )
}
