//! One evaluation of the self-similar model for a frozen velocity iterate `U`.
//!
//! With `g = U^k - ξ` (strictly decreasing, root `ξσ`) the density solves
//! `(v g)' = -v` on each side of `ξσ` with `v = v_∓` at `∓R`. We carry the
//! flux `h = v g` rather than `v` itself: `h` is bounded, continuous, vanishes
//! at `ξσ` and satisfies `h' = -v`, whereas `v` concentrates there.
//!
//! Between nodes `g` is taken linear, which makes every cell integral exact:
//!
//! ```text
//! h_b / h_a      = (g_b / g_a)^(-1/m),            m = (g_b - g_a) / (b - a)
//! ∫_a^b h dξ     = (h_b g_b - h_a g_a) / (m - 1)
//! ```
//!
//! The cell containing `ξσ` is split there, so the model works on an
//! augmented node set with `ξσ` inserted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::RiemannProblem;
use crate::scalar::{pow, Scalar};

/// Cell rule for `Φ = ∫h` and `I = ∫exp(Φ/ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellRule {
    /// Composite trapezoid on the nodal values.
    Trapezoid,
    /// Exact integration of the piecewise model: closed-form `∫h` and an
    /// exponentially fitted `∫exp(φ)`, exact when `φ` is linear in the cell.
    #[default]
    ExponentialFit,
}

/// Model quantities on the augmented grid (nodes plus `ξσ`).
#[derive(Debug, Clone)]
pub struct Layer<S> {
    pub xi: Vec<S>,
    pub u: Vec<S>,
    pub g: Vec<S>,
    /// `v (U^k - ξ)`.
    pub h: Vec<S>,
    /// `Φ(ξ) = ∫_{-R}^{ξ} h`.
    pub phi: Vec<S>,
    /// Index of `ξσ` in the augmented arrays.
    pub sigma_index: usize,
    /// Whether `ξσ` was inserted between two grid nodes.
    pub inserted: bool,
}

impl<S: Scalar> Layer<S> {
    pub fn xi_sigma(&self) -> S {
        self.xi[self.sigma_index]
    }

    pub fn phi_max(&self) -> S {
        self.phi[self.sigma_index]
    }

    /// Restricts an augmented array to the grid nodes.
    pub fn nodal(&self, aug: &[S]) -> Vec<S> {
        aug.iter()
            .enumerate()
            .filter(|&(i, _)| !(self.inserted && i == self.sigma_index))
            .map(|(_, &x)| x)
            .collect()
    }

    /// Nodal density `h/g`; at a node that coincides with `ξσ` the average of
    /// `-h'` over the two adjacent cells is used instead.
    pub fn density(&self) -> Vec<S> {
        let n = self.xi.len();
        let v: Vec<S> = (0..n)
            .map(|i| {
                if self.g[i] != S::zero() {
                    self.h[i] / self.g[i]
                } else {
                    let (l, r) = (i.saturating_sub(1), (i + 1).min(n - 1));
                    (self.h[l] - self.h[r]) / (self.xi[r] - self.xi[l])
                }
            })
            .collect();
        self.nodal(&v)
    }
}

pub(crate) fn check_grid<S: Scalar>(xi: &[S], u: &[S]) -> Result<()> {
    if xi.len() != u.len() {
        return Err(Error::InvalidArgument(format!(
            "grid has {} nodes but the profile has {} values",
            xi.len(),
            u.len()
        )));
    }
    if xi.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 nodes (got {})",
            xi.len()
        )));
    }
    if let Some(i) = (1..xi.len()).find(|&i| !(xi[i] > xi[i - 1])) {
        return Err(Error::InvalidArgument(format!(
            "grid not strictly increasing at node {i}"
        )));
    }
    if let Some(i) = u.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite profile value at node {i}")));
    }
    Ok(())
}

pub(crate) fn check_monotone<S: Scalar>(u: &[S]) -> Result<()> {
    match (1..u.len()).find(|&i| u[i] > u[i - 1]) {
        Some(index) => Err(Error::NonMonotone { index }),
        None => Ok(()),
    }
}

fn g_values<S: Scalar>(xi: &[S], u: &[S], k: u32) -> Vec<S> {
    xi.iter().zip(u).map(|(&x, &w)| pow(w, k) - x).collect()
}

/// Real `k`-th root for odd `k`.
fn odd_root<S: Scalar>(x: S, k: u32) -> S {
    if k == 1 {
        x
    } else {
        x.signum() * x.abs().powf(S::one() / S::from_u32(k).unwrap())
    }
}

enum Crossing<S> {
    Node(usize),
    /// `ξσ` lies strictly inside cell `c`.
    Cell(usize, S),
}

fn locate<S: Scalar>(xi: &[S], u: &[S], g: &[S], k: u32) -> Result<Crossing<S>> {
    let n = xi.len();
    if !(g[0] > S::zero() && g[n - 1] < S::zero()) {
        return Err(Error::NoSignChange {
            lo: xi[0].to_f64_lossy(),
            hi: xi[n - 1].to_f64_lossy(),
        });
    }
    let p = g.partition_point(|&x| x > S::zero());
    if g[p] == S::zero() {
        return Ok(Crossing::Node(p));
    }
    let c = p - 1;
    let (a, b) = (xi[c], xi[c + 1]);
    let root = if k == 1 {
        // g is exactly linear in the cell.
        a + (b - a) * (g[c] / (g[c] - g[c + 1]))
    } else {
        let f = |x: S| pow(u[c] + (u[c + 1] - u[c]) * ((x - a) / (b - a)), k) - x;
        let (mut lo, mut hi) = (a, b);
        let tol = S::lit(1e-12);
        while hi - lo > tol {
            let mid = (lo + hi) / S::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > S::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / S::lit(2.0)
    };
    Ok(if root <= a {
        Crossing::Node(c)
    } else if root >= b {
        Crossing::Node(c + 1)
    } else {
        Crossing::Cell(c, root)
    })
}

/// Root `ξσ` of `U(ξ)^k = ξ` for a sampled nonincreasing profile, with `U`
/// interpolated linearly between nodes.
pub fn xi_sigma_root<S: Scalar>(xi: &[S], u: &[S], k: u32) -> Result<S> {
    check_grid(xi, u)?;
    check_monotone(u)?;
    let g = g_values(xi, u, k);
    Ok(match locate(xi, u, &g, k)? {
        Crossing::Node(i) => xi[i],
        Crossing::Cell(_, r) => r,
    })
}

/// `ln(h_to / h_from)` across a linear-`g` piece.
fn log_step<S: Scalar>(dx: S, g_from: S, g_to: S) -> S {
    -(dx / g_from) * S::ln1p_rel((g_to - g_from) / g_from)
}

/// Exact `∫_a^b h` for linear `g` and `h = h_a (g/g_a)^(-1/m)`.
fn flux_integral<S: Scalar>(dx: S, ga: S, gb: S, ha: S, hb: S, rule: CellRule) -> S {
    if dx == S::zero() {
        return S::zero();
    }
    if rule == CellRule::Trapezoid {
        return dx * (ha + hb) / S::lit(2.0);
    }
    let m = (gb - ga) / dx;
    let m1 = m - S::one();
    if ga == S::zero() {
        hb * gb / m1
    } else if gb == S::zero() {
        -ha * ga / m1
    } else {
        let q = (S::one() - S::one() / m) * ((gb - ga) / ga).ln_1p();
        ha * ga * q.exp_m1() / m1
    }
}

/// `∫_a^b exp(φ)` for `φ` linear between `pa` and `pb`.
fn exp_integral<S: Scalar>(dx: S, pa: S, pb: S, rule: CellRule) -> S {
    if rule == CellRule::Trapezoid {
        return dx * (pa.exp() + pb.exp()) / S::lit(2.0);
    }
    let d = pb - pa;
    if d.abs() <= S::one() {
        dx * pa.exp() * S::exprel(d)
    } else {
        dx * (pb.exp() - pa.exp()) / d
    }
}

impl<S: Scalar> Layer<S> {
    /// Evaluates the model for the iterate `u` on `xi`. When `xi_sigma` is
    /// given it is used instead of the computed root, after checking it
    /// against the sign of `U^k - ξ`.
    pub fn build(xi: &[S], u: &[S], problem: &RiemannProblem<S>, xi_sigma: Option<S>, rule: CellRule) -> Result<Self> {
        check_grid(xi, u)?;
        check_monotone(u)?;
        let k = problem.k;
        let g = g_values(xi, u, k);
        let crossing = match xi_sigma {
            None => locate(xi, u, &g, k)?,
            Some(s) => {
                if !(s > xi[0] && s < xi[xi.len() - 1]) {
                    return Err(Error::InvalidArgument(format!("xi_sigma = {s} is not interior")));
                }
                let bad =
                    (0..xi.len()).find(|&i| (xi[i] < s && !(g[i] > S::zero())) || (xi[i] > s && !(g[i] < S::zero())));
                if let Some(i) = bad {
                    return Err(Error::InvalidArgument(format!(
                        "xi_sigma = {s} inconsistent with the sign of U^k - xi at node {i}"
                    )));
                }
                let p = xi.partition_point(|&x| x < s);
                if xi[p] == s {
                    Crossing::Node(p)
                } else {
                    Crossing::Cell(p - 1, s)
                }
            }
        };

        let (mut axi, mut au, mut ag) = (xi.to_vec(), u.to_vec(), g);
        let (sigma_index, inserted) = match crossing {
            Crossing::Node(i) => {
                ag[i] = S::zero();
                (i, false)
            }
            Crossing::Cell(c, s) => {
                axi.insert(c + 1, s);
                au.insert(c + 1, odd_root(s, k));
                ag.insert(c + 1, S::zero());
                (c + 1, true)
            }
        };
        let n = axi.len();

        let mut h = vec![S::zero(); n];
        let h0 = problem.v_minus * ag[0];
        let mut log = S::zero();
        h[0] = h0;
        for i in 0..sigma_index.saturating_sub(1) {
            log = log + log_step(axi[i + 1] - axi[i], ag[i], ag[i + 1]);
            h[i + 1] = h0 * log.exp();
        }
        let hn = problem.v_plus * ag[n - 1];
        let mut log = S::zero();
        h[n - 1] = hn;
        for i in (sigma_index + 2..n).rev() {
            log = log + log_step(axi[i - 1] - axi[i], ag[i], ag[i - 1]);
            h[i - 1] = hn * log.exp();
        }
        h[sigma_index] = S::zero();

        let mut phi = vec![S::zero(); n];
        for i in 0..n - 1 {
            phi[i + 1] = phi[i] + flux_integral(axi[i + 1] - axi[i], ag[i], ag[i + 1], h[i], h[i + 1], rule);
        }

        Ok(Layer {
            xi: axi,
            u: au,
            g: ag,
            h,
            phi,
            sigma_index,
            inserted,
        })
    }

    /// Applies the solution operator: `û = u_- + (u_+ - u_-) I(ξ)/I(R)` with
    /// `I(ξ) = ∫_{-R}^{ξ} exp((Φ - max Φ)/ε)`. Returns nodal values.
    pub fn transport(&self, problem: &RiemannProblem<S>, eps: S, rule: CellRule) -> Result<Vec<S>> {
        let phi: Vec<S> = self.phi.iter().map(|&p| (p - self.phi_max()) / eps).collect();
        let u = velocity_from_potential(&self.xi, &phi, problem.u_minus, problem.u_plus, rule)?;
        Ok(self.nodal(&u))
    }
}

/// `u_- + (u_+ - u_-) I(ξ)/I(R)` with `I(ξ) = ∫_{-R}^{ξ} exp(φ)` and `φ`
/// given at the nodes (already shifted so that `max φ = 0`).
pub fn velocity_from_potential<S: Scalar>(
    xi: &[S],
    phi: &[S],
    u_minus: S,
    u_plus: S,
    rule: CellRule,
) -> Result<Vec<S>> {
    let n = xi.len();
    let mut cum = vec![S::zero(); n];
    for i in 0..n - 1 {
        cum[i + 1] = cum[i] + exp_integral(xi[i + 1] - xi[i], phi[i], phi[i + 1], rule);
    }
    let total = cum[n - 1];
    if !(total > S::zero()) || !total.is_finite() {
        return Err(Error::Underresolved(format!("I(R) = {total}")));
    }
    let mut u: Vec<S> = cum
        .iter()
        .map(|&c| u_minus + (u_plus - u_minus) * (c / total))
        .collect();
    u[0] = u_minus;
    u[n - 1] = u_plus;
    Ok(u)
}

/// One application of the operator `T` to the sampled profile `u`.
pub fn apply_t<S: Scalar>(xi: &[S], u: &[S], problem: &RiemannProblem<S>, eps: S, rule: CellRule) -> Result<Vec<S>> {
    problem.validate()?;
    if !(eps > S::zero()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive (got {eps})")));
    }
    check_boundary(u, problem)?;
    Layer::build(xi, u, problem, None, rule)?.transport(problem, eps, rule)
}

pub(crate) fn check_boundary<S: Scalar>(u: &[S], problem: &RiemannProblem<S>) -> Result<()> {
    let tol = |x: S| S::lit(1e-12) * (S::one() + x.abs());
    let (first, last) = (u[0], u[u.len() - 1]);
    if (first - problem.u_minus).abs() > tol(problem.u_minus) || (last - problem.u_plus).abs() > tol(problem.u_plus) {
        return Err(Error::InvalidArgument(format!(
            "profile must run from u_minus = {} to u_plus = {} (got {first} .. {last})",
            problem.u_minus, problem.u_plus
        )));
    }
    Ok(())
}

/// Density and flux for a sampled profile with a prescribed `ξσ`.
#[derive(Debug, Clone)]
pub struct Density<S> {
    pub v: Vec<S>,
    /// `v (U^k - ξ)` at the nodes.
    pub flux: Vec<S>,
}

pub fn density_from_velocity<S: Scalar>(
    xi: &[S],
    u: &[S],
    problem: &RiemannProblem<S>,
    xi_sigma: S,
) -> Result<Density<S>> {
    problem.validate()?;
    let layer = Layer::build(xi, u, problem, Some(xi_sigma), CellRule::ExponentialFit)?;
    Ok(Density {
        v: layer.density(),
        flux: layer.nodal(&layer.h),
    })
}

/// Density through the logarithmic-derivative representation
/// `v = v_- exp(-∫ (U^k)'/(U^k - s) ds)` (and its mirror from the right).
/// Undefined (NaN) at a node that coincides with `ξσ`.
pub fn density_log_derivative<S: Scalar>(
    xi: &[S],
    u: &[S],
    problem: &RiemannProblem<S>,
    xi_sigma: S,
) -> Result<Vec<S>> {
    problem.validate()?;
    let layer = Layer::build(xi, u, problem, Some(xi_sigma), CellRule::ExponentialFit)?;
    let (x, g, s) = (&layer.xi, &layer.g, layer.sigma_index);
    let n = x.len();
    // Per linear-g piece: ∫ (m + 1)/g = (1 + 1/m) ln(g_b/g_a).
    let step = |a: usize, b: usize| {
        let m = (g[b] - g[a]) / (x[b] - x[a]);
        (S::one() + S::one() / m) * (g[b] / g[a]).ln()
    };
    let mut v = vec![S::nan(); n];
    let mut log = S::zero();
    v[0] = problem.v_minus;
    for i in 0..s.saturating_sub(1) {
        log = log - step(i, i + 1);
        v[i + 1] = problem.v_minus * log.exp();
    }
    let mut log = S::zero();
    v[n - 1] = problem.v_plus;
    for i in (s + 2..n).rev() {
        log = log - step(i, i - 1);
        v[i - 1] = problem.v_plus * log.exp();
    }
    Ok(layer.nodal(&v))
}
