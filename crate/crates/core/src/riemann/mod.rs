//! Exact delta-shock solution of the damped pressureless system
//!
//! ```text
//! v_t + (v u^k)_x = 0,
//! (v u)_t + (v u^{k+1})_x = -alpha v u,
//! ```
//!
//! with Riemann data `(v_-, u_-)` for `x < 0` and `(v_+, u_+)` for `x > 0`.
//! When `u_- > u_+` the solution is a single delta shock moving along
//! `x(t) = sigma (1 - e^{-alpha k t}) / (alpha k)` and carrying the weight
//! `w(t) = w0 (1 - e^{-alpha k t}) / (alpha k)`, where `(sigma, w0, u_delta)`
//! solve
//!
//! ```text
//! sigma = u_delta^k,
//! w0 = -sigma [v] + [v u^k],
//! w0 u_delta = -sigma [v u] + [v u^{k+1}],
//! ```
//!
//! under the entropy bracket `u_+^k < sigma < u_-^k`, with `[q] = q_- - q_+`.

mod polynomial;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{pow, Scalar};

pub use polynomial::{bracketed_root, scan_sign_changes, unique_root_in, Polynomial, SignScan};
pub use trajectory::{evaluate_solution, rh_residual, shock_state, ShockState, SolutionSample};

/// Number of coarse samples used to certify a unique entropy root.
pub const ROOT_SCAN_SAMPLES: usize = 1024;

/// `[q] = q_- - q_+`.
#[inline]
pub fn jump<S: Scalar>(q_minus: S, q_plus: S) -> S {
    q_minus - q_plus
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct RiemannProblem<S> {
    pub v_minus: S,
    pub v_plus: S,
    pub u_minus: S,
    pub u_plus: S,
    /// Damping rate; zero selects the undamped limit formulas.
    pub alpha: S,
    /// Odd exponent of the flux `v u^k`.
    pub k: u32,
}

impl<S: Scalar> RiemannProblem<S> {
    pub fn new(v_minus: S, v_plus: S, u_minus: S, u_plus: S, alpha: S, k: u32) -> Self {
        Self {
            v_minus,
            v_plus,
            u_minus,
            u_plus,
            alpha,
            k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("v_minus", self.v_minus),
            ("v_plus", self.v_plus),
            ("u_minus", self.u_minus),
            ("u_plus", self.u_plus),
            ("alpha", self.alpha),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidProblem(format!("{name} must be finite (got {value})")));
            }
        }
        if self.v_minus <= S::zero() || self.v_plus <= S::zero() {
            return Err(Error::InvalidProblem(format!(
                "densities must be positive (v_minus = {}, v_plus = {})",
                self.v_minus, self.v_plus
            )));
        }
        if self.alpha < S::zero() {
            return Err(Error::InvalidProblem(format!(
                "damping rate must be nonnegative (alpha = {})",
                self.alpha
            )));
        }
        if self.k == 0 || self.k.is_multiple_of(2) {
            return Err(Error::InvalidProblem(format!(
                "exponent k must be an odd positive integer (k = {})",
                self.k
            )));
        }
        Ok(())
    }

    /// Validates and additionally requires `u_minus > u_plus`.
    pub fn require_delta_shock(&self) -> Result<()> {
        self.validate()?;
        if self.u_minus <= self.u_plus {
            return Err(Error::UnsupportedConfiguration(format!(
                "delta-shock solutions require u_minus > u_plus (got u_minus = {}, u_plus = {})",
                self.u_minus, self.u_plus
            )));
        }
        Ok(())
    }

    /// `[v u^j] = v_- u_-^j - v_+ u_+^j`; `j = 0` gives `[v]`.
    pub fn bracket(&self, j: u32) -> S {
        jump(self.v_minus * pow(self.u_minus, j), self.v_plus * pow(self.u_plus, j))
    }

    /// `alpha k`, the decay rate of the shock trajectory.
    pub fn trajectory_rate(&self) -> S {
        self.alpha * S::from_u32(self.k).unwrap()
    }

    /// Characteristic speeds `(u_-^k, u_+^k)` bounding the entropy bracket.
    pub fn wave_fan(&self) -> (S, S) {
        (pow(self.u_minus, self.k), pow(self.u_plus, self.k))
    }
}

/// `(sigma, w0, u_delta)` of the delta shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct DeltaShockParams<S> {
    pub sigma: S,
    pub w0: S,
    pub u_delta: S,
}

impl<S: Scalar> DeltaShockParams<S> {
    /// Residuals of the three algebraic conditions, in order.
    pub fn residuals(&self, problem: &RiemannProblem<S>) -> [S; 3] {
        let k = problem.k;
        [
            self.sigma - pow(self.u_delta, k),
            self.w0 - (-self.sigma * problem.bracket(0) + problem.bracket(k)),
            self.w0 * self.u_delta - (-self.sigma * problem.bracket(1) + problem.bracket(k + 1)),
        ]
    }

    pub fn satisfies_entropy(&self, problem: &RiemannProblem<S>) -> bool {
        let (left, right) = problem.wave_fan();
        right < self.sigma && self.sigma < left
    }
}

/// Polynomial in `u_delta` obtained by eliminating `sigma` and `w0`:
/// `P(u) = -[v] u^{k+1} + [v u] u^k + [v u^k] u - [v u^{k+1}]`.
pub fn delta_shock_polynomial<S: Scalar>(problem: &RiemannProblem<S>) -> Result<Polynomial<S>> {
    problem.require_delta_shock()?;
    let k = problem.k as usize;
    let mut coeffs = vec![S::zero(); k + 2];
    coeffs[k + 1] = coeffs[k + 1] - problem.bracket(0);
    coeffs[k] = coeffs[k] + problem.bracket(1);
    coeffs[1] = coeffs[1] + problem.bracket(problem.k);
    coeffs[0] = coeffs[0] - problem.bracket(problem.k + 1);
    Ok(Polynomial::new(coeffs))
}

/// Number of sign changes of the entropy polynomial on `samples` points of
/// `(u_+, u_-)`.
pub fn entropy_sign_changes<S: Scalar>(problem: &RiemannProblem<S>, samples: usize) -> Result<usize> {
    let p = delta_shock_polynomial(problem)?;
    let delta = (problem.u_minus - problem.u_plus) * S::lit(1e-12);
    Ok(scan_sign_changes(&p, problem.u_plus + delta, problem.u_minus - delta, samples).changes)
}

/// Solves for `(sigma, w0, u_delta)` with the entropy root selected by a
/// bracketed search on `(u_+, u_-)`.
pub fn solve_delta_shock<S: Scalar>(problem: &RiemannProblem<S>) -> Result<DeltaShockParams<S>> {
    let p = delta_shock_polynomial(problem)?;
    let u_delta = unique_root_in(&p, problem.u_plus, problem.u_minus, ROOT_SCAN_SAMPLES)?;
    let sigma = pow(u_delta, problem.k);
    let w0 = -sigma * problem.bracket(0) + problem.bracket(problem.k);
    Ok(DeltaShockParams { sigma, w0, u_delta })
}

/// Closed-form parameters for `k = 1` (Eulerian droplet model).
pub fn closed_form_k1<S: Scalar>(problem: &RiemannProblem<S>) -> Result<DeltaShockParams<S>> {
    problem.require_delta_shock()?;
    if problem.k != 1 {
        return Err(Error::InvalidArgument(format!(
            "closed form applies to k = 1 only (k = {})",
            problem.k
        )));
    }
    let (vm, vp, um, up) = (problem.v_minus, problem.v_plus, problem.u_minus, problem.u_plus);
    let (u_delta, w0) = if vm != vp {
        let (sm, sp) = (vm.sqrt(), vp.sqrt());
        ((sm * um + sp * up) / (sm + sp), (vm * vp).sqrt() * (um - up))
    } else {
        ((um + up) / S::lit(2.0), vm * (um - up))
    };
    Ok(DeltaShockParams {
        sigma: u_delta,
        w0,
        u_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn problem(v: (f64, f64), u: (f64, f64), k: u32) -> RiemannProblem<f64> {
        RiemannProblem::new(v.0, v.1, u.0, u.1, 1.0, k)
    }

    #[test]
    fn jump_examples() {
        assert_eq!(jump(4.0, 1.0), 3.0);
        assert_eq!(jump(1.0, 1.0), 0.0);
        assert_eq!(jump(1.0, -1.0), 2.0);
    }

    #[test]
    fn polynomial_symmetric_k1() {
        let p = delta_shock_polynomial(&problem((1.0, 1.0), (1.0, -1.0), 1)).unwrap();
        assert_eq!(p.coeffs, vec![0.0, 4.0, 0.0]);
    }

    #[test]
    fn polynomial_k3() {
        let p = delta_shock_polynomial(&problem((1.0, 2.0), (1.0, 0.0), 3)).unwrap();
        assert_eq!(p.coeffs, vec![-1.0, 1.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn polynomial_k1_matches_droplet_quadratic() {
        let p = delta_shock_polynomial(&problem((4.0, 1.0), (2.0, 0.0), 1)).unwrap();
        assert_eq!(p.coeffs, vec![-16.0, 16.0, -3.0]);
        assert_abs_diff_eq!(p.eval(4.0 / 3.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.eval(4.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_droplet_case() {
        let s = solve_delta_shock(&problem((4.0, 1.0), (2.0, 0.0), 1)).unwrap();
        assert_abs_diff_eq!(s.sigma, 4.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.w0, 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.u_delta, 4.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn solve_symmetric_case() {
        let s = solve_delta_shock(&problem((1.0, 1.0), (1.0, -1.0), 1)).unwrap();
        assert_abs_diff_eq!(s.sigma, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.w0, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.u_delta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn solve_k3_golden_case() {
        let s = solve_delta_shock(&problem((1.0, 2.0), (1.0, 0.0), 3)).unwrap();
        let root5 = 5f64.sqrt();
        assert_abs_diff_eq!(s.u_delta, (root5 - 1.0) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.sigma, root5 - 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.w0, root5 - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn solve_in_single_precision() {
        let p = RiemannProblem::new(4.0_f32, 1.0, 2.0, 0.0, 1.0, 1);
        let s = solve_delta_shock(&p).unwrap();
        assert!((s.u_delta - 4.0 / 3.0).abs() < 1e-6);
        assert!((s.w0 - 4.0).abs() < 1e-5);
    }

    #[test]
    fn closed_form_examples() {
        let s = closed_form_k1(&problem((4.0, 1.0), (2.0, 0.0), 1)).unwrap();
        assert_abs_diff_eq!(s.u_delta, 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.w0, 4.0, epsilon = 1e-15);

        let s = closed_form_k1(&problem((1.0, 1.0), (1.0, -1.0), 1)).unwrap();
        assert_eq!((s.sigma, s.w0, s.u_delta), (0.0, 2.0, 0.0));

        let pr = problem((9.0, 4.0), (1.0, 0.0), 1);
        let s = closed_form_k1(&pr).unwrap();
        assert_abs_diff_eq!(s.u_delta, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(s.w0, 6.0, epsilon = 1e-15);
        let t = solve_delta_shock(&pr).unwrap();
        assert_abs_diff_eq!(s.u_delta, t.u_delta, epsilon = 1e-12);
        assert_abs_diff_eq!(s.w0, t.w0, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_rejects_k3() {
        assert!(matches!(
            closed_form_k1(&problem((1.0, 2.0), (1.0, 0.0), 3)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rejects_non_delta_shock_data() {
        let err = solve_delta_shock(&problem((1.0, 1.0), (0.0, 1.0), 1)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedConfiguration(_)));
        assert!(err.to_string().contains("u_minus > u_plus"));
        let err = solve_delta_shock(&problem((1.0, 1.0), (1.0, 1.0), 1)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedConfiguration(_)));
    }

    #[test]
    fn rejects_invalid_problems() {
        let bad = [
            problem((0.0, 1.0), (1.0, 0.0), 1),
            problem((1.0, -1.0), (1.0, 0.0), 1),
            problem((1.0, 1.0), (1.0, 0.0), 2),
            problem((1.0, 1.0), (1.0, 0.0), 0),
            RiemannProblem::new(1.0, 1.0, 1.0, 0.0, -1.0, 1),
            RiemannProblem::new(1.0, f64::NAN, 1.0, 0.0, 1.0, 1),
        ];
        for p in bad {
            assert!(matches!(solve_delta_shock(&p), Err(Error::InvalidProblem(_))), "{p:?}");
        }
    }

    #[test]
    fn params_satisfy_system_and_entropy() {
        let pr = problem((0.3, 2.5), (1.7, -0.4), 5);
        let s = solve_delta_shock(&pr).unwrap();
        assert!(s.satisfies_entropy(&pr));
        for r in s.residuals(&pr) {
            assert!(r.abs() < 1e-12, "{r}");
        }
        assert!(s.w0 > 0.0);
    }
}
