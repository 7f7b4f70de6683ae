use serde::{Deserialize, Serialize};

use super::{DeltaShockParams, RiemannProblem};
use crate::error::{Error, Result};
use crate::scalar::{decay_time, pow, Scalar};

/// Position, weight and front velocity of the delta shock at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", deny_unknown_fields)]
pub struct ShockState<S> {
    pub t: S,
    pub x: S,
    pub w: S,
    pub u_front: S,
}

/// Point evaluation of the measure solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", tag = "region", rename_all = "snake_case")]
pub enum SolutionSample<S> {
    Left { v: S, u: S },
    Right { v: S, u: S },
    OnShock(ShockState<S>),
}

fn check_time<S: Scalar>(t: S) -> Result<()> {
    if !(t >= S::zero()) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and nonnegative (t = {t})"
        )));
    }
    Ok(())
}

pub fn shock_state<S: Scalar>(params: &DeltaShockParams<S>, alpha: S, k: u32, t: S) -> Result<ShockState<S>> {
    check_time(t)?;
    if !(alpha >= S::zero()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be nonnegative (alpha = {alpha})"
        )));
    }
    let rate = alpha * S::from_u32(k).unwrap();
    let d = decay_time(rate, t);
    Ok(ShockState {
        t,
        x: params.sigma * d,
        w: params.w0 * d,
        u_front: params.u_delta * (-alpha * t).exp(),
    })
}

/// Evaluates the solution at `(x, t)`. Points within `band` of the shock
/// position are reported as on the shock; the default band is
/// `1e-9 (1 + |x(t)|)`.
pub fn evaluate_solution<S: Scalar>(
    problem: &RiemannProblem<S>,
    params: &DeltaShockParams<S>,
    x: S,
    t: S,
    band: Option<S>,
) -> Result<SolutionSample<S>> {
    problem.validate()?;
    let state = shock_state(params, problem.alpha, problem.k, t)?;
    let band = band.unwrap_or_else(|| S::lit(1e-9) * (S::one() + state.x.abs()));
    let decay = (-problem.alpha * t).exp();
    Ok(if (x - state.x).abs() <= band {
        SolutionSample::OnShock(state)
    } else if x < state.x {
        SolutionSample::Left {
            v: problem.v_minus,
            u: problem.u_minus * decay,
        }
    } else {
        SolutionSample::Right {
            v: problem.v_plus,
            u: problem.u_plus * decay,
        }
    })
}

/// Residuals of the generalized Rankine–Hugoniot conditions along the
/// trajectory built from `params`:
///
/// ```text
/// r1 = dx/dt - u_delta(t)^k
/// r2 = dw/dt - (-[[v]] sigma(t) + [[v u^k]])
/// r3 = d(w u_delta(t))/dt - (-[[v u]] sigma(t) + [[v u^{k+1}]] - alpha w u_delta(t))
/// ```
///
/// with traces `(v_±, u_± e^{-alpha t})`, `u_delta(t) = u_delta e^{-alpha t}`
/// and `sigma(t) = u_delta(t)^k`. Derivatives are taken analytically.
pub fn rh_residual<S: Scalar>(problem: &RiemannProblem<S>, params: &DeltaShockParams<S>, t: S) -> Result<[S; 3]> {
    problem.validate()?;
    check_time(t)?;
    let k = problem.k;
    let alpha = problem.alpha;
    let rate = problem.trajectory_rate();
    let d = decay_time(rate, t);
    let dd = (-rate * t).exp();
    let decay = (-alpha * t).exp();

    let dx = params.sigma * dd;
    let w = params.w0 * d;
    let dw = params.w0 * dd;
    let front = params.u_delta * decay;
    let dfront = -alpha * front;
    let sigma_t = pow(front, k);

    let um = problem.u_minus * decay;
    let up = problem.u_plus * decay;
    let (vm, vp) = (problem.v_minus, problem.v_plus);
    let jv = vm - vp;
    let jvu = vm * um - vp * up;
    let jvuk = vm * pow(um, k) - vp * pow(up, k);
    let jvuk1 = vm * pow(um, k + 1) - vp * pow(up, k + 1);

    let r1 = dx - sigma_t;
    let r2 = dw - (-jv * sigma_t + jvuk);
    let r3 = (dw * front + w * dfront) - (-jvu * sigma_t + jvuk1 - alpha * w * front);
    Ok([r1, r2, r3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::solve_delta_shock;
    use approx::assert_abs_diff_eq;

    fn droplet() -> (RiemannProblem<f64>, DeltaShockParams<f64>) {
        let p = RiemannProblem::new(4.0, 1.0, 2.0, 0.0, 1.0, 1);
        let s = solve_delta_shock(&p).unwrap();
        (p, s)
    }

    #[test]
    fn state_at_ln2() {
        let params = DeltaShockParams {
            sigma: 4.0 / 3.0,
            w0: 4.0,
            u_delta: 4.0 / 3.0,
        };
        let s = shock_state(&params, 1.0, 1, 2f64.ln()).unwrap();
        assert_abs_diff_eq!(s.x, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.w, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.u_front, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn state_at_origin_and_undamped() {
        let (_, params) = droplet();
        let s = shock_state(&params, 1.0, 1, 0.0).unwrap();
        assert_eq!((s.x, s.w), (0.0, 0.0));
        let s = shock_state(&params, 0.0, 1, 3.0).unwrap();
        assert_abs_diff_eq!(s.x, 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(s.w, 12.0, epsilon = 1e-13);
        assert!(shock_state(&params, 1.0, 1, -1.0).is_err());
    }

    #[test]
    fn state_limits_for_large_time() {
        let (_, params) = droplet();
        let s = shock_state(&params, 1.0, 3, 200.0).unwrap();
        assert_abs_diff_eq!(s.x, params.sigma / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_regions() {
        let (p, s) = droplet();
        match evaluate_solution(&p, &s, -1.0, 1.0, None).unwrap() {
            SolutionSample::Left { v, u } => {
                assert_eq!(v, 4.0);
                assert_abs_diff_eq!(u, 2.0 * (-1f64).exp(), epsilon = 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            evaluate_solution(&p, &s, 10.0, 1.0, None).unwrap(),
            SolutionSample::Right { v: 1.0, u: 0.0 }
        );
        let x1 = 4.0 / 3.0 * (1.0 - (-1f64).exp());
        match evaluate_solution(&p, &s, x1, 1.0, None).unwrap() {
            SolutionSample::OnShock(st) => {
                assert_abs_diff_eq!(st.w, 4.0 * (1.0 - (-1f64).exp()), epsilon = 1e-13);
                assert_abs_diff_eq!(st.u_front, 4.0 / 3.0 * (-1f64).exp(), epsilon = 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn evaluate_at_initial_time_reports_empty_shock() {
        let (p, s) = droplet();
        match evaluate_solution(&p, &s, 0.0, 0.0, None).unwrap() {
            SolutionSample::OnShock(st) => assert_eq!(st.w, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rh_exact_vanishes() {
        let (p, s) = droplet();
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            for r in rh_residual(&p, &s, t).unwrap() {
                assert!(r.abs() < 1e-12, "t = {t}: {r}");
            }
        }
        for r in rh_residual(&p, &s, 50.0).unwrap() {
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn rh_detects_wrong_speed() {
        let (p, mut s) = droplet();
        s.sigma += 0.1;
        let r = rh_residual(&p, &s, 0.0).unwrap();
        assert_abs_diff_eq!(r[0], 0.1, epsilon = 1e-14);
    }

    #[test]
    fn rh_undamped() {
        let p = RiemannProblem::new(1.0_f64, 2.0, 1.0, 0.0, 0.0, 3);
        let s = solve_delta_shock(&p).unwrap();
        for t in [0.0, 0.5, 7.0] {
            for r in rh_residual(&p, &s, t).unwrap() {
                assert!(r.abs() < 1e-12);
            }
        }
    }
}
