use dslab_core::fv::{initial_state, measure_concentration, simulate, FluxKind, FvConfig};
use dslab_core::riemann::{rh_residual, shock_state, solve_delta_shock, DeltaShockParams, RiemannProblem};
use dslab_core::test_function::{SpaceTimeTestFunction, TestFunction};
use dslab_core::weak::{random_test_functions, weak_residual, MeasureSolution, Quadrature};

fn droplet() -> RiemannProblem<f64> {
    RiemannProblem::new(4.0, 1.0, 2.0, 0.0, 1.0, 1)
}

#[test]
fn undamped_symmetric_concentration_sits_at_origin() {
    let p = RiemannProblem::new(1.0_f64, 1.0, 1.0, -1.0, 0.0, 1);
    let run = simulate(&p, &FvConfig::new(-1.0, 1.0, 400, 0.5)).unwrap();
    let s = run.last();
    let c = measure_concentration(s, &p, 0.25).unwrap();
    assert!(c.x_hat.abs() < s.dx, "{}", c.x_hat);
    // w(t) = v (u_- - u_+) t for these data.
    assert!((c.w_hat - 1.0).abs() < 0.05, "{}", c.w_hat);
}

#[test]
fn mass_and_momentum_balance() {
    let p = RiemannProblem::new(4.0_f64, 1.0, 2.0, 0.0, 0.0, 1);
    let cfg = FvConfig::new(-1.0, 2.0, 600, 0.6);
    let s0 = initial_state(&p, &cfg);
    let run = simulate(&p, &cfg).unwrap();
    let s = run.last();
    let mass = s.mass() - s0.mass() + run.mass_outflow;
    let momentum = s.momentum() - s0.momentum() + run.momentum_outflow;
    assert!(mass.abs() <= 1e-12 * s0.mass(), "{mass}");
    assert!(momentum.abs() <= 1e-12 * s0.momentum(), "{momentum}");
}

#[test]
fn damping_of_total_momentum() {
    // Zero-velocity states on both ends: nothing crosses the boundary, so
    // the total momentum follows e^{-αt} up to splitting error.
    let p = RiemannProblem::new(1.0, 1.0, 1.0, 1.0, 0.7, 1);
    let cfg = FvConfig::new(-0.5, 0.5, 64, 1.0);
    let s0 = initial_state(&p, &cfg);
    let run = simulate(&p, &cfg).unwrap();
    let expected = s0.momentum() * (-0.7f64).exp();
    let rel = (run.last().momentum() + run.momentum_outflow * (-0.35f64).exp() - expected).abs() / expected;
    assert!(rel < 1e-2, "{rel}");
}

#[test]
fn refinement_improves_the_oracle() {
    let p = droplet();
    let params = solve_delta_shock(&p).unwrap();
    let exact = shock_state(&params, 1.0, 1, 1.0).unwrap();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for cells in [1000, 2000, 4000] {
        let run = simulate(&p, &FvConfig::new(-2.0, 2.0, cells, 1.0)).unwrap();
        let c = measure_concentration(run.last(), &p, 0.25).unwrap();
        let err = ((c.x_hat - exact.x).abs(), (c.w_hat - exact.w).abs());
        assert!(err.0 < prev.0 && err.1 < prev.1, "{cells}: {err:?} vs {prev:?}");
        prev = err;
    }
}

#[test]
fn local_flux_still_conserves_mass() {
    let p = droplet();
    let mut cfg = FvConfig::new(-2.0, 2.0, 400, 1.0);
    cfg.flux = FluxKind::Local;
    let s0 = initial_state(&p, &cfg);
    let run = simulate(&p, &cfg).unwrap();
    let balance = run.last().mass() - s0.mass() + run.mass_outflow;
    assert!(balance.abs() <= 1e-12 * s0.mass());
    assert!(measure_concentration(run.last(), &p, 0.25).is_ok());
}

#[test]
fn snapshots_are_ordered() {
    let p = droplet();
    let mut cfg = FvConfig::new(-2.0, 2.0, 200, 1.0);
    cfg.snapshots = vec![0.5, 0.25];
    let run = simulate(&p, &cfg).unwrap();
    let times: Vec<f64> = run.snapshots.iter().map(|s| s.t).collect();
    assert_eq!(times, vec![0.25, 0.5, 1.0]);
}

fn family(p: &RiemannProblem<f64>, s: &DeltaShockParams<f64>) -> Vec<SpaceTimeTestFunction<f64>> {
    random_test_functions(p, s, 5, 99).unwrap()
}

#[test]
fn weak_residual_is_linear() {
    let p = droplet();
    let s = solve_delta_shock(&p).unwrap();
    let sol = MeasureSolution::with_speed_factor(&p, &s, 1.1);
    let f = family(&p, &s);
    let q = Quadrature { order: 6, panels: 16 };
    let a = weak_residual(&sol, &p, &f[0], q).unwrap();
    let b = weak_residual(&sol, &p, &f[1], q).unwrap();
    let ab = weak_residual(&sol, &p, &f[0].clone().scaled(2.0).plus(&f[1]), q).unwrap();
    assert!((ab.mass - (2.0 * a.mass + b.mass)).abs() < 1e-13);
    assert!((ab.momentum - (2.0 * a.momentum + b.momentum)).abs() < 1e-13);
    let same = weak_residual(&sol, &p, &f[0].clone().scaled(-3.0), q).unwrap();
    assert!((same.mass + 3.0 * a.mass).abs() < 1e-12);
}

#[test]
fn weak_and_rh_agree_on_which_parameters_solve() {
    let p = droplet();
    let exact = solve_delta_shock(&p).unwrap();
    let f = family(&p, &exact);
    let q = Quadrature { order: 8, panels: 32 };
    let candidates = [
        (exact, true),
        (
            DeltaShockParams {
                w0: exact.w0 * 1.05,
                ..exact
            },
            false,
        ),
        (
            DeltaShockParams {
                u_delta: exact.u_delta * 0.97,
                ..exact
            },
            false,
        ),
        (
            DeltaShockParams {
                sigma: exact.sigma * 1.02,
                ..exact
            },
            false,
        ),
    ];
    for (params, good) in candidates {
        let rh = (0..=20)
            .map(|i| rh_residual(&p, &params, 0.15 * i as f64).unwrap())
            .flat_map(|r| r.into_iter().map(f64::abs))
            .fold(0.0, f64::max);
        let sol = MeasureSolution::from_delta_shock(&p, &params);
        let weak = f
            .iter()
            .map(|phi| weak_residual(&sol, &p, phi, q).unwrap().max_normalized())
            .fold(0.0, f64::max);
        if good {
            assert!(rh < 1e-12 && weak < 1e-6, "{rh} {weak}");
        } else {
            assert!(rh > 1e-3 && weak > 1e-4, "{params:?}: {rh} {weak}");
        }
    }
}

#[test]
fn exact_residuals_converge_under_refinement() {
    let p = RiemannProblem::new(1.0, 2.0, 1.0, 0.0, 0.5, 3);
    let s = solve_delta_shock(&p).unwrap();
    let sol = MeasureSolution::from_delta_shock(&p, &s);
    let phi = SpaceTimeTestFunction::separable(
        TestFunction::bump(shock_state(&s, 0.5, 3, 1.0).unwrap().x, 0.6),
        TestFunction::bump(1.0, 0.5),
    );
    let mut q = Quadrature { order: 4, panels: 4 };
    let mut prev = f64::INFINITY;
    for _ in 0..5 {
        let r = weak_residual(&sol, &p, &phi, q).unwrap().max_normalized();
        assert!(r < prev);
        prev = r;
        q = q.refined();
    }
    assert!(prev < 1e-6);
}
