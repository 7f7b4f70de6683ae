use std::fmt::Write as _;
use std::io;

use dslab_core::fv::{measure_concentration, simulate, Concentration, FvState};
use dslab_core::io::fmt_float;
use dslab_core::profile::{profile_ode_residual, solve_profile, ProfileConfig, ViscousProfile};
use dslab_core::riemann::{rh_residual, shock_state, solve_delta_shock, DeltaShockParams, RiemannProblem, ShockState};
use dslab_core::test_function::SpaceTimeTestFunction;
use dslab_core::vanishing::{run_sweep, SweepReport};
use dslab_core::weak::{random_test_functions, weak_residual, MeasureSolution};
use serde::{Deserialize, Serialize};

use crate::config::{Command, Format, RunConfig, TimeGrid};
use crate::CliError;

/// A file to be written into the output directory.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct Outcome {
    /// Printed to stdout.
    pub summary: String,
    pub artifacts: Vec<Artifact>,
}

fn json<T: Serialize>(name: &str, value: &T) -> Result<Artifact, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(io::Error::other(e)))?;
    text.push('\n');
    Ok(Artifact {
        name: format!("{name}.json"),
        bytes: text.into_bytes(),
    })
}

fn csv(name: &str, write: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<Artifact, CliError> {
    let mut bytes = Vec::new();
    write(&mut bytes)?;
    Ok(Artifact {
        name: format!("{name}.csv"),
        bytes,
    })
}

fn row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_float(v)).collect::<Vec<_>>().join(",")
}

pub fn run(command: Command, config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    match command {
        Command::Solve => solve(config, format),
        Command::Trajectory => trajectory(config, format),
        Command::Profile => profile(config, format),
        Command::Sweep => sweep(config, format),
        Command::Fv => fv(config, format),
        Command::Verify => verify(config, format),
    }
}

fn time_grid(config: &RunConfig) -> Result<TimeGrid, CliError> {
    let grid = config.times.clone().unwrap_or_default();
    grid.validate().map_err(CliError::Config)?;
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReport {
    pub problem: RiemannProblem<f64>,
    pub params: DeltaShockParams<f64>,
    /// Largest `|r1|, |r2|, |r3|` of the generalized Rankine–Hugoniot
    /// residuals over the time grid.
    pub rh_max: [f64; 3],
    pub t_end: f64,
    pub samples: usize,
}

fn solve(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let grid = time_grid(config)?;
    let p = &config.problem;
    let params = solve_delta_shock(p)?;
    let mut rh_max = [0.0f64; 3];
    for t in grid.points() {
        let r = rh_residual(p, &params, t)?;
        for (m, r) in rh_max.iter_mut().zip(r) {
            *m = m.max(r.abs());
        }
    }
    let report = SolveReport {
        problem: *p,
        params,
        rh_max,
        t_end: grid.t_end,
        samples: grid.samples,
    };
    let summary = format!(
        "sigma = {}\nw0 = {}\nu_delta = {}\nmax RH residual on [0, {}] = {:e}",
        fmt_float(params.sigma),
        fmt_float(params.w0),
        fmt_float(params.u_delta),
        grid.t_end,
        rh_max.iter().copied().fold(0.0, f64::max)
    );
    let artifact = match format {
        Format::Json => json("solve", &report)?,
        Format::Csv => csv("solve", |w| {
            use std::io::Write;
            writeln!(w, "sigma,w0,u_delta,rh_max_1,rh_max_2,rh_max_3")?;
            writeln!(
                w,
                "{}",
                row(&[params.sigma, params.w0, params.u_delta, rh_max[0], rh_max[1], rh_max[2]])
            )
        })?,
    };
    Ok(Outcome {
        summary,
        artifacts: vec![artifact],
    })
}

fn trajectory(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let grid = time_grid(config)?;
    let p = &config.problem;
    let params = solve_delta_shock(p)?;
    let states = grid
        .points()
        .map(|t| shock_state(&params, p.alpha, p.k, t))
        .collect::<Result<Vec<ShockState<f64>>, _>>()?;
    let last = states[states.len() - 1];
    let artifact = match format {
        Format::Json => json("trajectory", &states)?,
        Format::Csv => csv("trajectory", |w| {
            use std::io::Write;
            writeln!(w, "t,x,w,u_front")?;
            for s in &states {
                writeln!(w, "{}", row(&[s.t, s.x, s.w, s.u_front]))?;
            }
            Ok(())
        })?,
    };
    Ok(Outcome {
        summary: format!(
            "{} samples; at t = {}: x = {}, w = {}",
            states.len(),
            last.t,
            fmt_float(last.x),
            fmt_float(last.w)
        ),
        artifacts: vec![artifact],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileReport {
    pub problem: RiemannProblem<f64>,
    pub epsilon: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub xi_sigma: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub defect: f64,
    pub regrids: usize,
    pub ode_residual: f64,
    pub xi: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl ProfileReport {
    fn new(profile: &ViscousProfile<f64>) -> Result<Self, CliError> {
        Ok(Self {
            problem: profile.problem,
            epsilon: profile.epsilon,
            r: profile.r,
            xi_sigma: profile.xi_sigma,
            iterations: profile.iterations,
            converged: profile.converged,
            residual: profile.residual,
            defect: profile.defect,
            regrids: profile.regrids,
            ode_residual: profile_ode_residual(profile, profile.epsilon, None)?.sup,
            xi: profile.xi.clone(),
            u: profile.u.clone(),
            v: profile.v.clone(),
        })
    }
}

fn profile(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let pc: &ProfileConfig<f64> = config
        .profile
        .as_ref()
        .ok_or_else(|| CliError::Config("the profile command needs a \"profile\" block".into()))?;
    let profile = solve_profile(&config.problem, pc)?;
    let report = ProfileReport::new(&profile)?;
    let summary = format!(
        "epsilon = {}: xi_sigma = {}, {} iterations, ODE residual {:e}",
        report.epsilon,
        fmt_float(report.xi_sigma),
        report.iterations,
        report.ode_residual
    );
    let artifact = match format {
        Format::Json => json("profile", &report)?,
        Format::Csv => csv("profile", |w| profile.write_csv(w))?,
    };
    Ok(Outcome {
        summary,
        artifacts: vec![artifact],
    })
}

fn sweep(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let sc = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("the sweep command needs a \"sweep\" block".into()))?;
    let report: SweepReport<f64> = run_sweep(&config.problem, sc)?.report;
    let mut summary = String::new();
    for r in &report.records {
        let _ = writeln!(
            summary,
            "epsilon = {}: xi_sigma = {}, deviations {:e} / {:e}, weight {}",
            r.epsilon,
            fmt_float(r.xi_sigma),
            r.sup_dev_left,
            r.sup_dev_right,
            fmt_float(r.weight_estimate)
        );
    }
    let _ = write!(
        summary,
        "sigma estimate {} (exact {}); weight error {:e}",
        fmt_float(report.sigma_estimate.best()),
        fmt_float(report.exact.sigma),
        report.weight_relative_error
    );
    let artifact = match format {
        Format::Json => json("sweep", &report)?,
        Format::Csv => csv("sweep", |w| report.write_csv(w))?,
    };
    Ok(Outcome {
        summary,
        artifacts: vec![artifact],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvComparison {
    pub measured: Concentration<f64>,
    pub exact: ShockState<f64>,
    /// `|x_hat - x(t)| / Δx`.
    pub position_error_cells: f64,
    /// `|w_hat - w(t)| / w(t)`.
    pub weight_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvReport {
    pub t_end: f64,
    pub cells: usize,
    pub dx: f64,
    pub steps: usize,
    pub mass_outflow: f64,
    pub momentum_outflow: f64,
    /// Present when the data produce a delta shock.
    pub comparison: Option<FvComparison>,
    pub snapshots: Vec<FvState<f64>>,
}

fn fv(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let fc = config
        .fv
        .as_ref()
        .ok_or_else(|| CliError::Config("the fv command needs an \"fv\" block".into()))?;
    let p = &config.problem;
    let run = simulate(p, &fc.simulation)?;
    let last = run.last();
    let comparison = if p.u_minus > p.u_plus {
        let params = solve_delta_shock(p)?;
        let exact = shock_state(&params, p.alpha, p.k, last.t)?;
        let measured = measure_concentration(last, p, fc.window_halfwidth)?;
        Some(FvComparison {
            position_error_cells: (measured.x_hat - exact.x).abs() / last.dx,
            weight_relative_error: (measured.w_hat - exact.w).abs() / exact.w,
            measured,
            exact,
        })
    } else {
        None
    };
    let mut summary = format!("{} steps to t = {}", run.steps, last.t);
    if let Some(c) = &comparison {
        let _ = write!(
            summary,
            "\nx_hat = {} (exact {}, {:.3} cells off)\nw_hat = {} (exact {}, relative error {:e})",
            fmt_float(c.measured.x_hat),
            fmt_float(c.exact.x),
            c.position_error_cells,
            fmt_float(c.measured.w_hat),
            fmt_float(c.exact.w),
            c.weight_relative_error
        );
    }
    let report = FvReport {
        t_end: last.t,
        cells: last.len(),
        dx: last.dx,
        steps: run.steps,
        mass_outflow: run.mass_outflow,
        momentum_outflow: run.momentum_outflow,
        comparison,
        snapshots: run.snapshots,
    };
    let artifacts = match format {
        Format::Json => vec![json("fv", &report)?],
        Format::Csv => {
            let mut out = Vec::with_capacity(report.snapshots.len() + 1);
            for (i, s) in report.snapshots.iter().enumerate() {
                out.push(csv(&format!("fv_snapshot_{i:03}"), |w| s.write_csv(w))?);
            }
            if let Some(c) = &report.comparison {
                out.push(csv("fv_summary", |w| {
                    use std::io::Write;
                    writeln!(
                        w,
                        "t,x_hat,w_hat,x_exact,w_exact,position_error_cells,weight_relative_error"
                    )?;
                    writeln!(
                        w,
                        "{}",
                        row(&[
                            report.t_end,
                            c.measured.x_hat,
                            c.measured.w_hat,
                            c.exact.x,
                            c.exact.w,
                            c.position_error_cells,
                            c.weight_relative_error
                        ])
                    )
                })?);
            }
            out
        }
    };
    Ok(Outcome { summary, artifacts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRow {
    pub index: usize,
    pub mass: f64,
    pub momentum: f64,
    pub phi_l1: f64,
    pub mass_normalized: f64,
    pub momentum_normalized: f64,
    /// Normalized residuals of the solution with the perturbed trajectory.
    pub perturbed_mass_normalized: f64,
    pub perturbed_momentum_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub params: DeltaShockParams<f64>,
    pub perturbation: f64,
    pub test_functions: Vec<SpaceTimeTestFunction<f64>>,
    pub rows: Vec<VerifyRow>,
}

fn verify(config: &RunConfig, format: Format) -> Result<Outcome, CliError> {
    let vc = config.verify.clone().unwrap_or_default();
    let p = &config.problem;
    let params = solve_delta_shock(p)?;
    if !(vc.perturbation > 0.0) || !vc.perturbation.is_finite() {
        return Err(CliError::Config(format!(
            "verify.perturbation must be positive (got {})",
            vc.perturbation
        )));
    }
    let family = match vc.test_functions {
        Some(f) => f,
        None => random_test_functions(p, &params, vc.count, vc.seed)?,
    };
    let exact = MeasureSolution::from_delta_shock(p, &params);
    let wrong = MeasureSolution::with_speed_factor(p, &params, vc.perturbation);
    let mut rows = Vec::with_capacity(family.len());
    for (index, phi) in family.iter().enumerate() {
        let r = weak_residual(&exact, p, phi, vc.quadrature)?;
        let q = weak_residual(&wrong, p, phi, vc.quadrature)?;
        rows.push(VerifyRow {
            index,
            mass: r.mass,
            momentum: r.momentum,
            phi_l1: r.phi_l1,
            mass_normalized: r.mass_normalized(),
            momentum_normalized: r.momentum_normalized(),
            perturbed_mass_normalized: q.mass_normalized(),
            perturbed_momentum_normalized: q.momentum_normalized(),
        });
    }
    let worst = rows
        .iter()
        .map(|r| r.mass_normalized.abs().max(r.momentum_normalized.abs()))
        .fold(0.0, f64::max);
    let summary = format!("{} test functions; largest normalized residual {:e}", rows.len(), worst);
    let report = VerifyReport {
        params,
        perturbation: vc.perturbation,
        test_functions: family,
        rows,
    };
    let artifact = match format {
        Format::Json => json("verify", &report)?,
        Format::Csv => csv("verify", |w| {
            use std::io::Write;
            writeln!(
                w,
                "index,mass,momentum,phi_l1,mass_normalized,momentum_normalized,perturbed_mass_normalized,perturbed_momentum_normalized"
            )?;
            for r in &report.rows {
                writeln!(
                    w,
                    "{},{}",
                    r.index,
                    row(&[
                        r.mass,
                        r.momentum,
                        r.phi_l1,
                        r.mass_normalized,
                        r.momentum_normalized,
                        r.perturbed_mass_normalized,
                        r.perturbed_momentum_normalized
                    ])
                )?;
            }
            Ok(())
        })?,
    };
    Ok(Outcome {
        summary,
        artifacts: vec![artifact],
    })
}
