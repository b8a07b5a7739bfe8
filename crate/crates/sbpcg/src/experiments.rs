//! Experiment drivers shared by the command line and the test suites.

use std::fmt::Write;

use sbpcg_core::dissipation::{psd_check, validate_coefficients, Activation, DissipationMode, DissipationSpec, RegionViolation};
use sbpcg_core::mesh::{build_mesh, GlobalSystem, Grading};
use sbpcg_core::metrics::{make_table, ConvergenceRow};
use sbpcg_core::solvers::exact::{exact_burgers, exact_pulse_step, exact_steady, initial_pulse_step};
use sbpcg_core::solvers::{solve_steady, BurgersSolver, LinearAdvection, StateVector, SteadyProblem, TimeIntegrator};
use sbpcg_core::weno::{extrapolated_right, uniform_grid, Flux, Weno3};
use sbpcg_core::{basis::ReferenceElement, sbp::build_sbp, Matrix};

use crate::config::{AdConfig, ExperimentConfig, MeshConfig, WenoProblem};
use crate::error::CliError;

/// Nodal solution next to the reference solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub exact: Vec<f64>,
}

impl Profile {
    pub fn error(&self) -> Vec<f64> {
        self.u.iter().zip(&self.exact).map(|(u, v)| u - v).collect()
    }
}

pub fn build_system(mesh: &MeshConfig) -> Result<GlobalSystem, CliError> {
    let (ne, grading) = match &mesh.boundaries {
        Some(b) => (b.len() - 1, Grading::Explicit(b.clone())),
        None => ((mesh.nodes - 1) / mesh.p, Grading::Uniform),
    };
    Ok(GlobalSystem::new(build_mesh(mesh.x0, mesh.x1, ne, mesh.p, &grading)?)?)
}

/// Dissipation operator description for a configured run, or `None` when all coefficients vanish.
pub fn dissipation_spec(ad: &AdConfig, sys: &GlobalSystem) -> Result<Option<DissipationSpec>, CliError> {
    if ad.is_off() {
        return Ok(None);
    }
    let p = sys.mesh().order();
    let spec = match ad.mode {
        DissipationMode::ConstantSigned => DissipationSpec::constant(p, ad.coeffs.clone())?,
        DissipationMode::NonnegativeVariable => {
            let fields = ad.coeffs.iter().map(|&c| vec![c; sys.n_nodes()]).collect();
            DissipationSpec::nodal(p, fields)?
        }
    };
    Ok(Some(match ad.window {
        Some(w) => spec.with_activation(Activation::window(w.center, w.radius, w.t_start)?),
        None => spec,
    }))
}

fn integrator(cfg: &ExperimentConfig) -> Result<TimeIntegrator, CliError> {
    Ok(TimeIntegrator::new(cfg.time.scheme, cfg.time.dt)?)
}

/// Pulse and step advected with speed `a`, inflow data from the exact solution.
pub fn run_advect(cfg: &ExperimentConfig) -> Result<Profile, CliError> {
    let sys = build_system(&cfg.mesh)?;
    let (a, eps) = (cfg.physics.a, cfg.physics.eps);
    let x0 = cfg.mesh.x0;
    let data = move |t: f64| {
        let xi = x0 - a * t;
        let u = exact_pulse_step(x0, t, a);
        let ux = if xi <= 0.6 { -200.0 * (xi - 0.2) * u } else { 0.0 };
        (a * u - eps * ux, 0.0)
    };
    let mut solver = LinearAdvection::new(&sys, a)?.with_diffusion(eps)?.with_boundary_data(data);
    if let Some(spec) = dissipation_spec(&cfg.ad, &sys)? {
        solver = solver.with_dissipation(spec, if cfg.ad.track { a } else { 0.0 })?;
    }
    let x = sys.mesh().nodes().to_vec();
    let u0 = x.iter().map(|&x| initial_pulse_step(x)).collect();
    let end = solver.run(StateVector::new(u0, 0.0), &integrator(cfg)?, cfg.time.t_end)?;
    let exact = x.iter().map(|&x| exact_pulse_step(x, cfg.time.t_end, a)).collect();
    Ok(Profile { x, u: end.u, exact })
}

/// Split-form Burgers from `sin(2 pi x)`, boundary data from the exact solution.
pub fn run_burgers(cfg: &ExperimentConfig) -> Result<Profile, CliError> {
    let sys = build_system(&cfg.mesh)?;
    let (x0, x1) = (cfg.mesh.x0, cfg.mesh.x1);
    let mut solver = BurgersSolver::new(&sys).with_boundary_data(move |t| (exact_burgers(x0, t), exact_burgers(x1, t)));
    if let Some(spec) = dissipation_spec(&cfg.ad, &sys)? {
        solver = solver.with_dissipation(spec, cfg.ad.scaling)?;
    }
    let x = sys.mesh().nodes().to_vec();
    let u0 = x.iter().map(|&x| exact_burgers(x, 0.0)).collect();
    let end = solver.run(StateVector::new(u0, 0.0), &integrator(cfg)?, cfg.time.t_end)?;
    let exact = x.iter().map(|&x| exact_burgers(x, cfg.time.t_end)).collect();
    Ok(Profile { x, u: end.u, exact })
}

/// WENO3 on a uniform grid with `mesh.nodes` points.
pub fn run_weno(cfg: &ExperimentConfig) -> Result<Profile, CliError> {
    let n = cfg.mesh.nodes;
    if n < 4 {
        return Err(CliError::config("weno3 needs at least 4 nodes"));
    }
    let (x, dx) = uniform_grid(cfg.mesh.x0, cfg.mesh.x1, n);
    let (x0, x1, t_end, a) = (cfg.mesh.x0, cfg.mesh.x1, cfg.time.t_end, cfg.physics.a);
    let (u, exact): (Vec<f64>, Vec<f64>) = match cfg.weno.problem {
        WenoProblem::PulseStep => {
            let scheme = Weno3 {
                cfl: cfg.weno.cfl,
                eps: cfg.weno.eps,
                ..Weno3::new(Flux::Linear(a))
            };
            let ghosts = |u: &[f64], t: f64| {
                (
                    [exact_pulse_step(x0 - 2.0 * dx, t, a), exact_pulse_step(x0 - dx, t, a)],
                    extrapolated_right(u),
                )
            };
            let u0: Vec<f64> = x.iter().map(|&x| initial_pulse_step(x)).collect();
            let u = scheme.solve(&u0, dx, 0.0, t_end, &ghosts);
            (u, x.iter().map(|&x| exact_pulse_step(x, t_end, a)).collect())
        }
        WenoProblem::BurgersSine => {
            let scheme = Weno3 {
                cfl: cfg.weno.cfl,
                eps: cfg.weno.eps,
                ..Weno3::new(Flux::Burgers)
            };
            let ghosts = |_: &[f64], t: f64| {
                (
                    [exact_burgers(x0 - 2.0 * dx, t), exact_burgers(x0 - dx, t)],
                    [exact_burgers(x1 + dx, t), exact_burgers(x1 + 2.0 * dx, t)],
                )
            };
            let u0: Vec<f64> = x.iter().map(|&x| exact_burgers(x, 0.0)).collect();
            let u = scheme.solve(&u0, dx, 0.0, t_end, &ghosts);
            (u, x.iter().map(|&x| exact_burgers(x, t_end)).collect())
        }
    };
    Ok(Profile { x, u, exact })
}

/// One convergence table and the finest-mesh profile.
#[derive(Debug, Clone)]
pub struct SteadyResult {
    pub ratio: f64,
    pub p: usize,
    pub rows: Vec<ConvergenceRow>,
    pub finest: Profile,
}

impl SteadyResult {
    pub fn tag(&self) -> String {
        format!("r{}_p{}", self.ratio, self.p)
    }
}

fn steady_case(a: f64, ratio: f64, p: usize, nodes: &[usize]) -> Result<SteadyResult, CliError> {
    let rows = make_table(a, ratio, p, nodes)?;
    let n = rows.last().map(|r| r.nodes).ok_or_else(|| CliError::config("steady.nodes is empty"))?;
    let eps = a / ratio;
    let sys = GlobalSystem::new(sbpcg_core::mesh::Mesh1D::uniform_with_nodes(0.0, 1.0, n, p)?)?;
    let u = solve_steady(&sys, &SteadyProblem::boundary_layer(a, eps))?.u;
    let x = sys.mesh().nodes().to_vec();
    let exact = x.iter().map(|&x| exact_steady(x, a, eps)).collect();
    Ok(SteadyResult {
        ratio,
        p,
        rows,
        finest: Profile { x, u, exact },
    })
}

/// Steady boundary-layer tables for every configured ratio and order, one worker per case.
pub fn run_steady(cfg: &ExperimentConfig) -> Result<Vec<SteadyResult>, CliError> {
    let cases: Vec<(f64, usize)> = cfg.steady.ratios.iter().flat_map(|&r| cfg.steady.orders.iter().map(move |&p| (r, p))).collect();
    let a = cfg.physics.a;
    let nodes = &cfg.steady.nodes;
    std::thread::scope(|scope| {
        let handles: Vec<_> = cases.iter().map(|&(r, p)| scope.spawn(move || steady_case(a, r, p, nodes))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::config("steady worker panicked"))))
            .collect()
    })
}

fn write_matrix(out: &mut String, name: &str, m: &Matrix, precision: usize) {
    let _ = writeln!(out, "# {name} ({}x{})", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.*e}", precision - 1, m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Text dump of the reference element and its SBP operators.
pub fn operators_text(p: usize, precision: usize) -> Result<String, CliError> {
    let elem = ReferenceElement::new(p)?;
    let ops = build_sbp(&elem);
    let mut out = String::new();
    let vec_row = |v: &[f64]| v.iter().map(|x| format!("{:.*e}", precision - 1, x)).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "# p = {p}");
    let _ = writeln!(out, "# nodes\n{}", vec_row(elem.nodes()));
    let _ = writeln!(out, "# weights\n{}", vec_row(elem.weights()));
    write_matrix(&mut out, "P", &ops.mass_matrix(), precision);
    write_matrix(&mut out, "Qx", ops.qx(), precision);
    write_matrix(&mut out, "B", ops.b(), precision);
    write_matrix(&mut out, "Dx", ops.dx(), precision);
    for i in 2..=p {
        write_matrix(&mut out, &format!("D{i}"), ops.derivative(i)?, precision);
    }
    Ok(out)
}

/// Dissipation block for given coefficients, with the region verdict and its spectrum bound.
#[derive(Debug, Clone)]
pub struct AdCheck {
    pub p: usize,
    pub coeffs: Vec<f64>,
    pub matrix: Matrix,
    pub verdict: Result<(), RegionViolation>,
    pub min_eigenvalue: f64,
    pub is_psd: bool,
}

pub fn ad_check(p: usize, coeffs: &[f64], mode: DissipationMode) -> Result<AdCheck, CliError> {
    if coeffs.len() > p {
        return Err(CliError::config(format!("{} coefficients given for order {p}", coeffs.len())));
    }
    let ops = build_sbp(&ReferenceElement::new(p)?);
    let mut m = Matrix::zeros(p + 1, p + 1);
    for (i, &c) in coeffs.iter().enumerate() {
        m += ops.gram(i + 1)? * c;
    }
    let report = psd_check(&m)?;
    Ok(AdCheck {
        p,
        coeffs: coeffs.to_vec(),
        matrix: m,
        verdict: validate_coefficients(p, coeffs, mode),
        min_eigenvalue: report.min_eigenvalue,
        is_psd: report.is_psd,
    })
}

impl AdCheck {
    pub fn render(&self, precision: usize) -> String {
        let mut out = String::new();
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| format!("{c:.*e}", precision - 1)).collect();
        let _ = writeln!(out, "# p = {}, coefficients = [{}]", self.p, coeffs.join(", "));
        write_matrix(&mut out, "D_AD", &self.matrix, precision);
        match &self.verdict {
            Ok(()) => {
                let _ = writeln!(out, "verdict: ok");
            }
            Err(v) => {
                let _ = writeln!(out, "verdict: violation {v}");
            }
        }
        let _ = writeln!(out, "min_eigenvalue: {:.*e}", precision - 1, self.min_eigenvalue);
        let _ = writeln!(out, "psd: {}", self.is_psd);
        out
    }
}
