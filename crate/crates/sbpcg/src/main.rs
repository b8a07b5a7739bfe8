use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbpcg::config::{is_coeff_key, parse_ad_assignments, parse_list, Experiment};
use sbpcg::runner::run;
use sbpcg::{CliError, ExperimentConfig, Settings};

#[derive(Parser)]
#[command(name = "sbpcg", version, about = "SBP-SAT continuous Galerkin experiments with artificial dissipation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    /// Sets any configuration key, e.g. `--set mesh.p=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (default: $SBPCG_OUTPUT_DIR or ./output).
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Tag used in output file names.
    #[arg(long)]
    tag: Option<String>,
}

#[derive(Args)]
struct MeshArgs {
    /// Polynomial order.
    #[arg(long)]
    p: Option<usize>,
    /// Node count, snapped to a multiple of p plus one.
    #[arg(long)]
    nodes: Option<usize>,
    /// Element count (overrides --nodes).
    #[arg(long)]
    elements: Option<usize>,
}

#[derive(Args)]
struct TimeArgs {
    #[arg(long = "t-end")]
    t_end: Option<String>,
    #[arg(long)]
    dt: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Steady boundary-layer convergence tables.
    SteadyConvergence {
        #[command(flatten)]
        common: Common,
        /// a/eps ratios (comma separated).
        #[arg(long)]
        ratio: Option<String>,
        /// Orders (comma separated).
        #[arg(long)]
        p: Option<String>,
        /// Requested node counts (comma separated).
        #[arg(long)]
        nodes: Option<String>,
        #[arg(long)]
        a: Option<String>,
    },
    /// Linear advection of a pulse and a step.
    Advect {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        /// backward-euler or rk4.
        #[arg(long)]
        scheme: Option<String>,
        /// Dissipation coefficients, e.g. "e1=1/3,e2=1/50", or "off".
        #[arg(long)]
        ad: Option<String>,
        /// Window center and radius at t = 0.
        #[arg(long = "ad-window", num_args = 2, value_names = ["CENTER", "RADIUS"])]
        ad_window: Option<Vec<String>>,
        /// Keep the window fixed instead of moving it with the flow.
        #[arg(long = "no-track")]
        no_track: bool,
    },
    /// Split-form Burgers from sin(2 pi x).
    Burgers {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        time: TimeArgs,
        /// Dissipation coefficients, e.g. "e1=9/125,e2=1/500", or "off".
        #[arg(long)]
        ad: Option<String>,
        /// Dissipation window bounds.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<String>>,
        #[arg(long = "t-start")]
        t_start: Option<String>,
        /// element-max or frozen-constant.
        #[arg(long = "speed-scaling")]
        speed_scaling: Option<String>,
    },
    /// Reference element and SBP operators as text.
    Operators {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<usize>,
    },
    /// Dissipation block, region verdict and smallest eigenvalue.
    AdCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<usize>,
        /// Coefficients e1,e2,... (fractions allowed).
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// constant-signed or nonnegative-variable.
        #[arg(long)]
        mode: Option<String>,
    },
    /// WENO3 baseline on a uniform grid.
    Weno3 {
        #[command(flatten)]
        common: Common,
        /// advect or burgers.
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long = "t-end")]
        t_end: Option<String>,
        #[arg(long)]
        a: Option<String>,
    },
}

fn put(s: &mut Settings, key: &str, value: Option<impl ToString>) {
    if let Some(v) = value {
        s.set(key, v.to_string());
    }
}

fn put_mesh(s: &mut Settings, m: &MeshArgs) {
    put(s, "mesh.p", m.p);
    put(s, "mesh.nodes", m.nodes);
    put(s, "mesh.elements", m.elements);
}

fn put_time(s: &mut Settings, t: &TimeArgs) {
    put(s, "time.t_end", t.t_end.as_ref());
    put(s, "time.dt", t.dt.as_ref());
}

fn put_ad(s: &mut Settings, ad: &Option<String>) -> Result<(), CliError> {
    let Some(ad) = ad else { return Ok(()) };
    s.remove_where(|k| k == "ad.coeffs" || is_coeff_key(k));
    if ad.trim() == "off" {
        return Ok(());
    }
    for (i, c) in parse_ad_assignments(ad)?.iter().enumerate() {
        s.set(format!("ad.e{}", i + 1), format!("{c:?}"));
    }
    Ok(())
}

fn settings(command: &Command) -> Result<(Experiment, Settings), CliError> {
    let common = match command {
        Command::SteadyConvergence { common, .. }
        | Command::Advect { common, .. }
        | Command::Burgers { common, .. }
        | Command::Operators { common, .. }
        | Command::AdCheck { common, .. }
        | Command::Weno3 { common, .. } => common,
    };
    let mut s = match &common.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::new(),
    };
    for pair in &common.set {
        s.set_pair(pair)?;
    }
    put(&mut s, "output.dir", common.output.as_ref().map(|p| p.display().to_string()));
    put(&mut s, "output.tag", common.tag.as_ref());
    let experiment = match command {
        Command::SteadyConvergence { ratio, p, nodes, a, .. } => {
            put(&mut s, "steady.ratios", ratio.as_ref());
            put(&mut s, "steady.orders", p.as_ref());
            put(&mut s, "steady.nodes", nodes.as_ref());
            put(&mut s, "physics.a", a.as_ref());
            Experiment::SteadyConvergence
        }
        Command::Advect {
            mesh,
            time,
            a,
            eps,
            scheme,
            ad,
            ad_window,
            no_track,
            ..
        } => {
            put_mesh(&mut s, mesh);
            put_time(&mut s, time);
            put(&mut s, "physics.a", a.as_ref());
            put(&mut s, "physics.eps", eps.as_ref());
            put(&mut s, "time.scheme", scheme.as_ref());
            put_ad(&mut s, ad)?;
            if let Some(w) = ad_window {
                s.set("ad.activation", "window");
                s.set("ad.center", w[0].clone());
                s.set("ad.radius", w[1].clone());
            }
            if *no_track {
                s.set("ad.track", "false");
            }
            Experiment::Advect
        }
        Command::Burgers {
            mesh,
            time,
            ad,
            window,
            t_start,
            speed_scaling,
            ..
        } => {
            put_mesh(&mut s, mesh);
            put_time(&mut s, time);
            put_ad(&mut s, ad)?;
            if let Some(w) = window {
                let b = parse_list(&w.join(","))?;
                if b.len() != 2 || !(b[1] > b[0]) {
                    return Err(CliError::config("--window: expected LO HI with LO < HI"));
                }
                s.set("ad.activation", "window");
                s.set("ad.center", format!("{:?}", 0.5 * (b[0] + b[1])));
                s.set("ad.radius", format!("{:?}", 0.5 * (b[1] - b[0])));
            }
            put(&mut s, "ad.t_start", t_start.as_ref());
            put(&mut s, "ad.speed_scaling", speed_scaling.as_ref());
            Experiment::Burgers
        }
        Command::Operators { p, .. } => {
            put(&mut s, "mesh.p", *p);
            Experiment::Operators
        }
        Command::AdCheck { p, coeffs, mode, .. } => {
            put(&mut s, "mesh.p", *p);
            if let Some(c) = coeffs {
                s.remove_where(|k| k == "ad.coeffs" || is_coeff_key(k));
                s.set("ad.coeffs", c.clone());
            }
            put(&mut s, "ad.mode", mode.as_ref());
            Experiment::AdCheck
        }
        Command::Weno3 { problem, nodes, t_end, a, .. } => {
            put(&mut s, "weno.problem", problem.as_ref());
            put(&mut s, "mesh.nodes", *nodes);
            put(&mut s, "time.t_end", t_end.as_ref());
            put(&mut s, "physics.a", a.as_ref());
            Experiment::Weno3
        }
    };
    s.set("experiment", experiment.name());
    Ok((experiment, s))
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (_, s) = settings(&cli.command)?;
    let cfg = ExperimentConfig::from_settings(&s)?;
    let out = run(&cfg)?;
    let mut stdout = std::io::stdout().lock();
    // A closed pipe downstream is not an error of the run.
    let _ = write!(stdout, "{}", out.report);
    for f in &out.files {
        let _ = writeln!(stdout, "wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={msg:?}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
