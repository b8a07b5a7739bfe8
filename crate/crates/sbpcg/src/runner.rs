//! Runs a resolved configuration and writes its output files.

use std::path::PathBuf;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::experiments::{ad_check, operators_text, run_advect, run_burgers, run_steady, run_weno};
use crate::output::{write_file, write_profile, write_table};

/// Files written and the text report for standard output.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub report: String,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let dir = &cfg.output.dir;
    let tag = &cfg.output.tag;
    let prec = cfg.output.precision;
    let mut out = RunOutput::default();
    match cfg.experiment {
        Experiment::SteadyConvergence => {
            for res in run_steady(cfg)? {
                let case = format!("{tag}_{}", res.tag());
                let title = format!("a/eps = {}, p = {}", res.ratio, res.p);
                out.files.extend(write_table(dir, &case, &title, &res.rows, prec)?);
                out.files.extend(write_profile(dir, &case, &res.finest, prec)?);
                out.report.push_str(&sbpcg_core::metrics::render_table_text(&title, &res.rows));
                out.report.push('\n');
            }
        }
        Experiment::Advect | Experiment::Burgers | Experiment::Weno3 => {
            let profile = match cfg.experiment {
                Experiment::Advect => run_advect(cfg)?,
                Experiment::Burgers => run_burgers(cfg)?,
                _ => run_weno(cfg)?,
            };
            let err = profile.error().iter().fold(0.0f64, |m, e| m.max(e.abs()));
            out.report = format!("{}: {} nodes, t = {}, max error {err:.3e}\n", cfg.experiment.name(), profile.x.len(), cfg.time.t_end);
            out.files.extend(write_profile(dir, tag, &profile, prec)?);
        }
        Experiment::Operators => {
            out.report = operators_text(cfg.mesh.p, prec)?;
            out.files.push(write_file(dir, &format!("operators_{tag}.txt"), &out.report)?);
        }
        Experiment::AdCheck => {
            out.report = ad_check(cfg.mesh.p, &cfg.ad.coeffs, cfg.ad.mode)?.render(prec);
            out.files.push(write_file(dir, &format!("ad_check_{tag}.txt"), &out.report)?);
        }
    }
    out.files.push(write_file(dir, &format!("manifest_{tag}.toml"), &cfg.manifest())?);
    Ok(out)
}
