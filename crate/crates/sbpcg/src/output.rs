//! Whitespace-separated numeric files, convergence tables and run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sbpcg_core::metrics::{render_table_text, ConvergenceRow};

use crate::error::CliError;
use crate::experiments::Profile;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(io_err(&path))?;
    Ok(path)
}

/// Two columns `x y` per line in scientific notation with `precision` significant digits.
pub fn two_columns(x: &[f64], y: &[f64], precision: usize) -> String {
    let mut s = String::with_capacity(x.len() * 2 * (precision + 8));
    for (a, b) in x.iter().zip(y) {
        let _ = writeln!(s, "{:.*e} {:.*e}", precision - 1, a, precision - 1, b);
    }
    s
}

/// Reads a two-column file back.
pub fn read_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => {
                x.push(a);
                y.push(b);
            }
            _ => return Err(CliError::config(format!("{}: malformed line '{line}'", path.display()))),
        }
    }
    Ok((x, y))
}

/// `u_<tag>.csv` with `x u` and `e_<tag>.csv` with `x (u - exact)`.
pub fn write_profile(dir: &Path, tag: &str, profile: &Profile, precision: usize) -> Result<Vec<PathBuf>, CliError> {
    Ok(vec![
        write_file(dir, &format!("u_{tag}.csv"), &two_columns(&profile.x, &profile.u, precision))?,
        write_file(dir, &format!("e_{tag}.csv"), &two_columns(&profile.x, &profile.error(), precision))?,
    ])
}

/// `table_<tag>.csv` with `N error order` rows and the aligned `table_<tag>.txt`.
pub fn write_table(dir: &Path, tag: &str, title: &str, rows: &[ConvergenceRow], precision: usize) -> Result<Vec<PathBuf>, CliError> {
    let mut csv = String::new();
    for r in rows {
        let _ = writeln!(
            csv,
            "{} {:.*e} {:.*e}",
            r.nodes,
            precision - 1,
            r.error,
            precision - 1,
            r.order.unwrap_or(f64::NAN)
        );
    }
    Ok(vec![
        write_file(dir, &format!("table_{tag}.csv"), &csv)?,
        write_file(dir, &format!("table_{tag}.txt"), &render_table_text(title, rows))?,
    ])
}
