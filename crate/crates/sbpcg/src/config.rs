//! Flat dotted-key configuration (`mesh.p`, `ad.e1`, ...) from TOML files and command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sbpcg_core::dissipation::DissipationMode;
use sbpcg_core::metrics::snap_node_count;
use sbpcg_core::solvers::{AdSpeedScaling, Scheme};

use crate::error::CliError;

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "mesh.x0",
    "mesh.x1",
    "mesh.p",
    "mesh.nodes",
    "mesh.elements",
    "mesh.boundaries",
    "physics.a",
    "physics.eps",
    "time.t_end",
    "time.dt",
    "time.scheme",
    "ad.coeffs",
    "ad.mode",
    "ad.activation",
    "ad.center",
    "ad.radius",
    "ad.t_start",
    "ad.track",
    "ad.speed_scaling",
    "ad.frozen_speed",
    "steady.ratios",
    "steady.orders",
    "steady.nodes",
    "weno.problem",
    "weno.cfl",
    "weno.eps",
    "output.dir",
    "output.tag",
    "output.precision",
];

const DEFAULT_TABLE_NODES: [usize; 6] = [10, 19, 40, 85, 181, 361];

/// Raw `key -> value` pairs; later insertions override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(format!("config parse error: {}", e.message())))?;
        let mut s = Settings::new();
        flatten("", &toml::Value::Table(table), &mut s.0)?;
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.0.insert(key.into(), value.into());
    }

    /// Parses `key=value`.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), CliError> {
        let (k, v) = pair.split_once('=').ok_or_else(|| CliError::config(format!("expected key=value, got '{pair}'")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    /// Drops every key matching `pred`.
    pub fn remove_where(&mut self, pred: impl Fn(&str) -> bool) {
        self.0.retain(|k, _| !pred(k));
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.get(key).map_or(Ok(default), |v| parse_number(v).map_err(|e| keyed(key, e)))
    }

    fn usize_opt(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.get(key)
            .map(|v| v.trim().parse::<usize>().map_err(|_| CliError::config(format!("{key}: expected a non-negative integer, got '{v}'"))))
            .transpose()
    }

    fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.get(key).map(|v| parse_list(v).map_err(|e| keyed(key, e))).transpose()
    }

    fn list_usize(&self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        self.get(key)
            .map(|v| {
                split_list(v)
                    .map(|s| s.parse::<usize>().map_err(|_| CliError::config(format!("{key}: expected integers, got '{s}'"))))
                    .collect()
            })
            .transpose()
    }
}

fn keyed(key: &str, e: CliError) -> CliError {
    CliError::config(format!("{key}: {e}"))
}

fn flatten(prefix: &str, value: &toml::Value, out: &mut BTreeMap<String, String>) -> Result<(), CliError> {
    let scalar = |v: &toml::Value| -> Result<String, CliError> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(format!("{f:?}")),
            toml::Value::Boolean(b) => Ok(b.to_string()),
            _ => Err(CliError::config(format!("{prefix}: unsupported value"))),
        }
    };
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out)?;
            }
        }
        toml::Value::Array(items) => {
            let parts: Result<Vec<String>, CliError> = items.iter().map(scalar).collect();
            out.insert(prefix.to_string(), parts?.join(","));
        }
        v => {
            out.insert(prefix.to_string(), scalar(v)?);
        }
    }
    Ok(())
}

/// Parses a decimal number or a fraction `n/d`; integer fractions are divided once, after exact parsing.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::config(format!("invalid number '{s}'"));
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim(), d.trim());
            let (num, den) = match (n.parse::<i64>(), d.parse::<i64>()) {
                (Ok(a), Ok(b)) if a.unsigned_abs() < (1u64 << 53) && b.unsigned_abs() < (1u64 << 53) => (a as f64, b as f64),
                _ => (n.parse::<f64>().map_err(|_| bad())?, d.parse::<f64>().map_err(|_| bad())?),
            };
            if den == 0.0 {
                return Err(CliError::config(format!("zero denominator in '{s}'")));
            }
            num / den
        }
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split([',', ' ']).map(str::trim).filter(|t| !t.is_empty())
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    split_list(s).map(parse_number).collect()
}

/// Parses `e1=9/125,e2=1/500` into coefficients `[9/125, 1/500]`; missing orders are zero.
pub fn parse_ad_assignments(s: &str) -> Result<Vec<f64>, CliError> {
    let mut coeffs: Vec<f64> = Vec::new();
    for part in s.split([',', ';']).map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::config(format!("expected e<i>=<value>, got '{part}'")))?;
        let k = k.trim();
        let i: usize = k
            .strip_prefix('e')
            .and_then(|i| i.parse().ok())
            .filter(|&i| i >= 1)
            .ok_or_else(|| CliError::config(format!("unknown dissipation coefficient '{k}'")))?;
        if coeffs.len() < i {
            coeffs.resize(i, 0.0);
        }
        coeffs[i - 1] = parse_number(v)?;
    }
    Ok(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SteadyConvergence,
    Advect,
    Burgers,
    Operators,
    AdCheck,
    Weno3,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SteadyConvergence => "steady-convergence",
            Experiment::Advect => "advect",
            Experiment::Burgers => "burgers",
            Experiment::Operators => "operators",
            Experiment::AdCheck => "ad-check",
            Experiment::Weno3 => "weno3",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s.trim() {
            "steady-convergence" => Experiment::SteadyConvergence,
            "advect" => Experiment::Advect,
            "burgers" => Experiment::Burgers,
            "operators" => Experiment::Operators,
            "ad-check" => Experiment::AdCheck,
            "weno3" => Experiment::Weno3,
            other => return Err(CliError::config(format!("unknown experiment '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshConfig {
    pub x0: f64,
    pub x1: f64,
    pub p: usize,
    pub requested_nodes: usize,
    /// Node count after snapping to `(N - 1) % p == 0`.
    pub nodes: usize,
    pub boundaries: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    pub a: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: f64,
    pub radius: f64,
    pub t_start: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdConfig {
    /// Physical-frame coefficients `e1..ek`, `k <= p`.
    pub coeffs: Vec<f64>,
    pub mode: DissipationMode,
    /// `None` activates the dissipation everywhere.
    pub window: Option<Window>,
    /// Move the window with the advection speed.
    pub track: bool,
    pub scaling: AdSpeedScaling,
}

impl AdConfig {
    pub fn is_off(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyConfig {
    pub ratios: Vec<f64>,
    pub orders: Vec<usize>,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WenoProblem {
    PulseStep,
    BurgersSine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WenoConfig {
    pub problem: WenoProblem,
    pub cfl: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub tag: String,
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub mesh: MeshConfig,
    pub physics: PhysicsConfig,
    pub time: TimeConfig,
    pub ad: AdConfig,
    pub steady: SteadyConfig,
    pub weno: WenoConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Resolves defaults for the chosen experiment and validates every value.
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        for (k, _) in s.iter() {
            if !KNOWN_KEYS.contains(&k) && !is_coeff_key(k) {
                return Err(CliError::config(format!("unknown key '{k}'")));
            }
        }
        let experiment = Experiment::parse(s.get("experiment").ok_or_else(|| CliError::config("missing key 'experiment'"))?)?;
        let burgers_like = experiment == Experiment::Burgers || (experiment == Experiment::Weno3 && s.get("weno.problem").map(str::trim) == Some("burgers"));

        let default_p = match experiment {
            Experiment::Burgers => 4,
            _ => 2,
        };
        let p = s.usize_opt("mesh.p")?.unwrap_or(default_p);
        if !(1..=10).contains(&p) {
            return Err(CliError::config(format!("mesh.p: order {p} outside 1..=10")));
        }
        let x0 = s.f64_or("mesh.x0", 0.0)?;
        let x1 = s.f64_or("mesh.x1", 1.0)?;
        if !(x1 > x0) {
            return Err(CliError::config("mesh: x1 must exceed x0"));
        }
        let boundaries = s.list_f64("mesh.boundaries")?;
        let default_nodes = if burgers_like { 81 } else { 80 };
        let (requested_nodes, nodes) = match (&boundaries, s.usize_opt("mesh.elements")?, s.usize_opt("mesh.nodes")?) {
            (Some(b), _, _) => {
                if b.len() < 2 {
                    return Err(CliError::config("mesh.boundaries: need at least two entries"));
                }
                let n = (b.len() - 1) * p + 1;
                (n, n)
            }
            (None, Some(ne), _) => {
                if ne == 0 {
                    return Err(CliError::config("mesh.elements must be positive"));
                }
                (ne * p + 1, ne * p + 1)
            }
            (None, None, n) => {
                let req = n.unwrap_or(default_nodes);
                if req < 2 {
                    return Err(CliError::config("mesh.nodes must be at least 2"));
                }
                (req, if experiment == Experiment::Weno3 { req } else { snap_node_count(req, p) })
            }
        };
        let uses_mesh = matches!(experiment, Experiment::Advect | Experiment::Burgers);
        if nodes != requested_nodes && uses_mesh && s.get("mesh.nodes").is_some() {
            log::warn!("mesh.nodes = {requested_nodes} is not compatible with p = {p}; using {nodes}");
        }

        let a = s.f64_or("physics.a", 1.0)?;
        let eps = s.f64_or("physics.eps", 0.0)?;
        if !(eps >= 0.0) {
            return Err(CliError::config("physics.eps must be non-negative"));
        }
        if matches!(experiment, Experiment::Advect | Experiment::Weno3) && !(a >= 0.0) {
            return Err(CliError::config("physics.a must be non-negative"));
        }

        let default_t_end = if burgers_like { 0.5 } else { 0.1 };
        let t_end = s.f64_or("time.t_end", default_t_end)?;
        let dt = s.f64_or("time.dt", 1e-4)?;
        if !(t_end >= 0.0) || !(dt > 0.0) {
            return Err(CliError::config("time: need t_end >= 0 and dt > 0"));
        }
        let scheme = match s.get("time.scheme").map(str::trim).unwrap_or("backward-euler") {
            "backward-euler" => Scheme::BackwardEuler,
            "rk4" => Scheme::Rk4,
            other => return Err(CliError::config(format!("time.scheme: unknown scheme '{other}'"))),
        };
        if experiment == Experiment::Burgers && scheme != Scheme::BackwardEuler {
            return Err(CliError::config("time.scheme: burgers supports backward-euler only"));
        }

        let ad = Self::ad_from(s, experiment, p)?;

        let steady = SteadyConfig {
            ratios: s.list_f64("steady.ratios")?.unwrap_or_else(|| vec![10.0, 40.0]),
            orders: s.list_usize("steady.orders")?.unwrap_or_else(|| vec![1, 2, 3, 4]),
            nodes: s.list_usize("steady.nodes")?.unwrap_or_else(|| DEFAULT_TABLE_NODES.to_vec()),
        };
        if steady.ratios.iter().any(|&r| !(r > 0.0)) {
            return Err(CliError::config("steady.ratios must be positive"));
        }
        if steady.orders.iter().any(|p| !(1..=10).contains(p)) || steady.nodes.iter().any(|&n| n < 2) {
            return Err(CliError::config("steady.orders must lie in 1..=10 and steady.nodes be at least 2"));
        }

        let weno = WenoConfig {
            problem: match s.get("weno.problem").map(str::trim).unwrap_or("advect") {
                "advect" => WenoProblem::PulseStep,
                "burgers" => WenoProblem::BurgersSine,
                other => return Err(CliError::config(format!("weno.problem: unknown problem '{other}'"))),
            },
            cfl: s.f64_or("weno.cfl", 0.4)?,
            eps: s.f64_or("weno.eps", 1e-6)?,
        };
        if !(weno.cfl > 0.0) || !(weno.eps > 0.0) {
            return Err(CliError::config("weno: cfl and eps must be positive"));
        }

        let dir = match s.get("output.dir") {
            Some(d) => PathBuf::from(d),
            None => std::env::var_os("SBPCG_OUTPUT_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("output")),
        };
        let tag = s.get("output.tag").map(str::to_string).unwrap_or_else(|| default_tag(experiment, p, nodes));
        if tag.is_empty() || tag.contains(['/', '\\']) {
            return Err(CliError::config("output.tag must be a plain file-name fragment"));
        }
        let precision = s.usize_opt("output.precision")?.unwrap_or(17);
        if !(1..=17).contains(&precision) {
            return Err(CliError::config("output.precision must lie in 1..=17"));
        }

        Ok(Self {
            experiment,
            mesh: MeshConfig {
                x0,
                x1,
                p,
                requested_nodes,
                nodes,
                boundaries,
            },
            physics: PhysicsConfig { a, eps },
            time: TimeConfig { t_end, dt, scheme },
            ad,
            steady,
            weno,
            output: OutputConfig { dir, tag, precision },
        })
    }

    fn ad_from(s: &Settings, experiment: Experiment, p: usize) -> Result<AdConfig, CliError> {
        let mut coeffs = match s.get("ad.coeffs") {
            Some(v) => parse_list(v).map_err(|e| keyed("ad.coeffs", e))?,
            None => Vec::new(),
        };
        for (k, v) in s.iter() {
            if let Some(i) = coeff_index(k) {
                if coeffs.len() < i {
                    coeffs.resize(i, 0.0);
                }
                coeffs[i - 1] = parse_number(v).map_err(|e| keyed(k, e))?;
            }
        }
        if coeffs.len() > p {
            return Err(CliError::config(format!(
                "ad: {} coefficients given but order p = {p} has only derivatives up to {p}",
                coeffs.len()
            )));
        }
        coeffs.resize(p, 0.0);
        let mode = match s.get("ad.mode").map(str::trim).unwrap_or("constant-signed") {
            "constant-signed" => DissipationMode::ConstantSigned,
            "nonnegative-variable" => DissipationMode::NonnegativeVariable,
            other => return Err(CliError::config(format!("ad.mode: unknown mode '{other}'"))),
        };
        let (center, radius, t_start, track) = match experiment {
            Experiment::Burgers => (0.5, 0.1, 0.15, false),
            _ => (0.6, 0.1, 0.0, true),
        };
        let window = match s.get("ad.activation").map(str::trim).unwrap_or("window") {
            "global" => None,
            "window" => {
                let w = Window {
                    center: s.f64_or("ad.center", center)?,
                    radius: s.f64_or("ad.radius", radius)?,
                    t_start: s.f64_or("ad.t_start", t_start)?,
                };
                if !(w.radius > 0.0) {
                    return Err(CliError::config("ad.radius must be positive"));
                }
                Some(w)
            }
            other => return Err(CliError::config(format!("ad.activation: unknown activation '{other}'"))),
        };
        let track = match s.get("ad.track").map(str::trim) {
            None => track,
            Some("true") => true,
            Some("false") => false,
            Some(other) => return Err(CliError::config(format!("ad.track: expected true or false, got '{other}'"))),
        };
        let scaling = match s.get("ad.speed_scaling").map(str::trim).unwrap_or("element-max") {
            "element-max" => AdSpeedScaling::ElementMax,
            "frozen-constant" => {
                let c = s.f64_or("ad.frozen_speed", 1.0)?;
                if !(c >= 0.0) {
                    return Err(CliError::config("ad.frozen_speed must be non-negative"));
                }
                AdSpeedScaling::Frozen(c)
            }
            other => return Err(CliError::config(format!("ad.speed_scaling: unknown scaling '{other}'"))),
        };
        let ad = AdConfig {
            coeffs,
            mode,
            window,
            track,
            scaling,
        };
        if experiment != Experiment::AdCheck && !ad.is_off() {
            sbpcg_core::dissipation::validate_coefficients(p, &ad.coeffs, mode)
                .map_err(|v| CliError::config(format!("ad: coefficients violate {v}")))?;
        }
        Ok(ad)
    }

    /// Every resolved parameter, as TOML.
    pub fn manifest(&self) -> String {
        let mut t = toml::Table::new();
        let mut put = |k: &str, v: toml::Value| {
            t.insert(k.to_string(), v);
        };
        let fl = |v: &[f64]| toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect());
        put("version", env!("CARGO_PKG_VERSION").into());
        put("experiment", self.experiment.name().into());
        put("mesh.x0", self.mesh.x0.into());
        put("mesh.x1", self.mesh.x1.into());
        put("mesh.p", (self.mesh.p as i64).into());
        put("mesh.requested_nodes", (self.mesh.requested_nodes as i64).into());
        put("mesh.nodes", (self.mesh.nodes as i64).into());
        if let Some(b) = &self.mesh.boundaries {
            put("mesh.boundaries", fl(b));
        }
        put("physics.a", self.physics.a.into());
        put("physics.eps", self.physics.eps.into());
        put("time.t_end", self.time.t_end.into());
        put("time.dt", self.time.dt.into());
        put(
            "time.scheme",
            match self.time.scheme {
                Scheme::BackwardEuler => "backward-euler",
                Scheme::Rk4 => "rk4",
            }
            .into(),
        );
        put("ad.coeffs", fl(&self.ad.coeffs));
        put(
            "ad.mode",
            match self.ad.mode {
                DissipationMode::ConstantSigned => "constant-signed",
                DissipationMode::NonnegativeVariable => "nonnegative-variable",
            }
            .into(),
        );
        match self.ad.window {
            Some(w) => {
                put("ad.activation", "window".into());
                put("ad.center", w.center.into());
                put("ad.radius", w.radius.into());
                put("ad.t_start", w.t_start.into());
            }
            None => put("ad.activation", "global".into()),
        }
        put("ad.track", self.ad.track.into());
        match self.ad.scaling {
            AdSpeedScaling::ElementMax => put("ad.speed_scaling", "element-max".into()),
            AdSpeedScaling::Frozen(c) => {
                put("ad.speed_scaling", "frozen-constant".into());
                put("ad.frozen_speed", c.into());
            }
        }
        put("steady.ratios", fl(&self.steady.ratios));
        put(
            "steady.orders",
            toml::Value::Array(self.steady.orders.iter().map(|&p| toml::Value::Integer(p as i64)).collect()),
        );
        put(
            "steady.nodes",
            toml::Value::Array(self.steady.nodes.iter().map(|&p| toml::Value::Integer(p as i64)).collect()),
        );
        put(
            "weno.problem",
            match self.weno.problem {
                WenoProblem::PulseStep => "advect",
                WenoProblem::BurgersSine => "burgers",
            }
            .into(),
        );
        put("weno.cfl", self.weno.cfl.into());
        put("weno.eps", self.weno.eps.into());
        put("output.dir", self.output.dir.display().to_string().into());
        put("output.tag", self.output.tag.clone().into());
        put("output.precision", (self.output.precision as i64).into());
        let mut out = String::new();
        for (k, v) in &t {
            out.push_str(&format!("{k:?} = {v}\n"));
        }
        out
    }
}

fn coeff_index(key: &str) -> Option<usize> {
    key.strip_prefix("ad.e").and_then(|i| i.parse::<usize>().ok()).filter(|&i| i >= 1)
}

pub fn is_coeff_key(key: &str) -> bool {
    coeff_index(key).is_some()
}

fn default_tag(experiment: Experiment, p: usize, nodes: usize) -> String {
    match experiment {
        Experiment::SteadyConvergence => "steady".to_string(),
        Experiment::Weno3 => format!("weno3_n{nodes}"),
        Experiment::Operators | Experiment::AdCheck => format!("p{p}"),
        e => format!("{}_p{p}_n{nodes}", e.name().replace('-', "_")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_number("1/18").unwrap(), 1.0 / 18.0);
        assert_eq!(parse_number(" 9/125 ").unwrap(), 9.0 / 125.0);
        assert_eq!(parse_number("-0.25").unwrap(), -0.25);
        assert_eq!(parse_number("1.5/3").unwrap(), 0.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn ad_assignments() {
        assert_eq!(parse_ad_assignments("e1=9/125,e2=1/500").unwrap(), vec![9.0 / 125.0, 1.0 / 500.0]);
        assert_eq!(parse_ad_assignments("e2=1").unwrap(), vec![0.0, 1.0]);
        assert!(parse_ad_assignments("x1=1").is_err());
        assert!(parse_ad_assignments("e0=1").is_err());
    }

    #[test]
    fn toml_flattens_to_dotted_keys() {
        let s = Settings::from_toml_str("experiment = \"advect\"\n[mesh]\np = 3\nnodes = 79\n[ad]\ne1 = \"1/4\"\ncoeffs = [0.1, 0.2]\n").unwrap();
        assert_eq!(s.get("mesh.p"), Some("3"));
        assert_eq!(s.get("ad.e1"), Some("1/4"));
        assert_eq!(s.get("ad.coeffs"), Some("0.1,0.2"));
        let s = Settings::from_toml_str("experiment = \"advect\"\nmesh.p = 3\n").unwrap();
        assert_eq!(s.get("mesh.p"), Some("3"));
    }

    #[test]
    fn defaults_and_overrides() {
        let mut s = Settings::from_toml_str("experiment = \"advect\"\nmesh.p = 3\n").unwrap();
        let c = ExperimentConfig::from_settings(&s).unwrap();
        assert_eq!(c.mesh.nodes, 79);
        assert_eq!(c.ad.coeffs, vec![0.0; 3]);
        assert!(c.ad.is_off());
        let mut flags = Settings::new();
        flags.set("mesh.p", "4");
        s.merge(&flags);
        let c = ExperimentConfig::from_settings(&s).unwrap();
        assert_eq!(c.mesh.p, 4);
        assert_eq!(c.mesh.nodes, 81);
    }

    #[test]
    fn invalid_values_rejected() {
        let base = |extra: &str| Settings::from_toml_str(&format!("experiment = \"advect\"\n{extra}")).unwrap();
        assert!(ExperimentConfig::from_settings(&base("mesh.q = 1")).is_err());
        assert!(ExperimentConfig::from_settings(&base("mesh.p = 0")).is_err());
        let err = ExperimentConfig::from_settings(&base("ad.e1 = 1\nad.e2 = \"-0.34\"")).unwrap_err();
        assert!(err.to_string().contains("e2 >= -e1/3"), "{err}");
        assert!(ExperimentConfig::from_settings(&base("ad.e3 = 1")).is_err());
        assert!(ExperimentConfig::from_settings(&base("time.dt = 0")).is_err());
        assert!(ExperimentConfig::from_settings(&Settings::new()).is_err());
    }

    #[test]
    fn manifest_echoes_parameters() {
        let s = Settings::from_toml_str("experiment = \"burgers\"\nad.e1 = \"9/125\"\nad.e2 = \"1/500\"\n").unwrap();
        let c = ExperimentConfig::from_settings(&s).unwrap();
        let m = c.manifest();
        for key in ["version", "mesh.p", "physics.a", "time.dt", "ad.coeffs", "ad.t_start", "ad.speed_scaling", "output.tag"] {
            assert!(m.contains(&format!("\"{key}\"")), "{key} missing from\n{m}");
        }
        let parsed: toml::Table = m.parse().unwrap();
        assert_eq!(parsed["mesh.p"].as_integer(), Some(4));
    }
}
