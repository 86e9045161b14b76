//! Run configuration: documented defaults, an optional TOML file, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Effective settings for one run. Echoed under `config` in JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Fock truncation `K`. `None` picks a size from the parameters.
    pub trunc: Option<usize>,
    /// Matrix-exponential tolerance.
    pub tol: f64,
    /// Largest Poisson mass allowed outside the truncated basis.
    pub tail_tol: f64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Gauss–Legendre nodes in `r` for plane rules.
    pub radial_nodes: usize,
    /// Uniform angle nodes for plane rules.
    pub angular_nodes: usize,
    /// Plane rule cutoff `R`. `None` uses `√λ_max + 8`.
    pub radial_cutoff: Option<f64>,
    /// Sphere rule orders. `None` uses the smallest exact orders.
    pub sphere_theta_nodes: Option<usize>,
    pub sphere_gamma_nodes: Option<usize>,
    pub lambda_points: usize,
    pub p_points: usize,
    pub credible_masses: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            trunc: None,
            tol: 1e-12,
            tail_tol: 1e-12,
            seed: 20_240_601,
            format: Format::Json,
            out: None,
            radial_nodes: 200,
            angular_nodes: 64,
            radial_cutoff: None,
            sphere_theta_nodes: None,
            sphere_gamma_nodes: None,
            lambda_points: cohstat_core::inference::DEFAULT_LAMBDA_POINTS,
            p_points: cohstat_core::inference::DEFAULT_P_POINTS,
            credible_masses: vec![0.5, 0.9, 0.95],
        }
    }
}

/// Keys accepted in a config file. Anything else is rejected by name.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub trunc: Option<usize>,
    pub tol: Option<f64>,
    pub tail_tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub radial_cutoff: Option<f64>,
    pub sphere_theta_nodes: Option<usize>,
    pub sphere_gamma_nodes: Option<usize>,
    pub lambda_points: Option<usize>,
    pub p_points: Option<usize>,
    pub credible_masses: Option<Vec<f64>>,
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct FlagOverrides {
    pub trunc: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub config: Option<PathBuf>,
}

pub fn parse_file_config(text: &str) -> Result<FileConfig> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_file_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Defaults, then the file named by `--config`, then the remaining flags.
pub fn load_config(flags: &FlagOverrides) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let config = merge(RunConfig::default(), file, flags);
    validate(&config)?;
    Ok(config)
}

fn merge(base: RunConfig, file: FileConfig, flags: &FlagOverrides) -> RunConfig {
    RunConfig {
        trunc: flags.trunc.or(file.trunc).or(base.trunc),
        tol: flags.tol.or(file.tol).unwrap_or(base.tol),
        tail_tol: file.tail_tol.unwrap_or(base.tail_tol),
        seed: flags.seed.or(file.seed).unwrap_or(base.seed),
        format: flags.format.or(file.format).unwrap_or(base.format),
        out: flags.out.clone().or(file.out).or(base.out),
        radial_nodes: file.radial_nodes.unwrap_or(base.radial_nodes),
        angular_nodes: file.angular_nodes.unwrap_or(base.angular_nodes),
        radial_cutoff: file.radial_cutoff.or(base.radial_cutoff),
        sphere_theta_nodes: file.sphere_theta_nodes.or(base.sphere_theta_nodes),
        sphere_gamma_nodes: file.sphere_gamma_nodes.or(base.sphere_gamma_nodes),
        lambda_points: file.lambda_points.unwrap_or(base.lambda_points),
        p_points: file.p_points.unwrap_or(base.p_points),
        credible_masses: file.credible_masses.unwrap_or(base.credible_masses),
    }
}

fn validate(c: &RunConfig) -> Result<()> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(CliError::Config(format!("{name} must be positive, got {v}")))
        }
    };
    positive("tol", c.tol)?;
    positive("tail_tol", c.tail_tol)?;
    if let Some(r) = c.radial_cutoff {
        positive("radial_cutoff", r)?;
    }
    if let Some(k) = c.trunc {
        if k < 2 {
            return Err(CliError::Config(format!("trunc must be at least 2, got {k}")));
        }
    }
    for (name, v, min) in [
        ("radial_nodes", c.radial_nodes, 2),
        ("angular_nodes", c.angular_nodes, 2),
        ("lambda_points", c.lambda_points, 2),
        ("p_points", c.p_points, 2),
    ] {
        if v < min {
            return Err(CliError::Config(format!("{name} must be at least {min}, got {v}")));
        }
    }
    for (name, v) in [
        ("sphere_theta_nodes", c.sphere_theta_nodes),
        ("sphere_gamma_nodes", c.sphere_gamma_nodes),
    ] {
        if v == Some(0) {
            return Err(CliError::Config(format!("{name} must be positive")));
        }
    }
    if let Some(m) = c.credible_masses.iter().find(|m| !(**m > 0.0 && **m < 1.0)) {
        return Err(CliError::Config(format!("credible_masses entries must lie in (0, 1), got {m}")));
    }
    Ok(())
}
