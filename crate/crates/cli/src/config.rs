//! Run configuration: defaults, an optional `key = value` file, then flags.

use std::path::{Path, PathBuf};

use minkowski_cohn::minima::DEFAULT_GRID_N;
use minkowski_cohn::SolverConfig;

use crate::output::Format;
use crate::CliError;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "MCOHN_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub grid_n: usize,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solver: SolverConfig::default(),
            grid_n: DEFAULT_GRID_N,
            format: Format::Csv,
            output_path: None,
        }
    }
}

/// Flag values; `None` means "not given on the command line".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tol_residual: Option<f64>,
    pub tol_step: Option<f64>,
    pub max_iterations: Option<usize>,
    pub damping: Option<f64>,
    pub grid_n: Option<usize>,
    pub format: Option<Format>,
    pub output_path: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value {value:?} for {key}")))
}

impl RunConfig {
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line_no}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "tol_residual" => self.solver.tol_residual = parse_value(key, value, line_no)?,
                "tol_step" => self.solver.tol_step = parse_value(key, value, line_no)?,
                "max_iterations" => self.solver.max_iterations = parse_value(key, value, line_no)?,
                "damping" => self.solver.damping = parse_value(key, value, line_no)?,
                "grid_n" => self.grid_n = parse_value(key, value, line_no)?,
                "format" => {
                    self.format = match value {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => {
                            return Err(CliError::Usage(format!(
                                "config line {line_no}: unknown format {value:?}"
                            )))
                        }
                    }
                }
                "output" | "output_path" => self.output_path = Some(PathBuf::from(value)),
                _ => return Err(CliError::Usage(format!("config line {line_no}: unknown key {key:?}"))),
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_file_text(&text)
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(v) = o.tol_residual {
            self.solver.tol_residual = v;
        }
        if let Some(v) = o.tol_step {
            self.solver.tol_step = v;
        }
        if let Some(v) = o.max_iterations {
            self.solver.max_iterations = v;
        }
        if let Some(v) = o.damping {
            self.solver.damping = v;
        }
        if let Some(v) = o.grid_n {
            self.grid_n = v;
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = &o.output_path {
            self.output_path = Some(v.clone());
        }
    }

    /// Defaults, then `config_path` (if any), then flags.
    pub fn resolve(config_path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_path {
            cfg.apply_file(path)?;
        }
        cfg.apply_overrides(overrides);
        cfg.solver.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}
