//! Flat key=value run configuration.
//!
//! Every key can also be passed as a `--<key> <value>` command-line flag;
//! precedence is flag > file > default. Unknown keys are rejected and the
//! canonical text form round-trips through the parser.

use crate::error::{Error, Result};
use crate::grids::GridSpec;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Json => write!(f, "json"),
        }
    }
}

/// All run parameters, with the grid flattened into `grid.*` keys.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    /// `None` means pick by dimension (40 for d=1, 24 for d=2).
    pub hermite_max_degree: Option<usize>,
    pub symbol: String,
    /// `None` means the dimension default `floor((d+1)/2)+1`.
    pub probe_n: Option<usize>,
    pub p_list: Vec<f64>,
    pub samples: usize,
    pub family: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: GridSpec::default_for_dim(1).expect("default grid is valid"),
            hermite_max_degree: None,
            symbol: "one".to_string(),
            probe_n: None,
            p_list: vec![1.5, 2.0, 3.0],
            samples: 2000,
            family: 8,
            seed: 12345,
            output_path: None,
            output_format: OutputFormat::Csv,
        }
    }
}

/// The accepted configuration keys, in canonical order.
pub const KEYS: &[&str] = &[
    "grid.rho_halfwidth",
    "grid.rho_points",
    "grid.x_halfwidth",
    "grid.x_points",
    "grid.dim",
    "grid.x_rule",
    "hermite.max_degree",
    "symbol",
    "probe.n",
    "probe.p_list",
    "probe.samples",
    "probe.family",
    "seed",
    "output.path",
    "output.format",
];

impl RunConfig {
    /// Hermite truncation, resolved against the dimension default.
    pub fn max_degree(&self) -> usize {
        self.hermite_max_degree
            .unwrap_or(if self.grid.dim == 1 { 40 } else { 24 })
    }

    /// Probe derivative order, resolved against the dimension default.
    pub fn probe_order(&self) -> usize {
        self.probe_n
            .unwrap_or(crate::symbols::default_order(self.grid.dim))
    }

    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let parse_f64 = |what: &str| -> Result<f64> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad {what}: `{value}`")))
        };
        let parse_usize = |what: &str| -> Result<usize> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad {what}: `{value}`")))
        };
        match key {
            "grid.rho_halfwidth" => self.grid.rho_halfwidth = parse_f64(key)?,
            "grid.rho_points" => self.grid.rho_points = parse_usize(key)?,
            "grid.x_halfwidth" => self.grid.x_halfwidth = parse_f64(key)?,
            "grid.x_points" => self.grid.x_points = parse_usize(key)?,
            "grid.dim" => self.grid.dim = parse_usize(key)?,
            "grid.x_rule" => self.grid.x_rule = value.parse()?,
            "hermite.max_degree" => {
                self.hermite_max_degree = if value == "auto" {
                    None
                } else {
                    Some(parse_usize(key)?)
                }
            }
            "symbol" => self.symbol = value.to_string(),
            "probe.n" => {
                self.probe_n = if value == "auto" {
                    None
                } else {
                    Some(parse_usize(key)?)
                }
            }
            "probe.p_list" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    let p: f64 = part
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad p value `{part}`")))?;
                    if !(p > 0.0) {
                        return Err(Error::Config(format!("p must be positive, got {p}")));
                    }
                    list.push(p);
                }
                if list.is_empty() {
                    return Err(Error::Config("probe.p_list must be non-empty".into()));
                }
                self.p_list = list;
            }
            "probe.samples" => self.samples = parse_usize(key)?,
            "probe.family" => self.family = parse_usize(key)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad seed: `{value}`")))?
            }
            "output.path" => {
                self.output_path = if value.is_empty() || value == "-" {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            "output.format" => self.output_format = value.parse()?,
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Parses the flat key=value text form. Blank lines and `#` comments are
    /// allowed; unknown keys are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            self.set_key(key.trim(), value)?;
        }
        self.grid.validate()
    }

    /// Canonical text form listing every key.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "grid.rho_halfwidth = {}", self.grid.rho_halfwidth);
        let _ = writeln!(out, "grid.rho_points = {}", self.grid.rho_points);
        let _ = writeln!(out, "grid.x_halfwidth = {}", self.grid.x_halfwidth);
        let _ = writeln!(out, "grid.x_points = {}", self.grid.x_points);
        let _ = writeln!(out, "grid.dim = {}", self.grid.dim);
        let _ = writeln!(out, "grid.x_rule = {}", self.grid.x_rule);
        let _ = writeln!(
            out,
            "hermite.max_degree = {}",
            self.hermite_max_degree
                .map_or("auto".to_string(), |v| v.to_string())
        );
        let _ = writeln!(out, "symbol = {}", self.symbol);
        let _ = writeln!(
            out,
            "probe.n = {}",
            self.probe_n.map_or("auto".to_string(), |v| v.to_string())
        );
        let _ = writeln!(
            out,
            "probe.p_list = {}",
            self.p_list
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(out, "probe.samples = {}", self.samples);
        let _ = writeln!(out, "probe.family = {}", self.family);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(
            out,
            "output.path = {}",
            self.output_path
                .as_ref()
                .map_or("-".to_string(), |p| p.display().to_string())
        );
        let _ = writeln!(out, "output.format = {}", self.output_format);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_text();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn modified_config_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.set_key("grid.dim", "2").unwrap();
        cfg.set_key("grid.x_points", "48").unwrap();
        cfg.set_key("hermite.max_degree", "17").unwrap();
        cfg.set_key("symbol", "heat:t=0.25").unwrap();
        cfg.set_key("probe.p_list", "1.5, 2.5").unwrap();
        cfg.set_key("seed", "987654321").unwrap();
        cfg.set_key("output.path", "/tmp/out.json").unwrap();
        cfg.set_key("output.format", "csv").unwrap();
        let back = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.max_degree(), 17);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("grid.rho_halfwidth = 8\nbogus = 1\n").is_err());
        let mut cfg = RunConfig::default();
        assert!(cfg.set_key("grid.rho_pints", "64").is_err());
    }

    #[test]
    fn comments_and_blank_lines_ok() {
        let cfg = RunConfig::parse("# comment\n\nseed = 42\n").unwrap();
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn bad_values_rejected() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set_key("grid.rho_points", "not-a-number").is_err());
        assert!(cfg.set_key("probe.p_list", "2,-1").is_err());
        assert!(cfg.set_key("output.format", "xml").is_err());
        // Validation catches odd rho_points at parse time.
        assert!(RunConfig::parse("grid.rho_points = 15\n").is_err());
    }

    #[test]
    fn dimension_defaults() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.max_degree(), 40);
        assert_eq!(cfg.probe_order(), 2);
        cfg.set_key("grid.dim", "2").unwrap();
        assert_eq!(cfg.max_degree(), 24);
        assert_eq!(cfg.probe_order(), 2);
    }
}
