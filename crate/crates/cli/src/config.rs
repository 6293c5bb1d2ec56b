use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use heiscurv_core::curvature::{McpConfig, PrescribeConfig, ProbeConfig, SweepConfig};
use heiscurv_core::trig::DEFAULT_RESOLUTION;
use heiscurv_core::Execution;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Solver defaults, optionally read from a TOML file and then overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub resolution: usize,
    pub grid_s: usize,
    pub grid_r: usize,
    pub band: f64,
    pub refine_tol: f64,
    pub mcp_phi: usize,
    pub mcp_omega: usize,
    pub slack_tol: f64,
    pub inverse_tol: f64,
    pub probe_samples: usize,
    pub coarse_resolution: usize,
    pub coarse_grid_s: usize,
    pub coarse_grid_r: usize,
    pub eps_t: f64,
    /// Rows emitted by the tabular subcommands.
    pub samples: usize,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        let mcp = McpConfig::default();
        let coarse = SweepConfig::coarse();
        RunConfig {
            resolution: DEFAULT_RESOLUTION,
            grid_s: sweep.grid_s,
            grid_r: sweep.grid_r,
            band: sweep.band,
            refine_tol: sweep.refine_tol,
            mcp_phi: mcp.n_phi,
            mcp_omega: mcp.n_omega,
            slack_tol: mcp.slack_tol,
            inverse_tol: 1e-10,
            probe_samples: ProbeConfig::default().samples,
            coarse_resolution: PrescribeConfig::default().coarse_resolution,
            coarse_grid_s: coarse.grid_s,
            coarse_grid_r: coarse.grid_r,
            eps_t: PrescribeConfig::default().eps_t,
            samples: 64,
            format: None,
            out: None,
            execution: Execution::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let tols = [
            ("band", self.band),
            ("refine_tol", self.refine_tol),
            ("slack_tol", self.slack_tol),
            ("inverse_tol", self.inverse_tol),
            ("eps_t", self.eps_t),
        ];
        for (name, v) in tols {
            if !(v > 0.0) || !v.is_finite() {
                bail!("{name} must be positive, got {v}");
            }
        }
        let dims = [
            ("grid_s", self.grid_s),
            ("grid_r", self.grid_r),
            ("coarse_grid_s", self.coarse_grid_s),
            ("coarse_grid_r", self.coarse_grid_r),
            ("mcp_phi", self.mcp_phi),
            ("mcp_omega", self.mcp_omega),
            ("resolution", self.resolution),
            ("coarse_resolution", self.coarse_resolution),
        ];
        for (name, v) in dims {
            if v < 64 {
                bail!("{name} must be at least 64, got {v}");
            }
        }
        if self.samples < 2 {
            bail!("samples must be at least 2, got {}", self.samples);
        }
        if self.band >= 0.5 || self.eps_t >= 1.0 {
            bail!("band must be below 0.5 and eps_t below 1");
        }
        Ok(())
    }

    pub fn sweep(&self) -> SweepConfig {
        SweepConfig {
            grid_s: self.grid_s,
            grid_r: self.grid_r,
            band: self.band,
            refine_tol: self.refine_tol,
            execution: self.execution,
        }
    }

    pub fn mcp(&self) -> McpConfig {
        McpConfig { n_phi: self.mcp_phi, n_omega: self.mcp_omega, slack_tol: self.slack_tol, execution: self.execution }
    }

    pub fn prescribe(&self) -> PrescribeConfig {
        PrescribeConfig {
            coarse: SweepConfig { grid_s: self.coarse_grid_s, grid_r: self.coarse_grid_r, ..self.sweep() },
            coarse_resolution: self.coarse_resolution,
            fine: self.sweep(),
            fine_resolution: self.resolution,
            eps_t: self.eps_t,
        }
    }

    pub fn probe(&self) -> ProbeConfig {
        ProbeConfig { samples: self.probe_samples, ..ProbeConfig::default() }
    }
}

/// Parses `SxR`, e.g. `512x1024`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected SxR, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad grid size {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad grid size {b:?}"))?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("512x1024"), Ok((512, 1024)));
        assert!(parse_grid("512").is_err());
        assert!(parse_grid("ax3").is_err());
    }

    #[test]
    fn toml_roundtrip_and_unknown_keys() {
        let cfg: RunConfig = toml::from_str("grid_s = 128\nexecution = \"sequential\"\nformat = \"json\"").unwrap();
        assert_eq!(cfg.grid_s, 128);
        assert_eq!(cfg.execution, Execution::Sequential);
        assert_eq!(cfg.format, Some(Format::Json));
        assert!(toml::from_str::<RunConfig>("gird_s = 1").is_err());
        let back: RunConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { grid_r: 32, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { band: 0.0, ..RunConfig::default() }.validate().is_err());
    }
}
