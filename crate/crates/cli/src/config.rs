//! Scenario configuration schema: JSON in, strict validation, stable
//! machine-readable diagnostics.

use std::path::PathBuf;

use serde::Deserialize;

use rtq_core::gw::{GwConfig, StateFamily};
use rtq_core::modes::{ModePartition, ModeSpec};
use rtq_core::sweep::Scale;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Efficiency,
    Battery,
    Gw,
    OracleCheck,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Efficiency => "efficiency",
            Kind::Battery => "battery",
            Kind::Gw => "gw",
            Kind::OracleCheck => "oracle-check",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "efficiency" => Some(Kind::Efficiency),
            "battery" => Some(Kind::Battery),
            "gw" => Some(Kind::Gw),
            "oracle-check" => Some(Kind::OracleCheck),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionCfg {
    pub system: Vec<usize>,
    pub environment: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalCfg {
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeCfg {
    pub r: f64,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesCfg {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryCfg {
    pub n: usize,
    #[serde(default)]
    pub a_n: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCfg {
    #[serde(default = "default_truncation")]
    pub truncation: usize,
}

fn default_truncation() -> usize {
    40
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleCfg {
    Linear,
    Log,
}

impl From<ScaleCfg> for Scale {
    fn from(s: ScaleCfg) -> Scale {
        match s {
            ScaleCfg::Linear => Scale::Linear,
            ScaleCfg::Log => Scale::Log,
        }
    }
}

fn default_scale() -> ScaleCfg {
    ScaleCfg::Linear
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default = "default_scale")]
    pub scale: ScaleCfg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub scenario_id: Option<String>,
    #[serde(default)]
    pub state_family: Option<StateFamily>,
    #[serde(default)]
    pub modes: Option<usize>,
    #[serde(default)]
    pub partition: Option<PartitionCfg>,
    #[serde(default)]
    pub thermal: Option<ThermalCfg>,
    #[serde(default)]
    pub squeeze: Option<SqueezeCfg>,
    #[serde(default)]
    pub gw: Option<GwConfig>,
    #[serde(default)]
    pub series: Option<SeriesCfg>,
    #[serde(default)]
    pub battery: Option<BatteryCfg>,
    #[serde(default)]
    pub oracle: Option<OracleCfg>,
    #[serde(default)]
    pub sweep: Option<SweepCfg>,
}

/// Parameters each kind accepts as a sweep axis.
pub fn sweepable(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Gw => &["tau", "epsilon", "temperature_nK"],
        Kind::Efficiency => &["h", "xi", "r"],
        Kind::Battery => &["h", "xi", "a_n"],
        Kind::OracleCheck => &[],
    }
}

impl ScenarioConfig {
    /// Structural checks beyond the serde schema; messages name the failing
    /// field for the exit-2 diagnostic.
    pub fn validate(&self, cli_kind: Kind) -> Result<(), String> {
        if self.kind != cli_kind {
            return Err(format!(
                "kind: config says '{}' but the command line asked for '{}'",
                self.kind.as_str(),
                cli_kind.as_str()
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.steps < 2 {
                return Err("sweep.steps: must be at least 2".into());
            }
            if !sweep.min.is_finite() || !sweep.max.is_finite() {
                return Err("sweep: min and max must be finite".into());
            }
            let allowed = sweepable(self.kind);
            if !allowed.contains(&sweep.parameter.as_str()) {
                return Err(format!(
                    "sweep.parameter: '{}' is not a sweep axis for kind '{}' (allowed: {})",
                    sweep.parameter,
                    self.kind.as_str(),
                    allowed.join(", ")
                ));
            }
            if sweep.scale == ScaleCfg::Log && (sweep.min <= 0.0 || sweep.max <= 0.0) {
                return Err("sweep: log scale needs positive bounds".into());
            }
        }
        if let Some(p) = &self.partition {
            let count = self
                .modes
                .unwrap_or_else(|| p.system.len() + p.environment.len());
            let spec = ModeSpec::new(count).map_err(|e| format!("modes: {e}"))?;
            ModePartition::new(p.system.iter().copied(), p.environment.iter().copied(), spec)
                .map_err(|e| format!("partition: {e}"))?;
        }
        match self.kind {
            Kind::Gw => {
                if self.gw.is_none() {
                    return Err("gw: block required for kind 'gw'".into());
                }
            }
            Kind::Efficiency => {
                if self.series.is_none() && self.gw.is_none() {
                    return Err("series: a series or gw block is required for kind 'efficiency'".into());
                }
                if self.partition.is_none() && self.gw.is_none() {
                    return Err("partition: required for kind 'efficiency'".into());
                }
                if self.state_family.is_none() {
                    return Err("state_family: required for kind 'efficiency'".into());
                }
            }
            Kind::Battery => {
                if self.battery.is_none() {
                    return Err("battery: block required for kind 'battery'".into());
                }
                let b = self.battery.as_ref().unwrap();
                if b.a_n.is_none() && self.series.is_none() {
                    return Err("battery.a_n: either a_n or a series block is required".into());
                }
                if self.thermal.is_none() {
                    return Err("thermal: block required for kind 'battery'".into());
                }
            }
            Kind::OracleCheck => {
                if self.state_family.is_none() {
                    return Err("state_family: required for kind 'oracle-check'".into());
                }
                if self.sweep.is_some() {
                    return Err("sweep: not supported for kind 'oracle-check'".into());
                }
            }
        }
        Ok(())
    }

    pub fn scenario_id(&self) -> String {
        self.scenario_id.clone().unwrap_or_else(|| "scenario".into())
    }
}
