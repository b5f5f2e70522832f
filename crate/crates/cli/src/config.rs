//! Pipeline configuration file: JSON with strict unknown-key rejection.
//!
//! The config carries everything the one-shot pipeline needs; command-line
//! flags override individual fields after loading. Field defaults match
//! the corresponding subcommand flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use adasharp_core::degrade::DegradeMode;
use adasharp_core::{AlphaTable, RdoParams};
use adasharp_harness::{EncoderSpec, Metric, DEFAULT_CRF_LADDER};

use crate::fail::Fail;

fn default_smooth_sigma() -> f64 {
    2.0
}

fn default_crf_list() -> Vec<u32> {
    DEFAULT_CRF_LADDER.to_vec()
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Psnr]
}

fn default_fixed_point_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Ground-truth input sequence (Y4M).
    pub input: PathBuf,
    /// Directory receiving every stage artifact.
    pub output_dir: PathBuf,
    /// Quadtree cost-model constants for the partition stage.
    #[serde(default)]
    pub rdo: RdoParams,
    /// Per-CU-size sharpening strengths.
    #[serde(default)]
    pub alpha_table: AlphaTable,
    /// Feathering radius for the strength map (0 = hard boundaries).
    #[serde(default = "default_smooth_sigma")]
    pub smooth_sigma: f64,
    /// Which degradation reading generates the low-quality pair.
    #[serde(default)]
    pub degrade_mode: DegradeMode,
    /// Convergence tolerance for fixed-point degradation.
    #[serde(default = "default_fixed_point_tol")]
    pub fixed_point_tol: f64,
    /// External encoder driving the rate-quality sweep; without one the
    /// sweep and BD-Rate stages are skipped.
    #[serde(default)]
    pub encoder: Option<EncoderSpec>,
    #[serde(default = "default_crf_list")]
    pub crf_list: Vec<u32>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    /// Worker threads for per-frame work and concurrent sweep rungs;
    /// absent = one worker per item.
    #[serde(default)]
    pub parallelism: Option<usize>,
}

impl PipelineConfig {
    /// Loads and strictly parses a config file. I/O problems exit 3;
    /// malformed or contract-violating content is a configuration error
    /// and exits 2, like the flag layer.
    pub fn load(path: &Path) -> Result<PipelineConfig, Fail> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
        let config: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Fail::usage(format!("{}: {e}", path.display())))?;
        Ok(config)
    }

    /// Re-checks every module-level invariant the config touches.
    pub fn validate(&self) -> Result<(), Fail> {
        let usage = |e: adasharp_core::CoreError| Fail::usage(e.to_string());
        self.rdo.validate().map_err(usage)?;
        self.alpha_table.validate().map_err(usage)?;
        if !self.smooth_sigma.is_finite() || self.smooth_sigma < 0.0 {
            return Err(Fail::usage(format!(
                "smooth_sigma must be finite and >= 0, got {}",
                self.smooth_sigma
            )));
        }
        if !(self.fixed_point_tol > 0.0) {
            return Err(Fail::usage(format!(
                "fixed_point_tol must be > 0, got {}",
                self.fixed_point_tol
            )));
        }
        if self.crf_list.is_empty() {
            return Err(Fail::usage("crf_list must contain at least one rung"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &crf in &self.crf_list {
            if !seen.insert(crf) {
                return Err(Fail::usage(format!("crf_list repeats {crf}")));
            }
        }
        if self.metrics.is_empty() {
            return Err(Fail::usage("metrics must name at least one metric"));
        }
        if self.parallelism == Some(0) {
            return Err(Fail::usage("parallelism must be at least 1"));
        }
        if let Some(encoder) = &self.encoder {
            encoder.validate().map_err(|e| Fail::usage(e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "input": "in.y4m",
            "output_dir": "out"
        })
    }

    #[test]
    fn minimal_config_gets_module_defaults() {
        let config: PipelineConfig = serde_json::from_value(minimal()).unwrap();
        assert_eq!(config.rdo, RdoParams::default());
        assert_eq!(config.smooth_sigma, 2.0);
        assert_eq!(config.degrade_mode, DegradeMode::Direct);
        assert_eq!(config.crf_list, vec![21, 24, 27, 30, 33]);
        assert_eq!(config.metrics, vec![Metric::Psnr]);
        assert!(config.encoder.is_none());
        assert!(config.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected_at_any_depth() {
        let mut top = minimal();
        top["surprise"] = serde_json::json!(1);
        assert!(serde_json::from_value::<PipelineConfig>(top).is_err());

        let mut nested = minimal();
        nested["encoder"] = serde_json::json!({
            "name": "x",
            "encode_template": "enc {input} {output} {crf} {preset}",
            "decode_template": "dec {input} {output}",
            "surprise": 1
        });
        assert!(serde_json::from_value::<PipelineConfig>(nested).is_err());
    }

    #[test]
    fn validation_rejects_out_of_contract_values() {
        let mut config: PipelineConfig = serde_json::from_value(minimal()).unwrap();
        config.crf_list = vec![21, 21];
        assert_eq!(config.validate().unwrap_err().exit_code, 2);

        let mut config: PipelineConfig = serde_json::from_value(minimal()).unwrap();
        config.smooth_sigma = -1.0;
        assert_eq!(config.validate().unwrap_err().exit_code, 2);

        let mut config: PipelineConfig = serde_json::from_value(minimal()).unwrap();
        config.encoder = Some(EncoderSpec {
            name: "x".into(),
            encode_template: "enc {input} {output}".into(), // missing {crf}/{preset}
            decode_template: "dec {input} {output}".into(),
            preset: "medium".into(),
        });
        assert_eq!(config.validate().unwrap_err().exit_code, 2);
    }

    #[test]
    fn alpha_table_uses_cu_size_keys() {
        let mut v = minimal();
        v["alpha_table"] = serde_json::json!({"8": 1.0, "16": 2.0, "32": 2.0, "64": 1.0});
        let config: PipelineConfig = serde_json::from_value(v).unwrap();
        assert_eq!(config.alpha_table.size_16, 2.0);
    }
}
