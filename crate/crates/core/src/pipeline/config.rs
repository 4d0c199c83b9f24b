//! Flat key-value configuration file shared by the CLI stages.
//!
//! Format: one `key = value` pair per line, `#` starts a comment. Unknown
//! keys are rejected so typos surface immediately.

use crate::enhance::EnhanceConfig;
use crate::error::{CadError, Result};
use crate::graphfeat::GspConfig;
use crate::morph::SeShape;
use crate::neural::TrainConfig;
use crate::preprocess::{AlphaMode, PreprocessConfig};
use crate::statfeat::{GlcmConfig, HocConfig};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub pre: PreprocessConfig,
    pub enh: EnhanceConfig,
    pub glcm: GlcmConfig,
    pub hoc: HocConfig,
    pub gsp: GspConfig,
    pub train: TrainConfig,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CadError::invalid(format!("config line {}: expected key = value", lineno + 1))
            })?;
            cfg.apply(key.trim(), value.trim()).map_err(|e| {
                CadError::invalid(format!("config line {}: {e}", lineno + 1))
            })?;
        }
        cfg.pre.validate()?;
        cfg.hoc.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| CadError::invalid(format!("bad number '{v}'")))
        };
        let int = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| CadError::invalid(format!("bad integer '{v}'")))
        };
        match key {
            "pre.alpha" => {
                self.pre.alpha = if value == "auto" {
                    AlphaMode::Auto
                } else {
                    AlphaMode::Fixed(num(value)?)
                };
            }
            "pre.delta" => self.pre.delta = num(value)?,
            "pre.theta" => self.pre.theta = num(value)?,
            "pre.quantiles" => self.pre.quantiles = int(value)?,
            "enh.k" => self.enh.k = num(value)?,
            "enh.diff_max" => self.enh.diff_max = num(value)?,
            "enh.se0" => {
                self.enh.se0 = match value {
                    "square3" => SeShape::Square3,
                    "cross3" => SeShape::Cross3,
                    "disc5" => SeShape::Disc5,
                    other => {
                        return Err(CadError::invalid(format!(
                            "unknown structuring element '{other}'"
                        )))
                    }
                };
            }
            "enh.t_cap" => self.enh.t_cap = int(value)?,
            "enh.window" => self.enh.window = int(value)?,
            "enh.levels" => self.enh.levels = int(value)?,
            "enh.noise_scale" => self.enh.denoise.noise_scale = num(value)?,
            "glcm.levels" => self.glcm.levels = int(value)?,
            "hoc.max_lag" => self.hoc.max_lag = int(value)?,
            "gsp.grid" => {
                let g = int(value)?;
                self.gsp.grid = (g, g);
            }
            "gsp.t_e" => self.gsp.t_e = int(value)?,
            "train.epochs" => self.train.epochs = int(value)?,
            "train.batch" => self.train.batch_size = int(value)?,
            "train.lr" => self.train.learning_rate = num(value)?,
            "train.l2" => self.train.l2 = num(value)?,
            "train.seed" => self.train.seed = int(value)? as u64,
            other => return Err(CadError::invalid(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_input() {
        let cfg = PipelineConfig::parse("").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
    }

    #[test]
    fn parses_keys_and_comments() {
        let text = "
# tuning
pre.alpha = 0.8
pre.delta = -0.25
enh.k = 0.5          # gain
enh.se0 = cross3
gsp.grid = 2
train.epochs = 50
";
        let cfg = PipelineConfig::parse(text).unwrap();
        assert_eq!(cfg.pre.alpha, AlphaMode::Fixed(0.8));
        assert_eq!(cfg.pre.delta, -0.25);
        assert_eq!(cfg.enh.k, 0.5);
        assert_eq!(cfg.enh.se0, SeShape::Cross3);
        assert_eq!(cfg.gsp.grid, (2, 2));
        assert_eq!(cfg.train.epochs, 50);
    }

    #[test]
    fn auto_alpha_keyword() {
        let cfg = PipelineConfig::parse("pre.alpha = auto").unwrap();
        assert_eq!(cfg.pre.alpha, AlphaMode::Auto);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(PipelineConfig::parse("pre.alpa = 0.5").is_err());
        assert!(PipelineConfig::parse("pre.delta = fast").is_err());
        assert!(PipelineConfig::parse("pre.delta = 3.0").is_err()); // out of range
    }
}
