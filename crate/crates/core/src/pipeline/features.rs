//! Assembly of the 55-element feature vector and its file format.
//!
//! Vector layout (frozen; tests pin names to indices):
//!   7  first-order statistics
//!   4  GLCM features
//!   5  directional third-order cumulants
//!   5  higher-order-spectra features
//!   6  local-graph-structure statistics
//!   28 graph-shortest-path statistics (7 per direction, directions
//!      ordered 0/45/90/135 degrees)

use std::fmt::Write as _;

use crate::error::{CadError, Result};
use crate::graphfeat::{gsp_features, lgs_features, lgs_transform};
use crate::neural::LabeledData;
use crate::pipeline::config::PipelineConfig;
use crate::raster::GrayImage;
use crate::statfeat::stat_features;

pub const FEATURE_LEN: usize = 55;
pub const FEATURE_SCHEMA: &str = "retcad-features v1";

/// Stage provenance of a feature record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Raw,
    Preprocessed,
    Enhanced,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Preprocessed => "preprocessed",
            Stage::Enhanced => "enhanced",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        match s {
            "raw" => Some(Stage::Raw),
            "preprocessed" => Some(Stage::Preprocessed),
            "enhanced" => Some(Stage::Enhanced),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub id: String,
    pub label: bool,
    pub stage: Stage,
    pub values: Vec<f64>,
}

/// Frozen column names in vector order.
pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = vec![
        "fos_mean",
        "fos_sd",
        "fos_entropy",
        "fos_variance",
        "fos_smoothness",
        "fos_kurtosis",
        "fos_skewness",
        "glcm_idm",
        "glcm_contrast",
        "glcm_energy",
        "glcm_homogeneity",
        "hoc_10",
        "hoc_50",
        "hoc_90",
        "hoc_130",
        "hoc_180",
        "hos_entropy",
        "hos_mean",
        "hos_ent_dg1",
        "hos_ent_dg2",
        "hos_ent_dg3",
        "lgs_mean",
        "lgs_variance",
        "lgs_skewness",
        "lgs_kurtosis",
        "lgs_energy",
        "lgs_entropy",
    ]
    .into_iter()
    .map(str::to_owned)
    .collect();
    for dir in [0, 45, 90, 135] {
        for stat in ["kurtosis", "skewness", "sd", "q25", "q50", "q75", "q100"] {
            names.push(format!("gsp{dir}_{stat}"));
        }
    }
    names
}

/// The 55 features of one image in the frozen order.
pub fn extract_vector(img: &GrayImage, cfg: &PipelineConfig) -> Result<Vec<f64>> {
    let stat = stat_features(img, &cfg.glcm, &cfg.hoc)?;
    let lgs = lgs_features(&lgs_transform(img)?);
    let gsp = gsp_features(img, &cfg.gsp)?;

    let mut v = Vec::with_capacity(FEATURE_LEN);
    v.extend([
        stat.fos.mean,
        stat.fos.sd,
        stat.fos.entropy,
        stat.fos.variance,
        stat.fos.smoothness,
        stat.fos.kurtosis,
        stat.fos.skewness,
        stat.glcm.idm,
        stat.glcm.contrast,
        stat.glcm.energy,
        stat.glcm.homogeneity,
    ]);
    v.extend(stat.hoc);
    v.extend([
        stat.hos.entropy_phase,
        stat.hos.mean_magnitude,
        stat.hos.entropy_deg1,
        stat.hos.entropy_deg2,
        stat.hos.entropy_deg3,
    ]);
    v.extend([lgs.mean, lgs.variance, lgs.skewness, lgs.kurtosis, lgs.energy, lgs.entropy]);
    for dir in &gsp {
        v.extend(dir.as_array());
    }
    debug_assert_eq!(v.len(), FEATURE_LEN);
    if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
        return Err(CadError::NonFinite(format!("feature '{}'", feature_names()[bad])));
    }
    Ok(v)
}

pub fn extract_record(
    id: &str,
    label: bool,
    stage: Stage,
    img: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<FeatureRecord> {
    Ok(FeatureRecord {
        id: id.to_string(),
        label,
        stage,
        values: extract_vector(img, cfg)?,
    })
}

/// Serialize records; the schema line pins the layout version.
pub fn render_feature_file(records: &[FeatureRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {FEATURE_SCHEMA}");
    let _ = writeln!(out, "id,label,stage,{}", feature_names().join(","));
    for r in records {
        let _ = write!(
            out,
            "{},{},{}",
            r.id,
            if r.label { "glaucoma" } else { "normal" },
            r.stage.name()
        );
        for v in &r.values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_feature_file(text: &str) -> Result<Vec<FeatureRecord>> {
    let mut lines = text.lines();
    let schema = lines.next().unwrap_or_default();
    if schema.trim_start_matches("# ") != FEATURE_SCHEMA {
        return Err(CadError::invalid(format!("unsupported feature schema '{schema}'")));
    }
    let header = lines.next().unwrap_or_default();
    let expect = format!("id,label,stage,{}", feature_names().join(","));
    if header != expect {
        return Err(CadError::invalid("feature header does not match the schema"));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != FEATURE_LEN + 3 {
            return Err(CadError::Manifest {
                line: lineno + 3,
                msg: format!("expected {} fields, found {}", FEATURE_LEN + 3, parts.len()),
            });
        }
        let label = match parts[1] {
            "glaucoma" => true,
            "normal" => false,
            other => {
                return Err(CadError::Manifest {
                    line: lineno + 3,
                    msg: format!("unknown label '{other}'"),
                })
            }
        };
        let stage = Stage::parse(parts[2]).ok_or_else(|| CadError::Manifest {
            line: lineno + 3,
            msg: format!("unknown stage '{}'", parts[2]),
        })?;
        let values = parts[3..]
            .iter()
            .map(|t| {
                t.parse::<f64>().map_err(|_| CadError::Manifest {
                    line: lineno + 3,
                    msg: format!("bad feature value '{t}'"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        records.push(FeatureRecord { id: parts[0].to_string(), label, stage, values });
    }
    Ok(records)
}

/// View of the records as classifier input.
pub fn to_labeled_data(records: &[FeatureRecord]) -> LabeledData {
    let mut data = LabeledData::default();
    for r in records {
        data.push(r.values.clone(), r.label);
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{class_phantom, PhantomClass};

    #[test]
    fn names_are_frozen() {
        let names = feature_names();
        assert_eq!(names.len(), FEATURE_LEN);
        // Pin the block boundaries to indices.
        assert_eq!(names[0], "fos_mean");
        assert_eq!(names[6], "fos_skewness");
        assert_eq!(names[7], "glcm_idm");
        assert_eq!(names[10], "glcm_homogeneity");
        assert_eq!(names[11], "hoc_10");
        assert_eq!(names[15], "hoc_180");
        assert_eq!(names[16], "hos_entropy");
        assert_eq!(names[20], "hos_ent_dg3");
        assert_eq!(names[21], "lgs_mean");
        assert_eq!(names[26], "lgs_entropy");
        assert_eq!(names[27], "gsp0_kurtosis");
        assert_eq!(names[33], "gsp0_q100");
        assert_eq!(names[34], "gsp45_kurtosis");
        assert_eq!(names[54], "gsp135_q100");
    }

    #[test]
    fn constant_image_degenerate_vector() {
        let img = GrayImage::new(64, 64, 120);
        let cfg = PipelineConfig::default();
        let v = extract_vector(&img, &cfg).unwrap();
        let names = feature_names();
        let at = |n: &str| v[names.iter().position(|x| x == n).unwrap()];
        // The transform leaves rounding dust of order 1e-26 in the detail
        // bands, so the variance is only numerically zero.
        assert!(at("fos_variance") < 1e-30);
        assert_eq!(at("fos_entropy"), 0.0);
        // The NRP value is irrational, so summation dust keeps the
        // variance only numerically zero.
        assert!(at("lgs_variance") < 1e-20);
        assert_eq!(at("lgs_entropy"), 0.0);
        for dir in [0, 45, 90, 135] {
            assert_eq!(at(&format!("gsp{dir}_sd")), 0.0);
            assert_eq!(at(&format!("gsp{dir}_q25")), at(&format!("gsp{dir}_q100")));
        }
        assert!(v.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn assembly_matches_component_modules() {
        // The fixed phantom's vector must equal the per-module functions
        // applied independently, in the documented block order.
        let img = class_phantom(64, PhantomClass::Glaucoma, 11);
        let cfg = PipelineConfig::default();
        let v = extract_vector(&img, &cfg).unwrap();

        let stat =
            crate::statfeat::stat_features(&img, &cfg.glcm, &cfg.hoc).unwrap();
        assert_eq!(v[0], stat.fos.mean);
        assert_eq!(v[6], stat.fos.skewness);
        assert_eq!(v[7], stat.glcm.idm);
        assert_eq!(v[10], stat.glcm.homogeneity);
        assert_eq!(&v[11..16], &stat.hoc);
        assert_eq!(v[16], stat.hos.entropy_phase);
        assert_eq!(v[20], stat.hos.entropy_deg3);

        let lgs = crate::graphfeat::lgs_features(
            &crate::graphfeat::lgs_transform(&img).unwrap(),
        );
        assert_eq!(v[21], lgs.mean);
        assert_eq!(v[26], lgs.entropy);

        let gsp = crate::graphfeat::gsp_features(&img, &cfg.gsp).unwrap();
        for (d, dir) in gsp.iter().enumerate() {
            assert_eq!(&v[27 + 7 * d..27 + 7 * (d + 1)], &dir.as_array());
        }
    }

    #[test]
    fn identical_images_identical_records() {
        let img = class_phantom(64, PhantomClass::Normal, 3);
        let cfg = PipelineConfig::default();
        let a = extract_vector(&img, &cfg).unwrap();
        let b = extract_vector(&img, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip_is_exact() {
        let cfg = PipelineConfig::default();
        let records: Vec<FeatureRecord> = (0..4)
            .map(|i| {
                let class =
                    if i % 2 == 0 { PhantomClass::Normal } else { PhantomClass::Glaucoma };
                let img = class_phantom(64, class, i);
                extract_record(&format!("img_{i:04}"), i % 2 == 1, Stage::Enhanced, &img, &cfg)
                    .unwrap()
            })
            .collect();
        let text = render_feature_file(&records);
        let parsed = parse_feature_file(&text).unwrap();
        assert_eq!(parsed, records);
        // Serialization itself is deterministic.
        assert_eq!(text, render_feature_file(&parsed));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_feature_file("bogus\n").is_err());
        let text = format!(
            "# {FEATURE_SCHEMA}\nid,label,stage,{}\nx,cat,raw{}\n",
            feature_names().join(","),
            ",0".repeat(FEATURE_LEN)
        );
        let err = parse_feature_file(&text).unwrap_err();
        assert!(err.to_string().contains("cat"), "{err}");
    }
}
