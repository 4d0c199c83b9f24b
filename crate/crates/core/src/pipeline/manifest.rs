//! Dataset manifest ingestion.
//!
//! Manifest format: CSV with header `path,label,dataset`; labels are
//! `normal` or `glaucoma`; relative paths resolve against the manifest's
//! directory. Ingestion validates that every referenced image exists and
//! decodes.

use std::path::{Path, PathBuf};

use crate::error::{CadError, Result};
use crate::io::load_gray;

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    /// true marks the glaucoma class.
    pub label: bool,
    pub dataset: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub normal_count: usize,
    pub glaucoma_count: usize,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parse and validate `manifest.csv` in (or given relative to) `dir`.
pub fn ingest(dir: &Path, manifest_path: &Path) -> Result<DatasetManifest> {
    let full = if manifest_path.is_absolute() {
        manifest_path.to_path_buf()
    } else {
        dir.join(manifest_path)
    };
    let text = std::fs::read_to_string(&full)
        .map_err(|e| CadError::Image(format!("{}: {e}", full.display())))?;
    let base = full.parent().unwrap_or(Path::new(".")).to_path_buf();

    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "path,label,dataset" => {}
        _ => {
            return Err(CadError::Manifest {
                line: 1,
                msg: "expected header 'path,label,dataset'".into(),
            })
        }
    }

    let mut manifest = DatasetManifest::default();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        // Paths may contain commas; label and dataset never do, so split
        // from the right.
        let mut fields = line.rsplitn(3, ',');
        let dataset = fields.next().unwrap_or("").trim().to_string();
        let label_s = fields.next().unwrap_or("").trim();
        let path_s = fields.next().ok_or(CadError::Manifest {
            line: lineno,
            msg: "expected path,label,dataset".into(),
        })?;
        let label = match label_s {
            "glaucoma" => true,
            "normal" => false,
            other => {
                return Err(CadError::Manifest {
                    line: lineno,
                    msg: format!("unknown label '{other}'"),
                })
            }
        };
        let path = {
            let p = PathBuf::from(path_s.trim());
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        load_gray(&path).map_err(|e| CadError::Manifest {
            line: lineno,
            msg: format!("image unreadable: {e}"),
        })?;
        if label {
            manifest.glaucoma_count += 1;
        } else {
            manifest.normal_count += 1;
        }
        manifest.entries.push(ManifestEntry { path, label, dataset });
    }
    Ok(manifest)
}

/// Render a manifest for a directory of generated images.
pub fn render_manifest(rows: &[(String, bool, String)]) -> String {
    let mut out = String::from("path,label,dataset\n");
    for (path, label, dataset) in rows {
        out.push_str(path);
        out.push(',');
        out.push_str(if *label { "glaucoma" } else { "normal" });
        out.push(',');
        out.push_str(dataset);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::save_gray;
    use crate::phantom::vessel_phantom;

    fn write_images(dir: &Path, names: &[&str]) {
        for (i, name) in names.iter().enumerate() {
            save_gray(&dir.join(name), &vessel_phantom(16, i as u64)).unwrap();
        }
    }

    #[test]
    fn valid_manifest_ingests() {
        let tmp = tempfile::tempdir().unwrap();
        write_images(tmp.path(), &["a.png", "b.png"]);
        std::fs::write(
            tmp.path().join("manifest.csv"),
            "path,label,dataset\na.png,normal,synth\nb.png,glaucoma,synth\n",
        )
        .unwrap();
        let m = ingest(tmp.path(), Path::new("manifest.csv")).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.normal_count, 1);
        assert_eq!(m.glaucoma_count, 1);
    }

    #[test]
    fn unknown_label_names_the_row() {
        let tmp = tempfile::tempdir().unwrap();
        write_images(tmp.path(), &["a.png"]);
        std::fs::write(
            tmp.path().join("manifest.csv"),
            "path,label,dataset\na.png,cat,synth\n",
        )
        .unwrap();
        let err = ingest(tmp.path(), Path::new("manifest.csv")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("cat"), "{msg}");
    }

    #[test]
    fn missing_image_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        std::fs::write(
            tmp.path().join("manifest.csv"),
            "path,label,dataset\nghost.png,normal,synth\n",
        )
        .unwrap();
        assert!(ingest(tmp.path(), Path::new("manifest.csv")).is_err());
    }
}
