//! `cad` — command line front end for the retinal CAD pipeline.
//!
//! Stage outputs are directories of PNGs plus a forwarded `manifest.csv`
//! and an `origin.txt` breadcrumb pointing at the original images, so the
//! report stage can compare end-to-end quality without re-running
//! anything. Every stage is deterministic and idempotent: rerunning with
//! identical inputs and configuration rewrites identical bytes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use retcad::enhance::enhance_image;
use retcad::error::{CadError, Result};
use retcad::io::{load_gray, save_gray};
use retcad::neural::{write_model, AnyModel, MlpModel, WnnModel};
use retcad::pipeline::{
    self, extract_record, grid_csv, ingest, metrics_csv, mse_csv, mse_histogram_svg,
    parse_feature_file, render_feature_file, render_manifest, render_report, run_experiment,
    synthetic_image_set, ExperimentConfig, FeatureRecord, GridCell, ModelFamily, MseRow,
    PipelineConfig, Regime, RunReport, Stage, PRESET_GRID,
};
use retcad::preprocess::{histogram_equalize, preprocess};
use retcad::raster::mse;

#[derive(Parser)]
#[command(name = "cad", about = "Retinal image CAD pipeline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Raw,
    Preprocessed,
    Enhanced,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Preset,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic two-class synthetic phantom dataset.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Brightness/contrast preprocessing of every manifest image.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Dual-tree morphological enhancement; writes a per-image JSON
    /// sidecar with the chosen dilation counts.
    Enhance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dump magnitude-normalized sub-band PNGs per image into this
        /// directory.
        #[arg(long)]
        dump_bands: Option<PathBuf>,
    },
    /// Extract the 55-element feature vectors into a CSV.
    Features {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "enhanced")]
        stage: StageArg,
        /// Dump the block shortest-path overlays as PNGs into this
        /// directory.
        #[arg(long)]
        dump_paths: Option<PathBuf>,
    },
    /// Train the WNN and MLP grids on a feature file.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value = "preset")]
        grid: GridArg,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Hidden units for --grid custom.
        #[arg(long)]
        hidden: Option<usize>,
        /// Batch size for --grid custom.
        #[arg(long)]
        batch: Option<usize>,
    },
    /// Assemble the run report from stage outputs in a run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
    /// Whole-pipeline experiment over a manifest dataset in one step.
    Experiment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes; anything else is an
            // input error.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { out, count, size, seed } => cmd_synth(&out, count, size, seed),
        Command::Preprocess { input, out, config } => {
            cmd_stage(&input, &out, config.as_deref(), StageKind::Preprocess)
        }
        Command::Enhance { input, out, config, dump_bands } => {
            cmd_stage(&input, &out, config.as_deref(), StageKind::Enhance { dump_bands })
        }
        Command::Features { input, out, config, stage, dump_paths } => {
            cmd_features(&input, &out, config.as_deref(), stage, dump_paths.as_deref())
        }
        Command::Train { features, grid, seed, out, config, hidden, batch } => {
            cmd_train(&features, grid, seed, &out, config.as_deref(), hidden, batch)
        }
        Command::Report { run } => cmd_report(&run),
        Command::Experiment { input, out, config, seed } => {
            cmd_experiment(&input, &out, config.as_deref(), seed)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => PipelineConfig::parse(&std::fs::read_to_string(p)?),
    }
}

fn cmd_synth(out: &Path, count: usize, size: usize, seed: u64) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let images = synthetic_image_set(count, size, seed);
    let mut rows = Vec::with_capacity(images.len());
    for (id, img, label) in &images {
        let name = format!("{id}.png");
        save_gray(&out.join(&name), img)?;
        rows.push((name, *label, "synthetic".to_string()));
    }
    std::fs::write(out.join("manifest.csv"), render_manifest(&rows))?;
    println!("wrote {} images to {}", images.len(), out.display());
    Ok(())
}

enum StageKind {
    Preprocess,
    Enhance { dump_bands: Option<PathBuf> },
}

/// Shared driver for the image-to-image stages.
fn cmd_stage(input: &Path, out: &Path, config: Option<&Path>, kind: StageKind) -> Result<()> {
    let cfg = load_config(config)?;
    let manifest = ingest(input, Path::new("manifest.csv"))?;
    std::fs::create_dir_all(out)?;

    let mut rows = Vec::with_capacity(manifest.len());
    for entry in &manifest.entries {
        let img = load_gray(&entry.path)?;
        let name = entry
            .path
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_else(|| "image.png".to_string());
        match kind {
            StageKind::Preprocess => {
                save_gray(&out.join(&name), &preprocess(&img, &cfg.pre)?)?;
            }
            StageKind::Enhance { ref dump_bands } => {
                let outcome = enhance_image(&img, &cfg.enh)?;
                save_gray(&out.join(&name), &outcome.image)?;
                let sidecar = serde_json::json!({
                    "id": name.trim_end_matches(".png"),
                    "t_finals": outcome.t_finals,
                    "t_final": outcome.t_finals.iter().max().copied().unwrap_or(0),
                });
                std::fs::write(out.join(format!("{name}.t.json")), format!("{sidecar}\n"))?;
                if let Some(dump) = dump_bands {
                    let pyr = retcad::xforms::dtcwt_forward(&img.to_real(), cfg.enh.levels)?;
                    retcad::io::save_pyramid_debug(
                        &pyr,
                        &dump.join(name.trim_end_matches(".png")),
                    )?;
                }
            }
        }
        rows.push((name, entry.label, entry.dataset.clone()));
    }
    std::fs::write(out.join("manifest.csv"), render_manifest(&rows))?;

    // Breadcrumb to the original images for the report stage.
    let origin = match std::fs::read_to_string(input.join("origin.txt")) {
        Ok(existing) => existing,
        Err(_) => format!("{}\n", std::fs::canonicalize(input)?.display()),
    };
    std::fs::write(out.join("origin.txt"), origin)?;
    println!("processed {} images into {}", manifest.len(), out.display());
    Ok(())
}

fn cmd_features(
    input: &Path,
    out: &Path,
    config: Option<&Path>,
    stage: StageArg,
    dump_paths: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let stage = match stage {
        StageArg::Raw => Stage::Raw,
        StageArg::Preprocessed => Stage::Preprocessed,
        StageArg::Enhanced => Stage::Enhanced,
    };
    let manifest = ingest(input, Path::new("manifest.csv"))?;
    let mut records = Vec::with_capacity(manifest.len());
    for entry in &manifest.entries {
        let img = load_gray(&entry.path)?;
        let id = entry
            .path
            .file_stem()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_else(|| "image".to_string());
        if let Some(dump) = dump_paths {
            std::fs::create_dir_all(dump)?;
            retcad::io::save_paths_overlay(&img, &cfg.gsp, &dump.join(format!("{id}_paths.png")))?;
        }
        records.push(extract_record(&id, entry.label, stage, &img, &cfg)?);
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(out, render_feature_file(&records))?;
    println!("wrote {} feature records to {}", records.len(), out.display());
    Ok(())
}

fn cmd_train(
    features: &Path,
    grid: GridArg,
    seed: u64,
    out: &Path,
    config: Option<&Path>,
    hidden: Option<usize>,
    batch: Option<usize>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let records = parse_feature_file(&std::fs::read_to_string(features)?)?;
    if records.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let grid: Vec<GridCell> = match grid {
        GridArg::Preset => PRESET_GRID.to_vec(),
        GridArg::Custom => {
            let (h, b) = hidden
                .zip(batch)
                .ok_or_else(|| CadError::invalid("--grid custom requires --hidden and --batch"))?;
            vec![GridCell { hidden: h, batch: b }]
        }
    };
    let regime = match records[0].stage {
        Stage::Enhanced => Regime::AfterEnhancement,
        _ => Regime::BeforeEnhancement,
    };
    let exp = ExperimentConfig {
        epochs: cfg.train.epochs,
        seed,
        learning_rate: cfg.train.learning_rate,
        l2: cfg.train.l2,
        train_fraction: cfg.train.train_fraction,
        ..Default::default()
    };
    let labels: Vec<bool> = records.iter().map(|r| r.label).collect();
    let splits = retcad::neural::stratified_split(&labels, exp.train_fraction, exp.seed);

    std::fs::create_dir_all(out)?;
    let mut curves = Vec::new();
    for family in [ModelFamily::Wnn, ModelFamily::Mlp] {
        curves.extend(pipeline::experiment::run_grid(
            &records, &splits, regime, family, &grid, &exp,
        )?);
    }
    std::fs::write(out.join("grid.csv"), grid_csv(&curves))?;

    // Persist the best model per family, retrained on its winning cell.
    let mut regime_rows = Vec::new();
    for family in [ModelFamily::Wnn, ModelFamily::Mlp] {
        let best = curves
            .iter()
            .filter(|c| c.family == family)
            .max_by(|a, b| a.test_metrics.accuracy.total_cmp(&b.test_metrics.accuracy))
            .expect("grid is non-empty");
        regime_rows.push(pipeline::experiment::RegimeRow {
            regime,
            family,
            cell: best.cell,
            metrics: best.test_metrics,
        });
        let model = retrain_best(&records, &splits, family, best.cell, &exp)?;
        let mut buf = Vec::new();
        write_model(&model, &mut buf)?;
        std::fs::write(out.join(format!("{}_best.model", family.name())), buf)?;
    }
    std::fs::write(out.join("metrics.csv"), metrics_csv(&regime_rows))?;
    println!("trained {} grid cells; artifacts in {}", curves.len(), out.display());
    Ok(())
}

fn retrain_best(
    records: &[FeatureRecord],
    splits: &(Vec<usize>, Vec<usize>, Vec<usize>),
    family: ModelFamily,
    cell: GridCell,
    exp: &ExperimentConfig,
) -> Result<AnyModel> {
    use retcad::neural::{train_with_splits, LabeledData, TrainConfig};
    let subset = |idx: &[usize]| {
        let mut data = LabeledData::default();
        for &i in idx {
            data.push(records[i].values.clone(), records[i].label);
        }
        data
    };
    let (train_set, val_set, test_set) = (subset(&splits.0), subset(&splits.1), subset(&splits.2));
    let tc = TrainConfig {
        epochs: exp.epochs,
        batch_size: cell.batch,
        learning_rate: exp.learning_rate,
        l2: exp.l2,
        train_fraction: exp.train_fraction,
        seed: exp.seed ^ ((cell.hidden as u64) << 32) ^ cell.batch as u64,
    };
    let dim = records[0].values.len();
    Ok(match family {
        ModelFamily::Wnn => {
            let mut m = WnnModel::new(exp.wavelet, dim, cell.hidden, tc.seed)?;
            train_with_splits(&mut m, &train_set, &val_set, &test_set, &tc)?;
            AnyModel::Wnn(m)
        }
        ModelFamily::Mlp => {
            let mut m = MlpModel::new(dim, cell.hidden, tc.seed)?;
            train_with_splits(&mut m, &train_set, &val_set, &test_set, &tc)?;
            AnyModel::Mlp(m)
        }
    })
}

/// Assemble report artifacts from the stage outputs under the run dir:
/// `enh/` (with origin.txt and sidecars) feeds the MSE table and the
/// t_final distribution; any `train*/` directories contribute their grids.
fn cmd_report(run: &Path) -> Result<()> {
    let enh_dir = run.join("enh");
    let mut report = RunReport::default();

    if enh_dir.is_dir() {
        let origin = std::fs::read_to_string(enh_dir.join("origin.txt"))
            .map_err(|_| CadError::invalid("enh/origin.txt missing; rerun the enhance stage"))?;
        let orig_dir = PathBuf::from(origin.trim());
        let manifest = ingest(&enh_dir, Path::new("manifest.csv"))?;
        for entry in &manifest.entries {
            let name = entry.path.file_name().unwrap().to_string_lossy().to_string();
            let enhanced = load_gray(&entry.path)?;
            let original = load_gray(&orig_dir.join(&name))?;
            report.mse_rows.push(MseRow {
                id: name.trim_end_matches(".png").to_string(),
                he: mse(&histogram_equalize(&original)?, &original)?,
                proposed: mse(&enhanced, &original)?,
            });
            let sidecar = enh_dir.join(format!("{name}.t.json"));
            if let Ok(text) = std::fs::read_to_string(sidecar) {
                let v: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| CadError::invalid(format!("bad sidecar: {e}")))?;
                if let Some(ts) = v["t_finals"].as_array() {
                    for t in ts.iter().filter_map(|t| t.as_u64()) {
                        *report.t_final_counts.entry(t as usize).or_insert(0) += 1;
                    }
                }
            }
        }
        std::fs::write(run.join("mse.csv"), mse_csv(&report.mse_rows))?;
        std::fs::write(run.join("mse_hist.svg"), mse_histogram_svg(&report.mse_rows))?;
    }

    let mut text = render_report(&report);
    // Append any training grids found in the run directory.
    let mut train_dirs: Vec<PathBuf> = std::fs::read_dir(run)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_dir()
                && p.file_name().map(|n| n.to_string_lossy().starts_with("train")).unwrap_or(false)
        })
        .collect();
    train_dirs.sort();
    for dir in train_dirs {
        for file in ["grid.csv", "metrics.csv"] {
            if let Ok(csv) = std::fs::read_to_string(dir.join(file)) {
                text.push_str(&format!(
                    "\n[{}/{}]\n{}",
                    dir.file_name().unwrap().to_string_lossy(),
                    file,
                    csv
                ));
            }
        }
    }
    std::fs::write(run.join("report.txt"), &text)?;
    println!("report written to {}", run.join("report.txt").display());
    Ok(())
}

fn cmd_experiment(input: &Path, out: &Path, config: Option<&Path>, seed: u64) -> Result<()> {
    let cfg = load_config(config)?;
    let exp = ExperimentConfig {
        seed,
        epochs: cfg.train.epochs,
        learning_rate: cfg.train.learning_rate,
        l2: cfg.train.l2,
        train_fraction: cfg.train.train_fraction,
        ..Default::default()
    };
    let manifest = ingest(input, Path::new("manifest.csv"))?;
    let mut images = Vec::with_capacity(manifest.len());
    for entry in &manifest.entries {
        let id = entry.path.file_stem().unwrap().to_string_lossy().to_string();
        images.push((id, load_gray(&entry.path)?, entry.label));
    }
    images.sort_by(|a, b| a.0.cmp(&b.0));

    let report = run_experiment(&images, &cfg, &exp)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("report.txt"), render_report(&report))?;
    std::fs::write(out.join("mse.csv"), mse_csv(&report.mse_rows))?;
    std::fs::write(out.join("mse_hist.svg"), mse_histogram_svg(&report.mse_rows))?;
    std::fs::write(out.join("grid.csv"), grid_csv(&report.curves))?;
    std::fs::write(out.join("metrics.csv"), metrics_csv(&report.regime_rows))?;

    // Feature files for both regimes so training can be rerun standalone.
    let staged = pipeline::stage_images(&images, &cfg)?;
    for (regime, stage_name) in
        [(Regime::BeforeEnhancement, "before"), (Regime::AfterEnhancement, "after")]
    {
        let records = pipeline::experiment::regime_records(&staged, regime, &cfg)?;
        std::fs::write(
            out.join(format!("features_{stage_name}.csv")),
            render_feature_file(&records),
        )?;
    }
    for (stage, secs) in &report.timings {
        eprintln!("timing: {stage} {secs:.2}s");
    }
    println!("experiment artifacts in {}", out.display());
    Ok(())
}
