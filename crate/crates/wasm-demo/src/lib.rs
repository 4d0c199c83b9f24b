//! Browser demo: interactive exploration of the preprocessing and
//! enhancement stages plus the graph-texture view, on synthetic phantoms.
//!
//! The exported surface works on plain byte buffers: JS hands parameters
//! in, RGBA pixels come out, and the page draws them through ImageData.

use wasm_bindgen::prelude::*;

use retcad::enhance::{enhance_image, EnhanceConfig};
use retcad::graphfeat::{block_paths, lgs_transform, GspConfig};
use retcad::histogram::compute_histogram;
use retcad::phantom::{class_phantom, low_contrast_phantom, ridge_phantom, PhantomClass};
use retcad::preprocess::{preprocess, AlphaMode, PreprocessConfig};
use retcad::raster::GrayImage;
use retcad::xforms::denoise::DenoiseConfig;

fn gray_to_rgba(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.len() * 4);
    for &g in img.pixels() {
        out.extend_from_slice(&[g, g, g, 255]);
    }
    out
}

/// Stage selector used by the texture views.
fn stage_of(demo: &Demo, which: u8) -> &GrayImage {
    match which {
        1 => demo.preprocessed.as_ref().unwrap_or(&demo.original),
        2 => demo.enhanced.as_ref().unwrap_or(&demo.original),
        _ => &demo.original,
    }
}

#[wasm_bindgen]
pub struct Demo {
    original: GrayImage,
    preprocessed: Option<GrayImage>,
    enhanced: Option<GrayImage>,
    t_finals: Vec<usize>,
}

#[wasm_bindgen]
impl Demo {
    /// kind: 0 normal fundus phantom, 1 glaucoma analog, 2 low contrast,
    /// 3 sparse ridges.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: u8, size: u32, seed: u32) -> Demo {
        let n = (size as usize).clamp(32, 256);
        let seed = seed as u64;
        let original = match kind {
            1 => class_phantom(n, PhantomClass::Glaucoma, seed),
            2 => low_contrast_phantom(n, seed),
            3 => ridge_phantom(n, seed),
            _ => class_phantom(n, PhantomClass::Normal, seed),
        };
        Demo { original, preprocessed: None, enhanced: None, t_finals: Vec::new() }
    }

    pub fn width(&self) -> u32 {
        self.original.width() as u32
    }

    pub fn height(&self) -> u32 {
        self.original.height() as u32
    }

    pub fn original_rgba(&self) -> Vec<u8> {
        gray_to_rgba(&self.original)
    }

    /// Run the brightness/contrast stage and return its RGBA rendering.
    pub fn preprocess_rgba(
        &mut self,
        alpha_auto: bool,
        alpha: f64,
        delta: f64,
        theta: f64,
        quantiles: u32,
    ) -> Result<Vec<u8>, JsValue> {
        let cfg = PreprocessConfig {
            alpha: if alpha_auto { AlphaMode::Auto } else { AlphaMode::Fixed(alpha) },
            delta,
            theta,
            quantiles: quantiles.max(1) as usize,
        };
        let out = preprocess(&self.original, &cfg).map_err(|e| JsValue::from(e.to_string()))?;
        let rgba = gray_to_rgba(&out);
        self.preprocessed = Some(out);
        self.enhanced = None;
        Ok(rgba)
    }

    /// Run the structural enhancement stage on the last preprocessed image
    /// (or the original when preprocessing has not been run).
    pub fn enhance_rgba(
        &mut self,
        k: f64,
        diff_max: f64,
        noise_scale: f64,
    ) -> Result<Vec<u8>, JsValue> {
        let cfg = EnhanceConfig {
            k,
            diff_max: diff_max.max(1e-6),
            denoise: DenoiseConfig { noise_scale, ..Default::default() },
            ..Default::default()
        };
        let input = self.preprocessed.as_ref().unwrap_or(&self.original);
        let outcome = enhance_image(input, &cfg).map_err(|e| JsValue::from(e.to_string()))?;
        let rgba = gray_to_rgba(&outcome.image);
        self.t_finals = outcome.t_finals;
        self.enhanced = Some(outcome.image);
        Ok(rgba)
    }

    /// Per-band dilation counts chosen by the stopping rule of the last
    /// enhancement run.
    pub fn t_finals(&self) -> Vec<u32> {
        self.t_finals.iter().map(|&t| t as u32).collect()
    }

    /// Local-graph-structure magnitude raster of a stage (0 original,
    /// 1 preprocessed, 2 enhanced), normalized for display.
    pub fn lgs_rgba(&self, which: u8) -> Result<Vec<u8>, JsValue> {
        let img = stage_of(self, which);
        let nrp = lgs_transform(img).map_err(|e| JsValue::from(e.to_string()))?;
        let max = std::f64::consts::SQRT_2 * 63.0;
        let mut out = Vec::with_capacity(nrp.len() * 4);
        for &v in nrp.values() {
            let g = (v / max * 255.0).round().clamp(0.0, 255.0) as u8;
            out.extend_from_slice(&[g, g, g, 255]);
        }
        Ok(out)
    }

    /// Shortest paths of the block graphs as JSON:
    /// `[{"dir":0,"points":[[x,y],..]},..]` in image coordinates.
    pub fn gsp_paths_json(&self, which: u8, grid: u32) -> Result<String, JsValue> {
        let img = stage_of(self, which);
        let grid = (grid as usize).clamp(1, 8);
        let cfg = GspConfig { grid: (grid, grid), t_e: 1 };
        let paths = block_paths(img, &cfg).map_err(|e| JsValue::from(e.to_string()))?;
        let parts: Vec<String> = paths
            .into_iter()
            .map(|(dir, points)| {
                let pts: Vec<String> =
                    points.iter().map(|&(x, y)| format!("[{x},{y}]")).collect();
                format!("{{\"dir\":{dir},\"points\":[{}]}}", pts.join(","))
            })
            .collect();
        Ok(format!("[{}]", parts.join(",")))
    }

    /// 256-bin histogram of a stage for the side plot.
    pub fn histogram(&self, which: u8) -> Vec<u32> {
        let img = stage_of(self, which);
        match compute_histogram(img) {
            Ok(h) => h.bins.iter().map(|&c| c as u32).collect(),
            Err(_) => vec![0; 256],
        }
    }
}
