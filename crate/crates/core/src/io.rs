//! 8-bit grayscale PNG input/output.
//!
//! Color inputs convert with the pipeline-wide luma rule
//! `0.299 R + 0.587 G + 0.114 B`.

use std::path::Path;

use crate::error::{CadError, Result};
use crate::graphfeat::{block_paths, GspConfig};
use crate::raster::{luma, GrayImage, RealImage};
use crate::xforms::dtcwt::DtcwtPyramid;

pub fn load_gray(path: &Path) -> Result<GrayImage> {
    let img = image::open(path)
        .map_err(|e| CadError::Image(format!("{}: {e}", path.display())))?;
    let gray = match img {
        image::DynamicImage::ImageLuma8(g) => {
            let (w, h) = (g.width() as usize, g.height() as usize);
            GrayImage::from_vec(w, h, g.into_raw())?
        }
        other => {
            let rgb = other.to_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            let px = rgb.pixels().map(|p| luma(p[0], p[1], p[2])).collect();
            GrayImage::from_vec(w, h, px)?
        }
    };
    if gray.is_empty() {
        return Err(CadError::EmptyInput);
    }
    Ok(gray)
}

pub fn save_gray(path: &Path, img: &GrayImage) -> Result<()> {
    let buf = image::GrayImage::from_raw(
        img.width() as u32,
        img.height() as u32,
        img.pixels().to_vec(),
    )
    .ok_or_else(|| CadError::invalid("raster dimensions"))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| CadError::Image(format!("{}: {e}", path.display())))
}

fn normalize_to_gray(values: &[f64], width: usize, height: usize) -> GrayImage {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    let px = values.iter().map(|&v| ((v - lo) * scale).round() as u8).collect();
    GrayImage::from_vec(width, height, px).expect("dimensions match")
}

/// Debug dump of a dual-tree pyramid: magnitude-normalized PNGs of every
/// complex sub-band plus the four low-pass residuals.
pub fn save_pyramid_debug(pyr: &DtcwtPyramid, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (level, bands) in pyr.highpass.iter().enumerate() {
        for (b, band) in bands.bands.iter().enumerate() {
            let mags: Vec<f64> = band.values().iter().map(|c| c.norm()).collect();
            let img = normalize_to_gray(&mags, band.width(), band.height());
            save_gray(&dir.join(format!("hs_l{level}_b{b}.png")), &img)?;
        }
    }
    for (t, low) in pyr.lowpass.iter().enumerate() {
        let img = normalize_to_gray(low.values(), low.width(), low.height());
        save_gray(&dir.join(format!("ls_tree{t}.png")), &img)?;
    }
    Ok(())
}

/// Debug dump of the block shortest paths drawn over the image, one color
/// per direction.
pub fn save_paths_overlay(img: &GrayImage, cfg: &GspConfig, path: &Path) -> Result<()> {
    let mut rgb = image::RgbImage::new(img.width() as u32, img.height() as u32);
    for (x, y, p) in rgb.enumerate_pixels_mut() {
        let g = img.get(x as usize, y as usize);
        *p = image::Rgb([g, g, g]);
    }
    for (dir, points) in block_paths(img, cfg)? {
        let color = match dir {
            0 => image::Rgb([228, 26, 28]),
            45 => image::Rgb([255, 127, 0]),
            90 => image::Rgb([77, 175, 74]),
            _ => image::Rgb([55, 126, 184]),
        };
        for (x, y) in points {
            rgb.put_pixel(x as u32, y as u32, color);
        }
    }
    rgb.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| CadError::Image(format!("{}: {e}", path.display())))
}

/// Keep the real-valued export available for coefficient inspection.
pub fn save_real_normalized(img: &RealImage, path: &Path) -> Result<()> {
    save_gray(path, &normalize_to_gray(img.values(), img.width(), img.height()))
}
