//! Graph shortest path texture descriptors.
//!
//! The image splits into a block grid (remainders absorbed by the last row
//! and column). Each block maps to an undirected pixel graph whose edges
//! connect vertices at Chebyshev distance exactly T_e, weighted by
//! `|I1 - I2| + (I1 + I2)/2`. Dijkstra paths are traced in four directions,
//! path vertices map back to intensities, and the per-direction vectors of
//! per-block path means yield kurtosis, skewness, standard deviation and
//! the 25/50/75/100 quantiles: seven statistics for each of the four
//! directions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{CadError, Result};
use crate::raster::GrayImage;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GspConfig {
    /// Block grid (columns, rows); the default 4x4 yields 16 blocks.
    pub grid: (usize, usize),
    /// Chebyshev radius at which vertices connect.
    pub t_e: usize,
}

impl Default for GspConfig {
    fn default() -> Self {
        Self { grid: (4, 4), t_e: 1 }
    }
}

/// Path directions in block geometry.
pub const DIRECTIONS: [usize; 4] = [0, 45, 90, 135];

/// Pixel graph of one block: vertices are pixels with their coordinates
/// and intensities; adjacency holds (vertex, weight) pairs.
#[derive(Debug, Clone)]
pub struct PixelGraph {
    width: usize,
    height: usize,
    intensities: Vec<f64>,
    adjacency: Vec<Vec<(u32, f64)>>,
}

impl PixelGraph {
    pub fn vertex_count(&self) -> usize {
        self.intensities.len()
    }

    pub fn degree(&self, x: usize, y: usize) -> usize {
        self.adjacency[y * self.width + x].len()
    }

    pub fn intensity(&self, x: usize, y: usize) -> f64 {
        self.intensities[y * self.width + x]
    }

    pub fn edge_weight(&self, a: (usize, usize), b: (usize, usize)) -> Option<f64> {
        let ai = (a.1 * self.width + a.0) as u32;
        let bi = b.1 * self.width + b.0;
        self.adjacency[bi].iter().find(|&&(v, _)| v == ai).map(|&(_, w)| w)
    }
}

/// Build the pixel graph of one block.
pub fn build_block_graph(block: &GrayImage, t_e: usize) -> Result<PixelGraph> {
    if block.is_empty() {
        return Err(CadError::EmptyInput);
    }
    let (w, h) = (block.width(), block.height());
    let intensities: Vec<f64> = block.pixels().iter().map(|&p| p as f64).collect();
    let r = t_e as isize;
    let mut adjacency = vec![Vec::new(); w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = (y as usize) * w + x as usize;
            for dy in -r..=r {
                for dx in -r..=r {
                    // Chebyshev distance exactly t_e.
                    if dx.abs().max(dy.abs()) != r {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = (ny as usize) * w + nx as usize;
                    let a = intensities[i];
                    let b = intensities[j];
                    let weight = (a - b).abs() + 0.5 * (a + b);
                    adjacency[i].push((j as u32, weight));
                }
            }
        }
    }
    Ok(PixelGraph { width: w, height: h, intensities, adjacency })
}

#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    vertex: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost, ties broken by the smaller vertex index.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra shortest path between two block coordinates.
///
/// Deterministic: among equal-cost relaxations the smaller (row, col)
/// predecessor wins. Returns the vertex list from source to destination
/// inclusive.
pub fn shortest_path(
    g: &PixelGraph,
    source: (usize, usize),
    dest: (usize, usize),
) -> Result<Vec<(usize, usize)>> {
    let n = g.vertex_count();
    let idx = |p: (usize, usize)| -> usize { p.1 * g.width + p.0 };
    if source.0 >= g.width || source.1 >= g.height || dest.0 >= g.width || dest.1 >= g.height {
        return Err(CadError::invalid("endpoint outside block"));
    }
    let s = idx(source);
    let d = idx(dest);

    const UNSET: u32 = u32::MAX;
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![UNSET; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapEntry { cost: 0.0, vertex: s as u32 });

    while let Some(HeapEntry { cost, vertex }) = heap.pop() {
        let u = vertex as usize;
        if done[u] || cost > dist[u] {
            continue;
        }
        done[u] = true;
        if u == d {
            break;
        }
        for &(v, w) in &g.adjacency[u] {
            let v = v as usize;
            if done[v] {
                continue;
            }
            let cand = dist[u] + w;
            if cand < dist[v] {
                dist[v] = cand;
                pred[v] = u as u32;
                heap.push(HeapEntry { cost: cand, vertex: v as u32 });
            } else if cand == dist[v] && (u as u32) < pred[v] {
                pred[v] = u as u32;
            }
        }
    }

    if !dist[d].is_finite() {
        return Err(CadError::Disconnected);
    }
    let mut path = vec![d];
    let mut cur = d;
    while cur != s {
        cur = pred[cur] as usize;
        if cur == UNSET as usize || path.len() > n {
            return Err(CadError::Disconnected);
        }
        path.push(cur);
    }
    path.reverse();
    Ok(path.into_iter().map(|i| (i % g.width, i / g.width)).collect())
}

/// Total weight of a path in the graph.
pub fn path_cost(g: &PixelGraph, path: &[(usize, usize)]) -> f64 {
    path.windows(2)
        .map(|p| g.edge_weight(p[0], p[1]).expect("consecutive path vertices are adjacent"))
        .sum()
}

/// Block rectangles of the grid; the last row/column absorb remainders.
pub fn block_rects(w: usize, h: usize, grid: (usize, usize)) -> Vec<(usize, usize, usize, usize)> {
    let (gx, gy) = grid;
    let bw = w / gx;
    let bh = h / gy;
    let mut out = Vec::with_capacity(gx * gy);
    for by in 0..gy {
        for bx in 0..gx {
            let x0 = bx * bw;
            let y0 = by * bh;
            let x1 = if bx == gx - 1 { w } else { x0 + bw };
            let y1 = if by == gy - 1 { h } else { y0 + bh };
            out.push((x0, y0, x1 - x0, y1 - y0));
        }
    }
    out
}

fn extract_block(img: &GrayImage, rect: (usize, usize, usize, usize)) -> GrayImage {
    let (x0, y0, w, h) = rect;
    let mut px = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            px.push(img.get(x, y));
        }
    }
    GrayImage::from_vec(w, h, px).expect("rect within image")
}

/// Endpoint pair for one direction within a (w, h) block.
pub fn endpoints(dir: usize, w: usize, h: usize) -> ((usize, usize), (usize, usize)) {
    let mx = (w - 1) / 2;
    let my = (h - 1) / 2;
    match dir {
        0 => ((0, my), (w - 1, my)),          // mid-left -> mid-right
        45 => ((0, h - 1), (w - 1, 0)),       // bottom-left -> top-right
        90 => ((mx, 0), (mx, h - 1)),         // mid-top -> mid-bottom
        135 => ((0, 0), (w - 1, h - 1)),      // top-left -> bottom-right
        _ => unreachable!("direction fixed to 0/45/90/135"),
    }
}

/// All block shortest paths of an image, as (direction, vertices in image
/// coordinates); the drawing order is row-major blocks, directions
/// 0/45/90/135 within each block.
pub fn block_paths(
    img: &GrayImage,
    cfg: &GspConfig,
) -> Result<Vec<(usize, Vec<(usize, usize)>)>> {
    let mut out = Vec::new();
    for (x0, y0, w, h) in block_rects(img.width(), img.height(), cfg.grid) {
        if w < 2 || h < 2 {
            continue;
        }
        let block = extract_block(img, (x0, y0, w, h));
        let graph = build_block_graph(&block, cfg.t_e)?;
        for &dir in &DIRECTIONS {
            let (s, d) = endpoints(dir, w, h);
            let path = shortest_path(&graph, s, d)?;
            out.push((dir, path.into_iter().map(|(x, y)| (x0 + x, y0 + y)).collect()));
        }
    }
    Ok(out)
}

/// Per-direction statistics of the shortest-path intensity means.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DirectionStats {
    pub kurtosis: f64,
    pub skewness: f64,
    pub sd: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q100: f64,
}

impl DirectionStats {
    pub fn as_array(&self) -> [f64; 7] {
        [self.kurtosis, self.skewness, self.sd, self.q25, self.q50, self.q75, self.q100]
    }
}

/// The 28 GSP features: directions ordered 0, 45, 90, 135 with seven
/// statistics each.
pub fn gsp_features(img: &GrayImage, cfg: &GspConfig) -> Result<[DirectionStats; 4]> {
    if cfg.t_e == 0 {
        return Err(CadError::invalid("t_e must be >= 1"));
    }
    let (gx, gy) = cfg.grid;
    if gx * gy < 2 {
        return Err(CadError::invalid("block grid must produce at least 2 blocks"));
    }
    if img.width() < 2 * gx.max(1) || img.height() < 2 * gy.max(1) {
        return Err(CadError::TooSmall(format!(
            "image {}x{} too small for a {}x{} block grid",
            img.width(),
            img.height(),
            gx,
            gy
        )));
    }

    let mut means = [const { Vec::new() }; 4];
    for rect in block_rects(img.width(), img.height(), cfg.grid) {
        let block = extract_block(img, rect);
        let graph = build_block_graph(&block, cfg.t_e)?;
        for (slot, &dir) in means.iter_mut().zip(&DIRECTIONS) {
            let (s, d) = endpoints(dir, block.width(), block.height());
            let path = shortest_path(&graph, s, d)?;
            let mean =
                path.iter().map(|&(x, y)| graph.intensity(x, y)).sum::<f64>() / path.len() as f64;
            slot.push(mean);
        }
    }

    let mut out = [DirectionStats::default(); 4];
    for (stats_out, v) in out.iter_mut().zip(&means) {
        *stats_out = DirectionStats {
            kurtosis: stats::kurtosis(v),
            skewness: stats::skewness(v),
            sd: stats::std_dev(v),
            q25: stats::quantile(v, 0.25),
            q50: stats::quantile(v, 0.50),
            q75: stats::quantile(v, 0.75),
            q100: stats::quantile(v, 1.0),
        };
    }
    Ok(out)
}
