//! Pairwise co-occurrence prior over every unordered pixel pair.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{RestoreError, Result};
use crate::glyph::GlyphSet;

pub const DEFAULT_TAU: f64 = 0.1;

/// Floored frequencies of one pixel pair, indexed `[00, 01, 10, 11]` by
/// `(x_u, x_v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPrior {
    pub u: usize,
    pub v: usize,
    pub freq: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorModel {
    pub width: usize,
    pub height: usize,
    pub tau: f64,
    pub images: usize,
    /// Pairs with at least one frequency at or above `tau`, `u < v`.
    pub pairs: Vec<PairPrior>,
}

impl PriorModel {
    pub fn num_pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| RestoreError::io(path, e))?;
        Ok(serde_json::from_slice(&bytes)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec(self)?).map_err(|e| RestoreError::io(path, e))
    }
}

/// Fraction of training images showing each joint labeling of pixels `u`
/// and `v`, before flooring.
pub fn pair_frequencies(g: &GlyphSet, u: usize, v: usize) -> [f64; 4] {
    let mut counts = [0usize; 4];
    for img in &g.images {
        counts[(img.pixels[u] as usize) << 1 | img.pixels[v] as usize] += 1;
    }
    counts.map(|c| c as f64 / g.images.len() as f64)
}

/// Counts joint labelings of all pixel pairs. Frequencies below `tau` are
/// zeroed and pairs left with nothing are dropped.
pub fn train_prior(g: &GlyphSet, tau: f64) -> Result<PriorModel> {
    if g.images.len() < 2 {
        return Err(RestoreError::TooFewImages(g.images.len()));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(RestoreError::Param(format!("frequency floor {tau} outside [0, 1]")));
    }
    let n = g.num_pixels();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let freq = pair_frequencies(g, u, v).map(|f| if f < tau { 0.0 } else { f });
            if freq.iter().any(|&f| f > 0.0) {
                pairs.push(PairPrior { u, v, freq });
            }
        }
    }
    Ok(PriorModel { width: g.width, height: g.height, tau, images: g.images.len(), pairs })
}
