//! Training sets of equally sized binary images.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{RestoreError, Result};
use crate::pbm::{read_pbm, write_pbm, Raster};

/// Largest image the dense prior is built for.
pub const MAX_PIXELS: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct GlyphSet {
    pub width: usize,
    pub height: usize,
    pub images: Vec<Raster>,
}

impl GlyphSet {
    pub fn new(images: Vec<Raster>) -> Result<Self> {
        let (width, height) = images.first().map(Raster::dims).unwrap_or((0, 0));
        if width * height > MAX_PIXELS {
            return Err(RestoreError::TooLarge { width, height, max: MAX_PIXELS });
        }
        for img in &images {
            if img.dims() != (width, height) {
                return Err(RestoreError::Dimension { expected: (width, height), got: img.dims() });
            }
        }
        Ok(Self { width, height, images })
    }

    pub fn num_pixels(&self) -> usize {
        self.width * self.height
    }

    /// Every `*.pbm` file in `dir`, in file name order.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| RestoreError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "pbm"))
            .collect();
        paths.sort();
        let images = paths
            .iter()
            .map(|p| read_pbm(&fs::read_to_string(p).map_err(|e| RestoreError::io(p, e))?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    /// Writes `glyph-NNN.pbm` files into `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| RestoreError::io(dir, e))?;
        self.images
            .iter()
            .enumerate()
            .map(|(i, img)| {
                let path = dir.join(format!("glyph-{i:03}.pbm"));
                fs::write(&path, write_pbm(img)).map_err(|e| RestoreError::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}

const BASE_GLYPH: [&str; 16] = [
    "................",
    "................",
    "...##########...",
    "...##########...",
    ".......##.......",
    ".......##.......",
    "..############..",
    "..############..",
    ".......##.......",
    "...##..##..##...",
    "...##..##..##...",
    "...##########...",
    "...##########...",
    "................",
    "................",
    "................",
];

/// The 16x16 reference glyph.
pub fn base_glyph() -> Raster {
    let pixels = BASE_GLYPH.iter().flat_map(|row| row.chars().map(|c| c == '#')).collect();
    Raster::new(16, 16, pixels).expect("16x16 glyph")
}

/// Ink pixels with a background 4-neighbour, and background pixels with an
/// ink one.
fn on_boundary(r: &Raster, x: usize, y: usize) -> bool {
    let p = r.get(x, y);
    let mut differs = false;
    if x > 0 {
        differs |= r.get(x - 1, y) != p;
    }
    if x + 1 < r.width {
        differs |= r.get(x + 1, y) != p;
    }
    if y > 0 {
        differs |= r.get(x, y - 1) != p;
    }
    if y + 1 < r.height {
        differs |= r.get(x, y + 1) != p;
    }
    differs
}

/// `copies` perturbed versions of `glyph`: each is shifted by at most one
/// pixel in each direction and has about 10% of its stroke boundary flipped.
pub fn perturbed_copies(glyph: &Raster, copies: usize, seed: u64) -> Vec<Raster> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..copies)
        .map(|_| {
            let dx: i64 = rng.random_range(-1..=1);
            let dy: i64 = rng.random_range(-1..=1);
            let mut out = Raster::blank(glyph.width, glyph.height);
            for y in 0..glyph.height {
                for x in 0..glyph.width {
                    let (sx, sy) = (x as i64 - dx, y as i64 - dy);
                    if sx >= 0 && sy >= 0 && (sx as usize) < glyph.width && (sy as usize) < glyph.height {
                        out.set(x, y, glyph.get(sx as usize, sy as usize));
                    }
                }
            }
            let shifted = out.clone();
            for y in 0..glyph.height {
                for x in 0..glyph.width {
                    if on_boundary(&shifted, x, y) && rng.random_bool(0.1) {
                        out.set(x, y, !shifted.get(x, y));
                    }
                }
            }
            out
        })
        .collect()
}

/// Training set of perturbed copies of [`base_glyph`].
pub fn synthetic_glyphs(copies: usize, seed: u64) -> GlyphSet {
    GlyphSet::new(perturbed_copies(&base_glyph(), copies, seed)).expect("copies share dimensions")
}

/// Flips every pixel independently with probability `p`.
pub fn add_noise(r: &Raster, p: f64, seed: u64) -> Result<Raster> {
    if !(0.0..=1.0).contains(&p) {
        return Err(RestoreError::Param(format!("flip probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = r.pixels.iter().map(|&b| b ^ rng.random_bool(p)).collect();
    Raster::new(r.width, r.height, pixels)
}
