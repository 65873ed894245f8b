//! Plain (P1) portable bitmaps. `1` is ink, `0` is background.

use std::fmt::Write;

use crate::error::{RestoreError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major, `true` for ink.
    pub pixels: Vec<bool>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(RestoreError::Pbm(format!("{} pixels for a {width}x{height} image", pixels.len())));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn blank(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![false; width * height] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, ink: bool) {
        self.pixels[y * self.width + x] = ink;
    }

    /// Pixels that differ from `other`.
    pub fn hamming(&self, other: &Raster) -> usize {
        self.pixels.iter().zip(&other.pixels).filter(|(a, b)| a != b).count()
    }

    /// Rows of `#` and `.` for terminal display.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity((self.width + 1) * self.height);
        for row in self.pixels.chunks(self.width.max(1)) {
            s.extend(row.iter().map(|&p| if p { '#' } else { '.' }));
            s.push('\n');
        }
        s
    }
}

/// Parses a P1 bitmap. Comments run from `#` to end of line; pixel digits
/// may or may not be separated by whitespace.
pub fn read_pbm(text: &str) -> Result<Raster> {
    let mut tokens = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        tokens.extend(line.split_whitespace());
    }
    let mut it = tokens.into_iter();
    if it.next() != Some("P1") {
        return Err(RestoreError::Pbm("missing P1 magic".into()));
    }
    let mut dim = |what: &str| -> Result<usize> {
        it.next()
            .ok_or_else(|| RestoreError::Pbm(format!("missing {what}")))?
            .parse()
            .map_err(|_| RestoreError::Pbm(format!("bad {what}")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    let mut pixels = Vec::with_capacity(width * height);
    for tok in it {
        for c in tok.chars() {
            match c {
                '0' => pixels.push(false),
                '1' => pixels.push(true),
                _ => return Err(RestoreError::Pbm(format!("unexpected character {c:?}"))),
            }
        }
    }
    if pixels.len() != width * height {
        return Err(RestoreError::Pbm(format!("expected {} pixels, found {}", width * height, pixels.len())));
    }
    Ok(Raster { width, height, pixels })
}

/// One image row per line, space separated, wrapped to stay under 70
/// characters per line.
pub fn write_pbm(r: &Raster) -> String {
    let mut s = format!("P1\n{} {}\n", r.width, r.height);
    for row in r.pixels.chunks(r.width.max(1)) {
        for (k, chunk) in row.chunks(35).enumerate() {
            if k > 0 {
                s.push('\n');
            }
            let line: Vec<&str> = chunk.iter().map(|&p| if p { "1" } else { "0" }).collect();
            write!(s, "{}", line.join(" ")).unwrap();
        }
        s.push('\n');
    }
    s
}
