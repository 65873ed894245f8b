//! Binary image restoration with a dense pairwise prior.
//!
//! A [`PriorModel`] counts how often each pair of pixels takes each joint
//! labeling across a training set of glyphs. Restoring a noisy image
//! minimizes a data term that prefers the observed pixels plus `−β` times
//! the pair frequencies, which rewards co-labelings seen in training. The
//! resulting energy is dense and nonsubmodular and is handed to any solver
//! recipe from `essp-core`.

pub mod energy;
pub mod error;
pub mod glyph;
pub mod pbm;
pub mod prior;

pub use energy::{build_restoration_energy, default_beta, lower_bound, restore, Restoration, RestoreParams};
pub use error::{RestoreError, Result};
pub use glyph::{add_noise, base_glyph, synthetic_glyphs, GlyphSet};
pub use pbm::{read_pbm, write_pbm, Raster};
pub use prior::{train_prior, PriorModel, DEFAULT_TAU};
