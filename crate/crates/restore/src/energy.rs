//! Restoration energy and solver dispatch.

use essp_core::recipe::{trace_recipe, Recipe, RecipeOpts, RunTrace};
use essp_core::synth::{measure_factors, Factors};
use essp_core::{Labeling, Qpbf};

use crate::error::{RestoreError, Result};
use crate::pbm::Raster;
use crate::prior::PriorModel;

/// Pairwise weight that puts the prior on the same scale as the data term:
/// `2·N / |retained pairs|`.
pub fn default_beta(prior: &PriorModel) -> f64 {
    2.0 * prior.num_pixels() as f64 / prior.pairs.len().max(1) as f64
}

fn check_dims(prior: &PriorModel, y: &Raster) -> Result<()> {
    if y.dims() != (prior.width, prior.height) {
        return Err(RestoreError::Dimension { expected: (prior.width, prior.height), got: y.dims() });
    }
    Ok(())
}

/// `E(x) = α Σ_u −1/(1+|Y_u − x_u|) − β Σ_uv f_uv(x_u, x_v)`, one variable
/// per pixel with `1` for ink.
pub fn build_restoration_energy(prior: &PriorModel, y: &Raster, alpha: f64, beta: f64) -> Result<Qpbf> {
    check_dims(prior, y)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(RestoreError::Param(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(RestoreError::Param(format!("beta must be nonnegative, got {beta}")));
    }
    let mut f = Qpbf::new(prior.num_pixels());
    for (u, &ink) in y.pixels.iter().enumerate() {
        let yu = ink as u8 as f64;
        f.add_unary(u, [0.0, 1.0].map(|x: f64| -alpha / (1.0 + (yu - x).abs())))?;
    }
    if beta > 0.0 {
        for p in &prior.pairs {
            f.add_pairwise(p.u, p.v, p.freq.map(|q| -beta * q))?;
        }
    }
    Ok(f)
}

/// Sum of the per-term minima, a lower bound on `min f`.
pub fn lower_bound(f: &Qpbf) -> f64 {
    let unary: f64 = (0..f.num_vars()).map(|u| f.unary(u).into_iter().fold(f64::INFINITY, f64::min)).sum();
    let pairs: f64 = f.pairs().map(|(_, t)| t.into_iter().fold(f64::INFINITY, f64::min)).sum();
    f.constant() + unary + pairs
}

pub fn raster_to_labeling(r: &Raster) -> Labeling {
    Labeling::from_bits(&r.pixels)
}

pub fn labeling_to_raster(x: &Labeling, width: usize, height: usize) -> Result<Raster> {
    Raster::new(width, height, x.bits()?)
}

#[derive(Clone, Debug)]
pub struct RestoreParams {
    pub alpha: f64,
    /// `None` uses [`default_beta`].
    pub beta: Option<f64>,
    pub solver: String,
    pub opts: RecipeOpts,
}

impl Default for RestoreParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: None, solver: "essp".into(), opts: RecipeOpts::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Restoration {
    pub raster: Raster,
    pub energy: f64,
    pub lower_bound: f64,
    /// Energy of the noisy image itself.
    pub noisy_energy: f64,
    pub beta: f64,
    pub factors: Factors,
    pub trace: RunTrace,
}

/// Builds the energy for `y` and minimizes it with the named recipe.
/// Recipes named without an initializer (`essp`, `icm`, `qpbo-i`) start
/// from the noisy image.
pub fn restore(prior: &PriorModel, y: &Raster, params: &RestoreParams) -> Result<Restoration> {
    let recipe: Recipe = params.solver.parse()?;
    let beta = params.beta.unwrap_or_else(|| default_beta(prior));
    let f = build_restoration_energy(prior, y, params.alpha, beta)?;
    let noisy = raster_to_labeling(y);
    let init = (!params.solver.contains('+')).then_some(&noisy);
    let trace = trace_recipe(&f, &recipe, &params.opts, "restore", init)?;
    let x = Labeling::parse(&trace.labeling)?;
    Ok(Restoration {
        raster: labeling_to_raster(&x, y.width, y.height)?,
        energy: trace.final_energy,
        lower_bound: lower_bound(&f),
        noisy_energy: f.evaluate(&noisy)?,
        beta,
        factors: measure_factors(&f),
        trace,
    })
}
