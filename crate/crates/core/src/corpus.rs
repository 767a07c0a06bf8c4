//! Deterministic test systems and function corpora.
//!
//! Every random choice goes through a `ChaCha8Rng` seeded by the caller, so
//! the same recipe, grid and seed always produce the same samples.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frames::FunctionSystem;
use crate::grid::{
    gaussian_window, hermite_functions, inverse_fourier_transform, tf_shift, GridSpec, PhasePoint,
    SampledFunction, C64,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "recipe", rename_all = "kebab-case")]
pub enum Recipe {
    /// First `count` Hermite functions, all centered at the origin.
    HermiteOnb { count: usize },
    /// `π(a,b)g` for `(a,b) ∈ αℤ × βℤ` with `|a|, |b| ≤ extent/2`.
    GaborGaussian { alpha: f64, beta: f64, extent: f64 },
    /// The Gabor lattice with each center moved by up to `jitter` per
    /// coordinate (time jitter snapped to the grid).
    JitteredGabor {
        alpha: f64,
        beta: f64,
        jitter: f64,
        extent: f64,
    },
    /// Even and odd normalized combinations of Gaussians at `±separation/2`.
    TwoBump { separation: f64 },
}

impl Recipe {
    pub fn name(&self) -> &'static str {
        match self {
            Recipe::HermiteOnb { .. } => "hermite-onb",
            Recipe::GaborGaussian { .. } => "gabor-gaussian",
            Recipe::JitteredGabor { .. } => "jittered-gabor",
            Recipe::TwoBump { .. } => "two-bump",
        }
    }

    pub const NAMES: [&'static str; 4] = ["hermite-onb", "gabor-gaussian", "jittered-gabor", "two-bump"];
}

/// Lattice points `(αk, βl)` with `|αk|, |βl| ≤ extent/2` (closed, symmetric).
pub fn lattice_centers(alpha: f64, beta: f64, extent: f64) -> Result<Vec<PhasePoint>> {
    if !(alpha > 0.0 && beta > 0.0 && extent >= 0.0 && extent.is_finite()) {
        return Err(invalid("lattice", "spacings must be positive and the extent finite"));
    }
    let half = extent / 2.0;
    let axis = |step: f64| -> Vec<f64> {
        let k = ((half / step) + 1e-9).floor() as i64;
        (-k..=k).map(|i| i as f64 * step).collect()
    };
    let (ta, fb) = (axis(alpha), axis(beta));
    Ok(ta
        .iter()
        .flat_map(|&a| fb.iter().map(move |&b| PhasePoint::d1(a, b)))
        .collect())
}

/// `{π(c)g}` for the unit Gaussian `g`; time centers must be on the grid.
pub fn gabor_system(grid: &GridSpec, centers: Vec<PhasePoint>, label: impl Into<String>) -> Result<FunctionSystem> {
    let g = gaussian_window(grid);
    let members = centers.iter().map(|c| tf_shift(&g, c)).collect::<Result<Vec<_>>>()?;
    FunctionSystem::new(label, members, centers)
}

pub fn corpus(recipe: &Recipe, grid: &GridSpec, seed: u64) -> Result<FunctionSystem> {
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            dim: grid.dim(),
            reason: "corpus recipes build one-dimensional systems",
        });
    }
    match *recipe {
        Recipe::HermiteOnb { count } => {
            if count == 0 {
                return Err(invalid("count", "need at least one member"));
            }
            let hs = hermite_functions(grid, count)?;
            FunctionSystem::new(format!("hermite-onb(M={count})"), hs, vec![PhasePoint::origin(1); count])
        }
        Recipe::GaborGaussian { alpha, beta, extent } => {
            let centers = lattice_centers(alpha, beta, extent)?;
            gabor_system(grid, centers, format!("gabor-gaussian(alpha={alpha}, beta={beta}, T={extent})"))
        }
        Recipe::JitteredGabor {
            alpha,
            beta,
            jitter,
            extent,
        } => {
            if !(jitter >= 0.0 && jitter.is_finite()) {
                return Err(invalid("jitter", "must be finite and nonnegative"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let centers: Vec<PhasePoint> = lattice_centers(alpha, beta, extent)?
                .into_iter()
                .map(|c| {
                    let (da, db) = if jitter > 0.0 {
                        (rng.random_range(-jitter..=jitter), rng.random_range(-jitter..=jitter))
                    } else {
                        (0.0, 0.0)
                    };
                    PhasePoint::d1(grid.snap(c.a[0] + da), c.b[0] + db)
                })
                .collect();
            gabor_system(
                grid,
                centers,
                format!("jittered-gabor(alpha={alpha}, beta={beta}, jitter={jitter}, T={extent}, seed={seed})"),
            )
        }
        Recipe::TwoBump { separation } => {
            let shift = grid.snap(separation / 2.0);
            let g = gaussian_window(grid);
            let right = tf_shift(&g, &PhasePoint::d1(shift, 0.0))?;
            let left = tf_shift(&g, &PhasePoint::d1(-shift, 0.0))?;
            let even = right.add(&left)?.normalized()?;
            let odd = right.sub(&left)?.normalized()?;
            FunctionSystem::new(
                format!("two-bump(separation={separation})"),
                vec![even, odd],
                vec![PhasePoint::origin(1); 2],
            )
        }
    }
}

/// Random coefficients on `|ξ| < band`, zero outside, transformed back.
pub fn random_band_limited(grid: &GridSpec, band: f64, rng: &mut impl Rng) -> SampledFunction {
    let dual = grid.dual();
    let mut fhat = SampledFunction::zeros(dual);
    for (i, v) in fhat.values_mut().iter_mut().enumerate() {
        if dual.radius(i) < band {
            *v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    inverse_fourier_transform(&fhat)
}

/// Random complex combination of `atoms` Gaussian time-frequency atoms
/// with centers in `[-2, 2]²` (time centers on the grid).
pub fn random_atoms(grid: &GridSpec, atoms: usize, rng: &mut impl Rng) -> Result<SampledFunction> {
    let g = gaussian_window(grid);
    let mut acc = SampledFunction::zeros(*grid);
    for _ in 0..atoms {
        let p = PhasePoint::d1(grid.snap(rng.random_range(-2.0..2.0)), rng.random_range(-2.0..2.0));
        let c = C64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
        acc = acc.combine(C64::new(1.0, 0.0), &tf_shift(&g, &p)?, c)?;
    }
    Ok(acc)
}

/// Twenty functions for property sweeps: the Gaussian, Hermite functions
/// `h₁..h₆`, three shifted Gaussians, five band-limited functions and five
/// atom sums, all unit norm.
pub fn test_corpus(grid: &GridSpec, seed: u64) -> Result<Vec<SampledFunction>> {
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension {
            dim: grid.dim(),
            reason: "the test corpus is one-dimensional",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_window(grid);
    let mut out = vec![g.clone()];
    out.extend(hermite_functions(grid, 7)?.into_iter().skip(1));
    for (a, b) in [(1.0, 0.5), (-2.0, 1.5), (0.5, -2.5)] {
        out.push(tf_shift(&g, &PhasePoint::d1(grid.snap(a), b))?);
    }
    for _ in 0..5 {
        out.push(random_band_limited(grid, 2.0, &mut rng).normalized()?);
    }
    for _ in 0..5 {
        out.push(random_atoms(grid, 4, &mut rng)?.normalized()?);
    }
    Ok(out)
}
