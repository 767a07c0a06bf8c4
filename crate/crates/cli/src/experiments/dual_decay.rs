//! Off-diagonal decay of a Gramian and of its inverse, for a configured
//! system and optionally for a synthetic power-law Gramian.

use pslab_core::corpus::{corpus, lattice_centers, Recipe};
use pslab_core::frames::{dual_localization_check, inverse_gram, localization_fit, DecayFit};
use pslab_core::linalg::CMatrix;
use pslab_core::C64;

use super::Outcome;
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, seed: u64) -> Outcome {
    let grid = cfg.section("grid").grid(512, 1.0 / 16.0)?;
    let p = cfg.section("dual-decay");
    let recipe = p.recipe(Recipe::JitteredGabor {
        alpha: std::f64::consts::SQRT_2,
        beta: std::f64::consts::SQRT_2,
        jitter: 0.1,
        extent: 10.0,
    })?;
    let threshold = p.f64("s_threshold", 2.0)?;
    let synthetic = p.f64_opt("synthetic_exponent")?;
    let synthetic_extent = p.positive("synthetic_extent", 10.0)?;
    cfg.finish()?;

    let mut fits = Table::new(
        "dual_decay.csv",
        &[
            "case",
            "primal_exponent",
            "primal_constant",
            "primal_r_squared",
            "dual_exponent",
            "dual_constant",
            "dual_r_squared",
        ],
    );
    let mut bins = Table::new("dual_decay_bins.csv", &["case", "matrix", "distance", "max_modulus"]);
    let mut record = |case: &str, primal: &DecayFit, dual: &DecayFit| {
        fits.push(vec![
            case.into(),
            primal.exponent.into(),
            primal.constant.into(),
            primal.r_squared.into(),
            dual.exponent.into(),
            dual.constant.into(),
            dual.r_squared.into(),
        ]);
        for (which, fit) in [("primal", primal), ("dual", dual)] {
            for &(d, m) in &fit.bins {
                bins.push(vec![case.into(), which.into(), d.into(), m.into()]);
            }
        }
    };

    let sys = corpus(&recipe, &grid, seed)?;
    let (primal, dual) = dual_localization_check(&sys, threshold)?;
    record(recipe.name(), &primal, &dual);

    if let Some(s) = synthetic {
        let centers = lattice_centers(1.0, 1.0, synthetic_extent)?;
        let g = CMatrix::from_fn(centers.len(), centers.len(), |m, n| {
            C64::new((1.0 + centers[m].distance(&centers[n])).powf(-s), 0.0)
        });
        let primal = localization_fit(&g, &centers, None)?;
        let dual = localization_fit(&inverse_gram(&g)?, &centers, None)?;
        record("synthetic", &primal, &dual);
    }
    Ok(vec![fits, bins])
}
