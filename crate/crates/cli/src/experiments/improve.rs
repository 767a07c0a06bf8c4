//! Localization-operator improvement of a system, and the error law
//! `‖φ − A_Rφ‖_{M²_σ} ~ (1+R)^{σ−s}` for a test function with known decay.

use pslab_core::corpus::{corpus, Recipe};
use pslab_core::frames::frame_bounds;
use pslab_core::grid::{gaussian_window, SampledFunction, C64};
use pslab_core::localization::modulation_norm;
use pslab_core::spectral::{improve_system, localization_operator};

use super::{linear_fit, Outcome};
use crate::config::Config;
use crate::output::{Cell, Table};

pub fn run(cfg: &Config, seed: u64) -> Outcome {
    let grid = cfg.section("grid").grid(512, 1.0 / 8.0)?;
    let p = cfg.section("improve");
    let recipe = p.recipe(Recipe::JitteredGabor {
        alpha: 1.5,
        beta: 1.5,
        jitter: 0.1,
        extent: 6.0,
    })?;
    let radii = p.list("radii", &[1.0, 2.0, 3.0])?;
    let sigma = p.f64("sigma", 1.0)?;
    let law_p = p.f64_opt("law_exponent")?;
    let law_sigma = p.f64("law_sigma", 1.0)?;
    let law_radii = p.list("law_radii", &[2.0, 3.0, 4.0, 5.0])?;
    cfg.finish()?;

    let window = gaussian_window(&grid);
    let sys = corpus(&recipe, &grid, seed)?;
    let before = frame_bounds(&sys);
    let norms_before: Vec<f64> = sys
        .members()
        .iter()
        .map(|f| modulation_norm(f, sigma))
        .collect::<Result<_, _>>()?;

    let mut members = Table::new(
        "improve_members.csv",
        &["radius", "member", "a", "b", "error", "norm_before", "norm_after"],
    );
    let mut bounds = Table::new("improve_bounds.csv", &["system", "radius", "lower", "upper", "rank"]);
    bounds.push(vec!["original".into(), Cell::Empty, before.lower.into(), before.upper.into(), before.rank.into()]);
    for &r in &radii {
        let imp = improve_system(&sys, r, sigma, &window)?;
        let after = frame_bounds(&imp.system);
        bounds.push(vec!["improved".into(), r.into(), after.lower.into(), after.upper.into(), after.rank.into()]);
        for (n, (h, c)) in imp.system.members().iter().zip(sys.centers()).enumerate() {
            members.push(vec![
                r.into(),
                n.into(),
                c.a[0].into(),
                c.b[0].into(),
                imp.errors[n].into(),
                norms_before[n].into(),
                modulation_norm(h, sigma)?.into(),
            ]);
        }
    }
    let mut tables = vec![members, bounds];

    if let Some(pw) = law_p {
        // (1+√(x²+¼))^{−p} decays like |x|^{−p}, so it lies in M²_s for s < p − ½
        let s = pw - 0.5;
        let phi = SampledFunction::from_fn(grid, |x| C64::new((1.0 + (x[0] * x[0] + 0.25).sqrt()).powf(-pw), 0.0))
            .normalized()?;
        let mut law = Table::new("error_law.csv", &["radius", "error"]);
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for &r in &law_radii {
            let e = modulation_norm(&phi.sub(&localization_operator(&phi, r, &window)?)?, law_sigma)?;
            law.push(vec![r.into(), e.into()]);
            lx.push((1.0 + r).ln());
            ly.push(e.ln());
        }
        let (slope, r2) = linear_fit(&lx, &ly);
        let mut fit = Table::new("error_law_fit.csv", &["s", "sigma", "target_slope", "slope", "r_squared"]);
        fit.push(vec![s.into(), law_sigma.into(), (law_sigma - s).into(), slope.into(), r2.into()]);
        tables.push(law);
        tables.push(fit);
    }
    Ok(tables)
}
