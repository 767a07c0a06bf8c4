//! Eigenvalue plunge of restriction operators and the prolate count N(R).

use pslab_core::spectral::{plunge_count, prolate_count, restriction_operator, RestrictionSpec};

use super::{Failure, Outcome};
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, _seed: u64) -> Outcome {
    let grid = cfg.section("grid").grid(2048, 1.0 / 32.0)?;
    let p = cfg.section("plunge-count");
    let pairs = p.pairs("pairs", &[(2.0, 2.0), (4.0, 2.0), (3.0, 3.0), (4.0, 4.0)])?;
    let radii = p.list("radii", &[3.0, 4.0, 6.0])?;
    let eps = p.f64("eps", 0.3)?;
    let delta = p.f64("delta", 0.5)?;
    cfg.finish()?;
    if grid.dim() != 1 {
        return Err(Failure::Usage("plunge-count runs on one-dimensional grids".into()));
    }

    let mut plunge = Table::new(
        "plunge.csv",
        &["rho_time", "rho_freq", "area", "count", "tolerance", "within"],
    );
    for &(rt, rf) in &pairs {
        let op = restriction_operator(&RestrictionSpec::centered(grid, rt, rf))?;
        let area = 4.0 * rt * rf;
        let count = plunge_count(&op)?;
        let tol = (0.05 * area).max(2.0);
        plunge.push(vec![
            rt.into(),
            rf.into(),
            area.into(),
            count.into(),
            tol.into(),
            ((count as f64 - area).abs() <= tol).into(),
        ]);
    }

    let mut prolate = Table::new("prolate_count.csv", &["radius", "rho", "count", "count_over_r2"]);
    for &r in &radii {
        let count = prolate_count(r, eps, delta, grid)?;
        prolate.push(vec![
            r.into(),
            (r - r.powf(delta)).into(),
            count.into(),
            (count as f64 / (r * r)).into(),
        ]);
    }
    Ok(vec![plunge, prolate])
}
