//! Finite-radius density estimates of a point set read from CSV or
//! generated as a lattice.

use pslab_core::geometry::{density_trend, separation_stat, PhasePointSet};

use super::{Failure, Outcome};
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, _seed: u64) -> Outcome {
    let p = cfg.section("density");
    let window = p.positive("window", 32.0)?;
    let radii = p.list("radii", &[4.0, 8.0, 16.0])?;
    let file = p.string("points");
    let lattice = if p.has("lattice") { Some(p.list("lattice", &[])?) } else { None };
    cfg.finish()?;

    let set = match (file, lattice) {
        (Some(f), None) => {
            let path = cfg.resolve(&f);
            if !path.is_file() {
                return Err(Failure::Usage(format!("points file {} not found", path.display())));
            }
            PhasePointSet::load_csv(&path, window).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(l)) if l.len() == 2 => PhasePointSet::lattice(1, l[0], l[1], window)?,
        (None, Some(_)) => return Err(Failure::Usage("`lattice` takes two spacings: alpha, beta".into())),
        _ => return Err(Failure::Usage("[density] needs exactly one of `points` or `lattice`".into())),
    };

    let mut t = Table::new("density.csv", &["radius", "upper", "lower", "interior_margin"]);
    for d in density_trend(&set, &radii)? {
        t.push(vec![d.radius.into(), d.upper.into(), d.lower.into(), d.interior_margin.into()]);
    }
    let mut s = Table::new("density_summary.csv", &["points", "window", "separation"]);
    s.push(vec![set.len().into(), window.into(), separation_stat(&set).into()]);
    Ok(vec![t, s])
}
