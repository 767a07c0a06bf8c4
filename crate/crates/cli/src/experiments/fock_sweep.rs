//! Riesz bounds of normalized Fock kernels on square lattices, the drift of
//! the lower bound between windows, and a check against the Gabor Gramian.

use pslab_core::corpus::gabor_system;
use pslab_core::fock::{fock_gram, lattice_sweep, FockPointSet};
use pslab_core::frames::gramian;
use pslab_core::stft::kernel_center;

use super::{Failure, Outcome};
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, _seed: u64) -> Outcome {
    let grid = cfg.section("grid").grid(256, 1.0 / 16.0)?;
    let p = cfg.section("fock-sweep");
    let alphas = p.list("alphas", &[1.0, 1.2])?;
    let windows = p.list("windows", &[4.0, 8.0])?;
    let bridge_alpha = p.positive("bridge_alpha", 1.0)?;
    let bridge_window = p.positive("bridge_window", 3.0)?;
    cfg.finish()?;
    if windows.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Usage("`windows` must be strictly increasing".into()));
    }

    let mut sweep = Table::new(
        "fock_sweep.csv",
        &["alpha", "window", "points", "density", "lower", "upper", "condition"],
    );
    let mut lowers = vec![Vec::new(); alphas.len()];
    for &w in &windows {
        for (i, row) in lattice_sweep(&alphas, w)?.into_iter().enumerate() {
            let points = FockPointSet::square_lattice(row.alpha, w)?.len();
            sweep.push(vec![
                row.alpha.into(),
                w.into(),
                points.into(),
                row.density.into(),
                row.lower.into(),
                row.upper.into(),
                row.condition.into(),
            ]);
            lowers[i].push(row.lower);
        }
    }
    let mut drift = Table::new("fock_drift.csv", &["alpha", "first_window", "last_window", "lower_ratio"]);
    for (a, l) in alphas.iter().zip(&lowers) {
        drift.push(vec![
            (*a).into(),
            windows[0].into(),
            windows[windows.len() - 1].into(),
            (l[l.len() - 1] / l[0]).into(),
        ]);
    }

    // kernels at λ and Gaussian shifts at kernel_center(λ) share Gram moduli
    let set = FockPointSet::square_lattice(bridge_alpha, bridge_window)?;
    let fock = fock_gram(&set)?;
    let centers = set.points().iter().map(|&w| kernel_center(w)).collect();
    let gabor = gramian(&gabor_system(&grid, centers, "bridge")?);
    let (mut abs, mut rel) = (0.0f64, 0.0f64);
    for (x, y) in fock.matrix.iter().zip(gabor.iter()) {
        let d = (x.norm() - y.norm()).abs();
        abs = abs.max(d);
        if x.norm() > 1e-6 {
            rel = rel.max(d / x.norm());
        }
    }
    let mut bridge = Table::new(
        "fock_bridge.csv",
        &["alpha", "window", "points", "max_abs_deviation", "max_rel_deviation"],
    );
    bridge.push(vec![bridge_alpha.into(), bridge_window.into(), set.len().into(), abs.into(), rel.into()]);
    Ok(vec![sweep, drift, bridge])
}
