//! Orthonormalized Gaussian Gabor systems over growing windows: at critical
//! density the central member spreads out, below it nothing moves.

use pslab_core::corpus::{corpus, Recipe};
use pslab_core::frames::canonical_tight_member;
use pslab_core::localization::{optimal_center, Side};
use pslab_core::PhasePoint;

use super::Outcome;
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, _seed: u64) -> Outcome {
    // 1/46 keeps integer and half-integer shifts on the grid with room for T = 32
    let grid = cfg.section("grid").grid(2048, 1.0 / 46.0)?;
    let p = cfg.section("balian-low");
    let alpha = p.positive("alpha", 1.0)?;
    let control = p.positive("control_alpha", 0.5)?;
    let windows = p.list("windows", &[8.0, 16.0, 32.0])?;
    cfg.finish()?;

    let mut rows = Table::new(
        "balian_low.csv",
        &["role", "alpha", "window", "members", "member_norm", "freq_moment", "time_moment"],
    );
    let mut summary = Table::new(
        "balian_low_summary.csv",
        &["role", "alpha", "first_window", "last_window", "first_moment", "last_moment", "relative_change"],
    );
    for (role, a) in [("critical", alpha), ("control", control)] {
        let mut moments = Vec::new();
        for &t in &windows {
            let sys = corpus(&Recipe::GaborGaussian { alpha: a, beta: a, extent: t }, &grid, 0)?;
            let centre = sys.nearest_member(&PhasePoint::origin(1));
            let h = canonical_tight_member(&sys, centre)?;
            let norm = h.norm();
            let h = h.normalized()?;
            let (_, freq) = optimal_center(&h, 1.0, Side::Frequency)?;
            let (_, time) = optimal_center(&h, 1.0, Side::Time)?;
            log::info!("{role} alpha={a} T={t}: {} members, frequency moment {freq}", sys.len());
            rows.push(vec![role.into(), a.into(), t.into(), sys.len().into(), norm.into(), freq.into(), time.into()]);
            moments.push(freq);
        }
        let (first, last) = (moments[0], moments[moments.len() - 1]);
        summary.push(vec![
            role.into(),
            a.into(),
            windows[0].into(),
            windows[windows.len() - 1].into(),
            first.into(),
            last.into(),
            (last / first - 1.0).into(),
        ]);
    }
    Ok(vec![rows, summary])
}
