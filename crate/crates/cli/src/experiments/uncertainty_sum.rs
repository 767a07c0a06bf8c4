//! Per-member residuals of the commutation identity over a finite
//! biorthogonal pair, and the off-diagonal tail across a growing box.

use pslab_core::corpus::{corpus, Recipe};
use pslab_core::frames::{commutation_ledger, commutator_pair, dual_system};
use pslab_core::grid::gaussian_window;

use super::Outcome;
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, seed: u64) -> Outcome {
    let grid = cfg.section("grid").grid(256, 1.0 / 16.0)?;
    let p = cfg.section("uncertainty-sum");
    let recipe = p.recipe(Recipe::HermiteOnb { count: 64 })?;
    let interior = p.f64("interior_fraction", 0.25)?;
    let tail_radii = if p.has("tail_radii") { p.list("tail_radii", &[])? } else { Vec::new() };
    cfg.finish()?;

    let sys = corpus(&recipe, &grid, seed)?;
    let dual = dual_system(&sys)?;
    let ledger = commutation_ledger(&sys, &dual)?;

    let mut rows = Table::new(
        "ledger.csv",
        &["n", "a", "b", "sum_re", "sum_im", "residual", "truncation_defect"],
    );
    for n in 0..ledger.len() {
        let c = &sys.centers()[n];
        rows.push(vec![
            n.into(),
            c.a[0].into(),
            c.b[0].into(),
            ledger.per_n_sum[n].re.into(),
            ledger.per_n_sum[n].im.into(),
            ledger.per_n_identity_residual[n].into(),
            ledger.truncation_defect[n].into(),
        ]);
    }

    let limit = (interior * sys.len() as f64).floor() as usize;
    let inner = &ledger.per_n_identity_residual[..=limit.min(sys.len() - 1)];
    let g = gaussian_window(&grid);
    let pair = commutator_pair(&g, &g)?;
    let mut summary = Table::new(
        "ledger_summary.csv",
        &["members", "interior_limit", "interior_mean_residual", "edge_residual", "gaussian_pair_residual"],
    );
    summary.push(vec![
        sys.len().into(),
        limit.into(),
        (inner.iter().sum::<f64>() / inner.len() as f64).into(),
        ledger.per_n_identity_residual[sys.len() - 1].into(),
        (pair + 1.0).norm().into(),
    ]);
    let mut tables = vec![rows, summary];

    if !tail_radii.is_empty() {
        let mut tail = Table::new("tail.csv", &["radius", "inside", "tail", "tail_per_member"]);
        for &r in &tail_radii {
            let mask: Vec<bool> = sys
                .centers()
                .iter()
                .map(|c| c.a.iter().chain(&c.b).all(|x| x.abs() < r))
                .collect();
            let inside = mask.iter().filter(|m| **m).count();
            let value = ledger.offdiagonal_tail(|n, m| mask[n] && !mask[m]);
            let per = if inside > 0 { value / inside as f64 } else { 0.0 };
            tail.push(vec![r.into(), inside.into(), value.into(), per.into()]);
        }
        tables.push(tail);
    }
    Ok(tables)
}
