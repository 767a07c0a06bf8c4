//! Traces of time-frequency restriction operators against the area of the
//! two intervals, plus the eigenvalue sum as a second route to the trace.

use pslab_core::spectral::{restriction_operator, RestrictionSpec};

use super::Outcome;
use crate::config::Config;
use crate::output::Table;

pub fn run(cfg: &Config, _seed: u64) -> Outcome {
    let grid = cfg.section("grid").grid(1024, 1.0 / 32.0)?;
    let p = cfg.section("trace-check");
    let times = p.list("radii_time", &[1.0, 2.0, 4.0])?;
    let freqs = p.list("radii_freq", &[1.0, 3.0])?;
    let eigen = p.bool("eigen_sum", true)?;
    cfg.finish()?;

    let mut t = Table::new(
        "trace_check.csv",
        &["rho_time", "rho_freq", "trace", "area", "relative_error", "eigen_sum"],
    );
    for &rt in &times {
        for &rf in &freqs {
            let op = restriction_operator(&RestrictionSpec::centered(grid, rt, rf))?;
            // measure of the two balls; in 1D (2ρ_t)(2ρ_f)
            let area = ball_measure(grid.dim(), rt) * ball_measure(grid.dim(), rf);
            let trace = op.trace();
            let sum = if eigen {
                op.spectrum(grid.len())?.eigenvalues.iter().sum::<f64>().into()
            } else {
                crate::output::Cell::Empty
            };
            t.push(vec![rt.into(), rf.into(), trace.into(), area.into(), ((trace - area).abs() / area).into(), sum]);
        }
    }
    Ok(vec![t])
}

fn ball_measure(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0 * r,
        _ => std::f64::consts::PI * r * r,
    }
}
