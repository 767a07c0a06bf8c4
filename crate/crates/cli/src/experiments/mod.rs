//! The experiments behind `pslab <experiment>`. Each one reads its section of
//! the config, checks that nothing unknown is left over, computes, and hands
//! back tables; nothing touches the disk until every table is ready.

mod balian_low;
mod density;
mod dual_decay;
mod fock_sweep;
mod improve;
mod plunge_count;
mod trace_check;
mod uncertainty_sum;

use crate::config::{Config, ConfigError};
use crate::output::Table;

#[derive(Debug)]
pub enum Failure {
    /// Bad config or parameters rejected by a precondition (exit 2).
    Usage(String),
    /// A computation broke down (exit 1).
    Numeric(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<pslab_core::Error> for Failure {
    fn from(e: pslab_core::Error) -> Self {
        use pslab_core::Error::*;
        match e {
            InvalidGrid(_)
            | GridMismatch(_)
            | OffGrid { .. }
            | InvalidParameter { .. }
            | UnsupportedDimension { .. }
            | OutOfDomain { .. }
            | DuplicatePoint(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome = Result<Vec<Table>, Failure>;

pub struct Experiment {
    pub name: &'static str,
    pub run: fn(&Config, u64) -> Outcome,
}

pub const EXPERIMENTS: [Experiment; 8] = [
    Experiment { name: "balian-low", run: balian_low::run },
    Experiment { name: "trace-check", run: trace_check::run },
    Experiment { name: "plunge-count", run: plunge_count::run },
    Experiment { name: "density", run: density::run },
    Experiment { name: "improve", run: improve::run },
    Experiment { name: "dual-decay", run: dual_decay::run },
    Experiment { name: "uncertainty-sum", run: uncertainty_sum::run },
    Experiment { name: "fock-sweep", run: fock_sweep::run },
];

/// Least-squares slope and r² of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}
