//! Localization functionals: power moments and their optimal centers,
//! weighted `L²_s` norms, modulation norms `M²_s`, amalgam norms and the
//! sampled weighted sums that the sampling inequality controls.
//!
//! Distances are true (non-wrapped) Euclidean distances on the centered box.
//! A function whose mass reaches the box boundary gets a tail warning instead
//! of a silently capped moment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::PhasePointSet;
use crate::grid::{fourier_transform, gaussian_window, GridSpec, PhasePoint, SampledFunction};
use crate::stft::{stft, StftField};

/// Mass fraction beyond `|x| > L/4` that triggers a tail warning.
pub const TAIL_WARNING_LEVEL: f64 = 1e-6;

const REFINE_TOL: f64 = 1e-4;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Time,
    Frequency,
}

/// Precomputed `|f|²` weights with their coordinates, so repeated moment
/// evaluations during the center search cost one pass each.
struct MassProfile {
    dim: usize,
    coords: Vec<[f64; 2]>,
    mass: Vec<f64>,
    spacing: f64,
    measure: f64,
}

impl MassProfile {
    fn new(f: &SampledFunction, side: Side) -> Self {
        let owned;
        let h = match side {
            Side::Time => f,
            Side::Frequency => {
                owned = fourier_transform(f);
                &owned
            }
        };
        let grid = h.grid();
        let mut coords = Vec::new();
        let mut mass = Vec::new();
        for (i, v) in h.values().iter().enumerate() {
            let m = v.norm_sqr();
            if m > 0.0 {
                coords.push(grid.point(i));
                mass.push(m);
            }
        }
        Self {
            dim: grid.dim(),
            coords,
            mass,
            spacing: grid.spacing(),
            measure: grid.cell_measure(),
        }
    }

    fn moment(&self, center: &[f64], s: f64) -> f64 {
        let c = [center[0], if self.dim == 2 { center[1] } else { 0.0 }];
        let sum: f64 = self
            .coords
            .iter()
            .zip(&self.mass)
            .map(|(x, m)| {
                let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                if s == 1.0 {
                    m * r2
                } else {
                    m * r2.powf(s)
                }
            })
            .sum();
        self.measure * sum
    }

    fn centroid(&self) -> Vec<f64> {
        let total: f64 = self.mass.iter().sum();
        (0..self.dim)
            .map(|axis| {
                self.coords
                    .iter()
                    .zip(&self.mass)
                    .map(|(x, m)| x[axis] * m)
                    .sum::<f64>()
                    / total
            })
            .collect()
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(invalid("s", format!("must be finite and nonnegative, got {s}")));
    }
    Ok(())
}

/// `∫|x−c|^{2s}|f(x)|²dx` (time side) or `∫|ξ−c|^{2s}|f̂(ξ)|²dξ` (frequency side).
pub fn moment(f: &SampledFunction, center: &[f64], s: f64, side: Side) -> Result<f64> {
    check_s(s)?;
    if center.len() != f.grid().dim() || center.iter().any(|c| !c.is_finite()) {
        return Err(invalid("center", "must be finite with one entry per axis"));
    }
    Ok(MassProfile::new(f, side).moment(center, s))
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
fn golden_section(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Center `a*` minimizing the `s`-moment, with the minimal value.
///
/// A coarse scan over grid positions (seeded with the centroid) is refined
/// by golden section in one dimension and by coordinate descent in two,
/// down to `1e-4` of the grid spacing.
pub fn optimal_center(f: &SampledFunction, s: f64, side: Side) -> Result<(Vec<f64>, f64)> {
    check_s(s)?;
    if s == 0.0 {
        return Err(invalid("s", "the center search needs s > 0"));
    }
    let profile = MassProfile::new(f, side);
    if profile.mass.is_empty() {
        return Err(Error::ZeroNorm);
    }
    let h = profile.spacing;
    let tol = REFINE_TOL * h;

    // Coarse scan restricted to the support's bounding box; at most 256 probes per axis.
    let dim = profile.dim;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for x in &profile.coords {
        for axis in 0..dim {
            lo[axis] = lo[axis].min(x[axis]);
            hi[axis] = hi[axis].max(x[axis]);
        }
    }
    let mut best = profile.centroid();
    let mut best_val = profile.moment(&best, s);
    let steps: Vec<usize> = (0..dim)
        .map(|axis| ((((hi[axis] - lo[axis]) / h).round() as usize) / 256).max(1))
        .collect();
    let count = |axis: usize| ((hi[axis] - lo[axis]) / h).round() as usize / steps[axis] + 1;
    let mut probe = vec![0.0; dim];
    if dim == 1 {
        for i in 0..count(0) {
            probe[0] = lo[0] + (i * steps[0]) as f64 * h;
            let v = profile.moment(&probe, s);
            if v < best_val {
                best_val = v;
                best.clone_from(&probe);
            }
        }
    } else {
        for i in 0..count(0) {
            for j in 0..count(1) {
                probe[0] = lo[0] + (i * steps[0]) as f64 * h;
                probe[1] = lo[1] + (j * steps[1]) as f64 * h;
                let v = profile.moment(&probe, s);
                if v < best_val {
                    best_val = v;
                    best.clone_from(&probe);
                }
            }
        }
    }

    let bracket: Vec<f64> = steps.iter().map(|&k| (k + 1) as f64 * h).collect();
    for _sweep in 0..60 {
        let previous = best.clone();
        for axis in 0..dim {
            let mut trial = best.clone();
            let (x, v) = golden_section(best[axis] - bracket[axis], best[axis] + bracket[axis], tol, |t| {
                trial[axis] = t;
                profile.moment(&trial, s)
            });
            if v <= best_val {
                best[axis] = x;
                best_val = v;
            }
        }
        let moved = best
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if dim == 1 || moved < tol {
            break;
        }
    }
    Ok((best, best_val))
}

/// Time and frequency moments at their optimal centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub s: f64,
    pub time_moment: f64,
    pub freq_moment: f64,
    pub center: PhasePoint,
    pub total: f64,
    pub tail_warning: bool,
}

impl LocalizationReport {
    /// Flat JSON record; centers are scalars in one dimension, arrays in two.
    pub fn to_json(&self) -> serde_json::Value {
        let coord = |v: &[f64]| {
            if v.len() == 1 {
                serde_json::json!(v[0])
            } else {
                serde_json::json!(v)
            }
        };
        serde_json::json!({
            "s": self.s,
            "time_moment": self.time_moment,
            "freq_moment": self.freq_moment,
            "center_a": coord(&self.center.a),
            "center_b": coord(&self.center.b),
            "total": self.total,
            "tail_warning": self.tail_warning,
        })
    }
}

pub fn localization_report(f: &SampledFunction, s: f64) -> Result<LocalizationReport> {
    let (a, time_moment) = optimal_center(f, s, Side::Time)?;
    let (b, freq_moment) = optimal_center(f, s, Side::Frequency)?;
    let tail_warning = f.tail_fraction() > TAIL_WARNING_LEVEL
        || fourier_transform(f).tail_fraction() > TAIL_WARNING_LEVEL;
    if tail_warning {
        log::warn!("localization report: mass reaches the box boundary; moments may be truncated");
    }
    Ok(LocalizationReport {
        s,
        time_moment,
        freq_moment,
        center: PhasePoint { a, b },
        total: time_moment + freq_moment,
        tail_warning,
    })
}

/// `(∫|f(x)|²(1+|x|)^{2s}dx)^{1/2}`.
pub fn weighted_l2_norm(f: &SampledFunction, s: f64) -> Result<f64> {
    check_s(s)?;
    let grid = f.grid();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm_sqr() * (1.0 + grid.radius(i)).powf(2.0 * s))
        .sum();
    Ok((grid.cell_measure() * sum).sqrt())
}

/// `‖V_g f‖_{L²_s}` with the unit Gaussian window and weight `(1+|(x,ξ)|)^{2s}`.
pub fn modulation_norm(f: &SampledFunction, s: f64) -> Result<f64> {
    check_s(s)?;
    let g = gaussian_window(f.grid());
    Ok(stft(f, &g)?.weighted_norm(s))
}

/// Integer box index `floor(x)` per axis for each sample of a grid.
fn box_indices(grid: &GridSpec) -> Vec<[i64; 2]> {
    (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            [p[0].floor() as i64, p[1].floor() as i64]
        })
        .collect()
}

fn euclid(v: &[i64]) -> f64 {
    v.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt()
}

/// Per-box maxima of `|F|²` over the unit boxes `(k, n) + [0,1)^{2d}`.
pub fn box_maxima(field: &StftField) -> Result<BTreeMap<Vec<i64>, f64>> {
    let grid = *field.grid();
    let dual = grid.dual();
    if grid.spacing() > 0.5 || dual.spacing() > 0.5 {
        return Err(invalid(
            "field",
            format!(
                "grid (Δx = {}, Δξ = {}) is too coarse to resolve unit boxes",
                grid.spacing(),
                dual.spacing()
            ),
        ));
    }
    let d = grid.dim();
    let tbox = box_indices(&grid);
    let fbox = box_indices(&dual);
    let n = grid.len();
    let mut maxima: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for (t, row) in field.values().chunks(n).enumerate() {
        // Reduce each time row per frequency box first; far fewer map lookups.
        let mut row_max: BTreeMap<[i64; 2], f64> = BTreeMap::new();
        for (k, v) in row.iter().enumerate() {
            let m = v.norm_sqr();
            let e = row_max.entry(fbox[k]).or_insert(0.0);
            if m > *e {
                *e = m;
            }
        }
        for (fb, m) in row_max {
            let key: Vec<i64> = tbox[t][..d].iter().chain(&fb[..d]).copied().collect();
            let e = maxima.entry(key).or_insert(0.0);
            if m > *e {
                *e = m;
            }
        }
    }
    Ok(maxima)
}

/// `(Σ_{k,n} sup_{(k,n)+[0,1)^{2d}} |F|² (1+|k|+|n|)^{2s})^{1/2}`.
pub fn amalgam_norm(field: &StftField, s: f64) -> Result<f64> {
    check_s(s)?;
    let d = field.grid().dim();
    let maxima = box_maxima(field)?;
    let sum: f64 = maxima
        .iter()
        .map(|(key, m)| m * (1.0 + euclid(&key[..d]) + euclid(&key[d..])).powf(2.0 * s))
        .sum();
    Ok(sum.sqrt())
}

fn nearest_index(grid: &GridSpec, x: f64) -> Option<usize> {
    let half = grid.length() / 2.0;
    if x < -half - 0.5 * grid.spacing() || x >= half - 0.5 * grid.spacing() {
        return None;
    }
    let i = (x / grid.spacing()).round() as i64 + (grid.n_points() / 2) as i64;
    (0..grid.n_points() as i64).contains(&i).then_some(i as usize)
}

/// `(Σ_n |F(z+λ_n)|²(1+|z+λ_n|)^{2s})^{1/2}` with nearest-sample evaluation.
pub fn sampled_weighted_sum(field: &StftField, points: &PhasePointSet, z: &[f64], s: f64) -> Result<f64> {
    check_s(s)?;
    let grid = *field.grid();
    let dual = grid.dual();
    let d = grid.dim();
    if points.dim() != d || z.len() != 2 * d {
        return Err(invalid("z", "point set and shift must match the field dimension"));
    }
    let mut sum = 0.0;
    for (idx, p) in points.points().iter().enumerate() {
        let c: Vec<f64> = p.coords().iter().zip(z).map(|(x, y)| x + y).collect();
        let mut t = [0usize; 2];
        let mut k = [0usize; 2];
        for axis in 0..d {
            t[axis] = nearest_index(&grid, c[axis]).ok_or(Error::OutOfDomain {
                index: idx,
                what: "phase-space grid",
            })?;
            k[axis] = nearest_index(&dual, c[d + axis]).ok_or(Error::OutOfDomain {
                index: idx,
                what: "phase-space grid",
            })?;
        }
        let v = field.get(grid.flat_index(t), dual.flat_index(k));
        let r = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        sum += v.norm_sqr() * (1.0 + r).powf(2.0 * s);
    }
    Ok(sum.sqrt())
}
