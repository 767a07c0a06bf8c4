//! Finite point sets in phase space ℝ^{2d}: Beurling density estimates on a
//! bounded observation window and the exact relative-separation count.
//!
//! Cubes are half-open, `Q(x, r) = x + [-r, r)^{2d}`, so lattice counts are
//! unambiguous. The observation window is `Q(0, W)`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::PhasePoint;
use crate::io::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePointSet {
    dim: usize,
    points: Vec<PhasePoint>,
    window: f64,
}

impl PhasePointSet {
    /// Points must lie in the half-open window `[-W, W)^{2d}`; duplicates are allowed.
    pub fn new(dim: usize, points: Vec<PhasePoint>, window: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "point sets live in phase space of dimension 2 or 4",
            });
        }
        if !(window.is_finite() && window > 0.0) {
            return Err(invalid("window", format!("half-side must be positive, got {window}")));
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(invalid("points", format!("point {i} has dimension {}", p.dim())));
            }
            if p.coords().iter().any(|&c| !(c.is_finite() && (-window..window).contains(&c))) {
                return Err(Error::OutOfDomain {
                    index: i,
                    what: "observation window",
                });
            }
        }
        Ok(Self { dim, points, window })
    }

    pub fn empty(dim: usize, window: f64) -> Result<Self> {
        Self::new(dim, Vec::new(), window)
    }

    /// `(αℤ × βℤ)^d ∩ Q(0, W)` with time spacing `alpha` and frequency spacing `beta`.
    pub fn lattice(dim: usize, alpha: f64, beta: f64, window: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(invalid("lattice", "spacings must be positive"));
        }
        let axis = |step: f64| -> Vec<f64> {
            let lo = (-window / step).ceil() as i64;
            let hi = (window / step).ceil() as i64;
            (lo..hi).map(|k| k as f64 * step).filter(|x| *x < window).collect()
        };
        let ta = axis(alpha);
        let fb = axis(beta);
        let mut points = Vec::new();
        if dim == 1 {
            for &a in &ta {
                for &b in &fb {
                    points.push(PhasePoint::d1(a, b));
                }
            }
        } else {
            for &a0 in &ta {
                for &a1 in &ta {
                    for &b0 in &fb {
                        for &b1 in &fb {
                            points.push(PhasePoint {
                                a: vec![a0, a1],
                                b: vec![b0, b1],
                            });
                        }
                    }
                }
            }
        }
        Self::new(dim, points, window)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds a point; fails if it falls outside the window.
    pub fn push(&mut self, p: PhasePoint) -> Result<()> {
        let mut pts = std::mem::take(&mut self.points);
        pts.push(p);
        match Self::new(self.dim, pts, self.window) {
            Ok(s) => {
                *self = s;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    /// `tΛ` observed in `Q(0, tW)`.
    pub fn dilated(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid("t", "dilation factor must be positive"));
        }
        let points = self
            .points
            .iter()
            .map(|p| PhasePoint {
                a: p.a.iter().map(|x| x * t).collect(),
                b: p.b.iter().map(|x| x * t).collect(),
            })
            .collect();
        Self::new(self.dim, points, self.window * t)
    }

    /// Reads columns `a_1..a_d, b_1..b_d`; `#` lines are comments.
    pub fn load_csv(path: impl AsRef<Path>, window: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        let width = headers.len();
        if width != 2 && width != 4 {
            return Err(invalid("point csv", format!("expected 2 or 4 columns, found {width}")));
        }
        let dim = width / 2;
        let expected: Vec<String> = column_names(dim);
        if headers.iter().zip(&expected).any(|(h, e)| h != e) {
            return Err(invalid("point csv", format!("header must be {}", expected.join(","))));
        }
        let mut points = Vec::new();
        for record in reader.records() {
            let record = record?;
            let vals: Vec<f64> = record
                .iter()
                .map(|v| v.parse::<f64>().map_err(|e| invalid("point csv", format!("{v:?}: {e}"))))
                .collect::<Result<_>>()?;
            points.push(PhasePoint::new(vals[..dim].to_vec(), vals[dim..].to_vec())?);
        }
        Self::new(dim, points, window)
    }

    pub fn store_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(column_names(self.dim))?;
        for p in &self.points {
            writer.write_record(p.coords().iter().map(|v| v.to_string()))?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        write_atomic(path.as_ref(), &bytes)
    }
}

fn column_names(dim: usize) -> Vec<String> {
    (1..=dim)
        .map(|i| format!("a_{i}"))
        .chain((1..=dim).map(|i| format!("b_{i}")))
        .collect()
}

/// Finite-radius proxy for the upper and lower Beurling densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub radius: f64,
    pub upper: f64,
    pub lower: f64,
    /// Gap between the outermost scanned cube and the window boundary.
    pub interior_margin: f64,
}

fn count_in_cube(sorted: &[Vec<f64>], center: &[f64], r: f64) -> usize {
    // `sorted` is ordered by its first coordinate; binary search that axis.
    let lo = center[0] - r;
    let hi = center[0] + r;
    let start = sorted.partition_point(|p| p[0] < lo);
    let end = sorted.partition_point(|p| p[0] < hi);
    sorted[start..end]
        .iter()
        .filter(|p| {
            p.iter()
                .zip(center)
                .skip(1)
                .all(|(x, c)| *x >= c - r && *x < c + r)
        })
        .count()
}

/// Upper and lower normalized counts `card(Λ ∩ Q(x,r)) / (2r)^{2d}` over
/// scan centers with pitch `r/4` whose cubes fit inside the window.
///
/// Admissible radii satisfy `0 < r ≤ W/2`.
pub fn density_estimate(set: &PhasePointSet, r: f64) -> Result<DensityEstimate> {
    let w = set.window;
    if !(r.is_finite() && r > 0.0 && r <= w / 2.0 * (1.0 + 1e-12)) {
        return Err(invalid(
            "radius",
            format!("r = {r} must lie in (0, W/2] for window half-side W = {w}"),
        ));
    }
    let dims = 2 * set.dim;
    let pitch = r / 4.0;
    let reach = w - r;
    let steps = ((2.0 * reach / pitch) + 1e-9).floor() as usize;
    let axis: Vec<f64> = (0..=steps).map(|k| -reach + k as f64 * pitch).collect();
    let outermost = axis.iter().fold(0.0f64, |m, c| m.max(c.abs()));

    let mut sorted: Vec<Vec<f64>> = set.points.iter().map(|p| p.coords()).collect();
    sorted.sort_by(|x, y| x[0].total_cmp(&y[0]));

    let total = axis.len().pow(dims as u32);
    let volume = (2.0 * r).powi(dims as i32);
    let (upper, lower) = (0..total)
        .into_par_iter()
        .map(|mut flat| {
            let mut center = vec![0.0; dims];
            for c in center.iter_mut() {
                *c = axis[flat % axis.len()];
                flat /= axis.len();
            }
            count_in_cube(&sorted, &center, r)
        })
        .fold(
            || (0usize, usize::MAX),
            |(hi, lo), c| (hi.max(c), lo.min(c)),
        )
        .reduce(|| (0usize, usize::MAX), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    Ok(DensityEstimate {
        radius: r,
        upper: upper as f64 / volume,
        lower: lower as f64 / volume,
        interior_margin: w - (outermost + r),
    })
}

/// Density estimates for an increasing sequence of radii.
pub fn density_trend(set: &PhasePointSet, radii: &[f64]) -> Result<Vec<DensityEstimate>> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("radii", "must be strictly increasing"));
    }
    radii.iter().map(|&r| density_estimate(set, r)).collect()
}

/// Largest number of points in any half-open unit cube `x + [0,1)^{2d}`.
///
/// Exact: an optimal cube can be slid down until each lower face touches a
/// point, so it suffices to try corners at point coordinates, axis by axis.
pub fn separation_stat(set: &PhasePointSet) -> usize {
    let coords: Vec<Vec<f64>> = set.points.iter().map(|p| p.coords()).collect();
    let refs: Vec<&Vec<f64>> = coords.iter().collect();
    sweep(&refs, 0, 2 * set.dim)
}

fn sweep(points: &[&Vec<f64>], axis: usize, dims: usize) -> usize {
    if points.is_empty() || axis == dims {
        return points.len();
    }
    let mut sorted: Vec<&Vec<f64>> = points.to_vec();
    sorted.sort_by(|x, y| x[axis].total_cmp(&y[axis]));
    let mut best = 0;
    let mut i = 0;
    while i < sorted.len() {
        let corner = sorted[i][axis];
        let end = sorted.partition_point(|p| p[axis] < corner + 1.0);
        let slab = &sorted[i..end];
        // Fewer points than the current best cannot improve it.
        if slab.len() > best {
            best = best.max(sweep(slab, axis + 1, dims));
        }
        // Skip equal corners.
        let mut j = i + 1;
        while j < sorted.len() && sorted[j][axis] == corner {
            j += 1;
        }
        i = j;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_lattice_is_exact() {
        let set = PhasePointSet::lattice(1, 1.0, 1.0, 16.0).unwrap();
        assert_eq!(set.len(), 32 * 32);
        let e = density_estimate(&set, 8.0).unwrap();
        assert!((e.upper - 1.0).abs() < 1e-12 && (e.lower - 1.0).abs() < 1e-12);
        assert!(e.interior_margin >= 0.0);
    }

    #[test]
    fn covolume_two_lattice() {
        let set = PhasePointSet::lattice(1, 2.0, 1.0, 16.0).unwrap();
        let e = density_estimate(&set, 8.0).unwrap();
        assert!((e.upper - 0.5).abs() < 0.07 && (e.lower - 0.5).abs() < 0.07);
    }

    #[test]
    fn empty_and_rejections() {
        let set = PhasePointSet::empty(1, 16.0).unwrap();
        let e = density_estimate(&set, 4.0).unwrap();
        assert_eq!((e.upper, e.lower), (0.0, 0.0));
        assert!(density_estimate(&set, 9.0).is_err());
        assert!(density_estimate(&set, 0.0).is_err());
        assert!(density_trend(&set, &[4.0, 2.0]).is_err());
        assert!(PhasePointSet::new(1, vec![PhasePoint::d1(16.0, 0.0)], 16.0).is_err());
    }

    #[test]
    fn separation_examples() {
        let lattice = PhasePointSet::lattice(1, 1.0, 1.0, 4.0).unwrap();
        assert_eq!(separation_stat(&lattice), 1);
        let mut dup = lattice.clone();
        dup.push(PhasePoint::d1(1.0, 1.0)).unwrap();
        assert!(separation_stat(&dup) >= 2);
        let pair = PhasePointSet::new(1, vec![PhasePoint::d1(-5.0, 0.0), PhasePoint::d1(5.0, 0.0)], 8.0).unwrap();
        assert_eq!(separation_stat(&pair), 1);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        let set = PhasePointSet::lattice(1, 0.5, 1.5, 3.0).unwrap();
        set.store_csv(&path).unwrap();
        let back = PhasePointSet::load_csv(&path, 3.0).unwrap();
        assert_eq!(set, back);
    }
}
