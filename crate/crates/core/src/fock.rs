//! Bargmann–Fock diagnostics for one complex variable: Gram matrices of
//! normalized reproducing kernels, their Riesz bounds on finite windows, and
//! square-lattice sweeps.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::C64;
use crate::io::write_atomic;
use crate::linalg::{hermitian_eigen, CMatrix};

/// Points of ℂ inside the closed disk `|z| ≤ W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockPointSet {
    points: Vec<C64>,
    window: f64,
}

impl FockPointSet {
    pub fn new(points: Vec<C64>, window: f64) -> Result<Self> {
        if !(window.is_finite() && window > 0.0) {
            return Err(invalid("window", format!("radius must be positive, got {window}")));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.re.is_finite() && p.im.is_finite()) || p.norm() > window {
                return Err(Error::OutOfDomain {
                    index: i,
                    what: "Fock window",
                });
            }
        }
        Ok(Self { points, window })
    }

    /// `αℤ + iαℤ` clipped to the open disk `|z| < W`.
    pub fn square_lattice(alpha: f64, window: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid("alpha", format!("must be positive, got {alpha}")));
        }
        let k = (window / alpha).ceil() as i64;
        let mut points = Vec::new();
        for i in -k..=k {
            for j in -k..=k {
                let z = C64::new(i as f64 * alpha, j as f64 * alpha);
                if z.norm() < window {
                    points.push(z);
                }
            }
        }
        Self::new(points, window)
    }

    pub fn points(&self) -> &[C64] {
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

    /// Translate every point by `c` (the window grows by `|c|`).
    pub fn translated(&self, c: C64) -> Result<Self> {
        Self::new(self.points.iter().map(|p| p + c).collect(), self.window + c.norm())
    }

    /// Reads a `re,im` CSV.
    pub fn load_csv(path: impl AsRef<Path>, window: f64) -> Result<Self> {
        let values = crate::io::samples_from_csv(path.as_ref())?;
        Self::new(values, window)
    }

    pub fn store_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), &crate::io::samples_to_csv(&self.points)?)
    }
}

/// Gram matrix of `k_λ = K_λ e^{−π|λ|²/2}` with its extreme eigenvalues.
#[derive(Debug, Clone)]
pub struct FockGram {
    pub matrix: CMatrix,
    pub lower: f64,
    pub upper: f64,
}

/// `(k_λ, k_μ) = e^{π μ̄ λ − π(|λ|² + |μ|²)/2}`, entry `[i][j]` for `λ = λ_i, μ = λ_j`.
pub fn fock_gram(set: &FockPointSet) -> Result<FockGram> {
    let pts = &set.points;
    if pts.is_empty() {
        return Err(invalid("points", "need at least one point"));
    }
    for i in 0..pts.len() {
        for j in 0..i {
            if pts[i] == pts[j] {
                return Err(Error::DuplicatePoint(i));
            }
        }
    }
    let m = CMatrix::from_fn(pts.len(), pts.len(), |i, j| {
        if i == j {
            return C64::new(1.0, 0.0);
        }
        let (l, u) = (pts[i], pts[j]);
        (PI * u.conj() * l - PI * (l.norm_sqr() + u.norm_sqr()) / 2.0).exp()
    });
    let eig = hermitian_eigen(&m);
    Ok(FockGram {
        lower: eig.min(),
        upper: eig.max(),
        matrix: m,
    })
}

/// Riesz bounds `(A, B)` of the normalized kernels.
pub fn sampling_bounds(set: &FockPointSet) -> Result<(f64, f64)> {
    let g = fock_gram(set)?;
    Ok((g.lower, g.upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub density: f64,
    pub lower: f64,
    pub upper: f64,
    pub condition: f64,
}

/// Bounds for square lattices `αℤ + iαℤ` clipped to `|z| < W`, one row per `α`.
pub fn lattice_sweep(alphas: &[f64], window: f64) -> Result<Vec<SweepRow>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let set = FockPointSet::square_lattice(alpha, window)?;
            let (lower, upper) = sampling_bounds(&set)?;
            Ok(SweepRow {
                alpha,
                density: 1.0 / (alpha * alpha),
                lower,
                upper,
                condition: if lower > 0.0 { upper / lower } else { f64::INFINITY },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_and_pair() {
        let one = FockPointSet::new(vec![C64::new(0.3, -0.2)], 1.0).unwrap();
        let g = fock_gram(&one).unwrap();
        assert_eq!(g.matrix[(0, 0)], C64::new(1.0, 0.0));
        let rho: f64 = 1.3;
        let pair = FockPointSet::new(vec![C64::new(0.2, 0.1), C64::new(0.2, 0.1) + C64::from_polar(rho, 0.7)], 3.0).unwrap();
        let g = fock_gram(&pair).unwrap();
        assert!((g.matrix[(0, 1)].norm() - (-PI * rho * rho / 2.0).exp()).abs() < 1e-14);
    }

    #[test]
    fn far_pair_is_nearly_orthonormal() {
        let pair = FockPointSet::new(vec![C64::new(-2.5, 0.0), C64::new(2.5, 0.0)], 3.0).unwrap();
        let (a, b) = sampling_bounds(&pair).unwrap();
        let off = (-PI * 25.0 / 2.0).exp();
        assert!(a >= 1.0 - 2.0 * off && b <= 1.0 + 2.0 * off);
    }

    #[test]
    fn rejections() {
        assert!(FockPointSet::new(vec![C64::new(5.0, 0.0)], 4.0).is_err());
        let dup = FockPointSet::new(vec![C64::new(1.0, 1.0), C64::new(1.0, 1.0)], 4.0).unwrap();
        assert!(matches!(fock_gram(&dup), Err(Error::DuplicatePoint(1))));
        assert!(FockPointSet::square_lattice(0.0, 4.0).is_err());
    }

    #[test]
    fn sparse_lattice_is_almost_orthonormal() {
        let rows = lattice_sweep(&[2.0], 6.0).unwrap();
        assert!(rows[0].lower > 0.9 && rows[0].upper >= rows[0].lower);
        assert!((rows[0].density - 0.25).abs() < 1e-15);
    }
}
