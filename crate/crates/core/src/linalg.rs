//! Dense Hermitian linear algebra on top of nalgebra.
//!
//! All matrices in the toolkit are Gramians or discretized self-adjoint
//! operators, so the only factorization needed is the Hermitian
//! eigendecomposition. Matrices whose imaginary part vanishes (centered
//! restriction operators, integer-lattice Gabor Gramians) are routed to the
//! real symmetric solver, which is several times faster.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues in ascending order with matching unit eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const REAL_ROUTE_TOL: f64 = 1e-13;

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let scale = sym.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let max_im = sym.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));

    let (values, vectors) = if max_im <= REAL_ROUTE_TOL * scale.max(f64::MIN_POSITIVE) {
        let re = sym.map(|z| z.re);
        let eig = SymmetricEigen::new(re);
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::new(sym);
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors,
        )
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    HermitianEigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V*`, restricted to eigenvalues above `cutoff` (others map to 0).
    pub fn apply_function(&self, cutoff: f64, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self
            .values
            .iter()
            .map(|&v| if v > cutoff { f(v) } else { 0.0 })
            .collect();
        let mut scaled = self.vectors.clone();
        for (c, &w) in weights.iter().enumerate() {
            scaled.column_mut(c).scale_mut(w);
        }
        let out = scaled * self.vectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }

    /// `V f(Λ) V* v` without forming the matrix.
    pub fn apply_function_to(&self, cutoff: f64, f: impl Fn(f64) -> f64, v: &CVector) -> CVector {
        let mut coeffs = self.vectors.ad_mul(v);
        for (c, &lambda) in coeffs.iter_mut().zip(&self.values) {
            *c *= if lambda > cutoff { f(lambda) } else { 0.0 };
        }
        &self.vectors * coeffs
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Max deviation of `m` from the identity.
pub fn identity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..m.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, c)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_and_complex_routes_agree_on_spectrum() {
        let n = 12;
        let real = CMatrix::from_fn(n, n, |i, j| {
            let d = i as f64 - j as f64;
            C64::new((-0.3 * d * d).exp(), 0.0)
        });
        let complex = CMatrix::from_fn(n, n, |i, j| {
            let d = i as f64 - j as f64;
            // unitary diagonal conjugation of `real`: same spectrum
            C64::from_polar((-0.3 * d * d).exp(), 0.7 * d)
        });
        let a = hermitian_eigen(&real);
        let b = hermitian_eigen(&complex);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(a.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn inverse_via_spectral_function() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
        );
        let inv = hermitian_eigen(&m).apply_function(0.0, |v| 1.0 / v);
        assert!(identity_defect(&(&m * inv)) < 1e-12);
    }
}
