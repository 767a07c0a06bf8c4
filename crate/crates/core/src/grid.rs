//! Uniform periodic discretization of functions on ℝ or ℝ².
//!
//! A [`GridSpec`] with `N` points and spacing `Δx` per axis samples the
//! origin-centered box `[-NΔx/2, NΔx/2)`. Sample `j` sits at
//! `x_j = (j - N/2)·Δx`; the dual (frequency) grid has spacing
//! `Δξ = 1/(NΔx)` and is centered the same way, so transformed samples are
//! values of `f̂(ξ_k)` at true frequency coordinates.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

const SPACING_REL_TOL: f64 = 1e-12;
const ON_GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n_points: usize,
    spacing: f64,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.n_points == other.n_points
            && (self.spacing - other.spacing).abs() <= SPACING_REL_TOL * self.spacing.abs()
    }
}

impl GridSpec {
    pub fn new(dim: usize, n_points: usize, spacing: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            dim,
            n_points,
            spacing,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of samples, `N^dim`.
    pub fn len(&self) -> usize {
        self.n_points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Box length `L = NΔx` per axis.
    pub fn length(&self) -> f64 {
        self.n_points as f64 * self.spacing
    }

    pub fn freq_spacing(&self) -> f64 {
        1.0 / self.length()
    }

    /// Width of the alias box `1/Δx` per axis.
    pub fn bandwidth(&self) -> f64 {
        1.0 / self.spacing
    }

    /// The frequency grid: same `N`, spacing `1/(NΔx)`.
    pub fn dual(&self) -> GridSpec {
        GridSpec {
            dim: self.dim,
            n_points: self.n_points,
            spacing: self.freq_spacing(),
        }
    }

    /// Measure weight of one sample, `Δx^dim`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn coordinate(&self, axis_index: usize) -> f64 {
        (axis_index as f64 - (self.n_points / 2) as f64) * self.spacing
    }

    pub fn axis_coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.coordinate(i)).collect()
    }

    /// Per-axis indices of a flat (row-major) sample index.
    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n_points, flat % self.n_points]
        }
    }

    pub fn flat_index(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.n_points + idx[1]
        }
    }

    /// Coordinates of a flat sample index; unused axes are 0.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(flat);
        if self.dim == 1 {
            [self.coordinate(i), 0.0]
        } else {
            [self.coordinate(i), self.coordinate(j)]
        }
    }

    /// Euclidean norm of the sample position.
    pub fn radius(&self, flat: usize) -> f64 {
        let p = self.point(flat);
        (p[0] * p[0] + p[1] * p[1]).sqrt()
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// Integer sample shift for a translation by `x`; rejects off-grid values.
    pub fn shift_index(&self, x: f64) -> Result<isize> {
        if !x.is_finite() {
            return Err(Error::OffGrid {
                value: x,
                spacing: self.spacing,
            });
        }
        let k = x / self.spacing;
        let r = k.round();
        if (k - r).abs() > ON_GRID_TOL * k.abs().max(1.0) {
            return Err(Error::OffGrid {
                value: x,
                spacing: self.spacing,
            });
        }
        Ok(r as isize)
    }

    /// Nearest on-grid value for a translation.
    pub fn snap(&self, x: f64) -> f64 {
        (x / self.spacing).round() * self.spacing
    }

    pub(crate) fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n_points as isize) as usize
    }
}

/// A point `(a, b)` of phase space ℝ^d × ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PhasePoint {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() || a.len() > 2 {
            return Err(invalid("phase point", "a and b must have equal length 1 or 2"));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(invalid("phase point", "coordinates must be finite"));
        }
        Ok(Self { a, b })
    }

    /// One-dimensional point `(a, b)`.
    pub fn d1(a: f64, b: f64) -> Self {
        Self {
            a: vec![a],
            b: vec![b],
        }
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            a: vec![0.0; dim],
            b: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Concatenated coordinates `(a, b)` in ℝ^{2d}.
    pub fn coords(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Sample values of a function on a [`GridSpec`], with measure weight
/// `Δx^dim` per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point; `x` has `dim` entries.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                f(&p[..grid.dim()])
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid.cell_measure() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &SampledFunction) -> Result<C64> {
        inner_product(self, other)
    }

    pub fn scaled(&self, c: C64) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: C64, other: &SampledFunction, beta: C64) -> Result<SampledFunction> {
        self.grid.ensure_same(&other.grid)?;
        Ok(SampledFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| alpha * x + beta * y)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        self.combine(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<SampledFunction> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// Fraction of `‖f‖²` carried by samples with `|x| > L/4`.
    pub fn tail_fraction(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let limit = self.grid.length() / 4.0;
        let outside: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.radius(*i) > limit)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        outside / total
    }

    /// Pointwise multiplication by `x_axis`.
    pub fn times_coordinate(&self, axis: usize) -> SampledFunction {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.grid.point(i)[axis])
            .collect();
        SampledFunction {
            grid: self.grid,
            values,
        }
    }
}

/// `(f, h) = Δx^dim Σ f·conj(h)`.
pub fn inner_product(f: &SampledFunction, h: &SampledFunction) -> Result<C64> {
    f.grid.ensure_same(&h.grid)?;
    let s: C64 = f
        .values
        .iter()
        .zip(&h.values)
        .map(|(x, y)| x * y.conj())
        .sum();
    Ok(s * f.grid.cell_measure())
}

/// Reusable FFT plan for centered unitary transforms of length `N`.
#[derive(Clone)]
pub struct FourierPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    parity: f64,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("n", &self.n).finish()
    }
}

impl FourierPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        // e^{∓iπN/2} for even N
        let parity = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            parity,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place: `buf_k ← Δx Σ_j buf_j e^{-2πi x_j ξ_k}` on centered grids.
    pub fn forward_1d(&self, buf: &mut [C64], spacing: f64) {
        self.transform_1d(buf, spacing, &self.forward);
    }

    /// In place: `buf_j ← Δξ Σ_k buf_k e^{2πi x_j ξ_k}` on centered grids.
    pub fn inverse_1d(&self, buf: &mut [C64], freq_spacing: f64) {
        self.transform_1d(buf, freq_spacing, &self.inverse);
    }

    fn transform_1d(&self, buf: &mut [C64], weight: f64, fft: &Arc<dyn Fft<f64>>) {
        debug_assert_eq!(buf.len(), self.n);
        for v in buf.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
        fft.process(buf);
        let even = weight * self.parity;
        for (k, v) in buf.iter_mut().enumerate() {
            *v *= if k % 2 == 0 { even } else { -even };
        }
    }

    /// Full `dim`-dimensional transform of a row-major buffer.
    pub fn forward(&self, buf: &mut [C64], dim: usize, spacing: f64) {
        self.apply_nd(buf, dim, spacing, true);
    }

    pub fn inverse(&self, buf: &mut [C64], dim: usize, freq_spacing: f64) {
        self.apply_nd(buf, dim, freq_spacing, false);
    }

    fn apply_nd(&self, buf: &mut [C64], dim: usize, weight: f64, forward: bool) {
        let n = self.n;
        let run = |row: &mut [C64]| {
            if forward {
                self.forward_1d(row, weight)
            } else {
                self.inverse_1d(row, weight)
            }
        };
        if dim == 1 {
            run(buf);
            return;
        }
        for row in buf.chunks_mut(n) {
            run(row);
        }
        let mut column = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                column[r] = buf[r * n + c];
            }
            run(&mut column);
            for r in 0..n {
                buf[r * n + c] = column[r];
            }
        }
    }
}

/// Samples of `f̂(ξ) = ∫ f(t) e^{-2πitξ} dt` on the dual grid.
pub fn fourier_transform(f: &SampledFunction) -> SampledFunction {
    let plan = FourierPlan::new(f.grid.n_points);
    fourier_transform_with(&plan, f)
}

pub fn fourier_transform_with(plan: &FourierPlan, f: &SampledFunction) -> SampledFunction {
    let mut values = f.values.clone();
    plan.forward(&mut values, f.grid.dim, f.grid.spacing);
    SampledFunction {
        grid: f.grid.dual(),
        values,
    }
}

/// Inverse of [`fourier_transform`]: takes samples on a frequency grid and
/// returns samples on its dual (time) grid.
pub fn inverse_fourier_transform(fhat: &SampledFunction) -> SampledFunction {
    let plan = FourierPlan::new(fhat.grid.n_points);
    inverse_fourier_transform_with(&plan, fhat)
}

pub fn inverse_fourier_transform_with(plan: &FourierPlan, fhat: &SampledFunction) -> SampledFunction {
    let mut values = fhat.values.clone();
    plan.inverse(&mut values, fhat.grid.dim, fhat.grid.spacing);
    SampledFunction {
        grid: fhat.grid.dual(),
        values,
    }
}

/// `∂f/∂x_axis`, computed spectrally as the inverse transform of `2πiξ f̂`.
pub fn derivative(f: &SampledFunction, axis: usize) -> SampledFunction {
    let plan = FourierPlan::new(f.grid.n_points);
    let mut fhat = fourier_transform_with(&plan, f);
    let dual = *fhat.grid();
    for (i, v) in fhat.values.iter_mut().enumerate() {
        *v *= C64::new(0.0, 2.0 * PI * dual.point(i)[axis]);
    }
    let mut out = inverse_fourier_transform_with(&plan, &fhat);
    out.grid = f.grid;
    out
}

fn check_point_dim(grid: &GridSpec, p: &PhasePoint) -> Result<()> {
    if p.a.len() != grid.dim || p.b.len() != grid.dim {
        return Err(invalid(
            "phase point",
            format!("dimension {} does not match grid dimension {}", p.a.len(), grid.dim),
        ));
    }
    Ok(())
}

/// `π(a,b)f(t) = e^{2πib·t} f(t-a)` with periodic wraparound.
///
/// `a` must lie on the sample grid; `b` is arbitrary.
pub fn tf_shift(f: &SampledFunction, p: &PhasePoint) -> Result<SampledFunction> {
    let grid = f.grid;
    check_point_dim(&grid, p)?;
    let shifts: Vec<isize> = p.a.iter().map(|&a| grid.shift_index(a)).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let idx = grid.multi_index(i);
        let src = if grid.dim == 1 {
            grid.wrap(idx[0] as isize - shifts[0])
        } else {
            grid.flat_index([
                grid.wrap(idx[0] as isize - shifts[0]),
                grid.wrap(idx[1] as isize - shifts[1]),
            ])
        };
        let x = grid.point(i);
        let phase: f64 = p.b.iter().zip(x.iter()).map(|(b, x)| b * x).sum();
        values.push(f.values[src] * C64::from_polar(1.0, 2.0 * PI * phase));
    }
    Ok(SampledFunction { grid, values })
}

/// Exact inverse of [`tf_shift`]: returns `φ` with `π(a,b)φ = f`.
pub fn tf_shift_inverse(f: &SampledFunction, p: &PhasePoint) -> Result<SampledFunction> {
    let grid = f.grid;
    check_point_dim(&grid, p)?;
    let shifts: Vec<isize> = p.a.iter().map(|&a| grid.shift_index(a)).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let idx = grid.multi_index(i);
        let src = if grid.dim == 1 {
            grid.wrap(idx[0] as isize + shifts[0])
        } else {
            grid.flat_index([
                grid.wrap(idx[0] as isize + shifts[0]),
                grid.wrap(idx[1] as isize + shifts[1]),
            ])
        };
        let x = grid.point(src);
        let phase: f64 = p.b.iter().zip(x.iter()).map(|(b, x)| b * x).sum();
        values.push(f.values[src] * C64::from_polar(1.0, -2.0 * PI * phase));
    }
    Ok(SampledFunction { grid, values })
}

/// The unit-norm Gaussian `2^{d/4} e^{-π|x|²}`.
pub fn gaussian_window(grid: &GridSpec) -> SampledFunction {
    let c = 2f64.powf(grid.dim as f64 / 4.0);
    SampledFunction::from_fn(*grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        C64::new(c * (-PI * r2).exp(), 0.0)
    })
}

/// First `count` Hermite functions `h_n(x) = 2^{1/4}(2^n n!)^{-1/2} H_n(√(2π)x) e^{-πx²}`
/// on a one-dimensional grid, via the stable three-term recurrence.
pub fn hermite_functions(grid: &GridSpec, count: usize) -> Result<Vec<SampledFunction>> {
    if grid.dim != 1 {
        return Err(Error::UnsupportedDimension {
            dim: grid.dim,
            reason: "Hermite functions are built on one-dimensional grids",
        });
    }
    let xs = grid.axis_coordinates();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(count);
    for n in 0..count {
        let row: Vec<f64> = match n {
            0 => xs.iter().map(|x| 2f64.powf(0.25) * (-PI * x * x).exp()).collect(),
            _ => {
                let scale = (2.0 * PI).sqrt();
                let a = (2.0 / n as f64).sqrt();
                let b = ((n - 1) as f64 / n as f64).sqrt();
                xs.iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let prev = rows[n - 1][i];
                        let prev2 = if n >= 2 { rows[n - 2][i] } else { 0.0 };
                        a * scale * x * prev - b * prev2
                    })
                    .collect()
            }
        };
        rows.push(row);
    }
    Ok(rows
        .into_iter()
        .map(|r| SampledFunction {
            grid: *grid,
            values: r.into_iter().map(|v| C64::new(v, 0.0)).collect(),
        })
        .collect())
}
