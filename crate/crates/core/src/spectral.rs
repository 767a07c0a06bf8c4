//! Time-frequency restriction operators `L = P₁ F⁻¹P₂F P₁`, their traces and
//! spectra (discrete prolate functions), and the STFT localization operator
//! `A_R = V_g* χ_{Q(R)} V_g`.
//!
//! Samples exactly on the boundary of a ball get weight ½, and the time mask
//! enters as `√w₁` on both sides. With that convention the trace is the
//! product of the trapezoid measures of the two sets, and centered sets keep
//! the operator symmetric under `x ↦ −x`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frames::FunctionSystem;
use crate::grid::{
    tf_shift, tf_shift_inverse, FourierPlan, GridSpec, PhasePoint, SampledFunction, C64,
};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::localization::modulation_norm;
use crate::stft::{adjoint_stft, stft};

/// Largest time support handled by the dense eigensolver.
pub const MAX_DENSE_SUPPORT: usize = 4096;

const MARGIN_SAMPLES: f64 = 4.0;
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// Closed Euclidean ball; boundary samples count half.
    Ball { center: Vec<f64>, radius: f64 },
    /// The whole grid (time box or alias box).
    Full,
}

impl Region {
    pub fn centered(dim: usize, radius: f64) -> Self {
        Region::Ball {
            center: vec![0.0; dim],
            radius,
        }
    }

    /// Sample weights on `grid`: 1 inside, ½ on the boundary, 0 outside.
    fn weights(&self, grid: &GridSpec) -> Vec<f64> {
        match self {
            Region::Full => vec![1.0; grid.len()],
            Region::Ball { radius, .. } if *radius == 0.0 => vec![0.0; grid.len()],
            Region::Ball { center, radius } => {
                let tol = BOUNDARY_TOL * grid.spacing();
                (0..grid.len())
                    .map(|i| {
                        let p = grid.point(i);
                        let r = center
                            .iter()
                            .enumerate()
                            .map(|(a, c)| (p[a] - c).powi(2))
                            .sum::<f64>()
                            .sqrt();
                        if r < radius - tol {
                            1.0
                        } else if r <= radius + tol {
                            0.5
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        }
    }

    fn validate(&self, grid: &GridSpec, what: &'static str) -> Result<()> {
        let Region::Ball { center, radius } = self else {
            return Ok(());
        };
        if center.len() != grid.dim() || center.iter().any(|c| !c.is_finite()) {
            return Err(invalid(what, "center must be finite with one entry per axis"));
        }
        if !(radius.is_finite() && *radius >= 0.0) {
            return Err(invalid(what, format!("radius must be nonnegative, got {radius}")));
        }
        let limit = grid.length() / 2.0 - MARGIN_SAMPLES * grid.spacing();
        if center.iter().any(|c| c.abs() + radius > limit) {
            return Err(invalid(
                what,
                format!("ball exceeds the domain: need |center| + radius <= {limit}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionSpec {
    pub time_set: Region,
    pub freq_set: Region,
    pub grid: GridSpec,
}

impl RestrictionSpec {
    /// Centered balls of radii `rho_t` (time) and `rho_f` (frequency).
    pub fn centered(grid: GridSpec, rho_t: f64, rho_f: f64) -> Self {
        Self {
            time_set: Region::centered(grid.dim(), rho_t),
            freq_set: Region::centered(grid.dim(), rho_f),
            grid,
        }
    }
}

/// Matrix-free `L = M_{√w₁} F⁻¹ M_{w₂} F M_{√w₁}`.
#[derive(Debug, Clone)]
pub struct RestrictionOperator {
    grid: GridSpec,
    sqrt_w1: Vec<f64>,
    w2: Vec<f64>,
    plan: FourierPlan,
}

pub fn restriction_operator(spec: &RestrictionSpec) -> Result<RestrictionOperator> {
    let grid = spec.grid;
    let dual = grid.dual();
    spec.time_set.validate(&grid, "time_set")?;
    spec.freq_set.validate(&dual, "freq_set")?;
    Ok(RestrictionOperator {
        grid,
        sqrt_w1: spec.time_set.weights(&grid).iter().map(|w| w.sqrt()).collect(),
        w2: spec.freq_set.weights(&dual),
        plan: FourierPlan::new(grid.n_points()),
    })
}

impl RestrictionOperator {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.grid.ensure_same(f.grid())?;
        let d = self.grid.dim();
        let mut buf: Vec<C64> = f
            .values()
            .iter()
            .zip(&self.sqrt_w1)
            .map(|(v, s)| v * s)
            .collect();
        self.plan.forward(&mut buf, d, self.grid.spacing());
        for (v, w) in buf.iter_mut().zip(&self.w2) {
            *v *= w;
        }
        self.plan.inverse(&mut buf, d, self.grid.freq_spacing());
        for (v, s) in buf.iter_mut().zip(&self.sqrt_w1) {
            *v *= s;
        }
        SampledFunction::new(self.grid, buf)
    }

    /// `Σ_t w₁(t) K₂(t,t)`, the diagonal sum of the assembled kernel.
    pub fn trace(&self) -> f64 {
        let diag = self.w2.iter().sum::<f64>() / self.grid.len() as f64;
        self.sqrt_w1.iter().map(|s| s * s * diag).sum()
    }

    /// Indices of the time support.
    fn support(&self) -> Vec<usize> {
        (0..self.grid.len()).filter(|&i| self.sqrt_w1[i] > 0.0).collect()
    }

    /// The operator as a matrix on its time support (sample basis).
    pub fn support_matrix(&self) -> Result<(Vec<usize>, CMatrix)> {
        let support = self.support();
        if support.len() > MAX_DENSE_SUPPORT {
            return Err(invalid(
                "restriction operator",
                format!("time support of {} samples exceeds {MAX_DENSE_SUPPORT}", support.len()),
            ));
        }
        // K₂(t,u) depends only on t − u: one inverse transform of w₂ gives it.
        let d = self.grid.dim();
        let mut kernel: Vec<C64> = self.w2.iter().map(|&w| C64::new(w, 0.0)).collect();
        self.plan.inverse(&mut kernel, d, self.grid.freq_spacing());
        let scale = self.grid.cell_measure();
        let n = self.grid.n_points() as isize;
        let half = n / 2;
        let offset = |t: usize, u: usize| -> usize {
            let ti = self.grid.multi_index(t);
            let ui = self.grid.multi_index(u);
            let w = |a: usize, b: usize| (a as isize - b as isize + half).rem_euclid(n) as usize;
            if d == 1 {
                w(ti[0], ui[0])
            } else {
                self.grid.flat_index([w(ti[0], ui[0]), w(ti[1], ui[1])])
            }
        };
        let m = CMatrix::from_fn(support.len(), support.len(), |i, j| {
            let (t, u) = (support[i], support[j]);
            kernel[offset(t, u)] * (scale * self.sqrt_w1[t] * self.sqrt_w1[u])
        });
        Ok((support, m))
    }

    /// Top `k` eigenpairs (descending) by a dense Hermitian eigensolve.
    pub fn spectrum(&self, k: usize) -> Result<OperatorSpectrum> {
        if k > self.grid.len() {
            return Err(invalid("k", format!("{k} exceeds the {} grid samples", self.grid.len())));
        }
        let (support, m) = self.support_matrix()?;
        let eig = hermitian_eigen(&m);
        let norm = 1.0 / self.grid.cell_measure().sqrt();
        let count = k.min(support.len());
        let mut eigenvalues = Vec::with_capacity(count);
        let mut eigenfunctions = Vec::with_capacity(count);
        for c in (0..support.len()).rev().take(count) {
            eigenvalues.push(eig.values[c]);
            let mut f = SampledFunction::zeros(self.grid);
            let vals = f.values_mut();
            for (r, &idx) in support.iter().enumerate() {
                vals[idx] = eig.vectors[(r, c)] * norm;
            }
            eigenfunctions.push(f);
        }
        Ok(OperatorSpectrum {
            eigenvalues,
            eigenfunctions,
            trace: self.trace(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct OperatorSpectrum {
    /// Descending, reported raw (not clipped to `[0,1]`).
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<SampledFunction>,
    pub trace: f64,
}

impl OperatorSpectrum {
    pub fn count_above(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&v| v > threshold).count()
    }

    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|&&v| v >= threshold).count()
    }

    /// CSV with columns `index,eigenvalue`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["index", "eigenvalue"])?;
        for (i, v) in self.eigenvalues.iter().enumerate() {
            w.write_record([i.to_string(), v.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        crate::io::write_atomic(path.as_ref(), &bytes)
    }
}

/// Number of eigenvalues above ½.
pub fn plunge_count(op: &RestrictionOperator) -> Result<usize> {
    Ok(op.spectrum(op.grid.len())?.count_above(0.5))
}

/// `N(R)`: eigenvalues `≥ 1 − ε²` of the restriction to `[−(R−R^δ), R−R^δ]`
/// in both time and frequency.
pub fn prolate_count(r: f64, eps: f64, delta: f64, grid: GridSpec) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("must lie in (0,1), got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0,1), got {delta}")));
    }
    let rho = r - r.powf(delta);
    if !(rho.is_finite() && rho > 0.0) {
        return Err(invalid("R", format!("R - R^delta = {rho} is not positive")));
    }
    let op = restriction_operator(&RestrictionSpec::centered(grid, rho, rho))?;
    Ok(op.spectrum(grid.len())?.count_at_least(1.0 - eps * eps))
}

/// `ψ_σ(x) = Π_j e^{−2πi b_j x_j} φ_{σ_j}(x_j − a_j)` on the two-dimensional
/// grid with the same `N` and `Δx` as the one-dimensional base spectrum.
pub fn tensor_prolate_system(
    sigma: [usize; 2],
    center: &PhasePoint,
    base: &OperatorSpectrum,
) -> Result<SampledFunction> {
    let Some(first) = base.eigenfunctions.first() else {
        return Err(invalid("base", "spectrum has no eigenfunctions"));
    };
    let g1 = *first.grid();
    if g1.dim() != 1 || center.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: center.dim(),
            reason: "tensor prolates combine a one-dimensional spectrum into two dimensions",
        });
    }
    let count = base.eigenfunctions.len();
    if sigma.iter().any(|&s| s >= count) {
        return Err(invalid("sigma", format!("indices must be below {count}")));
    }
    let g2 = GridSpec::new(2, g1.n_points(), g1.spacing())?;
    let p = &base.eigenfunctions[sigma[0]];
    let q = &base.eigenfunctions[sigma[1]];
    let n = g1.n_points();
    let values: Vec<C64> = (0..g2.len()).map(|i| p.values()[i / n] * q.values()[i % n]).collect();
    let product = SampledFunction::new(g2, values)?;
    let shift = PhasePoint {
        a: center.a.clone(),
        b: center.b.iter().map(|b| -b).collect(),
    };
    tf_shift(&product, &shift)
}

/// Radius beyond which `Q(R)` already covers every phase-space sample.
fn covering_radius(grid: &GridSpec) -> f64 {
    let d = grid.dim() as f64;
    let reach = (grid.length() / 2.0).max(grid.bandwidth() / 2.0);
    d.sqrt() * reach + grid.spacing().max(grid.freq_spacing())
}

/// `A_R f = V_w*(χ_{Q(R)} V_w f)` with `Q(R) = {|x| < R} × {|ξ| < R}`.
pub fn localization_operator(f: &SampledFunction, r: f64, window: &SampledFunction) -> Result<SampledFunction> {
    let limit = covering_radius(f.grid());
    if !(r.is_finite() && r > 0.0 && r <= limit) {
        return Err(invalid("R", format!("must lie in (0, {limit}], got {r}")));
    }
    let mut field = stft(f, window)?;
    field.restrict_to_box(r);
    adjoint_stft(&field, window)
}

/// Result of [`improve_system`].
#[derive(Debug, Clone)]
pub struct Improvement {
    pub system: FunctionSystem,
    /// `‖φ_n − A_Rφ_n‖_{M²_σ}` per member.
    pub errors: Vec<f64>,
    /// Members whose time center was moved onto the grid.
    pub snapped: Vec<usize>,
}

/// Replaces each member `f_n = π(a_n,b_n)φ_n` by `π(a_n,b_n) A_R φ_n`.
pub fn improve_system(sys: &FunctionSystem, r: f64, sigma: f64, window: &SampledFunction) -> Result<Improvement> {
    let grid = *sys.grid();
    let mut members = Vec::with_capacity(sys.len());
    let mut errors = Vec::with_capacity(sys.len());
    let mut snapped = Vec::new();
    for (n, (f, c)) in sys.members().iter().zip(sys.centers()).enumerate() {
        let mut center = c.clone();
        for a in center.a.iter_mut() {
            let s = grid.snap(*a);
            if (s - *a).abs() > 1e-9 * grid.spacing() {
                *a = s;
                if !snapped.contains(&n) {
                    snapped.push(n);
                }
            }
        }
        if snapped.last() == Some(&n) {
            log::warn!("member {n}: time center {:?} snapped to {:?}", c.a, center.a);
        }
        let phi = tf_shift_inverse(f, &center)?;
        let psi = localization_operator(&phi, r, window)?;
        errors.push(modulation_norm(&phi.sub(&psi)?, sigma)?);
        members.push(tf_shift(&psi, &center)?);
    }
    let system = FunctionSystem::new(
        format!("{} (improved, R = {r})", sys.label()),
        members,
        sys.centers().to_vec(),
    )?;
    Ok(Improvement {
        system,
        errors,
        snapped,
    })
}
