//! Finite function systems: Gramians, Riesz/frame bounds on the span,
//! biorthogonal duals, canonical tight systems, off-diagonal decay fits and
//! the commutation-identity ledger.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{derivative, inner_product, GridSpec, PhasePoint, SampledFunction, C64};
use crate::io::{samples_from_csv, samples_to_csv, write_atomic};
use crate::linalg::{hermitian_eigen, CMatrix, CVector, HermitianEigen};

/// Gramians at or above this condition number are not inverted.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Relative eigenvalue cutoff defining the numerical span.
pub const SPAN_CUTOFF: f64 = 1e-10;
/// Bin maxima at or below this level are ignored by decay fits.
pub const FIT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSystem {
    label: String,
    members: Vec<SampledFunction>,
    centers: Vec<PhasePoint>,
}

impl FunctionSystem {
    pub fn new(label: impl Into<String>, members: Vec<SampledFunction>, centers: Vec<PhasePoint>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(invalid("members", "a system needs at least one member"));
        };
        if members.len() != centers.len() {
            return Err(invalid(
                "centers",
                format!("{} members but {} centers", members.len(), centers.len()),
            ));
        }
        let grid = *first.grid();
        for m in &members[1..] {
            grid.ensure_same(m.grid())?;
        }
        for (i, c) in centers.iter().enumerate() {
            if c.dim() != grid.dim() || c.coords().iter().any(|v| !v.is_finite()) {
                return Err(invalid("centers", format!("center {i} is not a finite point of dimension {}", grid.dim())));
            }
        }
        Ok(Self {
            label: label.into(),
            members,
            centers,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }

    pub fn centers(&self) -> &[PhasePoint] {
        &self.centers
    }

    pub fn grid(&self) -> &GridSpec {
        self.members[0].grid()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the member whose center is closest to `p`.
    pub fn nearest_member(&self, p: &PhasePoint) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (i, c) in self.centers.iter().enumerate() {
            let d = c.distance(p);
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }

    /// Writes `manifest.json` plus one `member_NNNN.csv` (`re,im`) per member.
    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let files: Vec<String> = (0..self.len()).map(|i| format!("member_{i:04}.csv")).collect();
        for (m, name) in self.members.iter().zip(&files) {
            write_atomic(&dir.join(name), &samples_to_csv(m.values())?)?;
        }
        let manifest = Manifest {
            label: self.label.clone(),
            grid: *self.grid(),
            centers: self.centers.clone(),
            members: files,
        };
        write_atomic(&dir.join("manifest.json"), &serde_json::to_vec_pretty(&manifest)?)
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let manifest: Manifest = serde_json::from_slice(&std::fs::read(dir.join("manifest.json"))?)?;
        let grid = GridSpec::new(manifest.grid.dim(), manifest.grid.n_points(), manifest.grid.spacing())?;
        let members = manifest
            .members
            .iter()
            .map(|name| SampledFunction::new(grid, samples_from_csv(&dir.join(name))?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(manifest.label, members, manifest.centers)
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    label: String,
    grid: GridSpec,
    centers: Vec<PhasePoint>,
    members: Vec<String>,
}

/// `G[m][n] = (f_n, f_m)`.
pub fn gramian(sys: &FunctionSystem) -> CMatrix {
    let m = sys.len();
    let rows: Vec<Vec<C64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    if j < i {
                        C64::new(0.0, 0.0)
                    } else {
                        inner_product(&sys.members[j], &sys.members[i]).expect("common grid")
                    }
                })
                .collect()
        })
        .collect();
    let mut g = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            g[(i, j)] = rows[i][j];
            g[(j, i)] = rows[i][j].conj();
        }
        g[(i, i)].im = 0.0;
    }
    g
}

/// Extreme eigenvalues of the Gramian on its numerical range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    /// True when the system is linearly dependent, so the bounds are frame
    /// bounds for its span rather than Riesz-sequence bounds.
    pub as_frame_on_span: bool,
    pub rank: usize,
}

pub fn frame_bounds_of_gram(g: &CMatrix) -> FrameBounds {
    bounds_from_eigen(&hermitian_eigen(g))
}

fn bounds_from_eigen(eig: &HermitianEigen) -> FrameBounds {
    let upper = eig.max().max(0.0);
    let cutoff = SPAN_CUTOFF * upper;
    let kept: Vec<f64> = eig.values.iter().copied().filter(|&v| v > cutoff).collect();
    FrameBounds {
        lower: kept.first().copied().unwrap_or(0.0),
        upper,
        as_frame_on_span: kept.len() < eig.values.len(),
        rank: kept.len(),
    }
}

pub fn frame_bounds(sys: &FunctionSystem) -> FrameBounds {
    frame_bounds_of_gram(&gramian(sys))
}

/// `G⁻¹`, refusing Gramians with condition number at or above [`CONDITION_LIMIT`].
pub fn inverse_gram(g: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eigen(g);
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition >= CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            condition,
            limit: CONDITION_LIMIT,
        });
    }
    Ok(eig.apply_function(0.0, |v| 1.0 / v))
}

/// New members `Σ_m f_m C[m][n]`, one per column of `coeffs`.
fn synthesize(sys: &FunctionSystem, coeffs: &CMatrix, columns: &[usize]) -> Vec<SampledFunction> {
    let grid = *sys.grid();
    columns
        .par_iter()
        .map(|&n| {
            let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
            for (m, f) in sys.members.iter().enumerate() {
                let c = coeffs[(m, n)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(f.values()) {
                    *a += c * v;
                }
            }
            SampledFunction::new(grid, acc).expect("grid length")
        })
        .collect()
}

/// Biorthogonal system `g_n = Σ_m f_m (G⁻¹)_{mn}`, so `(f_n, g_m) = δ_{nm}`.
pub fn dual_system(sys: &FunctionSystem) -> Result<FunctionSystem> {
    let ginv = inverse_gram(&gramian(sys))?;
    let cols: Vec<usize> = (0..sys.len()).collect();
    FunctionSystem::new(format!("{} (dual)", sys.label), synthesize(sys, &ginv, &cols), sys.centers.clone())
}

/// Max `|(f_n, g_m) − δ_{nm}|` over the pair.
pub fn biorthogonality_defect(sys: &FunctionSystem, dual: &FunctionSystem) -> Result<f64> {
    if sys.len() != dual.len() {
        return Err(invalid("dual", "systems have different sizes"));
    }
    sys.grid().ensure_same(dual.grid())?;
    let worst = (0..sys.len())
        .into_par_iter()
        .map(|n| {
            (0..dual.len())
                .map(|m| {
                    let target = if n == m { 1.0 } else { 0.0 };
                    (inner_product(&sys.members[n], &dual.members[m]).expect("common grid") - target).norm()
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

fn tight_eigen(sys: &FunctionSystem) -> Result<HermitianEigen> {
    let eig = hermitian_eigen(&gramian(sys));
    if eig.max() <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(eig)
}

/// Löwdin orthonormalization `f′_n = Σ_m f_m (G^{+1/2})_{mn}` where `G^{+1/2}`
/// is the pseudo-inverse square root (eigenvalues below `1e-10·max` dropped).
/// For a Riesz sequence the output is orthonormal; for a dependent system it
/// is a Parseval frame for the same span.
pub fn canonical_tight(sys: &FunctionSystem) -> Result<FunctionSystem> {
    let eig = tight_eigen(sys)?;
    let cutoff = SPAN_CUTOFF * eig.max();
    let root = eig.apply_function(cutoff, |v| 1.0 / v.sqrt());
    let cols: Vec<usize> = (0..sys.len()).collect();
    FunctionSystem::new(format!("{} (tight)", sys.label), synthesize(sys, &root, &cols), sys.centers.clone())
}

/// One member of [`canonical_tight`] without building the others.
///
/// Uses the `M×M` Gramian when `M` is at most the number of samples, and the
/// sample-space frame operator `S = Σ f_n ⊗ f̄_n` otherwise; both give
/// `S^{+1/2} f_n`.
pub fn canonical_tight_member(sys: &FunctionSystem, index: usize) -> Result<SampledFunction> {
    if index >= sys.len() {
        return Err(invalid("index", format!("{index} out of range for {} members", sys.len())));
    }
    let grid = *sys.grid();
    if sys.len() <= grid.len() {
        let eig = tight_eigen(sys)?;
        let mut unit = CVector::zeros(sys.len());
        unit[index] = C64::new(1.0, 0.0);
        let column = eig.apply_function_to(SPAN_CUTOFF * eig.max(), |v| 1.0 / v.sqrt(), &unit);
        let coeffs = CMatrix::from_column_slice(sys.len(), 1, column.as_slice());
        let mut out = synthesize(sys, &coeffs, &[0]);
        return Ok(out.remove(0));
    }
    let eig = hermitian_eigen(&frame_operator_matrix(sys));
    if eig.max() <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let f = CVector::from_column_slice(sys.members[index].values());
    let out = eig.apply_function_to(SPAN_CUTOFF * eig.max(), |v| 1.0 / v.sqrt(), &f);
    SampledFunction::new(grid, out.as_slice().to_vec())
}

/// `Δx^d · F F*` with `F` the samples-by-members matrix, assembled with real
/// matrix products.
fn frame_operator_matrix(sys: &FunctionSystem) -> CMatrix {
    let grid = *sys.grid();
    let (n, m) = (grid.len(), sys.len());
    let re = DMatrix::<f64>::from_fn(n, m, |t, k| sys.members[k].values()[t].re);
    let im = DMatrix::<f64>::from_fn(n, m, |t, k| sys.members[k].values()[t].im);
    let w = grid.cell_measure();
    let real = (&re * re.transpose() + &im * im.transpose()) * w;
    let cross = &im * re.transpose();
    let imag = (&cross - cross.transpose()) * w;
    CMatrix::from_fn(n, n, |i, j| C64::new(real[(i, j)], imag[(i, j)]))
}

/// Power-law fit `max |G_{mn}| ≈ C (1 + |λ_m − λ_n|)^{−s}` over distance bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `+∞` when fewer than two bins rise above the floor.
    pub exponent: f64,
    pub constant: f64,
    pub r_squared: f64,
    /// `(distance of the bin maximum, bin maximum)` per nonempty bin.
    pub bins: Vec<(f64, f64)>,
}

/// Bins off-diagonal entries by `floor(|λ_m − λ_n|)`, keeps each bin's
/// maximum modulus (at the distance where it occurs) and regresses
/// `ln max` on `ln(1 + distance)`.
pub fn localization_fit(g: &CMatrix, centers: &[PhasePoint], max_distance: Option<f64>) -> Result<DecayFit> {
    let m = g.nrows();
    if g.ncols() != m || centers.len() != m {
        return Err(invalid("gram", "matrix must be square with one center per row"));
    }
    if m < 8 {
        return Err(invalid("gram", format!("need at least 8 members, got {m}")));
    }
    let mut bins: Vec<Option<(f64, f64)>> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let dist = centers[i].distance(&centers[j]);
            if max_distance.is_some_and(|cap| dist > cap) {
                continue;
            }
            let b = dist.floor() as usize;
            if bins.len() <= b {
                bins.resize(b + 1, None);
            }
            let v = g[(i, j)].norm();
            match &mut bins[b] {
                Some((d, best)) if v > *best || (v == *best && dist < *d) => {
                    *d = dist;
                    *best = v;
                }
                Some(_) => {}
                slot @ None => *slot = Some((dist, v)),
            }
        }
    }
    let bins: Vec<(f64, f64)> = bins.into_iter().flatten().collect();
    if bins.len() < 4 {
        return Err(Error::TooFewBins {
            found: bins.len(),
            needed: 4,
        });
    }
    let usable: Vec<(f64, f64)> = bins
        .iter()
        .filter(|(_, v)| *v > FIT_FLOOR)
        .map(|(d, v)| ((1.0 + d).ln(), v.ln()))
        .collect();
    if usable.len() < 2 {
        return Ok(DecayFit {
            exponent: f64::INFINITY,
            constant: FIT_FLOOR,
            r_squared: 1.0,
            bins,
        });
    }
    let k = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewBins {
            found: 1,
            needed: 2,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = usable.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(DecayFit {
        exponent: -slope,
        constant: intercept.exp(),
        r_squared,
        bins,
    })
}

/// Decay fits of the Gramian and of its inverse (the dual Gramian).
///
/// Rejects systems whose primal fit does not exceed `s_threshold`.
pub fn dual_localization_check(sys: &FunctionSystem, s_threshold: f64) -> Result<(DecayFit, DecayFit)> {
    let g = gramian(sys);
    let primal = localization_fit(&g, sys.centers(), None)?;
    if primal.exponent <= s_threshold {
        return Err(Error::Precondition(format!(
            "primal decay exponent {:.3} does not exceed the threshold {s_threshold}",
            primal.exponent
        )));
    }
    let dual = localization_fit(&inverse_gram(&g)?, sys.centers(), None)?;
    Ok((primal, dual))
}

/// `Σ_j (x_j f, ∂_j g) + (∂_j f, x_j g)`, which equals `−d (f, g)` for nice `f, g`.
pub fn commutator_pair(f: &SampledFunction, g: &SampledFunction) -> Result<C64> {
    f.grid().ensure_same(g.grid())?;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..f.grid().dim() {
        acc += inner_product(&f.times_coordinate(j), &derivative(g, j))?;
        acc += inner_product(&derivative(f, j), &g.times_coordinate(j))?;
    }
    Ok(acc)
}

/// Coefficients `c_m^n = (x_j f_n, g_m)` and `d_m^n = (2πi)^{-1}(∂_j f_n, g_m)`
/// of a biorthogonal pair, with the per-member identity residuals.
#[derive(Debug, Clone)]
pub struct CommutationLedger {
    /// `c[j][(n, m)] = (x_j f_n, g_m)`.
    pub c: Vec<CMatrix>,
    /// `dcoef[j][(n, m)] = (2πi)^{-1}(∂_j f_n, g_m)`.
    pub dcoef: Vec<CMatrix>,
    /// `2πi Σ_j Σ_m (c_m^n d_n^m − d_m^n c_n^m)` per member; equals `d` for a complete system.
    pub per_n_sum: Vec<C64>,
    /// `|d − per_n_sum[n]|`.
    pub per_n_identity_residual: Vec<f64>,
    /// `(Σ_j ‖x_j f_n − Σ_m c_m^n f_m‖²)^{1/2}`: the part of `x f_n` the finite system misses.
    pub truncation_defect: Vec<f64>,
    pub truncated_sum: C64,
}

/// Biorthogonality tolerance required by [`commutation_ledger`].
pub const LEDGER_BIORTHOGONALITY_TOL: f64 = 1e-6;

pub fn commutation_ledger(sys: &FunctionSystem, dual: &FunctionSystem) -> Result<CommutationLedger> {
    let defect = biorthogonality_defect(sys, dual)?;
    if defect > LEDGER_BIORTHOGONALITY_TOL {
        return Err(Error::NotBiorthogonal { defect });
    }
    if sys.members.iter().any(|f| f.tail_fraction() > crate::localization::TAIL_WARNING_LEVEL) {
        log::warn!("commutation ledger: some members reach the box boundary; moments may be truncated");
    }
    let d = sys.grid().dim();
    let m = sys.len();
    let inv_2pi_i = C64::new(0.0, -1.0 / (2.0 * PI));
    let mut c = Vec::with_capacity(d);
    let mut dcoef = Vec::with_capacity(d);
    let mut defect_sq = vec![0.0; m];
    for j in 0..d {
        let xf: Vec<SampledFunction> = sys.members.par_iter().map(|f| f.times_coordinate(j)).collect();
        let df: Vec<SampledFunction> = sys.members.par_iter().map(|f| derivative(f, j)).collect();
        let table = |src: &[SampledFunction], scale: C64| -> CMatrix {
            let rows: Vec<Vec<C64>> = src
                .par_iter()
                .map(|h| {
                    dual.members
                        .iter()
                        .map(|gm| inner_product(h, gm).expect("common grid") * scale)
                        .collect()
                })
                .collect();
            CMatrix::from_fn(m, m, |n, k| rows[n][k])
        };
        let cj = table(&xf, C64::new(1.0, 0.0));
        let dj = table(&df, inv_2pi_i);
        let recon = synthesize(sys, &cj.transpose(), &(0..m).collect::<Vec<_>>());
        for n in 0..m {
            defect_sq[n] += xf[n].sub(&recon[n])?.norm_sqr();
        }
        c.push(cj);
        dcoef.push(dj);
    }
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let per_n_sum: Vec<C64> = (0..m)
        .map(|n| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..d {
                for k in 0..m {
                    acc += c[j][(n, k)] * dcoef[j][(k, n)] - dcoef[j][(n, k)] * c[j][(k, n)];
                }
            }
            two_pi_i * acc
        })
        .collect();
    let target = C64::new(d as f64, 0.0);
    Ok(CommutationLedger {
        per_n_identity_residual: per_n_sum.iter().map(|s| (target - s).norm()).collect(),
        truncated_sum: per_n_sum.iter().sum(),
        per_n_sum,
        truncation_defect: defect_sq.into_iter().map(f64::sqrt).collect(),
        c,
        dcoef,
    })
}

impl CommutationLedger {
    pub fn len(&self) -> usize {
        self.per_n_sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_n_sum.is_empty()
    }

    /// `Σ_{(n,m) ∈ region} Σ_j |c_m^n||d_n^m| + |d_m^n||c_n^m|`.
    pub fn offdiagonal_tail(&self, region: impl Fn(usize, usize) -> bool) -> f64 {
        let m = self.len();
        let mut acc = 0.0;
        for n in 0..m {
            for k in 0..m {
                if !region(n, k) {
                    continue;
                }
                for j in 0..self.c.len() {
                    acc += self.c[j][(n, k)].norm() * self.dcoef[j][(k, n)].norm()
                        + self.dcoef[j][(n, k)].norm() * self.c[j][(k, n)].norm();
                }
            }
        }
        acc
    }
}

/// [`CommutationLedger::offdiagonal_tail`] computed from the pair directly.
pub fn offdiagonal_tail(
    sys: &FunctionSystem,
    dual: &FunctionSystem,
    region: impl Fn(usize, usize) -> bool,
) -> Result<f64> {
    Ok(commutation_ledger(sys, dual)?.offdiagonal_tail(region))
}

/// Long-format CSV `m,n,re,im` of a matrix.
pub fn write_matrix_csv(path: impl AsRef<Path>, g: &CMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "n", "re", "im"])?;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let v = g[(i, j)];
            w.write_record([i.to_string(), j.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path.as_ref(), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gaussian_window, hermite_functions, tf_shift};
    use crate::linalg::identity_defect;

    fn hermite_system(m: usize) -> FunctionSystem {
        let grid = GridSpec::new(1, 256, 1.0 / 16.0).unwrap();
        let hs = hermite_functions(&grid, m).unwrap();
        FunctionSystem::new("hermite", hs, vec![PhasePoint::origin(1); m]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert!(FunctionSystem::new("empty", vec![], vec![]).is_err());
        let sys = hermite_system(2);
        assert!(FunctionSystem::new("x", sys.members().to_vec(), vec![PhasePoint::origin(1)]).is_err());
        let other = gaussian_window(&GridSpec::new(1, 128, 1.0 / 16.0).unwrap());
        assert!(FunctionSystem::new("x", vec![sys.members()[0].clone(), other], vec![PhasePoint::origin(1); 2]).is_err());
    }

    #[test]
    fn hermite_gram_and_bounds() {
        let sys = hermite_system(12);
        let g = gramian(&sys);
        assert!(identity_defect(&g) < 1e-8);
        let b = frame_bounds(&sys);
        assert!((b.lower - 1.0).abs() < 1e-8 && (b.upper - 1.0).abs() < 1e-8);
        assert!(!b.as_frame_on_span);
        let dual = dual_system(&sys).unwrap();
        for (f, g) in sys.members().iter().zip(dual.members()) {
            assert!(f.sub(g).unwrap().norm() < 1e-10);
        }
        let tight = canonical_tight(&sys).unwrap();
        for (f, g) in sys.members().iter().zip(tight.members()) {
            assert!(f.sub(g).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn hand_computed_dual_pair() {
        let sys = hermite_system(2);
        let (e1, e2) = (&sys.members()[0], &sys.members()[1]);
        let pair = FunctionSystem::new("pair", vec![e1.clone(), e1.add(e2).unwrap()], sys.centers().to_vec()).unwrap();
        let dual = dual_system(&pair).unwrap();
        assert!(dual.members()[0].sub(&e1.sub(e2).unwrap()).unwrap().norm() < 1e-10);
        assert!(dual.members()[1].sub(e2).unwrap().norm() < 1e-10);
        let back = dual_system(&dual).unwrap();
        for (f, g) in pair.members().iter().zip(back.members()) {
            assert!(f.sub(g).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn singular_gram_is_rejected() {
        let sys = hermite_system(1);
        let f = sys.members()[0].clone();
        let twice = FunctionSystem::new("dup", vec![f.clone(), f], vec![PhasePoint::origin(1); 2]).unwrap();
        assert!(matches!(dual_system(&twice), Err(Error::IllConditioned { .. })));
        let b = frame_bounds(&twice);
        assert!(b.as_frame_on_span && b.rank == 1);
        assert!((b.upper - 2.0).abs() < 1e-10 && (b.lower - 2.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_pair_commutator() {
        let g = gaussian_window(&GridSpec::new(1, 256, 1.0 / 16.0).unwrap());
        let v = commutator_pair(&g, &g).unwrap();
        assert!((v + 1.0).norm() < 1e-6);
    }

    #[test]
    fn ledger_rejects_non_biorthogonal_pair() {
        let sys = hermite_system(4);
        let g = gaussian_window(sys.grid());
        let shifted = tf_shift(&g, &PhasePoint::d1(1.0, 0.0)).unwrap();
        let wrong = FunctionSystem::new("w", vec![shifted; 4], sys.centers().to_vec()).unwrap();
        assert!(matches!(commutation_ledger(&sys, &wrong), Err(Error::NotBiorthogonal { .. })));
    }

    #[test]
    fn diagonal_gram_fit_is_infinite() {
        let centers: Vec<PhasePoint> = (0..10).map(|i| PhasePoint::d1(i as f64, 0.0)).collect();
        let g = CMatrix::identity(10, 10);
        let fit = localization_fit(&g, &centers, None).unwrap();
        assert!(fit.exponent.is_infinite());
        assert!(localization_fit(&CMatrix::identity(4, 4), &centers[..4], None).is_err());
        let near: Vec<PhasePoint> = (0..10).map(|i| PhasePoint::d1(0.1 * i as f64, 0.0)).collect();
        assert!(matches!(localization_fit(&g, &near, None), Err(Error::TooFewBins { .. })));
    }
}
