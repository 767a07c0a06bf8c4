//! Gramians, duals, tight systems, decay fits and the commutation ledger.

use std::f64::consts::PI;

use proptest::prelude::*;
use pslab_core::corpus::{corpus, lattice_centers, Recipe};
use pslab_core::frames::*;
use pslab_core::grid::*;
use pslab_core::linalg::{hermitian_eigen, CMatrix};
use pslab_core::localization::{moment, optimal_center, Side};

fn grid() -> GridSpec {
    GridSpec::new(1, 256, 1.0 / 16.0).unwrap()
}

fn hermite_system(grid: &GridSpec, count: usize) -> FunctionSystem {
    corpus(&Recipe::HermiteOnb { count }, grid, 0).unwrap()
}

fn jittered(seed: u64) -> FunctionSystem {
    let grid = GridSpec::new(1, 512, 1.0 / 16.0).unwrap();
    let r = Recipe::JitteredGabor {
        alpha: 2f64.sqrt(),
        beta: 2f64.sqrt(),
        jitter: 0.1,
        extent: 10.0,
    };
    corpus(&r, &grid, seed).unwrap()
}

#[test]
fn gaussian_gram_modulus_is_closed_form() {
    let sys = corpus(&Recipe::GaborGaussian { alpha: 0.75, beta: 1.25, extent: 3.0 }, &grid(), 0).unwrap();
    let g = gramian(&sys);
    let c = sys.centers();
    for m in 0..sys.len() {
        for n in 0..sys.len() {
            let rho = c[m].distance(&c[n]);
            assert!((g[(m, n)].norm() - (-PI * rho * rho / 2.0).exp()).abs() < 1e-10);
            assert!((g[(m, n)] - g[(n, m)].conj()).norm() < 1e-14);
        }
    }
}

#[test]
fn scaled_basis_bounds_and_duals() {
    let hs = hermite_system(&grid(), 6);
    let scale = [0.5, 0.8, 1.0, 1.3, 1.7, 2.0];
    let members: Vec<_> = hs.members().iter().zip(scale).map(|(h, t)| h.scaled(C64::new(t, 0.0))).collect();
    let sys = FunctionSystem::new("scaled", members, hs.centers().to_vec()).unwrap();
    let b = frame_bounds(&sys);
    assert!((b.lower - 0.25).abs() < 1e-8 && (b.upper - 4.0).abs() < 1e-8 && !b.as_frame_on_span);
    let dual = dual_system(&sys).unwrap();
    for ((d, h), t) in dual.members().iter().zip(hs.members()).zip(scale) {
        assert!(d.sub(&h.scaled(C64::new(1.0 / t, 0.0))).unwrap().norm() < 1e-8);
    }
    let back = dual_system(&dual).unwrap();
    for (x, y) in back.members().iter().zip(sys.members()) {
        assert!(x.sub(y).unwrap().norm() < 1e-8);
    }
}

#[test]
fn jittered_system_is_biorthogonal() {
    let sys = jittered(1);
    assert!(sys.len() >= 49);
    let dual = dual_system(&sys).unwrap();
    assert!(biorthogonality_defect(&sys, &dual).unwrap() < 1e-8);
}

#[test]
fn three_member_lowdin() {
    let g = gaussian_window(&grid());
    let members: Vec<_> = [(0.0, 0.0), (0.5, 0.25), (-0.25, 0.75)]
        .iter()
        .map(|&(a, b)| tf_shift(&g, &PhasePoint::d1(a, b)).unwrap())
        .collect();
    let centers = vec![PhasePoint::origin(1); 3];
    let sys = FunctionSystem::new("three", members, centers).unwrap();
    let tight = canonical_tight(&sys).unwrap();
    let gt = gramian(&tight);
    assert!((gt - CMatrix::identity(3, 3)).norm() < 1e-10);
    // (f_n, t_m) is the positive square root of G: Hermitian with positive spectrum
    let cross = CMatrix::from_fn(3, 3, |m, n| inner_product(&sys.members()[n], &tight.members()[m]).unwrap());
    assert!((&cross - cross.adjoint()).norm() < 1e-10);
    assert!(hermitian_eigen(&cross).min() > 0.0);
    assert!((&cross * &cross - gramian(&sys)).norm() < 1e-10);
    for i in 0..3 {
        let single = canonical_tight_member(&sys, i).unwrap();
        assert!(single.sub(&tight.members()[i]).unwrap().norm() < 1e-10);
    }
}

#[test]
fn tight_central_member_is_less_concentrated() {
    let grid = GridSpec::new(1, 512, 1.0 / 16.0).unwrap();
    let sys = corpus(&Recipe::GaborGaussian { alpha: 1.0, beta: 1.0, extent: 6.0 }, &grid, 0).unwrap();
    let centre = sys.nearest_member(&PhasePoint::origin(1));
    let tight = canonical_tight(&sys).unwrap();
    let b = frame_bounds(&tight);
    assert!((b.lower - 1.0).abs() < 1e-8 && (b.upper - 1.0).abs() < 1e-8);
    let h = tight.members()[centre].normalized().unwrap();
    let g = gaussian_window(&grid);
    let freq = |f: &SampledFunction| optimal_center(f, 1.0, Side::Frequency).unwrap().1;
    assert!(freq(&h) > freq(&g), "{} vs {}", freq(&h), freq(&g));
    // Heisenberg: only Gaussians attain the product bound
    let time = |f: &SampledFunction| moment(f, &[0.0], 1.0, Side::Time).unwrap();
    assert!(time(&h) * freq(&h) > 1.0 / (16.0 * PI * PI));
}

fn synthetic_gram(centers: &[PhasePoint], s: f64) -> CMatrix {
    CMatrix::from_fn(centers.len(), centers.len(), |m, n| {
        C64::new((1.0 + centers[m].distance(&centers[n])).powf(-s), 0.0)
    })
}

#[test]
fn power_law_fits() {
    let centers = lattice_centers(1.0, 1.0, 10.0).unwrap();
    let fit = localization_fit(&synthetic_gram(&centers, 4.0), &centers, None).unwrap();
    assert!((fit.exponent - 4.0).abs() < 0.05, "{fit:?}");

    let g5 = synthetic_gram(&centers, 5.0);
    let inv = inverse_gram(&g5).unwrap();
    let dual = localization_fit(&inv, &centers, None).unwrap();
    assert!(dual.exponent >= 4.5, "{dual:?}");

    // unequal spacings put pairs just past distance 4, above the fit floor
    let sys = corpus(&Recipe::GaborGaussian { alpha: 0.75, beta: 0.7, extent: 9.0 }, &grid(), 0).unwrap();
    let gauss = gramian(&sys);
    let near = localization_fit(&gauss, sys.centers(), Some(4.0)).unwrap();
    let far = localization_fit(&gauss, sys.centers(), Some(8.0)).unwrap();
    assert!(far.exponent > near.exponent, "{} vs {}", far.exponent, near.exponent);
}

#[test]
fn jittered_dual_stays_localized() {
    let sys = jittered(1);
    let (primal, dual) = dual_localization_check(&sys, 2.0).unwrap();
    assert!(primal.exponent >= 6.0);
    assert!(dual.exponent >= 4.0, "{dual:?}");
    let onb = hermite_system(&grid(), 8);
    assert!(dual_localization_check(&onb, 2.0).is_err() || {
        let (p, d) = dual_localization_check(&onb, 2.0).unwrap();
        p.exponent.is_infinite() && d.exponent.is_infinite()
    });
}

#[test]
fn commutator_pairs() {
    let hs = hermite_system(&grid(), 3);
    let [h0, h1, h2] = [&hs.members()[0], &hs.members()[1], &hs.members()[2]];
    assert!(commutator_pair(h0, h2).unwrap().norm() < 1e-6);
    assert!((commutator_pair(h1, h1).unwrap() + 1.0).norm() < 1e-6);
}

/// `|(x h_n, h_m)|` and `|(2πi)^{-1}(h_n', h_m)|` from the three-term recurrences.
fn hermite_moduli(n: usize, m: usize) -> (f64, f64) {
    let (nf, mf) = (n as f64, m as f64);
    if m == n + 1 {
        ((mf / (4.0 * PI)).sqrt(), (PI * mf).sqrt() / (2.0 * PI))
    } else if n == m + 1 {
        ((nf / (4.0 * PI)).sqrt(), (PI * nf).sqrt() / (2.0 * PI))
    } else {
        (0.0, 0.0)
    }
}

#[test]
fn hermite_ledger_matches_recurrences() {
    let m = 32;
    let sys = hermite_system(&grid(), m);
    let ledger = commutation_ledger(&sys, &sys).unwrap();
    let mut brute = 0.0;
    for n in 0..m {
        for k in 0..m {
            if n == k {
                continue;
            }
            let (c_nk, d_nk) = hermite_moduli(n, k);
            let (c_kn, d_kn) = hermite_moduli(k, n);
            brute += c_nk * d_kn + d_nk * c_kn;
        }
    }
    let tail = ledger.offdiagonal_tail(|n, k| n != k);
    assert!((tail - brute).abs() < 1e-6 * brute, "{tail} vs {brute}");
    assert_eq!(ledger.offdiagonal_tail(|_, _| false), 0.0);
}

#[test]
fn hermite_ledger_residual_profile() {
    let sys = hermite_system(&grid(), 64);
    let ledger = commutation_ledger(&sys, &sys).unwrap();
    let r = &ledger.per_n_identity_residual;
    let interior = r[..=16].iter().sum::<f64>() / 17.0;
    assert!(interior < 0.05, "{interior}");
    assert!(r[63] > interior && r[63] > 1.0, "{:?}", &r[60..]);
    assert!(ledger.truncation_defect[63] > ledger.truncation_defect[16]);
}

#[test]
fn ledger_rejects_non_biorthogonal_pairs() {
    let sys = jittered(2);
    assert!(matches!(
        commutation_ledger(&sys, &sys),
        Err(pslab_core::Error::NotBiorthogonal { .. })
    ));
}

#[test]
fn gaussian_system_tail_is_a_boundary_effect() {
    let sys = jittered(3);
    let dual = dual_system(&sys).unwrap();
    let ledger = commutation_ledger(&sys, &dual).unwrap();
    let inside = |r: f64| -> Vec<bool> {
        sys.centers().iter().map(|c| c.a[0].abs() < r && c.b[0].abs() < r).collect()
    };
    let mut per_member = Vec::new();
    for r in [1.0, 2.0, 3.5] {
        let mask = inside(r);
        let count = mask.iter().filter(|x| **x).count() as f64;
        let tail = ledger.offdiagonal_tail(|n, m| mask[n] && !mask[m]);
        let direct = offdiagonal_tail(&sys, &dual, |n, m| mask[n] && !mask[m]).unwrap();
        assert!((tail - direct).abs() < 1e-12);
        per_member.push(tail / count);
    }
    assert!(per_member.windows(2).all(|w| w[1] < w[0]), "{per_member:?}");
}

#[test]
fn system_directory_round_trip() {
    let sys = jittered(4);
    let dir = tempfile::tempdir().unwrap();
    sys.save_dir(dir.path()).unwrap();
    let back = FunctionSystem::load_dir(dir.path()).unwrap();
    assert_eq!(back.label(), sys.label());
    assert_eq!(back.centers(), sys.centers());
    for (x, y) in back.members().iter().zip(sys.members()) {
        assert!(x.sub(y).unwrap().norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fits_ignore_labeling(perm in Just((0..25).collect::<Vec<usize>>()).prop_shuffle()) {
        let centers = lattice_centers(1.0, 1.0, 4.0).unwrap();
        let g = synthetic_gram(&centers, 3.0);
        let pc: Vec<_> = perm.iter().map(|&i| centers[i].clone()).collect();
        let pg = CMatrix::from_fn(25, 25, |m, n| g[(perm[m], perm[n])]);
        let (a, b) = (localization_fit(&g, &centers, None).unwrap(), localization_fit(&pg, &pc, None).unwrap());
        prop_assert!((a.exponent - b.exponent).abs() < 1e-12);
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-12);
        let (fa, fb) = (frame_bounds_of_gram(&g), frame_bounds_of_gram(&pg));
        prop_assert!((fa.lower - fb.lower).abs() < 1e-10 && (fa.upper - fb.upper).abs() < 1e-10);
    }
}
