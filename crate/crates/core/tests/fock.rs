//! Riesz bounds of normalized Fock kernels and their Gabor counterparts.

use std::f64::consts::PI;

use proptest::prelude::*;
use pslab_core::corpus::gabor_system;
use pslab_core::fock::*;
use pslab_core::frames::frame_bounds;
use pslab_core::grid::{GridSpec, C64};
use pslab_core::stft::kernel_center;

#[test]
fn pair_spectrum_is_closed_form() {
    for rho in [0.3, 0.8, 1.5] {
        let set = FockPointSet::new(vec![C64::new(-0.1, 0.4), C64::new(-0.1, 0.4) + C64::from_polar(rho, 2.0)], 3.0).unwrap();
        let (a, b) = sampling_bounds(&set).unwrap();
        let off = (-PI * rho * rho / 2.0).exp();
        assert!((a - (1.0 - off)).abs() < 1e-12 && (b - (1.0 + off)).abs() < 1e-12);
    }
}

#[test]
fn kernels_match_gabor_gram() {
    let set = FockPointSet::square_lattice(1.25, 4.0).unwrap();
    let (a, b) = sampling_bounds(&set).unwrap();
    let grid = GridSpec::new(1, 256, 1.0 / 16.0).unwrap();
    let centers = set.points().iter().map(|&w| kernel_center(w)).collect();
    let gabor = frame_bounds(&gabor_system(&grid, centers, "bridge").unwrap());
    assert!((gabor.lower / a - 1.0).abs() < 0.05, "{} vs {a}", gabor.lower);
    assert!((gabor.upper / b - 1.0).abs() < 0.05, "{} vs {b}", gabor.upper);
}

#[test]
fn sweep_orders_bounds() {
    let alphas = [2.0, 1.5, 1.2, 1.0, 0.8];
    let rows = lattice_sweep(&alphas, 4.0).unwrap();
    for (row, alpha) in rows.iter().zip(alphas) {
        assert_eq!(row.alpha, alpha);
        assert!(row.upper >= row.lower && row.lower > 0.0);
        assert!((row.condition - row.upper / row.lower).abs() < 1e-9 * row.condition);
    }
    assert!(rows.windows(2).all(|w| w[1].lower < w[0].lower), "{rows:?}");
}

#[test]
fn dense_lattices_lose_the_lower_bound() {
    let small = sampling_bounds(&FockPointSet::square_lattice(0.8, 3.0).unwrap()).unwrap().0;
    let large = sampling_bounds(&FockPointSet::square_lattice(0.8, 6.0).unwrap()).unwrap().0;
    assert!(large < small, "{large} vs {small}");
}

#[test]
fn csv_round_trip() {
    let set = FockPointSet::square_lattice(1.1, 3.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("points.csv");
    set.store_csv(&path).unwrap();
    assert_eq!(FockPointSet::load_csv(&path, 3.0).unwrap(), set);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bounds_are_translation_invariant(re in -2.0f64..2.0, im in -2.0f64..2.0, alpha in 0.9f64..1.6) {
        let set = FockPointSet::square_lattice(alpha, 3.0).unwrap();
        let moved = set.translated(C64::new(re, im)).unwrap();
        let (g0, g1) = (fock_gram(&set).unwrap(), fock_gram(&moved).unwrap());
        for (x, y) in g0.matrix.iter().zip(g1.matrix.iter()) {
            prop_assert!((x.norm() - y.norm()).abs() < 1e-12);
        }
        prop_assert!((g0.lower - g1.lower).abs() < 1e-9 && (g0.upper - g1.upper).abs() < 1e-9);
    }
}
