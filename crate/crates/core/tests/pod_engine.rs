//! POD engine against nalgebra's dense SVD.

mod common;

use common::{eckart_young_gap, graded_matrix, random_matrix, route_gap, sigma_gap};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use solidrom::cases1d::gen_advected_jump;
use solidrom::grid_field::{FieldLayout, Grid1D, SnapshotMatrix};
use solidrom::pod::{decompose, decompose_matrix, modes_for_energy, PodSpectrum, SvdMethod};

fn assert_sigma_close(a: &[f64], b: &[f64], rel: f64) {
    let gap = sigma_gap(a, b);
    assert!(gap <= rel, "relative gap {gap:e}");
}

#[test]
fn snapshots_and_direct_agree_on_random_matrices() {
    let mut rng = StdRng::seed_from_u64(7);
    for (rows, cols) in [(200, 100), (100, 200), (64, 64), (150, 3), (1, 40), (37, 1)] {
        let gap = route_gap(&random_matrix(&mut rng, rows, cols));
        assert!(gap <= 1e-8, "{rows}x{cols}: {gap:e}");
    }
}

#[test]
fn snapshots_and_direct_agree_on_the_jump() {
    let m = gen_advected_jump(&Grid1D::unit(256).unwrap(), 128).unwrap();
    let d = decompose(&m, SvdMethod::Direct).unwrap();
    let s = decompose(&m, SvdMethod::MethodOfSnapshots).unwrap();
    assert_sigma_close(d.spectrum().sigma(), s.spectrum().sigma(), 1e-8);
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = StdRng::seed_from_u64(11);
    let x = random_matrix(&mut rng, 90, 40);
    let mut oracle: Vec<f64> = x
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    oracle.sort_by(|a, b| b.total_cmp(a));
    let s = decompose_matrix(&x, SvdMethod::MethodOfSnapshots, "x").unwrap();
    assert_sigma_close(&oracle, s.spectrum().sigma(), 1e-8);
}

#[test]
fn modes_and_coefficients_are_orthonormal() {
    let mut rng = StdRng::seed_from_u64(3);
    let x = random_matrix(&mut rng, 120, 30);
    for method in [SvdMethod::Direct, SvdMethod::MethodOfSnapshots] {
        let b = decompose_matrix(&x, method, "x").unwrap();
        let r = b.rank();
        let gram = b.modes().transpose() * b.modes();
        assert!((gram - DMatrix::identity(r, r)).amax() < 1e-10);
        let c = b.normalized_coeffs();
        let gram = &c * c.transpose();
        assert!((gram - DMatrix::identity(r, r)).amax() < 1e-10);
        assert!((b.reconstruct() - &x).norm() <= 1e-10 * x.norm());
    }
}

#[test]
fn truncation_error_is_the_tail_energy() {
    let mut rng = StdRng::seed_from_u64(5);
    for (rows, cols) in [(64, 64), (64, 20), (20, 64)] {
        let x = graded_matrix(&mut rng, rows, cols);
        let gap = eckart_young_gap(&x, &[1, 3, 10, 19]);
        assert!(gap <= 1e-8, "{rows}x{cols}: {gap:e}");
        let b = decompose_matrix(&x, SvdMethod::Auto, "x").unwrap();
        let total = x.norm_squared();
        assert!((b.spectrum().tail_energy(0) - total).abs() <= 1e-10 * total);
    }
}

#[test]
fn scaling_leaves_normalized_spectrum_unchanged() {
    let m = gen_advected_jump(&Grid1D::unit(64).unwrap(), 40).unwrap();
    let base = decompose(&m, SvdMethod::Direct).unwrap();
    for c in [0.25, 4.0, 1024.0] {
        let scaled = SnapshotMatrix::new(
            m.data() * c,
            FieldLayout::single("u", 64).unwrap(),
            m.labels().to_vec(),
        )
        .unwrap();
        let b = decompose(&scaled, SvdMethod::Direct).unwrap();
        for (s, t) in base.spectrum().sigma().iter().zip(b.spectrum().sigma()) {
            assert!((s * c - t).abs() <= 1e-12 * t.max(1.0));
        }
        assert_eq!(
            modes_for_energy(base.spectrum(), 0.9999)
                .unwrap()
                .modes_needed,
            modes_for_energy(b.spectrum(), 0.9999).unwrap().modes_needed
        );
    }
}

#[test]
fn hand_spectrum() {
    let s = PodSpectrum::new(vec![3.0, 2.0, 1.0], "hand").unwrap();
    assert_eq!(modes_for_energy(&s, 0.9).unwrap().modes_needed, 2);
}

proptest! {
    #[test]
    fn energy_count_is_monotone_in_threshold(
        sigma in prop::collection::vec(0.0f64..10.0, 1..40),
        a in 0.01f64..1.0,
        b in 0.01f64..1.0,
    ) {
        let mut sigma = sigma;
        sigma.sort_by(|x, y| y.total_cmp(x));
        prop_assume!(sigma[0] > 0.0);
        let s = PodSpectrum::new(sigma, "p").unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let n_lo = modes_for_energy(&s, lo).unwrap().modes_needed;
        let n_hi = modes_for_energy(&s, hi).unwrap().modes_needed;
        prop_assert!(n_lo <= n_hi);
        prop_assert!(n_hi <= s.len());
    }

    #[test]
    fn both_routes_agree_on_small_random_matrices(
        rows in 1usize..30,
        cols in 1usize..30,
        seed in any::<u64>(),
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        prop_assert!(route_gap(&random_matrix(&mut rng, rows, cols)) <= 1e-8);
    }
}
