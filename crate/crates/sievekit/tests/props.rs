//! Structural properties that must hold for every basis and seed: coordinate
//! arithmetic is exact integer linear algebra, samplers only ever emit lattice
//! members, reduction preserves the lattice, and file round trips are lossless.

use proptest::prelude::*;
use sievekit::lattice::{lll, random_lattice, sample_lattice_vector, Basis};

/// Exact coordinate reconstruction: entries and coefficients are small enough
/// that every product and partial sum stays inside the f64 integer range.
fn combine(basis: &Basis, coeffs: &[i64]) -> Vec<f64> {
    let dim = basis.dim();
    let mut coords = vec![0.0; dim];
    for (c, row) in coeffs.iter().zip(basis.rows()) {
        for (acc, x) in coords.iter_mut().zip(row) {
            *acc += (*c as f64) * (*x as f64);
        }
    }
    coords
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vector_coords_are_the_integer_row_combination(
        dim in 2usize..=8,
        seed in 0u64..1_000_000,
        raw_coeffs in prop::collection::vec(-20i64..=20, 8),
    ) {
        let basis = random_lattice(dim, seed).unwrap();
        let coeffs = &raw_coeffs[..dim];
        let v = basis.vector(coeffs.to_vec());
        let expect = combine(&basis, coeffs);
        prop_assert_eq!(v.coords(), expect.as_slice());
        let norm_sq: f64 = v.coords().iter().map(|x| x * x).sum();
        prop_assert_eq!(v.norm_sq(), norm_sq);
    }

    #[test]
    fn sampled_vectors_are_lattice_members(
        dim in 2usize..=8,
        seed in 0u64..1_000_000,
        spread in 1.0f64..64.0,
    ) {
        let basis = random_lattice(dim, seed).unwrap();
        let v = sample_lattice_vector(&basis, seed, spread);
        let expect = combine(&basis, v.coeffs());
        prop_assert_eq!(v.coords(), expect.as_slice());
    }

    #[test]
    fn reduction_preserves_the_lattice(
        dim in 2usize..=8,
        seed in 0u64..1_000_000,
        raw_coeffs in prop::collection::vec(-5i64..=5, 8),
    ) {
        let basis = random_lattice(dim, seed).unwrap();
        let reduced = lll(&basis).unwrap();

        // Same determinant (up to float roundoff in the log).
        let orig_det = basis.gram_schmidt().det_log2();
        let red_det = reduced.basis().gram_schmidt().det_log2();
        prop_assert!((orig_det - red_det).abs() < 1e-6);

        // Every reduced row is the recorded integer combination of the
        // original rows, exactly.
        for (row, combo) in reduced.basis().rows().iter().zip(reduced.transform()) {
            let rebuilt = basis.vector(combo.clone());
            let as_f64: Vec<f64> = row.iter().map(|&x| x as f64).collect();
            prop_assert_eq!(rebuilt.coords(), as_f64.as_slice());
        }

        // Coefficients against the reduced basis rewrite to coefficients
        // against the original basis without moving the point.
        let coeffs = &raw_coeffs[..dim];
        let in_reduced = reduced.basis().vector(coeffs.to_vec());
        let rewritten = basis.vector(reduced.to_original_coeffs(coeffs));
        prop_assert_eq!(in_reduced.coords(), rewritten.coords());
    }

    #[test]
    fn basis_files_round_trip(
        dim in 2usize..=8,
        seed in 0u64..1_000_000,
    ) {
        let basis = random_lattice(dim, seed).unwrap();
        let text = basis.to_file_string();
        let back = Basis::parse(&text).unwrap();
        prop_assert_eq!(basis.rows(), back.rows());
        prop_assert_eq!(basis.fingerprint(), back.fingerprint());
    }
}
