//! Basis reduction.
//!
//! Construction-style random bases arrive with one huge row and a wildly
//! unbalanced orthogonalized profile, which cripples every rounding-based
//! routine run on them: nearest-plane steps and randomized sampling are
//! limited by the largest orthogonalized norm. Reduction rebalances the
//! profile without changing the lattice, and the unimodular transform is kept
//! so results on the reduced rows can be expressed in original-basis
//! coefficients.

use super::{gram_schmidt, Basis, LatticeError};

/// Lovász parameter used by [`lll`]. The near-1 choice gives the strongest
/// profile balance the reduction can certify.
const LLL_DELTA: f64 = 0.99;
/// Safety cap on main-loop iterations; the reduction provably terminates long
/// before this at desk scale.
const MAX_PASSES: usize = 10_000_000;

/// A reduced basis for the same lattice, together with the coefficients of
/// each reduced row in terms of the original basis.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    basis: Basis,
    transform: Vec<Vec<i64>>,
}

impl ReducedBasis {
    /// The reduced rows as a basis (generates the same lattice).
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Row `i` of the reduced basis written in original-basis coefficients.
    pub fn transform(&self) -> &[Vec<i64>] {
        &self.transform
    }

    /// Rewrite a coefficient vector over the reduced rows as a coefficient
    /// vector over the original basis.
    pub fn to_original_coeffs(&self, reduced_coeffs: &[i64]) -> Vec<i64> {
        let dim = self.basis.dim();
        assert_eq!(reduced_coeffs.len(), dim, "coefficient length mismatch");
        let mut out = vec![0i64; dim];
        for (c, row) in reduced_coeffs.iter().zip(&self.transform) {
            if *c != 0 {
                for (o, &e) in out.iter_mut().zip(row) {
                    *o += c * e;
                }
            }
        }
        out
    }
}

/// Lenstra-Lenstra-Lovász reduction with Lovász parameter 0.99.
///
/// Exact integer row operations; orthogonalization data is floating-point,
/// which is ample for desk-scale integer bases. The result generates the same
/// lattice (rows are integer combinations both ways, witnessed by the kept
/// transform).
pub fn lll(basis: &Basis) -> Result<ReducedBasis, LatticeError> {
    let n = basis.dim();
    let mut rows: Vec<Vec<i64>> = basis.rows().to_vec();
    let mut transform: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut gs = gram_schmidt(&rows)?;
    let mut k = 1;
    let mut passes = 0usize;
    while k < n {
        passes += 1;
        if passes > MAX_PASSES {
            return Err(LatticeError::SearchBudget(format!(
                "basis reduction exceeded {MAX_PASSES} passes"
            )));
        }
        // Size-reduce row k against rows below it, updating the projection
        // coefficients in place (the orthogonalized vectors are unchanged).
        let mut changed = false;
        for j in (0..k).rev() {
            let q = gs.mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (lo, hi) = rows.split_at_mut(k);
                for (a, &b) in hi[0].iter_mut().zip(&lo[j]) {
                    *a -= qi * b;
                }
                let (lo, hi) = transform.split_at_mut(k);
                for (a, &b) in hi[0].iter_mut().zip(&lo[j]) {
                    *a -= qi * b;
                }
                for i in 0..j {
                    let m = gs.mu[j][i];
                    gs.mu[k][i] -= q * m;
                }
                gs.mu[k][j] -= q;
                changed = true;
            }
        }
        if changed {
            // Refresh the float data from the exact rows to keep roundoff
            // from accumulating across many size reductions.
            gs = gram_schmidt(&rows)?;
        }
        let mu = gs.mu[k][k - 1];
        if gs.norms_sq[k] >= (LLL_DELTA - mu * mu) * gs.norms_sq[k - 1] {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            transform.swap(k, k - 1);
            gs = gram_schmidt(&rows)?;
            k = if k > 1 { k - 1 } else { 1 };
        }
    }
    let basis = Basis::new(rows)?;
    Ok(ReducedBasis { basis, transform })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{random_lattice, REL_TOL};

    #[test]
    fn identity_is_already_reduced() {
        let basis = Basis::identity(6);
        let red = lll(&basis).unwrap();
        assert_eq!(red.basis().rows(), basis.rows());
        for (i, row) in red.transform().iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(e, i64::from(i == j));
            }
        }
    }

    #[test]
    fn reduction_preserves_the_lattice_and_balances_the_profile() {
        let basis = random_lattice(14, 2).unwrap();
        let red = lll(&basis).unwrap();
        // Same determinant (sublattice by construction + equal volume =>
        // equal lattice).
        let det_orig = basis.gram_schmidt().det_log2();
        let det_red = red.basis().gram_schmidt().det_log2();
        assert!((det_orig - det_red).abs() < 1e-6);
        // Every reduced row, rewritten in original coefficients, lands on the
        // same point.
        for (row, coeffs) in red.basis().rows().iter().zip(red.transform()) {
            let rebuilt = basis.vector(coeffs.clone());
            let expected: Vec<f64> = row.iter().map(|&x| x as f64).collect();
            assert_eq!(rebuilt.coords(), &expected[..]);
        }
        // The raw profile has a det-sized cliff; the reduced one is balanced
        // to within a small factor.
        let gs = red.basis().gram_schmidt();
        let max = gs.norms_sq.iter().cloned().fold(0.0, f64::max);
        let min = gs.norms_sq.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(
            max / min < 100.0,
            "profile still unbalanced: max/min norm ratio {}",
            (max / min).sqrt()
        );
        // The first reduced row is a genuinely short vector.
        let lambda1 = crate::lattice::lambda1_estimate(&basis).value;
        let first: f64 = red.basis().rows()[0]
            .iter()
            .map(|&x| (x as f64) * (x as f64))
            .sum::<f64>()
            .sqrt();
        assert!(
            first <= 2.0 * lambda1 + REL_TOL,
            "first reduced row has norm {first}, first minimum is {lambda1}"
        );
    }

    #[test]
    fn coefficient_rewrite_matches_row_combinations() {
        let basis = random_lattice(10, 5).unwrap();
        let red = lll(&basis).unwrap();
        let rc = vec![1, -2, 0, 3, 0, 0, -1, 0, 2, 1];
        let orig = red.to_original_coeffs(&rc);
        let direct = red.basis().vector(rc);
        let rebuilt = basis.vector(orig);
        assert_eq!(direct.coords(), rebuilt.coords());
    }
}
