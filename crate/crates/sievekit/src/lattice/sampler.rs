//! Randomized lattice-point sampling: Gaussian-perturbed nearest-plane
//! rounding. With zero spread it degenerates to deterministic nearest-plane
//! rounding; with positive spread each level's coefficient is rounded from a
//! Gaussian centered on the exact projection, so the output is a random
//! lattice point scattered around the requested center at roughly the
//! requested radius.

use super::{Basis, LatticeVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Reusable sampler over one basis.
pub struct KleinSampler<'a> {
    basis: &'a Basis,
}

impl<'a> KleinSampler<'a> {
    pub fn new(basis: &'a Basis) -> Self {
        KleinSampler { basis }
    }

    /// Sample a lattice point near the origin with displacement scale
    /// `spread` (the expected norm is of order `spread` plus the rounding
    /// floor set by the orthogonalized basis profile).
    pub fn sample_with<R: Rng>(&self, rng: &mut R, spread: f64) -> LatticeVector {
        self.sample_impl(rng, None, spread)
    }

    /// Sample a lattice point near an arbitrary center.
    pub fn sample_around<R: Rng>(
        &self,
        rng: &mut R,
        center: &[f64],
        spread: f64,
    ) -> LatticeVector {
        assert_eq!(center.len(), self.basis.dim(), "center dimension mismatch");
        self.sample_impl(rng, Some(center), spread)
    }

    fn sample_impl<R: Rng>(
        &self,
        rng: &mut R,
        center: Option<&[f64]>,
        spread: f64,
    ) -> LatticeVector {
        let gs = self.basis.gram_schmidt();
        let dim = self.basis.dim();
        let c: Vec<f64> = match center {
            None => vec![0.0; dim],
            Some(t) => (0..dim)
                .map(|i| {
                    let dot: f64 = t.iter().zip(&gs.b_star[i]).map(|(a, b)| a * b).sum();
                    dot / gs.norms_sq[i]
                })
                .collect(),
        };
        let per_level = spread / (dim as f64).sqrt();
        let mut u = vec![0i64; dim];
        for i in (0..dim).rev() {
            let mut ctr = c[i];
            for j in (i + 1)..dim {
                if u[j] != 0 {
                    ctr -= u[j] as f64 * gs.mu[j][i];
                }
            }
            let sigma = per_level / gs.norms_sq[i].sqrt();
            let z: f64 = rng.sample(StandardNormal);
            u[i] = (ctr + sigma * z).round() as i64;
        }
        self.basis.vector(u)
    }
}

/// One-shot deterministic sample near the origin: equal seeds give equal
/// vectors.
pub fn sample_lattice_vector(basis: &Basis, seed: u64, spread: f64) -> LatticeVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    KleinSampler::new(basis).sample_with(&mut rng, spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::random_lattice;

    #[test]
    fn zero_spread_is_nearest_plane() {
        let b = Basis::identity(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = KleinSampler::new(&b);
        let at_origin = s.sample_with(&mut rng, 0.0);
        assert!(at_origin.is_zero());
        let near = s.sample_around(&mut rng, &[0.4, -0.6, 2.2], 0.0);
        assert_eq!(near.coeffs(), &[0, -1, 2]);
    }

    #[test]
    fn deterministic_in_seed() {
        let b = random_lattice(12, 4).unwrap();
        let a = sample_lattice_vector(&b, 99, 50.0);
        let c = sample_lattice_vector(&b, 99, 50.0);
        let d = sample_lattice_vector(&b, 100, 50.0);
        assert_eq!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn norm_scale_tracks_spread() {
        let b = Basis::identity(16);
        let s = KleinSampler::new(&b);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spread = 8.0;
        let mean: f64 = (0..200)
            .map(|_| s.sample_with(&mut rng, spread).norm())
            .sum::<f64>()
            / 200.0;
        assert!(
            (spread / 3.0..spread * 3.0).contains(&mean),
            "mean norm {mean} far from spread {spread}"
        );
    }

    #[test]
    fn centered_samples_stay_near_center() {
        let b = Basis::identity(8);
        let s = KleinSampler::new(&b);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let center = [3.2, -1.5, 0.0, 7.7, 2.2, -4.4, 5.5, 0.1];
        for _ in 0..50 {
            let v = s.sample_around(&mut rng, &center, 2.0);
            let dist = v.dist_sq_to(&center).sqrt();
            assert!(dist < 2.0 * 4.0 + 8.0, "sample strayed: {dist}");
        }
    }

    #[test]
    fn samples_cover_distinct_points() {
        let b = random_lattice(10, 8).unwrap();
        let s = KleinSampler::new(&b);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..100 {
            seen.insert(s.sample_with(&mut rng, 400.0).coeffs().to_vec());
        }
        assert!(seen.len() > 50, "sampler collapsed to {} points", seen.len());
    }
}
