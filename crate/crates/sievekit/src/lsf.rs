//! Spherical locality-sensitive filters: a concrete, desk-scale realization
//! of the near-neighbor structure whose asymptotic exponents live in
//! [`crate::asymptotics`].
//!
//! A family of random unit directions ("filters") is drawn once. A stored
//! vector is inserted into every filter whose direction lies within the
//! *insert cap* (`dot >= cos(theta)` after normalization); a query probes
//! every filter within the *query cap* (`dot >= u * cos(theta)`). Two vectors
//! at angle `theta` share a filter with probability equal to the mass of the
//! intersection of their caps (the "wedge"), so drawing about `3 / wedge`
//! filters catches such a pair with high probability. The wedge mass is
//! estimated once per `(dim, theta, u)` by Monte Carlo on a planted pair and
//! cached for the process lifetime.
//!
//! The structure is an admissibility filter only: callers must re-check every
//! candidate exactly. It never changes what a sieve computes, only which
//! pairs it inspects.

use crate::asymptotics::{filter_exponents, ParamError};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

/// Hard ceiling on the number of filters a family may request.
pub const FILTER_CAP: usize = 1 << 22;

#[derive(Debug, Error)]
pub enum LsfError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("filter family too large: needs about {required:.3e} filters, cap is {cap}")]
    FilterBudget { required: f64, cap: usize },
    #[error(
        "wedge mass too small to calibrate at dimension {dim}: {hits} hits in {samples} samples"
    )]
    Uncalibratable { dim: usize, hits: u64, samples: u64 },
}

fn unit(coords: &[f64]) -> Option<Vec<f64>> {
    let norm_sq: f64 = coords.iter().map(|x| x * x).sum();
    if norm_sq <= 0.0 {
        return None;
    }
    let inv = norm_sq.sqrt().recip();
    Some(coords.iter().map(|x| x * inv).collect())
}

fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = unit(&v) {
            return u;
        }
    }
}

/// Monte Carlo estimate of the wedge mass: the probability that one random
/// filter direction catches both members of a pair at angle exactly `theta`
/// (one member on the insert cap, the other on the query cap). Returns the
/// estimate together with the raw hit count and sample count.
pub fn wedge_mass(
    dim: usize,
    theta: f64,
    u: f64,
    max_samples: u64,
    seed: u64,
) -> Result<(f64, u64, u64), LsfError> {
    filter_exponents(theta, u)?; // validates (theta, u)
    if dim < 2 {
        return Err(LsfError::Param(ParamError(format!(
            "filter families need dimension >= 2, got {dim}"
        ))));
    }
    let alpha_insert = theta.cos();
    let alpha_query = u * theta.cos();
    let (sin, cos) = theta.sin_cos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits: u64 = 0;
    let mut samples: u64 = 0;
    const TARGET_HITS: u64 = 150;
    const CHUNK: u64 = 50_000;
    while samples < max_samples && hits < TARGET_HITS {
        for _ in 0..CHUNK.min(max_samples - samples) {
            let f = random_unit(&mut rng, dim);
            // Planted pair: stored vector along e0, query along
            // cos(theta) e0 + sin(theta) e1.
            let stored_dot = f[0];
            let query_dot = cos * f[0] + sin * f[1];
            if stored_dot >= alpha_insert && query_dot >= alpha_query {
                hits += 1;
            }
            samples += 1;
        }
    }
    if hits < 25 {
        return Err(LsfError::Uncalibratable { dim, hits, samples });
    }
    Ok((hits as f64 / samples as f64, hits, samples))
}

fn calibration_seed(dim: usize, theta: f64, u: f64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"sievekit-lsf-calibration-v1");
    h.update((dim as u64).to_le_bytes());
    h.update(theta.to_bits().to_le_bytes());
    h.update(u.to_bits().to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Number of filters needed so a pair at angle `theta` is caught with high
/// probability: about three over the wedge mass. Deterministic per
/// `(dim, theta, u)` and cached for the process lifetime.
pub fn calibrated_filter_count(dim: usize, theta: f64, u: f64) -> Result<usize, LsfError> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), usize>>> = OnceLock::new();
    let key = (dim, theta.to_bits(), u.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&n) = cache.lock().unwrap().get(&key) {
        return Ok(n);
    }
    let (mass, _, _) = wedge_mass(dim, theta, u, 4_000_000, calibration_seed(dim, theta, u))?;
    let required = 3.0 / mass;
    if required > FILTER_CAP as f64 {
        return Err(LsfError::FilterBudget { required, cap: FILTER_CAP });
    }
    let n = required.ceil() as usize;
    cache.lock().unwrap().insert(key, n);
    Ok(n)
}

/// A concrete filter family with its inverted buckets. Callers own the id to
/// vector mapping; the index only stores which ids lie in which filter.
pub struct LsfIndex {
    dim: usize,
    theta: f64,
    u: f64,
    seed: u64,
    alpha_insert: f64,
    alpha_query: f64,
    filters: Vec<Vec<f64>>,
    buckets: Vec<Vec<u32>>,
}

impl LsfIndex {
    /// Build a family with the calibrated filter count.
    pub fn new(dim: usize, theta: f64, u: f64, seed: u64) -> Result<Self, LsfError> {
        let count = calibrated_filter_count(dim, theta, u)?;
        Self::with_filter_count(dim, theta, u, seed, count)
    }

    /// Build a family with an explicit filter count (used when rebuilding a
    /// serialized structure so the count survives calibration drift).
    pub fn with_filter_count(
        dim: usize,
        theta: f64,
        u: f64,
        seed: u64,
        count: usize,
    ) -> Result<Self, LsfError> {
        filter_exponents(theta, u)?;
        if count == 0 || count > FILTER_CAP {
            return Err(LsfError::FilterBudget { required: count as f64, cap: FILTER_CAP });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let filters: Vec<Vec<f64>> = (0..count).map(|_| random_unit(&mut rng, dim)).collect();
        Ok(LsfIndex {
            dim,
            theta,
            u,
            seed,
            alpha_insert: theta.cos(),
            alpha_query: u * theta.cos(),
            filters,
            buckets: vec![Vec::new(); count],
        })
    }

    pub fn num_filters(&self) -> usize {
        self.filters.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn skew(&self) -> f64 {
        self.u
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn matching_filters(&self, direction: &[f64], threshold: f64) -> Vec<usize> {
        self.filters
            .iter()
            .enumerate()
            .filter(|(_, f)| {
                let dot: f64 = f.iter().zip(direction).map(|(a, b)| a * b).sum();
                dot >= threshold
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Register `id` under every filter in the insert cap of `coords`.
    /// Zero vectors have no direction and are ignored.
    pub fn insert(&mut self, id: u32, coords: &[f64]) {
        let Some(dir) = unit(coords) else { return };
        for fi in self.matching_filters(&dir, self.alpha_insert) {
            self.buckets[fi].push(id);
        }
    }

    /// Remove a previously inserted id (same coords it was inserted with).
    pub fn remove(&mut self, id: u32, coords: &[f64]) {
        let Some(dir) = unit(coords) else { return };
        for fi in self.matching_filters(&dir, self.alpha_insert) {
            if let Some(pos) = self.buckets[fi].iter().position(|&x| x == id) {
                self.buckets[fi].swap_remove(pos);
            }
        }
    }

    /// Ids stored in any filter within the query cap of `coords`, deduplicated
    /// and sorted. Candidates must be re-checked exactly by the caller; pairs
    /// at angle beyond `theta` may appear and pairs within it may rarely be
    /// missed.
    pub fn candidates_for(&self, coords: &[f64]) -> Vec<u32> {
        let Some(dir) = unit(coords) else { return Vec::new() };
        let mut out: Vec<u32> = self
            .matching_filters(&dir, self.alpha_query)
            .into_iter()
            .flat_map(|fi| self.buckets[fi].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}
