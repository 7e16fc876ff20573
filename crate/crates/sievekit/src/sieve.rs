//! Heuristic shortest-vector sieves.
//!
//! Two engines share this module. The list-and-stack sieve keeps a list of
//! pairwise-irreducible lattice vectors and a LIFO stack of pending ones:
//! each pending vector is first shrunk against the list, then used to shrink
//! list entries, and every vector that cancels to zero counts as a collision
//! (the saturation signal that ends the run). The difference sieve instead
//! starts from a large random list and repeatedly replaces it with the short
//! pairwise differences under a geometrically shrinking radius.
//!
//! Both engines work on exact integer coefficient vectors; every norm
//! comparison is between exactly-represented integers, so reductions strictly
//! decrease an integer quantity and the loops provably terminate.

use crate::asymptotics::effective_alpha;
use crate::lattice::{
    gaussian_heuristic_lambda1, lambda1_estimate, lll, Basis, KleinSampler, Lambda1Estimate,
    LatticeError, LatticeVector, REL_TOL,
};
use crate::lsf::{LsfError, LsfIndex};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Filters(#[from] LsfError),
    #[error("invalid sieve parameter: {0}")]
    Param(String),
    #[error(
        "list starved at iteration {iteration} (radius {radius:.4}): only {len} candidates remain"
    )]
    Starvation {
        iteration: usize,
        radius: f64,
        len: usize,
        trace: Vec<IterationRecord>,
    },
    #[error(
        "two-list run starved at iteration {iteration} (radius {radius:.4}): \
         {origin_len} origin and {coset_len} coset entries remain"
    )]
    TwoListStarvation {
        iteration: usize,
        radius: f64,
        origin_len: usize,
        coset_len: usize,
        trace: Vec<crate::cvp::TwoListRecord>,
    },
    #[error("sieve did not reach the stop radius within {max_iterations} iterations")]
    Stalled {
        max_iterations: usize,
        trace: Vec<IterationRecord>,
    },
    #[error("sampler produced {0} consecutive zero vectors; spread too small for this basis")]
    DegenerateSampler(usize),
    #[error("advice incompatible with basis: {0}")]
    AdviceMismatch(String),
    #[error("certification failure: {0}")]
    Certification(String),
}

/// Growable set of lattice vectors with stable integer ids, keyed by the
/// sign-canonical coefficient vector. Zero vectors and duplicates (up to
/// sign) are rejected.
pub struct SieveList {
    slots: Vec<Option<LatticeVector>>,
    free: Vec<u32>,
    index: HashMap<Vec<i64>, u32>,
}

impl SieveList {
    pub fn new() -> Self {
        SieveList { slots: Vec::new(), free: Vec::new(), index: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Insert (canonicalized). Returns the id, or `None` for zero/duplicate.
    pub fn insert(&mut self, v: LatticeVector) -> Option<u32> {
        if v.is_zero() {
            return None;
        }
        let v = v.canonicalized();
        if self.index.contains_key(v.coeffs()) {
            return None;
        }
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = Some(v.clone());
                id
            }
            None => {
                self.slots.push(Some(v.clone()));
                (self.slots.len() - 1) as u32
            }
        };
        self.index.insert(v.coeffs().to_vec(), id);
        Some(id)
    }

    pub fn remove(&mut self, id: u32) -> Option<LatticeVector> {
        let v = self.slots.get_mut(id as usize)?.take()?;
        self.index.remove(v.coeffs());
        self.free.push(id);
        Some(v)
    }

    pub fn get(&self, id: u32) -> Option<&LatticeVector> {
        self.slots.get(id as usize)?.as_ref()
    }

    /// Live entries in id order (deterministic scan order).
    pub fn iter(&self) -> impl Iterator<Item = (u32, &LatticeVector)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|v| (i as u32, v)))
    }

    pub fn into_sorted_vec(self) -> Vec<LatticeVector> {
        let mut out: Vec<LatticeVector> = self.slots.into_iter().flatten().collect();
        sort_by_norm(&mut out);
        out
    }
}

impl Default for SieveList {
    fn default() -> Self {
        Self::new()
    }
}

pub(crate) fn sort_by_norm(vectors: &mut [LatticeVector]) {
    vectors.sort_by(|a, b| {
        a.norm_sq()
            .partial_cmp(&b.norm_sq())
            .unwrap()
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
}

/// Default sampling spread as a multiple of `alpha0` times the first-minimum
/// prediction. Klein draws land near 1.3x the spread, so this factor parks
/// fresh samples just inside the relaxation ball the list is meant to fill.
const DRAW_SPREAD_FACTOR: f64 = 0.7;

/// Spread floor in units of the smallest reduced Gram-Schmidt norm — the
/// sampler's resolution limit. Below roughly 1.4 of it the per-coordinate
/// rounding returns the zero vector almost surely, which would burn the
/// sample budget without producing anything (the determinant prediction can
/// sit that low on lattices whose first minimum it underestimates).
pub(crate) const DRAW_SPREAD_FLOOR: f64 = 1.4;

/// When the list-and-stack sieve decides it has saturated: once the number of
/// collisions reaches `max(collision_floor, collision_fraction * list_len)`
/// the run stops *certified*. The sample budget is a hard safety valve; a run
/// that exhausts it stops uncertified.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TerminationRule {
    pub collision_floor: usize,
    pub collision_fraction: f64,
    pub max_samples: u64,
}

impl TerminationRule {
    pub fn for_dim(dim: usize) -> Self {
        TerminationRule {
            collision_floor: 100,
            collision_fraction: 0.1,
            max_samples: (0.25 * dim as f64 + 8.0).exp2().ceil() as u64,
        }
    }

    fn fired(&self, collisions: u64, list_len: usize) -> bool {
        let threshold = (self.collision_floor as f64)
            .max(self.collision_fraction * list_len as f64);
        collisions as f64 >= threshold
    }
}

#[derive(Clone, Debug)]
pub struct GaussSieveConfig {
    /// Relaxation: pairs are left alone unless combining them shrinks the
    /// longer one below `c(alpha)` times its norm. Values at or below the
    /// baseline behave identically to the baseline sieve.
    pub alpha: f64,
    pub seed: u64,
    /// Sampling spread; `None` parks draws just inside the relaxation ball
    /// (`0.7 * alpha0` times the first-minimum prediction).
    pub spread: Option<f64>,
    /// `None` picks [`TerminationRule::for_dim`].
    pub termination: Option<TerminationRule>,
    /// Route candidate lookups through a spherical filter index instead of
    /// scanning the whole list.
    pub use_filters: bool,
    /// Record a progress snapshot every this many samples (`None`: no
    /// progress telemetry).
    pub progress_stride: Option<u64>,
}

impl GaussSieveConfig {
    pub fn new(alpha: f64, seed: u64) -> Self {
        GaussSieveConfig {
            alpha,
            seed,
            spread: None,
            termination: None,
            use_filters: false,
            progress_stride: None,
        }
    }
}

/// Point-in-time snapshot of a running list-and-stack sieve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProgressRecord {
    pub samples: u64,
    pub list_len: usize,
    pub min_norm: Option<f64>,
    pub collisions: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveStats {
    pub dim: usize,
    /// Effective relaxation after clamping to the baseline.
    pub alpha: f64,
    pub samples: u64,
    pub reductions: u64,
    pub collisions: u64,
    pub max_list_len: usize,
    /// List length when the run stopped, before pruning.
    pub raw_final_len: usize,
    /// Entries surviving the norm prune (the returned list).
    pub list_len: usize,
    /// True when the collision rule fired; false when the sample budget ran
    /// out first.
    pub certified: bool,
    pub filter_count: Option<usize>,
    /// Snapshots taken every `progress_stride` samples, empty when disabled.
    pub progress: Vec<ProgressRecord>,
}

pub struct SieveOutcome {
    pub shortest: LatticeVector,
    /// Pruned final list, sorted by norm then coefficients.
    pub list: Vec<LatticeVector>,
    pub stats: SieveStats,
}

/// Baseline list-and-stack sieve.
pub fn gauss_sieve(basis: &Basis, seed: u64) -> Result<SieveOutcome, SieveError> {
    run_gauss_sieve(basis, &GaussSieveConfig::new(effective_alpha(1.0), seed))
}

/// Relaxed list-and-stack sieve: keeps a denser list suitable for reuse as
/// preprocessed advice.
pub fn relaxed_gauss_sieve(
    basis: &Basis,
    alpha: f64,
    seed: u64,
) -> Result<SieveOutcome, SieveError> {
    run_gauss_sieve(basis, &GaussSieveConfig::new(alpha, seed))
}

struct CandidateSource {
    lsf: Option<LsfIndex>,
}

impl CandidateSource {
    /// Ids worth checking against `coords`, covering both signs.
    fn candidates(&self, list: &SieveList, coords: &[f64]) -> Vec<u32> {
        match &self.lsf {
            None => list.iter().map(|(id, _)| id).collect(),
            Some(idx) => {
                let mut ids = idx.candidates_for(coords);
                let neg: Vec<f64> = coords.iter().map(|x| -x).collect();
                ids.extend(idx.candidates_for(&neg));
                ids.sort_unstable();
                ids.dedup();
                ids
            }
        }
    }

    fn on_insert(&mut self, id: u32, v: &LatticeVector) {
        if let Some(idx) = &mut self.lsf {
            idx.insert(id, v.coords());
        }
    }

    fn on_remove(&mut self, id: u32, v: &LatticeVector) {
        if let Some(idx) = &mut self.lsf {
            idx.remove(id, v.coords());
        }
    }
}

pub fn run_gauss_sieve(
    basis: &Basis,
    config: &GaussSieveConfig,
) -> Result<SieveOutcome, SieveError> {
    let dim = basis.dim();
    if !(config.alpha.is_finite() && config.alpha >= 1.0)
        || config.alpha > std::f64::consts::SQRT_2 + 1e-12
    {
        return Err(SieveError::Param(format!(
            "relaxation must lie in [1, sqrt(2)], got {}",
            config.alpha
        )));
    }
    let alpha0 = effective_alpha(config.alpha);
    // Combine only when the longer vector shrinks below c(alpha) of itself.
    let c = 2.0 - (2.0 / alpha0) * (alpha0 * alpha0 - 1.0).sqrt();
    let rule = config.termination.unwrap_or_else(|| TerminationRule::for_dim(dim));
    // Sampling scale comes from the determinant prediction, never from exact
    // search: the sieve has to locate short vectors on its own.
    let lambda1 = gaussian_heuristic_lambda1(basis);
    // Draw on a reduced copy of the basis: with a balanced profile the
    // sampler can concentrate near the relaxation ball, where the strict
    // combine condition for large relaxations only has to prune, not walk
    // long vectors down. Coefficients are rewritten to the caller's basis.
    let reduced = lll(basis)?;
    let min_bstar = reduced
        .basis()
        .gram_schmidt()
        .norms_sq
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
        .sqrt();
    let spread = config.spread.unwrap_or(
        (DRAW_SPREAD_FACTOR * alpha0 * lambda1.value).max(DRAW_SPREAD_FLOOR * min_bstar),
    );
    let sampler = KleinSampler::new(reduced.basis());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut source = CandidateSource {
        lsf: if config.use_filters {
            let theta = (1.0 / alpha0).asin();
            Some(LsfIndex::new(dim, theta, 1.0, config.seed ^ 0x5f5f_5f5f_5f5f_5f5f)?)
        } else {
            None
        },
    };

    let mut list = SieveList::new();
    let mut stack: Vec<LatticeVector> = Vec::new();
    let mut samples: u64 = 0;
    let mut reductions: u64 = 0;
    let mut collisions: u64 = 0;
    let mut max_list_len = 0usize;
    let mut certified = false;
    let mut progress: Vec<ProgressRecord> = Vec::new();

    // Strictness margin: with exact integer norms, subtracting a relative
    // epsilon turns <= into a strict comparison at equality.
    let reducible = |longer_norm_sq: f64, combined_norm_sq: f64| {
        combined_norm_sq <= (c - REL_TOL) * longer_norm_sq
    };

    'main: loop {
        let mut v = match stack.pop() {
            Some(v) => v,
            None => {
                if rule.fired(collisions, list.len()) {
                    certified = true;
                    break;
                }
                if samples >= rule.max_samples {
                    break;
                }
                let mut zero_streak = 0usize;
                let v = loop {
                    let draw = sampler.sample_with(&mut rng, spread);
                    samples += 1;
                    if !draw.is_zero() {
                        break LatticeVector::from_parts(
                            reduced.to_original_coeffs(draw.coeffs()),
                            draw.coords().to_vec(),
                        );
                    }
                    zero_streak += 1;
                    if zero_streak >= 1000 {
                        return Err(SieveError::DegenerateSampler(zero_streak));
                    }
                };
                if let Some(stride) = config.progress_stride {
                    if stride > 0 && samples % stride == 0 {
                        let min_norm = list
                            .iter()
                            .map(|(_, w)| w.norm_sq())
                            .fold(f64::INFINITY, f64::min);
                        progress.push(ProgressRecord {
                            samples,
                            list_len: list.len(),
                            min_norm: (min_norm.is_finite()).then(|| min_norm.sqrt()),
                            collisions,
                        });
                    }
                }
                v
            }
        };

        // Phase 1: shrink v against the list in one pass.
        let mut changed = false;
        for id in source.candidates(&list, v.coords()) {
            let Some(w) = list.get(id) else { continue };
            let dot = v.dot_coords(w);
            let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
            let combined = v.norm_sq() + w.norm_sq() - 2.0 * sign * dot;
            if reducible(v.norm_sq(), combined) {
                v = if sign >= 0.0 { v.sub(w) } else { v.add(w) };
                reductions += 1;
                changed = true;
                if v.is_zero() {
                    collisions += 1;
                    continue 'main;
                }
            }
        }
        if changed {
            // Norms moved; rescan from scratch later.
            stack.push(v);
            continue;
        }

        // Phase 2: v is list-stable; shrink list entries against v.
        let mut evict: Vec<u32> = Vec::new();
        for id in source.candidates(&list, v.coords()) {
            let Some(w) = list.get(id) else { continue };
            let dot = w.dot_coords(&v);
            let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
            let combined = w.norm_sq() + v.norm_sq() - 2.0 * sign * dot;
            if reducible(w.norm_sq(), combined) {
                evict.push(id);
            }
        }
        for id in evict {
            let w = list.get(id).expect("evicted id is live").clone();
            source.on_remove(id, &w);
            list.remove(id);
            let dot = w.dot_coords(&v);
            let reduced = if dot >= 0.0 { w.sub(&v) } else { w.add(&v) };
            reductions += 1;
            if reduced.is_zero() {
                collisions += 1;
            } else {
                stack.push(reduced);
            }
        }
        match list.insert(v.clone()) {
            Some(id) => {
                source.on_insert(id, &v);
                max_list_len = max_list_len.max(list.len());
            }
            // Unreachable in theory (a duplicate would have cancelled in
            // phase 1); counted defensively rather than silently dropped.
            None => collisions += 1,
        }
    }

    let raw_final_len = list.len();
    let mut vectors = list.into_sorted_vec();
    if vectors.is_empty() {
        return Err(SieveError::Param(
            "sieve ended with an empty list; raise the sample budget".into(),
        ));
    }
    let best_norm = vectors[0].norm();
    // Junk shells accumulate above the relaxation radius while the stack
    // drains; prune to the advertised ball.
    let keep = alpha0 * best_norm * 1.02;
    let keep_sq = keep * keep * (1.0 + REL_TOL);
    vectors.retain(|v| v.norm_sq() <= keep_sq);
    let shortest = vectors[0].clone();
    let stats = SieveStats {
        dim,
        alpha: alpha0,
        samples,
        reductions,
        collisions,
        max_list_len,
        raw_final_len,
        list_len: vectors.len(),
        certified,
        filter_count: source.lsf.as_ref().map(|i| i.num_filters()),
        progress,
    };
    Ok(SieveOutcome { shortest, list: vectors, stats })
}

/// One radius step of the difference sieve.
#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub radius: f64,
    pub list_len: usize,
    pub candidates: usize,
    pub kept: usize,
}

/// One radius step of the difference sieve over a sign-canonical list: emits
/// every difference of two stored vectors with norm at most `gamma * radius`.
/// Each stored vector stands for its +/- pair, so for a pair of entries both
/// the difference and the sum arise as differences. Pure function; empty or
/// singleton input yields an empty output. Output is deduplicated,
/// sign-canonical, and sorted by norm.
pub fn nv_sieve_step(list: &[LatticeVector], gamma: f64, radius: f64) -> Vec<LatticeVector> {
    let bound = gamma * radius;
    let bound_sq = bound * bound * (1.0 + REL_TOL);
    let norms: Vec<f64> = list.iter().map(|v| v.norm_sq()).collect();
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<LatticeVector> = Vec::new();
    for i in 0..list.len() {
        for j in (i + 1)..list.len() {
            let dot = list[i].dot_coords(&list[j]);
            let diff_sq = norms[i] + norms[j] - 2.0 * dot;
            if diff_sq <= bound_sq && diff_sq > 0.0 {
                let d = list[i].sub(&list[j]).canonicalized();
                if !d.is_zero() && seen.insert(d.coeffs().to_vec()) {
                    out.push(d);
                }
            }
            let sum_sq = norms[i] + norms[j] + 2.0 * dot;
            if sum_sq <= bound_sq && sum_sq > 0.0 {
                let s = list[i].add(&list[j]).canonicalized();
                if !s.is_zero() && seen.insert(s.coeffs().to_vec()) {
                    out.push(s);
                }
            }
        }
    }
    sort_by_norm(&mut out);
    out
}

/// Why a difference-sieve run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NvStopReason {
    /// The working radius reached the target multiple of the first minimum.
    TargetRadius,
    /// Differences dried up while the radius was already inside the bottom
    /// shell band: the natural end of the descent.
    ListDepleted,
}

#[derive(Clone, Debug)]
pub struct NvConfig {
    /// Radius shrink factor per iteration.
    pub gamma: f64,
    pub seed: u64,
    /// Initial list size; `None` picks `2^(0.21 d + 4)`.
    pub initial_size: Option<usize>,
    /// Sampling spread; `None` picks `2^(0.1 d)` times the first-minimum
    /// estimate, floored at the sampler's resolution limit on the reduced
    /// basis.
    pub spread: Option<f64>,
    pub max_iterations: usize,
    /// Success once the radius is at most this multiple of the
    /// first-minimum estimate.
    pub stop_factor: f64,
}

impl NvConfig {
    pub fn new(seed: u64) -> Self {
        NvConfig {
            gamma: 0.97,
            seed,
            initial_size: None,
            spread: None,
            max_iterations: 10_000,
            stop_factor: (4.0f64 / 3.0).sqrt() * 1.02,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NvStats {
    pub dim: usize,
    pub gamma: f64,
    pub initial_size: usize,
    pub iterations: usize,
    pub final_radius: f64,
    pub stop_reason: NvStopReason,
    pub lambda1_estimate: Lambda1Estimate,
    pub trace: Vec<IterationRecord>,
}

pub struct NvOutcome {
    pub shortest: LatticeVector,
    /// Final list, sorted by norm then coefficients.
    pub list: Vec<LatticeVector>,
    pub stats: NvStats,
}

/// Difference sieve with default parameters.
pub fn nv_sieve(basis: &Basis, seed: u64) -> Result<NvOutcome, SieveError> {
    run_nv_sieve(basis, &NvConfig::new(seed))
}

pub fn run_nv_sieve(basis: &Basis, config: &NvConfig) -> Result<NvOutcome, SieveError> {
    let dim = basis.dim();
    if !(config.gamma > 0.0 && config.gamma < 1.0) {
        return Err(SieveError::Param(format!(
            "shrink factor must lie in (0, 1), got {}",
            config.gamma
        )));
    }
    if !(config.stop_factor > 0.0) {
        return Err(SieveError::Param(format!(
            "stop factor must be positive, got {}",
            config.stop_factor
        )));
    }
    let lambda1 = lambda1_estimate(basis);
    let initial_size = config
        .initial_size
        .unwrap_or_else(|| (0.21 * dim as f64 + 4.0).exp2().ceil() as usize);
    if initial_size < 2 {
        return Err(SieveError::Param(format!(
            "initial list must hold at least 2 vectors, got {initial_size}"
        )));
    }
    // Draw on a reduced copy: a balanced profile lets the sampler start the
    // descent near the requested spread instead of at the raw basis's rounding
    // residue, which sits at a fixed fraction of the longest profile vector.
    let reduced = lll(basis)?;
    let min_bstar = reduced
        .basis()
        .gram_schmidt()
        .norms_sq
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
        .sqrt();
    let spread = config.spread.unwrap_or_else(|| {
        ((0.1 * dim as f64).exp2() * lambda1.value).max(DRAW_SPREAD_FLOOR * min_bstar)
    });
    let sampler = KleinSampler::new(reduced.basis());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Seed list: distinct canonical nonzero samples; small lattices may not
    // have `initial_size` distinct points at this spread, so cap the draws.
    let mut seen = std::collections::HashSet::new();
    let mut list: Vec<LatticeVector> = Vec::new();
    let mut draws = 0usize;
    while list.len() < initial_size && draws < 20 * initial_size {
        draws += 1;
        let draw = sampler.sample_with(&mut rng, spread);
        if draw.is_zero() {
            continue;
        }
        let v = LatticeVector::from_parts(
            reduced.to_original_coeffs(draw.coeffs()),
            draw.coords().to_vec(),
        )
        .canonicalized();
        if seen.insert(v.coeffs().to_vec()) {
            list.push(v);
        }
    }
    if list.len() < 2 {
        return Err(SieveError::Starvation {
            iteration: 0,
            radius: f64::NAN,
            len: list.len(),
            trace: Vec::new(),
        });
    }
    sort_by_norm(&mut list);

    let stop_radius = config.stop_factor * lambda1.value;
    // Below this radius the list sits in the bottom shells, where differences
    // of near-minimal vectors cannot shrink further; drying up there is
    // convergence, not failure.
    let depletion_guard = std::f64::consts::SQRT_2 * 1.02 * lambda1.value;
    let mut radius = list.iter().map(|v| v.norm_sq()).fold(0.0, f64::max).sqrt();
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut iteration = 0usize;
    let mut stop_reason = NvStopReason::TargetRadius;

    while radius > stop_radius {
        iteration += 1;
        if iteration > config.max_iterations {
            return Err(SieveError::Stalled {
                max_iterations: config.max_iterations,
                trace,
            });
        }
        let shrunk = config.gamma * radius;
        let mut next = nv_sieve_step(&list, config.gamma, radius);
        let candidates = next.len();
        next.truncate(initial_size);
        trace.push(IterationRecord {
            radius: shrunk,
            list_len: list.len(),
            candidates,
            kept: next.len(),
        });
        if next.len() < 2 {
            if shrunk <= depletion_guard {
                stop_reason = NvStopReason::ListDepleted;
                break; // keep the current list
            }
            return Err(SieveError::Starvation {
                iteration,
                radius: shrunk,
                len: next.len(),
                trace,
            });
        }
        list = next;
        radius = shrunk;
    }

    let shortest = list[0].clone();
    let stats = NvStats {
        dim,
        gamma: config.gamma,
        initial_size,
        iterations: iteration,
        final_radius: radius,
        stop_reason,
        lambda1_estimate: lambda1,
        trace,
    };
    Ok(NvOutcome { shortest, list, stats })
}
