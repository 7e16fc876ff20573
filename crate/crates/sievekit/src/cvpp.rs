//! Closest-vector queries with preprocessing.
//!
//! Preprocessing sees only the basis: a relaxed sieve builds a list of short
//! lattice vectors up to the relaxation radius, and a pairwise-closure pass
//! then saturates it (adding every sum/difference of list entries that still
//! fits the radius, to fixpoint) so the list covers the whole ball that the
//! relaxation promises. The list can carry a filter-family configuration for
//! accelerated queries.
//!
//! Queries reduce the target through the list — repeatedly subtracting
//! whichever list vector (either sign) shrinks the residual by more than a
//! fixed absolute slack — and return the lattice vector that maps the target
//! onto its final residual, together with a certificate (distance as a
//! multiple of the first minimum, and whether that sits within the bound the
//! query mode promises). Stronger advice (larger relaxation) answers weaker
//! query modes for free; the converse is refused as a certification error
//! unless the advice was explicitly built uncertified.
//!
//! The advice is serializable: the on-disk form stores exact coefficient
//! vectors plus the basis fingerprint and creation metadata, and loading
//! requires the same basis so coordinates can be rebuilt exactly.

use crate::asymptotics::{approx_alpha, bdd_alpha, effective_alpha, ParamError};
use crate::lattice::{
    lambda1_estimate, lll, Basis, KleinSampler, Lambda1Estimate, Lambda1Source, LatticeError,
    LatticeVector, ReducedBasis, TargetVector,
};
use crate::lsf::{calibrated_filter_count, LsfIndex};
use crate::sieve::{run_gauss_sieve, GaussSieveConfig, SieveError, TerminationRule};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};
use std::collections::HashSet;

const MAGIC: &[u8; 4] = b"CVPP";
const FORMAT_VERSION: u16 = 1;
/// Hard stop for one query's reduction chain. Far targets on skewed bases
/// legitimately take thousands of steps (each shortens the residual), so this
/// is a divergence guard, not the expected scale.
const MAX_REDUCTIONS: u64 = 1_000_000;
/// Absolute slack: a reduction must shrink the residual norm by at least
/// this much, so the final residual is within this of irreducible.
const REDUCE_SLACK: f64 = 1e-9;
/// Number of deterministic lattice starting points drawn per query when the
/// engine holds the basis.
const INIT_DRAWS: usize = 8;
/// A target farther than this many first minima counts as far: the walk from
/// zero is then skipped whenever a drawn lattice start is strictly closer.
const FAR_TARGET_FACTOR: f64 = 8.0;

/// What a query promises about its target, and therefore how strong the
/// advice list must be.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QueryMode {
    /// No promise: exact closest-vector answers.
    Exact,
    /// The target lies within `delta` times the first minimum of the lattice.
    BoundedDistance { delta: f64 },
    /// The answer may be up to `kappa` times farther than the true closest
    /// vector.
    Approximate { kappa: f64 },
}

impl QueryMode {
    /// Distance bound (as a multiple of the first minimum) the mode promises
    /// for its answers, when it promises one at all.
    fn beta_bound(&self) -> Option<f64> {
        match *self {
            QueryMode::Exact => Some(1.0),
            QueryMode::BoundedDistance { .. } => None,
            QueryMode::Approximate { kappa } => Some(kappa),
        }
    }
}

/// Smallest advice relaxation that serves the given query mode.
pub fn min_alpha(mode: QueryMode) -> Result<f64, ParamError> {
    match mode {
        QueryMode::Exact => Ok(std::f64::consts::SQRT_2),
        QueryMode::BoundedDistance { delta } => bdd_alpha(delta),
        QueryMode::Approximate { kappa } => approx_alpha(kappa),
    }
}

/// Filter-family configuration carried by the advice (the family itself is
/// rebuilt deterministically from these numbers).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsfConfig {
    pub seed: u64,
    pub theta: f64,
    pub u: f64,
    pub num_filters: u64,
}

/// How the advice came to be: enough to audit or reproduce it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PreprocessMeta {
    /// Seed the sieve (and filter family) derived from.
    pub seed: u64,
    /// Samples the sieve drew.
    pub samples: u64,
    /// Pair reductions the sieve applied.
    pub reductions: u64,
    /// Collisions the sieve observed (its stopping evidence).
    pub collisions: u64,
    /// Whether the sieve stopped on its collision rule rather than the
    /// sample budget.
    pub sieve_certified: bool,
    /// Vectors the closure pass added on top of the sieve output.
    pub closure_added: u64,
}

#[derive(Clone, Debug)]
pub struct PreprocessConfig {
    /// Query mode the advice is meant to serve.
    pub mode: QueryMode,
    /// Explicit relaxation, overriding the mode's minimum. Overriding below
    /// the minimum is allowed for experiments but marks the advice
    /// uncertified.
    pub alpha_override: Option<f64>,
    pub seed: u64,
    /// Attach a filter family for accelerated queries.
    pub use_lsf: bool,
    /// Filter-family skew (query exponent trade), used when `use_lsf` is set.
    pub lsf_u: f64,
    /// Sieve termination override.
    pub termination: Option<TerminationRule>,
    /// Saturate the list by pairwise closure after the sieve (recommended;
    /// the sieve alone leaves holes in the ball at moderate dimensions).
    pub closure: bool,
}

impl PreprocessConfig {
    pub fn new(mode: QueryMode, seed: u64) -> Self {
        PreprocessConfig {
            mode,
            alpha_override: None,
            seed,
            use_lsf: false,
            lsf_u: 1.0,
            termination: None,
            closure: true,
        }
    }
}

/// Preprocessed advice: the short lattice vectors up to the relaxation
/// radius, plus bookkeeping to validate and accelerate queries.
#[derive(Clone, Debug)]
pub struct PreprocessedList {
    dim: usize,
    alpha: f64,
    mode: QueryMode,
    /// False when the advice was built with a relaxation below the mode's
    /// minimum (experimental override).
    certified: bool,
    lambda1: Lambda1Estimate,
    basis_fingerprint: [u8; 32],
    vectors: Vec<LatticeVector>,
    lsf: Option<LsfConfig>,
    meta: PreprocessMeta,
}

/// Build advice for a lattice. Only the basis is consulted; targets play no
/// part in preprocessing.
pub fn preprocess(
    basis: &Basis,
    config: &PreprocessConfig,
) -> Result<PreprocessedList, SieveError> {
    let needed = min_alpha(config.mode).map_err(|e| SieveError::Param(e.to_string()))?;
    let alpha = config.alpha_override.unwrap_or(needed);
    let certified = alpha + 1e-12 >= needed;
    let mut sieve_config = GaussSieveConfig::new(alpha, config.seed);
    sieve_config.termination = config.termination;
    sieve_config.use_filters = config.use_lsf;
    let outcome = run_gauss_sieve(basis, &sieve_config)?;
    let alpha0 = outcome.stats.alpha;

    let mut vectors = outcome.list;
    let mut closure_added = 0u64;
    if config.closure {
        closure_added = close_under_combinations(&mut vectors, alpha0);
    }

    let lsf = if config.use_lsf {
        let theta = (1.0 / alpha0).asin();
        let num = calibrated_filter_count(basis.dim(), theta, config.lsf_u)?;
        Some(LsfConfig {
            seed: config.seed ^ 0xa5a5_a5a5_a5a5_a5a5,
            theta,
            u: config.lsf_u,
            num_filters: num as u64,
        })
    } else {
        None
    };
    Ok(PreprocessedList {
        dim: basis.dim(),
        alpha: alpha0,
        mode: config.mode,
        certified,
        lambda1: lambda1_estimate(basis),
        basis_fingerprint: *basis.fingerprint(),
        vectors,
        lsf,
        meta: PreprocessMeta {
            seed: config.seed,
            samples: outcome.stats.samples,
            reductions: outcome.stats.reductions,
            collisions: outcome.stats.collisions,
            sieve_certified: outcome.stats.certified,
            closure_added,
        },
    })
}

/// Saturate a sign-canonical list under pairwise sums and differences within
/// the ball `alpha * 1.02 * (shortest norm)`, to fixpoint. Sampling alone
/// leaves a sizeable fraction of the ball unvisited at moderate dimensions;
/// closure completes it deterministically. Returns how many vectors were
/// added; the list ends sorted by norm then coefficients.
fn close_under_combinations(vectors: &mut Vec<LatticeVector>, alpha: f64) -> u64 {
    if vectors.len() < 2 {
        return 0;
    }
    let best = vectors.iter().map(|v| v.norm_sq()).fold(f64::INFINITY, f64::min);
    let bound_sq = alpha * alpha * 1.02 * 1.02 * best * (1.0 + 1e-9);
    let mut seen: HashSet<Vec<i64>> = vectors.iter().map(|v| v.coeffs().to_vec()).collect();
    let before = vectors.len();
    let mut frontier: Vec<LatticeVector> = vectors.clone();
    while !frontier.is_empty() {
        let mut fresh: Vec<LatticeVector> = Vec::new();
        // Pairs within one batch of additions meet on the next pass, once
        // the batch has joined the list and become the frontier.
        for a in &frontier {
            for b in vectors.iter() {
                let dot = a.dot_coords(b);
                let base = a.norm_sq() + b.norm_sq();
                for (sq, c) in [(base - 2.0 * dot, a.sub(b)), (base + 2.0 * dot, a.add(b))] {
                    if sq <= bound_sq && !c.is_zero() {
                        let c = c.canonicalized();
                        if seen.insert(c.coeffs().to_vec()) {
                            fresh.push(c);
                        }
                    }
                }
            }
        }
        vectors.extend(fresh.iter().cloned());
        frontier = fresh;
    }
    crate::sieve::sort_by_norm(vectors);
    (vectors.len() - before) as u64
}

impl PreprocessedList {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Effective relaxation of the stored list.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Query mode the advice was built to serve.
    pub fn mode(&self) -> QueryMode {
        self.mode
    }

    /// False when the advice was deliberately built weaker than its mode
    /// requires.
    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn lambda1(&self) -> Lambda1Estimate {
        self.lambda1
    }

    pub fn vectors(&self) -> &[LatticeVector] {
        &self.vectors
    }

    pub fn basis_fingerprint(&self) -> &[u8; 32] {
        &self.basis_fingerprint
    }

    pub fn lsf(&self) -> Option<&LsfConfig> {
        self.lsf.as_ref()
    }

    pub fn meta(&self) -> &PreprocessMeta {
        &self.meta
    }

    /// Serialize. The format stores exact coefficients only; coordinates are
    /// rebuilt against the (fingerprint-checked) basis on load, so the bytes
    /// are platform-independent and identical across runs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(128 + self.vectors.len() * self.dim * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        let (mode_tag, mode_param): (u8, f64) = match self.mode {
            QueryMode::Exact => (0, 0.0),
            QueryMode::BoundedDistance { delta } => (1, delta),
            QueryMode::Approximate { kappa } => (2, kappa),
        };
        out.push(mode_tag);
        out.extend_from_slice(&mode_param.to_le_bytes());
        out.extend_from_slice(&self.alpha.to_le_bytes());
        out.push(self.certified as u8);
        out.extend_from_slice(&self.meta.seed.to_le_bytes());
        out.extend_from_slice(&self.meta.samples.to_le_bytes());
        out.extend_from_slice(&self.meta.reductions.to_le_bytes());
        out.extend_from_slice(&self.meta.collisions.to_le_bytes());
        out.push(self.meta.sieve_certified as u8);
        out.extend_from_slice(&self.meta.closure_added.to_le_bytes());
        out.extend_from_slice(&self.lambda1.value.to_le_bytes());
        out.push(match self.lambda1.source {
            Lambda1Source::Enumerated => 0,
            Lambda1Source::GaussianHeuristic => 1,
        });
        out.extend_from_slice(&self.basis_fingerprint);
        out.extend_from_slice(&(self.vectors.len() as u64).to_le_bytes());
        for v in &self.vectors {
            for &c in v.coeffs() {
                out.extend_from_slice(&c.to_le_bytes());
            }
        }
        match &self.lsf {
            None => out.push(0),
            Some(cfg) => {
                out.push(1);
                out.extend_from_slice(&cfg.seed.to_le_bytes());
                out.extend_from_slice(&cfg.theta.to_le_bytes());
                out.extend_from_slice(&cfg.u.to_le_bytes());
                out.extend_from_slice(&cfg.num_filters.to_le_bytes());
            }
        }
        out
    }

    pub fn write_to_path(&self, path: &std::path::Path) -> Result<(), SieveError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| {
            SieveError::Lattice(LatticeError::Parse {
                what: "advice file",
                detail: format!("{}: {e}", path.display()),
            })
        })
    }

    /// Deserialize against the basis the advice was built for. The stored
    /// fingerprint must match; coordinates are rebuilt from the basis.
    pub fn from_bytes(bytes: &[u8], basis: &Basis) -> Result<Self, SieveError> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(4)?;
        if magic != MAGIC {
            return Err(parse_err("bad magic; not an advice file"));
        }
        let version = u16::from_le_bytes(r.take(2)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(parse_err(&format!(
                "unsupported format version {version} (expected {FORMAT_VERSION})"
            )));
        }
        let dim = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
        if dim != basis.dim() {
            return Err(SieveError::AdviceMismatch(format!(
                "advice dimension {dim} does not match basis dimension {}",
                basis.dim()
            )));
        }
        let mode_tag = r.take(1)?[0];
        let mode_param = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let mode = match mode_tag {
            0 => QueryMode::Exact,
            1 => QueryMode::BoundedDistance { delta: mode_param },
            2 => QueryMode::Approximate { kappa: mode_param },
            other => return Err(parse_err(&format!("bad mode tag {other}"))),
        };
        let alpha = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let certified = match r.take(1)?[0] {
            0 => false,
            1 => true,
            other => return Err(parse_err(&format!("bad certification flag {other}"))),
        };
        let seed = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let samples = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let reductions = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let collisions = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let sieve_certified = match r.take(1)?[0] {
            0 => false,
            1 => true,
            other => return Err(parse_err(&format!("bad sieve flag {other}"))),
        };
        let closure_added = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let lambda1_value = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let source = match r.take(1)?[0] {
            0 => Lambda1Source::Enumerated,
            1 => Lambda1Source::GaussianHeuristic,
            other => return Err(parse_err(&format!("bad first-minimum tag {other}"))),
        };
        let mut fingerprint = [0u8; 32];
        fingerprint.copy_from_slice(r.take(32)?);
        if &fingerprint != basis.fingerprint() {
            return Err(SieveError::AdviceMismatch(
                "advice was built for a different basis (fingerprint mismatch)".into(),
            ));
        }
        let len = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
        let mut vectors = Vec::with_capacity(len);
        for _ in 0..len {
            let mut coeffs = Vec::with_capacity(dim);
            for _ in 0..dim {
                coeffs.push(i64::from_le_bytes(r.take(8)?.try_into().unwrap()));
            }
            let v = basis.vector(coeffs);
            if v.is_zero() {
                return Err(parse_err("advice contains the zero vector"));
            }
            vectors.push(v);
        }
        let lsf = match r.take(1)?[0] {
            0 => None,
            1 => {
                let seed = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
                let theta = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
                let u = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
                let num_filters = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
                Some(LsfConfig { seed, theta, u, num_filters })
            }
            other => return Err(parse_err(&format!("bad filter flag {other}"))),
        };
        if r.pos != bytes.len() {
            return Err(parse_err("trailing bytes after advice payload"));
        }
        Ok(PreprocessedList {
            dim,
            alpha,
            mode,
            certified,
            lambda1: Lambda1Estimate { value: lambda1_value, source },
            basis_fingerprint: fingerprint,
            vectors,
            lsf,
            meta: PreprocessMeta {
                seed,
                samples,
                reductions,
                collisions,
                sieve_certified,
                closure_added,
            },
        })
    }

    pub fn from_path(path: &std::path::Path, basis: &Basis) -> Result<Self, SieveError> {
        let bytes = std::fs::read(path).map_err(|e| {
            SieveError::Lattice(LatticeError::Parse {
                what: "advice file",
                detail: format!("{}: {e}", path.display()),
            })
        })?;
        Self::from_bytes(&bytes, basis)
    }
}

fn parse_err(detail: &str) -> SieveError {
    SieveError::Lattice(LatticeError::Parse { what: "advice file", detail: detail.into() })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SieveError> {
        if self.pos + n > self.bytes.len() {
            return Err(parse_err("truncated advice file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
}

/// A target reduced through the advice list until no list vector shrinks the
/// residual by the slack.
#[derive(Clone, Debug)]
pub struct ReducedTarget {
    /// What is left of the target after subtracting `coeff_delta`.
    pub residual: Vec<f64>,
    /// Coefficients of the lattice vector subtracted from the target.
    pub coeff_delta: Vec<i64>,
    /// Residual norm as a multiple of the first-minimum estimate.
    pub beta: f64,
    /// Reduction steps applied.
    pub reductions: u64,
}

impl ReducedTarget {
    /// Squared norm of the residual.
    pub fn norm_sq(&self) -> f64 {
        self.residual.iter().map(|x| x * x).sum()
    }
}

/// The result of answering one query, with its certificate.
#[derive(Clone, Debug)]
pub struct CvppAnswer {
    /// Lattice vector the target reduced onto.
    pub closest: LatticeVector,
    /// Distance from the target to `closest`.
    pub distance: f64,
    /// Distance as a multiple of the first-minimum estimate.
    pub beta: f64,
    /// Bound on `beta` the query mode promises, when it promises one
    /// (exact: 1; approximation: kappa; distance-promise modes answer in
    /// absolute terms instead).
    pub beta_bound: Option<f64>,
    /// Whether `beta` sits within `beta_bound`.
    pub within_bound: Option<bool>,
    /// Reduction steps applied.
    pub reductions: u64,
    /// Relaxation the mode asked for.
    pub mode_alpha: f64,
    /// Whether candidates came through the filter index.
    pub lsf_used: bool,
}

/// Reusable query state over one advice list: builds the filter index once
/// (when the advice carries one) and answers any number of targets.
pub struct QueryEngine<'a> {
    advice: &'a PreprocessedList,
    index: Option<LsfIndex>,
    /// Reduced copy of the basis for jump-starting far targets; present when
    /// the engine was built with the basis at hand.
    init: Option<ReducedBasis>,
}

impl<'a> QueryEngine<'a> {
    /// Engine over the advice alone. Targets are reduced from scratch; far
    /// targets on skewed bases fare better with [`QueryEngine::with_basis`].
    pub fn new(advice: &'a PreprocessedList) -> Result<Self, SieveError> {
        Self::build(advice, None)
    }

    /// Engine that can additionally jump-start the reduction with
    /// deterministic draws of lattice points near the target. The list
    /// vectors are all short, so reducing a target that is many multiples of
    /// the first minimum away takes thousands of tiny steps and can strand
    /// in a corridor almost orthogonal to every list vector; starting from a
    /// nearby lattice point instead begins the walk inside the basin the
    /// list covers. Drawing near an arbitrary point is only as good as the
    /// basis profile, so the draws run on a reduced copy of the basis.
    pub fn with_basis(
        advice: &'a PreprocessedList,
        basis: &Basis,
    ) -> Result<Self, SieveError> {
        if basis.fingerprint() != &advice.basis_fingerprint {
            return Err(SieveError::AdviceMismatch(
                "advice was built for a different basis (fingerprint mismatch)".into(),
            ));
        }
        Self::build(advice, Some(lll(basis)?))
    }

    fn build(
        advice: &'a PreprocessedList,
        init: Option<ReducedBasis>,
    ) -> Result<Self, SieveError> {
        let index = match advice.lsf {
            None => None,
            Some(cfg) => {
                let mut idx = LsfIndex::with_filter_count(
                    advice.dim,
                    cfg.theta,
                    cfg.u,
                    cfg.seed,
                    cfg.num_filters as usize,
                )?;
                for (i, v) in advice.vectors.iter().enumerate() {
                    idx.insert(i as u32, v.coords());
                }
                Some(idx)
            }
        };
        Ok(QueryEngine { advice, index, init })
    }

    pub fn advice(&self) -> &PreprocessedList {
        self.advice
    }

    /// Whether queries route candidates through the filter index.
    pub fn filtered(&self) -> bool {
        self.index.is_some()
    }

    /// Deterministic lattice points near the target, used as alternative
    /// starting points for the reduction walk when the engine holds the
    /// basis. Seeded from the advice seed and the exact target bits, so the
    /// same (advice, target) pair always draws the same points.
    fn initial_points(&self, target: &TargetVector) -> Vec<LatticeVector> {
        let Some(reduced) = self.init.as_ref() else {
            return Vec::new();
        };
        let mut hasher = Sha256::new();
        hasher.update(b"sievekit-query-init-v1");
        hasher.update(self.advice.meta.seed.to_le_bytes());
        for &x in target.coords() {
            hasher.update(x.to_bits().to_le_bytes());
        }
        let digest = hasher.finalize();
        let seed = u64::from_le_bytes(digest[..8].try_into().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spread = self.advice.lambda1.value;
        let sampler = KleinSampler::new(reduced.basis());
        let mut starts: Vec<LatticeVector> = (0..INIT_DRAWS)
            .map(|_| {
                let draw = sampler.sample_around(&mut rng, target.coords(), spread);
                // Rewrite in original-basis coefficients; the point itself is
                // unchanged.
                LatticeVector::from_parts(
                    reduced.to_original_coeffs(draw.coeffs()),
                    draw.coords().to_vec(),
                )
            })
            .collect();
        starts.sort_by(|a, b| {
            let da = a.dist_sq_to(target.coords());
            let db = b.dist_sq_to(target.coords());
            da.partial_cmp(&db)
                .unwrap()
                .then_with(|| a.coeffs().cmp(b.coeffs()))
        });
        starts.dedup_by(|a, b| a.coeffs() == b.coeffs());
        starts
    }

    /// One steepest-descent reduction walk from `start` (the zero vector
    /// when `None`): each step subtracts whichever list vector (either sign)
    /// shrinks the residual norm the most, and the walk stops when no vector
    /// shrinks it by more than the slack.
    fn walk(
        &self,
        target: &[f64],
        start: Option<&LatticeVector>,
    ) -> Result<ReducedTarget, SieveError> {
        let advice = self.advice;
        let mut residual: Vec<f64> = match start {
            None => target.to_vec(),
            Some(s) => target.iter().zip(s.coords()).map(|(t, c)| t - c).collect(),
        };
        let mut res_norm_sq: f64 = residual.iter().map(|x| x * x).sum();
        let mut delta = match start {
            None => vec![0i64; advice.dim],
            Some(s) => s.coeffs().to_vec(),
        };
        let mut reductions: u64 = 0;
        'scan: loop {
            if reductions > MAX_REDUCTIONS {
                return Err(SieveError::Param(format!(
                    "target reduction did not converge within {MAX_REDUCTIONS} steps"
                )));
            }
            // Accept only strict progress: the new norm must undercut the
            // current one by the absolute slack.
            let accept_sq = res_norm_sq - 2.0 * REDUCE_SLACK * res_norm_sq.sqrt();
            let candidate_ids: Vec<u32> = match &self.index {
                None => (0..advice.vectors.len() as u32).collect(),
                Some(idx) => {
                    let mut ids = idx.candidates_for(&residual);
                    let neg: Vec<f64> = residual.iter().map(|x| -x).collect();
                    ids.extend(idx.candidates_for(&neg));
                    ids.sort_unstable();
                    ids.dedup();
                    ids
                }
            };
            // Steepest step: the candidate-and-sign pair with the smallest
            // resulting norm (ties keep the earliest candidate).
            let mut best_step: Option<(f64, u32, f64)> = None;
            for id in candidate_ids {
                let w = &advice.vectors[id as usize];
                let dot: f64 = residual.iter().zip(w.coords()).map(|(a, b)| a * b).sum();
                let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
                let new_norm_sq = res_norm_sq + w.norm_sq() - 2.0 * sign * dot;
                if new_norm_sq <= accept_sq
                    && best_step.is_none_or(|(b, _, _)| new_norm_sq < b)
                {
                    best_step = Some((new_norm_sq, id, sign));
                }
            }
            if let Some((_, id, sign)) = best_step {
                let w = &advice.vectors[id as usize];
                for (r, &c) in residual.iter_mut().zip(w.coords()) {
                    *r -= sign * c;
                }
                for (d, &c) in delta.iter_mut().zip(w.coeffs()) {
                    *d += if sign >= 0.0 { c } else { -c };
                }
                res_norm_sq = residual.iter().map(|x| x * x).sum();
                reductions += 1;
                continue 'scan;
            }
            break;
        }
        Ok(ReducedTarget {
            residual,
            coeff_delta: delta,
            beta: res_norm_sq.sqrt() / advice.lambda1.value,
            reductions,
        })
    }

    /// Reduce a target through the advice list and return the best walk.
    ///
    /// Without the basis this is a single walk from the zero vector. With it,
    /// the walk is additionally run from each deterministic draw of a nearby
    /// lattice point, and the shortest final residual wins: a greedy walk can
    /// strand in a corridor nearly orthogonal to every list vector, and
    /// independent starting points make that exponentially unlikely to happen
    /// every time. The zero start is skipped only when the target is far
    /// (many multiples of the first minimum) and some lattice start is
    /// strictly closer — there the zero walk needs thousands of steps and is
    /// the most strand-prone of all.
    pub fn reduce_target(&self, target: &TargetVector) -> Result<ReducedTarget, SieveError> {
        let advice = self.advice;
        if target.dim() != advice.dim {
            return Err(SieveError::Param(format!(
                "target has dimension {}, advice has {}",
                target.dim(),
                advice.dim
            )));
        }
        let t = target.coords();
        let target_norm_sq: f64 = t.iter().map(|x| x * x).sum();
        let starts = self.initial_points(target);
        let far = {
            let near_limit = FAR_TARGET_FACTOR * advice.lambda1.value;
            target_norm_sq > near_limit * near_limit
        };
        let skip_zero = far
            && starts
                .first()
                .is_some_and(|s| s.dist_sq_to(t) < target_norm_sq);
        let mut best: Option<ReducedTarget> = if skip_zero {
            None
        } else {
            Some(self.walk(t, None)?)
        };
        for s in &starts {
            let cand = self.walk(t, Some(s))?;
            let better = match &best {
                None => true,
                Some(b) => {
                    let bn = b.norm_sq();
                    let cn = cand.norm_sq();
                    cn < bn || (cn == bn && cand.coeff_delta < b.coeff_delta)
                }
            };
            if better {
                best = Some(cand);
            }
        }
        Ok(best.expect("at least one reduction walk always runs"))
    }

    /// Answer a query by target reduction. The advice must be at least as
    /// strong as the mode requires (unless deliberately built uncertified
    /// for that mode).
    pub fn answer(
        &self,
        target: &TargetVector,
        mode: QueryMode,
    ) -> Result<CvppAnswer, SieveError> {
        let advice = self.advice;
        let required = effective_alpha(
            min_alpha(mode).map_err(|e| SieveError::Param(e.to_string()))?,
        );
        // An uncertified advice answers the mode it was built for (that is
        // what the override asked for); anything else must meet the bar.
        let grandfathered = !advice.certified && mode == advice.mode;
        if advice.alpha + 1e-9 < required && !grandfathered {
            return Err(SieveError::Certification(format!(
                "advice relaxation {:.6} is too weak for this mode (needs {:.6}); rebuild the advice",
                advice.alpha, required
            )));
        }
        let reduced = self.reduce_target(target)?;
        let coords: Vec<f64> = target
            .coords()
            .iter()
            .zip(&reduced.residual)
            .map(|(t, r)| t - r)
            .collect();
        let closest = LatticeVector::from_parts(reduced.coeff_delta, coords);
        let beta_bound = mode.beta_bound();
        Ok(CvppAnswer {
            closest,
            distance: reduced.beta * advice.lambda1.value,
            beta: reduced.beta,
            beta_bound,
            within_bound: beta_bound.map(|b| reduced.beta <= b + 1e-9),
            reductions: reduced.reductions,
            mode_alpha: required,
            lsf_used: self.index.is_some(),
        })
    }
}

/// One-shot convenience wrapper around [`QueryEngine`].
pub fn answer_query(
    advice: &PreprocessedList,
    target: &TargetVector,
    mode: QueryMode,
) -> Result<CvppAnswer, SieveError> {
    QueryEngine::new(advice)?.answer(target, mode)
}

/// Recovery rate for one perturbation size in [`collision_experiment`].
#[derive(Clone, Copy, Debug)]
pub struct CollisionPoint {
    /// Perturbation norm as a multiple of the first minimum.
    pub delta: f64,
    /// Fraction of trials whose reduction landed exactly on the planted
    /// vector.
    pub rate: f64,
    pub trials: u64,
}

/// Plant-and-recover experiment: sample a lattice vector, nudge it by
/// `delta * lambda1` in a random direction, and check whether reducing the
/// nudged point lands back on the planted vector. Small nudges should
/// collide with their plant almost always; large ones increasingly escape
/// to other lattice points.
pub fn collision_experiment(
    basis: &Basis,
    advice: &PreprocessedList,
    deltas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<CollisionPoint>, SieveError> {
    if basis.fingerprint() != &advice.basis_fingerprint {
        return Err(SieveError::AdviceMismatch(
            "advice was built for a different basis (fingerprint mismatch)".into(),
        ));
    }
    if trials == 0 {
        return Err(SieveError::Param("at least one trial is required".into()));
    }
    let engine = QueryEngine::with_basis(advice, basis)?;
    let lambda1 = advice.lambda1.value;
    // Plant on a reduced copy so draws actually land at the requested few
    // multiples of the first minimum rather than at the raw basis's rounding
    // residue.
    let draw_basis = lll(basis)?;
    let sampler = KleinSampler::new(draw_basis.basis());
    let dim = basis.dim();
    let mut out = Vec::with_capacity(deltas.len());
    for (i, &delta) in deltas.iter().enumerate() {
        if !(delta >= 0.0) {
            return Err(SieveError::Param(format!(
                "perturbation size must be nonnegative, got {delta}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64).wrapping_mul(i as u64 + 1));
        let mut hits = 0u64;
        for _ in 0..trials {
            let draw = sampler.sample_with(&mut rng, 2.0 * lambda1);
            let v = LatticeVector::from_parts(
                draw_basis.to_original_coeffs(draw.coeffs()),
                draw.coords().to_vec(),
            );
            let mut dir: Vec<f64> = (0..dim)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
                .collect();
            let n: f64 = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                continue;
            }
            for x in &mut dir {
                *x *= delta * lambda1 / n;
            }
            let t = TargetVector::new(
                v.coords().iter().zip(&dir).map(|(a, b)| a + b).collect(),
            );
            let reduced = engine.reduce_target(&t)?;
            if reduced.coeff_delta == v.coeffs() {
                hits += 1;
            }
        }
        out.push(CollisionPoint { delta, rate: hits as f64 / trials as f64, trials });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_below, enumerate_cvp, random_lattice};

    fn exact_advice(basis: &Basis, seed: u64) -> PreprocessedList {
        preprocess(basis, &PreprocessConfig::new(QueryMode::Exact, seed)).unwrap()
    }

    #[test]
    fn advice_covers_the_whole_ball() {
        // The stored list must contain every lattice vector up to the
        // relaxation radius — queries rely on nothing being missing.
        let basis = random_lattice(14, 2).unwrap();
        let advice = exact_advice(&basis, 7);
        let bound = advice.alpha() * 1.02 * advice.lambda1().value;
        let ball = enumerate_below(&basis, bound).unwrap();
        let stored: HashSet<&[i64]> =
            advice.vectors().iter().map(|v| v.coeffs()).collect();
        let missing = ball.iter().filter(|v| !stored.contains(v.coeffs())).count();
        assert_eq!(missing, 0, "advice misses {missing} of {} ball vectors", ball.len());
        // And nothing above the bound sneaks in.
        let bound_sq = bound * bound * (1.0 + 1e-9);
        assert!(advice.vectors().iter().all(|v| v.norm_sq() <= bound_sq));
        assert!(advice.certified());
        assert_eq!(advice.mode(), QueryMode::Exact);
        assert!(advice.meta().closure_added > 0);
    }

    #[test]
    fn identity_queries_reduce_to_rounding() {
        let basis = Basis::identity(6);
        let advice = exact_advice(&basis, 1);
        assert!(advice.vectors().iter().any(|v| v.norm_sq() == 1.0));
        // Inside the fundamental box: the answer is the origin.
        let t = TargetVector::new(vec![0.4, 0.3, 0.0, 0.0, 0.0, -0.2]);
        let a = answer_query(&advice, &t, QueryMode::Exact).unwrap();
        assert!(a.closest.is_zero());
        assert!((a.distance - t.norm()).abs() < 1e-12);
        assert_eq!(a.beta_bound, Some(1.0));
        assert_eq!(a.within_bound, Some(true));
        // One step over: the answer is the unit vector.
        let t2 = TargetVector::new(vec![1.4, 0.3, 0.0, 0.0, 0.0, 0.0]);
        let a2 = answer_query(&advice, &t2, QueryMode::Exact).unwrap();
        assert_eq!(a2.closest.coeffs(), &[1, 0, 0, 0, 0, 0]);
        assert!(a2.reductions >= 1);
        assert!((a2.beta * advice.lambda1().value - a2.distance).abs() < 1e-12);
    }

    #[test]
    fn planted_targets_recovered_on_random_lattices() {
        let basis = random_lattice(14, 2).unwrap();
        let advice = exact_advice(&basis, 7);
        let lambda1 = advice.lambda1().value;
        let sampler = KleinSampler::new(&basis);
        let engine = QueryEngine::with_basis(&advice, &basis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..10 {
            let v = sampler.sample_with(&mut rng, 2.0 * lambda1);
            // Offset of 0.4 * lambda1 in a pseudo-random direction.
            let mut offset: Vec<f64> = (0..14)
                .map(|i| ((trial * 17 + i) as f64 * 1.37).sin())
                .collect();
            let n: f64 = offset.iter().map(|x| x * x).sum::<f64>().sqrt();
            for o in &mut offset {
                *o *= 0.4 * lambda1 / n;
            }
            let t = TargetVector::new(
                v.coords().iter().zip(&offset).map(|(a, b)| a + b).collect(),
            );
            let answer = engine.answer(&t, QueryMode::Exact).unwrap();
            let oracle = enumerate_cvp(&basis, &t).unwrap();
            assert_eq!(
                answer.closest.coeffs(),
                oracle.coeffs(),
                "trial {trial}: got dist {}, oracle dist {}",
                answer.distance,
                oracle.dist_sq_to(t.coords()).sqrt()
            );
            assert_eq!(answer.within_bound, Some(true));
        }
    }

    #[test]
    fn weak_advice_is_refused_for_strong_modes() {
        let basis = random_lattice(10, 3).unwrap();
        let weak_mode = QueryMode::Approximate { kappa: 2.0 };
        let weak = preprocess(&basis, &PreprocessConfig::new(weak_mode, 1)).unwrap();
        assert!(weak.certified());
        let t = TargetVector::new(vec![0.3; 10]);
        assert!(matches!(
            answer_query(&weak, &t, QueryMode::Exact),
            Err(SieveError::Certification(_))
        ));
        // The weak mode itself works.
        assert!(answer_query(&weak, &t, weak_mode).is_ok());
        // Strong advice serves weak modes.
        let strong = exact_advice(&basis, 1);
        assert!(answer_query(&strong, &t, weak_mode).is_ok());
        assert!(answer_query(&strong, &t, QueryMode::BoundedDistance { delta: 0.5 }).is_ok());
    }

    #[test]
    fn uncertified_override_serves_only_its_own_mode() {
        let basis = random_lattice(10, 4).unwrap();
        let mut cfg = PreprocessConfig::new(QueryMode::Exact, 2);
        cfg.alpha_override = Some(1.2); // below the exact-mode bar of sqrt(2)
        let advice = preprocess(&basis, &cfg).unwrap();
        assert!(!advice.certified());
        assert!(advice.alpha() < std::f64::consts::SQRT_2);
        let t = TargetVector::new(vec![0.4; 10]);
        // The override's own mode answers (uncertified, for experiments)...
        let a = answer_query(&advice, &t, QueryMode::Exact).unwrap();
        assert_eq!(a.beta_bound, Some(1.0));
        // ...but other modes still enforce their own bar.
        assert!(matches!(
            answer_query(&advice, &t, QueryMode::Approximate { kappa: 1.05 }),
            Err(SieveError::Certification(_))
        ));
    }

    #[test]
    fn serialization_round_trips_byte_identically() {
        let basis = random_lattice(12, 5).unwrap();
        let mut config = PreprocessConfig::new(QueryMode::Exact, 11);
        config.use_lsf = true;
        let advice = preprocess(&basis, &config).unwrap();
        let bytes = advice.to_bytes();
        let back = PreprocessedList::from_bytes(&bytes, &basis).unwrap();
        assert_eq!(back.dim(), advice.dim());
        assert_eq!(back.alpha().to_bits(), advice.alpha().to_bits());
        assert_eq!(back.mode(), advice.mode());
        assert_eq!(back.certified(), advice.certified());
        assert_eq!(back.meta(), advice.meta());
        assert_eq!(
            back.lambda1().value.to_bits(),
            advice.lambda1().value.to_bits()
        );
        assert_eq!(back.vectors().len(), advice.vectors().len());
        for (a, b) in advice.vectors().iter().zip(back.vectors()) {
            assert_eq!(a, b);
            assert_eq!(a.coords(), b.coords());
        }
        assert_eq!(back.lsf(), advice.lsf());
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn deserialization_rejects_wrong_basis_and_corruption() {
        let basis = random_lattice(10, 6).unwrap();
        let other = random_lattice(10, 7).unwrap();
        let advice = exact_advice(&basis, 3);
        let bytes = advice.to_bytes();
        assert!(matches!(
            PreprocessedList::from_bytes(&bytes, &other),
            Err(SieveError::AdviceMismatch(_))
        ));
        assert!(PreprocessedList::from_bytes(&bytes[..bytes.len() - 3], &basis).is_err());
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(PreprocessedList::from_bytes(&bad_magic, &basis).is_err());
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(PreprocessedList::from_bytes(&trailing, &basis).is_err());
    }

    #[test]
    fn filtered_queries_only_miss_reducers() {
        // Filtering may miss a reducing vector (the answer can be farther),
        // but it must never fabricate anything a full scan would not accept,
        // and any gap must be explained by a reducer the full scan still
        // sees at the filtered residual.
        let basis = random_lattice(12, 9).unwrap();
        let brute = preprocess(&basis, &PreprocessConfig::new(QueryMode::Exact, 4)).unwrap();
        let mut cfg = PreprocessConfig::new(QueryMode::Exact, 4);
        cfg.use_lsf = true;
        let filtered = preprocess(&basis, &cfg).unwrap();
        let engine_b = QueryEngine::with_basis(&brute, &basis).unwrap();
        let engine_f = QueryEngine::with_basis(&filtered, &basis).unwrap();
        let mut exact_matches = 0;
        for k in 0..6 {
            let t = TargetVector::new(
                (0..12).map(|i| ((k * 13 + i) as f64 * 0.911).sin() * 400.0).collect(),
            );
            let a = engine_b.answer(&t, QueryMode::Exact).unwrap();
            let b = engine_f.answer(&t, QueryMode::Exact).unwrap();
            assert!(!a.lsf_used);
            assert!(b.lsf_used);
            // One-sided error: filtering never beats the full scan.
            assert!(
                b.distance >= a.distance - 1e-9,
                "target {k}: filtered {} beat brute {}",
                b.distance,
                a.distance
            );
            if b.closest.coeffs() == a.closest.coeffs() {
                exact_matches += 1;
            } else {
                // Any gap must be benign: either the filtered residual is
                // still reducible by some full-list vector the filters
                // missed, or the filtered endpoint still meets the mode's
                // distance promise.
                let res: Vec<f64> = t
                    .coords()
                    .iter()
                    .zip(b.closest.coords())
                    .map(|(x, y)| x - y)
                    .collect();
                let missed_reducer = brute.vectors().iter().any(|w| {
                    let dot: f64 =
                        res.iter().zip(w.coords()).map(|(p, q)| p * q).sum();
                    2.0 * dot.abs() > w.norm_sq() + 1e-9
                });
                assert!(
                    missed_reducer || b.within_bound == Some(true),
                    "target {k}: filtered answer differs, is not explained by a \
                     missed reducer, and overshoots the promised bound"
                );
            }
        }
        assert!(exact_matches >= 3, "only {exact_matches}/6 filtered answers were exact");
    }

    #[test]
    fn collision_rates_decay_with_perturbation_size() {
        let basis = random_lattice(12, 6).unwrap();
        let advice = exact_advice(&basis, 5);
        let points =
            collision_experiment(&basis, &advice, &[0.01, 0.5], 40, 77).unwrap();
        assert_eq!(points.len(), 2);
        assert!(points[0].rate >= points[1].rate);
        assert!(points[0].rate > 0.6, "tiny nudges should almost always collide");
        // The advice must belong to the basis.
        let other = random_lattice(12, 8).unwrap();
        assert!(matches!(
            collision_experiment(&other, &advice, &[0.1], 5, 1),
            Err(SieveError::AdviceMismatch(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("advice.bin");
        let basis = random_lattice(10, 8).unwrap();
        let advice = exact_advice(&basis, 2);
        advice.write_to_path(&path).unwrap();
        let back = PreprocessedList::from_path(&path, &basis).unwrap();
        assert_eq!(back.to_bytes(), advice.to_bytes());
    }
}
