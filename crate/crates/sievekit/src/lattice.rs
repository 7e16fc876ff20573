//! Exact integer lattice bases and the float geometry layered on top.
//!
//! Bases are square integer matrices whose rows generate the lattice.
//! Coefficient vectors stay exact (`i64`); coordinates are `f64`, and because
//! every coordinate is an integer combination of integer entries they remain
//! exact as long as they fit the 2^53 integer window — desk-scale instances
//! stay far inside it. All float comparisons elsewhere in the crate use a
//! relative tolerance of 1e-9 on top of this exact layer.

mod enumerate;
mod generator;
mod reduce;
mod sampler;

pub use enumerate::{enumerate_below, enumerate_cvp, enumerate_svp, EXACT_SEARCH_CAP};
pub use generator::random_lattice;
pub use reduce::{lll, ReducedBasis};
pub use sampler::{sample_lattice_vector, KleinSampler};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Errors from basis construction, parsing, and the exact search oracles.
#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid basis shape: {0}")]
    Shape(String),
    #[error("basis rows are linearly dependent (Gram-Schmidt vector {index} vanished)")]
    RankDeficient { index: usize },
    #[error("dimension {dim} exceeds the exact-search cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("no nonzero lattice vector within the requested bound {bound}")]
    EmptyResult { bound: f64 },
    #[error("enumeration abandoned: {0}")]
    SearchBudget(String),
    #[error("failed to parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
    #[error("{0}")]
    Domain(String),
}

/// Relative float tolerance used for geometric comparisons across the crate.
pub const REL_TOL: f64 = 1e-9;

/// Gram-Schmidt orthogonalization of a basis: `b_star[i]` is row `i` minus its
/// projection onto the span of rows `0..i`, `mu[i][j]` (for `j < i`) the
/// projection coefficients, `norms_sq[i] = ||b_star[i]||^2`.
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    pub b_star: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    pub norms_sq: Vec<f64>,
}

impl GramSchmidt {
    /// log2 of the lattice determinant (product of orthogonalized norms).
    pub fn det_log2(&self) -> f64 {
        self.norms_sq.iter().map(|n| n.log2()).sum::<f64>() / 2.0
    }

    /// Largest orthogonalized vector norm.
    pub fn max_b_star_norm(&self) -> f64 {
        self.norms_sq.iter().cloned().fold(0.0, f64::max).sqrt()
    }
}

/// Orthogonalize integer rows, failing if they are (numerically) dependent.
///
/// The rank test compares each orthogonalized norm against its row norm at
/// relative threshold 1e-12. Exact integer dependencies cancel to projection
/// roundoff, whose relative square is around `(d * 2^-53)^2` — twenty orders
/// of magnitude below the threshold — while a genuine unit-length orthogonal
/// component against a row of squared norm up to ~2^31 still clears it by a
/// factor of a hundred or more. Adversarially ill-conditioned bases (nearly
/// parallel long rows) are outside the supported envelope.
pub fn gram_schmidt(rows: &[Vec<i64>]) -> Result<GramSchmidt, LatticeError> {
    let n = rows.len();
    let mut b_star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms_sq = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let mut v: Vec<f64> = row.iter().map(|&x| x as f64).collect();
        let row_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        let mut mu_i = Vec::with_capacity(i);
        for j in 0..i {
            let dot: f64 = v.iter().zip(&b_star[j]).map(|(a, b)| a * b).sum();
            let m = dot / norms_sq[j];
            mu_i.push(m);
            for (vk, bk) in v.iter_mut().zip(&b_star[j]) {
                *vk -= m * bk;
            }
        }
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if norm_sq <= 1e-12 * row_norm_sq.max(1.0) {
            return Err(LatticeError::RankDeficient { index: i });
        }
        b_star.push(v);
        mu.push(mu_i);
        norms_sq.push(norm_sq);
    }
    Ok(GramSchmidt { b_star, mu, norms_sq })
}

/// A full-rank integer lattice basis (rows are the generators).
#[derive(Clone, Debug)]
pub struct Basis {
    dim: usize,
    rows: Vec<Vec<i64>>,
    fingerprint: [u8; 32],
    gs: GramSchmidt,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}
impl Eq for Basis {}

impl Basis {
    /// Validate shape and independence and precompute Gram-Schmidt data.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LatticeError::Shape("empty basis".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(LatticeError::Shape(format!(
                "row {} has {} entries, expected {}",
                bad,
                rows[bad].len(),
                dim
            )));
        }
        let gs = gram_schmidt(&rows)?;
        let fingerprint = fingerprint_rows(dim, &rows);
        Ok(Basis { dim, rows, fingerprint, gs })
    }

    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        Basis::new(rows).expect("identity basis is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// SHA-256 over the canonical serialization (dimension, then rows in order).
    pub fn fingerprint(&self) -> &[u8; 32] {
        &self.fingerprint
    }

    pub fn gram_schmidt(&self) -> &GramSchmidt {
        &self.gs
    }

    /// Build the lattice vector with the given coefficient vector.
    pub fn vector(&self, coeffs: Vec<i64>) -> LatticeVector {
        assert_eq!(coeffs.len(), self.dim, "coefficient length mismatch");
        let mut coords = vec![0.0; self.dim];
        for (c, row) in coeffs.iter().zip(&self.rows) {
            if *c != 0 {
                let cf = *c as f64;
                for (out, &e) in coords.iter_mut().zip(row) {
                    *out += cf * e as f64;
                }
            }
        }
        let norm_sq = coords.iter().map(|x| x * x).sum();
        LatticeVector { coeffs, coords, norm_sq }
    }

    /// Parse the on-disk basis format: first non-comment line is the dimension
    /// `d`, the next `d` non-comment lines carry `d` whitespace-separated
    /// integers each. Lines starting with `#` are comments.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let dim_line = lines.next().ok_or(LatticeError::Parse {
            what: "basis file",
            detail: "missing dimension line".into(),
        })?;
        let dim: usize = dim_line.parse().map_err(|e| LatticeError::Parse {
            what: "basis file",
            detail: format!("bad dimension {dim_line:?}: {e}"),
        })?;
        let mut rows = Vec::with_capacity(dim);
        for i in 0..dim {
            let line = lines.next().ok_or_else(|| LatticeError::Parse {
                what: "basis file",
                detail: format!("expected {dim} rows, found {i}"),
            })?;
            let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
            let row = row.map_err(|e| LatticeError::Parse {
                what: "basis file",
                detail: format!("row {i}: {e}"),
            })?;
            if row.len() != dim {
                return Err(LatticeError::Parse {
                    what: "basis file",
                    detail: format!("row {i} has {} entries, expected {dim}", row.len()),
                });
            }
            rows.push(row);
        }
        Basis::new(rows)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, LatticeError> {
        let text = std::fs::read_to_string(path).map_err(|e| LatticeError::Parse {
            what: "basis file",
            detail: format!("{}: {e}", path.display()),
        })?;
        Basis::parse(&text)
    }

    /// Render in the same format `parse` accepts.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn fingerprint_rows(dim: usize, rows: &[Vec<i64>]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"sievekit-basis-v1");
    h.update((dim as u64).to_le_bytes());
    for row in rows {
        for &e in row {
            h.update(e.to_le_bytes());
        }
    }
    h.finalize().into()
}

/// A lattice vector: exact coefficients plus derived coordinates and norm.
#[derive(Clone, Debug)]
pub struct LatticeVector {
    coeffs: Vec<i64>,
    coords: Vec<f64>,
    norm_sq: f64,
}

impl PartialEq for LatticeVector {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for LatticeVector {}
impl std::hash::Hash for LatticeVector {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl LatticeVector {
    /// Assemble from coefficients and coordinates already known to be
    /// consistent (the coordinates are an integer combination of basis rows
    /// with exactly these coefficients).
    pub(crate) fn from_parts(coeffs: Vec<i64>, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), coords.len());
        let norm_sq = coords.iter().map(|x| x * x).sum();
        LatticeVector { coeffs, coords, norm_sq }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        let coeffs: Vec<i64> = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + sign * b)
            .collect();
        let coords: Vec<f64> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + sign as f64 * b)
            .collect();
        let norm_sq = coords.iter().map(|x| x * x).sum();
        LatticeVector { coeffs, coords, norm_sq }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn neg(&self) -> Self {
        LatticeVector {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            coords: self.coords.iter().map(|x| -x).collect(),
            norm_sq: self.norm_sq,
        }
    }

    pub fn dot_coords(&self, other: &Self) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    /// Squared distance from this vector to an arbitrary point.
    pub fn dist_sq_to(&self, point: &[f64]) -> f64 {
        self.coords
            .iter()
            .zip(point)
            .map(|(a, b)| {
                let d = a - b;
                d * d
            })
            .sum()
    }

    /// Sign-canonical representative: flips the sign so the first nonzero
    /// coefficient is positive. Used as the dedup key for +/- pairs.
    pub fn canonicalized(self) -> Self {
        if needs_flip(&self.coeffs) {
            self.neg()
        } else {
            self
        }
    }
}

pub(crate) fn needs_flip(coeffs: &[i64]) -> bool {
    match coeffs.iter().find(|&&c| c != 0) {
        Some(&c) => c < 0,
        None => false,
    }
}

pub(crate) fn canonical_coeffs(coeffs: &[i64]) -> Vec<i64> {
    if needs_flip(coeffs) {
        coeffs.iter().map(|c| -c).collect()
    } else {
        coeffs.to_vec()
    }
}

/// A query point in the lattice's ambient space (real coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct TargetVector {
    coords: Vec<f64>,
}

impl TargetVector {
    pub fn new(coords: Vec<f64>) -> Self {
        TargetVector { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Parse a single target: one non-comment line of `d` reals.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut targets = Self::parse_many(text)?;
        match targets.len() {
            1 => Ok(targets.pop().unwrap()),
            n => Err(LatticeError::Parse {
                what: "target file",
                detail: format!("expected exactly one target line, found {n}"),
            }),
        }
    }

    /// Parse one target per non-comment line (batch query files).
    pub fn parse_many(text: &str) -> Result<Vec<Self>, LatticeError> {
        let mut out = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let coords: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
            let coords = coords.map_err(|e| LatticeError::Parse {
                what: "target file",
                detail: format!("line {}: {e}", lineno + 1),
            })?;
            out.push(TargetVector { coords });
        }
        if out.is_empty() {
            return Err(LatticeError::Parse {
                what: "target file",
                detail: "no target lines found".into(),
            });
        }
        Ok(out)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, LatticeError> {
        let text = std::fs::read_to_string(path).map_err(|e| LatticeError::Parse {
            what: "target file",
            detail: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }
}

/// Where a first-minimum estimate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Lambda1Source {
    /// Exact value from enumeration.
    Enumerated,
    /// Gaussian-heuristic prediction from the determinant.
    GaussianHeuristic,
}

/// Estimate of the lattice's first minimum together with its provenance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Lambda1Estimate {
    pub value: f64,
    pub source: Lambda1Source,
}

/// Gaussian-heuristic estimate of the first minimum:
/// `sqrt(d / (2*pi*e)) * det^(1/d)`, evaluated in log-space for stability.
pub fn gaussian_heuristic_lambda1(basis: &Basis) -> Lambda1Estimate {
    let d = basis.dim() as f64;
    let det_log2 = basis.gram_schmidt().det_log2();
    let value = (d / (2.0 * std::f64::consts::PI * std::f64::consts::E)).sqrt()
        * (det_log2 / d).exp2();
    Lambda1Estimate { value, source: Lambda1Source::GaussianHeuristic }
}

/// Best available first-minimum estimate: exact enumeration up to the search
/// cap, Gaussian heuristic beyond it.
pub fn lambda1_estimate(basis: &Basis) -> Lambda1Estimate {
    if basis.dim() <= EXACT_SEARCH_CAP {
        if let Ok(shortest) = enumerate_svp(basis, None) {
            return Lambda1Estimate {
                value: shortest.norm(),
                source: Lambda1Source::Enumerated,
            };
        }
    }
    gaussian_heuristic_lambda1(basis)
}
