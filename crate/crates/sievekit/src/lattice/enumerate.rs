//! Exhaustive lattice search used as the provably-correct baseline at desk
//! scale: depth-first enumeration over coefficient vectors with float pruning
//! in the orthogonalized frame and exact re-checks at the leaves.
//!
//! The public searches reduce a copy of the basis first and translate
//! coefficients back afterwards: on an unbalanced profile the top levels
//! carry almost the whole norm, so pruning cannot bite until the last level
//! and the tree degenerates to the full coefficient grid. The search result
//! is basis-independent either way; only the tree size changes.
//!
//! All searches refuse dimensions above [`EXACT_SEARCH_CAP`] and abort with a
//! budget error rather than run unbounded.

use super::{
    canonical_coeffs, gaussian_heuristic_lambda1, lll, Basis, GramSchmidt, LatticeError,
    LatticeVector, TargetVector, REL_TOL,
};

/// Hard ceiling on the dimension the exact searches will attempt.
pub const EXACT_SEARCH_CAP: usize = 40;

/// Abort threshold on enumeration tree nodes.
const NODE_BUDGET: u64 = 100_000_000;

/// Shared per-search data: Gram-Schmidt frame plus the target expressed in it.
struct SearchSpace<'a> {
    gs: &'a GramSchmidt,
    dim: usize,
    /// `mu_col[i][k]` is the projection coefficient of row `i+1+k` onto
    /// orthogonalized vector `i` (column `i` of mu, below the diagonal).
    mu_col: Vec<Vec<f64>>,
    /// Target coefficients in the orthogonalized frame.
    c: Vec<f64>,
}

impl<'a> SearchSpace<'a> {
    fn new(basis: &'a Basis, target: Option<&[f64]>) -> Self {
        let gs = basis.gram_schmidt();
        let dim = basis.dim();
        let mu_col: Vec<Vec<f64>> = (0..dim)
            .map(|i| ((i + 1)..dim).map(|j| gs.mu[j][i]).collect())
            .collect();
        let c = match target {
            None => vec![0.0; dim],
            Some(t) => (0..dim)
                .map(|i| {
                    let dot: f64 = t.iter().zip(&gs.b_star[i]).map(|(a, b)| a * b).sum();
                    dot / gs.norms_sq[i]
                })
                .collect(),
        };
        SearchSpace { gs, dim, mu_col, c }
    }

    /// Center of the admissible interval at `level` given the choices above it.
    fn center(&self, level: usize, u: &[i64]) -> f64 {
        let mut center = self.c[level];
        for (k, &m) in self.mu_col[level].iter().enumerate() {
            let uj = u[level + 1 + k];
            if uj != 0 {
                center -= uj as f64 * m;
            }
        }
        center
    }

    /// Depth-first search of all coefficient vectors whose squared distance to
    /// the target (in the float frame) stays within `radius_sq`. The leaf
    /// callback may shrink the radius by returning `Some(new_radius_sq)`.
    fn run<F>(&self, radius_sq: f64, on_leaf: &mut F) -> Result<(), LatticeError>
    where
        F: FnMut(&[i64], f64) -> Option<f64>,
    {
        let mut u = vec![0i64; self.dim];
        let mut radius = radius_sq;
        let mut nodes: u64 = 0;
        self.descend(self.dim - 1, 0.0, &mut u, &mut radius, &mut nodes, on_leaf)
    }

    fn descend<F>(
        &self,
        level: usize,
        partial: f64,
        u: &mut [i64],
        radius: &mut f64,
        nodes: &mut u64,
        on_leaf: &mut F,
    ) -> Result<(), LatticeError>
    where
        F: FnMut(&[i64], f64) -> Option<f64>,
    {
        let center = self.center(level, u);
        let norm_sq = self.gs.norms_sq[level];
        let u0 = center.round() as i64;
        let mut lo = u0;
        let mut hi = u0;
        let mut first = true;
        loop {
            // Candidates in order of increasing |cand - center|, so the first
            // pruned candidate ends the whole level.
            let cand = if first {
                first = false;
                u0
            } else {
                let dl = (lo - 1) as f64 - center;
                let dh = (hi + 1) as f64 - center;
                if dl.abs() <= dh.abs() {
                    lo -= 1;
                    lo
                } else {
                    hi += 1;
                    hi
                }
            };
            *nodes += 1;
            if *nodes > NODE_BUDGET {
                return Err(LatticeError::SearchBudget(format!(
                    "exceeded {NODE_BUDGET} tree nodes at dimension {}",
                    self.dim
                )));
            }
            let diff = cand as f64 - center;
            let new_partial = partial + diff * diff * norm_sq;
            if new_partial > *radius {
                break;
            }
            u[level] = cand;
            if level == 0 {
                if let Some(shrunk) = on_leaf(u, new_partial) {
                    *radius = shrunk;
                }
            } else {
                self.descend(level - 1, new_partial, u, radius, nodes, on_leaf)?;
            }
        }
        u[level] = 0;
        Ok(())
    }
}

fn check_cap(basis: &Basis) -> Result<(), LatticeError> {
    if basis.dim() > EXACT_SEARCH_CAP {
        return Err(LatticeError::DimensionCap {
            dim: basis.dim(),
            cap: EXACT_SEARCH_CAP,
        });
    }
    Ok(())
}

/// Inclusive slackened squared bound for "norm <= bound" tests.
fn slack_sq(bound: f64) -> f64 {
    bound * bound * (1.0 + REL_TOL) + REL_TOL
}

fn min_row_norm(basis: &Basis) -> f64 {
    basis
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Exact shortest-vector search.
///
/// With `bound = None` the radius starts near the Gaussian-heuristic estimate
/// and widens geometrically; the final rung is the shortest basis row, which
/// is itself a lattice vector, so the search always terminates with a result.
/// With `bound = Some(b)` only vectors of norm at most `b` are considered and
/// an empty ball is reported as [`LatticeError::EmptyResult`].
///
/// Ties are broken by the sign-canonical, lexicographically smallest
/// coefficient vector; the result is sign-canonical.
pub fn enumerate_svp(basis: &Basis, bound: Option<f64>) -> Result<LatticeVector, LatticeError> {
    check_cap(basis)?;
    if let Some(b) = bound {
        if !(b > 0.0) {
            return Err(LatticeError::Domain(format!(
                "shortest-vector bound must be positive, got {b}"
            )));
        }
    }
    let reduced = lll(basis)?;
    let rungs = match bound {
        Some(b) => vec![b],
        None => {
            let gh = gaussian_heuristic_lambda1(basis).value;
            let cap = min_row_norm(reduced.basis());
            let mut rungs = Vec::new();
            let mut r = 1.05 * gh;
            while r < cap && r.is_finite() {
                rungs.push(r);
                r *= 1.15;
            }
            rungs.push(cap * (1.0 + REL_TOL));
            rungs
        }
    };
    let space = SearchSpace::new(reduced.basis(), None);
    for rung in rungs {
        let mut best: Option<(f64, Vec<i64>)> = None;
        space.run(slack_sq(rung), &mut |u, dist_float| {
            if u.iter().all(|&x| x == 0) {
                return None;
            }
            if let Some((best_sq, _)) = &best {
                // Cheap float gate before building the exact vector.
                if dist_float > best_sq * (1.0 + 1e-6) + 1e-9 {
                    return None;
                }
            }
            let orig = reduced.to_original_coeffs(u);
            let v = basis.vector(orig.clone());
            let exact = v.norm_sq();
            if exact > slack_sq(rung) {
                return None;
            }
            // Ties break on the original-basis coefficients, independent of
            // the internal reduction.
            let cand = canonical_coeffs(&orig);
            let replace = match &best {
                None => true,
                Some((best_sq, best_coeffs)) => {
                    exact < *best_sq || (exact == *best_sq && cand < *best_coeffs)
                }
            };
            if replace {
                best = Some((exact, cand));
                Some(exact * (1.0 + REL_TOL) + REL_TOL)
            } else {
                None
            }
        })?;
        if let Some((_, coeffs)) = best {
            return Ok(basis.vector(coeffs));
        }
    }
    Err(LatticeError::EmptyResult {
        bound: bound.unwrap_or(f64::NAN),
    })
}

/// Exact closest-vector search: the lattice vector minimizing the distance to
/// `target`. Ties are broken by the lexicographically smallest coefficient
/// vector (no sign canonicalization: distances to a fixed target are not
/// sign-symmetric).
pub fn enumerate_cvp(basis: &Basis, target: &TargetVector) -> Result<LatticeVector, LatticeError> {
    check_cap(basis)?;
    if target.dim() != basis.dim() {
        return Err(LatticeError::Domain(format!(
            "target has dimension {}, basis has {}",
            target.dim(),
            basis.dim()
        )));
    }
    let reduced = lll(basis)?;
    let babai = babai_nearest_plane(reduced.basis(), target.coords());
    let babai_dist = babai.dist_sq_to(target.coords()).sqrt();
    let gh = gaussian_heuristic_lambda1(basis).value;
    let mut rungs = Vec::new();
    let mut r = (1.1 * gh).min(babai_dist * (1.0 + REL_TOL) + REL_TOL);
    loop {
        rungs.push(r);
        if r > babai_dist {
            break;
        }
        r = (r * 1.15).max(babai_dist.mul_add(REL_TOL, babai_dist) + REL_TOL);
    }
    let space = SearchSpace::new(reduced.basis(), Some(target.coords()));
    for rung in rungs {
        let mut best: Option<(f64, Vec<i64>)> = None;
        space.run(slack_sq(rung), &mut |u, dist_float| {
            if let Some((best_sq, _)) = &best {
                if dist_float > best_sq * (1.0 + 1e-6) + 1e-9 {
                    return None;
                }
            }
            let orig = reduced.to_original_coeffs(u);
            let v = basis.vector(orig.clone());
            let exact = v.dist_sq_to(target.coords());
            if exact > slack_sq(rung) {
                return None;
            }
            let replace = match &best {
                None => true,
                Some((best_sq, best_coeffs)) => {
                    exact < *best_sq || (exact == *best_sq && orig < *best_coeffs)
                }
            };
            if replace {
                best = Some((exact, orig));
                Some(exact * (1.0 + REL_TOL) + REL_TOL)
            } else {
                None
            }
        })?;
        if let Some((_, coeffs)) = best {
            return Ok(basis.vector(coeffs));
        }
    }
    // The final rung includes the nearest-plane point, so this is unreachable
    // absent float pathology; fail loudly rather than return a wrong answer.
    Err(LatticeError::SearchBudget(
        "closest-vector ladder exhausted without a candidate".into(),
    ))
}

/// All nonzero lattice vectors of norm at most `bound`, one representative per
/// +/- pair (sign-canonical), sorted by norm then lexicographically.
///
/// An empty result is a legitimate outcome (ball below the first minimum).
pub fn enumerate_below(basis: &Basis, bound: f64) -> Result<Vec<LatticeVector>, LatticeError> {
    check_cap(basis)?;
    if !(bound > 0.0) {
        return Err(LatticeError::Domain(format!(
            "enumeration bound must be positive, got {bound}"
        )));
    }
    let reduced = lll(basis)?;
    let space = SearchSpace::new(reduced.basis(), None);
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<LatticeVector> = Vec::new();
    let bound_sq = slack_sq(bound);
    space.run(bound_sq, &mut |u, _dist_float| {
        if u.iter().all(|&x| x == 0) {
            return None;
        }
        let coeffs = canonical_coeffs(&reduced.to_original_coeffs(u));
        if !seen.insert(coeffs.clone()) {
            return None;
        }
        let v = basis.vector(coeffs);
        if v.norm_sq() <= bound_sq {
            out.push(v);
        }
        None
    })?;
    out.sort_by(|a, b| {
        a.norm_sq()
            .partial_cmp(&b.norm_sq())
            .unwrap()
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(out)
}

/// Nearest-plane rounding: walks the orthogonalized frame top-down, picking
/// the integer coefficient closest to each successive center. Used as a
/// guaranteed-nonempty radius for the closest-vector ladder.
pub(crate) fn babai_nearest_plane(basis: &Basis, target: &[f64]) -> LatticeVector {
    let space = SearchSpace::new(basis, Some(target));
    let dim = basis.dim();
    let mut u = vec![0i64; dim];
    for level in (0..dim).rev() {
        u[level] = space.center(level, &u).round() as i64;
    }
    basis.vector(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::random_lattice;

    #[test]
    fn shortest_vector_identity_tiebreak() {
        let b = Basis::identity(5);
        let v = enumerate_svp(&b, None).unwrap();
        assert_eq!(v.norm_sq(), 1.0);
        // All unit vectors tie; the lexicographically smallest canonical
        // coefficient vector wins.
        assert_eq!(v.coeffs(), &[0, 0, 0, 0, 1]);
    }

    #[test]
    fn shortest_vector_skewed_basis() {
        let b = Basis::new(vec![vec![2, 0], vec![1, 2]]).unwrap();
        let v = enumerate_svp(&b, None).unwrap();
        assert_eq!(v.norm_sq(), 4.0);
        assert_eq!(v.coeffs(), &[1, 0]);
    }

    #[test]
    fn bounded_shortest_vector() {
        let b = Basis::new(vec![vec![2, 0], vec![1, 2]]).unwrap();
        assert!(matches!(
            enumerate_svp(&b, Some(1.0)),
            Err(LatticeError::EmptyResult { .. })
        ));
        // Inclusive at the exact norm.
        let v = enumerate_svp(&b, Some(2.0)).unwrap();
        assert_eq!(v.norm_sq(), 4.0);
    }

    #[test]
    fn closest_vector_rounds_each_axis() {
        let b = Basis::identity(3);
        let t = TargetVector::new(vec![0.4, -0.6, 2.2]);
        let v = enumerate_cvp(&b, &t).unwrap();
        assert_eq!(v.coeffs(), &[0, -1, 2]);
    }

    #[test]
    fn closest_vector_tie_takes_lex_smallest() {
        let b = Basis::identity(2);
        let t = TargetVector::new(vec![0.5, 0.0]);
        let v = enumerate_cvp(&b, &t).unwrap();
        assert_eq!(v.coeffs(), &[0, 0]);
    }

    #[test]
    fn closest_vector_skewed_basis() {
        let b = Basis::new(vec![vec![2, 0], vec![1, 2]]).unwrap();
        let t = TargetVector::new(vec![1.9, 0.1]);
        let v = enumerate_cvp(&b, &t).unwrap();
        assert_eq!(v.coeffs(), &[1, 0]);
        assert_eq!(v.coords(), &[2.0, 0.0]);
    }

    #[test]
    fn closest_vector_on_lattice_point() {
        let b = Basis::new(vec![vec![3, 1], vec![0, 2]]).unwrap();
        let t = TargetVector::new(vec![3.0, 3.0]);
        let v = enumerate_cvp(&b, &t).unwrap();
        assert_eq!(v.coeffs(), &[1, 1]);
        assert!(v.dist_sq_to(t.coords()) < 1e-18);
    }

    #[test]
    fn ball_enumeration_identity() {
        let b = Basis::identity(4);
        let unit = enumerate_below(&b, 1.0).unwrap();
        assert_eq!(unit.len(), 4);
        assert!(unit.iter().all(|v| v.norm_sq() == 1.0));
        assert_eq!(unit[0].coeffs(), &[0, 0, 0, 1]);

        let b2 = Basis::identity(2);
        let sqrt2 = enumerate_below(&b2, std::f64::consts::SQRT_2).unwrap();
        // (0,1), (1,0), (1,1), (1,-1) up to sign.
        assert_eq!(sqrt2.len(), 4);
        let below_min = enumerate_below(&b2, 0.5).unwrap();
        assert!(below_min.is_empty());
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let b = Basis::identity(EXACT_SEARCH_CAP + 1);
        assert!(matches!(
            enumerate_svp(&b, None),
            Err(LatticeError::DimensionCap { .. })
        ));
        assert!(matches!(
            enumerate_below(&b, 2.0),
            Err(LatticeError::DimensionCap { .. })
        ));
    }

    #[test]
    fn searches_agree_on_random_instances() {
        for seed in [3, 11] {
            let basis = random_lattice(14, seed).unwrap();
            let shortest = enumerate_svp(&basis, None).unwrap();
            let ball = enumerate_below(&basis, shortest.norm() * 1.0001).unwrap();
            assert!(!ball.is_empty());
            // The shortest vector is the first entry of its own ball.
            assert_eq!(ball[0].norm_sq(), shortest.norm_sq());
            assert!(ball.iter().any(|v| v == &shortest));
            // Nothing strictly shorter exists.
            assert!(matches!(
                enumerate_svp(&basis, Some(shortest.norm() * 0.999)),
                Err(LatticeError::EmptyResult { .. })
            ));
        }
    }

    #[test]
    fn nearest_plane_matches_rounding_on_identity() {
        let b = Basis::identity(3);
        let v = babai_nearest_plane(&b, &[0.4, -0.6, 2.2]);
        assert_eq!(v.coeffs(), &[0, -1, 2]);
    }

    #[test]
    fn exact_closest_never_worse_than_nearest_plane() {
        for seed in [1, 2, 9] {
            let basis = random_lattice(12, seed).unwrap();
            let t: Vec<f64> = (0..12).map(|i| (seed as f64 * 0.37 + i as f64 * 1.93).sin() * 40.0).collect();
            let target = TargetVector::new(t.clone());
            let exact = enumerate_cvp(&basis, &target).unwrap();
            let rounded = babai_nearest_plane(&basis, &t);
            assert!(
                exact.dist_sq_to(&t) <= rounded.dist_sq_to(&t) * (1.0 + 1e-12) + 1e-12,
                "exact search beaten by nearest-plane rounding"
            );
        }
    }
}
