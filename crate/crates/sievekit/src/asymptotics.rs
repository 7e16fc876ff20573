//! Closed-form per-dimension complexity exponents for the sieving algorithms
//! in this crate and their preprocessing/query tradeoffs.
//!
//! Conventions: every exponent `e` is per-dimension and base-2, i.e. a cost of
//! `2^(e*d + o(d))` at dimension `d`. Space exponents count list entries plus
//! filter buckets; query exponents count work per query. All tradeoff curves
//! are parameterized by the filter skew `u`, valid on the half-open interval
//! `[cos(theta), 1/cos(theta))` where `theta` is the filtering angle tied to
//! the relaxation `alpha` by `sin(theta) = 1/alpha`: at the left endpoint the
//! insert cost vanishes (minimal space), and query cost grows without bound as
//! `u` approaches the right endpoint.

use serde::Serialize;
use thiserror::Error;

/// Parameter outside the mathematical domain of a curve or transform.
#[derive(Debug, Error)]
#[error("parameter out of range: {0}")]
pub struct ParamError(pub String);

/// Space exponent of the baseline sieve list: (1/2)*log2(4/3) ~ 0.2075.
pub fn sieve_space_exponent() -> f64 {
    0.5 * (4.0f64 / 3.0).log2()
}

/// Time exponent of the filtered sieve: (1/2)*log2(3/2) ~ 0.2925.
pub fn sieve_time_exponent() -> f64 {
    0.5 * 1.5f64.log2()
}

/// Per-query exponent of the near-neighbor structure inside the filtered
/// sieve: time minus space, (1/2)*log2(9/8) ~ 0.0850.
pub fn sieve_query_exponent() -> f64 {
    0.5 * (9.0f64 / 8.0).log2()
}

/// Largest norm (as a multiple of the first minimum) kept in a preprocessed
/// list for relaxation `alpha`; below the baseline relaxation the sieve
/// itself sets the floor.
pub fn effective_alpha(alpha: f64) -> f64 {
    alpha.max((4.0f64 / 3.0).sqrt())
}

/// log2 of the advice-list size per dimension: a ball of radius
/// `alpha * lambda_1` holds about `alpha^d` lattice points.
pub fn list_size_exponent(alpha: f64) -> f64 {
    effective_alpha(alpha).log2()
}

/// Per-dimension exponents of a spherical filter family at angle `theta` and
/// skew `u`: how many filters a query probes, how many each stored vector is
/// inserted into, and how many filters exist in total.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FilterExponents {
    /// Probes per query: 2^(query*d).
    pub query: f64,
    /// Insertions per stored vector: 2^(insert*d).
    pub insert: f64,
    /// Total filter count: 2^(count*d).
    pub count: f64,
}

/// Callers often derive an endpoint through a different expression than the
/// check uses (`sqrt(a^2-1)/a` versus `cos(asin(...))`), which can land one
/// ulp outside the interval. Snap such values onto the edge before the
/// half-open membership test.
fn snap_to_edge(u: f64, edge: f64) -> f64 {
    if (u - edge).abs() <= 1e-9 * edge.abs().max(1.0) {
        edge
    } else {
        u
    }
}

fn check_skew(theta: f64, u: f64) -> Result<f64, ParamError> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(ParamError(format!(
            "filter angle must lie in (0, pi/2), got {theta}"
        )));
    }
    let lo = theta.cos();
    let hi = 1.0 / lo;
    let u = snap_to_edge(u, lo);
    // Half-open: the left endpoint is the minimal-space configuration and is
    // valid; query cost diverges at the right endpoint.
    if !(u >= lo && u < hi) {
        return Err(ParamError(format!(
            "skew {u} outside [cos(theta), 1/cos(theta)) = [{lo}, {hi})"
        )));
    }
    Ok(u)
}

/// Exponents of the spherical filter family.
pub fn filter_exponents(theta: f64, u: f64) -> Result<FilterExponents, ParamError> {
    let u = check_skew(theta, u)?;
    let (sin, cos) = theta.sin_cos();
    let sin_sq = sin * sin;
    let cos2 = 2.0 * cos * cos - 1.0;
    let cot_sq = (cos * cos) / sin_sq;
    let query = 0.5 * (sin_sq * (u * cos + 1.0) / (u * cos - cos2)).log2();
    let insert = 0.5 * (sin_sq / (1.0 - cot_sq * (u * u - 2.0 * u * cos + 1.0))).log2();
    let count = (1.0 / sin).log2();
    Ok(FilterExponents { query, insert, count })
}

/// One point on a preprocessing/query tradeoff curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurvePoint {
    /// Filter skew this point was evaluated at.
    pub u: f64,
    /// Advice size (list plus filter buckets).
    pub space: f64,
    /// One-time preprocessing cost.
    pub preprocess: f64,
    /// Cost per query.
    pub query: f64,
}

fn check_alpha(alpha: f64) -> Result<(), ParamError> {
    if !(alpha > 1.0 && alpha <= std::f64::consts::SQRT_2 + 1e-12) {
        return Err(ParamError(format!(
            "relaxation alpha must lie in (1, sqrt(2)], got {alpha}"
        )));
    }
    Ok(())
}

/// Valid skew interval `[u_min, u_max)` for relaxation `alpha`.
pub fn valid_u_range(alpha: f64) -> Result<(f64, f64), ParamError> {
    check_alpha(alpha)?;
    let u_min = (alpha * alpha - 1.0).sqrt() / alpha;
    Ok((u_min, 1.0 / u_min))
}

/// Tradeoff curve for closest-point queries with advice held at relaxation
/// `alpha`, evaluated at skew `u`.
pub fn alpha_tradeoff(alpha: f64, u: f64) -> Result<CurvePoint, ParamError> {
    let (u_min, u_max) = valid_u_range(alpha)?;
    let u = snap_to_edge(u, u_min);
    if !(u >= u_min && u < u_max) {
        return Err(ParamError(format!(
            "skew {u} outside [{u_min}, {u_max}) for alpha {alpha}"
        )));
    }
    let a_sq = alpha * alpha;
    let root = (a_sq - 1.0).sqrt();
    let space =
        0.5 * (1.0 / (1.0 - (a_sq - 1.0) * (u * u - (2.0 * u / alpha) * root + 1.0))).log2();
    let query = 0.5
        * ((alpha + u * root) / (2.0 * alpha - a_sq * alpha + a_sq * u * root)).log2();
    let preprocess = space.max(sieve_time_exponent());
    Ok(CurvePoint { u, space, preprocess, query })
}

/// Exact closest-point preprocessing tradeoff: the `alpha = sqrt(2)` curve.
/// Valid for `u` in `[sqrt(2)/2, sqrt(2))`.
pub fn cvpp_tradeoff(u: f64) -> Result<CurvePoint, ParamError> {
    alpha_tradeoff(std::f64::consts::SQRT_2, u)
}

/// Relaxation sufficient to decode targets within `delta` times the first
/// minimum (bounded-distance regime, `delta` in [0, 1]).
pub fn bdd_alpha(delta: f64) -> Result<f64, ParamError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(ParamError(format!(
            "decoding radius fraction must lie in [0, 1], got {delta}"
        )));
    }
    let s = 1.0 + delta * delta;
    let a_sq = (2.0 / 3.0) * (s + (s * s - 3.0 * delta * delta).sqrt());
    Ok(a_sq.sqrt())
}

/// Relaxation sufficient to answer approximate closest-point queries within
/// factor `kappa >= 1`. Evaluated in the cancellation-free form
/// `alpha^2 = 2*kappa / (kappa + sqrt(kappa^2 - 1))`.
pub fn approx_alpha(kappa: f64) -> Result<f64, ParamError> {
    if !(kappa >= 1.0) {
        return Err(ParamError(format!(
            "approximation factor must be at least 1, got {kappa}"
        )));
    }
    let a_sq = 2.0 * kappa / (kappa + (kappa * kappa - 1.0).sqrt());
    Ok(a_sq.sqrt())
}

/// Tradeoff curve for bounded-distance queries at radius fraction `delta`.
pub fn bdd_tradeoff(delta: f64, u: f64) -> Result<CurvePoint, ParamError> {
    alpha_tradeoff(bdd_alpha(delta)?, u)
}

/// Tradeoff curve for `kappa`-approximate closest-point queries.
pub fn approx_tradeoff(kappa: f64, u: f64) -> Result<CurvePoint, ParamError> {
    alpha_tradeoff(approx_alpha(kappa)?, u)
}

/// Worst-case distance ratio (found vs true) guaranteed by reducing a target
/// against a list at relaxation `alpha`: minimized over the usable part of
/// the list, `beta = a / (2*sqrt(a-1))` with `a = min(alpha^2, 2)`.
pub fn expected_beta(alpha: f64) -> Result<f64, ParamError> {
    if !(alpha > 1.0) {
        return Err(ParamError(format!(
            "relaxation alpha must exceed 1, got {alpha}"
        )));
    }
    let a = (alpha * alpha).min(2.0);
    Ok(a / (2.0 * (a - 1.0).sqrt()))
}

/// The approximation factor whose required relaxation is exactly `alpha`:
/// inverse of [`approx_alpha`] on `(1, sqrt(2)]`.
pub fn equivalent_kappa(alpha: f64) -> Result<f64, ParamError> {
    check_alpha(alpha)?;
    let r = (alpha * alpha - 1.0).sqrt();
    Ok(0.5 * (r + 1.0 / r))
}

/// Approximation factor reachable with polynomial-size advice at dimension
/// `dim`: holding the advice list at `alpha = dim^(1/dim)` keeps it
/// polynomial, and this is the corresponding factor. Grows like
/// `sqrt(dim / (8 * ln(dim)))`.
pub fn poly_advice_kappa(dim: f64) -> Result<f64, ParamError> {
    if !(dim >= 2.0) {
        return Err(ParamError(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    let a_minus_1 = (2.0 / dim * dim.ln()).exp_m1();
    let r = a_minus_1.sqrt();
    Ok(0.5 * (r + 1.0 / r))
}

/// Exponents of the single-instance adaptive solver: no preprocessing/query
/// phase split exists, so the time exponent plays both roles.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdaptiveExponents {
    pub space: f64,
    pub preprocess: f64,
    pub query: f64,
    /// Marks that this is one combined run, not an advice-then-query split.
    pub single_instance: bool,
}

pub fn adaptive_exponents() -> AdaptiveExponents {
    AdaptiveExponents {
        space: sieve_space_exponent(),
        preprocess: sieve_time_exponent(),
        query: sieve_time_exponent(),
        single_instance: true,
    }
}

/// Configuration reaching per-query exponent `epsilon` on the exact curve:
/// returns the skew and the full point. Space blows up as `epsilon` shrinks.
/// Inverts the query formula in closed form: the exact-curve query exponent
/// `q(u) = log2((sqrt(2)+u)/(2u))/2` gives `u = sqrt(2)/(2^(2q+1) - 1)`.
pub fn subexp_regime(epsilon: f64) -> Result<(f64, CurvePoint), ParamError> {
    let max = sieve_time_exponent();
    if !(epsilon > 0.0 && epsilon < max) {
        return Err(ParamError(format!(
            "per-query exponent must lie in (0, {max:.6}), got {epsilon}"
        )));
    }
    let u = std::f64::consts::SQRT_2 / ((1.0 + 2.0 * epsilon).exp2() - 1.0);
    let point = cvpp_tradeoff(u)?;
    Ok((u, point))
}

/// Which tradeoff curve to sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TradeoffProblem {
    /// Exact closest-point queries (`alpha = sqrt(2)`).
    Exact,
    /// Targets within `delta` times the first minimum.
    Bdd { delta: f64 },
    /// Answers within factor `kappa` of optimal.
    Approx { kappa: f64 },
}

impl TradeoffProblem {
    pub fn alpha(&self) -> Result<f64, ParamError> {
        match *self {
            TradeoffProblem::Exact => Ok(std::f64::consts::SQRT_2),
            TradeoffProblem::Bdd { delta } => bdd_alpha(delta),
            TradeoffProblem::Approx { kappa } => approx_alpha(kappa),
        }
    }
}

/// Sample a tradeoff curve uniformly in skew over its valid range (the
/// divergent right endpoint is excluded). Space rises and query falls
/// monotonically along the returned points.
pub fn tradeoff_curve(
    problem: TradeoffProblem,
    samples: usize,
) -> Result<Vec<CurvePoint>, ParamError> {
    if samples < 2 {
        return Err(ParamError(format!(
            "curve needs at least 2 samples, got {samples}"
        )));
    }
    let alpha = problem.alpha()?;
    let (u_min, u_max) = valid_u_range(alpha)?;
    let step = (u_max - u_min) / samples as f64;
    (0..samples)
        .map(|i| alpha_tradeoff(alpha, u_min + i as f64 * step))
        .collect()
}

/// Probability that subtracting a vector of norm `w_norm` shortens a random
/// vector of norm `v_norm` in dimension `dim`: the dominant factor is
/// `(1 - (w/(2v))^2)^(d/2)`, and the probability vanishes once `w >= 2v`.
pub fn reducibility_probability(
    v_norm: f64,
    w_norm: f64,
    dim: usize,
) -> Result<f64, ParamError> {
    if !(v_norm > 0.0 && w_norm > 0.0) {
        return Err(ParamError(format!(
            "norms must be positive, got v {v_norm}, w {w_norm}"
        )));
    }
    let ratio = w_norm / (2.0 * v_norm);
    if ratio >= 1.0 {
        return Ok(0.0);
    }
    Ok((1.0 - ratio * ratio).powf(dim as f64 / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    const TOL: f64 = 1e-12;

    #[test]
    fn baseline_sieve_exponents() {
        assert!((sieve_space_exponent() - 0.207_518_749_639_422).abs() < TOL);
        assert!((sieve_time_exponent() - 0.292_481_250_360_578).abs() < TOL);
        assert!((sieve_query_exponent() - 0.084_962_500_721_156).abs() < TOL);
        assert!(
            (sieve_space_exponent() + sieve_query_exponent() - sieve_time_exponent()).abs() < TOL
        );
    }

    #[test]
    fn exact_curve_reference_points() {
        // Left endpoint: minimal space, query matches the sieve time.
        let p = cvpp_tradeoff(SQRT_2 / 2.0).unwrap();
        assert!((p.space - 0.5).abs() < TOL);
        assert!((p.query - 0.292_481_250_360_578).abs() < 1e-11);
        assert!((p.preprocess - 0.5).abs() < TOL);
        // Balanced point.
        let b = cvpp_tradeoff(1.0).unwrap();
        assert!((b.space - 0.635_776_651_582).abs() < 1e-10);
        assert!((b.query - 0.135_776_651_582).abs() < 1e-10);
        assert!((b.space - b.query - 0.5).abs() < TOL);
        // The space-1 point has the frozen query exponent.
        let s1 = cvpp_tradeoff((SQRT_2 + 1.0) / 2.0).unwrap();
        assert!((s1.space - 1.0).abs() < 1e-12);
        assert!((s1.query - 0.059_370_184_317).abs() < 1e-10);
    }

    #[test]
    fn curve_space_matches_list_size_at_left_endpoint() {
        for alpha in [SQRT_2, 1.35, 1.19760533812716, 1.05] {
            let (u_min, _) = valid_u_range(alpha).unwrap();
            let p = alpha_tradeoff(alpha, u_min).unwrap();
            assert!(
                (p.space - alpha.log2()).abs() < 1e-12,
                "alpha {alpha}: space {} != log2(alpha) {}",
                p.space,
                alpha.log2()
            );
        }
    }

    #[test]
    fn bounded_distance_relaxations() {
        assert!((bdd_alpha(0.0).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < TOL);
        assert!((bdd_alpha(1.0).unwrap() - SQRT_2).abs() < TOL);
        assert!((bdd_alpha(0.5).unwrap() - 1.197_605_338_127_16).abs() < 1e-12);
        assert!(bdd_alpha(1.2).is_err());
        assert!(bdd_alpha(-0.1).is_err());
    }

    #[test]
    fn bounded_distance_curve_reference_points() {
        let alpha = bdd_alpha(0.5).unwrap();
        let (u_min, _) = valid_u_range(alpha).unwrap();
        assert!((u_min - 0.550_250_522_700_338).abs() < 1e-12);
        let p = alpha_tradeoff(alpha, u_min).unwrap();
        assert!((p.space - 0.260_152_557_097_156).abs() < 1e-12);
        assert!((p.query - 0.190_794_323_149_407).abs() < 1e-12);
        let q = alpha_tradeoff(alpha, 1.0).unwrap();
        assert!((q.space - 0.357_287_181_096_901).abs() < 1e-12);
        assert!((q.query - 0.097_134_623_999_745).abs() < 1e-12);
        // Vanishing decoding radius: the curve bottoms out at the sieve list.
        let a0 = bdd_alpha(0.0).unwrap();
        let (u0, _) = valid_u_range(a0).unwrap();
        assert!((u0 - 0.5).abs() < TOL);
        let r = alpha_tradeoff(a0, u0).unwrap();
        assert!((r.space - 0.207_518_749_639_422).abs() < 1e-12);
        assert!((r.query - 0.160_964_047_443_681).abs() < 1e-12);
        assert!((r.preprocess - sieve_time_exponent()).abs() < TOL);
    }

    #[test]
    fn approximate_relaxations() {
        assert!((approx_alpha(1.0).unwrap() - SQRT_2).abs() < TOL);
        assert!((approx_alpha(2.0).unwrap() - 1.035_276_180_410_08).abs() < 1e-12);
        // Fixed point of the transform.
        let k = 2.0 / 3.0f64.sqrt();
        assert!((approx_alpha(k).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < TOL);
        // The factor-1.0882 relaxation nearly matches the delta-1/2 bounded
        // regime (they solve different problems with almost the same list).
        let a = approx_alpha(1.0882).unwrap();
        assert!((a - 1.197_636_124_493_03).abs() < 1e-12);
        assert!((a - bdd_alpha(0.5).unwrap()).abs() < 1e-3);
        assert!(approx_alpha(0.9).is_err());
    }

    #[test]
    fn distance_ratio_guarantees() {
        assert!((expected_beta(SQRT_2).unwrap() - 1.0).abs() < TOL);
        assert!((expected_beta(2.0).unwrap() - 1.0).abs() < TOL);
        assert!((expected_beta((4.0f64 / 3.0).sqrt()).unwrap() - 2.0 / 3.0f64.sqrt()).abs() < TOL);
        assert!(
            (expected_beta(1.197_605_338_127_16).unwrap() - 1.088_236_438_423).abs() < 1e-10
        );
        assert!(expected_beta(1.0).is_err());
    }

    #[test]
    fn kappa_alpha_round_trips() {
        assert!((equivalent_kappa(SQRT_2).unwrap() - 1.0).abs() < TOL);
        assert!(
            (equivalent_kappa(bdd_alpha(0.5).unwrap()).unwrap() - 1.088_236_438_422_58).abs()
                < 1e-12
        );
        for kappa in [1.0, 1.05, 1.2, 2.0, 5.0, 20.0] {
            let alpha = approx_alpha(kappa).unwrap();
            let back = equivalent_kappa(alpha).unwrap();
            assert!(
                (back - kappa).abs() < 1e-9 * kappa,
                "kappa {kappa} -> alpha {alpha} -> {back}"
            );
            // The guaranteed ratio of the matching list is exactly kappa.
            let beta = expected_beta(alpha).unwrap();
            assert!((beta - kappa).abs() < 1e-9 * kappa);
        }
    }

    #[test]
    fn polynomial_advice_factors() {
        assert!((poly_advice_kappa(8.0).unwrap() - 1.018_395).abs() < 1e-6);
        assert!((poly_advice_kappa(1000.0).unwrap() - 4.298_182).abs() < 1e-6);
        assert!((poly_advice_kappa(1e4).unwrap() - 11.665_870).abs() < 1e-6);
        assert!((poly_advice_kappa(1e6).unwrap() - 95.121_904).abs() < 1e-6);
        assert!(poly_advice_kappa(1.0).is_err());
        // Scaling law: kappa ~ sqrt(dim/(8 ln dim)).
        let r6 = poly_advice_kappa(1e6).unwrap() / (1e6f64 / 1e6f64.ln()).sqrt();
        assert!((r6 - 0.353_561).abs() < 1e-6);
    }

    #[test]
    fn filter_identities_match_curves() {
        for alpha in [SQRT_2, 1.35, 1.19760533812716, 1.08] {
            let theta = (1.0 / alpha).asin();
            let (u_min, u_max) = valid_u_range(alpha).unwrap();
            for i in 0..7 {
                let u = u_min + (u_max - u_min) * (i as f64) / 7.5;
                let f = filter_exponents(theta, u).unwrap();
                let p = alpha_tradeoff(alpha, u).unwrap();
                assert!(
                    (alpha.log2() + f.insert - p.space).abs() < 1e-9,
                    "space identity failed at alpha {alpha}, u {u}"
                );
                assert!(
                    (f.query - p.query).abs() < 1e-9,
                    "query identity failed at alpha {alpha}, u {u}"
                );
            }
        }
        let f = filter_exponents(std::f64::consts::FRAC_PI_4, 1.0).unwrap();
        assert!((f.count - 0.5).abs() < TOL);
        assert!((f.insert - (0.635_776_651_582f64 - 0.5)).abs() < 1e-10);
    }

    #[test]
    fn domain_edges() {
        assert!(cvpp_tradeoff(0.70).is_err());
        assert!(cvpp_tradeoff(SQRT_2).is_err()); // right-open
        assert!(cvpp_tradeoff(SQRT_2 / 2.0).is_ok()); // left-closed
        assert!(alpha_tradeoff(1.0, 0.5).is_err());
        assert!(alpha_tradeoff(1.5, 1.0).is_err());
        assert!(filter_exponents(0.0, 1.0).is_err());
        assert!(filter_exponents(std::f64::consts::FRAC_PI_2, 1.0).is_err());
        assert!(equivalent_kappa(1.6).is_err());
    }

    #[test]
    fn adaptive_point_is_the_sieve_pair() {
        let a = adaptive_exponents();
        assert!((a.space - 0.207_518_749_639_422).abs() < TOL);
        assert!((a.preprocess - 0.292_481_250_360_578).abs() < TOL);
        assert!((a.query - a.preprocess).abs() < TOL);
        assert!(a.single_instance);
    }

    #[test]
    fn subexp_regime_inverts_the_query_exponent() {
        // The space-1 configuration, recovered from its exact query exponent.
        let (u, p) = subexp_regime(0.059_370_184_317).unwrap();
        assert!((u - (SQRT_2 + 1.0) / 2.0).abs() < 1e-9);
        assert!((p.space - 1.0).abs() < 1e-9);
        // Rounded 4-decimal inputs land within print precision.
        let (u2, p2) = subexp_regime(0.0594).unwrap();
        assert!((u2 - 1.2071).abs() < 2e-3);
        assert!((p2.space - 1.0).abs() < 5e-3);
        let (u3, p3) = subexp_regime(0.1358).unwrap();
        assert!((u3 - 1.0).abs() < 2e-4);
        assert!((p3.space - 0.6358).abs() < 1e-3);
        // Round-trip on a grid, and space grows as the query budget shrinks.
        for eps in [0.02, 0.05, 0.1, 0.2, 0.28] {
            let (_, p) = subexp_regime(eps).unwrap();
            assert!((p.query - eps).abs() < 1e-9, "eps {eps}: query {}", p.query);
            let (_, tighter) = subexp_regime(eps / 2.0).unwrap();
            assert!(tighter.space > p.space);
        }
        assert!(subexp_regime(0.0).is_err());
        assert!(subexp_regime(0.2925).is_err());
    }

    #[test]
    fn curves_are_monotone_tradeoffs() {
        for problem in [
            TradeoffProblem::Exact,
            TradeoffProblem::Bdd { delta: 0.5 },
            TradeoffProblem::Approx { kappa: 2.0 },
        ] {
            let pts = tradeoff_curve(problem, 40).unwrap();
            assert_eq!(pts.len(), 40);
            for w in pts.windows(2) {
                assert!(w[1].space > w[0].space);
                assert!(w[1].query < w[0].query);
            }
        }
        // Exact curve endpoints match the frozen reference points.
        let exact = tradeoff_curve(TradeoffProblem::Exact, 50).unwrap();
        assert!((exact[0].space - 0.5).abs() < 1e-9);
        assert!((exact[0].query - 0.292_481_250_360_578).abs() < 1e-9);
        // The easier bounded-distance curve answers faster at equal space:
        // align the curves exactly by inverting space(u) on each.
        let query_at_space = |alpha: f64, target_space: f64| -> f64 {
            let (mut lo, hi) = valid_u_range(alpha).unwrap();
            let mut hi = hi - 1e-9;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if alpha_tradeoff(alpha, mid).unwrap().space < target_space {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            alpha_tradeoff(alpha, 0.5 * (lo + hi)).unwrap().query
        };
        let bdd_alpha_half = bdd_alpha(0.5).unwrap();
        for i in 0..20 {
            let s = 0.55 + 0.65 * i as f64 / 19.0;
            let q_exact = query_at_space(SQRT_2, s);
            let q_bdd = query_at_space(bdd_alpha_half, s);
            assert!(
                q_bdd < q_exact,
                "space {s}: bdd query {q_bdd} not below exact {q_exact}"
            );
        }
        assert!(tradeoff_curve(TradeoffProblem::Exact, 1).is_err());
    }

    #[test]
    fn reduction_probability_reference_values() {
        // Equal unit norms: the angular cap has measure (3/4)^(d/2).
        let p100 = reducibility_probability(1.0, 1.0, 100).unwrap();
        assert!((p100 - 5.663_216_564_269e-7).abs() < 1e-16);
        let p20 = reducibility_probability(1.0, 1.0, 20).unwrap();
        assert!((p20 - 0.75f64.powi(10)).abs() < 1e-15);
        // Long subtrahend never helps; short one almost always does.
        assert_eq!(reducibility_probability(1.0, 2.0, 50).unwrap(), 0.0);
        assert_eq!(reducibility_probability(1.0, 2.5, 50).unwrap(), 0.0);
        assert!(reducibility_probability(1.0, 1e-6, 50).unwrap() > 1.0 - 1e-9);
        assert!(reducibility_probability(0.0, 1.0, 10).is_err());
        assert!(reducibility_probability(1.0, -1.0, 10).is_err());
    }
}
