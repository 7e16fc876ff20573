//! Heuristic lattice-sieving workbench.
//!
//! The crate bundles the pieces needed to study sieving-based solvers for the
//! shortest-vector and closest-vector problems at desk scale:
//!
//! * [`lattice`] — exact integer bases, Gram–Schmidt data, randomized
//!   nearest-plane sampling, random instance generation, and brute-force
//!   enumeration oracles used to verify every heuristic result.
//! * [`lsf`] — spherical locality-sensitive filtering: exponent formulas and a
//!   concrete filter index for near-neighbor candidate generation.
//! * [`sieve`] — list sieves for short vectors: the quadratic
//!   difference sieve, the GaussSieve, and its relaxed variant that keeps
//!   vectors up to `alpha` times the minimum.
//! * [`cvp`] — the adaptive two-list sieve that answers a single closest-vector
//!   query without preprocessing.
//! * [`cvpp`] — closest-vector with preprocessing: build a reusable short-vector
//!   list once, then answer many queries by iterated target reduction.
//! * [`asymptotics`] — closed-form space/time exponent curves for the
//!   algorithms above, reported per dimension in base 2.
//!
//! Everything randomized takes an explicit 64-bit seed and is deterministic in
//! single-threaded use.

pub mod asymptotics;
pub mod cvp;
pub mod cvpp;
pub mod lattice;
pub mod lsf;
pub mod sieve;

pub use lattice::{Basis, LatticeVector, TargetVector};
