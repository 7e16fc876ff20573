//! Random benchmark instances. The construction fixes a random prime `p`
//! near 2^15, puts `(p, 0, ..., 0)` in the first row, and fills row `i >= 1`
//! with `x_i * e_0 + e_i` for uniform `x_i` in [0, p). The result is
//! triangular with determinant exactly `p`, and its shortest vectors behave
//! like those of a random lattice of that volume.
//!
//! The prime scale balances four needs at the working dimensions (25-40):
//! the Gaussian heuristic tracks the realized first minimum to within a few
//! percent; accidental `x_i = x_j` collisions (which pin the first minimum
//! at sqrt(2) regardless of volume) stay rare; exact enumeration stays fast;
//! and every inner product of basis rows remains exactly representable in
//! f64. The window is kept an eighth wide rather than a full octave so that
//! instance volumes barely differ: cross-dimension scaling fits would
//! otherwise be dominated by volume noise.

use super::{Basis, LatticeError};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIME_LO: u64 = 1 << 15;
const PRIME_HI: u64 = (1 << 15) + (1 << 12);

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Deterministically generate a benchmark lattice of the given dimension.
/// Equal seeds give identical bases.
pub fn random_lattice(dim: usize, seed: u64) -> Result<Basis, LatticeError> {
    if dim == 0 {
        return Err(LatticeError::Shape("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = loop {
        let cand = rng.gen_range(PRIME_LO..PRIME_HI);
        if is_prime(cand) {
            break cand;
        }
    };
    let mut rows = vec![vec![0i64; dim]; dim];
    rows[0][0] = p as i64;
    for (i, row) in rows.iter_mut().enumerate().skip(1) {
        row[0] = rng.gen_range(0..p) as i64;
        row[i] = 1;
    }
    Basis::new(rows)
}
