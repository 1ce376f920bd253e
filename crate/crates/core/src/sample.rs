//! Seeded random generators for polynomials and maps.
//!
//! Trials derive per-index seeds with [`splitmix64`] so that runs are
//! reproducible regardless of how work is scheduled.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::arith::Ring;
use crate::poly::{Monomial, Polynomial, VariableSet};

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// One step of the splitmix64 generator.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Random exponent vector of total degree at most `max_degree`, supported on `support`.
pub fn random_monomial(rng: &mut SampleRng, nvars: usize, support: &[usize], max_degree: u32) -> Monomial {
    let mut e = vec![0u32; nvars];
    if support.is_empty() || max_degree == 0 {
        return Monomial::from_exponents(e);
    }
    let deg = rng.gen_range(0..=max_degree);
    for _ in 0..deg {
        e[support[rng.gen_range(0..support.len())]] += 1;
    }
    Monomial::from_exponents(e)
}

/// Random polynomial with up to `max_terms` terms and integer coefficients in
/// `[-bound, bound]`, mapped into `ring`.
pub fn random_polynomial(
    rng: &mut SampleRng,
    ring: Ring,
    vars: &VariableSet,
    max_degree: u32,
    max_terms: usize,
    bound: i64,
) -> Polynomial {
    let support: Vec<usize> = (0..vars.len()).collect();
    random_polynomial_in(rng, ring, vars, &support, max_degree, max_terms, bound)
}

pub fn random_polynomial_in(
    rng: &mut SampleRng,
    ring: Ring,
    vars: &VariableSet,
    support: &[usize],
    max_degree: u32,
    max_terms: usize,
    bound: i64,
) -> Polynomial {
    let mut p = Polynomial::zero(ring, vars);
    let nterms = rng.gen_range(0..=max_terms);
    for _ in 0..nterms {
        let m = random_monomial(rng, vars.len(), support, max_degree);
        let c = rng.gen_range(-bound..=bound);
        p.add_term(m, ring.from_i64(c));
    }
    p
}
