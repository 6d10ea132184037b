//! Seeded random instances for tests, suites and benchmarks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{convolve, star, ArrowFunction, UnitFunction};
use crate::groupoid::FiniteGroupoid;
use crate::C64;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_function<R: Rng>(len: usize, rng: &mut R) -> ArrowFunction {
    ArrowFunction::new((0..len).map(|_| random_complex(rng)).collect())
}

pub fn random_unit_function<R: Rng>(len: usize, rng: &mut R) -> UnitFunction {
    UnitFunction::new((0..len).map(|_| random_complex(rng)).collect())
}

/// Real values uniform in `[lo, hi)`.
pub fn random_real_unit_function<R: Rng>(len: usize, lo: f64, hi: f64, rng: &mut R) -> UnitFunction {
    UnitFunction::new((0..len).map(|_| C64::from(rng.gen_range(lo..hi))).collect())
}

/// A function with `φ(x⁻¹) = conj φ(x)`.
pub fn random_hermitian_function<R: Rng>(g: &FiniteGroupoid, rng: &mut R) -> ArrowFunction {
    let f = random_function(g.arrow_count(), rng);
    let fs = star(g, &f);
    (&f + &fs).scale(C64::from(0.5))
}

/// A positive definite function: a positive mixture of one to three
/// coefficients `f * f*` of the regular representation, with randomly sparse
/// `f` so that degenerate Gram matrices occur too.
pub fn random_positive_definite<R: Rng>(g: &FiniteGroupoid, rng: &mut R) -> ArrowFunction {
    let n = g.arrow_count();
    let terms = rng.gen_range(1..=3);
    let mut phi = ArrowFunction::zeros(n);
    for _ in 0..terms {
        let mut f = random_function(n, rng);
        for x in 0..n {
            if rng.gen_bool(0.3) {
                f[x] = C64::new(0.0, 0.0);
            }
        }
        let c = rng.gen_range(0.1..1.0);
        phi = &phi + &convolve(g, &f, &star(g, &f)).scale(C64::from(c));
    }
    phi
}
