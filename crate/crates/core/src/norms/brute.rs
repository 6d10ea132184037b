//! Direct search for the cheapest single coefficient `φ = (ξ, η)`. Only a
//! test oracle.

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;

use crate::algebra::ArrowFunction;
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{CMatrix, CVector};
use crate::positivity::coefficient_regular;
use crate::regular::module_norm;
use crate::sample::{random_complex, rng};
use crate::C64;

pub const BRUTE_FORCE_MAX_ARROWS: usize = 6;
const SEED: u64 = 0x5eed_b10c;

struct Problem<'a> {
    g: &'a FiniteGroupoid,
    phi: &'a ArrowFunction,
    scale: f64,
}

impl Problem<'_> {
    fn unpack(&self, p: &[f64]) -> ArrowFunction {
        ArrowFunction::new((0..p.len() / 2).map(|k| C64::new(p[2 * k], p[2 * k + 1])).collect())
    }

    /// The `η` with `(ξ, η) = φ` of least Euclidean size, if one exists.
    fn solve_eta(&self, xi: &ArrowFunction) -> Option<ArrowFunction> {
        let n = self.g.arrow_count();
        // η ↦ (ξ, η) is linear; column k is (ξ, δ_k)
        let mut l = CMatrix::zeros(n, n);
        for k in 0..n {
            let col = coefficient_regular(self.g, xi, &ArrowFunction::delta(n, k));
            for x in 0..n {
                l[(x, k)] = col[x];
            }
        }
        let rhs = CVector::from_iterator(n, self.phi.values().iter().copied());
        let svd = l.clone().svd(true, true);
        let eta = svd.solve(&rhs, 1e-12 * svd.singular_values.max().max(f64::MIN_POSITIVE)).ok()?;
        let residual = (&l * &eta - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (residual <= 1e-9 * self.scale).then(|| ArrowFunction::new(eta.iter().copied().collect()))
    }

    fn value(&self, p: &[f64]) -> f64 {
        let xi = self.unpack(p);
        match self.solve_eta(&xi) {
            Some(eta) => module_norm(self.g, &xi) * module_norm(self.g, &eta),
            None => f64::INFINITY,
        }
    }
}

impl CostFunction for Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        let v = self.value(p);
        // keep the simplex away from infeasible points without NaNs
        Ok(if v.is_finite() { v } else { 1e12 * self.scale })
    }
}

/// Smallest `‖ξ‖ ‖η‖` found over `budget` Nelder–Mead restarts, each from a
/// random `ξ` with `η` solved exactly. `+∞` if no restart found a
/// representation. Groupoids with more than six arrows are rejected.
pub fn brute_force_factorization_norm(g: &FiniteGroupoid, phi: &ArrowFunction, budget: usize) -> f64 {
    assert!(
        g.arrow_count() <= BRUTE_FORCE_MAX_ARROWS,
        "brute force is limited to {BRUTE_FORCE_MAX_ARROWS} arrows"
    );
    let scale = phi.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let problem = Problem { g, phi, scale };
    let dim = 2 * g.arrow_count();
    let mut r = rng(SEED);
    let mut best = f64::INFINITY;
    for _ in 0..budget {
        let mut start: Vec<f64> = (0..g.arrow_count())
            .flat_map(|_| {
                let z = random_complex(&mut r);
                [z.re, z.im]
            })
            .collect();
        // a few polishing rounds with shrinking simplices
        let mut step = 0.5;
        for _ in 0..4 {
            let mut simplex = vec![start.clone()];
            for k in 0..dim {
                let mut v = start.clone();
                v[k] += step;
                simplex.push(v);
            }
            let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(1e-13) else {
                break;
            };
            let Ok(res) = Executor::new(Problem { g, phi, scale }, solver)
                .configure(|s| s.max_iters(4000))
                .run()
            else {
                break;
            };
            if let Some(p) = res.state.best_param {
                start = p;
            }
            step *= 0.1;
        }
        best = best.min(problem.value(&start));
    }
    best
}
