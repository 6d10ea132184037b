//! The convolution *-algebra `C(G)` of a finite groupoid.
//!
//! Integrals against the Haar system become sums over range fibers weighted by
//! the weight of the integration variable.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::bisection::Bisection;
use crate::groupoid::FiniteGroupoid;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A complex function on the arrows of a fixed groupoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrowFunction {
    values: Vec<C64>,
}

/// A complex function on the units of a fixed groupoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitFunction {
    values: Vec<C64>,
}

macro_rules! vector_like {
    ($t:ident) => {
        impl $t {
            pub fn new(values: Vec<C64>) -> Self {
                Self { values }
            }

            pub fn zeros(len: usize) -> Self {
                Self {
                    values: vec![C64::new(0.0, 0.0); len],
                }
            }

            pub fn constant(len: usize, c: C64) -> Self {
                Self {
                    values: vec![c; len],
                }
            }

            pub fn from_real(values: &[f64]) -> Self {
                Self {
                    values: values.iter().map(|&v| C64::from(v)).collect(),
                }
            }

            /// Indicator of a single index.
            pub fn delta(len: usize, at: usize) -> Self {
                let mut f = Self::zeros(len);
                f.values[at] = C64::from(1.0);
                f
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            pub fn values(&self) -> &[C64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<C64> {
                self.values
            }

            /// Sup norm.
            pub fn max_abs(&self) -> f64 {
                self.values.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
            }

            pub fn max_diff(&self, other: &Self) -> f64 {
                assert_eq!(self.len(), other.len(), "length mismatch");
                self.values
                    .iter()
                    .zip(&other.values)
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
            }

            pub fn conj(&self) -> Self {
                Self {
                    values: self.values.iter().map(|z| z.conj()).collect(),
                }
            }

            pub fn scale(&self, c: C64) -> Self {
                Self {
                    values: self.values.iter().map(|z| z * c).collect(),
                }
            }

            /// Pointwise product.
            pub fn pointwise(&self, other: &Self) -> Self {
                assert_eq!(self.len(), other.len(), "length mismatch");
                Self {
                    values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
                }
            }

            pub fn is_zero(&self) -> bool {
                self.values.iter().all(|z| *z == C64::new(0.0, 0.0))
            }
        }

        impl Index<usize> for $t {
            type Output = C64;
            fn index(&self, i: usize) -> &C64 {
                &self.values[i]
            }
        }

        impl IndexMut<usize> for $t {
            fn index_mut(&mut self, i: usize) -> &mut C64 {
                &mut self.values[i]
            }
        }

        impl Add for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                assert_eq!(self.len(), rhs.len(), "length mismatch");
                $t {
                    values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
                }
            }
        }

        impl Sub for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                assert_eq!(self.len(), rhs.len(), "length mismatch");
                $t {
                    values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
                }
            }
        }

        impl Mul<C64> for &$t {
            type Output = $t;
            fn mul(self, c: C64) -> $t {
                self.scale(c)
            }
        }
    };
}

vector_like!(ArrowFunction);
vector_like!(UnitFunction);

impl ArrowFunction {
    /// Restriction to the unit space.
    pub fn restrict_to_units(&self, g: &FiniteGroupoid) -> UnitFunction {
        UnitFunction::new(g.unit_arrows().iter().map(|&a| self.values[a]).collect())
    }
}

fn check(g: &FiniteGroupoid, f: &ArrowFunction) {
    assert_eq!(
        f.len(),
        g.arrow_count(),
        "function length does not match the groupoid"
    );
}

/// `(f*g)(x) = Σ_{t ∈ G^{r(x)}} w(t) f(t) g(t⁻¹x)`.
pub fn convolve(g: &FiniteGroupoid, f: &ArrowFunction, h: &ArrowFunction) -> ArrowFunction {
    check(g, f);
    check(g, h);
    let mut out = ArrowFunction::zeros(g.arrow_count());
    for x in 0..g.arrow_count() {
        let mut acc = C64::new(0.0, 0.0);
        for &t in g.range_fiber(g.range(x)) {
            if let Some(y) = g.compose(g.inverse(t), x) {
                acc += f[t] * h[y] * g.weight(t);
            }
        }
        out[x] = acc;
    }
    out
}

/// `f*(x) = conj f(x⁻¹)`.
pub fn star(g: &FiniteGroupoid, f: &ArrowFunction) -> ArrowFunction {
    check(g, f);
    ArrowFunction::new(
        (0..g.arrow_count())
            .map(|x| f[g.inverse(x)].conj())
            .collect(),
    )
}

/// `f^∨(x) = f(x⁻¹)`.
pub fn vee(g: &FiniteGroupoid, f: &ArrowFunction) -> ArrowFunction {
    check(g, f);
    ArrowFunction::new((0..g.arrow_count()).map(|x| f[g.inverse(x)]).collect())
}

/// `sup_u Σ_{t ∈ G^u} w(t)|f(t)|`.
pub fn i_norm_r(g: &FiniteGroupoid, f: &ArrowFunction) -> f64 {
    check(g, f);
    (0..g.unit_count())
        .map(|u| {
            g.range_fiber(u)
                .iter()
                .map(|&t| g.weight(t) * f[t].norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `sup_u Σ_{t ∈ G_u} w(t⁻¹)|f(t)|`, the I-norm for the inverted Haar system.
pub fn i_norm_s(g: &FiniteGroupoid, f: &ArrowFunction) -> f64 {
    check(g, f);
    (0..g.unit_count())
        .map(|u| {
            g.source_fiber(u)
                .iter()
                .map(|&t| g.weight(g.inverse(t)) * f[t].norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

pub fn i_norm(g: &FiniteGroupoid, f: &ArrowFunction) -> f64 {
    i_norm_r(g, f).max(i_norm_s(g, f))
}

/// Right action `(Fb)(x) = F(x) b(r(x))`, left action `(bF)(x) = b(s(x)) F(x)`.
pub fn module_action(
    g: &FiniteGroupoid,
    b: &UnitFunction,
    f: &ArrowFunction,
    side: Side,
) -> ArrowFunction {
    check(g, f);
    assert_eq!(b.len(), g.unit_count(), "unit function length mismatch");
    ArrowFunction::new(
        (0..g.arrow_count())
            .map(|x| {
                let u = match side {
                    Side::Right => g.range(x),
                    Side::Left => g.source(x),
                };
                f[x] * b[u]
            })
            .collect(),
    )
}

/// Translation by a bisection: `af(x) = f(x a^{s(x)})` on the left and
/// `fa(x) = f(a_{r(x)} x)` on the right.
pub fn act_bisection(
    g: &FiniteGroupoid,
    a: &Bisection,
    f: &ArrowFunction,
    side: Side,
) -> ArrowFunction {
    check(g, f);
    ArrowFunction::new(
        (0..g.arrow_count())
            .map(|x| {
                let y = match side {
                    Side::Left => g.compose(x, a.pick(g.source(x))),
                    Side::Right => g.compose(a.with_source(g, g.range(x)), x),
                };
                f[y.expect("translation by a bisection is always defined")]
            })
            .collect(),
    )
}

/// The convolution identity: `1/w(u)` on unit arrows, zero elsewhere.
pub fn approximate_identity(g: &FiniteGroupoid) -> ArrowFunction {
    let mut e = ArrowFunction::zeros(g.arrow_count());
    for &a in g.unit_arrows() {
        e[a] = C64::from(1.0 / g.weight(a));
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisection::enumerate_bisections;
    use crate::groupoid::cyclic_table;
    use crate::sample::{random_function, random_unit_function, rng};

    const EXACT: f64 = 1e-12;

    fn groupoids() -> Vec<FiniteGroupoid> {
        vec![
            FiniteGroupoid::pair(3),
            FiniteGroupoid::group_bundle(&[cyclic_table(2), cyclic_table(2)]).unwrap(),
            FiniteGroupoid::pair(3).with_unit_weights(&[1.0, 2.5, 0.4]).unwrap(),
            FiniteGroupoid::transformation(&cyclic_table(2), &[vec![0, 1, 2], vec![1, 0, 2]])
                .unwrap()
                .with_unit_weights(&[0.5, 0.5, 3.0])
                .unwrap(),
        ]
    }

    /// Triple sum over all arrows, with composability tested explicitly.
    fn convolve_oracle(g: &FiniteGroupoid, f: &ArrowFunction, h: &ArrowFunction) -> ArrowFunction {
        let n = g.arrow_count();
        let mut out = ArrowFunction::zeros(n);
        for t in 0..n {
            for y in 0..n {
                if let Some(x) = g.compose(t, y) {
                    out[x] += f[t] * h[y] * g.weight(t);
                }
            }
        }
        out
    }

    #[test]
    fn pair_groupoid_convolution_is_matrix_product() {
        let n = 3;
        let g = FiniteGroupoid::pair(n);
        let mut r = rng(1);
        let f = random_function(g.arrow_count(), &mut r);
        let h = random_function(g.arrow_count(), &mut r);
        let fh = convolve(&g, &f, &h);
        for i in 0..n {
            for j in 0..n {
                let expected: C64 = (0..n).map(|t| f[i * n + t] * h[t * n + j]).sum();
                assert!((fh[i * n + j] - expected).norm() < EXACT);
            }
        }
    }

    #[test]
    fn convolution_matches_oracle_and_is_associative() {
        let mut r = rng(2);
        for g in groupoids() {
            let n = g.arrow_count();
            let (f, h, k) = (
                random_function(n, &mut r),
                random_function(n, &mut r),
                random_function(n, &mut r),
            );
            assert!(convolve(&g, &f, &h).max_diff(&convolve_oracle(&g, &f, &h)) < EXACT);
            let left = convolve(&g, &convolve(&g, &f, &h), &k);
            let right = convolve(&g, &f, &convolve(&g, &h, &k));
            assert!(left.max_diff(&right) < EXACT);
        }
    }

    #[test]
    fn identity_element() {
        let mut r = rng(3);
        for g in groupoids() {
            let e = approximate_identity(&g);
            let f = random_function(g.arrow_count(), &mut r);
            assert!(convolve(&g, &e, &f).max_diff(&f) < EXACT);
            assert!(convolve(&g, &f, &e).max_diff(&f) < EXACT);
            if g.has_unit_weights() {
                assert!((i_norm_r(&g, &e) - 1.0).abs() < EXACT);
            }
            assert!((i_norm(&g, &e) - 1.0).abs() < EXACT);
        }
        let g = FiniteGroupoid::pair(3);
        let e = approximate_identity(&g);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(e[i * 3 + j], C64::from(if i == j { 1.0 } else { 0.0 }));
            }
        }
    }

    #[test]
    fn star_properties() {
        let mut r = rng(4);
        for g in groupoids() {
            let n = g.arrow_count();
            let f = random_function(n, &mut r);
            let h = random_function(n, &mut r);
            assert_eq!(star(&g, &star(&g, &f)), f);
            let lhs = star(&g, &convolve(&g, &f, &h));
            let rhs = convolve(&g, &star(&g, &h), &star(&g, &f));
            assert!(lhs.max_diff(&rhs) < EXACT);
            assert!((i_norm(&g, &star(&g, &f)) - i_norm(&g, &f)).abs() < EXACT);
        }
        let g = FiniteGroupoid::pair(3);
        let f = random_function(9, &mut r);
        let fs = star(&g, &f);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(fs[i * 3 + j], f[j * 3 + i].conj());
            }
        }
    }

    #[test]
    fn i_norm_examples() {
        let g = FiniteGroupoid::pair(2);
        let ones = ArrowFunction::constant(4, C64::from(1.0));
        assert_eq!(i_norm_r(&g, &ones), 2.0);
        assert_eq!(i_norm_s(&g, &ones), 2.0);
        assert_eq!(i_norm(&g, &ones), 2.0);
        for x in 0..4 {
            assert_eq!(i_norm(&g, &ArrowFunction::delta(4, x)), g.weight(x));
        }
    }

    #[test]
    fn delta_norm_with_weights_sees_both_endpoints() {
        let g = FiniteGroupoid::pair(2).with_unit_weights(&[1.0, 3.0]).unwrap();
        // arrow (1,2): weight w(s) = 3, reflected weight w(r) = 1
        let d = ArrowFunction::delta(4, 1);
        assert_eq!(i_norm_r(&g, &d), 3.0);
        assert_eq!(i_norm_s(&g, &d), 1.0);
        // arrow (2,1): weight 1, reflected weight 3
        let d = ArrowFunction::delta(4, 2);
        assert_eq!(i_norm(&g, &d), 3.0);
    }

    #[test]
    fn submultiplicative() {
        let mut r = rng(5);
        let g = FiniteGroupoid::pair(3);
        for _ in 0..100 {
            let f = random_function(9, &mut r);
            let h = random_function(9, &mut r);
            let lhs = i_norm_r(&g, &convolve(&g, &f, &h));
            assert!(lhs <= i_norm_r(&g, &f) * i_norm_r(&g, &h) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn module_actions() {
        let mut r = rng(6);
        for g in groupoids() {
            let n = g.arrow_count();
            let f = random_function(n, &mut r);
            let h = random_function(n, &mut r);
            let b = random_unit_function(g.unit_count(), &mut r);
            let one = UnitFunction::constant(g.unit_count(), C64::from(1.0));
            assert_eq!(module_action(&g, &one, &f, Side::Left), f);
            assert_eq!(module_action(&g, &one, &f, Side::Right), f);

            let fh = convolve(&g, &f, &h);
            let lhs = module_action(&g, &b, &fh, Side::Right);
            let rhs = convolve(&g, &module_action(&g, &b, &f, Side::Right), &h);
            assert!(lhs.max_diff(&rhs) < EXACT);
            let lhs = module_action(&g, &b, &fh, Side::Left);
            let rhs = convolve(&g, &f, &module_action(&g, &b, &h, Side::Left));
            assert!(lhs.max_diff(&rhs) < EXACT);
        }
    }

    #[test]
    fn flip_bisection_on_pair_two() {
        let g = FiniteGroupoid::pair(2);
        let flip = enumerate_bisections(&g)
            .into_iter()
            .find(|a| *a != Bisection::identity(&g))
            .unwrap();
        let mut r = rng(7);
        let f = random_function(4, &mut r);
        let af = act_bisection(&g, &flip, &f, Side::Left);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(af[i * 2 + j], f[i * 2 + (1 - j)]);
            }
        }
        let id = Bisection::identity(&g);
        assert_eq!(act_bisection(&g, &id, &f, Side::Left), f);
        assert_eq!(act_bisection(&g, &id, &f, Side::Right), f);
    }

    #[test]
    fn bisection_translation_identities() {
        let mut r = rng(8);
        for g in groupoids() {
            let n = g.arrow_count();
            let all = enumerate_bisections(&g);
            for a in &all {
                let f = random_function(n, &mut r);
                let h = random_function(n, &mut r);
                let fh = convolve(&g, &f, &h);
                let lhs = act_bisection(&g, a, &fh, Side::Left);
                let rhs = convolve(&g, &f, &act_bisection(&g, a, &h, Side::Left));
                assert!(lhs.max_diff(&rhs) < EXACT);
                let lhs = act_bisection(&g, a, &fh, Side::Right);
                let rhs = convolve(&g, &act_bisection(&g, a, &f, Side::Right), &h);
                assert!(lhs.max_diff(&rhs) < EXACT);
                for b in &all {
                    let ab = a.product(&g, b);
                    let nested = act_bisection(&g, a, &act_bisection(&g, b, &f, Side::Left), Side::Left);
                    assert_eq!(nested, act_bisection(&g, &ab, &f, Side::Left));
                    let nested =
                        act_bisection(&g, b, &act_bisection(&g, a, &f, Side::Right), Side::Right);
                    assert_eq!(nested, act_bisection(&g, &ab, &f, Side::Right));
                }
            }
        }
    }
}
