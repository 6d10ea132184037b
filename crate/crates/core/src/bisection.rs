//! Bisections and the group Γ they form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::matching;

/// One arrow per unit: `pick[u]` has range `u`, and the sources of the picks
/// run through every unit exactly once.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bisection {
    pick: Vec<usize>,
}

impl Bisection {
    pub fn new(g: &FiniteGroupoid, pick: Vec<usize>) -> Result<Self> {
        if !is_bisection(g, &pick) {
            return Err(Error::MalformedGroupoid(format!(
                "{pick:?} is not a bisection"
            )));
        }
        Ok(Self { pick })
    }

    /// The bisection made of all unit arrows.
    pub fn identity(g: &FiniteGroupoid) -> Self {
        Self {
            pick: g.unit_arrows().to_vec(),
        }
    }

    /// `a^u`, the arrow of the bisection with range `u`.
    pub fn pick(&self, u: usize) -> usize {
        self.pick[u]
    }

    pub fn picks(&self) -> &[usize] {
        &self.pick
    }

    /// `a_v`, the arrow of the bisection with source `v`.
    pub fn with_source(&self, g: &FiniteGroupoid, v: usize) -> usize {
        *self
            .pick
            .iter()
            .find(|&&x| g.source(x) == v)
            .expect("a bisection meets every source fiber")
    }

    pub fn contains(&self, x: usize) -> bool {
        self.pick.contains(&x)
    }

    /// The unit permutation `u ↦ s(a^u)`.
    pub fn source_permutation(&self, g: &FiniteGroupoid) -> Vec<usize> {
        self.pick.iter().map(|&x| g.source(x)).collect()
    }

    /// `(ab)^u = a^u · b^{s(a^u)}`.
    pub fn product(&self, g: &FiniteGroupoid, b: &Bisection) -> Bisection {
        let pick = self
            .pick
            .iter()
            .map(|&x| {
                g.compose(x, b.pick[g.source(x)])
                    .expect("s(a^u) = r(b^{s(a^u)})")
            })
            .collect::<Vec<_>>();
        debug_assert!(is_bisection(g, &pick));
        Bisection { pick }
    }

    /// `(a⁻¹)^u = (a_u)⁻¹`.
    pub fn inverse(&self, g: &FiniteGroupoid) -> Bisection {
        let mut pick = vec![usize::MAX; self.pick.len()];
        for &x in &self.pick {
            pick[g.source(x)] = g.inverse(x);
        }
        debug_assert!(is_bisection(g, &pick));
        Bisection { pick }
    }
}

pub fn is_bisection(g: &FiniteGroupoid, pick: &[usize]) -> bool {
    let k = g.unit_count();
    if pick.len() != k {
        return false;
    }
    let mut hit = vec![false; k];
    for (u, &x) in pick.iter().enumerate() {
        if x >= g.arrow_count() || g.range(x) != u || hit[g.source(x)] {
            return false;
        }
        hit[g.source(x)] = true;
    }
    true
}

fn arrow_edges(g: &FiniteGroupoid) -> Vec<(usize, usize)> {
    (0..g.arrow_count())
        .map(|x| (g.range(x), g.source(x)))
        .collect()
}

/// All bisections, ordered lexicographically by their picks.
pub fn enumerate_bisections(g: &FiniteGroupoid) -> Vec<Bisection> {
    matching::enumerate_perfect_matchings(g.unit_count(), &arrow_edges(g))
        .into_iter()
        .map(|pick| Bisection { pick })
        .collect()
}

/// A bisection containing `x`, if any.
pub fn bisection_through(g: &FiniteGroupoid, x: usize) -> Option<Bisection> {
    matching::matching_through(g.unit_count(), &arrow_edges(g), x).map(|pick| Bisection { pick })
}
