//! Finite groupoids with a left Haar system.
//!
//! Arrows are dense indices `0..arrow_count`; units are dense indices
//! `0..unit_count` and each unit has a distinguished identity arrow.
//! Composition is stored as a full table with `None` for undefined products.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroupoid {
    unit_arrows: Vec<usize>,
    unit_of_arrow: Vec<Option<usize>>,
    range: Vec<usize>,
    source: Vec<usize>,
    inverse: Vec<usize>,
    compose: Vec<Option<usize>>,
    weights: Vec<f64>,
    range_fibers: Vec<Vec<usize>>,
    source_fibers: Vec<Vec<usize>>,
}

/// Raw description of a groupoid, used to build instances that need not
/// satisfy the axioms (for example to exercise `validate`).
#[derive(Debug, Clone)]
pub struct GroupoidParts {
    pub unit_arrows: Vec<usize>,
    pub range: Vec<usize>,
    pub source: Vec<usize>,
    pub inverse: Vec<usize>,
    /// Entries `(x, y, xy)`; pairs not listed are undefined.
    pub compose: Vec<(usize, usize, usize)>,
    /// Per-arrow weights; `None` means counting measure.
    pub weights: Option<Vec<f64>>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from raw tables. Only shape is checked here (lengths,
    /// index bounds, distinct unit arrows); the algebraic axioms are checked by
    /// [`FiniteGroupoid::validate`].
    pub fn from_parts(parts: GroupoidParts) -> Result<Self> {
        let n = parts.range.len();
        let units = parts.unit_arrows.len();
        let bad = |msg: String| Err(Error::MalformedGroupoid(msg));
        if parts.source.len() != n || parts.inverse.len() != n {
            return bad(format!(
                "range/source/inverse lengths differ ({}, {}, {})",
                n,
                parts.source.len(),
                parts.inverse.len()
            ));
        }
        let mut unit_of_arrow = vec![None; n];
        for (u, &a) in parts.unit_arrows.iter().enumerate() {
            if a >= n {
                return bad(format!("unit {u} refers to missing arrow {a}"));
            }
            if unit_of_arrow[a].is_some() {
                return bad(format!("arrow {a} listed as two units"));
            }
            unit_of_arrow[a] = Some(u);
        }
        for x in 0..n {
            if parts.range[x] >= units || parts.source[x] >= units {
                return bad(format!("arrow {x} has an endpoint outside the unit space"));
            }
            if parts.inverse[x] >= n {
                return bad(format!("arrow {x} has an out-of-range inverse"));
            }
        }
        let mut compose = vec![None; n * n];
        for &(x, y, xy) in &parts.compose {
            if x >= n || y >= n || xy >= n {
                return bad(format!("composition entry ({x}, {y}, {xy}) out of range"));
            }
            match compose[x * n + y] {
                Some(prev) if prev != xy => {
                    return bad(format!("composition of ({x}, {y}) given twice"));
                }
                _ => compose[x * n + y] = Some(xy),
            }
        }
        let weights = match parts.weights {
            Some(w) => {
                if w.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: w.len(),
                    });
                }
                if let Some(x) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                    return bad(format!("arrow {x} has a non-positive weight"));
                }
                w
            }
            None => vec![1.0; n],
        };
        let mut range_fibers = vec![Vec::new(); units];
        let mut source_fibers = vec![Vec::new(); units];
        for x in 0..n {
            range_fibers[parts.range[x]].push(x);
            source_fibers[parts.source[x]].push(x);
        }
        Ok(Self {
            unit_arrows: parts.unit_arrows,
            unit_of_arrow,
            range: parts.range,
            source: parts.source,
            inverse: parts.inverse,
            compose,
            weights,
            range_fibers,
            source_fibers,
        })
    }

    pub fn to_parts(&self) -> GroupoidParts {
        let n = self.arrow_count();
        let mut compose = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if let Some(xy) = self.compose[x * n + y] {
                    compose.push((x, y, xy));
                }
            }
        }
        GroupoidParts {
            unit_arrows: self.unit_arrows.clone(),
            range: self.range.clone(),
            source: self.source.clone(),
            inverse: self.inverse.clone(),
            compose,
            weights: Some(self.weights.clone()),
        }
    }

    /// The pair groupoid on `n` points: arrow `(i, j)` has index `i * n + j`,
    /// range `i` and source `j`.
    pub fn pair(n: usize) -> Self {
        assert!(n >= 1, "pair groupoid needs at least one point");
        let idx = |i: usize, j: usize| i * n + j;
        let mut parts = GroupoidParts {
            unit_arrows: (0..n).map(|i| idx(i, i)).collect(),
            range: Vec::with_capacity(n * n),
            source: Vec::with_capacity(n * n),
            inverse: Vec::with_capacity(n * n),
            compose: Vec::with_capacity(n * n * n),
            weights: None,
        };
        for i in 0..n {
            for j in 0..n {
                parts.range.push(i);
                parts.source.push(j);
                parts.inverse.push(idx(j, i));
                for k in 0..n {
                    parts.compose.push((idx(i, j), idx(j, k), idx(i, k)));
                }
            }
        }
        Self::from_parts(parts).expect("pair groupoid is well formed")
    }

    /// A group as a one-unit groupoid. `table[a][b]` is the product `ab`.
    pub fn group(table: &[Vec<usize>]) -> Result<Self> {
        Self::group_bundle(&[table.to_vec()])
    }

    /// Disjoint union of groups, one per unit. Arrows of fiber `k` follow those
    /// of fibers `0..k`.
    pub fn group_bundle(tables: &[Vec<Vec<usize>>]) -> Result<Self> {
        let mut parts = GroupoidParts {
            unit_arrows: Vec::new(),
            range: Vec::new(),
            source: Vec::new(),
            inverse: Vec::new(),
            compose: Vec::new(),
            weights: None,
        };
        let mut offset = 0;
        for (u, table) in tables.iter().enumerate() {
            let info = check_group_table(table)?;
            let m = table.len();
            parts.unit_arrows.push(offset + info.identity);
            for a in 0..m {
                parts.range.push(u);
                parts.source.push(u);
                parts.inverse.push(offset + info.inverse[a]);
                for b in 0..m {
                    parts.compose.push((offset + a, offset + b, offset + table[a][b]));
                }
            }
            offset += m;
        }
        Self::from_parts(parts)
    }

    /// `G × I₂`: arrow `(x, i, j)` has index `4x + 2i + j`, unit `(u, i)` has
    /// index `2u + i`.
    pub fn product_with_i2(&self) -> Self {
        let n = self.arrow_count();
        let idx = |x: usize, i: usize, j: usize| 4 * x + 2 * i + j;
        let mut parts = GroupoidParts {
            unit_arrows: Vec::with_capacity(2 * self.unit_count()),
            range: Vec::with_capacity(4 * n),
            source: Vec::with_capacity(4 * n),
            inverse: Vec::with_capacity(4 * n),
            compose: Vec::new(),
            weights: Some(Vec::with_capacity(4 * n)),
        };
        for &a in &self.unit_arrows {
            for i in 0..2 {
                parts.unit_arrows.push(idx(a, i, i));
            }
        }
        for x in 0..n {
            for i in 0..2 {
                for j in 0..2 {
                    parts.range.push(2 * self.range[x] + i);
                    parts.source.push(2 * self.source[x] + j);
                    parts.inverse.push(idx(self.inverse[x], j, i));
                    parts.weights.as_mut().unwrap().push(self.weights[x]);
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if let Some(xy) = self.compose(x, y) {
                    for i in 0..2 {
                        for j in 0..2 {
                            for l in 0..2 {
                                parts.compose.push((idx(x, i, j), idx(y, j, l), idx(xy, i, l)));
                            }
                        }
                    }
                }
            }
        }
        Self::from_parts(parts).expect("product of a well-formed groupoid")
    }

    /// Transformation groupoid of a group acting on points. `action[g][p]` is
    /// `g·p`. Arrow `(g, p)` has index `g * points + p`, range `g·p`, source `p`.
    pub fn transformation(table: &[Vec<usize>], action: &[Vec<usize>]) -> Result<Self> {
        let info = check_group_table(table)?;
        let m = table.len();
        if action.len() != m {
            return Err(Error::InvalidAction(format!(
                "action has {} rows for a group of order {m}",
                action.len()
            )));
        }
        let points = action.first().map_or(0, Vec::len);
        for (g, row) in action.iter().enumerate() {
            if row.len() != points {
                return Err(Error::InvalidAction(format!("row {g} has the wrong length")));
            }
            if let Some(p) = row.iter().position(|&q| q >= points) {
                return Err(Error::InvalidAction(format!("{g}·{p} is not a point")));
            }
        }
        for p in 0..points {
            if action[info.identity][p] != p {
                return Err(Error::InvalidAction(format!("identity moves point {p}")));
            }
            for g in 0..m {
                for h in 0..m {
                    if action[g][action[h][p]] != action[table[g][h]][p] {
                        return Err(Error::InvalidAction(format!(
                            "g(h·p) != (gh)·p for g={g}, h={h}, p={p}"
                        )));
                    }
                }
            }
        }
        let idx = |g: usize, p: usize| g * points + p;
        let mut parts = GroupoidParts {
            unit_arrows: (0..points).map(|p| idx(info.identity, p)).collect(),
            range: Vec::new(),
            source: Vec::new(),
            inverse: Vec::new(),
            compose: Vec::new(),
            weights: None,
        };
        for g in 0..m {
            for p in 0..points {
                parts.range.push(action[g][p]);
                parts.source.push(p);
                parts.inverse.push(idx(info.inverse[g], action[g][p]));
            }
        }
        // (g, h·p)(h, p) = (gh, p)
        for g in 0..m {
            for h in 0..m {
                for p in 0..points {
                    parts.compose.push((idx(g, action[h][p]), idx(h, p), idx(table[g][h], p)));
                }
            }
        }
        Self::from_parts(parts)
    }

    /// Disjoint union; arrows and units of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let n = self.arrow_count();
        let k = self.unit_count();
        let a = self.to_parts();
        let b = other.to_parts();
        let mut weights = a.weights.unwrap();
        weights.extend(b.weights.unwrap());
        let parts = GroupoidParts {
            unit_arrows: a
                .unit_arrows
                .into_iter()
                .chain(b.unit_arrows.into_iter().map(|x| x + n))
                .collect(),
            range: a.range.into_iter().chain(b.range.into_iter().map(|u| u + k)).collect(),
            source: a.source.into_iter().chain(b.source.into_iter().map(|u| u + k)).collect(),
            inverse: a.inverse.into_iter().chain(b.inverse.into_iter().map(|x| x + n)).collect(),
            compose: a
                .compose
                .into_iter()
                .chain(b.compose.into_iter().map(|(x, y, z)| (x + n, y + n, z + n)))
                .collect(),
            weights: Some(weights),
        };
        Self::from_parts(parts).expect("union of well-formed groupoids")
    }

    /// Replaces the Haar system by the one with the given per-unit weights:
    /// every arrow receives the weight of its source unit.
    pub fn with_unit_weights(&self, unit_weights: &[f64]) -> Result<Self> {
        if unit_weights.len() != self.unit_count() {
            return Err(Error::DimensionMismatch {
                expected: self.unit_count(),
                found: unit_weights.len(),
            });
        }
        let w = self.source.iter().map(|&u| unit_weights[u]).collect();
        self.with_arrow_weights(w)
    }

    /// Replaces the weights arrow by arrow, without enforcing left invariance.
    pub fn with_arrow_weights(&self, weights: Vec<f64>) -> Result<Self> {
        let mut parts = self.to_parts();
        parts.weights = Some(weights);
        Self::from_parts(parts)
    }

    pub fn arrow_count(&self) -> usize {
        self.range.len()
    }

    pub fn unit_count(&self) -> usize {
        self.unit_arrows.len()
    }

    /// Identity arrow of unit `u`.
    pub fn unit_arrow(&self, u: usize) -> usize {
        self.unit_arrows[u]
    }

    pub fn unit_arrows(&self) -> &[usize] {
        &self.unit_arrows
    }

    /// The unit an arrow represents, if it is a unit arrow.
    pub fn unit_of(&self, x: usize) -> Option<usize> {
        self.unit_of_arrow[x]
    }

    pub fn is_unit(&self, x: usize) -> bool {
        self.unit_of_arrow[x].is_some()
    }

    pub fn range(&self, x: usize) -> usize {
        self.range[x]
    }

    pub fn source(&self, x: usize) -> usize {
        self.source[x]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        self.compose[x * self.arrow_count() + y]
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of unit `u`, i.e. of its identity arrow.
    pub fn unit_weight(&self, u: usize) -> f64 {
        self.weights[self.unit_arrows[u]]
    }

    pub fn has_unit_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// `G^u`, arrows with range `u`, in increasing order.
    pub fn range_fiber(&self, u: usize) -> &[usize] {
        &self.range_fibers[u]
    }

    /// `G_u`, arrows with source `u`, in increasing order.
    pub fn source_fiber(&self, u: usize) -> &[usize] {
        &self.source_fibers[u]
    }

    /// True when at most one arrow joins any two units.
    pub fn is_principal(&self) -> bool {
        let k = self.unit_count();
        let mut seen = vec![false; k * k];
        for x in 0..self.arrow_count() {
            let cell = &mut seen[self.range[x] * k + self.source[x]];
            if *cell {
                return false;
            }
            *cell = true;
        }
        true
    }

    /// Is this, up to relabelling, the pair groupoid on its units? Returns the
    /// arrow with range `i` and source `j` at position `i * n + j`.
    pub fn pair_layout(&self) -> Option<Vec<usize>> {
        let k = self.unit_count();
        if self.arrow_count() != k * k || !self.is_principal() {
            return None;
        }
        let mut layout = vec![0; k * k];
        for x in 0..self.arrow_count() {
            layout[self.range[x] * k + self.source[x]] = x;
        }
        Some(layout)
    }

    /// Checks every axiom and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let n = self.arrow_count();
        let mut violations = Vec::new();

        for (u, &a) in self.unit_arrows.iter().enumerate() {
            if self.range[a] != u || self.source[a] != u || self.inverse[a] != a {
                violations.push(Violation::UnitShape { unit: u });
            }
        }
        for x in 0..n {
            for y in 0..n {
                let composable = self.source[x] == self.range[y];
                match (composable, self.compose(x, y)) {
                    (true, None) | (false, Some(_)) => {
                        violations.push(Violation::CompositionDomain { x, y })
                    }
                    (true, Some(xy)) => {
                        if self.range[xy] != self.range[x] || self.source[xy] != self.source[y] {
                            violations.push(Violation::CompositionEndpoints { x, y });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = self.compose(x, y) else { continue };
                for z in 0..n {
                    let Some(yz) = self.compose(y, z) else { continue };
                    if self.compose(xy, z) != self.compose(x, yz) {
                        violations.push(Violation::Associativity { x, y, z });
                    }
                }
            }
        }
        for x in 0..n {
            let r = self.unit_arrows[self.range[x]];
            let s = self.unit_arrows[self.source[x]];
            if self.compose(r, x) != Some(x) || self.compose(x, s) != Some(x) {
                violations.push(Violation::UnitIdentity { arrow: x });
            }
            let xi = self.inverse[x];
            if self.range[xi] != self.source[x]
                || self.source[xi] != self.range[x]
                || self.compose(xi, x) != Some(s)
                || self.compose(x, xi) != Some(r)
            {
                violations.push(Violation::InverseLaw { arrow: x });
            }
            let sw = self.weights[s];
            if (self.weights[x] - sw).abs() > 1e-12 * sw.max(1.0) {
                violations.push(Violation::HaarInvariance {
                    arrow: x,
                    weight: self.weights[x],
                    source_weight: sw,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Brute-force isomorphism test (unit bijections, then arrows fiber by
    /// fiber). Weights are ignored. Intended for tiny instances in tests.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        let n = self.arrow_count();
        let k = self.unit_count();
        if n != other.arrow_count() || k != other.unit_count() {
            return false;
        }
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            if self.arrow_map_under(other, &perm).is_some() {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }

    fn arrow_map_under(&self, other: &Self, units: &[usize]) -> Option<Vec<usize>> {
        let n = self.arrow_count();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for (u, &v) in units.iter().enumerate() {
            map[self.unit_arrows[u]] = other.unit_arrows[v];
            used[other.unit_arrows[v]] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&x| !self.is_unit(x)).collect();
        fn extend(
            a: &FiniteGroupoid,
            b: &FiniteGroupoid,
            units: &[usize],
            rest: &[usize],
            k: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if k == rest.len() {
                let n = a.arrow_count();
                return (0..n).all(|x| {
                    (0..n).all(|y| a.compose(x, y).map(|z| map[z]) == b.compose(map[x], map[y]))
                });
            }
            let x = rest[k];
            let (r, s) = (units[a.range(x)], units[a.source(x)]);
            for &y in b.range_fiber(r) {
                if used[y] || b.source(y) != s {
                    continue;
                }
                map[x] = y;
                used[y] = true;
                if extend(a, b, units, rest, k + 1, map, used) {
                    return true;
                }
                used[y] = false;
            }
            map[x] = usize::MAX;
            false
        }
        extend(self, other, units, &rest, 0, &mut map, &mut used).then_some(map)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

struct GroupInfo {
    identity: usize,
    inverse: Vec<usize>,
}

fn check_group_table(table: &[Vec<usize>]) -> Result<GroupInfo> {
    let m = table.len();
    let bad = |msg: String| Err(Error::InvalidGroupTable(msg));
    if m == 0 {
        return bad("empty table".into());
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != m {
            return bad(format!("row {a} has length {} instead of {m}", row.len()));
        }
        if let Some(b) = row.iter().position(|&c| c >= m) {
            return bad(format!("product {a}·{b} is not an element"));
        }
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return bad(format!("not associative at ({a}, {b}, {c})"));
                }
            }
        }
    }
    let Some(identity) = (0..m).find(|&e| (0..m).all(|a| table[e][a] == a && table[a][e] == a))
    else {
        return bad("no identity element".into());
    };
    let mut inverse = Vec::with_capacity(m);
    for a in 0..m {
        match (0..m).find(|&b| table[a][b] == identity && table[b][a] == identity) {
            Some(b) => inverse.push(b),
            None => return bad(format!("element {a} has no inverse")),
        }
    }
    Ok(GroupInfo { identity, inverse })
}

/// Multiplication table of the cyclic group of order `m`.
pub fn cyclic_table(m: usize) -> Vec<Vec<usize>> {
    (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect()
}

/// Multiplication table of the symmetric group on `k` letters, elements in
/// lexicographic order of their one-line notation; `(στ)(i) = σ(τ(i))`.
pub fn symmetric_table(k: usize) -> Vec<Vec<usize>> {
    let perms = permutations(k);
    let index = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
    perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| index(&t.iter().map(|&i| s[i]).collect::<Vec<_>>()))
                .collect()
        })
        .collect()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnitShape { unit: usize },
    CompositionDomain { x: usize, y: usize },
    CompositionEndpoints { x: usize, y: usize },
    Associativity { x: usize, y: usize, z: usize },
    UnitIdentity { arrow: usize },
    InverseLaw { arrow: usize },
    HaarInvariance { arrow: usize, weight: f64, source_weight: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitShape { unit } => {
                write!(f, "unit {unit}: identity arrow is not a fixed loop")
            }
            Violation::CompositionDomain { x, y } => write!(
                f,
                "composition of ({x}, {y}) defined exactly when s(x) = r(y) fails"
            ),
            Violation::CompositionEndpoints { x, y } => {
                write!(f, "product of ({x}, {y}) has wrong endpoints")
            }
            Violation::Associativity { x, y, z } => {
                write!(f, "associativity fails at ({x}, {y}, {z})")
            }
            Violation::UnitIdentity { arrow } => {
                write!(f, "unit arrows do not act as identities on {arrow}")
            }
            Violation::InverseLaw { arrow } => write!(f, "inverse law fails at {arrow}"),
            Violation::HaarInvariance {
                arrow,
                weight,
                source_weight,
            } => write!(
                f,
                "Haar weight of arrow {arrow} is {weight} but its source unit has {source_weight}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_haar_violation(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::HaarInvariance { .. }))
    }

    pub fn has_associativity_violation(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::Associativity { .. }))
    }
}
