//! Module maps into functions on units, multiplicative module maps, and the
//! reconstruction of bisections from them.
//!
//! Maps are probed on point masses `δ_x`. Every point mass is a coefficient of
//! the regular representation, so this basis is legitimate at finite scale.

use crate::algebra::{act_bisection, module_action, ArrowFunction, Side, UnitFunction};
use crate::bisection::{bisection_through, enumerate_bisections, is_bisection, Bisection};
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, CMatrix, CVector};
use crate::C64;

const ZERO_TOL: f64 = 1e-12;

/// A linear map from functions on arrows to functions on units, as a
/// `units × arrows` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleMap {
    pub matrix: CMatrix,
    pub side: Side,
}

impl ModuleMap {
    pub fn new(matrix: CMatrix, side: Side) -> Self {
        Self { matrix, side }
    }

    /// Evaluation along a partial section: `φ ↦ (u ↦ φ(picks[u]))`, zero where
    /// `picks[u]` is `None`.
    pub fn evaluation(g: &FiniteGroupoid, picks: &[Option<usize>], side: Side) -> Self {
        let mut m = CMatrix::zeros(g.unit_count(), g.arrow_count());
        for (u, p) in picks.iter().enumerate() {
            if let Some(x) = p {
                m[(u, *x)] = C64::from(1.0);
            }
        }
        Self::new(m, side)
    }

    pub fn apply(&self, phi: &ArrowFunction) -> UnitFunction {
        let v = CVector::from_column_slice(phi.values());
        UnitFunction::new((&self.matrix * v).iter().copied().collect())
    }

    /// Image of `δ_x`.
    pub fn column(&self, x: usize) -> Vec<C64> {
        self.matrix.column(x).iter().copied().collect()
    }

    /// Precomposition with a linear map on functions, given by its action.
    pub fn precompose(
        &self,
        g: &FiniteGroupoid,
        map: impl Fn(&ArrowFunction) -> ArrowFunction,
    ) -> ModuleMap {
        let n = g.arrow_count();
        let mut m = CMatrix::zeros(g.unit_count(), n);
        for x in 0..n {
            let image = self.apply(&map(&ArrowFunction::delta(n, x)));
            for u in 0..g.unit_count() {
                m[(u, x)] = image[u];
            }
        }
        ModuleMap::new(m, self.side)
    }

    fn endpoint(&self, g: &FiniteGroupoid, x: usize) -> usize {
        match self.side {
            Side::Right => g.range(x),
            Side::Left => g.source(x),
        }
    }
}

/// `α^a(φ)(u) = φ(a^u)`.
pub fn alpha_from_bisection(g: &FiniteGroupoid, a: &Bisection) -> ModuleMap {
    let picks: Vec<_> = a.picks().iter().map(|&x| Some(x)).collect();
    ModuleMap::evaluation(g, &picks, Side::Right)
}

/// `β_a(φ)(u) = φ(a_u)`.
pub fn beta_from_bisection(g: &FiniteGroupoid, a: &Bisection) -> ModuleMap {
    let picks: Vec<_> = (0..g.unit_count()).map(|v| Some(a.with_source(g, v))).collect();
    ModuleMap::evaluation(g, &picks, Side::Left)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JFailure {
    /// No unit `u` with `α(·)(u) = β(·)(v)`.
    UnmatchedBeta(usize),
    /// No unit `v` with `β(·)(v) = α(·)(u)`.
    UnmatchedAlpha(usize),
    /// Several candidate partners for `α`'s unit `u`.
    Ambiguous(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmmReport {
    /// (i) first `(unit, arrow)` where `α(φb) = α(φ)b` fails on the basis.
    pub alpha_module_law: Option<(usize, usize)>,
    /// (i) first `(unit, arrow)` where `β(bφ) = bβ(φ)` fails on the basis.
    pub beta_module_law: Option<(usize, usize)>,
    /// (ii) units at which `α` vanishes on every basis function.
    pub alpha_vanishes_at: Vec<usize>,
    pub beta_vanishes_at: Vec<usize>,
    /// (iii) `J` with `β(φ)(J(u)) = α(φ)(u)`, or why none exists.
    pub j: std::result::Result<Vec<usize>, JFailure>,
    /// (iv) compactness of the restricted map; automatic in finite dimensions.
    pub compact_by_finiteness: bool,
    /// (v) first pair `(x, y)` with `α(δ_x δ_y) ≠ α(δ_x)α(δ_y)`.
    pub alpha_multiplicative: Option<(usize, usize)>,
    pub beta_multiplicative: Option<(usize, usize)>,
}

impl MmmReport {
    pub fn passes(&self) -> bool {
        self.alpha_module_law.is_none()
            && self.beta_module_law.is_none()
            && self.alpha_vanishes_at.is_empty()
            && self.beta_vanishes_at.is_empty()
            && self.j.is_ok()
            && self.compact_by_finiteness
            && self.alpha_multiplicative.is_none()
            && self.beta_multiplicative.is_none()
    }
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= ZERO_TOL
}

/// Checks the module law on `δ_x` against `b = δ_v` for all `x, v`.
fn module_law_witness(g: &FiniteGroupoid, m: &ModuleMap, side: Side) -> Option<(usize, usize)> {
    let n = g.arrow_count();
    let k = g.unit_count();
    for x in 0..n {
        let delta = ArrowFunction::delta(n, x);
        let image = m.apply(&delta);
        for v in 0..k {
            let b = UnitFunction::delta(k, v);
            let lhs = m.apply(&module_action(g, &b, &delta, side));
            let rhs = image.pointwise(&b);
            if let Some(u) = (0..k).find(|&u| !close(lhs[u], rhs[u])) {
                return Some((u, x));
            }
        }
    }
    None
}

fn vanishing_units(m: &ModuleMap) -> Vec<usize> {
    (0..m.matrix.nrows())
        .filter(|&u| m.matrix.row(u).iter().all(|z| z.norm() <= ZERO_TOL))
        .collect()
}

fn multiplicative_witness(m: &ModuleMap) -> Option<(usize, usize)> {
    let n = m.matrix.ncols();
    for x in 0..n {
        for y in x..n {
            let cx = m.column(x);
            let cy = m.column(y);
            let lhs = if x == y { cx.clone() } else { vec![C64::new(0.0, 0.0); cx.len()] };
            if lhs.iter().zip(cx.iter().zip(&cy)).any(|(l, (a, b))| !close(*l, a * b)) {
                return Some((x, y));
            }
        }
    }
    None
}

fn rows_equal(a: &CMatrix, u: usize, b: &CMatrix, v: usize) -> bool {
    (0..a.ncols()).all(|x| close(a[(u, x)], b[(v, x)]))
}

fn find_j(alpha: &ModuleMap, beta: &ModuleMap) -> std::result::Result<Vec<usize>, JFailure> {
    let k = alpha.matrix.nrows();
    if let Some(v) = (0..k).find(|&v| !(0..k).any(|u| rows_equal(&alpha.matrix, u, &beta.matrix, v))) {
        return Err(JFailure::UnmatchedBeta(v));
    }
    let mut j = Vec::with_capacity(k);
    for u in 0..k {
        let partners: Vec<usize> = (0..k)
            .filter(|&v| rows_equal(&alpha.matrix, u, &beta.matrix, v))
            .collect();
        match partners.as_slice() {
            [] => return Err(JFailure::UnmatchedAlpha(u)),
            [v] => j.push(*v),
            _ => return Err(JFailure::Ambiguous(u)),
        }
    }
    Ok(j)
}

/// Checks conditions (i)–(v) for a candidate pair `(α, β)`.
pub fn verify_mmm(g: &FiniteGroupoid, alpha: &ModuleMap, beta: &ModuleMap) -> MmmReport {
    MmmReport {
        alpha_module_law: module_law_witness(g, alpha, Side::Right),
        beta_module_law: module_law_witness(g, beta, Side::Left),
        alpha_vanishes_at: vanishing_units(alpha),
        beta_vanishes_at: vanishing_units(beta),
        j: find_j(alpha, beta),
        compact_by_finiteness: true,
        alpha_multiplicative: multiplicative_witness(alpha),
        beta_multiplicative: multiplicative_witness(beta),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportAnalysis {
    /// Arrows `x` with `α(δ_x)` nonzero at the endpoint of `x` (range for right
    /// maps, source for left maps).
    pub a: Vec<usize>,
    /// Arrows with `α(δ_x) ≡ 0`.
    pub n: Vec<usize>,
    /// Endpoints of `A`.
    pub a0: Vec<usize>,
    /// Units outside `A0`.
    pub b0: Vec<usize>,
    /// Units of `A0` over which `A` has more than one arrow.
    pub singleton_violations: Vec<usize>,
}

impl SupportAnalysis {
    /// The arrow of `A` over each unit, when unique.
    pub fn section(&self, g: &FiniteGroupoid, side: Side) -> Vec<Option<usize>> {
        let mut out = vec![None; g.unit_count()];
        for &x in &self.a {
            let u = match side {
                Side::Right => g.range(x),
                Side::Left => g.source(x),
            };
            if !self.singleton_violations.contains(&u) {
                out[u] = Some(x);
            }
        }
        out
    }
}

pub fn support_analysis(g: &FiniteGroupoid, alpha: &ModuleMap) -> SupportAnalysis {
    let mut a = Vec::new();
    let mut n = Vec::new();
    let mut count = vec![0usize; g.unit_count()];
    for x in 0..g.arrow_count() {
        let col = alpha.column(x);
        let u = alpha.endpoint(g, x);
        if col[u].norm() > ZERO_TOL {
            a.push(x);
            count[u] += 1;
        }
        if col.iter().all(|z| z.norm() <= ZERO_TOL) {
            n.push(x);
        }
    }
    let a0: Vec<usize> = (0..g.unit_count()).filter(|&u| count[u] > 0).collect();
    let b0 = (0..g.unit_count()).filter(|&u| count[u] == 0).collect();
    let singleton_violations = a0.iter().copied().filter(|&u| count[u] > 1).collect();
    SupportAnalysis {
        a,
        n,
        a0,
        b0,
        singleton_violations,
    }
}

/// Recovers the bisection whose evaluation maps are `(α, β)`.
pub fn reconstruct_bisection(
    g: &FiniteGroupoid,
    alpha: &ModuleMap,
    beta: &ModuleMap,
) -> Result<Bisection> {
    let fail = |unit: usize, reason: &str| Error::Reconstruction {
        unit,
        reason: reason.to_string(),
    };
    let sa = support_analysis(g, alpha);
    if let Some(&u) = sa.singleton_violations.first() {
        return Err(fail(u, "several arrows of the range fiber in the support of alpha"));
    }
    let from_alpha = sa.section(g, Side::Right);
    if let Some(u) = sa.b0.first() {
        return Err(fail(*u, "alpha vanishes on the range fiber"));
    }
    let pick: Vec<usize> = from_alpha.into_iter().map(Option::unwrap).collect();

    let sb = support_analysis(g, beta);
    if let Some(&v) = sb.singleton_violations.first() {
        return Err(fail(v, "several arrows of the source fiber in the support of beta"));
    }
    if let Some(&v) = sb.b0.first() {
        return Err(fail(v, "beta vanishes on the source fiber"));
    }
    let from_beta = sb.section(g, Side::Left);

    if !is_bisection(g, &pick) {
        let mut seen = vec![false; g.unit_count()];
        for &x in &pick {
            if seen[g.source(x)] {
                return Err(fail(g.source(x), "two arrows of alpha's section share this source"));
            }
            seen[g.source(x)] = true;
        }
    }
    for (v, y) in from_beta.iter().enumerate() {
        let y = y.expect("checked above");
        let x = pick.iter().copied().find(|&x| g.source(x) == v);
        if x != Some(y) {
            return Err(fail(v, "alpha and beta supports disagree"));
        }
    }
    if let Ok(j) = find_j(alpha, beta) {
        if let Some(u) = (0..g.unit_count()).find(|&u| j[u] != g.source(pick[u])) {
            return Err(fail(u, "unit bijection is not the source map of the section"));
        }
    }
    Bisection::new(g, pick)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    pub bisection: Bisection,
    pub mmm_passes: bool,
    pub reconstructed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub bisections: Vec<Bisection>,
    /// Arrows lying on no bisection.
    pub uncovered_arrows: Vec<usize>,
    pub round_trips: Vec<RoundTrip>,
    /// Distinct bisections give distinct `(α, β)`.
    pub injective: bool,
    /// Pairs `(a, b)` checked for `α^a ∘ (φ ↦ bφ) = α^{ab}`, `β_b ∘ (φ ↦ φa) = β_{ab}`
    /// and reconstruction of the composed pair as `ab`.
    pub composition_checks: usize,
    pub composition_failures: Vec<(usize, usize)>,
    /// Bisections where `α^a(a⁻¹φ) = φ|_{G⁰}` fails on the basis.
    pub covariance_failures: Vec<usize>,
}

impl DualityReport {
    pub fn passes(&self) -> bool {
        self.round_trips.iter().all(|r| r.mmm_passes && r.reconstructed)
            && self.injective
            && self.composition_failures.is_empty()
            && self.covariance_failures.is_empty()
    }
}

/// Largest `|Γ|` for which every pair is composition-checked; beyond it only
/// consecutive pairs are.
pub const EXHAUSTIVE_PAIRS_LIMIT: usize = 24;

pub fn duality_round_trip(g: &FiniteGroupoid) -> DualityReport {
    let bisections = enumerate_bisections(g);
    let uncovered_arrows = (0..g.arrow_count())
        .filter(|&x| bisection_through(g, x).is_none())
        .collect();
    let maps: Vec<(ModuleMap, ModuleMap)> = bisections
        .iter()
        .map(|a| (alpha_from_bisection(g, a), beta_from_bisection(g, a)))
        .collect();
    let round_trips = bisections
        .iter()
        .zip(&maps)
        .map(|(a, (al, be))| RoundTrip {
            bisection: a.clone(),
            mmm_passes: verify_mmm(g, al, be).passes(),
            reconstructed: reconstruct_bisection(g, al, be).ok().as_ref() == Some(a),
        })
        .collect();
    let mut injective = true;
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if maps[i] == maps[j] {
                injective = false;
            }
        }
    }

    let count = bisections.len();
    let pairs: Vec<(usize, usize)> = if count <= EXHAUSTIVE_PAIRS_LIMIT {
        (0..count).flat_map(|i| (0..count).map(move |j| (i, j))).collect()
    } else {
        (0..count).map(|i| (i, (i + 1) % count)).collect()
    };
    let mut composition_failures = Vec::new();
    for &(i, j) in &pairs {
        let (a, b) = (&bisections[i], &bisections[j]);
        let ab = a.product(g, b);
        let alpha = maps[i].0.precompose(g, |f| act_bisection(g, b, f, Side::Left));
        let beta = maps[j].1.precompose(g, |f| act_bisection(g, a, f, Side::Right));
        let ok = alpha == alpha_from_bisection(g, &ab)
            && beta == beta_from_bisection(g, &ab)
            && reconstruct_bisection(g, &alpha, &beta).ok() == Some(ab.clone());
        if !ok {
            composition_failures.push((i, j));
        }
    }

    let identity_alpha = alpha_from_bisection(g, &Bisection::identity(g));
    let covariance_failures = bisections
        .iter()
        .enumerate()
        .filter(|(k, a)| {
            let inv = a.inverse(g);
            maps[*k].0.precompose(g, |f| act_bisection(g, &inv, f, Side::Left)) != identity_alpha
        })
        .map(|(k, _)| k)
        .collect();

    DualityReport {
        bisections,
        uncovered_arrows,
        round_trips,
        injective,
        composition_checks: pairs.len(),
        composition_failures,
        covariance_failures,
    }
}

/// `‖α(φ)‖_∞` over the point-mass basis, used in reports.
pub fn max_entry(m: &ModuleMap) -> f64 {
    linalg::max_abs(&m.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::cyclic_table;
    use crate::sample::{random_function, rng};

    fn flip(g: &FiniteGroupoid) -> Bisection {
        enumerate_bisections(g)
            .into_iter()
            .find(|a| *a != Bisection::identity(g))
            .unwrap()
    }

    #[test]
    fn evaluation_maps() {
        let g = FiniteGroupoid::pair(2);
        let phi = random_function(4, &mut rng(21));
        let id = alpha_from_bisection(&g, &Bisection::identity(&g));
        assert_eq!(id.apply(&phi), phi.restrict_to_units(&g));
        let a = flip(&g);
        // α^a(φ)(1) = φ(1,2)
        assert_eq!(alpha_from_bisection(&g, &a).apply(&phi)[0], phi[1]);
        let report = verify_mmm(&g, &alpha_from_bisection(&g, &a), &beta_from_bisection(&g, &a));
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn all_pairs_on_pair_three() {
        let g = FiniteGroupoid::pair(3);
        for a in enumerate_bisections(&g) {
            let (al, be) = (alpha_from_bisection(&g, &a), beta_from_bisection(&g, &a));
            assert!(verify_mmm(&g, &al, &be).passes());
            assert_eq!(reconstruct_bisection(&g, &al, &be).unwrap(), a);
        }
    }

    #[test]
    fn broken_module_law() {
        let g = FiniteGroupoid::pair(2);
        let mut al = alpha_from_bisection(&g, &Bisection::identity(&g));
        // unit 0 reads arrow (2,1), whose range is unit 1
        al.matrix[(0, 2)] = C64::from(1.0);
        let be = beta_from_bisection(&g, &Bisection::identity(&g));
        let report = verify_mmm(&g, &al, &be);
        assert_eq!(report.alpha_module_law, Some((0, 2)));
        assert!(!report.passes());
    }

    #[test]
    fn mismatched_pairs_have_no_j() {
        let g = FiniteGroupoid::pair(2);
        let all = enumerate_bisections(&g);
        for a in &all {
            for b in &all {
                let report = verify_mmm(&g, &alpha_from_bisection(&g, a), &beta_from_bisection(&g, b));
                assert_eq!(report.j.is_ok(), a == b);
            }
        }
    }

    #[test]
    fn support_of_evaluations() {
        let g = FiniteGroupoid::pair(3);
        let a = enumerate_bisections(&g)[3].clone();
        let sa = support_analysis(&g, &alpha_from_bisection(&g, &a));
        assert_eq!(sa.a, {
            let mut p = a.picks().to_vec();
            p.sort();
            p
        });
        assert_eq!(sa.n.len(), 9 - 3);
        assert_eq!(sa.a0, vec![0, 1, 2]);
        assert!(sa.b0.is_empty());

        let zero = ModuleMap::new(CMatrix::zeros(3, 9), Side::Right);
        let sz = support_analysis(&g, &zero);
        assert!(sz.a.is_empty());
        assert_eq!(sz.b0, vec![0, 1, 2]);
    }

    #[test]
    fn r_section_that_is_not_a_bisection() {
        // (1,1) and (2,1): both sources are unit 1
        let g = FiniteGroupoid::pair(2);
        let al = ModuleMap::evaluation(&g, &[Some(0), Some(2)], Side::Right);
        assert!(multiplicative_witness(&al).is_none());
        let sa = support_analysis(&g, &al);
        assert_eq!(sa.a, vec![0, 2]);
        assert!(sa.singleton_violations.is_empty());

        let bundle = FiniteGroupoid::group_bundle(&[cyclic_table(2), cyclic_table(3)]).unwrap();
        let al = ModuleMap::evaluation(&bundle, &[Some(1), Some(4)], Side::Right);
        let sa = support_analysis(&bundle, &al);
        assert_eq!(sa.a, vec![1, 4]);
        assert!(sa.singleton_violations.is_empty());
    }

    #[test]
    fn corrupted_beta_reports_unit() {
        let g = FiniteGroupoid::pair(3);
        let a = enumerate_bisections(&g)[4].clone();
        let al = alpha_from_bisection(&g, &a);
        let mut be = beta_from_bisection(&g, &a);
        let v = 2;
        let y = a.with_source(&g, v);
        let other = g.source_fiber(v).iter().copied().find(|&z| z != y).unwrap();
        be.matrix[(v, y)] = C64::new(0.0, 0.0);
        be.matrix[(v, other)] = C64::from(1.0);
        assert_eq!(verify_mmm(&g, &al, &be).j, Err(JFailure::UnmatchedBeta(v)));
        match reconstruct_bisection(&g, &al, &be) {
            Err(Error::Reconstruction { unit, .. }) => assert_eq!(unit, v),
            other => panic!("expected a reconstruction error, got {other:?}"),
        }
    }

    #[test]
    fn roundtrip_reports() {
        let g = FiniteGroupoid::pair(3);
        let report = duality_round_trip(&g);
        assert_eq!(report.bisections.len(), 6);
        assert!(report.uncovered_arrows.is_empty());
        assert!(report.passes());
        assert_eq!(report.composition_checks, 36);

        let bundle = FiniteGroupoid::group_bundle(&[cyclic_table(2), cyclic_table(3)]).unwrap();
        let report = duality_round_trip(&bundle);
        assert_eq!(report.bisections.len(), 6);
        assert!(report.passes());
    }
}
