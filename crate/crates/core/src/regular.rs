//! The Hilbert module `E²`, convolution operators and the operator algebras
//! they generate.
//!
//! A section of `E²` is stored as an [`ArrowFunction`]; its restriction to a
//! range fiber `G^u` lives in `L²(G^u, λ^u)`. Operators are dense matrices on
//! arrow-indexed coordinate vectors.

use crate::algebra::{ArrowFunction, Side, UnitFunction};
use crate::duality::ModuleMap;
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, CMatrix, CVector};
use crate::C64;

/// `⟨ξ, η⟩(u) = Σ_{x ∈ G^u} w(x) conj ξ(x) η(x)`.
pub fn d_inner(g: &FiniteGroupoid, xi: &ArrowFunction, eta: &ArrowFunction) -> UnitFunction {
    assert_eq!(xi.len(), g.arrow_count());
    assert_eq!(eta.len(), g.arrow_count());
    UnitFunction::new(
        (0..g.unit_count())
            .map(|u| {
                g.range_fiber(u)
                    .iter()
                    .map(|&x| xi[x].conj() * eta[x] * g.weight(x))
                    .sum()
            })
            .collect(),
    )
}

/// `‖ξ‖ = max_u ‖ξ|_{G^u}‖₂`.
pub fn module_norm(g: &FiniteGroupoid, xi: &ArrowFunction) -> f64 {
    d_inner(g, xi, xi)
        .values()
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.re.max(0.0).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct E2Operator {
    pub matrix: CMatrix,
}

impl E2Operator {
    pub fn new(matrix: CMatrix) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operators are square");
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(CMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, xi: &ArrowFunction) -> ArrowFunction {
        let v = CVector::from_column_slice(xi.values());
        ArrowFunction::new((&self.matrix * v).iter().copied().collect())
    }

    pub fn compose(&self, other: &E2Operator) -> E2Operator {
        E2Operator::new(&self.matrix * &other.matrix)
    }

    /// `‖TA − AT‖_max`.
    pub fn commutator_defect(&self, other: &E2Operator) -> f64 {
        linalg::max_abs(&(&self.matrix * &other.matrix - &other.matrix * &self.matrix))
    }
}

/// `R_F ξ = ξ * F`; entry `[x][t] = w(t) F(t⁻¹x)` for `r(t) = r(x)`.
pub fn right_op(g: &FiniteGroupoid, f: &ArrowFunction) -> E2Operator {
    let n = g.arrow_count();
    let mut m = CMatrix::zeros(n, n);
    for x in 0..n {
        for &t in g.range_fiber(g.range(x)) {
            if let Some(y) = g.compose(g.inverse(t), x) {
                m[(x, t)] += f[y] * g.weight(t);
            }
        }
    }
    E2Operator::new(m)
}

/// `L_F ξ = F * ξ`; entry `[x][y] = w(r(y)) F(xy⁻¹)` for `s(y) = s(x)`.
pub fn left_op(g: &FiniteGroupoid, f: &ArrowFunction) -> E2Operator {
    let n = g.arrow_count();
    let mut m = CMatrix::zeros(n, n);
    for x in 0..n {
        for &y in g.source_fiber(g.source(x)) {
            if let Some(t) = g.compose(x, g.inverse(y)) {
                m[(x, y)] += f[t] * g.weight(g.unit_arrow(g.range(y)));
            }
        }
    }
    E2Operator::new(m)
}

/// The block of `T` on `G^u`, conjugated into the standard inner product:
/// `W^{1/2} T_u W^{-1/2}`.
fn unit_block(g: &FiniteGroupoid, t: &E2Operator, u: usize) -> CMatrix {
    let fiber = g.range_fiber(u);
    CMatrix::from_fn(fiber.len(), fiber.len(), |i, j| {
        let (x, y) = (fiber[i], fiber[j]);
        t.matrix[(x, y)] * (g.weight(x) / g.weight(y)).sqrt()
    })
}

/// True when `T` maps each range fiber into itself (entries across fibers
/// below `1e-12` relative to the largest entry).
pub fn is_adjointable(g: &FiniteGroupoid, t: &E2Operator) -> bool {
    first_cross_fiber_entry(g, t).is_none()
}

fn first_cross_fiber_entry(g: &FiniteGroupoid, t: &E2Operator) -> Option<(usize, usize)> {
    let tol = 1e-12 * linalg::max_abs(&t.matrix).max(1.0);
    let n = g.arrow_count();
    for x in 0..n {
        for y in 0..n {
            if g.range(x) != g.range(y) && t.matrix[(x, y)].norm() > tol {
                return Some((x, y));
            }
        }
    }
    None
}

/// Module adjoint `W⁻¹ Tᴴ W`, defined only for adjointable operators.
pub fn adjoint(g: &FiniteGroupoid, t: &E2Operator) -> Result<E2Operator> {
    if let Some((row, col)) = first_cross_fiber_entry(g, t) {
        return Err(Error::NotAdjointable { row, col });
    }
    let n = g.arrow_count();
    let m = CMatrix::from_fn(n, n, |x, y| {
        t.matrix[(y, x)].conj() * (g.weight(y) / g.weight(x))
    });
    Ok(E2Operator::new(m))
}

/// Exact operator norm of an adjointable operator: the largest singular value
/// over its fiber blocks.
pub fn adjointable_norm(g: &FiniteGroupoid, t: &E2Operator) -> Result<f64> {
    if let Some((row, col)) = first_cross_fiber_entry(g, t) {
        return Err(Error::NotAdjointable { row, col });
    }
    Ok((0..g.unit_count())
        .map(|u| linalg::spectral_norm(&unit_block(g, t, u)))
        .fold(0.0, f64::max))
}

/// `‖F‖_red`, the norm of `R_F` on `E²`.
pub fn reduced_norm(g: &FiniteGroupoid, f: &ArrowFunction) -> f64 {
    adjointable_norm(g, &right_op(g, f)).expect("right convolutions preserve range fibers")
}

/// `π_u(F)` on `L²(G_u, λ_u)`: entry `[x][y] = w(r(y)) F(xy⁻¹)` for `x, y ∈ G_u`,
/// returned in the standard inner product, so its spectral norm is `‖π_u(F)‖`.
pub fn regular_representation(g: &FiniteGroupoid, f: &ArrowFunction, u: usize) -> CMatrix {
    let fiber = g.source_fiber(u);
    let mass = |y: usize| g.weight(g.unit_arrow(g.range(y)));
    CMatrix::from_fn(fiber.len(), fiber.len(), |i, j| {
        let (x, y) = (fiber[i], fiber[j]);
        let t = g.compose(x, g.inverse(y)).expect("s(x) = s(y)");
        f[t] * mass(y) * (mass(x) / mass(y)).sqrt()
    })
}

/// A subspace of operators, stored as orthonormal columns of vectorized
/// `N × N` matrices.
#[derive(Debug, Clone)]
pub struct OperatorSpace {
    n: usize,
    basis: CMatrix,
}

impl OperatorSpace {
    pub fn full(n: usize) -> Self {
        Self {
            n,
            basis: CMatrix::identity(n * n, n * n),
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub fn operator_dim(&self) -> usize {
        self.n
    }

    pub fn basis_columns(&self) -> &CMatrix {
        &self.basis
    }

    pub fn element(&self, k: usize) -> E2Operator {
        let col: Vec<C64> = self.basis.column(k).iter().copied().collect();
        E2Operator::new(linalg::unvectorize(&col, self.n))
    }

    pub fn elements(&self) -> Vec<E2Operator> {
        (0..self.dimension()).map(|k| self.element(k)).collect()
    }

    /// Distance from `T` to the subspace, relative to `‖T‖_F`.
    pub fn relative_distance(&self, t: &E2Operator) -> f64 {
        let v = linalg::vectorize(&t.matrix);
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let proj = &self.basis * (self.basis.adjoint() * &v);
        (v - proj).norm() / norm
    }

    pub fn contains(&self, t: &E2Operator) -> bool {
        self.relative_distance(t) <= 1e-9
    }
}

/// Orthonormal basis of the linear span of the given operators.
pub fn span_basis(n: usize, generators: &[E2Operator]) -> OperatorSpace {
    let mut m = CMatrix::zeros(n * n, generators.len());
    for (k, t) in generators.iter().enumerate() {
        assert_eq!(t.dim(), n);
        m.set_column(k, &linalg::vectorize(&t.matrix));
    }
    OperatorSpace {
        n,
        basis: linalg::column_basis(&m),
    }
}

/// Basis of `{T : TA = AT for every generator A}`.
pub fn commutant(n: usize, generators: &[E2Operator]) -> OperatorSpace {
    let mut basis = CMatrix::identity(n * n, n * n);
    for a in generators {
        if basis.ncols() == 0 {
            break;
        }
        let mut m = CMatrix::zeros(n * n, basis.ncols());
        for k in 0..basis.ncols() {
            let col: Vec<C64> = basis.column(k).iter().copied().collect();
            let t = linalg::unvectorize(&col, n);
            let c = &t * &a.matrix - &a.matrix * &t;
            m.set_column(k, &linalg::vectorize(&c));
        }
        // basis columns have unit norm, so commutators are at most 2‖A‖
        let ns = linalg::null_space_scaled(&m, 2.0 * a.matrix.norm());
        basis = &basis * ns;
    }
    OperatorSpace {
        n,
        basis: linalg::column_basis(&basis),
    }
}

/// Basis of `A ∩ B`.
pub fn intersect_spans(a: &OperatorSpace, b: &OperatorSpace) -> OperatorSpace {
    assert_eq!(a.n, b.n);
    let (ka, kb) = (a.dimension(), b.dimension());
    if ka == 0 || kb == 0 {
        return OperatorSpace {
            n: a.n,
            basis: CMatrix::zeros(a.n * a.n, 0),
        };
    }
    let mut stacked = CMatrix::zeros(a.n * a.n, ka + kb);
    stacked.view_mut((0, 0), (a.n * a.n, ka)).copy_from(&a.basis);
    stacked
        .view_mut((0, ka), (a.n * a.n, kb))
        .copy_from(&(-&b.basis));
    let ns = linalg::null_space_scaled(&stacked, 1.0);
    let coeffs = ns.rows(0, ka).into_owned();
    OperatorSpace {
        n: a.n,
        basis: linalg::column_basis(&(&a.basis * coeffs)),
    }
}

fn point_masses(g: &FiniteGroupoid) -> Vec<ArrowFunction> {
    (0..g.arrow_count())
        .map(|x| ArrowFunction::delta(g.arrow_count(), x))
        .collect()
}

pub fn right_ops_basis(g: &FiniteGroupoid) -> Vec<E2Operator> {
    point_masses(g).iter().map(|d| right_op(g, d)).collect()
}

pub fn left_ops_basis(g: &FiniteGroupoid) -> Vec<E2Operator> {
    point_masses(g).iter().map(|d| left_op(g, d)).collect()
}

/// Matrix units `E_{xy}`.
pub fn matrix_units(n: usize) -> impl Iterator<Item = (usize, usize, E2Operator)> {
    (0..n).flat_map(move |x| {
        (0..n).map(move |y| {
            let mut m = CMatrix::zeros(n, n);
            m[(x, y)] = C64::from(1.0);
            (x, y, E2Operator::new(m))
        })
    })
}

/// `𝔅(E²)`: all operators.
pub fn bounded_space(g: &FiniteGroupoid) -> OperatorSpace {
    let n = g.arrow_count();
    let units: Vec<_> = matrix_units(n).map(|(_, _, t)| t).collect();
    span_basis(n, &units)
}

/// `𝔏(E²)`: the span of the matrix units that pass [`is_adjointable`].
pub fn adjointable_space(g: &FiniteGroupoid) -> OperatorSpace {
    let n = g.arrow_count();
    let units: Vec<_> = matrix_units(n)
        .map(|(_, _, t)| t)
        .filter(|t| is_adjointable(g, t))
        .collect();
    span_basis(n, &units)
}

/// `C*_red(G)` realized as the span of the right convolution operators.
pub fn reduced_algebra(g: &FiniteGroupoid) -> OperatorSpace {
    span_basis(g.arrow_count(), &right_ops_basis(g))
}

/// `VN(G)`, the commutant of the right convolution operators.
pub fn von_neumann_algebra(g: &FiniteGroupoid) -> OperatorSpace {
    commutant(g.arrow_count(), &right_ops_basis(g))
}

pub fn left_algebra(g: &FiniteGroupoid) -> OperatorSpace {
    span_basis(g.arrow_count(), &left_ops_basis(g))
}

/// Largest commutator with a right convolution by a point mass, relative to `‖T‖_max`.
pub fn vn_defect(g: &FiniteGroupoid, t: &E2Operator) -> f64 {
    let scale = linalg::max_abs(&t.matrix).max(1.0);
    right_ops_basis(g)
        .iter()
        .map(|r| t.commutator_defect(r) / scale)
        .fold(0.0, f64::max)
}

/// The right module map `α_T(φ) = conj(T(φ*))|_{G⁰}` of an element of `VN(G)`.
/// Its matrix has entries `A[u][z] = conj T[e_u][z⁻¹]`.
pub fn alpha_from_t(g: &FiniteGroupoid, t: &E2Operator) -> Result<ModuleMap> {
    let defect = vn_defect(g, t);
    if defect > 1e-9 {
        return Err(Error::NotInVonNeumann { defect });
    }
    let m = CMatrix::from_fn(g.unit_count(), g.arrow_count(), |u, z| {
        t.matrix[(g.unit_arrow(u), g.inverse(z))].conj()
    });
    Ok(ModuleMap::new(m, Side::Right))
}

/// Recovers the multiplier `k` from a map `R` that does not enlarge supports,
/// so that `Rf = kf`.
pub fn extract_multiplier(r: &CMatrix) -> Result<UnitFunction> {
    if r.nrows() != r.ncols() {
        return Err(Error::NotSquare {
            rows: r.nrows(),
            cols: r.ncols(),
        });
    }
    let tol = 1e-12 * linalg::max_abs(r).max(1.0);
    for x in 0..r.ncols() {
        for y in 0..r.nrows() {
            if y != x && r[(y, x)].norm() > tol {
                return Err(Error::SupportViolation { point: x });
            }
        }
    }
    Ok(UnitFunction::new((0..r.nrows()).map(|x| r[(x, x)]).collect()))
}

/// Lower bound on the operator norm of `T` on `E²` by random probing.
pub fn probe_norm_lower<R: rand::Rng>(
    g: &FiniteGroupoid,
    t: &E2Operator,
    probes: usize,
    rng: &mut R,
) -> f64 {
    let mut best = 0.0_f64;
    for _ in 0..probes {
        let xi = crate::sample::random_function(g.arrow_count(), rng);
        let norm = module_norm(g, &xi);
        if norm > 0.0 {
            best = best.max(module_norm(g, &t.apply(&xi)) / norm);
        }
    }
    best
}
