//! Positive definite functions, their GNS bundles, and coefficients.
//!
//! Coefficient convention: `(f, g) = g * f*`, conjugate-linear in `f`.

use rand::Rng;

use crate::algebra::{convolve, star, ArrowFunction};
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, CMatrix, CVector};
use crate::regular::right_op;
use crate::sample::random_complex;
use crate::C64;

pub const DEFAULT_PD_TOL: f64 = 1e-9;

/// `M_u[i][j] = φ(x_i⁻¹ x_j)` over `x_i, x_j ∈ G^u`.
pub fn gram_matrix(g: &FiniteGroupoid, phi: &ArrowFunction, u: usize) -> CMatrix {
    let fiber = g.range_fiber(u);
    CMatrix::from_fn(fiber.len(), fiber.len(), |i, j| {
        let z = g
            .compose(g.inverse(fiber[i]), fiber[j])
            .expect("arrows with a common range compose after inverting the first");
        phi[z]
    })
}

/// `Σ_{i,j} α_i conj(α_j) φ(x_i⁻¹ x_j)` over the range fiber `G^u`.
pub fn quadratic_form(g: &FiniteGroupoid, phi: &ArrowFunction, u: usize, alpha: &[C64]) -> C64 {
    let fiber = g.range_fiber(u);
    assert_eq!(alpha.len(), fiber.len());
    let mut acc = C64::new(0.0, 0.0);
    for (i, &xi) in fiber.iter().enumerate() {
        for (j, &xj) in fiber.iter().enumerate() {
            let z = g.compose(g.inverse(xi), xj).expect("common range");
            acc += alpha[i] * alpha[j].conj() * phi[z];
        }
    }
    acc
}

/// `∬ φ(y⁻¹x) f(y) conj f(x) dλ^u(x) dλ^u(y)` for `f` given on `G^u`.
pub fn integral_form(g: &FiniteGroupoid, phi: &ArrowFunction, u: usize, f: &[C64]) -> C64 {
    let fiber = g.range_fiber(u);
    assert_eq!(f.len(), fiber.len());
    let mut acc = C64::new(0.0, 0.0);
    for (i, &x) in fiber.iter().enumerate() {
        for (j, &y) in fiber.iter().enumerate() {
            let z = g.compose(g.inverse(y), x).expect("common range");
            acc += phi[z] * f[j] * f[i].conj() * (g.weight(x) * g.weight(y));
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessKind {
    /// The Gram matrix has this negative eigenvalue.
    NegativeEigenvalue(f64),
    /// The Gram matrix is not Hermitian, so some form value is not real.
    NonHermitian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdWitness {
    pub unit: usize,
    /// Coefficients `α` over `G^u` (in fiber order).
    pub alpha: Vec<C64>,
    /// `Σ α_i conj(α_j) φ(x_i⁻¹x_j)`; negative or non-real.
    pub form: C64,
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdVerdict {
    pub positive: bool,
    pub witness: Option<PdWitness>,
}

/// Gram-matrix test: every `M_u` Hermitian with smallest eigenvalue at least
/// `-tol · max|λ|`.
pub fn is_positive_definite(g: &FiniteGroupoid, phi: &ArrowFunction, tol: f64) -> PdVerdict {
    for u in 0..g.unit_count() {
        let m = gram_matrix(g, phi, u);
        let skew = linalg::max_abs(&(&m - m.adjoint()));
        if skew > tol * linalg::max_abs(&m) {
            let alpha = non_real_form_vector(&m);
            let form = quadratic_form(g, phi, u, &alpha);
            return PdVerdict {
                positive: false,
                witness: Some(PdWitness {
                    unit: u,
                    alpha,
                    form,
                    kind: WitnessKind::NonHermitian,
                }),
            };
        }
        let eig = linalg::hermitian_eigen(&m).expect("square");
        let min = eig.min_value();
        if min < -tol * eig.max_abs_value() {
            let v = eig.vectors.column(m.nrows() - 1);
            // the form puts the conjugate on the second slot
            let alpha: Vec<C64> = v.iter().map(|z| z.conj()).collect();
            let form = quadratic_form(g, phi, u, &alpha);
            return PdVerdict {
                positive: false,
                witness: Some(PdWitness {
                    unit: u,
                    alpha,
                    form,
                    kind: WitnessKind::NegativeEigenvalue(min),
                }),
            };
        }
    }
    PdVerdict {
        positive: true,
        witness: None,
    }
}

/// For a non-Hermitian `M`, a vector `α` whose form `Σ α_i conj(α_j) M_ij` is not real.
fn non_real_form_vector(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    let form = |a: &[C64]| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += a[i] * a[j].conj() * m[(i, j)];
            }
        }
        acc
    };
    let mut best = vec![C64::new(0.0, 0.0); n];
    let mut best_im = -1.0;
    for i in 0..n {
        for j in i..n {
            for z in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut a = vec![C64::new(0.0, 0.0); n];
                a[i] = C64::from(1.0);
                if j != i {
                    a[j] += z;
                }
                let im = form(&a).im.abs();
                if im > best_im {
                    best_im = im;
                    best = a;
                }
            }
        }
    }
    best
}

/// Decides whether a Hermitian form matrix is positive semidefinite by
/// Cholesky factorization with diagonal pivoting.
fn psd_by_pivoted_cholesky(b: &CMatrix, tol: f64) -> bool {
    let n = b.nrows();
    let scale = linalg::max_abs(b) * n as f64;
    if scale == 0.0 {
        return true;
    }
    if linalg::max_abs(&(b - b.adjoint())) > tol * scale {
        return false;
    }
    let mut s = linalg::hermitian_part(b);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (k, p) = active
            .iter()
            .enumerate()
            .max_by(|(_, &a), (_, &c)| s[(a, a)].re.total_cmp(&s[(c, c)].re))
            .map(|(k, &p)| (k, p))
            .unwrap();
        let d = s[(p, p)].re;
        if d < -tol * scale {
            return false;
        }
        if d <= tol * scale {
            // all remaining pivots are negligible: PSD iff the rest vanishes
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| s[(i, j)].norm() <= tol * scale));
        }
        active.swap_remove(k);
        for &i in &active {
            for &j in &active {
                let update = s[(i, p)] * s[(p, j)] / d;
                s[(i, j)] -= update;
            }
        }
    }
    true
}

/// Recovers the matrix of a sesquilinear form, conjugate-linear in the first
/// slot, from its quadratic form by polarization.
fn polarize(n: usize, q: impl Fn(&[C64]) -> C64) -> CMatrix {
    let units = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    CMatrix::from_fn(n, n, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for &ik in &units {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[a] += C64::from(1.0);
            v[b] += ik;
            acc += ik.conj() * q(&v);
        }
        acc * 0.25
    })
}

fn probes_nonnegative<R: Rng>(
    n: usize,
    q: impl Fn(&[C64]) -> C64,
    scale: f64,
    tol: f64,
    probes: usize,
    rng: &mut R,
) -> bool {
    (0..probes).all(|_| {
        let v: Vec<C64> = (0..n).map(|_| random_complex(rng)).collect();
        let z = q(&v);
        let size = scale * v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        z.re >= -tol * size && z.im.abs() <= tol * size.max(f64::MIN_POSITIVE)
    })
}

/// Verdict of the quadratic-form criterion: the form `α ↦ Σ α_i conj(α_j)
/// φ(x_i⁻¹x_j)` is evaluated directly, polarized into a matrix, and factored;
/// `probes` random vectors per unit must also give nonnegative values.
pub fn pd_by_quadratic_form<R: Rng>(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    tol: f64,
    probes: usize,
    rng: &mut R,
) -> bool {
    (0..g.unit_count()).all(|u| {
        let n = g.range_fiber(u).len();
        // Σ α_i conj(α_j) φ(..) is linear in α, so polarize in conj(α).
        let q = |c: &[C64]| {
            let alpha: Vec<C64> = c.iter().map(|z| z.conj()).collect();
            quadratic_form(g, phi, u, &alpha)
        };
        let b = polarize(n, q);
        let scale = linalg::max_abs(&b) * n as f64;
        psd_by_pivoted_cholesky(&b, tol) && probes_nonnegative(n, q, scale, tol, probes, rng)
    })
}

/// Verdict of the integral criterion with respect to the Haar system, decided
/// the same way as [`pd_by_quadratic_form`].
pub fn pd_by_integral<R: Rng>(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    tol: f64,
    probes: usize,
    rng: &mut R,
) -> bool {
    (0..g.unit_count()).all(|u| {
        let n = g.range_fiber(u).len();
        let q = |f: &[C64]| integral_form(g, phi, u, f);
        let b = polarize(n, q);
        let scale = linalg::max_abs(&b) * n as f64;
        psd_by_pivoted_cholesky(&b, tol) && probes_nonnegative(n, q, scale, tol, probes, rng)
    })
}

/// A field of finite-dimensional Hilbert spaces over the units with a
/// multiplicative family of isometries indexed by arrows.
#[derive(Debug, Clone)]
pub struct GHilbertBundle {
    pub dims: Vec<usize>,
    /// `L_x : H_{s(x)} → H_{r(x)}`.
    pub maps: Vec<CMatrix>,
}

/// One vector per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleSection {
    pub vectors: Vec<CVector>,
}

impl BundleSection {
    pub fn norm(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleDefects {
    /// `max ‖L_x^H L_x − I‖`.
    pub isometry: f64,
    /// `max ‖L_{xy} − L_x L_y‖`.
    pub multiplicativity: f64,
    /// `max ‖L_{x⁻¹} − L_x^H‖`.
    pub inverse: f64,
    /// `max ‖L_u − I‖` over unit arrows.
    pub units: f64,
}

impl BundleDefects {
    pub fn max(&self) -> f64 {
        self.isometry
            .max(self.multiplicativity)
            .max(self.inverse)
            .max(self.units)
    }
}

impl GHilbertBundle {
    /// The trivial bundle: every fiber is `ℂ` and every `L_x = 1`.
    pub fn trivial(g: &FiniteGroupoid) -> Self {
        Self {
            dims: vec![1; g.unit_count()],
            maps: vec![CMatrix::identity(1, 1); g.arrow_count()],
        }
    }

    pub fn defects(&self, g: &FiniteGroupoid) -> BundleDefects {
        let n = g.arrow_count();
        let mut d = BundleDefects {
            isometry: 0.0,
            multiplicativity: 0.0,
            inverse: 0.0,
            units: 0.0,
        };
        for x in 0..n {
            let l = &self.maps[x];
            let ds = self.dims[g.source(x)];
            let gram = l.adjoint() * l;
            d.isometry = d.isometry.max(linalg::max_abs(&(gram - CMatrix::identity(ds, ds))));
            d.inverse = d.inverse.max(linalg::max_abs(&(&self.maps[g.inverse(x)] - l.adjoint())));
            if g.is_unit(x) {
                d.units = d.units.max(linalg::max_abs(&(l - CMatrix::identity(ds, ds))));
            }
            for y in 0..n {
                if let Some(xy) = g.compose(x, y) {
                    let prod = l * &self.maps[y];
                    d.multiplicativity = d
                        .multiplicativity
                        .max(linalg::max_abs(&(&self.maps[xy] - prod)));
                }
            }
        }
        d
    }
}

/// `(ξ, η)(x) = ⟨L_x ξ(s(x)), η(r(x))⟩`.
pub fn coefficient(
    g: &FiniteGroupoid,
    bundle: &GHilbertBundle,
    xi: &BundleSection,
    eta: &BundleSection,
) -> Result<ArrowFunction> {
    for s in [xi, eta] {
        if s.vectors.len() != g.unit_count() {
            return Err(Error::DimensionMismatch {
                expected: g.unit_count(),
                found: s.vectors.len(),
            });
        }
        for (u, v) in s.vectors.iter().enumerate() {
            if v.len() != bundle.dims[u] {
                return Err(Error::DimensionMismatch {
                    expected: bundle.dims[u],
                    found: v.len(),
                });
            }
        }
    }
    Ok(ArrowFunction::new(
        (0..g.arrow_count())
            .map(|x| {
                let lx = &bundle.maps[x] * &xi.vectors[g.source(x)];
                lx.dotc(&eta.vectors[g.range(x)])
            })
            .collect(),
    ))
}

/// The GNS bundle of a positive definite `φ` and the section `ξ` with
/// `(ξ, ξ) = φ`.
pub fn gns_bundle(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    tol: f64,
) -> Result<(GHilbertBundle, BundleSection)> {
    let verdict = is_positive_definite(g, phi, tol);
    if let Some(w) = verdict.witness {
        return Err(Error::NotPositiveDefinite {
            unit: w.unit,
            witness: w.alpha,
            form: w.form,
        });
    }
    struct Fiber {
        /// `C_u`, with `K_u = C_uᴴ C_u`.
        factor: CMatrix,
        /// `V_u Λ_u^{-1/2}`, a right inverse of `C_u`.
        lift: CMatrix,
    }
    let fibers: Vec<Fiber> = (0..g.unit_count())
        .map(|u| {
            let fiber = g.range_fiber(u);
            // (f | h)_u = Σ w_a w_b φ(b⁻¹a) conj f(a) h(b)
            let k = CMatrix::from_fn(fiber.len(), fiber.len(), |i, j| {
                let (a, b) = (fiber[i], fiber[j]);
                phi[g.compose(g.inverse(b), a).expect("common range")] * (g.weight(a) * g.weight(b))
            });
            let eig = linalg::hermitian_eigen(&k).expect("square");
            let cutoff = tol * eig.max_abs_value();
            let keep: Vec<usize> = (0..eig.values.len())
                .filter(|&i| eig.values[i] > cutoff && eig.values[i] > 0.0)
                .collect();
            let factor = CMatrix::from_fn(keep.len(), fiber.len(), |r, c| {
                eig.vectors[(c, keep[r])].conj() * eig.values[keep[r]].sqrt()
            });
            let lift = CMatrix::from_fn(fiber.len(), keep.len(), |r, c| {
                eig.vectors[(r, keep[c])] / eig.values[keep[c]].sqrt()
            });
            Fiber { factor, lift }
        })
        .collect();
    let dims: Vec<usize> = fibers.iter().map(|f| f.factor.nrows()).collect();
    let position = |u: usize, a: usize| {
        g.range_fiber(u)
            .iter()
            .position(|&b| b == a)
            .expect("arrow in fiber")
    };
    let maps = (0..g.arrow_count())
        .map(|x| {
            let (r, s) = (g.range(x), g.source(x));
            // left translation δ_a ↦ δ_{xa} from G^s to G^r
            let src = g.range_fiber(s);
            let mut p = CMatrix::zeros(g.range_fiber(r).len(), src.len());
            for (j, &a) in src.iter().enumerate() {
                let xa = g.compose(x, a).expect("s(x) = r(a)");
                p[(position(r, xa), j)] = C64::from(1.0);
            }
            &fibers[r].factor * p * &fibers[s].lift
        })
        .collect();
    let xi = BundleSection {
        vectors: (0..g.unit_count())
            .map(|u| {
                let e = position(u, g.unit_arrow(u));
                fibers[u].factor.column(e).into_owned() / C64::from(g.unit_weight(u))
            })
            .collect(),
    };
    Ok((GHilbertBundle { dims, maps }, xi))
}

/// `(f, h)(x) = Σ_{t ∈ G^{r(x)}} w(t) conj f(x⁻¹t) h(t)`, which equals `h * f*`.
pub fn coefficient_regular(g: &FiniteGroupoid, f: &ArrowFunction, h: &ArrowFunction) -> ArrowFunction {
    assert_eq!(f.len(), g.arrow_count());
    assert_eq!(h.len(), g.arrow_count());
    ArrowFunction::new(
        (0..g.arrow_count())
            .map(|x| {
                g.range_fiber(g.range(x))
                    .iter()
                    .map(|&t| {
                        let y = g.compose(g.inverse(x), t).expect("r(t) = r(x)");
                        f[y].conj() * h[t] * g.weight(t)
                    })
                    .sum()
            })
            .collect(),
    )
}

/// A section `ξ` of `E²` with `(ξ, ξ) = φ`, built as `ξ = T^{1/2} h` with
/// `T = R_φ` and `h` the indicator of the units met by the support of `φ`.
/// Needs counting measure.
pub fn pd_to_coefficient(g: &FiniteGroupoid, phi: &ArrowFunction, tol: f64) -> Result<ArrowFunction> {
    if !g.has_unit_weights() {
        return Err(Error::Unsupported(
            "square-root coefficients need the counting Haar system".into(),
        ));
    }
    if let Some(w) = is_positive_definite(g, phi, tol).witness {
        return Err(Error::NotPositiveDefinite {
            unit: w.unit,
            witness: w.alpha,
            form: w.form,
        });
    }
    let n = g.arrow_count();
    let mut h = ArrowFunction::zeros(n);
    for x in 0..n {
        if phi[x] != C64::new(0.0, 0.0) {
            h[g.unit_arrow(g.range(x))] = C64::from(1.0);
            h[g.unit_arrow(g.source(x))] = C64::from(1.0);
        }
    }
    let t = right_op(g, phi);
    let mut xi = ArrowFunction::zeros(n);
    for u in 0..g.unit_count() {
        let fiber = g.range_fiber(u);
        let block = CMatrix::from_fn(fiber.len(), fiber.len(), |i, j| t.matrix[(fiber[i], fiber[j])]);
        let root = linalg::hermitian_sqrt(&block).map_err(|_| Error::NotPositiveDefinite {
            unit: u,
            witness: Vec::new(),
            form: C64::new(linalg::min_eigenvalue(&block), 0.0),
        })?;
        let hv = CVector::from_iterator(fiber.len(), fiber.iter().map(|&x| h[x]));
        let v = root * hv;
        for (i, &x) in fiber.iter().enumerate() {
            xi[x] = v[i];
        }
    }
    Ok(xi)
}

/// The function on `G × I₂` with blocks `[[ρ, φ], [φ*, τ]]`; arrow `(x, i, j)`
/// has index `4x + 2i + j`.
pub fn off_diagonal_embed(
    g: &FiniteGroupoid,
    rho: &ArrowFunction,
    phi: &ArrowFunction,
    tau: &ArrowFunction,
) -> ArrowFunction {
    let ps = star(g, phi);
    let n = g.arrow_count();
    let mut out = ArrowFunction::zeros(4 * n);
    for x in 0..n {
        out[4 * x] = rho[x];
        out[4 * x + 1] = phi[x];
        out[4 * x + 2] = ps[x];
        out[4 * x + 3] = tau[x];
    }
    out
}

/// The `(i, j)` block of a function on `G × I₂`.
pub fn off_diagonal_block(f: &ArrowFunction, i: usize, j: usize) -> ArrowFunction {
    ArrowFunction::new((0..f.len() / 4).map(|x| f[4 * x + 2 * i + j]).collect())
}

/// `φ = (ζ₂₁, ζ₁₁) + (ζ₂₂, ζ₁₂)` for `(ζ, ζ) = F` on `G × I₂` with `F` of the
/// embedded form; returns the two factor pairs `(f_k, h_k)` with `φ = Σ (f_k, h_k)`.
pub fn split_off_diagonal(zeta: &ArrowFunction) -> [(ArrowFunction, ArrowFunction); 2] {
    let block = |i, j| off_diagonal_block(zeta, i, j);
    [(block(1, 0), block(0, 0)), (block(1, 1), block(0, 1))]
}

/// Sum of regular coefficients.
pub fn coefficient_sum(g: &FiniteGroupoid, pairs: &[(ArrowFunction, ArrowFunction)]) -> ArrowFunction {
    let mut acc = ArrowFunction::zeros(g.arrow_count());
    for (f, h) in pairs {
        acc = &acc + &coefficient_regular(g, f, h);
    }
    acc
}

/// `h * f*`, the coefficient computed through the algebra.
pub fn coefficient_via_convolution(g: &FiniteGroupoid, f: &ArrowFunction, h: &ArrowFunction) -> ArrowFunction {
    convolve(g, h, &star(g, f))
}
