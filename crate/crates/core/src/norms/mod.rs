//! Norms on the Fourier–Stieltjes and Fourier algebras.
//!
//! `bg_norm` is the factorization norm computed as a completion problem on
//! `G × I₂`, `schur_cb_norm` its pair-groupoid specialization, and
//! `ag_norm_bounds` brackets the norm `‖·‖₁` between `max(‖φ‖∞, bg_norm)` and
//! the cost of explicit coefficient decompositions.

pub mod brute;
pub mod sdp;

pub use brute::brute_force_factorization_norm;
pub use sdp::{
    solve_diag_bound_sdp, solve_diag_bound_sdp_with, DiagBoundSdp, Entry, SdpMethod, SdpOptions,
};

pub use crate::linalg::{hermitian_eigen, hermitian_sqrt, HermitianEigen};

use serde::Serialize;

use crate::algebra::{approximate_identity, star, ArrowFunction};
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::linalg::{self, CMatrix, CVector};
use crate::positivity::{
    coefficient_regular, off_diagonal_embed, pd_to_coefficient, split_off_diagonal, DEFAULT_PD_TOL,
};
use crate::regular::{module_norm, right_op};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateKind {
    Upper,
    Lower,
    Optimal,
}

/// `φ = Σ (f_k, h_k)` with cost `Σ ‖f_k‖ ‖h_k‖`.
pub type Factorization = Vec<(ArrowFunction, ArrowFunction)>;

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    None,
    /// A feasible point of a [`DiagBoundSdp`] and a lower bound on its optimum.
    SdpPoint { values: Vec<C64>, lower_bound: f64 },
    /// Diagonal blocks of a positive definite function on `G × I₂`.
    Completion { rho: ArrowFunction, tau: ArrowFunction },
    /// `A_ij = ⟨f_j, g_i⟩` together with the PSD completion `[[P, A], [Aᴴ, Q]]`.
    SchurFactors {
        f: Vec<CVector>,
        g: Vec<CVector>,
        p: CMatrix,
        q: CMatrix,
    },
    Factorization(Factorization),
    /// The arrow where `|φ|` is largest.
    Sup { arrow: usize },
    Bound(Box<NormCertificate>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormCertificate {
    pub value: f64,
    pub kind: CertificateKind,
    pub witness: Witness,
}

/// Relative tolerance used when re-evaluating witnesses.
pub const WITNESS_TOL: f64 = 1e-8;

fn sup_arrow(phi: &ArrowFunction) -> Option<usize> {
    (0..phi.len()).max_by(|&a, &b| phi[a].norm().total_cmp(&phi[b].norm()))
}

/// Variables for a Hermitian-symmetric function on arrows: one per orbit of
/// inversion, real on units and on self-inverse arrows.
fn hermitian_entries(g: &FiniteGroupoid, p: &mut DiagBoundSdp) -> Vec<Entry> {
    let mut entries = vec![Entry::Fixed(C64::new(0.0, 0.0)); g.arrow_count()];
    for x in 0..g.arrow_count() {
        let inv = g.inverse(x);
        if inv < x {
            continue;
        }
        let v = if inv == x {
            p.real_variable()
        } else {
            p.complex_variable()
        };
        entries[x] = Entry::var(v);
        if inv != x {
            entries[inv] = Entry::conj_var(v);
        }
    }
    entries
}

/// One `2|G^u| × 2|G^u|` block per unit with blocks `ρ(x⁻¹y)`, `φ(x⁻¹y)`,
/// `φ*(x⁻¹y)`, `τ(x⁻¹y)`; returns the problem and the `ρ`, `τ` entries.
pub fn bg_problem(g: &FiniteGroupoid, phi: &ArrowFunction) -> (DiagBoundSdp, Vec<Entry>, Vec<Entry>) {
    let mut p = DiagBoundSdp::new();
    let rho = hermitian_entries(g, &mut p);
    let tau = hermitian_entries(g, &mut p);
    for u in 0..g.unit_count() {
        let fiber = g.range_fiber(u);
        let n = fiber.len();
        let mut block = vec![vec![Entry::Fixed(C64::new(0.0, 0.0)); 2 * n]; 2 * n];
        for (i, &x) in fiber.iter().enumerate() {
            for (j, &y) in fiber.iter().enumerate() {
                let z = g.compose(g.inverse(x), y).expect("common range");
                block[i][j] = rho[z];
                block[i][n + j] = Entry::Fixed(phi[z]);
                block[n + i][j] = Entry::Fixed(phi[g.inverse(z)].conj());
                block[n + i][n + j] = tau[z];
            }
        }
        p.add_block(block).expect("well-formed by construction");
    }
    (p, rho, tau)
}

fn read_entries(entries: &[Entry], values: &[C64]) -> ArrowFunction {
    ArrowFunction::new(
        entries
            .iter()
            .map(|e| match *e {
                Entry::Fixed(z) => z,
                Entry::Var { index, conj } => {
                    if conj {
                        values[index].conj()
                    } else {
                        values[index]
                    }
                }
            })
            .collect(),
    )
}

pub fn bg_norm(g: &FiniteGroupoid, phi: &ArrowFunction) -> Result<NormCertificate> {
    bg_norm_with(g, phi, &SdpOptions::default())
}

pub fn bg_norm_with(g: &FiniteGroupoid, phi: &ArrowFunction, opts: &SdpOptions) -> Result<NormCertificate> {
    check_len(g, phi)?;
    let (p, rho, tau) = bg_problem(g, phi);
    let sol = solve_diag_bound_sdp_with(&p, opts)?;
    let Witness::SdpPoint { values, .. } = &sol.witness else {
        unreachable!("the solver returns a point")
    };
    Ok(NormCertificate {
        value: sol.value,
        kind: CertificateKind::Optimal,
        witness: Witness::Completion {
            rho: read_entries(&rho, values),
            tau: read_entries(&tau, values),
        },
    })
}

fn check_len(g: &FiniteGroupoid, phi: &ArrowFunction) -> Result<()> {
    if phi.len() != g.arrow_count() {
        return Err(Error::DimensionMismatch {
            expected: g.arrow_count(),
            found: phi.len(),
        });
    }
    Ok(())
}

/// The blocks of a completion witness at unit `u`.
pub fn completion_block(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    rho: &ArrowFunction,
    tau: &ArrowFunction,
    u: usize,
) -> CMatrix {
    let fiber = g.range_fiber(u);
    let n = fiber.len();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for (i, &x) in fiber.iter().enumerate() {
        for (j, &y) in fiber.iter().enumerate() {
            let z = g.compose(g.inverse(x), y).expect("common range");
            m[(i, j)] = rho[z];
            m[(i, n + j)] = phi[z];
            m[(n + i, j)] = phi[g.inverse(z)].conj();
            m[(n + i, n + j)] = tau[z];
        }
    }
    m
}

/// `max_u max(ρ(u), τ(u))` if every completion block is PSD.
pub fn completion_value(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    rho: &ArrowFunction,
    tau: &ArrowFunction,
    tol: f64,
) -> Option<f64> {
    let scale = phi.max_abs();
    for u in 0..g.unit_count() {
        let m = completion_block(g, phi, rho, tau, u);
        if linalg::max_abs(&(&m - m.adjoint())) > tol * scale.max(linalg::max_abs(&m)) {
            return None;
        }
        let eig = hermitian_eigen(&m).ok()?;
        if eig.min_value() < -tol * eig.max_abs_value().max(scale) {
            return None;
        }
    }
    Some(
        g.unit_arrows()
            .iter()
            .map(|&e| rho[e].re.max(tau[e].re))
            .fold(0.0, f64::max),
    )
}

/// Completely bounded norm of the Schur multiplier `B ↦ A ∘ B`.
pub fn schur_cb_norm(a: &CMatrix) -> Result<NormCertificate> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let mut p = DiagBoundSdp::new();
    let free = |p: &mut DiagBoundSdp| {
        let mut m = vec![vec![Entry::Fixed(C64::new(0.0, 0.0)); n]; n];
        for i in 0..n {
            m[i][i] = Entry::var(p.real_variable());
            for j in i + 1..n {
                let v = p.complex_variable();
                m[i][j] = Entry::var(v);
                m[j][i] = Entry::conj_var(v);
            }
        }
        m
    };
    let pm = free(&mut p);
    let qm = free(&mut p);
    let mut block = vec![vec![Entry::Fixed(C64::new(0.0, 0.0)); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            block[i][j] = pm[i][j];
            block[i][n + j] = Entry::Fixed(a[(i, j)]);
            block[n + i][j] = Entry::Fixed(a[(j, i)].conj());
            block[n + i][n + j] = qm[i][j];
        }
    }
    p.add_block(block).expect("well-formed by construction");
    let sol = solve_diag_bound_sdp(&p)?;
    let Witness::SdpPoint { values, .. } = &sol.witness else {
        unreachable!("the solver returns a point")
    };
    let x = &p.evaluate(values)[0];
    let (f, g) = gram_factors(x, n, 2 * n);
    Ok(NormCertificate {
        value: sol.value,
        kind: CertificateKind::Optimal,
        witness: Witness::SchurFactors {
            f,
            g,
            p: x.view((0, 0), (n, n)).into_owned(),
            q: x.view((n, n), (n, n)).into_owned(),
        },
    })
}

/// For PSD `X = [[P, A], [Aᴴ, Q]]`, vectors with `A_ij = ⟨f_j, g_i⟩`, using
/// the `keep` leading eigenvalues.
fn gram_factors(x: &CMatrix, n: usize, keep: usize) -> (Vec<CVector>, Vec<CVector>) {
    let eig = hermitian_eigen(x).expect("square");
    let r = keep.min(eig.values.len());
    // Z = Λ^{1/2} Vᴴ, so X ≈ Zᴴ Z and column i of Z is z_i
    let z = CMatrix::from_fn(r, 2 * n, |k, c| {
        eig.vectors[(c, k)].conj() * eig.values[k].max(0.0).sqrt()
    });
    let f = (0..n).map(|j| z.column(n + j).map(|c| c.conj())).collect();
    let g = (0..n).map(|i| z.column(i).map(|c| c.conj())).collect();
    (f, g)
}

/// `max_j ‖f_j‖ · max_i ‖g_i‖` if the factors reproduce `A`.
pub fn schur_factor_value(a: &CMatrix, f: &[CVector], g: &[CVector], tol: f64) -> Option<f64> {
    let n = a.nrows();
    let scale = linalg::max_abs(a).max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..n {
            if (f[j].dotc(&g[i]) - a[(i, j)]).norm() > tol * scale {
                return None;
            }
        }
    }
    let m = |v: &[CVector]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Some(m(f) * m(g))
}

pub fn factorization_cost(g: &FiniteGroupoid, pairs: &[(ArrowFunction, ArrowFunction)]) -> f64 {
    pairs
        .iter()
        .map(|(f, h)| module_norm(g, f) * module_norm(g, h))
        .sum()
}

/// `max |φ − Σ (f_k, h_k)|`.
pub fn factorization_residual(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    pairs: &[(ArrowFunction, ArrowFunction)],
) -> f64 {
    let mut acc = phi.clone();
    for (f, h) in pairs {
        acc = &acc - &coefficient_regular(g, f, h);
    }
    acc.max_abs()
}

fn unit_delta(g: &FiniteGroupoid, u: usize) -> ArrowFunction {
    let e = g.unit_arrow(u);
    ArrowFunction::delta(g.arrow_count(), e).scale(C64::from(1.0 / g.weight(e)))
}

/// `φ|_{G_s} = (δ_s / w(s), φ|_{G_s})` for each unit `s`.
pub fn decompose_by_source(g: &FiniteGroupoid, phi: &ArrowFunction) -> Factorization {
    (0..g.unit_count())
        .filter_map(|s| {
            let mut h = ArrowFunction::zeros(g.arrow_count());
            for &x in g.source_fiber(s) {
                h[x] = phi[x];
            }
            (!h.is_zero()).then(|| (unit_delta(g, s), h))
        })
        .collect()
}

/// `φ|_{G^r} = (φ*|_{G_r}, δ_r / w(r))` for each unit `r`.
pub fn decompose_by_range(g: &FiniteGroupoid, phi: &ArrowFunction) -> Factorization {
    let ps = star(g, phi);
    (0..g.unit_count())
        .filter_map(|r| {
            let mut f = ArrowFunction::zeros(g.arrow_count());
            for &x in g.source_fiber(r) {
                f[x] = ps[x];
            }
            (!f.is_zero()).then(|| (f, unit_delta(g, r)))
        })
        .collect()
}

/// `φ = Σ_x φ(x) (δ_{s(x)} / w(s(x)), δ_x)`, of cost `Σ |φ(x)|`.
pub fn decompose_by_arrow(g: &FiniteGroupoid, phi: &ArrowFunction) -> Factorization {
    (0..g.arrow_count())
        .filter(|&x| phi[x] != C64::new(0.0, 0.0))
        .map(|x| {
            (
                unit_delta(g, g.source(x)),
                ArrowFunction::delta(g.arrow_count(), x).scale(phi[x]),
            )
        })
        .collect()
}

/// `φ = (e, φ)` and `φ = (φ*, e)` for the convolution identity `e`.
pub fn decompose_through_identity(g: &FiniteGroupoid, phi: &ArrowFunction) -> [Factorization; 2] {
    let e = approximate_identity(g);
    [vec![(e.clone(), phi.clone())], vec![(star(g, phi), e)]]
}

/// On a pair groupoid: `(f, h)` supported on the arrows into one unit `k`
/// gives `(f, h)(i, j) = w(k) conj f(j, k) h(i, k)`; each vector pair
/// `(a, b)` is realized with `(f, h)(i, j) = conj(a_j) b_i`.
fn pair_rank_one(
    g: &FiniteGroupoid,
    layout: &[usize],
    cols: &[(CVector, CVector)],
) -> (ArrowFunction, ArrowFunction) {
    let n = g.unit_count();
    let mut f = ArrowFunction::zeros(g.arrow_count());
    let mut h = ArrowFunction::zeros(g.arrow_count());
    for (k, (a, b)) in cols.iter().enumerate() {
        let c = 1.0 / g.unit_weight(k).sqrt();
        for i in 0..n {
            f[layout[i * n + k]] = a[i] * c;
            h[layout[i * n + k]] = b[i] * c;
        }
    }
    (f, h)
}

/// Singular value decomposition of `A_ij = φ(i, j)` on a pair groupoid, one
/// coefficient per singular value.
pub fn decompose_pair_svd(g: &FiniteGroupoid, phi: &ArrowFunction) -> Option<Factorization> {
    let layout = g.pair_layout()?;
    let n = g.unit_count();
    let a = CMatrix::from_fn(n, n, |i, j| phi[layout[i * n + j]]);
    let svd = a.svd(true, true);
    let (u, vt) = (svd.u?, svd.v_t?);
    let cutoff = linalg::RANK_TOL * svd.singular_values.max();
    Some(
        (0..n)
            .filter(|&k| svd.singular_values[k] > cutoff)
            .map(|k| {
                let v = vt.row(k).adjoint();
                let b = u.column(k) * C64::from(svd.singular_values[k]);
                pair_rank_one(g, &layout, &[(v, b)])
            })
            .collect(),
    )
}

/// One coefficient from a completion block on a pair groupoid. The Gram
/// vectors `f_j` are projected onto the span of the `g_i`, which has
/// dimension at most `n` and preserves every `⟨f_j, g_i⟩`.
pub fn decompose_pair_principal(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    rho: &ArrowFunction,
    tau: &ArrowFunction,
) -> Option<Factorization> {
    let layout = g.pair_layout()?;
    let n = g.unit_count();
    // block row i is the arrow (0, i), so x⁻¹y = (i, j)
    let x = completion_block(g, phi, rho, tau, 0);
    let (f, gv) = gram_factors(&x, n, 2 * n);
    let span = CMatrix::from_columns(&gv);
    let basis = linalg::column_basis(&span);
    let f: Vec<CVector> = f.iter().map(|v| basis.adjoint() * v).collect();
    let gv: Vec<CVector> = gv.iter().map(|v| basis.adjoint() * v).collect();
    let cols: Vec<(CVector, CVector)> = (0..basis.ncols())
        .map(|k| {
            (
                CVector::from_fn(n, |j, _| f[j][k]),
                CVector::from_fn(n, |i, _| gv[i][k]),
            )
        })
        .collect();
    let main = pair_rank_one(g, &layout, &cols);
    let residual = phi - &coefficient_regular(g, &main.0, &main.1);
    let mut out = vec![main];
    if !residual.is_zero() {
        out.extend(cheapest(g, &residual, basic_decompositions(g, &residual)).1);
    }
    Some(out)
}

/// Polar decomposition in the convolution algebra: `φ = h * f*` with
/// `f = |φ|^{1/2}` and `h = φ * (|φ|^{1/2})⁺`, computed on right convolution
/// operators conjugated by `W^{1/2}` so that the involution is the adjoint.
pub fn decompose_polar(g: &FiniteGroupoid, phi: &ArrowFunction) -> Option<Factorization> {
    let n = g.arrow_count();
    let sq: Vec<f64> = g.weights().iter().map(|w| w.sqrt()).collect();
    let r = right_op(g, phi).matrix;
    let m = CMatrix::from_fn(n, n, |i, j| r[(i, j)] * (sq[i] / sq[j]));
    let abs = hermitian_sqrt(&(&m * m.adjoint())).ok()?;
    let eig = hermitian_eigen(&abs).ok()?;
    let cutoff = linalg::RANK_TOL * eig.max_abs_value();
    let mut root = CMatrix::zeros(n, n);
    let mut pinv = CMatrix::zeros(n, n);
    for (k, &l) in eig.values.iter().enumerate() {
        if l > cutoff {
            let v = eig.vectors.column(k);
            let p = v * v.adjoint();
            root += &p * C64::from(l.sqrt());
            pinv += p * C64::from(1.0 / l.sqrt());
        }
    }
    let e = approximate_identity(g);
    let back = |t: &CMatrix| {
        ArrowFunction::new(
            (0..n)
                .map(|x| (0..n).map(|y| t[(x, y)] * (sq[y] / sq[x]) * e[y]).sum())
                .collect(),
        )
    };
    Some(vec![(back(&root), back(&(pinv * m)))])
}

/// `φ = (ζ₁₀, ζ₀₀) + (ζ₁₁, ζ₀₁)` from a square root `ζ` of the embedded
/// completion on `G × I₂`. Needs counting measure.
pub fn decompose_two_term(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    rho: &ArrowFunction,
    tau: &ArrowFunction,
) -> Option<Factorization> {
    if !g.has_unit_weights() {
        return None;
    }
    let g2 = g.product_with_i2();
    let big = off_diagonal_embed(g, rho, phi, tau);
    let zeta = pd_to_coefficient(&g2, &big, DEFAULT_PD_TOL).ok()?;
    Some(split_off_diagonal(&zeta).to_vec())
}

fn basic_decompositions(g: &FiniteGroupoid, phi: &ArrowFunction) -> Vec<(&'static str, Factorization)> {
    let [left, right] = decompose_through_identity(g, phi);
    let mut out = vec![
        ("source", decompose_by_source(g, phi)),
        ("range", decompose_by_range(g, phi)),
        ("arrow", decompose_by_arrow(g, phi)),
        ("identity-left", left),
        ("identity-right", right),
    ];
    if let Some(svd) = decompose_pair_svd(g, phi) {
        out.push(("svd", svd));
    }
    if let Some(polar) = decompose_polar(g, phi) {
        out.push(("polar", polar));
    }
    out
}

/// The cheapest candidate that reproduces `φ`.
fn cheapest(
    g: &FiniteGroupoid,
    phi: &ArrowFunction,
    candidates: Vec<(&'static str, Factorization)>,
) -> (f64, Factorization) {
    let tol = WITNESS_TOL * phi.max_abs().max(f64::MIN_POSITIVE);
    candidates
        .into_iter()
        .filter(|(_, c)| factorization_residual(g, phi, c) <= tol)
        .map(|(_, c)| (factorization_cost(g, &c), c))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("the arrow decomposition is exact")
}

/// `(lower, upper)` bounds for `‖φ‖₁ = inf Σ ‖f_k‖ ‖h_k‖` over `φ = Σ (f_k, h_k)`.
pub fn ag_norm_bounds(g: &FiniteGroupoid, phi: &ArrowFunction) -> Result<(NormCertificate, NormCertificate)> {
    check_len(g, phi)?;
    let bg = bg_norm(g, phi)?;
    let sup = sup_arrow(phi).map(|x| (x, phi[x].norm())).unwrap_or((0, 0.0));
    let lower = if bg.value >= sup.1 {
        NormCertificate {
            value: bg.value,
            kind: CertificateKind::Lower,
            witness: Witness::Bound(Box::new(bg.clone())),
        }
    } else {
        NormCertificate {
            value: sup.1,
            kind: CertificateKind::Lower,
            witness: Witness::Sup { arrow: sup.0 },
        }
    };
    if phi.is_zero() {
        let upper = NormCertificate {
            value: 0.0,
            kind: CertificateKind::Upper,
            witness: Witness::Factorization(Vec::new()),
        };
        return Ok((lower, upper));
    }
    let mut candidates = basic_decompositions(g, phi);
    if let Witness::Completion { rho, tau } = &bg.witness {
        if let Some(p) = decompose_pair_principal(g, phi, rho, tau) {
            candidates.push(("principal", p));
        }
        if let Some(p) = decompose_two_term(g, phi, rho, tau) {
            candidates.push(("two-term", p));
        }
    }
    let (value, best) = cheapest(g, phi, candidates);
    let upper = NormCertificate {
        value,
        kind: CertificateKind::Upper,
        witness: Witness::Factorization(best),
    };
    Ok((lower, upper))
}

/// Re-evaluates a witness against `φ`: the value it certifies, if valid.
pub fn reevaluate(g: &FiniteGroupoid, phi: &ArrowFunction, cert: &NormCertificate) -> Option<f64> {
    match &cert.witness {
        Witness::Completion { rho, tau } => completion_value(g, phi, rho, tau, WITNESS_TOL),
        Witness::Factorization(pairs) => {
            let tol = WITNESS_TOL * phi.max_abs().max(1.0);
            (factorization_residual(g, phi, pairs) <= tol).then(|| factorization_cost(g, pairs))
        }
        Witness::Sup { arrow } => Some(phi[*arrow].norm()),
        Witness::Bound(inner) => reevaluate(g, phi, inner),
        Witness::SchurFactors { f, g: gs, .. } => {
            let layout = g.pair_layout()?;
            let n = g.unit_count();
            let a = CMatrix::from_fn(n, n, |i, j| phi[layout[i * n + j]]);
            schur_factor_value(&a, f, gs, WITNESS_TOL)
        }
        Witness::SdpPoint { .. } | Witness::None => None,
    }
}

/// `A_ij = φ(i, j)` on a pair groupoid.
pub fn pair_matrix(g: &FiniteGroupoid, phi: &ArrowFunction) -> Option<CMatrix> {
    let layout = g.pair_layout()?;
    let n = g.unit_count();
    Some(CMatrix::from_fn(n, n, |i, j| phi[layout[i * n + j]]))
}
