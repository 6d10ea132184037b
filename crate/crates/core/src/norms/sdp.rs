//! Semidefinite programs of the form: minimize `t` subject to a list of
//! Hermitian blocks being positive semidefinite, where every diagonal entry
//! is a real variable bounded by `t`.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{CertificateKind, NormCertificate, Witness};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entry {
    Fixed(C64),
    /// The variable, or its conjugate.
    Var { index: usize, conj: bool },
}

impl Entry {
    pub fn var(index: usize) -> Self {
        Entry::Var { index, conj: false }
    }

    pub fn conj_var(index: usize) -> Self {
        Entry::Var { index, conj: true }
    }

    fn adjoint(self) -> Self {
        match self {
            Entry::Fixed(z) => Entry::Fixed(z.conj()),
            Entry::Var { index, conj } => Entry::Var { index, conj: !conj },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, Default)]
pub struct DiagBoundSdp {
    kinds: Vec<VarKind>,
    blocks: Vec<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SdpMethod {
    /// Log-barrier path following with damped Newton steps.
    InteriorPoint,
    /// Bisection on `t`; each level decided by alternating projections.
    AlternatingProjections,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    pub method: SdpMethod,
    /// Values above this are reported as infeasible.
    pub cap: f64,
    /// Stop when the optimality gap is below `gap_tol * scale`.
    pub gap_tol: f64,
    /// Iteration cap per alternating-projection feasibility query.
    pub max_projections: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            method: SdpMethod::InteriorPoint,
            cap: f64::INFINITY,
            gap_tol: 1e-10,
            max_projections: 50_000,
        }
    }
}

impl DiagBoundSdp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn real_variable(&mut self) -> usize {
        self.kinds.push(VarKind::Real);
        self.kinds.len() - 1
    }

    pub fn complex_variable(&mut self) -> usize {
        self.kinds.push(VarKind::Complex);
        self.kinds.len() - 1
    }

    pub fn variable_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Adds a block. It must be square and Hermitian under the sharing map,
    /// with a real variable on every diagonal entry.
    pub fn add_block(&mut self, entries: Vec<Vec<Entry>>) -> Result<()> {
        let m = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::NotSquare {
                    rows: m,
                    cols: row.len(),
                });
            }
            for (j, &e) in row.iter().enumerate() {
                if let Entry::Var { index, .. } = e {
                    if index >= self.kinds.len() {
                        return Err(Error::Unsupported(format!("unknown variable {index}")));
                    }
                }
                if i == j {
                    match e {
                        Entry::Var { index, .. } if self.kinds[index] == VarKind::Real => {}
                        _ => {
                            return Err(Error::Unsupported(format!(
                                "diagonal entry {i} must be a real variable"
                            )))
                        }
                    }
                } else if !same_entry(self, e, entries[j][i].adjoint()) {
                    return Err(Error::Unsupported(format!("block is not Hermitian at ({i}, {j})")));
                }
            }
        }
        self.blocks.push(entries);
        Ok(())
    }

    /// Variables that appear on a diagonal; their maximum is the objective.
    pub fn objective_variables(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .blocks
            .iter()
            .flat_map(|b| {
                (0..b.len()).filter_map(move |i| match b[i][i] {
                    Entry::Var { index, .. } => Some(index),
                    Entry::Fixed(_) => None,
                })
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn evaluate(&self, values: &[C64]) -> Vec<CMatrix> {
        self.blocks
            .iter()
            .map(|b| {
                CMatrix::from_fn(b.len(), b.len(), |i, j| match b[i][j] {
                    Entry::Fixed(z) => z,
                    Entry::Var { index, conj } => {
                        if conj {
                            values[index].conj()
                        } else {
                            values[index]
                        }
                    }
                })
            })
            .collect()
    }

    pub fn objective(&self, values: &[C64]) -> f64 {
        self.objective_variables()
            .iter()
            .map(|&v| values[v].re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute fixed entry.
    pub fn scale(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .flatten()
            .map(|e| match e {
                Entry::Fixed(z) => z.norm(),
                Entry::Var { .. } => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// The objective at `values` if every block is PSD up to
    /// `tol · max(scale, |λ|max)`.
    pub fn feasible_value(&self, values: &[C64], tol: f64) -> Option<f64> {
        let scale = self.scale();
        for m in self.evaluate(values) {
            let eig = linalg::hermitian_eigen(&m).ok()?;
            if eig.min_value() < -tol * eig.max_abs_value().max(scale) {
                return None;
            }
        }
        Some(self.objective(values).max(0.0))
    }

    fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.kinds.len()];
        let objective = self.objective_variables();
        for b in &self.blocks {
            for (i, row) in b.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if let Entry::Var { index, .. } = *e {
                        seen[index] = true;
                        if i != j && objective.binary_search(&index).is_ok() {
                            return Err(Error::Unsupported(format!(
                                "objective variable {index} appears off the diagonal"
                            )));
                        }
                    }
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(Error::Unsupported(format!("variable {v} appears in no block"))),
            None => Ok(()),
        }
    }

    /// A strictly feasible point: off-diagonal variables zero and diagonal
    /// variables above every Gershgorin radius.
    fn start(&self, scale: f64) -> Vec<C64> {
        let radius = self
            .blocks
            .iter()
            .flat_map(|b| {
                b.iter().enumerate().map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, e)| match e {
                            Entry::Fixed(z) => z.norm(),
                            Entry::Var { .. } => 0.0,
                        })
                        .sum::<f64>()
                })
            })
            .fold(0.0, f64::max);
        let mut values = vec![C64::new(0.0, 0.0); self.kinds.len()];
        for v in self.objective_variables() {
            values[v] = C64::from(radius + scale);
        }
        values
    }
}

fn same_entry(p: &DiagBoundSdp, a: Entry, b: Entry) -> bool {
    match (a, b) {
        (Entry::Fixed(x), Entry::Fixed(y)) => x == y,
        (Entry::Var { index: i, conj: c }, Entry::Var { index: j, conj: d }) => {
            i == j && (c == d || p.kinds[i] == VarKind::Real)
        }
        _ => false,
    }
}

pub fn solve_diag_bound_sdp(p: &DiagBoundSdp) -> Result<NormCertificate> {
    solve_diag_bound_sdp_with(p, &SdpOptions::default())
}

pub fn solve_diag_bound_sdp_with(p: &DiagBoundSdp, opts: &SdpOptions) -> Result<NormCertificate> {
    p.validate()?;
    let scale = p.scale();
    let (value, lower, values) = if scale == 0.0 {
        (0.0, 0.0, vec![C64::new(0.0, 0.0); p.variable_count()])
    } else {
        match opts.method {
            SdpMethod::InteriorPoint => interior_point(p, scale, opts.gap_tol),
            SdpMethod::AlternatingProjections => alternating(p, scale, opts),
        }
    };
    if value > opts.cap {
        return Err(Error::SdpInfeasible { cap: opts.cap });
    }
    Ok(NormCertificate {
        value,
        kind: CertificateKind::Optimal,
        witness: Witness::SdpPoint {
            values,
            lower_bound: lower,
        },
    })
}

/// Real parametrization `X_b(y) = C_b + Σ_k y_k A_bk` of the blocks.
struct Affine {
    /// First parameter of each variable (complex variables use two).
    offset: Vec<usize>,
    params: usize,
    constant: Vec<CMatrix>,
    /// Per block: `(parameter, A_bk)`.
    terms: Vec<Vec<(usize, CMatrix)>>,
    /// Parameter of each objective variable.
    objective: Vec<usize>,
}

impl Affine {
    fn new(p: &DiagBoundSdp) -> Self {
        let mut offset = Vec::with_capacity(p.kinds.len());
        let mut params = 0;
        for k in &p.kinds {
            offset.push(params);
            params += match k {
                VarKind::Real => 1,
                VarKind::Complex => 2,
            };
        }
        let mut constant = Vec::new();
        let mut terms = Vec::new();
        for b in &p.blocks {
            let m = b.len();
            let mut c = CMatrix::zeros(m, m);
            let mut t: Vec<(usize, CMatrix)> = Vec::new();
            let mut add = |k: usize, i: usize, j: usize, z: C64| {
                let pos = match t.iter().position(|(q, _)| *q == k) {
                    Some(pos) => pos,
                    None => {
                        t.push((k, CMatrix::zeros(m, m)));
                        t.len() - 1
                    }
                };
                t[pos].1[(i, j)] += z;
            };
            for i in 0..m {
                for j in 0..m {
                    match b[i][j] {
                        Entry::Fixed(z) => c[(i, j)] = z,
                        Entry::Var { index, conj } => {
                            let k = offset[index];
                            add(k, i, j, C64::from(1.0));
                            if p.kinds[index] == VarKind::Complex {
                                let im = if conj { -1.0 } else { 1.0 };
                                add(k + 1, i, j, C64::new(0.0, im));
                            }
                        }
                    }
                }
            }
            t.sort_by_key(|(k, _)| *k);
            constant.push(c);
            terms.push(t);
        }
        let objective = p.objective_variables().iter().map(|&v| offset[v]).collect();
        Self {
            offset,
            params,
            constant,
            terms,
            objective,
        }
    }

    fn block(&self, b: usize, y: &[f64]) -> CMatrix {
        let mut x = self.constant[b].clone();
        for (k, a) in &self.terms[b] {
            x += a * C64::from(y[*k]);
        }
        x
    }

    fn values(&self, p: &DiagBoundSdp, y: &[f64]) -> Vec<C64> {
        p.kinds
            .iter()
            .zip(&self.offset)
            .map(|(kind, &k)| match kind {
                VarKind::Real => C64::from(y[k]),
                VarKind::Complex => C64::new(y[k], y[k + 1]),
            })
            .collect()
    }

    fn params_of(&self, p: &DiagBoundSdp, values: &[C64]) -> Vec<f64> {
        let mut y = vec![0.0; self.params];
        for (v, kind) in p.kinds.iter().enumerate() {
            let k = self.offset[v];
            y[k] = values[v].re;
            if *kind == VarKind::Complex {
                y[k + 1] = values[v].im;
            }
        }
        y
    }

    /// Strict feasibility of the parameters with slack variable `t`.
    fn strictly_feasible(&self, y: &[f64], t: f64) -> bool {
        self.objective.iter().all(|&k| t - y[k] > 0.0)
            && (0..self.constant.len()).all(|b| Cholesky::new(self.block(b, y)).is_some())
    }
}

/// Returns `(value, lower bound, variable values)`.
fn interior_point(p: &DiagBoundSdp, scale: f64, gap_tol: f64) -> (f64, f64, Vec<C64>) {
    let aff = Affine::new(p);
    let n = aff.params;
    let mut y = aff.params_of(p, &p.start(scale));
    let mut t = aff.objective.iter().map(|&k| y[k]).fold(0.0, f64::max) + scale;
    let nu = (aff.constant.iter().map(|c| c.nrows()).sum::<usize>() + aff.objective.len()) as f64;
    let mut weight = nu / scale;
    loop {
        for _ in 0..100 {
            // gradient and Hessian of weight·t − Σ log det X_b − Σ log(t − y_k)
            let mut grad = DVector::<f64>::zeros(n + 1);
            let mut hess = DMatrix::<f64>::zeros(n + 1, n + 1);
            grad[n] = weight;
            let mut ok = true;
            for b in 0..aff.constant.len() {
                let x = aff.block(b, &y);
                let Some(ch) = Cholesky::new(x) else {
                    ok = false;
                    break;
                };
                let inv = ch.inverse();
                let prods: Vec<(usize, CMatrix)> =
                    aff.terms[b].iter().map(|(k, a)| (*k, &inv * a)).collect();
                for (i, (k, bk)) in prods.iter().enumerate() {
                    grad[*k] -= bk.trace().re;
                    for (l, bl) in &prods[i..] {
                        let h = trace_product(bk, bl);
                        hess[(*k, *l)] += h;
                        if k != l {
                            hess[(*l, *k)] += h;
                        }
                    }
                }
            }
            if !ok {
                break;
            }
            for &k in &aff.objective {
                let s = t - y[k];
                grad[n] -= 1.0 / s;
                grad[k] += 1.0 / s;
                let h = 1.0 / (s * s);
                hess[(n, n)] += h;
                hess[(k, k)] += h;
                hess[(n, k)] -= h;
                hess[(k, n)] -= h;
            }
            let Some(step) = newton_step(&hess, &grad) else {
                break;
            };
            let decrement = -grad.dot(&step);
            if !(decrement.is_finite()) || decrement < 1e-12 {
                break;
            }
            let lambda = decrement.sqrt();
            let mut alpha = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            let mut moved = false;
            for _ in 0..60 {
                let cand: Vec<f64> = (0..n).map(|k| y[k] + alpha * step[k]).collect();
                let ct = t + alpha * step[n];
                if aff.strictly_feasible(&cand, ct) {
                    y = cand;
                    t = ct;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved || decrement < 1e-10 {
                break;
            }
        }
        if nu / weight <= gap_tol * scale || weight > 1e18 / scale {
            break;
        }
        weight *= 8.0;
    }
    let values = aff.values(p, &y);
    let value = p.objective(&values).max(0.0);
    (value, (t - nu / weight).max(0.0).min(value), values)
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let m = a.nrows();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Solves `H d = −g` after symmetric diagonal scaling.
fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let n = grad.len();
    let d: Vec<f64> = (0..n).map(|i| hess[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| hess[(i, j)] / (d[i] * d[j]));
    let rhs = DVector::from_fn(n, |i, _| -grad[i] / d[i]);
    let sol = match scaled.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => scaled.lu().solve(&rhs)?,
    };
    let step = DVector::from_fn(n, |i, _| sol[i] / d[i]);
    step.iter().all(|v| v.is_finite()).then_some(step)
}

/// Adds `c` to every objective variable.
fn shift(p: &DiagBoundSdp, values: &mut [C64], c: f64) {
    for v in p.objective_variables() {
        values[v] += C64::from(c);
    }
}

/// Objective after shifting the diagonal far enough to make every block PSD,
/// together with the smallest eigenvalue over all blocks.
fn repaired(p: &DiagBoundSdp, values: &[C64]) -> (f64, f64) {
    let min = p
        .evaluate(values)
        .iter()
        .map(linalg::min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    (p.objective(values) + (-min).max(0.0), min)
}

/// Alternating projections between the PSD cones and the set of matrices
/// that respect the data, the variable sharing and the bound `t`.
struct Projector<'a> {
    p: &'a DiagBoundSdp,
    objective: Vec<bool>,
    counts: Vec<f64>,
}

impl<'a> Projector<'a> {
    fn new(p: &'a DiagBoundSdp) -> Self {
        let mut objective = vec![false; p.variable_count()];
        for v in p.objective_variables() {
            objective[v] = true;
        }
        let mut counts = vec![0.0; p.variable_count()];
        for e in p.blocks.iter().flatten().flatten() {
            if let Entry::Var { index, .. } = e {
                counts[*index] += 1.0;
            }
        }
        Self {
            p,
            objective,
            counts,
        }
    }

    fn project_affine(&self, blocks: &[CMatrix], t: f64) -> Vec<C64> {
        let mut sums = vec![C64::new(0.0, 0.0); self.p.variable_count()];
        for (b, m) in self.p.blocks.iter().zip(blocks) {
            for (i, row) in b.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if let Entry::Var { index, conj } = *e {
                        let z = m[(i, j)];
                        sums[index] += if conj { z.conj() } else { z };
                    }
                }
            }
        }
        sums.iter()
            .enumerate()
            .map(|(v, s)| {
                let mut z = s / self.counts[v];
                if self.p.kinds[v] == VarKind::Real {
                    z = C64::from(z.re);
                }
                if self.objective[v] {
                    z = C64::from(z.re.min(t));
                }
                z
            })
            .collect()
    }

    /// Runs projections at level `t` starting from `values`. Returns the last
    /// iterate and the best repaired point seen.
    fn run(&self, values: Vec<C64>, t: f64, eps: f64, cap: usize) -> (Vec<C64>, f64, Vec<C64>) {
        let mut current = self.project_affine(&self.p.evaluate(&values), t);
        let (mut best, _) = repaired(self.p, &current);
        let mut best_point = current.clone();
        let mut checkpoint = f64::INFINITY;
        for k in 0..cap {
            let blocks = self.p.evaluate(&current);
            let mut min = f64::INFINITY;
            let projected: Vec<CMatrix> = blocks
                .iter()
                .map(|m| {
                    let eig = linalg::hermitian_eigen(m).expect("square");
                    min = min.min(eig.min_value());
                    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
                    for (i, &l) in eig.values.iter().enumerate() {
                        if l > 0.0 {
                            let v = eig.vectors.column(i);
                            out += (v * v.adjoint()) * C64::from(l);
                        }
                    }
                    out
                })
                .collect();
            let gap = (-min).max(0.0);
            let value = self.p.objective(&current) + gap;
            if value < best {
                best = value;
                best_point = current.clone();
            }
            if gap <= eps {
                break;
            }
            if k % 500 == 499 {
                // slow progress means the level is (numerically) infeasible
                if checkpoint - gap < 1e-3 * checkpoint {
                    break;
                }
                checkpoint = gap;
            }
            current = self.project_affine(&projected, t);
        }
        (current, best, best_point)
    }
}

fn alternating(p: &DiagBoundSdp, scale: f64, opts: &SdpOptions) -> (f64, f64, Vec<C64>) {
    let proj = Projector::new(p);
    let eps = 1e-9 * scale;
    let mut best_point = p.start(scale);
    let (mut hi, _) = repaired(p, &best_point);
    let mut lo = 0.0;
    let mut warm = best_point.clone();
    while hi - lo > 1e-7 * hi {
        let mid = 0.5 * (lo + hi);
        let (last, value, point) = proj.run(warm, mid, eps, opts.max_projections);
        if value < hi {
            hi = value;
            best_point = point;
        }
        if value <= mid + eps {
            hi = hi.min(value);
        } else {
            lo = mid;
        }
        warm = last;
    }
    let (_, min) = repaired(p, &best_point);
    shift(p, &mut best_point, (-min).max(0.0));
    (p.objective(&best_point).max(0.0), lo, best_point)
}
