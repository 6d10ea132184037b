//! Verification suites run by `check` and `report`.

use groupoid_fourier::algebra::{act_bisection, convolve, i_norm, i_norm_r, module_action, star};
use groupoid_fourier::bisection::enumerate_bisections;
use groupoid_fourier::duality::duality_round_trip;
use groupoid_fourier::norms::{ag_norm_bounds, bg_norm, pair_matrix, schur_cb_norm};
use groupoid_fourier::positivity::{
    coefficient, coefficient_regular, gns_bundle, is_positive_definite, pd_by_integral,
    pd_by_quadratic_form, pd_to_coefficient,
};
use groupoid_fourier::regular::{
    adjointable_norm, adjointable_space, alpha_from_t, bounded_space, d_inner, intersect_spans,
    left_op, module_norm, reduced_algebra, reduced_norm, right_op, von_neumann_algebra, E2Operator,
};
use groupoid_fourier::sample::{
    random_function, random_hermitian_function, random_positive_definite, random_real_unit_function,
    rng, SampleRng,
};
use groupoid_fourier::{ArrowFunction, FiniteGroupoid, Side, C64};

use crate::report::{Report, Status};

pub const SUITES: [&str; 6] = ["axioms", "algebra", "regular-rep", "positivity", "norms", "duality"];

const TRIALS: usize = 8;
const PD_PROBES: usize = 50;
const PD_SAMPLES: usize = 24;
const CB_BG_TOL: f64 = 1e-5;
const AG_BRACKET_TOL: f64 = 1e-4;
const PD_NORM_TOL: f64 = 1e-6;
const CHAIN_SLACK: f64 = 1e-6;
const OPERATOR_SLACK: f64 = 1e-12;

pub struct Context {
    pub seed: u64,
    pub tol: f64,
}

impl Context {
    fn rng(&self, salt: u64) -> SampleRng {
        rng(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

pub fn run(name: &str, g: &FiniteGroupoid, ctx: &Context, report: &mut Report) {
    match name {
        "axioms" => axioms(g, report),
        "algebra" => algebra(g, ctx, report),
        "regular-rep" => regular_rep(g, ctx, report),
        "positivity" => positivity(g, ctx, report),
        "norms" => norms(g, ctx, report),
        "duality" => duality(g, report),
        _ => unreachable!("suite names are validated by the argument parser"),
    }
}

fn relative(gap: f64, scale: f64) -> f64 {
    gap / scale.max(1.0)
}

fn max_gap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn unit_values(g: &FiniteGroupoid, f: &ArrowFunction) -> Vec<C64> {
    (0..g.unit_count()).map(|u| f[g.unit_arrow(u)]).collect()
}

fn axioms(g: &FiniteGroupoid, report: &mut Report) {
    let v = g.validate();
    let haar = v.has_haar_violation();
    let first = v.violations.first().map(|x| x.to_string());
    let status = if v.is_valid() { Status::Pass } else { Status::Fail };
    report.push("axioms", "violations", status, v.violations.len() as f64, 0.0, first);
    let status = if haar { Status::Fail } else { Status::Pass };
    report.push("axioms", "haar invariance", status, f64::from(u8::from(haar)), 0.0, None);
}

fn algebra(g: &FiniteGroupoid, ctx: &Context, report: &mut Report) {
    let mut r = ctx.rng(1);
    let n = g.arrow_count();
    let gamma = enumerate_bisections(g);
    let mut worst = [0.0_f64; 6];
    for _ in 0..TRIALS {
        let f = random_function(n, &mut r);
        let h = random_function(n, &mut r);
        let k = random_function(n, &mut r);
        let fh = convolve(g, &f, &h);
        let lhs = convolve(g, &fh, &k);
        worst[0] = worst[0].max(relative(lhs.max_diff(&convolve(g, &f, &convolve(g, &h, &k))), lhs.max_abs()));
        let anti = star(g, &fh).max_diff(&convolve(g, &star(g, &h), &star(g, &f)));
        worst[1] = worst[1].max(relative(anti, fh.max_abs()));
        worst[2] = worst[2].max(relative((i_norm(g, &star(g, &f)) - i_norm(g, &f)).abs(), i_norm(g, &f)));
        let excess = i_norm_r(g, &fh) - i_norm_r(g, &f) * i_norm_r(g, &h);
        worst[3] = worst[3].max(relative(excess.max(0.0), i_norm_r(g, &fh)));
        let b = random_real_unit_function(g.unit_count(), -2.0, 2.0, &mut r);
        let right = module_action(g, &b, &fh, Side::Right)
            .max_diff(&convolve(g, &module_action(g, &b, &f, Side::Right), &h));
        let left = module_action(g, &b, &fh, Side::Left)
            .max_diff(&convolve(g, &f, &module_action(g, &b, &h, Side::Left)));
        worst[4] = worst[4].max(relative(right.max(left), 2.0 * fh.max_abs()));
        for a in &gamma {
            let left = act_bisection(g, a, &fh, Side::Left)
                .max_diff(&convolve(g, &f, &act_bisection(g, a, &h, Side::Left)));
            let right = act_bisection(g, a, &fh, Side::Right)
                .max_diff(&convolve(g, &act_bisection(g, a, &f, Side::Right), &h));
            worst[5] = worst[5].max(relative(left.max(right), fh.max_abs()));
        }
    }
    let names = [
        "associativity",
        "star reverses products",
        "involution is isometric",
        "I-norm submultiplicative",
        "unit module laws",
        "bisection translation laws",
    ];
    for (name, w) in names.iter().zip(worst) {
        report.at_most("algebra", name, w, ctx.tol);
    }
}

fn regular_rep(g: &FiniteGroupoid, ctx: &Context, report: &mut Report) {
    let n = g.arrow_count();
    let vn = von_neumann_algebra(g);
    let red = reduced_algebra(g);
    let dims = [
        ("dim bounded maps", bounded_space(g).dimension(), n * n),
        (
            "dim adjointable maps",
            adjointable_space(g).dimension(),
            (0..g.unit_count()).map(|u| g.range_fiber(u).len().pow(2)).sum(),
        ),
        ("dim VN", vn.dimension(), n),
        ("dim reduced algebra", red.dimension(), n),
    ];
    for (name, got, want) in dims {
        let status = if got == want { Status::Pass } else { Status::Fail };
        report.push("regular-rep", name, status, got as f64, 0.0, Some(format!("expected {want}")));
    }
    let meet = intersect_spans(&vn, &red);
    if g.pair_layout().is_some() {
        let ok = meet.dimension() == 1 && meet.contains(&E2Operator::identity(n));
        let status = if ok { Status::Pass } else { Status::Fail };
        report.push(
            "regular-rep",
            "dim VN meet reduced algebra",
            status,
            meet.dimension() as f64,
            0.0,
            Some("expected the scalars".into()),
        );
    } else {
        report.info("regular-rep", "dim VN meet reduced algebra", meet.dimension() as f64, None);
    }

    let mut r = ctx.rng(2);
    let basis = vn.elements();
    let mut worst = [0.0_f64; 6];
    for _ in 0..TRIALS {
        let f = random_function(n, &mut r);
        let h = random_function(n, &mut r);
        for t in &basis {
            let tf = t.apply(&f);
            let inner = d_inner(g, &tf, &h);
            let lhs: Vec<C64> = unit_values(g, &t.apply(&convolve(g, &f, &star(g, &h))))
                .into_iter()
                .map(|z| z.conj())
                .collect();
            let scale = tf.max_abs() * h.max_abs() * n as f64;
            worst[0] = worst[0].max(relative(max_gap(&lhs, inner.values()), scale));
            let alpha_gap = match alpha_from_t(g, t) {
                Ok(alpha) => max_gap(alpha.apply(&convolve(g, &h, &star(g, &f))).values(), inner.values()),
                Err(_) => f64::INFINITY,
            };
            worst[1] = worst[1].max(relative(alpha_gap, scale));
        }
        let big_f = random_function(n, &mut r);
        let lhs = d_inner(g, &left_op(g, &big_f).apply(&f), &h);
        let coeff = coefficient_regular(g, &f, &h);
        let rhs: Vec<C64> = (0..g.unit_count())
            .map(|u| {
                g.range_fiber(u)
                    .iter()
                    .map(|&x| big_f[x].conj() * coeff[x] * g.weight(x))
                    .sum()
            })
            .collect();
        let scale = big_f.max_abs() * f.max_abs() * h.max_abs() * (n * n) as f64;
        worst[2] = worst[2].max(relative(max_gap(lhs.values(), &rhs), scale));

        let bound = i_norm(g, &big_f);
        let excess = adjointable_norm(g, &right_op(g, &big_f)).map_or(f64::INFINITY, |v| v - bound);
        worst[3] = worst[3].max(relative(excess.max(0.0), bound));
        let l = left_op(g, &big_f);
        let bound_r = i_norm_r(g, &big_f);
        for _ in 0..TRIALS {
            let xi = random_function(n, &mut r);
            let rhs = bound_r * module_norm(g, &xi);
            let excess = module_norm(g, &l.apply(&xi)) - rhs;
            worst[4] = worst[4].max(relative(excess.max(0.0), rhs));
        }
        let norm = reduced_norm(g, &big_f);
        let sq = reduced_norm(g, &convolve(g, &star(g, &big_f), &big_f));
        worst[5] = worst[5].max(relative((sq - norm * norm).abs(), norm * norm));
    }
    report.at_most("regular-rep", "T(f g*) on units is <Tf, g>", worst[0], ctx.tol);
    report.at_most("regular-rep", "alpha_T(g f*) is <Tf, g>", worst[1], ctx.tol);
    report.at_most("regular-rep", "<L_F xi, eta> integrates conj F (xi, eta)", worst[2], ctx.tol);
    report.at_most("regular-rep", "|R_F| within I-norm", worst[3], OPERATOR_SLACK);
    report.at_most("regular-rep", "|L_F xi| within I,r-norm", worst[4], OPERATOR_SLACK);
    report.at_most("regular-rep", "C*-identity", worst[5], ctx.tol);
}

fn positivity(g: &FiniteGroupoid, ctx: &Context, report: &mut Report) {
    let mut r = ctx.rng(3);
    let n = g.arrow_count();
    let (mut disagreements, mut positives) = (0usize, 0usize);
    let mut first = None;
    for k in 0..PD_SAMPLES {
        let phi = match k % 4 {
            0 | 1 => random_positive_definite(g, &mut r),
            2 => random_hermitian_function(g, &mut r),
            _ => random_function(n, &mut r),
        };
        let gram = is_positive_definite(g, &phi, ctx.tol).positive;
        let form = pd_by_quadratic_form(g, &phi, ctx.tol, PD_PROBES, &mut r);
        let integral = pd_by_integral(g, &phi, ctx.tol, PD_PROBES, &mut r);
        positives += usize::from(gram);
        if gram != form || gram != integral {
            disagreements += 1;
            first.get_or_insert(format!("sample {k}: gram {gram}, form {form}, integral {integral}"));
        }
    }
    let status = if disagreements == 0 { Status::Pass } else { Status::Fail };
    let detail = first.unwrap_or_else(|| format!("{PD_SAMPLES} samples, {positives} positive definite"));
    report.push("positivity", "verdicts agree", status, disagreements as f64, 0.0, Some(detail));

    let (mut gns, mut regular, mut minors) = (0.0_f64, 0.0_f64, 0.0_f64);
    for k in 0..TRIALS {
        let phi = if k % 2 == 0 {
            let xi = random_function(n, &mut r);
            coefficient_regular(g, &xi, &xi)
        } else {
            random_positive_definite(g, &mut r)
        };
        let scale = phi.max_abs();
        let err = gns_bundle(g, &phi, ctx.tol)
            .and_then(|(bundle, xi)| coefficient(g, &bundle, &xi, &xi))
            .map_or(f64::INFINITY, |back| back.max_diff(&phi));
        gns = gns.max(relative(err, scale));
        if g.has_unit_weights() {
            let err = pd_to_coefficient(g, &phi, ctx.tol)
                .map_or(f64::INFINITY, |xi| coefficient_regular(g, &xi, &xi).max_diff(&phi));
            regular = regular.max(relative(err, scale));
        }
        for x in 0..n {
            let bound = (phi[g.unit_arrow(g.range(x))].re * phi[g.unit_arrow(g.source(x))].re).sqrt();
            let hermitian = (phi[g.inverse(x)] - phi[x].conj()).norm();
            minors = minors.max(relative((phi[x].norm() - bound).max(0.0).max(hermitian), scale));
        }
    }
    report.at_most("positivity", "GNS reconstruction", gns, ctx.tol);
    if g.has_unit_weights() {
        report.at_most("positivity", "regular coefficient reconstruction", regular, ctx.tol);
    }
    report.at_most("positivity", "hermitian with 2x2 minors", minors, ctx.tol);
}

fn norms(g: &FiniteGroupoid, ctx: &Context, report: &mut Report) {
    let mut r = ctx.rng(4);
    let n = g.arrow_count();
    let (mut chain, mut cb_gap, mut bracket, mut pd_gap) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let pair = g.pair_layout().is_some();
    for _ in 0..TRIALS {
        let phi = random_function(n, &mut r);
        let sup = phi.max_abs();
        let Ok(bg) = bg_norm(g, &phi) else {
            chain = f64::INFINITY;
            continue;
        };
        let Ok((lo, hi)) = ag_norm_bounds(g, &phi) else {
            chain = f64::INFINITY;
            continue;
        };
        let mut violation = (sup - bg.value).max(bg.value - hi.value);
        if pair {
            let cb = schur_cb_norm(&pair_matrix(g, &phi).expect("pair layout")).map_or(f64::INFINITY, |c| c.value);
            violation = violation.max(sup - cb).max(cb - bg.value);
            cb_gap = cb_gap.max((cb - bg.value).abs());
            bracket = bracket.max(hi.value - lo.value);
        }
        chain = chain.max(relative(violation.max(0.0), sup));

        let psi = random_positive_definite(g, &mut r);
        let top = unit_values(g, &psi).iter().map(|z| z.re).fold(0.0, f64::max);
        let v = bg_norm(g, &psi).map_or(f64::INFINITY, |c| c.value);
        pd_gap = pd_gap.max((v - top).abs());
    }
    report.at_most("norms", "sup <= cb <= bg <= ag upper", chain, CHAIN_SLACK);
    if pair {
        report.at_most("norms", "cb equals bg", cb_gap, CB_BG_TOL);
        report.at_most("norms", "ag bounds bracket", bracket, AG_BRACKET_TOL);
    }
    report.at_most("norms", "positive definite norm is unit max", pd_gap, PD_NORM_TOL);
}

fn duality(g: &FiniteGroupoid, report: &mut Report) {
    let t = duality_round_trip(g);
    if t.bisections.is_empty() {
        report.warnings.push("the groupoid has no bisections".into());
    }
    report.info("duality", "bisections", t.bisections.len() as f64, None);
    let uncovered = t.uncovered_arrows.len();
    report.info(
        "duality",
        "arrows on no bisection",
        uncovered as f64,
        t.uncovered_arrows.first().map(|x| format!("first {x}")),
    );
    let failed = t.round_trips.iter().filter(|rt| !(rt.mmm_passes && rt.reconstructed)).count();
    let status = if failed == 0 { Status::Pass } else { Status::Fail };
    report.push("duality", "round trips", status, failed as f64, 0.0, None);
    let status = if t.injective { Status::Pass } else { Status::Fail };
    report.push("duality", "injective", status, f64::from(u8::from(!t.injective)), 0.0, None);
    let status = if t.composition_failures.is_empty() { Status::Pass } else { Status::Fail };
    report.push(
        "duality",
        "products",
        status,
        t.composition_failures.len() as f64,
        0.0,
        Some(format!("{} pairs checked", t.composition_checks)),
    );
    let status = if t.covariance_failures.is_empty() { Status::Pass } else { Status::Fail };
    report.push("duality", "translation covariance", status, t.covariance_failures.len() as f64, 0.0, None);
}
