//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use groupoid_fourier::algebra::{
    act_bisection, convolve, i_norm, i_norm_r, module_action, star,
};
use groupoid_fourier::bisection::enumerate_bisections;
use groupoid_fourier::duality::{
    alpha_from_bisection, beta_from_bisection, reconstruct_bisection, duality_round_trip,
    verify_mmm, ModuleMap,
};
use groupoid_fourier::groupoid::{cyclic_table, permutations};
use groupoid_fourier::norms::{ag_norm_bounds, bg_norm, pair_matrix, schur_cb_norm};
use groupoid_fourier::positivity::{
    coefficient_regular, gns_bundle, integral_form, is_positive_definite, pd_by_integral,
    pd_by_quadratic_form, pd_to_coefficient, quadratic_form, coefficient, WitnessKind,
};
use groupoid_fourier::regular::{
    adjointable_norm, adjointable_space, alpha_from_t, bounded_space, d_inner, intersect_spans,
    left_op, module_norm, reduced_algebra, reduced_norm, right_op, von_neumann_algebra, E2Operator,
};
use groupoid_fourier::sample::{
    random_function, random_hermitian_function, random_positive_definite,
    random_real_unit_function, rng,
};
use groupoid_fourier::{ArrowFunction, Error, FiniteGroupoid, Side, C64};
use rand::Rng;

const STRUCTURE_BUDGET: Duration = Duration::from_secs(5);
const PD_TOL: f64 = 1e-9;
const PD_PROBES: usize = 50;
const PD_SAMPLES_PER_GROUPOID: usize = 60;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const RECONSTRUCTION_SAMPLES: usize = 120;
const IDENTITY_TOL: f64 = 1e-10;
const IDENTITY_TRIALS: usize = 10;
const CHAIN_SLACK: f64 = 1e-6;
const CB_BG_TOL: f64 = 1e-5;
const AG_BRACKET_TOL: f64 = 1e-4;
const PD_NORM_TOL: f64 = 1e-6;
const NORM_SAMPLES_PER_PAIR: usize = 25;
const SDP_BUDGET: Duration = Duration::from_secs(60);
const OPERATOR_BOUND_SLACK: f64 = 1e-12;
const OPERATOR_PROBES: usize = 1000;
const CSTAR_TOL: f64 = 1e-9;
const DUALITY_BUDGET: Duration = Duration::from_secs(10);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            summary
        } else {
            format!("{summary}; first failure: {}", failures[0])
        },
    }
}

fn bundle2() -> FiniteGroupoid {
    FiniteGroupoid::group_bundle(&[cyclic_table(2), cyclic_table(2)]).unwrap()
}

fn bundle3() -> FiniteGroupoid {
    FiniteGroupoid::group_bundle(&[cyclic_table(3), cyclic_table(3)]).unwrap()
}

fn mixed_bundle() -> FiniteGroupoid {
    FiniteGroupoid::group_bundle(&[cyclic_table(2), cyclic_table(3)]).unwrap()
}

fn weighted_pair3() -> FiniteGroupoid {
    FiniteGroupoid::pair(3).with_unit_weights(&[1.0, 2.5, 0.4]).unwrap()
}

/// ℤ/2 acting on three points by swapping the first two.
fn swap_action() -> FiniteGroupoid {
    let action = vec![vec![0, 1, 2], vec![1, 0, 2]];
    FiniteGroupoid::transformation(&cyclic_table(2), &action).unwrap()
}

fn unit_values(g: &FiniteGroupoid, f: &ArrowFunction) -> Vec<C64> {
    (0..g.unit_count()).map(|u| f[g.unit_arrow(u)]).collect()
}

fn max_gap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn structure() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for n in 2..=4usize {
        let g = FiniteGroupoid::pair(n);
        let vn = von_neumann_algebra(&g);
        let red = reduced_algebra(&g);
        let dims = (
            bounded_space(&g).dimension(),
            adjointable_space(&g).dimension(),
            vn.dimension(),
            red.dimension(),
        );
        let want = (n.pow(4), n.pow(3), n * n, n * n);
        if dims != want {
            failures.push(format!("G_{n}: dimensions {dims:?}, expected {want:?}"));
        }
        let meet = intersect_spans(&vn, &red);
        if meet.dimension() != 1 || !meet.contains(&E2Operator::identity(g.arrow_count())) {
            failures.push(format!(
                "G_{n}: VN ∩ C*_red has dimension {} or misses the identity",
                meet.dimension()
            ));
        }
        seen.push(format!("{dims:?}"));
    }
    let elapsed = start.elapsed();
    if elapsed > STRUCTURE_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        &failures,
        format!("dimensions {} in {:.2?}", seen.join(" "), elapsed),
    )
}

fn pd_agreement() -> Outcome {
    let mut r = rng(0xacce_0002);
    let groupoids = [
        ("G_2", FiniteGroupoid::pair(2)),
        ("G_3", FiniteGroupoid::pair(3)),
        ("Z/2 bundle", bundle2()),
        ("Z/3 bundle", bundle3()),
    ];
    let mut failures = Vec::new();
    let (mut total, mut positives) = (0, 0);
    for (name, g) in &groupoids {
        for k in 0..PD_SAMPLES_PER_GROUPOID {
            let phi = match k % 4 {
                0 | 1 => random_positive_definite(g, &mut r),
                2 => random_hermitian_function(g, &mut r),
                _ => random_function(g.arrow_count(), &mut r),
            };
            let gram = is_positive_definite(g, &phi, PD_TOL).positive;
            let form = pd_by_quadratic_form(g, &phi, PD_TOL, PD_PROBES, &mut r);
            let integral = pd_by_integral(g, &phi, PD_TOL, PD_PROBES, &mut r);
            total += 1;
            positives += gram as usize;
            if gram != form || gram != integral {
                failures.push(format!(
                    "{name} sample {k}: gram {gram}, form {form}, integral {integral}"
                ));
            }
        }
    }
    outcome(
        &failures,
        format!("{total} functions, {positives} positive definite, verdicts agree"),
    )
}

fn gns_reconstruction() -> Outcome {
    let mut r = rng(0xacce_0003);
    let groupoids = [
        FiniteGroupoid::pair(2),
        FiniteGroupoid::pair(3),
        bundle2(),
        mixed_bundle(),
        swap_action(),
        weighted_pair3(),
    ];
    let mut failures = Vec::new();
    let (mut worst_gns, mut worst_coeff, mut coeff_checks) = (0.0_f64, 0.0_f64, 0);
    for k in 0..RECONSTRUCTION_SAMPLES {
        let g = &groupoids[k % groupoids.len()];
        let phi = if k % 2 == 0 {
            let xi = random_function(g.arrow_count(), &mut r);
            coefficient_regular(g, &xi, &xi)
        } else {
            random_positive_definite(g, &mut r)
        };
        let scale = phi.max_abs().max(1.0);
        match gns_bundle(g, &phi, PD_TOL) {
            Ok((bundle, xi)) => match coefficient(g, &bundle, &xi, &xi) {
                Ok(back) => {
                    let err = back.max_diff(&phi) / scale;
                    worst_gns = worst_gns.max(err);
                    if err > RECONSTRUCTION_TOL {
                        failures.push(format!("GNS sample {k}: error {err:e}"));
                    }
                }
                Err(e) => failures.push(format!("GNS sample {k}: {e}")),
            },
            Err(e) => failures.push(format!("GNS sample {k}: {e}")),
        }
        if g.has_unit_weights() {
            coeff_checks += 1;
            match pd_to_coefficient(g, &phi, PD_TOL) {
                Ok(xi) => {
                    let err = coefficient_regular(g, &xi, &xi).max_diff(&phi) / scale;
                    worst_coeff = worst_coeff.max(err);
                    if err > RECONSTRUCTION_TOL {
                        failures.push(format!("regular sample {k}: error {err:e}"));
                    }
                }
                Err(e) => failures.push(format!("regular sample {k}: {e}")),
            }
        }
    }
    outcome(
        &failures,
        format!(
            "{RECONSTRUCTION_SAMPLES} GNS (worst {worst_gns:.1e}), {coeff_checks} regular coefficients (worst {worst_coeff:.1e})"
        ),
    )
}

fn operator_identities() -> Outcome {
    let mut r = rng(0xacce_0004);
    let groupoids = [
        ("G_3", FiniteGroupoid::pair(3)),
        ("Z/2+Z/3 bundle", mixed_bundle()),
        ("weighted G_3", weighted_pair3()),
        ("swap action", swap_action()),
    ];
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    let mut worst = [0.0_f64; 5];
    let names = ["T(f*g*)", "alpha_T", "<L_F xi, eta>", "module laws", "bisection laws"];
    let mut record = |which: usize, gap: f64, scale: f64, what: String| {
        let err = gap / scale.max(1.0);
        worst[which] = worst[which].max(err);
        if err > IDENTITY_TOL {
            failures.push(format!("{} on {what}: {err:e}", names[which]));
        }
    };
    for (name, g) in &groupoids {
        let n = g.arrow_count();
        let vn = von_neumann_algebra(g);
        let bisections = enumerate_bisections(g);
        for _ in 0..IDENTITY_TRIALS {
            let f = random_function(n, &mut r);
            let h = random_function(n, &mut r);
            for t in vn.elements() {
                // conj(T(f * h*)) on units against <Tf, h>
                let tf = t.apply(&f);
                let inner = d_inner(g, &tf, &h);
                let lhs: Vec<C64> = unit_values(g, &t.apply(&convolve(g, &f, &star(g, &h))))
                    .into_iter()
                    .map(|z| z.conj())
                    .collect();
                let scale = tf.max_abs() * h.max_abs() * n as f64;
                record(0, max_gap(&lhs, inner.values()), scale, name.to_string());
                match alpha_from_t(g, &t) {
                    Ok(alpha) => {
                        let v = alpha.apply(&convolve(g, &h, &star(g, &f)));
                        record(1, max_gap(v.values(), inner.values()), scale, name.to_string());
                    }
                    Err(e) => errors.push(format!("alpha_T on {name}: {e}")),
                }
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
            record(2, max_gap(lhs.values(), &rhs), scale, name.to_string());

            let b = random_real_unit_function(g.unit_count(), -2.0, 2.0, &mut r);
            let fh = convolve(g, &f, &h);
            let scale = fh.max_abs() * 2.0;
            let right = module_action(g, &b, &fh, Side::Right)
                .max_diff(&convolve(g, &module_action(g, &b, &f, Side::Right), &h));
            let left = module_action(g, &b, &fh, Side::Left)
                .max_diff(&convolve(g, &f, &module_action(g, &b, &h, Side::Left)));
            record(3, right.max(left), scale, name.to_string());

            for a in &bisections {
                let left = act_bisection(g, a, &fh, Side::Left)
                    .max_diff(&convolve(g, &f, &act_bisection(g, a, &h, Side::Left)));
                let right = act_bisection(g, a, &fh, Side::Right)
                    .max_diff(&convolve(g, &act_bisection(g, a, &f, Side::Right), &h));
                record(4, left.max(right), fh.max_abs(), name.to_string());
            }
        }
    }
    let summary = names
        .iter()
        .zip(worst)
        .map(|(n, w)| format!("{n} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    failures.extend(errors);
    outcome(&failures, format!("4 groupoids; worst relative errors: {summary}"))
}

fn norm_chain() -> Outcome {
    let mut r = rng(0xacce_0005);
    let mut failures = Vec::new();
    let mut sdp_time = Duration::ZERO;
    let (mut worst_cb, mut worst_ag, mut samples) = (0.0_f64, 0.0_f64, 0);
    for n in [2usize, 3] {
        let g = FiniteGroupoid::pair(n);
        for k in 0..NORM_SAMPLES_PER_PAIR {
            let phi = random_function(g.arrow_count(), &mut r);
            let sup = phi.max_abs();
            let start = Instant::now();
            let cb = schur_cb_norm(&pair_matrix(&g, &phi).unwrap());
            let bg = bg_norm(&g, &phi);
            let ag = ag_norm_bounds(&g, &phi);
            sdp_time += start.elapsed();
            let (cb, bg, (lo, hi)) = match (cb, bg, ag) {
                (Ok(cb), Ok(bg), Ok(ag)) => (cb.value, bg.value, (ag.0.value, ag.1.value)),
                (cb, bg, ag) => {
                    failures.push(format!(
                        "G_{n} sample {k}: solver error {:?}",
                        (cb.err(), bg.err(), ag.err())
                    ));
                    continue;
                }
            };
            samples += 1;
            let slack = CHAIN_SLACK * sup.max(1.0);
            if !(sup <= cb + slack && cb <= bg + slack && bg <= hi + slack) {
                failures.push(format!(
                    "G_{n} sample {k}: chain sup {sup} cb {cb} bg {bg} ag {hi}"
                ));
            }
            worst_cb = worst_cb.max((cb - bg).abs());
            if (cb - bg).abs() > CB_BG_TOL {
                failures.push(format!("G_{n} sample {k}: cb {cb} bg {bg}"));
            }
            worst_ag = worst_ag.max(hi - lo);
            if hi - lo > AG_BRACKET_TOL || lo > bg + CB_BG_TOL || hi < bg - CB_BG_TOL {
                failures.push(format!("G_{n} sample {k}: ag bracket [{lo}, {hi}] vs {bg}"));
            }
        }
    }

    let groupoids = [
        FiniteGroupoid::pair(2),
        FiniteGroupoid::pair(3),
        bundle2(),
        bundle3(),
        mixed_bundle(),
        weighted_pair3(),
        swap_action(),
    ];
    let mut worst_pd = 0.0_f64;
    for (i, g) in groupoids.iter().enumerate() {
        for k in 0..4 {
            let phi = random_positive_definite(g, &mut r);
            let top = unit_values(g, &phi).iter().map(|z| z.re).fold(0.0, f64::max);
            let start = Instant::now();
            let bg = bg_norm(g, &phi);
            sdp_time += start.elapsed();
            match bg {
                Ok(c) => {
                    worst_pd = worst_pd.max((c.value - top).abs());
                    if (c.value - top).abs() > PD_NORM_TOL {
                        failures.push(format!("PD groupoid {i} sample {k}: bg {} vs {top}", c.value));
                    }
                }
                Err(e) => failures.push(format!("PD groupoid {i} sample {k}: {e}")),
            }
        }
    }
    if sdp_time > SDP_BUDGET {
        failures.push(format!("SDP time {sdp_time:?}"));
    }
    outcome(
        &failures,
        format!(
            "{samples} chains, max |cb-bg| {worst_cb:.1e}, max ag gap {worst_ag:.1e}, PD max error {worst_pd:.1e}, SDP time {sdp_time:.2?}"
        ),
    )
}

fn operator_bounds() -> Outcome {
    let mut r = rng(0xacce_0006);
    let groupoids = [
        FiniteGroupoid::pair(3),
        mixed_bundle(),
        weighted_pair3(),
        swap_action(),
    ];
    let mut failures = Vec::new();
    let mut probes = 0;
    let mut worst_cstar = 0.0_f64;
    for (i, g) in groupoids.iter().enumerate() {
        let n = g.arrow_count();
        for k in 0..OPERATOR_PROBES / groupoids.len() / 10 {
            let f = random_function(n, &mut r);
            let bound = i_norm(g, &f);
            match adjointable_norm(g, &right_op(g, &f)) {
                Ok(v) if v <= bound * (1.0 + OPERATOR_BOUND_SLACK) => {}
                Ok(v) => failures.push(format!("groupoid {i} sample {k}: ‖R_F‖ {v} > {bound}")),
                Err(e) => failures.push(format!("groupoid {i} sample {k}: {e}")),
            }
            let l = left_op(g, &f);
            let bound_r = i_norm_r(g, &f);
            for _ in 0..10 {
                let xi = random_function(n, &mut r);
                probes += 1;
                let lhs = module_norm(g, &l.apply(&xi));
                let rhs = bound_r * module_norm(g, &xi);
                if lhs > rhs * (1.0 + OPERATOR_BOUND_SLACK) {
                    failures.push(format!("groupoid {i}: ‖L_F ξ‖ {lhs} > {rhs}"));
                }
            }
            let red = reduced_norm(g, &f);
            let sq = reduced_norm(g, &convolve(g, &star(g, &f), &f));
            let err = (sq - red * red).abs() / (red * red).max(1.0);
            worst_cstar = worst_cstar.max(err);
            if err > CSTAR_TOL {
                failures.push(format!("groupoid {i} sample {k}: ‖F*F‖ {sq} vs ‖F‖² {}", red * red));
            }
        }
    }
    outcome(
        &failures,
        format!("{probes} probes, C*-identity worst relative error {worst_cstar:.1e}"),
    )
}

fn duality() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let groupoids = [
        ("G_2", FiniteGroupoid::pair(2)),
        ("G_3", FiniteGroupoid::pair(3)),
        ("G_4", FiniteGroupoid::pair(4)),
        ("Z/2+Z/3 bundle", mixed_bundle()),
        ("swap action", swap_action()),
    ];
    let mut counts = Vec::new();
    for (name, g) in &groupoids {
        let report = duality_round_trip(g);
        if !report.passes() {
            failures.push(format!("{name}: round trip failed"));
        }
        counts.push(format!("{name} {}", report.bisections.len()));
    }
    for n in 2..=4usize {
        let g = FiniteGroupoid::pair(n);
        let gamma = enumerate_bisections(&g);
        let factorial: usize = (1..=n).product();
        let perms: BTreeSet<Vec<usize>> =
            gamma.iter().map(|a| a.source_permutation(&g)).collect();
        let all: BTreeSet<Vec<usize>> = permutations(n).into_iter().collect();
        if gamma.len() != factorial || perms != all {
            failures.push(format!("G_{n}: |Γ| = {}, not a bijection onto S_{n}", gamma.len()));
        }
        for a in &gamma {
            for b in &gamma {
                let (sa, sb) = (a.source_permutation(&g), b.source_permutation(&g));
                let composed: Vec<usize> = sa.iter().map(|&u| sb[u]).collect();
                if a.product(&g, b).source_permutation(&g) != composed {
                    failures.push(format!("G_{n}: product of {:?} and {:?}", a.picks(), b.picks()));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > DUALITY_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(
        &failures,
        format!("bisections: {}; S_n tables match; {:.2?}", counts.join(", "), elapsed),
    )
}

fn negative_controls() -> Outcome {
    let mut failures = Vec::new();
    let g = FiniteGroupoid::pair(3);
    let gamma = enumerate_bisections(&g);
    let a = gamma.iter().find(|a| a.picks().iter().all(|&x| !g.is_unit(x))).unwrap();
    let b = gamma.iter().find(|b| *b != a).unwrap();
    let alpha = alpha_from_bisection(&g, a);
    let beta = beta_from_bisection(&g, a);

    let swapped = verify_mmm(&g, &alpha, &beta_from_bisection(&g, b));
    if swapped.j.is_ok() {
        failures.push("mismatched beta still pairs with alpha".into());
    }
    match reconstruct_bisection(&g, &alpha, &beta_from_bisection(&g, b)) {
        Err(Error::Reconstruction { unit, .. }) if unit < g.unit_count() => {}
        other => failures.push(format!("mismatched beta reconstructs: {other:?}")),
    }

    let mut zeroed = alpha.matrix.clone();
    zeroed.row_mut(1).fill(C64::new(0.0, 0.0));
    let report = verify_mmm(&g, &ModuleMap::new(zeroed, Side::Right), &beta);
    if report.alpha_vanishes_at != vec![1] {
        failures.push(format!("zeroed row: vanishing units {:?}", report.alpha_vanishes_at));
    }

    let x = a.pick(0);
    let mut scaled = alpha.matrix.clone();
    scaled.column_mut(x).scale_mut(2.0);
    let report = verify_mmm(&g, &ModuleMap::new(scaled, Side::Right), &beta);
    match report.alpha_multiplicative {
        Some((p, q)) if p == x || q == x => {}
        other => failures.push(format!("scaled column: multiplicativity witness {other:?}")),
    }

    let z = (0..g.arrow_count()).find(|&z| g.range(z) != 0).unwrap();
    let mut leaked = alpha.matrix.clone();
    leaked[(0, z)] = C64::new(1.0, 0.0);
    let report = verify_mmm(&g, &ModuleMap::new(leaked, Side::Right), &beta);
    if report.alpha_module_law != Some((0, z)) {
        failures.push(format!("leaked entry: module-law witness {:?}", report.alpha_module_law));
    }

    let mut r = rng(0xacce_0008);
    let mut witnesses = 0;
    for g in [FiniteGroupoid::pair(3), mixed_bundle(), weighted_pair3()] {
        let mut found = 0;
        while found < 10 {
            let phi = random_hermitian_function(&g, &mut r);
            let verdict = is_positive_definite(&g, &phi, PD_TOL);
            if verdict.positive {
                continue;
            }
            found += 1;
            let Some(w) = verdict.witness else {
                failures.push("non-PD verdict without witness".into());
                continue;
            };
            let form = quadratic_form(&g, &phi, w.unit, &w.alpha);
            let integral = integral_form(&g, &phi, w.unit, &w.alpha);
            let negative = matches!(w.kind, WitnessKind::NegativeEigenvalue(l) if l < 0.0);
            if !negative || (form - w.form).norm() > 1e-9 || form.re >= 0.0 || integral.re >= 0.0 {
                failures.push(format!("witness at unit {}: form {form}, kind {:?}", w.unit, w.kind));
            }
            witnesses += 1;
        }
    }

    let pair = FiniteGroupoid::pair(2);
    let mut weights = vec![1.0; pair.arrow_count()];
    weights[pair.unit_arrow(0)] = 2.0;
    match pair.with_arrow_weights(weights) {
        Ok(bad) if bad.validate().has_haar_violation() => {}
        Ok(_) => failures.push("non-invariant weights pass validation".into()),
        Err(e) => failures.push(format!("could not build the corrupted groupoid: {e}")),
    }
    let mut rng_noise = rng(0xacce_0009);
    let perturbed: Vec<f64> = (0..pair.arrow_count())
        .map(|_| rng_noise.gen_range(0.5..1.5))
        .collect();
    if let Ok(bad) = pair.with_arrow_weights(perturbed) {
        if !bad.validate().has_haar_violation() {
            failures.push("random weights pass validation".into());
        }
    }

    outcome(
        &failures,
        format!("4 corrupted module maps rejected, {witnesses} negative witnesses, Haar violation caught"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("pair groupoid operator space dimensions", structure),
        ("positive definiteness verdicts agree", pd_agreement),
        ("positive definite reconstruction", gns_reconstruction),
        ("operator and module identities", operator_identities),
        ("norm chain and equalities", norm_chain),
        ("convolution operator bounds", operator_bounds),
        ("bisection duality", duality),
        ("negative controls", negative_controls),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        all &= result.pass;
        println!(
            "criterion {} {name}: {} ({})",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
