//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{builtin, max_over, polynomial_instances, sample, Sampled, CENTROAFFINE};
use statgeom::builtins::{self, BuiltinInstance};
use statgeom::crosscheck::{crosscheck, DEFAULT_STEP, DEFAULT_THRESHOLD};
use statgeom::diagnostics::{summarise, RunOptions};
use statgeom::expr::{parse_expression, ParamMode};
use statgeom::geometry::{christoffel, laplacian_scalar, metric_inverse};
use statgeom::maps::Gate;
use statgeom::report::Status;
use statgeom::spec::JetSource;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

/// Closed forms for the power surface with a = (1, 2): `g`, `Γ` and `η` at `x`.
fn power_surface_closed_forms(x: &[f64]) -> ([f64; 4], [f64; 8], [f64; 2]) {
    let (a1, a2) = (1.0, 2.0);
    let s = a1 + a2 + 1.0;
    let g12 = a1 * a2 / (s * x[0] * x[1]);
    let g = [a1 * (a1 + 1.0) / (s * x[0] * x[0]), g12, g12, a2 * (a2 + 1.0) / (s * x[1] * x[1])];
    let mut gamma = [0.0; 8];
    gamma[0] = -1.0 / x[0]; // Γ¹₁₁
    gamma[7] = -1.0 / x[1]; // Γ²₂₂
    let eta = [(1.0 - a1) / x[0], (1.0 - a2) / x[1]];
    (g, gamma, eta)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Golden reproduction for the power surface with a = (1, 2).
fn criterion_1() -> Outcome {
    let b = builtin("centroaffine-1-2");
    let (s, elapsed) = timed(|| sample(&b.spec));
    let (mut g, mut gamma, mut eta) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (p, a) in s.points.iter().zip(&s.analyses) {
        let (g0, gamma0, eta0) = power_surface_closed_forms(p);
        g = g.max(max_diff(a.geometry.g.data(), &g0));
        gamma = gamma.max(max_diff(a.geometry.christoffel.data(), &gamma0));
        eta = eta.max(max_diff(a.statistical.tchebychev_covector.data(), &eta0));
    }
    let op = max_over(&s.analyses, |a| a.statistical.tchebychev_operator.max_abs());
    let pass = s.points.len() >= 100 && g <= 1e-10 && gamma <= 1e-10 && eta <= 1e-10 && op <= 1e-8 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "{} points: |g| {g:.1e}, |Γ| {gamma:.1e}, |η| {eta:.1e}, |∇T| {op:.1e}, {:.0} ms",
            s.points.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

/// Bi-tension identities on random polynomial cubic forms.
fn criterion_2(poly: &[(BuiltinInstance, Sampled)], elapsed: Duration) -> Outcome {
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let mut flag_mismatch = 0;
    for (b, s) in poly {
        worst_a = worst_a.max(max_over(&s.analyses, |a| a.residuals.main1_a));
        worst_b = worst_b.max(max_over(&s.analyses, |a| a.residuals.main1_b));
        let r = summarise(&b.spec, &s.points, &s.analyses, &RunOptions::default());
        if r.main1.by_tchebychev != r.main1.by_bitension {
            flag_mismatch += 1;
        }
    }
    let pass = poly.len() == 20 && worst_a <= 1e-8 && worst_b <= 1e-8 && flag_mismatch == 0 && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "{} instances: resA {worst_a:.1e}, resB {worst_b:.1e}, flag mismatches {flag_mismatch}, {:.0} ms",
            poly.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

/// `‖τ̂ − (τ + τ̄)/2‖` on the instances of criteria 1 and 2.
fn criterion_3(golden: &Sampled, poly: &[(BuiltinInstance, Sampled)]) -> Outcome {
    let worst = poly
        .iter()
        .map(|(_, s)| s)
        .chain(std::iter::once(golden))
        .map(|s| max_over(&s.analyses, |a| a.residuals.difftension))
        .fold(0.0, f64::max);
    outcome(worst <= 1e-12, format!("max {worst:.1e} over {} instances", poly.len() + 1))
}

/// Semi-equiaffine positives and a negative control.
fn criterion_4() -> Outcome {
    let mut names = common::flat_constant_names();
    names.extend(CENTROAFFINE.iter().map(|s| s.to_string()));
    let mut wrong = Vec::new();
    for name in &names {
        let b = builtin(name);
        let s = sample(&b.spec);
        let r = summarise(&b.spec, &s.points, &s.analyses, &RunOptions::default());
        if !r.flags.semi_equiaffine {
            wrong.push(name.clone());
        }
    }
    let neg = builtins::flat_polynomial_cubic(1);
    let s = sample(&neg.spec);
    let r = summarise(&neg.spec, &s.points, &s.analyses, &RunOptions::default());
    let negative_ok = !r.flags.semi_equiaffine && r.main1.by_tchebychev == Gate::Fail && r.main1.by_bitension == Gate::Fail;
    outcome(
        wrong.is_empty() && negative_ok,
        format!("{} positives, wrong: {wrong:?}; negative control false: {negative_ok}", names.len()),
    )
}

/// Constant curvature ±1 and the scalar relation on the power surfaces.
fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for name in CENTROAFFINE {
        let b = builtin(name);
        let s = sample(&b.spec);
        let r = summarise(&b.spec, &s.points, &s.analyses, &RunOptions::default());
        let fit = r.curvature_fit.clone().expect("m = 2");
        let sign_ok = (fit.lambda.abs() - 1.0).abs() <= 1e-6 && fit.residual <= 1e-6;
        let scalar = max_over(&s.analyses, |a| a.scalar_relation(fit.lambda));
        pass &= sign_ok && scalar <= 1e-6;
        details.push(format!("{name}: λ* {:+.6} (fit {:.1e}), scalar {scalar:.1e}", fit.lambda, fit.residual));
    }
    outcome(pass, details.join("; "))
}

/// First eigenfunction of the round sphere.
fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in ["sphere-2-1", "sphere-3-1", "sphere-2-4"] {
        let b = builtin(name);
        let eig = b.eigenfunction.as_ref().expect("sphere eigenfunction");
        let compiled = b.spec.compile().unwrap();
        let params: Vec<(String, f64)> = b.spec.parameters.iter().map(|(k, v)| (k.clone(), *v)).collect();
        let f = parse_expression(&eig.expression, &b.spec.coordinates, &params, ParamMode::Substitute).unwrap();
        for p in compiled.sample_points(None, None).iter().take(100) {
            let (g, _) = compiled.jets::<f64>(p, JetSource::Exact { order: 3 }).unwrap();
            let metric = metric_inverse(&g).unwrap();
            let gamma = christoffel(&metric).unwrap();
            let lap = laplacian_scalar(&f.eval_jet(p, 3).unwrap(), &metric, &gamma).unwrap().value();
            let expected = eig.eigenvalue * f.eval(p).unwrap();
            worst = worst.max((lap - expected).abs() / expected.abs().max(1.0));
            count += 1;
        }
    }
    outcome(worst <= 1e-6, format!("{count} points: max relative {worst:.1e}"))
}

/// The Laplacian identity for `g(K, K)`.
fn criterion_7() -> Outcome {
    let mut centro: f64 = 0.0;
    let mut gated = true;
    for name in CENTROAFFINE {
        let b = builtin(name);
        let s = sample(&b.spec);
        let r = summarise(&b.spec, &s.points, &s.analyses, &RunOptions::default());
        gated &= r.check("lapc").is_some_and(|c| c.status == Status::Pass);
        centro = centro.max(max_over(&s.analyses, |a| a.residuals.lapc.residual()));
    }
    let mut flat_terms: f64 = 0.0;
    let mut names = common::flat_constant_names();
    names.push("flat-c111".into());
    for name in &names {
        let s = sample(&builtin(name).spec);
        flat_terms = flat_terms.max(max_over(&s.analyses, |a| {
            let t = a.residuals.lapc;
            t.laplacian_kk.abs().max(t.curvature_term.abs()).max(t.gradient_term.abs())
        }));
    }
    outcome(
        centro <= 1e-6 && flat_terms <= 1e-10 && gated,
        format!("power surfaces {centro:.1e} (applicable: {gated}); flat terms {flat_terms:.1e}"),
    )
}

/// Finite-difference cross-check on every builtin.
fn criterion_8() -> Outcome {
    let mut worst = (String::new(), 0.0_f64);
    let mut all = true;
    for b in builtins::catalog() {
        let r = crosscheck(&b.spec, DEFAULT_STEP, DEFAULT_THRESHOLD).unwrap();
        all &= r.pass;
        if r.max_deviation >= worst.1 {
            worst = (b.name.clone(), r.max_deviation);
        }
    }
    outcome(all && worst.1 <= 1e-4, format!("max relative deviation {:.1e} ({})", worst.1, worst.0))
}

/// Identity battery over suites 1 to 6.
fn criterion_9(poly: &[(BuiltinInstance, Sampled)]) -> Outcome {
    let mut names: Vec<String> = CENTROAFFINE.iter().map(|s| s.to_string()).collect();
    names.extend(common::flat_constant_names());
    names.extend(["sphere-2-1", "sphere-3-1", "sphere-2-4"].map(String::from));
    let sets: Vec<Sampled> = names.iter().map(|n| sample(&builtin(n).spec)).collect();
    let checks: [(&str, fn(&statgeom::PointAnalysis64) -> f64); 8] = [
        ("conjugate formula", |a| a.residuals.conjugate_formula),
        ("Levi-Civita mean", |a| a.residuals.levi_civita_mean),
        ("curvature pairing", |a| a.residuals.curvature_pairing),
        ("interchange sum", |a| a.residuals.interchange_sum),
        ("duality", |a| a.residuals.duality),
        ("first Bianchi", |a| a.residuals.bianchi),
        ("metricity", |a| a.residuals.metricity),
        ("Laplacian interchange", |a| a.residuals.laplacian_interchange),
    ];
    let mut worst = ("", 0.0_f64);
    let mut points = 0;
    for s in sets.iter().chain(poly.iter().map(|(_, s)| s)) {
        points += s.analyses.len();
        for (name, f) in &checks {
            let v = max_over(&s.analyses, f);
            if v >= worst.1 {
                worst = (name, v);
            }
        }
    }
    outcome(
        worst.1 <= 1e-8,
        format!("{} instances, {points} points: worst {} {:.1e}", sets.len() + poly.len(), worst.0, worst.1),
    )
}

fn main() -> ExitCode {
    let golden = sample(&builtin("centroaffine-1-2").spec);
    let (poly, poly_elapsed) = timed(|| {
        polynomial_instances(20)
            .into_iter()
            .map(|b| {
                let s = sample(&b.spec);
                (b, s)
            })
            .collect::<Vec<_>>()
    });
    let results = [
        ("golden reproduction (power surface a = (1, 2))", criterion_1()),
        ("bi-tension identities on random cubic forms", criterion_2(&poly, poly_elapsed)),
        ("tension average", criterion_3(&golden, &poly)),
        ("semi-equiaffine positives and negative control", criterion_4()),
        ("constant curvature and scalar relation", criterion_5()),
        ("sphere first eigenfunction", criterion_6()),
        ("Laplacian of g(K, K)", criterion_7()),
        ("finite-difference cross-check", criterion_8()),
        ("identity battery", criterion_9(&poly)),
    ];
    let mut failed = 0;
    for (i, (title, o)) in results.iter().enumerate() {
        println!("criterion {}: {} - {title}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria fail", results.len());
        ExitCode::FAILURE
    }
}
