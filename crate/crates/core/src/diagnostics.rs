//! The sampled diagnostic pipeline behind `statgeom run`.

use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::{PointAnalysis, INPUT_ORDER};
use crate::error::{Error, Result};
use crate::maps::{Gate, SemiEquiaffine};
use crate::report::{
    CheckKind, CheckResult, CurvatureFitReport, DiagnosticsReport, Flags, Main1Equivalence, SampleInfo,
    SymmetricRicci, SCHEMA_VERSION,
};
use crate::spec::{CompiledSpec, JetSource, ManifoldSpec};
use crate::statistical::constant_curvature_fit;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub tolerance: f64,
    /// Overrides the spec's sample count.
    pub samples: Option<usize>,
    /// Overrides the spec's seed.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            tolerance: DEFAULT_TOLERANCE,
            samples: None,
            seed: None,
        }
    }
}

/// Evaluates the full pipeline at every point, in point order.
pub fn analyse_points(compiled: &CompiledSpec, points: &[Vec<f64>]) -> Result<Vec<PointAnalysis<f64>>> {
    compiled.probe(points)?;
    points
        .par_iter()
        .map(|p| {
            let (g, c) = compiled.jets::<f64>(p, JetSource::Exact { order: INPUT_ORDER })?;
            PointAnalysis::new(p, &g, &c).map_err(|source| Error::Point {
                point: p.clone(),
                source,
            })
        })
        .collect()
}

pub fn run(spec: &ManifoldSpec, opts: &RunOptions) -> Result<DiagnosticsReport> {
    let start = Instant::now();
    let compiled = spec.compile()?;
    let points = compiled.sample_points(opts.samples, opts.seed);
    let analyses = analyse_points(&compiled, &points)?;
    let mut report = summarise(spec, &points, &analyses, opts);
    report.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Reduces per-point analyses into a report; `runtime_ms` is left at zero.
pub fn summarise(
    spec: &ManifoldSpec,
    points: &[Vec<f64>],
    analyses: &[PointAnalysis<f64>],
    opts: &RunOptions,
) -> DiagnosticsReport {
    let tol = opts.tolerance;
    let col = |f: &dyn Fn(&PointAnalysis<f64>) -> f64| -> Vec<f64> { analyses.iter().map(f).collect() };
    let check = |name: &str, kind: CheckKind, values: &[f64]| CheckResult::from_samples(name, kind, points, values, tol);

    let mut checks = Vec::new();
    let identities: [(&str, &dyn Fn(&PointAnalysis<f64>) -> f64); 16] = [
        ("codazzi", &|a| a.residuals.codazzi),
        ("duality", &|a| a.residuals.duality),
        ("conjugate-formula", &|a| a.residuals.conjugate_formula),
        ("levi-civita-mean", &|a| a.residuals.levi_civita_mean),
        ("curvature-pairing", &|a| a.residuals.curvature_pairing),
        ("interchange-sum", &|a| a.residuals.interchange_sum),
        ("first-bianchi", &|a| a.residuals.bianchi),
        ("metricity", &|a| a.residuals.metricity),
        ("laplacian-interchange", &|a| a.residuals.laplacian_interchange),
        ("conjugation-involution", &|a| a.residuals.involution),
        ("curvature-trace", &|a| a.residuals.curvature_trace),
        ("tension", &|a| a.residuals.tension),
        ("difftension", &|a| a.residuals.difftension),
        ("bitension-paths", &|a| a.residuals.bitension_paths),
        ("main1-difference", &|a| a.residuals.main1_a),
        ("main1-sum", &|a| a.residuals.main1_b),
    ];
    for (name, f) in identities {
        checks.push(check(name, CheckKind::Identity, &col(f)));
    }

    let t1 = col(&|a| a.residuals.t1);
    let t2 = col(&|a| a.residuals.t2);
    let tau2 = col(&|a| a.residuals.tau2);
    let tau2_bar = col(&|a| a.residuals.tau2_bar);
    let t_norm = col(&|a| a.residuals.tchebychev_norm);
    let t_op = col(&|a| a.residuals.tchebychev_operator_norm);
    let conj = col(&|a| a.residuals.conjugate_symmetry.max());
    let ric_asym = col(&|a| a.residuals.ricci_asymmetry);
    let closed = col(&|a| a.residuals.tchebychev_closedness);
    let conditions: [(&str, &[f64]); 12] = [
        ("t1", &t1),
        ("t2", &t2),
        ("bitension", &tau2),
        ("bitension-conjugate", &tau2_bar),
        ("tchebychev", &t_norm),
        ("tchebychev-operator", &t_op),
        ("conjugate-symmetry", &conj),
        ("conjugate-symmetry-r-l", &col(&|a| a.residuals.conjugate_symmetry.r_minus_l)),
        ("conjugate-symmetry-r-rbar", &col(&|a| a.residuals.conjugate_symmetry.r_minus_r_bar)),
        ("conjugate-symmetry-nabla-k", &col(&|a| a.residuals.conjugate_symmetry.nabla_k_asymmetry)),
        ("ricci-asymmetry", &ric_asym),
        ("tchebychev-closedness", &closed),
    ];
    for (name, values) in conditions {
        checks.push(check(name, CheckKind::Condition, values));
    }

    let m = spec.dim;
    let fit = if m >= 2 {
        constant_curvature_fit(analyses.iter().map(|a| (&a.statistical.curvatures.r, &a.geometry.g))).ok()
    } else {
        None
    };
    let constant_curvature = fit.is_some_and(|f| f.is_constant());
    match fit {
        Some(f) => {
            let per_point: Vec<f64> = analyses
                .iter()
                .map(|a| {
                    let unit = crate::statistical::unit_curvature(&a.geometry.g).scaled(f.lambda);
                    a.statistical.curvatures.r.max_abs_diff(&unit)
                })
                .collect();
            let mut c = check("constant-curvature", CheckKind::Condition, &per_point);
            c.status = if constant_curvature {
                crate::report::Status::Pass
            } else {
                crate::report::Status::Fail
            };
            checks.push(c);
        }
        None => checks.push(CheckResult::not_applicable("constant-curvature", CheckKind::Condition)),
    }

    // hypothesis-gated results
    if constant_curvature {
        let lambda = fit.expect("fit present").lambda;
        checks.push(check("scalar-relation", CheckKind::Conditional, &col(&|a| a.scalar_relation(lambda))));
    } else {
        checks.push(CheckResult::not_applicable("scalar-relation", CheckKind::Conditional));
    }
    if max_of(&conj) <= tol && max_of(&t_op) <= tol {
        checks.push(check("lapc", CheckKind::Conditional, &col(&|a| a.residuals.lapc.residual())));
    } else {
        checks.push(CheckResult::not_applicable("lapc", CheckKind::Conditional));
    }
    if max_of(&t2) <= tol && max_of(&t_norm) > tol {
        checks.push(check("geodesic-potential", CheckKind::Conditional, &col(&|a| a.residuals.geodesic_potential)));
    } else {
        checks.push(CheckResult::not_applicable("geodesic-potential", CheckKind::Conditional));
    }

    let semi = SemiEquiaffine::from_maxima(max_of(&t1), max_of(&t2), max_of(&tau2), max_of(&tau2_bar), tol);
    let ricci_symmetric = Gate::classify(max_of(&ric_asym), tol);
    let tchebychev_closed = Gate::classify(max_of(&closed), tol);
    let symric_consistent = ricci_symmetric == tchebychev_closed
        || ricci_symmetric == Gate::Inconclusive
        || tchebychev_closed == Gate::Inconclusive;

    let flags = Flags {
        codazzi: max_of(&col(&|a| a.residuals.codazzi)) <= tol,
        ric_symmetric: ricci_symmetric == Gate::Pass,
        conjugate_symmetric: max_of(&conj) <= tol,
        equiaffine: max_of(&t_norm) <= tol,
        semi_equiaffine: semi.holds(),
        constant_curvature,
    };
    let s = &spec.sample;
    DiagnosticsReport {
        schema: SCHEMA_VERSION,
        spec: spec.clone(),
        spec_hash: spec.content_hash(),
        tolerance: tol,
        samples: SampleInfo {
            count: opts.samples.unwrap_or(s.count),
            seed: opts.seed.unwrap_or(s.seed),
            points: points.len(),
        },
        curvature_fit: fit.map(|f| CurvatureFitReport {
            lambda: f.lambda,
            residual: f.residual,
            constant: f.is_constant(),
        }),
        flags,
        main1: Main1Equivalence {
            by_tchebychev: semi.by_tchebychev,
            by_bitension: semi.by_bitension,
            consistent: semi.consistent(),
        },
        symmetric_ricci: SymmetricRicci {
            ricci_symmetric,
            tchebychev_closed,
            consistent: symric_consistent,
        },
        checks,
        runtime_ms: 0,
    }
}
