//! Jet-based quantities against the same pipeline fed with finite-difference jets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::geometry::{christoffel, laplacian_scalar, metric_inverse, riemann, rough_laplacian, GeometryError};
use crate::spec::{CompiledSpec, JetSource, ManifoldSpec};
use crate::statistical::{connections, difference_tensor, tchebychev, StatError};
use crate::tensor::{JetTensor, PointTensor};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

/// Quantities compared, in report order.
pub const QUANTITIES: [&str; 5] = ["christoffel", "riemann-g", "riemann", "laplacian-t", "laplacian-kk"];

/// Values of the compared quantities at one point, flattened.
fn quantities(g: &JetTensor<f64>, c: &JetTensor<f64>) -> std::result::Result<Vec<Vec<f64>>, StatError> {
    let metric = metric_inverse(g)?;
    let gamma = christoffel(&metric)?;
    let r_g = riemann(&gamma)?.value();
    let k = difference_tensor(&metric, c)?;
    let (a, _) = connections(&gamma, &k);
    let r = riemann(&a)?.value();
    let (t, _) = tchebychev(&metric, &k)?;
    let lap_t: PointTensor<f64> = rough_laplacian(&t, &metric, &gamma)?.value();
    let kk: Jet<f64> = metric.inner(&k, &k).map_err(GeometryError::from)?;
    let lap_kk = laplacian_scalar(&kk, &metric, &gamma)?.value();
    Ok(vec![
        gamma.value().data().to_vec(),
        r_g.data().to_vec(),
        r.data().to_vec(),
        lap_t.data().to_vec(),
        vec![lap_kk],
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityDeviation {
    pub name: String,
    /// `max |fd − jet| / max(1, max |jet|)` over all points.
    pub deviation: f64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub schema: u32,
    pub spec_hash: String,
    pub step: f64,
    pub threshold: f64,
    pub points: usize,
    pub quantities: Vec<QuantityDeviation>,
    pub max_deviation: f64,
    pub pass: bool,
}

impl CrosscheckReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn relative(exact: &[f64], approx: &[f64]) -> f64 {
    let scale = exact.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let diff = exact.iter().zip(approx).fold(0.0_f64, |m, (a, b)| {
        let d = (a - b).abs();
        if d.is_nan() {
            f64::INFINITY
        } else {
            m.max(d)
        }
    });
    diff / scale
}

pub fn crosscheck_compiled(compiled: &CompiledSpec, points: &[Vec<f64>], step: f64, threshold: f64) -> Result<CrosscheckReport> {
    compiled.probe(points)?;
    let per_point: Vec<Vec<f64>> = points
        .par_iter()
        .map(|p| {
            let point_err = |source| Error::Point {
                point: p.clone(),
                source,
            };
            let (g, c) = compiled.jets::<f64>(p, JetSource::Exact { order: 3 })?;
            let exact = quantities(&g, &c).map_err(point_err)?;
            let (g, c) = compiled.jets::<f64>(p, JetSource::FiniteDifference { order: 2, h: step })?;
            let approx = quantities(&g, &c).map_err(point_err)?;
            Ok(exact.iter().zip(&approx).map(|(e, a)| relative(e, a)).collect())
        })
        .collect::<Result<_>>()?;
    let quantities: Vec<QuantityDeviation> = QUANTITIES
        .iter()
        .enumerate()
        .map(|(q, name)| {
            let (i, dev) = per_point
                .iter()
                .enumerate()
                .fold((0, 0.0_f64), |(bi, bv), (i, row)| if row[q] > bv { (i, row[q]) } else { (bi, bv) });
            QuantityDeviation {
                name: name.to_string(),
                deviation: dev,
                argmax: points[i].clone(),
            }
        })
        .collect();
    let max_deviation = quantities.iter().map(|q| q.deviation).fold(0.0, f64::max);
    Ok(CrosscheckReport {
        schema: crate::report::SCHEMA_VERSION,
        spec_hash: compiled.spec().content_hash(),
        step,
        threshold,
        points: points.len(),
        quantities,
        max_deviation,
        pass: max_deviation <= threshold,
    })
}

/// Runs the cross-check on the spec's default sample.
pub fn crosscheck(spec: &ManifoldSpec, step: f64, threshold: f64) -> Result<CrosscheckReport> {
    let compiled = spec.compile()?;
    // keep every stencil inside the box the spec was validated on
    let points = compiled.sample_points(None, None);
    crosscheck_compiled(&compiled, &points, step, threshold)
}
